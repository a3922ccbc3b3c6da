//! Shift-frame Monte Carlo of lattice codes under Gaussian shift noise.
//!
//! Each trial draws a displacement, optionally passes it through noisy
//! syndrome-extraction rounds, decodes to the nearest dual-lattice point and
//! records the logical class of the net displacement.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use statrs::function::erf::erfc;

use crate::channels::Quadrature;
use crate::lattice::{LatticeCode, LogicalCoset, ShiftVector};
use crate::quadrature::integrate_2d;
use crate::rng::par_blocks;
use crate::squeezing::normal_interval_mass;
use crate::{centered_mod, Error, Result, SQRT_2PI};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub struct McConfig {
    pub code: LatticeCode,
    pub sigma: f64,
    pub trials: u64,
    pub seed: u64,
    /// Shift noise on each ancilla quadrature; 0 skips syndrome-extraction simulation.
    pub ancilla_sigma: f64,
    /// Finite squeezing of the codewords, folded into the channel as extra shift variance.
    pub squeezing_delta: Option<f64>,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
}

impl McConfig {
    pub fn new(code: LatticeCode, sigma: f64, trials: u64, seed: u64) -> Self {
        McConfig { code, sigma, trials, seed, ancilla_sigma: 0.0, squeezing_delta: None, workers: 0 }
    }

    /// `σ_eff² = σ² + Δ²/2`: a peak of amplitude width `Δ` has position variance `Δ²/2`.
    pub fn effective_sigma(&self) -> f64 {
        let d = self.squeezing_delta.unwrap_or(0.0);
        (self.sigma * self.sigma + 0.5 * d * d).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rate {
    pub estimate: f64,
    pub stderr: f64,
}

impl Rate {
    pub fn binomial(hits: u64, trials: u64) -> Self {
        let p = hits as f64 / trials as f64;
        Rate { estimate: p, stderr: (p * (1.0 - p) / trials as f64).sqrt() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct McResult {
    pub schema_version: u32,
    pub code_descriptor: String,
    pub sigma: f64,
    pub effective_sigma: f64,
    pub ancilla_sigma: f64,
    pub squeezing_delta: Option<f64>,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    pub wall_time_s: f64,
    pub counts: BTreeMap<String, u64>,
    pub rates: BTreeMap<String, Rate>,
    #[serde(skip)]
    pub tally: BTreeMap<LogicalCoset, u64>,
}

impl McResult {
    /// Fraction of trials whose class satisfies `pred`.
    pub fn rate_where(&self, pred: impl Fn(&LogicalCoset) -> bool) -> Rate {
        let hits = self.tally.iter().filter(|(c, _)| pred(c)).map(|(_, n)| n).sum();
        Rate::binomial(hits, self.trials)
    }

    pub fn logical_error_rate(&self) -> Rate {
        self.rate_where(|c| !c.is_identity())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SyndromeRound {
    /// Measured ancilla quadrature, reduced into the centred interval.
    pub syndrome: f64,
    pub residual: (f64, f64),
}

/// One extraction round on a single oscillator.
///
/// `Q`: SUM from data to ancilla, read the ancilla position mod `modulus`, shift the
/// data back by the reading. The data momentum picks up `−v_ancilla`.
/// `P`: SUM from ancilla to data, read the ancilla momentum `v_a − v_d` mod `modulus`,
/// shift the data momentum by the reading. The data position picks up `+u_ancilla`.
pub fn simulate_syndrome_extraction(
    data: (f64, f64),
    ancilla: (f64, f64),
    which: Quadrature,
    modulus: f64,
) -> SyndromeRound {
    let (ud, vd) = data;
    let (ua, va) = ancilla;
    match which {
        Quadrature::Q => {
            let (m, _) = centered_mod(ud + ua, modulus);
            SyndromeRound { syndrome: m, residual: (ud - m, vd - va) }
        }
        Quadrature::P => {
            let (m, _) = centered_mod(va - vd, modulus);
            SyndromeRound { syndrome: m, residual: (ud + ua, vd + m) }
        }
    }
}

/// Position and momentum spacings of the dual lattice of a rectangular
/// single-oscillator code, the moduli of its two syndrome readings.
pub fn syndrome_moduli(code: &LatticeCode) -> Result<(f64, f64)> {
    let m = code.generator();
    if code.modes() != 1 || m[(0, 1)].abs() > 1e-12 || m[(1, 0)].abs() > 1e-12 {
        return Err(Error::Unsupported(
            "syndrome-extraction noise is modelled for rectangular single-oscillator codes only".into(),
        ));
    }
    Ok((SQRT_2PI / m[(1, 1)].abs(), SQRT_2PI / m[(0, 0)].abs()))
}

type Tally = BTreeMap<LogicalCoset, u64>;

fn merge(mut a: Tally, b: Tally) -> Tally {
    for (k, v) in b {
        *a.entry(k).or_default() += v;
    }
    a
}

pub fn run_mc(config: &McConfig) -> Result<McResult> {
    if config.trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    if !(config.sigma > 0.0 && config.sigma.is_finite()) {
        return Err(Error::invalid(format!("σ must be positive, got {}", config.sigma)));
    }
    if !(config.ancilla_sigma >= 0.0 && config.ancilla_sigma.is_finite()) {
        return Err(Error::invalid("ancilla σ must be non-negative"));
    }
    let code = &config.code;
    let modes = code.modes();
    // surfaces dimension limits before any sampling
    code.decode_shift(&ShiftVector::zeros(modes))?;
    let moduli = if config.ancilla_sigma > 0.0 { Some(syndrome_moduli(code)?) } else { None };
    let sigma = config.effective_sigma();
    let sa = config.ancilla_sigma;

    let start = Instant::now();
    let work = |rng: &mut rand_chacha::ChaCha8Rng, count: u64| -> Result<Tally> {
        let mut tally = Tally::new();
        let mut shift = ShiftVector::zeros(modes);
        for _ in 0..count {
            for x in shift.as_mut_slice() {
                *x = sigma * rng.sample::<f64, _>(StandardNormal);
            }
            if let Some((mq, mp)) = moduli {
                let mut a = || sa * rng.sample::<f64, _>(StandardNormal);
                let s = shift.as_slice();
                let q_round = simulate_syndrome_extraction((s[0], s[1]), (a(), a()), Quadrature::Q, mq);
                let p_round = simulate_syndrome_extraction(q_round.residual, (a(), a()), Quadrature::P, mp);
                shift.as_mut_slice().copy_from_slice(&[p_round.residual.0, p_round.residual.1]);
            }
            let d = code.decode_shift(&shift)?;
            *tally.entry(d.logical).or_default() += 1;
        }
        Ok(tally)
    };
    let tally = par_blocks(
        config.trials,
        config.seed,
        config.workers,
        work,
        Ok(Tally::new()),
        |a: Result<Tally>, b: Result<Tally>| Ok(merge(a?, b?)),
    )??;
    let wall_time_s = start.elapsed().as_secs_f64();

    let counts = tally.iter().map(|(c, n)| (c.to_string(), *n)).collect();
    let rates = tally.iter().map(|(c, n)| (c.to_string(), Rate::binomial(*n, config.trials))).collect();
    Ok(McResult {
        schema_version: SCHEMA_VERSION,
        code_descriptor: code.descriptor().to_string(),
        sigma: config.sigma,
        effective_sigma: sigma,
        ancilla_sigma: sa,
        squeezing_delta: config.squeezing_delta,
        trials: config.trials,
        seed: config.seed,
        workers: if config.workers == 0 { rayon::current_num_threads() } else { config.workers },
        wall_time_s,
        counts,
        rates,
        tally,
    })
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!("σ must be positive, got {sigma}")));
    }
    Ok(())
}

/// Probability that a Gaussian shift leaves the half-cell `|u| < α/2`:
/// `erfc(α / (2√2 σ))`.
pub fn analytic_pe_square(sigma: f64, alpha: f64) -> Result<f64> {
    check_sigma(sigma)?;
    if !(alpha > 0.0) {
        return Err(Error::invalid("spacing α must be positive"));
    }
    Ok(erfc(alpha / (2.0 * std::f64::consts::SQRT_2 * sigma)))
}

/// Exact probability that a shift of width `σ` rounds to a multiple of `α` that is
/// not a multiple of `nα`, the logical error rate per quadrature of a square code.
pub fn square_logical_probability(sigma: f64, alpha: f64, n: u64) -> Result<f64> {
    check_sigma(sigma)?;
    let reach = (12.0 * sigma / alpha).ceil() as i64 + 1;
    Ok((-reach..=reach)
        .filter(|m| m.rem_euclid(n as i64) != 0)
        .map(|m| normal_interval_mass((m as f64 - 0.5) * alpha, (m as f64 + 0.5) * alpha, 0.0, sigma))
        .sum())
}

/// Inradius of the hexagonal cell of area `π`.
pub fn hex_inradius() -> f64 {
    (PI / (2.0 * 3f64.sqrt())).sqrt()
}

/// Probability that a Gaussian shift leaves the hexagonal Voronoi cell of the
/// `n = 2` hexagonal code, from twelve right triangles with apex angle 30°.
pub fn analytic_pe_hex(sigma: f64) -> Result<f64> {
    analytic_pe_hex_tol(sigma, 1e-8)
}

pub fn analytic_pe_hex_tol(sigma: f64, tol: f64) -> Result<f64> {
    check_sigma(sigma)?;
    let s2 = 2.0 * sigma * sigma;
    let r = hex_inradius();
    let inner = integrate_2d(
        |x, y| (-(x * x + y * y) / s2).exp(),
        0.0,
        r,
        |_| 0.0,
        |x| x / 3f64.sqrt(),
        tol * PI * s2 / 12.0,
    )?;
    Ok((1.0 - 12.0 / (PI * s2) * inner).max(0.0))
}
