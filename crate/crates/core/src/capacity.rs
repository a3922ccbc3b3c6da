//! Rates, thresholds and capacity bounds for the Gaussian shift channel, and
//! concatenation of single-oscillator codes with the seven-qubit Steane code.

use rand::Rng;
use serde::Serialize;

use crate::mc::{analytic_pe_hex_tol, analytic_pe_square, Rate};
use crate::rng::par_blocks;
use crate::{Error, Result};

/// Per-quadrature error rate at which `1 − 2H₂(p)` vanishes.
pub const CSS_TARGET_PE: f64 = 0.1100;
/// Total error rate of the hexagonal code matched to the square-code threshold.
pub const HEX_TARGET_PE: f64 = 0.1905;
/// Bisection stops once the bracket is narrower than this.
pub const SIGMA_TOL: f64 = 1e-4;

/// `H₂(p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    let h = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    h(p) + h(1.0 - p)
}

/// `1 − 2H₂(p)`, the CSS rate with independent bit and phase errors at rate `p`.
pub fn css_rate(pe: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&pe) {
        return Err(Error::invalid(format!("error rate must lie in [0, 1/2], got {pe}")));
    }
    Ok(1.0 - 2.0 * binary_entropy(pe))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdKind {
    /// Square code per quadrature, against [`CSS_TARGET_PE`].
    SquareCss,
    /// Hexagonal code, total error, against [`HEX_TARGET_PE`].
    HexStabilizer,
}

impl ThresholdKind {
    pub fn default_target(self) -> f64 {
        match self {
            ThresholdKind::SquareCss => CSS_TARGET_PE,
            ThresholdKind::HexStabilizer => HEX_TARGET_PE,
        }
    }

    /// Error rate of the code at noise `σ`.
    pub fn error_rate(self, sigma: f64, quad_tol: f64) -> Result<f64> {
        match self {
            ThresholdKind::SquareCss => analytic_pe_square(sigma, std::f64::consts::PI.sqrt()),
            ThresholdKind::HexStabilizer => analytic_pe_hex_tol(sigma, quad_tol),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Threshold {
    pub kind: ThresholdKind,
    pub sigma_star: f64,
    pub target_pe: f64,
    pub iterations: u32,
}

/// Bisection for `f(σ) = target` on `[lo, hi]` with `f` increasing.
pub fn bisect_sigma(mut f: impl FnMut(f64) -> Result<f64>, target: f64, mut lo: f64, mut hi: f64) -> Result<(f64, u32)> {
    let (flo, fhi) = (f(lo)? - target, f(hi)? - target);
    if flo > 0.0 || fhi < 0.0 {
        return Err(Error::Bracket(format!("target {target} not bracketed by σ ∈ [{lo}, {hi}]")));
    }
    let mut iterations = 0;
    while hi - lo >= SIGMA_TOL {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Ok((0.5 * (lo + hi), iterations))
}

pub fn threshold_sigma(kind: ThresholdKind) -> Result<Threshold> {
    threshold_sigma_with(kind, kind.default_target(), 1e-8)
}

/// Threshold for an arbitrary target rate, with the quadrature tolerance of the
/// hexagonal integral exposed for stability checks.
pub fn threshold_sigma_with(kind: ThresholdKind, target_pe: f64, quad_tol: f64) -> Result<Threshold> {
    let (sigma_star, iterations) = bisect_sigma(|s| kind.error_rate(s, quad_tol), target_pe, 0.05, 3.0)?;
    Ok(Threshold { kind, sigma_star, target_pe, iterations })
}

/// Chance that a square-code trial suffers an error in either quadrature.
pub fn square_total_pe(sigma: f64) -> Result<f64> {
    let p = analytic_pe_square(sigma, std::f64::consts::PI.sqrt())?;
    Ok(1.0 - (1.0 - p) * (1.0 - p))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacityBounds {
    /// `max(0, log₂(1/σ²))`.
    pub holevo_upper: f64,
    /// `log₂(1/(eσ²))`, or `None` where it is not positive.
    pub coherent_info: Option<f64>,
}

pub fn capacity_bounds(sigma: f64) -> Result<CapacityBounds> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!("σ must be positive, got {sigma}")));
    }
    let s2 = sigma * sigma;
    let ci = (1.0 / (std::f64::consts::E * s2)).log2();
    Ok(CapacityBounds {
        holevo_upper: (1.0 / s2).log2().max(0.0),
        coherent_info: (ci > 0.0).then_some(ci),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub sigma: f64,
    pub pe_square: f64,
    pub pe_hex: f64,
    pub css_rate: Option<f64>,
    pub holevo: f64,
    pub coherent: Option<f64>,
}

pub fn sweep_row(sigma: f64) -> Result<SweepRow> {
    let pe_square = analytic_pe_square(sigma, std::f64::consts::PI.sqrt())?;
    let b = capacity_bounds(sigma)?;
    Ok(SweepRow {
        sigma,
        pe_square,
        pe_hex: analytic_pe_hex_tol(sigma, 1e-8)?,
        css_rate: css_rate(pe_square).ok(),
        holevo: b.holevo_upper,
        coherent: b.coherent_info,
    })
}

/// The `[[7,1,3]]` code: both sectors use the Hamming parity checks
/// `H[r][c] = bit r of (c + 1)`, so syndrome `s ≠ 0` points at qubit `s − 1`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SteaneCode;

pub const STEANE_N: usize = 7;

impl SteaneCode {
    pub fn parity_check(&self) -> [[u8; STEANE_N]; 3] {
        let mut h = [[0u8; STEANE_N]; 3];
        for (r, row) in h.iter_mut().enumerate() {
            for (c, x) in row.iter_mut().enumerate() {
                *x = (((c + 1) >> r) & 1) as u8;
            }
        }
        h
    }

    /// Syndrome of an error pattern given as a 7-bit mask (bit `i` = qubit `i`).
    pub fn syndrome(&self, errors: u8) -> u8 {
        (0..STEANE_N).filter(|i| errors >> i & 1 == 1).fold(0, |s, i| s ^ (i as u8 + 1))
    }

    /// Qubit to flip for a 3-bit syndrome.
    pub fn correction(&self, syndrome: u8) -> Option<usize> {
        debug_assert!(syndrome < 8);
        (syndrome != 0).then(|| syndrome as usize - 1)
    }

    /// Logical operators act on all seven qubits; a residual that passes every
    /// check is logical exactly when its weight is odd.
    pub fn is_logical_failure(&self, errors: u8) -> bool {
        let s = self.syndrome(errors);
        let residual = errors ^ self.correction(s).map_or(0, |q| 1u8 << q);
        residual.count_ones() % 2 == 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SteaneCorrection {
    pub x: Option<usize>,
    pub z: Option<usize>,
}

/// Independent lookup decoding of the two sectors.
pub fn steane_decode(syndrome_x: u8, syndrome_z: u8) -> Result<SteaneCorrection> {
    if syndrome_x >= 8 || syndrome_z >= 8 {
        return Err(Error::invalid("Steane syndromes have three bits"));
    }
    Ok(SteaneCorrection { x: SteaneCode.correction(syndrome_x), z: SteaneCode.correction(syndrome_z) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConcatResult {
    pub pe_x: f64,
    pub pe_z: f64,
    pub trials: u64,
    pub seed: u64,
    pub block_x: Rate,
    pub block_z: Rate,
    pub block: Rate,
}

/// Block failure probability from every one of the `4⁷` per-qubit Pauli patterns.
pub fn concat_exact(pe_x: f64, pe_z: f64) -> f64 {
    let probs = [(1.0 - pe_x) * (1.0 - pe_z), pe_x * (1.0 - pe_z), (1.0 - pe_x) * pe_z, pe_x * pe_z];
    let mut total = 0.0;
    for pattern in 0u32..4u32.pow(STEANE_N as u32) {
        let (mut xs, mut zs, mut p) = (0u8, 0u8, 1.0);
        for q in 0..STEANE_N {
            let e = (pattern >> (2 * q)) & 3;
            p *= probs[e as usize];
            xs |= ((e & 1) as u8) << q;
            zs |= ((e >> 1) as u8) << q;
        }
        if SteaneCode.is_logical_failure(xs) || SteaneCode.is_logical_failure(zs) {
            total += p;
        }
    }
    total
}

/// Concatenated Monte Carlo with per-oscillator rates from the square-code
/// analytic bound at noise `σ`.
pub fn concat_mc(sigma: f64, trials: u64, seed: u64, workers: usize) -> Result<ConcatResult> {
    let pe = analytic_pe_square(sigma, std::f64::consts::PI.sqrt())?;
    concat_mc_with_pe(pe, pe, trials, seed, workers)
}

/// Concatenated Monte Carlo with given per-oscillator bit and phase error rates.
pub fn concat_mc_with_pe(pe_x: f64, pe_z: f64, trials: u64, seed: u64, workers: usize) -> Result<ConcatResult> {
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    for p in [pe_x, pe_z] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!("error rate {p} outside [0, 1]")));
        }
    }
    let work = |rng: &mut rand_chacha::ChaCha8Rng, count: u64| {
        let mut tally = [0u64; 3];
        for _ in 0..count {
            let (mut xs, mut zs) = (0u8, 0u8);
            for q in 0..STEANE_N {
                xs |= (rng.random::<f64>() < pe_x) as u8 * (1 << q);
                zs |= (rng.random::<f64>() < pe_z) as u8 * (1 << q);
            }
            let (fx, fz) = (SteaneCode.is_logical_failure(xs), SteaneCode.is_logical_failure(zs));
            tally[0] += fx as u64;
            tally[1] += fz as u64;
            tally[2] += (fx || fz) as u64;
        }
        tally
    };
    let t = par_blocks(trials, seed, workers, work, [0u64; 3], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2]])?;
    Ok(ConcatResult {
        pe_x,
        pe_z,
        trials,
        seed,
        block_x: Rate::binomial(t[0], trials),
        block_z: Rate::binomial(t[1], trials),
        block: Rate::binomial(t[2], trials),
    })
}
