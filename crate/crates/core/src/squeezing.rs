//! Finitely squeezed codewords and phase-space checks of the ideal code states.
//!
//! An approximate codeword is a comb of Gaussian peaks of width `Δ` at
//! `x_s = (ns + j)α`, weighted by a Gaussian envelope of width `κ⁻¹`:
//! `ψ_j(q) ∝ Σ_s e^{−κ²x_s²/2} e^{−(q−x_s)²/(2Δ²)}`. Its momentum wavefunction is
//! again such a comb, peaked at multiples of `2π/(nα)` with widths `κ` and `Δ⁻¹`
//! exchanged.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use statrs::function::erf::erfc;

use crate::quadrature::{gauss_legendre, integrate};
use crate::{Error, Result};

/// Envelope truncation in units of the envelope width `κ⁻¹`.
pub const ENVELOPE_WIDTHS: f64 = 6.0;

/// Uniform sample positions `start + i·step`, `i < len`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl Grid {
    pub fn new(start: f64, step: f64, len: usize) -> Result<Self> {
        if !(step > 0.0) || len < 2 || !start.is_finite() {
            return Err(Error::Grid(format!("invalid grid start={start} step={step} len={len}")));
        }
        Ok(Grid { start, step, len })
    }

    /// `[-half_width, half_width]` with a sample at zero.
    pub fn symmetric(half_width: f64, step: f64) -> Result<Self> {
        let k = (half_width / step).ceil() as usize;
        Grid::new(-(k as f64) * step, step, 2 * k + 1)
    }

    pub fn point(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(|i| self.point(i))
    }

    pub fn end(&self) -> f64 {
        self.point(self.len - 1)
    }
}

/// Complex amplitudes sampled on a [`Grid`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridWavefunction {
    pub grid: Grid,
    pub amps: Vec<Complex64>,
}

impl GridWavefunction {
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        GridWavefunction { amps: grid.points().map(f).collect(), grid }
    }

    pub fn norm(&self) -> f64 {
        (self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.step).sqrt()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Grid("wavefunction vanishes on the grid".into()));
        }
        self.amps.iter_mut().for_each(|a| *a /= n);
        Ok(self)
    }

    /// `⟨self|other⟩` on the shared grid.
    pub fn inner(&self, other: &GridWavefunction) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::Grid("inner product needs identical grids".into()));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum::<Complex64>() * self.grid.step)
    }

    pub fn density(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianCodeword {
    pub n: u64,
    pub alpha: f64,
    pub delta: f64,
    pub kappa: f64,
    /// Logical amplitudes over `|0̃⟩..|ñ−1⟩`; each word is normalized before mixing.
    pub amplitudes: Vec<Complex64>,
    peaks: Vec<(f64, Complex64)>,
    /// Weight of word `j` in the normalized state, for the resummed momentum form.
    word_weights: Vec<Complex64>,
}

fn pair_overlap(x1: f64, x2: f64, delta: f64) -> f64 {
    delta * PI.sqrt() * (-(x1 - x2).powi(2) / (4.0 * delta * delta)).exp()
}

/// Mass of `N(mu, sigma²)` on `[a, b]`, evaluated on the tail side to keep small values accurate.
pub(crate) fn normal_interval_mass(a: f64, b: f64, mu: f64, sigma: f64) -> f64 {
    let z = |x: f64| (x - mu) / (sigma * std::f64::consts::SQRT_2);
    if a >= mu {
        0.5 * (erfc(z(a)) - erfc(z(b)))
    } else if b <= mu {
        0.5 * (erfc(-z(b)) - erfc(-z(a)))
    } else {
        1.0 - 0.5 * erfc(-z(a)) - 0.5 * erfc(z(b))
    }
}

impl GaussianCodeword {
    pub fn superposition(n: u64, alpha: f64, delta: f64, kappa: f64, amplitudes: Vec<Complex64>) -> Result<Self> {
        if n == 0 || amplitudes.len() != n as usize {
            return Err(Error::invalid("need one amplitude per logical state"));
        }
        for (name, v) in [("alpha", alpha), ("delta", delta), ("kappa", kappa)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if amplitudes.iter().all(|a| a.norm() == 0.0) {
            return Err(Error::invalid("amplitudes are all zero"));
        }
        let reach = ENVELOPE_WIDTHS / kappa;
        let period = n as f64 * alpha;
        let mut peaks = Vec::new();
        let mut word_weights = Vec::with_capacity(n as usize);
        for (j, a) in amplitudes.iter().enumerate() {
            let smin = ((-reach - j as f64 * alpha) / period).ceil() as i64;
            let smax = ((reach - j as f64 * alpha) / period).floor() as i64;
            let word: Vec<(f64, f64)> = (smin..=smax)
                .map(|s| {
                    let x = (n as i64 * s + j as i64) as f64 * alpha;
                    (x, (-0.5 * kappa * kappa * x * x).exp())
                })
                .collect();
            let norm2: f64 = word
                .iter()
                .flat_map(|p| word.iter().map(move |r| p.1 * r.1 * pair_overlap(p.0, r.0, delta)))
                .sum();
            let scale = *a / norm2.sqrt();
            word_weights.push(scale);
            peaks.extend(word.into_iter().map(|(x, c)| (x, scale * c)));
        }
        let mut word = GaussianCodeword { n, alpha, delta, kappa, amplitudes, peaks, word_weights };
        let total = word.norm_sqr().sqrt();
        word.peaks.iter_mut().for_each(|p| p.1 /= total);
        word.word_weights.iter_mut().for_each(|w| *w /= total);
        Ok(word)
    }

    pub fn basis(n: u64, alpha: f64, delta: f64, kappa: f64, j: u64) -> Result<Self> {
        if j >= n {
            return Err(Error::invalid(format!("logical index {j} out of range 0..{n}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); n as usize];
        amps[j as usize] = Complex64::new(1.0, 0.0);
        Self::superposition(n, alpha, delta, kappa, amps)
    }

    /// `(|0̃⟩ + … + |ñ−1⟩)/√n`.
    pub fn plus(n: u64, alpha: f64, delta: f64, kappa: f64) -> Result<Self> {
        Self::superposition(n, alpha, delta, kappa, vec![Complex64::new(1.0, 0.0); n as usize])
    }

    /// Conditions under which the comb is a poor approximation of the ideal word.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.kappa * self.alpha > 0.5 {
            w.push(format!("κα = {:.3} is not small: the envelope spans few peaks", self.kappa * self.alpha));
        }
        if self.delta / self.alpha > 0.5 {
            w.push(format!("Δ/α = {:.3} is not small: neighbouring peaks overlap", self.delta / self.alpha));
        }
        w
    }

    fn norm_sqr(&self) -> f64 {
        let mut s = 0.0;
        for &(x1, w1) in &self.peaks {
            for &(x2, w2) in &self.peaks {
                s += (w1.conj() * w2).re * pair_overlap(x1, x2, self.delta);
            }
        }
        s
    }

    pub fn position_amplitude(&self, q: f64) -> Complex64 {
        let d2 = 2.0 * self.delta * self.delta;
        self.peaks.iter().map(|&(x, w)| w * (-(q - x).powi(2) / d2).exp()).sum()
    }

    /// `(2π)^{-1/2} ∫ e^{−ipq} ψ(q) dq`, summed peak by peak.
    pub fn momentum_amplitude(&self, p: f64) -> Complex64 {
        let env = self.delta * (-0.5 * self.delta * self.delta * p * p).exp();
        env * self.peaks.iter().map(|&(x, w)| w * Complex64::from_polar(1.0, -p * x)).sum::<Complex64>()
    }

    /// Momentum amplitude from the Poisson-resummed comb:
    /// `Δ e^{−Δ²p²/2} Σ_j c_j (√(2π)/(nακ)) Σ_m e^{2πimj/n} e^{−(p + 2πm/(nα))²/(2κ²)}`.
    pub fn momentum_amplitude_resummed(&self, p: f64) -> Complex64 {
        let n = self.n as f64;
        let spacing = 2.0 * PI / (n * self.alpha);
        let reach = 12.0 * self.kappa / spacing;
        let center = -p / spacing;
        let (mlo, mhi) = ((center - reach).floor() as i64, (center + reach).ceil() as i64);
        let pre = self.delta * (-0.5 * self.delta * self.delta * p * p).exp() * (2.0 * PI).sqrt()
            / (n * self.alpha * self.kappa);
        let mut total = Complex64::new(0.0, 0.0);
        for m in mlo..=mhi {
            let g = (-(p + m as f64 * spacing).powi(2) / (2.0 * self.kappa * self.kappa)).exp();
            let phase: Complex64 = self
                .word_weights
                .iter()
                .enumerate()
                .map(|(j, c)| c * Complex64::from_polar(1.0, 2.0 * PI * (m * j as i64) as f64 / n))
                .sum();
            total += phase * g;
        }
        total * pre
    }

    /// Step `α/64`, extent `±8/κ` around the comb.
    pub fn default_position_grid(&self) -> Grid {
        Grid::symmetric(8.0 / self.kappa + self.n as f64 * self.alpha, self.alpha / 64.0)
            .expect("positive step")
    }

    /// Step `(2π/nα)/64`, extent `±8/Δ`.
    pub fn default_momentum_grid(&self) -> Grid {
        let spacing = 2.0 * PI / (self.n as f64 * self.alpha);
        Grid::symmetric(8.0 / self.delta + spacing, spacing / 64.0).expect("positive step")
    }

    fn checked_density(grid: &Grid, f: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
        let d: Vec<f64> = grid.points().map(f).collect();
        let mass = d.iter().sum::<f64>() * grid.step;
        if (mass - 1.0).abs() > 1e-6 {
            return Err(Error::Grid(format!("density integrates to {mass} on [{}, {}]", grid.start, grid.end())));
        }
        Ok(d)
    }

    pub fn position_density(&self, grid: &Grid) -> Result<Vec<f64>> {
        Self::checked_density(grid, |q| self.position_amplitude(q).norm_sqr())
    }

    pub fn momentum_density(&self, grid: &Grid) -> Result<Vec<f64>> {
        Self::checked_density(grid, |p| self.momentum_amplitude_resummed(p).norm_sqr())
    }

    pub fn position_wavefunction(&self, grid: Grid) -> GridWavefunction {
        GridWavefunction::from_fn(grid, |q| self.position_amplitude(q))
    }

    /// Momentum amplitudes from direct quadrature of the position wavefunction.
    pub fn numeric_fourier(&self, q_grid: &Grid, p_grid: &Grid) -> Vec<Complex64> {
        let psi: Vec<(f64, Complex64)> = q_grid.points().map(|q| (q, self.position_amplitude(q))).collect();
        let c = q_grid.step / (2.0 * PI).sqrt();
        p_grid
            .points()
            .map(|p| c * psi.iter().map(|&(q, a)| a * Complex64::from_polar(1.0, -p * q)).sum::<Complex64>())
            .collect()
    }

    /// L² distance between the numeric Fourier transform and the resummed momentum amplitude.
    pub fn fourier_mismatch(&self) -> f64 {
        let (qg, pg) = (self.default_position_grid(), self.default_momentum_grid());
        let numeric = self.numeric_fourier(&qg, &pg);
        let d2: f64 = pg
            .points()
            .zip(&numeric)
            .map(|(p, a)| (a - self.momentum_amplitude_resummed(p)).norm_sqr())
            .sum();
        (d2 * pg.step).sqrt()
    }

    /// `⟨a†a⟩ = (⟨q²⟩ + ⟨p²⟩)/2 − 1/2` by quadrature of the two densities.
    pub fn mean_photon(&self) -> Result<f64> {
        let (qg, pg) = (self.default_position_grid(), self.default_momentum_grid());
        let q2: f64 = qg.points().zip(self.position_density(&qg)?).map(|(q, d)| q * q * d).sum::<f64>() * qg.step;
        let p2: f64 = pg.points().zip(self.momentum_density(&pg)?).map(|(p, d)| p * p * d).sum::<f64>() * pg.step;
        Ok(0.5 * (q2 + p2) - 0.5)
    }

    /// `(⟨q²⟩, ⟨p²⟩)` from exact Gaussian integrals over peak pairs.
    pub fn second_moments(&self) -> (f64, f64) {
        let d = self.delta;
        let (mut q2, mut p2) = (0.0, 0.0);
        for &(x1, w1) in &self.peaks {
            for &(x2, w2) in &self.peaks {
                let w = (w1.conj() * w2).re;
                let xm = 0.5 * (x1 + x2);
                q2 += w * pair_overlap(x1, x2, d) * (xm * xm + 0.5 * d * d);
                // Δ² ∫ p² e^{−Δ²p²} cos(p(x1−x2)) dp
                let a = d * d;
                let s = x1 - x2;
                p2 += w * d * d * (PI / a).sqrt() * (-s * s / (4.0 * a)).exp() * (0.5 / a - s * s / (4.0 * a * a));
            }
        }
        (q2, p2)
    }

    /// Probability that a position measurement rounds to a logical value other than `j`
    /// (nearest multiple of `α`, taken mod `n`).
    pub fn position_error_probability(&self, j: u64) -> f64 {
        let (n, a, d) = (self.n as i64, self.alpha, self.delta);
        let sigma = d / std::f64::consts::SQRT_2;
        let mut total = 0.0;
        for &(x1, w1) in &self.peaks {
            for &(x2, w2) in &self.peaks {
                let weight = (w1.conj() * w2).re * pair_overlap(x1, x2, d);
                if weight.abs() < 1e-300 {
                    continue;
                }
                let mu = 0.5 * (x1 + x2);
                let reach = (12.0 * sigma / a).ceil() as i64 + 1;
                let m0 = (mu / a).round() as i64;
                for m in m0 - reach..=m0 + reach {
                    if m.rem_euclid(n) == j as i64 {
                        continue;
                    }
                    let lo = (m as f64 - 0.5) * a;
                    total += weight * normal_interval_mass(lo, lo + a, mu, sigma);
                }
            }
        }
        total
    }

    /// Probability that a momentum measurement rounds to a class other than `k`
    /// (nearest multiple of `2π/(nα)`, taken mod `n`).
    pub fn momentum_error_probability(&self, k: u64) -> Result<f64> {
        let n = self.n as i64;
        let spacing = 2.0 * PI / (self.n as f64 * self.alpha);
        let reach = ((10.0 / self.delta + 10.0 * self.kappa) / spacing).ceil() as i64 + 1;
        let mut total = 0.0;
        for m in -reach..=reach {
            if m.rem_euclid(n) == k as i64 {
                continue;
            }
            let lo = (m as f64 - 0.5) * spacing;
            total += integrate(|p| self.momentum_amplitude(p).norm_sqr(), lo, lo + spacing, 1e-15)?;
        }
        Ok(total)
    }
}

/// Error probabilities of the symmetric `n = 2`, `α = √π` code.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectorErrors {
    /// `|0̃⟩` read out nearer an odd multiple of `√π` in position.
    pub position: f64,
    /// `(|0̃⟩ + |1̃⟩)/√2` read out nearer an odd multiple of `√π` in momentum.
    pub momentum: f64,
    /// `min(1, position + momentum)`.
    pub union_bound: f64,
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("Δ must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

pub fn intrinsic_error_sectors(delta: f64, kappa: f64) -> Result<SectorErrors> {
    check_delta(delta)?;
    let a = PI.sqrt();
    let position = GaussianCodeword::basis(2, a, delta, kappa, 0)?.position_error_probability(0);
    let momentum = GaussianCodeword::plus(2, a, delta, kappa)?.momentum_error_probability(0)?;
    Ok(SectorErrors { position, momentum, union_bound: (position + momentum).min(1.0) })
}

/// Intrinsic error probability of the `Δ = κ` qubit code in the position sector.
pub fn intrinsic_error_numeric(delta: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok(GaussianCodeword::basis(2, PI.sqrt(), delta, delta, 0)?.position_error_probability(0))
}

/// `(2Δ/π) e^{−π/(4Δ²)}`.
pub fn intrinsic_error_asymptotic(delta: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok(2.0 * delta / PI * (-PI / (4.0 * delta * delta)).exp())
}

/// Gaussian error wavefunction `η(u, v) ∝ e^{−u²/(2Δ²)} e^{−v²/(2κ²)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorWavefunction {
    pub delta: f64,
    pub kappa: f64,
}

impl ErrorWavefunction {
    fn eta_u(&self, u: f64) -> f64 {
        (-u * u / (2.0 * self.delta * self.delta)).exp()
    }
    fn eta_v(&self, v: f64) -> f64 {
        (-v * v / (2.0 * self.kappa * self.kappa)).exp()
    }

    /// `⟨η₁|η₂⟩` for untruncated normalized Gaussians.
    pub fn overlap_closed_form(&self, other: &ErrorWavefunction) -> f64 {
        let (d1, d2, k1, k2) = (self.delta, other.delta, self.kappa, other.kappa);
        2.0 * (d1 * d2 * k1 * k2).sqrt() / ((d1 * d1 + d2 * d2) * (k1 * k1 + k2 * k2)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverlapFactorization {
    /// Normalized `⟨ψ₁|ψ₂⟩` of the two encoded states.
    pub lhs: Complex64,
    /// `⟨ξ₁|ξ₂⟩⟨η₁|η₂⟩` with the truncated, normalized error wavefunctions.
    pub rhs: Complex64,
}

const GL_ORDER: usize = 96;

/// Build `|ψ_i⟩ = ∫du dv η_i(u, v) e^{i(−up + vq)} |j_i⟩` with `η_i` cut to the
/// correctable box `|u| < α/2`, `|v| < π/(nα)`, and compare `⟨ψ₁|ψ₂⟩` with the
/// product of ideal and error overlaps.
pub fn overlap_factorization(
    n: u64,
    alpha: f64,
    (eta1, j1): (ErrorWavefunction, u64),
    (eta2, j2): (ErrorWavefunction, u64),
) -> Result<OverlapFactorization> {
    if n == 0 || j1 >= n || j2 >= n || !(alpha > 0.0) {
        return Err(Error::invalid("overlap needs α > 0 and logical indices below n"));
    }
    let umax = 0.5 * alpha;
    let vmax = PI / (n as f64 * alpha);
    let (gx, gw) = gauss_legendre(GL_ORDER);
    let nodes = |half: f64| -> Vec<(f64, f64)> { gx.iter().zip(&gw).map(|(x, w)| (half * x, half * w)).collect() };
    let (un, vn) = (nodes(umax), nodes(vmax));

    // F(y) = ∫_{|v|<vmax} η_v(v) e^{ivy} dv, real since η_v is even
    let f = |eta: &ErrorWavefunction, y: f64| vn.iter().map(|&(v, w)| w * eta.eta_v(v) * (v * y).cos()).sum::<f64>();

    // ψ on the cell around x_s is η_u(u)·F(x_s + u/2); cells of different s are disjoint
    let reach = 14.0 / eta1.kappa.min(eta2.kappa) + alpha;
    let period = n as f64 * alpha;
    let cell = |eta: &ErrorWavefunction, j: u64, s: i64, u: f64| {
        let x = (s as f64 * period) + j as f64 * alpha;
        eta.eta_u(u) * f(eta, x + 0.5 * u)
    };
    let srange = (-(reach / period).ceil() as i64)..=((reach / period).ceil() as i64);
    let inner = |e1: &ErrorWavefunction, ja: u64, e2: &ErrorWavefunction, jb: u64| -> f64 {
        if ja != jb {
            return 0.0;
        }
        srange
            .clone()
            .map(|s| un.iter().map(|&(u, w)| w * cell(e1, ja, s, u) * cell(e2, jb, s, u)).sum::<f64>())
            .sum()
    };
    let lhs = inner(&eta1, j1, &eta2, j2) / (inner(&eta1, j1, &eta1, j1) * inner(&eta2, j2, &eta2, j2)).sqrt();

    let eta_overlap = |a: &ErrorWavefunction, b: &ErrorWavefunction| {
        un.iter().map(|&(u, w)| w * a.eta_u(u) * b.eta_u(u)).sum::<f64>()
            * vn.iter().map(|&(v, w)| w * a.eta_v(v) * b.eta_v(v)).sum::<f64>()
    };
    let ideal = if j1 == j2 { 1.0 } else { 0.0 };
    let rhs = ideal * eta_overlap(&eta1, &eta2) / (eta_overlap(&eta1, &eta1) * eta_overlap(&eta2, &eta2)).sqrt();
    Ok(OverlapFactorization { lhs: Complex64::new(lhs, 0.0), rhs: Complex64::new(rhs, 0.0) })
}

/// Signed delta function of the ideal Wigner function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WignerSite {
    pub q: f64,
    pub p: f64,
    pub sign: i8,
    pub s: i64,
    pub t: i64,
}

/// Sites `q = αj + (nα/2)t`, `p = (π/(nα))s` with sign `(−1)^{st}`, for `s` and `t`
/// in the given inclusive ranges.
pub fn wigner_sites(
    n: u64,
    alpha: f64,
    j: u64,
    s_range: std::ops::RangeInclusive<i64>,
    t_range: std::ops::RangeInclusive<i64>,
) -> Result<Vec<WignerSite>> {
    if n == 0 || j >= n || !(alpha > 0.0) {
        return Err(Error::invalid("Wigner sites need n ≥ 1, 0 ≤ j < n and α > 0"));
    }
    let na = n as f64 * alpha;
    Ok(s_range
        .flat_map(|s| {
            t_range.clone().map(move |t| WignerSite {
                q: alpha * j as f64 + 0.5 * na * t as f64,
                p: PI / na * s as f64,
                sign: if (s * t).rem_euclid(2) == 0 { 1 } else { -1 },
                s,
                t,
            })
        })
        .collect())
}

/// Superposition of vacuum-width coherent states on the lattice
/// `(sα + q₀, 2πt/α + p₀)`, `|s|, |t| ≤ window`.
pub fn coherent_comb(window: u32, alpha: f64, offset: (f64, f64), grid: Grid) -> Result<GridWavefunction> {
    if !(alpha > 0.0) {
        return Err(Error::invalid("α must be positive"));
    }
    let w = window as i64;
    let (q0, p0) = offset;
    let norm = PI.powf(-0.25);
    let psi = GridWavefunction::from_fn(grid, |q| {
        let comb: Complex64 = (-w..=w)
            .map(|s| {
                let x = q - s as f64 * alpha;
                Complex64::from_polar(norm * (-0.5 * (x - q0).powi(2)).exp(), p0 * x)
            })
            .sum();
        let phases: Complex64 = (-w..=w).map(|t| Complex64::from_polar(1.0, 2.0 * PI * t as f64 * q / alpha)).sum();
        comb * phases
    });
    psi.normalized()
}

/// Grid for [`coherent_comb`]: `α` divided into a whole number of steps fine
/// enough for the peaks of width `α/(2W+1)`, covering `±(W + 4)α`.
pub fn comb_grid(window: u32, alpha: f64) -> Result<Grid> {
    let per_cell = 16 * (2 * window as usize + 1);
    Grid::symmetric((window as f64 + 4.0) * alpha, alpha / per_cell as f64)
}

/// Half-width `max(W − 2, 1)·α` of the region where truncation edges are negligible.
pub fn comb_interior(window: u32, alpha: f64) -> f64 {
    (window as f64 - 2.0).max(1.0) * alpha
}

/// Relative L² change of `ψ` under `ψ(q) → ψ(q − α)` on `|q| ≤ interior`.
/// The grid step must divide `α`.
pub fn translation_residual(psi: &GridWavefunction, alpha: f64, interior: f64) -> Result<f64> {
    let k = alpha / psi.grid.step;
    if (k - k.round()).abs() > 1e-9 {
        return Err(Error::Grid("grid step does not divide the translation".into()));
    }
    let k = k.round() as usize;
    let (mut diff, mut norm) = (0.0, 0.0);
    for i in k..psi.grid.len {
        if psi.grid.point(i).abs() <= interior {
            diff += (psi.amps[i] - psi.amps[i - k]).norm_sqr();
            norm += psi.amps[i].norm_sqr();
        }
    }
    if norm == 0.0 {
        return Err(Error::Grid("interior region is empty".into()));
    }
    Ok((diff / norm).sqrt())
}

/// `|⟨a|b⟩| / (‖a‖ ‖b‖)` restricted to `|q| ≤ interior`.
pub fn interior_fidelity(a: &GridWavefunction, b: &GridWavefunction, interior: f64) -> Result<f64> {
    if a.grid != b.grid {
        return Err(Error::Grid("fidelity needs identical grids".into()));
    }
    let (mut ab, mut aa, mut bb) = (Complex64::new(0.0, 0.0), 0.0, 0.0);
    for (i, q) in a.grid.points().enumerate() {
        if q.abs() <= interior {
            ab += a.amps[i].conj() * b.amps[i];
            aa += a.amps[i].norm_sqr();
            bb += b.amps[i].norm_sqr();
        }
    }
    Ok(ab.norm() / (aa * bb).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoissonCheck {
    pub lhs: f64,
    pub rhs: Complex64,
}

/// Both sides of `Σ_m e^{−πa(m−b)²} = a^{−1/2} Σ_s e^{−πs²/a} e^{2πisb}`, `|m|, |s| ≤ truncation`.
pub fn poisson_check(a: f64, b: f64, truncation: u32) -> Result<PoissonCheck> {
    if !(a > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("Poisson check needs a > 0"));
    }
    let t = truncation as i64;
    let lhs = (-t..=t).map(|m| (-PI * a * (m as f64 - b).powi(2)).exp()).sum();
    let rhs = (-t..=t)
        .map(|s| Complex64::from_polar((-PI * (s * s) as f64 / a).exp(), 2.0 * PI * s as f64 * b))
        .sum::<Complex64>()
        / a.sqrt();
    Ok(PoissonCheck { lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt_pi() -> f64 {
        PI.sqrt()
    }

    #[test]
    fn densities_normalized_and_peaked() {
        let w = GaussianCodeword::basis(2, sqrt_pi(), 0.25, 0.25, 0).unwrap();
        let g = w.default_position_grid();
        let d = w.position_density(&g).unwrap();
        assert!((d.iter().sum::<f64>() * g.step - 1.0).abs() < 1e-6);
        let at = |q: f64| w.position_amplitude(q).norm_sqr();
        assert!(at(2.0 * sqrt_pi()) > 1e3 * at(sqrt_pi()));
        assert!((w.position_wavefunction(g).norm() - 1.0).abs() < 1e-10);
        let narrow = Grid::symmetric(2.0, 0.01).unwrap();
        assert!(matches!(w.position_density(&narrow), Err(Error::Grid(_))));
    }

    #[test]
    fn resummed_momentum_matches_direct_sum() {
        for (d, k) in [(0.25, 0.25), (0.2, 0.3), (0.3, 0.2)] {
            let w = GaussianCodeword::plus(2, sqrt_pi(), d, k).unwrap();
            for i in -200..200 {
                let p = i as f64 * 0.037;
                assert!((w.momentum_amplitude(p) - w.momentum_amplitude_resummed(p)).norm() < 1e-7);
            }
        }
    }

    #[test]
    fn plus_state_momentum_mirrors_zero_position() {
        let a = sqrt_pi();
        let zero = GaussianCodeword::basis(2, a, 0.25, 0.25, 0).unwrap();
        let plus = GaussianCodeword::plus(2, a, 0.25, 0.25).unwrap();
        let step = 2.0 * a;
        for k in -2..=2 {
            let lo = (k as f64 - 0.5) * step;
            let mq = integrate(|q| zero.position_amplitude(q).norm_sqr(), lo, lo + step, 1e-12).unwrap();
            let mp = integrate(|p| plus.momentum_amplitude(p).norm_sqr(), lo, lo + step, 1e-12).unwrap();
            // peak masses agree up to the O(Δ²κ²) envelope correction
            assert!((mq - mp).abs() < 3e-2 * mq, "{k}: {mq} {mp}");
        }
    }

    #[test]
    fn fourier_duality() {
        for d in [0.2, 0.25, 0.3] {
            let w = GaussianCodeword::basis(2, sqrt_pi(), d, d, 0).unwrap();
            assert!(w.fourier_mismatch() < 1e-6, "Δ={d}");
        }
    }

    #[test]
    fn intrinsic_errors() {
        let e5 = intrinsic_error_numeric(0.5).unwrap();
        let e25 = intrinsic_error_numeric(0.25).unwrap();
        assert!((0.005..0.02).contains(&e5), "{e5}");
        assert!(e25 < 1e-6, "{e25}");
        assert!(((intrinsic_error_asymptotic(0.5).unwrap()) - (-PI).exp() / PI).abs() < 1e-15);
        assert!((intrinsic_error_asymptotic(0.25).unwrap() - 5.5e-7).abs() < 0.1e-7);
        let mut prev = 0.0;
        for i in 0..=20 {
            let d = 0.2 + 0.01 * i as f64;
            let e = intrinsic_error_numeric(d).unwrap();
            let r = intrinsic_error_asymptotic(d).unwrap() / e;
            assert!(e > prev);
            assert!((0.5..=2.0).contains(&r), "Δ={d} ratio {r}");
            prev = e;
        }
        let s = intrinsic_error_sectors(0.3, 0.3).unwrap();
        assert!((s.position - s.momentum).abs() < 1e-2 * s.position, "{s:?}");
        assert!((s.union_bound - s.position - s.momentum).abs() < 1e-15);
        assert!(intrinsic_error_numeric(1.5).is_err());
    }

    #[test]
    fn photon_number() {
        let w = GaussianCodeword::basis(2, sqrt_pi(), 0.25, 0.25, 0).unwrap();
        let n = w.mean_photon().unwrap();
        let (q2, p2) = w.second_moments();
        assert!((n - (0.5 * (q2 + p2) - 0.5)).abs() < 1e-6);
        // envelope variance 1/(2κ²) in each quadrature
        assert!((n + 0.5 - 8.0).abs() < 0.1, "{n}");
        let vac = GaussianCodeword::basis(2, sqrt_pi(), 0.9, 0.9, 0).unwrap().mean_photon().unwrap();
        assert!(vac < 0.5, "{vac}");
    }

    #[test]
    fn overlaps() {
        let a = sqrt_pi();
        let e = ErrorWavefunction { delta: 0.25, kappa: 0.25 };
        let same = overlap_factorization(2, a, (e, 0), (e, 0)).unwrap();
        assert!((same.lhs.re - 1.0).abs() < 1e-12 && (same.rhs.re - 1.0).abs() < 1e-12);
        let orth = overlap_factorization(2, a, (e, 0), (e, 1)).unwrap();
        assert_eq!(orth.lhs.norm(), 0.0);
        assert_eq!(orth.rhs.norm(), 0.0);
        let e1 = ErrorWavefunction { delta: 0.2, kappa: 0.25 };
        let e2 = ErrorWavefunction { delta: 0.25, kappa: 0.2 };
        let o = overlap_factorization(2, a, (e1, 0), (e2, 0)).unwrap();
        assert!((o.lhs - o.rhs).norm() < 1e-4, "{o:?}");
        assert!((o.lhs.re - e1.overlap_closed_form(&e2)).abs() < 1e-3, "{o:?}");
        assert!((e1.overlap_closed_form(&e2) - 0.1 / 0.1025).abs() < 1e-12);
    }

    #[test]
    fn wigner_site_pattern() {
        let a = sqrt_pi();
        let cell = wigner_sites(2, a, 0, 0..=1, 0..=1).unwrap();
        assert_eq!(cell.iter().map(|s| s.sign).collect::<Vec<_>>(), vec![1, 1, 1, -1]);
        let sites = wigner_sites(2, a, 1, -6..=5, -6..=5).unwrap();
        let mut by_t = std::collections::BTreeMap::<i64, i64>::new();
        let mut by_s = std::collections::BTreeMap::<i64, i64>::new();
        for s in &sites {
            *by_t.entry(s.t).or_default() += s.sign as i64;
            *by_s.entry(s.s).or_default() += s.sign as i64;
        }
        for (t, v) in by_t {
            let q = a * 1.0 + a * t as f64;
            let on_support = ((q / a - 1.0) / 2.0).fract().abs() < 1e-12;
            assert_eq!(v != 0, on_support, "t={t}");
        }
        for (s, v) in by_s {
            assert_eq!(v != 0, s % 2 == 0, "s={s}");
        }
    }

    #[test]
    fn coherent_comb_translation() {
        let a = (2.0 * PI).sqrt();
        let psi = coherent_comb(6, a, (0.0, 0.0), comb_grid(6, a).unwrap()).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-10);
        assert!(translation_residual(&psi, a, comb_interior(6, a)).unwrap() < 1e-3);
        let single = coherent_comb(0, a, (0.0, 0.0), comb_grid(0, a).unwrap()).unwrap();
        assert!(translation_residual(&single, a, comb_interior(0, a)).unwrap() > 0.5);
    }

    #[test]
    fn poisson_identity() {
        for (a, b) in [(1.0, 0.0), (0.7, 0.3), (5.0, 0.9), (0.1, 0.45), (10.0, -2.2)] {
            let c = poisson_check(a, b, 50).unwrap();
            assert!((c.rhs - c.lhs).norm() < 1e-10, "{a} {b}: {c:?}");
        }
    }
}
