//! Shift-error channels: Gaussian displacement noise, diffusion, and the
//! displacement expansions of amplitude damping and over-rotation.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use statrs::function::erf::erfc;

use crate::lattice::ShiftVector;
use crate::linalg::expm_complex;
use crate::rng::par_blocks;
use crate::{Error, Result};

/// Independent Gaussian shifts with standard deviation `sigma` on every quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianShiftChannel {
    sigma: f64,
}

impl GaussianShiftChannel {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::invalid(format!("σ must be positive and finite, got {sigma}")));
        }
        Ok(Self { sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn sample_into<R: rand::Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        for x in out {
            let z: f64 = StandardNormal.sample(rng);
            *x = self.sigma * z;
        }
    }

    /// `count` shift vectors on `modes` oscillators. The sequence depends only on
    /// `seed`; `workers` sets the thread count (0 = all cores).
    pub fn sample_shifts(&self, modes: usize, seed: u64, count: u64, workers: usize) -> Result<Vec<ShiftVector>> {
        if count == 0 || modes == 0 {
            return Err(Error::invalid("need at least one sample on at least one mode"));
        }
        par_blocks(
            count,
            seed,
            workers,
            |rng, n| {
                (0..n)
                    .map(|_| {
                        let mut v = vec![0.0; 2 * modes];
                        self.sample_into(rng, &mut v);
                        ShiftVector::new(v).expect("finite Gaussian samples")
                    })
                    .collect::<Vec<_>>()
            },
            Vec::with_capacity(count as usize),
            |mut acc, mut part| {
                acc.append(&mut part);
                acc
            },
        )
    }
}

/// Diffusion with `⟨q²⟩ = ⟨p²⟩ = D t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiffusionModel {
    pub diffusion_constant: f64,
    pub t: f64,
}

impl DiffusionModel {
    /// Equivalent Gaussian-shift σ, `√(D t)`.
    pub fn sigma(&self) -> Result<f64> {
        if self.diffusion_constant < 0.0 || self.t < 0.0 || !(self.diffusion_constant * self.t).is_finite() {
            return Err(Error::invalid("diffusion constant and time must be non-negative"));
        }
        Ok((self.diffusion_constant * self.t).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Quadrature {
    Q,
    P,
}

/// `coefficient · exp(i · sign · scale · quadrature)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DisplacementTerm {
    pub quadrature: Quadrature,
    pub sign: i8,
    pub coefficient: Complex64,
}

/// First-order expansion of the damping jump `√(Γ dt)·a` into four displacements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DampingExpansion {
    pub gamma_rate: f64,
    pub dt: f64,
}

/// Largest `Γ dt` treated as small.
pub const WEAK_DAMPING: f64 = 0.1;

impl DampingExpansion {
    pub fn new(gamma_rate: f64, dt: f64) -> Result<Self> {
        if !(gamma_rate > 0.0 && dt > 0.0 && (gamma_rate * dt).is_finite()) {
            return Err(Error::invalid("decay rate and time step must be positive"));
        }
        Ok(Self { gamma_rate, dt })
    }

    /// `√(Γ dt / 2)`.
    pub fn shift_scale(&self) -> f64 {
        (0.5 * self.gamma_rate * self.dt).sqrt()
    }

    pub fn is_weak(&self) -> bool {
        self.gamma_rate * self.dt <= WEAK_DAMPING
    }

    /// `−(i/2)(e^{iεq} − e^{−iεq}) + (1/2)(e^{iεp} − e^{−iεp}) ≈ √(Γ dt)·a`.
    pub fn terms(&self) -> [DisplacementTerm; 4] {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        [
            DisplacementTerm { quadrature: Quadrature::Q, sign: 1, coefficient: c(0.0, -0.5) },
            DisplacementTerm { quadrature: Quadrature::Q, sign: -1, coefficient: c(0.0, 0.5) },
            DisplacementTerm { quadrature: Quadrature::P, sign: 1, coefficient: c(0.5, 0.0) },
            DisplacementTerm { quadrature: Quadrature::P, sign: -1, coefficient: c(-0.5, 0.0) },
        ]
    }

    /// Largest entry of `Σ terms − √(Γ dt)·a` on number states below `low`, with the
    /// operators built in a `cutoff`-dimensional number basis.
    pub fn residual(&self, cutoff: usize, low: usize) -> Result<f64> {
        if low == 0 || 4 * low > cutoff {
            return Err(Error::invalid("need 0 < low ≤ cutoff/4"));
        }
        let a = annihilation(cutoff);
        let ad = a.adjoint();
        let s = Complex64::new(0.5f64.sqrt(), 0.0);
        let q = (&a + &ad) * s;
        let p = (&a - &ad) * Complex64::new(0.0, -(0.5f64.sqrt()));
        let eps = self.shift_scale();
        let mut sum = DMatrix::<Complex64>::zeros(cutoff, cutoff);
        for t in self.terms() {
            let gen = match t.quadrature {
                Quadrature::Q => &q,
                Quadrature::P => &p,
            };
            sum += expm_complex(&(gen * Complex64::new(0.0, t.sign as f64 * eps)), 1e-14) * t.coefficient;
        }
        let target = a * Complex64::new((self.gamma_rate * self.dt).sqrt(), 0.0);
        let diff = sum - target;
        Ok((0..low)
            .flat_map(|i| (0..low).map(move |j| (i, j)))
            .map(|(i, j)| diff[(i, j)].norm())
            .fold(0.0, f64::max))
    }
}

fn annihilation(cutoff: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(cutoff, cutoff, |i, j| {
        if j == i + 1 {
            Complex64::new((j as f64).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Operator ordering of the rotation `U(θ)`: `exp(iθ a†a)` or `exp(iθ a a†)`.
/// The two differ by the global phase `e^{iθ}`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub enum NumberOrdering {
    #[default]
    Normal,
    AntiNormal,
}

/// Over- or under-rotation `U(θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotationError {
    pub theta: f64,
    pub ordering: NumberOrdering,
}

impl RotationError {
    pub fn new(theta: f64) -> Self {
        Self { theta, ordering: NumberOrdering::Normal }
    }

    pub fn with_ordering(theta: f64, ordering: NumberOrdering) -> Self {
        Self { theta, ordering }
    }

    fn phase_offset(&self) -> f64 {
        match self.ordering {
            NumberOrdering::Normal => 0.0,
            NumberOrdering::AntiNormal => self.theta,
        }
    }

    /// `u_θ(γ) = tr(U(θ) D(γ)†)`, the weight of `D(γ)` in the expansion of `U(θ)`:
    /// `i e^{∓iθ/2} / (2 sin(θ/2)) · exp(−(i/2)|γ|² cot(θ/2))`.
    pub fn coefficient(&self, gamma: Complex64) -> Result<Complex64> {
        let half = 0.5 * self.theta;
        let s = half.sin();
        if s.abs() < 1e-12 {
            return Err(Error::DeltaFunctionLimit);
        }
        let pre = Complex64::new(0.0, 1.0) * Complex64::from_polar(1.0, -half + self.phase_offset()) / (2.0 * s);
        Ok(pre * Complex64::from_polar(1.0, -0.5 * gamma.norm_sqr() * half.cos() / s))
    }

    /// `|u_θ(γ)| = 1 / (2|sin(θ/2)|)`.
    pub fn coefficient_modulus(&self) -> f64 {
        1.0 / (2.0 * (0.5 * self.theta).sin().abs())
    }
}

/// Diagonal `⟨k|D(γ)|k⟩` of the displacement, from a matrix exponential on a
/// `cutoff`-dimensional number basis.
pub fn displacement_diagonal(gamma: Complex64, cutoff: usize) -> Vec<Complex64> {
    let a = annihilation(cutoff);
    let gen = a.adjoint() * gamma - a * gamma.conj();
    let d = expm_complex(&gen, 1e-12);
    (0..cutoff).map(|k| d[(k, k)]).collect()
}

/// Smooth cut on number states near the top of the basis, where the truncated
/// displacement is inaccurate and the trace series only converges in the Abel sense.
fn window(k: usize, cutoff: usize) -> f64 {
    0.5 * erfc((k as f64 / cutoff as f64 - 0.45) / 0.12)
}

fn windowed_trace(err: &RotationError, diag: &[Complex64]) -> Complex64 {
    let n = diag.len();
    diag.iter()
        .enumerate()
        .map(|(k, d)| Complex64::from_polar(window(k, n), err.theta * k as f64 + err.phase_offset()) * d.conj())
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceEstimate {
    pub value: Complex64,
    /// `|T(cutoff) − T(cutoff/2)|`.
    pub change: f64,
}

/// Largest [`TraceEstimate::change`] accepted before reporting non-convergence.
pub const TRACE_CONVERGENCE: f64 = 1e-3;

/// `tr(U(θ) D(γ)†)` for several `θ` sharing one `γ`, each checked against half the cutoff.
pub fn number_basis_traces(
    rotations: &[RotationError],
    gamma: Complex64,
    cutoff: usize,
) -> Result<Vec<TraceEstimate>> {
    if cutoff < 64 {
        return Err(Error::invalid(format!("cutoff must be at least 64, got {cutoff}")));
    }
    let full = displacement_diagonal(gamma, cutoff);
    let half = displacement_diagonal(gamma, cutoff / 2);
    rotations
        .iter()
        .map(|r| {
            let value = windowed_trace(r, &full);
            let change = (value - windowed_trace(r, &half)).norm();
            if change > TRACE_CONVERGENCE {
                return Err(Error::NoConvergence(format!(
                    "number-basis trace at θ={} changed by {change:.2e} between cutoffs {} and {cutoff}",
                    r.theta,
                    cutoff / 2
                )));
            }
            Ok(TraceEstimate { value, change })
        })
        .collect()
}

pub fn number_basis_trace(rotation: &RotationError, gamma: Complex64, cutoff: usize) -> Result<TraceEstimate> {
    Ok(number_basis_traces(std::slice::from_ref(rotation), gamma, cutoff)?[0])
}

/// Truncated geometric series `Σ_{k<cutoff} e^{iθk}`, the trace at `γ = 0` without windowing.
pub fn geometric_trace(theta: f64, cutoff: usize) -> Complex64 {
    (0..cutoff).map(|k| Complex64::from_polar(1.0, theta * k as f64)).sum()
}

/// Mean of the Abel-summed geometric series, `1/(1 − e^{iθ})`.
pub fn abel_geometric(theta: f64) -> Complex64 {
    Complex64::new(1.0, 0.0) / (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use std::f64::consts::PI;

    #[test]
    fn sampling_statistics_and_determinism() {
        let ch = GaussianShiftChannel::new(0.3).unwrap();
        let xs = ch.sample_shifts(1, 42, 200_000, 0).unwrap();
        let n = xs.len() as f64;
        for coord in 0..2 {
            let var = xs.iter().map(|x| x.as_slice()[coord].powi(2)).sum::<f64>() / n;
            let stderr = 0.09 * (2.0 / n).sqrt();
            assert!((var - 0.09).abs() < 4.0 * stderr, "{var}");
        }
        let again = ch.sample_shifts(1, 42, 200_000, 3).unwrap();
        assert_eq!(xs, again);
        let tiny = GaussianShiftChannel::new(1e-12).unwrap().sample_shifts(2, 1, 100, 1).unwrap();
        assert!(tiny.iter().all(|x| x.norm_inf() < 1e-10));
        assert!(GaussianShiftChannel::new(0.0).is_err());
    }

    #[test]
    fn diffusion() {
        let s = |d, t| DiffusionModel { diffusion_constant: d, t }.sigma().unwrap();
        assert!((s(0.01, 1.0) - 0.1).abs() < 1e-15);
        assert_eq!(s(0.3, 0.0), 0.0);
        assert!((s(0.04, 4.0) - 0.4).abs() < 1e-15);
        assert!(DiffusionModel { diffusion_constant: 0.1, t: -1.0 }.sigma().is_err());
    }

    #[test]
    fn damping_scale_and_residual_slope() {
        let e = DampingExpansion::new(1.0, 0.02).unwrap();
        assert!((e.shift_scale() - 0.1).abs() < 1e-15);
        assert!(DampingExpansion::new(1.0, 1e-12).unwrap().shift_scale() < 1e-5);
        let r: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&g| DampingExpansion::new(1.0, g).unwrap().residual(64, 8).unwrap())
            .collect();
        for w in r.windows(2) {
            let slope = (w[0] / w[1]).log10();
            assert!((slope - 1.5).abs() < 0.1, "{r:?}");
        }
    }

    #[test]
    fn rotation_closed_form() {
        let anti = RotationError::with_ordering(PI, NumberOrdering::AntiNormal);
        let u = anti.coefficient(Complex64::new(0.0, 0.0)).unwrap();
        assert!((u - Complex64::new(-0.5, 0.0)).norm() < 1e-15);
        let normal = RotationError::new(PI);
        assert!((normal.coefficient(Complex64::new(0.0, 0.0)).unwrap() - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!(matches!(RotationError::new(2.0 * PI).coefficient(Complex64::new(0.1, 0.0)), Err(Error::DeltaFunctionLimit)));
        let mut rng = stream_rng(5, 0);
        for theta in [0.3, 1.0, 2.5, 4.0] {
            let r = RotationError::new(theta);
            let m0 = r.coefficient(Complex64::new(0.3, 0.0)).unwrap().norm();
            assert!((m0 - r.coefficient(Complex64::new(0.0, 0.7)).unwrap().norm()).abs() < 1e-14);
            for _ in 0..10 {
                let g = Complex64::new(rand::Rng::random_range(&mut rng, -2.0..2.0), rand::Rng::random_range(&mut rng, -2.0..2.0));
                assert!((r.coefficient(g).unwrap().norm() - r.coefficient_modulus()).abs() < 1e-13);
            }
        }
        // the γ = 0 coefficient is the Abel sum of the trace series
        assert!((RotationError::new(1.1).coefficient(Complex64::new(0.0, 0.0)).unwrap() - abel_geometric(1.1)).norm() < 1e-14);
    }

    #[test]
    fn displacement_diagonal_matches_laguerre() {
        let g = Complex64::new(0.4, -0.3);
        let d = displacement_diagonal(g, 64);
        let x = g.norm_sqr();
        let (mut l0, mut l1) = (1.0, 1.0 - x);
        for (k, dk) in d.iter().enumerate().take(20) {
            let lk = if k == 0 { l0 } else { l1 };
            assert!((dk.re - (-x / 2.0).exp() * lk).abs() < 1e-12, "k={k}");
            assert!(dk.im.abs() < 1e-12);
            if k >= 1 {
                let kf = k as f64;
                let next = ((2.0 * kf + 1.0 - x) * l1 - kf * l0) / (kf + 1.0);
                l0 = l1;
                l1 = next;
            }
        }
    }

    #[test]
    fn trace_oracle_small_cutoff() {
        let zero = Complex64::new(0.0, 0.0);
        let r = RotationError::with_ordering(PI / 3.0, NumberOrdering::AntiNormal);
        let t = number_basis_trace(&r, zero, 128).unwrap();
        let want = Complex64::new(0.0, 1.0) * Complex64::from_polar(1.0, PI / 6.0);
        assert!((t.value - want).norm() < 1e-4, "{t:?}");
        assert!((r.coefficient(zero).unwrap() - want).norm() < 1e-14);
        assert!((geometric_trace(PI / 2.0, 4)).norm() < 1e-14);
        assert!(number_basis_trace(&r, zero, 32).is_err());
    }
}
