//! Shift-resistant quantum codes.
//!
//! This crate implements codes that protect a finite-dimensional system or a
//! collection of harmonic oscillators against small shifts of its canonical
//! variables, together with the numerics used to judge them:
//!
//! - [`qudit`]: the two-generator `X^{r1 n}`, `Z^{r2 n}` codes on a `d`-level
//!   system, their modular decoder, a dense state-vector oracle, and the rotor limit.
//! - [`lattice`]: symplectic lattice codes on `N` oscillators (Gram matrix, skew
//!   standard form, code dimension, dual lattice, builders, nearest-point decoding).
//! - [`channels`]: Gaussian shift sampling and displacement expansions of damping
//!   and over-rotation, with a truncated number-basis oracle.
//! - [`mc`]: shift-frame Monte Carlo of noisy recovery and the analytic error
//!   integrals for square and hexagonal lattices.
//! - [`capacity`]: CSS rate, threshold solving, Gaussian-channel bounds and the
//!   `[[7,1,3]]` concatenation layer.
//! - [`squeezing`]: finitely squeezed Gaussian-comb codewords on a grid.
//! - [`clifford`]: affine symplectic gates, shift propagation and small-matrix
//!   circuit checks.
//!
//! Phase space is ordered `(q_1..q_N, p_1..p_N)` with `ω = [[0, I], [-I, 0]]` and
//! `ħ = 1`. Lattice generator rows are expressed in units of `√(2π)`; shift
//! vectors ([`lattice::ShiftVector`]) are in plain `q`/`p` units.

pub mod capacity;
pub mod channels;
pub mod clifford;
mod error;
pub mod lattice;
pub mod linalg;
pub mod mc;
pub mod qudit;
pub mod quadrature;
pub mod rng;
pub mod squeezing;

pub use error::{Error, Result};
pub use lattice::{LatticeCode, LogicalCoset, ShiftVector};
pub use num_complex::Complex64;

/// `√(2π)`, the length unit of lattice generator rows.
pub const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Reduce `x` into `(-m/2, m/2]`, returning `(residual, multiple)` with
/// `x = residual + multiple * m`. Exact ties go to the lower multiple.
pub fn centered_mod(x: f64, m: f64) -> (f64, f64) {
    let k = (x / m - 0.5).ceil();
    (x - k * m, k)
}

/// Integer version of [`centered_mod`]: representative of `x mod m` in `(-m/2, m/2]`.
pub fn centered_rem(x: i64, m: i64) -> i64 {
    debug_assert!(m > 0);
    let r = x.rem_euclid(m);
    if 2 * r > m {
        r - m
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_2pi_constant() {
        assert!((SQRT_2PI - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn centered_reduction_ties_go_low() {
        assert_eq!(centered_mod(0.5, 1.0), (0.5, 0.0));
        assert_eq!(centered_mod(-0.5, 1.0), (0.5, -1.0));
        assert_eq!(centered_mod(1.2, 1.0).1, 1.0);
        assert_eq!(centered_rem(3, 6), 3);
        assert_eq!(centered_rem(-3, 6), 3);
        assert_eq!(centered_rem(4, 6), -2);
        assert_eq!(centered_rem(-1, 3), -1);
        assert_eq!(centered_rem(2, 3), -1);
    }
}
