//! Shift-resistant codes on a single `d`-level system and on a rotor.
//!
//! For `d = n·r1·r2` the stabilizer is generated by `X^{r1 n}` and `Z^{r2 n}`
//! and the encoded qunit is acted on by `X̄ = X^{r1}`, `Z̄ = Z^{r2}`. Amplitude
//! shifts `|a| < r1/2` and phase shifts `|b| < r2/2` are corrected.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::{centered_mod, centered_rem, Error, Result};

/// Largest `d` handled by the dense state-vector oracle.
pub const DENSE_ORACLE_MAX_DIM: u64 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuditCode {
    n: u64,
    r1: u64,
    r2: u64,
}

/// Pauli operator `X^a Z^b` on a `d`-level system, stored with centered exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PauliLabel {
    pub a: i64,
    pub b: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct QuditSyndrome {
    /// `a mod r1`, revealed by measuring `Z^{r2 n}`.
    pub s_amp: u64,
    /// `b mod r2`, revealed by measuring `X^{r1 n}`.
    pub s_phase: u64,
}

/// Logical Pauli `X̄^x Z̄^z` on the encoded qunit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct LogicalLabel {
    pub x: u64,
    pub z: u64,
}

impl LogicalLabel {
    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DecodeOutcome {
    pub syndrome: QuditSyndrome,
    pub correction: PauliLabel,
    pub logical: LogicalLabel,
    pub correctable: bool,
}

impl QuditCode {
    pub fn new(n: u64, r1: u64, r2: u64) -> Result<Self> {
        if n == 0 || r1 == 0 || r2 == 0 {
            return Err(Error::invalid(format!(
                "qudit code parameters must be positive, got n={n}, r1={r1}, r2={r2}"
            )));
        }
        n.checked_mul(r1)
            .and_then(|x| x.checked_mul(r2))
            .filter(|&d| d <= i64::MAX as u64 / 4)
            .ok_or_else(|| Error::invalid("physical dimension overflows"))?;
        Ok(Self { n, r1, r2 })
    }

    pub fn n(&self) -> u64 {
        self.n
    }
    pub fn r1(&self) -> u64 {
        self.r1
    }
    pub fn r2(&self) -> u64 {
        self.r2
    }
    pub fn d(&self) -> u64 {
        self.n * self.r1 * self.r2
    }

    /// Exponents of the stabilizer generators `(X^{r1 n}, Z^{r2 n})`.
    pub fn stabilizer_exponents(&self) -> (u64, u64) {
        (self.r1 * self.n, self.r2 * self.n)
    }

    /// Exponents of the logical operators `(X̄ = X^{r1}, Z̄ = Z^{r2})`.
    pub fn logical_exponents(&self) -> (u64, u64) {
        (self.r1, self.r2)
    }

    pub fn label(&self, a: i64, b: i64) -> PauliLabel {
        let d = self.d() as i64;
        PauliLabel { a: centered_rem(a, d), b: centered_rem(b, d) }
    }

    /// Basis states carrying codeword `|j̄⟩`; each has amplitude `1/√r2`.
    pub fn codeword_support(&self, j: u64) -> Result<Vec<u64>> {
        if j >= self.n {
            return Err(Error::invalid(format!("codeword index {j} out of range 0..{}", self.n)));
        }
        Ok((0..self.r2).map(|k| (k * self.n + j) * self.r1).collect())
    }

    pub fn syndrome(&self, error: PauliLabel) -> QuditSyndrome {
        QuditSyndrome {
            s_amp: error.a.rem_euclid(self.r1 as i64) as u64,
            s_phase: error.b.rem_euclid(self.r2 as i64) as u64,
        }
    }

    /// Minimal-magnitude error consistent with `syndrome`.
    pub fn correction(&self, syndrome: QuditSyndrome) -> PauliLabel {
        PauliLabel {
            a: centered_rem(syndrome.s_amp as i64, self.r1 as i64),
            b: centered_rem(syndrome.s_phase as i64, self.r2 as i64),
        }
    }

    pub fn decode(&self, error: PauliLabel) -> DecodeOutcome {
        let error = self.label(error.a, error.b);
        let syndrome = self.syndrome(error);
        let correction = self.correction(syndrome);
        let (r1, r2, n) = (self.r1 as i64, self.r2 as i64, self.n as i64);
        let logical = LogicalLabel {
            x: ((error.a - correction.a) / r1).rem_euclid(n) as u64,
            z: ((error.b - correction.b) / r2).rem_euclid(n) as u64,
        };
        DecodeOutcome { syndrome, correction, logical, correctable: logical.is_identity() }
    }

    /// Phases picked up when `X^a Z^b` is moved through `X^{r1 n}` and `Z^{r2 n}`,
    /// as fractions of a full turn in `[0, 1)`: `(b/r2, -a/r1) mod 1`.
    pub fn commutation_phase(&self, error: PauliLabel) -> (Fraction, Fraction) {
        (
            Fraction::new(error.b, self.r2 as i64),
            Fraction::new(-error.a, self.r1 as i64),
        )
    }

    /// Errors `|a| < r1/2`, `|b| < r2/2` that the code is guaranteed to correct.
    pub fn guaranteed_errors(&self) -> Vec<PauliLabel> {
        let range = |r: u64| {
            let r = r as i64;
            (-r..=r).filter(move |x| 2 * x.abs() < r)
        };
        range(self.r1)
            .flat_map(|a| range(self.r2).map(move |b| PauliLabel { a, b }))
            .collect()
    }

    /// The code is perfect when the guaranteed error set fills every syndrome class.
    pub fn is_perfect(&self) -> bool {
        let errs = self.guaranteed_errors();
        let mut seen = std::collections::HashSet::new();
        let injective = errs.iter().all(|&e| seen.insert(self.syndrome(e)));
        injective && errs.len() as u64 == self.r1 * self.r2
    }
}

/// A rational phase `num/den mod 1`, kept in lowest terms with `0 ≤ num < den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Fraction {
    pub num: i64,
    pub den: i64,
}

impl Fraction {
    pub fn new(num: i64, den: i64) -> Self {
        let r = num.rem_euclid(den);
        let g = gcd(r, den);
        Fraction { num: r / g, den: den / g }
    }
    pub fn is_zero(&self) -> bool {
        self.num == 0
    }
    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs().max(1)
    } else {
        gcd(b, a % b)
    }
}

/// Sparse `d × d` matrix with one nonzero per column: `|k⟩ → phase_k |perm_k⟩`.
#[derive(Debug, Clone)]
pub struct PermPhase {
    perm: Vec<usize>,
    phase: Vec<Complex64>,
}

impl PermPhase {
    /// `X^a Z^b` with `X|j⟩ = |j+1⟩`, `Z|j⟩ = ω^j|j⟩`, `ω = e^{2πi/d}`.
    pub fn pauli(d: u64, a: i64, b: i64) -> Self {
        let dd = d as i64;
        let perm = (0..dd).map(|j| (j + a).rem_euclid(dd) as usize).collect();
        let phase = (0..dd)
            .map(|j| Complex64::from_polar(1.0, 2.0 * PI * ((b * j).rem_euclid(dd)) as f64 / d as f64))
            .collect();
        PermPhase { perm, phase }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        for (k, &x) in v.iter().enumerate() {
            out[self.perm[k]] += self.phase[k] * x;
        }
        out
    }
}

fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Result of pushing the code through an error, syndrome measurement and recovery
/// with explicit state vectors.
#[derive(Debug, Clone, Serialize)]
pub struct DenseRoundtrip {
    /// `|(1/n) Σ_j ⟨j̄| C E |j̄⟩|`: one exactly when `C E` acts as the logical identity.
    pub fidelity: f64,
    /// Syndrome inferred from measured stabilizer eigenvalues.
    pub syndrome: QuditSyndrome,
    /// Logical action of `C E` read off the state vectors.
    pub logical: LogicalLabel,
}

impl QuditCode {
    pub fn codeword_vector(&self, j: u64) -> Result<Vec<Complex64>> {
        let d = self.d() as usize;
        let amp = Complex64::new(1.0 / (self.r2 as f64).sqrt(), 0.0);
        let mut v = vec![Complex64::new(0.0, 0.0); d];
        for k in self.codeword_support(j)? {
            v[k as usize] = amp;
        }
        Ok(v)
    }

    /// Independent check of [`QuditCode::decode`] on explicit complex vectors.
    pub fn dense_oracle_roundtrip(&self, error: PauliLabel) -> Result<DenseRoundtrip> {
        let d = self.d();
        if d > DENSE_ORACLE_MAX_DIM {
            return Err(Error::DimensionLimit {
                what: "qudit dimension",
                value: d as usize,
                limit: DENSE_ORACLE_MAX_DIM as usize,
            });
        }
        let words: Vec<_> = (0..self.n).map(|j| self.codeword_vector(j)).collect::<Result<_>>()?;
        let e = PermPhase::pauli(d, error.a, error.b);
        let (sx, sz) = self.stabilizer_exponents();
        let stab_x = PermPhase::pauli(d, sx as i64, 0);
        let stab_z = PermPhase::pauli(d, 0, sz as i64);

        // The corrupted code space is a joint eigenspace; read the eigenvalues off |0̄⟩.
        let corrupted = e.apply(&words[0]);
        let ev_x = inner(&corrupted, &stab_x.apply(&corrupted));
        let ev_z = inner(&corrupted, &stab_z.apply(&corrupted));
        // X^{r1 n} has eigenvalue e^{-2πi b/r2}; Z^{r2 n} has e^{2πi a/r1}.
        let turns = |z: Complex64, r: u64| -> u64 {
            let t = z.arg() / (2.0 * PI) * r as f64;
            (t.round() as i64).rem_euclid(r as i64) as u64
        };
        let syndrome = QuditSyndrome {
            s_amp: turns(ev_z, self.r1),
            s_phase: turns(ev_x.conj(), self.r2),
        };
        let corr = self.correction(syndrome);
        let c = PermPhase::pauli(d, -corr.a, 0);
        let cz = PermPhase::pauli(d, 0, -corr.b);

        let recovered: Vec<Vec<Complex64>> =
            words.iter().map(|w| c.apply(&cz.apply(&e.apply(w)))).collect();
        let fidelity = (words
            .iter()
            .zip(&recovered)
            .map(|(w, r)| inner(w, r))
            .sum::<Complex64>()
            / self.n as f64)
            .norm();

        // X̄ part: which codeword |0̄⟩ lands on. Z̄ part: relative phase of |1̄⟩ vs |0̄⟩.
        let n = self.n as usize;
        let overlaps: Vec<Complex64> = (0..n).map(|k| inner(&words[k], &recovered[0])).collect();
        let x = (0..n)
            .max_by(|&i, &j| overlaps[i].norm().total_cmp(&overlaps[j].norm()))
            .unwrap_or(0);
        let z = if n > 1 {
            let g0 = overlaps[x];
            let g1 = inner(&words[(1 + x) % n], &recovered[1]);
            let ratio = g1 / g0;
            let t = ratio.arg() / (2.0 * PI) * n as f64;
            (t.round() as i64).rem_euclid(n as i64) as u64
        } else {
            0
        };
        Ok(DenseRoundtrip { fidelity, syndrome, logical: LogicalLabel { x: x as u64, z } })
    }
}

/// Rotor code: stabilizer `e^{iθm}` and `e^{-2πiL n/m}`, logical `Z̄ = e^{iθ m/n}`,
/// `X̄ = e^{-2πiL/m}`. Requires `n | m` so that `X̄^n` is a stabilizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotorCode {
    m: u64,
    n: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RotorOutcome {
    pub correctable: bool,
    pub logical: LogicalLabel,
}

impl RotorCode {
    pub fn new(m: u64, n: u64) -> Result<Self> {
        if m == 0 || n == 0 || m % n != 0 {
            return Err(Error::invalid(format!("rotor code needs positive m, n with n | m; got m={m}, n={n}")));
        }
        Ok(Self { m, n })
    }

    pub fn theta_radius(&self) -> f64 {
        PI / self.m as f64
    }

    pub fn momentum_radius(&self) -> f64 {
        self.m as f64 / (2.0 * self.n as f64)
    }

    /// Round `dθ` to the nearest multiple of `2π/m` and `dL` to the nearest multiple
    /// of `m/n`; the logical error is the number of steps taken, mod `n`.
    pub fn decode(&self, d_theta: f64, d_l: f64) -> Result<RotorOutcome> {
        if !d_theta.is_finite() || d_l.fract() != 0.0 || !d_l.is_finite() {
            return Err(Error::invalid(format!("angular momentum shift must be an integer, got {d_l}")));
        }
        let (_, kx) = centered_mod(d_theta, 2.0 * PI / self.m as f64);
        let step = (self.m / self.n) as i64;
        let dl = d_l as i64;
        let kz = (dl - centered_rem(dl, step)) / step;
        let n = self.n as i64;
        let logical = LogicalLabel {
            x: (kx as i64).rem_euclid(n) as u64,
            z: kz.rem_euclid(n) as u64,
        };
        Ok(RotorOutcome { correctable: logical.is_identity(), logical })
    }
}
