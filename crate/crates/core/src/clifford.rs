//! Affine symplectic (Gaussian Clifford) gates and small circuit checks.
//!
//! A gate `U` is stored through its Heisenberg action `U† r U = H r + c` on the
//! operator vector `r = (q, p)`. Its matrix `S = Hᵀ` acts on row vectors: a shift
//! error `x` in front of the gate becomes `x S` behind it, and a displacement
//! `exp(i k·r)` becomes `exp(i k S⁻ᵀ · r)` up to a phase.
//!
//! Quoted rules such as `SUM: X₁ᵃX₂ᵇ → X₁ᵃX₂^{b−a}` or `(u₁, v₁; u₂, v₂) →
//! (u₁, v₁+v₂; u₂−u₁, v₂)` describe the inverse conjugation `U†·U`; they are
//! reproduced by [`AffineSymplectic::inverse`]. The rule `F: (u, v) → (v, −u)`
//! is the forward action.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::lattice::{LatticeCode, ShiftVector};
use crate::linalg::{omega, round_integral, int_det};
use crate::{Error, Result, SQRT_2PI};

/// Tolerance for `S ω Sᵀ = ω`.
pub const SYMPLECTIC_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GateKind {
    /// `q_t → q_t + q_c`, `p_c → p_c − p_t`.
    Sum { control: usize, target: usize },
    /// `q → p`, `p → −q`.
    Fourier { mode: usize },
    /// `p → p − q + c`, with `c = 0` for even `n` and `√(π/2n)` for odd `n`.
    Phase { mode: usize, n: u64 },
    /// `q → r^{1/3} q`, `p → r^{−1/3} p`.
    Squeeze { mode: usize, r: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AffineSymplectic {
    modes: usize,
    s: DMatrix<f64>,
    c: DVector<f64>,
}

/// Displacement `exp[i√(2π) Σ(α_i p_i + β_i q_i)]`, stored as `(β_1..β_N, α_1..α_N)`
/// so that the coefficient vector lines up with `(q, p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplacementLabel(pub Vec<f64>);

impl DisplacementLabel {
    pub fn from_alpha_beta(alpha: &[f64], beta: &[f64]) -> Self {
        DisplacementLabel(beta.iter().chain(alpha).copied().collect())
    }
    pub fn beta(&self) -> &[f64] {
        &self.0[..self.0.len() / 2]
    }
    pub fn alpha(&self) -> &[f64] {
        &self.0[self.0.len() / 2..]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Conjugated {
    pub label: DisplacementLabel,
    /// Phase picked up from the gate's constant shift, radians in `[0, 2π)`.
    pub phase: f64,
}

#[derive(Debug, Clone, Serialize)]
struct GateJson<'a> {
    kind: &'a str,
    params: serde_json::Value,
    #[serde(rename = "S")]
    s: Vec<Vec<f64>>,
    c: Vec<f64>,
}

fn check_mode(mode: usize, modes: usize) -> Result<()> {
    if mode >= modes {
        return Err(Error::invalid(format!("mode index {mode} out of range for {modes} oscillators")));
    }
    Ok(())
}

impl AffineSymplectic {
    pub fn identity(modes: usize) -> Self {
        AffineSymplectic { modes, s: DMatrix::identity(2 * modes, 2 * modes), c: DVector::zeros(2 * modes) }
    }

    /// From the Heisenberg matrix `H` and shift `c`; rejects non-symplectic `H`.
    pub fn from_heisenberg(h: DMatrix<f64>, c: DVector<f64>) -> Result<Self> {
        let dim = h.nrows();
        if dim == 0 || dim % 2 != 0 || h.ncols() != dim || c.len() != dim {
            return Err(Error::invalid("gate matrix must be 2N x 2N with a 2N shift"));
        }
        let g = AffineSymplectic { modes: dim / 2, s: h.transpose(), c };
        if g.symplectic_defect() > 1e-9 {
            return Err(Error::invalid("matrix is not symplectic"));
        }
        Ok(g)
    }

    pub fn build(kind: &GateKind, modes: usize) -> Result<Self> {
        let n = modes;
        let mut h = DMatrix::<f64>::identity(2 * n, 2 * n);
        let mut c = DVector::zeros(2 * n);
        match *kind {
            GateKind::Sum { control, target } => {
                check_mode(control, n)?;
                check_mode(target, n)?;
                if control == target {
                    return Err(Error::invalid("SUM needs distinct control and target"));
                }
                h[(target, control)] = 1.0;
                h[(n + control, n + target)] = -1.0;
            }
            GateKind::Fourier { mode } => {
                check_mode(mode, n)?;
                h[(mode, mode)] = 0.0;
                h[(n + mode, n + mode)] = 0.0;
                h[(mode, n + mode)] = 1.0;
                h[(n + mode, mode)] = -1.0;
            }
            GateKind::Phase { mode, n: dim } => {
                check_mode(mode, n)?;
                if dim == 0 {
                    return Err(Error::invalid("code dimension must be positive"));
                }
                h[(n + mode, mode)] = -1.0;
                if dim % 2 == 1 {
                    c[n + mode] = (PI / (2.0 * dim as f64)).sqrt();
                }
            }
            GateKind::Squeeze { mode, r } => {
                check_mode(mode, n)?;
                if !(r > 0.0 && r.is_finite()) {
                    return Err(Error::invalid(format!("squeeze factor must be positive, got {r}")));
                }
                h[(mode, mode)] = r.cbrt();
                h[(n + mode, n + mode)] = 1.0 / r.cbrt();
            }
        }
        Ok(AffineSymplectic { modes: n, s: h.transpose(), c })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }
    /// Row-vector matrix `S = Hᵀ`.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.s
    }
    pub fn heisenberg(&self) -> DMatrix<f64> {
        self.s.transpose()
    }
    pub fn shift(&self) -> &DVector<f64> {
        &self.c
    }

    /// `max |S ω Sᵀ − ω|`.
    pub fn symplectic_defect(&self) -> f64 {
        let w = omega(self.modes);
        (&self.s * &w * self.s.transpose() - w).abs().max()
    }

    pub fn is_symplectic(&self) -> bool {
        self.symplectic_defect() <= SYMPLECTIC_TOL
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &AffineSymplectic) -> AffineSymplectic {
        let h2 = next.heisenberg();
        AffineSymplectic { modes: self.modes, s: &self.s * &next.s, c: &h2 * &self.c + &next.c }
    }

    pub fn inverse(&self) -> AffineSymplectic {
        // S⁻¹ = -ω Sᵀ ω for symplectic S
        let w = omega(self.modes);
        let s_inv = -(&w * self.s.transpose() * &w);
        let h_inv = s_inv.transpose();
        AffineSymplectic { modes: self.modes, c: -(&h_inv * &self.c), s: s_inv }
    }

    /// Shift error after the gate. The constant `c` does not act on error displacements.
    pub fn propagate_shift(&self, shift: &ShiftVector) -> Result<ShiftVector> {
        if shift.modes() != self.modes {
            return Err(Error::invalid("shift and gate have different mode counts"));
        }
        let x = nalgebra::RowDVector::from_row_slice(shift.as_slice());
        ShiftVector::new((x * &self.s).iter().copied().collect())
    }

    /// Largest factor by which the gate can stretch a shift.
    pub fn max_amplification(&self) -> f64 {
        self.s.clone().singular_values().max()
    }

    /// `U L U†` for a displacement `L`.
    pub fn conjugate_displacement(&self, label: &DisplacementLabel) -> Result<Conjugated> {
        if label.0.len() != 2 * self.modes {
            return Err(Error::invalid("label and gate have different mode counts"));
        }
        let h_inv = self.inverse().heisenberg();
        let k = nalgebra::RowDVector::from_row_slice(&label.0) * &h_inv;
        let phase = (-SQRT_2PI * (&k * &self.c)[0]).rem_euclid(2.0 * PI);
        Ok(Conjugated { label: DisplacementLabel(k.iter().copied().collect()), phase })
    }

    /// Whether the gate maps the code's stabilizer group to itself, including signs.
    pub fn preserves_code_lattice(&self, code: &LatticeCode) -> Result<bool> {
        if code.modes() != self.modes {
            return Err(Error::invalid("gate and code have different mode counts"));
        }
        let m = code.generator();
        let m_inv = m.clone().try_inverse().ok_or_else(|| Error::Singular("lattice basis".into()))?;
        let Ok(r) = round_integral(&(m * &self.s * &m_inv), 1e-9) else {
            return Ok(false);
        };
        if int_det(&r).abs() != 1 {
            return Ok(false);
        }
        // e^{iφ_a} must equal the sign χ(m) the stabilizer group assigns to v_a S = m M
        let w = omega(self.modes);
        let h_inv_c = self.inverse().heisenberg() * &self.c;
        let a = code.gram();
        let dim = 2 * self.modes;
        for row in 0..dim {
            let phi = SQRT_2PI * (m.row(row) * &w * &h_inv_c)[0];
            let coeff: Vec<i64> = r.row(row).iter().copied().collect();
            let mut parity = 0i64;
            for i in 0..dim {
                for j in i + 1..dim {
                    parity += coeff[i] * coeff[j] * a[(i, j)];
                }
            }
            let chi = if parity.rem_euclid(2) == 0 { 0.0 } else { PI };
            let diff = (phi + chi).rem_euclid(2.0 * PI);
            if diff.min(2.0 * PI - diff) > 1e-9 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// JSON descriptor `{kind, params, S, c}`.
    pub fn to_json(&self, kind: Option<&GateKind>) -> serde_json::Value {
        let (name, params) = match kind {
            Some(k) => {
                let v = serde_json::to_value(k).unwrap_or_default();
                let name = match k {
                    GateKind::Sum { .. } => "sum",
                    GateKind::Fourier { .. } => "fourier",
                    GateKind::Phase { .. } => "phase",
                    GateKind::Squeeze { .. } => "squeeze",
                };
                let params = v.as_object().and_then(|o| o.values().next().cloned()).unwrap_or_default();
                (name, params)
            }
            None => ("composite", serde_json::Value::Null),
        };
        let dim = 2 * self.modes;
        serde_json::to_value(GateJson {
            kind: name,
            params,
            s: (0..dim).map(|i| self.s.row(i).iter().copied().collect()).collect(),
            c: self.c.iter().copied().collect(),
        })
        .unwrap_or_default()
    }
}

/// `(2x³ + x² − 2x) mod 8`: 0 for even `x`, 1 for odd.
pub fn w_gate_exponent(x: i64) -> i64 {
    let x = x.rem_euclid(8);
    (2 * x * x * x + x * x - 2 * x).rem_euclid(8)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CubicSafety {
    Safe,
    /// `|u|·L` is not small compared to one.
    Marginal,
    /// The induced momentum shift reaches half the momentum correction radius.
    Unsafe,
}

/// Largest `|u|·L` still counted as much smaller than one.
pub const CUBIC_MARGIN: f64 = 0.1;

/// Momentum shift `v ≈ 3πLu/α³` induced by the cubic phase gate acting on a state
/// with a position shift `u`, for a codeword spread over `L` spacings.
pub fn cubic_amplification(u: f64, l: f64, alpha: f64) -> Result<f64> {
    if !(l > 0.0 && alpha > 0.0) {
        return Err(Error::invalid("L and α must be positive"));
    }
    Ok(3.0 * PI * l * u / alpha.powi(3))
}

/// Classify a cubic-gate error against a code of dimension `n` with spacing `α`,
/// whose momentum correction radius is `π/(nα)`.
pub fn classify_cubic(u: f64, l: f64, alpha: f64, n: u64) -> Result<CubicSafety> {
    let v = cubic_amplification(u, l, alpha)?;
    let radius = PI / (n as f64 * alpha);
    Ok(if v.abs() >= 0.5 * radius {
        CubicSafety::Unsafe
    } else if u.abs() * l >= CUBIC_MARGIN {
        CubicSafety::Marginal
    } else {
        CubicSafety::Safe
    })
}

/// Coefficient `1/(6√(2n+1))` of `q³` in the state prepared by counting `n` photons.
pub fn cubic_phase_coefficient(n_photons: u64) -> f64 {
    1.0 / (6.0 * (2.0 * n_photons as f64 + 1.0).sqrt())
}

/// `Δn / n^{1/3}`; the photon count must be known with this ratio much below one.
pub fn photon_count_precision_ratio(n_photons: u64, dn: f64) -> f64 {
    dn / (n_photons as f64).cbrt()
}

/// Cubic coefficient after conjugating `e^{iγ′q³}` by `squeeze(r)`: `γ′ · (r^{1/3})³`.
pub fn cubic_exponent_under_squeeze(gamma_prime: f64, r: f64) -> Result<f64> {
    let g = AffineSymplectic::build(&GateKind::Squeeze { mode: 0, r }, 1)?;
    Ok(gamma_prime * g.heisenberg()[(0, 0)].powi(3))
}

type CMat = DMatrix<Complex64>;

fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac, br, bc) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    CMat::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Single-qubit gate `g` on qubit `q` (0 = most significant) of three.
fn on_qubit(g: &CMat, q: usize) -> CMat {
    let id = CMat::identity(2, 2);
    (0..3).fold(CMat::identity(1, 1), |acc, i| kron(&acc, if i == q { g } else { &id }))
}

fn cnot(control: usize, target: usize) -> CMat {
    CMat::from_fn(8, 8, |i, j| {
        let bit = |x: usize, q: usize| (x >> (2 - q)) & 1;
        let flipped = if bit(j, control) == 1 { j ^ (1 << (2 - target)) } else { j };
        if i == flipped {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

fn s_gate(inverse: bool) -> CMat {
    let t = if inverse { PI / 8.0 } else { -PI / 8.0 };
    CMat::from_diagonal(&DVector::from_vec(vec![Complex64::from_polar(1.0, t), Complex64::from_polar(1.0, -t)]))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GateCounts {
    pub s: usize,
    pub s_inv: usize,
    pub cnot: usize,
}

/// Circuit as a product of elementary gates, tracking what it was made of.
struct Circuit {
    u: CMat,
    counts: GateCounts,
}

impl Circuit {
    fn new() -> Self {
        Circuit { u: CMat::identity(8, 8), counts: GateCounts::default() }
    }
    fn push(&mut self, g: CMat) {
        self.u = g * &self.u;
    }
    fn s(&mut self, q: usize, inverse: bool) {
        self.push(on_qubit(&s_gate(inverse), q));
        if inverse {
            self.counts.s_inv += 1;
        } else {
            self.counts.s += 1;
        }
    }
    fn cnot(&mut self, c: usize, t: usize) {
        self.push(cnot(c, t));
        self.counts.cnot += 1;
    }
    /// Controlled phase `diag(1, 1, 1, i^{±1})` from two CNOTs and three `S^{±1}`.
    fn controlled_p(&mut self, c: usize, t: usize, inverse: bool) {
        self.cnot(c, t);
        self.s(t, !inverse);
        self.cnot(c, t);
        self.s(t, inverse);
        self.s(c, inverse);
    }
}

/// Frobenius distance between `u` and `v` after removing the global phase of `u[(0,0)]`
/// relative to `v[(0,0)]`.
fn phase_free_distance(u: &CMat, v: &CMat) -> f64 {
    let z = v[(0, 0)] / u[(0, 0)];
    let z = z / z.norm();
    (u * z - v).norm()
}

#[derive(Debug, Clone, Serialize)]
pub struct Lambda2zReport {
    /// Distance of the circuit to `diag((−1)^{abc})` up to global phase.
    pub distance: f64,
    /// Distance of the two-CNOT sub-circuit to `Λ(P)` up to global phase.
    pub controlled_p_distance: f64,
    pub counts: GateCounts,
    /// `max |⟨ψ|G|ψ⟩ − 1|` over the three stabilizers `Λ(Z)₁₂X₃` and its cyclic shifts,
    /// for `ψ = Λ²(Z) H⊗³|000⟩`.
    pub shor_stabilizer_deviation: f64,
}

/// Build the doubly controlled `Z` from `Λ(P)`, `Λ(P⁻¹)` and CNOTs, each `Λ(P)`
/// expanded into `S`, `S⁻¹` and CNOT, and compare against the exact unitary.
pub fn verify_lambda2z_circuit() -> Lambda2zReport {
    let one = Complex64::new(1.0, 0.0);
    let target = CMat::from_diagonal(&DVector::from_fn(8, |i, _| if i == 7 { -one } else { one }));

    let mut sub = Circuit::new();
    sub.controlled_p(0, 1, false);
    let cp = CMat::from_diagonal(&DVector::from_fn(8, |i, _| {
        if i >> 1 == 3 {
            Complex64::new(0.0, 1.0)
        } else {
            one
        }
    }));
    let controlled_p_distance = phase_free_distance(&sub.u, &cp);

    let mut c = Circuit::new();
    c.cnot(1, 2);
    c.controlled_p(0, 2, true);
    c.cnot(1, 2);
    c.controlled_p(0, 2, false);
    c.controlled_p(0, 1, false);
    let distance = phase_free_distance(&c.u, &target);

    let h = CMat::from_row_slice(2, 2, &[one, one, one, -one]) * Complex64::new(0.5f64.sqrt(), 0.0);
    let mut zero = DVector::from_element(8, Complex64::new(0.0, 0.0));
    zero[0] = one;
    let psi = &target * (on_qubit(&h, 0) * on_qubit(&h, 1) * on_qubit(&h, 2) * zero);
    let x = CMat::from_row_slice(2, 2, &[Complex64::new(0.0, 0.0), one, one, Complex64::new(0.0, 0.0)]);
    let cz = |a: usize, b: usize| {
        CMat::from_diagonal(&DVector::from_fn(8, |i, _| {
            if (i >> (2 - a)) & 1 == 1 && (i >> (2 - b)) & 1 == 1 {
                -one
            } else {
                one
            }
        }))
    };
    let shor_stabilizer_deviation = [(0, 1, 2), (1, 2, 0), (2, 0, 1)]
        .iter()
        .map(|&(a, b, t)| {
            let g = cz(a, b) * on_qubit(&x, t);
            (psi.dotc(&(g * &psi)) - one).norm()
        })
        .fold(0.0, f64::max);

    Lambda2zReport { distance, controlled_p_distance, counts: c.counts, shor_stabilizer_deviation }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeKind;

    fn gate(kind: GateKind, modes: usize) -> AffineSymplectic {
        AffineSymplectic::build(&kind, modes).unwrap()
    }

    #[test]
    fn builder_examples() {
        let f = gate(GateKind::Fourier { mode: 0 }, 1);
        assert_eq!(f.matrix(), &DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));
        assert_eq!(f.shift().norm(), 0.0);
        assert_eq!(gate(GateKind::Phase { mode: 0, n: 2 }, 1).shift().norm(), 0.0);
        assert!((gate(GateKind::Phase { mode: 0, n: 3 }, 1).shift()[1] - (PI / 6.0).sqrt()).abs() < 1e-15);
        assert_eq!(gate(GateKind::Squeeze { mode: 0, r: 1.0 }, 1), AffineSymplectic::identity(1));
        assert!(AffineSymplectic::build(&GateKind::Sum { control: 0, target: 2 }, 2).is_err());
        assert!(AffineSymplectic::build(&GateKind::Squeeze { mode: 0, r: -1.0 }, 1).is_err());
    }

    #[test]
    fn propagation_rules() {
        let f = gate(GateKind::Fourier { mode: 0 }, 1);
        let out = f.propagate_shift(&ShiftVector::single(0.1, 0.0)).unwrap();
        assert_eq!(out.as_slice(), &[0.0, -0.1]);
        assert_eq!(f.propagate_shift(&ShiftVector::zeros(1)).unwrap(), ShiftVector::zeros(1));

        let sum = gate(GateKind::Sum { control: 0, target: 1 }, 2);
        let x = ShiftVector::new(vec![0.1, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(sum.propagate_shift(&x).unwrap().as_slice(), &[0.1, 0.1, 0.0, 0.0]);
        // inverse orientation: (u1, v1; u2, v2) → (u1, v1 + v2; u2 − u1, v2)
        let (u1, u2, v1, v2) = (0.3, -0.2, 0.05, 0.7);
        let x = ShiftVector::new(vec![u1, u2, v1, v2]).unwrap();
        let y = sum.inverse().propagate_shift(&x).unwrap();
        let want = [u1, u2 - u1, v1 + v2, v2];
        assert!(y.as_slice().iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-15));
    }

    #[test]
    fn label_conjugation() {
        let sum = gate(GateKind::Sum { control: 0, target: 1 }, 2);
        // X₁ = shift of q₁: a p₁ coefficient
        let x1 = DisplacementLabel::from_alpha_beta(&[1.0, 0.0], &[0.0, 0.0]);
        let out = sum.conjugate_displacement(&x1).unwrap();
        assert_eq!(out.label.alpha(), &[1.0, 1.0]);
        // the inverse action reproduces X₁ᵃX₂ᵇ → X₁ᵃX₂^{b−a} and Z₁ᵃZ₂ᵇ → Z₁^{a+b}Z₂ᵇ
        let (a, b) = (2.0, 5.0);
        let inv = sum.inverse();
        let xs = inv.conjugate_displacement(&DisplacementLabel::from_alpha_beta(&[a, b], &[0.0, 0.0])).unwrap();
        assert_eq!(xs.label.alpha(), &[a, b - a]);
        let zs = inv.conjugate_displacement(&DisplacementLabel::from_alpha_beta(&[0.0, 0.0], &[a, b])).unwrap();
        assert_eq!(zs.label.beta(), &[a + b, b]);

        let id = AffineSymplectic::identity(2);
        assert_eq!(id.conjugate_displacement(&x1).unwrap().label, x1);

        let f = gate(GateKind::Fourier { mode: 0 }, 1);
        let x = DisplacementLabel::from_alpha_beta(&[1.0], &[0.0]);
        let ff = f.conjugate_displacement(&f.conjugate_displacement(&x).unwrap().label).unwrap();
        assert_eq!(ff.label.alpha(), &[-1.0]);
    }

    #[test]
    fn composition_is_a_group_action() {
        let p = gate(GateKind::Phase { mode: 0, n: 3 }, 1);
        let f = gate(GateKind::Fourier { mode: 0 }, 1);
        let l = DisplacementLabel(vec![0.3, -1.1]);
        let step = f.conjugate_displacement(&p.conjugate_displacement(&l).unwrap().label).unwrap();
        let both = p.then(&f).conjugate_displacement(&l).unwrap();
        let phase = (p.conjugate_displacement(&l).unwrap().phase + step.phase).rem_euclid(2.0 * PI);
        assert!((step.label.0[0] - both.label.0[0]).abs() < 1e-12);
        assert!((phase - both.phase).abs() < 1e-12);
        let id = p.then(&p.inverse());
        assert!((id.matrix() - DMatrix::identity(2, 2)).abs().max() < 1e-12);
        assert!(id.shift().norm() < 1e-12);
    }

    #[test]
    fn lattice_preservation() {
        let sq = LatticeKind::Square { n: 2, alpha: PI.sqrt() }.build().unwrap();
        assert!(gate(GateKind::Fourier { mode: 0 }, 1).preserves_code_lattice(&sq).unwrap());
        assert!(AffineSymplectic::identity(1).preserves_code_lattice(&sq).unwrap());
        assert!(!gate(GateKind::Squeeze { mode: 0, r: 2.0 }, 1).preserves_code_lattice(&sq).unwrap());
        for n in 1..=6u64 {
            let code = LatticeKind::SymmetricSquare { n }.build().unwrap();
            assert!(gate(GateKind::Phase { mode: 0, n }, 1).preserves_code_lattice(&code).unwrap(), "n={n}");
            // the wrong constant breaks the stabilizer signs
            let wrong = AffineSymplectic::from_heisenberg(
                gate(GateKind::Phase { mode: 0, n }, 1).heisenberg(),
                DVector::from_vec(vec![0.0, if n % 2 == 1 { 0.0 } else { (PI / (2.0 * n as f64)).sqrt() }]),
            )
            .unwrap();
            assert!(!wrong.preserves_code_lattice(&code).unwrap(), "n={n}");
        }
    }

    #[test]
    fn squeeze_amplification() {
        for r in [1.5, 2.0, 8.0] {
            let g = gate(GateKind::Squeeze { mode: 0, r }, 1);
            assert!((g.max_amplification() - r.cbrt()).abs() < 1e-12);
            let out = g.propagate_shift(&ShiftVector::single(1.0, 0.0)).unwrap();
            assert_eq!(out.u()[0], r.cbrt());
        }
    }

    #[test]
    fn w_gate_parity() {
        assert_eq!(w_gate_exponent(2), 0);
        assert_eq!(w_gate_exponent(0), 0);
        assert_eq!(w_gate_exponent(3), 1);
        for x in -100i64..=100 {
            let direct = (2 * x.pow(3) + x * x - 2 * x).rem_euclid(8);
            assert_eq!(w_gate_exponent(x), direct);
            assert_eq!(direct, x.rem_euclid(2));
        }
    }

    #[test]
    fn cubic_analysis() {
        let a = PI.sqrt();
        assert!((cubic_amplification(0.01, 10.0, a).unwrap() - 0.3 / a).abs() < 1e-12);
        assert!((cubic_amplification(0.01, 10.0, a).unwrap() - 0.169).abs() < 1e-3);
        assert_eq!(cubic_amplification(0.0, 10.0, a).unwrap(), 0.0);
        assert_eq!(classify_cubic(0.1 / 10.0, 10.0, a, 2).unwrap(), CubicSafety::Marginal);
        assert_eq!(classify_cubic(1e-4, 10.0, a, 2).unwrap(), CubicSafety::Safe);
        assert_eq!(classify_cubic(0.1, 10.0, a, 2).unwrap(), CubicSafety::Unsafe);
        assert_eq!(cubic_phase_coefficient(0), 1.0 / 6.0);
        assert!((cubic_phase_coefficient(112) - 1.0 / 90.0).abs() < 1e-15);
        assert!(photon_count_precision_ratio(1000, 1.0) < 0.11);
        let (g, gp) = (0.3, 0.05);
        assert!((cubic_exponent_under_squeeze(gp, g / gp).unwrap() - g).abs() < 1e-12);
    }

    #[test]
    fn lambda2z() {
        let r = verify_lambda2z_circuit();
        assert!(r.distance < 1e-9, "{r:?}");
        assert!(r.controlled_p_distance < 1e-9, "{r:?}");
        assert!(r.shor_stabilizer_deviation < 1e-9, "{r:?}");
        assert_eq!(r.counts, GateCounts { s: 5, s_inv: 4, cnot: 8 });
    }
}
