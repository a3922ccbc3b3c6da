//! Symplectic lattice codes on `N` oscillators.
//!
//! A code is given by a `2N × 2N` generator matrix `M` whose rows `v_a` span the
//! stabilizer lattice `L` in units of `√(2π)`. Its Gram matrix `A = M ω Mᵀ` must be
//! integral; `L⊥ = {x : x ω vᵀ ∈ ℤ ∀ v ∈ L}` is spanned by `M⊥ = A⁻¹ M`, and the
//! code space has dimension `|Pf A|`.

mod builders;
mod nearest;
mod skew;

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::linalg::{integer_coordinates, omega, round_integral, to_f64, IntMatrix};
use crate::{Error, Result, SQRT_2PI};

pub use builders::{encoder_transform, LatticeKind};
pub use skew::{skew_standardize, SkewStandardForm};

use nearest::Enumerator;

/// Tolerance on the integrality of `A = M ω Mᵀ`.
pub const GRAM_TOL: f64 = 1e-9;

/// Largest oscillator count for nearest-point decoding and shortest-vector search.
pub const MAX_ENUMERATION_MODES: usize = 4;

/// Displacement `(u_1..u_N, v_1..v_N)` in plain `q`/`p` units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftVector(Vec<f64>);

impl ShiftVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.len() % 2 != 0 {
            return Err(Error::invalid(format!("shift vector needs 2N entries, got {}", values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("shift vector entries must be finite"));
        }
        Ok(Self(values))
    }

    pub fn zeros(modes: usize) -> Self {
        Self(vec![0.0; 2 * modes])
    }

    /// Single-oscillator shift `(u, v)`.
    pub fn single(u: f64, v: f64) -> Self {
        Self(vec![u, v])
    }

    pub fn modes(&self) -> usize {
        self.0.len() / 2
    }
    pub fn u(&self) -> &[f64] {
        &self.0[..self.modes()]
    }
    pub fn v(&self) -> &[f64] {
        &self.0[self.modes()..]
    }
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }
    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

impl std::ops::Add<&ShiftVector> for &ShiftVector {
    type Output = ShiftVector;
    fn add(self, rhs: &ShiftVector) -> ShiftVector {
        ShiftVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl std::ops::Sub<&ShiftVector> for &ShiftVector {
    type Output = ShiftVector;
    fn sub(self, rhs: &ShiftVector) -> ShiftVector {
        ShiftVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

/// Class of a dual-lattice point in `L⊥/L`.
///
/// Entry `i` of `label` is taken mod `moduli[i]`; entries `N + i` carry the
/// generalized `X̄` power on mode `i` and entries `i` the `Z̄` power.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LogicalCoset {
    pub label: Vec<i64>,
    pub moduli: Vec<i64>,
}

impl LogicalCoset {
    pub fn is_identity(&self) -> bool {
        self.label.iter().all(|&x| x == 0)
    }

    pub fn modes(&self) -> usize {
        self.label.len() / 2
    }

    pub fn x_power(&self, mode: usize) -> i64 {
        self.label[self.modes() + mode]
    }

    pub fn z_power(&self, mode: usize) -> i64 {
        self.label[mode]
    }
}

impl fmt::Display for LogicalCoset {
    /// `I` for the identity, otherwise factors like `X1`, `Z2^3`, `X1Z1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        let many = self.modes() > 1;
        for i in 0..self.modes() {
            for (name, p) in [("X", self.x_power(i)), ("Z", self.z_power(i))] {
                if p == 0 {
                    continue;
                }
                write!(f, "{name}")?;
                if many {
                    write!(f, "{}", i + 1)?;
                }
                if p != 1 {
                    write!(f, "^{p}")?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sublattice {
    Stabilizer,
    Dual,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftDecode {
    /// Nearest dual-lattice point, `q`/`p` units.
    pub correction: ShiftVector,
    /// Integer coordinates of the correction in the rows of `M⊥`.
    pub coordinates: Vec<i64>,
    pub logical: LogicalCoset,
}

/// On-disk lattice description: `{"N": modes, "M": rows}` in `√(2π)` units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeFile {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct LatticeCode {
    modes: usize,
    m: DMatrix<f64>,
    a: IntMatrix,
    form: SkewStandardForm,
    m_perp: DMatrix<f64>,
    descriptor: String,
    shift_protected: bool,
    dual_search: Option<Enumerator>,
    stab_search: Option<Enumerator>,
}

/// `A = M ω Mᵀ`, rounded; fails when an entry is further than [`GRAM_TOL`] from an integer.
pub fn gram(m: &DMatrix<f64>) -> Result<IntMatrix> {
    let dim = m.nrows();
    if dim == 0 || dim != m.ncols() || dim % 2 != 0 {
        return Err(Error::NotStabilizerLattice(format!(
            "generator must be a nonempty even square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let a = m * omega(dim / 2) * m.transpose();
    round_integral(&a, GRAM_TOL).map_err(|(i, j, v)| {
        Error::NotStabilizerLattice(format!("Gram entry ({i},{j}) = {v} is not an integer"))
    })
}

impl LatticeCode {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        Self::with_descriptor(m, "custom".into())
    }

    pub(crate) fn with_descriptor(m: DMatrix<f64>, descriptor: String) -> Result<Self> {
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::NotStabilizerLattice("generator has non-finite entries".into()));
        }
        let a = gram(&m)?;
        let modes = m.nrows() / 2;
        let form = match skew_standardize(&a) {
            Ok(f) => f,
            Err(Error::Singular(_)) => {
                return Err(Error::NotStabilizerLattice("generator matrix is singular".into()))
            }
            Err(e) => return Err(e),
        };
        let a_inv = to_f64(&a)
            .try_inverse()
            .ok_or_else(|| Error::NotStabilizerLattice("Gram matrix is singular".into()))?;
        let m_perp = &a_inv * &m;
        let (dual_search, stab_search) = if modes <= MAX_ENUMERATION_MODES {
            (Some(Enumerator::new(&m_perp)), Some(Enumerator::new(&m)))
        } else {
            (None, None)
        };
        Ok(LatticeCode { modes, m, a, form, m_perp, descriptor, shift_protected: true, dual_search, stab_search })
    }

    pub fn from_file(file: &LatticeFile) -> Result<Self> {
        let dim = 2 * file.n;
        if file.m.len() != dim || file.m.iter().any(|r| r.len() != dim) {
            return Err(Error::invalid(format!("lattice file: M must be {dim}x{dim} for N = {}", file.n)));
        }
        let flat: Vec<f64> = file.m.iter().flatten().copied().collect();
        Self::new(DMatrix::from_row_slice(dim, dim, &flat))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: LatticeFile =
            serde_json::from_str(s).map_err(|e| Error::invalid(format!("lattice file: {e}")))?;
        Self::from_file(&file)
    }

    pub fn to_file(&self) -> LatticeFile {
        LatticeFile {
            n: self.modes,
            m: (0..2 * self.modes).map(|i| self.m.row(i).iter().copied().collect()).collect(),
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }
    pub fn generator(&self) -> &DMatrix<f64> {
        &self.m
    }
    pub fn gram(&self) -> &IntMatrix {
        &self.a
    }
    pub fn standard_form(&self) -> &SkewStandardForm {
        &self.form
    }
    /// `M⊥ = A⁻¹ M`.
    pub fn dual(&self) -> &DMatrix<f64> {
        &self.m_perp
    }
    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }
    /// False for the nine-oscillator chain code, which gives little protection
    /// against small diffusive shifts.
    pub fn shift_protected(&self) -> bool {
        self.shift_protected
    }

    pub(crate) fn mark_unprotected(mut self) -> Self {
        self.shift_protected = false;
        self
    }

    /// `n = ∏ D_i = |Pf A|`.
    pub fn code_dimension(&self) -> u64 {
        self.form.pfaffian_abs()
    }

    pub fn is_self_dual(&self) -> bool {
        self.code_dimension() == 1
    }

    /// The same lattice with generator `U·M` for unimodular `U`.
    pub fn with_basis_change(&self, u: &IntMatrix) -> Result<Self> {
        if crate::linalg::int_det(u).abs() != 1 {
            return Err(Error::invalid("basis change must be unimodular"));
        }
        let mut c = Self::with_descriptor(to_f64(u) * &self.m, self.descriptor.clone())?;
        c.shift_protected = self.shift_protected;
        Ok(c)
    }

    fn enumerator(&self, which: Sublattice) -> Result<&Enumerator> {
        let e = match which {
            Sublattice::Dual => self.dual_search.as_ref(),
            Sublattice::Stabilizer => self.stab_search.as_ref(),
        };
        e.ok_or(Error::DimensionLimit { what: "oscillator count", value: self.modes, limit: MAX_ENUMERATION_MODES })
    }

    /// Length of the shortest nonzero vector, in `√(2π)` units.
    pub fn shortest_nonzero(&self, which: Sublattice) -> Result<f64> {
        Ok(self.enumerator(which)?.shortest2().sqrt())
    }

    /// Coset of the dual point `k · M⊥`: `R kᵀ` reduced mod `(D, D)`.
    pub fn logical_coset(&self, k: &[i64]) -> LogicalCoset {
        let dim = 2 * self.modes;
        let moduli: Vec<i64> = self.form.d.iter().chain(&self.form.d).copied().collect();
        let label = (0..dim)
            .map(|i| {
                let v: i64 = (0..dim).map(|j| self.form.r[(i, j)] * k[j]).sum();
                v.rem_euclid(moduli[i])
            })
            .collect();
        LogicalCoset { label, moduli }
    }

    fn decoded(&self, k: Vec<i64>) -> ShiftDecode {
        let dim = 2 * self.modes;
        let correction = (0..dim)
            .map(|j| SQRT_2PI * (0..dim).map(|i| k[i] as f64 * self.m_perp[(i, j)]).sum::<f64>())
            .collect();
        ShiftDecode { correction: ShiftVector(correction), logical: self.logical_coset(&k), coordinates: k }
    }

    fn check_shift(&self, shift: &ShiftVector) -> Result<Vec<f64>> {
        if shift.modes() != self.modes {
            return Err(Error::invalid(format!(
                "shift has {} modes but the code has {}",
                shift.modes(),
                self.modes
            )));
        }
        Ok(shift.as_slice().iter().map(|x| x / SQRT_2PI).collect())
    }

    /// Nearest dual-lattice point to `shift` and its logical class.
    pub fn decode_shift(&self, shift: &ShiftVector) -> Result<ShiftDecode> {
        let x = self.check_shift(shift)?;
        let k = self.enumerator(Sublattice::Dual)?.closest(&x);
        Ok(self.decoded(k))
    }

    /// Reference decoder: exhaustive search over dual coordinates within `±k` of
    /// the real-coordinate solution. Exact only while the true answer lies in the box.
    pub fn decode_shift_box(&self, shift: &ShiftVector, k: i64) -> Result<ShiftDecode> {
        let x = self.check_shift(shift)?;
        if self.modes > MAX_ENUMERATION_MODES {
            return Err(Error::DimensionLimit { what: "oscillator count", value: self.modes, limit: MAX_ENUMERATION_MODES });
        }
        Ok(self.decoded(nearest::box_closest(&self.m_perp, &x, k)))
    }

    /// Integer coordinates of `point` (√(2π) units) in the stabilizer basis, if it lies in `L`.
    pub fn stabilizer_coordinates(&self, point: &[f64]) -> Result<Option<Vec<i64>>> {
        let t = DMatrix::from_row_slice(1, point.len(), point);
        Ok(integer_coordinates(&self.m, &t, 1e-7)?.map(|c| c.iter().copied().collect()))
    }

    /// Whether two dual-lattice points (given by `M⊥` coordinates) differ by a stabilizer.
    pub fn same_coset(&self, k1: &[i64], k2: &[i64]) -> bool {
        self.logical_coset(k1) == self.logical_coset(k2)
    }
}
