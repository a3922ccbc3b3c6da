use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::LatticeCode;
use crate::linalg::to_f64;
use crate::{Error, Result, SQRT_2PI};

/// Standard lattice families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LatticeKind {
    /// Single oscillator, stabilizer shifts `nα` in `q` and `2π/α` in `p`.
    Square { n: u64, alpha: f64 },
    /// [`LatticeKind::Square`] with `α = √(2π/n)`, so the dual is square with side `1/√n`.
    SymmetricSquare { n: u64 },
    /// Single oscillator, `M = (2n/√3)^{1/2} [[1, 0], [1/2, √3/2]]`.
    Hexagonal { n: u64 },
    /// `M = [[Mq, 0], [0, Mp]]`; requires `Mq Mpᵀ` integral.
    Css { mq: Vec<Vec<f64>>, mp: Vec<Vec<f64>> },
    /// Nine-oscillator chain: position differences within blocks of three and
    /// momentum differences between blocks, with the logical pair, completed to full rank.
    Shor9,
}

fn positive(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("code dimension n must be positive"));
    }
    Ok(())
}

fn square_matrix(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    let k = rows.len();
    if k == 0 || rows.iter().any(|r| r.len() != k) {
        return Err(Error::invalid(format!("{what} must be a nonempty square matrix")));
    }
    Ok(DMatrix::from_row_slice(k, k, &rows.iter().flatten().copied().collect::<Vec<_>>()))
}

impl LatticeKind {
    pub fn build(&self) -> Result<LatticeCode> {
        match *self {
            LatticeKind::Square { n, alpha } => {
                positive(n)?;
                if !(alpha > 0.0 && alpha.is_finite()) {
                    return Err(Error::invalid(format!("spacing α must be positive, got {alpha}")));
                }
                let m = DMatrix::from_row_slice(2, 2, &[n as f64 * alpha / SQRT_2PI, 0.0, 0.0, SQRT_2PI / alpha]);
                LatticeCode::with_descriptor(m, format!("square(n={n}, alpha={alpha})"))
            }
            LatticeKind::SymmetricSquare { n } => {
                positive(n)?;
                let alpha = (2.0 * std::f64::consts::PI / n as f64).sqrt();
                let mut c = LatticeKind::Square { n, alpha }.build()?;
                c.descriptor = format!("square(n={n})");
                Ok(c)
            }
            LatticeKind::Hexagonal { n } => {
                positive(n)?;
                let s3 = 3f64.sqrt();
                let c = (2.0 * n as f64 / s3).sqrt();
                let m = DMatrix::from_row_slice(2, 2, &[c, 0.0, 0.5 * c, 0.5 * s3 * c]);
                LatticeCode::with_descriptor(m, format!("hexagonal(n={n})"))
            }
            LatticeKind::Css { ref mq, ref mp } => {
                let mq = square_matrix(mq, "Mq")?;
                let mp = square_matrix(mp, "Mp")?;
                if mq.nrows() != mp.nrows() {
                    return Err(Error::invalid("Mq and Mp must have the same size"));
                }
                let k = mq.nrows();
                let mut m = DMatrix::zeros(2 * k, 2 * k);
                m.view_mut((0, 0), (k, k)).copy_from(&mq);
                m.view_mut((k, k), (k, k)).copy_from(&mp);
                LatticeCode::with_descriptor(m, format!("css(N={k})"))
            }
            LatticeKind::Shor9 => shor9(),
        }
    }
}

fn shor9() -> Result<LatticeCode> {
    let e = |i: usize| {
        let mut v = vec![0.0; 18];
        v[i] = 1.0;
        v
    };
    let comb = |terms: &[(usize, f64)]| {
        let mut v = vec![0.0; 18];
        for &(i, c) in terms {
            v[i] += c;
        }
        v
    };
    let p = |i: usize| 9 + i;
    let mut rows = Vec::new();
    for block in 0..3 {
        let b = 3 * block;
        rows.push(comb(&[(b, 1.0), (b + 1, -1.0)]));
        rows.push(comb(&[(b + 1, 1.0), (b + 2, -1.0)]));
    }
    rows.push(comb(&[(p(0), 1.0), (p(1), 1.0), (p(2), 1.0), (p(3), -1.0), (p(4), -1.0), (p(5), -1.0)]));
    rows.push(comb(&[(p(3), 1.0), (p(4), 1.0), (p(5), 1.0), (p(6), -1.0), (p(7), -1.0), (p(8), -1.0)]));
    rows.push(comb(&[(0, 1.0), (3, 1.0), (6, 1.0)]));
    rows.push(comb(&[(p(0), 1.0), (p(1), 1.0), (p(2), 1.0)]));

    let rank = |rows: &[Vec<f64>]| {
        DMatrix::from_row_slice(rows.len(), 18, &rows.concat()).rank(1e-9)
    };
    for i in 0..18 {
        if rows.len() == 18 {
            break;
        }
        let mut trial = rows.clone();
        trial.push(e(i));
        if rank(&trial) == trial.len() {
            rows = trial;
        }
    }
    let m = DMatrix::from_row_slice(18, 18, &rows.concat());
    Ok(LatticeCode::with_descriptor(m, "shor9".into())?.mark_unprotected())
}

/// Symplectic `S` with `M₁' S = M₂'`, where `Mᵢ' = Rᵢ Mᵢ` are the bases of two
/// self-dual lattices normalized so that `Mᵢ' ω Mᵢ'ᵀ = ω`.
pub fn encoder_transform(m1: &DMatrix<f64>, m2: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let normalized = |m: &DMatrix<f64>| -> Result<DMatrix<f64>> {
        let code = LatticeCode::new(m.clone())?;
        if !code.is_self_dual() {
            return Err(Error::NotSelfDual(code.code_dimension()));
        }
        Ok(to_f64(&code.standard_form().r) * m)
    };
    let (a, b) = (normalized(m1)?, normalized(m2)?);
    if a.nrows() != b.nrows() {
        return Err(Error::invalid("lattices have different oscillator counts"));
    }
    let inv = a.try_inverse().ok_or_else(|| Error::Singular("lattice basis".into()))?;
    Ok(inv * b)
}
