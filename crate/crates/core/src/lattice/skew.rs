//! Skew standard form of an integral antisymmetric matrix under unimodular congruence.

use crate::linalg::IntMatrix;
use crate::{Error, Result};

/// `R·A·Rᵀ = [[0, D], [-D, 0]]` with `R` unimodular and `D` positive diagonal,
/// each entry dividing the next.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkewStandardForm {
    pub r: IntMatrix,
    pub d: Vec<i64>,
}

impl SkewStandardForm {
    /// `∏ D_i`, the Pfaffian of `A` up to sign.
    pub fn pfaffian_abs(&self) -> u64 {
        self.d.iter().map(|&x| x as u64).product()
    }

    /// The block matrix `[[0, D], [-D, 0]]`.
    pub fn block(&self) -> IntMatrix {
        let n = self.d.len();
        let mut j = IntMatrix::zeros(2 * n, 2 * n);
        for (i, &di) in self.d.iter().enumerate() {
            j[(i, n + i)] = di;
            j[(n + i, i)] = -di;
        }
        j
    }
}

/// Congruence `B ← E B Eᵀ` where `E` adds `c` times row `src` to row `dst`.
fn add_multiple(b: &mut IntMatrix, r: &mut IntMatrix, dst: usize, src: usize, c: i64) {
    if c == 0 {
        return;
    }
    let n = b.nrows();
    for k in 0..n {
        b[(dst, k)] += c * b[(src, k)];
    }
    for k in 0..n {
        b[(k, dst)] += c * b[(k, src)];
    }
    for k in 0..n {
        r[(dst, k)] += c * r[(src, k)];
    }
}

fn swap(b: &mut IntMatrix, r: &mut IntMatrix, i: usize, j: usize) {
    if i != j {
        b.swap_rows(i, j);
        b.swap_columns(i, j);
        r.swap_rows(i, j);
    }
}

pub fn skew_standardize(a: &IntMatrix) -> Result<SkewStandardForm> {
    let dim = a.nrows();
    if dim != a.ncols() || dim % 2 != 0 || dim == 0 {
        return Err(Error::invalid(format!("expected a nonempty even square matrix, got {}x{}", a.nrows(), a.ncols())));
    }
    if a != &(-a.transpose()) {
        return Err(Error::invalid("matrix is not antisymmetric"));
    }
    let mut b = a.clone();
    let mut r = IntMatrix::identity(dim, dim);
    let mut pairs = Vec::with_capacity(dim / 2);

    for t in (0..dim).step_by(2) {
        loop {
            // smallest nonzero entry of the active block, moved to (t, t+1) and made positive
            let mut best: Option<(usize, usize, i64)> = None;
            for i in t..dim {
                for j in t..dim {
                    let v = b[(i, j)];
                    if v != 0 && best.is_none_or(|(_, _, w)| v.abs() < w.abs()) {
                        best = Some((i, j, v));
                    }
                }
            }
            let Some((i, j, v)) = best else {
                return Err(Error::Singular("antisymmetric Gram matrix is degenerate".into()));
            };
            let (i, j) = if v > 0 { (i, j) } else { (j, i) };
            swap(&mut b, &mut r, t, i);
            let j = if j == t { i } else { j };
            swap(&mut b, &mut r, t + 1, j);
            let d = b[(t, t + 1)];
            debug_assert!(d > 0);

            let mut clean = true;
            for k in t + 2..dim {
                // B[t][k] += c·B[t][t+1]  and  B[t+1][k] += c·B[t+1][t]
                let c = -b[(t, k)].div_euclid(d);
                add_multiple(&mut b, &mut r, k, t + 1, c);
                let c = b[(t + 1, k)].div_euclid(d);
                add_multiple(&mut b, &mut r, k, t, c);
                clean &= b[(t, k)] == 0 && b[(t + 1, k)] == 0;
            }
            if !clean {
                continue;
            }
            // d must divide the rest; otherwise fold the offending row into row t
            let offender = (t + 2..dim).find_map(|k| (t + 2..dim).find(|&l| b[(k, l)] % d != 0).map(|_| k));
            match offender {
                Some(k) => add_multiple(&mut b, &mut r, t, k, 1),
                None => {
                    pairs.push(d);
                    break;
                }
            }
        }
    }

    // reorder (0,1),(2,3),.. into (0..N | N..2N)
    let n = dim / 2;
    let mut order: Vec<usize> = (0..n).map(|i| 2 * i).collect();
    order.extend((0..n).map(|i| 2 * i + 1));
    let r = IntMatrix::from_fn(dim, dim, |i, j| r[(order[i], j)]);
    Ok(SkewStandardForm { r, d: pairs })
}
