//! Exact closest-point search in low-dimensional lattices (Schnorr–Euchner
//! enumeration on an LLL-reduced basis).

use nalgebra::DMatrix;

use crate::linalg::{gram_schmidt, lll_reduce, IntMatrix};

/// Relative slack under which two candidate distances count as tied.
const TIE_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub(crate) struct Enumerator {
    dim: usize,
    /// `reduced = unimod · original`
    unimod: IntMatrix,
    reduced_inv: DMatrix<f64>,
    mu: DMatrix<f64>,
    bstar: Vec<f64>,
    min_row_norm2: f64,
}

struct Search<'a> {
    e: &'a Enumerator,
    t: Vec<f64>,
    c: Vec<i64>,
    radius2: f64,
    skip_zero: bool,
    found: Vec<(f64, Vec<i64>)>,
}

impl Search<'_> {
    fn descend(&mut self, level: usize, partial: f64) {
        let e = self.e;
        let mut center = self.t[level];
        for i in level + 1..e.dim {
            center -= e.mu[(i, level)] * (self.c[i] as f64 - self.t[i]);
        }
        let room = (self.radius2 - partial).max(0.0) / e.bstar[level];
        let r = room.sqrt();
        let lo = (center - r).ceil() as i64;
        let hi = (center + r).floor() as i64;
        for ci in lo..=hi {
            let d = partial + e.bstar[level] * (ci as f64 - center).powi(2);
            if d > self.radius2 {
                continue;
            }
            self.c[level] = ci;
            if level == 0 {
                if self.skip_zero && self.c.iter().all(|&x| x == 0) {
                    continue;
                }
                self.found.push((d, self.c.clone()));
                let cut = d * (1.0 + TIE_TOL) + TIE_TOL * e.min_row_norm2;
                if cut < self.radius2 {
                    self.radius2 = cut;
                }
            } else {
                self.descend(level - 1, d);
            }
        }
    }
}

impl Enumerator {
    pub(crate) fn new(basis: &DMatrix<f64>) -> Self {
        let (reduced, unimod) = lll_reduce(basis);
        let (mu, bstar) = gram_schmidt(&reduced);
        let reduced_inv = reduced.clone().try_inverse().expect("lattice basis is invertible");
        let min_row_norm2 = (0..reduced.nrows())
            .map(|i| reduced.row(i).norm_squared())
            .fold(f64::INFINITY, f64::min);
        Enumerator { dim: basis.nrows(), unimod, reduced_inv, mu, bstar, min_row_norm2 }
    }

    fn to_original(&self, c: &[i64]) -> Vec<i64> {
        (0..self.dim).map(|j| (0..self.dim).map(|i| c[i] * self.unimod[(i, j)]).sum()).collect()
    }

    fn search(&self, x: &[f64], radius2: f64, skip_zero: bool) -> Vec<(f64, Vec<i64>)> {
        let t: Vec<f64> = (0..self.dim)
            .map(|j| (0..self.dim).map(|i| x[i] * self.reduced_inv[(i, j)]).sum())
            .collect();
        let mut s = Search { e: self, t, c: vec![0; self.dim], radius2, skip_zero, found: Vec::new() };
        s.descend(self.dim - 1, 0.0);
        let best = s.found.iter().map(|f| f.0).fold(f64::INFINITY, f64::min);
        let cut = best * (1.0 + TIE_TOL) + TIE_TOL * self.min_row_norm2;
        s.found.retain(|f| f.0 <= cut);
        s.found
    }

    /// Babai nearest-plane estimate of the squared distance from `x` to the lattice.
    fn babai_distance2(&self, x: &[f64]) -> f64 {
        let t: Vec<f64> = (0..self.dim)
            .map(|j| (0..self.dim).map(|i| x[i] * self.reduced_inv[(i, j)]).sum())
            .collect();
        let mut c = vec![0i64; self.dim];
        let mut d = 0.0;
        for level in (0..self.dim).rev() {
            let mut center = t[level];
            for i in level + 1..self.dim {
                center -= self.mu[(i, level)] * (c[i] as f64 - t[i]);
            }
            c[level] = center.round() as i64;
            d += self.bstar[level] * (c[level] as f64 - center).powi(2);
        }
        d
    }

    /// Integer coordinates (original basis) of the lattice point closest to `x`;
    /// ties go to the lexicographically smallest coordinates.
    pub(crate) fn closest(&self, x: &[f64]) -> Vec<i64> {
        let r2 = self.babai_distance2(x) * (1.0 + 1e-9) + TIE_TOL * self.min_row_norm2;
        self.search(x, r2, false)
            .into_iter()
            .map(|(_, c)| self.to_original(&c))
            .min()
            .expect("Babai point lies within the search radius")
    }

    /// Squared length of the shortest nonzero lattice vector.
    pub(crate) fn shortest2(&self) -> f64 {
        let origin = vec![0.0; self.dim];
        let r2 = self.min_row_norm2 * (1.0 + 1e-9);
        self.search(&origin, r2, true).iter().map(|f| f.0).fold(f64::INFINITY, f64::min)
    }
}

/// Brute-force closest point over integer coordinates within `±k` of the real solution.
pub(crate) fn box_closest(basis: &DMatrix<f64>, x: &[f64], k: i64) -> Vec<i64> {
    let dim = basis.nrows();
    let inv = basis.clone().try_inverse().expect("invertible basis");
    let t: Vec<f64> = (0..dim).map(|j| (0..dim).map(|i| x[i] * inv[(i, j)]).sum()).collect();
    let base: Vec<i64> = t.iter().map(|v| v.round() as i64).collect();
    let mut all = Vec::new();
    let mut off = vec![-k; dim];
    loop {
        let c: Vec<i64> = base.iter().zip(&off).map(|(b, o)| b + o).collect();
        let d: f64 = (0..dim)
            .map(|j| {
                let p: f64 = (0..dim).map(|i| c[i] as f64 * basis[(i, j)]).sum();
                (p - x[j]).powi(2)
            })
            .sum();
        all.push((d, c));
        let mut i = 0;
        while i < dim {
            off[i] += 1;
            if off[i] <= k {
                break;
            }
            off[i] = -k;
            i += 1;
        }
        if i == dim {
            break;
        }
    }
    let best = all.iter().map(|a| a.0).fold(f64::INFINITY, f64::min);
    all.into_iter()
        .filter(|a| a.0 <= best * (1.0 + TIE_TOL) + 1e-14)
        .map(|a| a.1)
        .min()
        .expect("nonempty box")
}
