//! Small dense kernels: vector helpers, LU with partial pivoting, m-subset
//! solves `u_S = A_S^{-1} e`, and Gram-Schmidt bases.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::UnitRowMatrix;
use crate::sphere::Angle;

/// Pivot tolerance for linear independence.
pub const PIVOT_TOL: f64 = 1e-10;
const SINGULAR_PIVOT: f64 = 1e-12;
const MAX_CONDITION: f64 = 1e12;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn normalized(a: &[f64]) -> Vec<f64> {
    let n = norm(a);
    a.iter().map(|x| x / n).collect()
}

/// LU factorization `PA = LU` of a square matrix stored row-major.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    min_pivot: f64,
}

impl Lu {
    pub fn factor(n: usize, a: &[f64]) -> Self {
        debug_assert_eq!(a.len(), n * n);
        let mut lu = a.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut min_pivot = f64::INFINITY;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[k * n + k].abs();
            for i in k + 1..n {
                let v = lu[i * n + k].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            min_pivot = min_pivot.min(best);
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let piv = lu[k * n + k];
            if piv == 0.0 {
                continue;
            }
            for i in k + 1..n {
                let f = lu[i * n + k] / piv;
                lu[i * n + k] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        lu[i * n + j] -= f * lu[k * n + j];
                    }
                }
            }
        }
        Lu { n, lu, perm, min_pivot }
    }

    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }

    /// Columns of the inverse, column-major (`inv[c]` is column `c`).
    pub fn inverse_columns(&self) -> Vec<Vec<f64>> {
        let n = self.n;
        (0..n)
            .map(|c| {
                let mut e = vec![0.0; n];
                e[c] = 1.0;
                self.solve(&e)
            })
            .collect()
    }
}

fn one_norm(n: usize, a: &[f64]) -> f64 {
    (0..n)
        .map(|j| (0..n).map(|i| a[i * n + j].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Result of solving `A_S u = e` for an m-subset `S` of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetSolve {
    pub subset: Vec<usize>,
    pub u: Vec<f64>,
    pub norm_u: f64,
    pub center: Vec<f64>,
    /// `arccos(1/|u|)`; present iff `|u| >= 1`.
    pub candidate_radius: Option<Angle>,
    /// Columns of `A_S^{-1}`; column `j` is orthogonal to every row of `S`
    /// except the `j`-th.
    #[serde(skip)]
    pub inverse_columns: Vec<Vec<f64>>,
}

pub fn subset_solve(a: &UnitRowMatrix, subset: &[usize]) -> Result<SubsetSolve> {
    let m = a.m();
    if subset.len() != m {
        return Err(Error::InvalidInput(format!(
            "subset has {} indices, need {m}",
            subset.len()
        )));
    }
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) || sorted.last().is_some_and(|&i| i >= a.n()) {
        return Err(Error::InvalidInput(format!("invalid subset {subset:?}")));
    }
    let mut block = Vec::with_capacity(m * m);
    for &i in &sorted {
        block.extend_from_slice(a.row(i));
    }
    let lu = Lu::factor(m, &block);
    if lu.min_pivot() < SINGULAR_PIVOT {
        return Err(Error::SingularSubset { subset: sorted });
    }
    let inv = lu.inverse_columns();
    let mut inv_rm = vec![0.0; m * m];
    for (c, col) in inv.iter().enumerate() {
        for (r, v) in col.iter().enumerate() {
            inv_rm[r * m + c] = *v;
        }
    }
    if one_norm(m, &block) * one_norm(m, &inv_rm) > MAX_CONDITION {
        return Err(Error::SingularSubset { subset: sorted });
    }
    let ones = vec![1.0; m];
    let mut u = lu.solve(&ones);
    // one step of iterative refinement
    let resid: Vec<f64> = (0..m).map(|r| 1.0 - dot(&block[r * m..(r + 1) * m], &u)).collect();
    let du = lu.solve(&resid);
    for (x, d) in u.iter_mut().zip(&du) {
        *x += d;
    }
    let norm_u = norm(&u);
    let center = u.iter().map(|x| x / norm_u).collect();
    let candidate_radius = (norm_u >= 1.0).then(|| Angle::from_cos(1.0 / norm_u));
    Ok(SubsetSolve {
        subset: sorted,
        u,
        norm_u,
        center,
        candidate_radius,
        inverse_columns: inv,
    })
}

/// Orthonormal basis `E` with `span(E_1..E_i) = span(v_1..v_i)` and
/// `E_i . v_i > 0` (the Q factor of a thin QR).
pub fn gram_schmidt_basis(vectors: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    let dim = vectors.first().map_or(0, Vec::len);
    if vectors.len() > dim {
        return Err(Error::DependentSet { index: dim });
    }
    for (idx, v) in vectors.iter().enumerate() {
        if v.len() != dim {
            return Err(Error::InvalidInput("ragged vector list".into()));
        }
        let scale = norm(v);
        let mut w = v.clone();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for e in &basis {
                let c = dot(&w, e);
                for (wi, ei) in w.iter_mut().zip(e) {
                    *wi -= c * ei;
                }
            }
        }
        let r = norm(&w);
        if !(r > PIVOT_TOL * scale.max(1.0)) {
            return Err(Error::DependentSet { index: idx });
        }
        basis.push(w.into_iter().map(|x| x / r).collect());
    }
    Ok(basis)
}
