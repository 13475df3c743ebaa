//! Dense kernels: Cholesky-based SPD solves and the exact fast draw from the
//! Gaussian full conditional of the coefficients.

use ndarray::linalg::general_mat_mul;
use ndarray::{s, Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::Dataset;

const SYMMETRY_TOL: f64 = 1e-10;
const JITTER: f64 = 1e-10;
const GRAM_BLOCK: usize = 512;

/// A symmetric matrix expected to be positive definite.
#[derive(Debug, Clone)]
pub struct SpdMatrix {
    entries: Array2<f64>,
}

impl SpdMatrix {
    /// Checks squareness and symmetry; definiteness is checked when factoring.
    pub fn new(entries: Array2<f64>) -> Result<Self> {
        let dim = entries.nrows();
        if entries.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "SPD matrix must be square, got {}x{}",
                dim,
                entries.ncols()
            )));
        }
        if !entries.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteInput("SPD matrix"));
        }
        for i in 0..dim {
            for j in 0..i {
                let (a, b) = (entries[[i, j]], entries[[j, i]]);
                if (a - b).abs() > SYMMETRY_TOL * (1.0 + a.abs().max(b.abs())) {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(SpdMatrix { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn cholesky(&self) -> Result<Cholesky> {
        Cholesky::factor(self.entries.view(), 0.0)
    }
}

/// Lower-triangular factor `L` with `M = L L'`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    lower: Array2<f64>,
}

impl Cholesky {
    /// Factors `m + shift * I`, reading only the lower triangle.
    pub fn factor(m: ArrayView2<f64>, shift: f64) -> Result<Self> {
        let n = m.nrows();
        let mut l = Array2::<f64>::zeros((n, n));
        for j in 0..n {
            let row_j = l.row(j).to_owned();
            let head = &row_j.as_slice().unwrap()[..j];
            let d = m[[j, j]] + shift - head.iter().map(|v| v * v).sum::<f64>();
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { pivot: j, value: d });
            }
            let d = d.sqrt();
            l[[j, j]] = d;
            for i in (j + 1)..n {
                let row_i = l.row(i);
                let dot: f64 = row_i.as_slice().unwrap()[..j]
                    .iter()
                    .zip(head)
                    .map(|(a, b)| a * b)
                    .sum();
                l[[i, j]] = (m[[i, j]] - dot) / d;
            }
        }
        Ok(Cholesky { lower: l })
    }

    pub fn lower(&self) -> &Array2<f64> {
        &self.lower
    }

    /// Solves `L L' x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let l = &self.lower;
        let n = l.nrows();
        for i in 0..n {
            let row = &l.row(i).to_slice().unwrap()[..i];
            let dot: f64 = row.iter().zip(&b[..i]).map(|(a, x)| a * x).sum();
            b[i] = (b[i] - dot) / l[[i, i]];
        }
        for i in (0..n).rev() {
            let mut acc = b[i];
            for k in (i + 1)..n {
                acc -= l[[k, i]] * b[k];
            }
            b[i] = acc / l[[i, i]];
        }
    }

    pub fn solve_vec(&self, b: &Array1<f64>) -> Array1<f64> {
        let mut out = b.to_vec();
        self.solve_in_place(&mut out);
        Array1::from(out)
    }
}

/// Solves `M Z = B` for every column of `B`.
pub fn solve_spd(m: &SpdMatrix, b: &Array2<f64>) -> Result<Array2<f64>> {
    if b.nrows() != m.dim() {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has {} rows, matrix has dimension {}",
            b.nrows(),
            m.dim()
        )));
    }
    let chol = m.cholesky()?;
    let mut z = Array2::zeros(b.raw_dim());
    let mut col = vec![0.0; m.dim()];
    for (k, b_col) in b.axis_iter(Axis(1)).enumerate() {
        col.iter_mut().zip(b_col.iter()).for_each(|(c, v)| *c = *v);
        chol.solve_in_place(&mut col);
        z.column_mut(k)
            .iter_mut()
            .zip(&col)
            .for_each(|(dst, v)| *dst = *v);
    }
    Ok(z)
}

/// `I_n + X diag(d) X'`, accumulated over column blocks as `(X D^1/2)(X D^1/2)'`.
pub fn weighted_gram_plus_identity(x: &Array2<f64>, d: &[f64]) -> Array2<f64> {
    let (n, p) = x.dim();
    assert_eq!(d.len(), p);
    let mut gram = Array2::<f64>::eye(n);
    let mut block = Array2::<f64>::zeros((n, GRAM_BLOCK.min(p)));
    let mut start = 0;
    while start < p {
        let end = (start + GRAM_BLOCK).min(p);
        let width = end - start;
        let scales: Vec<f64> = d[start..end].iter().map(|v| v.sqrt()).collect();
        let mut scaled = block.slice_mut(s![.., ..width]);
        for (mut dst, src) in scaled
            .axis_iter_mut(Axis(0))
            .zip(x.slice(s![.., start..end]).axis_iter(Axis(0)))
        {
            for ((o, &v), &sc) in dst.iter_mut().zip(src.iter()).zip(&scales) {
                *o = v * sc;
            }
        }
        let scaled = block.slice(s![.., ..width]);
        general_mat_mul(1.0, &scaled, &scaled.t(), 1.0, &mut gram);
        start = end;
    }
    // enforce exact symmetry
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (gram[[i, j]] + gram[[j, i]]);
            gram[[i, j]] = avg;
            gram[[j, i]] = avg;
        }
    }
    gram
}

/// One exact draw from `N(m, V)` with `V = sigma^2 (X'X + D^-1)^-1` and
/// `m = (X'X + D^-1)^-1 X'y`, `D = diag(kappa_sq)`, for a standardized dataset.
pub fn sample_beta<R: Rng + ?Sized>(
    data: &Dataset,
    kappa_sq: &[f64],
    sigma_sq: f64,
    rng: &mut R,
) -> Result<Array1<f64>> {
    data.require_standardized()?;
    sample_gaussian_conditional(data.x(), data.y(), kappa_sq, sigma_sq, rng)
}

/// The draw behind [`sample_beta`] on arbitrary `(X, y)`.
///
/// 1. `u ~ N(0, sigma^2 D)`, `delta ~ N(0, sigma^2 I_n)`
/// 2. `v = X u + delta`
/// 3. solve `(X D X' + I_n) w = y - v`
/// 4. return `u + D X' w`
///
/// Only the `n x n` system is factored, so no `p x p` matrix is formed and
/// the cost is `O(n^2 p + n^3)`.
pub fn sample_gaussian_conditional<R: Rng + ?Sized>(
    x: &Array2<f64>,
    y: &Array1<f64>,
    kappa_sq: &[f64],
    sigma_sq: f64,
    rng: &mut R,
) -> Result<Array1<f64>> {
    let (n, p) = x.dim();
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "design has {} rows but response has {} entries",
            n,
            y.len()
        )));
    }
    if kappa_sq.len() != p {
        return Err(Error::DimensionMismatch(format!(
            "{} effective variances for {} predictors",
            kappa_sq.len(),
            p
        )));
    }
    if let Some(j) = kappa_sq.iter().position(|k| !(k.is_finite() && *k >= 0.0)) {
        return Err(Error::invalid(
            "kappa_sq",
            format!("entry {} = {} is not a finite non-negative variance", j, kappa_sq[j]),
        ));
    }
    if !(sigma_sq > 0.0 && sigma_sq.is_finite()) {
        return Err(Error::invalid("sigma_sq", "must be positive and finite"));
    }
    let sigma = sigma_sq.sqrt();

    let u: Array1<f64> = kappa_sq
        .iter()
        .map(|&k| sigma * k.sqrt() * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let delta: Array1<f64> = (0..n)
        .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let v = x.dot(&u) + &delta;
    let mut rhs = (y - &v).to_vec();

    let gram = weighted_gram_plus_identity(x, kappa_sq);
    let chol = match Cholesky::factor(gram.view(), 0.0) {
        Ok(c) => c,
        Err(_) => Cholesky::factor(gram.view(), JITTER)?,
    };
    chol.solve_in_place(&mut rhs);
    let xt_w = x.t().dot(&Array1::from(rhs));
    Ok(u + xt_w * ndarray::ArrayView1::from(kappa_sq))
}
