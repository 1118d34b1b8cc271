//! Dense symmetric linear algebra: the matrix type, a full symmetric
//! eigensolver, sample covariance and PCA.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!(
                "matrix must be non-empty, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {} entries for {rows}x{cols}, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(n * m);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != m {
                return Err(Error::Dimension(format!(
                    "row {i} has {} columns, expected {m}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Matrix::from_vec(n, m, data)
    }

    /// Column vector (n x 1).
    pub fn column_vector(values: &[f64]) -> Result<Self> {
        Matrix::from_vec(values.len(), 1, values.to_vec())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let a = self.row(i);
            let dst = out.row_mut(i);
            for (k, &aik) in a.iter().enumerate() {
                if aik == 0.0 {
                    continue;
                }
                for (d, &b) in dst.iter_mut().zip(other.row(k)) {
                    *d += aik * b;
                }
            }
        }
        Ok(out)
    }

    /// New matrix holding the listed rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    /// Principal submatrix on `indices` (rows and columns).
    pub fn select_square(&self, indices: &[usize]) -> Matrix {
        let k = indices.len();
        let mut out = Matrix::zeros(k, k);
        for (a, &i) in indices.iter().enumerate() {
            let src = self.row(i);
            let dst = out.row_mut(a);
            for (b, &j) in indices.iter().enumerate() {
                dst[b] = src[j];
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn column_means(&self) -> Vec<f64> {
        let mut means = vec![0.0; self.cols];
        for r in self.row_iter() {
            for (m, v) in means.iter_mut().zip(r) {
                *m += v;
            }
        }
        let n = self.rows as f64;
        means.iter_mut().for_each(|m| *m /= n);
        means
    }

    /// Copy with each column shifted to zero mean.
    pub fn centered(&self) -> Matrix {
        let means = self.column_means();
        let mut out = self.clone();
        for i in 0..out.rows {
            for (v, m) in out.row_mut(i).iter_mut().zip(&means) {
                *v -= m;
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

#[inline]
pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// All pairwise squared Euclidean distances between rows.
pub fn pairwise_squared_distances(data: &Matrix) -> Matrix {
    let n = data.rows();
    let mut out = Matrix::zeros(n, n);
    out.data.par_chunks_mut(n).enumerate().for_each(|(i, dst)| {
        let xi = data.row(i);
        for (j, d) in dst.iter_mut().enumerate() {
            if j != i {
                *d = squared_distance(xi, data.row(j));
            }
        }
    });
    out
}

/// Eigenvalues in descending order with matching unit eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    /// Column `i` is the eigenvector for `values[i]`.
    pub vectors: Matrix,
}

impl EigenPairs {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The leading `k` eigenvectors as an n x k matrix.
    pub fn leading_vectors(&self, k: usize) -> Matrix {
        let n = self.vectors.rows();
        let mut out = Matrix::zeros(n, k);
        for i in 0..n {
            out.row_mut(i).copy_from_slice(&self.vectors.row(i)[..k]);
        }
        out
    }
}

/// Full eigendecomposition of a real symmetric matrix.
///
/// The input is symmetrized by averaging before decomposition. Eigenvalues are
/// returned in descending order (ties keep the solver's order) and each
/// eigenvector is signed so that its largest-magnitude entry is positive.
pub fn symmetric_eigen(m: &Matrix) -> Result<EigenPairs> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.all_finite() {
        return Err(Error::InvalidData("matrix contains NaN or Inf".into()));
    }
    let n = m.rows();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            v[i * n + j] = 0.5 * (m[(i, j)] + m[(j, i)]);
        }
    }
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(n, &mut v, &mut d, &mut e);

    // QL rotations touch pairs of columns of V; work on the transpose so they
    // become contiguous rows.
    let mut w = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            w[j * n + i] = v[i * n + j];
        }
    }
    drop(v);
    tridiagonal_ql(n, &mut d, &mut e, &mut w)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[b].total_cmp(&d[a]));

    let mut values = Vec::with_capacity(n);
    let mut vectors = Matrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        values.push(d[src]);
        let vec = &w[src * n..(src + 1) * n];
        let mut pivot = 0;
        for (i, x) in vec.iter().enumerate() {
            if x.abs() > vec[pivot].abs() {
                pivot = i;
            }
        }
        let sign = if vec[pivot] < 0.0 { -1.0 } else { 1.0 };
        for (i, x) in vec.iter().enumerate() {
            vectors[(i, col)] = sign * x;
        }
    }
    Ok(EigenPairs { values, vectors })
}

// Householder reduction to tridiagonal form, after the EISPACK tred2 routine.
// On return `d` holds the diagonal, `e[1..]` the subdiagonal and `v` the
// accumulated orthogonal transform (row-major n x n).
fn tridiagonalize(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    let idx = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        scale += d[..i].iter().map(|x| x.abs()).sum::<f64>();
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = 0.0;
                v[idx(j, i)] = 0.0;
            }
        } else {
            for x in d[..i].iter_mut() {
                *x /= scale;
                h += *x * *x;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[idx(j, i)] = f;
                g = e[j] + v[idx(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[idx(k, j)] * d[k];
                    e[k] += v[idx(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[idx(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    // Accumulate transformations.
    for i in 0..n.saturating_sub(1) {
        v[idx(n - 1, i)] = v[idx(i, i)];
        v[idx(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[idx(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[idx(k, i + 1)] * v[idx(k, j)];
                }
                for k in 0..=i {
                    v[idx(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[idx(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
        v[idx(n - 1, j)] = 0.0;
    }
    v[idx(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

// Implicit QL iteration on the symmetric tridiagonal matrix (d, e), after the
// EISPACK tql2 routine. `w` holds the transform transposed: row k is the
// k-th eigenvector on return.
fn tridiagonal_ql(n: usize, d: &mut [f64], e: &mut [f64], w: &mut [f64]) -> Result<()> {
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let max_sweeps = 64 * n.max(1);
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > max_sweeps {
                    return Err(Error::NoConvergence);
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    let (lo, hi) = w.split_at_mut((i + 1) * n);
                    let wi = &mut lo[i * n..];
                    let wi1 = &mut hi[..n];
                    for (a, b) in wi.iter_mut().zip(wi1.iter_mut()) {
                        let t = *b;
                        *b = s * *a + c * t;
                        *a = c * *a - s * t;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Sample covariance (divisor n - 1) of the mean-centered columns.
pub fn covariance(data: &Matrix) -> Result<Matrix> {
    let n = data.rows();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let centered = data.centered();
    Ok(scatter(&centered, (n - 1) as f64))
}

fn scatter(centered: &Matrix, divisor: f64) -> Matrix {
    let m = centered.cols();
    let mut cov = Matrix::zeros(m, m);
    for r in centered.row_iter() {
        for a in 0..m {
            let ra = r[a];
            if ra == 0.0 {
                continue;
            }
            let dst = &mut cov.row_mut(a)[a..];
            for (d, &rb) in dst.iter_mut().zip(&r[a..]) {
                *d += ra * rb;
            }
        }
    }
    for a in 0..m {
        for b in a..m {
            let v = cov[(a, b)] / divisor;
            cov[(a, b)] = v;
            cov[(b, a)] = v;
        }
    }
    cov
}

/// Principal component analysis of mean-centered data.
#[derive(Debug, Clone, PartialEq)]
pub struct Pca {
    /// Columns are covariance eigenvectors, by descending eigenvalue.
    pub axes: Matrix,
    /// Centered data projected onto `axes`.
    pub projected: Matrix,
    /// Sample variance of each projected column.
    pub variances: Vec<f64>,
    /// `variances` normalised to sum to one.
    pub weights: Vec<f64>,
}

impl Pca {
    pub fn total_variance(&self) -> f64 {
        self.variances.iter().sum()
    }
}

pub fn pca(data: &Matrix) -> Result<Pca> {
    let n = data.rows();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    if !data.all_finite() {
        return Err(Error::InvalidData("data contains NaN or Inf".into()));
    }
    let centered = data.centered();
    let cov = scatter(&centered, (n - 1) as f64);
    let eig = symmetric_eigen(&cov)?;
    let axes = eig.vectors;
    let projected = centered.matmul(&axes)?;

    let m = projected.cols();
    let mut variances = vec![0.0; m];
    for r in projected.row_iter() {
        for (v, x) in variances.iter_mut().zip(r) {
            *v += x * x;
        }
    }
    let scale = cov.as_slice().iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    for v in variances.iter_mut() {
        *v /= (n - 1) as f64;
        if *v <= 1e-12 * scale {
            *v = 0.0;
        }
    }
    let total: f64 = variances.iter().sum();
    if !(total > 0.0) {
        return Err(Error::DegenerateData);
    }
    let weights = variances.iter().map(|v| v / total).collect();
    Ok(Pca {
        axes,
        projected,
        variances,
        weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v: f64 = rng.random_range(-1.0..1.0);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    fn residual(m: &Matrix, eig: &EigenPairs) -> f64 {
        let n = m.rows();
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let v = eig.vectors.column(k);
            let mut r = 0.0;
            for i in 0..n {
                let mv: f64 = (0..n).map(|j| m[(i, j)] * v[j]).sum();
                r += (mv - eig.values[k] * v[i]).powi(2);
            }
            worst = worst.max(r.sqrt());
        }
        worst
    }

    #[test]
    fn identity_spectrum() {
        let eig = symmetric_eigen(&Matrix::identity(3)).unwrap();
        assert_eq!(eig.values, vec![1.0, 1.0, 1.0]);
        let vtv = eig.vectors.transpose().matmul(&eig.vectors).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(vtv[(i, j)], if i == j { 1.0 } else { 0.0 }, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn two_by_two_swap() {
        let m = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let eig = symmetric_eigen(&m).unwrap();
        assert_abs_diff_eq!(eig.values[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(eig.values[1], -1.0, epsilon = 1e-14);
        let h = 1.0 / 2f64.sqrt();
        assert_abs_diff_eq!(eig.vectors[(0, 0)], h, epsilon = 1e-14);
        assert_abs_diff_eq!(eig.vectors[(1, 0)], h, epsilon = 1e-14);
        // second vector is ±(1, -1)/√2; the sign rule picks the first
        // largest-magnitude entry positive
        assert_abs_diff_eq!(eig.vectors[(0, 1)], h, epsilon = 1e-14);
        assert_abs_diff_eq!(eig.vectors[(1, 1)], -h, epsilon = 1e-14);
    }

    #[test]
    fn reconstruction_six_by_six() {
        let m = random_symmetric(6, 11);
        let eig = symmetric_eigen(&m).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let r: f64 = (0..6)
                    .map(|k| eig.vectors[(i, k)] * eig.values[k] * eig.vectors[(j, k)])
                    .sum();
                assert_abs_diff_eq!(r, m[(i, j)], epsilon = 1e-8);
            }
        }
        assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn residual_and_determinism() {
        for (n, seed) in [(1, 1), (2, 2), (17, 3), (40, 4)] {
            let m = random_symmetric(n, seed);
            let a = symmetric_eigen(&m).unwrap();
            let b = symmetric_eigen(&m).unwrap();
            assert_eq!(a, b);
            assert!(residual(&m, &a) <= 1e-8 * m.frobenius_norm().max(1.0));
        }
    }

    #[test]
    fn eigen_error_paths() {
        let rect = Matrix::zeros(2, 3);
        assert!(matches!(symmetric_eigen(&rect), Err(Error::Dimension(_))));
        let mut bad = Matrix::identity(2);
        bad[(0, 1)] = f64::NAN;
        assert!(matches!(symmetric_eigen(&bad), Err(Error::InvalidData(_))));
    }

    #[test]
    fn covariance_cases() {
        let same = Matrix::from_rows(&[[1.0, 2.0], [1.0, 2.0], [1.0, 2.0]]).unwrap();
        assert!(covariance(&same)
            .unwrap()
            .as_slice()
            .iter()
            .all(|&v| v == 0.0));

        let col = Matrix::from_rows(&[[0.0], [2.0]]).unwrap();
        assert_abs_diff_eq!(covariance(&col).unwrap()[(0, 0)], 2.0, epsilon = 1e-15);

        let one = Matrix::from_rows(&[[1.0, 1.0]]).unwrap();
        assert_eq!(
            covariance(&one),
            Err(Error::InsufficientData { needed: 2, got: 1 })
        );
    }

    #[test]
    fn covariance_independent_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rows: Vec<[f64; 2]> = (0..20_000)
            .map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-3.0..3.0)])
            .collect();
        let cov = covariance(&Matrix::from_rows(&rows).unwrap()).unwrap();
        // uniform(-a, a) has variance a²/3
        assert_abs_diff_eq!(cov[(0, 0)], 1.0 / 3.0, epsilon = 0.02);
        assert_abs_diff_eq!(cov[(1, 1)], 3.0, epsilon = 0.15);
        assert_abs_diff_eq!(cov[(0, 1)], 0.0, epsilon = 0.05);
        assert_eq!(cov[(0, 1)], cov[(1, 0)]);
    }

    #[test]
    fn pca_axis_aligned_variances() {
        // four corners (±a, ±b): sample variances 4a²/3 and 4b²/3
        let a = (27.0f64 / 4.0).sqrt();
        let b = (3.0f64 / 4.0).sqrt();
        let data = Matrix::from_rows(&[[a, b], [a, -b], [-a, b], [-a, -b]]).unwrap();
        let p = pca(&data).unwrap();
        assert_abs_diff_eq!(p.variances[0], 9.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.variances[1], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.weights[0], 0.9, epsilon = 1e-12);
        assert_abs_diff_eq!(p.weights[1], 0.1, epsilon = 1e-12);
    }

    #[test]
    fn pca_degenerate() {
        let data = Matrix::from_rows(&[[4.0, -1.0, 2.0]; 6]).unwrap();
        assert_eq!(pca(&data), Err(Error::DegenerateData));
    }

    #[test]
    fn pca_trace_and_decorrelation() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rows: Vec<Vec<f64>> = (0..50)
            .map(|_| {
                let t: f64 = rng.random_range(-1.0..1.0);
                vec![
                    t * 5.0 + rng.random_range(-0.1..0.1),
                    -t * 2.0 + rng.random_range(-0.5..0.5),
                    rng.random_range(-1.0..1.0),
                    t,
                ]
            })
            .collect();
        let data = Matrix::from_rows(&rows).unwrap();
        let p = pca(&data).unwrap();
        let cov = covariance(&data).unwrap();
        let trace: f64 = (0..4).map(|i| cov[(i, i)]).sum();
        assert_abs_diff_eq!(p.total_variance(), trace, epsilon = 1e-9);
        let pc = covariance(&p.projected).unwrap();
        let scale = pc.max_abs();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!(pc[(i, j)].abs() <= 1e-8 * scale);
                }
            }
        }
        assert!(p.variances.windows(2).all(|w| w[0] >= w[1] - 1e-12));
        assert_abs_diff_eq!(p.weights.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }
}
