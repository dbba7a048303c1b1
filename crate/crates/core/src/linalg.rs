//! Small dense solvers: complex LU with partial pivoting for MNA systems and
//! Householder least squares for rational fitting.

use num_complex::Complex;
use thiserror::Error;

use crate::Scalar;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Copy> Dense<E> {
    pub fn from_elem(rows: usize, cols: usize, value: E) -> Self {
        Self { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> E {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn get_mut(&mut self, r: usize, c: usize) -> &mut E {
        &mut self.data[r * self.cols + c]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    /// Elimination found no pivot above threshold for unknown `index`.
    #[error("singular matrix at pivot {index}")]
    Singular { index: usize },
    #[error("dimension mismatch")]
    Dimension,
}

/// Solves `A x = b` by LU factorization with partial (row) pivoting.
///
/// A pivot whose magnitude falls below `pivot_tol × max|A_ij|` is treated
/// as singular.
pub fn lu_solve<T: Scalar>(
    a: &Dense<Complex<T>>,
    b: &[Complex<T>],
) -> Result<Vec<Complex<T>>, LinalgError> {
    let n = a.rows();
    if a.cols() != n || b.len() != n {
        return Err(LinalgError::Dimension);
    }
    let max_entry = a.data.iter().fold(T::zero(), |m, z| m.max(z.norm()));
    let threshold = T::pivot_tol() * max_entry;
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();

    for k in 0..n {
        let (p, mag) = (k..n)
            .map(|r| (r, lu.get(r, k).norm()))
            .fold((k, T::neg_infinity()), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(mag > threshold) || max_entry.is_zero() {
            return Err(LinalgError::Singular { index: k });
        }
        lu.swap_rows(k, p);
        perm.swap(k, p);
        let pivot = lu.get(k, k);
        for r in k + 1..n {
            let f = lu.get(r, k) / pivot;
            *lu.get_mut(r, k) = f;
            if f.norm().is_zero() {
                continue;
            }
            for c in k + 1..n {
                let v = lu.get(k, c);
                *lu.get_mut(r, c) = lu.get(r, c) - f * v;
            }
        }
    }

    let mut x: Vec<Complex<T>> = perm.iter().map(|&i| b[i]).collect();
    for r in 0..n {
        let mut acc = x[r];
        for c in 0..r {
            acc = acc - lu.get(r, c) * x[c];
        }
        x[r] = acc;
    }
    for r in (0..n).rev() {
        let mut acc = x[r];
        for c in r + 1..n {
            acc = acc - lu.get(r, c) * x[c];
        }
        x[r] = acc / lu.get(r, r);
    }
    Ok(x)
}

/// `‖A x − b‖∞`.
pub fn residual_inf<T: Scalar>(a: &Dense<Complex<T>>, x: &[Complex<T>], b: &[Complex<T>]) -> T {
    (0..a.rows())
        .map(|r| {
            let ax = (0..a.cols()).fold(Complex::new(T::zero(), T::zero()), |acc, c| acc + a.get(r, c) * x[c]);
            (ax - b[r]).norm()
        })
        .fold(T::zero(), T::max)
}

pub fn norm_inf<T: Scalar>(v: &[Complex<T>]) -> T {
    v.iter().fold(T::zero(), |m, z| m.max(z.norm()))
}

/// Least-squares solution with a condition estimate of the column-scaled
/// system (ratio of largest to smallest `|R_ii|` of the QR factor).
#[derive(Debug, Clone)]
pub struct LstsqSolution<T> {
    pub x: Vec<T>,
    pub cond: T,
}

/// Minimizes `‖A x − b‖₂` for a tall real matrix via Householder QR on
/// unit-norm-scaled columns.
pub fn lstsq<T: Scalar>(a: &Dense<T>, b: &[T]) -> Result<LstsqSolution<T>, LinalgError> {
    let (m, n) = (a.rows(), a.cols());
    if b.len() != m || m < n {
        return Err(LinalgError::Dimension);
    }
    let mut r = a.clone();
    let mut scale = vec![T::one(); n];
    for (c, s) in scale.iter_mut().enumerate() {
        let norm = (0..m).fold(T::zero(), |acc, i| acc + r.get(i, c).powi(2)).sqrt();
        if norm > T::zero() {
            *s = norm;
            for i in 0..m {
                *r.get_mut(i, c) = r.get(i, c) / norm;
            }
        }
    }
    let mut rhs = b.to_vec();

    for k in 0..n {
        let norm = (k..m).fold(T::zero(), |acc, i| acc + r.get(i, k).powi(2)).sqrt();
        if norm.is_zero() {
            return Ok(LstsqSolution { x: vec![T::nan(); n], cond: T::infinity() });
        }
        let alpha = if r.get(k, k) > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (k..m).map(|i| r.get(i, k)).collect();
        v[0] = v[0] - alpha;
        let vnorm2 = v.iter().fold(T::zero(), |acc, x| acc + *x * *x);
        if vnorm2.is_zero() {
            continue;
        }
        for c in k..n {
            let dot = (k..m).fold(T::zero(), |acc, i| acc + v[i - k] * r.get(i, c));
            let f = T::lit(2.0) * dot / vnorm2;
            for i in k..m {
                *r.get_mut(i, c) = r.get(i, c) - f * v[i - k];
            }
        }
        let dot = (k..m).fold(T::zero(), |acc, i| acc + v[i - k] * rhs[i]);
        let f = T::lit(2.0) * dot / vnorm2;
        for i in k..m {
            rhs[i] = rhs[i] - f * v[i - k];
        }
    }

    let diag: Vec<T> = (0..n).map(|i| r.get(i, i).abs()).collect();
    let dmax = diag.iter().fold(T::zero(), |m, &d| m.max(d));
    let dmin = diag.iter().fold(T::infinity(), |m, &d| m.min(d));
    let cond = if dmin.is_zero() { T::infinity() } else { dmax / dmin };

    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        for c in i + 1..n {
            acc = acc - r.get(i, c) * x[c];
        }
        x[i] = acc / r.get(i, i);
    }
    for (xi, s) in x.iter_mut().zip(&scale) {
        *xi = *xi / *s;
    }
    Ok(LstsqSolution { x, cond })
}
