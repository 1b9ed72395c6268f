//! Small dense linear algebra: real LU for Newton steps, and a complex
//! Hessenberg/QR eigenvalue solver for Hill matrices.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::math::sqrt;

#[derive(Clone, Debug, PartialEq)]
pub enum LinalgError {
    Singular { column: usize },
    NoConvergence { remaining: usize },
    DimensionMismatch,
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::Singular { column } => write!(f, "matrix singular at column {column}"),
            LinalgError::NoConvergence { remaining } => write!(
                f,
                "QR iteration did not converge ({remaining} eigenvalues outstanding)"
            ),
            LinalgError::DimensionMismatch => f.write_str("dimension mismatch"),
        }
    }
}

impl core::error::Error for LinalgError {}

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn from_diagonal(d: &[Complex64]) -> Self {
        let mut m = CMatrix::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| {
                self.data[i * self.n..(i + 1) * self.n]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| i == j || self[(i, j)] == Complex64::new(0.0, 0.0))
        })
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Solves `A x = b` for a dense real `n × n` matrix (row-major) by LU with
/// partial pivoting.
pub fn solve_real(a: &[f64], b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let n = b.len();
    if a.len() != n * n {
        return Err(LinalgError::DimensionMismatch);
    }
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    let scale = m.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i * n + col].abs().total_cmp(&m[j * n + col].abs()))
            .unwrap_or(col);
        if m[pivot * n + col].abs() <= f64::EPSILON * scale * n as f64 {
            return Err(LinalgError::Singular { column: col });
        }
        if pivot != col {
            for j in 0..n {
                m.swap(col * n + j, pivot * n + j);
            }
            x.swap(col, pivot);
        }
        let d = m[col * n + col];
        for row in col + 1..n {
            let f = m[row * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                m[row * n + j] -= f * m[col * n + j];
            }
            x[row] -= f * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut s = x[col];
        for j in col + 1..n {
            s -= m[col * n + j] * x[j];
        }
        x[col] = s / m[col * n + col];
    }
    Ok(x)
}

/// Solves `A x = b` for a complex matrix by LU with partial pivoting.
pub fn solve_complex(a: &CMatrix, b: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
    let n = a.n;
    if b.len() != n {
        return Err(LinalgError::DimensionMismatch);
    }
    let mut m = a.clone();
    let mut x = b.to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[(i, col)].norm().total_cmp(&m[(j, col)].norm()))
            .unwrap_or(col);
        if m[(pivot, col)].norm() == 0.0 {
            return Err(LinalgError::Singular { column: col });
        }
        if pivot != col {
            for j in 0..n {
                let t = m[(col, j)];
                m[(col, j)] = m[(pivot, j)];
                m[(pivot, j)] = t;
            }
            x.swap(col, pivot);
        }
        let d = m[(col, col)];
        for row in col + 1..n {
            let f = m[(row, col)] / d;
            if f.norm_sqr() == 0.0 {
                continue;
            }
            for j in col..n {
                let t = m[(col, j)];
                m[(row, j)] -= f * t;
            }
            let t = x[col];
            x[row] -= f * t;
        }
    }
    for col in (0..n).rev() {
        let mut s = x[col];
        for j in col + 1..n {
            s -= m[(col, j)] * x[j];
        }
        x[col] = s / m[(col, col)];
    }
    Ok(x)
}

/// Reduces `a` to upper Hessenberg form in place by Householder similarity
/// transformations.
pub fn hessenberg(a: &mut CMatrix) {
    let n = a.n;
    if n < 3 {
        return;
    }
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n - 2 {
        let mut norm2 = 0.0;
        for i in k + 1..n {
            norm2 += a[(i, k)].norm_sqr();
        }
        let tail: f64 = (k + 2..n).map(|i| a[(i, k)].norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let norm = sqrt(norm2);
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        for i in k + 1..n {
            v[i] = a[(i, k)];
        }
        v[k + 1] -= alpha;
        let vnorm2: f64 = (k + 1..n).map(|i| v[i].norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // Left: A <- (I - β v vᴴ) A on rows k+1.., columns k..
        for j in k..n {
            let mut s = Complex64::new(0.0, 0.0);
            for i in k + 1..n {
                s += v[i].conj() * a[(i, j)];
            }
            s *= beta;
            for i in k + 1..n {
                let t = v[i] * s;
                a[(i, j)] -= t;
            }
        }
        // Right: A <- A (I - β v vᴴ) on all rows, columns k+1..
        for i in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for j in k + 1..n {
                s += a[(i, j)] * v[j];
            }
            s *= beta;
            for j in k + 1..n {
                let t = s * v[j].conj();
                a[(i, j)] -= t;
            }
        }
        a[(k + 1, k)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
}

fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let m = (a + d) * 0.5;
    let h = (a - d) * 0.5;
    let disc = (h * h + b * c).sqrt();
    (m + disc, m - disc)
}

/// Rotation `G = [[c, s], [-s̄, c]]` with `G (x, y)ᵀ = (r, 0)ᵀ`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let r = crate::math::hypot(ax, ay);
    (ax / r, (x / ax) * y.conj() / r)
}

/// All eigenvalues of a general complex matrix, sorted by `(Im, Re)`.
///
/// Householder reduction to Hessenberg form followed by single-shift QR with
/// Wilkinson shifts and Givens rotations; only the active diagonal window is
/// updated since eigenvectors are not accumulated.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<Complex64>, LinalgError> {
    let n = a.n;
    let mut h = a.clone();
    hessenberg(&mut h);
    let mut eig = vec![Complex64::new(0.0, 0.0); n];
    let mut rot: Vec<(f64, Complex64)> = vec![(1.0, Complex64::new(0.0, 0.0)); n];
    let zero = Complex64::new(0.0, 0.0);
    let mut hi = n;
    let mut iter = 0usize;
    let max_iter = 30 * n.max(1);
    let mut total = 0usize;
    while hi > 0 {
        let last = hi - 1;
        let mut lo = last;
        while lo > 0 {
            let s = h[(lo - 1, lo - 1)].l1_norm() + h[(lo, lo)].l1_norm();
            let sub = h[(lo, lo - 1)].l1_norm();
            if sub == 0.0 || sub <= f64::EPSILON * s {
                h[(lo, lo - 1)] = zero;
                break;
            }
            lo -= 1;
        }
        if lo == last {
            eig[last] = h[(last, last)];
            hi -= 1;
            iter = 0;
            continue;
        }
        if lo + 1 == last {
            let (e1, e2) = eig2(
                h[(lo, lo)],
                h[(lo, last)],
                h[(last, lo)],
                h[(last, last)],
            );
            eig[lo] = e1;
            eig[last] = e2;
            hi -= 2;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_iter {
            return Err(LinalgError::NoConvergence { remaining: hi });
        }
        let d = h[(last, last)];
        let mu = if iter.is_multiple_of(10) {
            // Exceptional shift to break cycles.
            d + Complex64::new(0.75 * h[(last, last - 1)].l1_norm(), 0.0)
        } else {
            let (e1, e2) = eig2(
                h[(last - 1, last - 1)],
                h[(last - 1, last)],
                h[(last, last - 1)],
                d,
            );
            if (e1 - d).norm() <= (e2 - d).norm() {
                e1
            } else {
                e2
            }
        };
        for i in lo..=last {
            h[(i, i)] -= mu;
        }
        for k in lo..last {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            rot[k] = (c, s);
            for j in k..=last {
                let t1 = h[(k, j)];
                let t2 = h[(k + 1, j)];
                h[(k, j)] = t1 * c + s * t2;
                h[(k + 1, j)] = -s.conj() * t1 + t2 * c;
            }
            h[(k + 1, k)] = zero;
        }
        for k in lo..last {
            let (c, s) = rot[k];
            let top = (k + 2).min(last);
            for i in lo..=top {
                let t1 = h[(i, k)];
                let t2 = h[(i, k + 1)];
                h[(i, k)] = t1 * c + t2 * s.conj();
                h[(i, k + 1)] = -t1 * s + t2 * c;
            }
        }
        for i in lo..=last {
            h[(i, i)] += mu;
        }
    }
    sort_spectrum(&mut eig);
    Ok(eig)
}

/// Sorts by imaginary part, then real part.
pub fn sort_spectrum(values: &mut [Complex64]) {
    values.sort_by(|a, b| a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re)));
}

/// Eigenvector for an (approximate) eigenvalue by inverse iteration.
pub fn eigenvector(a: &CMatrix, lambda: Complex64) -> Result<Vec<Complex64>, LinalgError> {
    let n = a.n;
    let scale = a.frobenius_norm().max(1.0);
    let mut shifted = a.clone();
    let shift = lambda + Complex64::new(scale * 1e-13, scale * 1e-13);
    for i in 0..n {
        shifted[(i, i)] -= shift;
    }
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + libm::sin(i as f64 * 0.37), libm::cos(i as f64 * 0.11)))
        .collect();
    for _ in 0..3 {
        v = solve_complex(&shifted, &v)?;
        let norm = sqrt(v.iter().map(|z| z.norm_sqr()).sum());
        for z in &mut v {
            *z /= norm;
        }
    }
    Ok(v)
}

/// Hausdorff distance between two finite point sets in the complex plane.
pub fn hausdorff(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    let directed = |x: &[Complex64], y: &[Complex64]| {
        x.iter()
            .map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0f64, f64::max)
    };
    directed(a, b).max(directed(b, a))
}
