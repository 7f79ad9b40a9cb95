//! Dense complex matrices at the sizes this crate needs (≤ 2^L for the
//! structural checks, ≤ L for the determinant formulas), plus an LU
//! determinant with partial pivoting.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Square dense matrix of `Complex64`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    pub dim: usize,
    pub entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParams("matrix dim must be >= 1".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::InvalidParams(format!(
                "expected {} entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        if entries
            .iter()
            .any(|e| !e.re.is_finite() || !e.im.is_finite())
        {
            return Err(Error::InvalidParams("matrix entries must be finite".into()));
        }
        Ok(ComplexMatrix { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// 2x2-block permutation matrix P on C² ⊗ C².
    pub fn swap_gate() -> Self {
        let mut p = Self::zeros(4);
        p[(0, 0)] = Complex64::new(1.0, 0.0);
        p[(1, 2)] = Complex64::new(1.0, 0.0);
        p[(2, 1)] = Complex64::new(1.0, 0.0);
        p[(3, 3)] = Complex64::new(1.0, 0.0);
        p
    }

    pub fn mul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let n = self.dim;
        let m = other.dim;
        let mut out = Self::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self[(i, j)];
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, other.dim);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        ComplexMatrix {
            dim: self.dim,
            entries,
        }
    }

    pub fn scale(&self, s: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * s).collect(),
        }
    }

    /// Largest entry magnitude.
    pub fn max_norm(&self) -> f64 {
        self.entries.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    /// Determinant by LU with partial pivoting; a numerically null pivot
    /// column (magnitude < 1e-300) short-circuits to exactly 0.
    pub fn determinant(&self) -> Complex64 {
        let n = self.dim;
        let mut a = self.entries.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for col in 0..n {
            let mut pivot = col;
            let mut best = a[col * n + col].norm();
            for row in col + 1..n {
                let mag = a[row * n + col].norm();
                if mag > best {
                    best = mag;
                    pivot = row;
                }
            }
            if best < 1e-300 {
                return Complex64::new(0.0, 0.0);
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for row in col + 1..n {
                let f = a[row * n + col] / p;
                if f == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in col..n {
                    let v = a[col * n + j];
                    a[row * n + j] -= f * v;
                }
            }
        }
        det
    }
}

/// Linear solve A x = b by Gaussian elimination with partial pivoting;
/// `None` when the pivot collapses.
pub fn solve_dense(a: &ComplexMatrix, b: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = a.dim;
    assert_eq!(b.len(), n);
    let mut m = a.entries.clone();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let mut pivot = col;
        let mut best = m[col * n + col].norm();
        for row in col + 1..n {
            let mag = m[row * n + col].norm();
            if mag > best {
                best = mag;
                pivot = row;
            }
        }
        if best < 1e-300 {
            return None;
        }
        if pivot != col {
            for j in 0..n {
                m.swap(col * n + j, pivot * n + j);
            }
            rhs.swap(col, pivot);
        }
        let p = m[col * n + col];
        for row in col + 1..n {
            let f = m[row * n + col] / p;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in col..n {
                let v = m[col * n + j];
                m[row * n + j] -= f * v;
            }
            let r = rhs[col];
            rhs[row] -= f * r;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for col in (0..n).rev() {
        let mut acc = rhs[col];
        for j in col + 1..n {
            acc -= m[col * n + j] * x[j];
        }
        x[col] = acc / m[col * n + col];
    }
    Some(x)
}

/// Least-squares fit of `values[s] ≈ Σ_m coeffs[m] · basis[s][m]` through the
/// normal equations; returns the relative l2 residual ‖Ax−b‖/‖b‖.
pub fn least_squares_residual(basis: &[Vec<Complex64>], values: &[Complex64]) -> Option<f64> {
    let m = basis.len();
    let n = basis[0].len();
    assert!(m >= n);
    assert_eq!(values.len(), m);
    let mut ata = ComplexMatrix::zeros(n);
    let mut atb = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for row in basis {
                acc += row[i].conj() * row[j];
            }
            ata[(i, j)] = acc;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (row, v) in basis.iter().zip(values) {
            acc += row[i].conj() * v;
        }
        atb[i] = acc;
    }
    let x = solve_dense(&ata, &atb)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for s in 0..m {
        let mut fit = Complex64::new(0.0, 0.0);
        for j in 0..n {
            fit += basis[s][j] * x[j];
        }
        num += (fit - values[s]).norm_sqr();
        den += values[s].norm_sqr();
    }
    Some((num / den.max(f64::MIN_POSITIVE)).sqrt())
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.dim + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C64;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Cofactor-expansion determinant, the independent oracle for small dims.
    fn det_cofactor(m: &ComplexMatrix) -> C64 {
        let n = m.dim;
        if n == 1 {
            return m[(0, 0)];
        }
        let mut acc = c(0.0, 0.0);
        for j in 0..n {
            let mut minor = ComplexMatrix::zeros(n - 1);
            for i in 1..n {
                let mut jj = 0;
                for k in 0..n {
                    if k == j {
                        continue;
                    }
                    minor[(i - 1, jj)] = m[(i, k)];
                    jj += 1;
                }
            }
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * m[(0, j)] * det_cofactor(&minor);
        }
        acc
    }

    fn pseudo_random_matrix(n: usize, seed: u64) -> ComplexMatrix {
        let mut state = seed | 1;
        let mut unif = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let entries = (0..n * n).map(|_| c(unif(), unif())).collect();
        ComplexMatrix::new(n, entries).unwrap()
    }

    #[test]
    fn identity_and_diag() {
        assert_eq!(ComplexMatrix::identity(3).determinant(), c(1.0, 0.0));
        let mut d = ComplexMatrix::zeros(2);
        d[(0, 0)] = c(2.0, 0.0);
        d[(1, 1)] = c(0.0, 3.0);
        assert_eq!(d.determinant(), c(0.0, 6.0));
    }

    #[test]
    fn matches_cofactor_oracle() {
        for n in 1..=5 {
            for seed in 1..=10u64 {
                let m = pseudo_random_matrix(n, seed * 7919);
                let lu = m.determinant();
                let co = det_cofactor(&m);
                assert!(
                    (lu - co).norm() < 1e-12 * co.norm().max(1.0),
                    "n={n} seed={seed}: {lu} vs {co}"
                );
            }
        }
    }

    #[test]
    fn row_swap_flips_sign() {
        let m = pseudo_random_matrix(4, 42);
        let mut swapped = m.clone();
        for j in 0..4 {
            let a = swapped[(1, j)];
            swapped[(1, j)] = swapped[(2, j)];
            swapped[(2, j)] = a;
        }
        let d1 = m.determinant();
        let d2 = swapped.determinant();
        assert!((d1 + d2).norm() < 1e-12 * d1.norm());
    }

    #[test]
    fn multiplicative_on_products() {
        let a = pseudo_random_matrix(4, 3);
        let b = pseudo_random_matrix(4, 11);
        let dab = a.mul(&b).determinant();
        let dadb = a.determinant() * b.determinant();
        assert!((dab - dadb).norm() < 1e-11 * dadb.norm().max(1.0));
    }

    #[test]
    fn singular_returns_zero() {
        let mut m = ComplexMatrix::zeros(3);
        for j in 0..3 {
            m[(0, j)] = c(j as f64 + 1.0, 0.5);
            m[(1, j)] = c(2.0 * (j as f64 + 1.0), 1.0); // 2x row 0
            m[(2, j)] = c(0.3 * j as f64, -0.2);
        }
        assert_eq!(m.determinant(), c(0.0, 0.0));
    }
}
