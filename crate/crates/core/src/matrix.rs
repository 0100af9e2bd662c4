//! Dense square complex matrices and column-vector helpers.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cast_complex, cr, is_finite, Real, C};

/// Complex column vector.
pub type CVector<T> = Vec<C<T>>;

/// Dense `N×N` complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix<T> {
    dim: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = cr(T::one());
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from rows. Fails unless the rows form a non-empty
    /// square array of finite entries.
    pub fn from_rows(rows: Vec<Vec<C<T>>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::WrongDimension {
                expected: 1,
                found: 0,
            });
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::NotSquare {
                    rows: dim,
                    cols: row.len(),
                });
            }
            data.extend(row);
        }
        let m = Self { dim, data };
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(m)
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[CVector<T>]) -> Self {
        let dim = columns.len();
        Self::from_fn(dim, |i, j| columns[j][i])
    }

    pub fn diagonal(values: &[C<T>]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    /// `|u⟩⟨v|`.
    pub fn outer(u: &[C<T>], v: &[C<T>]) -> Self {
        Self::from_fn(u.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| is_finite(*z))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> C<T> {
        (0..self.dim).fold(cr(T::zero()), |acc, i| acc + self[(i, i)])
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| *z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(cr(s))
    }

    /// Largest entry modulus, `‖·‖_max`.
    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), |a, b| a.max(b))
    }

    pub fn frobenius(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// `‖self − other‖_max`.
    pub fn distance(&self, other: &Self) -> T {
        debug_assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), |a, b| a.max(b))
    }

    pub fn column(&self, j: usize) -> CVector<T> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<CVector<T>> {
        (0..self.dim).map(|j| self.column(j)).collect()
    }

    pub fn mul_vec(&self, v: &[C<T>]) -> CVector<T> {
        debug_assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                let row = &self.data[i * self.dim..(i + 1) * self.dim];
                row.iter()
                    .zip(v)
                    .fold(cr(T::zero()), |acc, (a, b)| acc + *a * *b)
            })
            .collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    /// `⟨u|self|v⟩`.
    pub fn sandwich(&self, u: &[C<T>], v: &[C<T>]) -> C<T> {
        inner(u, &self.mul_vec(v))
    }

    /// Kronecker product `self ⊗ other`; the left factor acts on the outer index.
    pub fn kron(&self, other: &Self) -> Self {
        let (a, b) = (self.dim, other.dim);
        Self::from_fn(a * b, |i, j| self[(i / b, j / b)] * other[(i % b, j % b)])
    }

    /// Embeds `self` into a `dim`-dimensional matrix at diagonal block `offset`.
    pub fn embed(&self, dim: usize, offset: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(offset + i, offset + j)] = self[(i, j)];
            }
        }
        m
    }

    /// Inverse by Gauss–Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.dim;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let scale = self.max_abs().max(T::min_positive_value());
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| {
                    a[(x, col)]
                        .norm()
                        .partial_cmp(&a[(y, col)].norm())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap_or(col);
            if a[(pivot, col)].norm() <= T::epsilon() * scale {
                return Err(Error::Singular);
            }
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let p = a[(col, col)];
            for j in 0..n {
                a[(col, j)] /= p;
                inv[(col, j)] /= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[(r, col)];
                if factor.norm() == T::zero() {
                    continue;
                }
                for j in 0..n {
                    let av = a[(col, j)];
                    let iv = inv[(col, j)];
                    a[(r, j)] -= factor * av;
                    inv[(r, j)] -= factor * iv;
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, r1: usize, r2: usize) {
        let n = self.dim;
        for j in 0..n {
            self.data.swap(r1 * n + j, r2 * n + j);
        }
    }

    /// `‖self − self†‖_max`.
    pub fn hermiticity_defect(&self) -> T {
        let n = self.dim;
        let mut worst = T::zero();
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Converts to another floating point width.
    pub fn cast<U: Real>(&self) -> CMatrix<U> {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| cast_complex(*z)).collect(),
        }
    }

    /// Rows as nested vectors.
    pub fn to_rows(&self) -> Vec<Vec<C<T>>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }
}

impl<T: Real> Index<(usize, usize)> for CMatrix<T> {
    type Output = C<T>;
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.dim + j]
    }
}

impl<T: fmt::Debug> fmt::Debug for CMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}×{})", self.dim, self.dim)?;
        for row in self.data.chunks(self.dim) {
            let cells: Vec<String> = row.iter().map(|z| format!("{:?}", z)).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl<'a, T: Real> $trait<&'a CMatrix<T>> for &'a CMatrix<T> {
            type Output = CMatrix<T>;
            fn $method(self, rhs: &'a CMatrix<T>) -> CMatrix<T> {
                assert_eq!(self.dim, rhs.dim, "matrix dimensions differ");
                CMatrix {
                    dim: self.dim,
                    data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a $op *b).collect(),
                }
            }
        }
        impl<T: Real> $trait for CMatrix<T> {
            type Output = CMatrix<T>;
            fn $method(self, rhs: CMatrix<T>) -> CMatrix<T> {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);

impl<'a, T: Real> Mul<&'a CMatrix<T>> for &'a CMatrix<T> {
    type Output = CMatrix<T>;
    fn mul(self, rhs: &'a CMatrix<T>) -> CMatrix<T> {
        self.matmul(rhs)
    }
}

impl<T: Real> Mul for CMatrix<T> {
    type Output = CMatrix<T>;
    fn mul(self, rhs: CMatrix<T>) -> CMatrix<T> {
        self.matmul(&rhs)
    }
}

impl<T: Real> Neg for CMatrix<T> {
    type Output = CMatrix<T>;
    fn neg(self) -> CMatrix<T> {
        self.scale_real(-T::one())
    }
}

fn check_dims<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    Ok(())
}

/// `{a, b} = ab + ba`.
pub fn anticommutator<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<CMatrix<T>> {
    check_dims(a, b)?;
    Ok(&(a * b) + &(b * a))
}

/// `[a, b] = ab − ba`.
pub fn commutator<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<CMatrix<T>> {
    check_dims(a, b)?;
    Ok(&(a * b) - &(b * a))
}

/// Hermitian inner product `⟨u|v⟩`, antilinear in `u`.
pub fn inner<T: Real>(u: &[C<T>], v: &[C<T>]) -> C<T> {
    u.iter()
        .zip(v)
        .fold(cr(T::zero()), |acc, (a, b)| acc + a.conj() * *b)
}

pub fn norm<T: Real>(v: &[C<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

pub fn normalized<T: Real>(v: &[C<T>]) -> CVector<T> {
    let n = norm(v);
    v.iter().map(|z| *z / n).collect()
}

pub fn scaled<T: Real>(v: &[C<T>], s: C<T>) -> CVector<T> {
    v.iter().map(|z| *z * s).collect()
}

/// `a·u + b·v`.
pub fn combine<T: Real>(a: C<T>, u: &[C<T>], b: C<T>, v: &[C<T>]) -> CVector<T> {
    u.iter().zip(v).map(|(x, y)| a * *x + b * *y).collect()
}

/// Largest entry modulus of `u − v`.
pub fn vec_distance<T: Real>(u: &[C<T>], v: &[C<T>]) -> T {
    u.iter()
        .zip(v)
        .map(|(a, b)| (*a - *b).norm())
        .fold(T::zero(), |a, b| a.max(b))
}

pub fn basis_vector<T: Real>(dim: usize, k: usize) -> CVector<T> {
    let mut v = vec![cr(T::zero()); dim];
    v[k] = cr(T::one());
    v
}

/// Pauli matrices `σ₀, σx, σy, σz`.
pub fn pauli<T: Real>(mu: usize) -> CMatrix<T> {
    let (o, z, i) = (
        cr(T::one()),
        cr(T::zero()),
        Complex::new(T::zero(), T::one()),
    );
    let rows = match mu {
        0 => [[o, z], [z, o]],
        1 => [[z, o], [o, z]],
        2 => [[z, -i], [i, z]],
        3 => [[o, z], [z, -o]],
        _ => panic!("Pauli index {mu} out of range"),
    };
    CMatrix::from_fn(2, |r, c| rows[r][c])
}

pub fn sigma_x<T: Real>() -> CMatrix<T> {
    pauli(1)
}

pub fn sigma_y<T: Real>() -> CMatrix<T> {
    pauli(2)
}

pub fn sigma_z<T: Real>() -> CMatrix<T> {
    pauli(3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn i64c() -> Complex64 {
        Complex64::new(0.0, 1.0)
    }

    #[test]
    fn pauli_anticommutators() {
        let sx = sigma_x::<f64>();
        let sy = sigma_y::<f64>();
        let two_i = CMatrix::<f64>::identity(2).scale_real(2.0);
        assert_eq!(anticommutator(&sx, &sx).unwrap(), two_i);
        assert_eq!(anticommutator(&sx, &sy).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn pauli_commutator_is_two_i_sigma_z() {
        let c = commutator(&sigma_x::<f64>(), &sigma_y()).unwrap();
        let expected = sigma_z::<f64>().scale(i64c() * 2.0);
        assert!(c.distance(&expected) < 1e-15);
        let id = CMatrix::<f64>::identity(2);
        assert_eq!(commutator(&id, &sigma_y()).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn hdotsigma_anticommutator_is_scalar() {
        let h = [
            Complex64::new(0.3, -0.2),
            Complex64::new(-1.1, 0.4),
            Complex64::new(0.05, 0.7),
        ];
        let m = (1..=3).fold(CMatrix::<f64>::zeros(2), |acc, mu| {
            acc + pauli(mu).scale(h[mu - 1])
        });
        let norm2: f64 = h.iter().map(|z| z.norm_sqr()).sum();
        let d = anticommutator(&m, &m.adjoint()).unwrap();
        assert!(d.distance(&CMatrix::identity(2).scale_real(2.0 * norm2)) < 1e-14);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = CMatrix::<f64>::identity(2);
        let b = CMatrix::<f64>::identity(3);
        assert!(matches!(
            anticommutator(&a, &b),
            Err(Error::DimensionMismatch { left: 2, right: 3 })
        ));
        assert!(commutator(&a, &b).is_err());
    }

    #[test]
    fn from_rows_rejects_ragged_and_nan() {
        let z = Complex64::new(0.0, 0.0);
        assert!(CMatrix::from_rows(vec![vec![z, z], vec![z]]).is_err());
        assert!(matches!(
            CMatrix::from_rows(vec![vec![Complex64::new(f64::NAN, 0.0)]]),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn inverse_roundtrip() {
        let m = CMatrix::from_fn(3, |i, j| {
            Complex64::new((i * 3 + j) as f64 + 1.0, (i as f64) - (j as f64) * 0.5)
        }) + CMatrix::identity(3).scale_real(4.0);
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).distance(&CMatrix::identity(3)) < 1e-12);
        assert!(matches!(
            CMatrix::<f64>::zeros(2).inverse(),
            Err(Error::Singular)
        ));
    }

    #[test]
    fn kron_layout() {
        let k = sigma_z::<f64>().kron(&sigma_x());
        assert_eq!(k[(0, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(k[(2, 3)], Complex64::new(-1.0, 0.0));
        assert_eq!(k[(0, 2)], Complex64::new(0.0, 0.0));
    }
}
