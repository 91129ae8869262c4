//! Dense complex matrix primitives.
//!
//! Everything downstream reduces to Hermitian eigenproblems: the operator
//! norm is the square root of the top eigenvalue of a Gram matrix, the PSD
//! square root is a spectral function, and positivity is a sign test on the
//! bottom eigenvalue.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{Complex, ComplexField, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{as_f64, lit, real, CMatrix, Real};

/// Allowed entrywise asymmetry of a Hermitian-flagged matrix, relative to
/// `max(1, max |m_ij|)`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues above `-PSD_CLAMP` are treated as rounding noise around zero.
pub const PSD_CLAMP: f64 = 1e-10;
/// Default floor for the reciprocal condition number in [`solve_inverse`].
pub const DEFAULT_RCOND_FLOOR: f64 = 1e-12;

/// Absolute plus relative tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Result<Self> {
        if !abs.is_finite() || abs < 0.0 {
            return Err(Error::Domain {
                what: "absolute tolerance",
                value: abs,
            });
        }
        if !rel.is_finite() || rel < 0.0 {
            return Err(Error::Domain {
                what: "relative tolerance",
                value: rel,
            });
        }
        if abs == 0.0 && rel == 0.0 {
            return Err(Error::Domain {
                what: "tolerance (both parts zero)",
                value: 0.0,
            });
        }
        Ok(Self { abs, rel })
    }

    pub fn absolute(abs: f64) -> Result<Self> {
        Self::new(abs, 0.0)
    }

    /// Admissible deviation between `a` and `b`.
    pub fn bound(&self, a: f64, b: f64) -> f64 {
        self.abs + self.rel * a.abs().max(b.abs())
    }

    pub fn admits(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.bound(a, b)
    }
}

pub fn identity<T: Real>(n: usize) -> CMatrix<T> {
    DMatrix::identity(n, n)
}

pub fn zeros<T: Real>(rows: usize, cols: usize) -> CMatrix<T> {
    DMatrix::zeros(rows, cols)
}

/// Largest entry modulus.
pub fn max_abs<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(z.modulus()))
}

/// `max |m_ij - conj(m_ji)|`.
pub fn hermitian_asymmetry<T: Real>(m: &CMatrix<T>) -> T {
    assert!(m.is_square(), "asymmetry of a non-square matrix");
    let n = m.nrows();
    let mut worst = T::zero();
    for i in 0..n {
        for j in i..n {
            let d = (m[(i, j)] - m[(j, i)].conj()).modulus();
            worst = worst.max(d);
        }
    }
    worst
}

/// Checks the Hermitian invariant and returns the exactly symmetrized copy.
pub fn validate_hermitian<T: Real>(m: &CMatrix<T>) -> Result<CMatrix<T>> {
    if !m.is_square() || m.nrows() == 0 {
        return Err(Error::Dimension(format!(
            "Hermitian matrix must be square and non-empty, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let asymmetry = hermitian_asymmetry(m);
    let scale = T::one().max(max_abs(m));
    if asymmetry > lit::<T>(HERMITIAN_TOL) * scale {
        return Err(Error::NotHermitian {
            asymmetry: as_f64(asymmetry),
        });
    }
    Ok(symmetrize(m))
}

/// `(M + M*) / 2`.
pub fn symmetrize<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    (m + m.adjoint()).scale(lit(0.5))
}

/// Eigendecomposition `M = U diag(values) U*` of a Hermitian matrix, with
/// eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T: Real> {
    pub values: Vec<T>,
    pub vectors: CMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    pub fn min(&self) -> T {
        self.values[0]
    }

    pub fn max(&self) -> T {
        *self.values.last().expect("non-empty spectrum")
    }

    /// `U f(Λ) U*`.
    pub fn map(&self, f: impl Fn(T) -> T) -> CMatrix<T> {
        let mut scaled = self.vectors.clone();
        for (j, &v) in self.values.iter().enumerate() {
            let fv = real(f(v));
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= fv);
        }
        scaled * self.vectors.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix<T> {
        self.map(|v| v)
    }
}

fn iteration_budget(n: usize) -> usize {
    64 * n + 64
}

fn solve_symmetric<T: Real>(m: CMatrix<T>, vectors: bool) -> Result<(Vec<T>, Option<CMatrix<T>>)> {
    let n = m.nrows();
    let budget = iteration_budget(n);
    if vectors {
        let eig = SymmetricEigen::try_new(m, T::default_epsilon(), budget)
            .ok_or(Error::NoConvergence { iterations: budget })?;
        Ok((eig.eigenvalues.iter().copied().collect(), Some(eig.eigenvectors)))
    } else {
        // Eigenvalues only: skip accumulating the eigenbasis.
        let tri = nalgebra::linalg::SymmetricTridiagonal::new(m);
        let (diag, off) = tri.unpack_tridiagonal();
        let tri_real = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                diag[i]
            } else if i + 1 == j {
                off[i]
            } else if j + 1 == i {
                off[j]
            } else {
                T::zero()
            }
        });
        let eig = SymmetricEigen::try_new(tri_real, T::default_epsilon(), budget)
            .ok_or(Error::NoConvergence { iterations: budget })?;
        Ok((eig.eigenvalues.iter().copied().collect(), None))
    }
}

/// Full Hermitian eigendecomposition, eigenvalues sorted ascending.
pub fn hermitian_eigs<T: Real>(m: &CMatrix<T>) -> Result<HermitianEigen<T>> {
    let h = validate_hermitian(m)?;
    let (values, vectors) = solve_symmetric(h, true)?;
    let vectors = vectors.expect("eigenvectors requested");
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
    let sorted_values = order.iter().map(|&k| values[k]).collect();
    let sorted_vectors = CMatrix::from_fn(vectors.nrows(), vectors.ncols(), |i, j| vectors[(i, order[j])]);
    Ok(HermitianEigen {
        values: sorted_values,
        vectors: sorted_vectors,
    })
}

/// Ascending eigenvalues of a Hermitian matrix, without the eigenbasis.
pub fn hermitian_eigenvalues<T: Real>(m: &CMatrix<T>) -> Result<Vec<T>> {
    let h = validate_hermitian(m)?;
    let (mut values, _) = solve_symmetric(h, false)?;
    values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(values)
}

pub fn min_eigenvalue<T: Real>(m: &CMatrix<T>) -> Result<T> {
    Ok(hermitian_eigenvalues(m)?[0])
}

/// Largest singular value, computed as the square root of the top
/// eigenvalue of the smaller Gram matrix.
pub fn operator_norm<T: Real>(m: &CMatrix<T>) -> Result<T> {
    if m.is_empty() {
        return Ok(T::zero());
    }
    let gram = if m.nrows() <= m.ncols() {
        m * m.adjoint()
    } else {
        m.adjoint() * m
    };
    let top = *hermitian_eigenvalues(&symmetrize(&gram))?
        .last()
        .expect("non-empty spectrum");
    Ok(top.max(T::zero()).sqrt())
}

/// Operator norm of `a - b`.
pub fn distance<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<T> {
    operator_norm(&(a - b))
}

/// Hermitian PSD square root.
///
/// Eigenvalues in `[-PSD_CLAMP, snap]` are set to zero, where `snap` is a
/// few hundred ulps of `1 + ||P||`. Snapping keeps square roots of
/// numerically-zero defect operators consistent across different bases.
pub fn psd_sqrt<T: Real>(p: &CMatrix<T>) -> Result<CMatrix<T>> {
    let eig = hermitian_eigs(p)?;
    let bottom = eig.min();
    if bottom < -lit::<T>(PSD_CLAMP) {
        return Err(Error::NotPsd {
            eigenvalue: as_f64(bottom),
        });
    }
    let scale = T::one() + eig.max().abs().max(bottom.abs());
    let snap = lit::<T>(256.0) * T::default_epsilon() * scale * lit((p.nrows() as f64).max(1.0));
    Ok(symmetrize(&eig.map(|v| if v <= snap { T::zero() } else { v.sqrt() })))
}

/// An inverse together with its reciprocal 1-norm condition estimate.
#[derive(Debug, Clone)]
pub struct Inverse<T: Real> {
    pub matrix: CMatrix<T>,
    pub rcond: T,
}

impl<T: Real> Inverse<T> {
    pub fn condition(&self) -> T {
        T::one() / self.rcond
    }
}

fn one_norm<T: Real>(m: &CMatrix<T>) -> T {
    m.column_iter()
        .map(|col| col.iter().fold(T::zero(), |acc, z| acc + z.modulus()))
        .fold(T::zero(), |acc, s| acc.max(s))
}

pub fn solve_inverse<T: Real>(m: &CMatrix<T>) -> Result<Inverse<T>> {
    solve_inverse_with_floor(m, DEFAULT_RCOND_FLOOR)
}

/// LU inverse, rejected when `1 / (||M||_1 ||M^-1||_1)` falls below `rcond_floor`.
pub fn solve_inverse_with_floor<T: Real>(m: &CMatrix<T>, rcond_floor: f64) -> Result<Inverse<T>> {
    if !m.is_square() || m.nrows() == 0 {
        return Err(Error::Dimension(format!(
            "inverse requires a non-empty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let inv = m.clone().lu().try_inverse().ok_or(Error::Singular { rcond: 0.0 })?;
    let denom = one_norm(m) * one_norm(&inv);
    let rcond = if denom > T::zero() { T::one() / denom } else { T::zero() };
    if !(rcond >= lit(rcond_floor)) {
        return Err(Error::Singular { rcond: as_f64(rcond) });
    }
    Ok(Inverse { matrix: inv, rcond })
}

/// Result of comparing two real multisets.
#[derive(Debug, Clone, PartialEq)]
pub struct MultisetMatch {
    pub max_deviation: f64,
    /// Index (in sorted order) of the largest deviation.
    pub worst_index: usize,
    pub within_tolerance: bool,
}

/// Sort-then-zip comparison of two real multisets.
pub fn multiset_match<T: Real>(a: &[T], b: &[T], tol: Tolerance) -> Result<MultisetMatch> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let sorted = |xs: &[T]| {
        let mut v: Vec<f64> = xs.iter().map(|&x| as_f64(x)).collect();
        v.sort_by(f64::total_cmp);
        v
    };
    let (a, b) = (sorted(a), sorted(b));
    let mut result = MultisetMatch {
        max_deviation: 0.0,
        worst_index: 0,
        within_tolerance: true,
    };
    for (i, (&x, &y)) in a.iter().zip(&b).enumerate() {
        let d = (x - y).abs();
        if d > result.max_deviation {
            result.max_deviation = d;
            result.worst_index = i;
        }
        if !(d <= tol.bound(x, y)) {
            result.within_tolerance = false;
        }
    }
    Ok(result)
}

/// Assembles `[[a, b], [c, d]]`.
pub fn block2<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>, c: &CMatrix<T>, d: &CMatrix<T>) -> CMatrix<T> {
    assert_eq!(a.nrows(), b.nrows());
    assert_eq!(c.nrows(), d.nrows());
    assert_eq!(a.ncols(), c.ncols());
    assert_eq!(b.ncols(), d.ncols());
    let (r, cl) = (a.nrows(), a.ncols());
    let mut out = zeros(r + c.nrows(), cl + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((0, cl), b.shape()).copy_from(b);
    out.view_mut((r, 0), c.shape()).copy_from(c);
    out.view_mut((r, cl), d.shape()).copy_from(d);
    out
}

/// Copies the `rows x cols` block starting at `(r0, c0)`.
pub fn sub_block<T: Real>(m: &CMatrix<T>, r0: usize, c0: usize, rows: usize, cols: usize) -> CMatrix<T> {
    m.view((r0, c0), (rows, cols)).into_owned()
}

/// `x * I`.
pub fn scaled_identity<T: Real>(n: usize, x: T) -> CMatrix<T> {
    DMatrix::from_diagonal_element(n, n, Complex::new(x, T::zero()))
}
