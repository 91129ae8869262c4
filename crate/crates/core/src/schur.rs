//! Norm of a Foguel operator from positivity alone.
//!
//! `||R|| <= M` iff `M^2 I - R R* >= 0`. Taking the Schur complement of the
//! lower-right block `M^2 I - V V*` reduces the `2n x 2n` test to the
//! `n x n` condition
//!
//! ```text
//! M^2 I - V* V - TT* - T V* (M^2 I - V V*)^{-1} V T* >= 0,
//! ```
//!
//! which for unitary `V` collapses to `||T|| <= (M^2 - 1) / M`.

use crate::error::{Error, Result};
use crate::kernel::{
    hermitian_eigenvalues, identity, min_eigenvalue, operator_norm, scaled_identity, solve_inverse_with_floor,
    symmetrize, validate_hermitian, zeros, Tolerance,
};
use crate::models::FoguelOperator;
use crate::scalar::{as_f64, lit, real, CMatrix, Real};
use crate::spectral::foguel_norm_closed;

/// Minimum eigenvalue required of the pivot block `Q`.
pub const PIVOT_FLOOR: f64 = 1e-12;
/// Iteration cap for [`norm_by_bisection`].
pub const MAX_BISECTION_STEPS: usize = 200;

/// `P - X Q^{-1} X*` for Hermitian `P` and positive-definite `Q`.
pub fn schur_complement<T: Real>(p: &CMatrix<T>, x: &CMatrix<T>, q: &CMatrix<T>) -> Result<CMatrix<T>> {
    let p = validate_hermitian(p)?;
    let q = validate_hermitian(q)?;
    if x.nrows() != p.nrows() || x.ncols() != q.nrows() {
        return Err(Error::Dimension(format!(
            "off-diagonal block {}x{} does not fit P {}x{} and Q {}x{}",
            x.nrows(),
            x.ncols(),
            p.nrows(),
            p.ncols(),
            q.nrows(),
            q.ncols()
        )));
    }
    let bottom = min_eigenvalue(&q)?;
    if !(bottom >= lit(PIVOT_FLOOR)) {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: as_f64(bottom),
        });
    }
    let q_inv = solve_inverse_with_floor(&q, 0.0)?.matrix;
    Ok(symmetrize(&(p - x * q_inv * x.adjoint())))
}

/// Outcome of the positivity test `M^2 I - R_T R_T* >= 0`.
#[derive(Debug, Clone)]
pub struct PositivityCertificate<T: Real> {
    pub m: T,
    /// `n x n` Schur complement of the pivot `M^2 I - V V*`.
    pub reduced_matrix: CMatrix<T>,
    pub min_eigenvalue: T,
    /// Bottom eigenvalue of the full `2n x 2n` matrix `M^2 I - R_T R_T*`.
    pub direct_min_eigenvalue: T,
    /// Verdict: `min_eigenvalue >= -threshold`.
    pub positive: bool,
    pub threshold: T,
    /// Either eigenvalue sits inside the singular band where the two routes
    /// may legitimately disagree in sign.
    pub ambiguous: bool,
}

/// Default PSD threshold `1e-10 (1 + M^2)`.
pub fn default_threshold<T: Real>(m: T) -> T {
    lit::<T>(1e-10) * (T::one() + m * m)
}

/// Width of the band around zero in which the reduced and direct verdicts
/// are not compared.
pub fn agreement_band<T: Real>(m: T) -> T {
    lit::<T>(1e-9) * (T::one() + m * m)
}

pub fn foguel_positivity<T: Real>(f: &FoguelOperator<T>, m: T) -> Result<PositivityCertificate<T>> {
    foguel_positivity_with(f, m, default_threshold(m))
}

pub fn foguel_positivity_with<T: Real>(f: &FoguelOperator<T>, m: T, threshold: T) -> Result<PositivityCertificate<T>> {
    if !(m > T::one() + lit(1e-12)) {
        return Err(Error::Domain {
            what: "M (must exceed 1)",
            value: as_f64(m),
        });
    }
    let n = f.dim();
    let (v, t) = (f.v(), f.t());
    let m2 = m * m;
    let p = scaled_identity(n, m2) - symmetrize(&(v.adjoint() * v + f.symbol_gram()));
    let x = -(t * v.adjoint());
    let q = symmetrize(&(scaled_identity(n, m2) - v * v.adjoint()));
    let reduced_matrix = schur_complement(&p, &x, &q)?;
    let min_eig = min_eigenvalue(&reduced_matrix)?;
    let direct = symmetrize(&(scaled_identity(2 * n, m2) - f.gram()));
    let direct_min = min_eigenvalue(&direct)?;

    let band = agreement_band(m);
    let ambiguous = min_eig.abs() <= band || direct_min.abs() <= band;
    let positive = min_eig >= -threshold;
    if !ambiguous && (min_eig > T::zero()) != (direct_min > T::zero()) {
        return Err(Error::Internal {
            module: "schur-positivity",
            detail: format!(
                "reduced verdict (min eig {:e}) disagrees with direct verdict (min eig {:e}) at M = {}",
                as_f64(min_eig),
                as_f64(direct_min),
                as_f64(m)
            ),
        });
    }
    Ok(PositivityCertificate {
        m,
        reduced_matrix,
        min_eigenvalue: min_eig,
        direct_min_eigenvalue: direct_min,
        positive,
        threshold,
        ambiguous,
    })
}

/// `T (M^{-2} sum_{j=0}^{k} V* (V V*)^j V / M^{2j}) T*`, the order-`k`
/// truncation of `T V* (M^2 I - V V*)^{-1} V T*`.
pub fn neumann_eval<T: Real>(v: &CMatrix<T>, t: &CMatrix<T>, m: T, k: usize) -> Result<CMatrix<T>> {
    if !(m > T::one()) {
        return Err(Error::Domain {
            what: "M (series diverges unless M > 1)",
            value: as_f64(m),
        });
    }
    let v_norm = operator_norm(v)?;
    if v_norm > T::one() + lit(1e-10) {
        return Err(Error::NotContraction { norm: as_f64(v_norm) });
    }
    let n = v.nrows();
    let vv = v * v.adjoint();
    let inv_m2 = T::one() / (m * m);
    let mut sum = zeros(n, n);
    let mut power = identity::<T>(n);
    let mut weight = inv_m2;
    for _ in 0..=k {
        sum += (v.adjoint() * &power * v) * real(weight);
        power = &power * &vv;
        weight *= inv_m2;
    }
    Ok(symmetrize(&(t * sum * t.adjoint())))
}

/// `T V* (M^2 I - V V*)^{-1} V T*`, evaluated by a direct inverse.
pub fn schur_correction<T: Real>(v: &CMatrix<T>, t: &CMatrix<T>, m: T) -> Result<CMatrix<T>> {
    let n = v.nrows();
    let q = scaled_identity(n, m * m) - v * v.adjoint();
    let q_inv = solve_inverse_with_floor(&q, 0.0)?.matrix;
    Ok(symmetrize(&(t * v.adjoint() * q_inv * v * t.adjoint())))
}

/// `||T||^2 M^{-2(k+2)} / (1 - M^{-2})`, the tail bound for [`neumann_eval`].
pub fn neumann_tail_bound<T: Real>(t_norm: T, m: T, k: usize) -> T {
    let inv_m2 = T::one() / (m * m);
    t_norm * t_norm * inv_m2.powi(k as i32 + 2) / (T::one() - inv_m2)
}

/// `t <= (M^2 - 1) / M`.
pub fn scalar_criterion<T: Real>(t: T, m: T) -> Result<bool> {
    if !(t >= T::zero()) {
        return Err(Error::Domain {
            what: "symbol norm (must be >= 0)",
            value: as_f64(t),
        });
    }
    if !(m > T::one()) {
        return Err(Error::Domain {
            what: "M (must exceed 1)",
            value: as_f64(m),
        });
    }
    Ok(t <= (m * m - T::one()) / m)
}

#[derive(Debug, Clone, Copy)]
pub struct BisectionResult<T: Real> {
    pub norm: T,
    pub iterations: usize,
}

/// Recovers `||R_T||` as the infimum of `M > 1` passing [`foguel_positivity`].
///
/// The bracket starts at `[1 + 1e-10, phi(||T||) + 1]` and is halved until its
/// width is at most `tol.abs`.
pub fn norm_by_bisection<T: Real>(f: &FoguelOperator<T>, tol: Tolerance) -> Result<BisectionResult<T>> {
    let t_norm = f.symbol_norm()?;
    if t_norm == T::zero() {
        let norm = if f.is_isometric() {
            T::one()
        } else {
            operator_norm(f.v())?
        };
        return Ok(BisectionResult { norm, iterations: 0 });
    }
    let width = lit::<T>(tol.abs);
    if !(width > T::zero()) {
        return Err(Error::Domain {
            what: "bisection width (tol.abs must be > 0)",
            value: tol.abs,
        });
    }
    let mut lo = T::one() + lit(1e-10);
    let mut hi = foguel_norm_closed(t_norm)? + T::one();
    let bracket_error = |end: &str, m: T| Error::Internal {
        module: "schur-positivity",
        detail: format!("bisection bracket invariant violated at {end} end M = {}", as_f64(m)),
    };
    // The lower end is checked with the bare sign so that operators whose
    // norm lies within the PSD threshold of 1 are still rejected.
    if foguel_positivity(f, lo)?.min_eigenvalue >= T::zero() {
        return Err(bracket_error("lower", lo));
    }
    if !foguel_positivity(f, hi)?.positive {
        return Err(bracket_error("upper", hi));
    }
    let half = lit::<T>(0.5);
    let mut iterations = 0;
    while hi - lo > width {
        if iterations == MAX_BISECTION_STEPS {
            return Err(Error::Internal {
                module: "schur-positivity",
                detail: format!("bisection exceeded {MAX_BISECTION_STEPS} steps"),
            });
        }
        let mid = (lo + hi) * half;
        if foguel_positivity(f, mid)?.positive {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok(BisectionResult {
        norm: (lo + hi) * half,
        iterations,
    })
}

/// Ascending spectrum of the reduced matrix; convenience for diagnostics.
pub fn reduced_spectrum<T: Real>(cert: &PositivityCertificate<T>) -> Result<Vec<T>> {
    hermitian_eigenvalues(&cert.reduced_matrix)
}
