//! Spectrum and norm of Foguel operators with a unitary isometry slot.
//!
//! For `lambda > 0`, `lambda != 1`, `lambda` is an eigenvalue of `R_T R_T*`
//! exactly when `(lambda - 1)^2 / lambda` is an eigenvalue of `TT*`. Every
//! eigenvalue `mu` of `TT*` therefore contributes the reciprocal pair of
//! roots of `lambda^2 - (mu + 2) lambda + 1`, and the norm of `R_T` is
//! `phi(||T||) = (||T|| + sqrt(||T||^2 + 4)) / 2`.

use crate::error::{Error, Result};
use crate::kernel::{
    block2, hermitian_eigenvalues, identity, multiset_match, operator_norm, scaled_identity, solve_inverse,
    solve_inverse_with_floor, symmetrize, zeros, Tolerance, DEFAULT_RCOND_FLOOR,
};
use crate::models::FoguelOperator;
use crate::scalar::{as_f64, lit, real, CMatrix, Real};

/// Smallest admissible `|lambda - 1|` and `lambda` for resolvent construction.
pub const LAMBDA_EXCLUSION: f64 = 1e-6;
/// Default minimum distance between `mu` and `spec(TT*)`.
pub const DEFAULT_SPECTRAL_GAP: f64 = 1e-6;

/// `(lambda - 1)^2 / lambda`.
pub fn forward_map<T: Real>(lambda: T) -> Result<T> {
    if !(lambda > T::zero()) {
        return Err(Error::Domain {
            what: "lambda (must be > 0)",
            value: as_f64(lambda),
        });
    }
    let d = lambda - T::one();
    Ok(d * d / lambda)
}

/// The two positive solutions `(lambda_minus, lambda_plus)` of
/// `(lambda - 1)^2 / lambda = mu`, with `lambda_minus = 1 / lambda_plus`.
pub fn inverse_branches<T: Real>(mu: T) -> Result<(T, T)> {
    if !(mu >= T::zero()) {
        return Err(Error::Domain {
            what: "mu (must be >= 0)",
            value: as_f64(mu),
        });
    }
    let two = lit::<T>(2.0);
    let plus = ((mu + two) + (mu * mu + lit::<T>(4.0) * mu).sqrt()) / two;
    Ok((T::one() / plus, plus))
}

/// `phi(t) = (t + sqrt(t^2 + 4)) / 2`, the norm of `R_T` when `||T|| = t`.
pub fn foguel_norm_closed<T: Real>(t: T) -> Result<T> {
    if !(t >= T::zero()) {
        return Err(Error::Domain {
            what: "symbol norm (must be >= 0)",
            value: as_f64(t),
        });
    }
    let two = lit::<T>(2.0);
    Ok((t + (t * t + lit::<T>(4.0)).sqrt()) / two)
}

/// `psi(r) = (r^2 - 1) / r`, inverse of [`foguel_norm_closed`].
pub fn symbol_norm_from_foguel<T: Real>(r: T) -> Result<T> {
    if !(r >= T::one()) {
        return Err(Error::Domain {
            what: "Foguel norm (must be >= 1)",
            value: as_f64(r),
        });
    }
    Ok((r * r - T::one()) / r)
}

fn require_unitary<T: Real>(f: &FoguelOperator<T>) -> Result<()> {
    if f.is_isometric() {
        Ok(())
    } else {
        Err(Error::IsometryDefect {
            defect: as_f64(f.isometry_defect()),
            limit: as_f64(crate::models::isometry_limit::<T>()),
        })
    }
}

/// Observed versus predicted spectrum of `R_T R_T*`.
#[derive(Debug, Clone)]
pub struct SpectralMapReport<T: Real> {
    /// Ascending eigenvalues of `R_T R_T*` (length `2n`).
    pub gram_spectrum: Vec<T>,
    /// Ascending eigenvalues of `TT*` (length `n`).
    pub symbol_gram_spectrum: Vec<T>,
    /// Ascending union of `inverse_branches(mu)` over the symbol spectrum.
    pub predicted_spectrum: Vec<T>,
    pub max_deviation: f64,
    pub within_tolerance: bool,
    /// Largest `|lambda_minus * lambda_plus - 1|` among the predicted pairs.
    pub max_pair_product_error: f64,
}

/// Compares `spec(R_T R_T*)` with the multiset predicted from `spec(TT*)`.
pub fn verify_spectral_mapping<T: Real>(f: &FoguelOperator<T>, tol: Tolerance) -> Result<SpectralMapReport<T>> {
    require_unitary(f)?;
    let gram_spectrum = hermitian_eigenvalues(f.gram())?;
    let symbol_gram_spectrum = hermitian_eigenvalues(&symmetrize(&f.symbol_gram()))?;
    let mut predicted = Vec::with_capacity(2 * symbol_gram_spectrum.len());
    let mut max_pair_product_error = 0.0f64;
    for &mu in &symbol_gram_spectrum {
        // TT* is PSD; clamp rounding noise below zero.
        let (lo, hi) = inverse_branches(mu.max(T::zero()))?;
        max_pair_product_error = max_pair_product_error.max(as_f64((lo * hi - T::one()).abs()));
        predicted.push(lo);
        predicted.push(hi);
    }
    predicted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let matched = multiset_match(&gram_spectrum, &predicted, tol).map_err(|e| Error::Internal {
        module: "spectral-analysis",
        detail: format!("predicted spectrum has wrong multiplicity: {e}"),
    })?;
    Ok(SpectralMapReport {
        gram_spectrum,
        symbol_gram_spectrum,
        predicted_spectrum: predicted,
        max_deviation: matched.max_deviation,
        within_tolerance: matched.within_tolerance,
        max_pair_product_error,
    })
}

/// Blocks of `S = [[A, X], [X*, B]] = (R_T R_T* - lambda I)^{-1}`.
#[derive(Debug, Clone)]
pub struct ResolventBlocks<T: Real> {
    pub lambda: T,
    pub a: CMatrix<T>,
    pub x: CMatrix<T>,
    pub b: CMatrix<T>,
    /// `||(R_T R_T* - lambda I) S - I||`.
    pub residual: T,
}

impl<T: Real> ResolventBlocks<T> {
    pub fn assembled(&self) -> CMatrix<T> {
        block2(&self.a, &self.x, &self.x.adjoint(), &self.b)
    }

    /// `||T* A - (lambda - 1) V* X*||`, the identity that links `A` and `X`.
    pub fn link_residual(&self, f: &FoguelOperator<T>) -> Result<T> {
        let lhs = f.t().adjoint() * &self.a;
        let rhs = (f.v().adjoint() * self.x.adjoint()) * real(self.lambda - T::one());
        operator_norm(&(lhs - rhs))
    }
}

/// Explicit resolvent of the Gram operator at `lambda`:
///
/// * `A = ((lambda - 1) / lambda) (TT* - mu I)^{-1}` with `mu = (lambda - 1)^2 / lambda`,
/// * `X = A T V* / (lambda - 1)`,
/// * `B = (V T* X - V V*) / (lambda - 1)`.
pub fn resolvent_blocks<T: Real>(f: &FoguelOperator<T>, lambda: T) -> Result<ResolventBlocks<T>> {
    resolvent_blocks_with_gap(f, lambda, DEFAULT_SPECTRAL_GAP)
}

pub fn resolvent_blocks_with_gap<T: Real>(f: &FoguelOperator<T>, lambda: T, gap: f64) -> Result<ResolventBlocks<T>> {
    let coefficient = resolvent_coefficient(lambda)?;
    resolvent_blocks_scaled(f, lambda, coefficient, gap)
}

/// `(lambda - 1) / lambda`, after enforcing the exclusion band around `{0, 1}`.
pub fn resolvent_coefficient<T: Real>(lambda: T) -> Result<T> {
    let eps = lit::<T>(LAMBDA_EXCLUSION);
    if !(lambda >= eps) || !((lambda - T::one()).abs() >= eps) {
        return Err(Error::Domain {
            what: "lambda (excluded band around 0 and 1)",
            value: as_f64(lambda),
        });
    }
    Ok((lambda - T::one()) / lambda)
}

/// Resolvent blocks with a caller-supplied prefactor for `A`. Only the
/// coefficient returned by [`resolvent_coefficient`] yields an inverse;
/// other values exist to demonstrate that.
pub fn resolvent_blocks_scaled<T: Real>(
    f: &FoguelOperator<T>,
    lambda: T,
    a_coefficient: T,
    gap: f64,
) -> Result<ResolventBlocks<T>> {
    require_unitary(f)?;
    resolvent_coefficient(lambda)?;
    let n = f.dim();
    let mu = forward_map(lambda)?;
    let tt = symmetrize(&f.symbol_gram());
    let spectrum = hermitian_eigenvalues(&tt)?;
    let distance = spectrum
        .iter()
        .map(|&s| (s - mu).abs())
        .fold(T::max_value().unwrap_or(T::one()), |a, b| a.min(b));
    if !(distance >= lit(gap)) {
        return Err(Error::NearSpectrum {
            mu: as_f64(mu),
            distance: as_f64(distance),
            gap,
        });
    }
    let shifted = &tt - scaled_identity(n, mu);
    let inv = solve_inverse_with_floor(&shifted, 0.0)?;
    let a = symmetrize(&(inv.matrix * real(a_coefficient)));
    let inv_lm1 = real(T::one() / (lambda - T::one()));
    let (v, t) = (f.v(), f.t());
    let x = (&a * t * v.adjoint()) * inv_lm1;
    let b = symmetrize(&((v * t.adjoint() * &x - v * v.adjoint()) * inv_lm1));
    let s = block2(&a, &x, &x.adjoint(), &b);
    let shifted_gram = f.gram() - scaled_identity(2 * n, lambda);
    let residual = operator_norm(&(shifted_gram * s - identity::<T>(2 * n)))?;
    Ok(ResolventBlocks {
        lambda,
        a,
        x,
        b,
        residual,
    })
}

/// Inverse of `R_T` and of its Gram operator for unitary `V`.
#[derive(Debug, Clone)]
pub struct FoguelInverse<T: Real> {
    /// `[[V, -V T V*], [0, V*]] = R_T^{-1}`.
    pub inverse: CMatrix<T>,
    /// `(R_T^{-1})* R_T^{-1} = (R_T R_T*)^{-1}`.
    pub gram_inverse: CMatrix<T>,
    /// `||R_T M - I||`.
    pub residual: T,
    /// `||R_T R_T* G - I||`.
    pub gram_residual: T,
}

pub fn foguel_inverse<T: Real>(f: &FoguelOperator<T>) -> Result<FoguelInverse<T>> {
    require_unitary(f)?;
    let n = f.dim();
    let (v, t) = (f.v(), f.t());
    let va = v.adjoint();
    let inverse = block2(v, &-(v * t * &va), &zeros(n, n), &va);
    let gram_inverse = symmetrize(&(inverse.adjoint() * &inverse));
    let id = identity::<T>(2 * n);
    let residual = operator_norm(&(f.assembled() * &inverse - &id))?;
    let gram_residual = operator_norm(&(f.gram() * &gram_inverse - &id))?;
    Ok(FoguelInverse {
        inverse,
        gram_inverse,
        residual,
        gram_residual,
    })
}

/// `(R_T R_T* - I)^{-1}` together with the condition estimate of `T`.
#[derive(Debug, Clone)]
pub struct GramMinusIdentityInverse<T: Real> {
    /// `[[0, X], [X*, -I]]` with `X = (T^{-1})* V*`.
    pub matrix: CMatrix<T>,
    pub symbol_condition: T,
    /// `||(R_T R_T* - I) N - I||`.
    pub residual: T,
}

pub fn gram_minus_identity_inverse<T: Real>(f: &FoguelOperator<T>) -> Result<GramMinusIdentityInverse<T>> {
    gram_minus_identity_inverse_with_floor(f, DEFAULT_RCOND_FLOOR)
}

/// As [`gram_minus_identity_inverse`], rejecting symbols whose reciprocal
/// condition estimate is below `rcond_floor`.
pub fn gram_minus_identity_inverse_with_floor<T: Real>(
    f: &FoguelOperator<T>,
    rcond_floor: f64,
) -> Result<GramMinusIdentityInverse<T>> {
    require_unitary(f)?;
    let n = f.dim();
    let t_inv = solve_inverse_with_floor(f.t(), rcond_floor)?;
    let x = t_inv.matrix.adjoint() * f.v().adjoint();
    let matrix = block2(&zeros(n, n), &x, &x.adjoint(), &-identity::<T>(n));
    let id = identity::<T>(2 * n);
    let residual = operator_norm(&((f.gram() - &id) * &matrix - id))?;
    Ok(GramMinusIdentityInverse {
        matrix,
        symbol_condition: t_inv.condition(),
        residual,
    })
}

/// Brute-force resolvent by LU, used to cross-check [`resolvent_blocks`].
pub fn direct_resolvent<T: Real>(f: &FoguelOperator<T>, lambda: T) -> Result<CMatrix<T>> {
    let m = f.gram() - scaled_identity(2 * f.dim(), lambda);
    Ok(solve_inverse(&m)?.matrix)
}
