//! Unitary dilation of contractions and the polynomial calculus of
//! generalized Foguel operators `R = [[A*, T], [0, A]]`.

use nalgebra::{Complex, ComplexField};

use crate::error::{Error, Result};
use crate::kernel::{block2, identity, max_abs, operator_norm, psd_sqrt, zeros};
use crate::models::{assemble_upper, build_foguel, FoguelOperator};
use crate::scalar::{as_f64, lit, real, CMatrix, Real};
use crate::spectral::foguel_norm_closed;

/// Slack allowed on `||A|| <= 1`.
pub const CONTRACTION_TOL: f64 = 1e-10;
/// Boundary samples used to estimate `sup |p|` over the closed unit disk.
pub const DISK_SAMPLES: usize = 4096;

/// Complex polynomial `a_0 + a_1 z + ... + a_m z^m`, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T: Real> {
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> Polynomial<T> {
    pub fn new(mut coeffs: Vec<Complex<T>>) -> Self {
        while coeffs.last().is_some_and(|a| a.modulus() == T::zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| real(lit(x))).collect())
    }

    /// `z^n`.
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![Complex::new(T::zero(), T::zero()); n + 1];
        coeffs[n] = Complex::new(T::one(), T::zero());
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// `|a_0| + |a_1| z + ... + |a_m| z^m`.
    pub fn tilde(&self) -> Self {
        Self::new(self.coeffs.iter().map(|a| real(a.modulus())).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, a)| *a * real(lit::<T>(j as f64)))
                .collect(),
        )
    }

    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(T::zero(), T::zero()), |acc, &a| acc * z + a)
    }

    /// `sup |p(z)|` over `samples` equally spaced points of the unit circle.
    pub fn sup_norm_on_disk(&self, samples: usize) -> T {
        let step = std::f64::consts::TAU / samples as f64;
        (0..samples)
            .map(|k| {
                let theta = step * k as f64;
                self.eval(Complex::new(lit(theta.cos()), lit(theta.sin()))).modulus()
            })
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Rescales so that the sampled sup norm on the disk is at most `target`.
    pub fn normalized(&self, target: f64) -> Self {
        let sup = self.sup_norm_on_disk(DISK_SAMPLES);
        if sup == T::zero() {
            return self.clone();
        }
        let k = real(lit::<T>(target) / sup);
        Self::new(self.coeffs.iter().map(|&a| a * k).collect())
    }

    /// `p(M) = sum_j a_j M^j`, by Horner's rule.
    pub fn eval_matrix(&self, m: &CMatrix<T>) -> CMatrix<T> {
        let n = m.nrows();
        self.coeffs
            .iter()
            .rev()
            .fold(zeros(n, n), |acc, &a| acc * m + identity::<T>(n) * a)
    }
}

/// `sup_{|z| <= 1} |p~'(z)| = sum_j j |a_j|`: the tilde polynomial has
/// nonnegative coefficients, so its derivative peaks at `z = 1`.
pub fn tilde_deriv_bound<T: Real>(p: &Polynomial<T>) -> T {
    p.coeffs
        .iter()
        .enumerate()
        .skip(1)
        .fold(T::zero(), |acc, (j, a)| acc + lit::<T>(j as f64) * a.modulus())
}

fn require_contraction<T: Real>(a: &CMatrix<T>) -> Result<T> {
    if !a.is_square() || a.nrows() == 0 {
        return Err(Error::Dimension(format!(
            "contraction must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let norm = operator_norm(a)?;
    if norm > T::one() + lit(CONTRACTION_TOL) {
        return Err(Error::NotContraction { norm: as_f64(norm) });
    }
    Ok(norm)
}

fn require_pair<T: Real>(a: &CMatrix<T>, t: &CMatrix<T>) -> Result<T> {
    let norm = require_contraction(a)?;
    if t.shape() != a.shape() {
        return Err(Error::Dimension(format!(
            "symbol {}x{} does not match contraction {}x{}",
            t.nrows(),
            t.ncols(),
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(norm)
}

/// Unitary dilation `[[A, (I - AA*)^{1/2}], [(I - A*A)^{1/2}, -A*]]`.
pub fn halmos_dilation<T: Real>(a: &CMatrix<T>) -> Result<CMatrix<T>> {
    dilation_with_corner_sign(a, -T::one())
}

/// Dilation template with `sign * A*` in the lower-right corner. Only
/// `sign = -1` is unitary for a general contraction.
pub fn dilation_with_corner_sign<T: Real>(a: &CMatrix<T>, sign: T) -> Result<CMatrix<T>> {
    require_contraction(a)?;
    let n = a.nrows();
    let id = identity::<T>(n);
    let aa = a.adjoint();
    let left_defect = psd_sqrt(&(&id - a * &aa))?;
    let right_defect = psd_sqrt(&(&id - &aa * a))?;
    Ok(block2(a, &left_defect, &right_defect, &(aa * real(sign))))
}

/// `||U*U - I||`.
pub fn unitarity_defect<T: Real>(u: &CMatrix<T>) -> Result<T> {
    operator_norm(&(u.adjoint() * u - identity::<T>(u.ncols())))
}

/// A contraction-symbol operator lifted to a genuine Foguel operator.
#[derive(Debug, Clone)]
pub struct DilationLift<T: Real> {
    pub a: CMatrix<T>,
    /// `2n x 2n` unitary dilation of `a`.
    pub va: CMatrix<T>,
    /// `2n x 2n` symbol with `T` in block `(1, 2)`.
    pub ttilde: CMatrix<T>,
    /// Foguel operator `[[VA*, Ttilde], [0, VA]]` (`4n x 4n`).
    pub w: FoguelOperator<T>,
}

pub fn lift_foguel<T: Real>(a: &CMatrix<T>, t: &CMatrix<T>) -> Result<DilationLift<T>> {
    require_pair(a, t)?;
    let n = a.nrows();
    let va = halmos_dilation(a)?;
    let ttilde = block2(&zeros(n, n), t, &zeros(n, n), &zeros(n, n));
    let w = build_foguel(va.clone(), ttilde.clone(), true)?;
    Ok(DilationLift {
        a: a.clone(),
        va,
        ttilde,
        w,
    })
}

/// Norms along the chain `||R|| <= ||W|| = phi(||T||)`.
#[derive(Debug, Clone)]
pub struct CompressionReport<T: Real> {
    /// `[[A*, T], [0, A]]`.
    pub r: CMatrix<T>,
    pub norm_r: T,
    pub norm_w: T,
    /// `phi(||T||)`.
    pub bound: T,
}

impl<T: Real> CompressionReport<T> {
    pub fn slack(&self) -> T {
        self.bound - self.norm_r
    }
}

/// Assembles `R = [[A*, T], [0, A]]` and checks `||R|| <= ||W||` for the lift `W`.
pub fn compress_generalized<T: Real>(a: &CMatrix<T>, t: &CMatrix<T>) -> Result<CompressionReport<T>> {
    let lift = lift_foguel(a, t)?;
    let r = assemble_upper(&a.adjoint(), t, a);
    let norm_r = operator_norm(&r)?;
    let norm_w = lift.w.norm()?;
    let bound = foguel_norm_closed(operator_norm(t)?)?;
    if norm_r > norm_w + lit(1e-10) {
        return Err(Error::BoundViolation {
            context: "compression of the lifted Foguel operator",
            value: as_f64(norm_r),
            bound: as_f64(norm_w),
        });
    }
    if norm_r > bound + lit(1e-8) {
        return Err(Error::BoundViolation {
            context: "contraction-symbol norm bound",
            value: as_f64(norm_r),
            bound: as_f64(bound),
        });
    }
    Ok(CompressionReport {
        r,
        norm_r,
        norm_w,
        bound,
    })
}

/// Powers `A^0 ..= A^count` and `(A*)^0 ..= (A*)^count`.
fn powers<T: Real>(a: &CMatrix<T>, count: usize) -> (Vec<CMatrix<T>>, Vec<CMatrix<T>>) {
    let n = a.nrows();
    let aa = a.adjoint();
    let mut fwd = vec![identity::<T>(n)];
    let mut adj = vec![identity::<T>(n)];
    for k in 0..count {
        fwd.push(&fwd[k] * a);
        adj.push(&adj[k] * &aa);
    }
    (fwd, adj)
}

fn offdiag_from_powers<T: Real>(fwd: &[CMatrix<T>], adj: &[CMatrix<T>], t: &CMatrix<T>, n: usize) -> CMatrix<T> {
    (0..n).fold(zeros(t.nrows(), t.ncols()), |acc, j| {
        acc + &adj[j] * t * &fwd[n - 1 - j]
    })
}

/// `D_n(A, T) = sum_{j=0}^{n-1} (A*)^j T A^{n-1-j}`, the upper-right block of `R^n`.
pub fn power_offdiag<T: Real>(a: &CMatrix<T>, t: &CMatrix<T>, n: usize) -> Result<CMatrix<T>> {
    if n == 0 {
        return Err(Error::Domain {
            what: "power (must be >= 1)",
            value: 0.0,
        });
    }
    if !a.is_square() || t.shape() != a.shape() {
        return Err(Error::Dimension("A and T must be square of equal size".into()));
    }
    let (fwd, adj) = powers(a, n);
    Ok(offdiag_from_powers(&fwd, &adj, t, n))
}

fn self_check<T: Real>(block: &CMatrix<T>, direct: &CMatrix<T>, scale: T, what: &str) -> Result<T> {
    let deviation = max_abs(&(block - direct));
    if deviation > lit::<T>(1e-9) * scale {
        return Err(Error::Internal {
            module: "dilation-calculus",
            detail: format!(
                "{what}: block formula deviates from direct evaluation by {:e}",
                as_f64(deviation)
            ),
        });
    }
    Ok(deviation)
}

/// `R^n = [[(A*)^n, D_n(A, T)], [0, A^n]]`, checked against repeated multiplication.
pub fn foguel_power<T: Real>(a: &CMatrix<T>, t: &CMatrix<T>, n: usize) -> Result<CMatrix<T>> {
    let d = power_offdiag(a, t, n)?;
    let (fwd, adj) = powers(a, n);
    let block = assemble_upper(&adj[n], &d, &fwd[n]);
    let r = assemble_upper(&a.adjoint(), t, a);
    let direct = (1..n).fold(r.clone(), |acc, _| acc * &r);
    let growth = (T::one() + operator_norm(&r)?).powi(n as i32);
    self_check(&block, &direct, growth, "power")?;
    Ok(block)
}

/// `p(R)` from the block calculus:
/// `[[sum_j a_j (A*)^j, sum_{j>=1} a_j D_j(A, T)], [0, p(A)]]`.
pub fn poly_apply<T: Real>(p: &Polynomial<T>, a: &CMatrix<T>, t: &CMatrix<T>) -> Result<CMatrix<T>> {
    if !a.is_square() || t.shape() != a.shape() {
        return Err(Error::Dimension("A and T must be square of equal size".into()));
    }
    let n = a.nrows();
    let m = p.degree().unwrap_or(0);
    let (fwd, adj) = powers(a, m);
    let mut upper_left = zeros(n, n);
    let mut upper_right = zeros(n, n);
    let mut lower_right = zeros(n, n);
    for (j, &aj) in p.coeffs().iter().enumerate() {
        upper_left += &adj[j] * aj;
        lower_right += &fwd[j] * aj;
        if j >= 1 {
            upper_right += offdiag_from_powers(&fwd, &adj, t, j) * aj;
        }
    }
    let block = assemble_upper(&upper_left, &upper_right, &lower_right);
    let r = assemble_upper(&a.adjoint(), t, a);
    let direct = p.eval_matrix(&r);
    let r_norm = operator_norm(&r)?;
    let scale = p.coeffs().iter().enumerate().fold(T::one(), |acc, (j, aj)| {
        acc + aj.modulus() * (T::one() + r_norm).powi(j as i32)
    });
    self_check(&block, &direct, scale, "polynomial")?;
    Ok(block)
}

/// Both sides of `||p(R)|| <= phi(||p~'||_inf ||T||)`.
#[derive(Debug, Clone)]
pub struct PolyBoundReport<T: Real> {
    pub norm_p_r: T,
    pub bound: T,
    pub slack: T,
    /// `||sum_{j>=1} a_j D_j(A, T)||`.
    pub offdiag_norm: T,
    /// `||T|| sum_j j |a_j| ||A||^{j-1}`.
    pub offdiag_chain: T,
    /// `||T|| ||p~'||_inf`.
    pub offdiag_bound: T,
}

/// Checks the polynomial norm estimate for `R = [[A*, T], [0, A]]`, given
/// `sup |p| <= 1` on the disk.
pub fn verify_poly_bound<T: Real>(p: &Polynomial<T>, a: &CMatrix<T>, t: &CMatrix<T>) -> Result<PolyBoundReport<T>> {
    let a_norm = require_pair(a, t)?;
    let sup = p.sup_norm_on_disk(DISK_SAMPLES);
    if sup > T::one() + lit(1e-10) {
        return Err(Error::Domain {
            what: "polynomial sup norm on the disk (must be <= 1)",
            value: as_f64(sup),
        });
    }
    let n = a.nrows();
    let pr = poly_apply(p, a, t)?;
    let norm_p_r = operator_norm(&pr)?;
    let t_norm = operator_norm(t)?;
    let deriv = tilde_deriv_bound(p);
    let bound = foguel_norm_closed(deriv * t_norm)?;
    let slack = bound - norm_p_r;
    if slack < -lit::<T>(1e-8) {
        return Err(Error::BoundViolation {
            context: "polynomial norm estimate",
            value: as_f64(norm_p_r),
            bound: as_f64(bound),
        });
    }
    let offdiag_norm = operator_norm(&pr.view((0, n), (n, n)).into_owned())?;
    let offdiag_chain = p.coeffs().iter().enumerate().skip(1).fold(T::zero(), |acc, (j, aj)| {
        acc + lit::<T>(j as f64) * aj.modulus() * a_norm.powi(j as i32 - 1)
    }) * t_norm;
    Ok(PolyBoundReport {
        norm_p_r,
        bound,
        slack,
        offdiag_norm,
        offdiag_chain,
        offdiag_bound: t_norm * deriv,
    })
}
