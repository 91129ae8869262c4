//! Operator zoo: seeded random unitaries, contractions and symbols, the
//! truncated unilateral shift, and the Foguel operator itself.

use nalgebra::{Complex, ComplexField};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::kernel::{block2, identity, max_abs, operator_norm, validate_hermitian, zeros};
use crate::scalar::{as_f64, lit, real, rounding_tol, CMatrix, Real};

/// Strict isometry tolerance for [`build_foguel`].
pub const ISOMETRY_TOL: f64 = 1e-10;
/// [`ISOMETRY_TOL`] in the precision of `T`.
pub fn isometry_limit<T: Real>() -> T {
    rounding_tol(ISOMETRY_TOL, 1e3)
}

/// Allowed gap between the block Gram formula and the direct product,
/// relative to `1 + ||R_T||^2`.
pub const GRAM_SELF_CHECK: f64 = 1e-12;

/// Reproducible random source: one ChaCha20 stream per `(seed, stream_id)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeededGenerator {
    pub seed: u64,
    pub stream_id: u64,
}

impl SeededGenerator {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// The `k`-th independent sub-stream of this stream.
    pub fn fork(&self, k: u64) -> Self {
        Self::new(self.seed ^ 0x9e37_79b9_7f4a_7c15u64.wrapping_mul(k + 1), self.stream_id)
    }
}

/// Ginibre matrix: i.i.d. complex Gaussian entries with `E|z|^2 = 1`.
pub fn complex_gaussian<T: Real>(rows: usize, cols: usize, rng: &mut impl rand::Rng) -> CMatrix<T> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex::new(lit(re * s), lit(im * s))
    })
}

fn require_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Dimension("dimension must be at least 1".into()));
    }
    Ok(())
}

/// Haar-distributed unitary from the QR factorization of a Ginibre matrix,
/// with the phases of `diag(R)` pushed back into `Q`.
pub fn haar_unitary<T: Real>(n: usize, gen: &SeededGenerator) -> Result<CMatrix<T>> {
    require_dim(n)?;
    let z = complex_gaussian::<T>(n, n, &mut gen.rng());
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let modulus = d.modulus();
        let phase = if modulus > T::zero() {
            d.unscale(modulus)
        } else {
            Complex::new(T::one(), T::zero())
        };
        q.column_mut(j).iter_mut().for_each(|x| *x *= phase);
    }
    Ok(q)
}

/// Random `n x n` symbol with i.i.d. complex Gaussian entries.
pub fn random_symbol<T: Real>(n: usize, gen: &SeededGenerator) -> Result<CMatrix<T>> {
    require_dim(n)?;
    Ok(complex_gaussian(n, n, &mut gen.rng()))
}

/// `S e_i = e_{i+1}`, `S e_n = 0`.
pub fn truncated_shift<T: Real>(n: usize) -> CMatrix<T> {
    let mut s = zeros(n, n);
    for i in 0..n.saturating_sub(1) {
        s[(i + 1, i)] = Complex::new(T::one(), T::zero());
    }
    s
}

/// Random contraction: a Ginibre matrix scaled by `1/sqrt(n)` whose singular
/// values above one are clipped to exactly one.
pub fn random_contraction<T: Real>(n: usize, gen: &SeededGenerator) -> Result<CMatrix<T>> {
    require_dim(n)?;
    let g = complex_gaussian::<T>(n, n, &mut gen.rng()).unscale(lit((n as f64).sqrt()));
    Ok(clip_singular_values(g))
}

/// Replaces every singular value above one by one.
pub fn clip_singular_values<T: Real>(m: CMatrix<T>) -> CMatrix<T> {
    let mut svd = m.svd(true, true);
    for s in svd.singular_values.iter_mut() {
        if *s > T::one() {
            *s = T::one();
        }
    }
    svd.recompose().expect("singular vectors were computed")
}

/// Places `t` in the leading corner of an `n x n` zero matrix.
pub fn embed_corner<T: Real>(t: &CMatrix<T>, n: usize) -> Result<CMatrix<T>> {
    let (k, kc) = t.shape();
    if k != kc {
        return Err(Error::Dimension(format!("symbol must be square, got {k}x{kc}")));
    }
    if k > n {
        return Err(Error::Dimension(format!("cannot embed {k}x{k} into {n}x{n}")));
    }
    let mut out = zeros(n, n);
    out.view_mut((0, 0), (k, k)).copy_from(t);
    Ok(out)
}

/// `||V*V - I||`.
pub fn isometry_defect<T: Real>(v: &CMatrix<T>) -> Result<T> {
    operator_norm(&(v.adjoint() * v - identity::<T>(v.ncols())))
}

/// Foguel operator `R_T = [[V*, T], [0, V]]` with its Gram operator
/// `R_T R_T*` assembled once at construction.
#[derive(Debug, Clone)]
pub struct FoguelOperator<T: Real> {
    v: CMatrix<T>,
    t: CMatrix<T>,
    isometry_defect: T,
    assembled: CMatrix<T>,
    gram: CMatrix<T>,
}

impl<T: Real> FoguelOperator<T> {
    pub fn v(&self) -> &CMatrix<T> {
        &self.v
    }

    pub fn t(&self) -> &CMatrix<T> {
        &self.t
    }

    /// Size `n` of each block; the assembled operator is `2n x 2n`.
    pub fn dim(&self) -> usize {
        self.v.nrows()
    }

    pub fn isometry_defect(&self) -> T {
        self.isometry_defect
    }

    pub fn is_isometric(&self) -> bool {
        self.isometry_defect <= isometry_limit::<T>()
    }

    pub fn assembled(&self) -> &CMatrix<T> {
        &self.assembled
    }

    /// `R_T R_T*`.
    pub fn gram(&self) -> &CMatrix<T> {
        &self.gram
    }

    /// `T T*`.
    pub fn symbol_gram(&self) -> CMatrix<T> {
        &self.t * self.t.adjoint()
    }

    pub fn norm(&self) -> Result<T> {
        operator_norm(&self.assembled)
    }

    pub fn symbol_norm(&self) -> Result<T> {
        operator_norm(&self.t)
    }
}

/// Validates dimensions (and optionally the isometry property of `V`) and
/// assembles the block operator.
pub fn build_foguel<T: Real>(v: CMatrix<T>, t: CMatrix<T>, require_isometry: bool) -> Result<FoguelOperator<T>> {
    let n = v.nrows();
    if n == 0 || !v.is_square() || !t.is_square() || t.nrows() != n {
        return Err(Error::Dimension(format!(
            "V and T must be square of equal size, got V {}x{} and T {}x{}",
            v.nrows(),
            v.ncols(),
            t.nrows(),
            t.ncols()
        )));
    }
    let defect = isometry_defect(&v)?;
    if require_isometry && !(defect <= isometry_limit::<T>()) {
        return Err(Error::IsometryDefect {
            defect: as_f64(defect),
            limit: as_f64(isometry_limit::<T>()),
        });
    }
    let assembled = block2(&v.adjoint(), &t, &zeros(n, n), &v);
    let gram = gram_blocks(&v, &t, &assembled)?;
    Ok(FoguelOperator {
        v,
        t,
        isometry_defect: defect,
        assembled,
        gram,
    })
}

/// `[[V*V + TT*, TV*], [VT*, VV*]]`, checked against the direct product.
fn gram_blocks<T: Real>(v: &CMatrix<T>, t: &CMatrix<T>, assembled: &CMatrix<T>) -> Result<CMatrix<T>> {
    let (va, ta) = (v.adjoint(), t.adjoint());
    let explicit = block2(&(&va * v + t * &ta), &(t * &va), &(v * &ta), &(v * &va));
    let direct = assembled * assembled.adjoint();
    let scale = T::one() + max_abs(&direct) * lit((assembled.nrows() as f64).max(1.0));
    let deviation = max_abs(&(&explicit - &direct));
    if deviation > rounding_tol::<T>(GRAM_SELF_CHECK, 16.0) * scale {
        return Err(Error::Internal {
            module: "operator-models",
            detail: format!("Gram block formula deviates from R R* by {:e}", as_f64(deviation)),
        });
    }
    validate_hermitian(&explicit)
}

/// Builds `[[V*, T], [0, V]]` for arbitrary square blocks without any
/// Gram bookkeeping.
pub fn assemble_upper<T: Real>(upper_left: &CMatrix<T>, t: &CMatrix<T>, lower_right: &CMatrix<T>) -> CMatrix<T> {
    block2(
        upper_left,
        t,
        &zeros(lower_right.nrows(), upper_left.ncols()),
        lower_right,
    )
}

/// Scalar multiple of the identity, as a convenience for fixtures.
pub fn scalar_matrix<T: Real>(n: usize, x: T) -> CMatrix<T> {
    identity::<T>(n) * real(x)
}
