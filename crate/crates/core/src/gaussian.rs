//! Two-mode Gaussian states: covariance matrices, symplectic spectra and
//! von Neumann entropies.
//!
//! Quadratures are in shot-noise units: the vacuum has unit variance and
//! `[Q, P] = 2i`. Matrices are ordered `(Q1, P1, Q2, P2)`.

use std::f64::consts::LN_2;

use nalgebra::{Cholesky, DMatrix, Matrix2, Matrix4};

use crate::error::{ensure_finite, Error, Result};

/// Symplectic eigenvalues this far below 1 are treated as rounding and clamped.
pub const CLAMP_TOLERANCE: f64 = 1e-9;

/// Above this value `g` switches to its asymptotic expansion.
pub const G_ASYMPTOTIC_THRESHOLD: f64 = 1e6;

const SVD_MAX_ITERATIONS: usize = 10_000;

/// The 2x2 identity `I`.
pub fn identity2() -> Matrix2<f64> {
    Matrix2::identity()
}

/// The Pauli-type matrix `Z = diag(1, -1)`.
pub fn pauli_z() -> Matrix2<f64> {
    Matrix2::new(1.0, 0.0, 0.0, -1.0)
}

/// Projector onto the Q quadrature, `diag(1, 0)`.
pub fn projector_q() -> Matrix2<f64> {
    Matrix2::new(1.0, 0.0, 0.0, 0.0)
}

/// The symplectic form of `n_modes` bosonic modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymplecticForm {
    n_modes: usize,
}

impl SymplecticForm {
    pub fn new(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidArgument("a symplectic form needs at least one mode".into()));
        }
        Ok(Self { n_modes })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Block-diagonal `⊕ [[0, 1], [-1, 0]]` of size `2n x 2n`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = 2 * self.n_modes;
        let mut omega = DMatrix::zeros(n, n);
        for k in 0..self.n_modes {
            omega[(2 * k, 2 * k + 1)] = 1.0;
            omega[(2 * k + 1, 2 * k)] = -1.0;
        }
        omega
    }

    /// The two-mode form as a fixed-size matrix.
    pub fn two_mode() -> Matrix4<f64> {
        #[rustfmt::skip]
        let omega = Matrix4::new(
             0.0, 1.0,  0.0, 0.0,
            -1.0, 0.0,  0.0, 0.0,
             0.0, 0.0,  0.0, 1.0,
             0.0, 0.0, -1.0, 0.0,
        );
        omega
    }
}

/// A general real symmetric two-mode covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix(Matrix4<f64>);

impl CovarianceMatrix {
    /// Wraps a 4x4 matrix, symmetrizing it. Entries must be finite.
    pub fn new(m: Matrix4<f64>) -> Result<Self> {
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("covariance matrix has non-finite entries".into()));
        }
        Ok(Self((m + m.transpose()) * 0.5))
    }

    /// Assembles `[[A, C], [Cᵀ, B]]`.
    pub fn from_blocks(a: &Matrix2<f64>, b: &Matrix2<f64>, c: &Matrix2<f64>) -> Result<Self> {
        let mut m = Matrix4::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(a);
        m.fixed_view_mut::<2, 2>(2, 2).copy_from(b);
        m.fixed_view_mut::<2, 2>(0, 2).copy_from(c);
        m.fixed_view_mut::<2, 2>(2, 0).copy_from(&c.transpose());
        Self::new(m)
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn block_a(&self) -> Matrix2<f64> {
        self.0.fixed_view::<2, 2>(0, 0).into_owned()
    }

    pub fn block_b(&self) -> Matrix2<f64> {
        self.0.fixed_view::<2, 2>(2, 2).into_owned()
    }

    pub fn block_c(&self) -> Matrix2<f64> {
        self.0.fixed_view::<2, 2>(0, 2).into_owned()
    }

    /// `det A + det B + 2 det C`, the second symplectic invariant.
    pub fn delta(&self) -> f64 {
        self.block_a().determinant() + self.block_b().determinant() + 2.0 * self.block_c().determinant()
    }

    /// Determinant, factorized over the Q and P sectors when they decouple.
    pub fn determinant(&self) -> f64 {
        match self.quadrature_sectors() {
            Some((q, p)) => q.determinant() * p.determinant(),
            None => self.0.determinant(),
        }
    }

    /// `S V Sᵀ` for a symplectic `S`.
    pub fn transformed(&self, s: &Matrix4<f64>) -> Result<Self> {
        Self::new(s * self.0 * s.transpose())
    }

    pub fn is_positive_definite(&self) -> bool {
        Cholesky::new(self.0).is_some()
    }

    /// Q-Q and P-P sub-matrices, if no entry couples a Q to a P quadrature.
    fn quadrature_sectors(&self) -> Option<(Matrix2<f64>, Matrix2<f64>)> {
        let v = &self.0;
        let cross = [v[(0, 1)], v[(0, 3)], v[(1, 2)], v[(2, 3)]];
        if cross.iter().any(|&x| x != 0.0) {
            return None;
        }
        Some((
            Matrix2::new(v[(0, 0)], v[(0, 2)], v[(0, 2)], v[(2, 2)]),
            Matrix2::new(v[(1, 1)], v[(1, 3)], v[(1, 3)], v[(3, 3)]),
        ))
    }

    /// Estimated absolute uncertainty of a symplectic eigenvalue near 1.
    ///
    /// Strongly correlated states store `ab ≈ c²` and lose the purity
    /// information to cancellation; the estimate scales with that loss.
    pub fn purity_resolution(&self) -> f64 {
        let ratio = match self.quadrature_sectors() {
            Some((q, p)) => [q, p]
                .iter()
                .map(|s| {
                    let diag = (s[(0, 0)] * s[(1, 1)]).abs();
                    let off = s[(0, 1)] * s[(0, 1)];
                    (diag + off) / (diag - off).abs().max(f64::MIN_POSITIVE)
                })
                .fold(1.0, f64::max),
            None => {
                let scale = self.0.amax();
                let root_det = self.0.determinant().abs().sqrt().max(f64::MIN_POSITIVE);
                (scale * scale / root_det).max(1.0)
            }
        };
        8.0 * f64::EPSILON * ratio
    }
}

/// Two-mode CM with diagonal blocks `A = diag(a, a_p)`, `B = diag(b, b_p)`,
/// `C = diag(c_q, c_p)`. Every state in the entangling-cloner analysis has
/// this shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeCM {
    pub a: f64,
    pub a_p: f64,
    pub b: f64,
    pub b_p: f64,
    pub c_q: f64,
    pub c_p: f64,
}

/// Builds a block-form two-mode CM. No physicality check is made here.
pub fn assemble_cm(a: f64, a_p: f64, b: f64, b_p: f64, c_q: f64, c_p: f64) -> Result<TwoModeCM> {
    for (name, x) in [("a", a), ("a_p", a_p), ("b", b), ("b_p", b_p), ("c_q", c_q), ("c_p", c_p)] {
        ensure_finite(name, x)?;
    }
    Ok(TwoModeCM { a, a_p, b, b_p, c_q, c_p })
}

impl TwoModeCM {
    pub fn vacuum() -> Self {
        Self { a: 1.0, a_p: 1.0, b: 1.0, b_p: 1.0, c_q: 0.0, c_p: 0.0 }
    }

    /// Product of two symmetric thermal modes.
    pub fn thermal_product(v1: f64, v2: f64) -> Result<Self> {
        assemble_cm(v1, v1, v2, v2, 0.0, 0.0)
    }

    /// Two-mode squeezed vacuum (EPR state) of variance `w`.
    pub fn epr(w: f64) -> Result<Self> {
        if !(w >= 1.0) || !w.is_finite() {
            return Err(Error::InvalidArgument(format!("EPR variance must be >= 1, got {w}")));
        }
        let c = (w * w - 1.0).sqrt();
        assemble_cm(w, w, w, w, c, -c)
    }

    /// The `[[a I, √T c Z], [√T c Z, b I]]` family.
    pub fn simple_form(a: f64, b: f64, c: f64, t: f64) -> Result<Self> {
        let k = t.sqrt() * c;
        assemble_cm(a, a, b, b, k, -k)
    }

    pub fn covariance(&self) -> CovarianceMatrix {
        let a = Matrix2::new(self.a, 0.0, 0.0, self.a_p);
        let b = Matrix2::new(self.b, 0.0, 0.0, self.b_p);
        let c = Matrix2::new(self.c_q, 0.0, 0.0, self.c_p);
        CovarianceMatrix::from_blocks(&a, &b, &c).expect("finite by construction")
    }

    pub fn matrix(&self) -> Matrix4<f64> {
        *self.covariance().matrix()
    }
}

impl From<TwoModeCM> for CovarianceMatrix {
    fn from(cm: TwoModeCM) -> Self {
        cm.covariance()
    }
}

impl From<&TwoModeCM> for CovarianceMatrix {
    fn from(cm: &TwoModeCM) -> Self {
        cm.covariance()
    }
}

/// Symplectic eigenvalues, one per mode, sorted in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSpectrum {
    nu: Vec<f64>,
    resolution: f64,
}

impl SymplecticSpectrum {
    /// Validates raw eigenvalues with the default clamping tolerance.
    pub fn new(nu: Vec<f64>) -> Result<Self> {
        Self::with_resolution(nu, 0.0)
    }

    /// Validates raw eigenvalues. Values within `resolution` of 1 snap to 1,
    /// values below `1 - max(resolution, CLAMP_TOLERANCE)` are rejected.
    pub fn with_resolution(mut nu: Vec<f64>, resolution: f64) -> Result<Self> {
        let floor = 1.0 - resolution.max(CLAMP_TOLERANCE);
        for v in nu.iter_mut() {
            if !v.is_finite() {
                return Err(Error::Numeric(format!("non-finite symplectic eigenvalue {v}")));
            }
            if *v < floor {
                return Err(Error::Unphysical(format!("symplectic eigenvalue {v} < 1")));
            }
            if *v < 1.0 + resolution {
                *v = 1.0;
            }
        }
        nu.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { nu, resolution })
    }

    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    /// Relative precision the eigenvalues were computed to.
    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    /// Product of the eigenvalues; equals `√det V`.
    pub fn product(&self) -> f64 {
        self.nu.iter().product()
    }

    pub fn entropy(&self) -> Result<f64> {
        von_neumann_entropy(self)
    }

    /// Largest relative difference to another spectrum of the same length.
    pub fn max_relative_difference(&self, other: &Self) -> f64 {
        self.nu.iter().zip(&other.nu).map(|(a, b)| (a - b).abs() / a.abs().max(b.abs())).fold(0.0, f64::max)
    }
}

fn check_positive(cm: &CovarianceMatrix) -> Result<()> {
    if cm.is_positive_definite() {
        Ok(())
    } else {
        Err(Error::Unphysical("covariance matrix is not positive definite".into()))
    }
}

/// Absolute values of the eigenvalues of `iΩV`, found numerically.
///
/// With `V = LLᵀ`, the real antisymmetric `A = LᵀΩL` is similar to `ΩV`,
/// and its singular values are the symplectic eigenvalues, each twice.
/// An SVD of `A` stays accurate where eigen-solvers on the highly
/// non-normal `ΩV` stall (nearly pure, strongly correlated states).
/// Used as the reference every closed-form expression is checked against.
pub fn symplectic_spectrum_generic(cm: impl Into<CovarianceMatrix>) -> Result<SymplecticSpectrum> {
    let cm = cm.into();
    let chol = Cholesky::new(*cm.matrix())
        .ok_or_else(|| Error::Unphysical("covariance matrix is not positive definite".into()))?;
    let l = chol.l();
    let a = l.transpose() * SymplecticForm::two_mode() * l;
    let mut sv: Vec<f64> = a
        .try_svd(false, false, f64::EPSILON, SVD_MAX_ITERATIONS)
        .ok_or_else(|| Error::Numeric("singular value decomposition did not converge".into()))?
        .singular_values
        .iter()
        .copied()
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let nu = sv.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect();
    SymplecticSpectrum::with_resolution(nu, cm.purity_resolution())
}

/// Closed-form two-mode spectrum `ν² = (Δ ± √(Δ² − 4 det V)) / 2`.
///
/// The smaller root is taken from `ν₁² ν₂² = det V` to avoid cancellation.
pub fn symplectic_spectrum_closed(cm: impl Into<CovarianceMatrix>) -> Result<SymplecticSpectrum> {
    let cm = cm.into();
    check_positive(&cm)?;
    let delta = cm.delta();
    let det = cm.determinant();
    spectrum_from_invariants(delta, delta * delta - 4.0 * det, det, cm.purity_resolution())
}

/// Roots of `ν⁴ − Δ ν² + det = 0` given the discriminant `Δ² − 4 det`,
/// which callers may supply in a better-conditioned form.
///
/// Near a degenerate spectrum (`ν₁ ≈ ν₂`) a rounding error `δ` in the
/// discriminant moves the roots by `√δ`; the returned resolution includes
/// that term so clamping and cross-checks use the true precision.
pub(crate) fn spectrum_from_invariants(delta: f64, disc: f64, det: f64, resolution: f64) -> Result<SymplecticSpectrum> {
    let disc_err = (8.0 * f64::EPSILON + resolution) * (delta * delta + 4.0 * det.abs());
    if disc < -disc_err.max(CLAMP_TOLERANCE * delta * delta) {
        return Err(Error::Numeric(format!("negative discriminant Δ² − 4 det = {disc:e}")));
    }
    let root = disc.max(0.0).sqrt();
    let big_sq = 0.5 * (delta + root);
    if !(big_sq > 0.0) {
        return Err(Error::Numeric(format!("non-positive Δ = {delta:e}")));
    }
    let root_err = if disc > disc_err { disc_err / (2.0 * root) } else { disc_err.sqrt() };
    let resolution = resolution.max(root_err / (2.0 * big_sq));
    SymplecticSpectrum::with_resolution(vec![big_sq.sqrt(), (det / big_sq).max(0.0).sqrt()], resolution)
}

/// Spectrum of the `[[a I, √T c Z], [√T c Z, b I]]` family:
/// `ν = (√y ± (a − b)) / 2` with `y = (a + b)² − 4c²T`.
///
/// `y < 4` is rejected as unphysical.
pub fn simple_form_spectrum(a: f64, b: f64, c: f64, t: f64) -> Result<SymplecticSpectrum> {
    for (name, x) in [("a", a), ("b", b), ("c", c), ("t", t)] {
        ensure_finite(name, x)?;
    }
    let corr = c * c * t;
    let y = (a + b) * (a + b) - 4.0 * corr;
    let slack = 8.0 * f64::EPSILON * ((a + b) * (a + b) + 4.0 * corr);
    if y < 4.0 - slack.max(4.0 * CLAMP_TOLERANCE) {
        return Err(Error::Unphysical(format!("y = (a+b)² − 4c²T = {y} < 4")));
    }
    let big = 0.5 * (y.max(0.0).sqrt() + (a - b).abs());
    let small = (a * b - corr).abs() / big;
    let resolution = 8.0 * f64::EPSILON * (a * b + corr) / (a * b - corr).abs().max(f64::MIN_POSITIVE);
    SymplecticSpectrum::with_resolution(vec![big, small], resolution)
}

/// Entropy function `g(ν)` in bits.
pub fn g_entropy(nu: f64) -> Result<f64> {
    if nu.is_nan() || nu < 1.0 - CLAMP_TOLERANCE {
        return Err(Error::Domain(format!("g(ν) needs ν >= 1, got {nu}")));
    }
    if nu == f64::INFINITY {
        return Err(Error::Domain("g(ν) needs finite ν".into()));
    }
    if nu <= 1.0 {
        return Ok(0.0);
    }
    if nu > G_ASYMPTOTIC_THRESHOLD {
        return Ok((0.5 * nu).log2() + (1.0 - 1.0 / (6.0 * nu * nu)) / LN_2);
    }
    // u log u − w log w with u = w + 1, rewritten as log u + w log(1 + 1/w).
    let w = 0.5 * (nu - 1.0);
    let u = 0.5 * (nu + 1.0);
    Ok(u.log2() + w * (1.0 / w).ln_1p() / LN_2)
}

/// `S = Σ g(ν_k)` in bits.
pub fn von_neumann_entropy(spectrum: &SymplecticSpectrum) -> Result<f64> {
    spectrum.nu().iter().map(|&v| g_entropy(v)).sum()
}

/// Elementary two-mode symplectic transformations.
pub mod symplectic {
    use nalgebra::Matrix4;

    /// Beamsplitter mixing the two modes with angle `theta`.
    pub fn beamsplitter(theta: f64) -> Matrix4<f64> {
        let (s, c) = theta.sin_cos();
        #[rustfmt::skip]
        let m = Matrix4::new(
             c, 0.0,  s, 0.0,
            0.0,  c, 0.0,  s,
            -s, 0.0,  c, 0.0,
            0.0, -s, 0.0,  c,
        );
        m
    }

    /// Phase rotations `phi1`, `phi2` on each mode.
    pub fn phase_rotation(phi1: f64, phi2: f64) -> Matrix4<f64> {
        let (s1, c1) = phi1.sin_cos();
        let (s2, c2) = phi2.sin_cos();
        #[rustfmt::skip]
        let m = Matrix4::new(
             c1,  s1, 0.0, 0.0,
            -s1,  c1, 0.0, 0.0,
            0.0, 0.0,  c2,  s2,
            0.0, 0.0, -s2,  c2,
        );
        m
    }

    /// Single-mode squeezers with parameters `r1`, `r2`.
    pub fn squeezer(r1: f64, r2: f64) -> Matrix4<f64> {
        Matrix4::from_diagonal(&nalgebra::Vector4::new((-r1).exp(), r1.exp(), (-r2).exp(), r2.exp()))
    }

    /// Two-mode squeezer; applied to vacuum it yields an EPR state of variance `cosh 2r`.
    pub fn two_mode_squeezer(r: f64) -> Matrix4<f64> {
        let (ch, sh) = (r.cosh(), r.sinh());
        #[rustfmt::skip]
        let m = Matrix4::new(
             ch, 0.0,  sh, 0.0,
            0.0,  ch, 0.0, -sh,
             sh, 0.0,  ch, 0.0,
            0.0, -sh, 0.0,  ch,
        );
        m
    }
}
