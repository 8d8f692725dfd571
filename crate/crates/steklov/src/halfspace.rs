//! Conformal change of variables to the upper half-space.
//!
//! The inverse stereographic map
//!
//! ```text
//! Psi(x) = (2 x_1, ..., 2 x_{n-1}, |x|^2 - 1) / (1 + |x|^2 + 2 x_n)
//! ```
//!
//! carries the closed upper half-space `{x_n >= 0}` onto the closed unit
//! ball, sending the boundary hyperplane to the sphere, `0` to `-e_n` and
//! infinity to `e_n`. A positive harmonic `u` on the ball transforms to
//!
//! ```text
//! v(x) = u(Psi(x)) * (2 / (1 + |x|^2 + 2 x_n))^{(n-2)/2},
//! ```
//!
//! harmonic on the half-space, and the boundary condition
//! `du/dnu + a u = u^q` becomes
//!
//! ```text
//! -dv/dx_n = alpha * (2/(1+|x|^2)) * v + (2/(1+|x|^2))^beta * v^q
//! ```
//!
//! on `{x_n = 0}`, with `alpha = (n-2)/2 - a` and `beta = (n - q(n-2))/2`.
//! (Deriving the transform from scratch puts the conformal factor on the
//! linear term to the **first** power: the linear term is the `q -> 1` case
//! of the power term, whose exponent `beta` evaluates to `1` at `q = 1`.
//! Transformed constant solutions satisfy this form to machine precision
//! for every `a`, which is the consistency requirement on the residual.)
//!
//! At infinity `v` expands as `v = c0 |x|^{2-n} (1 + c1 x_n/|x|^2 +
//! O(|x|^{-2}))` with `c0 > 0`; [`fit_asymptotics`] extracts `(c0, c1)` by
//! least squares. [`reflection_probe`] samples the moving-planes conclusion
//! `v(x) >= v(x^lambda)` on the slab `{x_1 <= lambda}`, where `x^lambda`
//! reflects the first coordinate across `x_1 = lambda`.

use crate::ball::{extend_gradient, extend_unchecked, BallPoint, ProblemParams};
use crate::basis::BoundaryFunction;
use crate::error::{Error, Result};
use crate::identities::power;
use nalgebra::{DMatrix, DVector};

/// Transformed-equation constants for a given problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfSpaceParams {
    /// Ambient dimension.
    pub n: u32,
    /// Linear-term coefficient `(n-2)/2 - a`.
    pub alpha: f64,
    /// Power-term conformal exponent `(n - q(n-2))/2`.
    pub beta: f64,
    /// Conformal weight `(n-2)/2` on `u`.
    pub conformal_exponent: f64,
}

impl HalfSpaceParams {
    /// Constants of the transformed boundary equation for `params`.
    pub fn from_problem(params: &ProblemParams) -> Self {
        let n = params.n();
        let lambda = params.geom.lambda;
        HalfSpaceParams {
            n,
            alpha: lambda - params.a,
            beta: (n as f64 - params.q * (n as f64 - 2.0)) / 2.0,
            conformal_exponent: lambda,
        }
    }
}

/// A point of the closed upper half-space `{x_n >= 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpacePoint {
    coords: Vec<f64>,
}

impl HalfSpacePoint {
    /// Wrap coordinates, requiring `x_n >= 0` and dimension at least 3.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 3 {
            return Err(Error::InvalidDimension(coords.len() as u32));
        }
        let xn = *coords.last().expect("nonempty");
        if !(xn >= 0.0) || coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::PointOutOfDomain(format!(
                "half-space point needs finite coordinates with x_n >= 0, got x_n = {xn}"
            )));
        }
        Ok(HalfSpacePoint { coords })
    }

    /// A boundary point `(x', 0)`.
    pub fn from_boundary(x_prime: &[f64]) -> Result<Self> {
        let mut coords = x_prime.to_vec();
        coords.push(0.0);
        HalfSpacePoint::new(coords)
    }

    /// Coordinates as a slice.
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// First coordinate (the moving-planes direction).
    pub fn x1(&self) -> f64 {
        self.coords[0]
    }

    /// Last coordinate `x_n`.
    pub fn xn(&self) -> f64 {
        *self.coords.last().expect("nonempty")
    }

    /// Squared Euclidean norm.
    pub fn norm_sq(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum()
    }

    /// The reflection `x^lambda = (2 lambda - x_1, x_2, ..., x_n)` across the
    /// hyperplane `{x_1 = lambda}`; stays in the half-space.
    pub fn reflected(&self, lambda: f64) -> HalfSpacePoint {
        let mut coords = self.coords.clone();
        coords[0] = 2.0 * lambda - coords[0];
        HalfSpacePoint { coords }
    }
}

/// Denominator `1 + |x|^2 + 2 x_n` of the conformal factor.
fn factor_denominator(x: &HalfSpacePoint) -> f64 {
    1.0 + x.norm_sq() + 2.0 * x.xn()
}

/// The inverse stereographic map onto the closed unit ball.
pub fn psi(x: &HalfSpacePoint) -> Vec<f64> {
    let d = factor_denominator(x);
    let n = x.dim();
    let mut y = Vec::with_capacity(n);
    for i in 0..n - 1 {
        y.push(2.0 * x.coords()[i] / d);
    }
    y.push((x.norm_sq() - 1.0) / d);
    y
}

/// Conformal weight `(2 / (1 + |x|^2 + 2 x_n))^{(n-2)/2}`.
pub fn conformal_factor(x: &HalfSpacePoint) -> f64 {
    let lambda = (x.dim() as f64 - 2.0) / 2.0;
    power(2.0 / factor_denominator(x), lambda)
}

/// Transform a ball evaluator to the half-space: `v = (u o Psi) * factor`.
///
/// The evaluator receives Cartesian coordinates of a point in the closed
/// ball (`|Psi(x)| <= 1` always holds).
pub fn to_halfspace<F: Fn(&[f64]) -> f64>(u: &F, x: &HalfSpacePoint) -> f64 {
    u(&psi(x)) * conformal_factor(x)
}

/// Cartesian ball evaluator of the harmonic extension of a trace.
///
/// Harmonic extensions of truncated traces are polynomials, so they evaluate
/// anywhere; this permits the centered finite-difference probes across
/// `{x_n = 0}` used to validate the analytic normal derivative.
pub fn ball_evaluator(f: &BoundaryFunction) -> impl Fn(&[f64]) -> f64 + '_ {
    move |y: &[f64]| {
        let r = y.iter().map(|c| c * c).sum::<f64>().sqrt();
        let t = if r == 0.0 { 0.0 } else { y[y.len() - 1] / r };
        extend_unchecked(f, r, t)
    }
}

/// Transformed trace extension at a half-space point.
pub fn trace_to_halfspace(f: &BoundaryFunction, x: &HalfSpacePoint) -> Result<f64> {
    if f.geom.n as usize != x.dim() {
        return Err(Error::DimensionMismatch(f.geom.n, x.dim() as u32));
    }
    Ok(to_halfspace(&ball_evaluator(f), x))
}

/// Residual of the transformed boundary equation at the boundary point
/// `(x', 0)`:
///
/// ```text
/// -dv/dx_n - [ alpha * phi * v + phi^beta * v^q ],    phi = 2/(1+|x'|^2),
/// ```
///
/// with `-dv/dx_n` computed by the analytic chain rule through `Psi` and the
/// conformal factor: at `x_n = 0` the map satisfies `dPsi/dx_n = -phi Psi`
/// and `d(phi^lambda)/dx_n = -lambda phi^{lambda+1}`, so
/// `-dv/dx_n = phi^{lambda+1} (du/dnu + lambda u)` evaluated at `Psi(x', 0)`.
///
/// The residual is `~0` exactly when `f` solves the ball equation; it equals
/// `phi^{lambda+1}` times the pointwise ball residual, so it inherits
/// spectral accuracy for converged solutions.
pub fn er_residual(f: &BoundaryFunction, params: &ProblemParams, x_prime: &[f64]) -> Result<f64> {
    let n = params.n();
    if f.geom.n != n {
        return Err(Error::DimensionMismatch(f.geom.n, n));
    }
    if x_prime.len() != n as usize - 1 {
        return Err(Error::InvalidDimension(x_prime.len() as u32 + 1));
    }
    let hs = HalfSpaceParams::from_problem(params);
    let lambda = hs.conformal_exponent;
    let norm_sq: f64 = x_prime.iter().map(|c| c * c).sum();
    let phi = 2.0 / (1.0 + norm_sq);
    // Psi(x', 0) lies on the sphere with meridian coordinate t.
    let t = (norm_sq - 1.0) / (1.0 + norm_sq);
    let u = f.eval(t);
    if params.q.fract() != 0.0 && u <= 0.0 {
        return Err(Error::NonPositiveNodalValue {
            index: 0,
            value: u,
            exponent: params.q,
        });
    }
    let du_nu = extend_gradient(f, &BallPoint::new(1.0, t)?).radial;
    let lhs = power(phi, lambda + 1.0) * (du_nu + lambda * u);
    let v = power(phi, lambda) * u;
    let rhs = hs.alpha * phi * v + power(phi, hs.beta) * power(v, params.q);
    Ok(lhs - rhs)
}

/// Least-squares fit of the far-field expansion coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticFit {
    /// Leading coefficient `c0 > 0` of `v ~ c0 |x|^{2-n}`.
    pub c0: f64,
    /// First-order axial coefficient `c1` of `1 + c1 x_n/|x|^2`.
    pub c1: f64,
    /// The radii used for the fit.
    pub fit_radii: Vec<f64>,
    /// Root-mean-square misfit of the linear model in rescaled units.
    pub residual: f64,
}

/// Fit `(c0, c1)` of `v = c0 |x|^{2-n} (1 + c1 x_n/|x|^2 + O(|x|^{-2}))`
/// from samples `v(R * d)` over the given unit directions and radii.
///
/// Rescaling by `|x|^{n-2}` makes `z = v |x|^{n-2}` an analytic function of
/// `w = x_n/|x|^2` and `s = 1/|x|^2` (for the conformal transforms treated
/// here it is exactly such, e.g. `z = c (1 + 2w + s)^{-(n-2)/2}` for the
/// transformed constant); fitting the monomials `{1, w, s, w^2, ws}` leaves
/// a third-order remainder, so the reported misfit decays at least as
/// `|x|^{-3}` when the largest radius grows. `(c0, c1) = (A, B/A)` from the
/// `1` and `w` coefficients. Columns are normalized before solving; a
/// degenerate sample plan (for instance all directions on the boundary, so
/// the axial monomials vanish) is rejected as ill-conditioned.
pub fn fit_asymptotics<F: Fn(&HalfSpacePoint) -> f64>(
    v: &F,
    directions: &[Vec<f64>],
    radii: &[f64],
    n: u32,
) -> Result<AsymptoticFit> {
    if directions.is_empty() || radii.len() < 2 {
        return Err(Error::InsufficientSamples(
            "need at least one direction and two radii".to_string(),
        ));
    }
    if radii.windows(2).any(|p| p[1] <= p[0]) || radii[0] <= 0.0 {
        return Err(Error::InsufficientSamples(
            "radii must be positive and strictly increasing".to_string(),
        ));
    }
    if *radii.last().expect("nonempty") < 1e3 {
        return Err(Error::InsufficientSamples(
            "largest radius must be at least 1e3 for the far-field regime".to_string(),
        ));
    }
    for d in directions {
        if d.len() != n as usize {
            return Err(Error::DimensionMismatch(d.len() as u32, n));
        }
        let norm: f64 = d.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 || *d.last().expect("nonempty") < 0.0 {
            return Err(Error::PointOutOfDomain(format!(
                "directions must be unit vectors with d_n >= 0, got |d| = {norm}"
            )));
        }
    }

    let rows = directions.len() * radii.len();
    let cols = 5usize;
    let mut design = DMatrix::zeros(rows, cols);
    let mut rhs = DVector::zeros(rows);
    let mut row = 0usize;
    for d in directions {
        for &r in radii {
            let coords: Vec<f64> = d.iter().map(|c| c * r).collect();
            let x = HalfSpacePoint::new(coords)?;
            let w = x.xn() / (r * r);
            let s = 1.0 / (r * r);
            design[(row, 0)] = 1.0;
            design[(row, 1)] = w;
            design[(row, 2)] = s;
            design[(row, 3)] = w * w;
            design[(row, 4)] = w * s;
            rhs[row] = v(&x) * r.powi(n as i32 - 2);
            row += 1;
        }
    }

    // Normalize columns so the conditioning test sees geometry, not the
    // raw monomial scales (which differ by factors of |x|^2 each).
    let mut scales = [0.0f64; 5];
    for (j, scale) in scales.iter_mut().enumerate() {
        *scale = design.column(j).norm();
        if *scale <= f64::MIN_POSITIVE {
            return Err(Error::IllConditionedFit(
                "a fit monomial vanishes on every sample (degenerate directions)".to_string(),
            ));
        }
        let mut col = design.column_mut(j);
        col /= *scale;
    }
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let smin = svd
        .singular_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if !(smin > 1e-10 * smax) {
        return Err(Error::IllConditionedFit(format!(
            "normalized design matrix condition number {:.3e}",
            if smin > 0.0 { smax / smin } else { f64::INFINITY }
        )));
    }
    let scaled = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::IllConditionedFit(e.to_string()))?;
    let misfit = (&design * &scaled - &rhs).norm() / (rows as f64).sqrt();
    let c0 = scaled[0] / scales[0];
    let b = scaled[1] / scales[1];
    if !(c0 > 0.0) {
        return Err(Error::IllConditionedFit(format!(
            "leading far-field coefficient must be positive, fit gave {c0:.3e}"
        )));
    }
    Ok(AsymptoticFit {
        c0,
        c1: b / c0,
        fit_radii: radii.to_vec(),
        residual: misfit,
    })
}

/// Sampling plan for [`reflection_probe`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSpec {
    /// Number of low-discrepancy bulk samples.
    pub count: usize,
    /// Largest sampling radius (far-field coverage).
    pub max_radius: f64,
    /// Seed offsetting the deterministic sequence.
    pub seed: u64,
}

impl Default for ProbeSpec {
    fn default() -> Self {
        ProbeSpec {
            count: 4096,
            max_radius: 1e3,
            seed: 0,
        }
    }
}

/// Outcome of a reflection-monotonicity probe at plane offset `lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionProbe {
    /// Reflection plane offset (`> 0`).
    pub lambda: f64,
    /// The sampled points, all with `x_1 <= lambda`.
    pub samples: Vec<HalfSpacePoint>,
    /// `min v(x) - v(x^lambda)` over the samples.
    pub min_difference: f64,
}

/// Radical-inverse (van der Corput) sequence in the given base.
fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let mut inv = 0.0;
    let mut denom = 1.0;
    while index > 0 {
        denom *= base as f64;
        inv += (index % base) as f64 / denom;
        index /= base;
    }
    inv
}

const HALTON_BASES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Probe the moving-planes conclusion `v(x) >= v(x^lambda)` on the slab
/// `{x_1 <= lambda}`.
///
/// Samples are a deterministic Halton sequence (log-uniform in radius up to
/// `max_radius`, offset by the seed) plus ray samples at large radius along
/// axis directions with `x_1 <= 0`. The probe is a falsification
/// instrument: a negative `min_difference` beyond tolerance is a finding to
/// report, never something to clamp. Axisymmetric traces have their boundary
/// extremum on the `x_n`-axis, which the transform already centers, so no
/// recentering is applied.
pub fn reflection_probe<F: Fn(&HalfSpacePoint) -> f64>(
    v: &F,
    lambda: f64,
    spec: &ProbeSpec,
    n: u32,
) -> Result<ReflectionProbe> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameters { a: lambda, q: 0.0 });
    }
    let dim = n as usize;
    // Each coordinate and the radius scale need distinct Halton bases.
    if dim < 3 || dim >= HALTON_BASES.len() {
        return Err(Error::InvalidDimension(n));
    }
    if spec.count == 0 || !(spec.max_radius >= 1.0) {
        return Err(Error::InsufficientSamples(format!(
            "probe needs count > 0 and max_radius >= 1, got {} and {}",
            spec.count, spec.max_radius
        )));
    }

    let offset = spec.seed % 65_521; // deterministic sequence shift
    let mut samples = Vec::with_capacity(spec.count + 4 * 7);
    for k in 0..spec.count {
        let index = offset + 1 + k as u64;
        // Dimension 0 drives a log-uniform radius scale in [0.05, max_radius].
        let scale = 0.05 * (spec.max_radius / 0.05).powf(radical_inverse(index, HALTON_BASES[0]));
        let mut coords = Vec::with_capacity(dim);
        // x_1 <= lambda by construction.
        coords.push(lambda - scale * radical_inverse(index, HALTON_BASES[1]));
        for i in 2..dim {
            coords.push(scale * (2.0 * radical_inverse(index, HALTON_BASES[i]) - 1.0));
        }
        coords.push(scale * radical_inverse(index, HALTON_BASES[dim]));
        samples.push(HalfSpacePoint::new(coords)?);
    }
    // Ray samples at large radius: axis directions pointing away from the
    // moving plane or along the boundary/axis.
    let mut rays: Vec<Vec<f64>> = Vec::new();
    let mut minus_e1 = vec![0.0; dim];
    minus_e1[0] = -1.0;
    rays.push(minus_e1);
    let mut e_n = vec![0.0; dim];
    e_n[dim - 1] = 1.0;
    rays.push(e_n);
    let mut e_2 = vec![0.0; dim];
    e_2[1] = 1.0;
    rays.push(e_2);
    let mut diag = vec![0.0; dim];
    diag[0] = -std::f64::consts::FRAC_1_SQRT_2;
    diag[dim - 1] = std::f64::consts::FRAC_1_SQRT_2;
    rays.push(diag);
    for ray in rays {
        for k in 0..7 {
            let r = spec.max_radius / (2.0f64.powi(k));
            let coords: Vec<f64> = ray.iter().map(|c| c * r).collect();
            if coords[0] <= lambda {
                samples.push(HalfSpacePoint::new(coords)?);
            }
        }
    }

    let mut min_difference = f64::INFINITY;
    for x in &samples {
        let diff = v(x) - v(&x.reflected(lambda));
        if diff < min_difference {
            min_difference = diff;
        }
    }
    Ok(ReflectionProbe {
        lambda,
        samples,
        min_difference,
    })
}
