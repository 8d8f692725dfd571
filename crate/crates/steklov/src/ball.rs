//! Harmonic-extension operators on the unit ball.
//!
//! An axisymmetric boundary trace `f = sum_l c_l e_l` extends harmonically
//! into the ball as `u(x) = sum_l c_l |x|^l e_l(x_n / |x|)`, because the
//! degree-`l` axisymmetric spherical harmonic is `e_l(xi_n)` and its solid
//! extension is `r^l e_l(t)`. Consequently the Dirichlet-to-Neumann map is
//! diagonal in degree, `(dtn f)_l = l c_l`, and the Dirichlet energy of the
//! extension is `sum_l l c_l^2`.
//!
//! On top of the extension the module provides pointwise gradients, weighted
//! `L^p` norms, the sharp trace ("Beckner-type") inequality gap
//!
//! ```text
//! gap(f, q) = (q - 1) E(f) + ||f||_2^2 - |S^{n-1}|^{(q-1)/(q+1)} ||f||_{q+1}^2 >= 0,
//! ```
//!
//! and the Rayleigh-type quotient `Q(f) = (E(f) + a ||f||_2^2) / ||f||_{q+1}^2`
//! whose minimizers solve the nonlinear Steklov boundary equation.

use crate::basis::{
    basis_eval_all, basis_eval_all_with_derivative, build_rule, synthesize, BoundaryFunction,
    QuadratureRule, SphereGeometry,
};
use crate::error::{Error, Result};

/// Parameters of the boundary problem `du/dnu + a u = u^q` on `S^{n-1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemParams {
    /// Sphere geometry for ambient dimension `n`.
    pub geom: SphereGeometry,
    /// Linear Robin coefficient, `a > 0`.
    pub a: f64,
    /// Nonlinearity exponent, `q > 1`.
    pub q: f64,
}

impl ProblemParams {
    /// Validate and build parameters; requires `n >= 3`, `a > 0`, `q > 1`.
    pub fn new(n: u32, a: f64, q: f64) -> Result<Self> {
        let geom = SphereGeometry::new(n)?;
        if !(a > 0.0) || !(q > 1.0) || !a.is_finite() || !q.is_finite() {
            return Err(Error::InvalidParameters { a, q });
        }
        Ok(ProblemParams { geom, a, q })
    }

    /// Ambient dimension.
    pub fn n(&self) -> u32 {
        self.geom.n
    }

    /// Critical trace exponent `n / (n - 2)`.
    pub fn q_crit(&self) -> f64 {
        self.geom.critical_exponent()
    }

    /// Threshold `(n - 2) / 2` below which uniqueness of the constant is a
    /// theorem.
    pub fn theorem_threshold(&self) -> f64 {
        (self.n() as f64 - 2.0) / 2.0
    }

    /// Conjectured sharp uniqueness threshold `1 / (q - 1)` — also the point
    /// where the first nonradial mode of the linearization changes sign.
    pub fn conjecture_threshold(&self) -> f64 {
        1.0 / (self.q - 1.0)
    }

    /// Reject exponents beyond the critical one (used by solver entry points).
    pub fn require_subcritical_or_critical(&self) -> Result<()> {
        let q_crit = self.q_crit();
        if self.q > q_crit + 1e-12 {
            return Err(Error::SupercriticalExponent {
                q: self.q,
                q_crit,
                n: self.n(),
            });
        }
        Ok(())
    }
}

/// A point of the closed unit ball in meridian coordinates: radius
/// `r in [0, 1]` and axial cosine `t = x_n / |x| in [-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallPoint {
    /// Radius, `0 <= r <= 1`.
    pub r: f64,
    /// Axial cosine, `-1 <= t <= 1` (irrelevant at `r = 0`).
    pub t: f64,
}

impl BallPoint {
    /// Validate coordinates.
    pub fn new(r: f64, t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) || !(-1.0..=1.0).contains(&t) {
            return Err(Error::PointOutOfDomain(format!("r = {r}, t = {t}")));
        }
        Ok(BallPoint { r, t })
    }
}

/// Gradient of the harmonic extension at a meridian point, decomposed into
/// the radial direction `x/|x|` and the polar (increasing colatitude)
/// direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallGradient {
    /// Component along `x / |x|`.
    pub radial: f64,
    /// Component along the unit polar vector `e_theta` (where `t = cos theta`).
    pub polar: f64,
}

impl BallGradient {
    /// Euclidean norm of the gradient.
    pub fn norm(&self) -> f64 {
        self.radial.hypot(self.polar)
    }
}

/// Dirichlet-to-Neumann map of the ball: diagonal in degree,
/// `(dtn f)_l = l c_l`. Exact in coefficient space.
pub fn dtn(f: &BoundaryFunction) -> BoundaryFunction {
    let coeffs = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(l, c)| l as f64 * c)
        .collect();
    BoundaryFunction {
        geom: f.geom,
        coeffs,
    }
}

/// Dirichlet energy of the harmonic extension,
/// `∫_{B^n} |grad u|^2 = sum_l l c_l^2` (the pairing of `f` with `dtn f`).
pub fn dirichlet_energy(f: &BoundaryFunction) -> f64 {
    f.coeffs
        .iter()
        .enumerate()
        .map(|(l, c)| l as f64 * c * c)
        .sum()
}

/// Value of the truncated harmonic extension at radius `r` and axial cosine
/// `t`, without the `r <= 1` domain check.
///
/// The truncated extension `sum_l c_l r^l e_l(t)` is a harmonic polynomial on
/// all of `R^n`; evaluating it slightly outside the closed ball is
/// legitimate and used by finite-difference oracles at the boundary.
pub fn extend_unchecked(f: &BoundaryFunction, r: f64, t: f64) -> f64 {
    let basis = basis_eval_all(&f.geom, f.truncation(), t);
    let mut rl = 1.0;
    let mut sum = 0.0;
    for (c, e) in f.coeffs.iter().zip(&basis) {
        sum += c * e * rl;
        rl *= r;
    }
    sum
}

/// Value of the harmonic extension at an interior point.
pub fn extend(f: &BoundaryFunction, p: &BallPoint) -> f64 {
    extend_unchecked(f, p.r, p.t)
}

/// Cartesian decomposition of the extension gradient: at the point `x` with
/// meridian coordinates `(r, t)`,
///
/// ```text
/// grad u(x) = axial_free * x + axial * e_n,
/// ```
///
/// with `axial_free = sum_{l>=2} c_l r^{l-2} (l e_l(t) - t e_l'(t))` and
/// `axial = sum_{l>=1} c_l r^{l-1} e_l'(t)`. The `l = 0, 1` contributions to
/// `axial_free` vanish identically (`l e_l - t e_l' = 0` there), which keeps
/// the decomposition finite at the origin.
pub fn extend_gradient_components(f: &BoundaryFunction, r: f64, t: f64) -> (f64, f64) {
    let lmax = f.truncation();
    let (values, derivs) = basis_eval_all_with_derivative(&f.geom, lmax, t);
    let mut axial_free = 0.0;
    let mut axial = 0.0;
    let mut r_lm1 = 1.0; // r^{l-1}, tracked from l = 1
    let mut r_lm2 = 1.0; // r^{l-2}, tracked from l = 2
    for l in 1..=lmax {
        axial += f.coeffs[l] * r_lm1 * derivs[l];
        if l >= 2 {
            axial_free += f.coeffs[l] * r_lm2 * (l as f64 * values[l] - t * derivs[l]);
            r_lm2 *= r;
        }
        r_lm1 *= r;
    }
    (axial_free, axial)
}

/// Gradient of the harmonic extension in radial/polar components. Finite at
/// the origin, where it reduces to the constant gradient of the degree-one
/// part.
pub fn extend_gradient(f: &BoundaryFunction, p: &BallPoint) -> BallGradient {
    let (axial_free, axial) = extend_gradient_components(f, p.r, p.t);
    let sin_theta = (1.0 - p.t * p.t).max(0.0).sqrt();
    BallGradient {
        radial: axial_free * p.r + axial * p.t,
        polar: -axial * sin_theta,
    }
}

fn is_integer_exponent(p: f64) -> bool {
    p.fract() == 0.0 && p.abs() < 1e9
}

/// Nodal values of `f` on the rule, with the positive-cone domain check for
/// non-integer exponents: if `exponent` is fractional and some nodal value is
/// `<= 0`, a domain error is raised instead of silently clamping.
pub(crate) fn nodal_values_checked(
    f: &BoundaryFunction,
    rule: &QuadratureRule,
    exponent: f64,
) -> Result<Vec<f64>> {
    if f.geom.n != rule.n {
        return Err(Error::DimensionMismatch(f.geom.n, rule.n));
    }
    let values = synthesize(f, &rule.nodes);
    if !is_integer_exponent(exponent) {
        for (index, &value) in values.iter().enumerate() {
            if value <= 0.0 {
                return Err(Error::NonPositiveNodalValue {
                    index,
                    value,
                    exponent,
                });
            }
        }
    }
    Ok(values)
}

/// Surface `L^p` norm `(∫_{S^{n-1}} |f|^p dsigma)^{1/p}` by quadrature.
///
/// For non-integer `p` the trace must be strictly positive at the nodes;
/// a nonpositive value raises [`Error::NonPositiveNodalValue`] rather than
/// being clamped, so escape from the positive cone is never masked.
pub fn lp_norm(f: &BoundaryFunction, p: f64, rule: &QuadratureRule) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::InvalidParameters { a: p, q: p });
    }
    let values = nodal_values_checked(f, rule, p)?;
    let integral: f64 = rule
        .weights
        .iter()
        .zip(&values)
        .map(|(w, v)| w * v.abs().powf(p))
        .sum();
    Ok(integral.powf(1.0 / p))
}

/// Default dealiased rule for a trace of truncation `L`: `m = 2 L + 2` nodes.
pub fn default_rule_for(f: &BoundaryFunction) -> Result<QuadratureRule> {
    build_rule(f.geom.n, 2 * f.truncation() + 2)
}

/// Sharp trace inequality gap
/// `(q - 1) E(f) + ||f||_2^2 - |S^{n-1}|^{(q-1)/(q+1)} ||f||_{q+1}^2`.
///
/// Nonnegative for admissible traces when `1 < q <= n/(n-2)`, zero exactly
/// at constants, and homogeneous of degree two. Uses a dealiased internal
/// rule; see [`beckner_gap_with_rule`] to amortize rule construction.
pub fn beckner_gap(f: &BoundaryFunction, q: f64) -> Result<f64> {
    let rule = default_rule_for(f)?;
    beckner_gap_with_rule(f, q, &rule)
}

/// [`beckner_gap`] against a caller-supplied quadrature rule.
pub fn beckner_gap_with_rule(f: &BoundaryFunction, q: f64, rule: &QuadratureRule) -> Result<f64> {
    let q_crit = f.geom.critical_exponent();
    if !(q > 1.0) || q > q_crit + 1e-12 {
        return Err(Error::SupercriticalExponent {
            q,
            q_crit,
            n: f.geom.n,
        });
    }
    let l2 = f.l2_norm();
    let lq1 = lp_norm(f, q + 1.0, rule)?;
    let cn = f.geom.area_sn1;
    Ok((q - 1.0) * dirichlet_energy(f) + l2 * l2 - cn.powf((q - 1.0) / (q + 1.0)) * lq1 * lq1)
}

/// Rayleigh-type quotient `Q(f) = (E(f) + a ||f||_2^2) / ||f||_{q+1}^2`,
/// scale-invariant; its critical points solve `dtn f + a f = mu f^q`.
pub fn quotient(f: &BoundaryFunction, params: &ProblemParams) -> Result<f64> {
    let rule = default_rule_for(f)?;
    quotient_with_rule(f, params, &rule)
}

/// [`quotient`] against a caller-supplied quadrature rule.
pub fn quotient_with_rule(
    f: &BoundaryFunction,
    params: &ProblemParams,
    rule: &QuadratureRule,
) -> Result<f64> {
    if f.geom.n != params.n() {
        return Err(Error::DimensionMismatch(f.geom.n, params.n()));
    }
    let l2 = f.l2_norm();
    let lq1 = lp_norm(f, params.q + 1.0, rule)?;
    if lq1 == 0.0 {
        return Err(Error::InvalidParameters {
            a: params.a,
            q: params.q,
        });
    }
    Ok((dirichlet_energy(f) + params.a * l2 * l2) / (lq1 * lq1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{analyze, build_rule};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_trace(n: u32, l: usize, seed: u64) -> BoundaryFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs: Vec<f64> = (0..=l)
            .map(|k| rng.gen_range(-1.0..1.0) * 0.5_f64.powi(k as i32))
            .collect();
        BoundaryFunction::new(n, coeffs).unwrap()
    }

    /// Positive random trace: random oscillation plus a lifting constant.
    fn random_positive_trace(n: u32, l: usize, seed: u64) -> BoundaryFunction {
        let mut f = random_trace(n, l, seed);
        let grid: Vec<f64> = (0..=400).map(|i| -1.0 + i as f64 / 200.0).collect();
        let min = synthesize(&f, &grid).into_iter().fold(f64::INFINITY, f64::min);
        f.coeffs[0] += (0.3 + (-min).max(0.0) * 1.1) * f.geom.area_sn1.sqrt();
        f
    }

    /// n-dimensional finite-difference Laplacian of the harmonic extension,
    /// exploiting axisymmetry: it is enough to perturb one in-plane
    /// transverse direction (weight 1), one out-of-plane direction
    /// (weight n - 2) and the axis.
    fn fd_laplacian(f: &BoundaryFunction, r: f64, t: f64, h: f64) -> f64 {
        let n = f.geom.n as f64;
        let x1 = r * (1.0 - t * t).max(0.0).sqrt();
        let xn = r * t;
        let eval = |a: f64, b: f64, c: f64| -> f64 {
            // Point (a, b, 0, ..., 0, c) in R^n.
            let rr = (a * a + b * b + c * c).sqrt();
            let tt = if rr == 0.0 { 0.0 } else { (c / rr).clamp(-1.0, 1.0) };
            extend_unchecked(f, rr, tt)
        };
        let center = eval(x1, 0.0, xn);
        let dxx = eval(x1 + h, 0.0, xn) - 2.0 * center + eval(x1 - h, 0.0, xn);
        let dyy = eval(x1, h, xn) - 2.0 * center + eval(x1, -h, xn);
        let dzz = eval(x1, 0.0, xn + h) - 2.0 * center + eval(x1, 0.0, xn - h);
        (dxx + (n - 2.0) * dyy + dzz) / (h * h)
    }

    #[test]
    fn dtn_is_exact_mode_multiplication() {
        let n = 4u32;
        for l in 0..=40usize {
            let mut coeffs = vec![0.0; 41];
            coeffs[l] = 1.0;
            let f = BoundaryFunction::new(n, coeffs).unwrap();
            let g = dtn(&f);
            for (k, c) in g.coeffs.iter().enumerate() {
                let expected = if k == l { l as f64 } else { 0.0 };
                assert_eq!(*c, expected);
            }
        }
    }

    #[test]
    fn dtn_kills_constants_and_energy_vanishes() {
        let f = BoundaryFunction::constant(5, 3.7, 12).unwrap();
        assert!(dtn(&f).coeffs.iter().all(|&c| c == 0.0));
        assert_eq!(dirichlet_energy(&f), 0.0);
    }

    #[test]
    fn energy_of_linear_trace_is_ball_volume() {
        // f(t) = t on S^2 extends to u = x_3; energy = |B^3| = 4 pi / 3.
        let rule = build_rule(3, 16).unwrap();
        let values: Vec<f64> = rule.nodes.clone();
        let f = analyze(&values, &rule, 7).unwrap();
        assert_relative_eq!(dirichlet_energy(&f), 4.0 * PI / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn extension_interpolates_boundary_and_mean() {
        let f = random_trace(4, 9, 11);
        for &t in &[-0.7, 0.0, 0.52, 1.0] {
            let p = BallPoint::new(1.0, t).unwrap();
            assert_relative_eq!(extend(&f, &p), f.eval(t), max_relative = 1e-13);
        }
        let center = BallPoint::new(0.0, 0.3).unwrap();
        assert_relative_eq!(extend(&f, &center), f.mean_value(), max_relative = 1e-13);
    }

    #[test]
    fn extension_is_harmonic_by_finite_differences() {
        let f = random_trace(5, 8, 3);
        for &(r, t) in &[(0.0, 0.0), (0.25, 0.6), (0.5, -0.4), (0.7, 0.1)] {
            let lap = fd_laplacian(&f, r, t, 1e-4);
            assert_abs_diff_eq!(lap, 0.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn extension_satisfies_maximum_principle() {
        for seed in 0..6u64 {
            let f = random_positive_trace(3, 10, seed);
            let grid: Vec<f64> = (0..=800).map(|i| -1.0 + i as f64 / 400.0).collect();
            let boundary = synthesize(&f, &grid);
            let (bmin, bmax) = boundary
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                    (lo.min(v), hi.max(v))
                });
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
            for _ in 0..200 {
                let p = BallPoint::new(rng.gen_range(0.0..1.0), rng.gen_range(-1.0..1.0)).unwrap();
                let v = extend(&f, &p);
                assert!(v >= bmin - 1e-10 && v <= bmax + 1e-10, "interior value escapes range");
            }
        }
    }

    #[test]
    fn gradient_of_axis_coordinate_is_unit_axis_vector() {
        // f(t) = t on S^2: extension x_3, gradient e_3 everywhere.
        let rule = build_rule(3, 12).unwrap();
        let f = analyze(&rule.nodes.clone(), &rule, 5).unwrap();
        for &(r, t) in &[(0.0, 0.0), (0.3, 0.8), (0.9, -0.5), (1.0, 0.2)] {
            let g = extend_gradient(&f, &BallPoint::new(r, t).unwrap());
            assert_relative_eq!(g.radial, t, epsilon = 1e-12, max_relative = 1e-12);
            assert_relative_eq!(
                g.polar,
                -(1.0 - t * t).sqrt(),
                epsilon = 1e-12,
                max_relative = 1e-12
            );
            assert_relative_eq!(g.norm(), 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let f = random_trace(4, 9, 21);
        let h = 1e-5;
        for &(r, t) in &[(0.35, 0.5), (0.75, -0.3), (0.5, 0.0)] {
            let g = extend_gradient(&f, &BallPoint::new(r, t).unwrap());
            let fd_radial =
                (extend_unchecked(&f, r + h, t) - extend_unchecked(&f, r - h, t)) / (2.0 * h);
            // Polar derivative via theta: t = cos(theta).
            let theta = t.acos();
            let fd_polar = (extend_unchecked(&f, r, (theta + h).cos())
                - extend_unchecked(&f, r, (theta - h).cos()))
                / (2.0 * h * r);
            assert_relative_eq!(g.radial, fd_radial, epsilon = 1e-8, max_relative = 1e-8);
            assert_relative_eq!(g.polar, fd_polar, epsilon = 1e-7, max_relative = 1e-7);
        }
    }

    #[test]
    fn gradient_is_finite_at_origin() {
        let f = random_trace(6, 7, 5);
        let g = extend_gradient(&f, &BallPoint::new(0.0, 0.4).unwrap());
        assert!(g.radial.is_finite() && g.polar.is_finite());
        // Only the degree-one coefficient contributes at the origin.
        let geom = f.geom;
        let (_, derivs) = basis_eval_all_with_derivative(&geom, 1, 0.4);
        let expected_axial = f.coeffs[1] * derivs[1];
        assert_relative_eq!(
            g.norm(),
            expected_axial.abs(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn lp_norm_p2_matches_parseval() {
        let f = random_trace(5, 8, 42);
        let rule = build_rule(5, 18).unwrap();
        let numeric = lp_norm(&f, 2.0, &rule).unwrap();
        assert_relative_eq!(numeric, f.l2_norm(), max_relative = 1e-13);
    }

    #[test]
    fn lp_norm_matches_dense_simpson_oracle() {
        // f = 1 + 0.1 t on S^2, p = 3: the weight is flat for n = 3, so an
        // independent dense Simpson rule on [-1, 1] is an easy oracle.
        let n = 3u32;
        let rule = build_rule(n, 10).unwrap();
        let values: Vec<f64> = rule.nodes.iter().map(|t| 1.0 + 0.1 * t).collect();
        let f = analyze(&values, &rule, 4).unwrap();
        let numeric = lp_norm(&f, 3.0, &rule).unwrap();

        let steps = 200_000usize;
        let h = 2.0 / steps as f64;
        let integrand = |t: f64| (1.0 + 0.1 * t).powi(3);
        let mut sum = integrand(-1.0) + integrand(1.0);
        for j in 1..steps {
            let w = if j % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * integrand(-1.0 + j as f64 * h);
        }
        let oracle = (2.0 * PI * sum * h / 3.0).powf(1.0 / 3.0);
        assert_relative_eq!(numeric, oracle, max_relative = 1e-8);
    }

    #[test]
    fn lp_norm_rejects_nonpositive_values_under_fractional_power() {
        let f = BoundaryFunction::new(3, vec![0.0, 1.0]).unwrap(); // odd trace
        let rule = build_rule(3, 8).unwrap();
        assert!(matches!(
            lp_norm(&f, 2.5, &rule),
            Err(Error::NonPositiveNodalValue { .. })
        ));
        // Integer powers of sign-changing traces are fine.
        assert!(lp_norm(&f, 2.0, &rule).is_ok());
        assert!(lp_norm(&f, 3.0, &rule).is_ok());
    }

    #[test]
    fn beckner_gap_vanishes_at_constants() {
        for &(n, q) in &[(3u32, 2.0), (3, 3.0), (4, 2.0), (5, 1.4)] {
            for &k in &[0.3, 1.0, 2.7] {
                let f = BoundaryFunction::constant(n, k, 16).unwrap();
                let gap = beckner_gap(&f, q).unwrap();
                assert_abs_diff_eq!(gap, 0.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn beckner_gap_is_degree_two_homogeneous_and_nonnegative() {
        for seed in 0..10u64 {
            let f = random_positive_trace(3, 8, seed);
            let gap = beckner_gap(&f, 2.0).unwrap();
            assert!(gap >= -1e-10, "gap = {gap} negative at seed {seed}");
            let theta = 2.31;
            let scaled = BoundaryFunction::new(
                3,
                f.coeffs.iter().map(|c| theta * c).collect(),
            )
            .unwrap();
            let gap_scaled = beckner_gap(&scaled, 2.0).unwrap();
            assert_relative_eq!(gap_scaled, theta * theta * gap, max_relative = 1e-11);
        }
    }

    #[test]
    fn beckner_gap_rejects_supercritical_exponent() {
        let f = BoundaryFunction::constant(3, 1.0, 4).unwrap();
        assert!(matches!(
            beckner_gap(&f, 3.2),
            Err(Error::SupercriticalExponent { .. })
        ));
        assert!(beckner_gap(&f, 3.0).is_ok());
    }

    #[test]
    fn quotient_at_constant_has_closed_form() {
        // Q(const) = a |S^{n-1}|^{(q-1)/(q+1)}; for n = 3, q = 2, a = 0.7:
        // 0.7 (4 pi)^{1/3}.
        let params = ProblemParams::new(3, 0.7, 2.0).unwrap();
        let f = BoundaryFunction::constant(3, 1.9, 12).unwrap();
        let expected = 0.7 * (4.0 * PI).powf(1.0 / 3.0);
        assert_relative_eq!(quotient(&f, &params).unwrap(), expected, max_relative = 1e-12);
    }

    #[test]
    fn quotient_is_scale_invariant() {
        let params = ProblemParams::new(4, 0.9, 1.7).unwrap();
        let f = random_positive_trace(4, 7, 9);
        let q0 = quotient(&f, &params).unwrap();
        let scaled =
            BoundaryFunction::new(4, f.coeffs.iter().map(|c| 3.7 * c).collect()).unwrap();
        assert_relative_eq!(quotient(&scaled, &params).unwrap(), q0, max_relative = 1e-12);
    }

    #[test]
    fn params_validate_and_expose_thresholds() {
        let p = ProblemParams::new(5, 1.2, 1.5).unwrap();
        assert_relative_eq!(p.q_crit(), 5.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(p.theorem_threshold(), 1.5, max_relative = 1e-15);
        assert_relative_eq!(p.conjecture_threshold(), 2.0, max_relative = 1e-15);
        assert!(ProblemParams::new(3, 0.0, 2.0).is_err());
        assert!(ProblemParams::new(3, 1.0, 1.0).is_err());
        assert!(ProblemParams::new(2, 1.0, 2.0).is_err());
        assert!(BallPoint::new(1.2, 0.0).is_err());
        assert!(BallPoint::new(0.5, -1.4).is_err());
    }
}
