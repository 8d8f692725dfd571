//! Axisymmetric spectral basis on the unit sphere `S^{n-1}`.
//!
//! Functions on `S^{n-1}` that depend only on the axial coordinate
//! `t = xi_n in [-1, 1]` are expanded in Gegenbauer (ultraspherical)
//! polynomials `C_l^lambda` with index `lambda = (n - 2) / 2`. Those are
//! orthogonal on `[-1, 1]` against the weight `(1 - t^2)^{(n-3)/2}`, which is
//! exactly the axial marginal of the surface measure:
//!
//! ```text
//! ∫_{S^{n-1}} F(xi_n) dsigma = |S^{n-2}| ∫_{-1}^{1} F(t) (1 - t^2)^{(n-3)/2} dt.
//! ```
//!
//! The module provides
//! * closed-form weighted monomial moments (Beta-function values),
//! * Gauss rules for the weight, built by the Golub–Welsch eigenvalue method,
//! * the orthonormal basis `e_l = C_l^lambda / ||C_l^lambda||_{L^2(S^{n-1})}`,
//! * nodal analysis / coefficient synthesis between the two representations.
//!
//! Basis norms come from the closed-form Gegenbauer norm (via a stable ratio
//! recurrence), never from the quadrature being tested, so transform tests
//! against the rule are a genuine cross-check of two independent routes.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use std::f64::consts::PI;

/// Gamma function at half-integer arguments: `gamma_half(k)` returns
/// `Γ(k / 2)` exactly (as a finite product of floats), `k >= 1`.
fn gamma_half(k: u32) -> f64 {
    debug_assert!(k >= 1);
    // Γ(1/2) = sqrt(pi), Γ(1) = 1, then Γ(x + 1) = x Γ(x).
    let mut value = if k % 2 == 1 { PI.sqrt() } else { 1.0 };
    let mut two_x = if k % 2 == 1 { 1 } else { 2 };
    while two_x < k {
        value *= two_x as f64 / 2.0;
        two_x += 2;
    }
    value
}

/// Surface area of the unit sphere `S^{d-1}` in `R^d`: `2 pi^{d/2} / Γ(d/2)`.
fn sphere_area(d: u32) -> f64 {
    2.0 * PI.powf(d as f64 / 2.0) / gamma_half(d)
}

/// Static geometry of the sphere `S^{n-1}` in ambient dimension `n >= 3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereGeometry {
    /// Ambient dimension `n >= 3`.
    pub n: u32,
    /// Gegenbauer index `lambda = (n - 2) / 2 > 0`.
    pub lambda: f64,
    /// Exponent of the axial weight `(1 - t^2)^{(n-3)/2}`.
    pub weight_exponent: f64,
    /// Surface area of `S^{n-1}` (the sphere carrying the problem).
    pub area_sn1: f64,
    /// Surface area of `S^{n-2}` (the measure of each latitude fiber).
    pub area_sn2: f64,
}

impl SphereGeometry {
    /// Build the geometry for `S^{n-1}`; rejects `n < 3`.
    pub fn new(n: u32) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidDimension(n));
        }
        Ok(SphereGeometry {
            n,
            lambda: (n as f64 - 2.0) / 2.0,
            weight_exponent: (n as f64 - 3.0) / 2.0,
            area_sn1: sphere_area(n),
            area_sn2: sphere_area(n - 1),
        })
    }

    /// Critical trace exponent `q_crit = n / (n - 2)`.
    pub fn critical_exponent(&self) -> f64 {
        self.n as f64 / (self.n as f64 - 2.0)
    }
}

/// Closed-form moment `∫_{-1}^{1} t^k (1 - t^2)^{(n-3)/2} dt`.
///
/// Odd `k` vanish by symmetry; even `k = 2j` equal the Beta value
/// `B(j + 1/2, (n-1)/2)`, computed here by an exact ratio recurrence from
/// `m_0 = sqrt(pi) Γ((n-1)/2) / Γ(n/2)`:
///
/// ```text
/// m_{2j} = m_{2j-2} (2j - 1) / (2j + n - 2).
/// ```
pub fn jacobi_moment(k: u32, n: u32) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidDimension(n));
    }
    if k % 2 == 1 {
        return Ok(0.0);
    }
    let mut m = PI.sqrt() * gamma_half(n - 1) / gamma_half(n);
    let mut j = 0u32;
    while 2 * j < k {
        j += 1;
        m *= (2.0 * j as f64 - 1.0) / (2.0 * j as f64 + n as f64 - 2.0);
    }
    Ok(m)
}

/// Gauss rule for the axial surface measure on `S^{n-1}`.
///
/// Nodes live in `(-1, 1)`, strictly increasing and exactly symmetric about
/// zero with matching weights; weights include the `|S^{n-2}|` fiber factor,
/// so `sum(w_j f(t_j))` approximates the full surface integral of the
/// axisymmetric function `f` and `sum(w_j) = |S^{n-1}|`. An `m`-node rule is
/// exact for polynomials of degree `<= 2m - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    /// Ambient dimension the rule belongs to.
    pub n: u32,
    /// Strictly increasing nodes in `(-1, 1)`.
    pub nodes: Vec<f64>,
    /// Positive weights, `sum = |S^{n-1}|`.
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// True when the rule has no nodes (never holds for built rules).
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrate nodal data over the sphere.
    pub fn integrate_nodal(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.nodes.len() {
            return Err(Error::NodeCountMismatch {
                expected: self.nodes.len(),
                got: values.len(),
            });
        }
        Ok(self
            .weights
            .iter()
            .zip(values)
            .map(|(w, v)| w * v)
            .sum())
    }

    /// Integrate a callable of the axial coordinate over the sphere.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }
}

/// Build an `m`-node Gauss rule for the weight `(1 - t^2)^{(n-3)/2}` scaled
/// by `|S^{n-2}|`, using the Golub–Welsch method: nodes are eigenvalues of
/// the symmetric tridiagonal Jacobi matrix of the three-term recurrence,
/// weights come from first components of the normalized eigenvectors.
pub fn build_rule(n: u32, m: usize) -> Result<QuadratureRule> {
    let geom = SphereGeometry::new(n)?;
    if m == 0 {
        return Err(Error::EmptyRule);
    }
    let alpha = geom.weight_exponent;

    // Symmetric Jacobi weight (a = b = alpha): zero diagonal, off-diagonals
    // beta_k = k (k + 2 alpha) / ((2k + 2 alpha - 1)(2k + 2 alpha + 1)).
    let mut jacobi = DMatrix::<f64>::zeros(m, m);
    for k in 1..m {
        let kf = k as f64;
        let beta = kf * (kf + 2.0 * alpha)
            / ((2.0 * kf + 2.0 * alpha - 1.0) * (2.0 * kf + 2.0 * alpha + 1.0));
        let b = beta.sqrt();
        jacobi[(k - 1, k)] = b;
        jacobi[(k, k - 1)] = b;
    }

    let eig = jacobi.try_symmetric_eigen(f64::EPSILON, 0).ok_or(Error::EigenFailure(m))?;
    let total_mass = geom.area_sn2 * jacobi_moment(0, n)?;

    let mut pairs: Vec<(f64, f64)> = (0..m)
        .map(|k| {
            let first = eig.eigenvectors[(0, k)];
            (eig.eigenvalues[k], total_mass * first * first)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite nodes"));

    let mut nodes: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut weights: Vec<f64> = pairs.iter().map(|p| p.1).collect();

    // Enforce exact symmetry: pair mirrored nodes, average, and zero the
    // middle node of odd rules. The eigenvalues are symmetric only up to
    // rounding, and downstream parity arguments rely on exactness.
    for j in 0..m / 2 {
        let j2 = m - 1 - j;
        let half = 0.5 * (nodes[j2] - nodes[j]);
        nodes[j] = -half;
        nodes[j2] = half;
        let w = 0.5 * (weights[j] + weights[j2]);
        weights[j] = w;
        weights[j2] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }

    for j in 0..m {
        if !(nodes[j] > -1.0 && nodes[j] < 1.0) || !(weights[j] > 0.0) {
            return Err(Error::EigenFailure(m));
        }
        if j > 0 && nodes[j] <= nodes[j - 1] {
            return Err(Error::EigenFailure(m));
        }
    }

    Ok(QuadratureRule { n, nodes, weights })
}

/// Values `C_0^lambda(t), ..., C_lmax^lambda(t)` by the forward recurrence
/// `l C_l = 2 t (l + lambda - 1) C_{l-1} - (l + 2 lambda - 2) C_{l-2}`.
fn gegenbauer_values(lambda: f64, lmax: usize, t: f64) -> Vec<f64> {
    let mut c = Vec::with_capacity(lmax + 1);
    c.push(1.0);
    if lmax == 0 {
        return c;
    }
    c.push(2.0 * lambda * t);
    for l in 2..=lmax {
        let lf = l as f64;
        let next = (2.0 * t * (lf + lambda - 1.0) * c[l - 1]
            - (lf + 2.0 * lambda - 2.0) * c[l - 2])
            / lf;
        c.push(next);
    }
    c
}

/// Values and first derivatives of `C_l^lambda` at `t`, from the
/// differentiated three-term recurrence.
fn gegenbauer_values_and_derivatives(lambda: f64, lmax: usize, t: f64) -> (Vec<f64>, Vec<f64>) {
    let c = gegenbauer_values(lambda, lmax, t);
    let mut d = Vec::with_capacity(lmax + 1);
    d.push(0.0);
    if lmax >= 1 {
        d.push(2.0 * lambda);
    }
    for l in 2..=lmax {
        let lf = l as f64;
        let next = (2.0 * (lf + lambda - 1.0) * (c[l - 1] + t * d[l - 1])
            - (lf + 2.0 * lambda - 2.0) * d[l - 2])
            / lf;
        d.push(next);
    }
    (c, d)
}

/// Full-sphere norms `||C_l^lambda||_{L^2(S^{n-1})}` for `l = 0..=lmax`.
///
/// Uses the closed-form axial norm `h_l` (a Beta/Gamma expression) through
/// the ratio recurrence
/// `h_l / h_{l-1} = (l + 2 lambda - 1)(l + lambda - 1) / (l (l + lambda))`
/// seeded with `h_0 = m_0`, then scales by the fiber area:
/// `||C_l||^2 = |S^{n-2}| h_l`.
pub fn basis_norms(geom: &SphereGeometry, lmax: usize) -> Vec<f64> {
    let lambda = geom.lambda;
    let mut h = jacobi_moment(0, geom.n).expect("n validated by geometry");
    let mut norms = Vec::with_capacity(lmax + 1);
    norms.push((geom.area_sn2 * h).sqrt());
    for l in 1..=lmax {
        let lf = l as f64;
        h *= (lf + 2.0 * lambda - 1.0) * (lf + lambda - 1.0) / (lf * (lf + lambda));
        norms.push((geom.area_sn2 * h).sqrt());
    }
    norms
}

/// Orthonormal basis value `e_l(t) = C_l^lambda(t) / ||C_l^lambda||`.
pub fn basis_eval(geom: &SphereGeometry, l: usize, t: f64) -> f64 {
    let values = gegenbauer_values(geom.lambda, l, t);
    let norms = basis_norms(geom, l);
    values[l] / norms[l]
}

/// All orthonormal basis values `e_0(t), ..., e_lmax(t)`.
pub fn basis_eval_all(geom: &SphereGeometry, lmax: usize, t: f64) -> Vec<f64> {
    let mut values = gegenbauer_values(geom.lambda, lmax, t);
    for (v, norm) in values.iter_mut().zip(basis_norms(geom, lmax)) {
        *v /= norm;
    }
    values
}

/// All orthonormal basis values and derivatives at `t`.
pub fn basis_eval_all_with_derivative(
    geom: &SphereGeometry,
    lmax: usize,
    t: f64,
) -> (Vec<f64>, Vec<f64>) {
    let (mut values, mut derivs) = gegenbauer_values_and_derivatives(geom.lambda, lmax, t);
    for ((v, d), norm) in values
        .iter_mut()
        .zip(derivs.iter_mut())
        .zip(basis_norms(geom, lmax))
    {
        *v /= norm;
        *d /= norm;
    }
    (values, derivs)
}

/// An axisymmetric function on `S^{n-1}` stored as orthonormal Gegenbauer
/// coefficients `f = sum_l coeffs[l] e_l`. The truncation degree is
/// `coeffs.len() - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFunction {
    /// Geometry of the carrying sphere.
    pub geom: SphereGeometry,
    /// Coefficients against the orthonormal basis, degree `0..=L`.
    pub coeffs: Vec<f64>,
}

impl BoundaryFunction {
    /// Wrap a coefficient vector; rejects `n < 3` and empty coefficients.
    pub fn new(n: u32, coeffs: Vec<f64>) -> Result<Self> {
        let geom = SphereGeometry::new(n)?;
        if coeffs.is_empty() {
            return Err(Error::TruncationTooLarge { l: 0, m: 0 });
        }
        Ok(BoundaryFunction { geom, coeffs })
    }

    /// The constant function `value` represented at truncation degree `l`.
    pub fn constant(n: u32, value: f64, l: usize) -> Result<Self> {
        let geom = SphereGeometry::new(n)?;
        let mut coeffs = vec![0.0; l + 1];
        coeffs[0] = value * geom.area_sn1.sqrt();
        Ok(BoundaryFunction { geom, coeffs })
    }

    /// Truncation degree `L`.
    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `L^2(S^{n-1})` norm via Parseval.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// `L^2` norm of the nonconstant part, `sqrt(sum_{l>=1} c_l^2)` — the
    /// distance to the sphere average.
    pub fn amplitude(&self) -> f64 {
        self.coeffs[1..].iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// The sphere average of `f` (the constant with the same mean).
    pub fn mean_value(&self) -> f64 {
        self.coeffs[0] / self.geom.area_sn1.sqrt()
    }

    /// Pointwise value at axial coordinate `t`.
    pub fn eval(&self, t: f64) -> f64 {
        let basis = basis_eval_all(&self.geom, self.truncation(), t);
        self.coeffs.iter().zip(&basis).map(|(c, e)| c * e).sum()
    }

    /// Pointwise derivative `df/dt` at axial coordinate `t` (exact
    /// differentiation of the truncated expansion, no finite differences).
    pub fn eval_derivative(&self, t: f64) -> f64 {
        let (_, derivs) = basis_eval_all_with_derivative(&self.geom, self.truncation(), t);
        self.coeffs.iter().zip(&derivs).map(|(c, d)| c * d).sum()
    }

    /// Zero-pad or truncate the coefficient vector to degree `l`.
    pub fn resized(&self, l: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(l + 1, 0.0);
        BoundaryFunction {
            geom: self.geom,
            coeffs,
        }
    }
}

/// Synthesis: evaluate `f` at each point of `points`.
pub fn synthesize(f: &BoundaryFunction, points: &[f64]) -> Vec<f64> {
    points.iter().map(|&t| f.eval(t)).collect()
}

/// Synthesis of the `t`-derivative of `f` at each point of `points`.
pub fn synthesize_derivative(f: &BoundaryFunction, points: &[f64]) -> Vec<f64> {
    points.iter().map(|&t| f.eval_derivative(t)).collect()
}

/// Analysis: project nodal values onto the first `l + 1` basis functions,
/// `c_k = sum_j w_j values_j e_k(t_j)`.
///
/// Exact for data sampled from a degree-`l` expansion when the rule has
/// `m >= l + 1` nodes; rejects `l >= m`, where the discrete system is
/// underdetermined.
pub fn analyze(values: &[f64], rule: &QuadratureRule, l: usize) -> Result<BoundaryFunction> {
    let m = rule.len();
    if values.len() != m {
        return Err(Error::NodeCountMismatch {
            expected: m,
            got: values.len(),
        });
    }
    if l + 1 > m {
        return Err(Error::TruncationTooLarge { l, m });
    }
    let geom = SphereGeometry::new(rule.n)?;
    let mut coeffs = vec![0.0; l + 1];
    for (j, (&t, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        let basis = basis_eval_all(&geom, l, t);
        let wv = w * values[j];
        for (c, e) in coeffs.iter_mut().zip(&basis) {
            *c += wv * e;
        }
    }
    BoundaryFunction::new(rule.n, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Independent moment oracle: `∫ t^k (1-t^2)^{(n-3)/2} dt` via the
    /// substitution `t = cos(theta)` and composite Simpson on `[0, pi]`,
    /// which avoids the endpoint derivative blow-up of the raw weight.
    fn simpson_moment(k: u32, n: u32) -> f64 {
        let steps = 200_000usize; // even
        let h = PI / steps as f64;
        let integrand = |theta: f64| -> f64 {
            let c = theta.cos();
            let s = theta.sin();
            c.powi(k as i32) * s.powi(n as i32 - 2)
        };
        let mut sum = integrand(0.0) + integrand(PI);
        for j in 1..steps {
            let w = if j % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * integrand(j as f64 * h);
        }
        sum * h / 3.0
    }

    #[test]
    fn gamma_half_matches_known_values() {
        assert_relative_eq!(gamma_half(1), PI.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(gamma_half(2), 1.0, max_relative = 1e-15);
        assert_relative_eq!(gamma_half(3), PI.sqrt() / 2.0, max_relative = 1e-15);
        assert_relative_eq!(gamma_half(8), 6.0, max_relative = 1e-15);
        assert_relative_eq!(gamma_half(7), 15.0 * PI.sqrt() / 8.0, max_relative = 1e-15);
    }

    #[test]
    fn sphere_areas_match_closed_forms() {
        let g3 = SphereGeometry::new(3).unwrap();
        assert_relative_eq!(g3.area_sn1, 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(g3.area_sn2, 2.0 * PI, max_relative = 1e-15);
        let g4 = SphereGeometry::new(4).unwrap();
        assert_relative_eq!(g4.area_sn1, 2.0 * PI * PI, max_relative = 1e-15);
        assert_relative_eq!(g4.area_sn2, 4.0 * PI, max_relative = 1e-15);
        assert!(SphereGeometry::new(2).is_err());
    }

    #[test]
    fn moments_match_simple_closed_forms() {
        assert_relative_eq!(jacobi_moment(0, 3).unwrap(), 2.0, max_relative = 1e-14);
        assert_relative_eq!(
            jacobi_moment(2, 3).unwrap(),
            2.0 / 3.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            jacobi_moment(14, 3).unwrap(),
            2.0 / 15.0,
            max_relative = 1e-14
        );
        assert_eq!(jacobi_moment(7, 5).unwrap(), 0.0);
        // Total mass times the fiber area reproduces the sphere area.
        for n in 3..=8 {
            let g = SphereGeometry::new(n).unwrap();
            assert_relative_eq!(
                g.area_sn2 * jacobi_moment(0, n).unwrap(),
                g.area_sn1,
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn moments_match_simpson_oracle() {
        for &n in &[3u32, 4, 5, 7] {
            for k in (0..=12).step_by(2) {
                let exact = jacobi_moment(k, n).unwrap();
                let oracle = simpson_moment(k, n);
                assert_relative_eq!(exact, oracle, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn rule_mass_symmetry_and_ordering() {
        for &n in &[3u32, 4, 5, 7] {
            for &m in &[1usize, 2, 5, 8, 16, 33] {
                let rule = build_rule(n, m).unwrap();
                let g = SphereGeometry::new(n).unwrap();
                let mass: f64 = rule.weights.iter().sum();
                assert_relative_eq!(mass, g.area_sn1, max_relative = 1e-13);
                for j in 0..m {
                    // Exact mirror symmetry, enforced bitwise.
                    assert_eq!(rule.nodes[j], -rule.nodes[m - 1 - j]);
                    assert_eq!(rule.weights[j], rule.weights[m - 1 - j]);
                    assert!(rule.weights[j] > 0.0);
                    assert!(rule.nodes[j].abs() < 1.0);
                    if j > 0 {
                        assert!(rule.nodes[j] > rule.nodes[j - 1]);
                    }
                }
            }
        }
        assert!(build_rule(3, 0).is_err());
    }

    #[test]
    fn rule_integrates_monomials_to_gauss_degree() {
        for &n in &[3u32, 4, 5, 7] {
            for &m in &[4usize, 8, 16] {
                let rule = build_rule(n, m).unwrap();
                let g = SphereGeometry::new(n).unwrap();
                for k in 0..=(2 * m as u32 - 1) {
                    let numeric = rule.integrate(|t| t.powi(k as i32));
                    let exact = g.area_sn2 * jacobi_moment(k, n).unwrap();
                    if k % 2 == 1 {
                        assert_abs_diff_eq!(numeric, 0.0, epsilon = 1e-12 * g.area_sn1);
                    } else {
                        assert_relative_eq!(numeric, exact, max_relative = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn degree_fourteen_monomial_example() {
        // n = 3, m = 8: ∫ t^14 dsigma = 2 pi * (2/15) = 4 pi / 15.
        let rule = build_rule(3, 8).unwrap();
        let numeric = rule.integrate(|t| t.powi(14));
        assert_relative_eq!(numeric, 4.0 * PI / 15.0, max_relative = 1e-12);
    }

    #[test]
    fn basis_is_orthonormal_under_matching_rule() {
        for &n in &[3u32, 4, 5, 7] {
            let g = SphereGeometry::new(n).unwrap();
            let lmax = 12usize;
            for &m in &[lmax + 1, 2 * lmax + 2] {
                let rule = build_rule(n, m).unwrap();
                let mut gram = vec![vec![0.0; lmax + 1]; lmax + 1];
                for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                    let e = basis_eval_all(&g, lmax, t);
                    for i in 0..=lmax {
                        for j in 0..=lmax {
                            gram[i][j] += w * e[i] * e[j];
                        }
                    }
                }
                for i in 0..=lmax {
                    for j in 0..=lmax {
                        let expected = if i == j { 1.0 } else { 0.0 };
                        assert_abs_diff_eq!(gram[i][j], expected, epsilon = 1e-11);
                    }
                }
            }
        }
    }

    #[test]
    fn lowest_mode_is_inverse_sqrt_area() {
        let g = SphereGeometry::new(3).unwrap();
        assert_relative_eq!(
            basis_eval(&g, 0, 0.37),
            1.0 / (4.0 * PI).sqrt(),
            max_relative = 1e-15
        );
        for n in 3..=6 {
            let g = SphereGeometry::new(n).unwrap();
            assert_relative_eq!(
                basis_eval(&g, 0, -0.9),
                1.0 / g.area_sn1.sqrt(),
                max_relative = 1e-15
            );
        }
    }

    #[test]
    fn basis_parity_is_exact() {
        for &n in &[3u32, 4, 6] {
            let g = SphereGeometry::new(n).unwrap();
            for &t in &[0.1, 0.5, 0.93] {
                let plus = basis_eval_all(&g, 9, t);
                let minus = basis_eval_all(&g, 9, -t);
                for l in 0..=9 {
                    let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                    // Bitwise equality: the recurrence commutes with t -> -t.
                    assert_eq!(minus[l], sign * plus[l]);
                }
            }
        }
    }

    #[test]
    fn closed_form_norms_match_quadrature() {
        for &n in &[3u32, 4, 5, 7] {
            let g = SphereGeometry::new(n).unwrap();
            let lmax = 10usize;
            let rule = build_rule(n, 2 * lmax + 2).unwrap();
            let norms = basis_norms(&g, lmax);
            for l in 0..=lmax {
                let numeric = rule.integrate(|t| {
                    let c = gegenbauer_values(g.lambda, l, t);
                    c[l] * c[l]
                });
                assert_relative_eq!(numeric, norms[l] * norms[l], max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn derivative_recurrence_matches_index_shift_identity() {
        // d/dt C_l^lambda = 2 lambda C_{l-1}^{lambda+1}.
        for &lambda in &[0.5, 1.0, 1.5, 2.5] {
            for &t in &[-0.8, -0.2, 0.0, 0.4, 0.95] {
                let (_, d) = gegenbauer_values_and_derivatives(lambda, 10, t);
                let shifted = gegenbauer_values(lambda + 1.0, 9, t);
                for l in 1..=10 {
                    assert_relative_eq!(
                        d[l],
                        2.0 * lambda * shifted[l - 1],
                        max_relative = 1e-12,
                        epsilon = 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let g = SphereGeometry::new(5).unwrap();
        let f = BoundaryFunction::new(5, vec![0.3, -1.2, 0.7, 0.05, -0.4, 0.9]).unwrap();
        let h = 1e-4;
        for &t in &[-0.6, 0.0, 0.3, 0.8] {
            let fd1 = (f.eval(t + h) - f.eval(t - h)) / (2.0 * h);
            let fd2 = (f.eval(t + h / 2.0) - f.eval(t - h / 2.0)) / h;
            let richardson = (4.0 * fd2 - fd1) / 3.0;
            assert_relative_eq!(f.eval_derivative(t), richardson, max_relative = 1e-9);
        }
        let _ = g;
    }

    #[test]
    fn analyze_synthesize_round_trip() {
        // n = 4, L = 10, m = 22: degree-10 data survives the round trip.
        let n = 4u32;
        let l = 10usize;
        let rule = build_rule(n, 22).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let coeffs: Vec<f64> = (0..=l).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = BoundaryFunction::new(n, coeffs.clone()).unwrap();
        let values = synthesize(&f, &rule.nodes);
        let back = analyze(&values, &rule, l).unwrap();
        for (a, b) in coeffs.iter().zip(&back.coeffs) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        let values_back = synthesize(&back, &rule.nodes);
        for (a, b) in values.iter().zip(&values_back) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn analyze_rejects_underdetermined_truncation() {
        let rule = build_rule(3, 6).unwrap();
        let values = vec![1.0; 6];
        assert!(analyze(&values, &rule, 5).is_ok());
        assert!(matches!(
            analyze(&values, &rule, 6),
            Err(Error::TruncationTooLarge { l: 6, m: 6 })
        ));
        assert!(matches!(
            analyze(&values[..4], &rule, 3),
            Err(Error::NodeCountMismatch { expected: 6, got: 4 })
        ));
    }

    #[test]
    fn constant_helpers_are_consistent() {
        let f = BoundaryFunction::constant(4, 2.5, 8).unwrap();
        assert_relative_eq!(f.eval(0.3), 2.5, max_relative = 1e-15);
        assert_relative_eq!(f.mean_value(), 2.5, max_relative = 1e-15);
        assert_eq!(f.amplitude(), 0.0);
        assert_relative_eq!(
            f.l2_norm(),
            2.5 * f.geom.area_sn1.sqrt(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn parseval_matches_quadrature_norm() {
        let n = 5u32;
        let f = BoundaryFunction::new(n, vec![1.0, -0.5, 0.25, 0.8]).unwrap();
        let rule = build_rule(n, 12).unwrap();
        let numeric = rule.integrate(|t| f.eval(t).powi(2)).sqrt();
        assert_relative_eq!(numeric, f.l2_norm(), max_relative = 1e-13);
    }
}
