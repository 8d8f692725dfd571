//! Solvers for the truncated boundary equation.
//!
//! In coefficient space the problem `du/dnu + a u = u^q` becomes
//!
//! ```text
//! R(c) = diag(l) c + a c - P_L[(synthesize c)^q] = 0,
//! ```
//!
//! where `P_L` is analysis of the nodal power back onto degrees `0..=L`
//! (pseudospectral treatment of the nonlinearity, dealiased by the default
//! `m = 2L + 2` rule). The Jacobian
//!
//! ```text
//! J(c) = diag(l) + a I - q B^T diag(w_j f_j^{q-1}) B
//! ```
//!
//! is symmetric; at the constant solution `u_c = a^{1/(q-1)}` it is exactly
//! diagonal with spectrum `{ l - (q - 1) a }`, so the first nonradial mode
//! changes stability at `a* = 1 / (q - 1)` — the bifurcation point that
//! [`find_bifurcation`] brackets and [`continue_branch`] follows.
//!
//! [`newton_solve`] is a damped Newton iteration whose line search halves the
//! step until every nodal value stays above a positivity floor and the
//! residual decreases. [`minimize_quotient`] runs a preconditioned projected
//! gradient descent on the scale-invariant quotient and polishes the
//! rescaled minimizer with Newton.

use crate::ball::{quotient_with_rule, ProblemParams};
use crate::basis::{
    basis_eval_all, build_rule, BoundaryFunction, QuadratureRule, SphereGeometry,
};
use crate::error::{Error, Result};
use crate::identities::{constant_trace, power};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;

/// Nodal positivity floor maintained by the Newton line search.
const POSITIVITY_FLOOR: f64 = 1e-12;

/// Maximum step halvings before the line search gives up.
const MAX_HALVINGS: u32 = 40;

/// Iteration cap of the gradient phase in [`minimize_quotient`].
const MAX_GRADIENT_ITERS: usize = 20_000;

/// Options shared by the solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Truncation degree `L` of the coefficient space.
    pub truncation: usize,
    /// Number of quadrature nodes; `None` means the dealiased `2 L + 2`.
    pub node_count: Option<usize>,
    /// Convergence tolerance on the `L^2` residual norm.
    pub tol: f64,
    /// Newton iteration cap.
    pub max_iter: usize,
    /// Line-search backtracking factor in `(0, 1)`.
    pub damping: f64,
    /// Seed for any randomized initialization derived from these options.
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            truncation: 64,
            node_count: None,
            tol: 1e-11,
            max_iter: 50,
            damping: 0.5,
            seed: 0,
        }
    }
}

impl SolverOptions {
    /// Effective node count (`2 L + 2` unless overridden).
    pub fn nodes(&self) -> usize {
        self.node_count.unwrap_or(2 * self.truncation + 2)
    }
}

/// Outcome of a solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// The solution trace (or last iterate when not converged).
    pub solution: BoundaryFunction,
    /// `L^2` norm of the boundary-equation residual at `solution`.
    pub residual_norm: f64,
    /// Euler–Lagrange multiplier: `1` for direct Newton solves, the
    /// pre-rescaling multiplier for quotient minimization.
    pub multiplier: f64,
    /// Newton iterations performed.
    pub iterations: usize,
    /// Eigenvalues of the Jacobian at `solution`, ascending.
    pub spectrum: Vec<f64>,
    /// Whether `residual_norm <= tol` was reached.
    pub converged: bool,
    /// Value of the Rayleigh-type quotient at `solution`.
    pub quotient_value: f64,
}

/// One accepted continuation point.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationPoint {
    /// Parameter value.
    pub a: f64,
    /// `L^2` norm of the nonconstant part of the solution.
    pub amplitude: f64,
    /// Smallest Jacobian eigenvalue at the solution.
    pub min_eigenvalue: f64,
    /// Residual norm of the accepted solution.
    pub residual_norm: f64,
    /// The solution itself.
    pub solution: BoundaryFunction,
}

/// A continuation run over an `a`-interval at fixed `(n, q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationTrace {
    /// Ambient dimension.
    pub n: u32,
    /// Nonlinearity exponent.
    pub q: f64,
    /// Accepted points, `a` strictly monotone.
    pub points: Vec<ContinuationPoint>,
}

/// Precomputed discretization: rule plus the nodal basis matrix.
struct Discretization {
    geom: SphereGeometry,
    rule: QuadratureRule,
    lmax: usize,
    /// `m x (L+1)` matrix of `e_l(t_j)`.
    basis: DMatrix<f64>,
}

impl Discretization {
    fn new(n: u32, lmax: usize, node_count: usize) -> Result<Self> {
        if node_count < lmax + 1 {
            return Err(Error::TruncationTooLarge {
                l: lmax,
                m: node_count,
            });
        }
        let geom = SphereGeometry::new(n)?;
        let rule = build_rule(n, node_count)?;
        let m = rule.len();
        let mut basis = DMatrix::zeros(m, lmax + 1);
        for (j, &t) in rule.nodes.iter().enumerate() {
            for (l, e) in basis_eval_all(&geom, lmax, t).into_iter().enumerate() {
                basis[(j, l)] = e;
            }
        }
        Ok(Discretization {
            geom,
            rule,
            lmax,
            basis,
        })
    }

    fn nodal_values(&self, c: &DVector<f64>) -> DVector<f64> {
        &self.basis * c
    }

    /// Analysis of nodal data: `B^T (w .* v)`.
    fn analyze(&self, nodal: &DVector<f64>) -> DVector<f64> {
        let weighted = DVector::from_iterator(
            self.rule.len(),
            nodal.iter().zip(&self.rule.weights).map(|(v, w)| v * w),
        );
        self.basis.transpose() * weighted
    }

    /// Check the positive cone before applying a fractional power.
    fn checked_power(&self, values: &DVector<f64>, exponent: f64) -> Result<DVector<f64>> {
        if exponent.fract() != 0.0 {
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
        Ok(values.map(|v| power(v, exponent)))
    }

    fn residual(&self, c: &DVector<f64>, params: &ProblemParams) -> Result<DVector<f64>> {
        let values = self.nodal_values(c);
        let powered = self.checked_power(&values, params.q)?;
        let projected = self.analyze(&powered);
        let mut r = projected;
        r *= -1.0;
        for l in 0..=self.lmax {
            r[l] += (l as f64 + params.a) * c[l];
        }
        Ok(r)
    }

    fn jacobian(&self, c: &DVector<f64>, params: &ProblemParams) -> Result<DMatrix<f64>> {
        let values = self.nodal_values(c);
        let powered = self.checked_power(&values, params.q - 1.0)?;
        // q * B^T diag(w v^{q-1}) B via row scaling.
        let mut scaled = self.basis.clone();
        for (j, mut row) in scaled.row_iter_mut().enumerate() {
            row *= self.rule.weights[j] * powered[j];
        }
        let mut j_mat = self.basis.transpose() * scaled;
        j_mat *= -params.q;
        for l in 0..=self.lmax {
            j_mat[(l, l)] += l as f64 + params.a;
        }
        // Symmetric analytically; average away rounding asymmetry so the
        // symmetric eigensolver sees an exactly symmetric matrix.
        let jt = j_mat.transpose();
        j_mat = (j_mat + jt) * 0.5;
        Ok(j_mat)
    }

    fn spectrum(&self, c: &DVector<f64>, params: &ProblemParams) -> Result<Vec<f64>> {
        let j = self.jacobian(c, params)?;
        let m = j.nrows();
        let eig = j
            .try_symmetric_eigen(f64::EPSILON, 0)
            .ok_or(Error::EigenFailure(m))?;
        let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        v.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        Ok(v)
    }

    fn function(&self, c: &DVector<f64>) -> BoundaryFunction {
        BoundaryFunction {
            geom: self.geom,
            coeffs: c.iter().copied().collect(),
        }
    }
}

fn coeff_vector(f: &BoundaryFunction, lmax: usize) -> DVector<f64> {
    DVector::from_fn(lmax + 1, |l, _| f.coeffs.get(l).copied().unwrap_or(0.0))
}

/// Boundary-equation residual `dtn f + a f - P_L(f^q)` of a trace, using the
/// dealiased default rule for the trace's own truncation.
pub fn residual(f: &BoundaryFunction, params: &ProblemParams) -> Result<BoundaryFunction> {
    if f.geom.n != params.n() {
        return Err(Error::DimensionMismatch(f.geom.n, params.n()));
    }
    let lmax = f.truncation();
    let disc = Discretization::new(params.n(), lmax, 2 * lmax + 2)?;
    let r = disc.residual(&coeff_vector(f, lmax), params)?;
    Ok(disc.function(&r))
}

/// Residual norm scaled by the size of its constituent terms,
/// `||R|| / (||dtn f + a f|| + ||P_L f^q|| + tiny)`.
pub fn residual_scaled(f: &BoundaryFunction, params: &ProblemParams) -> Result<f64> {
    if f.geom.n != params.n() {
        return Err(Error::DimensionMismatch(f.geom.n, params.n()));
    }
    let lmax = f.truncation();
    let disc = Discretization::new(params.n(), lmax, 2 * lmax + 2)?;
    let c = coeff_vector(f, lmax);
    let values = disc.nodal_values(&c);
    let powered = disc.checked_power(&values, params.q)?;
    let projected = disc.analyze(&powered);
    let mut linear = c.clone();
    for l in 0..=lmax {
        linear[l] *= l as f64 + params.a;
    }
    let r = &linear - &projected;
    Ok(r.norm() / (linear.norm() + projected.norm() + 1e-300))
}

/// Jacobian of the residual at `f` (symmetric), on the dealiased default rule.
pub fn jacobian(f: &BoundaryFunction, params: &ProblemParams) -> Result<DMatrix<f64>> {
    if f.geom.n != params.n() {
        return Err(Error::DimensionMismatch(f.geom.n, params.n()));
    }
    let lmax = f.truncation();
    let disc = Discretization::new(params.n(), lmax, 2 * lmax + 2)?;
    disc.jacobian(&coeff_vector(f, lmax), params)
}

/// Eigenvalues (ascending) of the Jacobian at `f`.
pub fn spectrum(f: &BoundaryFunction, params: &ProblemParams) -> Result<Vec<f64>> {
    if f.geom.n != params.n() {
        return Err(Error::DimensionMismatch(f.geom.n, params.n()));
    }
    let lmax = f.truncation();
    let disc = Discretization::new(params.n(), lmax, 2 * lmax + 2)?;
    disc.spectrum(&coeff_vector(f, lmax), params)
}

/// Solve the linear system `J delta = rhs`, augmented with the constraint
/// `delta[1] = 0` at the exactly-critical parameter pair, where the family
/// direction makes the plain Jacobian singular and fixing the first-moment
/// coefficient selects a family member.
fn newton_step(
    j_mat: &DMatrix<f64>,
    rhs: &DVector<f64>,
    augment: bool,
    iteration: usize,
) -> Result<DVector<f64>> {
    let dim = j_mat.nrows();
    if augment {
        let mut bordered = DMatrix::zeros(dim + 1, dim + 1);
        bordered.view_mut((0, 0), (dim, dim)).copy_from(j_mat);
        bordered[(dim, 1)] = 1.0;
        bordered[(1, dim)] = 1.0;
        let mut b = DVector::zeros(dim + 1);
        b.rows_mut(0, dim).copy_from(rhs);
        let solved = bordered.clone().lu().solve(&b).ok_or_else(|| {
            let sigma_min = smallest_singular_value(&bordered);
            Error::SingularJacobian {
                iteration,
                sigma_min,
            }
        })?;
        Ok(solved.rows(0, dim).into_owned())
    } else {
        j_mat.clone().lu().solve(rhs).ok_or_else(|| {
            let sigma_min = smallest_singular_value(j_mat);
            Error::SingularJacobian {
                iteration,
                sigma_min,
            }
        })
    }
}

fn smallest_singular_value(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(f64::INFINITY, |lo, &s| lo.min(s))
}

/// Damped Newton iteration on the truncated boundary equation.
///
/// The initial trace is resized to the option's truncation degree. Each step
/// backtracks by the damping factor until all nodal values exceed the
/// positivity floor `1e-12` (positive solutions are the object of study, so
/// the iteration never leaves the positive cone); running out of halvings is
/// a hard error. Reaching `max_iter` without meeting `tol` returns a result
/// with `converged = false` — non-convergence is reported, never silently
/// dropped.
pub fn newton_solve(
    f0: &BoundaryFunction,
    params: &ProblemParams,
    opts: &SolverOptions,
) -> Result<SolveResult> {
    if f0.geom.n != params.n() {
        return Err(Error::DimensionMismatch(f0.geom.n, params.n()));
    }
    params.require_subcritical_or_critical()?;
    let disc = Discretization::new(params.n(), opts.truncation, opts.nodes())?;
    let critical_pair = (params.q - params.q_crit()).abs() <= 1e-12
        && (params.a - params.theorem_threshold()).abs() <= 1e-12;

    let mut c = coeff_vector(&f0.resized(opts.truncation), opts.truncation);
    let mut r = disc.residual(&c, params)?;
    let mut rnorm = r.norm();
    let mut iterations = 0usize;
    let mut converged = rnorm <= opts.tol;

    while !converged && iterations < opts.max_iter {
        let j_mat = disc.jacobian(&c, params)?;
        let delta = newton_step(&j_mat, &(-&r), critical_pair, iterations)?;

        let mut step = 1.0;
        let mut halvings = 0u32;
        let accepted = loop {
            let candidate = &c + &delta * step;
            let values = disc.nodal_values(&candidate);
            let min_value = values.iter().copied().fold(f64::INFINITY, f64::min);
            if min_value > POSITIVITY_FLOOR {
                break Some(candidate);
            }
            halvings += 1;
            if halvings > MAX_HALVINGS {
                break None;
            }
            step *= opts.damping;
        };

        let c_new = accepted.ok_or(Error::LineSearchFailed {
            iteration: iterations,
            halvings: MAX_HALVINGS,
            reason: "no iterate above the positivity floor".to_string(),
        })?;
        c = c_new;
        r = disc.residual(&c, params)?;
        rnorm = r.norm();
        iterations += 1;
        converged = rnorm <= opts.tol;
    }

    let solution = disc.function(&c);
    let spectrum = disc.spectrum(&c, params)?;
    let quotient_value = quotient_with_rule(&solution, params, &disc.rule)?;
    Ok(SolveResult {
        solution,
        residual_norm: rnorm,
        multiplier: 1.0,
        iterations,
        spectrum,
        converged,
        quotient_value,
    })
}

/// Minimize the quotient `Q(f) = (E + a ||f||_2^2) / ||f||_{q+1}^2` over the
/// positive cone (subcritical `q` only), then rescale the minimizer by
/// `mu^{1/(q-1)}` so it solves the boundary equation with multiplier one,
/// and polish with [`newton_solve`].
///
/// The descent phase is a projected gradient iteration, preconditioned by
/// `diag(1 / (l + a))` (the linear part of the Hessian), renormalized to
/// `||f||_{q+1} = 1` after every accepted step; steps backtrack until the
/// quotient decreases and all nodal values stay positive.
pub fn minimize_quotient(
    f0: &BoundaryFunction,
    params: &ProblemParams,
    opts: &SolverOptions,
) -> Result<SolveResult> {
    if f0.geom.n != params.n() {
        return Err(Error::DimensionMismatch(f0.geom.n, params.n()));
    }
    let q = params.q;
    let q_crit = params.q_crit();
    if q >= q_crit - 1e-12 {
        return Err(Error::SupercriticalExponent {
            q,
            q_crit,
            n: params.n(),
        });
    }
    let disc = Discretization::new(params.n(), opts.truncation, opts.nodes())?;
    let a = params.a;
    let lmax = opts.truncation;

    let qp1_integral = |values: &DVector<f64>| -> f64 {
        values
            .iter()
            .zip(&disc.rule.weights)
            .map(|(v, w)| w * v.abs().powf(q + 1.0))
            .sum()
    };
    let grad_energy = |c: &DVector<f64>| -> f64 {
        c.iter()
            .enumerate()
            .map(|(l, x)| (l as f64 + a) * x * x)
            .sum()
    };

    let mut c = coeff_vector(&f0.resized(lmax), lmax);
    let mut values = disc.nodal_values(&c);
    let min0 = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min0 <= 0.0 {
        let index = values.iter().position(|&v| v <= 0.0).unwrap_or(0);
        return Err(Error::NonPositiveNodalValue {
            index,
            value: min0,
            exponent: q + 1.0,
        });
    }
    // Normalize ||f||_{q+1} = 1 so Q = E + a ||f||_2^2 and mu = Q directly.
    let mut integral = qp1_integral(&values);
    c /= integral.powf(1.0 / (q + 1.0));
    values = disc.nodal_values(&c);
    integral = qp1_integral(&values);

    let mut num = grad_energy(&c);
    let mut eta = 0.25;
    let mut stall = 0usize;
    for _ in 0..MAX_GRADIENT_ITERS {
        // With the normalization in force: grad Q = 2[(diag(l) + a) c - num * N].
        let powered = disc.checked_power(&values, q)?;
        let n_vec = disc.analyze(&powered);
        let mut grad = DVector::zeros(lmax + 1);
        for l in 0..=lmax {
            grad[l] = 2.0 * ((l as f64 + a) * c[l] - num * n_vec[l]);
        }
        // Precondition by the diagonal of the linear Hessian part.
        let direction = DVector::from_fn(lmax + 1, |l, _| -grad[l] / (l as f64 + a));
        let slope: f64 = grad.dot(&direction);
        if grad.norm() <= 1e-13 * (1.0 + num.abs()) {
            break;
        }

        let mut step = eta;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let mut candidate = &c + &direction * step;
            let cand_values = disc.nodal_values(&candidate);
            let min_value = cand_values.iter().copied().fold(f64::INFINITY, f64::min);
            if min_value > POSITIVITY_FLOOR {
                let cand_integral = qp1_integral(&cand_values);
                candidate /= cand_integral.powf(1.0 / (q + 1.0));
                let cand_num = grad_energy(&candidate);
                if cand_num <= num + 1e-4 * step * slope {
                    accepted = Some((candidate, cand_num));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((c_new, num_new)) = accepted else {
            break; // stagnation: gradient no longer yields descent
        };
        eta = (step * 2.0).min(1.0);
        let improvement = num - num_new;
        c = c_new;
        num = num_new;
        values = disc.nodal_values(&c);
        integral = qp1_integral(&values);
        if improvement <= 1e-15 * num.abs().max(1.0) {
            stall += 1;
            if stall >= 5 {
                break;
            }
        } else {
            stall = 0;
        }
    }

    // Euler–Lagrange multiplier at the normalized minimizer, then rescale to
    // multiplier one and polish.
    let mu = num / integral;
    let theta = mu.powf(1.0 / (q - 1.0));
    let rescaled = disc.function(&(c * theta));
    let polished = newton_solve(&rescaled, params, opts)?;
    Ok(SolveResult {
        multiplier: mu,
        ..polished
    })
}

/// Eigenvalue of the linearization at the constant solution associated with
/// the first nonradial mode, computed from the assembled Jacobian (not the
/// closed form), for use in bifurcation bracketing.
fn mode_one_eigenvalue(n: u32, q: f64, a: f64, disc: &Discretization) -> Result<f64> {
    let params = ProblemParams::new(n, a, q)?;
    let c = coeff_vector(&constant_trace(&params, disc.lmax), disc.lmax);
    let j_mat = disc.jacobian(&c, &params)?;
    let dim = j_mat.nrows();
    let eig = j_mat
        .try_symmetric_eigen(f64::EPSILON, 0)
        .ok_or(Error::EigenFailure(dim))?;
    // Pick the eigenvalue whose eigenvector is dominated by coefficient 1.
    let mut best = (0usize, 0.0f64);
    for k in 0..dim {
        let weight = eig.eigenvectors[(1, k)].abs();
        if weight > best.1 {
            best = (k, weight);
        }
    }
    Ok(eig.eigenvalues[best.0])
}

/// Locate the parameter `a*` where the first nonradial mode of the
/// linearization at the constant solution crosses zero, by bisection on the
/// assembled Jacobian's mode-one eigenvalue. The bracket must straddle the
/// crossing. Analytically `a* = 1 / (q - 1)`; the numerical route is kept
/// independent so the closed form can be verified against it. The constant
/// solution and its linearization exist for every `q > 1`, so no
/// subcriticality restriction applies here.
pub fn find_bifurcation(n: u32, q: f64, bracket: (f64, f64)) -> Result<f64> {
    ProblemParams::new(n, bracket.0.max(f64::MIN_POSITIVE), q)?;
    let disc = Discretization::new(n, 8, 18)?;
    let (mut lo, mut hi) = bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidParameters { a: lo, q });
    }
    let mut f_lo = mode_one_eigenvalue(n, q, lo, &disc)?;
    let f_hi = mode_one_eigenvalue(n, q, hi, &disc)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange {
            lo,
            hi,
            f_lo,
            f_hi,
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-13 * mid.max(1.0) {
            break;
        }
        let f_mid = mode_one_eigenvalue(n, q, mid, &disc)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Natural-parameter continuation of solutions over `[a_start, a_end]` in
/// `steps` increments at fixed `(n, q)`.
///
/// Starting beyond the bifurcation point `a* = 1/(q-1)`, the first solve is
/// seeded with the constant plus a ladder of first-eigenmode perturbations
/// (the tangent direction of the bifurcating branch); below `a*` the
/// constant seeds itself. Subsequent steps use a secant predictor and halve
/// the step on corrector failure; a step that cannot be advanced reports the
/// last successful parameter.
pub fn continue_branch(
    n: u32,
    q: f64,
    a_start: f64,
    a_end: f64,
    steps: usize,
    opts: &SolverOptions,
) -> Result<ContinuationTrace> {
    if steps == 0 || a_start <= 0.0 || a_end <= 0.0 || a_start == a_end {
        return Err(Error::InvalidParameters {
            a: a_start.min(a_end),
            q,
        });
    }
    let a_star = 1.0 / (q - 1.0);
    let direction = (a_end - a_start).signum();
    let base_step = (a_end - a_start) / steps as f64;

    let disc = Discretization::new(n, opts.truncation, opts.nodes())?;
    let record = |result: &SolveResult, a: f64| -> Result<ContinuationPoint> {
        let params = ProblemParams::new(n, a, q)?;
        let c = coeff_vector(&result.solution, opts.truncation);
        let spec = disc.spectrum(&c, &params)?;
        Ok(ContinuationPoint {
            a,
            amplitude: result.solution.amplitude(),
            min_eigenvalue: spec[0],
            residual_norm: result.residual_norm,
            solution: result.solution.clone(),
        })
    };

    // First point. Past the bifurcation the constant is a saddle of the
    // quotient and pure first-mode Newton seeds fall back onto it (the step
    // removes the perturbation to linear order since the cubic self-overlap
    // of the first mode vanishes); the quotient minimizer is a global method
    // and lands on the bifurcating branch instead, so it seeds the branch.
    let params0 = ProblemParams::new(n, a_start, q)?;
    let constant0 = constant_trace(&params0, opts.truncation);
    let mut first: Option<SolveResult> = None;
    if a_start > a_star + 1e-10 && q < params0.q_crit() - 1e-12 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(opts.seed);
        let f0 = initial_guess(&params0, opts.truncation, InitStrategy::PerturbedConstant, &mut rng);
        if let Ok(result) = minimize_quotient(&f0, &params0, opts) {
            if result.converged && result.solution.amplitude() > 1e3 * opts.tol.max(1e-14) {
                first = Some(result);
            }
        }
    }
    let first = match first {
        Some(r) => r,
        None => {
            let r = newton_solve(&constant0, &params0, opts)?;
            if !r.converged {
                return Err(Error::ContinuationStalled {
                    last_a: f64::NAN,
                    failed_a: a_start,
                });
            }
            r
        }
    };

    let mut points = vec![record(&first, a_start)?];
    let mut prev: Option<(f64, DVector<f64>)> = None;
    let mut current = (
        a_start,
        coeff_vector(&first.solution, opts.truncation),
    );

    let mut target = a_start;
    while (a_end - target) * direction > 1e-14 {
        let remaining = a_end - current.0;
        let mut da = if remaining.abs() < base_step.abs() * 1.5 {
            remaining
        } else {
            base_step
        };
        // Try the step, halving on failure.
        let mut attempts = 0u32;
        loop {
            target = current.0 + da;
            let params = ProblemParams::new(n, target, q)?;
            // Secant predictor when history exists, otherwise the previous point.
            let predictor = match &prev {
                Some((a_prev, c_prev)) if (current.0 - a_prev).abs() > 1e-15 => {
                    let slope = (&current.1 - c_prev) / (current.0 - a_prev);
                    &current.1 + slope * da
                }
                _ => current.1.clone(),
            };
            let guess = disc.function(&predictor);
            match newton_solve(&guess, &params, opts) {
                Ok(result) if result.converged => {
                    points.push(record(&result, target)?);
                    prev = Some(current.clone());
                    current = (target, coeff_vector(&result.solution, opts.truncation));
                    break;
                }
                _ => {
                    attempts += 1;
                    if attempts > 12 {
                        return Err(Error::ContinuationStalled {
                            last_a: current.0,
                            failed_a: target,
                        });
                    }
                    da *= 0.5;
                }
            }
        }
    }

    Ok(ContinuationTrace { n, q, points })
}

/// Deterministic initial guesses shared by the command-line driver and tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitStrategy {
    /// The exact constant solution.
    Constant,
    /// Constant times `1 + 0.2 g` with `g` a seeded random decaying trace.
    PerturbedConstant,
    /// Constant plus `0.3 u_c` in the first-mode direction.
    Mode1,
}

/// Build an initial trace for the given strategy at truncation `l`.
pub fn initial_guess<R: rand::Rng>(
    params: &ProblemParams,
    l: usize,
    strategy: InitStrategy,
    rng: &mut R,
) -> BoundaryFunction {
    let u_c = crate::identities::constant_solution(params);
    let mut f = constant_trace(params, l);
    match strategy {
        InitStrategy::Constant => f,
        InitStrategy::Mode1 => {
            if l >= 1 {
                f.coeffs[1] = 0.3 * u_c;
            }
            f
        }
        InitStrategy::PerturbedConstant => {
            let mut amplitude = 0.2 * u_c;
            loop {
                let mut g = f.clone();
                for (k, c) in g.coeffs.iter_mut().enumerate().skip(1) {
                    *c = amplitude * rng.gen_range(-1.0..1.0) * 0.5_f64.powi(k as i32 - 1);
                }
                let min = (0..=400)
                    .map(|i| g.eval(-1.0 + i as f64 / 200.0))
                    .fold(f64::INFINITY, f64::min);
                if min > 0.05 * u_c {
                    return g;
                }
                amplitude *= 0.5;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::quotient;
    use crate::basis::synthesize;
    use crate::identities::{pohozaev_report, random_positive_trace, CriticalFamily};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small_opts(l: usize) -> SolverOptions {
        SolverOptions {
            truncation: l,
            max_iter: 100,
            ..SolverOptions::default()
        }
    }

    #[test]
    fn residual_vanishes_at_constant() {
        let params = ProblemParams::new(3, 0.25, 3.0).unwrap();
        let f = constant_trace(&params, 16);
        let r = residual(&f, &params).unwrap();
        assert!(r.l2_norm() < 1e-13, "residual {}", r.l2_norm());
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let params = ProblemParams::new(4, 0.6, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random_positive_trace(4, 8, &mut rng).unwrap();
        let j = jacobian(&f, &params).unwrap();
        let h = 1e-6;
        for col in 0..=8usize {
            let mut fp = f.clone();
            let mut fm = f.clone();
            fp.coeffs[col] += h;
            fm.coeffs[col] -= h;
            let rp = residual(&fp, &params).unwrap();
            let rm = residual(&fm, &params).unwrap();
            for row in 0..=8usize {
                let fd = (rp.coeffs[row] - rm.coeffs[row]) / (2.0 * h);
                assert_abs_diff_eq!(j[(row, col)], fd, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn spectrum_at_constant_is_shifted_degree() {
        let params = ProblemParams::new(3, 0.5, 2.0).unwrap();
        let f = constant_trace(&params, 12);
        let spec = spectrum(&f, &params).unwrap();
        let mut expected: Vec<f64> = (0..=12).map(|l| l as f64 - 0.5).collect();
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in spec.iter().zip(&expected) {
            assert_abs_diff_eq!(got, want, epsilon = 1e-10);
        }
    }

    #[test]
    fn newton_accepts_exact_constant_immediately() {
        let params = ProblemParams::new(3, 0.5, 2.0).unwrap();
        let f0 = constant_trace(&params, 24);
        let result = newton_solve(&f0, &params, &small_opts(24)).unwrap();
        assert!(result.converged);
        assert!(result.iterations <= 1);
        assert!(result.residual_norm <= 1e-11);
        assert_eq!(result.multiplier, 1.0);
    }

    #[test]
    fn newton_returns_to_constant_from_perturbation() {
        let params = ProblemParams::new(3, 0.5, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let f0 = initial_guess(&params, 24, InitStrategy::PerturbedConstant, &mut rng);
        let result = newton_solve(&f0, &params, &small_opts(24)).unwrap();
        assert!(result.converged);
        let grid: Vec<f64> = (0..=200).map(|i| -1.0 + i as f64 / 100.0).collect();
        let u_c = crate::identities::constant_solution(&params);
        for v in synthesize(&result.solution, &grid) {
            assert_abs_diff_eq!(v, u_c, epsilon = 1e-10);
        }
    }

    #[test]
    fn newton_finds_nonconstant_solution_past_threshold() {
        // n = 3, q = 2, a = 1.2 > a* = 1: a nonconstant branch exists. Pure
        // first-mode seeds lie in the constant's Newton basin (the step
        // cancels the perturbation to linear order), so the branch is located
        // by the global quotient minimizer; Newton then holds and polishes it.
        let params = ProblemParams::new(3, 1.2, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let f0 = initial_guess(&params, 32, InitStrategy::PerturbedConstant, &mut rng);
        let located = minimize_quotient(&f0, &params, &small_opts(32)).unwrap();
        assert!(located.converged);
        assert!(
            located.solution.amplitude() > 1e-3,
            "amplitude {}",
            located.solution.amplitude()
        );
        // A branch-informed Newton seed (the located solution, perturbed)
        // converges back to the nonconstant solution, not the constant.
        let mut seed = located.solution.clone();
        for c in seed.coeffs.iter_mut() {
            *c *= 1.02;
        }
        let result = newton_solve(&seed, &params, &small_opts(32)).unwrap();
        assert!(result.converged);
        assert_relative_eq!(
            result.solution.amplitude(),
            located.solution.amplitude(),
            max_relative = 1e-6
        );
        // The solution satisfies the flux identity.
        let rule = build_rule(3, 66).unwrap();
        let report = pohozaev_report(&result.solution, &params, &rule).unwrap();
        assert!(report.scaled.abs() <= 1e-8, "pohozaev {}", report.scaled);
    }

    #[test]
    fn newton_iterates_preserve_parity() {
        // Even initial data (odd coefficients zero) stays even.
        let params = ProblemParams::new(3, 0.5, 2.0).unwrap();
        let mut f0 = constant_trace(&params, 16);
        f0.coeffs[2] = 0.1;
        f0.coeffs[4] = -0.05;
        let result = newton_solve(&f0, &params, &small_opts(16)).unwrap();
        assert!(result.converged);
        for l in (1..=16).step_by(2) {
            assert!(
                result.solution.coeffs[l].abs() <= 1e-12,
                "odd mode {l} = {}",
                result.solution.coeffs[l]
            );
        }
    }

    #[test]
    fn newton_critical_pair_converges_on_family_members() {
        for &(n, s) in &[(3u32, 0.3), (4, 0.5)] {
            let fam = CriticalFamily::new(n, s).unwrap();
            let params = fam.params();
            let f0 = fam.trace(48);
            let result = newton_solve(&f0, &params, &small_opts(48)).unwrap();
            assert!(result.converged);
            assert!(result.iterations <= 2);
            // The solution stays on the family member with the same c_1.
            assert_relative_eq!(
                result.solution.coeffs[1],
                f0.coeffs[1],
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn minimize_quotient_recovers_constant_below_threshold() {
        let params = ProblemParams::new(3, 0.5, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f0 = random_positive_trace(3, 20, &mut rng).unwrap();
        let result = minimize_quotient(&f0, &params, &small_opts(20)).unwrap();
        assert!(result.converged);
        let u_c = crate::identities::constant_solution(&params);
        let grid: Vec<f64> = (0..=200).map(|i| -1.0 + i as f64 / 100.0).collect();
        for v in synthesize(&result.solution, &grid) {
            assert_abs_diff_eq!(v, u_c, epsilon = 1e-8);
        }
        // Multiplier of a constant-converged run is the constant's quotient
        // normalizer; after rescaling the solution solves the equation.
        assert!(result.multiplier > 0.0);
    }

    #[test]
    fn minimize_quotient_beats_constant_past_threshold() {
        let params = ProblemParams::new(3, 1.2, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f0 = random_positive_trace(3, 24, &mut rng).unwrap();
        let result = minimize_quotient(&f0, &params, &small_opts(24)).unwrap();
        assert!(result.converged);
        assert!(result.solution.amplitude() > 1e-3);
        let constant = constant_trace(&params, 24);
        let q_const = quotient(&constant, &params).unwrap();
        assert!(
            result.quotient_value < q_const - 1e-6,
            "quotient {} vs constant {}",
            result.quotient_value,
            q_const
        );
    }

    #[test]
    fn minimize_quotient_rejects_critical_exponent() {
        let params = ProblemParams::new(3, 0.5, 3.0).unwrap();
        let f0 = constant_trace(&params, 8);
        assert!(matches!(
            minimize_quotient(&f0, &params, &small_opts(8)),
            Err(Error::SupercriticalExponent { .. })
        ));
    }

    #[test]
    fn bifurcation_point_matches_closed_form() {
        for &(n, q) in &[(3u32, 1.5), (3, 2.0), (3, 2.5), (4, 1.5), (4, 2.0)] {
            let a_star = find_bifurcation(n, q, (0.2, 4.0)).unwrap();
            assert_abs_diff_eq!(a_star, 1.0 / (q - 1.0), epsilon = 1e-8);
        }
        assert!(matches!(
            find_bifurcation(3, 2.0, (1.5, 2.0)),
            Err(Error::NoSignChange { .. })
        ));
    }

    #[test]
    fn continuation_on_constant_branch_stays_constant() {
        let opts = SolverOptions {
            truncation: 16,
            ..SolverOptions::default()
        };
        let trace = continue_branch(3, 2.0, 0.2, 0.9, 7, &opts).unwrap();
        assert_eq!(trace.points.len(), 8);
        for pair in trace.points.windows(2) {
            assert!(pair[1].a > pair[0].a);
        }
        for p in &trace.points {
            assert!(p.amplitude <= 1e-10, "amplitude {} at a = {}", p.amplitude, p.a);
            assert!(p.residual_norm <= 1e-11);
        }
    }

    #[test]
    fn continuation_follows_bifurcating_branch() {
        let opts = SolverOptions {
            truncation: 32,
            max_iter: 100,
            ..SolverOptions::default()
        };
        let trace = continue_branch(3, 2.0, 1.02, 1.3, 14, &opts).unwrap();
        assert!(trace.points.len() >= 15);
        for pair in trace.points.windows(2) {
            assert!(pair[1].a > pair[0].a);
            assert!(
                pair[1].amplitude > pair[0].amplitude,
                "amplitudes not increasing: {} -> {}",
                pair[0].amplitude,
                pair[1].amplitude
            );
        }
        for p in &trace.points {
            assert!(p.amplitude > 1e-3);
            assert!(p.residual_norm <= 1e-11);
        }
    }

    #[test]
    fn solver_rejects_dimension_and_exponent_mismatches() {
        let params = ProblemParams::new(3, 0.5, 2.0).unwrap();
        let f4 = BoundaryFunction::constant(4, 1.0, 4).unwrap();
        assert!(matches!(
            newton_solve(&f4, &params, &SolverOptions::default()),
            Err(Error::DimensionMismatch(4, 3))
        ));
        let supercritical = ProblemParams::new(3, 0.5, 3.5).unwrap();
        let f3 = BoundaryFunction::constant(3, 1.0, 4).unwrap();
        assert!(matches!(
            newton_solve(&f3, &supercritical, &SolverOptions::default()),
            Err(Error::SupercriticalExponent { .. })
        ));
    }
}
