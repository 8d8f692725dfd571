//! Closed-form solutions and integral identities for the boundary problem.
//!
//! * Constant solutions `u = a^{1/(q-1)}` for any admissible `(a, q)`.
//! * The explicit one-parameter family at the critical pair
//!   `a = (n-2)/2`, `q = n/(n-2)`:
//!
//!   ```text
//!   u_s(x) = kappa(n) [ (1 - s^2) / (1 + s^2 |x|^2 - 2 s x_n) ]^{(n-2)/2},
//!   kappa(n) = ((n - 2) / 2)^{(n-2)/2},   0 <= s < 1,
//!   ```
//!
//!   which interpolates from the constant (`s = 0`) toward a boundary bubble
//!   (`s -> 1`). Its trace has the closed-form Gegenbauer expansion
//!   `c_l = kappa (1 - s^2)^lambda s^l ||C_l^lambda||` via the generating
//!   function `(1 - 2st + s^2)^{-lambda} = sum_l C_l^lambda(t) s^l`.
//!
//! * The Pohozaev / Kazdan–Warner flux obstruction: every solution `u`
//!   satisfies, for the axial coordinate function `xi_n`,
//!
//!   ```text
//!   ∫_{S^{n-1}} [ ((n-2)/2 - a) (2/(n-2)) u + (n/(n-2) - q) u^q ]
//!                <grad u, grad xi_n> dsigma = 0,
//!   ```
//!
//!   which for axisymmetric traces reduces to a weighted line integral with
//!   weight `(1 - t^2)^{(n-1)/2}` (the surface weight times
//!   `|grad xi_n|^2 = 1 - t^2`).
//!
//! * The mean curvature of the conformal graph associated with a positive
//!   boundary trace, `H = ((n-2)/2 - a) f^{-2/(n-2)} + f^{q - n/(n-2)}`.
//!
//! * A randomized verifier for the sharp trace inequality gap.

use crate::ball::{nodal_values_checked, ProblemParams};
use crate::basis::{
    basis_norms, synthesize, synthesize_derivative, BoundaryFunction, QuadratureRule,
    SphereGeometry,
};
use crate::error::{Error, Result};
use rand::Rng;

/// Tiny floor in the Pohozaev scaling denominator, so exactly-critical
/// parameters (both coefficients zero) report a scaled residual of zero
/// instead of 0/0.
const POHOZAEV_SCALE_FLOOR: f64 = 1e-30;

/// The unique constant solving `a u = u^q`: `u = a^{1/(q-1)}`.
pub fn constant_solution(params: &ProblemParams) -> f64 {
    params.a.powf(1.0 / (params.q - 1.0))
}

/// The constant solution as a trace at truncation degree `l`.
pub fn constant_trace(params: &ProblemParams, l: usize) -> BoundaryFunction {
    BoundaryFunction::constant(params.n(), constant_solution(params), l)
        .expect("params carry a validated dimension")
}

/// Normalization constant `kappa(n) = ((n - 2) / 2)^{(n-2)/2}` of the
/// critical family — the constant solution at the critical parameters.
pub fn kappa(n: u32) -> f64 {
    let lambda = (n as f64 - 2.0) / 2.0;
    lambda.powf(lambda)
}

/// The explicit solution family at the critical parameters
/// `a = (n-2)/2`, `q = n/(n-2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalFamily {
    /// Geometry of the carrying sphere.
    pub geom: SphereGeometry,
    /// Family parameter `s in [0, 1)`; `s = 0` is the constant member.
    pub s: f64,
    /// Normalization `kappa(n)`.
    pub kappa: f64,
}

impl CriticalFamily {
    /// Build a family member; rejects `s` outside `[0, 1)`.
    pub fn new(n: u32, s: f64) -> Result<Self> {
        let geom = SphereGeometry::new(n)?;
        if !(0.0..1.0).contains(&s) {
            return Err(Error::InvalidFamilyParameter(s));
        }
        Ok(CriticalFamily {
            geom,
            s,
            kappa: kappa(n),
        })
    }

    /// The critical parameter pair `(a, q) = ((n-2)/2, n/(n-2))`.
    pub fn params(&self) -> ProblemParams {
        let n = self.geom.n;
        ProblemParams::new(n, (n as f64 - 2.0) / 2.0, self.geom.critical_exponent())
            .expect("critical parameters are always admissible")
    }

    /// Boundary trace value `f(t) = kappa (1-s^2)^lambda (1 + s^2 - 2st)^{-lambda}`.
    pub fn trace_value(&self, t: f64) -> f64 {
        let lambda = self.geom.lambda;
        let s = self.s;
        self.kappa * ((1.0 - s * s) / (1.0 + s * s - 2.0 * s * t)).powf(lambda)
    }

    /// Interior value `u(x) = kappa [(1-s^2)/(1 + s^2 r^2 - 2 s r t)]^lambda`
    /// at meridian coordinates `(r, t)` (the harmonic extension of the
    /// trace; the denominator is `s^2 |x - e_n/s|^2`).
    pub fn eval_meridian(&self, r: f64, t: f64) -> f64 {
        let lambda = self.geom.lambda;
        let s = self.s;
        self.kappa * ((1.0 - s * s) / (1.0 + s * s * r * r - 2.0 * s * r * t)).powf(lambda)
    }

    /// Interior value at a checked ball point.
    pub fn eval(&self, p: &crate::ball::BallPoint) -> f64 {
        self.eval_meridian(p.r, p.t)
    }

    /// Closed-form orthonormal trace coefficients up to degree `l`:
    /// `c_k = kappa (1-s^2)^lambda s^k ||C_k^lambda||`.
    pub fn trace(&self, l: usize) -> BoundaryFunction {
        let lambda = self.geom.lambda;
        let prefactor = self.kappa * (1.0 - self.s * self.s).powf(lambda);
        let norms = basis_norms(&self.geom, l);
        let mut sk = 1.0;
        let coeffs = norms
            .iter()
            .map(|norm| {
                let c = prefactor * sk * norm;
                sk *= self.s;
                c
            })
            .collect();
        BoundaryFunction {
            geom: self.geom,
            coeffs,
        }
    }

    /// Relative size of the first neglected coefficient, `~ s^{l+1}`,
    /// used to warn when a truncation cannot represent the member.
    pub fn truncation_tail(&self, l: usize) -> f64 {
        self.s.powi(l as i32 + 1)
    }
}

/// Coefficients of the Pohozaev / Kazdan–Warner integrand for given
/// parameters. Both vanish exactly at the critical pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PohozaevForm {
    /// Coefficient of the linear term: `((n-2)/2 - a) * 2/(n-2)`.
    pub coeff_linear: f64,
    /// Coefficient of the power term: `n/(n-2) - q`.
    pub coeff_power: f64,
    /// Exponent of the axial weight: `(n-1)/2`.
    pub weight_exponent: f64,
}

impl PohozaevForm {
    /// Build the form for the given parameters.
    pub fn new(params: &ProblemParams) -> Self {
        let n = params.n() as f64;
        PohozaevForm {
            coeff_linear: ((n - 2.0) / 2.0 - params.a) * 2.0 / (n - 2.0),
            coeff_power: n / (n - 2.0) - params.q,
            weight_exponent: (n - 1.0) / 2.0,
        }
    }
}

/// Raw and scaled Pohozaev residuals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PohozaevResidual {
    /// The flux integral itself.
    pub raw: f64,
    /// Raw value divided by
    /// `|coeff_linear| ||f||_2^2 + |coeff_power| ||f||_{q+1}^{q+1} + eps`.
    pub scaled: f64,
}

/// Pohozaev / Kazdan–Warner flux integral of a trace. Zero (to spectral
/// accuracy) on solutions of the boundary equation, `O(1)` on generic
/// non-solutions, and identically zero at the critical parameter pair.
///
/// `f'` comes from exact coefficient-space differentiation of the truncated
/// expansion — no finite differences are involved.
pub fn pohozaev_residual(
    f: &BoundaryFunction,
    params: &ProblemParams,
    rule: &QuadratureRule,
) -> Result<f64> {
    Ok(pohozaev_report(f, params, rule)?.raw)
}

/// [`pohozaev_residual`] together with its scale-normalized variant.
pub fn pohozaev_report(
    f: &BoundaryFunction,
    params: &ProblemParams,
    rule: &QuadratureRule,
) -> Result<PohozaevResidual> {
    if f.geom.n != params.n() {
        return Err(Error::DimensionMismatch(f.geom.n, params.n()));
    }
    let form = PohozaevForm::new(params);
    let q = params.q;
    let values = nodal_values_checked(f, rule, q)?;
    let derivs = synthesize_derivative(f, &rule.nodes);

    let mut raw = 0.0;
    let mut l2_sq = 0.0;
    let mut lq1_int = 0.0;
    for (((&t, &w), v), d) in rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .zip(&values)
        .zip(&derivs)
    {
        let vq = power(*v, q);
        raw += w * (form.coeff_linear * v + form.coeff_power * vq) * d * (1.0 - t * t);
        l2_sq += w * v * v;
        lq1_int += w * v.abs().powf(q + 1.0);
    }
    let scale = form.coeff_linear.abs() * l2_sq
        + form.coeff_power.abs() * lq1_int
        + POHOZAEV_SCALE_FLOOR;
    Ok(PohozaevResidual {
        raw,
        scaled: raw / scale,
    })
}

/// `v^q` for possibly non-integer `q` (positivity already checked upstream
/// for fractional exponents).
pub(crate) fn power(v: f64, q: f64) -> f64 {
    if q.fract() == 0.0 && q.abs() < 1e9 {
        v.powi(q as i32)
    } else {
        v.powf(q)
    }
}

/// Mean curvature of the conformal boundary graph of a positive trace:
/// `H(t) = ((n-2)/2 - a) f(t)^{-2/(n-2)} + f(t)^{q - n/(n-2)}`.
///
/// Constant exactly when `f` solves the boundary equation; identically `1`
/// at the critical parameters.
pub fn mean_curvature(f: &BoundaryFunction, params: &ProblemParams, t: f64) -> Result<f64> {
    if f.geom.n != params.n() {
        return Err(Error::DimensionMismatch(f.geom.n, params.n()));
    }
    let value = f.eval(t);
    if value <= 0.0 {
        return Err(Error::PointOutOfDomain(format!(
            "mean curvature needs a positive trace, got f({t}) = {value}"
        )));
    }
    let n = params.n() as f64;
    let a = params.a;
    let q = params.q;
    Ok(((n - 2.0) / 2.0 - a) * value.powf(-2.0 / (n - 2.0)) + value.powf(q - n / (n - 2.0)))
}

/// A random positive trace: seeded geometric-decay coefficients with the
/// constant mode lifted until the minimum over a dense grid has a safe
/// positive margin. Amplitudes span two decades to exercise homogeneity.
pub fn random_positive_trace<R: Rng>(n: u32, l: usize, rng: &mut R) -> Result<BoundaryFunction> {
    let scale = 10.0_f64.powf(rng.gen_range(-1.0..1.0));
    let mut coeffs: Vec<f64> = (0..=l)
        .map(|k| scale * rng.gen_range(-1.0..1.0) * 0.6_f64.powi(k as i32))
        .collect();
    coeffs[0] = 0.0;
    let mut f = BoundaryFunction::new(n, coeffs)?;
    let grid: Vec<f64> = (0..=800).map(|i| -1.0 + i as f64 / 400.0).collect();
    let values = synthesize(&f, &grid);
    let (min, max) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let lift = (-min).max(0.0) + 0.05 * (max - min) + 0.05 * scale;
    f.coeffs[0] = lift * f.geom.area_sn1.sqrt();
    Ok(f)
}

/// Report of a randomized trace-inequality verification run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BecknerReport {
    /// Number of random trials.
    pub trials: usize,
    /// Smallest gap seen (should be `>= -1e-10`: nonnegative up to rounding).
    pub min_gap: f64,
    /// Index of the trial achieving the minimum.
    pub min_gap_trial: usize,
    /// Largest gap seen.
    pub max_gap: f64,
}

/// Evaluate the trace-inequality gap on `trials` seeded random positive
/// traces (every fifth one a near-constant) and report the extremes.
///
/// All randomness flows from `seed` through `ChaCha8Rng`, so reports are
/// reproducible.
pub fn beckner_verify(params: &ProblemParams, trials: usize, seed: u64) -> Result<BecknerReport> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = params.n();
    let l = 16;
    let rule = crate::basis::build_rule(n, 2 * l + 2)?;
    let mut min_gap = f64::INFINITY;
    let mut max_gap = f64::NEG_INFINITY;
    let mut min_gap_trial = 0;
    for trial in 0..trials {
        let f = if trial % 5 == 4 {
            // Near-constant trial: the gap should approach zero quadratically.
            let eps = 10.0_f64.powf(-rng.gen_range(1.0..4.0));
            let base = rng.gen_range(0.5..2.0);
            let mut g = random_positive_trace(n, l, &mut rng)?;
            let norm = g.amplitude().max(1e-300);
            for (k, c) in g.coeffs.iter_mut().enumerate() {
                *c = if k == 0 {
                    base * g.geom.area_sn1.sqrt()
                } else {
                    base * eps * *c / norm
                };
            }
            g
        } else {
            random_positive_trace(n, l, &mut rng)?
        };
        let gap = crate::ball::beckner_gap_with_rule(&f, params.q, &rule)?;
        if gap < min_gap {
            min_gap = gap;
            min_gap_trial = trial;
        }
        max_gap = max_gap.max(gap);
    }
    Ok(BecknerReport {
        trials,
        min_gap,
        min_gap_trial,
        max_gap,
    })
}
