//! Damped Newton solves of the nonlinear boundary equation.
//!
//! Solves at a subcritical parameter pair (where the constant is the unique
//! positive solution), then at the exact critical pair seeded with a member
//! of the closed-form solution family, where the Jacobian is singular along
//! the family direction and the solver switches to a bordered system.
//!
//! Run with `cargo run --example solve_newton`.

use steklov::ball::ProblemParams;
use steklov::basis::build_rule;
use steklov::identities::{constant_solution, pohozaev_report, CriticalFamily};
use steklov::solver::{initial_guess, newton_solve, InitStrategy, SolverOptions};

fn main() -> steklov::Result<()> {
    // Subcritical solve from a perturbed start.
    let params = ProblemParams::new(3, 0.5, 2.0)?;
    let opts = SolverOptions {
        truncation: 32,
        ..SolverOptions::default()
    };
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(7);
    let f0 = initial_guess(&params, opts.truncation, InitStrategy::PerturbedConstant, &mut rng);
    let res = newton_solve(&f0, &params, &opts)?;
    println!(
        "n=3 q=2 a=0.5: converged={} iterations={} residual={:.3e}",
        res.converged, res.iterations, res.residual_norm
    );
    println!(
        "  mean value {:.12} (constant solution a^(1/(q-1)) = {:.12})",
        res.solution.mean_value(),
        constant_solution(&params)
    );
    println!("  amplitude {:.3e} (zero: the constant is the only solution here)",
        res.solution.amplitude());
    let rule = build_rule(3, opts.nodes())?;
    let flux = pohozaev_report(&res.solution, &params, &rule)?;
    println!("  flux identity: raw {:+.3e}, scaled {:+.3e}", flux.raw, flux.scaled);

    // Critical pair: a = (n-2)/2, q = n/(n-2). The closed-form family member
    // at parameter s stays fixed under Newton even though the linearization
    // is singular along the family direction.
    let family = CriticalFamily::new(3, 0.3)?;
    let fparams = family.params();
    let fopts = SolverOptions {
        truncation: 48,
        ..SolverOptions::default()
    };
    let trace = family.trace(fopts.truncation);
    let fres = newton_solve(&trace, &fparams, &fopts)?;
    println!(
        "critical pair n=3 (a=0.5, q=3), family member s=0.3: converged={} iterations={} residual={:.3e}",
        fres.converged, fres.iterations, fres.residual_norm
    );
    let drift = trace
        .coeffs
        .iter()
        .zip(&fres.solution.coeffs)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    println!("  drift from the family member: {drift:.3e}");
    Ok(())
}
