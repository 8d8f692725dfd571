//! The flux (Pohozaev / Kazdan–Warner type) identity as a solution detector.
//!
//! The axial flux integral vanishes to spectral accuracy on genuine solutions
//! of the boundary equation and is order one on generic positive traces, so
//! its scaled form separates solutions from non-solutions by many decades.
//! The check is exercised on a nonconstant solution — for constants the
//! integrand vanishes pointwise and proves nothing.
//!
//! Run with `cargo run --example flux_identity`.

use rand::SeedableRng;
use steklov::ball::ProblemParams;
use steklov::basis::build_rule;
use steklov::identities::{pohozaev_report, random_positive_trace};
use steklov::solver::{initial_guess, minimize_quotient, InitStrategy, SolverOptions};

fn main() -> steklov::Result<()> {
    // A nonconstant solution on the bifurcated branch (a > a* = 1).
    let params = ProblemParams::new(3, 1.2, 2.0)?;
    let opts = SolverOptions {
        truncation: 32,
        ..SolverOptions::default()
    };
    let rule = build_rule(3, opts.nodes())?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let f0 = initial_guess(&params, opts.truncation, InitStrategy::PerturbedConstant, &mut rng);
    let found = minimize_quotient(&f0, &params, &opts)?;
    println!(
        "branch solution at n=3 q=2 a=1.2: amplitude = {:.6}, residual = {:.3e}",
        found.solution.amplitude(),
        found.residual_norm
    );
    let on_solution = pohozaev_report(&found.solution, &params, &rule)?;
    println!(
        "flux on the solution: raw = {:+.3e}, scaled = {:+.3e}",
        on_solution.raw, on_solution.scaled
    );

    // Random positive traces: the identity detects that they solve nothing.
    let mut min_scaled = f64::INFINITY;
    for _ in 0..10 {
        let g = random_positive_trace(3, opts.truncation, &mut rng)?;
        let off = pohozaev_report(&g, &params, &rule)?;
        min_scaled = min_scaled.min(off.scaled.abs());
    }
    println!("10 random positive traces: min |scaled| = {min_scaled:.3e}");

    // Even a small perturbation of the solution is visible.
    let mut nudged = found.solution.clone();
    nudged.coeffs[1] += 0.01;
    let near = pohozaev_report(&nudged, &params, &rule)?;
    println!(
        "solution with coefficient 1 nudged by 0.01: scaled = {:+.3e}",
        near.scaled
    );
    Ok(())
}
