//! Parameter continuation along the bifurcating branch.
//!
//! Past the threshold a* = 1/(q-1) a branch of nonconstant positive solutions
//! emanates from the constant. This traces it for n = 3, q = 2 from a = 1.02
//! to a = 1.30 and prints the pitchfork scaling: near the threshold the
//! squared amplitude grows linearly in a - a*, with slope 10 pi for this
//! parameter pair.
//!
//! Run with `cargo run --example continuation_branch`.

use steklov::solver::{continue_branch, SolverOptions};

fn main() -> steklov::Result<()> {
    let (n, q) = (3u32, 2.0f64);
    let opts = SolverOptions {
        truncation: 32,
        ..SolverOptions::default()
    };
    let trace = continue_branch(n, q, 1.02, 1.30, 14, &opts)?;
    println!("branch for n = {n}, q = {q} (threshold a* = 1):");
    println!(
        "{:>8} {:>12} {:>14} {:>12} {:>14}",
        "a", "amplitude", "amp^2/(a-a*)", "min eig", "residual"
    );
    for p in &trace.points {
        let scaling = p.amplitude * p.amplitude / (p.a - 1.0);
        println!(
            "{:>8.4} {:>12.6} {:>14.6} {:>+12.4e} {:>14.4e}",
            p.a, p.amplitude, scaling, p.min_eigenvalue, p.residual_norm
        );
    }
    println!(
        "(the third column approaches 10 pi = {:.6} at the threshold: a",
        10.0 * std::f64::consts::PI
    );
    println!(" supercritical pitchfork with amplitude ~ sqrt(a - a*))");
    Ok(())
}
