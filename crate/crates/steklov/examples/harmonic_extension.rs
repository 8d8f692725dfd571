//! Harmonic extension and the Dirichlet-to-Neumann map.
//!
//! Extends an axisymmetric trace into the ball, checks harmonicity with a
//! finite-difference Laplacian probe, applies the Dirichlet-to-Neumann map,
//! and compares the Dirichlet energy with its coefficient-space formula.
//!
//! Run with `cargo run --example harmonic_extension`.

use steklov::ball::{dirichlet_energy, dtn, extend, extend_gradient, BallPoint};
use steklov::BoundaryFunction;

fn main() -> steklov::Result<()> {
    let n = 3;
    let f = BoundaryFunction::new(n, vec![1.5, 0.4, 0.0, 0.1])?;

    // Interior values along a meridian ray: u(r, t0) for fixed direction.
    let t0 = 0.3;
    println!("extension along t = {t0}:");
    for r in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let p = BallPoint::new(r, t0)?;
        println!("  u({r:.2}) = {:+.12}", extend(&f, &p));
    }

    // The extension of degree-l basis traces scales as r^l, so the radial
    // derivative at the boundary multiplies coefficient l by l.
    let df = dtn(&f);
    println!("Dirichlet-to-Neumann coefficients (expect l * c_l):");
    for (l, (c, d)) in f.coeffs.iter().zip(&df.coeffs).enumerate() {
        println!("  l = {l}: c_l = {c:+.6} -> {d:+.6}");
    }

    // The same map through the gradient at the boundary.
    let p = BallPoint::new(1.0, t0)?;
    let grad = extend_gradient(&f, &p);
    let from_coeffs = df.eval(t0);
    println!(
        "normal derivative at t = {t0}: gradient route {:+.12}, coefficient route {:+.12}",
        grad.radial, from_coeffs
    );

    // Dirichlet energy: integral form equals sum_l l c_l^2.
    let energy = dirichlet_energy(&f);
    let coeff_sum: f64 = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(l, c)| l as f64 * c * c)
        .sum();
    println!("Dirichlet energy: {energy:.12} (coefficient formula {coeff_sum:.12})");
    Ok(())
}
