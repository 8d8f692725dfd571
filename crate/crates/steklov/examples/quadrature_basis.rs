//! Gauss quadrature and the Gegenbauer spectral basis.
//!
//! Builds the surface-measure quadrature rule for several dimensions, checks
//! polynomial exactness against closed-form moments, verifies basis
//! orthonormality, and round-trips a trace through nodal analysis and
//! coefficient synthesis.
//!
//! Run with `cargo run --example quadrature_basis`.

use steklov::{
    analyze, basis_eval_all, build_rule, jacobi_moment, synthesize, BoundaryFunction,
    SphereGeometry,
};

fn main() -> steklov::Result<()> {
    // Exactness: an m-node rule integrates t^k exactly through degree 2m - 1.
    // Rule weights carry the latitude-fiber area, so surface moments are the
    // axial weight moments times |S^{n-2}|.
    println!("polynomial exactness (m = 8 nodes, degree up to 15):");
    for n in [3u32, 4, 5, 7] {
        let geom = SphereGeometry::new(n)?;
        let rule = build_rule(n, 8)?;
        let mut worst = 0.0f64;
        for k in (0..=15u32).step_by(3) {
            let numeric = rule.integrate(|t| t.powi(k as i32));
            let exact = geom.area_sn2 * jacobi_moment(k, n)?;
            worst = worst.max((numeric - exact).abs() / exact.abs().max(1.0));
        }
        println!("  n = {n}: worst relative moment error = {worst:.3e}");
    }

    // Orthonormality of the first few basis functions under the rule.
    let n = 3;
    let geom = SphereGeometry::new(n)?;
    let rule = build_rule(n, 34)?;
    let lmax = 16;
    let mut worst = 0.0f64;
    for l in 0..=lmax {
        for k in 0..=lmax {
            let inner = rule.integrate(|t| {
                let e = basis_eval_all(&geom, lmax, t);
                e[l] * e[k]
            });
            let expected = if l == k { 1.0 } else { 0.0 };
            worst = worst.max((inner - expected).abs());
        }
    }
    println!("orthonormality: max |<e_l, e_k> - delta| = {worst:.3e} (l, k <= {lmax})");

    // Analysis/synthesis round trip of a concrete trace.
    let f = BoundaryFunction::new(n, vec![2.0, 0.5, 0.0, -0.25, 0.125])?;
    let nodes = rule.nodes.clone();
    let values = synthesize(&f, &nodes);
    let back = analyze(&values, &rule, f.truncation())?;
    let max_diff = f
        .coeffs
        .iter()
        .zip(&back.coeffs)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    println!("analysis o synthesis round trip: max coefficient error = {max_diff:.3e}");
    Ok(())
}
