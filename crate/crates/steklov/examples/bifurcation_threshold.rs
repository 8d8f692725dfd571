//! Numerical location of the symmetry-breaking threshold.
//!
//! Bisective search for the parameter a* where the first nonradial eigenvalue
//! of the linearization at the constant solution crosses zero, compared with
//! the closed form a* = 1/(q-1). The threshold does not depend on the
//! dimension, only on the exponent.
//!
//! Run with `cargo run --example bifurcation_threshold`.

use steklov::solver::find_bifurcation;

fn main() -> steklov::Result<()> {
    println!(
        "{:>3} {:>5} {:>18} {:>18} {:>10}",
        "n", "q", "a* (bisection)", "1/(q-1)", "deviation"
    );
    for n in [3u32, 4, 5] {
        for q in [1.5f64, 2.0, 2.5] {
            let a_star = find_bifurcation(n, q, (0.2, 4.0))?;
            let closed = 1.0 / (q - 1.0);
            println!(
                "{n:>3} {q:>5.2} {a_star:>18.12} {closed:>18.12} {:>10.2e}",
                (a_star - closed).abs()
            );
        }
    }

    // A bracket that misses the crossing is reported, not silently clamped.
    match find_bifurcation(3, 2.0, (1.5, 2.0)) {
        Err(e) => println!("bracket [1.5, 2.0] at q = 2: {e}"),
        Ok(v) => println!("unexpected crossing at {v}"),
    }
    Ok(())
}
