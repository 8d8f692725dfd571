//! Shared finite-difference and dense-quadrature oracles for unit tests.
//!
//! These deliberately avoid the production spectral machinery so that tests
//! compare two independent routes to the same number.

/// n-dimensional finite-difference Laplacian of an axisymmetric function
/// given in meridian coordinates `(r, t)`.
///
/// Axisymmetry makes one in-plane transverse direction, one out-of-plane
/// transverse direction (weight `n - 2`) and the axis direction sufficient.
pub(crate) fn fd_laplacian_axisymmetric<F: Fn(f64, f64) -> f64>(
    eval: &F,
    n: u32,
    r: f64,
    t: f64,
    h: f64,
) -> f64 {
    let x1 = r * (1.0 - t * t).max(0.0).sqrt();
    let xn = r * t;
    let point = |a: f64, b: f64, c: f64| -> f64 {
        let rr = (a * a + b * b + c * c).sqrt();
        let tt = if rr == 0.0 { 0.0 } else { (c / rr).clamp(-1.0, 1.0) };
        eval(rr, tt)
    };
    let center = point(x1, 0.0, xn);
    let dxx = point(x1 + h, 0.0, xn) - 2.0 * center + point(x1 - h, 0.0, xn);
    let dyy = point(x1, h, xn) - 2.0 * center + point(x1, -h, xn);
    let dzz = point(x1, 0.0, xn + h) - 2.0 * center + point(x1, 0.0, xn - h);
    (dxx + (n as f64 - 2.0) * dyy + dzz) / (h * h)
}

/// Same stencil, Richardson-extrapolated (`h` and `h/2`) to fourth order.
pub(crate) fn fd_laplacian_richardson<F: Fn(f64, f64) -> f64>(
    eval: &F,
    n: u32,
    r: f64,
    t: f64,
    h: f64,
) -> f64 {
    let coarse = fd_laplacian_axisymmetric(eval, n, r, t, h);
    let fine = fd_laplacian_axisymmetric(eval, n, r, t, h / 2.0);
    (4.0 * fine - coarse) / 3.0
}
