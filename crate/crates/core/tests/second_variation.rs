use approx::assert_relative_eq;
use unitfield::charts::ChartPoint;
use unitfield::stability::{
    hessian_closed_form, hessian_closed_form_exact, hessian_quadrature, jacobi_identity_rhs, jacobi_integrand,
    jacobi_smoothed_bump, SmoothedBump,
};

#[test]
fn smoothed_bump_approaches_closed_form() {
    let j = jacobi_smoothed_bump(1.0, 1.0, 0.01, 1e-7).unwrap();
    let h = hessian_closed_form(1.0, 1.0);
    assert!((j.extrapolated - h).abs() < 1e-3, "{j:?} vs {h}");
    // the raw smoothed values drift at first order in the width
    assert!((j.values[0] - h).abs() > 100.0 * (j.extrapolated - h).abs());
}

#[test]
fn smoothed_bump_away_from_unit_width_follows_exact_form() {
    let (r, d) = (0.3, 0.7);
    let j = jacobi_smoothed_bump(r, d, 0.01, 1e-7).unwrap();
    let exact = hessian_closed_form_exact(r, d);
    assert_relative_eq!(exact, hessian_quadrature(r, d, 1e-13).unwrap(), max_relative = 1e-12);
    assert!((j.extrapolated - exact).abs() < 1e-3 * exact.abs(), "{j:?} vs {exact}");
    assert!((j.extrapolated - hessian_closed_form(r, d)).abs() > 1.0);
}

#[test]
fn jacobi_integrand_matches_scalar_form_on_smooth_bump() {
    let b = SmoothedBump::new(0.8, 0.9, 0.2).unwrap();
    let f = |x: f64| b.value(x);
    for (rho, th, ph) in [(0.5, 0.1, 1.0), (0.95, 2.0, 0.4), (1.4, -1.0, 2.5)] {
        let p = ChartPoint::ball_polar(rho, th, ph).unwrap();
        let lhs = jacobi_integrand(&f, &p, 1e-3).unwrap();
        let rhs = jacobi_identity_rhs(&f, &p, 1e-3).unwrap();
        assert!((lhs - rhs).abs() < 1e-4 * (1.0 + rhs.abs()), "{lhs} vs {rhs} at ρ = {rho}");
    }
}
