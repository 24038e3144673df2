use bertrand_core::quantum_analytic::{radial_eigenfunction, radial_energy};
use bertrand_core::quantum_numeric::{
    build_radial_operator, convergence_exponent, default_grid, residual_check, RadialGrid,
};
use bertrand_core::ModelSpec;

fn residual_order(model: &ModelSpec, n_r: usize, l: usize) -> (Vec<f64>, f64) {
    let energy = radial_energy(model, n_r, l).unwrap();
    let base = default_grid(model, l, n_r + 1).unwrap();
    let mut h = Vec::new();
    let mut residuals = Vec::new();
    for npts in [500, 1000, 2000, 4000] {
        let grid = RadialGrid::new(model, base.r_min, base.r_max, npts).unwrap();
        let op = build_radial_operator(model, l, &grid).unwrap();
        let res = residual_check(&op, |r| radial_eigenfunction(model, n_r, l, r), energy).unwrap();
        h.push(grid.h);
        residuals.push(res);
    }
    let order = convergence_exponent(&h, &residuals);
    (residuals, order)
}

#[test]
fn flat_oscillator_residual_is_second_order() {
    let (res, order) = residual_order(&ModelSpec::darboux_iii(0.0, 3), 0, 0);
    assert!((order - 2.0).abs() <= 0.2, "order {order}, residuals {res:?}");
}

#[test]
fn deformed_oscillator_residual_is_second_order() {
    let (res, order) = residual_order(&ModelSpec::darboux_iii(0.05, 3), 1, 2);
    assert!((order - 2.0).abs() <= 0.2, "order {order}, residuals {res:?}");
}

#[test]
fn taub_nut_residual_is_second_order() {
    let (res, order) = residual_order(&ModelSpec::taub_nut(0.5, 3), 1, 1);
    assert!((order - 2.0).abs() <= 0.2, "order {order}, residuals {res:?}");
}
