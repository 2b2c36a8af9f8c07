use decowave::greens::{GreensFunction, ModeSumGreens};
use decowave::ideal::{
    branch_cutoff, ideal_field, measurement_entropy, poisson_entropy, poisson_pmf, poisson_weights, rho_branch_sum,
    rho_ideal, rho_n_ideal,
};
use decowave::model::{CellGrid, CondensateProfile, ModeBasis, PhysicalParams};

fn ring(n: usize) -> ModeBasis {
    ModeBasis::plane_waves(&PhysicalParams::default(), &CellGrid::periodic(1, n, 1.0).unwrap()).unwrap()
}

fn uniform(b: &ModeBasis, m: usize) -> (CondensateProfile, ModeSumGreens<'_>) {
    (CondensateProfile::new(b, m, 0).unwrap(), ModeSumGreens::new(b, 0, 1.0).unwrap())
}

#[test]
fn poisson_values() {
    let e = (-1.0f64).exp();
    assert!((poisson_pmf(0, 1.0).unwrap() - e).abs() < 1e-15);
    assert!((poisson_pmf(3, 1.0).unwrap() - e / 6.0).abs() < 1e-15);
    assert!((poisson_pmf(2, 4.0).unwrap() - 8.0 * (-4.0f64).exp()).abs() < 1e-15);
    assert_eq!(poisson_pmf(0, 0.0).unwrap(), 1.0);
    assert!(poisson_pmf(1, -1.0).is_err());
    let w = poisson_weights(30.0, branch_cutoff(30.0)).unwrap();
    assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn branches_sum_to_closed_form() {
    let b = ring(16);
    let (prof, g) = uniform(&b, 48);
    let cut = branch_cutoff(prof.n0());
    for t in [0.0, 0.4, 2.5] {
        for (r, rp) in [(0, 0), (3, 5), (8, 1)] {
            let total: num_complex::Complex64 =
                (0..=cut).map(|n| rho_n_ideal(&prof, &g, r, rp, t, n).unwrap()).sum();
            let closed = rho_ideal(&prof, &g, r, rp, t).unwrap();
            assert!((total - closed).norm() < 1e-12);
            let (gr, grp) = (g.value(r, t).unwrap(), g.value(rp, t).unwrap());
            assert!((rho_branch_sum(&prof, gr, grp, r, rp, cut).unwrap() - closed).norm() < 1e-12);
        }
    }
}

#[test]
fn measured_cell_empties_into_outcome_mean() {
    // At t = 0 the measured cell keeps n₀ particles and loses its coherence.
    let b = ring(8);
    let (prof, g) = uniform(&b, 24);
    let rho = |r, rp| rho_ideal(&prof, &g, r, rp, 0.0).unwrap();
    assert!((rho(0, 0).re - 3.0).abs() < 1e-12);
    assert!(rho(0, 4).norm() < 1e-12);
    assert!((rho(2, 5).re - 3.0).abs() < 1e-12);
}

#[test]
fn field_invariants_hold() {
    let b = ring(12);
    let (prof, g) = uniform(&b, 60);
    let f = ideal_field(&prof, &g, &[0.0, 0.3, 1.0, 7.5]).unwrap();
    assert_eq!(f.num_cells(), 12);
    assert!(f.trace_error() < 1e-10);
    assert!(f.hermiticity_error() < 1e-12);
    assert!(f.min_diagonal() >= 0.0);
}

#[test]
fn entropy_of_outcomes() {
    assert!((poisson_entropy(1.0).unwrap().entropy - 1.304_842_242_3).abs() < 1e-9);
    let coin = measurement_entropy(&[0.5, 0.5]).unwrap();
    assert!((coin.entropy - 2f64.ln()).abs() < 1e-15);
    assert_eq!(measurement_entropy(&[0.0, 2.0]).unwrap().entropy, 0.0);
    assert_eq!(measurement_entropy(&[0.0, 2.0]).unwrap().drift, 1.0);
    assert!(measurement_entropy(&[-0.1, 1.1]).is_err());
    // Large n₀ follows the Gaussian form ½ ln(2πe n₀).
    let big = poisson_entropy(400.0).unwrap().entropy;
    assert!((big - 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * 400.0).ln()).abs() < 1e-3);
}
