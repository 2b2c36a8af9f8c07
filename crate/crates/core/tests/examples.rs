#[path = "../examples/bogoliubov_front.rs"]
mod bogoliubov_front;
#[path = "../examples/closed_form_vs_mode_sum.rs"]
mod closed_form_vs_mode_sum;
#[path = "../examples/config_run.rs"]
mod config_run;
#[path = "../examples/harmonic_periodicity.rs"]
mod harmonic_periodicity;
#[path = "../examples/ideal_density_wave.rs"]
mod ideal_density_wave;
#[path = "../examples/measurement_entropy.rs"]
mod measurement_entropy;
#[path = "../examples/oracle_vs_analytic.rs"]
mod oracle_vs_analytic;

#[test]
fn examples_run() {
    bogoliubov_front::main().unwrap();
    closed_form_vs_mode_sum::main().unwrap();
    config_run::main().unwrap();
    harmonic_periodicity::main().unwrap();
    ideal_density_wave::main().unwrap();
    measurement_entropy::main().unwrap();
    oracle_vs_analytic::main().unwrap();
}
