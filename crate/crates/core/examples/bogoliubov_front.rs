//! Decoherence front in a weakly interacting gas moving at the sound speed.

use decowave::bogoliubov::{BogoliubovDensity, BogoliubovGreens, BogoliubovSpectrum, InteractionPotential};
use decowave::front::{front_speed_estimate, DensityHistory};
use decowave::greens::GreensFunction;
use decowave::model::{CellGrid, ModeBasis, PhysicalParams};

pub fn main() -> decowave::Result<()> {
    let params = PhysicalParams::default();
    let grid = CellGrid::periodic(1, 256, 1.0)?;
    let basis = ModeBasis::plane_waves(&params, &grid)?;
    let spectrum = BogoliubovSpectrum::new(&params, &basis, &InteractionPotential::Constant(1.0), 1.0)?;
    let c = spectrum.sound_speed();
    let (a, b) = spectrum.ab_constants();
    println!("c = {c}, A = {a:.6}, B = {b:.6}");

    let greens = BogoliubovGreens::new(&spectrum, 0)?.long_wavelength(0.5 * c)?;
    let density = BogoliubovDensity::new(&spectrum, 1e-10)?;
    let cells: Vec<usize> = (20..=110).step_by(10).collect();
    let times: Vec<f64> = (0..=480).map(|k| 0.25 * k as f64).collect();
    let mut densities = vec![Vec::with_capacity(times.len()); cells.len()];
    for &t in &times {
        let g = greens.values(t)?;
        for (row, &r) in densities.iter_mut().zip(&cells) {
            row.push(density.rho_from_greens(g[r], g[r])?.re);
        }
    }
    let history = DensityHistory {
        times,
        distances: cells.iter().map(|&r| grid.distance(0, r)).collect(),
        densities,
        baseline: vec![density.remote_density(); cells.len()],
    };
    let fit = front_speed_estimate(&history, 0.1)?;
    for arrival in &fit.arrivals {
        println!("r = {:>5.1}  t* = {:>6.2}", arrival.distance, arrival.time);
    }
    println!("front speed {:.4} (residual {:.3})", fit.speed, fit.residual);
    Ok(())
}
