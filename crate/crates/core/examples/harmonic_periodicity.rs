//! A trapped propagator returns to itself after one trap period.

use std::f64::consts::PI;

use decowave::greens::{harmonic_closed, GreensFunction, ModeSumGreens, PhaseConvention};
use decowave::model::{CellGrid, ModeBasis, PhysicalParams};

pub fn main() -> decowave::Result<()> {
    let params = PhysicalParams::new(1.0, 1.0, 0.25)?.with_trap(1.0)?;
    let grid = CellGrid::centered(1, 128, 0.25)?;
    let basis = ModeBasis::harmonic(&params, &grid)?;
    let source = grid.origin_cell();
    let greens = ModeSumGreens::new(&basis, source, params.hbar)?;
    let period = 2.0 * PI / params.omega().unwrap();

    for t in [0.3, 1.1, 2.0] {
        let a = greens.values(t)?;
        let b = greens.values(t + period)?;
        let drift = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        let cell = source + 8;
        let closed = harmonic_closed(&params, 1, grid.distance(source, cell), t, PhaseConvention::Standard)?;
        println!(
            "t = {t:.1}: max |G(t+T) - G(t)| = {drift:.2e}, G(r=2) mode sum {:.5} closed form {:.5}",
            a[cell],
            closed
        );
    }
    Ok(())
}
