//! Exact few-cell dynamics against the large-M closed form.

use decowave::greens::ModeSumGreens;
use decowave::ideal::ideal_field;
use decowave::model::{CellGrid, CondensateProfile, ModeBasis, PhysicalParams};
use decowave::oracle::OracleSystem;

pub fn main() -> decowave::Result<()> {
    let params = PhysicalParams::default();
    let grid = CellGrid::periodic(1, 3, 1.0)?;
    let basis = ModeBasis::plane_waves(&params, &grid)?;
    let greens = ModeSumGreens::new(&basis, 0, params.hbar)?;
    let times = [0.0, 0.5, 1.0, 2.0, 4.0];

    for m in [6, 12, 24, 48] {
        let oracle = OracleSystem::new(&basis, &params, m, 0.0, 0)?;
        let exact = oracle.density_field(&times);
        let profile = CondensateProfile::new(&basis, m, 0)?;
        let closed = ideal_field(&profile, &greens, &times)?;
        let worst = exact
            .matrices
            .iter()
            .zip(&closed.matrices)
            .map(|(a, b)| (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        println!("M = {m:>2}: dim {:>5}, max |ρ_exact - ρ_closed| = {worst:.2e}", oracle.fock().dimension());
    }

    let interacting = OracleSystem::new(&basis, &params, 12, 0.5, 0)?;
    let field = interacting.density_field(&[1.0]);
    println!("u = 0.5, t = 1: diagonal {:?}", (0..3).map(|r| field.matrices[0][(r, r)].re).collect::<Vec<_>>());
    Ok(())
}
