//! Entropy generated by counting the particles in one cell.

use decowave::ideal::poisson_entropy;
use decowave::model::{CellGrid, ModeBasis, PhysicalParams};
use decowave::oracle::{ground_state, measurement_branches, oracle_entropy, FockBasis};

pub fn main() -> decowave::Result<()> {
    for n0 in [0.5, 1.0, 4.0, 25.0] {
        let s = poisson_entropy(n0)?;
        println!("Poisson n0 = {n0:>4}: S = {:.6} nats", s.entropy);
    }

    let params = PhysicalParams::default();
    for cells in [2, 4, 8] {
        let basis = ModeBasis::plane_waves(&params, &CellGrid::periodic(1, cells, 1.0)?)?;
        let fock = FockBasis::with_cap(cells, cells, 200_000)?;
        let psi = ground_state(&fock, &basis)?;
        let branches = measurement_branches(&psi, &fock, 0)?;
        println!("exact, {cells} cells with n0 = 1: S = {:.6} nats", oracle_entropy(&branches)?);
    }
    Ok(())
}
