//! Density wave spreading out from a measured cell in an ideal gas on a ring.
//!
//! Prints `ρ(r, r, t)` for a few cells of the ring, then the local density
//! signal of the same gas in open three-dimensional space.

use decowave::greens::{ModeSumGreens, PhaseConvention};
use decowave::ideal::{density_signal, ideal_field};
use decowave::model::{CellGrid, CondensateProfile, ModeBasis, PhysicalParams};

pub fn main() -> decowave::Result<()> {
    let params = PhysicalParams::default();
    let grid = CellGrid::periodic(1, 128, 1.0)?;
    let basis = ModeBasis::plane_waves(&params, &grid)?;
    let profile = CondensateProfile::new(&basis, 1280, 0)?;
    let greens = ModeSumGreens::new(&basis, 0, params.hbar)?;

    let times = [0.5, 2.0, 5.0, 10.0, 20.0];
    let field = ideal_field(&profile, &greens, &times)?;
    println!("n_B = {:.4}, n0 = {:.4}", profile.density(5), profile.n0());
    println!("{:>6} {:>10} {:>10} {:>10} {:>10}", "t", "r=0", "r=1", "r=3", "r=6");
    for (k, &t) in times.iter().enumerate() {
        let row: Vec<String> = [0usize, 1, 3, 6].iter().map(|&r| format!("{:>10.5}", field.matrices[k][(r, r)].re)).collect();
        println!("{t:>6.1} {}", row.join(" "));
    }
    println!("trace error {:.1e}", field.trace_error());

    println!("open space, n_B = 10:");
    for t in [1.0, 5.0, 20.0] {
        let row: Vec<String> = [1.0, 3.0, 6.0]
            .iter()
            .map(|&r| density_signal(&params, 10.0, r, t, PhaseConvention::Standard).map(|n| format!("{n:>10.5}")))
            .collect::<decowave::Result<_>>()?;
        println!("{t:>6.1} {}", row.join(" "));
    }
    Ok(())
}
