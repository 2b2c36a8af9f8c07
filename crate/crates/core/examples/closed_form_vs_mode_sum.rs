//! Free-space kernel against the exact ring propagator.

use decowave::greens::{free_closed, GreensFunction, ModeSumGreens, PhaseConvention};
use decowave::model::{CellGrid, ModeBasis, PhysicalParams};

pub fn main() -> decowave::Result<()> {
    let params = PhysicalParams::default();
    let grid = CellGrid::periodic(1, 512, 1.0)?;
    let basis = ModeBasis::plane_waves(&params, &grid)?;
    let greens = ModeSumGreens::new(&basis, 0, params.hbar)?;

    println!("{:>5} {:>4} {:>10} {:>10}", "t", "r", "standard", "extra 2π");
    for t in [50.0, 75.0, 100.0] {
        let values = greens.values(t)?;
        for r in [10usize, 30, 50] {
            let exact = values[r];
            let rel = |c: PhaseConvention| -> decowave::Result<f64> {
                Ok((free_closed(&params, 1, r as f64, t, c)? - exact).norm() / exact.norm())
            };
            println!(
                "{t:>5} {r:>4} {:>9.3}% {:>9.1}%",
                100.0 * rel(PhaseConvention::Standard)?,
                100.0 * rel(PhaseConvention::ExtraPi)?
            );
        }
    }
    Ok(())
}
