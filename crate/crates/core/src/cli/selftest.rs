use num_complex::Complex64;
use serde::Serialize;

use crate::bogoliubov::{BogoliubovDensity, BogoliubovGreens, BogoliubovSpectrum, InteractionPotential};
use crate::error::Result;
use crate::greens::{harmonic_closed, GreensFunction, ModeSumGreens, PhaseConvention};
use crate::ideal::{branch_cutoff, ideal_field, poisson_entropy, rho_branch_sum, rho_from_greens};
use crate::model::{CellGrid, CondensateProfile, ModeBasis, PhysicalParams};
use crate::oracle::{oracle_entropy, OracleSystem};
use crate::series::PowerSeries2;

#[derive(Debug, Clone, Serialize)]
pub struct SelftestLine {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn line(name: &'static str, value: f64, tolerance: f64) -> SelftestLine {
    SelftestLine {
        name,
        value,
        tolerance,
        passed: value <= tolerance,
    }
}

/// Quick invariant suite on small systems.
pub fn selftest() -> Result<Vec<SelftestLine>> {
    let p = PhysicalParams::default();
    let ring = CellGrid::periodic(1, 16, 1.0)?;
    let pw = ModeBasis::plane_waves(&p, &ring)?;
    let trap = p.with_trap(1.0)?;
    let hg = CellGrid::centered(1, 64, 0.25)?;
    let hb = ModeBasis::harmonic(&trap, &hg)?;
    let mut out = vec![
        line("plane-wave orthonormality", pw.orthonormality_error(), 1e-10),
        line("plane-wave completeness", pw.completeness_error(), 1e-10),
        line("harmonic completeness", hb.completeness_error(), 1e-10),
    ];

    let g = ModeSumGreens::new(&pw, 0, 1.0)?;
    let g0 = g.values(0.0)?;
    let delta = g0
        .iter()
        .enumerate()
        .map(|(r, z)| (z - if r == 0 { 1.0 } else { 0.0 }).norm())
        .fold(0.0, f64::max);
    out.push(line("greens initial delta", delta, 1e-10));
    let norm = |t: f64| -> Result<f64> { Ok(g.values(t)?.iter().map(|z| z.norm_sqr()).sum()) };
    out.push(line("greens unitarity", (norm(7.3)? - norm(0.0)?).abs(), 1e-10));

    let profile = CondensateProfile::new(&pw, 64, 0)?;
    let n_max = branch_cutoff(profile.n0());
    let mut branch = 0.0f64;
    for t in [0.0, 0.4, 2.5] {
        let gv = g.values(t)?;
        for r in 0..16 {
            for rp in [0, 5, r] {
                let sum = rho_branch_sum(&profile, gv[r], gv[rp], r, rp, n_max)?;
                branch = branch.max((sum - rho_from_greens(&profile, r, rp, gv[r], gv[rp])).norm());
            }
        }
    }
    out.push(line("branch sum identity", branch, 1e-10));
    out.push(line("ideal trace", ideal_field(&profile, &g, &[0.0, 1.0, 5.0])?.trace_error(), 1e-8));
    out.push(line("ideal entropy n0=1", (poisson_entropy(1.0)?.entropy - 1.3049).abs(), 1e-3));

    let free = BogoliubovSpectrum::new(&p, &pw, &InteractionPotential::none(), 4.0)?;
    let (a, b) = free.ab_constants();
    out.push(line("bogoliubov free constants", a.abs() + (b - 1.0).abs(), 0.0));
    let dens = BogoliubovDensity::new(&free, 1e-12)?;
    let bg = BogoliubovGreens::new(&free, 0)?;
    let mut limit = 0.0f64;
    for t in [0.0, 0.9, 3.0] {
        let gb = bg.values(t)?;
        let gi = g.values(t)?;
        for r in 0..16 {
            let rb = dens.rho_from_greens(gb[r], gb[0])?;
            limit = limit.max((rb - rho_from_greens(&profile, r, 0, gi[r], gi[0])).norm());
        }
    }
    out.push(line("bogoliubov free limit", limit, 1e-8));

    let three = ModeBasis::plane_waves(&p, &CellGrid::periodic(1, 3, 1.0)?)?;
    let sys = OracleSystem::new(&three, &p, 6, 0.0, 0)?;
    let field = sys.density_field(&[0.0, 1.0, 4.0]);
    out.push(line("oracle trace", field.trace_error(), 1e-10));
    out.push(line("oracle hermiticity", field.hermiticity_error(), 1e-12));
    let s0 = oracle_entropy(sys.ensemble())?;
    out.push(line("oracle entropy drift", (oracle_entropy(&sys.ensemble_at(4.0))? - s0).abs(), 1e-12));

    let c = |re: f64, im: f64| Complex64::new(re, im);
    let s = PowerSeries2::from_terms(12, &[(0, 0, c(0.3, 0.1)), (1, 0, c(-0.7, 0.0)), (1, 1, c(1.2, 0.0)), (0, 2, c(0.4, -0.2))]);
    let one = &s.exp() * &s.scale(c(-1.0, 0.0)).exp();
    out.push(line("series exp inverse", one.max_abs_diff(&PowerSeries2::constant(12, c(1.0, 0.0))), 1e-12));

    let period = 2.0 * std::f64::consts::PI;
    let per = (harmonic_closed(&trap, 3, 1.5, 0.7 + period, PhaseConvention::Standard)?
        - harmonic_closed(&trap, 3, 1.5, 0.7, PhaseConvention::Standard)?)
    .norm();
    out.push(line("harmonic periodicity", per, 1e-12));
    Ok(out)
}
