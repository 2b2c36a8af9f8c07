use serde::Serialize;

use crate::bogoliubov::BogoliubovSpectrum;
use crate::cli::config::{RunConfig, SystemKind};
use crate::cli::run::{build_basis, potential, uniform_density, Engine};
use crate::error::Result;
use crate::front::{front_speed_estimate, DensityHistory, FrontFit};

#[derive(Debug, Clone, Serialize)]
pub struct FrontReport {
    pub kind: &'static str,
    pub threshold: f64,
    pub fit: FrontFit,
    /// `√(n_B v(0)/m)` for the interacting gas.
    pub sound_speed: Option<f64>,
}

/// Tracks `ρ(r, r, t)` at the configured positions and fits the arrival line.
pub fn front_speed(cfg: &RunConfig, threshold: f64) -> Result<FrontReport> {
    let basis = build_basis(cfg)?;
    let spectrum = match cfg.kind {
        SystemKind::Bogoliubov => Some(BogoliubovSpectrum::new(&cfg.params, &basis, &potential(cfg), uniform_density(cfg))?),
        _ => None,
    };
    let engine = Engine::new(cfg, &basis, spectrum.as_ref())?;
    let s = cfg.measured_cell;
    let cells: Vec<usize> = cfg.positions.iter().copied().filter(|&r| r != s).collect();
    let mut densities = vec![Vec::with_capacity(cfg.times.len()); cells.len()];
    for &t in &cfg.times {
        let snap = engine.snapshot(t)?;
        for (row, &r) in densities.iter_mut().zip(&cells) {
            row.push(engine.rho(&snap, r, r)?.re);
        }
    }
    let history = DensityHistory {
        times: cfg.times.clone(),
        distances: cells.iter().map(|&r| cfg.grid.distance(s, r)).collect(),
        densities,
        baseline: cells.iter().map(|&r| engine.baseline(r)).collect(),
    };
    Ok(FrontReport {
        kind: cfg.kind.name(),
        threshold,
        fit: front_speed_estimate(&history, threshold)?,
        sound_speed: spectrum.as_ref().map(|sp| sp.sound_speed()),
    })
}
