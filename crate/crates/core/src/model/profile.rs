use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::ModeBasis;

/// Mean condensate occupation of every cell before the measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct CondensateProfile {
    particles: usize,
    /// Condensate amplitude `√M φ₀(r)`.
    amplitude: Vec<Complex64>,
    density: Vec<f64>,
    measured_cell: usize,
}

impl CondensateProfile {
    /// `n_B(r) = M |φ₀(r)|²`, with `n₀` read at `measured_cell`.
    pub fn new(basis: &ModeBasis, particles: usize, measured_cell: usize) -> Result<Self> {
        if particles < 1 {
            return Err(Error::param("M", "need at least one particle"));
        }
        basis.grid().check_cell(measured_cell)?;
        let scale = (particles as f64).sqrt();
        let amplitude: Vec<Complex64> = (0..basis.grid().num_cells())
            .map(|r| basis.amplitude(0, r) * scale)
            .collect();
        let density = amplitude.iter().map(|z| z.norm_sqr()).collect();
        Ok(CondensateProfile {
            particles,
            amplitude,
            density,
            measured_cell,
        })
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn measured_cell(&self) -> usize {
        self.measured_cell
    }

    /// `√M φ₀(r)`; its modulus is `√n_B(r)`.
    pub fn amplitude(&self, cell: usize) -> Complex64 {
        self.amplitude[cell]
    }

    /// `n_B(r)`.
    pub fn density(&self, cell: usize) -> f64 {
        self.density[cell]
    }

    pub fn densities(&self) -> &[f64] {
        &self.density
    }

    /// `n₀ = n_B(measured cell)`.
    pub fn n0(&self) -> f64 {
        self.density[self.measured_cell]
    }

    pub fn total(&self) -> f64 {
        self.density.iter().sum()
    }
}
