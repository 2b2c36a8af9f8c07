use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical constants of a run. Defaults are natural units, `ħ = m = V0 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub mass: f64,
    pub hbar: f64,
    /// Isotropic trap frequency Ω, present only for harmonically trapped gases.
    pub trap_frequency: Option<f64>,
    /// Volume of a single cell, `V0`.
    pub cell_volume: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        PhysicalParams {
            mass: 1.0,
            hbar: 1.0,
            trap_frequency: None,
            cell_volume: 1.0,
        }
    }
}

impl PhysicalParams {
    pub fn new(mass: f64, hbar: f64, cell_volume: f64) -> Result<Self> {
        let p = PhysicalParams {
            mass,
            hbar,
            trap_frequency: None,
            cell_volume,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_trap(mut self, omega: f64) -> Result<Self> {
        self.trap_frequency = Some(omega);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        positive("mass", self.mass)?;
        positive("hbar", self.hbar)?;
        positive("cell_volume", self.cell_volume)?;
        if let Some(omega) = self.trap_frequency {
            positive("trap_frequency", omega)?;
        }
        Ok(())
    }

    pub fn omega(&self) -> Result<f64> {
        self.trap_frequency
            .ok_or_else(|| Error::param("trap_frequency", "a trapped gas needs Ω"))
    }

    /// Oscillator length `sqrt(ħ / mΩ)`.
    pub fn oscillator_length(&self) -> Result<f64> {
        Ok((self.hbar / (self.mass * self.omega()?)).sqrt())
    }
}

fn positive(name: &'static str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite and > 0, got {x}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_positive() {
        assert!(PhysicalParams::new(0.0, 1.0, 1.0).is_err());
        assert!(PhysicalParams::new(1.0, -1.0, 1.0).is_err());
        assert!(PhysicalParams::new(1.0, 1.0, f64::NAN).is_err());
        assert!(PhysicalParams::default().with_trap(0.0).is_err());
    }

    #[test]
    fn oscillator_length_needs_trap() {
        assert!(PhysicalParams::default().oscillator_length().is_err());
        let p = PhysicalParams::new(4.0, 1.0, 1.0).unwrap().with_trap(1.0).unwrap();
        assert!((p.oscillator_length().unwrap() - 0.5).abs() < 1e-15);
    }
}
