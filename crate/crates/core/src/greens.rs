//! The one-body propagator `G(r, t)` that carries the decoherence wave.
//!
//! `G(r, t) = Σ_μ φ_μ(r) φ*_μ(s) e^{−iE_μ t/ħ}` for a source cell `s` (the measured
//! cell). The mode sum is exact on the grid; the closed forms are the continuum
//! free-particle and oscillator kernels and are checked against it.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CellGrid, ModeBasis, PhysicalParams};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Anything that can evaluate `G(r, t)` relative to a fixed source cell.
pub trait GreensFunction: Sync {
    /// Grid on which `cell` indices are interpreted.
    fn grid(&self) -> &CellGrid;

    /// Source (measured) cell.
    fn source(&self) -> usize;

    fn value(&self, cell: usize, t: f64) -> Result<Complex64>;

    /// `G(r, t)` for every cell of the grid.
    fn values(&self, t: f64) -> Result<Vec<Complex64>> {
        (0..self.grid().num_cells()).map(|r| self.value(r, t)).collect()
    }

    fn method(&self) -> GreensMethod;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GreensMethod {
    ModeSum,
    FreeClosed,
    HarmonicClosed,
    Bogoliubov,
}

/// A single evaluated propagator value with its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreensEvaluation {
    pub value: Complex64,
    pub cell: usize,
    pub t: f64,
    pub method: GreensMethod,
}

pub fn evaluate(g: &dyn GreensFunction, cell: usize, t: f64) -> Result<GreensEvaluation> {
    Ok(GreensEvaluation {
        value: g.value(cell, t)?,
        cell,
        t,
        method: g.method(),
    })
}

/// Exact mode sum over every basis mode.
#[derive(Debug, Clone)]
pub struct ModeSumGreens<'a> {
    basis: &'a ModeBasis,
    source: usize,
    hbar: f64,
}

impl<'a> ModeSumGreens<'a> {
    pub fn new(basis: &'a ModeBasis, source: usize, hbar: f64) -> Result<Self> {
        basis.grid().check_cell(source)?;
        if !(hbar > 0.0) {
            return Err(Error::param("hbar", "must be > 0"));
        }
        Ok(ModeSumGreens { basis, source, hbar })
    }

    fn weights(&self, t: f64) -> Vec<Complex64> {
        self.basis
            .energies()
            .iter()
            .enumerate()
            .map(|(mu, &e)| {
                self.basis.amplitude(mu, self.source).conj() * Complex64::from_polar(1.0, -e * t / self.hbar)
            })
            .collect()
    }

    /// `g(r, t) = G(r, t) − φ₀(r) φ*₀(s)`, the propagator without the condensate mode.
    pub fn without_condensate(&self, cell: usize, t: f64) -> Complex64 {
        let g = self.value_unchecked(cell, t);
        g - self.basis.amplitude(0, cell) * self.basis.amplitude(0, self.source).conj()
    }

    /// `Σ_μ |φ_μ(r)| |φ_μ(s)|`, an upper bound on `|G(r, t)|`.
    pub fn triangle_bound(&self, cell: usize) -> f64 {
        (0..self.basis.num_modes())
            .map(|mu| self.basis.amplitude(mu, cell).norm() * self.basis.amplitude(mu, self.source).norm())
            .sum()
    }

    fn value_unchecked(&self, cell: usize, t: f64) -> Complex64 {
        let w = self.weights(t);
        w.iter()
            .enumerate()
            .map(|(mu, wm)| self.basis.amplitude(mu, cell) * wm)
            .sum()
    }
}

impl GreensFunction for ModeSumGreens<'_> {
    fn grid(&self) -> &CellGrid {
        self.basis.grid()
    }

    fn source(&self) -> usize {
        self.source
    }

    fn value(&self, cell: usize, t: f64) -> Result<Complex64> {
        self.basis.grid().check_cell(cell)?;
        Ok(self.value_unchecked(cell, t))
    }

    fn values(&self, t: f64) -> Result<Vec<Complex64>> {
        let w = nalgebra::DVector::from_vec(self.weights(t));
        Ok((self.basis.amplitudes() * w).iter().copied().collect())
    }

    fn method(&self) -> GreensMethod {
        GreensMethod::ModeSum
    }
}

/// Which exponent the closed-form kernels carry.
///
/// The textbook kernels have `m r²/(2ħt)` and `mΩ r² cot(Ωt)/(2ħ)`. The variant
/// with an extra factor `π` in the denominator is kept for comparison only; it
/// does not agree with the mode sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseConvention {
    #[default]
    Standard,
    ExtraPi,
}

impl PhaseConvention {
    fn divisor(self) -> f64 {
        match self {
            PhaseConvention::Standard => 2.0,
            PhaseConvention::ExtraPi => 2.0 * PI,
        }
    }
}

/// Continuum free-particle kernel `V0 (m/2πiħt)^{d/2} exp(i m r²/2ħt)`.
pub fn free_closed(
    params: &PhysicalParams,
    dimension: usize,
    r: f64,
    t: f64,
    convention: PhaseConvention,
) -> Result<Complex64> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::SingularTime {
            t,
            reason: "free propagator prefactor diverges at t = 0",
        });
    }
    let base = Complex64::new(params.mass, 0.0) / (2.0 * PI * I * params.hbar * t);
    let prefactor = base.powf(dimension as f64 / 2.0) * params.cell_volume;
    let phase = params.mass * r * r / (convention.divisor() * params.hbar * t);
    Ok(prefactor * Complex64::from_polar(1.0, phase))
}

/// Conditions under which the continuum free kernel approximates the grid.
pub fn free_validity_warnings(params: &PhysicalParams, dimension: usize, r: f64, t: f64) -> Vec<String> {
    let a = params.cell_volume.powf(1.0 / dimension as f64);
    let t_cell = params.mass * a * a / params.hbar;
    let mut out = Vec::new();
    if r < 5.0 * a {
        out.push(format!("r = {r} is not large compared with the cell size {a}"));
    }
    if t < 5.0 * t_cell {
        out.push(format!("t = {t} is not large compared with m a²/ħ = {t_cell}"));
    }
    out
}

/// Continuum oscillator kernel in the convention where the ground energy is zero:
/// `V0 (mΩ/πħ)^{d/2} (1 − e^{−2iΩt})^{−d/2} exp(i mΩ r² cot(Ωt)/2ħ)`.
///
/// This equals `V0 (mΩ/2πiħ sin Ωt)^{d/2} exp(…)` times the zero-point phase
/// `e^{idΩt/2}`. Written this way the principal branch is continuous in `t`, and
/// the result is exactly `2π/Ω`-periodic like the mode sum with `E₀ = 0`.
pub fn harmonic_closed(
    params: &PhysicalParams,
    dimension: usize,
    r: f64,
    t: f64,
    convention: PhaseConvention,
) -> Result<Complex64> {
    let omega = params.omega()?;
    let (s, c) = (omega * t).sin_cos();
    if s.abs() < 1e-12 {
        return Err(Error::SingularTime {
            t,
            reason: "sin(Ωt) = 0, the oscillator kernel refocuses to a point",
        });
    }
    let denom = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -2.0 * omega * t);
    let dfac = dimension as f64 / 2.0;
    let prefactor = (params.mass * omega / (PI * params.hbar)).powf(dfac) * denom.powf(-dfac);
    let phase = params.mass * omega * r * r * (c / s) / (convention.divisor() * params.hbar);
    Ok(prefactor * params.cell_volume * Complex64::from_polar(1.0, phase))
}

/// Closed-form kernel evaluated on grid cells.
#[derive(Debug, Clone)]
pub struct ClosedFormGreens {
    params: PhysicalParams,
    grid: CellGrid,
    source: usize,
    kind: GreensMethod,
    convention: PhaseConvention,
}

impl ClosedFormGreens {
    pub fn free(params: PhysicalParams, grid: CellGrid, source: usize, convention: PhaseConvention) -> Result<Self> {
        grid.check_cell(source)?;
        Ok(ClosedFormGreens {
            params,
            grid,
            source,
            kind: GreensMethod::FreeClosed,
            convention,
        })
    }

    pub fn harmonic(params: PhysicalParams, grid: CellGrid, source: usize, convention: PhaseConvention) -> Result<Self> {
        params.omega()?;
        grid.check_cell(source)?;
        Ok(ClosedFormGreens {
            params,
            grid,
            source,
            kind: GreensMethod::HarmonicClosed,
            convention,
        })
    }
}

impl GreensFunction for ClosedFormGreens {
    fn grid(&self) -> &CellGrid {
        &self.grid
    }

    fn source(&self) -> usize {
        self.source
    }

    fn value(&self, cell: usize, t: f64) -> Result<Complex64> {
        self.grid.check_cell(cell)?;
        let r = self.grid.distance(self.source, cell);
        let d = self.grid.dimension();
        match self.kind {
            GreensMethod::HarmonicClosed => harmonic_closed(&self.params, d, r, t, self.convention),
            _ => free_closed(&self.params, d, r, t, self.convention),
        }
    }

    fn method(&self) -> GreensMethod {
        self.kind
    }
}
