//! One-particle mode bases on a cell grid.
//!
//! Every basis holds exactly `N_c` modes, so it is complete on the grid, and its
//! spectrum is shifted so the ground mode (index 0) has energy exactly zero.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{Boundary, CellGrid, PhysicalParams};

/// Grids narrower than this many oscillator lengths truncate the trap modes.
pub const MIN_TRAP_EXTENT_LENGTHS: f64 = 6.0;

/// Orthonormal one-particle modes `φ_μ(r)` with energies `E_μ`, sorted by energy.
#[derive(Debug, Clone)]
pub struct ModeBasis {
    grid: CellGrid,
    /// `amplitudes[(r, μ)] = φ_μ(r)`.
    amplitudes: DMatrix<Complex64>,
    energies: Vec<f64>,
    /// Wavevector of each mode for plane-wave bases.
    wavevectors: Option<Vec<[f64; 3]>>,
    warnings: Vec<String>,
}

impl ModeBasis {
    /// Periodic plane waves `e^{ik·x}/√N_c` with `E_k = ħ²k²/2m`.
    pub fn plane_waves(params: &PhysicalParams, grid: &CellGrid) -> Result<Self> {
        params.validate()?;
        if grid.boundary() != Boundary::Periodic {
            return Err(Error::param("boundary", "plane waves need a periodic grid"));
        }
        let nc = grid.num_cells();
        let n = grid.cells_per_side();
        let dk = 2.0 * PI / grid.extent();

        let mut modes: Vec<([f64; 3], f64)> = (0..nc)
            .map(|m| {
                let j = grid.multi_index(m);
                let mut k = [0.0; 3];
                for ax in 0..grid.dimension() {
                    let signed = if j[ax] > n / 2 { j[ax] as i64 - n as i64 } else { j[ax] as i64 };
                    k[ax] = signed as f64 * dk;
                }
                let k2: f64 = k.iter().map(|x| x * x).sum();
                (k, params.hbar * params.hbar * k2 / (2.0 * params.mass))
            })
            .collect();
        // k = 0 comes first in generation order, so a stable sort keeps it as the ground mode.
        modes.sort_by(|a, b| a.1.total_cmp(&b.1));

        let norm = 1.0 / (nc as f64).sqrt();
        let amplitudes = DMatrix::from_fn(nc, nc, |r, mu| {
            let x = grid.position(r);
            let k = modes[mu].0;
            let phase: f64 = (0..3).map(|a| k[a] * x[a]).sum();
            Complex64::from_polar(norm, phase)
        });
        Ok(ModeBasis {
            grid: grid.clone(),
            amplitudes,
            energies: modes.iter().map(|m| m.1).collect(),
            wavevectors: Some(modes.iter().map(|m| m.0).collect()),
            warnings: Vec::new(),
        })
    }

    /// Isotropic harmonic-oscillator eigenmodes on a centered grid.
    ///
    /// Hermite functions are sampled at the cell centers and orthonormalized in
    /// order of increasing quantum number, so the low-lying modes are the sampled
    /// continuum ones and the highest modes complete the grid space. Energies are
    /// exactly `ħΩ·(n_1 + … + n_d)`, which keeps the mode-sum propagator strictly
    /// `2π/Ω`-periodic.
    pub fn harmonic(params: &PhysicalParams, grid: &CellGrid) -> Result<Self> {
        params.validate()?;
        let omega = params.omega()?;
        if grid.boundary() != Boundary::Centered {
            return Err(Error::param("boundary", "a trapped gas needs a centered grid"));
        }
        let length = params.oscillator_length()?;
        let mut warnings = Vec::new();
        if grid.extent() < MIN_TRAP_EXTENT_LENGTHS * length {
            warnings.push(format!(
                "grid extent {:.4} is below {} oscillator lengths ({:.4}); trap modes are truncated",
                grid.extent(),
                MIN_TRAP_EXTENT_LENGTHS,
                MIN_TRAP_EXTENT_LENGTHS * length
            ));
        }
        if grid.spacing() > length {
            warnings.push(format!(
                "cell size {:.4} exceeds the oscillator length {:.4}; the ground mode is undersampled",
                grid.spacing(),
                length
            ));
        }

        let n = grid.cells_per_side();
        let a = grid.spacing();
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 - (n / 2) as f64) * a).collect();
        let sampled = DMatrix::from_fn(n, n, |i, q| hermite_function(q, xs[i] / length) * (a / length).sqrt());
        let qr = sampled.qr();
        let (mut q, r) = (qr.q(), qr.r());
        for col in 0..n {
            if r[(col, col)] < 0.0 {
                q.column_mut(col).neg_mut();
            }
        }

        let nc = grid.num_cells();
        let d = grid.dimension();
        let mut modes: Vec<([usize; 3], usize)> = (0..nc)
            .map(|m| {
                let qn = grid.multi_index(m);
                (qn, qn[..d].iter().sum())
            })
            .collect();
        modes.sort_by_key(|m| m.1);

        let amplitudes = DMatrix::from_fn(nc, nc, |cell, mu| {
            let idx = grid.multi_index(cell);
            let qn = modes[mu].0;
            let v: f64 = (0..d).map(|ax| q[(idx[ax], qn[ax])]).product();
            Complex64::new(v, 0.0)
        });
        let quantum = params.hbar * omega;
        Ok(ModeBasis {
            grid: grid.clone(),
            amplitudes,
            energies: modes.iter().map(|m| m.1 as f64 * quantum).collect(),
            wavevectors: None,
            warnings,
        })
    }

    /// Eigenmodes of an arbitrary Hermitian one-body matrix `h(r, r′)`.
    pub fn from_one_body_matrix(grid: &CellGrid, h: &DMatrix<Complex64>) -> Result<Self> {
        let nc = grid.num_cells();
        if h.nrows() != nc || h.ncols() != nc {
            return Err(Error::param("h", format!("expected {nc}x{nc}, got {}x{}", h.nrows(), h.ncols())));
        }
        let herr = linalg::hermiticity_error(h);
        if herr > 1e-12 {
            return Err(Error::param("h", format!("not Hermitian (max error {herr:e})")));
        }
        let eig = linalg::hermitian_eigen(h);
        let e0 = eig.values[0];
        let mut amplitudes = eig.vectors;
        // Fix the ground-mode phase so its largest component is real and positive.
        let (imax, _) = amplitudes
            .column(0)
            .iter()
            .enumerate()
            .fold((0, 0.0), |acc, (i, z)| if z.norm() > acc.1 { (i, z.norm()) } else { acc });
        let phase = amplitudes[(imax, 0)] / amplitudes[(imax, 0)].norm();
        amplitudes.column_mut(0).iter_mut().for_each(|z| *z /= phase);
        Ok(ModeBasis {
            grid: grid.clone(),
            amplitudes,
            energies: eig.values.iter().map(|e| e - e0).collect(),
            wavevectors: None,
            warnings: Vec::new(),
        })
    }

    pub fn grid(&self) -> &CellGrid {
        &self.grid
    }

    pub fn num_modes(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn amplitudes(&self) -> &DMatrix<Complex64> {
        &self.amplitudes
    }

    /// `φ_μ(r)`.
    pub fn amplitude(&self, mode: usize, cell: usize) -> Complex64 {
        self.amplitudes[(cell, mode)]
    }

    pub fn wavevectors(&self) -> Option<&[[f64; 3]]> {
        self.wavevectors.as_deref()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// `h(r, r′) = Σ_μ E_μ φ_μ(r) φ*_μ(r′)`.
    pub fn one_body_matrix(&self) -> DMatrix<Complex64> {
        let scaled = DMatrix::from_fn(self.amplitudes.nrows(), self.num_modes(), |r, mu| {
            self.amplitudes[(r, mu)] * self.energies[mu]
        });
        scaled * self.amplitudes.adjoint()
    }

    /// Max-norm deviation of `Σ_r φ*_μ(r) φ_ν(r)` from `δ_μν`.
    pub fn orthonormality_error(&self) -> f64 {
        linalg::orthonormality_error(&self.amplitudes)
    }

    /// Max-norm deviation of `Σ_μ φ_μ(r) φ*_μ(r′)` from `δ_rr′`.
    pub fn completeness_error(&self) -> f64 {
        linalg::max_deviation_from_identity(&(&self.amplitudes * self.amplitudes.adjoint()))
    }
}

/// Normalized Hermite function `ψ_n(ξ)` by the stable three-term recurrence.
pub fn hermite_function(n: usize, xi: f64) -> f64 {
    let mut prev = PI.powf(-0.25) * (-0.5 * xi * xi).exp();
    if n == 0 {
        return prev;
    }
    let mut cur = 2f64.sqrt() * xi * prev;
    for k in 2..=n {
        let kf = k as f64;
        let next = (2.0 / kf).sqrt() * xi * cur - ((kf - 1.0) / kf).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}
