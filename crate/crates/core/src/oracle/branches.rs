use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ideal::{ln_factorial, measurement_entropy, DensityMatrixField};
use crate::model::{CellGrid, ModeBasis, PhysicalParams};
use crate::oracle::{build_hamiltonian, enumerate_fock_states, Evolver, FockBasis};

/// `(α₀†)^M |0⟩ / √M!` in the Fock basis, from the multinomial expansion of
/// `(Σ_r φ₀(r) a†_r)^M`.
pub fn ground_state(fock: &FockBasis, modes: &ModeBasis) -> Result<Vec<Complex64>> {
    if modes.grid().num_cells() != fock.num_cells() {
        return Err(Error::GridMismatch(format!(
            "mode basis has {} cells, Fock basis has {}",
            modes.grid().num_cells(),
            fock.num_cells()
        )));
    }
    let phi: Vec<Complex64> = (0..fock.num_cells()).map(|r| modes.amplitude(0, r)).collect();
    let ln_m = ln_factorial(fock.particles());
    let psi: Vec<Complex64> = fock
        .states()
        .par_iter()
        .map(|s| {
            let mut ln_mag = 0.5 * ln_m;
            let mut phase = 0.0;
            for (&n, z) in s.iter().zip(&phi) {
                if n == 0 {
                    continue;
                }
                if z.norm() == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                ln_mag += n as f64 * z.norm().ln() - 0.5 * ln_factorial(n as usize);
                phase += n as f64 * z.arg();
            }
            Complex64::from_polar(ln_mag.exp(), phase)
        })
        .collect();
    Ok(psi)
}

#[derive(Debug, Clone)]
pub struct Branch {
    /// Particle count found in the measured cell.
    pub outcome: usize,
    pub probability: f64,
    /// Normalized state.
    pub state: Vec<Complex64>,
}

/// Post-measurement mixture `Σ_n p_n |ψ_n(t)⟩⟨ψ_n(t)|`.
#[derive(Debug, Clone)]
pub struct BranchEnsemble {
    pub time: f64,
    pub measured_cell: usize,
    pub branches: Vec<Branch>,
}

impl BranchEnsemble {
    pub fn probabilities(&self) -> Vec<f64> {
        self.branches.iter().map(|b| b.probability).collect()
    }

    /// `p_n` indexed by outcome, zero for outcomes that did not occur.
    pub fn distribution(&self) -> Vec<f64> {
        let top = self.branches.iter().map(|b| b.outcome).max().unwrap_or(0);
        let mut p = vec![0.0; top + 1];
        for b in &self.branches {
            p[b.outcome] = b.probability;
        }
        p
    }

    /// `⟨n⟩` in the measured cell.
    pub fn mean_outcome(&self) -> f64 {
        self.branches.iter().map(|b| b.probability * b.outcome as f64).sum()
    }

    /// Largest `|⟨ψ_n|ψ_m⟩ − δ_nm|`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.branches.iter().enumerate() {
            for (j, b) in self.branches.iter().enumerate().skip(i) {
                let dot: Complex64 = a.state.iter().zip(&b.state).map(|(x, y)| x.conj() * y).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - want).norm());
            }
        }
        worst
    }
}

/// Splits `state` by the occupation of `cell`, dropping empty branches.
pub fn measurement_branches(state: &[Complex64], fock: &FockBasis, cell: usize) -> Result<BranchEnsemble> {
    if cell >= fock.num_cells() {
        return Err(Error::param("cell", format!("index {cell} out of range 0..{}", fock.num_cells())));
    }
    if state.len() != fock.dimension() {
        return Err(Error::param("state", "length differs from the Fock dimension"));
    }
    let mut parts: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); state.len()]; fock.particles() + 1];
    for (i, (s, &a)) in fock.states().iter().zip(state).enumerate() {
        parts[s[cell] as usize][i] = a;
    }
    let mut branches: Vec<Branch> = parts
        .into_iter()
        .enumerate()
        .filter_map(|(n, mut v)| {
            let p: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            if p == 0.0 {
                return None;
            }
            let scale = 1.0 / p.sqrt();
            v.iter_mut().for_each(|z| *z *= scale);
            Some(Branch {
                outcome: n,
                probability: p,
                state: v,
            })
        })
        .collect();
    let total: f64 = branches.iter().map(|b| b.probability).sum();
    for b in &mut branches {
        b.probability /= total;
    }
    Ok(BranchEnsemble {
        time: 0.0,
        measured_cell: cell,
        branches,
    })
}

/// Evolves every branch from the ensemble's time to `t`.
pub fn evolve_branches(ensemble: &BranchEnsemble, evolver: &Evolver, t: f64) -> BranchEnsemble {
    let dt = t - ensemble.time;
    let branches = ensemble
        .branches
        .par_iter()
        .map(|b| Branch {
            outcome: b.outcome,
            probability: b.probability,
            state: evolver.evolve(&b.state, dt),
        })
        .collect();
    BranchEnsemble {
        time: t,
        measured_cell: ensemble.measured_cell,
        branches,
    }
}

/// `ρ(r, r′) = ⟨ψ| a†_{r′} a_r |ψ⟩` for a pure state.
pub fn pure_state_dm(state: &[Complex64], fock: &FockBasis) -> DMatrix<Complex64> {
    let nc = fock.num_cells();
    let flat = fock
        .states()
        .par_iter()
        .enumerate()
        .fold(
            || vec![Complex64::new(0.0, 0.0); nc * nc],
            |mut acc, (i, s)| {
                let a = state[i];
                if a.norm_sqr() == 0.0 {
                    return acc;
                }
                let mut t = s.clone();
                for r in 0..nc {
                    if s[r] == 0 {
                        continue;
                    }
                    acc[r * nc + r] += a.norm_sqr() * s[r] as f64;
                    for rp in 0..nc {
                        if rp == r {
                            continue;
                        }
                        t[r] -= 1;
                        t[rp] += 1;
                        let j = fock.index_of(&t).expect("hop stays in the basis");
                        let amp = (s[r] as f64 * (s[rp] as f64 + 1.0)).sqrt();
                        acc[r * nc + rp] += state[j].conj() * a * amp;
                        t[r] += 1;
                        t[rp] -= 1;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![Complex64::new(0.0, 0.0); nc * nc],
            |mut x, y| {
                x.iter_mut().zip(y).for_each(|(a, b)| *a += b);
                x
            },
        );
    DMatrix::from_row_slice(nc, nc, &flat)
}

/// `ρ(r, r′, t) = Σ_n p_n ⟨ψ_n(t)| a†(r′) a(r) |ψ_n(t)⟩`.
pub fn one_particle_dm(ensemble: &BranchEnsemble, fock: &FockBasis) -> DensityMatrixField {
    let nc = fock.num_cells();
    let mut rho = DMatrix::<Complex64>::zeros(nc, nc);
    for b in &ensemble.branches {
        rho += pure_state_dm(&b.state, fock) * Complex64::new(b.probability, 0.0);
    }
    DensityMatrixField {
        times: vec![ensemble.time],
        matrices: vec![rho],
        particles: fock.particles(),
        n0: ensemble.mean_outcome(),
        measured_cell: ensemble.measured_cell,
    }
}

/// `−Σ p_n ln p_n` of the branch weights.
pub fn oracle_entropy(ensemble: &BranchEnsemble) -> Result<f64> {
    Ok(measurement_entropy(&ensemble.probabilities())?.entropy)
}

/// Exact many-body system prepared, measured at `t = 0`, and evolved.
#[derive(Debug, Clone)]
pub struct OracleSystem {
    fock: FockBasis,
    evolver: Evolver,
    initial: Vec<Complex64>,
    ensemble: BranchEnsemble,
    eigen_coeffs: Vec<Vec<Complex64>>,
}

impl OracleSystem {
    /// With `u = 0` the initial state is the product condensate; otherwise it is
    /// the lowest eigenvector of the interacting Hamiltonian.
    pub fn new(modes: &ModeBasis, params: &PhysicalParams, particles: usize, onsite_u: f64, measured_cell: usize) -> Result<Self> {
        let fock = enumerate_fock_states(modes.grid().num_cells(), particles)?;
        let h = build_hamiltonian(&fock, modes, onsite_u)?;
        let evolver = Evolver::new(&h, params.hbar)?;
        let initial = if onsite_u == 0.0 {
            ground_state(&fock, modes)?
        } else {
            evolver.lowest_state()
        };
        let ensemble = measurement_branches(&initial, &fock, measured_cell)?;
        let eigen_coeffs = ensemble.branches.par_iter().map(|b| evolver.to_eigenbasis(&b.state)).collect();
        Ok(OracleSystem {
            fock,
            evolver,
            initial,
            ensemble,
            eigen_coeffs,
        })
    }

    pub fn fock(&self) -> &FockBasis {
        &self.fock
    }

    pub fn evolver(&self) -> &Evolver {
        &self.evolver
    }

    pub fn initial_state(&self) -> &[Complex64] {
        &self.initial
    }

    /// Branches right after the measurement.
    pub fn ensemble(&self) -> &BranchEnsemble {
        &self.ensemble
    }

    pub fn ensemble_at(&self, t: f64) -> BranchEnsemble {
        let branches = self
            .ensemble
            .branches
            .iter()
            .zip(&self.eigen_coeffs)
            .map(|(b, c)| Branch {
                outcome: b.outcome,
                probability: b.probability,
                state: self.evolver.from_eigenbasis(c, t),
            })
            .collect();
        BranchEnsemble {
            time: t,
            measured_cell: self.ensemble.measured_cell,
            branches,
        }
    }

    pub fn pre_measurement_dm(&self) -> DMatrix<Complex64> {
        pure_state_dm(&self.initial, &self.fock)
    }

    pub fn density_field(&self, times: &[f64]) -> DensityMatrixField {
        let matrices = times
            .iter()
            .map(|&t| one_particle_dm(&self.ensemble_at(t), &self.fock).matrices.remove(0))
            .collect();
        DensityMatrixField {
            times: times.to_vec(),
            matrices,
            particles: self.fock.particles(),
            n0: self.ensemble.mean_outcome(),
            measured_cell: self.ensemble.measured_cell,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocalityObservable {
    /// `ρ(r, r)`.
    Diagonal(usize),
    /// `ρ(r, r′)` with both cells away from the measured one.
    OffDiagonal(usize, usize),
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalityReport {
    /// `(M, |ρ_post(r,r′,0) − ρ_pre(r,r′)|)`.
    pub points: Vec<(usize, f64)>,
    pub monotone: bool,
    /// Log-log slope of the deviation against `M`; `None` when a deviation is
    /// numerically zero, so no power law can be fitted.
    pub slope: Option<f64>,
}

/// Relative size below which a deviation counts as zero.
const ZERO_FLOOR: f64 = 1e-12;

/// Change of a remote density-matrix element caused by the measurement itself,
/// on a uniform ring with `V0 = m = ħ = 1`.
pub fn locality_check(num_cells: usize, particles: &[usize], measured_cell: usize, observable: LocalityObservable) -> Result<LocalityReport> {
    if particles.len() < 3 {
        return Err(Error::param("M", "need at least three particle numbers"));
    }
    if particles.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("M", "particle numbers must increase"));
    }
    let (r, rp) = match observable {
        LocalityObservable::Diagonal(r) => (r, r),
        LocalityObservable::OffDiagonal(r, rp) => (r, rp),
    };
    if r == measured_cell || rp == measured_cell {
        return Err(Error::param("r", "locality is checked away from the measured cell"));
    }
    let params = PhysicalParams::default();
    let grid = CellGrid::periodic(1, num_cells, params.cell_volume)?;
    grid.check_cell(r)?;
    grid.check_cell(rp)?;
    grid.check_cell(measured_cell)?;
    let modes = ModeBasis::plane_waves(&params, &grid)?;

    let mut points = Vec::new();
    let mut scale = 0.0f64;
    for &m in particles {
        let fock = enumerate_fock_states(num_cells, m)?;
        let psi = ground_state(&fock, &modes)?;
        let pre = pure_state_dm(&psi, &fock);
        let post = one_particle_dm(&measurement_branches(&psi, &fock, measured_cell)?, &fock);
        scale = scale.max(pre[(r, rp)].norm());
        points.push((m, (post.matrices[0][(r, rp)] - pre[(r, rp)]).norm()));
    }
    let monotone = points.windows(2).all(|w| w[1].1 < w[0].1);
    let slope = if points.iter().any(|&(_, d)| d <= ZERO_FLOOR * scale.max(1.0)) {
        None
    } else {
        let xs: Vec<f64> = points.iter().map(|&(m, _)| (m as f64).ln()).collect();
        let ys: Vec<f64> = points.iter().map(|&(_, d)| d.ln()).collect();
        Some(log_slope(&xs, &ys))
    };
    Ok(LocalityReport { points, monotone, slope })
}

/// Least-squares slope of `y` against `x`.
pub fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
