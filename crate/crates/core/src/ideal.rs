//! Post-measurement theory of the ideal gas.
//!
//! A number measurement in the source cell leaves the condensate in a Poisson
//! mixture of outcomes. Each outcome contributes a branch density matrix, and
//! their sum has the closed form
//!
//! `ρ(r, r′, t) = ψ(r)ψ*(r′) − G(r,t) ψ(s) ψ*(r′) − G*(r′,t) ψ(r) ψ*(s) + 2 n₀ G(r,t) G*(r′,t)`
//!
//! with `ψ = √M φ₀`. For a real, positive ground mode `ψ(r) = √n_B(r)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::greens::{GreensFunction, PhaseConvention};
use crate::model::{CondensateProfile, PhysicalParams};

/// `p_n = e^{−n₀} n₀ⁿ / n!`, evaluated in log space.
pub fn poisson_pmf(n: usize, n0: f64) -> Result<f64> {
    if !(n0 >= 0.0) || !n0.is_finite() {
        return Err(Error::param("n0", format!("mean must be finite and >= 0, got {n0}")));
    }
    if n0 == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    Ok((-n0 + n as f64 * n0.ln() - ln_factorial(n)).exp())
}

pub(crate) fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Highest outcome kept when truncating a Poisson(`n0`) sum; the neglected
/// tail mass is far below `1e-12`.
pub fn branch_cutoff(n0: f64) -> usize {
    (n0 + 10.0 * n0.sqrt() + 20.0).ceil() as usize
}

/// Poisson weights `p_0 … p_{n_max}` by log-space recurrence.
pub fn poisson_weights(n0: f64, n_max: usize) -> Result<Vec<f64>> {
    (0..=n_max).map(|n| poisson_pmf(n, n0)).collect()
}

/// Contribution of outcome `n` to `ρ(r, r′, t)`, given `G(r,t)` and `G(r′,t)`.
pub fn rho_n_from_greens(
    profile: &CondensateProfile,
    r: usize,
    rp: usize,
    g_r: Complex64,
    g_rp: Complex64,
    n: usize,
) -> Result<Complex64> {
    let n0 = profile.n0();
    let src = profile.amplitude(profile.measured_cell());
    let p_n = poisson_pmf(n, n0)?;
    let p_prev = if n == 0 { 0.0 } else { poisson_pmf(n - 1, n0)? };
    let left = profile.amplitude(r) - g_r * src;
    let right = (profile.amplitude(rp) - g_rp * src).conj();
    Ok(left * right * p_n + g_r * g_rp.conj() * (n0 * p_prev))
}

/// Branch-resolved density matrix element for outcome `n`.
pub fn rho_n_ideal(
    profile: &CondensateProfile,
    greens: &dyn GreensFunction,
    r: usize,
    rp: usize,
    t: f64,
    n: usize,
) -> Result<Complex64> {
    check_source(profile, greens)?;
    rho_n_from_greens(profile, r, rp, greens.value(r, t)?, greens.value(rp, t)?, n)
}

/// Summed density matrix element from precomputed propagator values.
pub fn rho_from_greens(profile: &CondensateProfile, r: usize, rp: usize, g_r: Complex64, g_rp: Complex64) -> Complex64 {
    let src = profile.amplitude(profile.measured_cell());
    let (a, b) = (profile.amplitude(r), profile.amplitude(rp));
    a * b.conj() - g_r * src * b.conj() - g_rp.conj() * a * src.conj() + g_r * g_rp.conj() * (2.0 * profile.n0())
}

/// Post-measurement one-particle density matrix element `ρ(r, r′, t)`.
pub fn rho_ideal(
    profile: &CondensateProfile,
    greens: &dyn GreensFunction,
    r: usize,
    rp: usize,
    t: f64,
) -> Result<Complex64> {
    check_source(profile, greens)?;
    Ok(rho_from_greens(profile, r, rp, greens.value(r, t)?, greens.value(rp, t)?))
}

/// `Σ_{n ≤ n_max} ρ_n`, the explicit branch sum.
pub fn rho_branch_sum(
    profile: &CondensateProfile,
    g_r: Complex64,
    g_rp: Complex64,
    r: usize,
    rp: usize,
    n_max: usize,
) -> Result<Complex64> {
    (0..=n_max).try_fold(Complex64::new(0.0, 0.0), |acc, n| {
        Ok(acc + rho_n_from_greens(profile, r, rp, g_r, g_rp, n)?)
    })
}

fn check_source(profile: &CondensateProfile, greens: &dyn GreensFunction) -> Result<()> {
    if greens.source() != profile.measured_cell() {
        return Err(Error::GridMismatch(format!(
            "propagator source {} differs from measured cell {}",
            greens.source(),
            profile.measured_cell()
        )));
    }
    if greens.grid().num_cells() != profile.densities().len() {
        return Err(Error::GridMismatch("propagator and profile live on different grids".into()));
    }
    Ok(())
}

/// Local density for the free gas in three dimensions.
///
/// `n_B + 2 n_B V0² a³ − 2 n_B V0 a^{3/2} cos(θ − 3π/4)` with `a = m/2πħt` and
/// `θ = m r²/2ħt`. The `−3π/4` is the phase of `(1/i)^{3/2}` in the free kernel;
/// with it this is exactly the diagonal of the closed-form sum for a uniform gas.
pub fn density_signal(params: &PhysicalParams, n_b: f64, r: f64, t: f64, convention: PhaseConvention) -> Result<f64> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::SingularTime {
            t,
            reason: "free-gas density signal diverges at t = 0",
        });
    }
    let a = params.mass / (2.0 * PI * params.hbar * t.abs());
    let theta = crate::greens::free_closed(params, 3, r, t, convention)?.arg();
    let v0 = params.cell_volume;
    Ok(n_b + 2.0 * n_b * v0 * v0 * a.powi(3) - 2.0 * n_b * v0 * a.powf(1.5) * theta.cos())
}

/// Shannon entropy of a weight list, with the normalization drift recorded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyReport {
    /// Entropy in nats.
    pub entropy: f64,
    /// `Σ p − 1` before renormalization.
    pub drift: f64,
}

/// `S = −Σ p ln p` in nats, with `0 ln 0 = 0`. Weights are renormalized first.
pub fn measurement_entropy(weights: &[f64]) -> Result<EntropyReport> {
    if let Some(w) = weights.iter().find(|w| !(**w >= 0.0)) {
        return Err(Error::param("weights", format!("negative or NaN weight {w}")));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::param("weights", "weights sum to zero"));
    }
    let entropy = weights
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| {
            let p = w / total;
            -p * p.ln()
        })
        .sum();
    Ok(EntropyReport {
        entropy,
        drift: total - 1.0,
    })
}

/// Entropy created by the measurement in the large-M theory.
pub fn poisson_entropy(n0: f64) -> Result<EntropyReport> {
    measurement_entropy(&poisson_weights(n0, branch_cutoff(n0))?)
}

/// Full `ρ(r, r′, t)` on the grid for a list of times.
#[derive(Debug, Clone)]
pub struct DensityMatrixField {
    pub times: Vec<f64>,
    pub matrices: Vec<DMatrix<Complex64>>,
    pub particles: usize,
    pub n0: f64,
    pub measured_cell: usize,
}

impl DensityMatrixField {
    pub fn num_cells(&self) -> usize {
        self.matrices.first().map_or(0, |m| m.nrows())
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.matrices
            .iter()
            .map(crate::linalg::hermiticity_error)
            .fold(0.0, f64::max)
    }

    /// Largest `|Σ_r ρ(r,r,t) − M| / M` over the time list.
    pub fn trace_error(&self) -> f64 {
        let m = self.particles as f64;
        self.matrices
            .iter()
            .map(|rho| (rho.trace().re - m).abs() / m)
            .fold(0.0, f64::max)
    }

    pub fn min_diagonal(&self) -> f64 {
        self.matrices
            .iter()
            .flat_map(|rho| rho.diagonal().iter().map(|z| z.re).collect::<Vec<_>>())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Evaluates the closed-form `ρ` on the whole grid.
pub fn ideal_field(profile: &CondensateProfile, greens: &dyn GreensFunction, times: &[f64]) -> Result<DensityMatrixField> {
    check_source(profile, greens)?;
    let nc = profile.densities().len();
    let matrices = times
        .iter()
        .map(|&t| {
            let g = greens.values(t)?;
            Ok(DMatrix::from_fn(nc, nc, |r, rp| rho_from_greens(profile, r, rp, g[r], g[rp])))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DensityMatrixField {
        times: times.to_vec(),
        matrices,
        particles: profile.particles(),
        n0: profile.n0(),
        measured_cell: profile.measured_cell(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greens::ModeSumGreens;
    use crate::model::{CellGrid, ModeBasis};

    fn uniform(n: usize, m: usize) -> (ModeBasis, CondensateProfile) {
        let g = CellGrid::periodic(1, n, 1.0).unwrap();
        let b = ModeBasis::plane_waves(&PhysicalParams::default(), &g).unwrap();
        let p = CondensateProfile::new(&b, m, 0).unwrap();
        (b, p)
    }

    #[test]
    fn poisson_values() {
        assert_eq!(poisson_pmf(0, 0.0).unwrap(), 1.0);
        assert_eq!(poisson_pmf(3, 0.0).unwrap(), 0.0);
        assert!((poisson_pmf(1, 1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        let s: f64 = (0..=200).map(|n| poisson_pmf(n, 5.0).unwrap()).sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert!(poisson_pmf(2, -1.0).is_err());
        // Far tail stays finite in log space.
        assert!(poisson_pmf(2000, 900.0).unwrap() > 0.0);
    }

    #[test]
    fn cutoff_tail_is_negligible() {
        for n0 in [0.5, 1.0, 10.0, 64.0] {
            let s: f64 = poisson_weights(n0, branch_cutoff(n0)).unwrap().iter().sum();
            assert!((1.0 - s).abs() < 1e-12, "n0={n0}");
        }
    }

    #[test]
    fn measured_cell_empty_branch_vanishes_at_t0() {
        let (b, p) = uniform(4, 8);
        let g = ModeSumGreens::new(&b, 0, 1.0).unwrap();
        assert!(rho_n_ideal(&p, &g, 0, 0, 0.0, 0).unwrap().norm() < 1e-14);
    }

    #[test]
    fn remote_branches_weight_unchanged_density() {
        let (b, p) = uniform(4, 8);
        let g = ModeSumGreens::new(&b, 0, 1.0).unwrap();
        for n in 0..6 {
            let want = poisson_pmf(n, 2.0).unwrap() * 2.0;
            assert!((rho_n_ideal(&p, &g, 1, 1, 0.0, n).unwrap() - want).norm() < 1e-13);
        }
        assert!((rho_ideal(&p, &g, 1, 1, 0.0).unwrap() - 2.0).norm() < 1e-13);
        assert!((rho_ideal(&p, &g, 0, 0, 0.0).unwrap() - p.n0()).norm() < 1e-13);
    }

    #[test]
    fn entropy_cases() {
        assert_eq!(measurement_entropy(&[1.0]).unwrap().entropy, 0.0);
        let e = measurement_entropy(&[0.5, 0.5]).unwrap();
        assert!((e.entropy - 2f64.ln()).abs() < 1e-15);
        assert!(measurement_entropy(&[0.5, -0.1]).is_err());
        let d = measurement_entropy(&[1.0, 1.0]).unwrap();
        assert!((d.entropy - 2f64.ln()).abs() < 1e-15);
        assert!((d.drift - 1.0).abs() < 1e-15);
        assert_eq!(measurement_entropy(&[0.0, 1.0]).unwrap().entropy, 0.0);
    }

    #[test]
    fn poisson_entropy_against_series() {
        // S = 1 + e^{-1} Σ_{n≥2} ln(n!)/n!, summed independently.
        let mut s = 1.0;
        let mut fact = 1.0f64;
        for n in 2..60 {
            fact *= n as f64;
            s += (-1.0f64).exp() * fact.ln() / fact;
        }
        let got = poisson_entropy(1.0).unwrap().entropy;
        assert!((got - s).abs() < 1e-12, "{got} vs {s}");
        assert!((got - 1.3049).abs() < 1e-3);
    }

    #[test]
    fn density_signal_decays() {
        let p = PhysicalParams::default();
        let late = density_signal(&p, 1.0, 3.0, 1e8, PhaseConvention::Standard).unwrap();
        assert!((late - 1.0).abs() < 1e-10);
        assert!(density_signal(&p, 1.0, 3.0, 0.0, PhaseConvention::Standard).is_err());
    }

    #[test]
    fn field_invariants_on_ring() {
        let (b, p) = uniform(6, 12);
        let g = ModeSumGreens::new(&b, 0, 1.0).unwrap();
        let f = ideal_field(&p, &g, &[0.0, 0.4, 2.2]).unwrap();
        assert!(f.hermiticity_error() < 1e-12);
        assert!(f.trace_error() < 1e-12);
        assert!(f.min_diagonal() > -1e-10);
    }

    #[test]
    fn mismatched_source_rejected() {
        let (b, p) = uniform(4, 8);
        let g = ModeSumGreens::new(&b, 1, 1.0).unwrap();
        assert!(matches!(rho_ideal(&p, &g, 0, 0, 0.1), Err(Error::GridMismatch(_))));
    }
}
