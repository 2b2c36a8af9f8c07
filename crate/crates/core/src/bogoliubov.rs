//! Weakly interacting uniform gas in the Bogoliubov approximation.
//!
//! Quasiparticles have `ω_k = √(E_k² + 2 E_k v(k) n_B)` and mixing angles
//! `tanh 2χ_k = −v(k) n_B / (E_k + v(k) n_B)`. Branch density matrices come from
//! the Taylor coefficients of
//!
//! `F(z, z′) = [1 + (z−1)G(r,t)] [1 + (z′−1)G*(r′,t)] exp[n_B X(z, z′)]`,
//! `X = B(zz′−1) + (1−B)(z+z′−2) + A[(z−1)² + (z′−1)²]`,
//!
//! with `ρ_n = n_B · [zⁿ z′ⁿ] F`.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::greens::{GreensFunction, GreensMethod};
use crate::model::{CellGrid, ModeBasis, PhysicalParams};
use crate::series::PowerSeries2;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Fourier transform `v(k)` of a repulsive pair interaction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InteractionPotential {
    /// Contact interaction, the same `v0` for every wavevector.
    Constant(f64),
    /// One value per mode, in the order of the plane-wave basis.
    Table(Vec<f64>),
}

impl InteractionPotential {
    pub fn none() -> Self {
        InteractionPotential::Constant(0.0)
    }
}

/// One quasiparticle mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuasiMode {
    pub k: [f64; 3],
    pub wave_index: [i64; 3],
    /// Free-particle energy `E_k`.
    pub energy: f64,
    pub interaction: f64,
    pub omega: f64,
    pub chi: f64,
    /// `(E_k + v(k) n_B) / ω_k`; unused for the condensate mode.
    pub coefficient: f64,
    /// The `k = 0` mode, which is left out of the transformation.
    pub condensate: bool,
}

#[derive(Debug, Clone)]
pub struct BogoliubovSpectrum {
    params: PhysicalParams,
    grid: CellGrid,
    n_b: f64,
    modes: Vec<QuasiMode>,
    lookup: HashMap<[i64; 3], usize>,
}

impl BogoliubovSpectrum {
    /// Builds the spectrum on the wavevectors of a plane-wave basis.
    pub fn new(params: &PhysicalParams, basis: &ModeBasis, potential: &InteractionPotential, n_b: f64) -> Result<Self> {
        let ks = basis
            .wavevectors()
            .ok_or_else(|| Error::param("basis", "the Bogoliubov spectrum needs a plane-wave basis"))?;
        if !(n_b >= 0.0 && n_b.is_finite()) {
            return Err(Error::param("n_B", format!("must be >= 0, got {n_b}")));
        }
        let grid = basis.grid().clone();
        let dk = 2.0 * std::f64::consts::PI / grid.extent();
        let wave_index = |k: &[f64; 3]| -> [i64; 3] {
            [(k[0] / dk).round() as i64, (k[1] / dk).round() as i64, (k[2] / dk).round() as i64]
        };
        let lookup: HashMap<[i64; 3], usize> = ks.iter().enumerate().map(|(i, k)| (wave_index(k), i)).collect();

        let values: Vec<f64> = match potential {
            InteractionPotential::Constant(v0) => vec![*v0; ks.len()],
            InteractionPotential::Table(t) => {
                if t.len() != ks.len() {
                    return Err(Error::param("v", format!("table has {} entries, grid has {}", t.len(), ks.len())));
                }
                t.clone()
            }
        };
        for (i, k) in ks.iter().enumerate() {
            let w = wave_index(k);
            let neg = [-w[0], -w[1], -w[2]];
            if let Some(&j) = lookup.get(&neg) {
                if (values[i] - values[j]).abs() > 1e-12 * values[i].abs().max(1.0) {
                    return Err(Error::param("v", "interaction must satisfy v(k) = v(-k)"));
                }
            }
            if !values[i].is_finite() {
                return Err(Error::param("v", "interaction values must be finite"));
            }
        }
        let v0 = values[lookup[&[0, 0, 0]]];
        if v0 < 0.0 {
            return Err(Error::param("v", format!("attractive v(0) = {v0} makes the condensate unstable")));
        }

        let modes = ks
            .iter()
            .zip(basis.energies())
            .zip(&values)
            .map(|((k, &e), &v)| {
                let w = wave_index(k);
                if w == [0, 0, 0] {
                    return QuasiMode {
                        k: *k,
                        wave_index: w,
                        energy: e,
                        interaction: v,
                        omega: 0.0,
                        chi: 0.0,
                        coefficient: 1.0,
                        condensate: true,
                    };
                }
                let vn = v * n_b;
                let omega = (e * e + 2.0 * e * vn).max(0.0).sqrt();
                QuasiMode {
                    k: *k,
                    wave_index: w,
                    energy: e,
                    interaction: v,
                    omega,
                    chi: 0.5 * (-vn / (e + vn)).atanh(),
                    coefficient: (e + vn) / omega,
                    condensate: false,
                }
            })
            .collect();
        Ok(BogoliubovSpectrum {
            params: *params,
            grid,
            n_b,
            modes,
            lookup,
        })
    }

    pub fn modes(&self) -> &[QuasiMode] {
        &self.modes
    }

    pub fn grid(&self) -> &CellGrid {
        &self.grid
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn n_b(&self) -> f64 {
        self.n_b
    }

    pub fn v0(&self) -> f64 {
        self.modes[self.lookup[&[0, 0, 0]]].interaction
    }

    /// Sound velocity `c = √(n_B v(0) / m)`.
    pub fn sound_speed(&self) -> f64 {
        (self.n_b * self.v0() / self.params.mass).sqrt()
    }

    /// `(A, B)` summed over the whole grid.
    ///
    /// `A = (V0/2V) Σ_k (−sinh 2χ_k)` and `B = (V0/2V) Σ_k (1 + cosh 2χ_k)`, which are
    /// the printed `v n_B/ω_k` and `1 + (E_k + v n_B)/ω_k` for `k ≠ 0`. The condensate
    /// mode has `χ₀ = 0` and contributes `0` and `2`, so `v ≡ 0` gives `(0, 1)` exactly.
    pub fn ab_constants(&self) -> (f64, f64) {
        let mut a = 0.0;
        let mut b = 0.0;
        for m in &self.modes {
            if m.condensate {
                b += 2.0;
            } else {
                a += m.interaction * self.n_b / m.omega;
                b += 1.0 + m.coefficient;
            }
        }
        let norm = 2.0 * self.modes.len() as f64;
        (a / norm, b / norm)
    }

    /// `dω/dk / ħ` along the first axis at integer wavenumber `j`.
    pub fn group_velocity(&self, j: i64) -> Result<GroupVelocity> {
        let at = |jj: i64| self.lookup.get(&[jj, 0, 0]).map(|&i| self.modes[i].omega);
        let here = at(j).ok_or_else(|| Error::param("k", format!("wavenumber {j} is outside the grid")))?;
        let dk = 2.0 * std::f64::consts::PI / self.grid.extent();
        let hbar = self.params.hbar;
        Ok(match (at(j - 1), at(j + 1)) {
            (Some(lo), Some(hi)) => GroupVelocity {
                k: j as f64 * dk,
                value: (hi - lo) / (2.0 * dk * hbar),
                one_sided: false,
            },
            (None, Some(hi)) => GroupVelocity {
                k: j as f64 * dk,
                value: (hi - here) / (dk * hbar),
                one_sided: true,
            },
            (Some(lo), None) => GroupVelocity {
                k: j as f64 * dk,
                value: (here - lo) / (dk * hbar),
                one_sided: true,
            },
            (None, None) => return Err(Error::param("k", "grid has a single mode along the first axis")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupVelocity {
    pub k: f64,
    pub value: f64,
    /// Set at the zone edge, where only a one-sided difference is available.
    pub one_sided: bool,
}

/// Quasiparticle propagator
/// `G(r,t) = (V0/V) Σ_k e^{ik·(r−s)} [cos(ω_k t/ħ) − i (E_k + v n_B)/ω_k · sin(ω_k t/ħ)]`.
///
/// The `k = 0` term takes its `ω → 0` limit `1 − i v(0) n_B t/ħ`. An optional
/// Gaussian weight `exp(−k²/k_c²)` keeps only long-wavelength quasiparticles.
#[derive(Debug, Clone)]
pub struct BogoliubovGreens<'a> {
    spectrum: &'a BogoliubovSpectrum,
    source: usize,
    k_cut: Option<f64>,
}

impl<'a> BogoliubovGreens<'a> {
    pub fn new(spectrum: &'a BogoliubovSpectrum, source: usize) -> Result<Self> {
        spectrum.grid.check_cell(source)?;
        Ok(BogoliubovGreens {
            spectrum,
            source,
            k_cut: None,
        })
    }

    /// Restricts the sum to long wavelengths with a Gaussian cut at `k_cut`.
    pub fn long_wavelength(mut self, k_cut: f64) -> Result<Self> {
        if !(k_cut > 0.0) {
            return Err(Error::param("k_cut", "must be > 0"));
        }
        self.k_cut = Some(k_cut);
        Ok(self)
    }

    fn mode_factors(&self, t: f64) -> Vec<Complex64> {
        let hbar = self.spectrum.params.hbar;
        let nc = self.spectrum.modes.len() as f64;
        self.spectrum
            .modes
            .iter()
            .map(|m| {
                let c = if m.condensate {
                    Complex64::new(1.0, 0.0) - I * (m.interaction * self.spectrum.n_b * t / hbar)
                } else {
                    let (s, c) = (m.omega * t / hbar).sin_cos();
                    Complex64::new(c, -m.coefficient * s)
                };
                let weight = match self.k_cut {
                    Some(kc) => (-(m.k.iter().map(|x| x * x).sum::<f64>()) / (kc * kc)).exp(),
                    None => 1.0,
                };
                c * weight / nc
            })
            .collect()
    }

    fn sum_at(&self, factors: &[Complex64], cell: usize) -> Complex64 {
        let x = self.spectrum.grid.position(cell);
        let s = self.spectrum.grid.position(self.source);
        self.spectrum
            .modes
            .iter()
            .zip(factors)
            .map(|(m, f)| {
                let phase: f64 = (0..3).map(|a| m.k[a] * (x[a] - s[a])).sum();
                f * Complex64::from_polar(1.0, phase)
            })
            .sum()
    }
}

impl GreensFunction for BogoliubovGreens<'_> {
    fn grid(&self) -> &CellGrid {
        &self.spectrum.grid
    }

    fn source(&self) -> usize {
        self.source
    }

    fn value(&self, cell: usize, t: f64) -> Result<Complex64> {
        self.spectrum.grid.check_cell(cell)?;
        Ok(self.sum_at(&self.mode_factors(t), cell))
    }

    fn values(&self, t: f64) -> Result<Vec<Complex64>> {
        let f = self.mode_factors(t);
        Ok((0..self.spectrum.grid.num_cells()).map(|r| self.sum_at(&f, r)).collect())
    }

    fn method(&self) -> GreensMethod {
        GreensMethod::Bogoliubov
    }
}

/// `A`, `B`, the two propagator values and `n_B` for one `(r, r′, t)` point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneratingParams {
    pub a: f64,
    pub b: f64,
    /// `G(r, t)`.
    pub g: Complex64,
    /// `G*(r′, t)`.
    pub g_conj_prime: Complex64,
    pub n_b: f64,
}

/// Default series order, `⌈n_B + 10√(n_B+1) + 20⌉`.
pub fn default_order(n_b: f64) -> usize {
    (n_b + 10.0 * (n_b + 1.0).sqrt() + 20.0).ceil() as usize
}

/// The `exp[n_B X(z, z′)]` factor, expanded once for given `(A, B, n_B)`.
#[derive(Debug, Clone)]
pub struct GeneratingFunction {
    a: f64,
    b: f64,
    n_b: f64,
    exp_series: PowerSeries2,
}

impl GeneratingFunction {
    pub fn new(a: f64, b: f64, n_b: f64, order: usize) -> Self {
        let x = |c: f64| Complex64::new(n_b * c, 0.0);
        let s = PowerSeries2::from_terms(
            order,
            &[
                (0, 0, x(b - 2.0 + 2.0 * a)),
                (1, 0, x(1.0 - b - 2.0 * a)),
                (0, 1, x(1.0 - b - 2.0 * a)),
                (1, 1, x(b)),
                (2, 0, x(a)),
                (0, 2, x(a)),
            ],
        );
        GeneratingFunction {
            a,
            b,
            n_b,
            exp_series: s.exp(),
        }
    }

    pub fn order(&self) -> usize {
        self.exp_series.order()
    }

    pub fn exp_series(&self) -> &PowerSeries2 {
        &self.exp_series
    }

    fn check(&self, p: &GeneratingParams) -> Result<()> {
        if p.a != self.a || p.b != self.b || p.n_b != self.n_b {
            return Err(Error::param("params", "generating parameters differ from the expanded series"));
        }
        Ok(())
    }

    /// Full product series `[1+(z−1)G][1+(z′−1)G*′] exp[n_B X]`.
    pub fn product(&self, g: Complex64, g_conj_prime: Complex64) -> PowerSeries2 {
        let one = Complex64::new(1.0, 0.0);
        let bracket = PowerSeries2::from_terms(
            self.order(),
            &[
                (0, 0, (one - g) * (one - g_conj_prime)),
                (1, 0, g * (one - g_conj_prime)),
                (0, 1, (one - g) * g_conj_prime),
                (1, 1, g * g_conj_prime),
            ],
        );
        &bracket * &self.exp_series
    }

    /// `ρ_n = n_B [zⁿ z′ⁿ] F`.
    pub fn rho_n(&self, p: &GeneratingParams, n: usize) -> Result<Complex64> {
        self.check(p)?;
        if n > self.order() {
            return Err(Error::Truncation { n, n_max: self.order() });
        }
        Ok(self.diagonal_coeff(p.g, p.g_conj_prime, n) * self.n_b)
    }

    /// Coefficient of `zⁿ z′ⁿ` in the product, from four coefficients of the exponential.
    fn diagonal_coeff(&self, g: Complex64, gc: Complex64, n: usize) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        let e = &self.exp_series;
        let mut c = (one - g) * (one - gc) * e.coeff(n, n);
        if n >= 1 {
            c += g * (one - gc) * e.coeff(n - 1, n) + (one - g) * gc * e.coeff(n, n - 1) + g * gc * e.coeff(n - 1, n - 1);
        }
        c
    }

    /// `Σ_n ρ_n` up to the series order, with a tail estimate from the last two terms.
    pub fn branch_sum(&self, g: Complex64, g_conj_prime: Complex64) -> (Complex64, f64) {
        let order = self.order();
        let mut sum = Complex64::new(0.0, 0.0);
        let mut last = [0.0f64; 2];
        for n in 0..=order {
            let term = self.diagonal_coeff(g, g_conj_prime, n) * self.n_b;
            sum += term;
            last = [last[1], term.norm()];
        }
        (sum, last[0] + last[1])
    }

    /// `Σ_n [zⁿz′ⁿ] exp(n_B X)`: the density far from the measured cell, in units of `n_B`.
    pub fn remote_normalization(&self) -> f64 {
        (0..=self.order()).map(|n| self.exp_series.coeff(n, n).re).sum()
    }

    /// Normalized weights `[zⁿz′ⁿ] exp(n_B X)`, the outcome distribution this
    /// expansion implies for the measured cell. Equal to Poisson(n_B) when `v ≡ 0`.
    pub fn outcome_weights(&self) -> Vec<f64> {
        let w: Vec<f64> = (0..=self.order()).map(|n| self.exp_series.coeff(n, n).re).collect();
        let s: f64 = w.iter().sum();
        w.into_iter().map(|x| x / s).collect()
    }
}

/// Summed density matrix of the interacting gas with adaptive truncation.
#[derive(Debug, Clone)]
pub struct BogoliubovDensity<'a> {
    spectrum: &'a BogoliubovSpectrum,
    generating: GeneratingFunction,
    tol: f64,
}

/// Largest series order tried before giving up.
pub const MAX_ORDER: usize = 1024;

impl<'a> BogoliubovDensity<'a> {
    /// Expands the generating function to an order at which the coefficient tail,
    /// weighted by `n_B`, is below `tol`.
    pub fn new(spectrum: &'a BogoliubovSpectrum, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::param("tol", "must be > 0"));
        }
        let (a, b) = spectrum.ab_constants();
        let n_b = spectrum.n_b;
        let mut order = default_order(n_b);
        loop {
            let gf = GeneratingFunction::new(a, b, n_b, order);
            let tail = edge_magnitude(gf.exp_series()) * n_b.max(1.0);
            if tail < tol * 1e-3 {
                return Ok(BogoliubovDensity {
                    spectrum,
                    generating: gf,
                    tol,
                });
            }
            if order >= MAX_ORDER {
                return Err(Error::Convergence {
                    max_order: order,
                    partial: Complex64::new(gf.remote_normalization() * n_b, 0.0),
                    tail,
                });
            }
            order = (order * 2).min(MAX_ORDER);
        }
    }

    pub fn generating(&self) -> &GeneratingFunction {
        &self.generating
    }

    pub fn spectrum(&self) -> &BogoliubovSpectrum {
        self.spectrum
    }

    /// `n_B · Σ_n [zⁿz′ⁿ] exp(n_B X)`: the model's density where `G = 0`.
    pub fn remote_density(&self) -> f64 {
        self.spectrum.n_b * self.generating.remote_normalization()
    }

    /// `Σ_n ρ_n` for given propagator values.
    pub fn rho_from_greens(&self, g_r: Complex64, g_rp: Complex64) -> Result<Complex64> {
        let (sum, tail) = self.generating.branch_sum(g_r, g_rp.conj());
        if tail > self.tol {
            return Err(Error::Convergence {
                max_order: self.generating.order(),
                partial: sum,
                tail,
            });
        }
        Ok(sum)
    }

    /// `ρ(r, r′, t)` using `greens` for the propagator.
    pub fn rho(&self, greens: &dyn GreensFunction, r: usize, rp: usize, t: f64) -> Result<Complex64> {
        self.rho_from_greens(greens.value(r, t)?, greens.value(rp, t)?)
    }
}

/// Largest coefficient on the outer rim `max(i, j) ≥ order − 1` of a series.
fn edge_magnitude(s: &PowerSeries2) -> f64 {
    let n = s.order();
    let mut worst = 0.0f64;
    for i in 0..=n {
        for j in 0..=n {
            if i + 1 >= n || j + 1 >= n {
                worst = worst.max(s.coeff(i, j).norm());
            }
        }
    }
    worst
}
