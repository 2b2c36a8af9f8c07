use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, hermiticity_error, HermitianEigen};
use crate::model::ModeBasis;
use crate::oracle::FockBasis;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    Hamiltonian,
    Ladder,
    Projector,
    Evolution,
}

#[derive(Debug, Clone)]
enum Storage {
    /// Row-major list of `(column, value)` pairs.
    Sparse(Vec<Vec<(usize, Complex64)>>),
    Dense(DMatrix<Complex64>),
}

/// Operator on a Fock space.
#[derive(Debug, Clone)]
pub struct ManyBodyOperator {
    kind: OperatorKind,
    storage: Storage,
}

impl ManyBodyOperator {
    fn sparse(kind: OperatorKind, rows: Vec<Vec<(usize, Complex64)>>) -> Self {
        ManyBodyOperator {
            kind,
            storage: Storage::Sparse(rows),
        }
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        match &self.storage {
            Storage::Sparse(rows) => rows.len(),
            Storage::Dense(m) => m.nrows(),
        }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        match &self.storage {
            Storage::Sparse(rows) => rows
                .par_iter()
                .map(|row| row.iter().map(|&(j, a)| a * v[j]).sum())
                .collect(),
            Storage::Dense(m) => (m * DVector::from_column_slice(v)).iter().copied().collect(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            Storage::Sparse(rows) => {
                let n = rows.len();
                let mut m = DMatrix::zeros(n, n);
                for (i, row) in rows.iter().enumerate() {
                    for &(j, a) in row {
                        m[(i, j)] += a;
                    }
                }
                m
            }
        }
    }

    pub fn hermiticity_error(&self) -> f64 {
        match &self.storage {
            Storage::Dense(m) => hermiticity_error(m),
            Storage::Sparse(rows) => {
                let mut map: HashMap<(usize, usize), Complex64> = HashMap::new();
                for (i, row) in rows.iter().enumerate() {
                    for &(j, a) in row {
                        *map.entry((i, j)).or_default() += a;
                    }
                }
                map.iter()
                    .map(|(&(i, j), &a)| (a - map.get(&(j, i)).copied().unwrap_or_default().conj()).norm())
                    .fold(0.0, f64::max)
            }
        }
    }

    /// `|AB − C|` in max norm, through dense products.
    pub fn product_error(&self, other: &ManyBodyOperator, expected: &DMatrix<Complex64>) -> f64 {
        let p = self.to_dense() * other.to_dense();
        (p - expected).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// `H = Σ h(r,r′) a†_r a_{r′} + (u/2) Σ_r n_r(n_r − 1)` with `h` the one-body
/// matrix of `modes` in the cell basis.
pub fn build_hamiltonian(fock: &FockBasis, modes: &ModeBasis, onsite_u: f64) -> Result<ManyBodyOperator> {
    if !(onsite_u >= 0.0 && onsite_u.is_finite()) {
        return Err(Error::param("u", format!("on-site interaction must be >= 0, got {onsite_u}")));
    }
    if modes.grid().num_cells() != fock.num_cells() {
        return Err(Error::GridMismatch(format!(
            "mode basis has {} cells, Fock basis has {}",
            modes.grid().num_cells(),
            fock.num_cells()
        )));
    }
    let h = modes.one_body_matrix();
    let nc = fock.num_cells();
    let columns: Vec<Vec<(usize, Complex64)>> = (0..fock.dimension())
        .into_par_iter()
        .map(|col| {
            let s = fock.state(col);
            let mut out = Vec::new();
            let mut diag = Complex64::new(0.0, 0.0);
            for r in 0..nc {
                let nr = s[r] as f64;
                diag += h[(r, r)] * nr + onsite_u / 2.0 * nr * (nr - 1.0);
            }
            out.push((col, diag));
            let mut t = s.to_vec();
            for rp in 0..nc {
                if s[rp] == 0 {
                    continue;
                }
                for r in 0..nc {
                    let a = h[(r, rp)];
                    if r == rp || a.norm() == 0.0 {
                        continue;
                    }
                    t[rp] -= 1;
                    t[r] += 1;
                    let row = fock.index_of(&t).expect("hop stays in the basis");
                    out.push((row, a * (s[rp] as f64 * (s[r] as f64 + 1.0)).sqrt()));
                    t[rp] += 1;
                    t[r] -= 1;
                }
            }
            out
        })
        .collect();
    Ok(ManyBodyOperator::sparse(OperatorKind::Hamiltonian, transpose(columns)))
}

fn transpose(columns: Vec<Vec<(usize, Complex64)>>) -> Vec<Vec<(usize, Complex64)>> {
    let mut rows = vec![Vec::new(); columns.len()];
    for (j, col) in columns.into_iter().enumerate() {
        for (i, a) in col {
            rows[i].push((j, a));
        }
    }
    rows
}

/// `a†_r a_{r′}`.
pub fn hopping_operator(fock: &FockBasis, r: usize, rp: usize) -> Result<ManyBodyOperator> {
    check_cell(fock, r)?;
    check_cell(fock, rp)?;
    let columns = (0..fock.dimension())
        .map(|col| {
            let s = fock.state(col);
            if s[rp] == 0 {
                return Vec::new();
            }
            if r == rp {
                return vec![(col, Complex64::new(s[r] as f64, 0.0))];
            }
            let mut t = s.to_vec();
            t[rp] -= 1;
            t[r] += 1;
            let amp = (s[rp] as f64 * (s[r] as f64 + 1.0)).sqrt();
            vec![(fock.index_of(&t).unwrap(), Complex64::new(amp, 0.0))]
        })
        .collect();
    Ok(ManyBodyOperator::sparse(OperatorKind::Ladder, transpose(columns)))
}

/// `W_n`: projector onto states with exactly `n` particles in `cell`.
pub fn occupation_projector(fock: &FockBasis, cell: usize, n: usize) -> Result<ManyBodyOperator> {
    check_cell(fock, cell)?;
    let rows = (0..fock.dimension())
        .map(|i| {
            if fock.state(i)[cell] as usize == n {
                vec![(i, Complex64::new(1.0, 0.0))]
            } else {
                Vec::new()
            }
        })
        .collect();
    Ok(ManyBodyOperator::sparse(OperatorKind::Projector, rows))
}

fn check_cell(fock: &FockBasis, cell: usize) -> Result<()> {
    if cell >= fock.num_cells() {
        return Err(Error::param("cell", format!("index {cell} out of range 0..{}", fock.num_cells())));
    }
    Ok(())
}

/// Hamiltonian tolerance for the dense eigendecomposition.
const HERMITICITY_TOL: f64 = 1e-12;

/// `e^{−iHt/ħ}` through a one-time dense eigendecomposition.
#[derive(Debug, Clone)]
pub struct Evolver {
    eigen: HermitianEigen,
    hbar: f64,
}

impl Evolver {
    pub fn new(hamiltonian: &ManyBodyOperator, hbar: f64) -> Result<Self> {
        if hamiltonian.kind() != OperatorKind::Hamiltonian {
            return Err(Error::param("H", "evolver needs a Hamiltonian"));
        }
        if !(hbar > 0.0) {
            return Err(Error::param("hbar", "must be > 0"));
        }
        let h = hamiltonian.to_dense();
        let err = hermiticity_error(&h);
        if err > HERMITICITY_TOL {
            return Err(Error::Invariant {
                name: "hamiltonian hermiticity".into(),
                detail: format!("|H - H†| = {err:e}"),
            });
        }
        Ok(Evolver {
            eigen: hermitian_eigen(&h),
            hbar,
        })
    }

    pub fn energies(&self) -> &[f64] {
        &self.eigen.values
    }

    /// Lowest eigenvector of `H`.
    pub fn lowest_state(&self) -> Vec<Complex64> {
        self.eigen.vectors.column(0).iter().copied().collect()
    }

    /// Coefficients of `psi` in the eigenbasis.
    pub fn to_eigenbasis(&self, psi: &[Complex64]) -> Vec<Complex64> {
        (self.eigen.vectors.adjoint() * DVector::from_column_slice(psi)).iter().copied().collect()
    }

    /// Evolves eigenbasis coefficients to time `t` and maps back to the Fock basis.
    pub fn from_eigenbasis(&self, coeffs: &[Complex64], t: f64) -> Vec<Complex64> {
        let phased = DVector::from_iterator(
            coeffs.len(),
            coeffs
                .iter()
                .zip(&self.eigen.values)
                .map(|(c, &e)| c * Complex64::from_polar(1.0, -e * t / self.hbar)),
        );
        (&self.eigen.vectors * phased).iter().copied().collect()
    }

    pub fn evolve(&self, psi: &[Complex64], t: f64) -> Vec<Complex64> {
        self.from_eigenbasis(&self.to_eigenbasis(psi), t)
    }

    /// Dense propagator `e^{−iHt/ħ}`.
    pub fn propagator(&self, t: f64) -> ManyBodyOperator {
        let v = &self.eigen.vectors;
        let n = v.nrows();
        let mut scaled = v.clone();
        for (c, &e) in self.eigen.values.iter().enumerate() {
            let ph = Complex64::from_polar(1.0, -e * t / self.hbar);
            for r in 0..n {
                scaled[(r, c)] *= ph;
            }
        }
        ManyBodyOperator {
            kind: OperatorKind::Evolution,
            storage: Storage::Dense(scaled * v.adjoint()),
        }
    }
}
