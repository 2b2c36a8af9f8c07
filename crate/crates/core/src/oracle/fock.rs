use std::collections::HashMap;

use crate::error::{Error, Result};

/// Largest Fock space enumerated unless a caller raises it.
pub const DEFAULT_CAP: usize = 200_000;

/// Occupation-number states of `M` bosons in `N_c` cells.
///
/// States are ordered descending-lexicographically, so `(M,0,…,0)` comes first.
#[derive(Debug, Clone)]
pub struct FockBasis {
    num_cells: usize,
    particles: usize,
    states: Vec<Vec<u16>>,
    index: HashMap<Vec<u16>, usize>,
}

/// `C(M + N_c − 1, N_c − 1)`, exact as long as it fits in `u128`.
pub fn fock_dimension(num_cells: usize, particles: usize) -> u128 {
    let k = num_cells.saturating_sub(1) as u128;
    let n = particles as u128 + k;
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Enumerates with the default cap of `2·10⁵` states.
pub fn enumerate_fock_states(num_cells: usize, particles: usize) -> Result<FockBasis> {
    FockBasis::with_cap(num_cells, particles, DEFAULT_CAP)
}

impl FockBasis {
    pub fn with_cap(num_cells: usize, particles: usize, cap: usize) -> Result<Self> {
        if num_cells < 1 {
            return Err(Error::param("N_c", "need at least one cell"));
        }
        if particles > u16::MAX as usize {
            return Err(Error::param("M", "too many particles for the occupation type"));
        }
        let dimension = fock_dimension(num_cells, particles);
        if dimension > cap as u128 {
            return Err(Error::DimensionCap { dimension, cap });
        }
        let mut states = Vec::with_capacity(dimension as usize);
        let mut current = vec![0u16; num_cells];
        fill(&mut current, 0, particles, &mut states);
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Ok(FockBasis {
            num_cells,
            particles,
            states,
            index,
        })
    }

    pub fn num_cells(&self) -> usize {
        self.num_cells
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn dimension(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, i: usize) -> &[u16] {
        &self.states[i]
    }

    pub fn states(&self) -> &[Vec<u16>] {
        &self.states
    }

    pub fn index_of(&self, occupation: &[u16]) -> Option<usize> {
        self.index.get(occupation).copied()
    }
}

fn fill(current: &mut [u16], cell: usize, left: usize, out: &mut Vec<Vec<u16>>) {
    if cell + 1 == current.len() {
        current[cell] = left as u16;
        out.push(current.to_vec());
        return;
    }
    for n in (0..=left).rev() {
        current[cell] = n as u16;
        fill(current, cell + 1, left - n, out);
    }
    current[cell] = 0;
}
