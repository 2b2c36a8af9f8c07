use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How cell coordinates are laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    /// Ring / torus. Cell `i` sits at `i·a`; displacements use the minimum image.
    Periodic,
    /// Open box centered on the origin. Cell `i` sits at `(i − n/2)·a`.
    Centered,
}

/// A hypercubic grid of `cells_per_side^d` cells, each of volume `V0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellGrid {
    dimension: usize,
    cells_per_side: usize,
    boundary: Boundary,
    cell_volume: f64,
}

impl CellGrid {
    pub fn new(
        dimension: usize,
        cells_per_side: usize,
        boundary: Boundary,
        cell_volume: f64,
    ) -> Result<Self> {
        if !(1..=3).contains(&dimension) {
            return Err(Error::param("dimension", format!("must be 1, 2 or 3, got {dimension}")));
        }
        if !(cell_volume.is_finite() && cell_volume > 0.0) {
            return Err(Error::param("cell_volume", format!("must be > 0, got {cell_volume}")));
        }
        let total = cells_per_side
            .checked_pow(dimension as u32)
            .ok_or_else(|| Error::param("cells_per_side", "cell count overflows"))?;
        if total < 2 {
            return Err(Error::param("cells_per_side", format!("need N_c >= 2, got {total}")));
        }
        Ok(CellGrid {
            dimension,
            cells_per_side,
            boundary,
            cell_volume,
        })
    }

    pub fn periodic(dimension: usize, cells_per_side: usize, cell_volume: f64) -> Result<Self> {
        Self::new(dimension, cells_per_side, Boundary::Periodic, cell_volume)
    }

    pub fn centered(dimension: usize, cells_per_side: usize, cell_volume: f64) -> Result<Self> {
        Self::new(dimension, cells_per_side, Boundary::Centered, cell_volume)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn cells_per_side(&self) -> usize {
        self.cells_per_side
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_volume
    }

    /// `N_c`.
    pub fn num_cells(&self) -> usize {
        self.cells_per_side.pow(self.dimension as u32)
    }

    /// `V = N_c · V0`.
    pub fn total_volume(&self) -> f64 {
        self.num_cells() as f64 * self.cell_volume
    }

    /// Linear size of one cell, `V0^(1/d)`.
    pub fn spacing(&self) -> f64 {
        self.cell_volume.powf(1.0 / self.dimension as f64)
    }

    /// Side length of the whole box.
    pub fn extent(&self) -> f64 {
        self.cells_per_side as f64 * self.spacing()
    }

    /// Integer coordinates of a flat cell index, first axis fastest.
    pub fn multi_index(&self, cell: usize) -> [usize; 3] {
        let n = self.cells_per_side;
        let mut out = [0; 3];
        let mut rest = cell;
        for slot in out.iter_mut().take(self.dimension) {
            *slot = rest % n;
            rest /= n;
        }
        out
    }

    pub fn flat_index(&self, idx: [usize; 3]) -> usize {
        let n = self.cells_per_side;
        (0..self.dimension).rev().fold(0, |acc, a| acc * n + idx[a])
    }

    /// Cell at the coordinate origin: index 0 on a ring, the central cell in a box.
    pub fn origin_cell(&self) -> usize {
        match self.boundary {
            Boundary::Periodic => 0,
            Boundary::Centered => self.flat_index([self.cells_per_side / 2; 3]),
        }
    }

    /// Position of a cell.
    pub fn position(&self, cell: usize) -> [f64; 3] {
        let a = self.spacing();
        let idx = self.multi_index(cell);
        let shift = match self.boundary {
            Boundary::Periodic => 0.0,
            Boundary::Centered => (self.cells_per_side / 2) as f64,
        };
        let mut x = [0.0; 3];
        for ax in 0..self.dimension {
            x[ax] = (idx[ax] as f64 - shift) * a;
        }
        x
    }

    /// Displacement `x_to − x_from`, minimum image on periodic grids.
    pub fn displacement(&self, from: usize, to: usize) -> [f64; 3] {
        let a = self.spacing();
        let n = self.cells_per_side as i64;
        let (i, j) = (self.multi_index(from), self.multi_index(to));
        let mut d = [0.0; 3];
        for ax in 0..self.dimension {
            let mut k = j[ax] as i64 - i[ax] as i64;
            if self.boundary == Boundary::Periodic {
                k = k.rem_euclid(n);
                if k > n / 2 {
                    k -= n;
                }
            }
            d[ax] = k as f64 * a;
        }
        d
    }

    pub fn distance(&self, from: usize, to: usize) -> f64 {
        self.displacement(from, to).iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn check_cell(&self, cell: usize) -> Result<()> {
        if cell < self.num_cells() {
            Ok(())
        } else {
            Err(Error::param(
                "cell",
                format!("index {cell} out of range for {} cells", self.num_cells()),
            ))
        }
    }
}
