//! Truncated power series in two variables `z`, `z′` with complex coefficients.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

/// `Σ_{i,j ≤ order} c[i][j] z^i z′^j`; terms with either power above `order` are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries2 {
    order: usize,
    coeffs: Vec<Complex64>,
}

impl PowerSeries2 {
    pub fn zero(order: usize) -> Self {
        PowerSeries2 {
            order,
            coeffs: vec![Complex64::new(0.0, 0.0); (order + 1) * (order + 1)],
        }
    }

    pub fn constant(order: usize, c: Complex64) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// Builds a series from sparse `(i, j, c)` terms; out-of-range terms are dropped.
    pub fn from_terms(order: usize, terms: &[(usize, usize, Complex64)]) -> Self {
        let mut s = Self::zero(order);
        for &(i, j, c) in terms {
            if i <= order && j <= order {
                s.coeffs[i * (order + 1) + j] += c;
            }
        }
        s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, i: usize, j: usize) -> Complex64 {
        if i > self.order || j > self.order {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[i * (self.order + 1) + j]
        }
    }

    fn slot(&mut self, i: usize, j: usize) -> &mut Complex64 {
        &mut self.coeffs[i * (self.order + 1) + j]
    }

    pub fn scale(&self, k: Complex64) -> Self {
        PowerSeries2 {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    fn nonzero_terms(&self) -> Vec<(usize, usize, Complex64)> {
        let w = self.order + 1;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() != 0.0)
            .map(|(k, &c)| (k / w, k % w, c))
            .collect()
    }

    /// `exp(self)`, truncated at the same order.
    ///
    /// With `S = s₀₀ + S′`, `E = exp(S′)` satisfies `∂_z E = (∂_z S′) E`, which gives
    /// `i e_ij = Σ a s_ab e_{i−a, j−b}`; the `i = 0` row follows the same recurrence
    /// in `z′`. Every coefficient is exact up to rounding, with no Taylor cut-off.
    pub fn exp(&self) -> Self {
        let order = self.order;
        let c00 = self.coeff(0, 0);
        let terms: Vec<_> = self.nonzero_terms().into_iter().filter(|t| (t.0, t.1) != (0, 0)).collect();
        let mut e = Self::zero(order);
        *e.slot(0, 0) = Complex64::new(1.0, 0.0);
        for j in 1..=order {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(a, b, s) in &terms {
                if a == 0 && b <= j {
                    acc += s * b as f64 * e.coeff(0, j - b);
                }
            }
            *e.slot(0, j) = acc / j as f64;
        }
        for i in 1..=order {
            for j in 0..=order {
                let mut acc = Complex64::new(0.0, 0.0);
                for &(a, b, s) in &terms {
                    if a >= 1 && a <= i && b <= j {
                        acc += s * a as f64 * e.coeff(i - a, j - b);
                    }
                }
                *e.slot(i, j) = acc / i as f64;
            }
        }
        e.scale(c00.exp())
    }

    /// Largest coefficient deviation from another series of the same order.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for &PowerSeries2 {
    type Output = PowerSeries2;
    fn add(self, rhs: &PowerSeries2) -> PowerSeries2 {
        assert_eq!(self.order, rhs.order, "series orders differ");
        PowerSeries2 {
            order: self.order,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &PowerSeries2 {
    type Output = PowerSeries2;
    fn sub(self, rhs: &PowerSeries2) -> PowerSeries2 {
        assert_eq!(self.order, rhs.order, "series orders differ");
        PowerSeries2 {
            order: self.order,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &PowerSeries2 {
    type Output = PowerSeries2;
    fn mul(self, rhs: &PowerSeries2) -> PowerSeries2 {
        assert_eq!(self.order, rhs.order, "series orders differ");
        let order = self.order;
        let mut out = PowerSeries2::zero(order);
        for (a, b, x) in self.nonzero_terms() {
            for i in 0..=order - a {
                for j in 0..=order - b {
                    let y = rhs.coeff(i, j);
                    if y.norm() != 0.0 {
                        *out.slot(a + i, b + j) += x * y;
                    }
                }
            }
        }
        out
    }
}
