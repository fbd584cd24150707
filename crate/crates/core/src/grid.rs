//! Periodic sampling lattices and their dual frequency lattices.

use crate::error::{CoreError, Result};
use serde::{Deserialize, Serialize};

/// Periodic spatial grid: `n × n` samples over a square box of side
/// `box_period`. The dual lattice is `(2π/box_period)·{-n/2, …, n/2-1}²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub n: usize,
    pub box_period: f64,
    /// Fraction of the Nyquist band kept by the dealias mask (2/3 rule).
    pub dealias_fraction: f64,
}

impl Grid2D {
    pub fn new(n: usize, box_period: f64) -> Result<Self> {
        Self::with_dealias(n, box_period, 2.0 / 3.0)
    }

    pub fn with_dealias(n: usize, box_period: f64, dealias_fraction: f64) -> Result<Self> {
        if n < 4 || n % 2 != 0 {
            return Err(CoreError::Parameter(format!(
                "points_per_axis must be even and >= 4, got {n}"
            )));
        }
        if !(box_period > 0.0) {
            return Err(CoreError::Parameter("box_period must be positive".into()));
        }
        if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) {
            return Err(CoreError::Parameter("dealias_fraction must lie in (0,1]".into()));
        }
        Ok(Grid2D { n, box_period, dealias_fraction })
    }

    /// Grid spacing Δx.
    pub fn dx(&self) -> f64 {
        self.box_period / self.n as f64
    }

    /// Lowest nonzero frequency magnitude 2π/L; also the dual lattice spacing.
    pub fn dxi(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.box_period
    }

    /// Signed integer mode number for a storage index (standard FFT order).
    #[inline]
    pub fn mode(&self, idx: usize) -> i64 {
        let n = self.n as i64;
        let i = idx as i64;
        if i < n / 2 { i } else { i - n }
    }

    /// Frequency vector ξ at storage indices `(i, j)` (row-major: i is the
    /// x¹ index).
    #[inline]
    pub fn xi(&self, i: usize, j: usize) -> [f64; 2] {
        let d = self.dxi();
        [self.mode(i) as f64 * d, self.mode(j) as f64 * d]
    }

    #[inline]
    pub fn xi_norm(&self, i: usize, j: usize) -> f64 {
        let [a, b] = self.xi(i, j);
        (a * a + b * b).sqrt()
    }

    /// Physical coordinate x at storage indices `(i, j)`.
    #[inline]
    pub fn x(&self, i: usize, j: usize) -> [f64; 2] {
        let d = self.dx();
        [i as f64 * d, j as f64 * d]
    }

    /// True if the mode survives the dealias mask (|k| < fraction·n/2 on each
    /// axis; the Nyquist row/column is always removed).
    #[inline]
    pub fn keep_mode(&self, i: usize, j: usize) -> bool {
        let cut = (self.dealias_fraction * self.n as f64 / 2.0).floor() as i64;
        self.mode(i).abs() < cut.max(1) && self.mode(j).abs() < cut.max(1)
    }

    /// Largest frequency magnitude on the (dealiased) lattice.
    pub fn xi_max(&self) -> f64 {
        let half = self.n as f64 / 2.0;
        self.dxi() * half * std::f64::consts::SQRT_2
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn same_lattice(&self, other: &Grid2D) -> Result<()> {
        if self.n != other.n || (self.box_period - other.box_period).abs() > 1e-12 {
            return Err(CoreError::GridMismatch(format!(
                "({} , {}) vs ({}, {})",
                self.n, self.box_period, other.n, other.box_period
            )));
        }
        Ok(())
    }
}

/// A dyadic number 2^j (j may be negative down to the lattice floor).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Dyadic(pub f64);

impl Dyadic {
    pub fn from_exponent(j: i32) -> Self {
        Dyadic(2f64.powi(j))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Dyadic shells 2^j covering `[lo, hi]`: the homogeneous ladder
/// {N : some |ξ| in [lo,hi] has |ξ| ∈ [N, 2N)}.
pub fn dyadic_ladder(lo: f64, hi: f64) -> Vec<Dyadic> {
    assert!(lo > 0.0 && hi >= lo);
    let j_lo = lo.log2().floor() as i32;
    let j_hi = hi.log2().floor() as i32;
    (j_lo..=j_hi).map(Dyadic::from_exponent).collect()
}

/// Shell index (exponent j with |ξ| ∈ [2^j, 2^{j+1})) for a magnitude;
/// `None` for the zero mode.
#[inline]
pub fn shell_exponent(r: f64) -> Option<i32> {
    if r <= 0.0 {
        None
    } else {
        Some(r.log2().floor() as i32)
    }
}

/// Shell index on the inhomogeneous ladder ⟨ξ⟩ ∈ [2^j, 2^{j+1}), j ≥ 0.
#[inline]
pub fn shell_exponent_inhom(r: f64) -> i32 {
    let w = (1.0 + r * r).sqrt();
    w.log2().floor().max(0.0) as i32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_closed_under_negation_except_nyquist() {
        let g = Grid2D::new(16, 2.0 * std::f64::consts::PI).unwrap();
        for i in 0..16 {
            let k = g.mode(i);
            if k == -8 {
                // Nyquist has no positive partner; must be dealiased.
                assert!(!g.keep_mode(i, 0));
            } else {
                // -k is on the lattice as well.
                let neg = ((-k).rem_euclid(16)) as usize;
                assert_eq!(g.mode(neg), -k);
            }
        }
    }

    #[test]
    fn lowest_nonzero_frequency_is_dxi() {
        let g = Grid2D::new(32, 4.0).unwrap();
        let mut lo = f64::INFINITY;
        for i in 0..32 {
            for j in 0..32 {
                let r = g.xi_norm(i, j);
                if r > 0.0 {
                    lo = lo.min(r);
                }
            }
        }
        assert!((lo - g.dxi()).abs() < 1e-12);
    }

    #[test]
    fn shells_partition_positive_axis() {
        for &r in &[0.125, 0.3, 1.0, 1.99, 2.0, 77.3] {
            let j = shell_exponent(r).unwrap();
            let n = 2f64.powi(j);
            assert!(n <= r && r < 2.0 * n);
        }
        assert!(shell_exponent(0.0).is_none());
    }

    #[test]
    fn odd_or_tiny_grid_rejected() {
        assert!(Grid2D::new(15, 1.0).is_err());
        assert!(Grid2D::new(2, 1.0).is_err());
        assert!(Grid2D::new(16, -1.0).is_err());
    }
}
