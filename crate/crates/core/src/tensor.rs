//! Product combs on `Z^d` and Bernoullisation restricted to the first `k`
//! coordinates.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::{correlation_sum, empirical_autocorr};
use crate::sequences::{RandomSpec, WeightedComb};

/// Largest number of weights [`ProductComb::materialise`] will allocate.
pub const MATERIALISE_CAP: u128 = 1 << 24;

/// Sign flips indexed by the first `k` coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RankFlip {
    pub k: usize,
    pub spec: RandomSpec,
}

/// Weight at `x` is `prod_l U_l(x_l)`, times the flip signs.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductComb {
    factors: Vec<WeightedComb>,
    flips: Vec<RankFlip>,
}

pub fn product_comb(factors: Vec<WeightedComb>) -> Result<ProductComb> {
    if factors.is_empty() {
        return Err(Error::EmptyFactors);
    }
    for f in &factors {
        f.ensure_binary()?;
    }
    Ok(ProductComb {
        factors,
        flips: Vec::new(),
    })
}

/// Materialised weights on a box, row-major (last axis fastest).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub lo: Vec<i64>,
    pub shape: Vec<usize>,
    pub weights: Vec<f64>,
}

impl Grid {
    fn offset(&self, x: &[i64]) -> Option<usize> {
        let mut off = 0usize;
        for ((&xi, &lo), &n) in x.iter().zip(&self.lo).zip(&self.shape) {
            let r = xi - lo;
            if r < 0 || r >= n as i64 {
                return None;
            }
            off = off * n + r as usize;
        }
        Some(off)
    }

    pub fn get(&self, x: &[i64]) -> f64 {
        self.offset(x).map_or(0.0, |o| self.weights[o])
    }

    fn point(&self, mut off: usize) -> Vec<i64> {
        let mut x = vec![0i64; self.shape.len()];
        for axis in (0..self.shape.len()).rev() {
            x[axis] = self.lo[axis] + (off % self.shape[axis]) as i64;
            off /= self.shape[axis];
        }
        x
    }

    /// 2-d grids only: one CSV row per first-axis index.
    pub fn to_csv_matrix(&self) -> Result<String> {
        if self.shape.len() != 2 {
            return Err(Error::InvalidParameter("CSV matrix export needs d = 2".into()));
        }
        let mut out = String::new();
        for row in self.weights.chunks(self.shape[1]) {
            let line: Vec<String> = row.iter().map(|w| format!("{w}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("grids always serialise")
    }
}

impl ProductComb {
    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[WeightedComb] {
        &self.factors
    }

    pub fn flips(&self) -> &[RankFlip] {
        &self.flips
    }

    pub fn weight(&self, x: &[i64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        let base: f64 = self.factors.iter().zip(x).map(|(f, &xi)| f.get(xi)).product();
        self.flips
            .iter()
            .fold(base, |w, flip| w * flip.spec.sign(&x[..flip.k]))
    }

    pub fn size(&self) -> u128 {
        self.factors.iter().map(|f| f.len() as u128).product()
    }

    pub fn materialise(&self) -> Result<Grid> {
        let size = self.size();
        if size > MATERIALISE_CAP {
            return Err(Error::TooLarge(size));
        }
        let mut grid = Grid {
            lo: self.factors.iter().map(|f| f.lo()).collect(),
            shape: self.factors.iter().map(|f| f.len()).collect(),
            weights: Vec::new(),
        };
        grid.weights = (0..size as usize)
            .into_par_iter()
            .map(|off| self.weight(&grid.point(off)))
            .collect();
        Ok(grid)
    }

    /// The line through `x` parallel to `axis`, over that factor's window.
    pub fn line(&self, axis: usize, x: &[i64]) -> Result<WeightedComb> {
        if axis >= self.dim() || x.len() != self.dim() {
            return Err(Error::InvalidParameter(format!(
                "axis {axis} / point of dimension {} for d = {}",
                x.len(),
                self.dim()
            )));
        }
        let f = &self.factors[axis];
        let mut p = x.to_vec();
        let weights = f
            .indices()
            .map(|i| {
                p[axis] = i;
                self.weight(&p)
            })
            .collect();
        Ok(WeightedComb::new(f.lo(), weights))
    }
}

/// Product of the per-axis autocorrelation estimates at lag `m`.
pub fn product_autocorr(factors: &[WeightedComb], m: &[i64]) -> Result<f64> {
    if factors.is_empty() {
        return Err(Error::EmptyFactors);
    }
    if m.len() != factors.len() {
        return Err(Error::DimensionMismatch {
            expected: factors.len(),
            found: m.len(),
        });
    }
    factors
        .iter()
        .zip(m)
        .map(|(f, &mi)| empirical_autocorr(f, mi).map(|e| e.value))
        .product()
}

/// Product of the per-axis raw correlation sums.
pub fn product_correlation_sum(factors: &[WeightedComb], m: &[i64]) -> Result<f64> {
    factors
        .iter()
        .zip(m)
        .map(|(f, &mi)| correlation_sum(f, mi))
        .product()
}

/// `sum_x w_x w_{x-m}` over a materialised box with zero padding.
pub fn brute_force_correlation_sum(grid: &Grid, m: &[i64]) -> f64 {
    (0..grid.weights.len())
        .into_par_iter()
        .map(|off| {
            let x = grid.point(off);
            let shifted: Vec<i64> = x.iter().zip(m).map(|(a, b)| a - b).collect();
            grid.weights[off] * grid.get(&shifted)
        })
        .sum()
}

/// Brute-force autocorrelation, normalised by the box volume.
pub fn brute_force_autocorr(grid: &Grid, m: &[i64]) -> f64 {
    brute_force_correlation_sum(grid, m) / grid.weights.len() as f64
}

/// Multiplies the weight at `x` by an i.i.d. sign indexed by
/// `(x_1, ..., x_k)`. `k = 0` leaves the comb unchanged.
pub fn rank_k_bernoullise(base: &ProductComb, k: usize, spec: &RandomSpec) -> Result<ProductComb> {
    if k > base.dim() {
        return Err(Error::RankOutOfRange { k, d: base.dim() });
    }
    let mut out = base.clone();
    if k > 0 {
        out.flips.push(RankFlip { k, spec: *spec });
    }
    Ok(out)
}
