//! Covariograms of polyominoes.
//!
//! A polyomino `K = F + C` is a union of closed unit squares
//! `C = [-1/2, 1/2]^2` centred on the points of `F`. Since
//! `1_K = sum_f 1_{f+C}`, the covariogram splits into the difference
//! multiset of `F` convolved with the covariogram of `C`, which is the
//! tent `max(0, 1-|u|) * max(0, 1-|v|)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pointset::{canonical_pair, difference_multiset, DifferenceMultiset, FinitePointSet};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "FinitePointSet", into = "FinitePointSet")]
pub struct Polyomino {
    cells: FinitePointSet,
    diffs: DifferenceMultiset,
}

impl PartialEq for Polyomino {
    fn eq(&self, other: &Self) -> bool {
        self.cells == other.cells
    }
}

impl TryFrom<FinitePointSet> for Polyomino {
    type Error = Error;

    fn try_from(cells: FinitePointSet) -> Result<Self> {
        Polyomino::new(cells)
    }
}

impl From<Polyomino> for FinitePointSet {
    fn from(p: Polyomino) -> Self {
        p.cells
    }
}

impl Polyomino {
    pub fn new(cells: FinitePointSet) -> Result<Self> {
        if cells.dim() != 2 {
            return Err(Error::NotPlanar(cells.dim()));
        }
        let diffs = difference_multiset(&cells)?;
        Ok(Polyomino { cells, diffs })
    }

    /// The window `P1 = F1 + C`.
    pub fn p1() -> Self {
        Polyomino::new(canonical_pair().0).expect("F1 is a non-empty planar set")
    }

    /// The window `P2 = F2 + C`.
    pub fn p2() -> Self {
        Polyomino::new(canonical_pair().1).expect("F2 is a non-empty planar set")
    }

    /// The single unit square `C`.
    pub fn unit_square() -> Self {
        Polyomino::new(FinitePointSet::planar(&[(0, 0)])).expect("non-empty")
    }

    pub fn cells(&self) -> &FinitePointSet {
        &self.cells
    }

    pub fn differences(&self) -> &DifferenceMultiset {
        &self.diffs
    }

    pub fn area(&self) -> f64 {
        self.cells.len() as f64
    }

    /// Cell centres as `(x, y)` pairs.
    pub fn centres(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.cells.iter().map(|p| (p.0[0], p.0[1]))
    }

    /// `-K`, the point reflection through the origin.
    pub fn inverted(&self) -> Polyomino {
        let cells = self
            .cells
            .transform(&crate::pointset::IntPoint::zero(2), true)
            .expect("same dimension");
        Polyomino::new(cells).expect("non-empty")
    }

    /// Largest distance from the origin of any point of `K + shift`.
    pub fn max_radius(&self, shift: [f64; 2]) -> f64 {
        self.centres()
            .flat_map(|(x, y)| {
                [(-0.5, -0.5), (-0.5, 0.5), (0.5, -0.5), (0.5, 0.5)]
                    .map(|(dx, dy)| (x as f64 + dx + shift[0]).hypot(y as f64 + dy + shift[1]))
            })
            .fold(0.0, f64::max)
    }

    /// Largest distance between two points of `K`.
    pub fn diameter(&self) -> f64 {
        self.diffs
            .iter()
            .map(|(z, _)| (z.0[0].abs() as f64 + 1.0).hypot(z.0[1].abs() as f64 + 1.0))
            .fold(0.0, f64::max)
    }
}

fn tent(u: f64, v: f64) -> f64 {
    (1.0 - u.abs()).max(0.0) * (1.0 - v.abs()).max(0.0)
}

/// `vol(K ∩ (x + K))`.
pub fn covariogram(p: &Polyomino, x: [f64; 2]) -> f64 {
    p.diffs
        .iter()
        .map(|(z, m)| m as f64 * tent(x[0] - z.0[0] as f64, x[1] - z.0[1] as f64))
        .sum()
}

/// Covariogram of the scaled window `alpha * K`.
pub fn covariogram_scaled(p: &Polyomino, alpha: f64, x: [f64; 2]) -> Result<f64> {
    if alpha == 0.0 || !alpha.is_finite() {
        return Err(Error::DegenerateScaling);
    }
    Ok(alpha * alpha * covariogram(p, [x[0] / alpha, x[1] / alpha]))
}

fn sinc(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        t.sin() / t
    }
}

/// Fourier transform of `1_K` with kernel `exp(-2 pi i k.x)`.
pub fn indicator_ft(p: &Polyomino, k: [f64; 2]) -> Complex64 {
    let envelope = sinc(PI * k[0]) * sinc(PI * k[1]);
    let sum: Complex64 = p
        .centres()
        .map(|(a, b)| Complex64::from_polar(1.0, -2.0 * PI * (k[0] * a as f64 + k[1] * b as f64)))
        .sum();
    sum * envelope
}

/// Brute-force covariogram by rasterising each unit cell on an `n x n`
/// grid of sample points and counting those that also lie in `x + K`.
pub fn covariogram_oracle(p: &Polyomino, x: [f64; 2], n: usize) -> Result<f64> {
    if n < 16 {
        return Err(Error::InvalidParameter(format!(
            "grid resolution {n} below minimum 16"
        )));
    }
    let step = 1.0 / n as f64;
    let mut hits = 0u64;
    let mut probe = crate::pointset::IntPoint::zero(2);
    for (a, b) in p.centres() {
        for i in 0..n {
            let qx = a as f64 - 0.5 + (i as f64 + 0.5) * step - x[0];
            probe.0[0] = qx.round() as i64;
            for j in 0..n {
                let qy = b as f64 - 0.5 + (j as f64 + 0.5) * step - x[1];
                probe.0[1] = qy.round() as i64;
                if p.cells.contains(&probe) {
                    hits += 1;
                }
            }
        }
    }
    Ok(hits as f64 * step * step)
}

/// One row of a covariogram table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CovariogramSample {
    pub x: [f64; 2],
    pub cov: f64,
}

/// Evaluates the covariogram on the rectangle `[lo, hi]` with the given
/// step, row-major in `x2` within `x1`.
pub fn covariogram_grid(p: &Polyomino, lo: [f64; 2], hi: [f64; 2], step: f64) -> Result<Vec<CovariogramSample>> {
    if step.is_nan() || step <= 0.0 || hi[0] < lo[0] || hi[1] < lo[1] {
        return Err(Error::InvalidParameter("empty grid or non-positive step".into()));
    }
    let n1 = ((hi[0] - lo[0]) / step + 1e-9).floor() as usize + 1;
    let n2 = ((hi[1] - lo[1]) / step + 1e-9).floor() as usize + 1;
    let mut out = Vec::with_capacity(n1 * n2);
    for i in 0..n1 {
        for j in 0..n2 {
            let x = [lo[0] + i as f64 * step, lo[1] + j as f64 * step];
            out.push(CovariogramSample { x, cov: covariogram(p, x) });
        }
    }
    Ok(out)
}
