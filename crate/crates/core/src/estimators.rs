//! Finite-window estimators: autocorrelation coefficients, periodograms
//! and block entropies of binary combs.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sequences::WeightedComb;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AutocorrEstimate {
    pub m: i64,
    pub value: f64,
    /// Half the window length.
    #[serde(rename = "N")]
    pub n_half: usize,
}

/// `sum_i w_i w_{i-m}` over the window, zero-padded outside.
pub fn correlation_sum(s: &WeightedComb, m: i64) -> Result<f64> {
    if m.unsigned_abs() as usize >= s.len() {
        return Err(Error::LagTooLarge { lag: m, len: s.len() });
    }
    let w = s.weights();
    let k = m.unsigned_abs() as usize;
    // the sum is symmetric under m -> -m after reindexing
    Ok(w[k..].iter().zip(&w[..w.len() - k]).map(|(a, b)| a * b).sum())
}

/// Correlation sum normalised by the window length.
pub fn empirical_autocorr(s: &WeightedComb, m: i64) -> Result<AutocorrEstimate> {
    let sum = correlation_sum(s, m)?;
    Ok(AutocorrEstimate {
        m,
        value: sum / s.len() as f64,
        n_half: s.len() / 2,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PeriodogramBin {
    pub k: f64,
    pub value: f64,
}

/// `|sum_n w_n exp(-2 pi i k n)|^2 / len`.
pub fn periodogram(s: &WeightedComb, k: f64) -> PeriodogramBin {
    let amp: Complex64 = s
        .weights()
        .par_iter()
        .enumerate()
        .map(|(off, &w)| {
            let n = s.lo() + off as i64;
            // reduce k n mod 1 before scaling to keep the phase accurate
            let t = (k * n as f64).rem_euclid(1.0);
            Complex64::from_polar(w, -2.0 * PI * t)
        })
        .sum();
    PeriodogramBin {
        k,
        value: amp.norm_sqr() / s.len() as f64,
    }
}

/// Periodogram at the `bins` equispaced frequencies `j / bins` in `[0, 1)`.
///
/// At these frequencies `exp(-2 pi i k n)` depends on `n mod bins` only, so
/// the comb is folded first and a single FFT of length `bins` suffices.
pub fn periodogram_grid(s: &WeightedComb, bins: usize) -> Result<Vec<PeriodogramBin>> {
    if bins == 0 {
        return Err(Error::InvalidParameter("periodogram grid needs at least one bin".into()));
    }
    let mut folded = vec![Complex64::new(0.0, 0.0); bins];
    for (n, &w) in s.indices().zip(s.weights()) {
        folded[n.rem_euclid(bins as i64) as usize].re += w;
    }
    let fft = FftPlanner::new().plan_fft_forward(bins);
    fft.process(&mut folded);
    let len = s.len() as f64;
    Ok(folded
        .iter()
        .enumerate()
        .map(|(j, a)| PeriodogramBin {
            k: j as f64 / bins as f64,
            value: a.norm_sqr() / len,
        })
        .collect())
}

/// Mean of the periodogram over `bins` equispaced frequencies in `[0, 1)`.
pub fn periodogram_average(s: &WeightedComb, bins: usize) -> Result<f64> {
    let grid = periodogram_grid(s, bins)?;
    Ok(grid.iter().map(|b| b.value).sum::<f64>() / bins as f64)
}

/// Periodogram on the grid `j / M`, `M` the smallest multiple of `bins`
/// not below the window length, averaged over `bins` consecutive blocks.
/// Bin `b` covers `[b / bins, (b + 1) / bins)` and is reported at its left
/// edge.
pub fn binned_periodogram(s: &WeightedComb, bins: usize) -> Result<Vec<PeriodogramBin>> {
    if bins == 0 {
        return Err(Error::InvalidParameter("periodogram grid needs at least one bin".into()));
    }
    let per_bin = s.len().div_ceil(bins).max(1);
    let fine = periodogram_grid(s, per_bin * bins)?;
    Ok(fine
        .chunks(per_bin)
        .enumerate()
        .map(|(b, chunk)| PeriodogramBin {
            k: b as f64 / bins as f64,
            value: chunk.iter().map(|x| x.value).sum::<f64>() / per_bin as f64,
        })
        .collect())
}

pub const MAX_BLOCK_LENGTH: usize = 20;
const SAMPLES_PER_BLOCK_TYPE: usize = 100;

/// Counts of overlapping `L`-blocks, encoding `+1` as bit 1.
fn block_counts(s: &WeightedComb, l: usize) -> Result<Vec<u64>> {
    if l == 0 || l > MAX_BLOCK_LENGTH {
        return Err(Error::InvalidBlockLength(l));
    }
    let needed = (1usize << l) * SAMPLES_PER_BLOCK_TYPE;
    if s.len() < needed {
        return Err(Error::WindowTooShort {
            len: s.len(),
            block: l,
            needed,
        });
    }
    let mask = (1usize << l) - 1;
    let mut counts = vec![0u64; 1 << l];
    let mut code = 0usize;
    for (i, &w) in s.weights().iter().enumerate() {
        code = ((code << 1) | usize::from(w > 0.0)) & mask;
        if i + 1 >= l {
            counts[code] += 1;
        }
    }
    Ok(counts)
}

fn shannon(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let total = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let q = c as f64 / total;
            -q * q.ln()
        })
        .sum()
}

/// `H_L`, the empirical Shannon entropy (nats) of overlapping `L`-blocks.
pub fn block_shannon_entropy(s: &WeightedComb, l: usize) -> Result<f64> {
    Ok(shannon(&block_counts(s, l)?))
}

/// `H_L / L`.
pub fn block_entropy(s: &WeightedComb, l: usize) -> Result<f64> {
    Ok(block_shannon_entropy(s, l)? / l as f64)
}

/// `H_L - H_{L-1}`, the entropy of a symbol conditioned on the `L - 1`
/// preceding ones.
pub fn conditional_block_entropy(s: &WeightedComb, l: usize) -> Result<f64> {
    let h = block_shannon_entropy(s, l)?;
    let prev = if l == 1 { 0.0 } else { block_shannon_entropy(s, l - 1)? };
    Ok(h - prev)
}

/// Number of distinct `L`-blocks that occur.
pub fn block_complexity(s: &WeightedComb, l: usize) -> Result<usize> {
    Ok(block_counts(s, l)?.iter().filter(|&&c| c > 0).count())
}

pub fn autocorr_csv(rows: &[AutocorrEstimate]) -> String {
    let mut out = String::from("m,value,N\n");
    for r in rows {
        out.push_str(&format!("{},{},{}\n", r.m, r.value, r.n_half));
    }
    out
}

pub fn periodogram_csv(rows: &[PeriodogramBin]) -> String {
    let mut out = String::from("k,value\n");
    for r in rows {
        out.push_str(&format!("{},{}\n", r.k, r.value));
    }
    out
}

pub fn entropy_csv(rows: &[(usize, f64)]) -> String {
    let mut out = String::from("L,entropy\n");
    for (l, h) in rows {
        out.push_str(&format!("{l},{h}\n"));
    }
    out
}
