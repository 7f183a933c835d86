//! Diffraction of the octagonal model sets: amplitudes at points of the
//! half lattice, the closed-form amplitude ratio of the two windows, and
//! the phase function derived from it.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::cyc8::{Cyc8, HalfCyc8};
use super::modelset::SchemeConfig;
use crate::covariogram::indicator_ft;
use crate::error::{Error, Result};

/// Denominators below this modulus make the ratio undefined.
pub const SINGULAR_THRESHOLD: f64 = 1e-9;

fn e(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * t)
}

/// `dens(L) * FT(1_W)(-k*)`, including the phase of the window offset.
pub fn diffraction_amplitude(scheme: &SchemeConfig, k: &HalfCyc8) -> Complex64 {
    let y = k.embed_internal();
    let s = scheme.window_shift;
    // FT(1_{W+s})(q) = exp(-2 pi i q.s) FT(1_W)(q) at q = -y
    let phase = e(y[0] * s[0] + y[1] * s[1]);
    indicator_ft(&scheme.window, [-y[0], -y[1]]) * phase * scheme.lattice_density
}

pub fn diffraction_intensity(scheme: &SchemeConfig, k: &HalfCyc8) -> f64 {
    diffraction_amplitude(scheme, k).norm_sqr()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Ratio {
    Value(Complex64),
    Singular,
}

impl Ratio {
    pub fn value(&self) -> Option<Complex64> {
        match self {
            Ratio::Value(v) => Some(*v),
            Ratio::Singular => None,
        }
    }

    pub fn is_singular(&self) -> bool {
        matches!(self, Ratio::Singular)
    }
}

/// Numerator and denominator of the first closed form of `A1(y) / A2(y)`.
pub fn ratio_parts(y: [f64; 2]) -> (Complex64, Complex64) {
    let [y1, y2] = y;
    let num = Complex64::new(1.0, 0.0) + e(y2) + e(y1 + 2.0 * y2);
    let den = Complex64::new(1.0, 0.0)
        + Complex64::from_polar(2.0 * (PI * y2).cos(), PI * (2.0 * y1 + 3.0 * y2));
    (num, den)
}

pub fn amplitude_ratio(y: [f64; 2]) -> Ratio {
    let (num, den) = ratio_parts(y);
    if den.norm() < SINGULAR_THRESHOLD {
        Ratio::Singular
    } else {
        Ratio::Value(num / den)
    }
}

/// The second closed form, `1 + (1 - e(y1)) / (e(y1) + e(y1 + y2) + e(-y2))`.
pub fn amplitude_ratio_alt(y: [f64; 2]) -> Ratio {
    let [y1, y2] = y;
    let den = e(y1) + e(y1 + y2) + e(-y2);
    if den.norm() < SINGULAR_THRESHOLD {
        Ratio::Singular
    } else {
        Ratio::Value(Complex64::new(1.0, 0.0) + (Complex64::new(1.0, 0.0) - e(y1)) / den)
    }
}

/// Phase `chi(y)` with `ratio = exp(2 pi i chi)`, in `(-1/2, 1/2]`.
pub fn phase_chi(y: [f64; 2]) -> Option<f64> {
    amplitude_ratio(y).value().map(|r| r.arg() / (2.0 * PI))
}

/// Representative of `t mod 1` in `(-1/2, 1/2]`.
pub fn wrap_unit(t: f64) -> f64 {
    let r = t - t.round();
    if r <= -0.5 {
        r + 1.0
    } else {
        r
    }
}

/// Distance of `y2` from the singular lines `Z + {1/3, 2/3}`.
pub fn singular_margin(y2: f64) -> f64 {
    let f = y2 - y2.floor();
    (f - 1.0 / 3.0).abs().min((f - 2.0 / 3.0).abs())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AdditivityWitness {
    pub y: [f64; 2],
    pub y_prime: [f64; 2],
    pub chi_y: f64,
    pub chi_y_prime: f64,
    pub chi_sum: f64,
    /// `|chi(y + y') - chi(y) - chi(y') mod 1|`.
    pub violation: f64,
}

pub const WITNESS_MARGIN: f64 = 0.05;

/// Searches the grid `{0, 1/10, ..., 9/10}^2` for `y, y'` where the phase
/// function fails to be additive by more than [`WITNESS_MARGIN`].
pub fn additivity_witness() -> Result<AdditivityWitness> {
    let grid: Vec<[f64; 2]> = (0..10)
        .flat_map(|i| (0..10).map(move |j| [i as f64 / 10.0, j as f64 / 10.0]))
        .collect();
    for &y in &grid {
        for &yp in &grid {
            if yp == [0.0, 0.0] || y == [0.0, 0.0] {
                continue;
            }
            let sum = [y[0] + yp[0], y[1] + yp[1]];
            if [y[1], yp[1], sum[1]]
                .iter()
                .any(|&v| singular_margin(v) < WITNESS_MARGIN)
            {
                continue;
            }
            let (Some(a), Some(b), Some(c)) = (phase_chi(y), phase_chi(yp), phase_chi(sum)) else {
                continue;
            };
            let violation = wrap_unit(c - a - b).abs();
            if violation > WITNESS_MARGIN {
                return Ok(AdditivityWitness {
                    y,
                    y_prime: yp,
                    chi_y: a,
                    chi_y_prime: b,
                    chi_sum: c,
                    violation,
                });
            }
        }
    }
    Err(Error::NoAdditivityWitness)
}

/// One row of an intensity table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IntensityRow {
    pub k: HalfCyc8,
    pub intensity: f64,
}

/// Intensities at all `k` in `L/2` with `|k| <= k_max` and `|k*| <= y_max`,
/// in lexicographic order of the numerator.
pub fn intensity_table(scheme: &SchemeConfig, k_max: f64, y_max: f64) -> Result<Vec<IntensityRow>> {
    if !(k_max >= 0.0 && y_max >= 0.0) || !k_max.is_finite() || !y_max.is_finite() {
        return Err(Error::InvalidParameter("k_max and y_max must be finite and non-negative".into()));
    }
    // |k|^2 + |k*|^2 = (a^2 + b^2 + c^2 + d^2) / 2 for the numerator (a, b, c, d)
    let bound = 2.0 * (k_max * k_max + y_max * y_max);
    let m = bound.sqrt().floor() as i64;
    let mut rows: Vec<IntensityRow> = (-m..=m)
        .into_par_iter()
        .flat_map_iter(|a| {
            let mut out = Vec::new();
            for b in -m..=m {
                for c in -m..=m {
                    for d in -m..=m {
                        if ((a * a + b * b + c * c + d * d) as f64) > bound {
                            continue;
                        }
                        let k = HalfCyc8::new(Cyc8::new(a, b, c, d));
                        let p = k.embed_physical();
                        let q = k.embed_internal();
                        if p[0].hypot(p[1]) > k_max || q[0].hypot(q[1]) > y_max {
                            continue;
                        }
                        out.push(IntensityRow {
                            k,
                            intensity: diffraction_intensity(scheme, &k),
                        });
                    }
                }
            }
            out
        })
        .collect();
    rows.sort_by_key(|r| r.k);
    Ok(rows)
}

pub fn intensity_table_csv(rows: &[IntensityRow]) -> String {
    let mut out = String::from("ka,kb,kc,kd,half,intensity\n");
    for row in rows {
        let [a, b, c, d] = row.k.coeffs();
        out.push_str(&format!(
            "{a},{b},{c},{d},{},{}\n",
            u8::from(row.k.is_proper_half()),
            row.intensity
        ));
    }
    out
}
