//! Model sets of the octagonal scheme with polyomino windows, and their
//! two- and three-point correlations.

use std::collections::HashSet;
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use rayon::prelude::*;
use serde::Serialize;

use super::cyc8::{lattice_density, Cyc8};
use crate::covariogram::{covariogram, Polyomino};
use crate::error::{Error, Result};

const BOUNDARY_TOL: f64 = 1e-12;

/// Default offset of the window in internal space. Keeps the dense set of
/// internal coordinates off the cell edges.
pub const DEFAULT_WINDOW_SHIFT: [f64; 2] = [1e-5, SQRT_2 * 1e-5];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchemeConfig {
    pub window: Polyomino,
    pub window_shift: [f64; 2],
    pub lattice_density: f64,
}

impl SchemeConfig {
    pub fn new(window: Polyomino) -> Self {
        SchemeConfig {
            window,
            window_shift: DEFAULT_WINDOW_SHIFT,
            lattice_density: lattice_density(),
        }
    }

    pub fn with_shift(mut self, shift: [f64; 2]) -> Self {
        self.window_shift = shift;
        self
    }

    pub fn p1() -> Self {
        SchemeConfig::new(Polyomino::p1())
    }

    pub fn p2() -> Self {
        SchemeConfig::new(Polyomino::p2())
    }

    /// Density of the model set, `dens(L) * vol(W)`.
    pub fn model_set_density(&self) -> f64 {
        self.lattice_density * self.window.area()
    }
}

/// Cell lookup for half-open window membership.
struct WindowIndex {
    cells: HashSet<(i64, i64)>,
    lo: [f64; 2],
    hi: [f64; 2],
}

impl WindowIndex {
    fn new(scheme: &SchemeConfig) -> Self {
        let cells: HashSet<(i64, i64)> = scheme.window.centres().collect();
        let s = scheme.window_shift;
        let lo = [
            cells.iter().map(|c| c.0).min().unwrap() as f64 - 0.5 + s[0],
            cells.iter().map(|c| c.1).min().unwrap() as f64 - 0.5 + s[1],
        ];
        let hi = [
            cells.iter().map(|c| c.0).max().unwrap() as f64 + 0.5 + s[0],
            cells.iter().map(|c| c.1).max().unwrap() as f64 + 0.5 + s[1],
        ];
        WindowIndex { cells, lo, hi }
    }

    /// Membership of `u` (already shifted back by the window offset) in the
    /// union of half-open cells `[f - 1/2, f + 1/2)`.
    fn classify(&self, u: [f64; 2]) -> Result<bool> {
        let mut options = [[0i64; 2]; 2];
        let mut counts = [1usize; 2];
        for axis in 0..2 {
            let t = u[axis] + 0.5;
            let fl = t.floor();
            options[axis][0] = fl as i64;
            if t - fl < BOUNDARY_TOL {
                options[axis][1] = fl as i64 - 1;
                counts[axis] = 2;
            } else if fl + 1.0 - t < BOUNDARY_TOL {
                options[axis][1] = fl as i64 + 1;
                counts[axis] = 2;
            }
        }
        let inside = self.cells.contains(&(options[0][0], options[1][0]));
        if counts == [1, 1] {
            return Ok(inside);
        }
        for i in 0..counts[0] {
            for j in 0..counts[1] {
                if self.cells.contains(&(options[0][i], options[1][j])) {
                    let coord = if counts[0] == 2 { u[0] } else { u[1] };
                    return Err(Error::NonGenericWindow { coord });
                }
            }
        }
        Ok(false)
    }
}

/// A finite patch `{x in L : |x| <= R, x* in W + shift}`.
#[derive(Clone, Debug)]
pub struct ModelSetPatch {
    points: Vec<Cyc8>,
    index: HashSet<Cyc8>,
    radius: f64,
    scheme: SchemeConfig,
}

impl ModelSetPatch {
    pub fn points(&self) -> &[Cyc8] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, x: &Cyc8) -> bool {
        self.index.contains(x)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn scheme(&self) -> &SchemeConfig {
        &self.scheme
    }

    /// `|patch| / (pi R^2)`.
    pub fn density(&self) -> f64 {
        self.points.len() as f64 / self.area()
    }

    fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Point {
            coeffs: [i64; 4],
            phys: [f64; 2],
            int: [f64; 2],
        }
        #[derive(Serialize)]
        struct Repr<'a> {
            radius: f64,
            window: &'a Polyomino,
            points: Vec<Point>,
        }
        let repr = Repr {
            radius: self.radius,
            window: &self.scheme.window,
            points: self
                .points
                .iter()
                .map(|x| Point {
                    coeffs: x.0,
                    phys: x.embed_physical(),
                    int: x.embed_internal(),
                })
                .collect(),
        };
        serde_json::to_string(&repr).expect("patches always serialise")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("a,b,c,d,px,py,ix,iy\n");
        for x in &self.points {
            let [a, b, c, d] = x.0;
            let p = x.embed_physical();
            let q = x.embed_internal();
            out.push_str(&format!(
                "{a},{b},{c},{d},{},{},{},{}\n",
                p[0], p[1], q[0], q[1]
            ));
        }
        out
    }
}

/// Enumerates every lattice point in the physical disc of radius `r` whose
/// internal image lies in the (shifted) window.
///
/// Completeness follows from `|x|^2 + |x*|^2 = 2 (a^2 + b^2 + c^2 + d^2)`:
/// all candidates lie in the coefficient ball of squared radius
/// `(r^2 + rho^2) / 2`, with `rho` the largest distance of the window from
/// the origin.
pub fn generate_model_set(scheme: &SchemeConfig, r: f64) -> Result<ModelSetPatch> {
    if !r.is_finite() || r < 0.0 {
        return Err(Error::InvalidRadius(r));
    }
    let window = WindowIndex::new(scheme);
    let rho = scheme.window.max_radius(scheme.window_shift);
    let bound = (r * r + rho * rho) / 2.0;
    let amax = bound.sqrt().floor() as i64;
    let shift = scheme.window_shift;
    let s = FRAC_1_SQRT_2;
    let r2 = r * r;

    let chunks: Result<Vec<Vec<Cyc8>>> = (-amax..=amax)
        .into_par_iter()
        .map(|a| {
            let mut found = Vec::new();
            let rem_a = bound - (a * a) as f64;
            let bmax = rem_a.max(0.0).sqrt().floor() as i64;
            for b in -bmax..=bmax {
                let rem_b = rem_a - (b * b) as f64;
                if rem_b < 0.0 {
                    continue;
                }
                let cmax = rem_b.sqrt().floor() as i64;
                for c in -cmax..=cmax {
                    let rem_c = rem_b - (c * c) as f64;
                    if rem_c < 0.0 {
                        continue;
                    }
                    let dmax = rem_c.sqrt().floor();
                    // internal x = a + s (d - b), internal y = s (b + d) - c;
                    // both are monotone in d, so the window box bounds d
                    let lo = ((window.lo[0] - a as f64) / s + b as f64)
                        .max((window.lo[1] + c as f64) / s - b as f64)
                        .max(-dmax);
                    let hi = ((window.hi[0] - a as f64) / s + b as f64)
                        .min((window.hi[1] + c as f64) / s - b as f64)
                        .min(dmax);
                    if lo > hi + 1.0 {
                        continue;
                    }
                    for d in (lo.floor() as i64 - 1)..=(hi.ceil() as i64 + 1) {
                        if (d * d) as f64 > rem_c {
                            continue;
                        }
                        let x = Cyc8::new(a, b, c, d);
                        let p = x.embed_physical();
                        if p[0] * p[0] + p[1] * p[1] > r2 {
                            continue;
                        }
                        let q = x.embed_internal();
                        if window.classify([q[0] - shift[0], q[1] - shift[1]])? {
                            found.push(x);
                        }
                    }
                }
            }
            Ok(found)
        })
        .collect();

    let mut points: Vec<Cyc8> = chunks?.into_iter().flatten().collect();
    points.sort_unstable();
    let index = points.iter().copied().collect();
    Ok(ModelSetPatch {
        points,
        index,
        radius: r,
        scheme: scheme.clone(),
    })
}

/// Limit autocorrelation coefficient `eta(z) = dens(L) * cov_W(z*)`.
pub fn autocorr_coefficient(scheme: &SchemeConfig, z: &Cyc8) -> f64 {
    scheme.lattice_density * covariogram(&scheme.window, z.embed_internal())
}

fn check_patch(patch: &ModelSetPatch) -> Result<()> {
    if patch.is_empty() || patch.radius <= 0.0 {
        return Err(Error::EmptyPointSet);
    }
    Ok(())
}

/// `|{x in patch : x + z in patch}| / (pi R^2)`.
pub fn empirical_autocorr(patch: &ModelSetPatch, z: &Cyc8) -> Result<f64> {
    check_patch(patch)?;
    let hits = patch
        .points
        .par_iter()
        .filter(|&&x| patch.contains(&(x + *z)))
        .count();
    Ok(hits as f64 / patch.area())
}

/// `|{x in patch : x + z1 in patch and x + z2 in patch}| / (pi R^2)`.
pub fn three_point_correlation(patch: &ModelSetPatch, z1: &Cyc8, z2: &Cyc8) -> Result<f64> {
    check_patch(patch)?;
    let hits = patch
        .points
        .par_iter()
        .filter(|&&x| patch.contains(&(x + *z1)) && patch.contains(&(x + *z2)))
        .count();
    Ok(hits as f64 / patch.area())
}

fn overlap_1d(lo: [f64; 3], hi: [f64; 3]) -> f64 {
    let l = lo[0].max(lo[1]).max(lo[2]);
    let h = hi[0].min(hi[1]).min(hi[2]);
    (h - l).max(0.0)
}

/// Limit three-point coefficient `dens(L) * vol(W ∩ (W - z1*) ∩ (W - z2*))`,
/// summed cell by cell.
pub fn three_point_coefficient(scheme: &SchemeConfig, z1: &Cyc8, z2: &Cyc8) -> f64 {
    let u = z1.embed_internal();
    let v = z2.embed_internal();
    let cells: Vec<[f64; 2]> = scheme
        .window
        .centres()
        .map(|(a, b)| [a as f64, b as f64])
        .collect();
    let mut vol = 0.0;
    for f in &cells {
        for g in &cells {
            if (f[0] - g[0] + u[0]).abs() >= 1.0 || (f[1] - g[1] + u[1]).abs() >= 1.0 {
                continue;
            }
            for h in &cells {
                let ox = overlap_1d(
                    [f[0] - 0.5, g[0] - u[0] - 0.5, h[0] - v[0] - 0.5],
                    [f[0] + 0.5, g[0] - u[0] + 0.5, h[0] - v[0] + 0.5],
                );
                if ox == 0.0 {
                    continue;
                }
                let oy = overlap_1d(
                    [f[1] - 0.5, g[1] - u[1] - 0.5, h[1] - v[1] - 0.5],
                    [f[1] + 0.5, g[1] - u[1] + 0.5, h[1] - v[1] + 0.5],
                );
                vol += ox * oy;
            }
        }
    }
    scheme.lattice_density * vol
}

/// A pair of difference vectors with the limit three-point coefficients of
/// two schemes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThreePointCandidate {
    pub z1: Cyc8,
    pub z2: Cyc8,
    pub first: f64,
    pub second: f64,
}

impl ThreePointCandidate {
    pub fn gap(&self) -> f64 {
        (self.first - self.second).abs()
    }
}

/// Pairs `z1 < z2` with coefficients in `[-bound, bound]`, physical length at
/// most `max_norm` and positive two-point coefficient, ranked by decreasing
/// gap between the limit three-point coefficients of `a` and `b`. Ties keep
/// lexicographic order.
pub fn three_point_search(
    a: &SchemeConfig,
    b: &SchemeConfig,
    bound: i64,
    max_norm: f64,
) -> Result<Vec<ThreePointCandidate>> {
    if bound < 0 || max_norm.is_nan() || max_norm < 0.0 {
        return Err(Error::InvalidParameter("bound and max_norm must be non-negative".into()));
    }
    let r = -bound..=bound;
    let mut zs = Vec::new();
    for i in r.clone() {
        for j in r.clone() {
            for k in r.clone() {
                for l in r.clone() {
                    let z = Cyc8::new(i, j, k, l);
                    let p = z.embed_physical();
                    if z != Cyc8::ZERO && p[0].hypot(p[1]) <= max_norm && autocorr_coefficient(a, &z) > 0.0 {
                        zs.push(z);
                    }
                }
            }
        }
    }
    let mut out: Vec<ThreePointCandidate> = (0..zs.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let zs = &zs;
            (i + 1..zs.len()).map(move |j| ThreePointCandidate {
                z1: zs[i],
                z2: zs[j],
                first: three_point_coefficient(a, &zs[i], &zs[j]),
                second: three_point_coefficient(b, &zs[i], &zs[j]),
            })
        })
        .collect();
    out.sort_by(|x, y| y.gap().total_cmp(&x.gap()).then((x.z1, x.z2).cmp(&(y.z1, y.z2))));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointset::FinitePointSet;

    #[test]
    fn three_point_search_ranks_by_gap() {
        let c = three_point_search(&SchemeConfig::p1(), &SchemeConfig::p2(), 1, 1.5).unwrap();
        assert!(!c.is_empty());
        assert!(c.windows(2).all(|w| w[0].gap() >= w[1].gap()));
        assert!(c[0].gap() > 0.2);
        let again = three_point_search(&SchemeConfig::p1(), &SchemeConfig::p2(), 1, 1.5).unwrap();
        assert_eq!(c, again);
        assert!(three_point_search(&SchemeConfig::p1(), &SchemeConfig::p2(), -1, 1.0).is_err());
    }

    #[test]
    fn zero_radius() {
        let patch = generate_model_set(&SchemeConfig::p1(), 0.0).unwrap();
        assert!(patch.len() <= 1);
        assert!(generate_model_set(&SchemeConfig::p1(), -1.0).is_err());
        assert!(generate_model_set(&SchemeConfig::p1(), f64::NAN).is_err());
    }

    #[test]
    fn matches_naive_enumeration_at_small_radius() {
        let scheme = SchemeConfig::p1();
        let r = 6.0;
        let patch = generate_model_set(&scheme, r).unwrap();
        let mut naive = Vec::new();
        let w: Vec<(i64, i64)> = scheme.window.centres().collect();
        for a in -12..=12 {
            for b in -12..=12 {
                for c in -12..=12 {
                    for d in -12..=12 {
                        let x = Cyc8::new(a, b, c, d);
                        let p = x.embed_physical();
                        if p[0].hypot(p[1]) > r {
                            continue;
                        }
                        let q = x.embed_internal();
                        let cx = (q[0] - scheme.window_shift[0] + 0.5).floor() as i64;
                        let cy = (q[1] - scheme.window_shift[1] + 0.5).floor() as i64;
                        if w.contains(&(cx, cy)) {
                            naive.push(x);
                        }
                    }
                }
            }
        }
        naive.sort_unstable();
        assert_eq!(patch.points(), &naive[..]);
        assert!(!naive.is_empty());
    }

    #[test]
    fn boundary_hit_is_rejected() {
        // unshifted windows put integer internal coordinates on cell edges
        let scheme = SchemeConfig::p1().with_shift([0.5, 0.5]);
        let err = generate_model_set(&scheme, 5.0).unwrap_err();
        assert!(matches!(err, Error::NonGenericWindow { .. }));
        assert!(err.to_string().contains("perturb window_shift"));
    }

    #[test]
    fn patches_are_monotone_in_radius() {
        let scheme = SchemeConfig::p2();
        let small = generate_model_set(&scheme, 12.0).unwrap();
        let large = generate_model_set(&scheme, 20.0).unwrap();
        assert!(small.points().iter().all(|x| large.contains(x)));
        assert!(large.len() > small.len());
    }

    #[test]
    fn patch_invariants() {
        let scheme = SchemeConfig::p1();
        let patch = generate_model_set(&scheme, 15.0).unwrap();
        let mut sorted = patch.points().to_vec();
        sorted.dedup();
        assert_eq!(sorted.len(), patch.len());
        for x in patch.points() {
            let p = x.embed_physical();
            assert!(p[0].hypot(p[1]) <= 15.0);
        }
    }

    #[test]
    fn windows_give_different_patches() {
        let a = generate_model_set(&SchemeConfig::p1(), 30.0).unwrap();
        let b = generate_model_set(&SchemeConfig::p2(), 30.0).unwrap();
        let only_a = a.points().iter().filter(|x| !b.contains(x)).count();
        assert!(only_a as f64 / a.len() as f64 > 0.05);
    }

    #[test]
    fn set_difference_is_a_model_set() {
        let a = generate_model_set(&SchemeConfig::p1(), 30.0).unwrap();
        let b = generate_model_set(&SchemeConfig::p2(), 30.0).unwrap();
        let (f1, f2) = crate::pointset::canonical_pair();
        let diff: FinitePointSet = f1.difference(&f2);
        let scheme = SchemeConfig::new(Polyomino::new(diff).unwrap());
        let c = generate_model_set(&scheme, 30.0).unwrap();
        let only_a: Vec<Cyc8> = a.points().iter().copied().filter(|x| !b.contains(x)).collect();
        assert_eq!(only_a, c.points());
    }

    #[test]
    fn autocorr_coefficient_examples() {
        let (s1, s2) = (SchemeConfig::p1(), SchemeConfig::p2());
        assert!((autocorr_coefficient(&s1, &Cyc8::ZERO) - 3.75).abs() < 1e-12);
        // internal image far outside the covariogram support
        let far = Cyc8::new(0, 10, -10, -10);
        let q = far.embed_internal();
        assert!(q[0].hypot(q[1]) > s1.window.diameter() + SQRT_2);
        assert_eq!(autocorr_coefficient(&s1, &far), 0.0);
        for a in -2..=2 {
            for b in -2..=2 {
                for c in -2..=2 {
                    for d in -2..=2 {
                        let z = Cyc8::new(a, b, c, d);
                        assert_eq!(autocorr_coefficient(&s1, &z), autocorr_coefficient(&s2, &z));
                    }
                }
            }
        }
    }

    #[test]
    fn empirical_autocorr_examples() {
        let patch = generate_model_set(&SchemeConfig::p1(), 20.0).unwrap();
        let at0 = empirical_autocorr(&patch, &Cyc8::ZERO).unwrap();
        assert_eq!(at0, patch.density());
        assert_eq!(empirical_autocorr(&patch, &Cyc8::new(100, 0, 0, 0)).unwrap(), 0.0);
        let z = Cyc8::new(0, 1, 0, -1);
        let z2 = three_point_correlation(&patch, &z, &z).unwrap();
        assert_eq!(z2, empirical_autocorr(&patch, &z).unwrap());
        assert_eq!(
            three_point_correlation(&patch, &Cyc8::ZERO, &Cyc8::ZERO).unwrap(),
            patch.density()
        );
        let empty = generate_model_set(&SchemeConfig::p1(), 0.0).unwrap();
        assert!(empirical_autocorr(&empty, &Cyc8::ZERO).is_err());
    }

    #[test]
    fn three_point_coefficient_reduces_to_two_point() {
        let s = SchemeConfig::p1();
        for z in [Cyc8::ZERO, Cyc8::ONE, Cyc8::new(1, -1, 0, 1), Cyc8::new(0, 1, 1, 0)] {
            let two = autocorr_coefficient(&s, &z);
            assert!((three_point_coefficient(&s, &z, &z) - two).abs() < 1e-12);
            assert!((three_point_coefficient(&s, &Cyc8::ZERO, &z) - two).abs() < 1e-12);
        }
    }

    #[test]
    fn exports() {
        let patch = generate_model_set(&SchemeConfig::p1(), 3.0).unwrap();
        let csv = patch.to_csv();
        assert!(csv.starts_with("a,b,c,d,px,py,ix,iy\n"));
        assert_eq!(csv.lines().count(), patch.len() + 1);
        let v: serde_json::Value = serde_json::from_str(&patch.to_json()).unwrap();
        assert_eq!(v["radius"], 3.0);
        assert_eq!(v["window"]["dim"], 2);
        assert_eq!(v["points"].as_array().unwrap().len(), patch.len());
    }
}
