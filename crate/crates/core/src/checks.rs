//! Numbered end-to-end checks of the library's headline claims, each with a
//! fixed tolerance, seed and runtime budget. Shared by the acceptance test
//! target and the `check` subcommand of the CLI.

use std::f64::consts::{LN_2, SQRT_2};
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::covariogram::{covariogram, covariogram_oracle, covariogram_scaled, Polyomino};
use crate::error::{Error, Result};
use crate::estimators::{
    binned_periodogram, block_entropy, conditional_block_entropy, empirical_autocorr as comb_autocorr,
    periodogram_average,
};
use crate::octagonal::{
    additivity_witness, amplitude_ratio, autocorr_coefficient, basis_matrix, determinant,
    diffraction_amplitude, diffraction_intensity, empirical_autocorr, generate_model_set, mld_check,
    ratio_parts, three_point_correlation, three_point_search, Cyc8, HalfCyc8, SchemeConfig,
    MLD_TRANSLATION,
};
use crate::pointset::{canonical_pair, difference_multiset, FinitePointSet, IntPoint};
use crate::rng;
use crate::sequences::{
    bernoulli_comb, bernoullise, entropy, rs_digit_oracle, rs_fixed_point, RandomSpec,
};
use crate::tensor::{
    brute_force_autocorr, brute_force_correlation_sum, product_autocorr, product_comb,
    product_correlation_sum, rank_k_bernoullise,
};

/// Half-length of the one-dimensional windows.
pub const SEQ_N: usize = 1 << 20;
/// Patch radius for model-set estimates.
pub const PATCH_R: f64 = 50.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub summary: String,
    /// Extra measurements that do not affect the verdict.
    pub notes: Vec<String>,
    pub seconds: f64,
}

struct Outcome {
    pass: bool,
    summary: String,
    notes: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, summary: String) -> Self {
        Outcome {
            pass,
            summary,
            notes: Vec::new(),
        }
    }
}

pub struct Check {
    pub id: usize,
    pub name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Result<Outcome>,
}

const CHECKS: &[Check] = &[
    Check { id: 1, name: "finite-homometry", budget: Some(Duration::from_millis(100)), run: finite_homometry },
    Check { id: 2, name: "covariogram-equality", budget: Some(Duration::from_secs(5)), run: covariogram_equality },
    Check { id: 3, name: "covariogram-scaling", budget: None, run: covariogram_scaling },
    Check { id: 4, name: "model-set-density", budget: Some(Duration::from_secs(30)), run: model_set_density },
    Check { id: 5, name: "two-point-law", budget: None, run: two_point_law },
    Check { id: 6, name: "model-set-homometry", budget: None, run: model_set_homometry },
    Check { id: 7, name: "amplitude-ratio", budget: None, run: ratio_check },
    Check { id: 8, name: "mld-witness", budget: None, run: mld },
    Check { id: 9, name: "three-point-discrimination", budget: None, run: three_point },
    Check { id: 10, name: "rs-construction", budget: None, run: rs_construction },
    Check { id: 11, name: "rs-autocorrelation", budget: None, run: rs_autocorrelation },
    Check { id: 12, name: "bernoulli-law", budget: None, run: bernoulli_law },
    Check { id: 13, name: "bernoullised-homometry", budget: None, run: bernoullised_homometry },
    Check { id: 14, name: "entropy-separation", budget: None, run: entropy_separation },
    Check { id: 15, name: "tensor-factorisation", budget: None, run: tensor_factorisation },
];

pub fn checks() -> &'static [Check] {
    CHECKS
}

/// Runs check `id`. Errors inside the check count as failures.
pub fn run_check(id: usize) -> Result<CheckReport> {
    let c = CHECKS
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| Error::InvalidParameter(format!("no check with id {id} (1..={})", CHECKS.len())))?;
    let start = Instant::now();
    let outcome = (c.run)();
    let elapsed = start.elapsed();
    let mut out = match outcome {
        Ok(o) => o,
        Err(e) => Outcome::new(false, format!("error: {e}")),
    };
    if let Some(b) = c.budget {
        if elapsed > b {
            out.pass = false;
            out.summary.push_str(&format!("; over budget {:.3}s > {:.3}s", elapsed.as_secs_f64(), b.as_secs_f64()));
        }
    }
    Ok(CheckReport {
        id: c.id,
        name: c.name,
        pass: out.pass,
        summary: out.summary,
        notes: out.notes,
        seconds: elapsed.as_secs_f64(),
    })
}

impl CheckReport {
    /// One-line verdict. Leaves out the runtime so that repeated runs print
    /// the same text.
    pub fn line(&self) -> String {
        format!(
            "[{}] {:02} {}: {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.summary
        )
    }
}

fn max_abs(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, |m, v| m.max(v.abs()))
}

fn grid_49() -> Vec<[f64; 2]> {
    (0..49)
        .flat_map(|i| (0..49).map(move |j| [-6.0 + 0.25 * i as f64, -6.0 + 0.25 * j as f64]))
        .collect()
}

fn finite_homometry() -> Result<Outcome> {
    let (f1, f2) = canonical_pair();
    let d1 = difference_multiset(&f1)?;
    let d2 = difference_multiset(&f2)?;
    let zero = d1.multiplicity(&IntPoint::zero(2));
    let pass = d1 == d2 && f1 != f2 && d1.total() == 225 && zero == 15;
    Ok(Outcome::new(
        pass,
        format!("multisets equal: {}, total {}, zero lag {}", d1 == d2, d1.total(), zero),
    ))
}

fn covariogram_equality() -> Result<Outcome> {
    let (p1, p2) = (Polyomino::p1(), Polyomino::p2());
    let diff = max_abs(grid_49().iter().map(|&x| covariogram(&p1, x) - covariogram(&p2, x)));
    let at_zero = covariogram(&p1, [0.0, 0.0]);
    let mut oracle_err: f64 = 0.0;
    for i in 0..20i64 {
        let x = [
            -5.0 + 10.0 * rng::uniform(0, &[i, 0]),
            -5.0 + 10.0 * rng::uniform(0, &[i, 1]),
        ];
        oracle_err = oracle_err.max((covariogram_oracle(&p1, x, 256)? - covariogram(&p1, x)).abs());
    }
    let pass = diff <= 1e-12 && at_zero == 15.0 && oracle_err <= 0.05;
    Ok(Outcome::new(
        pass,
        format!("max |cov1 - cov2| = {diff:.1e} on 49x49, cov1(0) = {at_zero}, raster oracle max error {oracle_err:.4} at 20 points"),
    ))
}

fn covariogram_scaling() -> Result<Outcome> {
    let (p1, p2) = (Polyomino::p1(), Polyomino::p2());
    let mut worst: f64 = 0.0;
    for alpha in [0.5, 1.7, SQRT_2] {
        for x in grid_49() {
            worst = worst.max((covariogram_scaled(&p1, alpha, x)? - covariogram_scaled(&p2, alpha, x)?).abs());
        }
    }
    Ok(Outcome::new(
        worst <= 1e-12,
        format!("max difference {worst:.1e} over alpha in {{0.5, 1.7, sqrt 2}}"),
    ))
}

fn model_set_density() -> Result<Outcome> {
    let dens_l = 1.0 / determinant(basis_matrix([0, 1, 2, 3])).abs();
    let expected = dens_l * Polyomino::p1().area();
    let patch = generate_model_set(&SchemeConfig::p1(), PATCH_R)?;
    let d = patch.density();
    let rel = (d - 3.75) / 3.75;
    let pass = (expected - 3.75).abs() < 1e-12 && rel.abs() <= 0.02;
    Ok(Outcome::new(
        pass,
        format!(
            "{} points, density {d:.5} (expected {expected:.5} from 1/|det B| = {dens_l:.5}), relative error {:+.3}%",
            patch.len(),
            100.0 * rel
        ),
    ))
}

/// The first `count` nonzero `z` with entries in `[-2, 2]` and positive
/// limit coefficient, ordered by physical length and then lexicographically.
fn short_vectors(scheme: &SchemeConfig, count: usize) -> Vec<Cyc8> {
    let mut zs = Vec::new();
    for a in -2..=2 {
        for b in -2..=2 {
            for c in -2..=2 {
                for d in -2..=2 {
                    let z = Cyc8::new(a, b, c, d);
                    if z != Cyc8::ZERO && autocorr_coefficient(scheme, &z) > 0.0 {
                        zs.push(z);
                    }
                }
            }
        }
    }
    let len = |z: &Cyc8| {
        let p = z.embed_physical();
        p[0].hypot(p[1])
    };
    zs.sort_by(|x, y| len(x).total_cmp(&len(y)).then(x.cmp(y)));
    zs.truncate(count);
    zs
}

fn two_point_law() -> Result<Outcome> {
    let scheme = SchemeConfig::p1();
    let patch = generate_model_set(&scheme, PATCH_R)?;
    let zs = short_vectors(&scheme, 20);
    let mut worst = (0.0f64, Cyc8::ZERO);
    for z in &zs {
        let eta = autocorr_coefficient(&scheme, z);
        let rel = (empirical_autocorr(&patch, z)? - eta) / eta;
        if rel.abs() > worst.0.abs() {
            worst = (rel, *z);
        }
    }
    Ok(Outcome::new(
        zs.len() == 20 && worst.0.abs() <= 0.03,
        format!(
            "{} vectors at R = {PATCH_R}, worst relative error {:+.3}% at z = {}",
            zs.len(),
            100.0 * worst.0,
            worst.1
        ),
    ))
}

fn model_set_homometry() -> Result<Outcome> {
    let (s1, s2) = (SchemeConfig::p1(), SchemeConfig::p2());
    let mut worst_int: f64 = 0.0;
    let mut best_amp: f64 = 0.0;
    for i in 0..100i64 {
        let c: Vec<i64> = (0..4)
            .map(|j| (rng::uniform(0, &[i, j]) * 13.0).floor() as i64 - 6)
            .collect();
        let k = HalfCyc8::new(Cyc8::new(c[0], c[1], c[2], c[3]));
        worst_int = worst_int.max((diffraction_intensity(&s1, &k) - diffraction_intensity(&s2, &k)).abs());
        let (a1, a2) = (diffraction_amplitude(&s1, &k), diffraction_amplitude(&s2, &k));
        if a1.norm() > 1e-9 {
            best_amp = best_amp.max((a1 - a2).norm() / a1.norm());
        }
    }
    Ok(Outcome::new(
        worst_int <= 1e-10 && best_amp > 0.1,
        format!("100 sampled k: max intensity difference {worst_int:.1e}, max relative amplitude difference {best_amp:.3}"),
    ))
}

fn ratio_check() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut regular = 0;
    for i in 0..100 {
        for j in 0..100 {
            if let Some(r) = amplitude_ratio([i as f64 / 100.0, j as f64 / 100.0]).value() {
                regular += 1;
                worst = worst.max((r.norm() - 1.0).abs());
            }
        }
    }
    let mut singular_ok = true;
    for n in -1..=1 {
        for m in -1..=1 {
            for frac in [1.0 / 3.0, 2.0 / 3.0] {
                for eps in [0.0, 1e-11, -1e-11] {
                    let y = [n as f64 + eps, m as f64 + frac - eps];
                    singular_ok &= amplitude_ratio(y).is_singular();
                }
            }
        }
    }
    let (num, den) = ratio_parts([0.0, 1.0 / 3.0]);
    let both_small = num.norm() < 1e-9 && den.norm() < 1e-9;
    let (witness, violation) = match additivity_witness() {
        Ok(w) => (format!("y = {:?}, y' = {:?}", w.y, w.y_prime), w.violation),
        Err(_) => ("none".to_string(), 0.0),
    };
    Ok(Outcome::new(
        regular == 10_000 && worst <= 1e-9 && singular_ok && both_small && violation > 0.05,
        format!(
            "{regular} regular points, max ||r| - 1| = {worst:.1e}; singular near Z x (Z + 1/3, 2/3): {singular_ok}; \
             |num|, |den| at (0, 1/3) = {:.1e}, {:.1e}; witness {witness} violation {violation:.3}",
            num.norm(),
            den.norm()
        ),
    ))
}

fn mld() -> Result<Outcome> {
    let unit = FinitePointSet::planar(&[(0, 0)]);
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, w) in [("P1", Polyomino::p1()), ("P2", Polyomino::p2())] {
        let r = mld_check(&w, MLD_TRANSLATION);
        // P as the union of the translates f + C, f running over its cells
        let mut rebuilt = FinitePointSet::new(2)?;
        for f in w.cells().iter() {
            for c in r.intersection.iter() {
                rebuilt.insert(c.add(f))?;
            }
        }
        let ok = r.intersection == unit && &rebuilt == w.cells() && w.cells().len() == 15;
        pass &= ok && r.holds;
        parts.push(format!("{name}: intersection {} cell(s), union of {} translates: {ok}", r.intersection.len(), w.cells().len()));
    }
    Ok(Outcome::new(pass, format!("t = {MLD_TRANSLATION:?}; {}", parts.join("; "))))
}

fn three_point() -> Result<Outcome> {
    let (s1, s2) = (SchemeConfig::p1(), SchemeConfig::p2());
    let candidates = three_point_search(&s1, &s2, 3, 1.5)?;
    let radii = [40.0, 50.0, 60.0];
    let patches = radii
        .iter()
        .map(|&r| Ok((generate_model_set(&s1, r)?, generate_model_set(&s2, r)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut tried = Vec::new();
    for c in candidates.iter().take(10) {
        let mut e1 = Vec::new();
        let mut e2 = Vec::new();
        for (a, b) in &patches {
            e1.push(three_point_correlation(a, &c.z1, &c.z2)?);
            e2.push(three_point_correlation(b, &c.z1, &c.z2)?);
        }
        let spread = |v: &[f64]| v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min);
        let variation = spread(&e1).max(spread(&e2));
        let gap = (e1[1] - e2[1]).abs();
        let line = format!(
            "z1 = {}, z2 = {}: R = 50 estimates {:.4} vs {:.4} (limits {:.4} vs {:.4}), gap {gap:.4}, variation across R {variation:.4}",
            c.z1, c.z2, e1[1], e2[1], c.first, c.second
        );
        if gap > 5.0 * variation {
            let mut o = Outcome::new(true, line);
            o.notes = tried;
            return Ok(o);
        }
        tried.push(line);
    }
    let mut o = Outcome::new(false, format!("no candidate among the top {} separated", tried.len()));
    o.notes = tried;
    Ok(o)
}

fn rs_construction() -> Result<Outcome> {
    let s = rs_fixed_point(1 << 16)?;
    let head: Vec<f64> = (0..8).map(|i| s.get(i)).collect();
    let expected = [1.0, 1.0, 1.0, -1.0, 1.0, 1.0, -1.0, 1.0];
    let lim = 1i64 << 16;
    let mismatches = (-lim + 1..lim).filter(|&n| s.get(n) != rs_digit_oracle(n)).count();
    let signs: String = head.iter().map(|&w| if w > 0.0 { '+' } else { '-' }).collect();
    Ok(Outcome::new(
        head == expected && mismatches == 0,
        format!("indices 0..7: {signs}; digit-pair oracle mismatches for |n| < 2^16: {mismatches}"),
    ))
}

fn rs_autocorrelation() -> Result<Outcome> {
    let s = rs_fixed_point(SEQ_N)?;
    let worst = (1..=32)
        .map(|m| comb_autocorr(&s, m).map(|e| (m, e.value)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold((0, 0.0f64), |w, (m, v)| if v.abs() > w.1.abs() { (m, v) } else { w });
    Ok(Outcome::new(
        worst.1.abs() <= 0.01,
        format!("N = 2^20, max |autocorr| over m = 1..32 is {:.2e} at m = {}", worst.1.abs(), worst.0),
    ))
}

fn sigma_tol() -> f64 {
    3.0 / ((2 * SEQ_N + 1) as f64).sqrt()
}

fn bernoulli_law() -> Result<Outcome> {
    let tol = sigma_tol();
    let mut pass = true;
    let mut worst = (0.0f64, 0.0, 0u64, 0i64);
    let mut failures = Vec::new();
    for p in [0.0, 0.25, 0.5, 0.75, 1.0] {
        for seed in [1u64, 2, 3] {
            let s = bernoulli_comb(&RandomSpec::new(p, seed)?, SEQ_N);
            for m in 1..=8i64 {
                let v = comb_autocorr(&s, m)?.value;
                let dev = v - (2.0 * p - 1.0) * (2.0 * p - 1.0);
                if p == 0.0 || p == 1.0 {
                    // constant comb: the zero-padded sum is exactly len - m
                    let exact = (s.len() as f64 - m as f64) / s.len() as f64;
                    if v != exact {
                        pass = false;
                        failures.push(format!("p = {p} seed {seed} m = {m}: {v} != {exact}"));
                    }
                }
                if dev.abs() > worst.0.abs() {
                    worst = (dev, p, seed, m);
                }
                if dev.abs() > tol {
                    pass = false;
                    failures.push(format!("p = {p} seed {seed} m = {m}: deviation {dev:+.2e}"));
                }
            }
        }
    }
    let mut o = Outcome::new(
        pass,
        format!(
            "120 estimates, tolerance {tol:.2e}; worst deviation {:+.2e} (p = {}, seed {}, m = {}); {} failure(s)",
            worst.0,
            worst.1,
            worst.2,
            worst.3,
            failures.len()
        ),
    );
    o.notes = failures;
    Ok(o)
}

fn bernoullised_homometry() -> Result<Outcome> {
    let tol = sigma_tol();
    let rs = rs_fixed_point(SEQ_N)?;
    let mut pass = true;
    let mut parts = Vec::new();
    let mut notes = Vec::new();
    for p in [0.1, 0.5, 0.9] {
        let s = bernoullise(&rs, &RandomSpec::new(p, 0)?)?;
        let worst = (1..=32)
            .map(|m| comb_autocorr(&s, m).map(|e| e.value.abs()))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0f64, f64::max);
        let binned = binned_periodogram(&s, 512)?;
        let dev = max_abs(binned.iter().map(|b| b.value - 1.0));
        pass &= worst <= tol && dev <= 0.05;
        parts.push(format!("p = {p}: max |autocorr| {worst:.2e}, 512 bin averages max |value - 1| {dev:.4}"));
        notes.push(format!(
            "p = {p}: mean of the periodogram at the 512 points j/512 = {:.4}",
            periodogram_average(&s, 512)?
        ));
    }
    let mut o = Outcome::new(
        pass,
        format!("seed 0, tolerance {tol:.2e}; {}", parts.join("; ")),
    );
    o.notes = notes;
    Ok(o)
}

fn entropy_separation() -> Result<Outcome> {
    let rs = rs_fixed_point(SEQ_N)?;
    let det = bernoullise(&rs, &RandomSpec::new(1.0, 0)?)?;
    let fair = bernoullise(&rs, &RandomSpec::new(0.5, 0)?)?;
    let h1 = block_entropy(&det, 10)?;
    let h5 = block_entropy(&fair, 10)?;
    let ends = entropy(0.0)? == 0.0 && entropy(1.0)? == 0.0 && entropy(0.5)? == LN_2;
    let pass = h1 <= 0.18 && ((h5 - LN_2) / LN_2).abs() <= 0.05 && ends;
    let mut o = Outcome::new(
        pass,
        format!("H_10/10 at p = 1: {h1:.4} (limit 0.18); at p = 0.5: {h5:.4} (ln 2 = {LN_2:.4}); entropy endpoints exact: {ends}"),
    );
    o.notes.push(format!(
        "conditional entropy H_10 - H_9: p = 1 {:.4}, p = 0.5 {:.4}",
        conditional_block_entropy(&det, 10)?,
        conditional_block_entropy(&fair, 10)?
    ));
    Ok(o)
}

fn tensor_factorisation() -> Result<Outcome> {
    let rs = rs_fixed_point(128)?;
    let factors = vec![rs.clone(), rs];
    let grid = product_comb(factors.clone())?.materialise()?;
    let lags: [[i64; 2]; 6] = [[0, 0], [1, 0], [0, 1], [3, 5], [-7, 2], [100, -255]];
    let mut exact = true;
    for m in &lags {
        exact &= brute_force_correlation_sum(&grid, m) == product_correlation_sum(&factors, m)?;
        exact &= brute_force_autocorr(&grid, m) == product_autocorr(&factors, m)?;
    }
    // per-axis lines of the rank-1 Bernoullisation of a long rs x rs
    let long = rs_fixed_point(1 << 17)?;
    let base = product_comb(vec![long.clone(), long])?;
    let flipped = rank_k_bernoullise(&base, 1, &RandomSpec::new(0.5, 0)?)?;
    let h_axis1 = block_entropy(&flipped.line(0, &[0, 0])?, 10)?;
    let h_axis2 = block_entropy(&flipped.line(1, &[0, 0])?, 10)?;
    let pass = exact && ((h_axis1 - LN_2) / LN_2).abs() <= 0.05 && h_axis2 <= 0.18;
    Ok(Outcome::new(
        pass,
        format!(
            "256x256 brute force equals factorised sums at {} lags: {exact}; rank-1 p = 0.5 line entropies H_10/10: axis 1 {h_axis1:.4}, axis 2 {h_axis2:.4} (limits ln 2 and 0.18)",
            lags.len()
        ),
    ))
}
