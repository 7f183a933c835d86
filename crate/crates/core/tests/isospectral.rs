//! Fixed diffraction, varying entropy: Bernoullisations of Rudin-Shapiro
//! share a flat spectrum while their block entropies move with `p`.

use std::collections::HashMap;

use homometry_core::estimators::{binned_periodogram, block_entropy, empirical_autocorr};
use homometry_core::sequences::{bernoullise, rs_fixed_point, RandomSpec, WeightedComb};
use homometry_core::tensor::{
    brute_force_autocorr, product_comb, rank_k_bernoullise, ProductComb,
};

const N: usize = 1 << 20;
const L: usize = 10;

fn max_dev_from_one(s: &WeightedComb, bins: usize) -> f64 {
    binned_periodogram(s, bins)
        .unwrap()
        .iter()
        .fold(0.0, |m, b| m.max((b.value - 1.0).abs()))
}

/// `H_L / L` of the Bernoullisation of `s`, computed from the block
/// frequencies of `s`: each block `w` turns into `z` with probability
/// `p^agree (1 - p)^(L - agree)`.
fn mixture_entropy(s: &WeightedComb, p: f64) -> f64 {
    let w = s.weights();
    let mut freq: HashMap<u32, f64> = HashMap::new();
    let total = (w.len() - L + 1) as f64;
    for block in w.windows(L) {
        let code = block.iter().fold(0u32, |c, &x| (c << 1) | u32::from(x > 0.0));
        *freq.entry(code).or_default() += 1.0 / total;
    }
    let mut h = 0.0;
    for z in 0u32..(1 << L) {
        let q: f64 = freq
            .iter()
            .map(|(&b, &f)| {
                let agree = L as i32 - (b ^ z).count_ones() as i32;
                f * p.powi(agree) * (1.0 - p).powi(L as i32 - agree)
            })
            .sum();
        if q > 0.0 {
            h -= q * q.ln();
        }
    }
    h / L as f64
}

#[test]
fn bernoullised_rs_flat_spectrum_and_ordered_entropies() {
    let rs = rs_fixed_point(N).unwrap();
    let mut entropies = Vec::new();
    for p in [0.5, 0.75, 1.0] {
        let s = bernoullise(&rs, &RandomSpec::new(p, 0).unwrap()).unwrap();
        // 64 bins of 32768 ordinates: relative sd about 0.0055 per bin
        let dev = max_dev_from_one(&s, 64);
        assert!(dev < 0.03, "p = {p}: bin average off by {dev}");
        let h = block_entropy(&s, L).unwrap();
        let oracle = mixture_entropy(&rs, p);
        assert!((h - oracle).abs() < 0.005, "p = {p}: {h} vs mixture {oracle}");
        entropies.push(h);
    }
    assert!(entropies[0] > entropies[1] && entropies[1] > entropies[2], "{entropies:?}");
}

#[test]
fn mixture_oracle_endpoints() {
    let rs = rs_fixed_point(1 << 17).unwrap();
    assert!((mixture_entropy(&rs, 0.5) - std::f64::consts::LN_2).abs() < 1e-12);
    let direct = block_entropy(&rs, L).unwrap();
    assert!((mixture_entropy(&rs, 1.0) - direct).abs() < 1e-12);
}

fn rs_square(n: usize) -> ProductComb {
    let rs = rs_fixed_point(n).unwrap();
    product_comb(vec![rs.clone(), rs]).unwrap()
}

#[test]
fn rank_two_family_in_the_plane() {
    let base = rs_square(1 << 17);
    let mut entropies = Vec::new();
    for p in [0.5, 1.0] {
        let c = rank_k_bernoullise(&base, 2, &RandomSpec::new(p, 0).unwrap()).unwrap();
        for axis in 0..2 {
            let line = c.line(axis, &[5, -3]).unwrap();
            // 16 bins of 16384 ordinates: relative sd about 0.008 per bin
            let dev = max_dev_from_one(&line, 16);
            assert!(dev < 0.04, "p = {p}, axis {axis}: {dev}");
            entropies.push((p, axis, block_entropy(&line, L).unwrap()));
        }
    }
    let fair: Vec<f64> = entropies.iter().filter(|e| e.0 == 0.5).map(|e| e.2).collect();
    let det: Vec<f64> = entropies.iter().filter(|e| e.0 == 1.0).map(|e| e.2).collect();
    for (f, d) in fair.iter().zip(&det) {
        assert!(f - d > 0.2, "{entropies:?}");
    }
}

#[test]
fn rank_two_small_box_autocorrelation() {
    let base = rs_square(128);
    let c = rank_k_bernoullise(&base, 2, &RandomSpec::new(0.5, 0).unwrap()).unwrap();
    let g = c.materialise().unwrap();
    // 65536 i.i.d. signs: sd 1/256
    for m in [[1, 0], [0, 1], [2, 3], [-5, 7]] {
        let v = brute_force_autocorr(&g, &m);
        assert!(v.abs() <= 3.0 / 256.0, "{m:?}: {v}");
    }
    assert_eq!(brute_force_autocorr(&g, &[0, 0]), 1.0);
}

#[test]
fn rank_one_flips_only_depend_on_the_first_coordinate() {
    let base = rs_square(64);
    let c = rank_k_bernoullise(&base, 1, &RandomSpec::new(0.5, 4).unwrap()).unwrap();
    // along axis 2 the line is a fixed sign times rs
    let rs = rs_fixed_point(64).unwrap();
    for x1 in [-7, 0, 12] {
        let line = c.line(1, &[x1, 0]).unwrap();
        assert!(line == rs || line == rs.negated(), "x1 = {x1}");
        assert_eq!(
            empirical_autocorr(&line, 3).unwrap().value,
            empirical_autocorr(&rs, 3).unwrap().value
        );
    }
}
