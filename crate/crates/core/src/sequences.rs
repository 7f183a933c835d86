//! Binary combs on `Z`: the Rudin-Shapiro chain, Bernoulli combs and
//! their Bernoullisations, with the exact limit autocorrelations.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Letter {
    A,
    B,
    C,
    D,
}

impl Letter {
    /// Image under the four-letter Rudin-Shapiro substitution.
    pub fn image(self) -> [Letter; 2] {
        use Letter::*;
        match self {
            A => [A, C],
            B => [D, C],
            C => [A, B],
            D => [D, B],
        }
    }

    /// The sign morphism `a, c -> +1`, `b, d -> -1`.
    pub fn sign(self) -> f64 {
        match self {
            Letter::A | Letter::C => 1.0,
            Letter::B | Letter::D => -1.0,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::B => 'b',
            Letter::C => 'c',
            Letter::D => 'd',
        }
    }
}

pub fn parse_word(s: &str) -> Result<Vec<Letter>> {
    s.chars()
        .map(|ch| match ch {
            'a' => Ok(Letter::A),
            'b' => Ok(Letter::B),
            'c' => Ok(Letter::C),
            'd' => Ok(Letter::D),
            other => Err(Error::InvalidParameter(format!("letter {other:?} not in {{a,b,c,d}}"))),
        })
        .collect()
}

pub fn word_to_string(w: &[Letter]) -> String {
    w.iter().map(|l| l.as_char()).collect()
}

pub fn rs_substitute(word: &[Letter]) -> Vec<Letter> {
    word.iter().flat_map(|l| l.image()).collect()
}

/// Finite window of real weights on consecutive integers `lo, lo+1, ...`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedComb {
    lo: i64,
    weights: Vec<f64>,
}

impl WeightedComb {
    pub fn new(lo: i64, weights: Vec<f64>) -> Self {
        WeightedComb { lo, weights }
    }

    /// Index of the first weight.
    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// One past the last index.
    pub fn hi(&self) -> i64 {
        self.lo + self.weights.len() as i64
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight at index `i`, zero outside the window.
    pub fn get(&self, i: i64) -> f64 {
        let off = i - self.lo;
        if off < 0 || off >= self.weights.len() as i64 {
            0.0
        } else {
            self.weights[off as usize]
        }
    }

    pub fn indices(&self) -> std::ops::Range<i64> {
        self.lo..self.hi()
    }

    pub fn ensure_binary(&self) -> Result<()> {
        match self.weights.iter().position(|w| w.abs() != 1.0) {
            None => Ok(()),
            Some(off) => Err(Error::NotBinary {
                index: self.lo + off as i64,
                weight: self.weights[off],
            }),
        }
    }

    pub fn negated(&self) -> WeightedComb {
        WeightedComb::new(self.lo, self.weights.iter().map(|w| -w).collect())
    }

    /// Restriction to `[lo, hi)`, which must lie inside the window.
    pub fn restrict(&self, lo: i64, hi: i64) -> Option<WeightedComb> {
        if lo < self.lo || hi > self.hi() || lo > hi {
            return None;
        }
        let a = (lo - self.lo) as usize;
        let b = (hi - self.lo) as usize;
        Some(WeightedComb::new(lo, self.weights[a..b].to_vec()))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.len() * 12 + 16);
        out.push_str("index,weight\n");
        for (i, w) in self.indices().zip(&self.weights) {
            out.push_str(&format!("{i},{w}\n"));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomSpec {
    p: f64,
    seed: u64,
}

impl RandomSpec {
    pub fn new(p: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        Ok(RandomSpec { p, seed })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The sign `Y` attached to a lattice index.
    pub fn sign(&self, index: &[i64]) -> f64 {
        rng::sign(self.seed, self.p, index)
    }
}

/// Two-sided fixed point of the squared substitution with seed `b.a`,
/// mapped to signs on `[-n, n)`.
pub fn rs_fixed_point(n: usize) -> Result<WeightedComb> {
    if n == 0 {
        return Err(Error::InvalidParameter("rs_fixed_point needs n >= 1".into()));
    }
    let mut left = vec![Letter::B];
    let mut right = vec![Letter::A];
    while left.len() < n || right.len() < n {
        left = rs_substitute(&rs_substitute(&left));
        right = rs_substitute(&rs_substitute(&right));
    }
    let weights = left[left.len() - n..]
        .iter()
        .chain(&right[..n])
        .map(|l| l.sign())
        .collect();
    Ok(WeightedComb::new(-(n as i64), weights))
}

/// Rudin-Shapiro sign from the binary digits of `n`: `(-1)` to the number
/// of adjacent `11` pairs. Negative `n` are read in 64-bit two's complement.
pub fn rs_digit_oracle(n: i64) -> f64 {
    let u = n as u64;
    if (u & (u >> 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// I.i.d. signs on `[-n, n)`.
pub fn bernoulli_comb(spec: &RandomSpec, n: usize) -> WeightedComb {
    let lo = -(n as i64);
    let weights = (lo..n as i64)
        .into_par_iter()
        .map(|m| spec.sign(&[m]))
        .collect();
    WeightedComb::new(lo, weights)
}

/// Multiplies every weight by an independent sign that is `+1` with
/// probability `p`.
pub fn bernoullise(s: &WeightedComb, spec: &RandomSpec) -> Result<WeightedComb> {
    s.ensure_binary()?;
    let weights = s
        .weights
        .par_iter()
        .enumerate()
        .map(|(off, &w)| w * spec.sign(&[s.lo + off as i64]))
        .collect();
    Ok(WeightedComb::new(s.lo, weights))
}

/// Limit autocorrelation models.
#[derive(Clone, Debug, PartialEq)]
pub enum AutocorrModel {
    Bernoulli { p: f64 },
    RudinShapiro,
    /// Bernoullisation with parameter `p` of a comb whose coefficients are
    /// given by `base`.
    Bernoullised { p: f64, base: Box<AutocorrModel> },
}

impl fmt::Display for AutocorrModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AutocorrModel::Bernoulli { p } => write!(f, "bernoulli(p={p})"),
            AutocorrModel::RudinShapiro => write!(f, "rs"),
            AutocorrModel::Bernoullised { p, base } => write!(f, "bernoullised(p={p}, {base})"),
        }
    }
}

pub fn theoretical_autocorr(model: &AutocorrModel, m: i64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    match model {
        AutocorrModel::Bernoulli { p } => (2.0 * p - 1.0).powi(2),
        AutocorrModel::RudinShapiro => 0.0,
        AutocorrModel::Bernoullised { p, base } => (2.0 * p - 1.0).powi(2) * theoretical_autocorr(base, m),
    }
}

/// Binary entropy in nats.
pub fn entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    let term = |q: f64| if q == 0.0 { 0.0 } else { -q * q.ln() };
    Ok(term(p) + term(1.0 - p))
}

/// Contributions to `sum_i Z_i Z_{i-m}`, `Z = S Y`, grouped by the sign
/// pair `(S_i, S_{i-m})`. Each group sums `Y_i Y_{i-m}` only.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SignPairSums {
    pub plus_plus: i64,
    pub minus_minus: i64,
    pub plus_minus: i64,
    pub minus_plus: i64,
}

impl SignPairSums {
    pub fn recombine(&self) -> i64 {
        self.plus_plus + self.minus_minus - self.plus_minus - self.minus_plus
    }
}

/// Splits the lag-`m` correlation sum of the Bernoullisation of `s` by `y`
/// over the window of `s`; both combs must be binary on the same window.
pub fn sign_pair_sums(s: &WeightedComb, y: &WeightedComb, m: i64) -> Result<SignPairSums> {
    s.ensure_binary()?;
    y.ensure_binary()?;
    if s.lo != y.lo || s.len() != y.len() {
        return Err(Error::InvalidParameter("combs must share a window".into()));
    }
    let mut out = SignPairSums::default();
    for i in s.indices() {
        let j = i - m;
        if !(s.lo..s.hi()).contains(&j) {
            continue;
        }
        let yy = (y.get(i) * y.get(j)) as i64;
        match (s.get(i) > 0.0, s.get(j) > 0.0) {
            (true, true) => out.plus_plus += yy,
            (false, false) => out.minus_minus += yy,
            (true, false) => out.plus_minus += yy,
            (false, true) => out.minus_plus += yy,
        }
    }
    Ok(out)
}

impl FromStr for AutocorrModel {
    type Err = Error;

    /// Parses `rs`, `bernoulli:<p>` or `bernoullised:<p>` (of Rudin-Shapiro).
    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
        let p = || {
            arg.parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad probability in {s:?}")))
                .and_then(|p| RandomSpec::new(p, 0).map(|r| r.p()))
        };
        match kind {
            "rs" => Ok(AutocorrModel::RudinShapiro),
            "bernoulli" => Ok(AutocorrModel::Bernoulli { p: p()? }),
            "bernoullised" => Ok(AutocorrModel::Bernoullised {
                p: p()?,
                base: Box::new(AutocorrModel::RudinShapiro),
            }),
            _ => Err(Error::InvalidParameter(format!("unknown model {s:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Sign of the Rudin-Shapiro sequence from the parity of adjacent `11`
    /// digit pairs in the 64-bit two's-complement expansion of `n`.
    #[test]
    fn substitution_examples() {
        let w = |s| parse_word(s).unwrap();
        assert_eq!(word_to_string(&rs_substitute(&w("a"))), "ac");
        assert_eq!(word_to_string(&rs_substitute(&w("ba"))), "dcac");
        assert!(rs_substitute(&[]).is_empty());
        let b2 = rs_substitute(&rs_substitute(&w("b")));
        assert_eq!(*b2.last().unwrap(), Letter::B);
        assert!(parse_word("abx").is_err());
    }

    #[test]
    fn rs_prefix_and_left_neighbour() {
        let s = rs_fixed_point(8).unwrap();
        let right: Vec<f64> = (0..8).map(|i| s.get(i)).collect();
        assert_eq!(right, [1.0, 1.0, 1.0, -1.0, 1.0, 1.0, -1.0, 1.0]);
        assert_eq!(s.get(-1), -1.0);
        assert!(rs_fixed_point(0).is_err());
    }

    #[test]
    fn rs_matches_digit_pair_oracle() {
        let n = 1 << 16;
        let s = rs_fixed_point(n).unwrap();
        for i in s.indices() {
            assert_eq!(s.get(i), rs_digit_oracle(i), "index {i}");
        }
    }

    #[test]
    fn rs_windows_are_prefix_consistent_and_deterministic() {
        let a = rs_fixed_point(300).unwrap();
        let b = rs_fixed_point(600).unwrap();
        assert_eq!(b.restrict(-300, 300).unwrap(), a);
        assert_eq!(rs_fixed_point(600).unwrap(), b);
    }

    #[test]
    fn bernoulli_endpoints_and_reproducibility() {
        let one = bernoulli_comb(&RandomSpec::new(1.0, 5).unwrap(), 100);
        assert!(one.weights().iter().all(|&w| w == 1.0));
        let zero = bernoulli_comb(&RandomSpec::new(0.0, 5).unwrap(), 100);
        assert!(zero.weights().iter().all(|&w| w == -1.0));
        let spec = RandomSpec::new(0.3, 17).unwrap();
        let small = bernoulli_comb(&spec, 1000);
        let large = bernoulli_comb(&spec, 5000);
        assert_eq!(large.restrict(-1000, 1000).unwrap(), small);
        assert!(RandomSpec::new(1.5, 0).is_err());
        assert!(RandomSpec::new(-0.1, 0).is_err());
    }

    #[test]
    fn fair_coin_mean() {
        let n = 1 << 20;
        let c = bernoulli_comb(&RandomSpec::new(0.5, 0).unwrap(), n);
        let mean = c.weights().iter().sum::<f64>() / c.len() as f64;
        assert!(mean.abs() <= 3.0 / ((2 * n) as f64).sqrt(), "{mean}");
    }

    #[test]
    fn bernoullise_endpoints() {
        let s = rs_fixed_point(512).unwrap();
        assert_eq!(bernoullise(&s, &RandomSpec::new(1.0, 3).unwrap()).unwrap(), s);
        assert_eq!(bernoullise(&s, &RandomSpec::new(0.0, 3).unwrap()).unwrap(), s.negated());
        let bad = WeightedComb::new(0, vec![1.0, 0.5]);
        assert!(matches!(
            bernoullise(&bad, &RandomSpec::new(0.5, 0).unwrap()),
            Err(Error::NotBinary { index: 1, .. })
        ));
    }

    #[test]
    fn theoretical_values() {
        let rs = AutocorrModel::RudinShapiro;
        assert_eq!(theoretical_autocorr(&AutocorrModel::Bernoulli { p: 0.5 }, 3), 0.0);
        assert_eq!(theoretical_autocorr(&AutocorrModel::Bernoulli { p: 0.75 }, 3), 0.25);
        assert_eq!(theoretical_autocorr(&rs, 7), 0.0);
        assert_eq!(theoretical_autocorr(&rs, 0), 1.0);
        let b = AutocorrModel::Bernoullised { p: 0.75, base: Box::new(rs) };
        assert_eq!(theoretical_autocorr(&b, 5), 0.0);
        assert_eq!(theoretical_autocorr(&b, 0), 1.0);
        let bb = AutocorrModel::Bernoullised {
            p: 0.25,
            base: Box::new(AutocorrModel::Bernoulli { p: 1.0 }),
        };
        assert_eq!(theoretical_autocorr(&bb, 2), 0.25);
        assert_eq!("bernoullised:0.75".parse::<AutocorrModel>().unwrap(), b);
        assert!("bernoulli:2".parse::<AutocorrModel>().is_err());
    }

    #[test]
    fn entropy_values() {
        assert!((entropy(0.5).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(entropy(0.0).unwrap(), 0.0);
        assert_eq!(entropy(1.0).unwrap(), 0.0);
        // -(1/4) ln(1/4) - (3/4) ln(3/4)
        assert!((entropy(0.25).unwrap() - 0.562335).abs() < 1e-6);
        assert!(entropy(1.1).is_err());
    }

    proptest! {
        #[test]
        fn sign_pair_split_recombines(
            s in prop::collection::vec(any::<bool>(), 2..200),
            seed in any::<u64>(),
            m in -20i64..20,
        ) {
            let n = s.len();
            let s = WeightedComb::new(-3, s.into_iter().map(|b| if b { 1.0 } else { -1.0 }).collect());
            let y = WeightedComb::new(-3, (0..n as i64).map(|i| rng::sign(seed, 0.5, &[i - 3])).collect());
            let sums = sign_pair_sums(&s, &y, m).unwrap();
            let z: Vec<f64> = s.weights().iter().zip(y.weights()).map(|(a, b)| a * b).collect();
            let z = WeightedComb::new(-3, z);
            let direct: i64 = z.indices().map(|i| (z.get(i) * z.get(i - m)) as i64).sum();
            prop_assert_eq!(sums.recombine(), direct);
        }
    }
}
