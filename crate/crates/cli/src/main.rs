//! `homometry`: command-line access to the homometry library.
//!
//! Exit codes: 0 success, 1 usage, 2 domain error, 3 claim falsified.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use homometry_core::checks::{checks, run_check};
use homometry_core::covariogram::{covariogram, covariogram_grid, covariogram_scaled, Polyomino};
use homometry_core::estimators::{
    autocorr_csv, binned_periodogram, block_entropy, conditional_block_entropy, empirical_autocorr,
    entropy_csv, periodogram_average, periodogram_csv, periodogram_grid, AutocorrEstimate,
};
use homometry_core::octagonal::{
    additivity_witness, amplitude_ratio, generate_model_set, intensity_table, intensity_table_csv,
    mld_check, phase_chi, ratio_parts, three_point_correlation, three_point_search, Ratio,
    SchemeConfig, DEFAULT_WINDOW_SHIFT,
};
use homometry_core::pointset::{are_homometric, canonical_pair, difference_multiset, FinitePointSet};
use homometry_core::sequences::{
    bernoulli_comb, bernoullise, rs_fixed_point, RandomSpec, WeightedComb,
};
use homometry_core::tensor::{
    brute_force_autocorr, product_autocorr, product_comb, rank_k_bernoullise,
};
use homometry_core::Error;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "homometry", version, about = "Homometric point sets, model sets and combs")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compare the difference multisets of two finite point sets.
    Homometry(HomometryArgs),
    /// Covariogram of a polyomino window at a point or on a grid.
    Covariogram(CovariogramArgs),
    /// Model-set patch in a disc.
    Modelset(ModelsetArgs),
    /// Diffraction intensities on a ball of the half lattice.
    Diffraction(DiffractionArgs),
    /// Amplitude ratio of the two windows, or the additivity witness search.
    Ratio(RatioArgs),
    /// Single-cell intersection witness.
    Mld(MldArgs),
    /// Three-point correlations of the two model sets, ranked by the gap of
    /// their limits.
    Threepoint(ThreepointArgs),
    /// Generate a comb as `index,weight`.
    Comb(CombArgs),
    /// Empirical autocorrelation coefficients.
    Autocorr(AutocorrArgs),
    /// Periodogram on an equispaced grid in [0, 1).
    Periodogram(PeriodogramArgs),
    /// Block entropies `H_L / L`.
    Entropy(EntropyArgs),
    /// Product combs on Z^d with rank-k Bernoullisation.
    Tensor(TensorArgs),
    /// Run the numbered acceptance checks.
    Check(CheckArgs),
}

#[derive(Args)]
struct HomometryArgs {
    /// Use the built-in pair of 15-point sets.
    #[arg(long, conflicts_with_all = ["a", "b"])]
    builtin: bool,
    /// JSON point set `{"dim": d, "points": [[..], ..]}`.
    #[arg(long, requires = "b")]
    a: Option<PathBuf>,
    #[arg(long, requires = "a")]
    b: Option<PathBuf>,
}

#[derive(Args)]
struct WindowArg {
    /// `P1`, `P2`, or a JSON file with the cells.
    #[arg(long, default_value = "P1")]
    window: String,
}

#[derive(Args)]
struct CovariogramArgs {
    #[command(flatten)]
    window: WindowArg,
    /// Evaluate at a single point.
    #[arg(long, num_args = 2, value_names = ["X1", "X2"], allow_negative_numbers = true)]
    at: Option<Vec<f64>>,
    /// Scale the window by this factor.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    scale: f64,
    #[arg(long, default_value_t = -6.0, allow_negative_numbers = true)]
    lo: f64,
    #[arg(long, default_value_t = 6.0, allow_negative_numbers = true)]
    hi: f64,
    #[arg(long, default_value_t = 0.25)]
    step: f64,
}

#[derive(Args)]
struct SchemeArgs {
    #[command(flatten)]
    window: WindowArg,
    /// Offset of the window in internal space.
    #[arg(long, num_args = 2, value_names = ["S1", "S2"], allow_negative_numbers = true)]
    shift: Option<Vec<f64>>,
}

#[derive(Args)]
struct ModelsetArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    #[arg(long, short = 'R', default_value_t = 50.0)]
    radius: f64,
}

#[derive(Args)]
struct DiffractionArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    /// Bound on the physical length of k.
    #[arg(long, default_value_t = 2.0)]
    k_max: f64,
    /// Bound on the internal length of k.
    #[arg(long, default_value_t = 2.0)]
    y_max: f64,
}

#[derive(Args)]
struct RatioArgs {
    /// Evaluate at this internal-space point instead of searching for a
    /// witness.
    #[arg(long, num_args = 2, value_names = ["Y1", "Y2"], allow_negative_numbers = true)]
    at: Option<Vec<f64>>,
}

#[derive(Args)]
struct MldArgs {
    /// `P1`, `P2`, `both`, or a JSON file.
    #[arg(long, default_value = "both")]
    window: String,
    #[arg(long, num_args = 2, value_names = ["T1", "T2"], default_values_t = [4, 5], allow_negative_numbers = true)]
    t: Vec<i64>,
}

#[derive(Args)]
struct ThreepointArgs {
    /// Patch radii; one estimate column pair per radius.
    #[arg(long, short = 'R', value_delimiter = ',', default_value = "50")]
    radius: Vec<f64>,
    /// Coefficient range of the searched vectors.
    #[arg(long, default_value_t = 3)]
    bound: i64,
    /// Physical length bound of the searched vectors.
    #[arg(long, default_value_t = 1.5)]
    max_norm: f64,
    /// Number of ranked pairs to report.
    #[arg(long, default_value_t = 10)]
    top: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Rs,
    Bernoulli,
    Bernoullised,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Rs => "rs",
            Kind::Bernoulli => "bernoulli",
            Kind::Bernoullised => "bernoullised",
        }
    }
}

#[derive(Args)]
struct CombOpts {
    #[arg(long, value_enum, default_value_t = Kind::Rs)]
    kind: Kind,
    /// Probability of a `+1` sign.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long)]
    seed: Option<u64>,
    /// Window half-length: the comb lives on [-n, n).
    #[arg(long, default_value_t = 1 << 20)]
    n: usize,
}

#[derive(Args)]
struct CombArgs {
    #[command(flatten)]
    comb: CombOpts,
}

#[derive(Args)]
struct AutocorrArgs {
    #[command(flatten)]
    comb: CombOpts,
    /// Lags as `a..b` (inclusive) or a comma list.
    #[arg(long, default_value = "1..8", allow_hyphen_values = true)]
    lags: String,
}

#[derive(Args)]
struct PeriodogramArgs {
    #[command(flatten)]
    comb: CombOpts,
    #[arg(long, default_value_t = 512)]
    bins: usize,
    /// Average the full-resolution periodogram within each bin instead of
    /// sampling it at the bin edges.
    #[arg(long)]
    binned: bool,
    /// Print only the mean over the bins.
    #[arg(long)]
    average: bool,
}

#[derive(Args)]
struct EntropyArgs {
    #[command(flatten)]
    comb: CombOpts,
    /// Block lengths as `a..b` (inclusive) or a comma list.
    #[arg(long, short = 'L', default_value = "1..10")]
    lengths: String,
    /// Report `H_L - H_{L-1}` instead of `H_L / L`.
    #[arg(long)]
    conditional: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TensorMode {
    /// Materialised weights.
    Grid,
    /// Autocorrelation at `--lag`.
    Autocorr,
    /// Block entropy of the axis lines through `--at`.
    Entropy,
}

#[derive(Args)]
struct TensorArgs {
    #[arg(long, value_enum, default_value_t = TensorMode::Grid)]
    mode: TensorMode,
    /// Dimension.
    #[arg(long, short = 'd', default_value_t = 2)]
    dim: usize,
    /// Per-axis window half-length.
    #[arg(long, default_value_t = 128)]
    n: usize,
    /// Rank of the Bernoullisation; 0 leaves rs x ... x rs unchanged.
    #[arg(long, default_value_t = 0)]
    rank: usize,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long)]
    seed: Option<u64>,
    /// Lag vector, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    lag: Vec<i64>,
    /// Point the entropy lines pass through, comma separated (default origin).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    at: Vec<i64>,
    /// Block length for `--mode entropy`.
    #[arg(long, short = 'L', default_value_t = 10)]
    block: usize,
}

#[derive(Args)]
struct CheckArgs {
    /// Check number; all checks when omitted.
    #[arg(long)]
    id: Option<usize>,
    /// List the checks without running them.
    #[arg(long)]
    list: bool,
}

enum Failure {
    Domain(String),
    Falsified(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

type Run = std::result::Result<Output, Failure>;

/// Header fields and body of one run.
struct Output {
    command: &'static str,
    seed: Option<u64>,
    params: Vec<(&'static str, String)>,
    csv: String,
    json: Value,
    /// Set when the output is complete but the checked claim failed.
    falsified: bool,
}

impl Output {
    fn new(command: &'static str) -> Self {
        Output {
            command,
            seed: None,
            params: Vec::new(),
            csv: String::new(),
            json: Value::Null,
            falsified: false,
        }
    }

    fn param(mut self, k: &'static str, v: impl ToString) -> Self {
        self.params.push((k, v.to_string()));
        self
    }

    fn body(mut self, csv: String, json: Value) -> Self {
        self.csv = csv;
        self.json = json;
        self
    }

    fn render(&self, format: Format) -> String {
        let seed = self.seed.map_or("none".to_string(), |s| s.to_string());
        match format {
            Format::Csv => {
                let mut head = format!("# homometry {VERSION} {} seed={seed}", self.command);
                for (k, v) in &self.params {
                    head.push_str(&format!(" {k}={v}"));
                }
                format!("{head}\n{}", self.csv)
            }
            Format::Json => {
                let params: serde_json::Map<String, Value> = self
                    .params
                    .iter()
                    .map(|(k, v)| (k.to_string(), Value::String(v.clone())))
                    .collect();
                let doc = json!({
                    "header": {
                        "version": VERSION,
                        "command": self.command,
                        "seed": self.seed,
                        "params": params,
                    },
                    "data": self.json,
                });
                format!("{}\n", serde_json::to_string_pretty(&doc).expect("json values serialise"))
            }
        }
    }
}

fn parse_json(s: &str) -> Value {
    serde_json::from_str(s).expect("library JSON is valid")
}

fn window(spec: &str) -> Result<Polyomino, Failure> {
    match spec {
        "P1" | "p1" => Ok(Polyomino::p1()),
        "P2" | "p2" => Ok(Polyomino::p2()),
        path => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Domain(format!("{path}: {e}")))?;
            serde_json::from_str(&text).map_err(|e| Failure::Domain(format!("{path}: {e}")))
        }
    }
}

fn point_set(path: &PathBuf) -> Result<FinitePointSet, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))?;
    FinitePointSet::from_json(&text).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))
}

fn scheme(args: &SchemeArgs) -> Result<SchemeConfig, Failure> {
    let shift = match &args.shift {
        Some(s) => [s[0], s[1]],
        None => DEFAULT_WINDOW_SHIFT,
    };
    Ok(SchemeConfig::new(window(&args.window.window)?).with_shift(shift))
}

/// `a..b` (inclusive) or `a,b,c`.
fn int_list(s: &str) -> Result<Vec<i64>, Failure> {
    let bad = || Failure::Domain(format!("cannot read `{s}` as `a..b` or a comma list"));
    if let Some((a, b)) = s.split_once("..") {
        let a: i64 = a.trim().parse().map_err(|_| bad())?;
        let b: i64 = b.trim().parse().map_err(|_| bad())?;
        if b < a {
            return Err(bad());
        }
        Ok((a..=b).collect())
    } else {
        s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
    }
}

fn seed_or_default(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        eprintln!("homometry: no --seed given, using the default seed 0");
        0
    })
}

/// Builds the comb and fills in the shared header fields.
fn comb(opts: &CombOpts, out: Output) -> Result<(WeightedComb, Output), Failure> {
    let mut out = out.param("kind", opts.kind.name()).param("n", opts.n);
    let s = match opts.kind {
        Kind::Rs => rs_fixed_point(opts.n)?,
        Kind::Bernoulli | Kind::Bernoullised => {
            let seed = seed_or_default(opts.seed);
            out.seed = Some(seed);
            out = out.param("p", opts.p);
            let spec = RandomSpec::new(opts.p, seed)?;
            if opts.kind == Kind::Bernoulli {
                if opts.n == 0 {
                    return Err(Failure::Domain("n must be at least 1".into()));
                }
                bernoulli_comb(&spec, opts.n)
            } else {
                bernoullise(&rs_fixed_point(opts.n)?, &spec)?
            }
        }
    };
    Ok((s, out))
}

fn cmd_homometry(a: &HomometryArgs) -> Run {
    let (f, g, source) = match (&a.a, &a.b) {
        (Some(pa), Some(pb)) => (point_set(pa)?, point_set(pb)?, "files"),
        _ if a.builtin => {
            let (f, g) = canonical_pair();
            (f, g, "builtin")
        }
        _ => return Err(Failure::Domain("give --builtin or both --a and --b".into())),
    };
    let homometric = are_homometric(&f, &g)?;
    let df = difference_multiset(&f)?;
    let mut csv = format!("homometric: {homometric}\n");
    if !homometric {
        let dg = difference_multiset(&g)?;
        csv.push_str(&format!("multiplicity totals: {} vs {}\n", df.total(), dg.total()));
    }
    let mut out = Output::new("homometry")
        .param("sets", source)
        .param("size_a", f.len())
        .param("size_b", g.len())
        .body(
            csv,
            json!({
                "homometric": homometric,
                "difference_multiset_a": parse_json(&df.to_json()),
            }),
        );
    // only the built-in pair carries a claim
    out.falsified = a.builtin && !homometric;
    Ok(out)
}

fn cmd_covariogram(a: &CovariogramArgs) -> Run {
    let w = window(&a.window.window)?;
    let out = Output::new("covariogram")
        .param("window", &a.window.window)
        .param("scale", a.scale);
    let eval = |x: [f64; 2]| -> Result<f64, Failure> {
        if a.scale == 1.0 {
            Ok(covariogram(&w, x))
        } else {
            Ok(covariogram_scaled(&w, a.scale, x)?)
        }
    };
    if let Some(at) = &a.at {
        let x = [at[0], at[1]];
        let v = eval(x)?;
        return Ok(out
            .param("at", format!("{},{}", x[0], x[1]))
            .body(format!("{v}\n"), json!({ "x": x, "cov": v })));
    }
    let grid = covariogram_grid(&w, [a.lo, a.lo], [a.hi, a.hi], a.step)?;
    let mut csv = String::from("x1,x2,cov\n");
    let mut rows = Vec::with_capacity(grid.len());
    for s in grid {
        let v = eval(s.x)?;
        csv.push_str(&format!("{},{},{v}\n", s.x[0], s.x[1]));
        rows.push(json!({ "x": s.x, "cov": v }));
    }
    Ok(out
        .param("lo", a.lo)
        .param("hi", a.hi)
        .param("step", a.step)
        .body(csv, Value::Array(rows)))
}

fn shift_param(s: &SchemeConfig) -> String {
    format!("{},{}", s.window_shift[0], s.window_shift[1])
}

fn cmd_modelset(a: &ModelsetArgs) -> Run {
    let s = scheme(&a.scheme)?;
    let patch = generate_model_set(&s, a.radius)?;
    Ok(Output::new("modelset")
        .param("window", &a.scheme.window.window)
        .param("shift", shift_param(&s))
        .param("R", a.radius)
        .param("points", patch.len())
        .param("density", patch.density())
        .body(patch.to_csv(), parse_json(&patch.to_json())))
}

fn cmd_diffraction(a: &DiffractionArgs) -> Run {
    let s = scheme(&a.scheme)?;
    let rows = intensity_table(&s, a.k_max, a.y_max)?;
    let json_rows: Vec<Value> = rows
        .iter()
        .map(|r| json!({ "k": r.k.coeffs(), "intensity": r.intensity }))
        .collect();
    Ok(Output::new("diffraction")
        .param("window", &a.scheme.window.window)
        .param("shift", shift_param(&s))
        .param("k_max", a.k_max)
        .param("y_max", a.y_max)
        .body(intensity_table_csv(&rows), Value::Array(json_rows)))
}

fn cmd_ratio(a: &RatioArgs) -> Run {
    let out = Output::new("ratio");
    if let Some(at) = &a.at {
        let y = [at[0], at[1]];
        let (num, den) = ratio_parts(y);
        let out = out.param("at", format!("{},{}", y[0], y[1]));
        return Ok(match amplitude_ratio(y) {
            Ratio::Singular => out.body(
                format!("SINGULAR\nnum_abs,den_abs\n{},{}\n", num.norm(), den.norm()),
                json!({ "singular": true, "num_abs": num.norm(), "den_abs": den.norm() }),
            ),
            Ratio::Value(r) => {
                let chi = phase_chi(y).expect("regular point");
                out.body(
                    format!("re,im,abs,chi\n{},{},{},{chi}\n", r.re, r.im, r.norm()),
                    json!({ "singular": false, "re": r.re, "im": r.im, "abs": r.norm(), "chi": chi }),
                )
            }
        });
    }
    match additivity_witness() {
        Ok(w) => Ok(out.param("mode", "witness").body(
            format!(
                "y1,y2,yp1,yp2,chi_y,chi_yp,chi_sum,violation\n{},{},{},{},{},{},{},{}\n",
                w.y[0], w.y[1], w.y_prime[0], w.y_prime[1], w.chi_y, w.chi_y_prime, w.chi_sum, w.violation
            ),
            serde_json::to_value(w).expect("witness serialises"),
        )),
        Err(Error::NoAdditivityWitness) => Err(Failure::Falsified("no additivity witness found".into())),
        Err(e) => Err(e.into()),
    }
}

fn cmd_mld(a: &MldArgs) -> Run {
    let names: Vec<&str> = if a.window == "both" { vec!["P1", "P2"] } else { vec![a.window.as_str()] };
    let t = (a.t[0], a.t[1]);
    let mut csv = String::from("window,intersection_cells,translates,holds\n");
    let mut rows = Vec::new();
    let mut all = true;
    for n in &names {
        let r = mld_check(&window(n)?, t);
        all &= r.holds;
        csv.push_str(&format!("{n},{},{},{}\n", r.intersection.len(), r.translates, r.holds));
        rows.push(json!({ "window": n, "report": r }));
    }
    let mut out = Output::new("mld")
        .param("window", &a.window)
        .param("t", format!("{},{}", t.0, t.1))
        .body(csv, Value::Array(rows));
    out.falsified = !all;
    Ok(out)
}

fn cmd_threepoint(a: &ThreepointArgs) -> Run {
    let (s1, s2) = (SchemeConfig::p1(), SchemeConfig::p2());
    let ranked = three_point_search(&s1, &s2, a.bound, a.max_norm)?;
    let patches = a
        .radius
        .iter()
        .map(|&r| Ok((generate_model_set(&s1, r)?, generate_model_set(&s2, r)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    let mut csv = String::from("z1a,z1b,z1c,z1d,z2a,z2b,z2c,z2d,limit1,limit2");
    for r in &a.radius {
        csv.push_str(&format!(",est1_R{r},est2_R{r}"));
    }
    csv.push('\n');
    let mut rows = Vec::new();
    for c in ranked.iter().take(a.top) {
        let [p, q, r, s] = c.z1.0;
        let [t, u, v, w] = c.z2.0;
        csv.push_str(&format!("{p},{q},{r},{s},{t},{u},{v},{w},{},{}", c.first, c.second));
        let mut est = Vec::new();
        for (x, y) in &patches {
            let e1 = three_point_correlation(x, &c.z1, &c.z2)?;
            let e2 = three_point_correlation(y, &c.z1, &c.z2)?;
            csv.push_str(&format!(",{e1},{e2}"));
            est.push([e1, e2]);
        }
        csv.push('\n');
        rows.push(json!({ "candidate": c, "estimates": est }));
    }
    let radii: Vec<String> = a.radius.iter().map(|r| r.to_string()).collect();
    Ok(Output::new("threepoint")
        .param("R", radii.join(","))
        .param("bound", a.bound)
        .param("max_norm", a.max_norm)
        .param("top", a.top)
        .body(csv, Value::Array(rows)))
}

fn cmd_comb(a: &CombArgs) -> Run {
    let (s, out) = comb(&a.comb, Output::new("comb"))?;
    let json = json!({ "lo": s.lo(), "weights": s.weights() });
    Ok(out.body(s.to_csv(), json))
}

fn cmd_autocorr(a: &AutocorrArgs) -> Run {
    let lags = int_list(&a.lags)?;
    let (s, out) = comb(&a.comb, Output::new("autocorr"))?;
    let rows = lags
        .iter()
        .map(|&m| empirical_autocorr(&s, m))
        .collect::<Result<Vec<AutocorrEstimate>, Error>>()?;
    let json = serde_json::to_value(&rows).expect("estimates serialise");
    Ok(out.param("lags", &a.lags).body(autocorr_csv(&rows), json))
}

fn cmd_periodogram(a: &PeriodogramArgs) -> Run {
    let (s, out) = comb(&a.comb, Output::new("periodogram"))?;
    let out = out.param("bins", a.bins).param("binned", a.binned);
    let rows = if a.binned {
        binned_periodogram(&s, a.bins)?
    } else {
        periodogram_grid(&s, a.bins)?
    };
    if a.average {
        let avg = if a.binned {
            rows.iter().map(|r| r.value).sum::<f64>() / rows.len() as f64
        } else {
            periodogram_average(&s, a.bins)?
        };
        return Ok(out.param("average", true).body(format!("{avg}\n"), json!({ "average": avg })));
    }
    let json = serde_json::to_value(&rows).expect("bins serialise");
    Ok(out.body(periodogram_csv(&rows), json))
}

fn cmd_entropy(a: &EntropyArgs) -> Run {
    let ls = int_list(&a.lengths)?;
    let (s, out) = comb(&a.comb, Output::new("entropy"))?;
    let mut rows = Vec::new();
    for &l in &ls {
        if l < 1 {
            return Err(Error::InvalidBlockLength(0).into());
        }
        let l = l as usize;
        let h = if a.conditional {
            conditional_block_entropy(&s, l)?
        } else {
            block_entropy(&s, l)?
        };
        rows.push((l, h));
    }
    let json: Vec<Value> = rows.iter().map(|(l, h)| json!({ "L": l, "entropy": h })).collect();
    Ok(out
        .param("lengths", &a.lengths)
        .param("conditional", a.conditional)
        .body(entropy_csv(&rows), Value::Array(json)))
}

fn cmd_tensor(a: &TensorArgs) -> Run {
    if a.dim == 0 {
        return Err(Error::EmptyFactors.into());
    }
    let rs = rs_fixed_point(a.n)?;
    let factors = vec![rs; a.dim];
    let base = product_comb(factors.clone())?;
    let mut out = Output::new("tensor")
        .param("d", a.dim)
        .param("n", a.n)
        .param("rank", a.rank);
    let comb = if a.rank > 0 {
        let seed = seed_or_default(a.seed);
        out.seed = Some(seed);
        out = out.param("p", a.p);
        rank_k_bernoullise(&base, a.rank, &RandomSpec::new(a.p, seed)?)?
    } else {
        rank_k_bernoullise(&base, 0, &RandomSpec::new(a.p, 0)?)?
    };
    match a.mode {
        TensorMode::Grid => {
            let g = comb.materialise()?;
            let csv = if a.dim == 2 {
                g.to_csv_matrix()?
            } else {
                // higher d: factor-wise export
                let mut s = String::from("axis,index,weight\n");
                for (axis, f) in factors.iter().enumerate() {
                    for (i, w) in f.indices().zip(f.weights()) {
                        s.push_str(&format!("{axis},{i},{w}\n"));
                    }
                }
                s
            };
            Ok(out.param("mode", "grid").body(csv, parse_json(&g.to_json())))
        }
        TensorMode::Autocorr => {
            if a.lag.len() != a.dim {
                return Err(Error::DimensionMismatch { expected: a.dim, found: a.lag.len() }.into());
            }
            let lag: Vec<String> = a.lag.iter().map(|m| m.to_string()).collect();
            let mut csv = String::from("method,value\n");
            let mut json = serde_json::Map::new();
            if a.rank == 0 {
                let f = product_autocorr(&factors, &a.lag)?;
                csv.push_str(&format!("factorised,{f}\n"));
                json.insert("factorised".into(), json!(f));
            }
            match comb.materialise() {
                Ok(g) => {
                    let b = brute_force_autocorr(&g, &a.lag);
                    csv.push_str(&format!("brute_force,{b}\n"));
                    json.insert("brute_force".into(), json!(b));
                }
                Err(Error::TooLarge(_)) if a.rank == 0 => {}
                Err(e) => return Err(e.into()),
            }
            Ok(out
                .param("mode", "autocorr")
                .param("lag", lag.join(","))
                .body(csv, Value::Object(json)))
        }
        TensorMode::Entropy => {
            let at = if a.at.is_empty() { vec![0; a.dim] } else { a.at.clone() };
            if at.len() != a.dim {
                return Err(Error::DimensionMismatch { expected: a.dim, found: at.len() }.into());
            }
            let mut csv = String::from("axis,entropy\n");
            let mut rows = Vec::new();
            for axis in 0..a.dim {
                let h = block_entropy(&comb.line(axis, &at)?, a.block)?;
                csv.push_str(&format!("{},{h}\n", axis + 1));
                rows.push(json!({ "axis": axis + 1, "entropy": h }));
            }
            let at: Vec<String> = at.iter().map(|x| x.to_string()).collect();
            Ok(out
                .param("mode", "entropy")
                .param("at", at.join(","))
                .param("L", a.block)
                .body(csv, Value::Array(rows)))
        }
    }
}

fn cmd_check(a: &CheckArgs) -> Run {
    let out = Output::new("check");
    if a.list {
        let mut csv = String::from("id,name\n");
        let mut rows = Vec::new();
        for c in checks() {
            csv.push_str(&format!("{},{}\n", c.id, c.name));
            rows.push(json!({ "id": c.id, "name": c.name }));
        }
        return Ok(out.param("list", true).body(csv, Value::Array(rows)));
    }
    let ids: Vec<usize> = match a.id {
        Some(id) => vec![id],
        None => checks().iter().map(|c| c.id).collect(),
    };
    let mut csv = String::new();
    let mut rows = Vec::new();
    let mut all = true;
    for id in &ids {
        let r = run_check(*id)?;
        all &= r.pass;
        csv.push_str(&r.line());
        csv.push('\n');
        for n in &r.notes {
            csv.push_str(&format!("    note: {n}\n"));
        }
        rows.push(json!({ "id": r.id, "name": r.name, "pass": r.pass, "summary": r.summary, "notes": r.notes }));
    }
    let id = a.id.map_or("all".to_string(), |i| i.to_string());
    let mut out = out.param("id", id).body(csv, Value::Array(rows));
    out.falsified = !all;
    Ok(out)
}

fn dispatch(cmd: &Cmd) -> Run {
    match cmd {
        Cmd::Homometry(a) => cmd_homometry(a),
        Cmd::Covariogram(a) => cmd_covariogram(a),
        Cmd::Modelset(a) => cmd_modelset(a),
        Cmd::Diffraction(a) => cmd_diffraction(a),
        Cmd::Ratio(a) => cmd_ratio(a),
        Cmd::Mld(a) => cmd_mld(a),
        Cmd::Threepoint(a) => cmd_threepoint(a),
        Cmd::Comb(a) => cmd_comb(a),
        Cmd::Autocorr(a) => cmd_autocorr(a),
        Cmd::Periodogram(a) => cmd_periodogram(a),
        Cmd::Entropy(a) => cmd_entropy(a),
        Cmd::Tensor(a) => cmd_tensor(a),
        Cmd::Check(a) => cmd_check(a),
    }
}

fn init_threads() -> Result<(), String> {
    if let Ok(v) = std::env::var("HOMOMETRY_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| format!("HOMOMETRY_THREADS must be a positive integer, got `{v}`"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = init_threads() {
        eprintln!("homometry: {e}");
        return ExitCode::from(1);
    }
    match dispatch(&cli.cmd) {
        Ok(out) => {
            let text = out.render(cli.format);
            match &cli.output {
                Some(path) => {
                    if let Err(e) = fs::write(path, text) {
                        eprintln!("homometry: {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            if out.falsified {
                eprintln!("homometry: claim falsified");
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("homometry: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Falsified(msg)) => {
            eprintln!("homometry: {msg}");
            ExitCode::from(3)
        }
    }
}
