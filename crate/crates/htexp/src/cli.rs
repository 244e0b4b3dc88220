//! Batch front end: scenario files in, CSV tables (plus an optional JSON
//! mirror with full diagnostics) out.
//!
//! A scenario is one TOML document holding the distributions, threshold,
//! divergence spec, radii, sweep and simulation settings. Command-line flags
//! override scenario fields, which override defaults. All on-disk numbers
//! are nats; `display_units = "bits"` rescales exponent and theta columns on
//! output only.

use crate::divergences::{Ball, DivergenceSpec};
use crate::simplex::{Alphabet, ProbDist};
use crate::solver::SolveOptions;
use crate::{adversarial, glrt, lrt, sprt, Error, Hypothesis, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::{Path, PathBuf};

const LN2: f64 = std::f64::consts::LN_2;

// ---------------------------------------------------------------------------
// Scenario file
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alphabet: Option<AlphabetSection>,
    pub p0: Vec<f64>,
    pub p1: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p0_hat: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p1_hat: Option<Vec<f64>>,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub divergence: DivergenceSection,
    #[serde(default)]
    pub radii: RadiiSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub sim: SimSection,
    #[serde(default)]
    pub oracle: OracleSection,
    #[serde(default)]
    pub display_units: DisplayUnits,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AlphabetSection {
    pub size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DivergenceSection {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

impl Default for DivergenceSection {
    fn default() -> Self {
        DivergenceSection { kind: "kl".into(), alpha: None }
    }
}

impl DivergenceSection {
    pub fn to_spec(&self) -> Result<DivergenceSpec> {
        match self.kind.as_str() {
            "kl" => Ok(DivergenceSpec::Kl),
            "chi_squared" | "chi2" => Ok(DivergenceSpec::ChiSquared),
            "squared_hellinger" | "hellinger2" => Ok(DivergenceSpec::SquaredHellinger),
            "renyi" => {
                let order = self.alpha.ok_or_else(|| {
                    Error::Scenario("divergence.kind = \"renyi\" needs divergence.alpha".into())
                })?;
                Ok(DivergenceSpec::Renyi { order })
            }
            other => Err(Error::Scenario(format!(
                "divergence.kind must be one of kl, chi_squared, squared_hellinger, renyi; got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct RadiiSection {
    #[serde(default)]
    pub r0: f64,
    #[serde(default)]
    pub r1: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
    #[serde(default = "default_true")]
    pub log_spaced: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub trials: u64,
    pub seed: u64,
    pub gamma_grid: Vec<f64>,
}

impl Default for SimSection {
    fn default() -> Self {
        SimSection { trials: 100_000, seed: 0, gamma_grid: vec![4.0, 5.0, 6.0, 7.0] }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    pub n_grid: Vec<u64>,
    pub grid_step: f64,
}

impl Default for OracleSection {
    fn default() -> Self {
        OracleSection { n_grid: vec![20, 40, 60], grid_step: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, Default, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum DisplayUnits {
    #[default]
    Nats,
    Bits,
}

impl Scenario {
    pub fn from_path(path: &Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Scenario(format!("cannot read {}: {e}", path.display())))?;
        Scenario::from_str(&text)
    }

    pub fn from_str(text: &str) -> Result<Scenario> {
        let sc: Scenario = toml::from_str(text).map_err(|e| {
            // toml errors carry line/column spans in their display form
            Error::Scenario(format!("parse error: {e}"))
        })?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    fn validate(&self) -> Result<()> {
        if let Some(a) = &self.alphabet {
            let alphabet = match &a.labels {
                Some(l) => Alphabet::with_labels(l.clone())?,
                None => Alphabet::of_size(a.size)?,
            };
            if alphabet.size() != self.p0.len() {
                return Err(Error::Scenario(format!(
                    "field p0: {} entries but alphabet.size = {}",
                    self.p0.len(),
                    alphabet.size()
                )));
            }
        }
        for (name, v) in [("p0", &self.p0), ("p1", &self.p1)] {
            ProbDist::new(v.clone())
                .map_err(|e| Error::Scenario(format!("field {name}: {e}")))?;
        }
        for (name, v) in [("p0_hat", &self.p0_hat), ("p1_hat", &self.p1_hat)] {
            if let Some(v) = v {
                ProbDist::new(v.clone())
                    .map_err(|e| Error::Scenario(format!("field {name}: {e}")))?;
                if v.len() != self.p0.len() {
                    return Err(Error::Scenario(format!(
                        "field {name}: {} entries but p0 has {}",
                        v.len(),
                        self.p0.len()
                    )));
                }
            }
        }
        if self.p1.len() != self.p0.len() {
            return Err(Error::Scenario("fields p0/p1: different lengths".into()));
        }
        if self.radii.r0 < 0.0 || self.radii.r1 < 0.0 {
            return Err(Error::Scenario("radii must be nonnegative".into()));
        }
        if let Some(s) = &self.sweep {
            if !(s.r_min > 0.0 && s.r_min <= s.r_max) {
                return Err(Error::Scenario(format!(
                    "sweep: need 0 < r_min <= r_max, got r_min={}, r_max={}",
                    s.r_min, s.r_max
                )));
            }
            if s.points < 1 {
                return Err(Error::Scenario("sweep.points must be >= 1".into()));
            }
        }
        self.divergence.to_spec()?;
        Ok(())
    }

    fn p0(&self) -> ProbDist {
        ProbDist::new(self.p0.clone()).expect("validated")
    }
    fn p1(&self) -> ProbDist {
        ProbDist::new(self.p1.clone()).expect("validated")
    }
    fn p0_hat(&self) -> ProbDist {
        ProbDist::new(self.p0_hat.clone().unwrap_or_else(|| self.p0.clone())).expect("validated")
    }
    fn p1_hat(&self) -> ProbDist {
        ProbDist::new(self.p1_hat.clone().unwrap_or_else(|| self.p1.clone())).expect("validated")
    }

    fn sweep_radii(&self) -> Vec<f64> {
        match &self.sweep {
            Some(s) if s.points > 1 => {
                let n = s.points;
                (0..n)
                    .map(|i| {
                        let t = i as f64 / (n - 1) as f64;
                        if s.log_spaced {
                            (s.r_min.ln() + t * (s.r_max.ln() - s.r_min.ln())).exp()
                        } else {
                            s.r_min + t * (s.r_max - s.r_min)
                        }
                    })
                    .collect()
            }
            Some(s) => vec![s.r_min],
            None => vec![self.radii.r0],
        }
    }
}

// ---------------------------------------------------------------------------
// Command line
// ---------------------------------------------------------------------------

#[derive(Debug, Parser)]
#[command(name = "htexp", about = "Error exponents of binary hypothesis tests under mismatch")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TestKind {
    Lrt,
    Glrt,
    Sprt,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SensKind {
    Lrt,
    Glrt,
    Sprt,
    AdvLrt,
    AdvGlrt,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OracleKind {
    Grid,
    Types,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Scenario file (TOML).
    #[arg(long, short = 's')]
    pub scenario: PathBuf,
    /// Output CSV path; stdout when omitted.
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
    /// Optional JSON mirror with full diagnostics.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Override the scenario threshold (nats).
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Override ball radius r0.
    #[arg(long)]
    pub r0: Option<f64>,
    /// Override ball radius r1.
    #[arg(long)]
    pub r1: Option<f64>,
    /// Override the divergence curvature / Rényi order.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Override the simulation trial count.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Override the simulation seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the sweep point count.
    #[arg(long)]
    pub points: Option<usize>,
    /// Override display units.
    #[arg(long, value_enum)]
    pub units: Option<DisplayUnits>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Matched/mismatched exponent pair of one test.
    Exponents {
        #[arg(value_enum)]
        test: TestKind,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Worst-case exponents over divergence balls, optionally swept in r.
    WorstCase {
        #[arg(value_enum)]
        test: TestKind,
        #[arg(long)]
        sweep: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Sensitivity coefficients and sqrt(r) approximations.
    Sensitivity {
        #[arg(value_enum)]
        test: SensKind,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Adversarial type-perturbation worst cases.
    Adversarial {
        #[arg(value_enum)]
        test: TestKind,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Monte Carlo simulation of the sequential test.
    Simulate {
        #[arg(value_enum)]
        test: TestKind,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Brute-force referees: simplex grid and exact type enumeration.
    Oracle {
        #[arg(value_enum)]
        kind: OracleKind,
        #[command(flatten)]
        common: CommonArgs,
    },
}

/// Entry point used by the binary: parse, run, map errors to exit codes
/// (0 success, 1 validation, 2 solver failure) with diagnostics on stderr.
pub fn run(cli: Cli) -> i32 {
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::NoConvergence { .. } | Error::Bracket { .. } => 2,
                _ => 1,
            }
        }
    }
}

/// Convenience for tests: run from an argument vector.
pub fn run_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            eprintln!("{e}");
            1
        }
    }
}

struct Output {
    header: Vec<&'static str>,
    rows: Vec<Vec<f64>>,
    diagnostics: serde_json::Value,
}

fn dispatch(cli: Cli) -> Result<()> {
    let (common, output) = match cli.command {
        Command::Exponents { test, common } => {
            let sc = load(&common)?;
            (common, cmd_exponents(test, &sc)?)
        }
        Command::WorstCase { test, sweep, common } => {
            let sc = load(&common)?;
            (common, cmd_worst_case(test, sweep, &sc)?)
        }
        Command::Sensitivity { test, common } => {
            let sc = load(&common)?;
            (common, cmd_sensitivity(test, &sc)?)
        }
        Command::Adversarial { test, common } => {
            let sc = load(&common)?;
            (common, cmd_adversarial(test, &sc)?)
        }
        Command::Simulate { test, common } => {
            if !matches!(test, TestKind::Sprt) {
                return Err(Error::Usage("simulate supports only the sprt test".into()));
            }
            let sc = load(&common)?;
            (common, cmd_simulate(&sc)?)
        }
        Command::Oracle { kind, common } => {
            let sc = load(&common)?;
            (common, cmd_oracle(kind, &sc)?)
        }
    };
    write_output(&common, output)
}

fn load(common: &CommonArgs) -> Result<Scenario> {
    let mut sc = Scenario::from_path(&common.scenario)?;
    // precedence: flag > file > default
    if let Some(g) = common.gamma {
        sc.gamma = g;
    }
    if let Some(r) = common.r0 {
        sc.radii.r0 = r;
    }
    if let Some(r) = common.r1 {
        sc.radii.r1 = r;
    }
    if let Some(a) = common.alpha {
        match sc.divergence.kind.as_str() {
            "renyi" => sc.divergence.alpha = Some(a),
            _ => {
                sc.divergence = DivergenceSection { kind: "renyi".into(), alpha: Some(a) };
            }
        }
    }
    if let Some(t) = common.trials {
        sc.sim.trials = t;
    }
    if let Some(s) = common.seed {
        sc.sim.seed = s;
    }
    if let Some(p) = common.points {
        if let Some(sw) = &mut sc.sweep {
            sw.points = p;
        }
    }
    if let Some(u) = common.units {
        sc.display_units = u;
    }
    sc.validate()?;
    Ok(sc)
}

fn write_output(common: &CommonArgs, out: Output) -> Result<()> {
    let mut csv = String::new();
    csv.push_str(&out.header.join(","));
    csv.push('\n');
    for row in &out.rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }
    match &common.out {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            f.write_all(csv.as_bytes())?;
        }
        None => {
            print!("{csv}");
        }
    }
    if let Some(path) = &common.json {
        let mut f = std::fs::File::create(path)?;
        let text = serde_json::to_string_pretty(&out.diagnostics).expect("diagnostics serialize");
        f.write_all(text.as_bytes())?;
        f.write_all(b"\n")?;
    }
    Ok(())
}

/// Rescale an exponent-like value for display.
fn exp_scale(sc: &Scenario) -> f64 {
    match sc.display_units {
        DisplayUnits::Nats => 1.0,
        DisplayUnits::Bits => 1.0 / LN2,
    }
}

/// Theta carries squared exponent units, so bits display divides twice.
fn theta_scale(sc: &Scenario) -> f64 {
    let s = exp_scale(sc);
    s * s
}

fn cmd_exponents(test: TestKind, sc: &Scenario) -> Result<Output> {
    let (p0, p1, ph0, ph1) = (sc.p0(), sc.p1(), sc.p0_hat(), sc.p1_hat());
    let s = exp_scale(sc);
    match test {
        TestKind::Lrt => {
            let rep = lrt::mismatched_exponents(&p0, &p1, &ph0, &ph1, sc.gamma)?;
            Ok(Output {
                header: vec!["e0_exact", "e1_exact"],
                rows: vec![vec![rep.e0 * s, rep.e1 * s]],
                diagnostics: serde_json::json!({
                    "command": "exponents lrt",
                    "gamma": sc.gamma,
                    "report": rep,
                    "dual_gap": [rep.e0 - rep.dual0, rep.e1 - rep.dual1],
                }),
            })
        }
        TestKind::Glrt => {
            let gamma = sc.gamma;
            let rep = glrt::glrt_exponents(&p0, &p1, &ph0, gamma, &SolveOptions::default())?;
            Ok(Output {
                header: vec!["e0_exact", "e1_exact"],
                rows: vec![vec![rep.e0 * s, rep.e1 * s]],
                diagnostics: serde_json::json!({
                    "command": "exponents glrt",
                    "gamma": gamma,
                    "report": rep,
                }),
            })
        }
        TestKind::Sprt => {
            let canonical = sprt::sprt_exponents(&p0, &p1, &ph0, &ph1)?;
            let practical = sprt::sprt_exponents_practical(&p0, &p1, &ph0, &ph1)?;
            Ok(Output {
                header: vec!["e0_exact", "e1_exact"],
                rows: vec![vec![canonical.e0 * s, canonical.e1 * s]],
                diagnostics: serde_json::json!({
                    "command": "exponents sprt",
                    "canonical": canonical,
                    "practical": practical,
                }),
            })
        }
    }
}

fn cmd_worst_case(test: TestKind, sweep: bool, sc: &Scenario) -> Result<Output> {
    let (p0h, p1h) = (sc.p0_hat(), sc.p1_hat());
    let spec = sc.divergence.to_spec()?;
    let alpha = spec.curvature();
    let opts = SolveOptions::default();
    let s = exp_scale(sc);
    let ts = theta_scale(sc);
    let radii: Vec<f64> = if sweep { sc.sweep_radii() } else { vec![sc.radii.r0] };
    match test {
        TestKind::Lrt => {
            let th0 = lrt::lrt_sensitivity(&p0h, &p1h, sc.gamma, alpha, Hypothesis::Null)?;
            let th1 = lrt::lrt_sensitivity(&p0h, &p1h, sc.gamma, alpha, Hypothesis::Alternative)?;
            let rows: Vec<Vec<f64>> = radii
                .par_iter()
                .map(|&r| -> Result<Vec<f64>> {
                    let b0 = Ball::new(p0h.clone(), spec, r)?;
                    let b1 = Ball::new(p1h.clone(), spec, r)?;
                    let e0 =
                        lrt::worst_case_exponent(&p0h, &p1h, sc.gamma, &b0, Hypothesis::Null, &opts)?;
                    let e1 = lrt::worst_case_exponent(
                        &p0h,
                        &p1h,
                        sc.gamma,
                        &b1,
                        Hypothesis::Alternative,
                        &opts,
                    )?;
                    Ok(vec![
                        r,
                        e0 * s,
                        th0.at_radius(r).approx_e * s,
                        e1 * s,
                        th1.at_radius(r).approx_e * s,
                        th0.theta * ts,
                        th1.theta * ts,
                    ])
                })
                .collect::<Result<_>>()?;
            Ok(Output {
                header: vec!["r", "e0_exact", "e0_approx", "e1_exact", "e1_approx", "theta0", "theta1"],
                rows,
                diagnostics: serde_json::json!({
                    "command": "worst-case lrt",
                    "gamma": sc.gamma,
                    "spec": spec,
                    "theta0": th0, "theta1": th1,
                }),
            })
        }
        TestKind::Glrt => {
            let th0 = glrt::glrt_sensitivity(&p0h, sc.gamma, alpha, &opts)?;
            if !matches!(spec, DivergenceSpec::Kl) {
                return Err(Error::Usage(
                    "worst-case glrt currently evaluates relative entropy balls; set divergence.kind = \"kl\"".into(),
                ));
            }
            let rows: Vec<Vec<f64>> = radii
                .par_iter()
                .map(|&r| -> Result<Vec<f64>> {
                    let e0 = glrt_worst_case_kl(&p0h, sc.gamma, r, &opts)?;
                    Ok(vec![r, e0 * s, th0.at_radius(r).approx_e * s, th0.theta * ts])
                })
                .collect::<Result<_>>()?;
            Ok(Output {
                header: vec!["r", "e0_exact", "e0_approx", "theta0"],
                rows,
                diagnostics: serde_json::json!({
                    "command": "worst-case glrt",
                    "gamma": sc.gamma,
                    "theta0": th0,
                }),
            })
        }
        TestKind::Sprt => {
            let sens = sprt::sprt_sensitivity(&p0h, &p1h, alpha, Hypothesis::Null)?;
            let approx = sens.corollary_report();
            let rows: Vec<Vec<f64>> = radii
                .par_iter()
                .map(|&r| -> Result<Vec<f64>> {
                    let b0 = Ball::new(p0h.clone(), spec, r)?;
                    let b1 = Ball::new(p1h.clone(), spec, r)?;
                    let e0 = sprt::sprt_worst_case_exact(
                        &p0h,
                        &p1h,
                        &b0,
                        &b1,
                        Hypothesis::Null,
                        &opts,
                    )?;
                    Ok(vec![r, e0 * s, approx.at_radius(r).approx_e * s, sens.theta_bar * ts])
                })
                .collect::<Result<_>>()?;
            Ok(Output {
                header: vec!["r", "e0_exact", "e0_approx", "theta0"],
                rows,
                diagnostics: serde_json::json!({
                    "command": "worst-case sprt",
                    "sensitivity": sens,
                }),
            })
        }
    }
}

/// Worst case of the Hoeffding type-I exponent over a relative entropy ball
/// around the test distribution: joint descent over the data distribution.
fn glrt_worst_case_kl(
    ph0: &ProbDist,
    gamma: f64,
    r: f64,
    opts: &SolveOptions,
) -> Result<f64> {
    if r == 0.0 {
        return glrt::glrt_e0(ph0, ph0, gamma, opts);
    }
    let ball = Ball::new(ph0.clone(), DivergenceSpec::Kl, r)?;
    if ph0.len() == 2 {
        // 1-D oracle over the data parameter
        let (lo, hi) = {
            let c = ph0.p(1);
            let d_at = |t: f64| {
                crate::divergences::kl(ph0, &ProbDist::new(vec![1.0 - t, t]).unwrap())
                    .unwrap_or(f64::INFINITY)
            };
            let eps = 1e-9;
            let lo = if d_at(eps) <= r {
                eps
            } else {
                crate::solver::bisect(|t| d_at(t) - r, eps, c, 1e-15)?
            };
            let hi = if d_at(1.0 - eps) <= r {
                1.0 - eps
            } else {
                crate::solver::bisect(|t| d_at(t) - r, c, 1.0 - eps, 1e-15)?
            };
            (lo, hi)
        };
        let f = |t: f64| -> f64 {
            let p = ProbDist::new(vec![1.0 - t, t]).unwrap();
            glrt::glrt_e0(&p, ph0, gamma, opts).unwrap_or(f64::INFINITY)
        };
        let n = 400;
        let mut best = f64::INFINITY;
        let mut tb = lo;
        for i in 0..=n {
            let t = lo + (hi - lo) * i as f64 / n as f64;
            let v = f(t);
            if v < best {
                best = v;
                tb = t;
            }
        }
        let pad = (hi - lo) / n as f64;
        let (_, refined) =
            crate::solver::golden_min(f, (tb - 2.0 * pad).max(lo), (tb + 2.0 * pad).min(hi), 1e-13);
        Ok(best.min(refined))
    } else {
        let obj = |x: &[f64]| -> (f64, Vec<f64>) {
            let p = match ProbDist::new(
                x.iter().map(|&v| v.max(crate::simplex::SUPPORT_FLOOR)).collect::<Vec<_>>(),
            ) {
                Ok(p) => p,
                Err(_) => return (f64::INFINITY, vec![0.0; x.len()]),
            };
            match glrt::glrt_e0_with_achiever(&p, ph0, gamma, opts) {
                Ok((v, q)) => {
                    let g: Vec<f64> =
                        q.probs().iter().zip(p.probs()).map(|(&qi, &pi)| -qi / pi).collect();
                    (v, g)
                }
                Err(_) => (f64::INFINITY, vec![0.0; x.len()]),
            }
        };
        Ok(crate::solver::minimize_over_ball(&obj, &ball, opts)?.value)
    }
}

fn cmd_sensitivity(test: SensKind, sc: &Scenario) -> Result<Output> {
    let (p0, p1, ph0, ph1) = (sc.p0(), sc.p1(), sc.p0_hat(), sc.p1_hat());
    let spec = sc.divergence.to_spec()?;
    let alpha = spec.curvature();
    let opts = SolveOptions::default();
    let s = exp_scale(sc);
    let ts = theta_scale(sc);
    let radii = sc.sweep_radii();
    match test {
        SensKind::Lrt => {
            let t0 = lrt::lrt_sensitivity(&ph0, &ph1, sc.gamma, alpha, Hypothesis::Null)?;
            let t1 = lrt::lrt_sensitivity(&ph0, &ph1, sc.gamma, alpha, Hypothesis::Alternative)?;
            let rows = radii
                .iter()
                .map(|&r| {
                    vec![
                        r,
                        t0.at_radius(r).approx_e * s,
                        t1.at_radius(r).approx_e * s,
                        t0.theta * ts,
                        t1.theta * ts,
                    ]
                })
                .collect();
            Ok(Output {
                header: vec!["r", "e0_approx", "e1_approx", "theta0", "theta1"],
                rows,
                diagnostics: serde_json::json!({
                    "command": "sensitivity lrt", "theta0": t0, "theta1": t1,
                }),
            })
        }
        SensKind::Glrt => {
            let t0 = glrt::glrt_sensitivity(&ph0, sc.gamma, alpha, &opts)?;
            let rows = radii
                .iter()
                .map(|&r| vec![r, t0.at_radius(r).approx_e * s, t0.theta * ts])
                .collect();
            Ok(Output {
                header: vec!["r", "e0_approx", "theta0"],
                rows,
                diagnostics: serde_json::json!({
                    "command": "sensitivity glrt", "theta0": t0,
                }),
            })
        }
        SensKind::Sprt => {
            let s0 = sprt::sprt_sensitivity(&ph0, &ph1, alpha, Hypothesis::Null)?;
            let s1 = sprt::sprt_sensitivity(&ph0, &ph1, alpha, Hypothesis::Alternative)?;
            let rows = radii
                .iter()
                .map(|&r| {
                    vec![
                        r,
                        s0.approx_at(r, r) * s,
                        s1.approx_at(r, r) * s,
                        s0.theta_bar * ts,
                        s1.theta_bar * ts,
                    ]
                })
                .collect();
            Ok(Output {
                header: vec!["r", "e0_approx", "e1_approx", "theta0", "theta1"],
                rows,
                diagnostics: serde_json::json!({
                    "command": "sensitivity sprt",
                    "hypothesis0": s0, "hypothesis1": s1,
                }),
            })
        }
        SensKind::AdvLrt => {
            let t0 = adversarial::adv_lrt_sensitivity(&p0, &p1, sc.gamma, alpha, Hypothesis::Null)?;
            let t1 =
                adversarial::adv_lrt_sensitivity(&p0, &p1, sc.gamma, alpha, Hypothesis::Alternative)?;
            let sandwich0 = adversarial::adv_vs_dist_bounds(&p0, &p1, sc.gamma, Hypothesis::Null)?;
            let rows = radii
                .iter()
                .map(|&r| {
                    vec![
                        r,
                        t0.at_radius(r).approx_e * s,
                        t1.at_radius(r).approx_e * s,
                        t0.theta * ts,
                        t1.theta * ts,
                    ]
                })
                .collect();
            Ok(Output {
                header: vec!["r", "e0_approx", "e1_approx", "theta0", "theta1"],
                rows,
                diagnostics: serde_json::json!({
                    "command": "sensitivity adv-lrt",
                    "theta0": t0, "theta1": t1, "sandwich_h0": sandwich0,
                }),
            })
        }
        SensKind::AdvGlrt => {
            let (t0, t1) = adversarial::adv_glrt_sensitivity(&p0, &p1, sc.gamma, alpha, &opts)?;
            let e1 = glrt::glrt_e1(&p0, &p1, sc.gamma)?;
            let rows = radii
                .iter()
                .map(|&r| {
                    vec![
                        r,
                        (sc.gamma - (r * t0).sqrt()).max(0.0) * s,
                        (e1 - (r * t1).sqrt()).max(0.0) * s,
                        t0 * ts,
                        t1 * ts,
                    ]
                })
                .collect();
            Ok(Output {
                header: vec!["r", "e0_approx", "e1_approx", "theta0", "theta1"],
                rows,
                diagnostics: serde_json::json!({
                    "command": "sensitivity adv-glrt", "theta0": t0, "theta1": t1,
                }),
            })
        }
    }
}

fn cmd_adversarial(test: TestKind, sc: &Scenario) -> Result<Output> {
    let (p0, p1) = (sc.p0(), sc.p1());
    let spec = sc.divergence.to_spec()?;
    let alpha = spec.curvature();
    let opts = SolveOptions::default();
    let s = exp_scale(sc);
    let r = sc.radii.r0;
    match test {
        TestKind::Lrt => {
            let e0 =
                adversarial::adv_lrt_worst_case(&p0, &p1, sc.gamma, r, &spec, Hypothesis::Null, &opts)?;
            let e1 = adversarial::adv_lrt_worst_case(
                &p0,
                &p1,
                sc.gamma,
                r,
                &spec,
                Hypothesis::Alternative,
                &opts,
            )?;
            Ok(Output {
                header: vec!["r", "e0_exact", "e1_exact"],
                rows: vec![vec![r, e0 * s, e1 * s]],
                diagnostics: serde_json::json!({
                    "command": "adversarial lrt", "gamma": sc.gamma, "spec": spec,
                }),
            })
        }
        TestKind::Glrt => {
            let (e0, e1) = adversarial::adv_glrt_worst_case(&p0, &p1, sc.gamma, r, &spec, &opts)?;
            Ok(Output {
                header: vec!["r", "e0_exact", "e1_exact"],
                rows: vec![vec![r, e0 * s, e1 * s]],
                diagnostics: serde_json::json!({
                    "command": "adversarial glrt", "gamma": sc.gamma, "spec": spec,
                }),
            })
        }
        TestKind::Sprt => {
            let rep = adversarial::adv_sprt_bounds(&p0, &p1, r, alpha, 1.0)?;
            Ok(Output {
                header: vec!["r", "e0_exact", "e1_exact"],
                rows: vec![vec![r, rep.e0 * s, rep.e1 * s]],
                diagnostics: serde_json::json!({
                    "command": "adversarial sprt",
                    "report": rep,
                    "product_lower_bound": rep.e0 * rep.e1,
                }),
            })
        }
    }
}

fn cmd_simulate(sc: &Scenario) -> Result<Output> {
    let (p0, ph0, ph1) = (sc.p0(), sc.p0_hat(), sc.p1_hat());
    let mut rows = Vec::new();
    let mut stats_all = Vec::new();
    for &g in &sc.sim.gamma_grid {
        let config = sprt::SprtConfig::new(ph0.clone(), ph1.clone(), g, g)?;
        let stats = sprt::simulate_sprt(&p0, &config, Hypothesis::Null, sc.sim.trials, sc.sim.seed)?;
        rows.push(vec![
            g,
            stats.err_rate,
            stats.mean_tau,
            stats.var_tau,
            stats.trials as f64,
            stats.censored as f64,
            stats.seed as f64,
        ]);
        stats_all.push(stats);
    }
    let slope_pts: Vec<(f64, f64)> = sc
        .sim
        .gamma_grid
        .iter()
        .zip(&stats_all)
        .map(|(&g, st)| (g, st.err_rate))
        .collect();
    let slope = sprt::estimate_exponent_slope(&slope_pts).ok();
    Ok(Output {
        header: vec!["gamma", "err_rate", "mean_tau", "var_tau", "trials", "censored", "seed"],
        rows,
        diagnostics: serde_json::json!({
            "command": "simulate sprt",
            "stats": stats_all,
            "exponent_slope": slope,
        }),
    })
}

fn cmd_oracle(kind: OracleKind, sc: &Scenario) -> Result<Output> {
    let (p0, _p1, ph0, ph1) = (sc.p0(), sc.p1(), sc.p0_hat(), sc.p1_hat());
    let s = exp_scale(sc);
    match kind {
        OracleKind::Types => {
            // exact type-enumeration error probability of the LRT under the null
            let c = crate::divergences::llr(&ph1, &ph0);
            let gamma = sc.gamma;
            let mut rows = Vec::new();
            for &n in &sc.oracle.n_grid {
                let le = crate::solver::sanov_error_probability(
                    &p0,
                    &|t| t.as_dist().expect(&c) >= gamma - 1e-12,
                    n,
                    crate::simplex::DEFAULT_ENUM_CAP,
                )?;
                match le {
                    Some(le) => rows.push(vec![n as f64, le, -le / n as f64 * s]),
                    None => rows.push(vec![n as f64, f64::NEG_INFINITY, f64::INFINITY]),
                }
            }
            Ok(Output {
                header: vec!["n", "log_eps", "slope"],
                rows,
                diagnostics: serde_json::json!({
                    "command": "oracle types", "gamma": gamma,
                }),
            })
        }
        OracleKind::Grid => {
            // grid referee of the worst-case LRT type-I exponent at r0
            let c = crate::divergences::llr(&ph1, &ph0);
            let spec = sc.divergence.to_spec()?;
            let ball = Ball::new(ph0.clone(), spec, sc.radii.r0)?;
            let gamma = sc.gamma;
            let obj = |p: &ProbDist| -> f64 {
                match crate::tilted::lambda_for_mismatched_threshold(p, &ph0, &ph1, gamma, 0) {
                    Ok(sv) if sv.flag == crate::tilted::ThresholdFlag::Interior => {
                        let q =
                            crate::tilted::mismatched_tilted(p, &ph0, &ph1, sv.lambda, 0).unwrap();
                        crate::divergences::kl(&q, p).unwrap_or(f64::INFINITY)
                    }
                    Ok(_) => 0.0,
                    Err(_) => f64::INFINITY,
                }
            };
            let feasible =
                |p: &ProbDist| ball.distance_to(p).map(|d| d <= ball.radius).unwrap_or(false);
            let (arg, v) = crate::solver::grid_oracle(
                &obj,
                &feasible,
                p0.len(),
                sc.oracle.grid_step,
                crate::solver::ExtremizeMode::Min,
            )?;
            let _ = c;
            Ok(Output {
                header: vec!["r", "e0_exact"],
                rows: vec![vec![sc.radii.r0, v * s]],
                diagnostics: serde_json::json!({
                    "command": "oracle grid",
                    "argmin": arg.probs(),
                    "grid_step": sc.oracle.grid_step,
                }),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"
p0 = [0.9, 0.1]
p1 = [0.2, 0.8]
gamma = 0.0

[divergence]
kind = "kl"

[radii]
r0 = 1e-4
r1 = 1e-4

[sweep]
r_min = 1e-4
r_max = 1e-2
points = 5
log_spaced = true

[sim]
trials = 1000
seed = 7
gamma_grid = [4.0, 5.0]
"#;

    #[test]
    fn scenario_roundtrip_is_identity() {
        let sc = Scenario::from_str(EXAMPLE).unwrap();
        let text = sc.to_toml();
        let sc2 = Scenario::from_str(&text).unwrap();
        assert_eq!(sc, sc2);
    }

    #[test]
    fn scenario_validation_messages() {
        let bad = EXAMPLE.replace("p0 = [0.9, 0.1]", "p0 = [0.9, 0.2]");
        let err = Scenario::from_str(&bad).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("p0"), "message should name the field: {msg}");

        let bad = EXAMPLE.replace("kind = \"kl\"", "kind = \"wasserstein\"");
        assert!(Scenario::from_str(&bad).is_err());

        let bad = EXAMPLE.replace("r_min = 1e-4", "r_min = 2e-2");
        assert!(Scenario::from_str(&bad).is_err());

        // unknown fields are parse errors with position info
        let bad = format!("{EXAMPLE}\nnonsense = 3\n");
        assert!(Scenario::from_str(&bad).is_err());
    }

    #[test]
    fn sweep_radii_log_spacing() {
        let sc = Scenario::from_str(EXAMPLE).unwrap();
        let r = sc.sweep_radii();
        assert_eq!(r.len(), 5);
        assert!((r[0] - 1e-4).abs() < 1e-15);
        assert!((r[4] - 1e-2).abs() < 1e-12);
        let ratio01 = r[1] / r[0];
        let ratio34 = r[4] / r[3];
        assert!((ratio01 - ratio34).abs() < 1e-9);
    }

    #[test]
    fn divergence_section_mapping() {
        for (kind, alpha, expect) in [
            ("kl", None, DivergenceSpec::Kl),
            ("chi_squared", None, DivergenceSpec::ChiSquared),
            ("squared_hellinger", None, DivergenceSpec::SquaredHellinger),
            ("renyi", Some(0.5), DivergenceSpec::Renyi { order: 0.5 }),
        ] {
            let sec = DivergenceSection { kind: kind.into(), alpha };
            assert_eq!(sec.to_spec().unwrap(), expect);
        }
        assert!(DivergenceSection { kind: "renyi".into(), alpha: None }.to_spec().is_err());
    }
}
