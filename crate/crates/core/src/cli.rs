//! Command-line front end.
//!
//! [`run`] takes the argument vector and a sink for standard output and
//! returns the process exit code: 0 on success, 1 when a verification or
//! inequality check fails, 2 on usage errors.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Once;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::mixture::{canonicalize, MixtureSpec};
use crate::oracle::{verify_cheeger_lower_bound, VerifyOptions, VerifyReport};
use crate::scanner::{self, ScanRecord};
use crate::solver::{cheeger, iso_profile, profile_domain_grid, CheegerSolution, InequalityChecks, ProfilePoint, Side};
use crate::special_fn::Probability;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSIFIED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "CHEEGER_MIX_THREADS";

#[derive(Debug, Parser)]
#[command(name = "cheeger-mix", version, about = "Cheeger constants of two-component Gaussian mixtures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cheeger constant, minimizers and optimal half-spaces.
    Compute {
        #[command(flatten)]
        mixture: MixtureArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Restricted isoperimetric profile over the interval between the two centers.
    Profile {
        #[command(flatten)]
        mixture: MixtureArgs,
        /// Number of evenly spaced volumes.
        #[arg(long, default_value_t = 101)]
        points: usize,
        /// Explicit volumes (comma-separated), instead of --points.
        #[arg(long, value_parser = parse_list)]
        volumes: Option<List>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Solve every cell of a (p, d) grid.
    Scan {
        #[arg(long, default_value_t = 0.01, value_parser = finite)]
        p_lo: f64,
        #[arg(long, default_value_t = 0.99, value_parser = finite)]
        p_hi: f64,
        #[arg(long, default_value_t = 0.05, value_parser = finite)]
        d_lo: f64,
        #[arg(long, default_value_t = 8.0, value_parser = finite)]
        d_hi: f64,
        #[arg(long, default_value_t = 50)]
        np: usize,
        #[arg(long, default_value_t = 50)]
        nd: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check random tilted half-spaces, balls and slabs against the computed constant.
    Verify {
        #[command(flatten)]
        mixture: MixtureArgs,
        #[arg(long, default_value_t = 500)]
        halfspace_trials: usize,
        #[arg(long, default_value_t = 100)]
        mc_trials: usize,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Tie locus in p at fixed d, or the uniqueness threshold in d at fixed p.
    Locus {
        /// Distance for the tie search.
        #[arg(long, value_parser = finite, required_unless_present = "threshold_p")]
        d: Option<f64>,
        #[arg(long, default_value_t = 0.05, value_parser = finite)]
        p_lo: f64,
        #[arg(long, default_value_t = 0.10, value_parser = finite)]
        p_hi: f64,
        /// Estimate the uniqueness threshold for this weight instead.
        #[arg(long, value_parser = finite, conflicts_with = "d")]
        threshold_p: Option<f64>,
        #[arg(long, default_value_t = 10.0, value_parser = finite)]
        d_hi: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the four inequality checks behind the solver.
    Checks {
        #[command(flatten)]
        mixture: MixtureArgs,
        #[arg(long, default_value_t = 10_000)]
        grid: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Clone, PartialEq)]
struct List(Vec<f64>);

#[derive(Debug, Args)]
struct MixtureArgs {
    /// Weight of the component centered at a.
    #[arg(long, value_parser = finite)]
    p: Option<f64>,
    /// Center a (comma-separated; a single value is repeated to the dimension).
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    a: Option<List>,
    /// Center b (comma-separated).
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    b: Option<List>,
    /// Canonical weight, with --d.
    #[arg(long, value_parser = finite)]
    m: Option<f64>,
    /// Canonical distance, with --m.
    #[arg(long, value_parser = finite)]
    d: Option<f64>,
    /// Canonical pair "m,d".
    #[arg(long = "m-d", value_parser = parse_list)]
    m_d: Option<List>,
    /// Ambient dimension.
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn finite(s: &str) -> Result<f64, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("not a number: {s:?}"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("not a finite number: {s:?}"))
    }
}

fn parse_list(s: &str) -> Result<List, String> {
    s.split(',').map(finite).collect::<Result<Vec<_>, _>>().map(List)
}

struct Usage(String);

impl From<Error> for Usage {
    fn from(e: Error) -> Self {
        Usage(e.to_string())
    }
}

impl MixtureArgs {
    fn resolve(&self) -> Result<MixtureSpec, Usage> {
        let explicit = self.a.is_some() || self.b.is_some();
        let shorthand = self.m.is_some() || self.d.is_some() || self.m_d.is_some();
        if explicit && shorthand {
            return Err(Usage("give either --a/--b or the --m/--d shorthand, not both".into()));
        }
        if explicit {
            let (Some(p), Some(a), Some(b)) = (self.p, &self.a, &self.b) else {
                return Err(Usage("--a/--b need --p, --a and --b together".into()));
            };
            let n = self.dim.unwrap_or(a.0.len().max(b.0.len()));
            let widen = |v: &[f64], name: &str| -> Result<Vec<f64>, Usage> {
                match v.len() {
                    1 => Ok(vec![v[0]; n]),
                    k if k == n => Ok(v.to_vec()),
                    k => Err(Usage(format!("--{name} has {k} coordinates, expected {n}"))),
                }
            };
            return Ok(MixtureSpec::new(p, widen(&a.0, "a")?, widen(&b.0, "b")?)?);
        }
        let (m, d) = match (&self.m_d, self.m, self.d) {
            (Some(pair), None, None) if pair.0.len() == 2 => (pair.0[0], pair.0[1]),
            (Some(_), None, None) => return Err(Usage("--m-d takes exactly two values \"m,d\"".into())),
            (None, Some(m), Some(d)) => (m, d),
            (None, None, None) => return Err(Usage("no mixture given: use --p --a --b, or --m --d".into())),
            _ => return Err(Usage("use --m with --d, or --m-d alone".into())),
        };
        if !(0.0..=0.5).contains(&m) {
            return Err(Usage(format!("--m must lie in [0, 1/2], got {m}")));
        }
        if d < 0.0 {
            return Err(Usage(format!("--d must be nonnegative, got {d}")));
        }
        let weight = match self.p {
            None => m,
            Some(p) if p.min(1.0 - p) == m => p,
            Some(p) => return Err(Usage(format!("--p {p} is inconsistent with --m {m}"))),
        };
        Ok(MixtureSpec::on_axis(weight, d, self.dim.unwrap_or(1))?)
    }
}

static THREADS: Once = Once::new();

fn configure_threads() {
    THREADS.call_once(|| {
        if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|s| s.trim().parse::<usize>().ok()) {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    });
}

/// Expands `--config file.toml` into flags; flags given explicitly win.
fn expand_config(args: Vec<String>) -> Result<Vec<String>, Usage> {
    let Some(pos) = args.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(args);
    };
    let (path, span) = match args[pos].strip_prefix("--config=") {
        Some(p) => (p.to_string(), 1),
        None => match args.get(pos + 1) {
            Some(p) => (p.clone(), 2),
            None => return Err(Usage("--config needs a file path".into())),
        },
    };
    let text = std::fs::read_to_string(&path).map_err(|e| Usage(format!("cannot read config {path}: {e}")))?;
    let table: toml::Table = text.parse().map_err(|e| Usage(format!("invalid config {path}: {e}")))?;

    let mut rest: Vec<String> = args[..pos].to_vec();
    rest.extend_from_slice(&args[pos + span..]);
    let given = |flag: &str| rest.iter().any(|a| a == flag || a.starts_with(&format!("{flag}=")));
    let mut extra = Vec::new();
    for (key, value) in &table {
        let flag = format!("--{}", key.replace('_', "-"));
        if given(&flag) {
            continue;
        }
        let scalar = |v: &toml::Value| -> Result<String, Usage> {
            match v {
                toml::Value::String(s) => Ok(s.clone()),
                toml::Value::Integer(i) => Ok(i.to_string()),
                toml::Value::Float(x) => Ok(x.to_string()),
                _ => Err(Usage(format!("config key {key}: unsupported value"))),
            }
        };
        match value {
            toml::Value::Boolean(true) => extra.push(flag),
            toml::Value::Boolean(false) => {}
            toml::Value::Array(items) => {
                let joined = items.iter().map(scalar).collect::<Result<Vec<_>, _>>()?.join(",");
                extra.push(format!("{flag}={joined}"));
            }
            v => extra.push(format!("{flag}={}", scalar(v)?)),
        }
    }
    rest.extend(extra);
    Ok(rest)
}

/// Runs one command. `args[0]` is the program name.
pub fn run(args: Vec<String>, stdout: &mut dyn Write) -> i32 {
    configure_threads();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            if e.use_stderr() {
                eprint!("{e}");
            } else {
                let _ = write!(stdout, "{e}");
            }
            return code;
        }
    };
    match execute(cli.command, stdout) {
        Ok(code) => code,
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
    }
}

fn emit(out: &OutputArgs, stdout: &mut dyn Write, text: &str) -> Result<(), Usage> {
    match &out.output {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Usage(format!("cannot write {}: {e}", path.display())))
        }
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Usage(format!("cannot write output: {e}"))),
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn float_list(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<i32, Usage> {
    match command {
        Command::Compute { mixture, out } => {
            let spec = mixture.resolve()?;
            let sol = cheeger(&spec)?;
            let text = match out.format {
                Format::Json => json(&sol),
                Format::Csv => compute_csv(&sol),
                Format::Human => compute_human(&spec, &sol),
            };
            emit(&out, stdout, &text)?;
            Ok(EXIT_OK)
        }
        Command::Profile {
            mixture,
            points,
            volumes,
            out,
        } => {
            let spec = mixture.resolve()?;
            let canon = canonicalize(&spec)?;
            let cm = canon.mixture()?;
            let grid = match volumes {
                Some(List(vs)) => vs.into_iter().map(Probability::new).collect::<Result<Vec<_>, _>>()?,
                None if points >= 2 => profile_domain_grid(cm, points),
                None => return Err(Usage("--points must be at least 2".into())),
            };
            let profile = iso_profile(cm, &grid)?;
            let text = match out.format {
                Format::Json => json(&profile),
                Format::Csv | Format::Human => profile_table(&profile, out.format),
            };
            emit(&out, stdout, &text)?;
            Ok(EXIT_OK)
        }
        Command::Scan {
            p_lo,
            p_hi,
            d_lo,
            d_hi,
            np,
            nd,
            out,
        } => {
            let records = scanner::scan_grid(p_lo, p_hi, d_lo, d_hi, np, nd)?;
            let text = match out.format {
                Format::Json => {
                    let mut s = scanner::to_json(&records);
                    s.push('\n');
                    s
                }
                Format::Csv => scanner::to_csv(&records),
                Format::Human => scan_human(&records),
            };
            emit(&out, stdout, &text)?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            mixture,
            halfspace_trials,
            mc_trials,
            samples,
            seed,
            out,
        } => {
            let spec = mixture.resolve()?;
            let options = VerifyOptions {
                halfspace_trials,
                mc_trials,
                samples,
                seed,
            };
            let report = verify_cheeger_lower_bound(&spec, &options)?;
            let text = match out.format {
                Format::Json => json(&report),
                Format::Csv => format!(
                    "h_mu,worst_ratio,trials,violations,pass\n{:.16e},{:.16e},{},{},{}\n",
                    report.h_mu,
                    report.worst_ratio,
                    report.trials,
                    report.violations.len(),
                    report.pass
                ),
                Format::Human => verify_human(&report),
            };
            emit(&out, stdout, &text)?;
            Ok(if report.pass { EXIT_OK } else { EXIT_FALSIFIED })
        }
        Command::Locus {
            d,
            p_lo,
            p_hi,
            threshold_p,
            d_hi,
            out,
        } => {
            let text = match (threshold_p, d) {
                (Some(p), _) => {
                    let c = scanner::uniqueness_threshold(p, d_hi)?;
                    let result = ThresholdResult { p, d_hi, threshold: c };
                    match out.format {
                        Format::Json => json(&result),
                        Format::Csv => format!("p,d_hi,threshold\n{:.16e},{:.16e},{:.16e}\n", p, d_hi, c),
                        Format::Human => format!("p          {p}\nd_hi       {d_hi}\nthreshold  {c}\n"),
                    }
                }
                (None, Some(d)) => {
                    let p_hat = scanner::tie_locus(d, (p_lo, p_hi))?;
                    let record = scanner::scan_point(p_hat, d)?;
                    let result = LocusResult {
                        d,
                        p_lo,
                        p_hi,
                        p_hat,
                        record,
                    };
                    match out.format {
                        Format::Json => json(&result),
                        Format::Csv => scanner::to_csv(std::slice::from_ref(&result.record)),
                        Format::Human => format!(
                            "d          {d}\nbracket    {p_lo},{p_hi}\np_hat      {p_hat}\nn_min      {}\nminimizers {}\ngap        {}\n",
                            result.record.n_min,
                            float_list(&result.record.minimizers),
                            result.record.gap
                        ),
                    }
                }
                (None, None) => return Err(Usage("locus needs --d or --threshold-p".into())),
            };
            emit(&out, stdout, &text)?;
            Ok(EXIT_OK)
        }
        Command::Checks { mixture, grid, out } => {
            let spec = mixture.resolve()?;
            let canon = canonicalize(&spec)?;
            let cm = canon.mixture()?;
            let checks = InequalityChecks::run(cm, grid);
            let rows = [
                ("ode_inequality", checks.ode_inequality),
                ("local_logconcavity", checks.local_logconcavity),
                ("halfspace_ratio_monotone", checks.halfspace_ratio_monotone),
                ("r_star_location", checks.r_star_location),
            ];
            let verdict = |ok: bool| if ok { "pass" } else { "fail" };
            let text = match out.format {
                Format::Json => json(&ChecksResult {
                    m: cm.m(),
                    d: cm.d(),
                    grid,
                    checks,
                    all_pass: checks.all_pass(),
                }),
                Format::Csv => {
                    let mut s = String::from("check,result\n");
                    for (name, ok) in rows {
                        writeln!(s, "{name},{}", verdict(ok)).unwrap();
                    }
                    s
                }
                Format::Human => {
                    let mut s = String::new();
                    for (name, ok) in rows {
                        writeln!(s, "{name:<26}{}", verdict(ok)).unwrap();
                    }
                    s
                }
            };
            emit(&out, stdout, &text)?;
            Ok(if checks.all_pass() { EXIT_OK } else { EXIT_FALSIFIED })
        }
    }
}

#[derive(Serialize)]
struct ThresholdResult {
    p: f64,
    d_hi: f64,
    threshold: f64,
}

#[derive(Serialize)]
struct LocusResult {
    d: f64,
    p_lo: f64,
    p_hi: f64,
    p_hat: f64,
    record: ScanRecord,
}

#[derive(Serialize)]
struct ChecksResult {
    m: f64,
    d: f64,
    grid: usize,
    checks: InequalityChecks,
    all_pass: bool,
}

fn compute_csv(sol: &CheegerSolution) -> String {
    let t = |i: usize| sol.minimizers.get(i).map_or(String::new(), |x| format!("{x:.16e}"));
    let gap = if sol.gap.is_finite() { format!("{:.16e}", sol.gap) } else { "inf".into() };
    format!(
        "h,r_star,n_min,t1,t2,gap,degenerate_gaussian\n{:.16e},{:.16e},{},{},{},{},{}\n",
        sol.h,
        sol.r_star,
        sol.minimizers.len(),
        t(0),
        t(1),
        gap,
        sol.degenerate_gaussian
    )
}

fn compute_human(spec: &MixtureSpec, sol: &CheegerSolution) -> String {
    let mut s = String::new();
    writeln!(s, "p          {}", spec.p).unwrap();
    writeln!(s, "a          {}", float_list(&spec.a)).unwrap();
    writeln!(s, "b          {}", float_list(&spec.b)).unwrap();
    writeln!(s, "h          {}", sol.h).unwrap();
    writeln!(s, "r_star     {}", sol.r_star).unwrap();
    writeln!(s, "minimizers {}", float_list(&sol.minimizers)).unwrap();
    writeln!(s, "unique     {}", sol.unique).unwrap();
    writeln!(s, "degenerate_gaussian {}", sol.degenerate_gaussian).unwrap();
    writeln!(s, "gap        {}", sol.gap).unwrap();
    for hs in &sol.halfspaces {
        let side = match hs.side {
            Side::Minus => "x.nu < c",
            Side::Plus => "x.nu > c",
        };
        writeln!(s, "halfspace  {side}  nu={}  c={}", float_list(&hs.nu), hs.c).unwrap();
    }
    s
}

fn profile_table(profile: &[ProfilePoint], format: Format) -> String {
    let mut s = String::from(if format == Format::Csv { "v,iso,r\n" } else { "v iso r\n" });
    let sep = if format == Format::Csv { "," } else { " " };
    for pt in profile {
        writeln!(s, "{:.16e}{sep}{:.16e}{sep}{:.16e}", pt.v.value(), pt.iso, pt.r).unwrap();
    }
    s
}

fn scan_human(records: &[ScanRecord]) -> String {
    let mut s = String::new();
    for r in records {
        writeln!(
            s,
            "p={} d={} h={} r_star={} n_min={} minimizers={} gap={}",
            r.p,
            r.d,
            r.h,
            r.r_star,
            r.n_min,
            float_list(&r.minimizers),
            r.gap
        )
        .unwrap();
    }
    s
}

fn verify_human(report: &VerifyReport) -> String {
    let mut s = String::new();
    let opt = |x: Option<f64>| x.map_or("n/a".to_string(), |v| v.to_string());
    writeln!(s, "h_mu                  {}", report.h_mu).unwrap();
    writeln!(s, "trials                {}", report.trials).unwrap();
    writeln!(s, "worst_ratio           {}", report.worst_ratio).unwrap();
    writeln!(s, "optimal_max_deviation {}", report.optimal_max_deviation).unwrap();
    writeln!(s, "exact_min_ratio       {}", opt(report.exact_min_ratio)).unwrap();
    writeln!(s, "tilted_margin         {}", opt(report.tilted_margin)).unwrap();
    writeln!(s, "mc_min_ratio          {}", opt(report.mc_min_ratio)).unwrap();
    writeln!(s, "mc_min_slack          {}", opt(report.mc_min_slack)).unwrap();
    writeln!(s, "violations            {}", report.violations.len()).unwrap();
    for v in &report.violations {
        writeln!(s, "  {}: ratio {} bound {}", v.reason, v.record.ratio, v.bound).unwrap();
    }
    writeln!(s, "result                {}", if report.pass { "pass" } else { "fail" }).unwrap();
    s
}
