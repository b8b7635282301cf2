//! The `jcrev` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 domain error, 3 the
//! question has a negative answer (no certificate, no revival, no solution).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use jcrev_core::diophantine::{
    chain_solver, pythagorean_middles, solve_difference_integer, solve_difference_rational, synthesize_params,
    SynthesizedParams,
};
use jcrev_core::dynamics::{fidelity_sweep, propagator_identity_distance, QuantumState, SubspaceDynamics};
use jcrev_core::model::{pair_spectrum, Branch, ModelParams, ParamFile, ParamSource};
use jcrev_core::revival::{revival_certificate, RevivalCertificate};
use jcrev_core::scan::{histogram, histogram_csv, scan_csv, scan_lcm, summarize};
use jcrev_core::{exact::parse_rational, with_workers, Error, ExactEnergy, Rational};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_DOMAIN: u8 = 2;
pub const EXIT_ABSENT: u8 = 3;

/// Distance and fidelity thresholds used by `verify`.
pub const REVIVAL_DISTANCE: f64 = 1e-6;
pub const REVIVAL_FIDELITY: f64 = 1.0 - 1e-6;

#[derive(Parser, Debug)]
#[command(name = "jcrev", version, about = "Exact revival analysis for the Jaynes-Cummings model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Machine-readable (CSV or key=value) or human output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,

    /// Write the output to this file instead of stdout. For scan-lcm the
    /// file always receives the raw CSV.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Seed for the random states drawn by verify.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads; 0 uses every core. Output does not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Human,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact spectrum of the block pair n, n+1.
    Spectrum(ModelArgs),
    /// Decide whether the block pair n, n+1 revives and give its period.
    CheckRevival(ModelArgs),
    /// Revival-admitting parameters from a unit-hyperbola point.
    Synthesize(SynthArgs),
    /// Numerically check a revival: propagator distance and state fidelities.
    Verify(VerifyArgs),
    /// Exact LCM of denominators over t = n d on the unit hyperbola.
    ScanLcm(ScanArgs),
    /// Rational and integer points on X^2 - Y^2 = K.
    SolveK(SolveKArgs),
    /// Integer chains X0 > X1 > ... with X_{j-1}^2 - X_j^2 = K_j.
    SolveChain(ChainArgs),
    /// Integers up to a bound that are both a hypotenuse and a leg.
    Middles(MiddlesArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// alpha = Delta / y, rational or surd (`2*sqrt(7)/3`).
    #[arg(long, allow_hyphen_values = true, value_parser = parse_energy, conflicts_with = "alpha2")]
    pub alpha: Option<ExactEnergy>,

    /// alpha^2; alpha is its nonnegative root.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_rat)]
    pub alpha2: Option<Rational>,

    /// beta = omega_a / y.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_energy, conflicts_with = "rho")]
    pub beta: Option<ExactEnergy>,

    /// rho = alpha + beta; sets beta = rho - alpha.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_rat)]
    pub rho: Option<Rational>,

    /// Unit-hyperbola parameter; with --rho, uses the synthesized parameters.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_rat, conflicts_with_all = ["alpha", "alpha2", "beta"], requires = "rho")]
    pub t: Option<Rational>,

    /// Lower block of the pair (default 1).
    #[arg(long)]
    pub n: Option<u64>,

    /// Parameter file of `key = value` lines.
    #[arg(long, conflicts_with_all = ["alpha", "alpha2", "beta", "rho", "t"])]
    pub params: Option<PathBuf>,

    /// Physical coupling y in Hz; periods are also reported in seconds.
    #[arg(long)]
    pub y_hz: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = parse_rat)]
    pub t: Rational,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_rat)]
    pub rho: Rational,
    #[arg(long, default_value_t = 1)]
    pub n: u64,
    #[arg(long)]
    pub y_hz: Option<f64>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    /// Time to test, in units of 1/y; defaults to the certified period.
    #[arg(long, allow_hyphen_values = true)]
    pub time: Option<f64>,

    /// Number of seeded random states in the fidelity sweep.
    #[arg(long, default_value_t = 100)]
    pub states: usize,

    /// Extra initial state: `re,im` lines over the four pair basis states.
    #[arg(long)]
    pub state: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    /// Step d; t = n d.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_rat)]
    pub d: Rational,

    #[arg(long)]
    pub count: u64,

    /// Histogram bin width in log10(lcm).
    #[arg(long, default_value_t = 1.0)]
    pub bin_width: f64,

    /// Write the histogram CSV here.
    #[arg(long)]
    pub hist: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SolveKArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = parse_rat)]
    pub k: Rational,

    /// Slope parameter of the rational solution, X - Y = s.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_rat, default_value = "1")]
    pub s: Rational,
}

#[derive(Args, Debug)]
pub struct ChainArgs {
    /// Differences K_1, ..., K_s.
    #[arg(long, value_delimiter = ',', required = true)]
    pub ks: Vec<u64>,

    /// Largest X0 searched.
    #[arg(long)]
    pub bound: u64,
}

#[derive(Args, Debug)]
pub struct MiddlesArgs {
    #[arg(long)]
    pub bound: u64,
}

fn parse_rat(text: &str) -> Result<Rational, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

fn parse_energy(text: &str) -> Result<ExactEnergy, String> {
    text.parse::<ExactEnergy>().map_err(|e| e.to_string())
}

/// What a command produced.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Usage(_) | Error::Parse(_) => Failure::Usage(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

/// Result of one subcommand before it is routed to stdout or a file.
#[derive(Default)]
struct Report {
    body: String,
    /// Raw data for `--out` when it differs from `body` (scan-lcm).
    data: Option<String>,
    notes: Vec<String>,
    /// `false` for a negative answer (exit 3).
    found: bool,
}

impl Report {
    fn found(body: String) -> Self {
        Report { body, found: true, ..Report::default() }
    }

    fn absent(body: String) -> Self {
        Report { body, found: false, ..Report::default() }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: EXIT_OK, stdout: text, stderr: String::new() }
            };
        }
    };
    dispatch(&cli)
}

/// Runs a parsed command line.
pub fn dispatch(cli: &Cli) -> Outcome {
    let report = match &cli.command {
        Command::Spectrum(m) => spectrum(cli, m),
        Command::CheckRevival(m) => check_revival(cli, m),
        Command::Synthesize(a) => synthesize(cli, a),
        Command::Verify(a) => verify(cli, a),
        Command::ScanLcm(a) => scan(cli, a),
        Command::SolveK(a) => solve_k(cli, a),
        Command::SolveChain(a) => solve_chain(cli, a),
        Command::Middles(a) => middles(cli, a),
    };
    let report = match report {
        Ok(r) => r,
        Err(Failure::Usage(msg)) => return failure(EXIT_USAGE, msg),
        Err(Failure::Domain(msg)) => return failure(EXIT_DOMAIN, msg),
    };
    let mut stderr = String::new();
    for note in &report.notes {
        writeln!(stderr, "warning: {note}").unwrap();
    }
    let mut stdout = report.body;
    if let Some(path) = &cli.out {
        let payload = match report.data {
            Some(data) => data,
            None => std::mem::take(&mut stdout),
        };
        if let Err(e) = write_file(path, &payload) {
            return failure(EXIT_USAGE, e);
        }
    }
    let code = if report.found { EXIT_OK } else { EXIT_ABSENT };
    Outcome { code, stdout, stderr }
}

fn failure(code: u8, msg: String) -> Outcome {
    Outcome { code, stdout: String::new(), stderr: format!("error: {msg}\n") }
}

fn write_file(path: &Path, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

struct Resolved {
    n: u64,
    alpha: ExactEnergy,
    beta: ExactEnergy,
    y_hz: Option<f64>,
}

fn check_y_hz(y: Option<f64>) -> Result<Option<f64>, Failure> {
    match y {
        Some(v) if !(v > 0.0 && v.is_finite()) => Err(Failure::Domain(format!("y_hz must be positive, got {v}"))),
        _ => Ok(y),
    }
}

fn resolve(m: &ModelArgs) -> Result<Resolved, Failure> {
    let y_flag = check_y_hz(m.y_hz)?;
    if let Some(path) = &m.params {
        let file = ParamFile::parse(&read_file(path)?)?;
        let n = m.n.or(file.n).unwrap_or(1);
        let (alpha, beta) = match file.source {
            ParamSource::Direct { alpha, beta } => (alpha, beta),
            ParamSource::Hyperbola { t, rho } => {
                let s = synthesize_params(&t, &rho, n)?;
                (s.alpha, s.beta)
            }
        };
        return Ok(Resolved { n, alpha, beta, y_hz: y_flag.or(file.y_hz) });
    }
    let n = m.n.unwrap_or(1);
    if let (Some(t), Some(rho)) = (&m.t, &m.rho) {
        let s = synthesize_params(t, rho, n)?;
        return Ok(Resolved { n, alpha: s.alpha, beta: s.beta, y_hz: y_flag });
    }
    let alpha = match (&m.alpha, &m.alpha2) {
        (Some(a), _) => a.clone(),
        (None, Some(a2)) => ExactEnergy::sqrt_of(a2)?,
        (None, None) => return Err(Failure::Usage("missing --alpha (or --alpha2, --t, --params)".into())),
    };
    let beta = match (&m.beta, &m.rho) {
        (Some(b), _) => b.clone(),
        (None, Some(rho)) => &ExactEnergy::from_rational(rho.clone()) - &alpha,
        (None, None) => return Err(Failure::Usage("missing --beta (or --rho)".into())),
    };
    Ok(Resolved { n, alpha, beta, y_hz: y_flag })
}

fn warnings(r: &Resolved) -> Vec<String> {
    ModelParams::new(r.alpha.clone(), r.beta.clone()).physicality_warnings()
}

fn branch_name(b: Branch) -> &'static str {
    match b {
        Branch::Lower => "lower",
        Branch::Upper => "upper",
    }
}

fn spectrum(cli: &Cli, m: &ModelArgs) -> Result<Report, Failure> {
    let r = resolve(m)?;
    let spec = pair_spectrum(r.n, &r.alpha, &r.beta)?;
    let mut body = String::new();
    match cli.format {
        Format::Csv => {
            body.push_str("level,block,branch,energy,energy_float\n");
            for (i, l) in spec.levels.iter().enumerate() {
                writeln!(body, "{i},{},{},{},{}", l.block, branch_name(l.branch), l.energy, l.energy.to_f64()).unwrap();
            }
        }
        Format::Human => {
            writeln!(body, "blocks {} and {}, alpha = {}, beta = {}", r.n, r.n + 1, r.alpha, r.beta).unwrap();
            for (i, l) in spec.levels.iter().enumerate() {
                writeln!(
                    body,
                    "  E{i} = {}  (~ {:.12}, block {} {})",
                    l.energy,
                    l.energy.to_f64(),
                    l.block,
                    branch_name(l.branch)
                )
                .unwrap();
            }
            if spec.degenerate {
                body.push_str("  two levels coincide exactly\n");
            }
        }
    }
    let mut report = Report::found(body);
    report.notes = warnings(&r);
    if spec.degenerate && cli.format == Format::Csv {
        report.notes.push("two levels coincide exactly".into());
    }
    Ok(report)
}

fn certificate_lines(cli: &Cli, cert: &RevivalCertificate, y_hz: Option<f64>) -> String {
    let mut out = String::new();
    match cli.format {
        Format::Csv => {
            out.push_str(&cert.to_record());
            if let Some(y) = y_hz {
                writeln!(out, "T_seconds={}", cert.period() / y).unwrap();
            }
        }
        Format::Human => {
            writeln!(out, "certificate: {cert}").unwrap();
            if let Some(y) = y_hz {
                writeln!(out, "T = {:e} s at y = {y} Hz", cert.period() / y).unwrap();
            }
        }
    }
    out
}

fn check_revival(cli: &Cli, m: &ModelArgs) -> Result<Report, Failure> {
    let r = resolve(m)?;
    let spec = pair_spectrum(r.n, &r.alpha, &r.beta)?;
    let mut report = match revival_certificate(&spec.energies())? {
        Some(cert) => {
            let mut body = match cli.format {
                Format::Csv => "revival=1\n".to_string(),
                Format::Human => String::new(),
            };
            body.push_str(&certificate_lines(cli, &cert, r.y_hz));
            Report::found(body)
        }
        None => {
            let reason = if r.alpha.is_zero() { "resonance" } else { "irrational gap ratio" };
            Report::absent(match cli.format {
                Format::Csv => format!("revival=0\nreason={reason}\n"),
                Format::Human => format!("no certificate ({reason})\n"),
            })
        }
    };
    report.notes = warnings(&r);
    Ok(report)
}

fn synthesize(cli: &Cli, a: &SynthArgs) -> Result<Report, Failure> {
    let y_hz = check_y_hz(a.y_hz)?;
    let s: SynthesizedParams = synthesize_params(&a.t, &a.rho, a.n)?;
    let cert = s.certificate()?;
    let mut body = String::new();
    match cli.format {
        Format::Csv => {
            write!(
                body,
                "t={}\nrho={}\nn={}\nX={}\nY={}\nalpha2={}\nalpha={}\nbeta={}\nF_plus={}\nF_minus={}\n",
                a.t, s.rho, s.n, s.point.x, s.point.y, s.alpha_squared, s.alpha, s.beta, s.fractions.0, s.fractions.1
            )
            .unwrap();
        }
        Format::Human => {
            writeln!(body, "t = {}, rho = {}, blocks {} and {}", a.t, s.rho, s.n, s.n + 1).unwrap();
            writeln!(body, "(X, Y) = {}", s.point).unwrap();
            writeln!(body, "alpha^2 = {}", s.alpha_squared).unwrap();
            writeln!(body, "alpha = {}", s.alpha).unwrap();
            writeln!(body, "beta = {}", s.beta).unwrap();
            writeln!(body, "F = ({}, {})", s.fractions.0, s.fractions.1).unwrap();
        }
    }
    body.push_str(&certificate_lines(cli, &cert, y_hz));
    let mut report = Report::found(body);
    report.notes = ModelParams::new(s.alpha.clone(), s.beta.clone()).physicality_warnings();
    Ok(report)
}

fn verify(cli: &Cli, a: &VerifyArgs) -> Result<Report, Failure> {
    let r = resolve(&a.model)?;
    let cert = revival_certificate(&pair_spectrum(r.n, &r.alpha, &r.beta)?.energies())?;
    let t = match (a.time, &cert) {
        (Some(t), _) if !t.is_finite() => return Err(Failure::Domain(format!("time must be finite, got {t}"))),
        (Some(t), _) => t,
        (None, Some(c)) => c.period(),
        (None, None) => {
            return Ok(Report::absent(match cli.format {
                Format::Csv => "revival=0\nreason=no certificate\n".to_string(),
                Format::Human => "no certificate; pass --time to test a specific time\n".to_string(),
            }))
        }
    };
    let dynamics = SubspaceDynamics::pair(r.n, &r.alpha, &r.beta)?;
    let distance = propagator_identity_distance(r.n, t, &r.alpha, &r.beta)?;
    let sweep = with_workers(cli.workers, || fidelity_sweep(&dynamics, t, a.states, cli.seed))?;
    let state_fidelity = match &a.state {
        Some(path) => {
            let psi = QuantumState::from_csv(vec![r.n, r.n + 1], &read_file(path)?)?;
            Some(psi.fidelity(&dynamics.evolve(&psi, t)?)?)
        }
        None => None,
    };
    let revived = distance <= REVIVAL_DISTANCE
        && sweep.min_fidelity >= REVIVAL_FIDELITY
        && state_fidelity.is_none_or(|f| f >= REVIVAL_FIDELITY);

    let mut body = String::new();
    match cli.format {
        Format::Csv => {
            write!(
                body,
                "t={t}\ndistance={distance:e}\nstates={}\nseed={}\nmin_fidelity={}\nmean_fidelity={}\nmax_norm_error={:e}\n",
                sweep.states, cli.seed, sweep.min_fidelity, sweep.mean_fidelity, sweep.max_norm_error
            )
            .unwrap();
            if let Some(f) = state_fidelity {
                writeln!(body, "state_fidelity={f}").unwrap();
            }
            writeln!(body, "revival={}", u8::from(revived)).unwrap();
        }
        Format::Human => {
            writeln!(body, "t = {t:.12} (units of 1/y), blocks {} and {}", r.n, r.n + 1).unwrap();
            if let Some(y) = r.y_hz {
                writeln!(body, "  = {:e} s at y = {y} Hz", t / y).unwrap();
            }
            writeln!(body, "propagator distance to a global phase: {distance:.3e} (<= {REVIVAL_DISTANCE:e})").unwrap();
            writeln!(
                body,
                "fidelity over {} random states (seed {}): min {:.15}, mean {:.15}",
                sweep.states, cli.seed, sweep.min_fidelity, sweep.mean_fidelity
            )
            .unwrap();
            if let Some(f) = state_fidelity {
                writeln!(body, "fidelity of the given state: {f:.15}").unwrap();
            }
            body.push_str(if revived { "revival verified\n" } else { "no revival at this time\n" });
        }
    }
    let mut report = if revived { Report::found(body) } else { Report::absent(body) };
    report.notes = warnings(&r);
    Ok(report)
}

fn scan(cli: &Cli, a: &ScanArgs) -> Result<Report, Failure> {
    let records = with_workers(cli.workers, || scan_lcm(&a.d, a.count))?;
    let bins = histogram(&records, a.bin_width)?;
    if let Some(path) = &a.hist {
        write_file(path, &histogram_csv(&bins)).map_err(Failure::Usage)?;
    }
    let csv = scan_csv(&records);
    let human = || {
        let s = summarize(&records);
        let mut out = String::new();
        writeln!(out, "t = n*{} for n = 1..{}: {} points, {} skipped (t = +-1)", a.d, a.count, s.records, s.skipped)
            .unwrap();
        if let (Some(lo), Some(hi)) = (&s.min_lcm, &s.max_lcm) {
            writeln!(out, "lcm range: {lo} .. {hi}").unwrap();
        }
        writeln!(out, "log10(lcm) histogram, bin width {}:", a.bin_width).unwrap();
        for (edge, count) in &bins {
            writeln!(out, "  [{edge}, {}): {count}", edge + a.bin_width).unwrap();
        }
        out
    };
    Ok(match (cli.format, cli.out.is_some()) {
        (Format::Csv, false) => Report::found(csv),
        (Format::Csv, true) => Report { data: Some(csv), ..Report::found(String::new()) },
        (Format::Human, false) => Report::found(human()),
        (Format::Human, true) => Report { data: Some(csv), ..Report::found(human()) },
    })
}

fn solve_k(cli: &Cli, a: &SolveKArgs) -> Result<Report, Failure> {
    let point = solve_difference_rational(&a.k, &a.s)?;
    let integral = (a.k.is_integer() && a.k > Rational::from_integer(0.into()))
        .then(|| a.k.to_integer().try_into().ok())
        .flatten()
        .map(solve_difference_integer);
    let mut body = String::new();
    match cli.format {
        Format::Csv => {
            body.push_str("kind,X,Y\n");
            writeln!(body, "rational,{},{}", point.x, point.y).unwrap();
            for (x, y) in integral.iter().flatten() {
                writeln!(body, "integer,{x},{y}").unwrap();
            }
        }
        Format::Human => {
            writeln!(body, "X^2 - Y^2 = {}", a.k).unwrap();
            writeln!(body, "rational point on X - Y = {}: {point}", a.s).unwrap();
            match &integral {
                None => body.push_str("integer points: K is not a positive integer\n"),
                Some(v) if v.is_empty() => body.push_str("integer points: none (K = 2 mod 4)\n"),
                Some(v) => {
                    let list: Vec<String> = v.iter().map(|(x, y)| format!("({x}, {y})")).collect();
                    writeln!(body, "integer points (X > Y >= 0): {}", list.join(", ")).unwrap();
                }
            }
        }
    }
    Ok(Report::found(body))
}

fn solve_chain(cli: &Cli, a: &ChainArgs) -> Result<Report, Failure> {
    let chains = with_workers(cli.workers, || chain_solver(&a.ks, a.bound))?;
    let rows: Vec<String> = chains
        .iter()
        .map(|c| c.iter().map(u64::to_string).collect::<Vec<_>>().join(","))
        .collect();
    let ks: Vec<String> = a.ks.iter().map(u64::to_string).collect();
    let mut body = String::new();
    match cli.format {
        Format::Csv => {
            let header: Vec<String> = (0..=a.ks.len()).map(|j| format!("X{j}")).collect();
            writeln!(body, "{}", header.join(",")).unwrap();
            for row in &rows {
                writeln!(body, "{row}").unwrap();
            }
        }
        Format::Human => {
            writeln!(body, "K = {}, X0 <= {}: {} chain(s)", ks.join(","), a.bound, rows.len()).unwrap();
            for row in &rows {
                writeln!(body, "  {row}").unwrap();
            }
        }
    }
    Ok(if chains.is_empty() { Report::absent(body) } else { Report::found(body) })
}

fn middles(cli: &Cli, a: &MiddlesArgs) -> Result<Report, Failure> {
    let ys = with_workers(cli.workers, || pythagorean_middles(a.bound));
    let mut body = String::new();
    match cli.format {
        Format::Csv => {
            body.push_str("Y\n");
            for y in &ys {
                writeln!(body, "{y}").unwrap();
            }
        }
        Format::Human => {
            let list: Vec<String> = ys.iter().map(u64::to_string).collect();
            writeln!(body, "{} middle(s) up to {}: {}", ys.len(), a.bound, list.join(", ")).unwrap();
        }
    }
    Ok(if ys.is_empty() { Report::absent(body) } else { Report::found(body) })
}
