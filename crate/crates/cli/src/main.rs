use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use expsum_core::charsum::{char_sum, trace_histogram, CharacterChoice};
use expsum_core::exec::ExecConfig;
use expsum_core::ff::{build_field, FiniteField, GaloisField};
use expsum_core::mpoly::{parse_with_generator, MultiPoly};
use expsum_core::selftest::{run_selftest, Mutation};
use expsum_core::singular::SearchOptions;
use expsum_core::sweep::{run_sweep, write_csv, Incidence, Preset, SweepConfig};
use expsum_core::verify::{verify, HypothesisOptions, VerificationReport, VerifyOptions};

const SUM_SCHEMA: &str = "expsum-sum";
const SUM_VERSION: u32 = 1;

/// Exit status when a run uncovers an internal inconsistency.
const EXIT_INCONSISTENT: u8 = 2;

#[derive(Parser)]
#[command(name = "expsum", version, about = "Exact exponential sums over finite fields and bound verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute S(Ψ_b, f) exactly, with its trace histogram.
    Sum(SumArgs),
    /// Check hypotheses, predict the dimension and verify it against sums.
    Verify(VerifyArgs),
    /// Run the verifier over a seeded family of polynomials.
    Sweep(SweepArgs),
    /// Run the embedded oracle suite.
    Selftest(SelftestArgs),
}

fn parse_budget(s: &str) -> std::result::Result<u128, String> {
    let s = s.trim();
    if let Some((b, e)) = s.split_once('^') {
        let b: u128 = b.trim().parse().map_err(|e| format!("bad base: {e}"))?;
        let e: u32 = e.trim().parse().map_err(|e| format!("bad exponent: {e}"))?;
        return b.checked_pow(e).ok_or_else(|| "budget overflows".to_string());
    }
    s.parse().map_err(|e| format!("bad budget {s:?}: {e}"))
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Evaluation budget per enumeration, e.g. 1000000 or 2^40.
    #[arg(long, env = "EXPSUM_BUDGET", default_value = "2^40", value_parser = parse_budget)]
    budget: u128,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

impl RunArgs {
    fn exec(&self) -> ExecConfig {
        ExecConfig { workers: self.workers, budget: self.budget }
    }
}

#[derive(Args, Clone)]
struct FieldArgs {
    /// Characteristic.
    #[arg(long)]
    p: u64,
    /// Extension degree of the base field F_{p^s}.
    #[arg(long, default_value_t = 1)]
    s: usize,
    /// Number of variables.
    #[arg(long)]
    n: usize,
    /// Polynomial in x1..xn; `t` denotes the generator of F_{p^s}.
    #[arg(long)]
    f: String,
}

impl FieldArgs {
    fn load(&self) -> Result<(GaloisField, MultiPoly<GaloisField>)> {
        if self.n == 0 {
            bail!("--n must be positive");
        }
        let k = build_field(self.p, self.s)?;
        let f = parse_with_generator(&self.f, self.n, &k, k.generator()).context("cannot parse --f")?;
        Ok((k, f))
    }
}

#[derive(Args)]
struct SumArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Character index b in 1..p-1.
    #[arg(long, default_value_t = 1)]
    b: u64,
    /// Sum over F_{q^m}^n instead of F_q^n.
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[command(flatten)]
    run: RunArgs,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Largest extension degree searched for singular points.
    #[arg(long, default_value_t = 6)]
    e_max: usize,
    /// Number of extension sums S_1..S_M; defaults to 2D within the budget.
    #[arg(long)]
    m_max: Option<usize>,
    #[arg(long, default_value_t = 1)]
    b: u64,
    #[command(flatten)]
    run: RunArgs,
    /// Print the JSON report instead of text.
    #[arg(long)]
    json: bool,
    /// Also write the JSON report to this file.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct SweepArgs {
    /// binary-forms, line-arrangements or smooth-fermat.
    #[arg(long)]
    preset: String,
    /// Degrees, comma separated.
    #[arg(long = "d", value_delimiter = ',', default_value = "3")]
    degrees: Vec<u32>,
    /// Primes, comma separated.
    #[arg(long = "p", value_delimiter = ',', default_value = "5")]
    primes: Vec<u64>,
    /// Variables for smooth-fermat.
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Root multiplicities for binary-forms, e.g. 2,1.
    #[arg(long, value_delimiter = ',')]
    multiplicities: Option<Vec<u32>>,
    /// `generic` or `pencil:k` for line-arrangements.
    #[arg(long, default_value = "generic")]
    incidence: String,
    /// Cases per (d, p).
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    m_max: Option<usize>,
    #[arg(long, default_value_t = 6)]
    e_max: usize,
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, value_enum, default_value = "csv")]
    format: TableFormat,
    /// Write the table here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MutationArg {
    None,
    FlipVanishingSign,
    CorruptNewton,
}

#[derive(Args)]
struct SelftestArgs {
    /// Inject a known defect to check that the oracles catch it.
    #[arg(long, value_enum, default_value = "none", hide = true)]
    mutate: MutationArg,
}

fn cmd_sum(args: &SumArgs) -> Result<u8> {
    let (k, f) = args.field.load()?;
    let psi = CharacterChoice::new(k.prime(), args.b)?;
    let h = trace_histogram(&f, &k, args.m, &args.run.exec())?;
    let s = char_sum(&h, psi);
    let z = s.numeric_value(1);
    let mut out = io::stdout().lock();
    if args.json {
        let value = serde_json::json!({
            "schema": SUM_SCHEMA,
            "version": SUM_VERSION,
            "polynomial": f.to_string(),
            "p": k.prime(),
            "s": k.degree(),
            "n": f.nvars(),
            "m": args.m,
            "b": args.b,
            "histogram": h,
            "sum": s,
            "re": z.re,
            "im": z.im,
            "abs": z.norm(),
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&value)?)?;
    } else {
        writeln!(out, "f = {} over F_{}^{}, n = {}, m = {}, b = {}", f, k.prime(), k.degree(), f.nvars(), args.m, args.b)?;
        writeln!(out, "S = {s}")?;
        writeln!(out, "  ≈ {:.12} {:+.12}i, |S| ≈ {:.12}", z.re, z.im, z.norm())?;
        writeln!(out, "trace histogram: {:?}", h.counts)?;
    }
    Ok(0)
}

fn print_report(out: &mut impl Write, r: &VerificationReport) -> io::Result<()> {
    let h = &r.hypotheses;
    writeln!(out, "f = {} over F_{}^{}, n = {}, d = {}", r.polynomial, r.field.p, r.field.s, r.n, h.d)?;
    writeln!(out, "verdict: {}", h.verdict)?;
    let flag = |b: Option<bool>| b.map_or("not checked", |x| if x { "holds" } else { "fails" });
    writeln!(out, "  h1 isolated weighted homogeneous: {}", flag(h.h1))?;
    writeln!(out, "  h2 singular points off X^(d-1): {}", flag(h.h2))?;
    writeln!(out, "  h3 gcd(p, d(d-1)Π δ) = 1: {}", flag(Some(h.h3)))?;
    if let Some(iso) = h.isolation {
        writeln!(out, "  isolation: {iso:?}")?;
    }
    for pt in &h.points {
        let delta = pt.germ.weights.as_ref().map(|w| w.delta);
        writeln!(
            out,
            "  singular point {} (degree {}): μ = {:?}, δ = {:?}, {:?}",
            pt.label, pt.point.e, pt.germ.milnor, delta, pt.germ.normalization
        )?;
    }
    if let Some(c) = &h.critical_locus {
        writeln!(out, "  critical locus finite: {} (counts {:?})", c.finite, c.counts)?;
    }
    match &h.transversal {
        Some(t) => writeln!(out, "  transversal hyperplane over degree {}: restriction {}", t.e, t.restricted)?,
        None if h.critical_locus.is_some() => writeln!(out, "  no transversal hyperplane found")?,
        None => {}
    }
    if let Some(mu) = h.milnor_sum {
        writeln!(out, "Σμ = {mu}")?;
    }
    if let Some(d) = r.predicted_dimension {
        writeln!(out, "D = {d}")?;
    }
    if let Some(e) = &r.euler {
        writeln!(
            out,
            "χ chain (σ = {}): closure {}, top form {}, generic fiber {}, sheaf {}, dimension {}",
            e.sigma, e.closure_of_fiber, e.top_form, e.generic_fiber, e.sheaf, e.dimension
        )?;
    }
    for s in &r.s1 {
        writeln!(out, "S_1(Ψ_{}) = {}  |S| ≈ {:.9}", s.b, s.exact, s.abs)?;
    }
    for c in &r.bound_checks {
        let ratio = c.ratio.map_or("-".to_string(), |x| format!("{x:.9}"));
        writeln!(out, "bound m = {}: |S_m| ≈ {:.6} ≤ {:.6}, ratio {ratio}: {}", c.m, c.max_abs, c.bound, c.holds)?;
    }
    if let Some(rec) = &r.recovery {
        writeln!(out, "recovery: {:?}, recurrence checked on {} surplus terms", rec.status, rec.recurrence_terms)?;
        if let Some(e) = rec.embeddings.first() {
            writeln!(out, "  root moduli (b = 1): {:?}, target {}", e.moduli, rec.target_modulus)?;
        }
    }
    if let Some(a) = &r.arrangement {
        writeln!(
            out,
            "arrangement: incidences {:?}, computed Σμ {:?}, Σ n_i(i-1) = {}, generic value {:?}",
            a.incidences, a.computed_milnor_sum, a.example_formula_value, a.example_generic_value
        )?;
    }
    for n in &r.notes {
        writeln!(out, "note: {n}")?;
    }
    for f in &r.findings {
        writeln!(out, "FINDING: {f}")?;
    }
    writeln!(out, "{}", if r.consistent { "consistent" } else { "INCONSISTENT" })
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8> {
    let (k, f) = args.field.load()?;
    let opts = VerifyOptions {
        hypotheses: HypothesisOptions {
            search: SearchOptions { e_max: args.e_max, ..Default::default() },
            ..Default::default()
        },
        m_max: args.m_max,
        character: args.b,
        exec: args.run.exec(),
        seed: None,
    };
    let report = verify(&f, &k, &opts)?;
    let json = report.to_json();
    if let Some(path) = &args.output {
        std::fs::write(path, format!("{json}\n")).with_context(|| format!("cannot write {}", path.display()))?;
    }
    let mut out = io::stdout().lock();
    if args.json {
        writeln!(out, "{json}")?;
    } else {
        print_report(&mut out, &report)?;
    }
    Ok(if report.consistent { 0 } else { EXIT_INCONSISTENT })
}

fn cmd_sweep(args: &SweepArgs) -> Result<u8> {
    let cfg = SweepConfig {
        preset: args.preset.parse()?,
        degrees: args.degrees.clone(),
        primes: args.primes.clone(),
        n: args.n,
        multiplicities: args.multiplicities.clone(),
        incidence: args.incidence.parse::<Incidence>()?,
        count: args.count,
        seed: args.seed,
        m_max: args.m_max,
        e_max: args.e_max,
        exec: args.run.exec(),
    };
    if cfg.preset == Preset::SmoothFermat && cfg.n == 0 {
        bail!("--n must be positive");
    }
    eprintln!("sweep {} seed {}", cfg.preset, cfg.seed);
    let rows = run_sweep(&cfg)?;
    let sink: Box<dyn Write> = match &args.output {
        Some(path) => Box::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    match args.format {
        TableFormat::Csv => write_csv(&rows, sink)?,
        TableFormat::Json => {
            let mut sink = sink;
            let value = serde_json::json!({ "schema": expsum_core::sweep::SWEEP_SCHEMA, "rows": rows });
            writeln!(sink, "{}", serde_json::to_string_pretty(&value)?)?;
        }
    }
    Ok(if rows.iter().all(|r| r.consistent) { 0 } else { EXIT_INCONSISTENT })
}

fn cmd_selftest(args: &SelftestArgs) -> Result<u8> {
    let mutation = match args.mutate {
        MutationArg::None => Mutation::None,
        MutationArg::FlipVanishingSign => Mutation::FlipVanishingSign,
        MutationArg::CorruptNewton => Mutation::CorruptNewton,
    };
    let results = run_selftest(mutation)?;
    let mut out = io::stdout().lock();
    for r in &results {
        writeln!(out, "{r}")?;
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    writeln!(out, "{} of {} oracles passed", results.len() - failed, results.len())?;
    Ok(if failed == 0 { 0 } else { EXIT_INCONSISTENT })
}

/// A closed stdout (`expsum ... | head`) is not an error.
fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| c.downcast_ref::<io::Error>().is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sum(a) => cmd_sum(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Selftest(a) => cmd_selftest(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
