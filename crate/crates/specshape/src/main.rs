use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use specshape::analyze::{analyze, AnalyzeRow};
use specshape::compare::{compare, CompareReport};
use specshape::csvio::{read_rows, write_rows};
use specshape::optimal::optimal_k;
use specshape::simulate::{simulate, write_trace, SimulateRow};
use specshape::spec::ExperimentSpec;
use specshape::vectors::{generate, parse_vectors};
use specshape_core::analysis::FormulaMode;
use specshape_core::sampling::stream;

#[derive(Parser)]
#[command(name = "specshape", version, about = "Spectrum shaping experiments: analysis, simulation and comparison")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analytical sweep to CSV
    Analyze(Common),
    /// Monte-Carlo sweep to CSV
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Per-slot dump of replication 0 of every run
        #[arg(long, value_name = "PATH")]
        trace: Option<PathBuf>,
    },
    /// Analysis against simulation; exit 2 when a band is violated
    Compare {
        #[command(flatten)]
        common: Common,
        /// Existing `analyze` output to use instead of recomputing
        #[arg(long, value_name = "PATH", requires = "simulated")]
        analytic: Option<PathBuf>,
        /// Existing `simulate` output to use instead of recomputing
        #[arg(long, value_name = "PATH", requires = "analytic")]
        simulated: Option<PathBuf>,
    },
    /// delta(k) over a backoff grid and its minimizer
    OptimalK {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 12)]
        k_max: u32,
    },
    /// Check RLNC test vectors, or generate them; exit 2 on a mismatch
    RlncCheck {
        #[arg(long, value_name = "PATH", conflicts_with = "generate")]
        vectors: Option<PathBuf>,
        /// Write this many random vectors instead of checking
        #[arg(long, value_name = "COUNT")]
        generate: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// JSON experiment spec
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Overrides the spec's simulation seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV; defaults to the spec's output_path, then stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Overrides the spec's analytic outputs
    #[arg(long, value_enum)]
    formula_mode: Option<ModeArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    AsPrinted,
    Rederived,
    Both,
}

struct Loaded {
    spec: ExperimentSpec,
    seed: u64,
    modes: Vec<FormulaMode>,
    out: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> anyhow::Result<Loaded> {
        let spec = ExperimentSpec::load(&self.config)?;
        let modes = match self.formula_mode {
            Some(ModeArg::AsPrinted) => vec![FormulaMode::AsPrinted],
            Some(ModeArg::Rederived) => vec![FormulaMode::Rederived],
            Some(ModeArg::Both) => vec![FormulaMode::AsPrinted, FormulaMode::Rederived],
            None => spec.outputs.clone(),
        };
        if modes.is_empty() {
            bail!("no formula mode requested");
        }
        Ok(Loaded {
            seed: self.seed.unwrap_or(spec.sim.seed),
            out: self.out.clone().or_else(|| spec.output_path.clone()),
            spec,
            modes,
        })
    }
}

fn open_out(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn read_csv<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<Vec<T>> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    read_rows(f).with_context(|| format!("cannot parse {}", path.display()))
}

fn require_simulate(spec: &ExperimentSpec) -> anyhow::Result<()> {
    if !spec.simulate {
        bail!("spec has simulate = false");
    }
    Ok(())
}

fn report(r: &CompareReport) {
    for s in &r.summaries {
        eprintln!("{s}");
    }
    eprintln!(
        "accuracy band: {}, gain band: {}",
        if r.accuracy_ok { "hold" } else { "violated" },
        if r.gain_ok { "hold" } else { "violated" }
    );
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Analyze(common) => {
            let l = common.load()?;
            let rows = analyze(&l.spec, &l.modes, l.seed)?;
            write_rows(open_out(l.out.as_deref())?, &rows)?;
        }
        Command::Simulate { common, trace } => {
            let l = common.load()?;
            require_simulate(&l.spec)?;
            let (rows, reports) = simulate(&l.spec, l.seed)?;
            for (r, rep) in rows.iter().filter(|r| r.is_pooled()).zip(&reports) {
                if !rep.queue_stable {
                    eprintln!("warning: queue diverging at {} = {} ({:?})", r.param, r.value, r.mode);
                }
            }
            write_rows(open_out(l.out.as_deref())?, &rows)?;
            if let Some(path) = trace {
                let f = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
                write_trace(&l.spec, l.seed, BufWriter::new(f))?;
            }
        }
        Command::Compare {
            common,
            analytic,
            simulated,
        } => {
            let l = common.load()?;
            let (a, s): (Vec<AnalyzeRow>, Vec<SimulateRow>) = match (analytic, simulated) {
                (Some(a), Some(s)) => (read_csv(&a)?, read_csv(&s)?),
                _ => {
                    require_simulate(&l.spec)?;
                    (analyze(&l.spec, &l.modes, l.seed)?, simulate(&l.spec, l.seed)?.0)
                }
            };
            let r = compare(&a, &s)?;
            write_rows(open_out(l.out.as_deref())?, &r.rows)?;
            report(&r);
            if !r.bands_hold() {
                return Ok(ExitCode::from(2));
            }
        }
        Command::OptimalK { common, k_max } => {
            let l = common.load()?;
            let (rows, skipped) = optimal_k(&l.spec, &l.modes, k_max)?;
            for s in skipped {
                eprintln!("skipped {s}");
            }
            write_rows(open_out(l.out.as_deref())?, &rows)?;
        }
        Command::RlncCheck {
            vectors,
            generate: count,
            seed,
            out,
        } => {
            if let Some(count) = count {
                let mut w = open_out(out.as_deref())?;
                writeln!(w, "# w m coefficients payloads expected")?;
                for v in generate(count, 8, &mut stream(seed, 0)) {
                    writeln!(w, "{}", v.to_line())?;
                }
                w.flush()?;
                return Ok(ExitCode::SUCCESS);
            }
            let Some(path) = vectors else {
                bail!("rlnc-check needs --vectors or --generate");
            };
            let text = std::fs::read_to_string(&path).with_context(|| format!("cannot read {}", path.display()))?;
            let mut w = csv::Writer::from_writer(open_out(out.as_deref())?);
            w.write_record(["line", "w", "m", "expected", "ok"])?;
            let mut failures = 0;
            for (line, v) in parse_vectors(&text)? {
                let ok = v.check()?;
                failures += usize::from(!ok);
                w.write_record([
                    line.to_string(),
                    v.width.to_string(),
                    v.batch_size().to_string(),
                    if v.expected.is_some() { "decodable" } else { "singular" }.into(),
                    ok.to_string(),
                ])?;
            }
            w.flush()?;
            if failures > 0 {
                eprintln!("{failures} vector(s) failed");
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
