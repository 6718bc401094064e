mod cache;
mod vars;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use tetra_core::network::Configuration;
use tetra_core::verify::{self, BatteryConfig, CheckReport, Suite};
use tetra_core::{LayerEngine, PartitionSpec, RatPoly};

#[derive(Parser)]
#[command(name = "tetra", version, about = "Layer-product partition functions and identity checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Vacuum expectation value of a product of layer operators.
    Compute(ComputeArgs),
    /// Run a battery of checks; exits with 2 if any fails.
    Verify(VerifyArgs),
    /// List the contributing global configurations.
    Enumerate(EnumerateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Plain,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Tetrahedron,
    Zf,
    Schur,
    Hat,
    Inhomogeneous,
    Columns,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Tetrahedron => Suite::Tetrahedron,
            SuiteArg::Zf => Suite::Zf,
            SuiteArg::Schur => Suite::Schur,
            SuiteArg::Hat => Suite::Hat,
            SuiteArg::Inhomogeneous => Suite::Inhomogeneous,
            SuiteArg::Columns => Suite::Columns,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value = "plain")]
    format: Format,
    /// Re-resolve the wiring convention instead of reading the cache.
    #[arg(long)]
    no_cache: bool,
    /// Convention cache file (default: $XDG_CACHE_HOME/tetra/convention.json).
    #[arg(long)]
    cache_path: Option<PathBuf>,
}

#[derive(Args)]
struct Product {
    /// Slice size.
    #[arg(long)]
    n: u32,
    /// Layer labels, left to right.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    labels: Vec<i64>,
    /// Repeat counts for the labels (label k is used blocks[k] times).
    #[arg(long, value_delimiter = ',')]
    blocks: Option<Vec<usize>>,
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    product: Product,
    /// Derivative orders in each layer's variable, left to right.
    #[arg(long, value_delimiter = ',')]
    deriv: Option<Vec<u32>>,
    /// Use one variable per site, z{t}_k{k}l{l}.
    #[arg(long)]
    inhomogeneous: bool,
    /// Site-variable bindings; implies --inhomogeneous.
    #[arg(long)]
    vars_file: Option<PathBuf>,
    /// Set every remaining variable to 1.
    #[arg(long)]
    at_one: bool,
    /// Fock occupancy cutoff (default: number of layers).
    #[arg(long)]
    cutoff: Option<u32>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum, default_value = "all")]
    suite: SuiteArg,
    /// Largest slice size.
    #[arg(long)]
    n: Option<u32>,
    /// Largest number of layers in one product.
    #[arg(long)]
    max_layers: Option<usize>,
    #[arg(long)]
    cutoff: Option<u32>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    product: Product,
    #[command(flatten)]
    common: Common,
}

enum Failure {
    Usage(anyhow::Error),
    Checks,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Compute(a) => compute(a),
        Command::Verify(a) => run_verify(a),
        Command::Enumerate(a) => enumerate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(2),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn engine(common: &Common) -> anyhow::Result<LayerEngine> {
    let path = if common.no_cache { None } else { Some(common.cache_path.clone().unwrap_or_else(cache::default_path)) };
    Ok(LayerEngine::new(cache::convention(path.as_deref())?))
}

impl Product {
    fn labels(&self) -> anyhow::Result<Vec<u32>> {
        if self.n < 2 {
            bail!("--n must be at least 2");
        }
        self.labels
            .iter()
            .enumerate()
            .map(|(pos, &l)| match u32::try_from(l) {
                Ok(l) if l <= self.n => Ok(l),
                _ => bail!("invalid label {l} at position {}: labels must lie in 0..={}", pos + 1, self.n),
            })
            .collect()
    }

    /// Labels expanded by `--blocks`.
    fn expanded(&self) -> anyhow::Result<Vec<u32>> {
        let labels = self.labels()?;
        let Some(blocks) = &self.blocks else { return Ok(labels) };
        if blocks.len() != labels.len() {
            bail!("--blocks has {} entries but --labels has {}", blocks.len(), labels.len());
        }
        if blocks.contains(&0) {
            bail!("block sizes must be positive");
        }
        Ok(labels.iter().zip(blocks).flat_map(|(&l, &b)| std::iter::repeat(l).take(b)).collect())
    }
}

fn compute(a: ComputeArgs) -> Result<(), Failure> {
    let labels = a.product.expanded()?;
    let n = a.product.n;
    let table = match &a.vars_file {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Some(vars::parse(&text).with_context(|| format!("parsing {}", path.display()))?)
        }
        None => None,
    };
    let inhomogeneous = a.inhomogeneous || table.is_some();
    let mut spec =
        if inhomogeneous { PartitionSpec::inhomogeneous(n, &labels) } else { PartitionSpec::scalar(n, &labels) };
    if let Some(orders) = &a.deriv {
        if orders.len() > labels.len() {
            return Err(anyhow::anyhow!("--deriv has {} entries for {} layers", orders.len(), labels.len()).into());
        }
        if inhomogeneous && orders.iter().any(|&d| d > 0) {
            return Err(anyhow::anyhow!("--deriv needs scalar layers").into());
        }
        spec = spec.with_derivatives(orders);
    }
    let eng = engine(&a.common)?;
    let cutoff = a.cutoff.unwrap_or(labels.len() as u32);
    let mut value: RatPoly = eng.vev_with_cutoff(&spec, cutoff).context("computing the vacuum expectation value")?;
    if let Some(t) = &table {
        value = value.substitute(t).context("substituting --vars-file")?;
    }
    let mut out = std::io::stdout().lock();
    if a.at_one {
        let v = value.eval_at_one();
        match a.common.format {
            Format::Plain => writeln!(out, "{v}"),
            Format::Json => writeln!(out, "{}", json!({ "n": n, "labels": labels, "value": v.to_string() })),
            Format::Csv => writeln!(out, "value\n{v}"),
        }
        .context("writing output")?;
        return Ok(());
    }
    match a.common.format {
        Format::Plain => writeln!(out, "{value}").context("writing output")?,
        Format::Json => writeln!(out, "{}", json!({ "n": n, "labels": labels, "value": value })).context("writing output")?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["coeff", "monomial"]).context("writing output")?;
            for (m, c) in value.terms().rev() {
                w.write_record([c.to_string(), m.to_string()]).context("writing output")?;
            }
            w.flush().context("writing output")?;
        }
    }
    Ok(())
}

fn run_verify(a: VerifyArgs) -> Result<(), Failure> {
    let mut cfg = BatteryConfig::default();
    if let Some(n) = a.n {
        if n < 2 {
            return Err(anyhow::anyhow!("--n must be at least 2").into());
        }
        cfg.n_max = n;
    }
    if let Some(m) = a.max_layers {
        cfg.max_layers = m;
    }
    if let Some(c) = a.cutoff {
        cfg.cutoff = c;
    }
    let eng = engine(&a.common)?;
    let reports = verify::battery(&eng, a.suite.into(), &cfg);
    write_reports(&reports, a.common.format)?;
    if reports.iter().all(|r| r.pass) {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn write_reports(reports: &[CheckReport], format: Format) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    match format {
        Format::Plain => {
            for r in reports {
                writeln!(out, "{r}")?;
            }
            let failed = reports.iter().filter(|r| !r.pass).count();
            writeln!(out, "{} checks, {} passed, {failed} failed", reports.len(), reports.len() - failed)?;
        }
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(reports)?)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["name", "params", "pass", "runtime_ms", "detail", "left", "right"])?;
            let show = |p: &Option<RatPoly>| p.as_ref().map(|p| p.to_string()).unwrap_or_default();
            for r in reports {
                w.write_record([
                    r.name.clone(),
                    r.params.clone(),
                    r.pass.to_string(),
                    r.runtime_ms.to_string(),
                    r.detail.clone().unwrap_or_default(),
                    show(&r.left),
                    show(&r.right),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn enumerate(a: EnumerateArgs) -> Result<(), Failure> {
    let labels = a.product.expanded()?;
    let spec = PartitionSpec::scalar(a.product.n, &labels);
    let eng = engine(&a.common)?;
    let confs: Vec<Configuration> = eng.configurations(&spec).context("enumerating configurations")?;
    let mut out = std::io::stdout().lock();
    let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
    match a.common.format {
        Format::Plain => {
            for (idx, c) in confs.iter().enumerate() {
                writeln!(out, "{}  alphas [{}]  {}", idx + 1, join(&c.alphas), c.weight).context("writing output")?;
            }
            writeln!(out, "{} configurations", confs.len()).context("writing output")?;
        }
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&confs).context("encoding")?)
            .context("writing output")?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["index", "terms", "alphas", "weight"]).context("writing output")?;
            for (idx, c) in confs.iter().enumerate() {
                let terms: Vec<u32> = c.terms.iter().map(|&t| t as u32).collect();
                w.write_record([(idx + 1).to_string(), join(&terms), join(&c.alphas), c.weight.to_string()])
                    .context("writing output")?;
            }
            w.flush().context("writing output")?;
        }
    }
    Ok(())
}
