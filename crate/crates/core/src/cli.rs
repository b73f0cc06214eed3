//! Command-line front end: `coeffs`, `verify`, `run` and `preset`.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::curve::CurveSpec;
use crate::eta::{eta_product, parse_factors, within_deligne_bound, EtaProductSpec};
use crate::presets;
use crate::report::{
    run_pipeline, verify, CacheStatus, CoefficientCache, ConfigFile, RunSummary, CACHE_ENV,
};
use crate::{Error, Result};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_VERIFY: u8 = 2;
pub const EXIT_STATS: u8 = 3;
pub const EXIT_IO: u8 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "sato-tate",
    version,
    about = "Sato-Tate angles and Poisson spacing statistics of cusp-form coefficients"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute (or load) an eta-product coefficient table and print its head.
    Coeffs(CoeffsArgs),
    /// Check multiplicativity, Hecke recursions, bounds and the curve cross-check.
    Verify(VerifyArgs),
    /// Run the full pipeline from a config file and/or flags.
    Run(RunArgs),
    /// Run the pipeline for a built-in example (a, b or c).
    Preset(PresetArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct SourceArgs {
    /// Built-in example: a, b or c.
    #[arg(long)]
    pub preset: Option<String>,
    /// Eta factors `m^e,m^e,...`, e.g. `1^2,11^2`.
    #[arg(long)]
    pub eta: Option<String>,
    /// Bad primes of the eta product, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub bad_primes: Option<Vec<u64>>,
    #[arg(long)]
    pub label: Option<String>,
    /// Weierstrass coefficients `a1,a2,a3,a4,a6`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub curve: Option<Vec<i64>>,
    #[arg(long)]
    pub conductor: Option<u64>,
    /// Skip the eta-versus-point-count comparison.
    #[arg(long)]
    pub no_cross_check: bool,
}

impl SourceArgs {
    fn to_config(&self) -> ConfigFile {
        ConfigFile {
            preset: self.preset.clone(),
            label: self.label.clone(),
            eta: self.eta.clone(),
            bad_primes: self.bad_primes.clone(),
            curve: self.curve.clone(),
            conductor: self.conductor,
            cross_check: self.no_cross_check.then_some(false),
            ..Default::default()
        }
    }

    /// The eta product and, if any, the curve to compare it with.
    fn resolve(&self) -> Result<(EtaProductSpec, Option<CurveSpec>)> {
        let preset = self.preset.as_deref().map(presets::preset).transpose()?;
        let label = self
            .label
            .clone()
            .or_else(|| preset.as_ref().map(|p| p.name.to_string()))
            .unwrap_or_else(|| "custom".into());
        let spec = match (&self.eta, &preset) {
            (Some(text), _) => EtaProductSpec::new(
                label.clone(),
                parse_factors(text).map_err(|e| Error::config("eta", e.to_string()))?,
                self.bad_primes.clone().unwrap_or_default(),
            )
            .map_err(|e| Error::config("eta", e.to_string()))?,
            (None, Some(p)) => p.eta.clone(),
            (None, None) => return Err(Error::config("eta", "set --preset or --eta")),
        };
        let curve = match (&self.curve, &preset) {
            (Some(c), _) => {
                let coeffs: [i64; 5] = c
                    .as_slice()
                    .try_into()
                    .map_err(|_| Error::config("curve", "expected a1,a2,a3,a4,a6"))?;
                let conductor = self
                    .conductor
                    .ok_or_else(|| Error::config("conductor", "required with --curve"))?;
                Some(
                    CurveSpec::new(label, coeffs, conductor)
                        .map_err(|e| Error::config("curve", e.to_string()))?,
                )
            }
            (None, Some(p)) if self.eta.is_none() => p.curve.clone(),
            _ => None,
        };
        Ok((spec, curve.filter(|_| !self.no_cross_check)))
    }
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Truncation order of the q-expansion.
    #[arg(long)]
    pub n_max: u64,
    /// Cache directory.
    #[arg(long, env = CACHE_ENV)]
    pub cache: Option<PathBuf>,
    /// How many leading coefficients to print.
    #[arg(long, default_value_t = 10)]
    pub show: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub n_max: u64,
    #[arg(long, env = CACHE_ENV)]
    pub cache: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct StatsArgs {
    /// Use the first N primes.
    #[arg(long)]
    pub num_primes: Option<usize>,
    /// Use all primes up to X.
    #[arg(long)]
    pub prime_limit: Option<u64>,
    /// Spacing orders, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<u32>>,
    /// Bins of the angle histogram.
    #[arg(long)]
    pub bins: Option<usize>,
    /// Bins of each spacing histogram.
    #[arg(long)]
    pub spacing_bins: Option<usize>,
    /// Upper end of every spacing histogram (default 6 for k<=1, 8 for k=2).
    #[arg(long)]
    pub spacing_range: Option<f64>,
    /// Also write pair_correlation.csv.
    #[arg(long)]
    pub pair_correlation: bool,
    #[arg(long)]
    pub pair_bins: Option<usize>,
    #[arg(long)]
    pub pair_range: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, env = CACHE_ENV)]
    pub cache: Option<PathBuf>,
    /// Exit with status 3 when a statistical acceptance threshold fails.
    #[arg(long)]
    pub strict_stats: bool,
}

impl StatsArgs {
    fn to_config(&self) -> ConfigFile {
        ConfigFile {
            num_primes: self.num_primes,
            prime_limit: self.prime_limit,
            k: self.k.clone(),
            bins: self.bins,
            spacing_bins: self.spacing_bins,
            spacing_range: self.spacing_range,
            pair_correlation: self.pair_correlation.then_some(true),
            pair_bins: self.pair_bins,
            pair_range: self.pair_range,
            out: self.out.clone(),
            cache: self.cache.clone(),
            strict_stats: self.strict_stats.then_some(true),
            ..Default::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// TOML file with flat keys; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub stats: StatsArgs,
}

#[derive(Debug, Args)]
pub struct PresetArgs {
    /// a, b or c.
    pub name: String,
    #[command(flatten)]
    pub stats: StatsArgs,
}

pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::CrossCheck { .. } | Error::BoundViolation { .. } => EXIT_VERIFY,
        Error::Io(_) | Error::Cache(_) => EXIT_IO,
        _ => EXIT_CONFIG,
    }
}

/// Runs one parsed command, writing human-readable output to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<u8> {
    match &cli.command {
        Command::Coeffs(args) => cmd_coeffs(args, out),
        Command::Verify(args) => cmd_verify(args, out),
        Command::Run(args) => {
            let base = match &args.config {
                Some(path) => ConfigFile::load(path)?,
                None => ConfigFile::default(),
            };
            let flags = merge_flags(args.source.to_config(), args.stats.to_config());
            cmd_run(base.overlay(flags), out)
        }
        Command::Preset(args) => {
            let flags = ConfigFile {
                preset: Some(args.name.clone()),
                ..args.stats.to_config()
            };
            cmd_run(flags, out)
        }
    }
}

fn merge_flags(source: ConfigFile, stats: ConfigFile) -> ConfigFile {
    source.overlay(stats)
}

pub fn cmd_coeffs(args: &CoeffsArgs, out: &mut dyn Write) -> Result<u8> {
    if args.n_max == 0 {
        return Err(Error::OutOfRange { index: 0, max: 0 });
    }
    let (spec, _) = args.source.resolve()?;
    let (table, status) = match &args.cache {
        Some(dir) => {
            let cache = CoefficientCache::new(dir);
            let (t, s) = cache.load_or_compute(&spec, args.n_max)?;
            (t, Some((s, cache.path_for(spec.label(), args.n_max))))
        }
        None => (eta_product(&spec, args.n_max)?, None),
    };
    writeln!(
        out,
        "label {}  factors {}  weight {}  n_max {}",
        spec.label(),
        spec.factors_string(),
        table.weight(),
        table.n_max()
    )?;
    match status {
        Some((CacheStatus::Hit, path)) => writeln!(out, "cache: hit {}", path.display())?,
        Some((CacheStatus::Computed, path)) => writeln!(out, "cache: computed {}", path.display())?,
        None => writeln!(out, "cache: disabled")?,
    }
    for n in 1..=args.show.min(table.n_max()) {
        writeln!(out, "a_{n} = {}", table.get(n))?;
    }
    let primes: Vec<u64> = (2..=table.n_max())
        .filter(|&p| crate::primes::is_prime(p))
        .collect();
    let violations = primes
        .iter()
        .filter(|&&p| !within_deligne_bound(&table.get(p), p, table.weight()))
        .count();
    writeln!(
        out,
        "bound check: {} primes <= {}, {} violations",
        primes.len(),
        table.n_max(),
        violations
    )?;
    Ok(if violations == 0 {
        EXIT_OK
    } else {
        EXIT_VERIFY
    })
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<u8> {
    let (spec, curve) = args.source.resolve()?;
    let table = match &args.cache {
        Some(dir) => {
            CoefficientCache::new(dir)
                .load_or_compute(&spec, args.n_max)?
                .0
        }
        None => eta_product(&spec, args.n_max)?,
    };
    let outcome = verify(&table, curve.as_ref())?;
    writeln!(
        out,
        "label {}  weight {}  n_max {}",
        outcome.label, outcome.weight, outcome.n_max
    )?;
    writeln!(
        out,
        "multiplicativity: {} checked, {} violations",
        outcome.multiplicativity.checked_pairs,
        outcome.multiplicativity.violations.len()
    )?;
    writeln!(
        out,
        "hecke recursion: {} checked, {} violations",
        outcome.recursion.checked_pairs,
        outcome.recursion.violations.len()
    )?;
    writeln!(out, "bound: {} violations", outcome.bound_violations.len())?;
    for note in &outcome.bad_primes {
        writeln!(
            out,
            "bad prime {}: a_p = {} (not in recursion check)",
            note.prime, note.a_p
        )?;
    }
    if let Some(cc) = &outcome.cross_check {
        writeln!(
            out,
            "cross-check: {} primes compared, {} mismatches",
            cc.primes_checked,
            cc.mismatches.len()
        )?;
    }
    writeln!(
        out,
        "{}",
        serde_json::to_string(&outcome).map_err(|e| Error::Cache(e.to_string()))?
    )?;
    Ok(if outcome.passes() {
        EXIT_OK
    } else {
        EXIT_VERIFY
    })
}

fn cmd_run(file: ConfigFile, out: &mut dyn Write) -> Result<u8> {
    let config = file.resolve()?;
    let summary = run_pipeline(&config)?;
    print_summary(&summary, out)?;
    Ok(
        if config.strict_stats && !summary.report.acceptance.all_passed {
            EXIT_STATS
        } else {
            EXIT_OK
        },
    )
}

fn print_summary(summary: &RunSummary, out: &mut dyn Write) -> Result<()> {
    let r = &summary.report;
    writeln!(
        out,
        "{}: weight {}, M = {} primes <= {}",
        r.label, r.weight, r.sample_size, r.prime_limit
    )?;
    if r.cross_check.enabled {
        writeln!(
            out,
            "cross-check: {} primes agree",
            r.cross_check.primes_checked
        )?;
    }
    if let Some(chi) = r.figures.density.gof.chi_square {
        writeln!(
            out,
            "angle density: chi2 = {chi:.3} (dof {})",
            r.figures.density.gof.degrees_of_freedom.unwrap_or(0)
        )?;
    }
    writeln!(
        out,
        "unfolded uniformity: KS D = {:.5}",
        r.figures.unfolded.gof.ks_statistic.unwrap_or(f64::NAN)
    )?;
    for s in &r.figures.spacings {
        writeln!(
            out,
            "k = {}: KS D = {:.5}, mean = {:.4} (expected {} +- {:.4})",
            s.k,
            s.gof.ks_statistic.unwrap_or(f64::NAN),
            s.gof.sample_mean.unwrap_or(f64::NAN),
            s.k + 1,
            s.mean_tolerance
        )?;
    }
    writeln!(
        out,
        "acceptance: {}",
        if r.acceptance.all_passed {
            "pass"
        } else {
            "FAIL"
        }
    )?;
    for f in &summary.files {
        writeln!(out, "wrote {}", f.display())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_subcommands() {
        let cli =
            Cli::try_parse_from(["sato-tate", "coeffs", "--preset", "c", "--n-max", "10"]).unwrap();
        assert!(matches!(cli.command, Command::Coeffs(_)));
        let cli = Cli::try_parse_from([
            "sato-tate",
            "verify",
            "--eta",
            "1^2,11^2",
            "--bad-primes",
            "11",
            "--curve",
            "0,-1,1,0,0",
            "--conductor",
            "11",
            "--n-max",
            "100",
        ])
        .unwrap();
        let Command::Verify(v) = cli.command else {
            panic!()
        };
        assert_eq!(v.source.curve, Some(vec![0, -1, 1, 0, 0]));
        let cli = Cli::try_parse_from(["sato-tate", "preset", "b", "--k", "0,2", "--strict-stats"])
            .unwrap();
        let Command::Preset(p) = cli.command else {
            panic!()
        };
        assert_eq!(p.stats.k, Some(vec![0, 2]));
        assert!(p.stats.strict_stats);
    }

    #[test]
    fn coeffs_prints_discriminant() {
        let cli =
            Cli::try_parse_from(["sato-tate", "coeffs", "--preset", "c", "--n-max", "10"]).unwrap();
        let mut buf = Vec::new();
        assert_eq!(execute(&cli, &mut buf).unwrap(), EXIT_OK);
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("a_2 = -24"));
        assert!(text.contains("a_10 = -115920"));
        assert!(text.contains("0 violations"));
    }

    #[test]
    fn coeffs_zero_order_is_range_error() {
        let cli =
            Cli::try_parse_from(["sato-tate", "coeffs", "--preset", "c", "--n-max", "0"]).unwrap();
        let err = execute(&cli, &mut Vec::new()).unwrap_err();
        assert!(matches!(err, Error::OutOfRange { .. }));
        assert_eq!(exit_code(&err), EXIT_CONFIG);
    }
}
