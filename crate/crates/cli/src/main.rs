//! `bvquad`: build quadrature rules, probe exactness, bound Peano kernels and
//! run convergence experiments from the shell.
//!
//! Exit codes: 0 success, 1 construction or analysis failure, 2 usage error,
//! 3 a checked inequality or rate failed.

mod config;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use bvquad::runner::{reports_to_csv, run_convergence, ConvergenceReport};
use bvquad::{
    c_estimate, exactness_degree, kernel_sup_norm, Family, QuadError, QuadratureRule, RuleFamily,
    WeightSpec,
};

use config::{parse_grid, ExperimentConfig, Format};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(String),
    Assertion(String),
}

impl From<QuadError> for CliError {
    fn from(e: QuadError) -> Self {
        CliError::Failure(format!("{}: {e}", e.kind()))
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Failure(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Assertion(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "bvquad", version, about = "Weighted quadrature rules and their Peano-kernel error bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a rule's nodes and weights as JSON.
    Rule(RuleSource),
    /// Print the measured degree of exactness.
    Exactness {
        #[command(flatten)]
        source: RuleSource,
        /// Highest probe degree (default: 2 * nodes + 1).
        #[arg(long)]
        max_degree: Option<usize>,
    },
    /// Print sup|K_s| with its location and the Freud bound.
    Peano {
        #[command(flatten)]
        source: RuleSource,
        /// Kernel orders, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        s: Vec<u32>,
        /// Exit 3 unless every sup-norm is within the Freud bound.
        #[arg(long)]
        check_freud: bool,
    },
    /// Sweep n, fit convergence orders and check the error bounds.
    Converge(ConvergeArgs),
}

#[derive(Args)]
struct RuleSource {
    /// gauss, radau_left, radau_right, cc, filippi, polya, kronrod or compound:<midpoint|trapezoid|simpson|gauss2>
    #[arg(long)]
    family: Option<String>,
    /// legendre, chebyshev1, chebyshev2 or ultraspherical:<lambda>
    #[arg(long, default_value = "legendre")]
    weight: String,
    /// Node count (Gauss size for kronrod, subintervals for compound).
    #[arg(long)]
    n: Option<usize>,
    /// Read the rule from a JSON file written by `bvquad rule`.
    #[arg(long, conflicts_with_all = ["family", "n"])]
    rule_file: Option<PathBuf>,
}

impl RuleSource {
    fn build(&self) -> Result<QuadratureRule, CliError> {
        if let Some(path) = &self.rule_file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            return serde_json::from_str(&text)
                .map_err(|e| CliError::Failure(format!("format: {}: {e}", path.display())));
        }
        let (Some(family), Some(n)) = (&self.family, self.n) else {
            return Err(CliError::Usage("give --family and --n, or --rule-file".into()));
        };
        let family: RuleFamily = family.parse().map_err(|e: QuadError| CliError::Usage(e.to_string()))?;
        let weight: WeightSpec = self.weight.parse()?;
        Ok(family.build(&weight, n)?)
    }
}

#[derive(Args)]
struct ConvergeArgs {
    /// JSON experiment config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Rule families, comma separated.
    #[arg(long, value_delimiter = ',')]
    family: Option<Vec<String>>,
    /// truncpower:c:s, truncpower:c (expanded over --s), abspower:c:k or exp
    #[arg(long, value_delimiter = ',')]
    function: Option<Vec<String>>,
    #[arg(long)]
    weight: Option<String>,
    /// Geometric n grid as min:max:ratio.
    #[arg(long, value_parser = parse_grid)]
    n: Option<(usize, usize, f64)>,
    /// Orders used to expand truncpower:c descriptors.
    #[arg(long, value_delimiter = ',')]
    s: Option<Vec<u32>>,
    /// Defaults to $BVQUAD_OUTPUT_DIR, then ./bvquad-output.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Any of json, csv, svg.
    #[arg(long, value_delimiter = ',')]
    format: Option<Vec<Format>>,
}

fn cmd_rule(source: &RuleSource) -> Result<(), CliError> {
    let rule = source.build()?;
    let text = serde_json::to_string_pretty(&rule).map_err(|e| CliError::Failure(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn cmd_exactness(source: &RuleSource, max_degree: Option<usize>) -> Result<(), CliError> {
    let rule = source.build()?;
    let probe = max_degree.unwrap_or(2 * rule.len() + 1);
    println!("{}", exactness_degree(&rule, probe));
    Ok(())
}

fn cmd_peano(source: &RuleSource, s_list: &[u32], check_freud: bool) -> Result<(), CliError> {
    let rule = source.build()?;
    let mut out = Vec::new();
    let mut violations = Vec::new();
    for &s in s_list {
        let profile = kernel_sup_norm(&rule, s)?;
        let mut v = serde_json::to_value(&profile).map_err(|e| CliError::Failure(e.to_string()))?;
        v["ratio"] = json!(profile.ratio());
        if let Family::Compound { elementary, .. } = rule.family() {
            v["C_estimate"] = json!(c_estimate(elementary, s)?);
        }
        if check_freud {
            match profile.within_freud() {
                None => {
                    return Err(CliError::Failure(format!(
                        "precondition-violation: the Freud bound needs a positive interpolatory rule and a bounded weight ({} n={})",
                        profile.family, profile.n
                    )))
                }
                Some(false) => violations.push(format!(
                    "s={s}: sup|K_s| = {:e} exceeds the Freud bound {:e}",
                    profile.sup_norm,
                    profile.freud_bound.unwrap_or(f64::NAN)
                )),
                Some(true) => {}
            }
        }
        out.push(v);
    }
    let value = if out.len() == 1 { out.remove(0) } else { Value::Array(out) };
    println!("{}", serde_json::to_string_pretty(&value).map_err(|e| CliError::Failure(e.to_string()))?);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(CliError::Assertion(violations.join("; ")))
    }
}

fn cmd_converge(args: &ConvergeArgs) -> Result<(), CliError> {
    let file = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let flags = ExperimentConfig {
        families: args.family.clone(),
        functions: args.function.clone(),
        weight: args.weight.clone(),
        n_min: args.n.map(|g| g.0),
        n_max: args.n.map(|g| g.1),
        geometric_ratio: args.n.map(|g| g.2),
        s_list: args.s.clone(),
        output_dir: args.output_dir.clone(),
        formats: args.format.clone(),
    };
    let exp = file.overridden_by(flags).resolve()?;

    let mut reports: Vec<ConvergenceReport> = Vec::new();
    for family in &exp.families {
        for f in &exp.functions {
            reports.push(run_convergence(family, f, &exp.weight, &exp.n_grid, None)?);
        }
    }

    for fmt in &exp.formats {
        match fmt {
            Format::Json => {
                let summary: Vec<Value> = reports.iter().map(ConvergenceReport::summary_json).collect();
                let text = serde_json::to_string_pretty(&summary).map_err(|e| CliError::Failure(e.to_string()))?;
                output::write_atomic(&exp.output_dir.join("summary.json"), &(text + "\n"))?;
            }
            Format::Csv => {
                output::write_atomic(&exp.output_dir.join("convergence.csv"), &reports_to_csv(&reports))?;
            }
            Format::Svg => {
                for r in &reports {
                    let name = format!("{}__{}.svg", output::slug(&r.family), output::slug(&r.function));
                    output::write_atomic(&exp.output_dir.join(name), &svg::convergence_plot(r))?;
                }
            }
        }
    }

    let show = |v: Option<f64>| v.map_or("none".to_string(), |x| format!("{x:.3}"));
    let mut failed = 0;
    for r in &reports {
        if !r.pass {
            failed += 1;
        }
        println!(
            "{} {} {} {}: fitted {} expected {}{}",
            if r.pass { "PASS" } else { "FAIL" },
            r.family,
            r.function,
            r.weight.label(),
            show(r.fitted_slope),
            show(r.expected_slope),
            if r.bounds_hold { "" } else { " (bound violated)" }
        );
    }
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Assertion(format!("{failed} of {} reports failed", reports.len())))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Rule(source) => cmd_rule(source),
        Command::Exactness { source, max_degree } => cmd_exactness(source, *max_degree),
        Command::Peano { source, s, check_freud } => cmd_peano(source, s, *check_freud),
        Command::Converge(args) => cmd_converge(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    std::panic::set_hook(Box::new(|info| eprintln!("internal error: {info}")));
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            let msg = match &e {
                CliError::Usage(m) => format!("usage error: {m}"),
                CliError::Failure(m) => format!("error: {m}"),
                CliError::Assertion(m) => format!("check failed: {m}"),
            };
            eprintln!("{msg}");
            ExitCode::from(e.code())
        }
        Err(_) => ExitCode::from(1),
    }
}
