//! Command-line front end: fit reports, simulation driving, curve grids,
//! confidence intervals and Kaplan-Meier estimation.

use bbs_core::cli::{
    cmd_ci, cmd_curves, cmd_fit, cmd_simulate, parse_grid, parse_range, render_ci_text,
    render_curves_machine, render_fit_text, render_sim_text, CiTargetSpec, CurveModel, ModelTag,
};
use bbs_core::competitors::{BbsoParams, BsParams, LnParams, Model, MxbsParams};
use bbs_core::dist::BbsParams;
use bbs_core::error::{Error, Result};
use bbs_core::io::{km_estimate, load_dataset, Dataset, FileFormat};
use bbs_core::sim::Scenario;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "bbs",
    about = "Bimodal Birnbaum-Saunders lifetime models: fitting, simulation, intervals",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct DatasetArgs {
    /// Input file with a header row.
    file: PathBuf,
    /// Column holding the times.
    #[arg(long, default_value = "time")]
    time_col: String,
    /// Column holding the event flag (1 = event, 0 = right-censored). When
    /// absent every row counts as an event.
    #[arg(long)]
    event_col: Option<String>,
    /// csv or tsv; inferred from the extension when omitted.
    #[arg(long)]
    format: Option<String>,
}

impl DatasetArgs {
    fn load(&self) -> Result<Dataset> {
        let format = match self.format.as_deref() {
            Some("csv") => FileFormat::Csv,
            Some("tsv") => FileFormat::Tsv,
            Some(other) => {
                return Err(Error::Invalid(format!("unknown format `{other}` (csv or tsv)")))
            }
            None => FileFormat::infer(&self.file),
        };
        let loaded = load_dataset(&self.file, format, &self.time_col, self.event_col.as_deref())?;
        for r in &loaded.rejected {
            eprintln!("warning: {}:{}: row rejected: {}", self.file.display(), r.line, r.reason);
        }
        Ok(loaded.dataset)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fit models and print a comparison table (estimates, SEs, log-lik, AIC, BIC).
    Fit {
        #[command(flatten)]
        dataset: DatasetArgs,
        /// Comma-separated list among bbs, bbso, mxbs, bs, ln.
        #[arg(long, default_value = "bbs,bbso,mxbs,bs,ln")]
        models: String,
        /// Integer profile grid for the BBS delta, as lo:hi.
        #[arg(long, default_value = "-20:20", allow_hyphen_values = true)]
        delta_grid: String,
        /// Add a 0.1-spaced delta refinement pass around the integer winner.
        #[arg(long)]
        refine: bool,
        /// Write the JSON report here as well.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a Monte Carlo scenario file.
    Simulate {
        scenario: PathBuf,
        /// RNG seed; overrides the scenario file. Required when the file has
        /// no seed (there is no wall-clock fallback).
        #[arg(long)]
        seed: Option<u64>,
        /// Override the replication count.
        #[arg(long)]
        reps: Option<usize>,
        /// Directory for report.txt / report.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit plot-ready rows (t, pdf, cdf, sf, hazard) on an even grid.
    Curves {
        /// bbs, bs, ln, bbso or mxbs.
        #[arg(long, default_value = "bbs")]
        model: String,
        #[arg(long, allow_negative_numbers = true)]
        alpha: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        beta: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        delta: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        gamma: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        mu: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        sigma: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        alpha1: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        beta1: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        alpha2: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        beta2: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        p: Option<f64>,
        /// Evaluation range lo:hi.
        #[arg(long, allow_hyphen_values = true)]
        range: String,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Delta-method confidence intervals for survival@t, the mean and the variance.
    Ci {
        #[command(flatten)]
        dataset: DatasetArgs,
        /// Comma-separated targets: mean, variance, survival@t.
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 0.025)]
        rho: f64,
        /// Supply alpha, beta and delta to skip the fitting step.
        #[arg(long, allow_negative_numbers = true)]
        alpha: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        beta: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        delta: Option<f64>,
        #[arg(long, default_value = "-20:20", allow_hyphen_values = true)]
        delta_grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Kaplan-Meier product-limit estimate.
    Km {
        #[command(flatten)]
        dataset: DatasetArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn require(name: &str, v: Option<f64>) -> Result<f64> {
    v.ok_or_else(|| Error::Invalid(format!("missing required parameter --{name}")))
}

fn write_json<T: serde::Serialize>(path: &PathBuf, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Invalid(format!("serialization failed: {e}")))?;
    std::fs::write(path, text)?;
    Ok(())
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Fit { dataset, models, delta_grid, refine, out } => {
            let data = dataset.load()?;
            let tags = ModelTag::parse_list(&models)?;
            let grid = parse_grid(&delta_grid)?;
            let report = cmd_fit(&data, &tags, &grid, refine)?;
            print!("{}", render_fit_text(&report));
            if let Some(path) = out {
                write_json(&path, &report)?;
            }
        }
        Command::Simulate { scenario, seed, reps, out } => {
            let mut sc = Scenario::from_file(&scenario)?;
            if let Some(s) = seed {
                sc.seed = Some(s);
            }
            if sc.seed.is_none() {
                return Err(Error::Invalid(
                    "no seed: pass --seed or set `seed =` in the scenario file".into(),
                ));
            }
            if let Some(r) = reps {
                sc.replications = r;
            }
            let report = cmd_simulate(&sc, out.as_deref())?;
            print!("{}", render_sim_text(&report));
        }
        Command::Curves {
            model,
            alpha,
            beta,
            delta,
            gamma,
            mu,
            sigma,
            alpha1,
            beta1,
            alpha2,
            beta2,
            p,
            range,
            points,
            out,
        } => {
            let (lo, hi) = parse_range(&range)?;
            let curve_model = match model.to_lowercase().as_str() {
                "bbs" => CurveModel::Bbs(BbsParams::new(
                    require("alpha", alpha)?,
                    require("beta", beta)?,
                    require("delta", delta)?,
                )?),
                "bs" => CurveModel::Competitor(Model::Bs(BsParams::new(
                    require("alpha", alpha)?,
                    require("beta", beta)?,
                )?)),
                "ln" => CurveModel::Competitor(Model::Ln(LnParams::new(
                    require("mu", mu)?,
                    require("sigma", sigma)?,
                )?)),
                "bbso" => CurveModel::Competitor(Model::Bbso(BbsoParams::new(
                    require("alpha", alpha)?,
                    require("beta", beta)?,
                    require("gamma", gamma)?,
                )?)),
                "mxbs" => CurveModel::Competitor(Model::Mxbs(MxbsParams::new(
                    require("alpha1", alpha1)?,
                    require("beta1", beta1)?,
                    require("alpha2", alpha2)?,
                    require("beta2", beta2)?,
                    require("p", p)?,
                )?)),
                other => return Err(Error::Invalid(format!("unknown model `{other}`"))),
            };
            let rows = cmd_curves(&curve_model, lo, hi, points)?;
            let text = render_curves_machine(&rows);
            match out {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{text}"),
            }
        }
        Command::Ci { dataset, target, rho, alpha, beta, delta, delta_grid, out } => {
            let data = dataset.load()?;
            let targets = CiTargetSpec::parse_list(&target)?;
            let grid = parse_grid(&delta_grid)?;
            let params = match (alpha, beta, delta) {
                (None, None, None) => None,
                (Some(a), Some(b), Some(d)) => Some(BbsParams::new(a, b, d)?),
                _ => {
                    return Err(Error::Invalid(
                        "either give all of --alpha --beta --delta or none".into(),
                    ))
                }
            };
            let results = cmd_ci(&data, params, &grid, &targets, rho)?;
            print!("{}", render_ci_text(&results));
            if let Some(path) = out {
                write_json(&path, &results)?;
            }
        }
        Command::Km { dataset, out } => {
            let data = dataset.load()?;
            let km = km_estimate(&data.observations);
            println!("{:>14}{:>14}{:>10}{:>8}", "time", "survival", "at_risk", "events");
            for pt in &km.points {
                println!(
                    "{:>14.4}{:>14.6}{:>10}{:>8}",
                    pt.time, pt.survival, pt.at_risk, pt.events
                );
            }
            if let Some(path) = out {
                write_json(&path, &km)?;
            }
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
