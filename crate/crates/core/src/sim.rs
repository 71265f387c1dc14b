//! Monte Carlo study harness.
//!
//! Study 1: data generated from the BBS model itself, (alpha, beta) fitted
//! at the true (known) delta under 0/10/30% random right censoring;
//! empirical bias and MSE are accumulated per parameter.
//!
//! Study 2: data generated from BS, LN or MXBS; both the BBS (profile
//! delta) and BBSO models are fitted and their mean estimates and mean
//! fitted log-likelihoods compared.
//!
//! Replications are embarrassingly parallel: each uses its own RNG
//! substream and results are reduced in replication order, so reports are
//! bit-identical for a given (scenario, seed) regardless of thread count.

use crate::competitors::{model_fit, Model, ModelKind};
use crate::dist::BbsParams;
use crate::error::{Error, Result};
use crate::estimation::{fit_at_delta, fit_profile, Observation, ProfileGridSpec};
use crate::numerics::rng::RngStream;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Generator {
    Bbs { alpha: f64, beta: f64, delta: f64 },
    Bs { alpha: f64, beta: f64 },
    Ln { mu: f64, sigma: f64 },
    Mxbs { alpha1: f64, beta1: f64, alpha2: f64, beta2: f64, p: f64 },
}

impl Generator {
    pub fn name(&self) -> &'static str {
        match self {
            Generator::Bbs { .. } => "bbs",
            Generator::Bs { .. } => "bs",
            Generator::Ln { .. } => "ln",
            Generator::Mxbs { .. } => "mxbs",
        }
    }

    fn sample(&self, n: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
        Ok(match *self {
            Generator::Bbs { alpha, beta, delta } => {
                BbsParams::new(alpha, beta, delta)?.sample(n, rng)
            }
            Generator::Bs { alpha, beta } => {
                Model::Bs(crate::competitors::BsParams::new(alpha, beta)?).sample(n, rng)
            }
            Generator::Ln { mu, sigma } => {
                Model::Ln(crate::competitors::LnParams::new(mu, sigma)?).sample(n, rng)
            }
            Generator::Mxbs { alpha1, beta1, alpha2, beta2, p } => {
                Model::Mxbs(crate::competitors::MxbsParams::new(alpha1, beta1, alpha2, beta2, p)?)
                    .sample(n, rng)
            }
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub study: u8,
    pub generator: Generator,
    pub n: usize,
    pub censor_proportion: f64,
    pub replications: usize,
    pub seed: Option<u64>,
    /// Models fitted in study 2 (study 1 always fits BBS at the true delta).
    pub fit_targets: Vec<String>,
    pub delta_grid: ProfileGridSpec,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.study != 1 && self.study != 2 {
            return Err(Error::Invalid(format!("study must be 1 or 2, got {}", self.study)));
        }
        if self.replications < 1 {
            return Err(Error::Invalid("replications must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&self.censor_proportion) {
            return Err(Error::Invalid(format!(
                "censor_proportion {} outside [0, 1)",
                self.censor_proportion
            )));
        }
        if self.n < 4 {
            return Err(Error::Invalid("n must be at least 4".into()));
        }
        if self.study == 1 && !matches!(self.generator, Generator::Bbs { .. }) {
            return Err(Error::Invalid("study 1 requires a BBS generator".into()));
        }
        if self.study == 2 && matches!(self.generator, Generator::Bbs { .. }) {
            return Err(Error::Invalid("study 2 requires a BS, LN or MXBS generator".into()));
        }
        self.delta_grid.validate()
    }

    /// Parse the line-oriented `key = value` scenario format. `#` starts a
    /// comment; keys depend on the generator family.
    pub fn parse(text: &str) -> Result<Scenario> {
        let mut kv: Vec<(usize, String, String)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(Error::Parse {
                line: idx + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            kv.push((idx + 1, k.trim().to_lowercase(), v.trim().to_string()));
        }

        let mut study: Option<u8> = None;
        let mut gen_name: Option<String> = None;
        let mut n: Option<usize> = None;
        let mut reps: Option<usize> = None;
        let mut seed: Option<u64> = None;
        let mut censoring = 0.0;
        let mut grid = ProfileGridSpec::default();
        let mut fit_targets: Vec<String> = Vec::new();
        let mut nums: std::collections::BTreeMap<String, f64> = Default::default();

        let parse_f64 = |line: usize, key: &str, v: &str| -> Result<f64> {
            v.parse::<f64>().map_err(|_| Error::Parse {
                line,
                message: format!("key `{key}`: `{v}` is not a number"),
            })
        };

        for (line, key, value) in kv {
            match key.as_str() {
                "study" => {
                    study = Some(value.parse().map_err(|_| Error::Parse {
                        line,
                        message: format!("study must be 1 or 2, got `{value}`"),
                    })?)
                }
                "generator" => gen_name = Some(value.to_lowercase()),
                "n" => {
                    n = Some(value.parse().map_err(|_| Error::Parse {
                        line,
                        message: format!("n must be a positive integer, got `{value}`"),
                    })?)
                }
                "replications" => {
                    reps = Some(value.parse().map_err(|_| Error::Parse {
                        line,
                        message: format!("replications must be a positive integer, got `{value}`"),
                    })?)
                }
                "seed" => {
                    seed = Some(value.parse().map_err(|_| Error::Parse {
                        line,
                        message: format!("seed must be a 64-bit unsigned integer, got `{value}`"),
                    })?)
                }
                "censoring" => censoring = parse_f64(line, &key, &value)?,
                "delta_grid" => grid = parse_delta_grid(&value, line)?,
                "fit_targets" => {
                    fit_targets = value.split(',').map(|s| s.trim().to_lowercase()).collect()
                }
                "alpha" | "beta" | "delta" | "mu" | "sigma" | "alpha1" | "beta1" | "alpha2"
                | "beta2" | "p" => {
                    nums.insert(key.clone(), parse_f64(line, &key, &value)?);
                }
                other => {
                    return Err(Error::Parse {
                        line,
                        message: format!("unknown scenario key `{other}`"),
                    })
                }
            }
        }

        let study = study.ok_or(Error::Parse { line: 0, message: "missing key `study`".into() })?;
        let gen_name =
            gen_name.ok_or(Error::Parse { line: 0, message: "missing key `generator`".into() })?;
        let need = |k: &str| -> Result<f64> {
            nums.get(k).copied().ok_or(Error::Parse {
                line: 0,
                message: format!("generator `{gen_name}` needs key `{k}`"),
            })
        };
        let generator = match gen_name.as_str() {
            "bbs" => Generator::Bbs { alpha: need("alpha")?, beta: need("beta")?, delta: need("delta")? },
            "bs" => Generator::Bs { alpha: need("alpha")?, beta: need("beta")? },
            "ln" => Generator::Ln { mu: need("mu")?, sigma: need("sigma")? },
            "mxbs" => Generator::Mxbs {
                alpha1: need("alpha1")?,
                beta1: need("beta1")?,
                alpha2: need("alpha2")?,
                beta2: need("beta2")?,
                p: need("p")?,
            },
            other => {
                return Err(Error::Parse {
                    line: 0,
                    message: format!("unknown generator `{other}` (bbs, bs, ln, mxbs)"),
                })
            }
        };
        if fit_targets.is_empty() {
            fit_targets = match study {
                1 => vec!["bbs".into()],
                _ => vec!["bbs".into(), "bbso".into()],
            };
        }
        let scenario = Scenario {
            study,
            generator,
            n: n.ok_or(Error::Parse { line: 0, message: "missing key `n`".into() })?,
            censor_proportion: censoring,
            replications: reps
                .ok_or(Error::Parse { line: 0, message: "missing key `replications`".into() })?,
            seed,
            fit_targets,
            delta_grid: grid,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn from_file(path: &Path) -> Result<Scenario> {
        Scenario::parse(&fs::read_to_string(path)?)
    }
}

fn parse_delta_grid(value: &str, line: usize) -> Result<ProfileGridSpec> {
    let (lo, hi) = value.split_once(':').ok_or(Error::Parse {
        line,
        message: format!("delta_grid must look like `-20:20`, got `{value}`"),
    })?;
    let lo: i32 = lo.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("delta_grid lower bound `{lo}` is not an integer"),
    })?;
    let hi: i32 = hi.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("delta_grid upper bound `{hi}` is not an integer"),
    })?;
    if lo > hi {
        return Err(Error::Parse { line, message: format!("empty delta grid {lo}:{hi}") });
    }
    Ok(ProfileGridSpec::integer_range(lo, hi))
}

// ---- censoring mechanism ----

/// Random right censoring with Uniform(0, c) censoring times, where `c` is
/// calibrated by bisection so the expected censored fraction against the
/// empirical distribution of `times` equals `proportion`. The expected
/// fraction for a given c is q(c) = mean(min(t_i, c)) / c, which decreases
/// continuously from 1 to 0.
pub fn make_censoring(times: &[f64], proportion: f64, rng: &mut RngStream) -> Result<Vec<Observation>> {
    if !(0.0..1.0).contains(&proportion) {
        return Err(Error::Invalid(format!("censoring proportion {proportion} outside [0, 1)")));
    }
    if times.is_empty() {
        return Err(Error::Invalid("make_censoring: empty times".into()));
    }
    if proportion == 0.0 {
        return times.iter().map(|&t| Observation::new(t, true)).collect();
    }

    let n = times.len() as f64;
    let q = |c: f64| times.iter().map(|&t| t.min(c)).sum::<f64>() / (n * c);

    let t_max = times.iter().cloned().fold(f64::MIN, f64::max);
    let mut lo = t_max * 1e-12;
    let mut hi = t_max;
    let mut guard = 0;
    while q(hi) > proportion {
        hi *= 2.0;
        guard += 1;
        if guard > 200 {
            return Err(Error::Fit(format!(
                "censoring calibration failed for proportion {proportion}"
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if q(mid) > proportion {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c = 0.5 * (lo + hi);

    times
        .iter()
        .map(|&t| {
            let censor_time = c * rng.next_uniform();
            if t <= censor_time {
                Observation::new(t, true)
            } else {
                Observation::new(censor_time, false)
            }
        })
        .collect()
}

// ---- reports ----

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CellStats {
    pub truth: f64,
    pub mean_estimate: f64,
    pub bias: f64,
    pub mse: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Study1Stats {
    pub alpha: CellStats,
    pub beta: CellStats,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Study2ModelStats {
    pub model: String,
    /// (parameter name, mean fitted value) pairs.
    pub mean_estimates: Vec<(String, f64)>,
    pub mean_loglik: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimReport {
    pub scenario: Scenario,
    pub seed: u64,
    pub replications_used: usize,
    pub failed_replications: usize,
    pub study1: Option<Study1Stats>,
    pub study2: Option<Vec<Study2ModelStats>>,
}

fn cell_stats(truth: f64, estimates: &[f64]) -> CellStats {
    let n = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / n;
    let mse = estimates.iter().map(|e| (e - truth) * (e - truth)).sum::<f64>() / n;
    CellStats { truth, mean_estimate: mean, bias: mean - truth, mse }
}

/// Study 1: bias/MSE of the (alpha, beta) estimators at known delta.
pub fn run_study1(scenario: &Scenario) -> Result<SimReport> {
    scenario.validate()?;
    let seed = scenario
        .seed
        .ok_or_else(|| Error::Invalid("scenario needs a seed (file key or --seed)".into()))?;
    let (alpha_true, beta_true, delta_true) = match scenario.generator {
        Generator::Bbs { alpha, beta, delta } => (alpha, beta, delta),
        _ => return Err(Error::Invalid("study 1 requires a BBS generator".into())),
    };
    let base = RngStream::new(seed);

    let outcomes: Vec<Option<(f64, f64)>> = (0..scenario.replications)
        .into_par_iter()
        .map(|rep| {
            let mut rng = base.substream(rep as u64);
            let gen = scenario.generator.sample(scenario.n, &mut rng).ok()?;
            let data = make_censoring(&gen, scenario.censor_proportion, &mut rng).ok()?;
            if data.iter().filter(|o| o.event).count() < 2 {
                return None;
            }
            let fit = fit_at_delta(&data, delta_true).ok()?;
            if !fit.converged {
                return None;
            }
            Some((fit.alpha, fit.beta))
        })
        .collect();

    let mut alphas = Vec::with_capacity(outcomes.len());
    let mut betas = Vec::with_capacity(outcomes.len());
    let mut failed = 0usize;
    for o in outcomes {
        match o {
            Some((a, b)) => {
                alphas.push(a);
                betas.push(b);
            }
            None => failed += 1,
        }
    }
    if alphas.is_empty() {
        return Err(Error::Fit("every study-1 replication failed".into()));
    }
    Ok(SimReport {
        scenario: scenario.clone(),
        seed,
        replications_used: alphas.len(),
        failed_replications: failed,
        study1: Some(Study1Stats {
            alpha: cell_stats(alpha_true, &alphas),
            beta: cell_stats(beta_true, &betas),
        }),
        study2: None,
    })
}

/// Study 2: BBS (profile delta) vs BBSO under a misspecified generator.
pub fn run_study2(scenario: &Scenario) -> Result<SimReport> {
    scenario.validate()?;
    let seed = scenario
        .seed
        .ok_or_else(|| Error::Invalid("scenario needs a seed (file key or --seed)".into()))?;
    let base = RngStream::new(seed);
    let grid = scenario.delta_grid.clone();

    struct RepOutcome {
        bbs: (f64, f64, f64, f64),  // alpha, beta, delta, loglik
        bbso: (f64, f64, f64, f64), // alpha, beta, gamma, loglik
    }

    let outcomes: Vec<Option<RepOutcome>> = (0..scenario.replications)
        .into_par_iter()
        .map(|rep| {
            let mut rng = base.substream(rep as u64);
            let times = scenario.generator.sample(scenario.n, &mut rng).ok()?;
            let data: Vec<Observation> =
                times.iter().map(|&t| Observation::new(t, true).unwrap()).collect();
            let bbs = fit_profile(&data, &grid).ok()?;
            let bbso = model_fit(&data, ModelKind::Bbso).ok()?;
            let g = match bbso.model {
                Model::Bbso(p) => (p.alpha, p.beta, p.gamma, bbso.loglik),
                _ => unreachable!(),
            };
            Some(RepOutcome {
                bbs: (bbs.params.alpha(), bbs.params.beta(), bbs.params.delta(), bbs.loglik),
                bbso: g,
            })
        })
        .collect();

    let kept: Vec<RepOutcome> = outcomes.into_iter().flatten().collect();
    let failed = scenario.replications - kept.len();
    if kept.is_empty() {
        return Err(Error::Fit("every study-2 replication failed".into()));
    }
    let n = kept.len() as f64;
    let mean_of = |f: &dyn Fn(&RepOutcome) -> f64| kept.iter().map(f).sum::<f64>() / n;

    let study2 = vec![
        Study2ModelStats {
            model: "bbs".into(),
            mean_estimates: vec![
                ("alpha".into(), mean_of(&|r| r.bbs.0)),
                ("beta".into(), mean_of(&|r| r.bbs.1)),
                ("delta".into(), mean_of(&|r| r.bbs.2)),
            ],
            mean_loglik: mean_of(&|r| r.bbs.3),
        },
        Study2ModelStats {
            model: "bbso".into(),
            mean_estimates: vec![
                ("alpha".into(), mean_of(&|r| r.bbso.0)),
                ("beta".into(), mean_of(&|r| r.bbso.1)),
                ("gamma".into(), mean_of(&|r| r.bbso.2)),
            ],
            mean_loglik: mean_of(&|r| r.bbso.3),
        },
    ];
    Ok(SimReport {
        scenario: scenario.clone(),
        seed,
        replications_used: kept.len(),
        failed_replications: failed,
        study1: None,
        study2: Some(study2),
    })
}

/// Dispatch on the scenario's study number.
pub fn run_scenario(scenario: &Scenario) -> Result<SimReport> {
    match scenario.study {
        1 => run_study1(scenario),
        2 => run_study2(scenario),
        other => Err(Error::Invalid(format!("study must be 1 or 2, got {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bbs_scenario(reps: usize) -> Scenario {
        Scenario {
            study: 1,
            generator: Generator::Bbs { alpha: 0.5, beta: 1.0, delta: -1.0 },
            n: 30,
            censor_proportion: 0.0,
            replications: reps,
            seed: Some(9),
            fit_targets: vec!["bbs".into()],
            delta_grid: ProfileGridSpec::default(),
        }
    }

    #[test]
    fn scenario_parses_and_validates() {
        let text = "\
# Table 1 cell
study = 1
generator = bbs
alpha = 0.1
beta = 1.0
delta = -10
n = 50
censoring = 0.0
replications = 100
seed = 42
";
        let s = Scenario::parse(text).unwrap();
        assert_eq!(s.study, 1);
        assert_eq!(s.n, 50);
        assert_eq!(s.seed, Some(42));
        assert!(matches!(s.generator, Generator::Bbs { delta, .. } if delta == -10.0));
    }

    #[test]
    fn unknown_key_is_named_in_error() {
        let text = "study = 1\ngenerator = bbs\nalpha=0.5\nbeta=1\ndelta=0\nn=50\nreplications=10\nbogus = 3\n";
        match Scenario::parse(text) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 8);
                assert!(message.contains("bogus"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn zero_censoring_is_identity() {
        let mut rng = RngStream::new(1);
        let times = vec![0.5, 1.0, 2.0, 4.0];
        let obs = make_censoring(&times, 0.0, &mut rng).unwrap();
        assert!(obs.iter().all(|o| o.event));
        let back: Vec<f64> = obs.iter().map(|o| o.time).collect();
        assert_eq!(back, times);
    }

    #[test]
    fn censoring_calibration_hits_target() {
        let p = BbsParams::new(0.5, 1.0, -1.0).unwrap();
        let mut rng = RngStream::new(2);
        let times = p.sample(100_000, &mut rng);
        let obs = make_censoring(&times, 0.3, &mut rng).unwrap();
        let frac = obs.iter().filter(|o| !o.event).count() as f64 / obs.len() as f64;
        assert!((0.28..=0.32).contains(&frac), "censored fraction {frac}");
    }

    #[test]
    fn high_uniform_bound_censors_nothing() {
        // all censoring times above max(times) leave every record an event
        let times = [1.0_f64, 2.0, 3.0];
        let censor_times = [5.0_f64, 6.0, 7.0];
        let obs: Vec<Observation> = times
            .iter()
            .zip(censor_times)
            .map(|(&t, c)| Observation::new(t.min(c), t <= c).unwrap())
            .collect();
        assert!(obs.iter().all(|o| o.event));
    }

    #[test]
    fn study1_is_deterministic() {
        let s = bbs_scenario(20);
        let a = run_study1(&s).unwrap();
        let b = run_study1(&s).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn mse_dominates_squared_bias() {
        let s = bbs_scenario(50);
        let r = run_study1(&s).unwrap();
        let st = r.study1.unwrap();
        assert!(st.alpha.mse >= st.alpha.bias * st.alpha.bias - 1e-15);
        assert!(st.beta.mse >= st.beta.bias * st.beta.bias - 1e-15);
    }
}
