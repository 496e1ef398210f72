//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # baseline channels, union region
//! p_pd_success = 0.3
//! p_ss_success = 0.4
//! s_pd_success = 0.7
//! s_sd_success = 0.7
//! lambda_ep = 0.6
//! lambda_es = 0.6
//! policy = cooperative
//! ```
//!
//! Channel probabilities are required; everything else has a default.
//! Unknown keys are errors.

use std::collections::BTreeMap;

use crate::analytic::default_a_grid;
use crate::boundary::linear_grid;
use crate::error::{Error, Result};
use crate::model::{check_unit, PolicyKind, PolicySpec, SystemParams};
use crate::sim::SimConfig;
use crate::sweep::{ExperimentSpec, Grids, Mode};

/// Every accepted key, in the order they are applied.
pub const KEYS: [&str; 18] = [
    "p_pd_success",
    "p_ss_success",
    "s_pd_success",
    "s_sd_success",
    "lambda_ep",
    "lambda_es",
    "policy",
    "access_prob_a",
    "mode",
    "lambda_p_grid_max",
    "lambda_p_grid_step",
    "a_grid_step",
    "bisect_tol",
    "horizon_slots",
    "burn_in_slots",
    "replications",
    "seed",
    "drift_epsilon",
];

pub const REQUIRED_KEYS: [&str; 4] = ["p_pd_success", "p_ss_success", "s_pd_success", "s_sd_success"];

pub const DEFAULT_LAMBDA_P_GRID_MAX: f64 = 0.6;
pub const DEFAULT_LAMBDA_P_GRID_STEP: f64 = 0.005;
pub const DEFAULT_A_GRID_STEP: f64 = 0.05;
pub const DEFAULT_ACCESS_PROB_A: f64 = 0.5;

/// Key/value pairs in application order, with where each came from.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    values: BTreeMap<&'static str, String>,
}

fn known_key(key: &str, origin: impl FnOnce() -> String) -> Result<&'static str> {
    KEYS.iter().copied().find(|k| *k == key).ok_or_else(|| Error::UnknownKey {
        key: key.to_string(),
        origin: origin(),
    })
}

impl Settings {
    /// Parses config text; later duplicates win.
    pub fn parse(text: &str) -> Result<Self> {
        let mut settings = Settings::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
            let key = known_key(key.trim(), || format!("line {}", i + 1))?;
            settings.values.insert(key, value.trim().to_string());
        }
        Ok(settings)
    }

    /// Applies a `key=value` override.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{assignment}` is not `key=value`")))?;
        let key = known_key(key.trim(), || "--set".to_string())?;
        self.values.insert(key, value.trim().to_string());
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Builds a full spec. The channel keys must be present.
    pub fn to_spec(&self, name: &str) -> Result<ExperimentSpec> {
        let missing: Vec<String> = REQUIRED_KEYS
            .iter()
            .filter(|k| !self.values.contains_key(*k))
            .map(|k| k.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(Error::MissingKeys(missing));
        }
        let [a, b, c, d] = SystemParams::BASELINE_CHANNELS;
        let mut spec = ExperimentSpec {
            name: name.to_string(),
            params: SystemParams {
                p_pd_success: a,
                p_ss_success: b,
                s_pd_success: c,
                s_sd_success: d,
                lambda_ep: 1.0,
                lambda_es: 1.0,
            },
            harvest_variants: Vec::new(),
            policies: vec![PolicySpec::cooperative(DEFAULT_ACCESS_PROB_A)?],
            mode: Mode::AnalyticOnly,
            grids: Grids::default(),
            sim: SimConfig::default(),
        };
        self.apply(&mut spec)?;
        Ok(spec)
    }

    /// Overwrites the fields of `spec` named by these settings, then
    /// validates the result. Setting a harvesting rate drops any harvesting
    /// variants; setting `policy` replaces the policy list.
    pub fn apply(&self, spec: &mut ExperimentSpec) -> Result<()> {
        let mut grid_max = None;
        let mut grid_step = None;
        for key in KEYS {
            let Some(raw) = self.values.get(key) else { continue };
            let num = || parse_f64(key, raw);
            let int = || parse_u64(key, raw);
            let p = &mut spec.params;
            match key {
                "p_pd_success" => p.p_pd_success = check_unit(key, num()?)?,
                "p_ss_success" => p.p_ss_success = check_unit(key, num()?)?,
                "s_pd_success" => p.s_pd_success = check_unit(key, num()?)?,
                "s_sd_success" => p.s_sd_success = check_unit(key, num()?)?,
                "lambda_ep" | "lambda_es" => {
                    let v = check_unit(key, num()?)?;
                    if key == "lambda_ep" {
                        p.lambda_ep = v;
                    } else {
                        p.lambda_es = v;
                    }
                    spec.harvest_variants.clear();
                }
                "policy" => {
                    let kind = PolicyKind::parse(raw)
                        .ok_or_else(|| invalid(key, raw, "cooperative, dominant_i, dominant_ii or noncooperative"))?;
                    spec.policies = vec![match kind {
                        PolicyKind::NonCooperative => PolicySpec::non_cooperative(),
                        _ => PolicySpec::new(kind, DEFAULT_ACCESS_PROB_A)?,
                    }];
                }
                "access_prob_a" => {
                    let a = check_unit(key, num()?)?;
                    for policy in &mut spec.policies {
                        if policy.kind != PolicyKind::NonCooperative {
                            policy.access_prob_a = a;
                        }
                    }
                }
                "mode" => {
                    spec.mode = Mode::parse(raw).ok_or_else(|| invalid(key, raw, "analytic, simulate or compare"))?;
                }
                "lambda_p_grid_max" => grid_max = Some(check_unit(key, num()?)?),
                "lambda_p_grid_step" => grid_step = Some(positive(key, num()?)?),
                "a_grid_step" => {
                    let step = positive(key, num()?)?;
                    spec.grids.a = a_grid(check_unit(key, step)?);
                }
                "bisect_tol" => spec.grids.bisect_tol = positive(key, num()?)?,
                "horizon_slots" => spec.sim.horizon_slots = int()?,
                "burn_in_slots" => spec.sim.burn_in_slots = int()?,
                "replications" => {
                    spec.sim.replications =
                        u32::try_from(int()?).map_err(|_| invalid(key, raw, "a 32-bit count"))?
                }
                "seed" => spec.sim.seed = int()?,
                "drift_epsilon" => spec.sim.drift_epsilon = positive(key, num()?)?,
                _ => unreachable!("KEYS and this match are out of sync"),
            }
        }
        if grid_max.is_some() || grid_step.is_some() {
            let max = grid_max.unwrap_or_else(|| spec.grids.lambda_p.last().copied().unwrap_or(DEFAULT_LAMBDA_P_GRID_MAX));
            let step = grid_step.unwrap_or(DEFAULT_LAMBDA_P_GRID_STEP);
            spec.grids.lambda_p = linear_grid(max, step);
        }
        spec.validate()
    }
}

fn invalid(key: &str, raw: &str, expected: &str) -> Error {
    Error::Config(format!("`{key}` = `{raw}`: expected {expected}"))
}

fn parse_f64(key: &str, raw: &str) -> Result<f64> {
    raw.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| invalid(key, raw, "a number"))
}

fn parse_u64(key: &str, raw: &str) -> Result<u64> {
    raw.parse::<u64>()
        .map_err(|_| invalid(key, raw, "a nonnegative integer"))
}

fn positive(key: &'static str, v: f64) -> Result<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Config(format!("`{key}` must be positive, got {v}")))
    }
}

/// Parses and validates a config file's text.
pub fn parse_config(text: &str) -> Result<ExperimentSpec> {
    Settings::parse(text)?.to_spec("config")
}

/// The default `a` grid for a given step; `default_a_grid` is step 0.05.
pub fn a_grid(step: f64) -> Vec<f64> {
    if step == DEFAULT_A_GRID_STEP {
        default_a_grid()
    } else {
        linear_grid(1.0, step)
    }
}
