//! Grid sweeps over `lambda_p`: analytic boundaries, simulated boundaries
//! and their comparison, plus the named reference scenarios.

use rayon::prelude::*;

use crate::analytic::{self, clamp_onset, crossover_lambda_p, default_a_grid, Region};
use crate::boundary::{check_grid, extract_boundary, linear_grid, RegionBoundary, RegionLabel, Source};
use crate::error::{Error, Result};
use crate::model::{PolicyKind, PolicySpec, RatePoint, SystemParams};
use crate::rng::name_id;
use crate::sim::{is_stable_point_at, PointKey, SimConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    AnalyticOnly,
    SimulateOnly,
    Compare,
}

impl Mode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "analytic" => Some(Mode::AnalyticOnly),
            "simulate" => Some(Mode::SimulateOnly),
            "compare" => Some(Mode::Compare),
            _ => None,
        }
    }

    pub fn analytic(self) -> bool {
        self != Mode::SimulateOnly
    }

    pub fn simulated(self) -> bool {
        self != Mode::AnalyticOnly
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grids {
    pub lambda_p: Vec<f64>,
    /// Access probabilities the union region ranges over.
    pub a: Vec<f64>,
    /// Analytic bisection tolerance on `lambda_s`.
    pub bisect_tol: f64,
    /// Bisection steps for simulated boundaries; resolution is `2^-steps`.
    pub sim_bisect_steps: u32,
}

impl Default for Grids {
    fn default() -> Self {
        Grids {
            lambda_p: linear_grid(0.6, 0.005),
            a: default_a_grid(),
            bisect_tol: DEFAULT_BISECT_TOL,
            sim_bisect_steps: 6,
        }
    }
}

/// Fine enough that boundaries printed with six decimals are exact.
pub const DEFAULT_BISECT_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub params: SystemParams,
    /// Alternative `(lambda_ep, lambda_es)` pairs to run with the same
    /// channels. Empty means just `params`.
    pub harvest_variants: Vec<(f64, f64)>,
    pub policies: Vec<PolicySpec>,
    pub mode: Mode,
    pub grids: Grids,
    pub sim: SimConfig,
}

/// One boundary's worth of an experiment: a policy under one parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub params: SystemParams,
    pub policy: PolicySpec,
}

impl Scenario {
    pub fn label(&self) -> RegionLabel {
        match self.policy.kind {
            PolicyKind::CooperativeRandomized => RegionLabel::Union,
            PolicyKind::DominantI => RegionLabel::R1,
            PolicyKind::DominantII => RegionLabel::R2,
            PolicyKind::NonCooperative => RegionLabel::NonCooperative,
        }
    }

    /// The analytic region this policy's simulation should reproduce.
    pub fn region(&self, a_grid: &[f64]) -> Region {
        let a = self.policy.access_prob_a;
        match self.policy.kind {
            PolicyKind::CooperativeRandomized => Region::Union {
                a_grid: a_grid.to_vec(),
            },
            PolicyKind::DominantI => Region::R1 { a },
            PolicyKind::DominantII => Region::R2 { a },
            PolicyKind::NonCooperative => Region::NonCooperative,
        }
    }

    /// File-name friendly identifier, e.g. `r1_a0.50_lep0.60_les0.60`.
    pub fn tag(&self) -> String {
        let harvest = format!("lep{:.2}_les{:.2}", self.params.lambda_ep, self.params.lambda_es);
        match self.policy.kind {
            PolicyKind::DominantI | PolicyKind::DominantII => {
                format!("{}_a{:.2}_{harvest}", self.label(), self.policy.access_prob_a)
            }
            _ => format!("{}_{harvest}", self.label()),
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.policies.is_empty() {
            return Err(Error::Config("experiment needs at least one policy".into()));
        }
        if self.grids.lambda_p.is_empty() || self.grids.a.is_empty() {
            return Err(Error::Config("grids must be nonempty".into()));
        }
        check_grid(&self.grids.lambda_p)?;
        if self.grids.a.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(Error::Config("a grid values must lie in [0, 1]".into()));
        }
        if !(self.grids.bisect_tol > 0.0 && self.grids.bisect_tol < 1.0) {
            return Err(Error::Config("bisect_tol must lie in (0, 1)".into()));
        }
        for &(lep, les) in &self.harvest_variants {
            self.params.with_harvest(lep, les)?;
        }
        if self.mode.simulated() {
            self.sim.validate()?;
            if self.sim.replications < 3 {
                return Err(Error::Config("simulation needs at least 3 replications".into()));
            }
        }
        Ok(())
    }

    pub fn scenarios(&self) -> Result<Vec<Scenario>> {
        let params: Vec<SystemParams> = if self.harvest_variants.is_empty() {
            vec![self.params]
        } else {
            self.harvest_variants
                .iter()
                .map(|&(lep, les)| self.params.with_harvest(lep, les))
                .collect::<Result<_>>()?
        };
        Ok(params
            .iter()
            .flat_map(|&params| self.policies.iter().map(move |&policy| Scenario { params, policy }))
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaggedBoundary {
    pub tag: String,
    pub scenario: Scenario,
    pub boundary: RegionBoundary,
    /// Simulated boundaries only: whether `lambda_s = 0` was stable at each
    /// grid point. Where it was not, the boundary is 0.
    pub bracketed: Option<Vec<bool>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossoverReport {
    pub params: SystemParams,
    pub source: Source,
    /// First grid `lambda_p` where the union boundary meets or passes the
    /// non-cooperative one.
    pub measured: Option<f64>,
    /// Closed-form crossover.
    pub predicted: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub name: String,
    pub seed: u64,
    pub boundaries: Vec<TaggedBoundary>,
    /// Largest |analytic - simulated| over certain grid points; compare mode only.
    pub max_gap: Option<f64>,
    pub crossovers: Vec<CrossoverReport>,
}

impl ComparisonReport {
    pub fn find(&self, tag: &str, source: Source) -> Option<&TaggedBoundary> {
        self.boundaries
            .iter()
            .find(|b| b.tag == tag && b.boundary.source == source)
    }
}

/// Simulated boundary: bisection on `lambda_s` against the replicated
/// stability verdict, one independent stream family per grid point.
pub fn simulated_boundary(
    scenario: &Scenario,
    lambda_p_grid: &[f64],
    sim: &SimConfig,
    steps: u32,
    experiment: u64,
) -> Result<(RegionBoundary, Vec<bool>)> {
    let points = lambda_p_grid
        .par_iter()
        .enumerate()
        .map(|(i, &lp)| {
            let key = PointKey {
                experiment,
                point: i as u64,
            };
            let probe = |ls: f64| -> Result<_> {
                is_stable_point_at(sim, key, &scenario.params, RatePoint::new(lp, ls)?, scenario.policy)
            };
            let origin = probe(0.0)?;
            // A verdict flip within one resolution along lambda_p means the
            // region's vertical edge at the PU cutoff is that close.
            let resolution = 0.5f64.powi(steps as i32);
            let neighbour = if origin.stable { lp + resolution } else { lp - resolution };
            let near_cutoff = (0.0..=1.0).contains(&neighbour)
                && is_stable_point_at(
                    sim,
                    key,
                    &scenario.params,
                    RatePoint::new(neighbour, 0.0)?,
                    scenario.policy,
                )?
                .stable
                    != origin.stable;
            let uncertain = near_cutoff || origin.marginal(sim.drift_epsilon);
            if !origin.stable {
                return Ok((0.0, uncertain, false));
            }
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..steps {
                let mid = 0.5 * (lo + hi);
                if probe(mid)?.stable {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok((0.5 * (lo + hi), uncertain, true))
        })
        .collect::<Result<Vec<_>>>()?;

    let lambda_s_max = points.iter().map(|p| p.0).collect();
    let uncertain = points.iter().map(|p| p.1).collect();
    let bracketed = points.iter().map(|p| p.2).collect();
    let boundary = RegionBoundary::new(
        scenario.label(),
        Source::Simulated,
        lambda_p_grid.to_vec(),
        lambda_s_max,
        uncertain,
    )?;
    Ok((boundary, bracketed))
}

/// Largest |analytic - simulated| over grid points the simulation resolved.
pub fn boundary_gap(analytic: &RegionBoundary, simulated: &RegionBoundary) -> f64 {
    analytic
        .lambda_s_max
        .iter()
        .zip(&simulated.lambda_s_max)
        .zip(&simulated.uncertain)
        .filter(|(_, &u)| !u)
        .map(|((a, s), _)| (a - s).abs())
        .fold(0.0, f64::max)
}

/// First grid `lambda_p` at which the union boundary has caught up with the
/// non-cooperative one, after being strictly below it. Interpolating would
/// be wrong here: the non-cooperative boundary can drop to zero at its PU
/// cutoff before the two curves meet.
pub fn measure_crossover(union: &RegionBoundary, noncoop: &RegionBoundary) -> Option<f64> {
    let pts: Vec<(f64, f64)> = union
        .lambda_p_grid
        .iter()
        .enumerate()
        .filter(|&(i, _)| !union.uncertain[i] && !noncoop.uncertain[i])
        .map(|(i, &lp)| (lp, noncoop.lambda_s_max[i] - union.lambda_s_max[i]))
        .collect();
    let start = pts.iter().position(|&(_, d)| d > 0.0)?;
    pts[start..].iter().find(|&&(_, d)| d <= 0.0).map(|&(lp, _)| lp)
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ComparisonReport> {
    spec.validate()?;
    let grids = &spec.grids;
    let mut boundaries = Vec::new();
    for scenario in spec.scenarios()? {
        let tag = scenario.tag();
        if spec.mode.analytic() {
            let region = scenario.region(&grids.a);
            boundaries.push(TaggedBoundary {
                tag: tag.clone(),
                scenario,
                boundary: extract_boundary(&scenario.params, &region, &grids.lambda_p, grids.bisect_tol),
                bracketed: None,
            });
        }
        if spec.mode.simulated() {
            let experiment = name_id(&format!("{}/{}", spec.name, tag));
            let (boundary, bracketed) = simulated_boundary(
                &scenario,
                &grids.lambda_p,
                &spec.sim,
                grids.sim_bisect_steps,
                experiment,
            )?;
            boundaries.push(TaggedBoundary {
                tag,
                scenario,
                boundary,
                bracketed: Some(bracketed),
            });
        }
    }

    let max_gap = (spec.mode == Mode::Compare).then(|| {
        boundaries
            .iter()
            .filter(|b| b.boundary.source == Source::Simulated)
            .filter_map(|sim| {
                let an = boundaries
                    .iter()
                    .find(|b| b.tag == sim.tag && b.boundary.source == Source::Analytic)?;
                Some(boundary_gap(&an.boundary, &sim.boundary))
            })
            .fold(0.0, f64::max)
    });

    let mut crossovers = Vec::new();
    for source in [Source::Analytic, Source::Simulated] {
        let of = |label| {
            boundaries
                .iter()
                .filter(move |b| b.boundary.source == source && b.boundary.label == label)
        };
        for u in of(RegionLabel::Union) {
            let same = |b: &&TaggedBoundary| b.scenario.params == u.scenario.params;
            if let Some(nc) = of(RegionLabel::NonCooperative).find(same) {
                let params = u.scenario.params;
                crossovers.push(CrossoverReport {
                    params,
                    source,
                    measured: measure_crossover(&u.boundary, &nc.boundary),
                    predicted: crossover_lambda_p(&params)
                        .ok()
                        .map(|c| c.lambda_p(params.lambda_es)),
                });
            }
        }
    }

    Ok(ComparisonReport {
        name: spec.name.clone(),
        seed: spec.sim.seed,
        boundaries,
        max_gap,
        crossovers,
    })
}

fn builtin(name: &str, harvest: &[(f64, f64)], policies: Vec<PolicySpec>) -> ExperimentSpec {
    let (lep, les) = harvest[0];
    ExperimentSpec {
        name: name.to_string(),
        params: SystemParams::baseline(lep, les).expect("builtin parameters are valid"),
        harvest_variants: if harvest.len() > 1 { harvest.to_vec() } else { Vec::new() },
        policies,
        mode: Mode::AnalyticOnly,
        grids: Grids::default(),
        sim: SimConfig::default(),
    }
}

/// Names of the built-in experiments, in order.
pub const BUILTIN_NAMES: [&str; 9] = [
    "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10",
];

/// The reference scenarios. All use the baseline channels; the `a` values
/// of fig2/fig3 and the harvesting pair of fig8 are chosen defaults.
pub fn builtin_experiments() -> Vec<ExperimentSpec> {
    let a_list = [0.1, 0.5, 0.9];
    let coop = || vec![PolicySpec::cooperative(0.5).unwrap()];
    let with_noncoop = || vec![PolicySpec::cooperative(0.5).unwrap(), PolicySpec::non_cooperative()];
    vec![
        builtin(
            "fig2",
            &[(0.6, 0.6)],
            a_list.iter().map(|&a| PolicySpec::dominant_i(a).unwrap()).collect(),
        ),
        builtin(
            "fig3",
            &[(0.6, 0.6)],
            a_list.iter().map(|&a| PolicySpec::dominant_ii(a).unwrap()).collect(),
        ),
        builtin("fig4", &[(0.6, 0.6)], coop()),
        builtin("fig5", &[(1.0, 0.5), (1.0, 1.0)], coop()),
        builtin("fig6", &[(0.6, 1.0), (1.0, 1.0)], coop()),
        builtin("fig7", &[(0.6, 0.6), (1.0, 1.0)], coop()),
        builtin("fig8", &[(0.3, 0.3), (1.0, 1.0)], coop()),
        builtin("fig9", &[(0.5, 0.8)], with_noncoop()),
        builtin("fig10", &[(0.5, 0.6)], with_noncoop()),
    ]
}

pub fn builtin_experiment(name: &str) -> Result<ExperimentSpec> {
    builtin_experiments()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownExperiment {
            name: name.to_string(),
            valid: BUILTIN_NAMES.iter().map(|s| s.to_string()).collect(),
        })
}

/// A computed scalar next to its published reference value.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceCheck {
    pub quantity: String,
    pub computed: f64,
    pub reference: f64,
}

impl ReferenceCheck {
    pub fn abs_diff(&self) -> f64 {
        (self.computed - self.reference).abs()
    }
}

/// Grid `lambda_p` from which two boundaries agree (within `tol`) for the
/// rest of the grid, provided they differ somewhere before it.
pub fn coincidence_point(a: &RegionBoundary, b: &RegionBoundary, tol: f64) -> Option<f64> {
    let n = a.len().min(b.len());
    let differs = |i: usize| (a.lambda_s_max[i] - b.lambda_s_max[i]).abs() >= tol;
    let last_diff = (0..n).rev().find(|&i| differs(i))?;
    (last_diff + 1 < n).then(|| a.lambda_p_grid[last_diff + 1])
}

/// Scalars with published reference values for the builtin experiments.
pub fn reference_checks(spec: &ExperimentSpec, report: &ComparisonReport) -> Vec<ReferenceCheck> {
    let check = |q: &str, computed, reference| ReferenceCheck {
        quantity: q.to_string(),
        computed,
        reference,
    };
    let analytic = |tag: String| report.find(&tag, Source::Analytic).map(|b| &b.boundary);
    let union_tag = |lep: f64, les: f64| format!("union_lep{lep:.2}_les{les:.2}");
    let mu_p = analytic::pu_service_rate(&spec.params);
    let mut out = Vec::new();
    match spec.name.as_str() {
        "fig2" => {
            out.push(check("PU cutoff mu_p", mu_p, 0.34));
            if let Some(onset) = clamp_onset(&spec.params) {
                out.push(check("SU battery saturation onset lambda_p", onset, 0.25));
            }
        }
        "fig3" | "fig4" => out.push(check("PU cutoff mu_p", mu_p, 0.34)),
        "fig5" => {
            if let (Some(half), Some(full)) = (analytic(union_tag(1.0, 0.5)), analytic(union_tag(1.0, 1.0))) {
                if let Some(p) = coincidence_point(half, full, 2.0 * spec.grids.bisect_tol) {
                    out.push(check("boundary coincidence lambda_p", p, 0.29));
                }
                out.push(check("SU max throughput (lambda_es = 0.5)", half.lambda_s_max[0], 0.35));
            }
        }
        "fig6" => {
            out.push(check("PU cutoff mu_p", mu_p, 0.34));
            if let Some(cut) = analytic(union_tag(0.6, 1.0)).and_then(|b| b.pu_cutoff()) {
                out.push(check("first grid lambda_p with empty region", cut, 0.34));
            }
        }
        "fig9" | "fig10" => {
            let reference = if spec.name == "fig9" { 0.075 } else { 0.15 };
            for c in report.crossovers.iter().filter(|c| c.source == Source::Analytic) {
                if let Some(p) = c.predicted {
                    out.push(check("crossover Lambda_p (closed form)", p, reference));
                }
                if let Some(m) = c.measured {
                    out.push(check("crossover Lambda_p (boundaries)", m, reference));
                }
            }
        }
        _ => {}
    }
    out
}
