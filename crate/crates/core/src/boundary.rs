//! Region boundaries: the largest stable `lambda_s` at each `lambda_p`.

use std::fmt;

use crate::analytic::Region;
use crate::error::{Error, Result};
use crate::model::{RatePoint, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionLabel {
    R1,
    R2,
    Union,
    NonCooperative,
}

impl RegionLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionLabel::R1 => "r1",
            RegionLabel::R2 => "r2",
            RegionLabel::Union => "union",
            RegionLabel::NonCooperative => "noncoop",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "r1" => Some(RegionLabel::R1),
            "r2" => Some(RegionLabel::R2),
            "union" => Some(RegionLabel::Union),
            "noncoop" => Some(RegionLabel::NonCooperative),
            _ => None,
        }
    }
}

impl From<&Region> for RegionLabel {
    fn from(r: &Region) -> Self {
        match r {
            Region::R1 { .. } => RegionLabel::R1,
            Region::R2 { .. } => RegionLabel::R2,
            Region::Union { .. } => RegionLabel::Union,
            Region::NonCooperative => RegionLabel::NonCooperative,
        }
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    Analytic,
    Simulated,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Analytic => "analytic",
            Source::Simulated => "simulated",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "analytic" => Some(Source::Analytic),
            "simulated" => Some(Source::Simulated),
            _ => None,
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionBoundary {
    pub label: RegionLabel,
    pub source: Source,
    /// Strictly increasing.
    pub lambda_p_grid: Vec<f64>,
    /// Supremum of stable `lambda_s` at each grid point, 0 if none.
    pub lambda_s_max: Vec<f64>,
    /// Simulated points the stability detector could not resolve.
    pub uncertain: Vec<bool>,
}

impl RegionBoundary {
    pub fn new(
        label: RegionLabel,
        source: Source,
        lambda_p_grid: Vec<f64>,
        lambda_s_max: Vec<f64>,
        uncertain: Vec<bool>,
    ) -> Result<Self> {
        if lambda_s_max.len() != lambda_p_grid.len() || uncertain.len() != lambda_p_grid.len() {
            return Err(Error::Config("boundary columns differ in length".into()));
        }
        check_grid(&lambda_p_grid)?;
        if let Some(v) = lambda_s_max.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::OutOfRange {
                field: "lambda_s_max",
                value: *v,
            });
        }
        Ok(RegionBoundary {
            label,
            source,
            lambda_p_grid,
            lambda_s_max,
            uncertain,
        })
    }

    pub fn len(&self) -> usize {
        self.lambda_p_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda_p_grid.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.lambda_p_grid
            .iter()
            .copied()
            .zip(self.lambda_s_max.iter().copied())
    }

    /// First grid `lambda_p` at which the boundary is zero, i.e. the PU axis
    /// cutoff.
    pub fn pu_cutoff(&self) -> Option<f64> {
        self.points().find(|&(_, s)| s == 0.0).map(|(p, _)| p)
    }
}

/// Checks a `lambda_p` grid is strictly increasing and within `[0, 1]`.
pub fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::Config("grid values must lie in [0, 1]".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("grid must be strictly increasing".into()));
    }
    Ok(())
}

/// `0, step, 2*step, ...` up to and including `max`.
pub fn linear_grid(max: f64, step: f64) -> Vec<f64> {
    assert!(step > 0.0, "grid step must be positive");
    let n = (max / step + 1e-9).floor() as u32;
    (0..=n).map(|i| f64::from(i) * step).collect()
}

/// Bisects for the supremum of `lambda_s` with `contains(lambda_p, lambda_s)`
/// at each grid point. `contains` must be monotone (downward closed) in
/// `lambda_s`. The result is within `tol` below the true supremum, and 0
/// when even `lambda_s = tol` is outside.
pub fn extract_boundary_with<F>(
    contains: F,
    label: RegionLabel,
    lambda_p_grid: &[f64],
    tol: f64,
) -> RegionBoundary
where
    F: Fn(RatePoint) -> bool,
{
    assert!(tol > 0.0, "bisection tolerance must be positive");
    let lambda_s_max = lambda_p_grid
        .iter()
        .map(|&lp| {
            let inside = |ls| contains(RatePoint::at(lp, ls));
            if !inside(tol) {
                return 0.0;
            }
            if inside(1.0) {
                return 1.0;
            }
            let (mut lo, mut hi) = (tol, 1.0);
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                if inside(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        })
        .collect();
    RegionBoundary {
        label,
        source: Source::Analytic,
        lambda_p_grid: lambda_p_grid.to_vec(),
        lambda_s_max,
        uncertain: vec![false; lambda_p_grid.len()],
    }
}

pub fn extract_boundary(
    params: &SystemParams,
    region: &Region,
    lambda_p_grid: &[f64],
    tol: f64,
) -> RegionBoundary {
    extract_boundary_with(
        |pt| region.contains(params, pt),
        RegionLabel::from(region),
        lambda_p_grid,
        tol,
    )
}
