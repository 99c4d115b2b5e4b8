//! Dominant-strategy maps from steady-state AME solutions.

use std::io::Write;

use multidiff_core::ame::{init_ame, AmeSystem};
use multidiff_core::games::{CoordinationParams, UtilityParams};
use multidiff_core::net::{truncated_poisson, DEFAULT_COVERAGE};
use multidiff_core::trajectory::csv_with_header;
use multidiff_core::{Model, Strategy};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::svg::HeatGrid;

/// Parameter on the horizontal axis; the vertical axis is always `z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeatAxis {
    /// `a / b` of the coordination game, with `b`, `c`, `delta` fixed.
    Ratio,
    /// `beta` of the utility model.
    Beta,
}

impl HeatAxis {
    pub fn name(self) -> &'static str {
        match self {
            HeatAxis::Ratio => "a_over_b",
            HeatAxis::Beta => "beta",
        }
    }

    fn model_at(self, base: &Model, x: f64) -> CliResult<std::result::Result<Model, String>> {
        match (self, base) {
            (HeatAxis::Ratio, Model::Coordination(p)) => Ok(CoordinationParams::new(x * p.b, p.b, p.c, p.delta)
                .map(Model::Coordination)
                .map_err(|e| e.to_string())),
            (HeatAxis::Beta, Model::Utility(p)) => {
                Ok(UtilityParams::new(p.alpha_a, p.alpha_b, p.gamma, x).map(Model::Utility).map_err(|e| e.to_string()))
            }
            _ => Err(CliError::Usage(format!("axis {} does not apply to the {} model", self.name(), base.name()))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct HeatmapSpec {
    pub axis: HeatAxis,
    pub xs: Vec<f64>,
    pub zs: Vec<f64>,
    pub model: Model,
    pub seeds: [f64; 4],
    pub horizon: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CellStatus {
    Ok,
    /// The cell's parameters violate the model assumptions.
    Invalid(String),
    /// The solver failed.
    Error(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub x: f64,
    pub z: f64,
    pub shares: Option<[f64; 4]>,
    pub status: CellStatus,
}

/// Strategy held by more than half of the players, if any.
pub fn classify(shares: &[f64; 4]) -> Option<Strategy> {
    Strategy::ALL.into_iter().find(|s| shares[s.index()] > 0.5)
}

impl Cell {
    pub fn dominant(&self) -> Option<Strategy> {
        self.shares.as_ref().and_then(classify)
    }

    /// `1 - rho00(T)`.
    pub fn activity(&self) -> Option<f64> {
        self.shares.map(|s| 1.0 - s[0])
    }

    pub fn label(&self) -> String {
        match &self.status {
            CellStatus::Ok => self.dominant().map_or("none".to_string(), |s| s.label().to_string()),
            CellStatus::Invalid(_) => "invalid".into(),
            CellStatus::Error(_) => "error".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DominantMap {
    pub axis: HeatAxis,
    pub xs: Vec<f64>,
    pub zs: Vec<f64>,
    /// Row-major: all `xs` for the first `z`, then the next `z`.
    pub cells: Vec<Cell>,
}

impl DominantMap {
    pub fn at(&self, ix: usize, iz: usize) -> &Cell {
        &self.cells[iz * self.xs.len() + ix]
    }

    pub fn errors(&self) -> usize {
        self.cells.iter().filter(|c| matches!(c.status, CellStatus::Error(_))).count()
    }

    /// `<axis>,z,dominant,activity,rho00,rho01,rho10,rho11,status`.
    pub fn write_csv<W: Write>(&self, out: W, header: &[String]) -> CliResult<()> {
        let mut w = csv_with_header(out, header)?;
        w.write_record([self.axis.name(), "z", "dominant", "activity", "rho00", "rho01", "rho10", "rho11", "status"])
            .map_err(multidiff_core::Error::from)?;
        for c in &self.cells {
            let mut row = vec![c.x.to_string(), c.z.to_string(), c.label()];
            match c.shares {
                Some(s) => {
                    row.push((1.0 - s[0]).to_string());
                    row.extend(s.iter().map(f64::to_string));
                }
                None => row.extend(std::iter::repeat_n(String::new(), 5)),
            }
            row.push(match &c.status {
                CellStatus::Ok => "ok".into(),
                CellStatus::Invalid(m) | CellStatus::Error(m) => m.clone(),
            });
            w.write_record(&row).map_err(multidiff_core::Error::from)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn grid(&self, title: &str) -> HeatGrid {
        HeatGrid {
            title: title.to_string(),
            xlabel: self.axis.name().replace('_', " "),
            ylabel: "z".into(),
            xs: self.xs.clone(),
            ys: self.zs.clone(),
            values: self.cells.iter().map(|c| c.activity().unwrap_or(f64::NAN)).collect(),
            labels: self.cells.iter().map(|c| if c.shares.is_some() { c.label() } else { String::new() }).collect(),
        }
    }
}

/// Solves the AME on a Poisson degree distribution for every grid cell.
pub fn heatmap_dominant(spec: &HeatmapSpec) -> CliResult<DominantMap> {
    if spec.xs.is_empty() || spec.zs.is_empty() {
        return Err(CliError::Usage("heatmap grid must not be empty".into()));
    }
    if spec.horizon.is_nan() || spec.horizon <= 0.0 {
        return Err(CliError::Usage(format!("horizon must be positive (got {})", spec.horizon)));
    }
    let mut jobs = Vec::with_capacity(spec.xs.len() * spec.zs.len());
    for &z in &spec.zs {
        for &x in &spec.xs {
            jobs.push((x, z, spec.axis.model_at(&spec.model, x)?));
        }
    }
    let cells = jobs
        .into_par_iter()
        .map(|(x, z, model)| {
            let model = match model {
                Ok(m) => m,
                Err(msg) => return Cell { x, z, shares: None, status: CellStatus::Invalid(msg) },
            };
            let solved = truncated_poisson(z, DEFAULT_COVERAGE).and_then(|dd| {
                let init = init_ame(&dd, spec.seeds)?;
                AmeSystem::new(&dd, model).solve(&init, spec.horizon, &[spec.horizon])
            });
            match solved {
                Ok(tr) => Cell { x, z, shares: tr.last().copied(), status: CellStatus::Ok },
                Err(e) => Cell { x, z, shares: None, status: CellStatus::Error(e.to_string()) },
            }
        })
        .collect();
    Ok(DominantMap { axis: spec.axis, xs: spec.xs.clone(), zs: spec.zs.clone(), cells })
}
