//! Parameter sweeps over SINR targets, planning modes and bases.

use std::collections::HashMap;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::channel::{AntennaModel, ChannelParams};
use crate::gainmap::region_lattice;
use crate::geometry::Vec3;
use crate::planner::{build_basis_sinr_map, plan, MissionSpec, PlanError, PlanMode, PlanningBasis};
use crate::scene::Scene;
use crate::sinrmap::SinrMap;

pub const SWEEP_HEADER: [&str; 7] = [
    "gamma_t_db",
    "mode",
    "basis",
    "feasible",
    "length_m",
    "outage_fraction",
    "runtime_s",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub start: Vec3,
    pub goal: Vec3,
    pub speed_mps: f64,
    pub delta: f64,
    pub epsilon_db: f64,
    pub gammas_db: Vec<f64>,
    pub modes: Vec<PlanMode>,
    pub bases: Vec<PlanningBasis>,
    /// Record wall-clock planning time; when off the column is zero and the
    /// output depends only on the inputs.
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub gamma_t_db: f64,
    pub mode: String,
    pub basis: String,
    pub feasible: bool,
    pub length_m: Option<f64>,
    pub outage_fraction: Option<f64>,
    pub runtime_s: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

/// Formats like C's `%g` with six significant digits.
pub fn format_sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mant), sign, exp.abs())
    } else {
        trim_zeros(&format!("{:.*}", (5 - exp) as usize, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

impl SweepResult {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), EvalError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(SWEEP_HEADER)?;
        for r in &self.rows {
            let opt = |v: Option<f64>| v.map(format_sig6).unwrap_or_default();
            w.write_record([
                format_sig6(r.gamma_t_db),
                r.mode.clone(),
                r.basis.clone(),
                r.feasible.to_string(),
                opt(r.length_m),
                opt(r.outage_fraction),
                format_sig6(r.runtime_s),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String, EvalError> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
    }
}

/// Builds every needed SINR map once, then plans each
/// `(gamma, mode, basis)` combination and scores it on the actual map.
/// Missions without a path become infeasible rows; any other planning
/// error aborts the sweep.
pub fn sweep(
    scene: &Scene,
    params: &ChannelParams,
    antenna: &AntennaModel,
    spec: &SweepSpec,
) -> Result<SweepResult, EvalError> {
    let lattice = region_lattice(&scene.region, spec.delta)?;
    let build = |b| build_basis_sinr_map(scene, params, antenna, &lattice, spec.epsilon_db, b);
    let actual = build(PlanningBasis::Actual)?;
    let mut maps: HashMap<String, SinrMap> = HashMap::new();
    for b in &spec.bases {
        if b.label() != "actual" && !maps.contains_key(&b.label()) {
            maps.insert(b.label(), build(*b)?);
        }
    }

    let mut gammas = spec.gammas_db.clone();
    gammas.sort_by(f64::total_cmp);
    let jobs: Vec<(f64, PlanMode, PlanningBasis)> = gammas
        .iter()
        .flat_map(|&g| {
            spec.modes
                .iter()
                .flat_map(move |&m| spec.bases.iter().map(move |&b| (g, m, b)))
        })
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(gamma_t_db, mode, basis)| {
            let planning = maps.get(&basis.label()).unwrap_or(&actual);
            let mission = MissionSpec {
                start: spec.start,
                goal: spec.goal,
                speed_mps: spec.speed_mps,
                gamma_t_db,
                mode,
                basis,
            };
            let t0 = Instant::now();
            let result = plan(&mission, &actual, planning);
            let runtime_s = if spec.timing {
                t0.elapsed().as_secs_f64()
            } else {
                0.0
            };
            let path = match result {
                Ok(p) => Some(p),
                Err(PlanError::NoPath(_)) => None,
                Err(e) => return Err(e.into()),
            };
            Ok(SweepRow {
                gamma_t_db,
                mode: mode.label(),
                basis: basis.label(),
                feasible: path.is_some(),
                length_m: path.as_ref().map(|p| p.length_m),
                outage_fraction: path.as_ref().map(|p| p.outage_fraction()),
                runtime_s,
            })
        })
        .collect::<Result<_, EvalError>>()?;
    Ok(SweepResult { rows })
}
