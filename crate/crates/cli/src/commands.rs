use std::fs;
use std::io::Write;
use std::path::{Path as FsPath, PathBuf};

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use skyroute::channel::{noise_power_dbm, per_rb_power_dbm};
use skyroute::eval::SweepSpec;
use skyroute::gainmap::build_gain_maps;
use skyroute::planner::PlanError;
use skyroute::rgm;
use skyroute::scene::{LoadMode, REFERENCE_LOADS};
use skyroute::{
    build_feasible_map, build_sinr_map, generate_scene, region_lattice, AntennaModel,
    ChannelParams, MissionSpec, PlanningBasis, Region, Scene, SceneConfig, SinrMap,
};

use crate::parse::{self, Epsilon};
use crate::{
    AntennaKind, BuildMapsArgs, ChannelArgs, GenSceneArgs, InspectArgs, PlanArgs, SweepArgs,
    EXIT_NO_PATH,
};

fn write_json(path: &FsPath, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read(path: &FsPath) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn load_scene(path: &FsPath) -> Result<Scene> {
    let text = String::from_utf8(read(path)?).context("scene file is not UTF-8")?;
    Scene::from_json(&text).with_context(|| format!("parsing scene {}", path.display()))
}

fn load_sinr(path: &FsPath) -> Result<(SinrMap, Option<Value>)> {
    let bytes = read(path)?;
    let map = rgm::parse_sinr_map(&bytes).with_context(|| format!("parsing {}", path.display()))?;
    Ok((map, rgm::read_config(&bytes)?))
}

pub fn gen_scene(a: &GenSceneArgs) -> Result<u8> {
    let size: Vec<f64> = a
        .obstacle_size
        .split(',')
        .map(|s| s.trim().parse())
        .collect::<Result<_, _>>()
        .context("--obstacle-size expects lo,hi")?;
    let [lo, hi] = size[..] else {
        bail!("--obstacle-size expects lo,hi");
    };
    let load_mode = match a.loads.as_deref() {
        None if a.m == REFERENCE_LOADS.len() => LoadMode::Explicit(REFERENCE_LOADS.to_vec()),
        None | Some("random") => LoadMode::UniformRandom,
        Some("reference") => LoadMode::Explicit(REFERENCE_LOADS.to_vec()),
        Some(list) => LoadMode::Explicit(
            list.split(',')
                .map(|s| s.trim().parse())
                .collect::<Result<_, _>>()
                .context("--loads expects numbers, `random` or `reference`")?,
        ),
    };
    let cfg = SceneConfig {
        n_gbs: a.m,
        n_obstacles: a.obstacles,
        region: Region {
            edge_length: a.edge,
            h_min: a.h_min,
            h_max: a.h_max,
            h_gbs: a.h_gbs,
        },
        obstacle_size_range: (lo, hi),
        obstacle_height_mean: a.obstacle_height,
        load_mode,
    };
    let scene = generate_scene(&cfg, a.seed)?;
    let mut doc: Value = serde_json::from_str(&scene.to_json()?)?;
    doc["config"] = json!({
        "command": "gen-scene",
        "m": a.m,
        "obstacles": a.obstacles,
        "obstacle_size_m": [lo, hi],
        "obstacle_height_mean_m": a.obstacle_height,
        "loads": match &cfg.load_mode {
            LoadMode::Explicit(l) => json!(l),
            LoadMode::UniformRandom => json!("random"),
        },
        "seed": a.seed,
    });
    write_json(&a.out, &doc)?;
    log::info!(
        "scene with {} GBSs and {} obstacles written to {}",
        scene.gbs.len(),
        scene.obstacles.len(),
        a.out.display()
    );
    Ok(0)
}

struct Channel {
    params: ChannelParams,
    antenna: AntennaModel,
    epsilon_db: f64,
}

impl ChannelArgs {
    fn resolve(&self) -> Result<Channel> {
        let params = ChannelParams {
            carrier_freq_ghz: self.carrier_ghz,
            tx_power_dbm: per_rb_power_dbm(self.total_power_dbm, self.n_rb),
            noise_power_dbm: noise_power_dbm(
                self.noise_psd_dbm_hz,
                self.rb_bandwidth_hz,
                self.noise_figure_db,
            ),
        };
        params.validate()?;
        let epsilon_db = match self.epsilon {
            Epsilon::Auto => {
                let e = params.noise_floor_gain_db();
                log::info!(
                    "epsilon set to (sigma^2 - P) / 2 = ({:.4} - {:.4}) / 2 = {e:.4} dB",
                    params.noise_power_dbm,
                    params.tx_power_dbm
                );
                e
            }
            Epsilon::Db(e) => e,
        };
        let antenna = match self.antenna {
            AntennaKind::Isotropic => AntennaModel::Isotropic,
            AntennaKind::Ula => AntennaModel::downtilted_ula(),
        };
        Ok(Channel {
            params,
            antenna,
            epsilon_db,
        })
    }
}

impl Channel {
    fn echo(&self, delta: f64) -> Value {
        json!({
            "delta_m": delta,
            "epsilon_db": self.epsilon_db,
            "antenna": self.antenna,
            "carrier_freq_ghz": self.params.carrier_freq_ghz,
            "tx_power_dbm": self.params.tx_power_dbm,
            "noise_power_dbm": self.params.noise_power_dbm,
        })
    }
}

pub fn build_maps(a: &BuildMapsArgs) -> Result<u8> {
    let scene = load_scene(&a.scene)?;
    let ch = a.channel.resolve()?;
    let lattice = region_lattice(&scene.region, a.channel.delta)?;
    let config = json!({
        "command": "build-maps",
        "scene": a.scene,
        "scene_seed": scene.seed,
        "channel": ch.echo(a.channel.delta),
        "basis": a.basis,
    });
    let gains = build_gain_maps(
        &scene,
        &ch.params,
        &ch.antenna,
        &lattice,
        ch.epsilon_db,
        a.basis.gain_override(),
    )?;
    let loads = a.basis.loads(&scene.loads());
    let sinr = build_sinr_map(&gains, &loads, &ch.params, &lattice)?;

    fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    for g in &gains {
        let path = a.out_dir.join(format!("gain_{}.json", g.gbs_id));
        let bytes = rgm::serialize_gain_map(g, Some(config.clone()))?;
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        log::info!(
            "GBS {}: {} of {} cells stored, box {:?}",
            g.gbs_id,
            g.non_void_count(),
            lattice.len(),
            g.lattice.dims
        );
    }
    let path = a.out_dir.join("sinr.json");
    fs::write(&path, rgm::serialize_sinr_map(&sinr, Some(config))?)
        .with_context(|| format!("writing {}", path.display()))?;
    log::info!(
        "SINR map {:?}: {:.3} to {:.3} dB",
        lattice.dims,
        sinr.min_finite_db().unwrap_or(f64::NAN),
        sinr.max_db().unwrap_or(f64::NAN)
    );
    Ok(0)
}

pub fn plan(a: &PlanArgs) -> Result<u8> {
    let (planning, config) = load_sinr(&a.sinr)?;
    let actual_path: PathBuf = a.actual.clone().unwrap_or_else(|| a.sinr.clone());
    let actual = if a.actual.is_some() {
        load_sinr(&actual_path)?.0
    } else {
        planning.clone()
    };
    let basis = config
        .as_ref()
        .and_then(|c| c.get("basis"))
        .map(|b| serde_json::from_value::<PlanningBasis>(b.clone()))
        .transpose()
        .context("planning map has an unreadable basis")?
        .unwrap_or(PlanningBasis::Actual);
    let mission = MissionSpec {
        start: a.start,
        goal: a.goal,
        speed_mps: a.speed,
        gamma_t_db: a.gamma_db,
        mode: a.plan_mode(),
        basis,
    };
    let mut doc = json!({
        "config": {
            "command": "plan",
            "sinr": a.sinr,
            "actual": actual_path,
            "planning_map": config,
        },
        "mission": mission,
        "mode": mission.mode.label(),
        "planning_basis": basis.label(),
    });
    let code = match skyroute::plan(&mission, &actual, &planning) {
        Ok(p) => {
            doc["feasible"] = json!(true);
            doc["waypoints"] = json!(p.waypoints);
            doc["n_waypoints"] = json!(p.n_waypoints);
            doc["length_m"] = json!(p.length_m);
            doc["duration_s"] = json!(p.duration_s);
            doc["outage_m"] = json!(p.outage_m);
            doc["outage_fraction"] = json!(p.outage_fraction());
            doc["outside_m"] = json!(p.outside_m);
            log::info!(
                "path of {:.3} m through {} waypoints, outage {:.3} m",
                p.length_m,
                p.n_waypoints,
                p.outage_m
            );
            0
        }
        Err(PlanError::NoPath(reason)) => {
            doc["feasible"] = json!(false);
            doc["no_path"] = json!(reason);
            eprintln!(
                "no path: start feasible {}, goal feasible {}, connected {}",
                reason.start_feasible, reason.goal_feasible, reason.connected
            );
            EXIT_NO_PATH
        }
        Err(e) => return Err(e.into()),
    };
    write_json(&a.out, &doc)?;
    Ok(code)
}

fn gamma_range(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !from.is_finite() || !to.is_finite() || step.is_nan() || step <= 0.0 || to < from {
        bail!("need --gamma-from <= --gamma-to and a positive --gamma-step");
    }
    let n = ((to - from) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| from + i as f64 * step).collect())
}

pub fn sweep(a: &SweepArgs) -> Result<u8> {
    let scene = load_scene(&a.scene)?;
    let ch = a.channel.resolve()?;
    let spec = SweepSpec {
        start: a.start,
        goal: a.goal,
        speed_mps: a.speed,
        delta: a.channel.delta,
        epsilon_db: ch.epsilon_db,
        gammas_db: gamma_range(a.gamma_from, a.gamma_to, a.gamma_step)?,
        modes: parse::list(&a.modes, parse::mode).map_err(anyhow::Error::msg)?,
        bases: parse::list(&a.bases, parse::basis).map_err(anyhow::Error::msg)?,
        timing: a.timing,
    };
    let result = skyroute::eval::sweep(&scene, &ch.params, &ch.antenna, &spec)?;
    let file = fs::File::create(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    result.write_csv(std::io::BufWriter::new(file))?;
    let mut sidecar = a.out.clone().into_os_string();
    sidecar.push(".config.json");
    write_json(
        FsPath::new(&sidecar),
        &json!({
            "command": "sweep",
            "scene": a.scene,
            "scene_seed": scene.seed,
            "channel": ch.echo(a.channel.delta),
            "sweep": spec,
        }),
    )?;
    log::info!(
        "{} rows ({} feasible) written to {}",
        result.rows.len(),
        result.rows.iter().filter(|r| r.feasible).count(),
        a.out.display()
    );
    Ok(0)
}

pub fn inspect(a: &InspectArgs) -> Result<u8> {
    let bytes = read(&a.map)?;
    let kind = rgm::read_kind(&bytes)?;
    let report = match kind.as_str() {
        "sinr" => {
            let m = rgm::parse_sinr_map(&bytes)?;
            let (lo, hi) = (m.min_finite_db(), m.max_db());
            let gammas: Vec<f64> = match &a.gamma_db {
                Some(list) => list
                    .split(',')
                    .map(|s| s.trim().parse())
                    .collect::<Result<_, _>>()
                    .context("--gamma-db expects numbers")?,
                None => match (lo, hi) {
                    (Some(lo), Some(hi)) => {
                        (0..5).map(|i| lo + (hi - lo) * i as f64 / 4.0).collect()
                    }
                    _ => Vec::new(),
                },
            };
            let counts: Vec<Value> = gammas
                .iter()
                .map(|&g| json!({"gamma_t_db": g, "feasible_cells": build_feasible_map(&m, g).count()}))
                .collect();
            json!({
                "kind": kind,
                "dims": m.lattice.dims,
                "delta_m": m.lattice.delta,
                "cells": m.lattice.len(),
                "covered_cells": m.assoc.iter().filter(|a| a.is_some()).count(),
                "min_sinr_db": lo,
                "max_sinr_db": hi,
                "feasible": counts,
            })
        }
        "gain" => {
            let m = rgm::parse_gain_map(&bytes)?;
            json!({
                "kind": kind,
                "gbs_id": m.gbs_id,
                "dims": m.lattice.dims,
                "stored_cells": m.non_void_count(),
                "epsilon_db": m.epsilon_db,
                "max_gain_db": m.gains_db.iter().copied().filter(|g| g.is_finite()).reduce(f64::max),
            })
        }
        "feasible" => {
            let m = rgm::parse_feasible_map(&bytes)?;
            json!({"kind": kind, "dims": m.lattice.dims, "feasible_cells": m.count()})
        }
        "quantized_feasible" => {
            let m = rgm::parse_quantized_map(&bytes)?;
            json!({
                "kind": kind,
                "dims": m.dims,
                "kappa": [m.kappa_xy, m.kappa_z],
                "feasible_blocks": m.feasible.iter().filter(|f| **f).count(),
            })
        }
        other => bail!("unknown map kind {other:?}"),
    };
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{}", serde_json::to_string_pretty(&report)?) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(0),
    }
}
