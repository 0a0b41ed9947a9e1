mod common;

use skyroute::channel::{AntennaModel, GainOverride};
use skyroute::eval::{sweep, SweepSpec};
use skyroute::gainmap::build_gain_maps;
use skyroute::rgm;
use skyroute::{
    build_feasible_map, build_sinr_map, region_lattice, ChannelParams, PlanMode, PlanningBasis,
    Vec3,
};

use common::*;

fn spec(gammas: Vec<f64>) -> SweepSpec {
    SweepSpec {
        start: START.into(),
        goal: GOAL.into(),
        speed_mps: 10.0,
        delta: DELTA,
        epsilon_db: ChannelParams::reference().noise_floor_gain_db(),
        gammas_db: gammas,
        modes: vec![
            PlanMode::Optimal,
            PlanMode::Quantized {
                kappa_xy: 3,
                kappa_z: 1,
            },
        ],
        bases: vec![PlanningBasis::Actual, PlanningBasis::ZeroLoad],
        timing: false,
    }
}

#[test]
fn sweep_rows_and_determinism() {
    let scene = reference_scene(3);
    let params = ChannelParams::reference();
    let actual = basis_map(&scene, &AntennaModel::Isotropic, PlanningBasis::Actual);
    let lo = actual.min_finite_db().unwrap() - 1.0;
    let hi = actual.max_db().unwrap() + 1.0;
    let zero_hi = basis_map(&scene, &AntennaModel::Isotropic, PlanningBasis::ZeroLoad)
        .max_db()
        .unwrap()
        + 1.0;
    let mut gammas = linspace(lo, hi, 8);
    gammas.push(zero_hi);
    gammas.reverse();
    let s = spec(gammas);
    let a = sweep(&scene, &params, &AntennaModel::Isotropic, &s).unwrap();
    let b = sweep(&scene, &params, &AntennaModel::Isotropic, &s).unwrap();
    assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
    assert_eq!(a.rows.len(), 9 * 2 * 2);

    // sorted by target, then mode and basis in list order
    for w in a.rows.windows(2) {
        assert!(w[0].gamma_t_db <= w[1].gamma_t_db);
    }
    assert_eq!(a.rows[0].mode, "optimal");
    assert_eq!(a.rows[0].basis, "actual");
    assert_eq!(a.rows[1].basis, "zero_load");
    assert_eq!(a.rows[2].mode, "quantized(3,1)");

    // below the map minimum: unconstrained grid path, 59 face and 3 body diagonals
    let first = &a.rows[0];
    assert!(first.feasible);
    let free = canonical([0, 59, 3], DELTA);
    assert_eq!(first.length_m, Some(free));
    assert_eq!(first.outage_fraction, Some(0.0));

    // above every map maximum: no row is feasible
    assert!(a
        .rows
        .iter()
        .rev()
        .take(4)
        .all(|r| !r.feasible && r.length_m.is_none()));

    let optimal: Vec<_> = a
        .rows
        .iter()
        .filter(|r| r.mode == "optimal" && r.basis == "actual")
        .collect();
    let mut prev = 0.0;
    let mut lost = false;
    for r in optimal {
        match r.length_m {
            Some(l) => {
                assert!(!lost && l >= prev);
                prev = l;
                assert_eq!(r.outage_fraction, Some(0.0));
            }
            None => lost = true,
        }
    }
}

#[test]
fn worst_case_feasible_set_is_inside_actual() {
    let scene = reference_scene(8);
    let a = AntennaModel::Isotropic;
    let actual = basis_map(&scene, &a, PlanningBasis::Actual);
    let worst = basis_map(&scene, &a, PlanningBasis::WorstCaseLoad { l_max: 1.0 });
    let zero = basis_map(&scene, &a, PlanningBasis::ZeroLoad);
    for gamma in linspace(actual.min_finite_db().unwrap(), actual.max_db().unwrap(), 7) {
        let fa = build_feasible_map(&actual, gamma);
        let fw = build_feasible_map(&worst, gamma);
        let fz = build_feasible_map(&zero, gamma);
        for i in 0..fa.feasible.len() {
            assert!(!fw.feasible[i] || fa.feasible[i]);
            assert!(!fa.feasible[i] || fz.feasible[i]);
        }
    }
}

#[test]
fn forced_channel_models_bracket_the_actual_gains() {
    let scene = reference_scene(4);
    let params = ChannelParams::reference();
    let lat = region_lattice(&scene.region, DELTA).unwrap();
    let eps = params.noise_floor_gain_db();
    let a = AntennaModel::Isotropic;
    let auto = build_gain_maps(&scene, &params, &a, &lat, eps, GainOverride::Auto).unwrap();
    let los = build_gain_maps(&scene, &params, &a, &lat, eps, GainOverride::ForceLos).unwrap();
    let nlos = build_gain_maps(&scene, &params, &a, &lat, eps, GainOverride::ForceNlos).unwrap();
    for m in 0..auto.len() {
        for c in lat.iter_cells().step_by(37) {
            let u = lat.position(c);
            let g = |maps: &[skyroute::ChannelGainMap]| {
                maps[m].lookup_gain_db(u).unwrap_or(f64::NEG_INFINITY)
            };
            assert!(
                g(&nlos) <= g(&auto) && g(&auto) <= g(&los),
                "gbs {m} at {u:?}"
            );
        }
    }
}

#[test]
fn map_files_round_trip_on_a_real_scene() {
    let scene = reference_scene(2);
    let params = ChannelParams::reference();
    let lat = region_lattice(&scene.region, DELTA).unwrap();
    let maps = build_gain_maps(
        &scene,
        &params,
        &AntennaModel::downtilted_ula(),
        &lat,
        params.noise_floor_gain_db(),
        GainOverride::Auto,
    )
    .unwrap();
    let mut parsed = Vec::new();
    for m in &maps {
        let bytes = rgm::serialize_gain_map(m, Some(serde_json::json!({"seed": 2}))).unwrap();
        assert_eq!(rgm::read_kind(&bytes).unwrap(), "gain");
        let back = rgm::parse_gain_map(&bytes).unwrap();
        assert_eq!(&back, m);
        parsed.push(back);
    }
    let sinr = build_sinr_map(&parsed, &scene.loads(), &params, &lat).unwrap();
    let bytes = rgm::serialize_sinr_map(&sinr, None).unwrap();
    assert_eq!(rgm::parse_sinr_map(&bytes).unwrap(), sinr);
    assert!(sinr.value_at(Vec3::new(5.0, 5.0, 95.0)).is_some());
}
