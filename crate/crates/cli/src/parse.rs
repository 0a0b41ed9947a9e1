//! Flag value parsers.

use skyroute::{PlanMode, PlanningBasis, Vec3};

pub fn vec3(s: &str) -> Result<Vec3, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| format!("{s:?}: {e}"))?;
    match parts[..] {
        [x, y, z] => Ok(Vec3::new(x, y, z)),
        _ => Err(format!("{s:?}: expected x,y,z")),
    }
}

/// `auto` or a number in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Epsilon {
    Auto,
    Db(f64),
}

pub fn epsilon(s: &str) -> Result<Epsilon, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(Epsilon::Auto);
    }
    s.parse::<f64>()
        .map(Epsilon::Db)
        .map_err(|e| format!("{s:?}: {e}"))
}

/// `actual`, `worst-case-load[:L]`, `zero-load`, `all-los`, `all-nlos`.
pub fn basis(s: &str) -> Result<PlanningBasis, String> {
    let (name, arg) = s.split_once(':').map_or((s, None), |(a, b)| (a, Some(b)));
    let b = match (name.replace('_', "-").as_str(), arg) {
        ("actual", None) => PlanningBasis::Actual,
        ("worst-case-load", a) => PlanningBasis::WorstCaseLoad {
            l_max: a
                .map_or(Ok(1.0), str::parse)
                .map_err(|e| format!("{s:?}: {e}"))?,
        },
        ("zero-load", None) => PlanningBasis::ZeroLoad,
        ("all-los", None) => PlanningBasis::AllLos,
        ("all-nlos", None) => PlanningBasis::AllNlos,
        _ => return Err(format!("unknown basis {s:?}")),
    };
    Ok(b)
}

/// `optimal`, `quantized[:KXY[:KZ]]`, `outage-tolerant[:OT]`.
pub fn mode(s: &str) -> Result<PlanMode, String> {
    let mut it = s.split(':');
    let name = it.next().unwrap_or_default().replace('_', "-");
    let nums: Vec<f64> = it
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|e| format!("{s:?}: {e}"))?;
    let m = match (name.as_str(), nums.as_slice()) {
        ("optimal", []) => PlanMode::Optimal,
        ("quantized", n) if n.len() <= 2 => PlanMode::Quantized {
            kappa_xy: n.first().copied().unwrap_or(3.0) as usize,
            kappa_z: n.get(1).copied().unwrap_or(1.0) as usize,
        },
        ("outage-tolerant", n) if n.len() <= 1 => PlanMode::OutageTolerant {
            max_outage_m: n.first().copied().unwrap_or(50.0),
            bridge_radius: None,
        },
        _ => return Err(format!("unknown mode {s:?}")),
    };
    Ok(m)
}

pub fn list<T>(s: &str, item: fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    s.split(',')
        .filter(|p| !p.is_empty())
        .map(|p| item(p.trim()))
        .collect()
}
