//! "RGM v1" JSON container for gain, SINR and feasibility maps.
//!
//! Every document carries `format: "RGM"`, `version: 1`, a `kind`, the
//! lattice (`origin` of the first cell center in meters, `delta` in meters,
//! `dims` `[X, Y, Z]`) and flat arrays in x-fastest order,
//! `index = (k * Y + j) * X + i`. Infinite or absent values are `null`.
//! An optional `config` object echoes whatever produced the file.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::gainmap::{ChannelGainMap, MapError};
use crate::geometry::{Lattice, Vec3};
use crate::sinrmap::{FeasibleMap, QuantizedFeasibleMap, SinrMap};

pub const RGM_MAGIC: &str = "RGM";
pub const RGM_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    kind: String,
    origin: [f64; 3],
    delta: f64,
    dims: [usize; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    config: Option<Value>,
}

impl Header {
    fn new(kind: &str, lattice: &Lattice, config: Option<Value>) -> Self {
        Self {
            format: RGM_MAGIC.to_string(),
            version: RGM_VERSION,
            kind: kind.to_string(),
            origin: lattice.origin.to_array(),
            delta: lattice.delta,
            dims: lattice.dims,
            config,
        }
    }

    fn check(&self, kind: &str) -> Result<Lattice, MapError> {
        if self.format != RGM_MAGIC {
            return Err(MapError::Format(format!(
                "unknown format tag {:?}",
                self.format
            )));
        }
        if self.version != RGM_VERSION {
            return Err(MapError::Version(self.version));
        }
        if self.kind != kind {
            return Err(MapError::Format(format!(
                "expected kind {kind:?}, found {:?}",
                self.kind
            )));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(MapError::Format(format!("bad spacing {}", self.delta)));
        }
        Ok(Lattice::new(Vec3::from(self.origin), self.delta, self.dims))
    }
}

fn expect_len(what: &str, got: usize, lattice: &Lattice) -> Result<(), MapError> {
    if got != lattice.len() {
        return Err(MapError::Format(format!(
            "{what} has {got} entries, dims {:?} need {}",
            lattice.dims,
            lattice.len()
        )));
    }
    Ok(())
}

fn finite_or_null(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

#[derive(Serialize, Deserialize)]
struct GainDoc {
    #[serde(flatten)]
    header: Header,
    gbs_id: usize,
    epsilon_db: Option<f64>,
    gains: Vec<Option<f64>>,
}

pub fn serialize_gain_map(
    map: &ChannelGainMap,
    config: Option<Value>,
) -> Result<Vec<u8>, MapError> {
    let doc = GainDoc {
        header: Header::new("gain", &map.lattice, config),
        gbs_id: map.gbs_id,
        epsilon_db: finite_or_null(map.epsilon_db),
        gains: map.gains_db.iter().map(|&g| finite_or_null(g)).collect(),
    };
    Ok(serde_json::to_vec(&doc)?)
}

pub fn parse_gain_map(bytes: &[u8]) -> Result<ChannelGainMap, MapError> {
    let doc: GainDoc = serde_json::from_slice(bytes)?;
    let lattice = doc.header.check("gain")?;
    expect_len("gains", doc.gains.len(), &lattice)?;
    let map = ChannelGainMap {
        gbs_id: doc.gbs_id,
        lattice,
        gains_db: doc
            .gains
            .iter()
            .map(|g| g.unwrap_or(f64::NEG_INFINITY))
            .collect(),
        epsilon_db: doc.epsilon_db.unwrap_or(f64::NEG_INFINITY),
    };
    map.validate()?;
    Ok(map)
}

#[derive(Serialize, Deserialize)]
struct SinrDoc {
    #[serde(flatten)]
    header: Header,
    sinr_db: Vec<Option<f64>>,
    assoc: Vec<Option<u32>>,
}

pub fn serialize_sinr_map(map: &SinrMap, config: Option<Value>) -> Result<Vec<u8>, MapError> {
    let doc = SinrDoc {
        header: Header::new("sinr", &map.lattice, config),
        sinr_db: map.sinr_db.iter().map(|&v| finite_or_null(v)).collect(),
        assoc: map.assoc.clone(),
    };
    Ok(serde_json::to_vec(&doc)?)
}

pub fn parse_sinr_map(bytes: &[u8]) -> Result<SinrMap, MapError> {
    let doc: SinrDoc = serde_json::from_slice(bytes)?;
    let lattice = doc.header.check("sinr")?;
    expect_len("sinr_db", doc.sinr_db.len(), &lattice)?;
    expect_len("assoc", doc.assoc.len(), &lattice)?;
    Ok(SinrMap {
        lattice,
        sinr_db: doc
            .sinr_db
            .iter()
            .map(|v| v.unwrap_or(f64::NEG_INFINITY))
            .collect(),
        assoc: doc.assoc,
    })
}

/// Reads the `config` echo of any RGM document.
pub fn read_config(bytes: &[u8]) -> Result<Option<Value>, MapError> {
    let header: Header = serde_json::from_slice(bytes)?;
    Ok(header.config)
}

/// Reads just the `kind` tag.
pub fn read_kind(bytes: &[u8]) -> Result<String, MapError> {
    let header: Header = serde_json::from_slice(bytes)?;
    if header.format != RGM_MAGIC {
        return Err(MapError::Format(format!(
            "unknown format tag {:?}",
            header.format
        )));
    }
    Ok(header.kind)
}

#[derive(Serialize, Deserialize)]
struct FeasibleDoc {
    #[serde(flatten)]
    header: Header,
    gamma_t_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kappa_xy: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kappa_z: Option<usize>,
    feasible: Vec<u8>,
}

pub fn serialize_feasible_map(
    map: &FeasibleMap,
    config: Option<Value>,
) -> Result<Vec<u8>, MapError> {
    let doc = FeasibleDoc {
        header: Header::new("feasible", &map.lattice, config),
        gamma_t_db: finite_or_null(map.gamma_t_db),
        kappa_xy: None,
        kappa_z: None,
        feasible: map.feasible.iter().map(|&b| b as u8).collect(),
    };
    Ok(serde_json::to_vec(&doc)?)
}

fn bits(v: &[u8]) -> Result<Vec<bool>, MapError> {
    v.iter()
        .map(|&b| match b {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(MapError::Format(format!(
                "feasibility flag {other} is not 0/1"
            ))),
        })
        .collect()
}

pub fn parse_feasible_map(bytes: &[u8]) -> Result<FeasibleMap, MapError> {
    let doc: FeasibleDoc = serde_json::from_slice(bytes)?;
    let lattice = doc.header.check("feasible")?;
    expect_len("feasible", doc.feasible.len(), &lattice)?;
    Ok(FeasibleMap {
        lattice,
        feasible: bits(&doc.feasible)?,
        gamma_t_db: doc.gamma_t_db.unwrap_or(f64::NEG_INFINITY),
    })
}

/// Quantized maps keep the fine lattice in the header and the block flags in
/// `feasible`, whose length is the product of the block dims.
pub fn serialize_quantized_map(
    map: &QuantizedFeasibleMap,
    config: Option<Value>,
) -> Result<Vec<u8>, MapError> {
    let doc = FeasibleDoc {
        header: Header::new("quantized_feasible", &map.fine, config),
        gamma_t_db: finite_or_null(map.gamma_t_db),
        kappa_xy: Some(map.kappa_xy),
        kappa_z: Some(map.kappa_z),
        feasible: map.feasible.iter().map(|&b| b as u8).collect(),
    };
    Ok(serde_json::to_vec(&doc)?)
}

pub fn parse_quantized_map(bytes: &[u8]) -> Result<QuantizedFeasibleMap, MapError> {
    let doc: FeasibleDoc = serde_json::from_slice(bytes)?;
    let fine = doc.header.check("quantized_feasible")?;
    let (kxy, kz) = match (doc.kappa_xy, doc.kappa_z) {
        (Some(a), Some(b)) if a > 0 && b > 0 => (a, b),
        _ => return Err(MapError::Format("missing quantization ratios".into())),
    };
    if fine.dims[0] % kxy != 0 || fine.dims[1] % kxy != 0 || fine.dims[2] % kz != 0 {
        return Err(MapError::Format("dims not divisible by ratios".into()));
    }
    let dims = [fine.dims[0] / kxy, fine.dims[1] / kxy, fine.dims[2] / kz];
    if doc.feasible.len() != dims[0] * dims[1] * dims[2] {
        return Err(MapError::Format(format!(
            "feasible has {} entries, block dims {dims:?}",
            doc.feasible.len()
        )));
    }
    Ok(QuantizedFeasibleMap {
        fine,
        kappa_xy: kxy,
        kappa_z: kz,
        dims,
        feasible: bits(&doc.feasible)?,
        gamma_t_db: doc.gamma_t_db.unwrap_or(f64::NEG_INFINITY),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sinrmap::{build_feasible_map, quantize_feasible_map};
    use proptest::prelude::*;

    #[test]
    fn hand_built_gain_fixture() {
        let text = r#"{"format":"RGM","version":1,"kind":"gain","gbs_id":3,
            "origin":[15.0,25.0,95.0],"delta":10.0,"dims":[2,2,1],
            "epsilon_db":-65.0,"gains":[-40.0,-41.0,null,-43.0]}"#;
        let m = parse_gain_map(text.as_bytes()).unwrap();
        assert_eq!(m.gbs_id, 3);
        assert_eq!(m.lattice.dims, [2, 2, 1]);
        assert_eq!(m.lookup_gain_db(Vec3::new(15.0, 25.0, 95.0)), Some(-40.0));
        assert_eq!(m.lookup_gain_db(Vec3::new(25.0, 25.0, 95.0)), Some(-41.0));
        assert_eq!(m.lookup_gain_db(Vec3::new(15.0, 35.0, 95.0)), None);
        assert_eq!(m.lookup_gain_db(Vec3::new(25.0, 35.0, 95.0)), Some(-43.0));
    }

    #[test]
    fn rejects_corrupt_documents() {
        let bad_dims = r#"{"format":"RGM","version":1,"kind":"gain","gbs_id":1,
            "origin":[5.0,5.0,95.0],"delta":10.0,"dims":[2,2,1],
            "epsilon_db":null,"gains":[-40.0]}"#;
        assert!(matches!(
            parse_gain_map(bad_dims.as_bytes()),
            Err(MapError::Format(_))
        ));
        let bad_version = bad_dims.replace("\"version\":1", "\"version\":2");
        assert!(matches!(
            parse_gain_map(bad_version.as_bytes()),
            Err(MapError::Version(2))
        ));
        let wrong_kind = bad_dims.replace("\"kind\":\"gain\"", "\"kind\":\"sinr\"");
        assert!(parse_gain_map(wrong_kind.as_bytes()).is_err());
    }

    #[test]
    fn empty_map_round_trips() {
        let m = ChannelGainMap {
            gbs_id: 2,
            lattice: Lattice::new(Vec3::new(5.0, 5.0, 95.0), 10.0, [0, 0, 0]),
            gains_db: vec![],
            epsilon_db: -65.7,
        };
        let back = parse_gain_map(&serialize_gain_map(&m, None).unwrap()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn payload_is_one_entry_per_cell() {
        let lattice = Lattice::new(Vec3::new(5.0, 5.0, 95.0), 10.0, [3, 2, 2]);
        let m = ChannelGainMap {
            gbs_id: 1,
            lattice,
            gains_db: (0..12).map(|i| -40.0 - i as f64).collect(),
            epsilon_db: -70.0,
        };
        let v: Value = serde_json::from_slice(&serialize_gain_map(&m, None).unwrap()).unwrap();
        assert_eq!(v["gains"].as_array().unwrap().len(), 12);
        assert_eq!(v["gains"][4].as_f64(), Some(-44.0));
    }

    #[test]
    fn sinr_and_feasible_round_trip() {
        let lattice = Lattice::new(Vec3::new(5.0, 5.0, 95.0), 10.0, [3, 3, 1]);
        let s = SinrMap {
            lattice,
            sinr_db: vec![1.0, 2.0, f64::NEG_INFINITY, 4.0, 5.0, 6.0, 7.0, 8.0, -9.5],
            assoc: vec![
                Some(1),
                Some(2),
                None,
                Some(1),
                Some(1),
                Some(3),
                Some(2),
                Some(2),
                Some(1),
            ],
        };
        let cfg = serde_json::json!({"basis": "actual"});
        let bytes = serialize_sinr_map(&s, Some(cfg.clone())).unwrap();
        assert_eq!(parse_sinr_map(&bytes).unwrap(), s);
        assert_eq!(read_config(&bytes).unwrap(), Some(cfg));
        assert_eq!(read_kind(&bytes).unwrap(), "sinr");

        let f = build_feasible_map(&s, 4.0);
        assert_eq!(
            parse_feasible_map(&serialize_feasible_map(&f, None).unwrap()).unwrap(),
            f
        );
        let q = quantize_feasible_map(&f, 3, 1).unwrap();
        assert_eq!(
            parse_quantized_map(&serialize_quantized_map(&q, None).unwrap()).unwrap(),
            q
        );
    }

    proptest! {
        #[test]
        fn gain_map_round_trip(
            dims in (0usize..4, 0usize..4, 0usize..3),
            seed_vals in prop::collection::vec(prop_oneof![Just(f64::NEG_INFINITY), -120.0..-20.0f64], 36),
            ox in -100.0..100.0f64,
        ) {
            let lattice = Lattice::new(Vec3::new(ox, 5.0, 95.0), 10.0, [dims.0, dims.1, dims.2]);
            let m = ChannelGainMap {
                gbs_id: 4,
                lattice,
                gains_db: seed_vals[..lattice.len()].to_vec(),
                epsilon_db: -120.0,
            };
            let back = parse_gain_map(&serialize_gain_map(&m, None).unwrap()).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}
