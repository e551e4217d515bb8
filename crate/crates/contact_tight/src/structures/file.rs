//! Structure definition files (JSON or TOML).
//!
//! ```toml
//! kind = "radial"
//! r_max = 10.0
//! alpha = { type = "trig", func = "cos", amp = 1.0, freq = 0.5, phase = 0.0 }
//! beta = { type = "expr", expr = "sin(r^2/2)" }
//! ```

use std::path::Path;
use serde::Deserialize;

use super::{
    radial_to_frame, Domain, FrameStructure, OrbitRange, Profile, ProfileSpec, RadialModel,
    ReebOrbitSpec, StructureSpec,
};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Deserialize)]
pub struct OrbitFile {
    pub base: [f64; 3],
    #[serde(default)]
    pub interval: Option<[f64; 2]>,
    #[serde(default)]
    pub period: Option<f64>,
    #[serde(default)]
    pub twist: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StructureFile {
    Frame {
        #[serde(default)]
        id: Option<String>,
        f0: [String; 3],
        f1: [String; 3],
        f2: [String; 3],
        #[serde(default)]
        domain: Option<[[f64; 3]; 2]>,
        #[serde(default)]
        orbit: Option<OrbitFile>,
    },
    Radial {
        #[serde(default)]
        id: Option<String>,
        alpha: ProfileSpec,
        beta: ProfileSpec,
        #[serde(default = "default_rmax")]
        r_max: f64,
    },
    Kcontact {
        #[serde(default)]
        id: Option<String>,
        kappa: f64,
    },
}

fn default_rmax() -> f64 {
    f64::INFINITY
}

fn orbit_from(o: &OrbitFile) -> Result<ReebOrbitSpec> {
    let range = match (o.interval, o.period) {
        (Some([a, b]), None) if b > a => OrbitRange::Interval { z0: a, z1: b },
        (None, Some(p)) if p > 0.0 => OrbitRange::Circle { period: p },
        (None, None) => OrbitRange::Interval { z0: -1.0, z1: 1.0 },
        _ => return Err(Error::Invalid("orbit needs either an increasing interval or a positive period".into())),
    };
    Ok(ReebOrbitSpec { base: o.base, range, twist: o.twist })
}

impl StructureFile {
    pub fn build(&self) -> Result<StructureSpec> {
        match self {
            StructureFile::Frame { id, f0, f1, f2, domain, orbit } => {
                let label = id.clone().unwrap_or_else(|| "frame".into());
                fn row(r: &[String; 3]) -> [&str; 3] {
                    [r[0].as_str(), r[1].as_str(), r[2].as_str()]
                }
                let mut fs = FrameStructure::from_expressions(&label, [row(f0), row(f1), row(f2)])?;
                if let Some([lo, hi]) = domain {
                    fs.domain = Domain::Box { lo: *lo, hi: *hi };
                }
                let orbit = match orbit {
                    Some(o) => orbit_from(o)?,
                    None => ReebOrbitSpec::interval([0.0; 3], -1.0, 1.0),
                };
                Ok(StructureSpec::from_frame(fs, orbit))
            }
            StructureFile::Radial { id, alpha, beta, r_max } => {
                let model = RadialModel { alpha: Profile::from_spec(alpha)?, beta: Profile::from_spec(beta)?, r_max: *r_max };
                let frame = radial_to_frame(&model)?;
                let mut s = StructureSpec::radial(model)?;
                s.frame = frame;
                if let Some(id) = id {
                    s.id = id.clone();
                    s.frame.label = id.clone();
                }
                Ok(s)
            }
            StructureFile::Kcontact { id, kappa } => {
                let mut s = StructureSpec::kcontact(*kappa)?;
                if let Some(id) = id {
                    s.id = id.clone();
                }
                Ok(s)
            }
        }
    }
}

/// Parse a structure description; `toml` selects the format.
pub fn parse_structure_str(src: &str, toml_format: bool) -> Result<StructureSpec> {
    let file: StructureFile = if toml_format {
        toml::from_str(src).map_err(|e| Error::Parse(e.to_string()))?
    } else {
        serde_json::from_str(src).map_err(|e| Error::Parse(e.to_string()))?
    };
    file.build()
}

/// Load a `.json` or `.toml` structure file.
pub fn load_structure_file(path: &Path) -> Result<StructureSpec> {
    let src = std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    let is_toml = path.extension().map(|e| e == "toml").unwrap_or(false);
    parse_structure_str(&src, is_toml)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_radial_file() {
        let src = r#"
kind = "radial"
alpha = { type = "trig", func = "cos", amp = 1.0, freq = 0.5, phase = 0.0 }
beta = { type = "expr", expr = "sin(r^2/2)" }
"#;
        let s = parse_structure_str(src, true).unwrap();
        let ot = StructureSpec::overtwisted();
        let q = [0.4, -0.9, 0.2];
        let a = s.frame.eval(&q);
        let b = ot.frame.eval(&q);
        for i in 0..3 {
            for k in 0..3 {
                assert!((a[i][k] - b[i][k]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn json_frame_file() {
        let src = r#"{"kind":"frame","id":"heis","f0":["0","0","1"],"f1":["1","0","y/2"],"f2":["0","1","-x/2"],
                      "orbit":{"base":[0,0,0],"interval":[-2,2]}}"#;
        let s = parse_structure_str(src, false).unwrap();
        assert_eq!(s.id, "heis");
        assert_eq!(s.orbit.range, OrbitRange::Interval { z0: -2.0, z1: 2.0 });
        let bad = r#"{"kind":"frame","f0":["0","0","1"],"f1":["1","0","y/"],"f2":["0","1","-x/2"]}"#;
        assert!(parse_structure_str(bad, false).is_err());
    }

    #[test]
    fn kcontact_file() {
        let s = parse_structure_str("kind = \"kcontact\"\nkappa = -1.0\n", true).unwrap();
        assert_eq!(s.constant_curvatures(), Some((-1.0, 0.0)));
    }
}
