//! Configuration of the numerical lab commands.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::calapso::{
    seed_constant_psi, seed_exact, solve_goursat, CalapsoError, CalapsoField, FrameOptions, GoursatData, GoursatOptions, Mode,
    Profile,
};
use crate::grid::{Grid, Mesh};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("{key}: {message}")]
    Invalid { key: String, message: String },
    #[error("boundary file {path}: {message}")]
    Boundary { path: PathBuf, message: String },
}

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.into(),
        message: message.into(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            nx: 64,
            ny: 64,
            lx: 1.0,
            ly: 1.0,
        }
    }
}

fn default_c() -> f64 {
    1.0
}

/// Where the Calapso solution comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SeedConfig {
    /// `psi = 0, k1 = p(x), k2 = c`.
    Exact {
        #[serde(default)]
        profile: Profile,
        #[serde(default = "default_c")]
        c: f64,
    },
    /// `psi` constant, `k1 = k2` a sum of exponential modes.
    ConstantPsi { psi: f64, modes: Vec<Mode> },
    /// Goursat solve from characteristic data: either read from a CSV file
    /// with columns `x,y,k1,k2,psi` covering the boundary nodes, or taken
    /// from the exact seed with the given profile.
    Goursat {
        #[serde(default)]
        boundary_file: Option<PathBuf>,
        #[serde(default)]
        profile: Option<Profile>,
        #[serde(default)]
        c: Option<f64>,
    },
}

impl Default for SeedConfig {
    fn default() -> Self {
        SeedConfig::Exact {
            profile: Profile::default(),
            c: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub goursat: GoursatOptions,
    /// Bound on `|A^T g A - g|` over the integration.
    pub drift: f64,
    /// Bound on the quadric and chart defects of each surface.
    pub surface: f64,
    /// Bound on the relative sup difference of matched entries.
    pub deformation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            goursat: GoursatOptions::default(),
            drift: 1e-8,
            surface: 1e-9,
            deformation: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContactConfig {
    /// Contact orders compared at each probe point.
    pub orders: Vec<usize>,
    /// Number of probe points per axis, evenly spaced inside the patch.
    pub points_per_axis: usize,
    /// Finite-difference order of the jets.
    pub accuracy: usize,
}

impl Default for ContactConfig {
    fn default() -> Self {
        ContactConfig {
            orders: vec![2, 3],
            points_per_axis: 4,
            accuracy: 2,
        }
    }
}

fn default_lambdas() -> Vec<f64> {
    vec![0.0, 1.0]
}

/// Input of `calapso` and `deform`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabConfig {
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub seed: SeedConfig,
    #[serde(default = "default_lambdas")]
    pub lambdas: Vec<f64>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub frame: FrameOptions,
    #[serde(default)]
    pub contact: ContactConfig,
    /// Seed of a random base frame `A(0, 0)`; identity when absent.
    #[serde(default)]
    pub base_frame_seed: Option<u64>,
    #[serde(default)]
    pub outdir: Option<PathBuf>,
}

impl Default for LabConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all keys have defaults")
    }
}

impl LabConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg: LabConfig = serde_json::from_str(&text)?;
        // Relative boundary files are resolved next to the config.
        if let SeedConfig::Goursat {
            boundary_file: Some(f), ..
        } = &mut cfg.seed
        {
            if f.is_relative() {
                if let Some(dir) = path.parent() {
                    *f = dir.join(&*f);
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let g = &self.grid;
        // The order-8 Maurer–Cartan stencils need nine nodes per line.
        if g.nx < 9 {
            return Err(invalid("grid.nx", "must be at least 9"));
        }
        if g.ny < 9 {
            return Err(invalid("grid.ny", "must be at least 9"));
        }
        if !(g.lx > 0.0 && g.lx.is_finite()) {
            return Err(invalid("grid.lx", "must be positive"));
        }
        if !(g.ly > 0.0 && g.ly.is_finite()) {
            return Err(invalid("grid.ly", "must be positive"));
        }
        if self.lambdas.is_empty() {
            return Err(invalid("lambdas", "needs at least one value"));
        }
        if self.lambdas.iter().any(|l| !l.is_finite()) {
            return Err(invalid("lambdas", "values must be finite"));
        }
        if self.frame.substeps == 0 {
            return Err(invalid("frame.substeps", "must be positive"));
        }
        if self.contact.accuracy == 0 || self.contact.accuracy % 2 == 1 {
            return Err(invalid("contact.accuracy", "must be a positive even number"));
        }
        if self.contact.points_per_axis == 0 {
            return Err(invalid("contact.points_per_axis", "must be positive"));
        }
        match &self.seed {
            SeedConfig::ConstantPsi { modes, .. } => {
                if modes.iter().any(|m| m.rate == 0.0) {
                    return Err(invalid("seed.modes", "rates must be nonzero"));
                }
            }
            SeedConfig::Goursat {
                boundary_file, profile, ..
            } => {
                if boundary_file.is_some() == profile.is_some() {
                    return Err(invalid("seed", "goursat needs exactly one of boundary_file and profile"));
                }
            }
            SeedConfig::Exact { .. } => {}
        }
        Ok(())
    }

    pub fn mesh(&self) -> Mesh {
        Mesh::new(self.grid.nx, self.grid.ny, self.grid.lx, self.grid.ly)
    }
}

/// Error from building the field: bad input or a solver failure.
#[derive(Debug, thiserror::Error)]
pub enum FieldError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Solver(#[from] CalapsoError),
}

pub fn build_field(cfg: &LabConfig) -> Result<CalapsoField, FieldError> {
    let mesh = cfg.mesh();
    Ok(match &cfg.seed {
        SeedConfig::Exact { profile, c } => seed_exact(profile, *c, mesh),
        SeedConfig::ConstantPsi { psi, modes } => seed_constant_psi(*psi, modes, mesh),
        SeedConfig::Goursat {
            boundary_file,
            profile,
            c,
        } => {
            let data = match (boundary_file, profile) {
                (Some(path), _) => read_boundary(path, mesh)?,
                (None, Some(p)) => GoursatData::from_field(&seed_exact(p, c.unwrap_or(1.0), mesh)),
                (None, None) => unreachable!("validated"),
            };
            solve_goursat(&data, cfg.tolerances.goursat)?
        }
    })
}

#[derive(Debug, Deserialize)]
struct BoundaryRow {
    x: f64,
    y: f64,
    k1: f64,
    k2: f64,
    psi: f64,
}

/// Reads characteristic data from a CSV with header `x,y,k1,k2,psi`. Every
/// boundary node must appear; `k1, k2` are only read on the two axes.
pub fn read_boundary(path: &Path, mesh: Mesh) -> Result<GoursatData, ConfigError> {
    let err = |message: String| ConfigError::Boundary {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| err(e.to_string()))?;
    let (nx, ny) = (mesh.nx, mesh.ny);
    let mut seen = Grid::filled(nx, ny, None::<(f64, f64, f64)>);
    for (line, row) in reader.deserialize::<BoundaryRow>().enumerate() {
        let row = row.map_err(|e| err(e.to_string()))?;
        let (fi, fj) = (row.x / mesh.hx(), row.y / mesh.hy());
        let (i, j) = (fi.round(), fj.round());
        if (fi - i).abs() > 1e-6 || (fj - j).abs() > 1e-6 || i < 0.0 || j < 0.0 || i as usize >= nx || j as usize >= ny {
            return Err(err(format!("row {}: ({}, {}) is not a grid node", line + 2, row.x, row.y)));
        }
        seen.set(i as usize, j as usize, Some((row.k1, row.k2, row.psi)));
    }
    let mut missing = None;
    let on_edge = |i: usize, j: usize| i == 0 || j == 0 || i + 1 == nx || j + 1 == ny;
    for (i, j, v) in seen.nodes() {
        if on_edge(i, j) && v.is_none() && missing.is_none() {
            missing = Some((i, j));
        }
    }
    if let Some((i, j)) = missing {
        return Err(err(format!("no value for boundary node ({}, {})", mesh.x(i), mesh.y(j))));
    }
    let at = |i: usize, j: usize| seen.get(i, j).expect("boundary node present");
    Ok(GoursatData {
        mesh,
        k1_bottom: (0..nx).map(|i| at(i, 0).0).collect(),
        k2_bottom: (0..nx).map(|i| at(i, 0).1).collect(),
        k1_left: (0..ny).map(|j| at(0, j).0).collect(),
        k2_left: (0..ny).map(|j| at(0, j).1).collect(),
        psi_boundary: Grid::from_fn(nx, ny, |i, j| if on_edge(i, j) { at(i, j).2 } else { 0.0 }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_takes_documented_defaults() {
        let c = LabConfig::default();
        assert_eq!((c.grid.nx, c.grid.ny), (64, 64));
        assert_eq!(c.lambdas, [0.0, 1.0]);
        assert_eq!(c.seed, SeedConfig::default());
        assert_eq!(c.tolerances.goursat.max_iter, 200);
        assert_eq!(c.frame.reproject_every, 16);
    }

    #[test]
    fn unknown_keys_are_rejected_by_name() {
        let e = serde_json::from_str::<LabConfig>(r#"{"grid": {"nx": 9, "nz": 3}}"#).unwrap_err();
        assert!(e.to_string().contains("nz"), "{e}");
        let e = serde_json::from_str::<LabConfig>(r#"{"seed": {"type": "exact", "k": 1}}"#).unwrap_err();
        assert!(e.to_string().contains('k'), "{e}");
    }

    #[test]
    fn seed_variants_parse() {
        let c: LabConfig = serde_json::from_str(
            r#"{"seed": {"type": "constant_psi", "psi": 1.0, "modes": [{"amplitude": 1.0, "rate": 2.0}]}}"#,
        )
        .unwrap();
        assert!(matches!(c.seed, SeedConfig::ConstantPsi { .. }));
        let c: LabConfig =
            serde_json::from_str(r#"{"seed": {"type": "exact", "profile": {"kind": "sine", "amplitude": 1, "frequency": 2, "phase": 0}}}"#)
                .unwrap();
        assert!(matches!(c.seed, SeedConfig::Exact { c, .. } if c == 1.0));
    }

    #[test]
    fn validation_names_the_key() {
        let mut c = LabConfig::default();
        c.grid.nx = 4;
        assert!(c.validate().unwrap_err().to_string().starts_with("grid.nx"));
        let mut c = LabConfig::default();
        c.seed = SeedConfig::Goursat {
            boundary_file: None,
            profile: None,
            c: None,
        };
        assert!(c.validate().unwrap_err().to_string().starts_with("seed"));
    }

    #[test]
    fn boundary_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.csv");
        let mesh = Mesh::unit(9);
        let mut w = csv::Writer::from_path(&path).unwrap();
        w.write_record(["x", "y", "k1", "k2", "psi"]).unwrap();
        for j in 0..9 {
            for i in 0..9 {
                if i == 0 || j == 0 || i == 8 || j == 8 {
                    let (x, y) = (mesh.x(i), mesh.y(j));
                    w.serialize((x, y, x, 1.0, 0.0)).unwrap();
                }
            }
        }
        w.flush().unwrap();
        let data = read_boundary(&path, mesh).unwrap();
        assert_eq!(data.k1_bottom[8], 1.0);
        assert_eq!(data.k2_left[3], 1.0);
        let short = read_boundary(&path, Mesh::unit(17));
        assert!(short.is_err());
    }
}
