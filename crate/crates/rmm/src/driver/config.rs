//! Run configuration files (TOML, unknown keys rejected).

use super::problems::{Problem, ProblemKind, Quadratic};
use super::rezone::RezonerSpec;
use super::rng::Rng;
use crate::boundary::BoundarySpec;
use crate::error::{Error, Result};
use crate::grid::Domain;
use crate::reconstruction::GeometryMode;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

pub const DEFAULT_PHYSICAL_CFL: f64 = 0.25;
pub const DEFAULT_PSEUDO_CFL: f64 = 0.6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub kind: ProblemKind,
    #[serde(default)]
    pub seed: u64,
    /// Highest total degree of the random polynomial (quadratic problem only).
    #[serde(default = "default_degree")]
    pub degree: usize,
    /// Advection velocity (quadratic problem only).
    #[serde(default = "default_velocity")]
    pub velocity: [f64; 2],
}

fn default_degree() -> usize {
    2
}

fn default_velocity() -> [f64; 2] {
    [1.0, 1.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSection {
    pub nx: usize,
    pub ny: usize,
    /// [x0, x1, y0, y1]; the problem default when absent.
    #[serde(default)]
    pub domain: Option<[f64; 4]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    /// Problem default when absent.
    #[serde(default)]
    pub final_time: Option<f64>,
    #[serde(default = "default_physical_cfl")]
    pub cfl: f64,
}

fn default_physical_cfl() -> f64 {
    DEFAULT_PHYSICAL_CFL
}

impl Default for TimeSection {
    fn default() -> Self {
        Self {
            final_time: None,
            cfl: DEFAULT_PHYSICAL_CFL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeSection {
    #[serde(default = "default_mode")]
    pub mode: GeometryMode,
    #[serde(default = "default_pseudo_cfl")]
    pub pseudo_cfl: f64,
    /// Fixed pseudo-time level count instead of the CFL rule.
    #[serde(default)]
    pub levels: Option<usize>,
    /// Final pseudo-time; the physical step when absent.
    #[serde(default)]
    pub tau_final: Option<f64>,
    /// Extra rezone/remap rounds per step.
    #[serde(default)]
    pub relax_iters: usize,
}

fn default_mode() -> GeometryMode {
    GeometryMode::Tpe2
}

fn default_pseudo_cfl() -> f64 {
    DEFAULT_PSEUDO_CFL
}

impl Default for SchemeSection {
    fn default() -> Self {
        Self {
            mode: GeometryMode::Tpe2,
            pseudo_cfl: DEFAULT_PSEUDO_CFL,
            levels: None,
            tau_final: None,
            relax_iters: 0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Error table (written when the problem has an exact solution).
    #[serde(default)]
    pub errors_csv: Option<String>,
    #[serde(default)]
    pub diagnostics_csv: Option<String>,
    /// Write a VTK snapshot every this many steps (0: final only).
    #[serde(default)]
    pub snapshot_every: usize,
    #[serde(default)]
    pub snapshot_dir: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemSection,
    pub mesh: MeshSection,
    #[serde(default)]
    pub time: TimeSection,
    #[serde(default)]
    pub scheme: SchemeSection,
    #[serde(default = "default_rezone")]
    pub rezone: RezonerSpec,
    /// Problem default when absent.
    #[serde(default)]
    pub boundary: Option<BoundarySpec>,
    #[serde(default)]
    pub output: OutputSection,
}

fn default_rezone() -> RezonerSpec {
    RezonerSpec::None
}

impl RunConfig {
    pub fn new(kind: ProblemKind, nx: usize, ny: usize) -> Self {
        Self {
            problem: ProblemSection {
                kind,
                seed: 0,
                degree: 2,
                velocity: default_velocity(),
            },
            mesh: MeshSection { nx, ny, domain: None },
            time: TimeSection::default(),
            scheme: SchemeSection::default(),
            rezone: RezonerSpec::None,
            boundary: None,
            output: OutputSection::default(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {}", path.display(), e)))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// Hex SHA-256 of the canonical TOML form.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{:02x}", b)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.mesh.nx < 3 || self.mesh.ny < 3 {
            return Err(Error::Config("meshes need at least 3 cells per direction".into()));
        }
        if !(self.time.cfl > 0.0 && self.time.cfl <= 1.0) {
            return Err(Error::Config(format!("physical CFL {} outside (0, 1]", self.time.cfl)));
        }
        if let Some(t) = self.time.final_time {
            if !(t >= 0.0) {
                return Err(Error::Config("final time must be non-negative".into()));
            }
        }
        if !(self.scheme.pseudo_cfl > 0.0 && self.scheme.pseudo_cfl <= 1.0) {
            return Err(Error::Config(format!("pseudo-time CFL {} outside (0, 1]", self.scheme.pseudo_cfl)));
        }
        if self.scheme.levels == Some(0) {
            return Err(Error::Config("levels must be at least 1".into()));
        }
        if let Some(tf) = self.scheme.tau_final {
            if !(tf > 0.0) {
                return Err(Error::Config("tau_final must be positive".into()));
            }
        }
        if let Some([x0, x1, y0, y1]) = self.mesh.domain {
            if !(x1 > x0 && y1 > y0) {
                return Err(Error::Config("empty domain".into()));
            }
        }
        if self.problem.degree > 2 {
            return Err(Error::Config("polynomial degree must be at most 2".into()));
        }
        self.rezone.validate()?;
        self.boundary().validate()?;
        if self.boundary().needs_exact() && !matches!(self.problem.kind, ProblemKind::Quadratic | ProblemKind::Sine) {
            return Err(Error::Config("exact boundaries need a problem with a known solution".into()));
        }
        Ok(())
    }

    pub fn build_problem(&self) -> Problem {
        match self.problem.kind {
            ProblemKind::Quadratic => {
                let mut rng = Rng::new(self.problem.seed);
                Problem::Quadratic(Quadratic::random(&mut rng, self.problem.degree, self.problem.velocity))
            }
            ProblemKind::Sine => Problem::Sine,
            ProblemKind::Blast => Problem::Blast,
            ProblemKind::ShuOsher => Problem::ShuOsher,
            ProblemKind::Riemann2d => Problem::Riemann2d,
            ProblemKind::DoubleMach => Problem::DoubleMach,
        }
    }

    pub fn domain(&self) -> Domain {
        match self.mesh.domain {
            Some([x0, x1, y0, y1]) => Domain::new(x0, x1, y0, y1),
            None => self.build_problem().default_domain(self.mesh.nx, self.mesh.ny),
        }
    }

    pub fn boundary(&self) -> BoundarySpec {
        self.boundary.unwrap_or_else(|| self.build_problem().default_boundary())
    }

    pub fn final_time(&self) -> f64 {
        self.time.final_time.unwrap_or_else(|| self.build_problem().default_final_time())
    }

    /// Seed of the rezoning stream, kept apart from the initial-data stream.
    pub fn rezone_seed(&self) -> u64 {
        self.problem.seed.wrapping_add(0x5bd1_e995)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
[problem]
kind = "sine"

[mesh]
nx = 40
ny = 40

[scheme]
mode = "gcl"

[rezone]
kind = "random"
c_r = 0.5
b = [-0.6, -0.8]
"#;

    #[test]
    fn parses_and_round_trips() {
        let cfg = RunConfig::parse(SAMPLE).unwrap();
        assert_eq!(cfg.scheme.mode, GeometryMode::Gcl);
        assert_eq!(cfg.rezone, RezonerSpec::Random { c_r: 0.5, b: [-0.6, -0.8] });
        assert_eq!(cfg.final_time(), 0.1);
        let again = RunConfig::parse(&cfg.to_toml()).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.hash(), cfg.hash());
        assert_eq!(cfg.hash().len(), 64);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(RunConfig::parse(&SAMPLE.replace("nx = 40", "nx = 40\nnz = 3")).is_err());
        assert!(RunConfig::parse(&SAMPLE.replace("c_r = 0.5", "c_r = 0.7")).is_err());
        assert!(RunConfig::parse(&SAMPLE.replace("[scheme]", "[scheme]\npseudo_cfl = 1.5")).is_err());
    }
}
