//! Experiment files: one TOML document with a section per module.
//!
//! ```toml
//! name = "baseline"
//! output_dir = "runs"
//!
//! [robot]      # RobotParams
//! [trajectory] # TrajectoryConfig
//! [gains]      # DscGains
//! [rbfn]       # RbfnSettings
//! [sim]        # SimConfig, with [sim.disturbance]
//! ```
//!
//! `crates/core/configs/default.toml` is the annotated default.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dsc::DscGains;
use crate::dynamics::RobotParams;
use crate::rbfn::RbfnSettings;
use crate::sim::{SimConfig, Setup};
use crate::trajectory::TrajectoryConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    /// Parent directory of the per-run output directories.
    pub output_dir: PathBuf,
    pub robot: RobotParams,
    pub trajectory: TrajectoryConfig,
    pub gains: DscGains,
    pub rbfn: RbfnSettings,
    pub sim: SimConfig,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            name: "baseline".into(),
            output_dir: PathBuf::from("runs"),
            robot: RobotParams::default(),
            trajectory: TrajectoryConfig::default(),
            gains: DscGains::default(),
            rbfn: RbfnSettings::default(),
            sim: SimConfig::default(),
        }
    }
}

impl ExperimentSpec {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    /// Reads and parses a config file. Also returns the raw text so the
    /// caller can snapshot it verbatim.
    pub fn load(path: &Path) -> Result<(Self, String)> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Ok((Self::parse(&text)?, text))
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn setup(&self) -> Setup {
        Setup {
            params: self.robot.clone(),
            trajectory: self.trajectory.clone(),
            gains: self.gains.clone(),
            rbfn: self.rbfn.clone(),
            sim: self.sim.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::invalid("name", "must not be empty"));
        }
        self.setup().validate()
    }
}
