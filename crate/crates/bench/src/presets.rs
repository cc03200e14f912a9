//! Configurations for the toy-space experiment grid, compiled into the
//! binary: the 2D reference space and its variations in relevant
//! dimensions, irrelevant dimensions, and resolution.

use crate::config::{ExperimentConfig, ExperimentFile};
use crate::error::{BenchError, Result};

pub struct Preset {
    pub name: &'static str,
    pub text: &'static str,
}

macro_rules! preset {
    ($name:literal) => {
        Preset {
            name: $name,
            text: include_str!(concat!("../presets/", $name, ".toml")),
        }
    };
}

pub const PRESETS: &[Preset] = &[
    preset!("reference"),
    preset!("dims-3d"),
    preset!("dims-4d"),
    preset!("dims-6d"),
    preset!("irrelevant-10"),
    preset!("irrelevant-20"),
    preset!("irrelevant-50"),
    preset!("cubes-20"),
    preset!("cubes-50"),
    preset!("cubes-100"),
];

impl Preset {
    /// First comment line of the file.
    pub fn summary(&self) -> &'static str {
        self.text
            .lines()
            .next()
            .and_then(|l| l.strip_prefix('#'))
            .map_or("", str::trim)
    }

    pub fn file(&self) -> Result<ExperimentFile> {
        ExperimentFile::parse(self.text, self.name)
    }

    pub fn config(&self) -> Result<ExperimentConfig> {
        self.file()?.resolve()
    }
}

pub fn find(name: &str) -> Result<&'static Preset> {
    PRESETS
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| BenchError::Config(format!("no preset named `{name}`")))
}
