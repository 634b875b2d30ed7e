//! Small configurations shared by the integration tests.

use std::path::Path;

use modscat::config::Schedule;
use modscat::ExperimentConfig;

const REFERENCE: &str = include_str!("../../../../configs/reference.toml");

pub fn reference() -> ExperimentConfig {
    ExperimentConfig::from_toml(REFERENCE).unwrap()
}

/// 1D cubic run on a small box to `t = 8`, writing to `dir`.
pub fn small(dir: &Path) -> ExperimentConfig {
    let mut c = reference();
    c.name = "small".into();
    c.grid.points = 1024;
    c.grid.half_width = 64.0;
    c.time.dt = 0.01;
    c.time.t_end = 8.0;
    c.time.schedule = Schedule::Dyadic { fine_prefix: 1 };
    c.output.dir = dir.to_path_buf();
    c
}
