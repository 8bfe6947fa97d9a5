//! Verification suites, parameter sweeps and reports over the fixture registry.

pub mod report;
pub mod suites;
pub mod sweep;

use sinecone_core::GeomError;

pub use report::{Check, Format, Report, Reported, SuiteResult};
pub use suites::{run_suite, RunOptions, Suite, ALL_SUITES};
pub use sweep::{rows_to_csv, run_sweep, SweepRow, SweepSpec};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Geometry(GeomError),
    #[error("cannot write {0}")]
    Io(String),
}

impl From<GeomError> for CliError {
    fn from(e: GeomError) -> Self {
        match e {
            GeomError::UnknownFixture(_) | GeomError::MissingStructure { .. } | GeomError::InvalidParameter(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Geometry(other),
        }
    }
}

impl CliError {
    /// 2 for usage and I/O errors, 1 for anything raised while evaluating.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Geometry(_) => 1,
            CliError::Io(_) => 2,
        }
    }
}

/// Suite/fixture pairs run by `report` when none are given.
pub const DEFAULT_RUNS: [(Suite, &str); 12] = [
    (Suite::CurvatureCore, "round_sphere_2"),
    (Suite::CurvatureCore, "round_sphere_3"),
    (Suite::CurvatureCore, "round_sphere_4"),
    (Suite::CurvatureCore, "round_sphere_5"),
    (Suite::CurvatureCore, "round_sphere_6"),
    (Suite::Theorem1, "case1_cylinder"),
    (Suite::GhClassify, "flat_c3_kahler"),
    (Suite::GhClassify, "s6_octonion_nk"),
    (Suite::GhClassify, "conformal_c3_kahler"),
    (Suite::ConeChain, "s5_sasaki"),
    (Suite::Theorem4, "s5_sasaki"),
    (Suite::Theorem1, "sine_cone_s5"),
];

/// Parses `suite:fixture`.
pub fn parse_run(s: &str) -> Result<(Suite, String), CliError> {
    let (suite, fixture) =
        s.split_once(':').ok_or_else(|| CliError::Usage(format!("expected SUITE:FIXTURE, got `{s}`")))?;
    Ok((suite.parse()?, fixture.to_string()))
}

pub fn run_many(runs: &[(Suite, String)], opts: RunOptions) -> Result<Report, CliError> {
    let suites = runs.iter().map(|(s, f)| run_suite(*s, f, opts)).collect::<Result<Vec<_>, _>>()?;
    Ok(Report::new(opts.seed, suites))
}
