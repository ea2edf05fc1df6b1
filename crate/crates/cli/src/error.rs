use std::path::PathBuf;

use compose_core::apsp::ApspError;
use compose_core::bench::BenchError;
use compose_core::model_file::ModelFileError;
use compose_core::planner::PlannerError;
use thiserror::Error;

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NO_ENTRY: i32 = 3;
pub const EXIT_UNSATISFIABLE_GOAL: i32 = 4;
pub const EXIT_UNREACHABLE_GOAL: i32 = 5;
pub const EXIT_NEGATIVE_CYCLE: i32 = 6;
pub const EXIT_PLAN_INTEGRITY: i32 = 7;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Invalid { path: PathBuf, message: String },
    #[error("{0} finding(s)")]
    Findings(usize),
    #[error(transparent)]
    Planner(#[from] PlannerError),
    #[error(transparent)]
    Model(#[from] ModelFileError),
    #[error(transparent)]
    Apsp(#[from] ApspError),
    #[error(transparent)]
    Bench(#[from] BenchError),
}

impl CliError {
    pub fn invalid(path: impl Into<PathBuf>, err: impl ToString) -> Self {
        CliError::Invalid {
            path: path.into(),
            message: err.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Bench(BenchError::ZeroSize | BenchError::NoSizes | BenchError::BadDensity(_)) => {
                EXIT_USAGE
            }
            CliError::Planner(p) | CliError::Model(ModelFileError::Planner(p)) => planner_code(p),
            CliError::Apsp(a) | CliError::Bench(BenchError::Apsp(a)) => apsp_code(a),
            _ => EXIT_VALIDATION,
        }
    }
}

fn apsp_code(err: &ApspError) -> i32 {
    match err {
        ApspError::NegativeCycle { .. } => EXIT_NEGATIVE_CYCLE,
        _ => EXIT_VALIDATION,
    }
}

fn planner_code(err: &PlannerError) -> i32 {
    match err {
        PlannerError::NoEntry => EXIT_NO_ENTRY,
        PlannerError::UnsatisfiableGoal(_) => EXIT_UNSATISFIABLE_GOAL,
        PlannerError::UnreachableGoal(_) => EXIT_UNREACHABLE_GOAL,
        PlannerError::PlanIntegrity(_) => EXIT_PLAN_INTEGRITY,
        PlannerError::Apsp(a) => apsp_code(a),
        _ => EXIT_VALIDATION,
    }
}
