//! Problem-file ingestion, command dispatch, and bit-stable report emission.

pub mod problem;
pub mod report;

pub use problem::{
    parse_problem, BoxProblem, EnvelopeProblem, IntegralProblem, Problem, ProblemError,
    VhatProblem,
};
pub use report::{
    render_report, run_box, run_envelope, run_integral, run_vhat, run_zariski, RunError,
    RunOutput, Table,
};
