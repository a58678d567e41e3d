//! Synthetic chains and Monte Carlo experiments that score the estimators
//! against exact oracle values.

mod csv_out;
mod experiment;
mod generate;
mod stats;

pub use csv_out::{write_coverage_csv, write_error_curve_csv, write_visits_csv};
pub use experiment::{
    run_coverage, run_error_curve, run_visit_concentration, CoverageReport, ErrorCurveReport,
    ErrorCurveRow, ExperimentConfig, InitialLaw, ReplicateRecord, ScanMode, Truth, VisitReport,
    VisitRow,
};
pub use generate::{generate_chain, standard_corpus, ChainFamily, ChainSpec};
pub use stats::{quantile, Quartiles};
