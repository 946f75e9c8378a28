//! Splitting, cross validation, weighted metrics and the experiment grid.

pub mod cv;
pub mod grid;
pub mod metrics;
pub mod report;
pub mod split;

pub use cv::{cross_validate, fit_with, CvOptions, CvResult, WeightUsage};
pub use grid::{run_cell, run_experiment_grid, CellKey, CellOutcome, ExperimentGridResult, GridRow, GridSpec};
pub use metrics::{
    compute_metrics, confusion_matrix, report_from_confusion, weighted_accuracy, ConfusionMatrix, MetricsReport,
};
pub use report::{
    read_results_jsonl, results_header, write_accuracy_by_ratio, write_accuracy_by_size, write_per_mode_metrics,
    write_results_csv, write_results_jsonl, write_timings_csv, ResultRecord, UNDEFINED,
};
pub use split::{
    holdout_indices, holdout_split, holdout_split_stratified, kfold_partition, FoldAssignment, SplitRatio,
};
