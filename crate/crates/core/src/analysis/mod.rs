//! View-oriented queries over an [`AugmentedExperiment`](crate::AugmentedExperiment).
//!
//! Each view reads precomputed statistics; only the model comparator runs a
//! test at query time, since its configuration comes from the caller.

mod annotations;
mod annotators;
mod filter;
mod views;

pub use annotations::{AnnotationExport, AnnotationKind, AnnotationStore, InstanceAnnotation};
pub use annotators::{annotator_report, AnnotatorReport};
pub use filter::{InstanceFilter, Predicate};
pub use views::{
    compare_models, dataset_view, instance_detail, list_predictions, metric_behavior,
    model_behavior, overview, BehaviorRow, BehaviorSort, CompareConfig, InstanceDetail,
    InstanceDiff, MetricBehavior, MetricEntry, MetricType, ModelBehavior, ModelComparison,
    ModelDetail, Overview, PredictionResponse, PredictionRow, PredictionSort, PredictionsPage,
    RadarSeries, ScatterPoint, SortOrder, DEFAULT_EXTREMES, DEFAULT_HISTOGRAM_BINS,
};
