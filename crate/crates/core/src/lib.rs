//! Evaluation of automatic lesion borders against several manual borders.
//!
//! The crate covers three families of measures:
//!
//! * single ground-truth confusion measures ([`confusion`]): XOR error,
//!   sensitivity, specificity, precision, recall, error probability;
//! * a per-pixel misclassification-probability model built from several
//!   observers ([`prob`]);
//! * the probabilistic Rand index and its normalized form, which score a
//!   test segmentation against all ground truths at once ([`rand_index`]).
//!
//! It also renders manual borders from clicked control points ([`border`]),
//! reads corpus manifests ([`dataset`]) and produces grouped
//! `mean (stddev)` tables ([`report`]).
//!
//! A note on interpretation: the XOR error divides by the manual border's
//! area, so the same absolute disagreement reads as a smaller error on a
//! larger lesion. Error probability divides by the whole image, so a border
//! twice the size of a small lesion can still score only a few percent.

pub mod border;
pub mod confusion;
pub mod dataset;
pub mod demo;
pub mod error;
pub mod io;
pub mod mask;
pub mod prob;
pub mod rand_index;
pub mod report;

pub use border::{render_border, BorderAnnotation, ClosedQuadraticSpline, Point, SplineMode};
pub use confusion::{confusion, ConfusionCounts};
pub use dataset::{DatasetManifest, Diagnosis, DimsPolicy, ImageEntry, RenderOptions};
pub use error::{Error, Result};
pub use mask::{dims_match, BinaryMask, Dims, GroundTruthSet, LabelMap, Labeled, Raster};
pub use prob::{guillod_error, ProbabilityImage};
pub use rand_index::{expected_pri, npri, pri_fast, pri_oracle, DatasetPairModel, PriResult, SignatureHistogram};
pub use report::{GroupStat, Layout, Measure, MeasureRecord, StddevMode};
