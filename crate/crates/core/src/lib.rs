//! Log-Lindley generated (LL-G) family of distributions.
//!
//! The crate provides the distribution itself over pluggable baselines
//! ([`baselines`], [`llg`]), the Lambert `W₋₁` kernel behind its quantile,
//! exp-G series representations ([`series`]), shape analysis ([`shapes`]),
//! maximum-likelihood fitting ([`mle`]), a set of rival Weibull-generated
//! models ([`competitors`]) and information-criteria model comparison
//! ([`selection`]).

pub mod baselines;
pub mod competitors;
pub mod dataset;
pub mod error;
mod fixed;
pub mod lambert_w;
pub mod llg;
pub mod mle;
pub mod optimize;
pub mod quadrature;
pub mod selection;
pub mod series;
pub mod shapes;

pub use baselines::{Baseline, BaselineKind};
pub use competitors::{CompetitorKind, CompetitorModel};
pub use dataset::{bjerkedal, parse_dataset, Dataset};
pub use error::{Error, Result};
pub use llg::{LlgParams, LogLindleyG};
pub use mle::{FitResult, LikelihoodModel};
pub use selection::{compare, criteria, ComparisonRow, Criteria};
