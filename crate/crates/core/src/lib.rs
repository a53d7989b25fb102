//! Köthe sequence spaces, their Kolmogorov diameters, and the diametral
//! dimension criteria built on them.

pub mod config;
pub mod criteria;
pub mod diameters;
pub mod error;
pub mod invariants;
pub mod real;
pub mod seq;
pub mod space;
pub mod verdict;
pub mod verify;

pub use config::Config;
pub use criteria::{evaluate, CriterionId, CriterionReport, D2Report, REPORT_SCHEMA_VERSION};
pub use diameters::{BoundedSetSpec, DiameterSequence, Provenance};
pub use error::{KdiamError, Result};
pub use real::{ExtendedReal, Real};
pub use seq::{CriterionValue, ExponentSequence, Mode, Seq};
pub use space::{GradeFunction, KotheMatrix, SpaceDescriptor};
pub use verdict::{Grade, Outcome, Resolution, Verdict, Witness};
pub use verify::{run_campaign, Campaign, CampaignReport, TheoremId, VerifyReport};
