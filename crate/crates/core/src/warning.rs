//! Soft diagnostics that accumulate instead of aborting an analysis.

use alloc::string::String;
use core::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum WarningCode {
    Separation,
    NotConverged,
    SkippedTerm,
    DroppedColumns,
    DegenerateStrata,
    EmptyStratum,
    ClampedProbability,
    FlaggedPropensity,
    ZeroVarianceCorrelation,
    SignFlipped,
    WeakProxy,
    SmallGroup,
    NoNonrespondents,
    RakeNotConverged,
    UnstableReplicates,
    EmptyResponseSet,
}

impl WarningCode {
    pub fn as_str(self) -> &'static str {
        match self {
            WarningCode::Separation => "W001_SEPARATION",
            WarningCode::NotConverged => "W002_NOT_CONVERGED",
            WarningCode::SkippedTerm => "W003_SKIPPED_TERM",
            WarningCode::DroppedColumns => "W004_DROPPED_COLUMNS",
            WarningCode::DegenerateStrata => "W005_DEGENERATE_STRATA",
            WarningCode::EmptyStratum => "W006_EMPTY_STRATUM",
            WarningCode::ClampedProbability => "W007_CLAMPED_PROBABILITY",
            WarningCode::FlaggedPropensity => "W008_FLAGGED_PROPENSITY",
            WarningCode::ZeroVarianceCorrelation => "W009_ZERO_VARIANCE_CORRELATION",
            WarningCode::SignFlipped => "W010_PROXY_SIGN_FLIPPED",
            WarningCode::WeakProxy => "W011_WEAK_PROXY",
            WarningCode::SmallGroup => "W012_SMALL_GROUP",
            WarningCode::NoNonrespondents => "W013_NO_NONRESPONDENTS",
            WarningCode::RakeNotConverged => "W014_RAKE_NOT_CONVERGED",
            WarningCode::UnstableReplicates => "W015_UNSTABLE_REPLICATES",
            WarningCode::EmptyResponseSet => "W016_EMPTY_RESPONSE_SET",
        }
    }
}

impl fmt::Display for WarningCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Warning {
    pub code: WarningCode,
    pub message: String,
}

impl Warning {
    pub fn new(code: WarningCode, message: impl Into<String>) -> Self {
        Warning {
            code,
            message: message.into(),
        }
    }
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.code, self.message)
    }
}
