//! Deferred acceptance for two-sided matching, with per-night traces,
//! stability checks, reductions between matching models, and tools for
//! studying how women can gain by misreporting their preferences.

pub mod algorithm;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod manipulation;
pub mod matching;
pub mod profile;
pub mod reductions;
pub mod stability;
pub mod verify;

pub use algorithm::{run_deferred_acceptance, run_monogamous_nights, ExecutionTrace, NightRecord};
pub use error::{Error, Result};
pub use manipulation::{
    compare_outcomes, find_beneficial_lies, is_nash_equilibrium, is_personally_optimal, rejecter_analysis, Constraint,
    LieScenario, OutcomeReport, SearchLimits,
};
pub use matching::Matching;
pub use profile::{Agent, Person, PreferenceProfile, Ranking, Scenario, Side, Violation};
pub use stability::{enumerate_stable_matchings, is_stable, Blocking, StabilityReport};
