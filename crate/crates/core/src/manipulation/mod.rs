//! Lying women: scenarios overlaying declared lists on a true profile,
//! outcome comparison, exhaustive lie search and the rejecter certificate.

mod certificate;
mod outcome;
mod search;

use std::collections::BTreeMap;

pub use certificate::{build_chain, certificate_for, rejecter_analysis, Chain, ChainEnd, ChainStep, RejecterCertificate};
pub use outcome::{compare_outcomes, Evaluator, ManOutcome, OutcomeReport, WomanOutcome};
pub use search::{
    declarations, find_beneficial_lies, is_nash_equilibrium, is_personally_optimal, Constraint, LieClass,
    LieSpace, NashCheck, Optimality, SearchLimits, DEFAULT_SEARCH_CAP,
};
pub(crate) use outcome::woman_flags;
pub(crate) use search::DeclarationGrid;

use crate::error::{Error, Result};
use crate::matching::Matching;
use crate::profile::{Person, PreferenceProfile};
use crate::stability::{is_stable, StabilityReport};

/// A true profile plus the lists declared by the lying women.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LieScenario {
    pub truth: PreferenceProfile,
    /// Liar (woman index) to declared list of men, most preferred first.
    pub declared: BTreeMap<usize, Vec<usize>>,
}

impl LieScenario {
    pub fn new(truth: PreferenceProfile) -> Self {
        LieScenario { truth, declared: BTreeMap::new() }
    }

    pub fn declare(mut self, woman: usize, list: Vec<usize>) -> Self {
        self.declared.insert(woman, list);
        self
    }

    pub fn liars(&self) -> Vec<usize> {
        self.declared.keys().copied().collect()
    }

    pub fn is_liar(&self, woman: usize) -> bool {
        self.declared.contains_key(&woman)
    }

    /// The profile the algorithm sees: liars' lists replaced, everything a
    /// liar leaves out of her list treated as blacklisted.
    pub fn declared_profile(&self) -> PreferenceProfile {
        let mut out = self.truth.clone();
        for (&w, list) in &self.declared {
            out = out.with_declared(Person::woman(w), list.clone());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        self.truth.ensure_valid()?;
        let men = self.truth.men.len();
        for (&w, list) in &self.declared {
            let who = Person::woman(w);
            if w >= self.truth.women.len() {
                return Err(Error::InvalidScenario(format!("liar {who} is not on the roster")));
            }
            let mut seen = vec![false; men];
            for &m in list {
                if m >= men || std::mem::replace(&mut seen[m], true) {
                    return Err(Error::InvalidScenario(format!(
                        "{who}: declared list repeats or leaves the roster at {}",
                        Person::man(m)
                    )));
                }
            }
            if !self.truth.scenario.allows_incomplete_lists() && list.len() != men {
                return Err(Error::InvalidScenario(format!(
                    "{who}: {} scenario requires a complete declared list",
                    self.truth.scenario
                )));
            }
        }
        Ok(())
    }

    /// Stability of `matching` under the declared or the true preferences.
    pub fn stability(&self, matching: &Matching, use_declared: bool) -> Result<StabilityReport> {
        if use_declared {
            is_stable(&self.declared_profile(), matching)
        } else {
            is_stable(&self.truth, matching)
        }
    }
}
