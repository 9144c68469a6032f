use std::collections::BTreeSet;

use super::LieScenario;
use crate::algorithm::final_matching;
use crate::error::Result;
use crate::matching::Matching;
use crate::profile::{Person, PreferenceProfile, Ranking, Side};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct WomanOutcome {
    pub better_off: bool,
    pub worse_off: bool,
    pub unchanged: bool,
    pub weakly_better_off: bool,
    pub improved: bool,
    pub gained: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct ManOutcome {
    pub better_off: bool,
    pub worse_off: bool,
    pub unchanged: bool,
    pub gained_only_worse_matches: bool,
}

/// Original matching (truthful run), new matching (run with the declared
/// lists), and per-person flags judged by true preferences.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OutcomeReport {
    pub original: Matching,
    pub new: Matching,
    pub women: Vec<WomanOutcome>,
    pub men: Vec<ManOutcome>,
}

impl OutcomeReport {
    pub fn no_woman_worse_off(&self) -> bool {
        self.women.iter().all(|w| !w.worse_off)
    }

    pub fn no_man_better_off(&self) -> bool {
        self.men.iter().all(|m| !m.better_off)
    }

    pub fn all_women_weakly_better_off(&self) -> bool {
        self.women.iter().all(|w| w.weakly_better_off)
    }

    pub fn all_men_gained_only_worse(&self) -> bool {
        self.men.iter().all(|m| m.gained_only_worse_matches)
    }
}

/// Women's flags for a move from `old` to `new`, judged by `w`'s ranking.
pub(crate) fn woman_flags(ranking: &Ranking, w: usize, old: &BTreeSet<usize>, new: &BTreeSet<usize>) -> WomanOutcome {
    let p = Person::woman(w);
    let o = ranking.sorted(p, old);
    let n = ranking.sorted(p, new);
    let clean = n.iter().all(|&m| ranking.lists(p, m));
    let weakly_better_off = clean && !slot_worse(ranking, p, &o, &n);
    let improved = (0..o.len().min(n.len())).any(|i| ranking.prefers(p, n[i], o[i]));
    let gained = o.len() < n.len();
    WomanOutcome {
        better_off: weakly_better_off && slot_worse(ranking, p, &n, &o),
        worse_off: slot_worse(ranking, p, &o, &n),
        unchanged: old == new,
        weakly_better_off,
        improved,
        gained,
    }
}

fn man_flags(ranking: &Ranking, m: usize, old: &BTreeSet<usize>, new: &BTreeSet<usize>) -> ManOutcome {
    let p = Person::man(m);
    let o = ranking.sorted(p, old);
    let n = ranking.sorted(p, new);
    let gained_only_worse_matches = old
        .iter()
        .all(|&a| new.difference(old).all(|&b| ranking.prefers(p, a, b)));
    ManOutcome {
        better_off: slot_worse(ranking, p, &n, &o),
        worse_off: slot_worse(ranking, p, &o, &n),
        unchanged: old == new,
        gained_only_worse_matches,
    }
}

/// Slot `i` of `to` is worse for `p` than slot `i` of `from`, both sorted
/// best first. An empty slot sits below every listed partner and above every
/// unlisted one.
fn slot_worse(ranking: &Ranking, p: Person, from: &[usize], to: &[usize]) -> bool {
    let tier = |slots: &[usize], i: usize| match slots.get(i) {
        Some(&q) if ranking.lists(p, q) => 0,
        None => 1,
        Some(_) => 2,
    };
    (0..from.len().max(to.len())).any(|i| {
        let (a, b) = (tier(from, i), tier(to, i));
        a < b || (a == 0 && b == 0 && ranking.prefers(p, from[i], to[i]))
    })
}

/// Scores new matchings against the truthful run of a fixed profile.
#[derive(Debug, Clone)]
pub struct Evaluator {
    truth: PreferenceProfile,
    ranking: Ranking,
    original: Matching,
}

impl Evaluator {
    pub fn new(truth: &PreferenceProfile) -> Result<Self> {
        truth.ensure_valid()?;
        let original = final_matching(truth, Side::Man);
        Ok(Evaluator::with_original(truth, original))
    }

    /// Use a given original matching instead of the algorithm's.
    pub fn with_original(truth: &PreferenceProfile, original: Matching) -> Self {
        Evaluator { truth: truth.clone(), ranking: Ranking::new(truth), original }
    }

    pub fn truth(&self) -> &PreferenceProfile {
        &self.truth
    }

    pub fn ranking(&self) -> &Ranking {
        &self.ranking
    }

    pub fn original(&self) -> &Matching {
        &self.original
    }

    pub fn evaluate(&self, new: Matching) -> OutcomeReport {
        let women = (0..self.truth.women.len())
            .map(|w| {
                let p = Person::woman(w);
                woman_flags(&self.ranking, w, self.original.partners(p), new.partners(p))
            })
            .collect();
        let men = (0..self.truth.men.len())
            .map(|m| {
                let p = Person::man(m);
                man_flags(&self.ranking, m, self.original.partners(p), new.partners(p))
            })
            .collect();
        OutcomeReport { original: self.original.clone(), new, women, men }
    }

    /// Run the algorithm on `declared` (assumed valid) and score the result.
    pub fn evaluate_declared(&self, declared: &PreferenceProfile) -> OutcomeReport {
        self.evaluate(final_matching(declared, Side::Man))
    }
}

/// Runs the truthful and the declared profile and compares the outcomes.
pub fn compare_outcomes(scenario: &LieScenario) -> Result<OutcomeReport> {
    scenario.validate()?;
    let eval = Evaluator::new(&scenario.truth)?;
    Ok(eval.evaluate_declared(&scenario.declared_profile()))
}
