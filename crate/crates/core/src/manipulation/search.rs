use std::collections::BTreeMap;

use itertools::Itertools;
use rayon::prelude::*;

use super::outcome::{woman_flags, Evaluator, OutcomeReport};
use super::LieScenario;
use crate::algorithm::final_matching;
use crate::error::{Error, Result};
use crate::matching::Matching;
use crate::profile::{Person, PreferenceProfile, Scenario, Side};

/// Default cap on candidate declaration profiles per search.
pub const DEFAULT_SEARCH_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_candidates: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_candidates: DEFAULT_SEARCH_CAP }
    }
}

/// Which lists a liar may declare.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LieSpace {
    /// Reorderings only: every man in monogamous and quota profiles, the
    /// woman's own acceptable set in blacklist profiles.
    Permutations,
    /// Any ordered selection of men, including truncated lists. Blacklist
    /// profiles only.
    WithTruncation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    /// No liar is worse-off.
    NoLiarWorse,
    /// Every liar is weakly better-off.
    AllLiarsWeaklyBetter,
}

impl Constraint {
    pub fn admits(self, report: &OutcomeReport, liars: &[usize]) -> bool {
        match self {
            Constraint::NoLiarWorse => liars.iter().all(|&l| !report.women[l].worse_off),
            Constraint::AllLiarsWeaklyBetter => liars.iter().all(|&l| report.women[l].weakly_better_off),
        }
    }
}

/// One equivalence class of beneficial lies: all declarations producing the
/// same new matching. `scenario` is the first member in enumeration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieClass {
    pub scenario: LieScenario,
    pub report: OutcomeReport,
    pub size: usize,
}

/// Every list woman `w` may declare under `space`, full-length lists first,
/// each length in lexicographic order.
pub fn declarations(truth: &PreferenceProfile, w: usize, space: LieSpace) -> Result<Vec<Vec<usize>>> {
    let men = truth.men.len();
    match space {
        LieSpace::Permutations => {
            let mut base = if truth.scenario.allows_incomplete_lists() {
                truth.women[w].pref.clone()
            } else {
                (0..men).collect()
            };
            base.sort_unstable();
            let k = base.len();
            Ok(base.into_iter().permutations(k).collect())
        }
        LieSpace::WithTruncation => {
            if truth.scenario != Scenario::BlacklistGeneral {
                return Err(Error::ScenarioMismatch(format!(
                    "truncated declarations need the blacklist scenario, profile is {}",
                    truth.scenario
                )));
            }
            Ok((0..=men).rev().flat_map(|k| (0..men).permutations(k)).collect())
        }
    }
}

fn space_for(allow_truncation: bool) -> LieSpace {
    if allow_truncation {
        LieSpace::WithTruncation
    } else {
        LieSpace::Permutations
    }
}

fn checked_product(sizes: impl IntoIterator<Item = usize>, cap: u64) -> Result<u64> {
    let size: u128 = sizes.into_iter().map(|s| s as u128).product();
    if size > cap as u128 {
        return Err(Error::SearchSpaceTooLarge { size, cap });
    }
    Ok(size as u64)
}

/// Every declaration profile for `liars`, in mixed-radix order with the last
/// liar varying fastest. Yields `(index, declared lists)`.
pub(crate) struct DeclarationGrid {
    liars: Vec<usize>,
    options: Vec<Vec<Vec<usize>>>,
    total: u64,
}

impl DeclarationGrid {
    pub(crate) fn new(truth: &PreferenceProfile, liars: &[usize], space: LieSpace, cap: u64) -> Result<Self> {
        let options = liars
            .iter()
            .map(|&w| declarations(truth, w, space))
            .collect::<Result<Vec<_>>>()?;
        let total = checked_product(options.iter().map(|o| o.len()), cap)?;
        Ok(DeclarationGrid { liars: liars.to_vec(), options, total })
    }

    pub(crate) fn total(&self) -> u64 {
        self.total
    }

    pub(crate) fn profile(&self, truth: &PreferenceProfile, mut index: u64) -> PreferenceProfile {
        let mut out = truth.clone();
        for (k, &w) in self.liars.iter().enumerate().rev() {
            let radix = self.options[k].len() as u64;
            let list = &self.options[k][(index % radix) as usize];
            index /= radix;
            out = out.with_declared(Person::woman(w), list.clone());
        }
        out
    }

    pub(crate) fn scenario(&self, truth: &PreferenceProfile, mut index: u64) -> LieScenario {
        let mut s = LieScenario::new(truth.clone());
        for (k, &w) in self.liars.iter().enumerate().rev() {
            let radix = self.options[k].len() as u64;
            s.declared.insert(w, self.options[k][(index % radix) as usize].clone());
            index /= radix;
        }
        s
    }
}

fn check_liars(truth: &PreferenceProfile, liars: &[usize]) -> Result<()> {
    for (i, &w) in liars.iter().enumerate() {
        if w >= truth.women.len() || liars[..i].contains(&w) {
            return Err(Error::InvalidScenario(format!("bad liar set {liars:?}")));
        }
    }
    Ok(())
}

/// Exhaustive search for lies by `liars` that satisfy `constraint` and make
/// at least one liar better-off, grouped by the new matching they produce.
pub fn find_beneficial_lies(
    truth: &PreferenceProfile,
    liars: &[usize],
    constraint: Constraint,
    allow_truncation: bool,
    limits: SearchLimits,
) -> Result<Vec<LieClass>> {
    check_liars(truth, liars)?;
    let eval = Evaluator::new(truth)?;
    let grid = DeclarationGrid::new(truth, liars, space_for(allow_truncation), limits.max_candidates)?;
    let hits: Vec<(u64, OutcomeReport)> = (0..grid.total())
        .into_par_iter()
        .filter_map(|i| {
            let report = eval.evaluate_declared(&grid.profile(truth, i));
            let beneficial = constraint.admits(&report, liars) && liars.iter().any(|&l| report.women[l].better_off);
            beneficial.then_some((i, report))
        })
        .collect();

    let mut classes: Vec<LieClass> = Vec::new();
    let mut by_matching: BTreeMap<Matching, usize> = BTreeMap::new();
    for (i, report) in hits {
        match by_matching.get(&report.new) {
            Some(&k) => classes[k].size += 1,
            None => {
                by_matching.insert(report.new.clone(), classes.len());
                classes.push(LieClass { scenario: grid.scenario(truth, i), report, size: 1 });
            }
        }
    }
    Ok(classes)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Optimality {
    pub optimal: bool,
    /// A declaration that would leave the liar better-off, with the matching
    /// it produces.
    pub witness: Option<(Vec<usize>, Matching)>,
}

/// Whether `liar`'s declaration is a best response to everyone else's.
/// Searches every list she could declare instead (the truth included).
pub fn is_personally_optimal(scenario: &LieScenario, liar: usize, limits: SearchLimits) -> Result<Optimality> {
    scenario.validate()?;
    if !scenario.is_liar(liar) {
        return Err(Error::InvalidScenario(format!("{} is not a liar", Person::woman(liar))));
    }
    let truth = &scenario.truth;
    let space = if truth.scenario == Scenario::BlacklistGeneral {
        LieSpace::WithTruncation
    } else {
        LieSpace::Permutations
    };
    let options = declarations(truth, liar, space)?;
    checked_product([options.len()], limits.max_candidates)?;
    let base = scenario.declared_profile();
    let current = final_matching(&base, Side::Man);
    let eval = Evaluator::with_original(truth, current.clone());
    let who = Person::woman(liar);
    let witness = options.into_par_iter().find_map_first(|list| {
        let new = final_matching(&base.with_declared(who, list.clone()), Side::Man);
        let flags = woman_flags(eval.ranking(), liar, current.partners(who), new.partners(who));
        flags.better_off.then_some((list, new))
    });
    Ok(Optimality { optimal: witness.is_none(), witness })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NashCheck {
    pub equilibrium: bool,
    /// First liar (by index) with a profitable unilateral deviation.
    pub deviation: Option<(usize, Vec<usize>)>,
}

/// The declared lists form a Nash equilibrium of the lying game exactly when
/// every liar's declaration is personally optimal.
pub fn is_nash_equilibrium(scenario: &LieScenario, limits: SearchLimits) -> Result<NashCheck> {
    for liar in scenario.liars() {
        let opt = is_personally_optimal(scenario, liar, limits)?;
        if let Some((list, _)) = opt.witness {
            return Ok(NashCheck { equilibrium: false, deviation: Some((liar, list)) });
        }
    }
    scenario.validate()?;
    Ok(NashCheck { equilibrium: true, deviation: None })
}
