//! Rejecters, their witnesses, and the chain of strictly earlier rejections.
//!
//! A woman is a rejecter when she rejected, during the truthful run, a man
//! she is matched with in the new matching; `R(w)` collects those men. For a
//! rejected `r`, the witness `B(w, r)` is a man kept by `w` on the night she
//! rejected `r` who prefers every one of his new partners over `w`. Following
//! `m -> B(w, m) -> a rejecter of B(w, m) ...` must visit rejections on
//! strictly earlier nights, so it cannot go on forever; a chain seeded by a
//! man who has not gained only worse matches therefore exposes an
//! inconsistency.

use std::collections::{BTreeMap, HashSet};

use super::outcome::Evaluator;
use super::LieScenario;
use crate::algorithm::{run_unchecked, ExecutionTrace};
use crate::error::{Error, Result};
use crate::matching::Matching;
use crate::profile::{Person, PreferenceProfile, Ranking, Side};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainStep {
    pub woman: usize,
    pub man: usize,
    /// Night of the truthful run on which `woman` rejected `man`.
    pub night: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainEnd {
    /// The seed man is not rejected by any of his new partners in the
    /// truthful run.
    NotRejectee { man: usize },
    /// No kept man on the rejection night prefers all his new partners.
    MissingWitness { woman: usize, man: usize },
    /// The witness has no new partner who rejected him.
    NoRejecterPartner { man: usize },
    /// Step `second` revisits the pair of step `first`.
    Repeat { first: usize, second: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub seed: usize,
    pub steps: Vec<ChainStep>,
    pub end: ChainEnd,
    /// Whether every step's rejection night is strictly earlier than the
    /// previous step's.
    pub strictly_decreasing: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RejecterCertificate {
    /// `R(w)` for every rejecter `w`.
    pub rejected: BTreeMap<usize, Vec<usize>>,
    /// Rejection night for each `(w, r)` with `r` in `R(w)`.
    pub nights: BTreeMap<(usize, usize), usize>,
    /// `B(w, r)`, or `None` when no kept man satisfies the witness clauses.
    pub witnesses: BTreeMap<(usize, usize), Option<usize>>,
    /// Built only when some man has not gained only worse matches.
    pub chain: Option<Chain>,
}

impl RejecterCertificate {
    pub fn rejecters(&self) -> Vec<usize> {
        self.rejected.keys().copied().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.rejected.is_empty() && self.chain.is_none()
    }
}

/// Certificate for a lie scenario, from its truthful and declared runs.
pub fn rejecter_analysis(scenario: &LieScenario) -> Result<RejecterCertificate> {
    scenario.validate()?;
    let original = run_unchecked(&scenario.truth, Side::Man, true);
    let new = run_unchecked(&scenario.declared_profile(), Side::Man, false).final_matching;
    certificate_for(&scenario.truth, &original, &new)
}

/// Certificate for an arbitrary `new` matching against the truthful trace.
pub fn certificate_for(truth: &PreferenceProfile, original: &ExecutionTrace, new: &Matching) -> Result<RejecterCertificate> {
    let ctx = Context::new(truth, original, new)?;
    let mut cert = RejecterCertificate::default();
    for w in 0..truth.women.len() {
        let rs: Vec<usize> = new
            .partners(Person::woman(w))
            .iter()
            .copied()
            .filter(|&r| original.rejection_night(w, r).is_some())
            .collect();
        for &r in &rs {
            cert.nights.insert((w, r), original.rejection_night(w, r).unwrap());
            cert.witnesses.insert((w, r), ctx.witness(w, r));
        }
        if !rs.is_empty() {
            cert.rejected.insert(w, rs);
        }
    }
    let eval = Evaluator::with_original(truth, original.final_matching.clone());
    let report = eval.evaluate(new.clone());
    if let Some(seed) = report.men.iter().position(|m| !m.gained_only_worse_matches) {
        cert.chain = Some(ctx.chain(seed));
    }
    Ok(cert)
}

/// Chain seeded at `seed`, who must be a rejectee: some new partner of his
/// rejected him during the truthful run.
pub fn build_chain(truth: &PreferenceProfile, original: &ExecutionTrace, new: &Matching, seed: usize) -> Result<Chain> {
    let ctx = Context::new(truth, original, new)?;
    if seed >= truth.men.len() || ctx.rejecter_partner(seed, usize::MAX).is_none() {
        return Err(Error::CertificateUnavailable(format!(
            "{} is not rejected by any of his new partners",
            Person::man(seed)
        )));
    }
    Ok(ctx.chain(seed))
}

struct Context<'a> {
    original: &'a ExecutionTrace,
    new: &'a Matching,
    ranking: Ranking,
}

impl<'a> Context<'a> {
    fn new(truth: &PreferenceProfile, original: &'a ExecutionTrace, new: &'a Matching) -> Result<Self> {
        if original.proposing != Side::Man {
            return Err(Error::ScenarioMismatch("certificate needs a men-proposing trace".into()));
        }
        new.check_against(truth)?;
        Ok(Context { original, new, ranking: Ranking::new(truth) })
    }

    /// First kept man on the night `w` rejected `r` (in `w`'s order) who
    /// prefers each of his new partners over `w`.
    fn witness(&self, w: usize, r: usize) -> Option<usize> {
        let night = self.original.rejection_night(w, r)?;
        let record = &self.original.nights[night - 1];
        let kept = record.serenades[w]
            .iter()
            .copied()
            .filter(|&b| record.rejections.binary_search(&(w, b)).is_err());
        self.ranking.sorted(Person::woman(w), &kept.collect::<Vec<_>>()).into_iter().find(|&b| {
            let p = Person::man(b);
            self.new.partners(p).iter().all(|&x| self.ranking.prefers(p, x, w))
        })
    }

    /// A new partner of `m` who rejected him during the truthful run,
    /// preferring one who did so strictly before night `before`.
    fn rejecter_partner(&self, m: usize, before: usize) -> Option<(usize, usize)> {
        let mut options: Vec<(usize, usize)> = self
            .new
            .partners(Person::man(m))
            .iter()
            .filter_map(|&w| self.original.rejection_night(w, m).map(|t| (w, t)))
            .collect();
        options.sort_by_key(|&(w, t)| (t >= before, w));
        options.first().copied()
    }

    fn chain(&self, seed: usize) -> Chain {
        let mut steps = Vec::new();
        let mut seen = HashSet::new();
        let mut strictly_decreasing = true;
        let Some((w1, t1)) = self.rejecter_partner(seed, usize::MAX) else {
            return Chain { seed, steps, end: ChainEnd::NotRejectee { man: seed }, strictly_decreasing };
        };
        let mut step = ChainStep { woman: w1, man: seed, night: t1 };
        let end = loop {
            if !seen.insert((step.woman, step.man)) {
                let first = steps.iter().position(|s: &ChainStep| (s.woman, s.man) == (step.woman, step.man)).unwrap();
                break ChainEnd::Repeat { first, second: steps.len() };
            }
            let Some(b) = self.witness(step.woman, step.man) else {
                let (woman, man) = (step.woman, step.man);
                steps.push(step);
                break ChainEnd::MissingWitness { woman, man };
            };
            let Some((w_next, t_next)) = self.rejecter_partner(b, step.night) else {
                steps.push(step);
                break ChainEnd::NoRejecterPartner { man: b };
            };
            if t_next >= step.night {
                strictly_decreasing = false;
            }
            steps.push(step);
            step = ChainStep { woman: w_next, man: b, night: t_next };
        };
        Chain { seed, steps, end, strictly_decreasing }
    }
}
