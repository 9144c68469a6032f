use itertools::Itertools;

use crate::algorithm::final_matching;
use crate::error::{Error, Result};
use crate::manipulation::{
    declarations, woman_flags, Constraint, DeclarationGrid, Evaluator, LieScenario, LieSpace, OutcomeReport,
};
use crate::matching::Matching;
use crate::profile::{Person, PreferenceProfile, Ranking, Scenario, Side};
use crate::reductions::{pad_profile, padding_observation_holds, project_padded, project_replicated, replicate_women, slot_view};
use crate::stability::{enumerate_stable_matchings, stable_quick};

use super::{drive, liar_sets, CheckConfig, CheckResult};

pub const PROPERTIES: &[&str] = &[
    "sisterhood-monogamous",
    "sisterhood-polygamous",
    "proposer-side",
    "match-size",
    "lone-liar",
    "replication",
    "padding",
    "personal-optimality",
    "truncation",
];

/// Dispatch by property name (see [`PROPERTIES`]).
pub fn run_property(name: &str, instances: &[PreferenceProfile], cfg: &CheckConfig) -> Result<CheckResult> {
    match name {
        "sisterhood-monogamous" => check_sisterhood_monogamous(instances, cfg),
        "sisterhood-polygamous" => check_sisterhood_polygamous(instances, cfg),
        "proposer-side" => check_proposer_side_properties(instances, cfg),
        "match-size" => check_match_size_invariance(instances, cfg),
        "lone-liar" => check_lone_liar_helps_innocent(instances, cfg),
        "replication" => check_replication_equivalence(instances, cfg),
        "padding" => check_padding_equivalence(instances, cfg),
        "personal-optimality" => check_personally_optimal_stability(instances, cfg),
        "truncation" => check_truncation_sufficiency(instances, cfg),
        other => Err(Error::InvalidScenario(format!("unknown property `{other}`"))),
    }
}

fn require(p: &PreferenceProfile, scenario: Scenario, check: &str) -> Result<()> {
    if p.scenario != scenario {
        return Err(Error::ScenarioMismatch(format!("{check} needs {scenario} profiles, got {}", p.scenario)));
    }
    Ok(())
}

fn lie_space(p: &PreferenceProfile, cfg: &CheckConfig) -> LieSpace {
    if cfg.allow_truncation && p.scenario == Scenario::BlacklistGeneral {
        LieSpace::WithTruncation
    } else {
        LieSpace::Permutations
    }
}

/// Calls `f` with every lie profile of every liar set up to `cfg.max_liars`.
fn each_lie(
    p: &PreferenceProfile,
    cfg: &CheckConfig,
    space: LieSpace,
    sets: Vec<Vec<usize>>,
    mut f: impl FnMut(&[usize], &PreferenceProfile, &dyn Fn() -> LieScenario) -> Result<()>,
) -> Result<()> {
    for liars in sets {
        let grid = DeclarationGrid::new(p, &liars, space, cfg.limits.max_candidates)?;
        for i in 0..grid.total() {
            let declared = grid.profile(p, i);
            f(&liars, &declared, &|| grid.scenario(p, i))?;
        }
    }
    Ok(())
}

/// Monogamous sisterhood: whenever no liar is worse-off, no woman is
/// worse-off and no man is better-off; each better-off woman is matched to a
/// worse-off man.
pub fn check_sisterhood_monogamous(instances: &[PreferenceProfile], cfg: &CheckConfig) -> Result<CheckResult> {
    drive("sisterhood-monogamous", instances, cfg, |p, cfg, t| {
        require(p, Scenario::Monogamous, "sisterhood-monogamous")?;
        let eval = Evaluator::new(p)?;
        each_lie(p, cfg, LieSpace::Permutations, liar_sets(p.women.len(), cfg.max_liars), |liars, declared, scenario| {
            t.scenario();
            let r = eval.evaluate_declared(declared);
            if !Constraint::NoLiarWorse.admits(&r, liars) {
                return Ok(());
            }
            t.bump("no liar worse-off");
            if liars.iter().any(|&l| r.women[l].better_off) {
                t.bump("some liar better-off");
            }
            let mut problems = Vec::new();
            for (w, f) in r.women.iter().enumerate() {
                if f.worse_off {
                    problems.push(format!("{} is worse-off", Person::woman(w)));
                }
                if f.better_off {
                    let m = r.new.partner(Person::woman(w)).expect("better-off woman is matched");
                    if !r.men[m].worse_off {
                        problems.push(format!("better-off {} has {} who is not worse-off", Person::woman(w), Person::man(m)));
                    }
                }
            }
            for (m, f) in r.men.iter().enumerate() {
                if f.better_off {
                    problems.push(format!("{} is better-off", Person::man(m)));
                }
            }
            if !problems.is_empty() {
                t.violate(problems.join("\n"), scenario(), Some(r));
            }
            Ok(())
        })
    })
}

/// Polygamous sisterhood: whenever every liar is weakly better-off, all
/// women are weakly better-off and all men gained only worse matches. The
/// same conclusion under the weaker "no liar worse-off" premise is tallied,
/// not asserted. Replicable profiles are also cross-checked against the
/// monogamous run on clones.
pub fn check_sisterhood_polygamous(instances: &[PreferenceProfile], cfg: &CheckConfig) -> Result<CheckResult> {
    drive("sisterhood-polygamous", instances, cfg, |p, cfg, t| {
        let eval = Evaluator::new(p)?;
        let replicable = p.scenario != Scenario::BlacklistGeneral && p.men.iter().all(|a| a.quota == 1);
        each_lie(p, cfg, lie_space(p, cfg), liar_sets(p.women.len(), cfg.max_liars), |liars, declared, scenario| {
            t.scenario();
            let r = eval.evaluate_declared(declared);
            if replicable {
                t.bump("replication cross-checks");
                if let Some(problem) = replication_mismatch(declared, &r.new)? {
                    t.violate(problem, scenario(), Some(r.clone()));
                }
            }
            let conclusion = r.all_women_weakly_better_off() && r.all_men_gained_only_worse();
            if Constraint::AllLiarsWeaklyBetter.admits(&r, liars) {
                t.bump("all liars weakly better-off");
                if !conclusion {
                    t.violate(polygamous_problems(&r), scenario(), Some(r));
                }
            } else if Constraint::NoLiarWorse.admits(&r, liars) {
                t.bump("weaker premise only");
                if !conclusion {
                    t.bump("weaker premise only, conclusion fails");
                    let innocents_ok = r.women.iter().enumerate().all(|(w, f)| liars.contains(&w) || f.weakly_better_off);
                    if !(innocents_ok && r.all_men_gained_only_worse()) {
                        t.bump("weaker premise only, conclusion fails beyond the liars");
                    }
                }
            }
            Ok(())
        })
    })
}

fn polygamous_problems(r: &OutcomeReport) -> String {
    let mut problems = Vec::new();
    for (w, f) in r.women.iter().enumerate() {
        if !f.weakly_better_off {
            problems.push(format!("{} is not weakly better-off", Person::woman(w)));
        }
    }
    for (m, f) in r.men.iter().enumerate() {
        if !f.gained_only_worse_matches {
            problems.push(format!("{} gained a match he prefers to one he kept", Person::man(m)));
        }
    }
    problems.join("\n")
}

/// `None` when running on clones and merging them back gives `direct`, with
/// clone `(w,i)` holding `w`'s `i`-th best partner.
fn replication_mismatch(profile: &PreferenceProfile, direct: &Matching) -> Result<Option<String>> {
    let (rep, map) = replicate_women(profile)?;
    let cloned = final_matching(&rep, Side::Man);
    let merged = project_replicated(&cloned, &map)?;
    if &merged != direct {
        return Ok(Some(format!("replicated run gives {merged}, direct run gives {direct}")));
    }
    let ranking = Ranking::new(profile);
    for (w, slots) in slot_view(&cloned, &map)?.into_iter().enumerate() {
        let ranked = ranking.sorted(Person::woman(w), direct.partners(Person::woman(w)));
        let filled: Vec<usize> = slots.iter().flatten().copied().collect();
        if filled != ranked || slots[..filled.len()].iter().any(Option::is_none) {
            return Ok(Some(format!("clones of {} hold {slots:?}, expected {ranked:?} in order", Person::woman(w))));
        }
    }
    Ok(None)
}

/// Man-optimality and woman-pessimality against every stable matching,
/// futility of any single man's lie, and a profitable single-woman lie
/// whenever more than one stable matching exists.
pub fn check_proposer_side_properties(instances: &[PreferenceProfile], cfg: &CheckConfig) -> Result<CheckResult> {
    drive("proposer-side", instances, cfg, |p, cfg, t| {
        require(p, Scenario::Monogamous, "proposer-side")?;
        t.scenario();
        let truthful = LieScenario::new(p.clone());
        let eval = Evaluator::new(p)?;
        let ranking = eval.ranking();
        let da = eval.original().clone();
        let stable = enumerate_stable_matchings(p, cfg.limits.max_candidates)?;
        if !stable.contains(&da) {
            t.violate(format!("algorithm output {da} is not among the stable matchings"), truthful.clone(), None);
        }
        for s in &stable {
            for m in 0..p.men.len() {
                let (a, b) = (s.partner(Person::man(m)), da.partner(Person::man(m)));
                if let (Some(a), Some(b)) = (a, b) {
                    if ranking.prefers(Person::man(m), a, b) {
                        t.violate(format!("{} prefers stable matching {s}", Person::man(m)), truthful.clone(), None);
                    }
                }
            }
            for w in 0..p.women.len() {
                let (a, b) = (s.partner(Person::woman(w)), da.partner(Person::woman(w)));
                if let (Some(a), Some(b)) = (a, b) {
                    if ranking.prefers(Person::woman(w), b, a) {
                        t.violate(format!("{} is worse off in stable matching {s}", Person::woman(w)), truthful.clone(), None);
                    }
                }
            }
        }
        for m in 0..p.men.len() {
            for list in (0..p.women.len()).permutations(p.women.len()) {
                t.bump("man lies tried");
                let r = eval.evaluate_declared(&p.with_declared(Person::man(m), list.clone()));
                if r.men[m].better_off {
                    t.violate(
                        format!("{} gains by declaring {list:?}: {}", Person::man(m), r.new),
                        truthful.clone(),
                        Some(r),
                    );
                }
            }
        }
        if stable.len() >= 2 {
            t.bump("several stable matchings");
            // With complete lists nobody in a 2x2 cycle is ever rejected, so
            // the lying woman may also truncate.
            let mut open = p.clone();
            open.scenario = Scenario::BlacklistGeneral;
            let gainer = (0..p.women.len()).find_map(|w| {
                declarations(&open, w, LieSpace::WithTruncation).ok()?.into_iter().find(|list| {
                    eval.evaluate_declared(&open.with_declared(Person::woman(w), list.clone())).women[w].better_off
                })
            });
            match gainer {
                Some(_) => t.bump("woman with a profitable lie found"),
                None => t.violate("several stable matchings but no woman gains by lying".into(), truthful, None),
            }
        }
        Ok(())
    })
}

/// Under "all liars weakly better-off", everyone keeps the same number of
/// partners; women never lose slots and men never gain them.
pub fn check_match_size_invariance(instances: &[PreferenceProfile], cfg: &CheckConfig) -> Result<CheckResult> {
    drive("match-size", instances, cfg, |p, cfg, t| {
        let eval = Evaluator::new(p)?;
        each_lie(p, cfg, lie_space(p, cfg), liar_sets(p.women.len(), cfg.max_liars), |liars, declared, scenario| {
            t.scenario();
            let r = eval.evaluate_declared(declared);
            if !Constraint::AllLiarsWeaklyBetter.admits(&r, liars) {
                return Ok(());
            }
            t.bump("all liars weakly better-off");
            let mut problems = Vec::new();
            for person in p.people() {
                let (o, n) = (r.original.partners(person).len(), r.new.partners(person).len());
                match person.side {
                    Side::Woman if n < o => problems.push(format!("{person} lost a slot ({o} -> {n})")),
                    Side::Man if n > o => problems.push(format!("{person} gained a slot ({o} -> {n})")),
                    _ if n != o => problems.push(format!("{person} changed size ({o} -> {n})")),
                    _ => {}
                }
            }
            if !problems.is_empty() {
                t.violate(problems.join("\n"), scenario(), Some(r));
            }
            Ok(())
        })
    })
}

/// A lone liar who ends up better-off is never the only woman who gains.
pub fn check_lone_liar_helps_innocent(instances: &[PreferenceProfile], cfg: &CheckConfig) -> Result<CheckResult> {
    drive("lone-liar", instances, cfg, |p, cfg, t| {
        require(p, Scenario::Monogamous, "lone-liar")?;
        let eval = Evaluator::new(p)?;
        let singles = (0..p.women.len()).map(|w| vec![w]).collect();
        each_lie(p, cfg, LieSpace::Permutations, singles, |liars, declared, scenario| {
            t.scenario();
            let r = eval.evaluate_declared(declared);
            let l = liars[0];
            if !(r.women[l].better_off && !r.women[l].worse_off) {
                return Ok(());
            }
            t.bump("lone liar better-off");
            if !r.women.iter().enumerate().any(|(w, f)| w != l && f.better_off) {
                t.violate(format!("only the liar {} is better-off", Person::woman(l)), scenario(), Some(r));
            }
            Ok(())
        })
    })
}

/// Running on clones and merging back reproduces the direct run.
pub fn check_replication_equivalence(instances: &[PreferenceProfile], cfg: &CheckConfig) -> Result<CheckResult> {
    drive("replication", instances, cfg, |p, _, t| {
        t.scenario();
        let direct = final_matching(p, Side::Man);
        if let Some(problem) = replication_mismatch(p, &direct)? {
            t.violate(problem, LieScenario::new(p.clone()), None);
        }
        Ok(())
    })
}

/// Running on the padded profile and dropping dummies reproduces the direct
/// run, and every unfilled slot goes to the person's own top dummies.
pub fn check_padding_equivalence(instances: &[PreferenceProfile], cfg: &CheckConfig) -> Result<CheckResult> {
    drive("padding", instances, cfg, |p, _, t| {
        t.scenario();
        let direct = final_matching(p, Side::Man);
        let (padded, map) = pad_profile(p)?;
        if let Err(e) = padded.ensure_valid() {
            t.violate(format!("padded profile is invalid: {e}"), LieScenario::new(p.clone()), None);
            return Ok(());
        }
        let run = final_matching(&padded, Side::Man);
        let projected = project_padded(&run, &map)?;
        if projected != direct {
            t.violate(format!("padded run gives {projected}, direct run gives {direct}"), LieScenario::new(p.clone()), None);
        } else if !padding_observation_holds(&run, &map, |q| p.quota(q)) {
            t.violate(format!("dummies are not filling top slots in {run}"), LieScenario::new(p.clone()), None);
        }
        Ok(())
    })
}

/// When no liar can improve on her declaration alone, the resulting
/// matching is stable under the true lists.
pub fn check_personally_optimal_stability(instances: &[PreferenceProfile], cfg: &CheckConfig) -> Result<CheckResult> {
    drive("personal-optimality", instances, cfg, |p, cfg, t| {
        p.ensure_valid()?;
        let ranking = Ranking::new(p);
        // Deviations range over the same lists as `is_personally_optimal`.
        let space = if p.scenario == Scenario::BlacklistGeneral { LieSpace::WithTruncation } else { LieSpace::Permutations };
        let options: Vec<Vec<Vec<usize>>> =
            (0..p.women.len()).map(|w| declarations(p, w, space)).collect::<Result<_>>()?;
        let sets = liar_sets(p.women.len(), cfg.max_liars);
        each_lie(p, cfg, lie_space(p, cfg), sets, |liars, declared, scenario| {
            t.scenario();
            let new = final_matching(declared, Side::Man);
            let optimal = liars.iter().all(|&l| {
                let who = Person::woman(l);
                options[l].iter().all(|list| {
                    let alt = final_matching(&declared.with_declared(who, list.clone()), Side::Man);
                    !woman_flags(&ranking, l, new.partners(who), alt.partners(who)).better_off
                })
            });
            if !optimal {
                return Ok(());
            }
            t.bump("all liars personally optimal");
            if !stable_quick(p, &ranking, &new) {
                t.violate(format!("{new} is unstable under the true lists"), scenario(), None);
            }
            Ok(())
        })
    })
}

/// Whenever a woman can gain by some unilateral lie, she can also gain by
/// declaring a prefix of her true list.
pub fn check_truncation_sufficiency(instances: &[PreferenceProfile], cfg: &CheckConfig) -> Result<CheckResult> {
    drive("truncation", instances, cfg, |p, _, t| {
        require(p, Scenario::BlacklistGeneral, "truncation")?;
        let eval = Evaluator::new(p)?;
        for w in 0..p.women.len() {
            t.scenario();
            let who = Person::woman(w);
            let gains = |list: &Vec<usize>| eval.evaluate_declared(&p.with_declared(who, list.clone())).women[w].better_off;
            let Some(lie) = declarations(p, w, LieSpace::WithTruncation)?.into_iter().find(|l| gains(l)) else {
                continue;
            };
            t.bump("woman with a profitable lie");
            let truth = &p.women[w].pref;
            if !(0..truth.len()).any(|k| gains(&truth[..k].to_vec())) {
                let s = LieScenario::new(p.clone()).declare(w, lie);
                let r = eval.evaluate_declared(&s.declared_profile());
                t.violate(format!("{who} gains only by reordering, no truncation helps"), s, Some(r));
            }
        }
        Ok(())
    })
}
