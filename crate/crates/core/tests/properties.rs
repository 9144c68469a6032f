mod common;

use proptest::prelude::*;

use serenade::format::{parse_profile, parse_scenario, write_profile, write_scenario};
use serenade::manipulation::{
    compare_outcomes, declarations, is_nash_equilibrium, is_personally_optimal, LieScenario, LieSpace, SearchLimits,
};
use serenade::reductions::{pad_profile, padding_observation_holds, project_padded, project_replicated, replicate_women};
use serenade::stability::DEFAULT_ENUMERATION_CAP;
use serenade::verify::{check_sisterhood_monogamous, CheckConfig, InstanceGenerator};
use serenade::{enumerate_stable_matchings, is_stable, run_deferred_acceptance, run_monogamous_nights, Person, PreferenceProfile, Side};

fn one(g: InstanceGenerator) -> Option<PreferenceProfile> {
    g.generate(1).ok()?.pop()
}

/// Any of the three scenarios, rosters up to 3x3 so the subset oracle stays
/// cheap.
fn tiny_profile() -> impl Strategy<Value = PreferenceProfile> {
    (any::<u64>(), 1usize..=3, 1usize..=3, 0usize..3).prop_filter_map("quota sums cannot balance", |(seed, w, m, kind)| match kind {
        0 => one(InstanceGenerator::monogamous(seed, w)),
        1 => one(InstanceGenerator::quota(seed, w, m, 2)),
        _ => one(InstanceGenerator::blacklist(seed, w, m, 2, 0.3)),
    })
}

fn small_profile() -> impl Strategy<Value = PreferenceProfile> {
    (any::<u64>(), 1usize..=4, 1usize..=4, 0usize..3).prop_filter_map("quota sums cannot balance", |(seed, w, m, kind)| match kind {
        0 => one(InstanceGenerator::monogamous(seed, w)),
        1 => one(InstanceGenerator::quota(seed, w, m, 2)),
        _ => one(InstanceGenerator::blacklist(seed, w, m, 2, 0.4)),
    })
}

fn monogamous(max: usize) -> impl Strategy<Value = PreferenceProfile> {
    (any::<u64>(), 1usize..=max).prop_map(|(seed, n)| one(InstanceGenerator::monogamous(seed, n)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn output_is_stable(p in small_profile()) {
        let t = run_deferred_acceptance(&p, Side::Man).unwrap();
        prop_assert!(common::stable(&p, &t.final_matching));
        prop_assert!(is_stable(&p, &t.final_matching).unwrap().stable);
    }

    #[test]
    fn stability_agrees_with_oracle_on_every_matching(p in tiny_profile()) {
        for m in common::all_matchings(&p) {
            prop_assert_eq!(is_stable(&p, &m).unwrap().stable, common::stable(&p, &m), "{}", m);
        }
    }

    #[test]
    fn enumeration_agrees_with_oracle(p in tiny_profile()) {
        let lib = enumerate_stable_matchings(&p, DEFAULT_ENUMERATION_CAP).unwrap();
        prop_assert_eq!(lib, common::stable_matchings(&p));
    }

    #[test]
    fn proposers_get_their_best_stable_partners(p in tiny_profile()) {
        let da = run_deferred_acceptance(&p, Side::Man).unwrap().final_matching;
        prop_assert_eq!(&da, &common::sequential_da(&p));
        let stable = common::stable_matchings(&p);
        prop_assert!(stable.contains(&da));
        if p.scenario == serenade::Scenario::Monogamous {
            for s in &stable {
                for m in 0..p.men.len() {
                    let who = Person::man(m);
                    let (a, b) = (s.partner(who).unwrap(), da.partner(who).unwrap());
                    prop_assert!(common::rank(&p, who, b) <= common::rank(&p, who, a));
                }
                for w in 0..p.women.len() {
                    let who = Person::woman(w);
                    let (a, b) = (s.partner(who).unwrap(), da.partner(who).unwrap());
                    prop_assert!(common::rank(&p, who, a) <= common::rank(&p, who, b));
                }
            }
        }
    }

    #[test]
    fn women_proposing_is_the_swapped_run(p in small_profile()) {
        let direct = run_deferred_acceptance(&p, Side::Woman).unwrap();
        let swapped = run_deferred_acceptance(&p.swapped(), Side::Man).unwrap();
        prop_assert_eq!(direct.night_count(), swapped.night_count());
        let back: Vec<(usize, usize)> = swapped.final_matching.pairs().into_iter().map(|(m, w)| (w, m)).collect();
        let mut back = back;
        back.sort_unstable();
        prop_assert_eq!(direct.final_matching.pairs(), back);
    }

    #[test]
    fn general_engine_specialises_to_the_textbook_run(p in monogamous(5)) {
        let general = run_deferred_acceptance(&p, Side::Man).unwrap();
        let textbook = run_monogamous_nights(&p).unwrap();
        prop_assert_eq!(general, textbook);
    }

    #[test]
    fn night_count_is_bounded(p in small_profile()) {
        let t = run_deferred_acceptance(&p, Side::Man).unwrap();
        prop_assert!(t.night_count() <= p.women.len() * p.men.len() + 1);
    }

    #[test]
    fn runs_are_deterministic(p in small_profile()) {
        prop_assert_eq!(run_deferred_acceptance(&p, Side::Man).unwrap(), run_deferred_acceptance(&p, Side::Man).unwrap());
    }

    #[test]
    fn replication_reproduces_the_direct_run(seed in any::<u64>(), w in 1usize..=4, m in 1usize..=4) {
        let mut g = InstanceGenerator::quota(seed, w, m, 3);
        g.men_quota = (1, 1);
        let Ok(mut ps) = g.generate(1) else { return Ok(()) };
        let p = ps.pop().unwrap();
        let (rep, map) = replicate_women(&p).unwrap();
        prop_assert!(rep.validate().is_empty());
        let cloned = run_deferred_acceptance(&rep, Side::Man).unwrap().final_matching;
        let direct = run_deferred_acceptance(&p, Side::Man).unwrap().final_matching;
        prop_assert_eq!(project_replicated(&cloned, &map).unwrap(), direct);
    }

    #[test]
    fn padding_reproduces_the_direct_run(p in small_profile()) {
        let (padded, map) = pad_profile(&p).unwrap();
        prop_assert!(padded.validate().is_empty());
        let run = run_deferred_acceptance(&padded, Side::Man).unwrap().final_matching;
        let direct = run_deferred_acceptance(&p, Side::Man).unwrap().final_matching;
        prop_assert_eq!(project_padded(&run, &map).unwrap(), direct);
        prop_assert!(padding_observation_holds(&run, &map, |q| p.quota(q)));
    }

    #[test]
    fn profile_files_round_trip(p in small_profile()) {
        prop_assert_eq!(parse_profile(&write_profile(&p)).unwrap(), p);
    }
}

fn random_lie(p: &PreferenceProfile, picks: &[(usize, usize)]) -> LieScenario {
    let mut s = LieScenario::new(p.clone());
    for &(w, k) in picks {
        let w = w % p.women.len();
        let options = declarations(p, w, LieSpace::Permutations).unwrap();
        s.declared.insert(w, options[k % options.len()].clone());
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nash_is_every_liar_optimal(p in monogamous(4), picks in prop::collection::vec((0usize..4, 0usize..24), 0..3)) {
        let s = random_lie(&p, &picks);
        let nash = is_nash_equilibrium(&s, SearchLimits::default()).unwrap();
        let each = s.liars().iter().all(|&l| is_personally_optimal(&s, l, SearchLimits::default()).unwrap().optimal);
        prop_assert_eq!(nash.equilibrium, each);
    }

    #[test]
    fn sisterhood_holds_for_sampled_lies(p in monogamous(4), picks in prop::collection::vec((0usize..4, 0usize..24), 1..4)) {
        let s = random_lie(&p, &picks);
        let r = compare_outcomes(&s).unwrap();
        if s.liars().iter().all(|&l| !r.women[l].worse_off) {
            prop_assert!(r.no_woman_worse_off());
            prop_assert!(r.no_man_better_off());
        }
    }

    #[test]
    fn scenario_files_round_trip(p in monogamous(4), picks in prop::collection::vec((0usize..4, 0usize..24), 0..3)) {
        let s = random_lie(&p, &picks);
        prop_assert_eq!(parse_scenario(&write_scenario(&s)).unwrap(), s);
    }
}

#[test]
fn symmetry_classes_match_union_find() {
    for n in 1..=3 {
        let lib = serenade::verify::monogamous_up_to_symmetry(n).unwrap().len();
        assert_eq!(lib, common::orbit_count(n), "n = {n}");
    }
}

#[test]
fn same_seed_same_check_counts() {
    let run = || {
        let instances = InstanceGenerator::monogamous(11, 3).generate(20).unwrap();
        check_sisterhood_monogamous(&instances, &CheckConfig::default()).unwrap()
    };
    let (a, b) = (run(), run());
    assert_eq!((a.instances, a.scenarios, a.violation_count), (b.instances, b.scenarios, b.violation_count));
    assert_eq!(a.counters, b.counters);
}

#[test]
fn cyclic_instance_has_two_stable_matchings() {
    let p = serenade::fixtures::cyclic_two_by_two();
    let s = enumerate_stable_matchings(&p, DEFAULT_ENUMERATION_CAP).unwrap();
    assert_eq!(s, common::stable_matchings(&p));
    assert_eq!(s.len(), 2);
}
