use serenade::fixtures::{four_couples_lie, four_couples};
use serenade::format::{parse_matching, render_trace_records};
use serenade::{run_deferred_acceptance, ExecutionTrace, Matching, Side};

/// Windows per night, `w1..w4`, men 1-based as printed.
type Table = &'static [[&'static [usize]; 4]];

const TRUTHFUL: Table = &[
    [&[4, 1], &[2], &[3], &[]],
    [&[1], &[2], &[3], &[4]],
];

const LYING: Table = &[
    [&[4, 1], &[2], &[3], &[]],
    [&[4], &[2], &[1, 3], &[]],
    [&[4], &[2, 3], &[1], &[]],
    [&[4], &[3], &[1, 2], &[]],
    [&[4], &[1, 3], &[2], &[]],
    [&[3, 4], &[1], &[2], &[]],
    [&[3], &[1], &[2], &[4]],
];

fn assert_table(trace: &ExecutionTrace, table: Table) {
    assert_eq!(trace.night_count(), table.len());
    for (t, row) in table.iter().enumerate() {
        for (w, expected) in row.iter().enumerate() {
            let mut want: Vec<usize> = expected.iter().map(|m| m - 1).collect();
            want.sort_unstable();
            assert_eq!(trace.window(t + 1, w), want.as_slice(), "night {} window w{}", t + 1, w + 1);
        }
    }
}

#[test]
fn truthful_run_matches_the_first_table() {
    let t = run_deferred_acceptance(&four_couples(), Side::Man).unwrap();
    assert_table(&t, TRUTHFUL);
    assert_eq!(t.final_matching, Matching::from_pairs(4, 4, [(0, 0), (1, 1), (2, 2), (3, 3)]));
    // w1 turns m4 away on the first night and nobody else is rejected.
    assert_eq!(t.nights[0].rejections, vec![(0, 3)]);
    assert!(t.nights[1].rejections.is_empty());
    assert_eq!(t.rejection_night(0, 3), Some(1));
}

#[test]
fn lying_run_matches_the_second_table() {
    let t = run_deferred_acceptance(&four_couples_lie().declared_profile(), Side::Man).unwrap();
    assert_table(&t, LYING);
    assert_eq!(t.final_matching, Matching::from_pairs(4, 4, [(0, 2), (1, 0), (2, 1), (3, 3)]));
    // Each night one man is sent on: m1 by w1, m3 by w3, m2 by w2, m1 by w3,
    // m3 by w2, m4 by w1.
    let rejections: Vec<Vec<(usize, usize)>> = t.nights.iter().map(|n| n.rejections.clone()).collect();
    assert_eq!(
        rejections,
        vec![vec![(0, 0)], vec![(2, 2)], vec![(1, 1)], vec![(2, 0)], vec![(1, 2)], vec![(0, 3)], vec![]]
    );
}

#[test]
fn records_round_trip_the_final_matching() {
    for profile in [four_couples(), four_couples_lie().declared_profile()] {
        let t = run_deferred_acceptance(&profile, Side::Man).unwrap();
        let text = render_trace_records(&t);
        assert_eq!(parse_matching(&text, 4, 4).unwrap(), t.final_matching);
        assert_eq!(text.lines().filter(|l| l.contains(" reject ")).count(), t.nights.iter().map(|n| n.rejections.len()).sum::<usize>());
    }
}

/// A woman who declares a man she truly blacklists and ends up with him is
/// worse-off than staying single, and can do better by telling the truth.
#[test]
fn blacklisted_partner_is_worse_than_an_empty_slot() {
    let text = "scenario blacklist\nside women 3\nside men 3\n\
        pref w1: m2 m1\npref w2: m3\npref w3: m3 m2\n\
        pref m1: w1 w3 w2\npref m2: w3 w2\npref m3: w1 w3\n\
        blacklist w1: m3\nblacklist w2: m1 m2\nblacklist w3: m1\nblacklist m2: w1\nblacklist m3: w2\n\
        declare w2: m1 m2 m3\n";
    let s = serenade::format::parse_scenario(text).unwrap();
    let r = serenade::compare_outcomes(&s).unwrap();
    assert_eq!(r.new.partners(serenade::Person::woman(1)).iter().copied().collect::<Vec<_>>(), vec![1]);
    assert!(r.women[1].worse_off && !r.women[1].weakly_better_off);
    let opt = serenade::is_personally_optimal(&s, 1, Default::default()).unwrap();
    assert!(!opt.optimal);
    assert!(!serenade::is_stable(&s.truth, &r.new).unwrap().stable);
}
