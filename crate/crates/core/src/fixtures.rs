//! Built-in instances: the four-couple lying example and a few small
//! textbook profiles used across tests and the CLI.

use crate::manipulation::LieScenario;
use crate::profile::{Agent, PreferenceProfile, Scenario};

/// The four-couple example with unspecified list tails filled in
/// increasing index order.
pub fn four_couples() -> PreferenceProfile {
    PreferenceProfile::monogamous(
        vec![
            vec![2, 0, 1, 3],
            vec![2, 0, 1, 3],
            vec![1, 0, 2, 3],
            vec![0, 1, 2, 3],
        ],
        vec![
            vec![0, 2, 1, 3],
            vec![1, 2, 0, 3],
            vec![2, 1, 0, 3],
            vec![0, 3, 1, 2],
        ],
    )
}

/// w1 declares m3 > m4 > m1 > m2, w2 declares m1 > m3 > m2 > m4.
pub fn four_couples_lie() -> LieScenario {
    LieScenario::new(four_couples())
        .declare(0, vec![2, 3, 0, 1])
        .declare(1, vec![0, 2, 1, 3])
}

/// Two colleges (women, quota 2) and four students (men, quota 1). Every
/// student ranks college A first; A ranks s1, s2 on top.
pub fn college_profile() -> PreferenceProfile {
    PreferenceProfile::new(
        Scenario::QuotaBalanced,
        vec![
            Agent::new(vec![0, 1, 2, 3]).with_quota(2),
            Agent::new(vec![2, 3, 0, 1]).with_quota(2),
        ],
        (0..4).map(|_| Agent::new(vec![0, 1])).collect(),
    )
}

/// 2x2 instance with two stable matchings.
pub fn cyclic_two_by_two() -> PreferenceProfile {
    PreferenceProfile::monogamous(vec![vec![0, 1], vec![1, 0]], vec![vec![1, 0], vec![0, 1]])
}
