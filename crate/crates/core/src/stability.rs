//! Stability checking and the brute-force enumeration of stable matchings.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::matching::Matching;
use crate::profile::{Person, PreferenceProfile, Ranking};

/// Default cap on the number of quota-respecting matchings visited by
/// [`enumerate_stable_matchings`].
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Blocking {
    /// Couples `(w, m)` and `(w~, m~)`, `w` not matched with `m~`, where `w`
    /// prefers `m~` over `m` and `m~` prefers `w` over `w~`.
    Pair { couple: (usize, usize), other: (usize, usize) },
    /// Couple `(w, m)` and a person `p` of either side with a free slot, who
    /// lists the opposite member of the couple and is preferred by them.
    Deficit { couple: (usize, usize), person: Person },
    /// Two mutually acceptable people who both have free slots.
    FreePair { woman: usize, man: usize },
    /// A matched pair where one side does not list the other.
    Unacceptable { woman: usize, man: usize },
}

impl fmt::Display for Blocking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = |(w, m): (usize, usize)| format!("({}, {})", Person::woman(w), Person::man(m));
        match *self {
            Blocking::Pair { couple, other } => write!(
                f,
                "pair {} {}: {} and {} prefer each other",
                c(couple),
                c(other),
                Person::woman(couple.0),
                Person::man(other.1)
            ),
            Blocking::Deficit { couple, person } => {
                write!(f, "deficit {} {person}", c(couple))
            }
            Blocking::FreePair { woman, man } => write!(f, "free {}", c((woman, man))),
            Blocking::Unacceptable { woman, man } => write!(f, "unacceptable {}", c((woman, man))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityReport {
    pub stable: bool,
    pub blocking: Vec<Blocking>,
}

/// Lists every blocking configuration of `matching` under `profile`'s
/// preferences. Pass the declared profile or the true one as needed.
pub fn is_stable(profile: &PreferenceProfile, matching: &Matching) -> Result<StabilityReport> {
    matching.check_against(profile)?;
    let ranking = Ranking::new(profile);
    let blocking = blocking_configurations(profile, &ranking, matching, usize::MAX);
    Ok(StabilityReport { stable: blocking.is_empty(), blocking })
}

/// Stability without the report, for hot loops. The matching must already
/// respect quotas and symmetry.
pub(crate) fn stable_quick(profile: &PreferenceProfile, ranking: &Ranking, matching: &Matching) -> bool {
    blocking_configurations(profile, ranking, matching, 1).is_empty()
}

fn blocking_configurations(
    profile: &PreferenceProfile,
    ranking: &Ranking,
    matching: &Matching,
    limit: usize,
) -> Vec<Blocking> {
    let mut out = Vec::new();
    let pairs = matching.pairs();
    let acceptable = |w: usize, m: usize| {
        ranking.lists(Person::woman(w), m) && ranking.lists(Person::man(m), w)
    };
    macro_rules! push {
        ($b:expr) => {{
            out.push($b);
            if out.len() >= limit {
                return out;
            }
        }};
    }

    for &(w, m) in &pairs {
        if !acceptable(w, m) {
            push!(Blocking::Unacceptable { woman: w, man: m });
        }
    }
    for &(w, m) in &pairs {
        for &(w2, m2) in &pairs {
            if matching.contains(w, m2) || !acceptable(w, m2) {
                continue;
            }
            if ranking.prefers(Person::woman(w), m2, m) && ranking.prefers(Person::man(m2), w, w2) {
                push!(Blocking::Pair { couple: (w, m), other: (w2, m2) });
            }
        }
    }
    let has_room = |p: Person| matching.partners(p).len() < profile.quota(p);
    for &(w, m) in &pairs {
        for v in 0..profile.women.len() {
            let p = Person::woman(v);
            if v != w && has_room(p) && !matching.contains(v, m) && acceptable(v, m)
                && ranking.prefers(Person::man(m), v, w)
            {
                push!(Blocking::Deficit { couple: (w, m), person: p });
            }
        }
        for x in 0..profile.men.len() {
            let p = Person::man(x);
            if x != m && has_room(p) && !matching.contains(w, x) && acceptable(w, x)
                && ranking.prefers(Person::woman(w), x, m)
            {
                push!(Blocking::Deficit { couple: (w, m), person: p });
            }
        }
    }
    for w in 0..profile.women.len() {
        if !has_room(Person::woman(w)) {
            continue;
        }
        for m in 0..profile.men.len() {
            if has_room(Person::man(m)) && !matching.contains(w, m) && acceptable(w, m) {
                push!(Blocking::FreePair { woman: w, man: m });
            }
        }
    }
    out
}

/// Every stable matching of `profile`, found by generating each
/// quota-respecting matching over mutually acceptable pairs. Slots may stay
/// empty even when quota sums agree: with `n_w2 = n_m1 = 2` and no one else
/// to fill them, `w2` and `m1` can only be matched once.
pub fn enumerate_stable_matchings(profile: &PreferenceProfile, cap: u64) -> Result<BTreeSet<Matching>> {
    profile.ensure_valid()?;
    let ranking = Ranking::new(profile);
    let candidates: Vec<Vec<usize>> = (0..profile.women.len())
        .map(|w| {
            (0..profile.men.len())
                .filter(|&m| ranking.lists(Person::woman(w), m) && ranking.lists(Person::man(m), w))
                .collect()
        })
        .collect();
    let mut search = Search {
        profile,
        ranking: &ranking,
        candidates: &candidates,
        room: profile.men.iter().map(|a| a.quota).collect(),
        current: Matching::empty(profile.women.len(), profile.men.len()),
        visited: 0,
        cap,
        found: BTreeSet::new(),
    };
    search.woman(0)?;
    Ok(search.found)
}

struct Search<'a> {
    profile: &'a PreferenceProfile,
    ranking: &'a Ranking,
    candidates: &'a [Vec<usize>],
    room: Vec<usize>,
    current: Matching,
    visited: u64,
    cap: u64,
    found: BTreeSet<Matching>,
}

impl Search<'_> {
    fn woman(&mut self, w: usize) -> Result<()> {
        if w == self.profile.women.len() {
            self.visited += 1;
            if self.visited > self.cap {
                return Err(Error::InstanceTooLarge { cap: self.cap });
            }
            if stable_quick(self.profile, self.ranking, &self.current) {
                self.found.insert(self.current.clone());
            }
            return Ok(());
        }
        let quota = self.profile.women[w].quota;
        let mut chosen = Vec::with_capacity(quota);
        self.subsets(w, 0, quota, &mut chosen)
    }

    fn subsets(&mut self, w: usize, from: usize, max: usize, chosen: &mut Vec<usize>) -> Result<()> {
        self.woman(w + 1)?;
        if chosen.len() == max {
            return Ok(());
        }
        for k in from..self.candidates[w].len() {
            let m = self.candidates[w][k];
            if self.room[m] == 0 {
                continue;
            }
            self.room[m] -= 1;
            self.current.insert(w, m);
            chosen.push(m);
            self.subsets(w, k + 1, max, chosen)?;
            chosen.pop();
            self.current.remove(w, m);
            self.room[m] += 1;
        }
        Ok(())
    }
}
