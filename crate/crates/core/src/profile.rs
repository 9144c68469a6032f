//! Matching instances: people, their strict preference lists, quotas and
//! blacklists, together with the scenario rules each instance must obey.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Woman,
    Man,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Woman => Side::Man,
            Side::Man => Side::Woman,
        }
    }

    fn prefix(self) -> char {
        match self {
            Side::Woman => 'w',
            Side::Man => 'm',
        }
    }
}

/// A member of one side of the market, identified by its 0-based roster
/// position. Displays and parses as `w<k>` / `m<k>` with `k` 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Person {
    pub side: Side,
    pub index: usize,
}

impl Person {
    pub fn new(side: Side, index: usize) -> Self {
        Person { side, index }
    }

    pub fn woman(index: usize) -> Self {
        Person::new(Side::Woman, index)
    }

    pub fn man(index: usize) -> Self {
        Person::new(Side::Man, index)
    }
}

impl fmt::Display for Person {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.side.prefix(), self.index + 1)
    }
}

impl FromStr for Person {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let side = match s.chars().next() {
            Some('w') => Side::Woman,
            Some('m') => Side::Man,
            _ => return Err(format!("expected w<k> or m<k>, got `{s}`")),
        };
        let k: usize = s[1..]
            .parse()
            .map_err(|_| format!("bad person identifier `{s}`"))?;
        if k == 0 {
            return Err(format!("person identifiers are 1-based, got `{s}`"));
        }
        Ok(Person::new(side, k - 1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// Equal rosters, every quota 1, no blacklists.
    Monogamous,
    /// Arbitrary quotas with equal quota sums on both sides, no blacklists.
    QuotaBalanced,
    /// Blacklists and arbitrary quotas.
    BlacklistGeneral,
}

impl Scenario {
    pub fn keyword(self) -> &'static str {
        match self {
            Scenario::Monogamous => "monogamous",
            Scenario::QuotaBalanced => "quota",
            Scenario::BlacklistGeneral => "blacklist",
        }
    }

    /// Whether declared lists may omit people (truncation).
    pub fn allows_incomplete_lists(self) -> bool {
        matches!(self, Scenario::BlacklistGeneral)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "monogamous" => Ok(Scenario::Monogamous),
            "quota" => Ok(Scenario::QuotaBalanced),
            "blacklist" => Ok(Scenario::BlacklistGeneral),
            _ => Err(format!("unknown scenario `{s}`")),
        }
    }
}

/// One person's preference data. `pref` holds opposite-side indices, most
/// preferred first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Agent {
    pub pref: Vec<usize>,
    pub quota: usize,
    pub blacklist: BTreeSet<usize>,
}

impl Agent {
    pub fn new(pref: Vec<usize>) -> Self {
        Agent { pref, quota: 1, blacklist: BTreeSet::new() }
    }

    pub fn with_quota(mut self, quota: usize) -> Self {
        self.quota = quota;
        self
    }

    pub fn with_blacklist(mut self, blacklist: impl IntoIterator<Item = usize>) -> Self {
        self.blacklist = blacklist.into_iter().collect();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Violation {
    OutOfRange { person: Person, entry: Person },
    DuplicateEntry { person: Person, entry: Person },
    MissingEntry { person: Person, entry: Person },
    BlacklistedInPref { person: Person, entry: Person },
    ZeroQuota { person: Person },
    QuotaExceedsRoster { person: Person, quota: usize, roster: usize },
    NonUnitQuota { person: Person, quota: usize },
    BlacklistNotAllowed { person: Person },
    RosterMismatch { women: usize, men: usize },
    QuotaSumMismatch { women: usize, men: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OutOfRange { person, entry } => {
                write!(f, "{person}: {entry} is not on the roster")
            }
            Violation::DuplicateEntry { person, entry } => {
                write!(f, "{person}: {entry} listed more than once")
            }
            Violation::MissingEntry { person, entry } => {
                write!(f, "{person}: {entry} neither ranked nor blacklisted")
            }
            Violation::BlacklistedInPref { person, entry } => {
                write!(f, "{person}: {entry} is both ranked and blacklisted")
            }
            Violation::ZeroQuota { person } => write!(f, "{person}: quota must be positive"),
            Violation::QuotaExceedsRoster { person, quota, roster } => {
                write!(f, "{person}: quota {quota} exceeds opposite roster size {roster}")
            }
            Violation::NonUnitQuota { person, quota } => {
                write!(f, "{person}: quota {quota} not allowed in a monogamous profile")
            }
            Violation::BlacklistNotAllowed { person } => {
                write!(f, "{person}: blacklists only allowed in the blacklist scenario")
            }
            Violation::RosterMismatch { women, men } => {
                write!(f, "monogamous profile needs equal rosters, got {women} women and {men} men")
            }
            Violation::QuotaSumMismatch { women, men } => {
                write!(f, "quota sums differ: women {women}, men {men}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PreferenceProfile {
    pub scenario: Scenario,
    pub women: Vec<Agent>,
    pub men: Vec<Agent>,
}

impl PreferenceProfile {
    pub fn new(scenario: Scenario, women: Vec<Agent>, men: Vec<Agent>) -> Self {
        PreferenceProfile { scenario, women, men }
    }

    /// Monogamous profile from raw preference lists.
    pub fn monogamous(women: Vec<Vec<usize>>, men: Vec<Vec<usize>>) -> Self {
        PreferenceProfile::new(
            Scenario::Monogamous,
            women.into_iter().map(Agent::new).collect(),
            men.into_iter().map(Agent::new).collect(),
        )
    }

    pub fn roster(&self, side: Side) -> usize {
        self.agents(side).len()
    }

    pub fn agents(&self, side: Side) -> &[Agent] {
        match side {
            Side::Woman => &self.women,
            Side::Man => &self.men,
        }
    }

    pub fn agents_mut(&mut self, side: Side) -> &mut Vec<Agent> {
        match side {
            Side::Woman => &mut self.women,
            Side::Man => &mut self.men,
        }
    }

    pub fn agent(&self, p: Person) -> &Agent {
        &self.agents(p.side)[p.index]
    }

    pub fn quota(&self, p: Person) -> usize {
        self.agent(p).quota
    }

    pub fn people(&self) -> impl Iterator<Item = Person> + '_ {
        (0..self.women.len())
            .map(Person::woman)
            .chain((0..self.men.len()).map(Person::man))
    }

    /// Replace `p`'s declared list. Everyone `p` no longer lists becomes
    /// blacklisted, so truncations are expressed directly.
    pub fn with_declared(&self, p: Person, list: Vec<usize>) -> Self {
        let mut out = self.clone();
        let n = self.roster(p.side.other());
        let agent = &mut out.agents_mut(p.side)[p.index];
        let listed: BTreeSet<usize> = list.iter().copied().collect();
        agent.blacklist = (0..n).filter(|q| !listed.contains(q)).collect();
        agent.pref = list;
        out
    }

    /// The same instance with the roles of the two sides exchanged.
    pub fn swapped(&self) -> Self {
        PreferenceProfile {
            scenario: self.scenario,
            women: self.men.clone(),
            men: self.women.clone(),
        }
    }

    /// Every broken invariant, in a stable order. Empty iff the profile is
    /// valid for its scenario.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for side in [Side::Woman, Side::Man] {
            let other = self.roster(side.other());
            for (i, agent) in self.agents(side).iter().enumerate() {
                let person = Person::new(side, i);
                let entry = |q: usize| Person::new(side.other(), q);
                let mut seen = vec![false; other];
                for &q in &agent.pref {
                    if q >= other {
                        out.push(Violation::OutOfRange { person, entry: entry(q) });
                    } else if seen[q] {
                        out.push(Violation::DuplicateEntry { person, entry: entry(q) });
                    } else {
                        seen[q] = true;
                        if agent.blacklist.contains(&q) {
                            out.push(Violation::BlacklistedInPref { person, entry: entry(q) });
                        }
                    }
                }
                for &q in &agent.blacklist {
                    if q >= other {
                        out.push(Violation::OutOfRange { person, entry: entry(q) });
                    }
                }
                for q in 0..other {
                    if !seen[q] && !agent.blacklist.contains(&q) {
                        out.push(Violation::MissingEntry { person, entry: entry(q) });
                    }
                }
                if agent.quota == 0 {
                    out.push(Violation::ZeroQuota { person });
                }
                match self.scenario {
                    Scenario::Monogamous => {
                        if agent.quota != 1 {
                            out.push(Violation::NonUnitQuota { person, quota: agent.quota });
                        }
                    }
                    Scenario::QuotaBalanced => {
                        if agent.quota > other {
                            out.push(Violation::QuotaExceedsRoster {
                                person,
                                quota: agent.quota,
                                roster: other,
                            });
                        }
                    }
                    Scenario::BlacklistGeneral => {}
                }
                if self.scenario != Scenario::BlacklistGeneral && !agent.blacklist.is_empty() {
                    out.push(Violation::BlacklistNotAllowed { person });
                }
            }
        }
        match self.scenario {
            Scenario::Monogamous if self.women.len() != self.men.len() => {
                out.push(Violation::RosterMismatch {
                    women: self.women.len(),
                    men: self.men.len(),
                });
            }
            Scenario::QuotaBalanced => {
                let women: usize = self.women.iter().map(|a| a.quota).sum();
                let men: usize = self.men.iter().map(|a| a.quota).sum();
                if women != men {
                    out.push(Violation::QuotaSumMismatch { women, men });
                }
            }
            _ => {}
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidProfile(v))
        }
    }
}

/// Position lookup for one side: `pos[p][q]` is `q`'s place on `p`'s list,
/// or `UNLISTED`.
#[derive(Debug, Clone)]
pub(crate) struct Positions {
    stride: usize,
    pos: Vec<u32>,
}

pub(crate) const UNLISTED: u32 = u32::MAX;

impl Positions {
    pub(crate) fn new(agents: &[Agent], other: usize) -> Self {
        let mut pos = vec![UNLISTED; agents.len() * other];
        for (p, a) in agents.iter().enumerate() {
            for (k, &q) in a.pref.iter().enumerate() {
                if q < other {
                    pos[p * other + q] = k as u32;
                }
            }
        }
        Positions { stride: other, pos }
    }

    #[inline]
    pub(crate) fn get(&self, p: usize, q: usize) -> u32 {
        self.pos[p * self.stride + q]
    }
}

/// Total preference order for every person over the whole opposite side.
/// Listed people come first in list order; unlisted (blacklisted) people
/// follow in index order.
#[derive(Debug, Clone)]
pub struct Ranking {
    women: Positions,
    men: Positions,
    women_len: Vec<usize>,
    men_len: Vec<usize>,
}

impl Ranking {
    pub fn new(profile: &PreferenceProfile) -> Self {
        Ranking {
            women: Positions::new(&profile.women, profile.men.len()),
            men: Positions::new(&profile.men, profile.women.len()),
            women_len: profile.women.iter().map(|a| a.pref.len()).collect(),
            men_len: profile.men.iter().map(|a| a.pref.len()).collect(),
        }
    }

    /// Sort key of `q` (opposite side of `p`) on `p`'s list; lower is better.
    pub fn key(&self, p: Person, q: usize) -> usize {
        let (table, lens) = match p.side {
            Side::Woman => (&self.women, &self.women_len),
            Side::Man => (&self.men, &self.men_len),
        };
        match table.get(p.index, q) {
            UNLISTED => lens[p.index] + q,
            k => k as usize,
        }
    }

    pub fn lists(&self, p: Person, q: usize) -> bool {
        let table = match p.side {
            Side::Woman => &self.women,
            Side::Man => &self.men,
        };
        table.get(p.index, q) != UNLISTED
    }

    /// Whether `p` strictly prefers `a` over `b`.
    pub fn prefers(&self, p: Person, a: usize, b: usize) -> bool {
        self.key(p, a) < self.key(p, b)
    }

    /// `set` sorted from most to least preferred by `p`.
    pub fn sorted<'a>(&self, p: Person, set: impl IntoIterator<Item = &'a usize>) -> Vec<usize> {
        let mut v: Vec<usize> = set.into_iter().copied().collect();
        v.sort_by_key(|&q| self.key(p, q));
        v
    }
}
