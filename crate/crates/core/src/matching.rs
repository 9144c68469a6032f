use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::profile::{PreferenceProfile, Person, Ranking, Side};

/// A many-to-many assignment between the two sides, stored symmetrically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    women: Vec<BTreeSet<usize>>,
    men: Vec<BTreeSet<usize>>,
}

impl Matching {
    pub fn empty(women: usize, men: usize) -> Self {
        Matching { women: vec![BTreeSet::new(); women], men: vec![BTreeSet::new(); men] }
    }

    /// Build from `(woman, man)` pairs. Repeated pairs collapse.
    pub fn from_pairs(women: usize, men: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut m = Matching::empty(women, men);
        for (w, x) in pairs {
            m.insert(w, x);
        }
        m
    }

    pub fn insert(&mut self, woman: usize, man: usize) {
        self.women[woman].insert(man);
        self.men[man].insert(woman);
    }

    pub fn remove(&mut self, woman: usize, man: usize) {
        self.women[woman].remove(&man);
        self.men[man].remove(&woman);
    }

    pub fn women(&self) -> usize {
        self.women.len()
    }

    pub fn men(&self) -> usize {
        self.men.len()
    }

    pub fn partners(&self, p: Person) -> &BTreeSet<usize> {
        match p.side {
            Side::Woman => &self.women[p.index],
            Side::Man => &self.men[p.index],
        }
    }

    pub fn contains(&self, woman: usize, man: usize) -> bool {
        self.women[woman].contains(&man)
    }

    /// All `(woman, man)` pairs in index order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.women
            .iter()
            .enumerate()
            .flat_map(|(w, ms)| ms.iter().map(move |&m| (w, m)))
            .collect()
    }

    /// `p`'s partners from most to least preferred under `ranking`
    /// (the `o_i` / `n_i` slot view).
    pub fn ranked(&self, ranking: &Ranking, p: Person) -> Vec<usize> {
        ranking.sorted(p, self.partners(p))
    }

    /// The single partner of `p`, if any. Meant for one-to-one matchings.
    pub fn partner(&self, p: Person) -> Option<usize> {
        self.partners(p).iter().next().copied()
    }

    /// Checks roster sizes, symmetry and quotas against `profile`.
    pub fn check_against(&self, profile: &PreferenceProfile) -> Result<()> {
        if self.women.len() != profile.women.len() || self.men.len() != profile.men.len() {
            return Err(Error::MalformedMatching(format!(
                "matching is {}x{} but profile is {}x{}",
                self.women.len(),
                self.men.len(),
                profile.women.len(),
                profile.men.len()
            )));
        }
        for (w, ms) in self.women.iter().enumerate() {
            for &m in ms {
                if m >= self.men.len() || !self.men[m].contains(&w) {
                    return Err(Error::MalformedMatching(format!(
                        "{} lists {} but not the reverse",
                        Person::woman(w),
                        Person::man(m)
                    )));
                }
            }
        }
        for (m, ws) in self.men.iter().enumerate() {
            for &w in ws {
                if w >= self.women.len() || !self.women[w].contains(&m) {
                    return Err(Error::MalformedMatching(format!(
                        "{} lists {} but not the reverse",
                        Person::man(m),
                        Person::woman(w)
                    )));
                }
            }
        }
        for p in profile.people() {
            let have = self.partners(p).len();
            if have > profile.quota(p) {
                return Err(Error::MalformedMatching(format!(
                    "{p} has {have} partners, quota {}",
                    profile.quota(p)
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<String> = self
            .pairs()
            .into_iter()
            .map(|(w, m)| format!("{}-{}", Person::woman(w), Person::man(m)))
            .collect();
        write!(f, "{{{}}}", pairs.join(", "))
    }
}
