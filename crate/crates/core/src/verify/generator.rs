use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::profile::{Agent, PreferenceProfile, Scenario};

/// Seeded stream of random profiles. Identical fields give an identical
/// stream.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceGenerator {
    pub seed: u64,
    pub women: usize,
    pub men: usize,
    /// Inclusive quota range for women.
    pub women_quota: (usize, usize),
    /// Inclusive quota range for men.
    pub men_quota: (usize, usize),
    /// Chance that any given entry of a list is blacklisted instead.
    pub blacklist_density: f64,
    pub scenario: Scenario,
}

const MAX_ATTEMPTS: usize = 10_000;

impl InstanceGenerator {
    pub fn monogamous(seed: u64, n: usize) -> Self {
        InstanceGenerator {
            seed,
            women: n,
            men: n,
            women_quota: (1, 1),
            men_quota: (1, 1),
            blacklist_density: 0.0,
            scenario: Scenario::Monogamous,
        }
    }

    pub fn quota(seed: u64, women: usize, men: usize, max_quota: usize) -> Self {
        InstanceGenerator {
            seed,
            women,
            men,
            women_quota: (1, max_quota),
            men_quota: (1, max_quota),
            blacklist_density: 0.0,
            scenario: Scenario::QuotaBalanced,
        }
    }

    pub fn blacklist(seed: u64, women: usize, men: usize, max_quota: usize, density: f64) -> Self {
        InstanceGenerator {
            seed,
            women,
            men,
            women_quota: (1, max_quota),
            men_quota: (1, max_quota),
            blacklist_density: density,
            scenario: Scenario::BlacklistGeneral,
        }
    }

    pub fn generate(&self, count: usize) -> Result<Vec<PreferenceProfile>> {
        self.check()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..count).map(|_| self.one(&mut rng)).collect()
    }

    fn check(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidScenario(format!("generator: {msg}")));
        let ranges_ok = |(lo, hi): (usize, usize)| lo >= 1 && lo <= hi;
        if !ranges_ok(self.women_quota) || !ranges_ok(self.men_quota) {
            return bad("quota ranges must satisfy 1 <= lo <= hi");
        }
        if !(0.0..=1.0).contains(&self.blacklist_density) {
            return bad("blacklist density must lie in [0, 1]");
        }
        match self.scenario {
            Scenario::Monogamous if self.women != self.men => bad("monogamous rosters must be equal"),
            Scenario::QuotaBalanced if self.women_quota.0 > self.men || self.men_quota.0 > self.women => {
                bad("minimum quota exceeds the opposite roster")
            }
            _ => Ok(()),
        }
    }

    fn one(&self, rng: &mut ChaCha8Rng) -> Result<PreferenceProfile> {
        let (nw, nm) = (self.women, self.men);
        let shuffled = |rng: &mut ChaCha8Rng, n: usize| {
            let mut v: Vec<usize> = (0..n).collect();
            v.shuffle(rng);
            v
        };
        let (wq, mq) = match self.scenario {
            Scenario::Monogamous => (vec![1; nw], vec![1; nm]),
            Scenario::QuotaBalanced => self.balanced_quotas(rng)?,
            Scenario::BlacklistGeneral => (
                (0..nw).map(|_| rng.gen_range(self.women_quota.0..=self.women_quota.1)).collect(),
                (0..nm).map(|_| rng.gen_range(self.men_quota.0..=self.men_quota.1)).collect(),
            ),
        };
        let side = |n: usize, other: usize, quotas: Vec<usize>, rng: &mut ChaCha8Rng| -> Vec<Agent> {
            (0..n)
                .map(|i| {
                    let full = shuffled(rng, other);
                    let mut a = Agent::new(Vec::new()).with_quota(quotas[i]);
                    for q in full {
                        if self.scenario == Scenario::BlacklistGeneral && rng.gen_bool(self.blacklist_density) {
                            a.blacklist.insert(q);
                        } else {
                            a.pref.push(q);
                        }
                    }
                    a
                })
                .collect()
        };
        let women = side(nw, nm, wq, rng);
        let men = side(nm, nw, mq, rng);
        let out = PreferenceProfile::new(self.scenario, women, men);
        debug_assert!(out.validate().is_empty(), "{:?}", out.validate());
        Ok(out)
    }

    /// Quotas within range and capped by the opposite roster, resampled
    /// until both sides sum to the same total.
    fn balanced_quotas(&self, rng: &mut ChaCha8Rng) -> Result<(Vec<usize>, Vec<usize>)> {
        let wcap = self.women_quota.1.min(self.men);
        let mcap = self.men_quota.1.min(self.women);
        let (wlo, whi) = (self.women * self.women_quota.0, self.women * wcap);
        let (mlo, mhi) = (self.men * self.men_quota.0, self.men * mcap);
        if wlo.max(mlo) > whi.min(mhi) {
            return Err(Error::InvalidScenario("generator: quota sums can never balance for these rosters".into()));
        }
        for _ in 0..MAX_ATTEMPTS {
            let wq: Vec<usize> = (0..self.women).map(|_| rng.gen_range(self.women_quota.0..=wcap)).collect();
            let mq: Vec<usize> = (0..self.men).map(|_| rng.gen_range(self.men_quota.0..=mcap)).collect();
            if wq.iter().sum::<usize>() == mq.iter().sum::<usize>() {
                return Ok((wq, mq));
            }
        }
        Err(Error::InvalidScenario("generator: cannot balance quota sums with these ranges".into()))
    }
}

/// Every monogamous `n x n` profile, one per class under renaming women and
/// renaming men. Feasible for `n <= 3`.
pub fn monogamous_up_to_symmetry(n: usize) -> Result<Vec<PreferenceProfile>> {
    if n > 3 {
        return Err(Error::InstanceTooLarge { cap: 3 });
    }
    if n == 0 {
        return Ok(vec![PreferenceProfile::monogamous(Vec::new(), Vec::new())]);
    }
    let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let lists: Vec<Vec<Vec<usize>>> = (0..2 * n).map(|_| perms.clone()).collect();
    let mut out = Vec::new();
    for choice in lists.into_iter().multi_cartesian_product() {
        if is_canonical(n, &choice, &perms) {
            let (w, m) = choice.split_at(n);
            out.push(PreferenceProfile::monogamous(w.to_vec(), m.to_vec()));
        }
    }
    Ok(out)
}

/// `lists` (women then men) is the smallest encoding among all relabelings.
fn is_canonical(n: usize, lists: &[Vec<usize>], perms: &[Vec<usize>]) -> bool {
    for sw in perms {
        for sm in perms {
            let mut relabeled = vec![Vec::new(); 2 * n];
            for i in 0..n {
                relabeled[sw[i]] = lists[i].iter().map(|&m| sm[m]).collect();
                relabeled[n + sm[i]] = lists[n + i].iter().map(|&w| sw[w]).collect();
            }
            if relabeled.as_slice() < lists {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let g = InstanceGenerator::blacklist(7, 3, 4, 2, 0.3);
        assert_eq!(g.generate(20).unwrap(), g.generate(20).unwrap());
        let h = InstanceGenerator { seed: 8, ..g.clone() };
        assert_ne!(g.generate(20).unwrap(), h.generate(20).unwrap());
    }

    #[test]
    fn generated_profiles_are_valid() {
        for g in [
            InstanceGenerator::monogamous(1, 4),
            InstanceGenerator::quota(2, 3, 4, 2),
            InstanceGenerator::quota(3, 2, 4, 2),
            InstanceGenerator::blacklist(4, 4, 2, 2, 0.4),
        ] {
            for p in g.generate(50).unwrap() {
                assert!(p.validate().is_empty(), "{:?}", p.validate());
                assert_eq!(p.scenario, g.scenario);
            }
        }
    }

    #[test]
    fn bad_parameters_are_refused() {
        assert!(InstanceGenerator { men: 3, ..InstanceGenerator::monogamous(0, 2) }.generate(1).is_err());
        assert!(InstanceGenerator::blacklist(0, 2, 2, 1, 1.5).generate(1).is_err());
    }

    // Orbit counts under independent renaming of both sides, worked out by
    // Burnside's lemma: n = 1 gives 1, n = 2 gives (16 + 0 + 0 + 4) / 4 = 5.
    #[test]
    fn symmetry_classes_small() {
        assert_eq!(monogamous_up_to_symmetry(1).unwrap().len(), 1);
        assert_eq!(monogamous_up_to_symmetry(2).unwrap().len(), 5);
        assert!(monogamous_up_to_symmetry(4).is_err());
    }
}
