//! Night-by-night deferred acceptance.
//!
//! Each night every proposer serenades under the windows of the
//! `min(quota, eligible)` receivers he ranks highest among those who have not
//! rejected him and who list him; then every receiver with more suitors than
//! her quota rejects all but her favourites. The run stops on the first night
//! without a rejection and everyone is matched to whoever stood under their
//! window that night.

use crate::error::{Error, Result};
use crate::matching::Matching;
use crate::profile::{Agent, Person, Positions, PreferenceProfile, Scenario, Side, UNLISTED};

/// One night of the run. Indices are roster positions on the receiving
/// side (`serenades`) and `(receiver, proposer)` pairs (`rejections`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NightRecord {
    /// Suitors at each receiver's window, ascending by index.
    pub serenades: Vec<Vec<usize>>,
    /// `(receiver, proposer)` pairs rejected this night, sorted.
    pub rejections: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExecutionTrace {
    pub proposing: Side,
    pub nights: Vec<NightRecord>,
    pub final_matching: Matching,
}

impl ExecutionTrace {
    pub fn receiving(&self) -> Side {
        self.proposing.other()
    }

    pub fn night_count(&self) -> usize {
        self.nights.len()
    }

    /// 1-based night on which `receiver` rejected `proposer`, if ever.
    /// A proposer is rejected by a given receiver at most once.
    pub fn rejection_night(&self, receiver: usize, proposer: usize) -> Option<usize> {
        self.nights
            .iter()
            .position(|n| n.rejections.binary_search(&(receiver, proposer)).is_ok())
            .map(|i| i + 1)
    }

    /// Whether `proposer` ever stood under `receiver`'s window.
    pub fn ever_serenaded(&self, receiver: usize, proposer: usize) -> bool {
        self.nights
            .iter()
            .any(|n| n.serenades[receiver].binary_search(&proposer).is_ok())
    }

    /// Suitors at `receiver`'s window on 1-based `night`.
    pub fn window(&self, night: usize, receiver: usize) -> &[usize] {
        &self.nights[night - 1].serenades[receiver]
    }

    /// The same window as a list of people.
    pub fn window_people(&self, night: usize, receiver: usize) -> Vec<Person> {
        self.window(night, receiver)
            .iter()
            .map(|&p| Person::new(self.proposing, p))
            .collect()
    }
}

/// Run deferred acceptance with `proposing` serenading. The profile must be
/// valid for its scenario.
pub fn run_deferred_acceptance(profile: &PreferenceProfile, proposing: Side) -> Result<ExecutionTrace> {
    profile.ensure_valid()?;
    Ok(run_unchecked(profile, proposing, true))
}

/// Final matching only, no trace. Skips validation; callers guarantee it.
pub(crate) fn final_matching(profile: &PreferenceProfile, proposing: Side) -> Matching {
    run_unchecked(profile, proposing, false).final_matching
}

pub(crate) fn run_unchecked(profile: &PreferenceProfile, proposing: Side, record: bool) -> ExecutionTrace {
    let (proposers, receivers) = match proposing {
        Side::Man => (&profile.men, &profile.women),
        Side::Woman => (&profile.women, &profile.men),
    };
    let (nights, held) = night_loop(proposers, receivers, record);
    let final_matching = match proposing {
        Side::Man => Matching::from_pairs(
            profile.women.len(),
            profile.men.len(),
            held.iter().enumerate().flat_map(|(w, ms)| ms.iter().map(move |&m| (w, m))),
        ),
        Side::Woman => Matching::from_pairs(
            profile.women.len(),
            profile.men.len(),
            held.iter().enumerate().flat_map(|(m, ws)| ws.iter().map(move |&w| (w, m))),
        ),
    };
    ExecutionTrace { proposing, nights, final_matching }
}

fn night_loop(proposers: &[Agent], receivers: &[Agent], record: bool) -> (Vec<NightRecord>, Vec<Vec<usize>>) {
    let nr = receivers.len();
    let listed = Positions::new(receivers, proposers.len());
    let mut rejected = vec![false; proposers.len() * nr];
    let mut suitors: Vec<Vec<usize>> = vec![Vec::new(); nr];
    let mut nights = Vec::new();
    loop {
        for s in suitors.iter_mut() {
            s.clear();
        }
        for (p, agent) in proposers.iter().enumerate() {
            let mut sent = 0;
            for &r in &agent.pref {
                if sent == agent.quota {
                    break;
                }
                if rejected[p * nr + r] || listed.get(r, p) == UNLISTED {
                    continue;
                }
                suitors[r].push(p);
                sent += 1;
            }
        }
        let mut rejections = Vec::new();
        for (r, agent) in receivers.iter().enumerate() {
            if suitors[r].len() <= agent.quota {
                continue;
            }
            let mut ordered = suitors[r].clone();
            ordered.sort_by_key(|&p| listed.get(r, p));
            for &p in &ordered[agent.quota..] {
                rejected[p * nr + r] = true;
                rejections.push((r, p));
            }
            ordered.truncate(agent.quota);
            ordered.sort_unstable();
            suitors[r] = ordered;
        }
        let done = rejections.is_empty();
        if record {
            // Record the window as seen before the rejections are applied.
            let mut serenades = suitors.clone();
            for &(r, p) in &rejections {
                serenades[r].push(p);
            }
            for s in serenades.iter_mut() {
                s.sort_unstable();
            }
            rejections.sort_unstable();
            nights.push(NightRecord { serenades, rejections });
        }
        if done {
            break;
        }
    }
    (nights, suitors)
}

/// Textbook one-to-one run for monogamous profiles with men proposing,
/// kept separate from the general engine so the two can be compared.
pub fn run_monogamous_nights(profile: &PreferenceProfile) -> Result<ExecutionTrace> {
    profile.ensure_valid()?;
    if profile.scenario != Scenario::Monogamous {
        return Err(Error::ScenarioMismatch("monogamous run needs a monogamous profile".into()));
    }
    let n = profile.men.len();
    let mut next = vec![0usize; n];
    let mut nights = Vec::new();
    let rank = |w: usize, m: usize| profile.women[w].pref.iter().position(|&x| x == m).unwrap();
    loop {
        let mut serenades = vec![Vec::new(); n];
        for (m, agent) in profile.men.iter().enumerate() {
            serenades[agent.pref[next[m]]].push(m);
        }
        let mut rejections = Vec::new();
        for (w, window) in serenades.iter().enumerate() {
            if window.len() > 1 {
                let best = *window.iter().min_by_key(|&&m| rank(w, m)).unwrap();
                for &m in window.iter().filter(|&&m| m != best) {
                    rejections.push((w, m));
                }
            }
        }
        for &(_, m) in &rejections {
            next[m] += 1;
        }
        rejections.sort_unstable();
        let done = rejections.is_empty();
        nights.push(NightRecord { serenades, rejections });
        if done {
            break;
        }
    }
    let last = &nights.last().unwrap().serenades;
    let final_matching = Matching::from_pairs(
        n,
        n,
        last.iter().enumerate().map(|(w, ms)| (w, ms[0])),
    );
    Ok(ExecutionTrace { proposing: Side::Man, nights, final_matching })
}
