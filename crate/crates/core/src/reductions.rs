//! Instance transformations with projections back to the original roster.
//!
//! * Woman replication turns a profile with polygamous women and monogamous
//!   men into a monogamous one: woman `w` becomes clones `(w,1)..(w,n_w)`
//!   sharing her list, and every man ranks `(w,i)` just above `(w,i+1)` where
//!   `w` used to be.
//! * Padding turns any profile (blacklists, unbalanced quotas) into a
//!   quota-balanced one without blacklists: every person `p` receives `n_p`
//!   monogamous dummies on the opposite side who rank `p` first, and `p` ranks
//!   them right after her acceptable originals.

use crate::error::{Error, Result};
use crate::matching::Matching;
use crate::profile::{Agent, Person, PreferenceProfile, Scenario, Side};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplicationMap {
    /// Original woman to her clone indices, slot order.
    pub forward: Vec<Vec<usize>>,
    /// Clone index to `(original woman, 1-based slot)`.
    pub backward: Vec<(usize, usize)>,
}

pub fn replicate_women(profile: &PreferenceProfile) -> Result<(PreferenceProfile, ReplicationMap)> {
    profile.ensure_valid()?;
    if profile.scenario == Scenario::BlacklistGeneral {
        return Err(Error::ScenarioMismatch("replication needs a profile without blacklists".into()));
    }
    if let Some(m) = profile.men.iter().position(|a| a.quota != 1) {
        return Err(Error::ScenarioMismatch(format!("{} is polygamous", Person::man(m))));
    }
    let mut forward = Vec::with_capacity(profile.women.len());
    let mut backward = Vec::new();
    let mut women = Vec::new();
    for (w, agent) in profile.women.iter().enumerate() {
        let mut clones = Vec::with_capacity(agent.quota);
        for slot in 1..=agent.quota {
            clones.push(backward.len());
            backward.push((w, slot));
            women.push(Agent::new(agent.pref.clone()));
        }
        forward.push(clones);
    }
    let men = profile
        .men
        .iter()
        .map(|a| Agent::new(a.pref.iter().flat_map(|&w| forward[w].iter().copied()).collect()))
        .collect();
    let out = PreferenceProfile::new(Scenario::Monogamous, women, men);
    Ok((out, ReplicationMap { forward, backward }))
}

/// Merges clones back into their original woman.
pub fn project_replicated(matching: &Matching, map: &ReplicationMap) -> Result<Matching> {
    if matching.women() != map.backward.len() {
        return Err(Error::MapMismatch(format!(
            "matching has {} women, map has {} clones",
            matching.women(),
            map.backward.len()
        )));
    }
    let mut out = Matching::empty(map.forward.len(), matching.men());
    for (c, m) in matching.pairs() {
        out.insert(map.backward[c].0, m);
    }
    Ok(out)
}

/// For each original woman, the man matched to each of her clones in slot
/// order (`None` for an unmatched clone).
pub fn slot_view(matching: &Matching, map: &ReplicationMap) -> Result<Vec<Vec<Option<usize>>>> {
    if matching.women() != map.backward.len() {
        return Err(Error::MapMismatch("matching does not cover the clones".into()));
    }
    Ok(map
        .forward
        .iter()
        .map(|clones| clones.iter().map(|&c| matching.partner(Person::woman(c))).collect())
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Padded {
    Original(usize),
    /// Dummy created for `owner` (an original of the opposite side),
    /// 1-based `slot`.
    Dummy { owner: usize, slot: usize },
}

impl Padded {
    pub fn is_dummy(self) -> bool {
        matches!(self, Padded::Dummy { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaddingMap {
    pub women: Vec<Padded>,
    pub men: Vec<Padded>,
    /// Original women count; original men count.
    pub original_women: usize,
    pub original_men: usize,
    /// For each original woman, her dummy men in slot order.
    pub women_dummies: Vec<Vec<usize>>,
    /// For each original man, his dummy women in slot order.
    pub men_dummies: Vec<Vec<usize>>,
}

impl PaddingMap {
    pub fn dummies(&self, p: Person) -> &[usize] {
        match p.side {
            Side::Woman => &self.women_dummies[p.index],
            Side::Man => &self.men_dummies[p.index],
        }
    }
}

pub fn pad_profile(profile: &PreferenceProfile) -> Result<(PreferenceProfile, PaddingMap)> {
    profile.ensure_valid()?;
    let (nw, nm) = (profile.women.len(), profile.men.len());

    let mut women_roles: Vec<Padded> = (0..nw).map(Padded::Original).collect();
    let mut men_roles: Vec<Padded> = (0..nm).map(Padded::Original).collect();
    let mut men_dummies = Vec::with_capacity(nm);
    for (m, a) in profile.men.iter().enumerate() {
        men_dummies.push((1..=a.quota).map(|slot| {
            women_roles.push(Padded::Dummy { owner: m, slot });
            women_roles.len() - 1
        }).collect::<Vec<_>>());
    }
    let mut women_dummies = Vec::with_capacity(nw);
    for (w, a) in profile.women.iter().enumerate() {
        women_dummies.push((1..=a.quota).map(|slot| {
            men_roles.push(Padded::Dummy { owner: w, slot });
            men_roles.len() - 1
        }).collect::<Vec<_>>());
    }

    let women = pad_side(&profile.women, &women_dummies, &women_roles, men_roles.len(), nm);
    let men = pad_side(&profile.men, &men_dummies, &men_roles, women_roles.len(), nw);
    let out = PreferenceProfile::new(Scenario::QuotaBalanced, women, men);
    let map = PaddingMap {
        women: women_roles,
        men: men_roles,
        original_women: nw,
        original_men: nm,
        women_dummies,
        men_dummies,
    };
    Ok((out, map))
}

/// One side of the padded profile. Original `p` lists her acceptable
/// originals, her own dummies `own[p]`, her blacklist, then every other
/// dummy. Dummy agents on this side list their owner, then everyone else.
fn pad_side(
    originals: &[Agent],
    own: &[Vec<usize>],
    roles: &[Padded],
    other_len: usize,
    other_originals: usize,
) -> Vec<Agent> {
    let mut out = Vec::with_capacity(roles.len());
    for (p, a) in originals.iter().enumerate() {
        let mut pref = a.pref.clone();
        pref.extend(&own[p]);
        pref.extend(a.blacklist.iter().copied());
        pref.extend((other_originals..other_len).filter(|d| !own[p].contains(d)));
        out.push(Agent::new(pref).with_quota(a.quota));
    }
    for role in &roles[originals.len()..] {
        let Padded::Dummy { owner, .. } = *role else { unreachable!() };
        let mut pref = vec![owner];
        pref.extend((0..other_len).filter(|&q| q != owner));
        out.push(Agent::new(pref));
    }
    out
}

/// Drops every pairing that involves a dummy.
pub fn project_padded(matching: &Matching, map: &PaddingMap) -> Result<Matching> {
    if matching.women() != map.women.len() || matching.men() != map.men.len() {
        return Err(Error::MapMismatch(format!(
            "matching is {}x{}, padded roster is {}x{}",
            matching.women(),
            matching.men(),
            map.women.len(),
            map.men.len()
        )));
    }
    let mut out = Matching::empty(map.original_women, map.original_men);
    for (w, m) in matching.pairs() {
        if let (Padded::Original(a), Padded::Original(b)) = (map.women[w], map.men[m]) {
            out.insert(a, b);
        }
    }
    Ok(out)
}

/// Whether every original person's padded partners are their original
/// partners plus their own top dummies `1..=n_p - |original partners|`.
pub fn padding_observation_holds(padded: &Matching, map: &PaddingMap, quotas: impl Fn(Person) -> usize) -> bool {
    let Ok(projected) = project_padded(padded, map) else { return false };
    let people = (0..map.original_women)
        .map(Person::woman)
        .chain((0..map.original_men).map(Person::man));
    for p in people {
        let kept = projected.partners(p).len();
        let need = quotas(p).saturating_sub(kept);
        let expected: Vec<usize> = map.dummies(p)[..need].to_vec();
        let got: Vec<usize> = padded
            .partners(p)
            .iter()
            .copied()
            .filter(|&q| {
                let role = match p.side {
                    Side::Woman => map.men[q],
                    Side::Man => map.women[q],
                };
                role.is_dummy()
            })
            .collect();
        if got != expected {
            return false;
        }
    }
    true
}
