//! Brute-force oracles written straight from the definitions, sharing
//! nothing with the library beyond its data types.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use serenade::{Matching, Person, PreferenceProfile, Side};

fn pos(list: &[usize], x: usize) -> Option<usize> {
    list.iter().position(|&y| y == x)
}

fn prefs(p: &PreferenceProfile, who: Person) -> &[usize] {
    match who.side {
        Side::Woman => &p.women[who.index].pref,
        Side::Man => &p.men[who.index].pref,
    }
}

fn quota(p: &PreferenceProfile, who: Person) -> usize {
    match who.side {
        Side::Woman => p.women[who.index].quota,
        Side::Man => p.men[who.index].quota,
    }
}

pub fn acceptable(p: &PreferenceProfile, w: usize, m: usize) -> bool {
    p.women[w].pref.contains(&m) && p.men[m].pref.contains(&w)
}

/// `who` would take `other` on: a free slot, or a current partner ranked
/// below `other`.
fn wants(p: &PreferenceProfile, m: &Matching, who: Person, other: usize) -> bool {
    let list = prefs(p, who);
    let partners = m.partners(who);
    let Some(k) = pos(list, other) else { return false };
    partners.len() < quota(p, who) || partners.iter().any(|&r| pos(list, r).map_or(true, |j| j > k))
}

/// Pairwise stability: every pair acceptable, and no unmatched acceptable
/// pair who both want each other.
pub fn stable(p: &PreferenceProfile, m: &Matching) -> bool {
    if m.pairs().iter().any(|&(w, x)| !acceptable(p, w, x)) {
        return false;
    }
    for w in 0..p.women.len() {
        for x in 0..p.men.len() {
            if !m.contains(w, x)
                && acceptable(p, w, x)
                && wants(p, m, Person::woman(w), x)
                && wants(p, m, Person::man(x), w)
            {
                return false;
            }
        }
    }
    true
}

/// Every quota-respecting matching, by subsets of all pairs. Tiny rosters
/// only.
pub fn all_matchings(p: &PreferenceProfile) -> Vec<Matching> {
    let (nw, nm) = (p.women.len(), p.men.len());
    let pairs: Vec<(usize, usize)> = (0..nw).flat_map(|w| (0..nm).map(move |m| (w, m))).collect();
    assert!(pairs.len() <= 20, "oracle enumeration is for tiny instances");
    let mut out = Vec::new();
    'subsets: for mask in 0u32..(1 << pairs.len()) {
        let mut wc = vec![0; nw];
        let mut mc = vec![0; nm];
        for (i, &(w, m)) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                wc[w] += 1;
                mc[m] += 1;
                if wc[w] > p.women[w].quota || mc[m] > p.men[m].quota {
                    continue 'subsets;
                }
            }
        }
        out.push(Matching::from_pairs(
            nw,
            nm,
            pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &x)| x),
        ));
    }
    out
}

pub fn stable_matchings(p: &PreferenceProfile) -> BTreeSet<Matching> {
    all_matchings(p).into_iter().filter(|m| stable(p, m)).collect()
}

/// Men propose one at a time: the lowest-index man with a free slot and
/// someone left to try proposes to his best untried acceptable woman, who
/// keeps her favourite `quota` suitors.
pub fn sequential_da(p: &PreferenceProfile) -> Matching {
    let (nw, nm) = (p.women.len(), p.men.len());
    let mut next = vec![0usize; nm];
    let mut held: Vec<Vec<usize>> = vec![Vec::new(); nw];
    let count = |held: &Vec<Vec<usize>>, m: usize| held.iter().filter(|h| h.contains(&m)).count();
    loop {
        let mover = (0..nm).find(|&m| {
            count(&held, m) < p.men[m].quota
                && p.men[m].pref[next[m]..].iter().any(|&w| acceptable(p, w, m))
        });
        let Some(m) = mover else { break };
        let w = loop {
            let w = p.men[m].pref[next[m]];
            next[m] += 1;
            if acceptable(p, w, m) {
                break w;
            }
        };
        held[w].push(m);
        held[w].sort_by_key(|&x| pos(&p.women[w].pref, x).unwrap());
        held[w].truncate(p.women[w].quota);
    }
    Matching::from_pairs(nw, nm, held.iter().enumerate().flat_map(|(w, ms)| ms.iter().map(move |&m| (w, m))))
}

/// Number of classes of monogamous `n x n` profiles under renaming both
/// sides, by union-find over every profile.
pub fn orbit_count(n: usize) -> usize {
    let perms = permutations(n);
    let k = perms.len();
    let total = k.pow(2 * n as u32);
    let index_of: HashMap<Vec<usize>, usize> = perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let decode = |mut code: usize| {
        let mut v = Vec::with_capacity(2 * n);
        for _ in 0..2 * n {
            v.push(perms[code % k].clone());
            code /= k;
        }
        v
    };
    let encode = |lists: &[Vec<usize>]| lists.iter().rev().fold(0, |acc, l| acc * k + index_of[l]);
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for code in 0..total {
        let lists = decode(code);
        for sw in &perms {
            for sm in &perms {
                let mut image = vec![Vec::new(); 2 * n];
                for i in 0..n {
                    image[sw[i]] = lists[i].iter().map(|&m| sm[m]).collect();
                    image[n + sm[i]] = lists[n + i].iter().map(|&w| sw[w]).collect();
                }
                let (a, b) = (find(&mut parent, code), find(&mut parent, encode(&image)));
                parent[a] = b;
            }
        }
    }
    (0..total).filter(|&x| find(&mut parent, x) == x).count()
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for i in 0..=rest.len() {
            let mut v = rest.clone();
            v.insert(i, n - 1);
            out.push(v);
        }
    }
    out
}

/// Position of `x` in `who`'s true list, for judging outcomes by hand.
pub fn rank(p: &PreferenceProfile, who: Person, x: usize) -> usize {
    pos(prefs(p, who), x).unwrap_or(usize::MAX)
}
