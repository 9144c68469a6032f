//! Text formats: profile and scenario files, matching records, trace
//! tables, and reduction sidecar maps.
//!
//! Profile files hold one directive per line:
//!
//! ```text
//! # comment
//! scenario monogamous        # or quota | blacklist; inferred when omitted
//! side women 4
//! side men 4
//! pref w1: m3 m1 m2 m4
//! quota w1 = 2               # default 1
//! blacklist w1: m4           # default empty
//! ```
//!
//! Scenario files add `declare w1: m3 m4 m1 m2` lines.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::algorithm::ExecutionTrace;
use crate::error::{Error, Result};
use crate::manipulation::LieScenario;
use crate::matching::Matching;
use crate::profile::{Agent, Person, PreferenceProfile, Scenario, Side};
use crate::reductions::{Padded, PaddingMap, ReplicationMap};

pub fn parse_profile(text: &str) -> Result<PreferenceProfile> {
    let (profile, declared) = parse(text)?;
    if let Some((line, _)) = declared.values().next() {
        return Err(Error::Parse { line: *line, message: "`declare` belongs in scenario files".into() });
    }
    Ok(profile)
}

pub fn parse_scenario(text: &str) -> Result<LieScenario> {
    let (truth, declared) = parse(text)?;
    let mut s = LieScenario::new(truth);
    for (w, (_, list)) in declared {
        s.declared.insert(w, list);
    }
    Ok(s)
}

type Declared = BTreeMap<usize, (usize, Vec<usize>)>;

fn parse(text: &str) -> Result<(PreferenceProfile, Declared)> {
    let mut scenario = None;
    let mut sizes: [Option<usize>; 2] = [None, None];
    let mut prefs: BTreeMap<Person, (usize, Vec<usize>)> = BTreeMap::new();
    let mut quotas: BTreeMap<Person, (usize, usize)> = BTreeMap::new();
    let mut blacklists: BTreeMap<Person, (usize, Vec<usize>)> = BTreeMap::new();
    let mut declared: Declared = BTreeMap::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| Error::Parse { line, message };
        let content = raw.split('#').next().unwrap().trim();
        if content.is_empty() {
            continue;
        }
        let (keyword, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
        let rest = rest.trim();
        match keyword {
            "scenario" => {
                scenario = Some(rest.parse::<Scenario>().map_err(err)?);
            }
            "side" => {
                let mut it = rest.split_whitespace();
                let slot = match it.next() {
                    Some("women") => 0,
                    Some("men") => 1,
                    other => return Err(err(format!("expected `women` or `men`, got {other:?}"))),
                };
                let n = it
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err("expected a roster size".into()))?;
                if it.next().is_some() {
                    return Err(err("trailing tokens".into()));
                }
                sizes[slot] = Some(n);
            }
            "pref" | "blacklist" | "declare" => {
                let (who, list) = rest
                    .split_once(':')
                    .ok_or_else(|| err(format!("expected `{keyword} <person>: <people>`")))?;
                let who: Person = who.trim().parse().map_err(err)?;
                let mut entries = Vec::new();
                for tok in list.split_whitespace() {
                    let q: Person = tok.parse().map_err(err)?;
                    if q.side == who.side {
                        return Err(err(format!("{who} cannot list {q} from the same side")));
                    }
                    entries.push(q.index);
                }
                let slot = match keyword {
                    "pref" => &mut prefs,
                    "blacklist" => &mut blacklists,
                    _ => {
                        if who.side != Side::Woman {
                            return Err(err("only women declare lies".into()));
                        }
                        if declared.insert(who.index, (line, entries)).is_some() {
                            return Err(err(format!("second `declare` line for {who}")));
                        }
                        continue;
                    }
                };
                if slot.insert(who, (line, entries)).is_some() {
                    return Err(err(format!("second `{keyword}` line for {who}")));
                }
            }
            "quota" => {
                let (who, n) = rest
                    .split_once('=')
                    .ok_or_else(|| err("expected `quota <person> = <n>`".into()))?;
                let who: Person = who.trim().parse().map_err(err)?;
                let n: usize = n.trim().parse().map_err(|_| err(format!("bad quota `{}`", n.trim())))?;
                if quotas.insert(who, (line, n)).is_some() {
                    return Err(err(format!("second quota for {who}")));
                }
            }
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }

    let (women, men) = match sizes {
        [Some(w), Some(m)] => (w, m),
        _ => return Err(Error::Parse { line: 0, message: "missing `side women N` or `side men N`".into() }),
    };
    let roster = |side: Side| if side == Side::Woman { women } else { men };
    let check = |who: Person, line: usize| -> Result<()> {
        if who.index >= roster(who.side) {
            Err(Error::Parse { line, message: format!("{who} is not on the roster") })
        } else {
            Ok(())
        }
    };
    for (&who, &(line, _)) in prefs.iter().chain(blacklists.iter()) {
        check(who, line)?;
    }
    for (&who, &(line, _)) in &quotas {
        check(who, line)?;
    }
    for (&w, &(line, _)) in &declared {
        check(Person::woman(w), line)?;
    }

    let build = |side: Side| -> Vec<Agent> {
        (0..roster(side))
            .map(|i| {
                let p = Person::new(side, i);
                let mut a = Agent::new(prefs.get(&p).map(|(_, v)| v.clone()).unwrap_or_default());
                if let Some(&(_, q)) = quotas.get(&p) {
                    a.quota = q;
                }
                if let Some((_, b)) = blacklists.get(&p) {
                    a.blacklist = b.iter().copied().collect();
                }
                a
            })
            .collect()
    };
    let women_agents = build(Side::Woman);
    let men_agents = build(Side::Man);
    let scenario = scenario.unwrap_or_else(|| {
        if !blacklists.is_empty() {
            Scenario::BlacklistGeneral
        } else if quotas.values().any(|&(_, q)| q != 1) {
            Scenario::QuotaBalanced
        } else {
            Scenario::Monogamous
        }
    });
    Ok((PreferenceProfile::new(scenario, women_agents, men_agents), declared))
}

fn people(side: Side, xs: impl IntoIterator<Item = usize>) -> String {
    xs.into_iter().map(|i| Person::new(side, i).to_string()).collect::<Vec<_>>().join(" ")
}

pub fn write_profile(profile: &PreferenceProfile) -> String {
    let mut out = String::new();
    writeln!(out, "scenario {}", profile.scenario).unwrap();
    writeln!(out, "side women {}", profile.women.len()).unwrap();
    writeln!(out, "side men {}", profile.men.len()).unwrap();
    for p in profile.people() {
        let a = profile.agent(p);
        let other = p.side.other();
        let list = people(other, a.pref.iter().copied());
        writeln!(out, "pref {p}:{}{list}", if list.is_empty() { "" } else { " " }).unwrap();
    }
    for p in profile.people() {
        let a = profile.agent(p);
        if a.quota != 1 {
            writeln!(out, "quota {p} = {}", a.quota).unwrap();
        }
        if !a.blacklist.is_empty() {
            writeln!(out, "blacklist {p}: {}", people(p.side.other(), a.blacklist.iter().copied())).unwrap();
        }
    }
    out
}

pub fn write_scenario(s: &LieScenario) -> String {
    let mut out = write_profile(&s.truth);
    for (&w, list) in &s.declared {
        let list = people(Side::Man, list.iter().copied());
        writeln!(out, "declare {}:{}{list}", Person::woman(w), if list.is_empty() { "" } else { " " }).unwrap();
    }
    out
}

/// `pair w<k> m<k>` lines.
pub fn write_matching(m: &Matching) -> String {
    m.pairs()
        .into_iter()
        .map(|(w, x)| format!("pair {} {}\n", Person::woman(w), Person::man(x)))
        .collect()
}

/// Reads `pair` lines; every other line is ignored, so trace records can be
/// fed back in directly.
pub fn parse_matching(text: &str, women: usize, men: usize) -> Result<Matching> {
    let mut out = Matching::empty(women, men);
    for (i, raw) in text.lines().enumerate() {
        let err = |message: String| Error::Parse { line: i + 1, message };
        let mut it = raw.split('#').next().unwrap().split_whitespace();
        if it.next() != Some("pair") {
            continue;
        }
        let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
            return Err(err("expected `pair w<k> m<k>`".into()));
        };
        let mut a: Person = a.parse().map_err(err)?;
        let mut b: Person = b.parse().map_err(err)?;
        if a.side == Side::Man {
            std::mem::swap(&mut a, &mut b);
        }
        if a.side != Side::Woman || b.side != Side::Man {
            return Err(err("a pair needs one woman and one man".into()));
        }
        if a.index >= women || b.index >= men {
            return Err(err(format!("{a} or {b} is not on the roster")));
        }
        out.insert(a.index, b.index);
    }
    Ok(out)
}

/// One column per window, one row per night.
pub fn render_trace_table(trace: &ExecutionTrace) -> String {
    let receiving = trace.receiving();
    let proposing = trace.proposing;
    let windows = trace.nights.first().map_or(0, |n| n.serenades.len());
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut header = vec!["Night".to_string()];
    header.extend((0..windows).map(|r| Person::new(receiving, r).to_string()));
    rows.push(header);
    for (t, night) in trace.nights.iter().enumerate() {
        let mut row = vec![(t + 1).to_string()];
        row.extend(night.serenades.iter().map(|s| {
            s.iter().map(|&p| Person::new(proposing, p).to_string()).collect::<Vec<_>>().join(",")
        }));
        rows.push(row);
    }
    let cols = windows + 1;
    let widths: Vec<usize> = (0..cols).map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row.iter().enumerate().map(|(c, cell)| format!("{cell:<w$}", w = widths[c])).collect();
        writeln!(out, "{}", line.join("  ").trim_end()).unwrap();
    }
    out
}

/// Machine-readable trace: `window` and `reject` records per night, then the
/// final `pair` lines.
pub fn render_trace_records(trace: &ExecutionTrace) -> String {
    let receiving = trace.receiving();
    let proposing = trace.proposing;
    let mut out = String::new();
    writeln!(out, "# proposing {}", if proposing == Side::Man { "men" } else { "women" }).unwrap();
    writeln!(out, "nights {}", trace.night_count()).unwrap();
    for (t, night) in trace.nights.iter().enumerate() {
        for (r, suitors) in night.serenades.iter().enumerate() {
            if !suitors.is_empty() {
                writeln!(out, "night {} window {}: {}", t + 1, Person::new(receiving, r), people(proposing, suitors.iter().copied())).unwrap();
            }
        }
        for &(r, p) in &night.rejections {
            writeln!(out, "night {} reject {} {}", t + 1, Person::new(receiving, r), Person::new(proposing, p)).unwrap();
        }
    }
    out.push_str(&write_matching(&trace.final_matching));
    out
}

pub fn write_replication_map(map: &ReplicationMap) -> String {
    let mut out = String::new();
    for (c, &(w, slot)) in map.backward.iter().enumerate() {
        let w = Person::woman(w);
        writeln!(out, "clone ({w},{slot}) <- {w} as {}", Person::woman(c)).unwrap();
    }
    out
}

pub fn write_padding_map(map: &PaddingMap) -> String {
    let mut out = String::new();
    for (side, roles) in [(Side::Woman, &map.women), (Side::Man, &map.men)] {
        for (i, role) in roles.iter().enumerate() {
            if let Padded::Dummy { owner, slot } = *role {
                let owner = Person::new(side.other(), owner);
                writeln!(out, "dummy e{slot}^{owner} for {owner} as {}", Person::new(side, i)).unwrap();
            }
        }
    }
    out
}
