//! Property harness: sisterhood under lying, its corollaries and the
//! classical proposer-side results, checked by exhaustive enumeration on
//! small instances.

mod checks;
mod generator;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use itertools::Itertools;
use rayon::prelude::*;

pub use checks::*;
pub use generator::{monogamous_up_to_symmetry, InstanceGenerator};

use crate::error::Result;
use crate::format::write_scenario;
use crate::manipulation::{LieScenario, OutcomeReport, SearchLimits};
use crate::profile::PreferenceProfile;

pub const DEFAULT_VIOLATION_CAP: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckConfig {
    /// Liar sets of every size from 1 up to this are enumerated.
    pub max_liars: usize,
    /// Let liars truncate their lists in blacklist profiles.
    pub allow_truncation: bool,
    pub limits: SearchLimits,
    /// Violations kept in full; the rest are only counted.
    pub violation_cap: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            max_liars: 2,
            allow_truncation: true,
            limits: SearchLimits::default(),
            violation_cap: DEFAULT_VIOLATION_CAP,
        }
    }
}

/// Everything needed to replay a violation: the scenario (truth plus
/// declarations) and the outcome report observed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViolationBundle {
    pub property: String,
    /// Position of the instance in the tested sequence.
    pub instance: usize,
    pub message: String,
    pub scenario: LieScenario,
    pub report: Option<OutcomeReport>,
}

impl ViolationBundle {
    /// Scenario file with the violation described in leading comments.
    pub fn to_scenario_file(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# property: {}", self.property).unwrap();
        writeln!(out, "# instance: {}", self.instance).unwrap();
        for line in self.message.lines() {
            writeln!(out, "# violation: {line}").unwrap();
        }
        if let Some(r) = &self.report {
            writeln!(out, "# original: {}", r.original).unwrap();
            writeln!(out, "# new: {}", r.new).unwrap();
        }
        out.push_str(&write_scenario(&self.scenario));
        out
    }
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub property: String,
    pub instances: usize,
    /// Scenarios examined (lie profiles, or instances for lie-free checks).
    pub scenarios: u64,
    /// Named tallies, e.g. how many scenarios met the premise.
    pub counters: BTreeMap<String, u64>,
    pub violation_count: u64,
    /// The first `violation_cap` violations, in instance order.
    pub violations: Vec<ViolationBundle>,
    pub elapsed: Duration,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }

    pub fn counter(&self, name: &str) -> u64 {
        self.counters.get(name).copied().unwrap_or(0)
    }

    pub fn summary(&self) -> String {
        let mut out = format!(
            "{}: {} ({} instances, {} scenarios, {} violations, {:.2?})",
            self.property,
            if self.passed() { "pass" } else { "FAIL" },
            self.instances,
            self.scenarios,
            self.violation_count,
            self.elapsed
        );
        for (k, v) in &self.counters {
            write!(out, "\n  {k}: {v}").unwrap();
        }
        out
    }
}

/// Per-instance findings, merged in instance order.
#[derive(Debug, Default)]
pub(crate) struct Tally {
    scenarios: u64,
    counters: BTreeMap<&'static str, u64>,
    violation_count: u64,
    violations: Vec<(String, LieScenario, Option<OutcomeReport>)>,
    cap: usize,
}

impl Tally {
    pub(crate) fn scenario(&mut self) {
        self.scenarios += 1;
    }

    pub(crate) fn bump(&mut self, key: &'static str) {
        *self.counters.entry(key).or_default() += 1;
    }

    pub(crate) fn violate(&mut self, message: String, scenario: LieScenario, report: Option<OutcomeReport>) {
        self.violation_count += 1;
        if self.violations.len() < self.cap {
            self.violations.push((message, scenario, report));
        }
    }
}

pub(crate) fn drive<F>(property: &str, instances: &[PreferenceProfile], cfg: &CheckConfig, check: F) -> Result<CheckResult>
where
    F: Fn(&PreferenceProfile, &CheckConfig, &mut Tally) -> Result<()> + Sync,
{
    let start = Instant::now();
    let tallies: Vec<Result<Tally>> = instances
        .par_iter()
        .map(|p| {
            let mut t = Tally { cap: cfg.violation_cap, ..Tally::default() };
            check(p, cfg, &mut t).map(|_| t)
        })
        .collect();
    let mut result = CheckResult {
        property: property.to_string(),
        instances: instances.len(),
        scenarios: 0,
        counters: BTreeMap::new(),
        violation_count: 0,
        violations: Vec::new(),
        elapsed: Duration::ZERO,
    };
    for (i, t) in tallies.into_iter().enumerate() {
        let t = t?;
        result.scenarios += t.scenarios;
        for (k, v) in t.counters {
            *result.counters.entry(k.to_string()).or_default() += v;
        }
        result.violation_count += t.violation_count;
        for (message, scenario, report) in t.violations {
            if result.violations.len() < cfg.violation_cap {
                result.violations.push(ViolationBundle {
                    property: property.to_string(),
                    instance: i,
                    message,
                    scenario,
                    report,
                });
            }
        }
    }
    result.elapsed = start.elapsed();
    Ok(result)
}

/// Liar sets of size `1..=max`, smaller sets first, each size in
/// lexicographic order.
pub fn liar_sets(women: usize, max: usize) -> Vec<Vec<usize>> {
    (1..=max.min(women)).flat_map(|k| (0..women).combinations(k)).collect()
}
