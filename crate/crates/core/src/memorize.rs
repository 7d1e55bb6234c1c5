//! Incremental memorization of dataset records with full replay after each
//! insertion.

use std::fmt::Write as _;

use crate::dataset::{conflict_groups, record_to_rule, Record};
use crate::exec::Exec;
use crate::graph::{Network, TruthValue};
use crate::infer::{infer, FactSet};
use crate::rules::{add_rule, EncodingPolicy};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepReport {
    /// 1-based count of records inserted so far.
    pub step: usize,
    pub recalled: usize,
    pub total: usize,
    /// Replays that ended with a contradictory neuron or two classes active.
    pub contradictions: usize,
    pub neurons: usize,
    pub elinks: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemorizationReport {
    pub steps: Vec<StepReport>,
    /// Groups of record indices sharing attributes but not a class.
    pub conflicts: Vec<Vec<usize>>,
    /// Records not recalled after the last insertion.
    pub failed: Vec<usize>,
    pub consistent_total: usize,
    pub consistent_recalled: usize,
}

impl MemorizationReport {
    pub fn final_recall(&self) -> f64 {
        match self.steps.last() {
            Some(s) if s.total > 0 => s.recalled as f64 / s.total as f64,
            _ => 1.0,
        }
    }

    /// Recall over records outside every conflict group.
    pub fn consistent_recall(&self) -> f64 {
        if self.consistent_total == 0 {
            1.0
        } else {
            self.consistent_recalled as f64 / self.consistent_total as f64
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,recalled,total,contradictions\n");
        for s in &self.steps {
            let _ = writeln!(out, "{},{},{},{}", s.step, s.recalled, s.total, s.contradictions);
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "records: {}", self.steps.len());
        let _ = writeln!(out, "step  recalled  total  contradictions  neurons  elinks");
        for s in &self.steps {
            let _ = writeln!(
                out,
                "{:>4}  {:>8}  {:>5}  {:>14}  {:>7}  {:>6}",
                s.step, s.recalled, s.total, s.contradictions, s.neurons, s.elinks
            );
        }
        if let Some(last) = self.steps.last() {
            let _ = writeln!(
                out,
                "final recall: {}/{} ({:.3})",
                last.recalled,
                last.total,
                self.final_recall()
            );
        }
        if self.conflicts.is_empty() {
            let _ = writeln!(out, "conflicting records: none");
        } else {
            for g in &self.conflicts {
                let ids: Vec<String> = g.iter().map(|i| format!("#{}", i + 1)).collect();
                let _ = writeln!(out, "conflicting records: {}", ids.join(" "));
            }
            let _ = writeln!(
                out,
                "recall on consistent records: {}/{} ({:.3})",
                self.consistent_recalled,
                self.consistent_total,
                self.consistent_recall()
            );
        }
        if !self.failed.is_empty() {
            let ids: Vec<String> = self.failed.iter().map(|i| format!("#{}", i + 1)).collect();
            let _ = writeln!(out, "not recalled: {}", ids.join(" "));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Replay {
    recalled: bool,
    contradiction: bool,
}

/// A record is recalled when, given its attributes as true facts, its class
/// comes out true, no other class of the same attribute is true and no
/// neuron is contradictory.
fn replay(net: &Network, rec: &Record) -> Replay {
    let mut facts = FactSet::new();
    for t in rec.attribute_things() {
        // Records never repeat an attribute.
        let _ = facts.insert(t, true);
    }
    let result = infer(net, &facts).expect("record things are in the network");
    let prefix = rec.class_prefix();
    let class = rec.class_thing();
    let active_classes = result
        .things
        .iter()
        .filter(|t| t.starts_with(&prefix) && result.value(t) == TruthValue::True)
        .count();
    let contradiction = !result.contradictions.is_empty() || active_classes > 1;
    Replay {
        recalled: !contradiction && result.value(&class) == TruthValue::True,
        contradiction,
    }
}

pub fn memorize(records: &[Record]) -> MemorizationReport {
    memorize_with(records, Exec::default())
}

/// Inserts the records one at a time as rules; after each insertion every
/// record inserted so far is replayed.
pub fn memorize_with(records: &[Record], exec: Exec) -> MemorizationReport {
    let mut net = Network::new();
    let mut steps = Vec::with_capacity(records.len());
    let mut last = Vec::new();
    for (i, rec) in records.iter().enumerate() {
        add_rule(&mut net, &record_to_rule(rec), EncodingPolicy::AsInhibitor)
            .expect("record rules are valid");
        last = exec.map_range(i + 1, |j| replay(&net, &records[j]));
        let stats = net.stats();
        steps.push(StepReport {
            step: i + 1,
            recalled: last.iter().filter(|r| r.recalled).count(),
            total: i + 1,
            contradictions: last.iter().filter(|r| r.contradiction).count(),
            neurons: stats.neuron_count,
            elinks: stats.elink_count,
        });
    }
    let conflicts = conflict_groups(records);
    let in_conflict = |j: usize| conflicts.iter().any(|g| g.contains(&j));
    let consistent: Vec<usize> = (0..records.len()).filter(|&j| !in_conflict(j)).collect();
    MemorizationReport {
        failed: (0..last.len()).filter(|&j| !last[j].recalled).collect(),
        consistent_total: consistent.len(),
        consistent_recalled: consistent.iter().filter(|&&j| last[j].recalled).count(),
        conflicts,
        steps,
    }
}
