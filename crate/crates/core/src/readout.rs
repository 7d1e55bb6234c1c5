//! Recovering the stored rules from the network structure, and a bounded
//! semantic comparison between rule bases.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::exec::Exec;
use crate::graph::{Network, NeuronState};
use crate::infer::{infer, FactSet};
use crate::rules::{build, canonicalize, EncodingPolicy, Rule, RuleBase, RuleError, RuleShape};

/// One rule per excitatory link, in canonical form. Terminals give the body,
/// inhibitory links give `not` literals or `unless` clauses according to
/// `policy`, and the head terminal gives the head.
pub fn readout(net: &Network, policy: EncodingPolicy) -> RuleBase {
    let rules: Vec<Rule> = net
        .elinks()
        .map(|l| {
            RuleShape::of_elink(net, l.id)
                .expect("listed link exists")
                .to_rule(policy)
        })
        .collect();
    canonicalize(&rules, policy)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EquivalenceError {
    #[error("{things} things exceed the enumeration bound of {bound}")]
    BoundExceeded { things: usize, bound: usize },
    #[error(transparent)]
    Rule(#[from] RuleError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivalence {
    Equal,
    /// The first assignment (in enumeration order) where the two rule bases
    /// conclude differently.
    Differs(FactSet),
}

impl fmt::Display for Equivalence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Equivalence::Equal => f.write_str("equal"),
            Equivalence::Differs(w) => {
                let parts: Vec<String> = w.iter().map(|(t, v)| format!("{t}={v}")).collect();
                write!(f, "differ at {{{}}}", parts.join(", "))
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EquivalenceOptions {
    pub policy: EncodingPolicy,
    pub bound: usize,
    pub exec: Exec,
}

impl Default for EquivalenceOptions {
    fn default() -> Self {
        EquivalenceOptions {
            policy: EncodingPolicy::default(),
            bound: 12,
            exec: Exec::default(),
        }
    }
}

pub fn equivalent(a: &[Rule], b: &[Rule], things: &[&str]) -> Result<Equivalence, EquivalenceError> {
    equivalent_with(a, b, things, EquivalenceOptions::default())
}

/// Runs inference on both compiled rule bases for every assignment of
/// {absent, true, false} to `things` and compares the resulting state of
/// every thing either base mentions. Assignments are enumerated with the
/// first thing as the most significant digit.
pub fn equivalent_with(
    a: &[Rule],
    b: &[Rule],
    things: &[&str],
    opts: EquivalenceOptions,
) -> Result<Equivalence, EquivalenceError> {
    let mut things: Vec<&str> = things.to_vec();
    let mut seen = BTreeSet::new();
    things.retain(|t| seen.insert(*t));
    if things.len() > opts.bound {
        return Err(EquivalenceError::BoundExceeded {
            things: things.len(),
            bound: opts.bound,
        });
    }
    let mut net_a = build(a, opts.policy)?;
    let mut net_b = build(b, opts.policy)?;
    for t in &things {
        net_a.add_neuron(t).map_err(RuleError::from)?;
        net_b.add_neuron(t).map_err(RuleError::from)?;
    }
    let observed: BTreeSet<String> = net_a
        .neurons()
        .chain(net_b.neurons())
        .map(|(_, n)| n.to_string())
        .collect();

    let total = 3usize.pow(things.len() as u32);
    let assignment = |mut index: usize| {
        let mut facts = FactSet::new();
        for t in things.iter().rev() {
            match index % 3 {
                1 => facts.insert(*t, true).expect("fresh thing"),
                2 => facts.insert(*t, false).expect("fresh thing"),
                _ => {}
            }
            index /= 3;
        }
        facts
    };
    let witness = opts.exec.find_first(total, |i| {
        let facts = assignment(i);
        let ra = infer(&net_a, &facts).expect("all things exist");
        let rb = infer(&net_b, &facts).expect("all things exist");
        let state = |r: &crate::infer::InferenceResult, t: &str| r.state(t).unwrap_or(NeuronState::UNKNOWN);
        let differs = observed.iter().any(|t| state(&ra, t) != state(&rb, t));
        differs.then_some(facts)
    });
    Ok(witness.map_or(Equivalence::Equal, Equivalence::Differs))
}
