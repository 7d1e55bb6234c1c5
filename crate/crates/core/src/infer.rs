//! Activation propagation.
//!
//! Inference runs in synchronous rounds. In each round every link is
//! evaluated against the states at the start of the round: an excitatory
//! link whose terminals are all satisfied is triggered, and it fires unless a
//! triggered inhibitory link targets it. Firing asserts the head value. The
//! loop stops at the first round that changes no neuron.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::graph::{ElinkId, GraphError, IlinkId, Network, NeuronId, NeuronState, Terminal, TruthValue};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InferError {
    #[error("unknown thing {0:?}")]
    UnknownThing(String),
    #[error("fact for {0:?} given twice with different values")]
    ConflictingFact(String),
    #[error("facts line {line}: {message}")]
    BadFact { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Perceived things: each maps to True (positively activated) or False
/// (negatively activated). Things not listed start Unknown.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FactSet {
    assignments: BTreeMap<String, bool>,
}

impl FactSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, thing: impl Into<String>, value: bool) -> Result<(), InferError> {
        let thing = thing.into();
        match self.assignments.get(&thing) {
            Some(&v) if v != value => Err(InferError::ConflictingFact(thing)),
            _ => {
                self.assignments.insert(thing, value);
                Ok(())
            }
        }
    }

    pub fn with(mut self, thing: impl Into<String>, value: bool) -> Self {
        self.insert(thing, value).expect("conflicting fact");
        self
    }

    /// All listed things set True.
    pub fn all_true<S: AsRef<str>>(things: impl IntoIterator<Item = S>) -> Self {
        let mut facts = FactSet::new();
        for t in things {
            facts.assignments.insert(t.as_ref().to_string(), true);
        }
        facts
    }

    pub fn get(&self, thing: &str) -> Option<bool> {
        self.assignments.get(thing).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, bool)> + '_ {
        self.assignments.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// Parses `thing=true|false` lines; blank lines and `#` comments are
    /// skipped. Thing names may contain `=`, so the value follows the last one.
    pub fn parse(text: &str) -> Result<FactSet, InferError> {
        let mut facts = FactSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let bad = |message: String| InferError::BadFact { line, message };
            let (thing, value) = content
                .rsplit_once('=')
                .ok_or_else(|| bad(format!("expected thing=true|false, got {content:?}")))?;
            let value = match value.trim() {
                "true" => true,
                "false" => false,
                other => return Err(bad(format!("value must be true or false, got {other:?}"))),
            };
            let thing = thing.trim();
            crate::graph::validate_thing(thing).map_err(|e| bad(e.to_string()))?;
            facts.insert(thing, value).map_err(|e| bad(e.to_string()))?;
        }
        Ok(facts)
    }
}

impl fmt::Display for FactSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.assignments {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct InferOptions {
    /// Facts about things missing from the network become isolated neurons
    /// instead of an error.
    pub auto_create: bool,
}

/// One link firing: in `round`, `link` asserted `value` on `neuron`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub round: usize,
    pub link: ElinkId,
    pub neuron: NeuronId,
    pub value: TruthValue,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InferenceResult {
    /// Thing names by neuron id; longer than the network's neuron list when
    /// facts auto-created neurons.
    pub things: Vec<String>,
    pub states: Vec<NeuronState>,
    pub inputs: BTreeSet<NeuronId>,
    pub fired: BTreeSet<ElinkId>,
    /// Links triggered in the final state but held back by inhibitors.
    pub blocked: BTreeMap<ElinkId, Vec<IlinkId>>,
    pub contradictions: BTreeSet<NeuronId>,
    /// Links that fired earlier but whose inhibitor is triggered in the final
    /// state.
    pub unstable: BTreeSet<ElinkId>,
    pub trace: Vec<TraceEntry>,
    /// Rounds executed, including the final one that changed nothing.
    pub rounds: usize,
}

impl InferenceResult {
    pub fn id(&self, thing: &str) -> Option<NeuronId> {
        self.things
            .iter()
            .position(|t| t == thing)
            .map(|i| NeuronId(i as u32))
    }

    pub fn state(&self, thing: &str) -> Option<NeuronState> {
        self.id(thing).map(|id| self.states[id.index()])
    }

    /// Value of `thing`, Unknown for things the network never saw.
    pub fn value(&self, thing: &str) -> TruthValue {
        self.state(thing).map_or(TruthValue::Unknown, |s| s.value)
    }

    /// `thing=value` per neuron in id order, contradictions flagged.
    pub fn states_text(&self) -> String {
        let mut out = String::new();
        for (name, st) in self.things.iter().zip(&self.states) {
            out.push_str(&format!("{name}={}", st.value));
            if st.contradictory {
                out.push_str(" contradictory");
            }
            out.push('\n');
        }
        out
    }

    /// Tab-separated `round, link, neuron, value` lines.
    pub fn trace_tsv(&self) -> String {
        let mut out = String::from("round\tlink\tneuron\tvalue\n");
        for t in &self.trace {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                t.round,
                t.link,
                self.things[t.neuron.index()],
                t.value
            ));
        }
        out
    }
}

pub fn infer(net: &Network, facts: &FactSet) -> Result<InferenceResult, InferError> {
    infer_with(net, facts, InferOptions::default())
}

pub fn infer_with(
    net: &Network,
    facts: &FactSet,
    options: InferOptions,
) -> Result<InferenceResult, InferError> {
    let mut things: Vec<String> = net.neurons().map(|(_, n)| n.to_string()).collect();
    let mut initial: Vec<(NeuronId, bool)> = Vec::with_capacity(facts.len());
    for (thing, value) in facts.iter() {
        let id = match net.neuron_id(thing) {
            Some(id) => id,
            None if options.auto_create => {
                crate::graph::validate_thing(thing)?;
                things.push(thing.to_string());
                NeuronId(things.len() as u32 - 1)
            }
            None => return Err(InferError::UnknownThing(thing.to_string())),
        };
        initial.push((id, value));
    }
    Ok(propagate(net, things, &initial))
}

fn propagate(net: &Network, things: Vec<String>, initial: &[(NeuronId, bool)]) -> InferenceResult {
    let n = things.len();
    let mut states = vec![NeuronState::UNKNOWN; n];
    let mut inputs = BTreeSet::new();
    for &(id, v) in initial {
        states[id.index()] = NeuronState::known(v);
        inputs.insert(id);
    }

    let mut fired = BTreeSet::new();
    let mut contradictions = BTreeSet::new();
    let mut trace = Vec::new();
    // Each neuron can change at most twice (known, then contradictory).
    let limit = 2 * n + 2;
    let mut round = 0;
    loop {
        round += 1;
        let snapshot = states.clone();
        let triggered_il = triggered_inhibitors(net, &snapshot);
        let mut asserted: BTreeMap<NeuronId, (bool, bool)> = BTreeMap::new();
        for link in net.elinks() {
            if !all_satisfied(&link.terminals, &snapshot) {
                continue;
            }
            if net.inhibitors_of(link.id).any(|il| triggered_il.contains(&il.id)) {
                continue;
            }
            let value = link.head.polarity.value();
            if fired.insert(link.id) {
                trace.push(TraceEntry {
                    round,
                    link: link.id,
                    neuron: link.head.neuron,
                    value,
                });
            }
            let slot = asserted.entry(link.head.neuron).or_default();
            match value {
                TruthValue::True => slot.0 = true,
                _ => slot.1 = true,
            }
        }

        let mut changed = false;
        for (id, (t, f)) in asserted {
            let st = &mut states[id.index()];
            if st.contradictory {
                continue;
            }
            let conflict = match st.value {
                TruthValue::Unknown if t && f => true,
                TruthValue::Unknown => {
                    st.value = TruthValue::from_bool(t);
                    changed = true;
                    false
                }
                TruthValue::True => f,
                TruthValue::False => t,
            };
            if conflict {
                st.contradictory = true;
                contradictions.insert(id);
                changed = true;
            }
        }
        if !changed {
            break;
        }
        assert!(round <= limit, "inference failed to converge");
    }

    let triggered_il = triggered_inhibitors(net, &states);
    let mut blocked = BTreeMap::new();
    let mut unstable = BTreeSet::new();
    for link in net.elinks() {
        if !all_satisfied(&link.terminals, &states) {
            continue;
        }
        let blockers: Vec<IlinkId> = net
            .inhibitors_of(link.id)
            .filter(|il| triggered_il.contains(&il.id))
            .map(|il| il.id)
            .collect();
        if blockers.is_empty() {
            continue;
        }
        if fired.contains(&link.id) {
            unstable.insert(link.id);
        } else {
            blocked.insert(link.id, blockers);
        }
    }

    InferenceResult {
        things,
        states,
        inputs,
        fired,
        blocked,
        contradictions,
        unstable,
        trace,
        rounds: round,
    }
}

fn all_satisfied(terminals: &[Terminal], states: &[NeuronState]) -> bool {
    terminals
        .iter()
        .all(|t| t.polarity.satisfied_by(states[t.neuron.index()]))
}

fn triggered_inhibitors(net: &Network, states: &[NeuronState]) -> BTreeSet<IlinkId> {
    net.ilinks()
        .filter(|il| all_satisfied(&il.terminals, states))
        .map(|il| il.id)
        .collect()
}

// ---------------------------------------------------------------------------
// Stratification

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StratificationIssueKind {
    /// The trigger neuron is reachable through excitatory links from the head
    /// of the link being inhibited (including the head itself): the link can
    /// undermine its own inhibitor or vice versa.
    ReachableFromHead,
    /// The trigger neuron is the head of some excitatory link, so it may only
    /// become true after the inhibited link has already fired.
    DerivedTrigger,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StratificationIssue {
    pub ilink: IlinkId,
    pub target: ElinkId,
    pub neuron: NeuronId,
    pub kind: StratificationIssueKind,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StratificationReport {
    pub issues: Vec<StratificationIssue>,
}

impl StratificationReport {
    pub fn is_ok(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn render(&self, net: &Network) -> String {
        if self.is_ok() {
            return "ok\n".to_string();
        }
        let mut out = String::new();
        for i in &self.issues {
            let why = match i.kind {
                StratificationIssueKind::ReachableFromHead => "reachable from the inhibited link's head",
                StratificationIssueKind::DerivedTrigger => "derived by another link",
            };
            out.push_str(&format!(
                "{} on {}: trigger {} is {why}\n",
                i.ilink,
                i.target,
                net.thing(i.neuron)
            ));
        }
        out
    }
}

/// Flags inhibitory links whose firing order relative to their target is not
/// fixed by the structure. A network with no issues evaluates the same way
/// under any firing order: every inhibitor trigger is an input neuron.
pub fn stratification_check(net: &Network) -> StratificationReport {
    let mut downstream: Vec<Vec<NeuronId>> = vec![Vec::new(); net.neuron_count()];
    let mut derived = vec![false; net.neuron_count()];
    for l in net.elinks() {
        derived[l.head.neuron.index()] = true;
        for t in &l.terminals {
            downstream[t.neuron.index()].push(l.head.neuron);
        }
    }
    let reach_from = |start: NeuronId| {
        let mut seen = vec![false; downstream.len()];
        let mut queue = VecDeque::from([start]);
        seen[start.index()] = true;
        while let Some(x) = queue.pop_front() {
            for &y in &downstream[x.index()] {
                if !seen[y.index()] {
                    seen[y.index()] = true;
                    queue.push_back(y);
                }
            }
        }
        seen
    };

    let mut issues = Vec::new();
    for il in net.ilinks() {
        let head = net.elink(il.target).expect("inhibitor target exists").head.neuron;
        let reach = reach_from(head);
        for t in &il.terminals {
            let kind = if reach[t.neuron.index()] {
                StratificationIssueKind::ReachableFromHead
            } else if derived[t.neuron.index()] {
                StratificationIssueKind::DerivedTrigger
            } else {
                continue;
            };
            issues.push(StratificationIssue {
                ilink: il.id,
                target: il.target,
                neuron: t.neuron,
                kind,
            });
        }
    }
    StratificationReport { issues }
}

// ---------------------------------------------------------------------------
// Explanations

/// Derivation tree for `thing`: the link that set its value, that link's
/// terminals, and their own justifications down to the given facts.
pub fn explain(net: &Network, result: &InferenceResult, thing: &str) -> Result<String, InferError> {
    let id = result
        .id(thing)
        .ok_or_else(|| InferError::UnknownThing(thing.to_string()))?;
    let mut out = String::new();
    explain_node(net, result, id, 0, &mut out);
    Ok(out)
}

fn describe_link(net: &Network, id: ElinkId) -> String {
    let link = net.elink(id).expect("fired link exists");
    let lit = |t: &Terminal| match t.polarity {
        crate::graph::Polarity::Positive => net.thing(t.neuron).to_string(),
        crate::graph::Polarity::Negative => format!("not {}", net.thing(t.neuron)),
    };
    let body: Vec<String> = link.terminals.iter().map(lit).collect();
    format!("{id}: if {} then {}", body.join(", "), lit(&link.head))
}

fn explain_node(net: &Network, result: &InferenceResult, id: NeuronId, depth: usize, out: &mut String) {
    let indent = "  ".repeat(depth);
    let name = &result.things[id.index()];
    let st = result.states[id.index()];
    let asserting: Vec<&TraceEntry> = result.trace.iter().filter(|t| t.neuron == id).collect();

    if result.inputs.contains(&id) {
        out.push_str(&format!("{indent}{name}={} (given)", st.value));
        if st.contradictory {
            let against: Vec<String> = asserting
                .iter()
                .filter(|t| t.value != st.value)
                .map(|t| format!("{} asserts {}", t.link, t.value))
                .collect();
            out.push_str(&format!(" contradictory: {}", against.join(", ")));
        }
        out.push('\n');
        return;
    }

    match st.value {
        TruthValue::Unknown if st.contradictory => {
            let claims: Vec<String> = asserting
                .iter()
                .map(|t| format!("{} asserts {}", t.link, t.value))
                .collect();
            out.push_str(&format!("{indent}{name} contradictory: {}\n", claims.join(", ")));
        }
        TruthValue::Unknown => {
            let blocked: Vec<String> = result
                .blocked
                .iter()
                .filter(|(e, _)| net.elink(**e).is_some_and(|l| l.head.neuron == id))
                .map(|(e, ils)| {
                    let ils: Vec<String> = ils.iter().map(ToString::to_string).collect();
                    format!("{e} by {}", ils.join(", "))
                })
                .collect();
            if blocked.is_empty() {
                out.push_str(&format!("{indent}{name}=unknown; no triggered links\n"));
            } else {
                out.push_str(&format!(
                    "{indent}{name}=unknown; blocked: {}\n",
                    blocked.join("; ")
                ));
            }
        }
        value => {
            let just = asserting
                .iter()
                .find(|t| t.value == value)
                .expect("derived value has a firing in the trace");
            out.push_str(&format!(
                "{indent}{name}={value} via {}",
                describe_link(net, just.link)
            ));
            if st.contradictory {
                let against: Vec<String> = asserting
                    .iter()
                    .filter(|t| t.value != value)
                    .map(|t| format!("{} asserts {}", t.link, t.value))
                    .collect();
                out.push_str(&format!(" contradictory: {}", against.join(", ")));
            }
            out.push('\n');
            let link = net.elink(just.link).expect("fired link exists");
            for t in &link.terminals {
                explain_node(net, result, t.neuron, depth + 1, out);
            }
        }
    }
}
