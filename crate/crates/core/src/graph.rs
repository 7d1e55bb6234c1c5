//! The network itself: proposition neurons joined by excitatory links
//! (conjunctions that assert a head) and inhibitory links (conjunctions that
//! block a specific excitatory link).
//!
//! Links are stored as hyperedges. A link with one terminal is the simple
//! positive/negative link; a link with several terminals is the composite
//! form. Both kinds are deduplicated by content, so adding the same link twice
//! returns the id handed out the first time.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Words reserved by the rule language; they can never name a thing.
pub const KEYWORDS: [&str; 5] = ["if", "then", "not", "and", "unless"];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("invalid thing name {0:?}")]
    InvalidName(String),
    #[error("unknown neuron {0}")]
    UnknownNeuron(NeuronId),
    #[error("unknown excitatory link {0}")]
    UnknownElink(ElinkId),
    #[error("unknown inhibitory link {0}")]
    UnknownIlink(IlinkId),
    #[error("a link needs at least one terminal")]
    EmptyTerminals,
    #[error("neuron {0} appears twice among the terminals")]
    DuplicateTerminal(NeuronId),
    #[error("head neuron {0} is also a terminal of the same link")]
    SelfLoop(NeuronId),
    #[error("malformed network document: {0}")]
    Malformed(String),
    #[error("unsupported network document version {0}")]
    UnsupportedVersion(u32),
    #[error("network document, {item}: {reason}")]
    BadDocument { item: String, reason: String },
}

pub type Result<T, E = GraphError> = std::result::Result<T, E>;

macro_rules! id_type {
    ($name:ident, $prefix:literal) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }
    };
}

id_type!(NeuronId, "n");
id_type!(ElinkId, "e");
id_type!(IlinkId, "i");

/// Checks that `name` can label a thing: non-empty, built from letters,
/// digits, `_`, `-` and `=`, and not a rule-language keyword.
pub fn validate_thing(name: &str) -> Result<()> {
    let ok = !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '='))
        && !KEYWORDS.contains(&name);
    if ok {
        Ok(())
    } else {
        Err(GraphError::InvalidName(name.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TruthValue {
    True,
    False,
    Unknown,
}

impl TruthValue {
    pub fn from_bool(b: bool) -> Self {
        if b {
            TruthValue::True
        } else {
            TruthValue::False
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TruthValue::True => "true",
            TruthValue::False => "false",
            TruthValue::Unknown => "unknown",
        }
    }
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What a neuron holds during inference. `contradictory` is set by the engine
/// when two derivations (or a derivation and an input fact) disagree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NeuronState {
    pub value: TruthValue,
    pub contradictory: bool,
}

impl NeuronState {
    pub const UNKNOWN: NeuronState = NeuronState {
        value: TruthValue::Unknown,
        contradictory: false,
    };

    pub fn known(value: bool) -> Self {
        NeuronState {
            value: TruthValue::from_bool(value),
            contradictory: false,
        }
    }
}

impl Default for NeuronState {
    fn default() -> Self {
        Self::UNKNOWN
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarity {
    #[serde(rename = "pos")]
    Positive,
    #[serde(rename = "neg")]
    Negative,
}

impl Polarity {
    /// The value a head with this polarity asserts.
    pub fn value(self) -> TruthValue {
        match self {
            Polarity::Positive => TruthValue::True,
            Polarity::Negative => TruthValue::False,
        }
    }

    pub fn satisfied_by(self, state: NeuronState) -> bool {
        !state.contradictory && state.value == self.value()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Terminal {
    pub neuron: NeuronId,
    pub polarity: Polarity,
}

impl Terminal {
    pub fn pos(neuron: NeuronId) -> Self {
        Terminal {
            neuron,
            polarity: Polarity::Positive,
        }
    }

    pub fn neg(neuron: NeuronId) -> Self {
        Terminal {
            neuron,
            polarity: Polarity::Negative,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExcitatoryLink {
    pub id: ElinkId,
    /// Sorted by neuron id, one entry per neuron.
    pub terminals: Vec<Terminal>,
    pub head: Terminal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InhibitoryLink {
    pub id: IlinkId,
    /// Sorted by neuron id, one entry per neuron.
    pub terminals: Vec<Terminal>,
    pub target: ElinkId,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub neuron_count: usize,
    pub elink_count: usize,
    pub ilink_count: usize,
}

impl fmt::Display for Stats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "neurons={} elinks={} ilinks={}",
            self.neuron_count, self.elink_count, self.ilink_count
        )
    }
}

#[derive(Clone, Debug, Default)]
pub struct Network {
    names: Vec<String>,
    by_name: HashMap<String, NeuronId>,
    elinks: BTreeMap<ElinkId, ExcitatoryLink>,
    elink_index: HashMap<(Vec<Terminal>, Terminal), ElinkId>,
    ilinks: BTreeMap<IlinkId, InhibitoryLink>,
    ilink_index: HashMap<(Vec<Terminal>, ElinkId), IlinkId>,
    inhibitors: BTreeMap<ElinkId, BTreeSet<IlinkId>>,
    next_elink: u32,
    next_ilink: u32,
}

/// Structural equality: same neurons (ids and names) and the same links under
/// the same ids. Id counters are not part of the structure.
impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.elinks == other.elinks && self.ilinks == other.ilinks
    }
}

impl Eq for Network {}

impl Network {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the neuron for `name`, creating it (state Unknown) if needed.
    pub fn add_neuron(&mut self, name: &str) -> Result<NeuronId> {
        if let Some(&id) = self.by_name.get(name) {
            return Ok(id);
        }
        validate_thing(name)?;
        let id = NeuronId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn neuron_id(&self, name: &str) -> Option<NeuronId> {
        self.by_name.get(name).copied()
    }

    /// Name of the thing a neuron represents.
    ///
    /// Panics if `id` did not come from this network.
    pub fn thing(&self, id: NeuronId) -> &str {
        &self.names[id.index()]
    }

    pub fn neuron_count(&self) -> usize {
        self.names.len()
    }

    pub fn neurons(&self) -> impl Iterator<Item = (NeuronId, &str)> + '_ {
        self.names
            .iter()
            .enumerate()
            .map(|(i, n)| (NeuronId(i as u32), n.as_str()))
    }

    pub fn elinks(&self) -> impl Iterator<Item = &ExcitatoryLink> + '_ {
        self.elinks.values()
    }

    pub fn ilinks(&self) -> impl Iterator<Item = &InhibitoryLink> + '_ {
        self.ilinks.values()
    }

    pub fn elink(&self, id: ElinkId) -> Option<&ExcitatoryLink> {
        self.elinks.get(&id)
    }

    pub fn ilink(&self, id: IlinkId) -> Option<&InhibitoryLink> {
        self.ilinks.get(&id)
    }

    /// Inhibitory links targeting `target`, in id order.
    pub fn inhibitors_of(&self, target: ElinkId) -> impl Iterator<Item = &InhibitoryLink> + '_ {
        self.inhibitors
            .get(&target)
            .into_iter()
            .flatten()
            .map(move |id| &self.ilinks[id])
    }

    pub fn stats(&self) -> Stats {
        Stats {
            neuron_count: self.names.len(),
            elink_count: self.elinks.len(),
            ilink_count: self.ilinks.len(),
        }
    }

    fn check_neuron(&self, id: NeuronId) -> Result<()> {
        if id.index() < self.names.len() {
            Ok(())
        } else {
            Err(GraphError::UnknownNeuron(id))
        }
    }

    fn normalize_terminals(&self, terminals: impl IntoIterator<Item = Terminal>) -> Result<Vec<Terminal>> {
        let mut out: Vec<Terminal> = terminals.into_iter().collect();
        if out.is_empty() {
            return Err(GraphError::EmptyTerminals);
        }
        for t in &out {
            self.check_neuron(t.neuron)?;
        }
        out.sort();
        if let Some(w) = out.windows(2).find(|w| w[0].neuron == w[1].neuron) {
            return Err(GraphError::DuplicateTerminal(w[0].neuron));
        }
        Ok(out)
    }

    pub fn find_excitatory_link(&self, terminals: &[Terminal], head: Terminal) -> Option<ElinkId> {
        let mut key: Vec<Terminal> = terminals.to_vec();
        key.sort();
        self.elink_index.get(&(key, head)).copied()
    }

    pub fn add_excitatory_link(
        &mut self,
        terminals: impl IntoIterator<Item = Terminal>,
        head: Terminal,
    ) -> Result<ElinkId> {
        let terminals = self.normalize_terminals(terminals)?;
        self.check_neuron(head.neuron)?;
        if terminals.iter().any(|t| t.neuron == head.neuron) {
            return Err(GraphError::SelfLoop(head.neuron));
        }
        let key = (terminals, head);
        if let Some(&id) = self.elink_index.get(&key) {
            return Ok(id);
        }
        let id = ElinkId(self.next_elink);
        self.next_elink += 1;
        self.elinks.insert(
            id,
            ExcitatoryLink {
                id,
                terminals: key.0.clone(),
                head,
            },
        );
        self.elink_index.insert(key, id);
        Ok(id)
    }

    pub fn add_inhibitory_link(
        &mut self,
        terminals: impl IntoIterator<Item = Terminal>,
        target: ElinkId,
    ) -> Result<IlinkId> {
        if !self.elinks.contains_key(&target) {
            return Err(GraphError::UnknownElink(target));
        }
        let terminals = self.normalize_terminals(terminals)?;
        let key = (terminals, target);
        if let Some(&id) = self.ilink_index.get(&key) {
            return Ok(id);
        }
        let id = IlinkId(self.next_ilink);
        self.next_ilink += 1;
        self.ilinks.insert(
            id,
            InhibitoryLink {
                id,
                terminals: key.0.clone(),
                target,
            },
        );
        self.ilink_index.insert(key, id);
        self.inhibitors.entry(target).or_default().insert(id);
        Ok(id)
    }

    /// Removes an excitatory link together with every inhibitory link that
    /// targets it, returning the ids of the removed inhibitory links.
    /// Neurons are left in place.
    pub fn remove_excitatory_link(&mut self, id: ElinkId) -> Result<Vec<IlinkId>> {
        let link = self.elinks.remove(&id).ok_or(GraphError::UnknownElink(id))?;
        self.elink_index.remove(&(link.terminals, link.head));
        let cascade: Vec<IlinkId> = self.inhibitors.remove(&id).into_iter().flatten().collect();
        for il in &cascade {
            let removed = self.ilinks.remove(il).expect("inhibitor index out of sync");
            self.ilink_index.remove(&(removed.terminals, removed.target));
        }
        Ok(cascade)
    }

    pub fn remove_inhibitory_link(&mut self, id: IlinkId) -> Result<()> {
        let link = self.ilinks.remove(&id).ok_or(GraphError::UnknownIlink(id))?;
        self.ilink_index.remove(&(link.terminals, link.target));
        if let Some(set) = self.inhibitors.get_mut(&link.target) {
            set.remove(&id);
            if set.is_empty() {
                self.inhibitors.remove(&link.target);
            }
        }
        Ok(())
    }

    /// Full referential-integrity audit, including the internal indices.
    pub fn audit(&self) -> Result<()> {
        if self.by_name.len() != self.names.len() {
            return Err(bad("neuron index", "name index out of sync"));
        }
        for (id, name) in self.neurons() {
            validate_thing(name)?;
            if self.by_name.get(name) != Some(&id) {
                return Err(bad(id, "name index out of sync"));
            }
        }
        for (id, link) in &self.elinks {
            if *id != link.id {
                return Err(bad(id, "stored under the wrong id"));
            }
            self.check_link_terminals(&link.terminals, id)?;
            self.check_neuron(link.head.neuron)?;
            if link.terminals.iter().any(|t| t.neuron == link.head.neuron) {
                return Err(GraphError::SelfLoop(link.head.neuron));
            }
            if self.elink_index.get(&(link.terminals.clone(), link.head)) != Some(id) {
                return Err(bad(id, "dedup index out of sync"));
            }
        }
        for (id, link) in &self.ilinks {
            if *id != link.id {
                return Err(bad(id, "stored under the wrong id"));
            }
            self.check_link_terminals(&link.terminals, id)?;
            if !self.elinks.contains_key(&link.target) {
                return Err(bad(id, format!("dangling target {}", link.target)));
            }
            if !self.inhibitors.get(&link.target).is_some_and(|s| s.contains(id)) {
                return Err(bad(id, "target index out of sync"));
            }
            if self.ilink_index.get(&(link.terminals.clone(), link.target)) != Some(id) {
                return Err(bad(id, "dedup index out of sync"));
            }
        }
        if self.elink_index.len() != self.elinks.len() || self.ilink_index.len() != self.ilinks.len() {
            return Err(bad("link index", "stale dedup entries"));
        }
        let indexed: usize = self.inhibitors.values().map(BTreeSet::len).sum();
        if indexed != self.ilinks.len() || self.inhibitors.values().any(BTreeSet::is_empty) {
            return Err(bad("inhibitor index", "stale entries"));
        }
        Ok(())
    }

    fn check_link_terminals(&self, terminals: &[Terminal], id: impl fmt::Display) -> Result<()> {
        if terminals.is_empty() {
            return Err(bad(id, "no terminals"));
        }
        for t in terminals {
            self.check_neuron(t.neuron)?;
        }
        if terminals.windows(2).any(|w| w[0].neuron >= w[1].neuron) {
            return Err(bad(id, "terminals not sorted by neuron or repeated"));
        }
        Ok(())
    }
}

fn bad(item: impl fmt::Display, reason: impl Into<String>) -> GraphError {
    GraphError::BadDocument {
        item: item.to_string(),
        reason: reason.into(),
    }
}

// ---------------------------------------------------------------------------
// JSON document

const DOC_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkDoc {
    version: u32,
    neurons: Vec<NeuronDoc>,
    elinks: Vec<ElinkDoc>,
    ilinks: Vec<IlinkDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NeuronDoc {
    id: NeuronId,
    thing: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElinkDoc {
    id: ElinkId,
    terminals: Vec<Terminal>,
    head: Terminal,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IlinkDoc {
    id: IlinkId,
    terminals: Vec<Terminal>,
    target: ElinkId,
}

impl Network {
    /// Serializes to the versioned JSON document. Output is deterministic:
    /// every array is in ascending id order.
    pub fn to_json(&self) -> String {
        let doc = NetworkDoc {
            version: DOC_VERSION,
            neurons: self
                .neurons()
                .map(|(id, thing)| NeuronDoc {
                    id,
                    thing: thing.to_string(),
                })
                .collect(),
            elinks: self
                .elinks()
                .map(|l| ElinkDoc {
                    id: l.id,
                    terminals: l.terminals.clone(),
                    head: l.head,
                })
                .collect(),
            ilinks: self
                .ilinks()
                .map(|l| IlinkDoc {
                    id: l.id,
                    terminals: l.terminals.clone(),
                    target: l.target,
                })
                .collect(),
        };
        let mut out = serde_json::to_string_pretty(&doc).expect("network document always serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Network> {
        let doc: NetworkDoc = serde_json::from_str(text).map_err(|e| GraphError::Malformed(e.to_string()))?;
        if doc.version != DOC_VERSION {
            return Err(GraphError::UnsupportedVersion(doc.version));
        }
        let mut net = Network::new();
        for (i, n) in doc.neurons.iter().enumerate() {
            if n.id.index() != i {
                return Err(bad(
                    n.id,
                    format!("neuron ids must be 0..{} in order", doc.neurons.len()),
                ));
            }
            validate_thing(&n.thing).map_err(|_| bad(n.id, format!("invalid thing name {:?}", n.thing)))?;
            if net.by_name.contains_key(&n.thing) {
                return Err(bad(n.id, format!("duplicate thing {:?}", n.thing)));
            }
            net.add_neuron(&n.thing)?;
        }

        let mut prev: Option<ElinkId> = None;
        for l in &doc.elinks {
            if prev.is_some_and(|p| p >= l.id) {
                return Err(bad(l.id, "elinks not in ascending id order"));
            }
            prev = Some(l.id);
            let terminals = doc_terminals(&net, &l.terminals, l.id)?;
            if !net.check_neuron(l.head.neuron).is_ok() {
                return Err(bad(l.id, format!("dangling head neuron {}", l.head.neuron)));
            }
            if terminals.iter().any(|t| t.neuron == l.head.neuron) {
                return Err(bad(l.id, "head neuron is also a terminal"));
            }
            let key = (terminals, l.head);
            if net.elink_index.contains_key(&key) {
                return Err(bad(l.id, "duplicate excitatory link"));
            }
            net.elinks.insert(
                l.id,
                ExcitatoryLink {
                    id: l.id,
                    terminals: key.0.clone(),
                    head: l.head,
                },
            );
            net.elink_index.insert(key, l.id);
        }
        net.next_elink = prev.map_or(0, |p| p.0 + 1);

        let mut prev: Option<IlinkId> = None;
        for l in &doc.ilinks {
            if prev.is_some_and(|p| p >= l.id) {
                return Err(bad(l.id, "ilinks not in ascending id order"));
            }
            prev = Some(l.id);
            if !net.elinks.contains_key(&l.target) {
                return Err(bad(l.id, format!("dangling target {}", l.target)));
            }
            let terminals = doc_terminals(&net, &l.terminals, l.id)?;
            let key = (terminals, l.target);
            if net.ilink_index.contains_key(&key) {
                return Err(bad(l.id, "duplicate inhibitory link"));
            }
            net.ilinks.insert(
                l.id,
                InhibitoryLink {
                    id: l.id,
                    terminals: key.0.clone(),
                    target: l.target,
                },
            );
            net.ilink_index.insert(key, l.id);
            net.inhibitors.entry(l.target).or_default().insert(l.id);
        }
        net.next_ilink = prev.map_or(0, |p| p.0 + 1);
        Ok(net)
    }
}

fn doc_terminals(net: &Network, terminals: &[Terminal], id: impl fmt::Display) -> Result<Vec<Terminal>> {
    if terminals.is_empty() {
        return Err(bad(&id, "empty terminal list"));
    }
    for t in terminals {
        if net.check_neuron(t.neuron).is_err() {
            return Err(bad(&id, format!("dangling terminal neuron {}", t.neuron)));
        }
    }
    if terminals.windows(2).any(|w| w[0].neuron >= w[1].neuron) {
        return Err(bad(&id, "terminals must be sorted by neuron id without repeats"));
    }
    Ok(terminals.to_vec())
}

// ---------------------------------------------------------------------------
// DOT export

impl Network {
    /// Renders the network as a Graphviz digraph. Every link becomes a small
    /// junction node: terminals fan into it, an excitatory junction points at
    /// its head neuron, and an inhibitory link ends on the junction of the
    /// link it blocks with a dashed, tee-headed edge.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph lnn {\n  rankdir=LR;\n  node [shape=ellipse];\n");
        for (id, name) in self.neurons() {
            out.push_str(&format!("  {id} [label=\"{}\"];\n", escape_dot(name)));
        }
        for l in self.elinks() {
            out.push_str(&format!("  {} [shape=point, width=0.08];\n", l.id));
            for t in &l.terminals {
                out.push_str(&format!(
                    "  {} -> {} [arrowhead=none{}];\n",
                    t.neuron,
                    l.id,
                    neg_label(t.polarity)
                ));
            }
            out.push_str(&format!(
                "  {} -> {}{};\n",
                l.id,
                l.head.neuron,
                edge_attrs(neg_label(l.head.polarity))
            ));
        }
        for l in self.ilinks() {
            if let [t] = l.terminals.as_slice() {
                out.push_str(&format!(
                    "  {} -> {} [style=dashed, color=red, arrowhead=tee{}];\n",
                    t.neuron,
                    l.target,
                    neg_label(t.polarity)
                ));
            } else {
                out.push_str(&format!("  {} [shape=point, width=0.08, color=red];\n", l.id));
                for t in &l.terminals {
                    out.push_str(&format!(
                        "  {} -> {} [style=dashed, color=red, arrowhead=none{}];\n",
                        t.neuron,
                        l.id,
                        neg_label(t.polarity)
                    ));
                }
                out.push_str(&format!(
                    "  {} -> {} [style=dashed, color=red, arrowhead=tee];\n",
                    l.id, l.target
                ));
            }
        }
        out.push_str("}\n");
        out
    }
}

fn neg_label(p: Polarity) -> &'static str {
    match p {
        Polarity::Positive => "",
        Polarity::Negative => ", label=\"not\"",
    }
}

fn edge_attrs(extra: &str) -> String {
    if extra.is_empty() {
        String::new()
    } else {
        format!(" [{}]", extra.trim_start_matches(", "))
    }
}

fn escape_dot(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> (Network, NeuronId, NeuronId, NeuronId) {
        let mut net = Network::new();
        let a = net.add_neuron("A").unwrap();
        let b = net.add_neuron("B").unwrap();
        let c = net.add_neuron("C").unwrap();
        (net, a, b, c)
    }

    #[test]
    fn add_neuron_is_idempotent() {
        let mut net = Network::new();
        assert_eq!(net.add_neuron("mammal").unwrap(), NeuronId(0));
        assert_eq!(net.add_neuron("mammal").unwrap(), NeuronId(0));
        assert_eq!(net.stats().neuron_count, 1);
    }

    #[test]
    fn rejects_bad_names() {
        let mut net = Network::new();
        for name in ["", "two words", "tab\there", "a,b", "not", "unless", "x(y)"] {
            assert_eq!(net.add_neuron(name), Err(GraphError::InvalidName(name.into())));
        }
        assert!(net.add_neuron("gender=woman").is_ok());
        assert!(net.add_neuron("patient-21_35").is_ok());
    }

    #[test]
    fn composite_link_dedup() {
        let (mut net, a, b, c) = abc();
        let id = net
            .add_excitatory_link([Terminal::pos(a), Terminal::pos(b)], Terminal::pos(c))
            .unwrap();
        // Terminal order does not matter for identity.
        let again = net
            .add_excitatory_link([Terminal::pos(b), Terminal::pos(a)], Terminal::pos(c))
            .unwrap();
        assert_eq!(id, again);
        assert_eq!(net.stats().elink_count, 1);
    }

    #[test]
    fn excitatory_link_errors() {
        let (mut net, a, _, c) = abc();
        assert_eq!(
            net.add_excitatory_link([Terminal::pos(a)], Terminal::pos(a)),
            Err(GraphError::SelfLoop(a))
        );
        assert_eq!(
            net.add_excitatory_link([], Terminal::pos(c)),
            Err(GraphError::EmptyTerminals)
        );
        assert_eq!(
            net.add_excitatory_link([Terminal::pos(NeuronId(9))], Terminal::pos(c)),
            Err(GraphError::UnknownNeuron(NeuronId(9)))
        );
        assert_eq!(
            net.add_excitatory_link([Terminal::pos(a), Terminal::neg(a)], Terminal::pos(c)),
            Err(GraphError::DuplicateTerminal(a))
        );
        assert_eq!(
            net.stats(),
            Stats {
                neuron_count: 3,
                ..Stats::default()
            }
        );
    }

    #[test]
    fn inhibitory_link_dedup_and_dangling_target() {
        let (mut net, a, b, c) = abc();
        let e = net
            .add_excitatory_link([Terminal::pos(a)], Terminal::pos(c))
            .unwrap();
        let i = net.add_inhibitory_link([Terminal::pos(b)], e).unwrap();
        assert_eq!(net.add_inhibitory_link([Terminal::pos(b)], e).unwrap(), i);
        assert_eq!(
            net.add_inhibitory_link([Terminal::pos(b)], ElinkId(7)),
            Err(GraphError::UnknownElink(ElinkId(7)))
        );
        assert_eq!(net.stats().ilink_count, 1);
    }

    #[test]
    fn removal_cascades_to_inhibitors() {
        let (mut net, a, b, c) = abc();
        let e = net
            .add_excitatory_link([Terminal::pos(a)], Terminal::pos(c))
            .unwrap();
        let i0 = net.add_inhibitory_link([Terminal::pos(b)], e).unwrap();
        let i1 = net.add_inhibitory_link([Terminal::neg(b)], e).unwrap();
        assert_eq!(
            net.stats(),
            Stats {
                neuron_count: 3,
                elink_count: 1,
                ilink_count: 2
            }
        );
        assert_eq!(net.remove_excitatory_link(e).unwrap(), vec![i0, i1]);
        assert_eq!(
            net.stats(),
            Stats {
                neuron_count: 3,
                elink_count: 0,
                ilink_count: 0
            }
        );
        net.audit().unwrap();
        assert_eq!(net.remove_excitatory_link(e), Err(GraphError::UnknownElink(e)));

        let e2 = net
            .add_excitatory_link([Terminal::pos(b)], Terminal::pos(c))
            .unwrap();
        assert_ne!(e2, e, "ids are not reused");
        assert!(net.remove_excitatory_link(e2).unwrap().is_empty());
    }

    #[test]
    fn empty_document_round_trip() {
        let net = Network::new();
        let doc = net.to_json();
        let v: serde_json::Value = serde_json::from_str(&doc).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"version": 1, "neurons": [], "elinks": [], "ilinks": []})
        );
        assert_eq!(Network::from_json(&doc).unwrap(), net);
    }

    #[test]
    fn document_layout() {
        let (mut net, a, b, c) = abc();
        let e = net
            .add_excitatory_link([Terminal::pos(a)], Terminal::pos(c))
            .unwrap();
        net.add_inhibitory_link([Terminal::pos(b)], e).unwrap();
        let v: serde_json::Value = serde_json::from_str(&net.to_json()).unwrap();
        assert_eq!(
            v["elinks"][0],
            serde_json::json!({"id": 0, "terminals": [{"neuron": 0, "polarity": "pos"}], "head": {"neuron": 2, "polarity": "pos"}})
        );
        assert_eq!(
            v["ilinks"][0],
            serde_json::json!({"id": 0, "terminals": [{"neuron": 1, "polarity": "pos"}], "target": 0})
        );
    }

    #[test]
    fn document_errors_name_the_offender() {
        let doc = r#"{"version":1,"neurons":[{"id":0,"thing":"a"},{"id":1,"thing":"c"}],
            "elinks":[{"id":0,"terminals":[{"neuron":0,"polarity":"pos"}],"head":{"neuron":1,"polarity":"pos"}}],
            "ilinks":[{"id":4,"terminals":[{"neuron":0,"polarity":"pos"}],"target":3}]}"#;
        match Network::from_json(doc) {
            Err(GraphError::BadDocument { item, reason }) => {
                assert_eq!(item, "i4");
                assert!(reason.contains("e3"), "{reason}");
            }
            other => panic!("expected a document error, got {other:?}"),
        }
        assert!(matches!(Network::from_json("{"), Err(GraphError::Malformed(_))));
        assert_eq!(
            Network::from_json(r#"{"version":2,"neurons":[],"elinks":[],"ilinks":[]}"#),
            Err(GraphError::UnsupportedVersion(2))
        );
        assert!(matches!(
            Network::from_json(r#"{"version":1,"neurons":[],"elinks":[],"ilinks":[],"extra":0}"#),
            Err(GraphError::Malformed(_))
        ));
    }

    #[test]
    fn id_counters_survive_round_trip() {
        let (mut net, a, b, c) = abc();
        let e0 = net
            .add_excitatory_link([Terminal::pos(a)], Terminal::pos(c))
            .unwrap();
        net.add_excitatory_link([Terminal::pos(b)], Terminal::pos(c))
            .unwrap();
        net.remove_excitatory_link(e0).unwrap();
        let mut back = Network::from_json(&net.to_json()).unwrap();
        assert_eq!(back, net);
        let e = back
            .add_excitatory_link([Terminal::pos(a), Terminal::pos(b)], Terminal::pos(c))
            .unwrap();
        assert_eq!(e, ElinkId(2));
    }

    #[test]
    fn dot_shapes() {
        let empty = Network::new().to_dot();
        assert!(empty.starts_with("digraph lnn {"));
        assert!(!empty.contains("->"));

        let mut net = Network::new();
        let a = net.add_neuron("A").unwrap();
        let b = net.add_neuron("B").unwrap();
        net.add_excitatory_link([Terminal::pos(a)], Terminal::pos(b))
            .unwrap();
        let dot = net.to_dot();
        assert_eq!(dot.matches("shape=point").count(), 1);
        assert_eq!(dot.matches("->").count(), 2);
        assert_eq!(dot, net.to_dot());
    }

    #[test]
    fn dot_marks_negation_and_inhibition() {
        let (mut net, a, b, c) = abc();
        let e = net
            .add_excitatory_link([Terminal::neg(a)], Terminal::pos(c))
            .unwrap();
        net.add_inhibitory_link([Terminal::pos(b)], e).unwrap();
        net.add_inhibitory_link([Terminal::pos(a), Terminal::pos(b)], e)
            .unwrap();
        let dot = net.to_dot();
        assert!(dot.contains("n0 -> e0 [arrowhead=none, label=\"not\"];"), "{dot}");
        assert!(
            dot.contains("n1 -> e0 [style=dashed, color=red, arrowhead=tee];"),
            "{dot}"
        );
        assert!(
            dot.contains("i1 -> e0 [style=dashed, color=red, arrowhead=tee];"),
            "{dot}"
        );
    }
}
