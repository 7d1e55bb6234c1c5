//! The six two-input gates, each built from three neurons (inputs `A`, `B`,
//! output `C`) and links only. A gate signals true by activating `C` and
//! signals false by leaving it unknown.

use std::fmt;
use std::str::FromStr;

use crate::graph::{Network, Terminal, TruthValue};
use crate::infer::{infer, FactSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    And,
    Or,
    Xor,
    Nand,
    Nor,
    Xnor,
}

impl GateKind {
    pub const ALL: [GateKind; 6] = [
        GateKind::And,
        GateKind::Or,
        GateKind::Xor,
        GateKind::Nand,
        GateKind::Nor,
        GateKind::Xnor,
    ];

    pub fn eval(self, a: bool, b: bool) -> bool {
        match self {
            GateKind::And => a && b,
            GateKind::Or => a || b,
            GateKind::Xor => a != b,
            GateKind::Nand => !(a && b),
            GateKind::Nor => !(a || b),
            GateKind::Xnor => a == b,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Or => "OR",
            GateKind::Xor => "XOR",
            GateKind::Nand => "NAND",
            GateKind::Nor => "NOR",
            GateKind::Xnor => "XNOR",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        GateKind::ALL
            .into_iter()
            .find(|g| g.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown gate {s:?}"))
    }
}

/// Builds the gate's network over neurons `A`, `B` and `C`.
pub fn gate_network(kind: GateKind) -> Network {
    let mut net = Network::new();
    let a = net.add_neuron("A").expect("valid name");
    let b = net.add_neuron("B").expect("valid name");
    let c = Terminal::pos(net.add_neuron("C").expect("valid name"));
    let (pa, pb, na, nb) = (
        Terminal::pos(a),
        Terminal::pos(b),
        Terminal::neg(a),
        Terminal::neg(b),
    );
    let mut el = |ts: &[Terminal]| {
        net.add_excitatory_link(ts.iter().copied(), c)
            .expect("valid link")
    };
    match kind {
        GateKind::And => {
            el(&[pa, pb]);
        }
        GateKind::Or => {
            el(&[pa]);
            el(&[pb]);
        }
        GateKind::Xor => {
            let from_a = el(&[pa]);
            let from_b = el(&[pb]);
            net.add_inhibitory_link([pb], from_a).expect("valid link");
            net.add_inhibitory_link([pa], from_b).expect("valid link");
        }
        GateKind::Nand => {
            el(&[na]);
            el(&[nb]);
        }
        GateKind::Nor => {
            el(&[na, nb]);
        }
        GateKind::Xnor => {
            el(&[pa, pb]);
            el(&[na, nb]);
        }
    }
    net
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TruthRow {
    pub a: bool,
    pub b: bool,
    pub expected: TruthValue,
    pub actual: TruthValue,
}

impl TruthRow {
    pub fn ok(&self) -> bool {
        self.expected == self.actual
    }
}

/// Output of `C` for a given pair of input facts (`None` leaves the input
/// unknown).
pub fn gate_output(net: &Network, a: Option<bool>, b: Option<bool>) -> TruthValue {
    let mut facts = FactSet::new();
    if let Some(a) = a {
        facts.insert("A", a).expect("fresh");
    }
    if let Some(b) = b {
        facts.insert("B", b).expect("fresh");
    }
    infer(net, &facts).expect("gate inputs exist").value("C")
}

/// All four fully-known rows of `net` checked against the Boolean gate:
/// `C` must be true where the gate is true and unknown elsewhere.
pub fn truth_table(kind: GateKind, net: &Network) -> Vec<TruthRow> {
    let mut rows = Vec::with_capacity(4);
    for a in [true, false] {
        for b in [true, false] {
            let expected = if kind.eval(a, b) {
                TruthValue::True
            } else {
                TruthValue::Unknown
            };
            rows.push(TruthRow {
                a,
                b,
                expected,
                actual: gate_output(net, Some(a), Some(b)),
            });
        }
    }
    rows
}

/// `Ok` when every row matches, otherwise the first failing row.
pub fn truth_table_check(kind: GateKind) -> Result<(), TruthRow> {
    check_network(kind, &gate_network(kind))
}

pub fn check_network(kind: GateKind, net: &Network) -> Result<(), TruthRow> {
    match truth_table(kind, net).into_iter().find(|r| !r.ok()) {
        Some(row) => Err(row),
        None => Ok(()),
    }
}

pub fn render_table(kind: GateKind, net: &Network) -> String {
    let tf = |b: bool| if b { "T" } else { "F" };
    let mut out = format!(
        "{kind}  (neurons={})\n  A B | C        expected\n",
        net.stats().neuron_count
    );
    for r in truth_table(kind, net) {
        out.push_str(&format!(
            "  {} {} | {:<8} {}{}\n",
            tf(r.a),
            tf(r.b),
            r.actual.as_str(),
            r.expected.as_str(),
            if r.ok() { "" } else { "  MISMATCH" }
        ));
    }
    out
}
