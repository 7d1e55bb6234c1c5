//! Logical neural networks: proposition neurons wired by excitatory and
//! inhibitory links, compiled from a small rule language and evaluated by
//! synchronous propagation.

pub mod dataset;
pub mod exec;
pub mod fixtures;
pub mod gates;
pub mod graph;
pub mod infer;
pub mod memorize;
pub mod neurule;
pub mod readout;
pub mod rules;

pub use graph::{Network, NeuronId, NeuronState, Polarity, Terminal, TruthValue};
pub use infer::{infer, FactSet, InferenceResult};
pub use rules::{build, parse_rule, parse_rule_file, EncodingPolicy, Rule, RuleBase};
