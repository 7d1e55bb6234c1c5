//! The rule language and its compilation into a [`Network`].
//!
//! ```text
//! rule := "if" lit ("," lit | "and" lit)* ("unless" "(" plit ("and" plit)* ")")* "then" lit
//! lit  := ["not"] TOKEN
//! plit := ["not"] TOKEN
//! ```
//!
//! Every rule compiles to exactly one excitatory link. Negated body literals
//! either become negative terminals or simple inhibitory links, depending on
//! the [`EncodingPolicy`]; each `unless (...)` clause becomes one composite
//! inhibitory link aimed at the rule's excitatory link.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{validate_thing, ElinkId, GraphError, Network, Polarity, Terminal, KEYWORDS};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RuleError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: {error}")]
    AtLine { line: usize, error: Box<RuleError> },
    #[error("invalid thing name {0:?}")]
    InvalidThing(String),
    #[error("rule body is empty")]
    EmptyBody,
    #[error("thing {0:?} appears twice in the rule body")]
    DuplicateBodyThing(String),
    #[error("head thing {0:?} also appears in the rule body")]
    HeadInBody(String),
    #[error("unless clause is empty")]
    EmptyException,
    #[error("unless clause mentions body thing {0:?}")]
    ExceptionOverlapsBody(String),
    #[error("unless clause asks for {0:?} to be both true and false")]
    ConflictingException(String),
    #[error("rule not present in the network: {0}")]
    NotFound(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub type Result<T, E = RuleError> = std::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub thing: String,
    pub negated: bool,
}

impl Literal {
    pub fn pos(thing: impl Into<String>) -> Self {
        Literal {
            thing: thing.into(),
            negated: false,
        }
    }

    pub fn neg(thing: impl Into<String>) -> Self {
        Literal {
            thing: thing.into(),
            negated: true,
        }
    }

    pub fn polarity(&self) -> Polarity {
        if self.negated {
            Polarity::Negative
        } else {
            Polarity::Positive
        }
    }

    fn from_parts(thing: &str, polarity: Polarity) -> Self {
        Literal {
            thing: thing.to_string(),
            negated: polarity == Polarity::Negative,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "not {}", self.thing)
        } else {
            f.write_str(&self.thing)
        }
    }
}

/// One if-then rule: a conjunctive body, optional exception clauses, and a
/// head literal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub body: Vec<Literal>,
    pub unless: Vec<Vec<Literal>>,
    pub head: Literal,
}

impl Rule {
    pub fn new(body: Vec<Literal>, unless: Vec<Vec<Literal>>, head: Literal) -> Result<Rule> {
        let rule = Rule { body, unless, head };
        rule.validate()?;
        Ok(rule)
    }

    pub fn validate(&self) -> Result<()> {
        if self.body.is_empty() {
            return Err(RuleError::EmptyBody);
        }
        let mut seen = BTreeSet::new();
        for lit in &self.body {
            validate_thing(&lit.thing).map_err(|_| RuleError::InvalidThing(lit.thing.clone()))?;
            if !seen.insert(lit.thing.as_str()) {
                return Err(RuleError::DuplicateBodyThing(lit.thing.clone()));
            }
        }
        validate_thing(&self.head.thing).map_err(|_| RuleError::InvalidThing(self.head.thing.clone()))?;
        if seen.contains(self.head.thing.as_str()) {
            return Err(RuleError::HeadInBody(self.head.thing.clone()));
        }
        for clause in &self.unless {
            if clause.is_empty() {
                return Err(RuleError::EmptyException);
            }
            let mut polarity: BTreeMap<&str, bool> = BTreeMap::new();
            for lit in clause {
                validate_thing(&lit.thing).map_err(|_| RuleError::InvalidThing(lit.thing.clone()))?;
                if seen.contains(lit.thing.as_str()) {
                    return Err(RuleError::ExceptionOverlapsBody(lit.thing.clone()));
                }
                if *polarity.entry(&lit.thing).or_insert(lit.negated) != lit.negated {
                    return Err(RuleError::ConflictingException(lit.thing.clone()));
                }
            }
        }
        Ok(())
    }

    /// Every thing the rule mentions, in written order, without repeats.
    pub fn things(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        let all = self
            .body
            .iter()
            .chain(self.unless.iter().flatten())
            .chain(std::iter::once(&self.head));
        for lit in all {
            if !out.contains(&lit.thing.as_str()) {
                out.push(&lit.thing);
            }
        }
        out
    }

    /// Sorts body literals and exception clauses; policy-independent.
    fn normalized(&self) -> Rule {
        let mut body = self.body.clone();
        body.sort();
        let mut unless: Vec<Vec<Literal>> = self
            .unless
            .iter()
            .map(|c| {
                let mut c = c.clone();
                c.sort();
                c.dedup();
                c
            })
            .collect();
        unless.sort();
        unless.dedup();
        Rule {
            body,
            unless,
            head: self.head.clone(),
        }
    }

    fn sort_key(&self) -> (&str, bool, &[Literal], &[Vec<Literal>]) {
        (&self.head.thing, self.head.negated, &self.body, &self.unless)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("if ")?;
        for (i, lit) in self.body.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{lit}")?;
        }
        for clause in &self.unless {
            f.write_str(" unless (")?;
            for (i, lit) in clause.iter().enumerate() {
                if i > 0 {
                    f.write_str(" and ")?;
                }
                write!(f, "{lit}")?;
            }
            f.write_str(")")?;
        }
        write!(f, " then {}", self.head)
    }
}

impl FromStr for Rule {
    type Err = RuleError;

    fn from_str(s: &str) -> Result<Rule> {
        parse_rule(s)
    }
}

/// An ordered rule collection with no repeated rules.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RuleBase {
    rules: Vec<Rule>,
}

impl RuleBase {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends `rule` unless an equal rule (ignoring literal order) is already
    /// present. Returns whether the rule was added.
    pub fn push(&mut self, rule: Rule) -> bool {
        let norm = rule.normalized();
        if self.rules.iter().any(|r| r.normalized() == norm) {
            return false;
        }
        self.rules.push(rule);
        true
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn parse(text: &str) -> Result<RuleBase> {
        parse_rule_file(text)
    }
}

impl Deref for RuleBase {
    type Target = [Rule];

    fn deref(&self) -> &[Rule] {
        &self.rules
    }
}

impl FromIterator<Rule> for RuleBase {
    fn from_iter<I: IntoIterator<Item = Rule>>(iter: I) -> Self {
        let mut rb = RuleBase::new();
        for r in iter {
            rb.push(r);
        }
        rb
    }
}

impl fmt::Display for RuleBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// How a negated body literal (`not b`) is wired.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum EncodingPolicy {
    /// `not b` becomes a simple inhibitory link from `b`: the rule is blocked
    /// once `b` is known true, and may fire while `b` is unknown. A rule with
    /// no positive body literal has nothing left to excite, so its negations
    /// fall back to negative terminals.
    #[default]
    AsInhibitor,
    /// `not b` becomes a negative terminal: the rule needs `b` known false.
    AsTerminal,
}

impl FromStr for EncodingPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "inhibitor" => Ok(EncodingPolicy::AsInhibitor),
            "terminal" => Ok(EncodingPolicy::AsTerminal),
            other => Err(format!(
                "unknown encoding policy {other:?} (expected inhibitor or terminal)"
            )),
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Word(String),
    Comma,
    Open,
    Close,
}

fn lex(text: &str, line: usize) -> Result<Vec<(Tok, usize)>> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    let col = |byte: usize| text[..byte].chars().count() + 1;
    while let Some(&(i, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            ',' => {
                out.push((Tok::Comma, col(i)));
                chars.next();
            }
            '(' => {
                out.push((Tok::Open, col(i)));
                chars.next();
            }
            ')' => {
                out.push((Tok::Close, col(i)));
                chars.next();
            }
            c if is_token_char(c) => {
                let mut word = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if !is_token_char(c) {
                        break;
                    }
                    word.push(c);
                    chars.next();
                }
                out.push((Tok::Word(word), col(i)));
            }
            other => {
                return Err(RuleError::Syntax {
                    line,
                    column: col(i),
                    message: format!("unexpected character {other:?}"),
                })
            }
        }
    }
    Ok(out)
}

fn is_token_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '=')
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
    end_col: usize,
}

impl Parser {
    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        let column = self.toks.get(self.pos).map_or(self.end_col, |t| t.1);
        Err(RuleError::Syntax {
            line: self.line,
            column,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Word(w)) if w == kw)
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        if self.at_keyword(kw) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected `{kw}`"))
        }
    }

    fn punct(&mut self, tok: Tok, shown: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected `{shown}`"))
        }
    }

    fn thing(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Word(w)) if !KEYWORDS.contains(&w.as_str()) => {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            Some(Tok::Word(w)) => self.error(format!("keyword `{w}` cannot name a thing")),
            _ => self.error("expected a thing name"),
        }
    }

    fn literal(&mut self) -> Result<Literal> {
        let negated = self.at_keyword("not");
        if negated {
            self.pos += 1;
        }
        Ok(Literal {
            thing: self.thing()?,
            negated,
        })
    }

    fn rule(&mut self) -> Result<Rule> {
        self.keyword("if")?;
        let mut body = vec![self.literal()?];
        loop {
            if self.peek() == Some(&Tok::Comma) || self.at_keyword("and") {
                self.pos += 1;
                body.push(self.literal()?);
            } else {
                break;
            }
        }
        let mut unless = Vec::new();
        while self.at_keyword("unless") {
            self.pos += 1;
            self.punct(Tok::Open, "(")?;
            let mut clause = vec![self.literal()?];
            while self.at_keyword("and") {
                self.pos += 1;
                clause.push(self.literal()?);
            }
            self.punct(Tok::Close, ")")?;
            unless.push(clause);
        }
        self.keyword("then")?;
        let head = self.literal()?;
        if self.pos != self.toks.len() {
            return self.error("unexpected input after the rule head");
        }
        Ok(Rule { body, unless, head })
    }
}

fn parse_line(text: &str, line: usize) -> Result<Rule> {
    let toks = lex(text, line)?;
    let mut p = Parser {
        toks,
        pos: 0,
        line,
        end_col: text.chars().count() + 1,
    };
    let rule = p.rule()?;
    rule.validate()?;
    Ok(rule)
}

/// Parses a single rule. Literal order is kept as written.
pub fn parse_rule(text: &str) -> Result<Rule> {
    parse_line(text, 1)
}

/// Parses a rule file: one rule per line, `#` starts a comment.
pub fn parse_rule_file(text: &str) -> Result<RuleBase> {
    let mut rb = RuleBase::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let rule = parse_line(content, line).map_err(|e| match e {
            e @ RuleError::Syntax { .. } => e,
            other => RuleError::AtLine {
                line,
                error: Box::new(other),
            },
        })?;
        rb.push(rule);
    }
    Ok(rb)
}

// ---------------------------------------------------------------------------
// Normal form

pub(crate) type Clause = BTreeSet<(String, Polarity)>;

/// The structure a rule compiles to, keyed by thing names: the terminal set
/// and head of its excitatory link plus the terminal sets of the inhibitory
/// links aimed at it. Canonicalization, building and readout all go through
/// this form, which is what makes readout an exact inverse of build.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct RuleShape {
    pub terminals: BTreeMap<String, Polarity>,
    pub exceptions: BTreeSet<Clause>,
    pub head: (String, Polarity),
}

impl RuleShape {
    pub fn of_rule(rule: &Rule, policy: EncodingPolicy) -> RuleShape {
        let mut terminals = BTreeMap::new();
        let mut exceptions: BTreeSet<Clause> = rule
            .unless
            .iter()
            .map(|c| c.iter().map(|l| (l.thing.clone(), l.polarity())).collect())
            .collect();
        let has_positive = rule.body.iter().any(|l| !l.negated);
        for lit in &rule.body {
            if lit.negated && policy == EncodingPolicy::AsInhibitor && has_positive {
                exceptions.insert(Clause::from([(lit.thing.clone(), Polarity::Positive)]));
            } else {
                terminals.insert(lit.thing.clone(), lit.polarity());
            }
        }
        RuleShape {
            terminals,
            exceptions: absorb(exceptions),
            head: (rule.head.thing.clone(), rule.head.polarity()),
        }
    }

    pub fn to_rule(&self, policy: EncodingPolicy) -> Rule {
        let mut body: Vec<Literal> = self
            .terminals
            .iter()
            .map(|(t, p)| Literal::from_parts(t, *p))
            .collect();
        let fold_singles = policy == EncodingPolicy::AsInhibitor
            && self.terminals.values().any(|p| *p == Polarity::Positive);
        let mut unless = Vec::new();
        for clause in &self.exceptions {
            match clause.iter().next() {
                Some((thing, Polarity::Positive)) if fold_singles && clause.len() == 1 => {
                    body.push(Literal::neg(thing.clone()))
                }
                _ => unless.push(clause.iter().map(|(t, p)| Literal::from_parts(t, *p)).collect()),
            }
        }
        body.sort();
        Rule {
            body,
            unless,
            head: Literal::from_parts(&self.head.0, self.head.1),
        }
    }

    fn key(&self) -> (BTreeMap<String, Polarity>, (String, Polarity)) {
        (self.terminals.clone(), self.head.clone())
    }

    /// Reads the shape of one excitatory link back out of a network.
    pub fn of_elink(net: &Network, id: ElinkId) -> Option<RuleShape> {
        let link = net.elink(id)?;
        Some(RuleShape {
            terminals: link
                .terminals
                .iter()
                .map(|t| (net.thing(t.neuron).to_string(), t.polarity))
                .collect(),
            exceptions: elink_exceptions(net, id),
            head: (net.thing(link.head.neuron).to_string(), link.head.polarity),
        })
    }
}

fn elink_exceptions(net: &Network, id: ElinkId) -> BTreeSet<Clause> {
    net.inhibitors_of(id)
        .map(|il| {
            il.terminals
                .iter()
                .map(|t| (net.thing(t.neuron).to_string(), t.polarity))
                .collect()
        })
        .collect()
}

/// Drops every clause that strictly contains another one; a superset clause
/// can only trigger when the smaller one already does.
fn absorb(clauses: BTreeSet<Clause>) -> BTreeSet<Clause> {
    clauses
        .iter()
        .filter(|c| !clauses.iter().any(|d| d != *c && d.is_subset(c)))
        .cloned()
        .collect()
}

/// Exceptions of the disjunction of two rules that share terminals and head.
/// The merged rule is blocked only when both originals are, i.e. when some
/// clause of each holds, which is the pairwise union of their clauses.
fn merge_exceptions(a: &BTreeSet<Clause>, b: &BTreeSet<Clause>) -> BTreeSet<Clause> {
    let mut out = BTreeSet::new();
    for ca in a {
        for cb in b {
            let union: Clause = ca.union(cb).cloned().collect();
            let consistent = union.iter().zip(union.iter().skip(1)).all(|(x, y)| x.0 != y.0);
            if consistent {
                out.insert(union);
            }
        }
    }
    absorb(out)
}

/// Canonical form of a rule base under `policy`: body literals sorted by
/// thing name, exception clauses sorted, single positive exceptions written
/// as `not` literals where the policy wires `not` as an inhibitor, rules that
/// would share an excitatory link merged, and rules sorted by head then body.
pub fn canonicalize(rules: &[Rule], policy: EncodingPolicy) -> RuleBase {
    let mut merged: BTreeMap<_, RuleShape> = BTreeMap::new();
    for rule in rules {
        let shape = RuleShape::of_rule(rule, policy);
        match merged.entry(shape.key()) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(shape);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let ex = merge_exceptions(&o.get().exceptions, &shape.exceptions);
                o.get_mut().exceptions = ex;
            }
        }
    }
    sorted_base(merged.values().map(|s| s.to_rule(policy)))
}

pub(crate) fn sorted_base(rules: impl IntoIterator<Item = Rule>) -> RuleBase {
    let mut rules: Vec<Rule> = rules.into_iter().collect();
    rules.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    RuleBase { rules }
}

// ---------------------------------------------------------------------------
// Building

/// Identifies the excitatory link a rule compiled to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RuleHandle {
    pub elink: ElinkId,
}

/// Compiles a rule base into a fresh network.
pub fn build(rules: &[Rule], policy: EncodingPolicy) -> Result<Network> {
    let mut net = Network::new();
    for rule in rules {
        add_rule(&mut net, rule, policy)?;
    }
    Ok(net)
}

/// Adds one rule to `net`. If another rule already owns an excitatory link
/// with the same terminals and head, the two are merged into that link and
/// its inhibitory links are rewritten to block only when both rules would.
pub fn add_rule(net: &mut Network, rule: &Rule, policy: EncodingPolicy) -> Result<RuleHandle> {
    rule.validate()?;
    for thing in rule.things() {
        net.add_neuron(thing)?;
    }
    let shape = RuleShape::of_rule(rule, policy);
    let terminals = shape_terminals(net, &shape);
    let head = terminal(net, &shape.head.0, shape.head.1);

    let (elink, wanted) = match net.find_excitatory_link(&terminals, head) {
        Some(id) => {
            let existing = elink_exceptions(net, id);
            let merged = merge_exceptions(&existing, &shape.exceptions);
            if merged == existing {
                return Ok(RuleHandle { elink: id });
            }
            let stale: Vec<_> = net
                .inhibitors_of(id)
                .filter(|il| {
                    let clause: Clause = il
                        .terminals
                        .iter()
                        .map(|t| (net.thing(t.neuron).to_string(), t.polarity))
                        .collect();
                    !merged.contains(&clause)
                })
                .map(|il| il.id)
                .collect();
            for il in stale {
                net.remove_inhibitory_link(il)?;
            }
            (id, merged)
        }
        None => (net.add_excitatory_link(terminals, head)?, shape.exceptions),
    };
    for clause in &wanted {
        let ts: Vec<Terminal> = clause.iter().map(|(t, p)| terminal(net, t, *p)).collect();
        net.add_inhibitory_link(ts, elink)?;
    }
    Ok(RuleHandle { elink })
}

/// Removes the structure `rule` compiled to: its excitatory link and, by
/// cascade, the inhibitory links aimed at it. The link must carry exactly the
/// rule's exceptions, otherwise the rule is reported as not found.
pub fn remove_rule(net: &mut Network, rule: &Rule, policy: EncodingPolicy) -> Result<()> {
    let not_found = || RuleError::NotFound(rule.to_string());
    let shape = RuleShape::of_rule(rule, policy);
    let lookup = |name: &str, p: Polarity| {
        net.neuron_id(name).map(|n| Terminal {
            neuron: n,
            polarity: p,
        })
    };
    let terminals: Option<Vec<Terminal>> = shape.terminals.iter().map(|(t, p)| lookup(t, *p)).collect();
    let head = lookup(&shape.head.0, shape.head.1);
    let (Some(terminals), Some(head)) = (terminals, head) else {
        return Err(not_found());
    };
    let id = net.find_excitatory_link(&terminals, head).ok_or_else(not_found)?;
    if elink_exceptions(net, id) != shape.exceptions {
        return Err(not_found());
    }
    net.remove_excitatory_link(id)?;
    Ok(())
}

fn terminal(net: &Network, thing: &str, polarity: Polarity) -> Terminal {
    Terminal {
        neuron: net.neuron_id(thing).expect("neurons are created before links"),
        polarity,
    }
}

fn shape_terminals(net: &Network, shape: &RuleShape) -> Vec<Terminal> {
    shape
        .terminals
        .iter()
        .map(|(t, p)| terminal(net, t, *p))
        .collect()
}
