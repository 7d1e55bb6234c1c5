#![allow(dead_code)]

use std::collections::BTreeSet;

use lnn::rules::{EncodingPolicy, Literal, Rule};
use lnn::FactSet;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("t{i}")).collect()
}

fn lit(thing: &str, negated: bool) -> Literal {
    if negated {
        Literal::neg(thing)
    } else {
        Literal::pos(thing)
    }
}

/// Any valid rule over `things`: random head polarity, up to three body
/// literals of either polarity, sometimes one or two exception clauses.
pub fn random_rule<R: Rng>(rng: &mut R, things: &[String]) -> Rule {
    let mut pool: Vec<&String> = things.iter().collect();
    pool.shuffle(rng);
    let head = pool.pop().unwrap();
    let k = rng.gen_range(1..=pool.len().min(3));
    let body: Vec<Literal> = pool[..k].iter().map(|t| lit(t, rng.gen_bool(0.3))).collect();
    let mut rest: Vec<&String> = pool[k..].to_vec();
    rest.push(head);
    let mut unless = Vec::new();
    if rng.gen_bool(0.3) {
        for _ in 0..rng.gen_range(1..=2) {
            rest.shuffle(rng);
            let m = rng.gen_range(1..=rest.len().min(2));
            unless.push(rest[..m].iter().map(|t| lit(t, rng.gen_bool(0.3))).collect());
        }
    }
    Rule::new(body, unless, lit(head, rng.gen_bool(0.2))).unwrap()
}

pub fn random_base<R: Rng>(rng: &mut R, max_things: usize, max_rules: usize) -> Vec<Rule> {
    let things = names(rng.gen_range(2..=max_things));
    let n = rng.gen_range(1..=max_rules);
    (0..n).map(|_| random_rule(rng, &things)).collect()
}

/// A stratified base: things split into inputs (never concluded) and
/// derived things. Negated body literals and exception literals only mention
/// inputs, so no inhibitor can depend on a derived value.
pub struct Stratified {
    pub things: Vec<String>,
    pub inputs: Vec<String>,
    pub rules: Vec<Rule>,
}

pub fn stratified_base<R: Rng>(rng: &mut R, max_things: usize, max_rules: usize) -> Stratified {
    let things = names(rng.gen_range(2..=max_things));
    let n_inputs = rng.gen_range(1..things.len());
    let inputs = things[..n_inputs].to_vec();
    let derived = &things[n_inputs..];
    let mut rules = Vec::new();
    for _ in 0..rng.gen_range(1..=max_rules) {
        let head = derived.choose(rng).unwrap();
        let mut pool: Vec<&String> = things.iter().filter(|t| *t != head).collect();
        pool.shuffle(rng);
        let k = rng.gen_range(1..=pool.len().min(3));
        let body: Vec<Literal> = pool[..k]
            .iter()
            .map(|t| lit(t, inputs.contains(t) && rng.gen_bool(0.35)))
            .collect();
        let mut free: Vec<&String> = inputs.iter().filter(|t| !pool[..k].contains(t)).collect();
        let mut unless = Vec::new();
        if !free.is_empty() && rng.gen_bool(0.35) {
            free.shuffle(rng);
            let m = rng.gen_range(1..=free.len().min(2));
            unless.push(free[..m].iter().map(|t| lit(t, rng.gen_bool(0.3))).collect());
        }
        rules.push(Rule::new(body, unless, lit(head, rng.gen_bool(0.2))).unwrap());
    }
    Stratified {
        things,
        inputs,
        rules,
    }
}

/// Naive forward chaining over rule structs: repeatedly applies every rule
/// whose body holds and whose exceptions do not, collecting `(thing, value)`
/// assertions until nothing new appears. Assertions are never retracted, so
/// a thing can end up with both values; that is a conflict.
///
/// A `not x` body literal means "x is not known true" when the encoding
/// wires negations as inhibitors and the body has a positive literal, and
/// "x is known false" otherwise.
pub struct Oracle {
    pub known: BTreeSet<(String, bool)>,
}

impl Oracle {
    pub fn run(rules: &[Rule], facts: &FactSet, policy: EncodingPolicy) -> Oracle {
        let mut known: BTreeSet<(String, bool)> = facts.iter().map(|(t, v)| (t.to_string(), v)).collect();
        loop {
            let mut new = Vec::new();
            for rule in rules {
                let has = |t: &str, v: bool| known.contains(&(t.to_string(), v));
                let as_inhibitor =
                    policy == EncodingPolicy::AsInhibitor && rule.body.iter().any(|l| !l.negated);
                let body_holds = rule.body.iter().all(|l| match (l.negated, as_inhibitor) {
                    (false, _) => has(&l.thing, true),
                    (true, true) => !has(&l.thing, true),
                    (true, false) => has(&l.thing, false),
                });
                let blocked = rule
                    .unless
                    .iter()
                    .any(|c| c.iter().all(|l| has(&l.thing, !l.negated)));
                let head = (rule.head.thing.clone(), !rule.head.negated);
                if body_holds && !blocked && !known.contains(&head) {
                    new.push(head);
                }
            }
            if new.is_empty() {
                return Oracle { known };
            }
            known.extend(new);
        }
    }

    pub fn conflict(&self) -> bool {
        self.known
            .iter()
            .any(|(t, v)| *v && self.known.contains(&(t.clone(), false)))
    }

    pub fn value(&self, thing: &str) -> Option<bool> {
        if self.known.contains(&(thing.to_string(), true)) {
            Some(true)
        } else if self.known.contains(&(thing.to_string(), false)) {
            Some(false)
        } else {
            None
        }
    }
}

/// Every assignment of {absent, true, false} to `things`.
pub fn all_assignments(things: &[String]) -> Vec<FactSet> {
    let mut out = vec![FactSet::new()];
    for t in things {
        out = out
            .into_iter()
            .flat_map(|f| {
                [
                    f.clone(),
                    f.clone().with(t.clone(), true),
                    f.with(t.clone(), false),
                ]
            })
            .collect();
    }
    out
}
