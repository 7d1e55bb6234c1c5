//! Neurules: adaline units over tri-valued inputs, used as the comparison
//! model. A neurule adds a bias to the significance-weighted sum of its
//! condition inputs (true = 1, false = -1, unknown = 0) and concludes when
//! the sum is strictly positive.

use std::fmt;

use thiserror::Error;

use crate::graph::validate_thing;

#[derive(Debug, Error, PartialEq)]
pub enum NeuruleError {
    #[error("neurule has {expected} conditions but {got} inputs were given")]
    Arity { expected: usize, got: usize },
    #[error("condition {0:?} appears twice")]
    DuplicateCondition(String),
    #[error("unknown condition {0:?}")]
    UnknownCondition(String),
    #[error("neurule line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TriValue {
    True,
    False,
    Unknown,
}

impl TriValue {
    pub fn as_f64(self) -> f64 {
        match self {
            TriValue::True => 1.0,
            TriValue::False => -1.0,
            TriValue::Unknown => 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Neurule {
    pub label: String,
    pub bias: f64,
    pub conditions: Vec<(String, f64)>,
    pub conclusion: String,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NeuruleOutput {
    pub sum: f64,
    pub fires: bool,
}

impl Neurule {
    pub fn new(
        label: impl Into<String>,
        bias: f64,
        conditions: Vec<(String, f64)>,
        conclusion: impl Into<String>,
    ) -> Result<Neurule, NeuruleError> {
        for (i, (c, _)) in conditions.iter().enumerate() {
            if conditions[..i].iter().any(|(d, _)| d == c) {
                return Err(NeuruleError::DuplicateCondition(c.clone()));
            }
        }
        Ok(Neurule {
            label: label.into(),
            bias,
            conditions,
            conclusion: conclusion.into(),
        })
    }

    pub fn evaluate(&self, input: &[TriValue]) -> Result<NeuruleOutput, NeuruleError> {
        if input.len() != self.conditions.len() {
            return Err(NeuruleError::Arity {
                expected: self.conditions.len(),
                got: input.len(),
            });
        }
        let sum = self
            .conditions
            .iter()
            .zip(input)
            .fold(self.bias, |acc, ((_, sf), x)| acc + sf * x.as_f64());
        Ok(NeuruleOutput {
            sum,
            fires: sum > 0.0,
        })
    }

    pub fn position(&self, condition: &str) -> Option<usize> {
        self.conditions.iter().position(|(c, _)| c == condition)
    }

    pub fn with_bias(&self, bias: f64) -> Neurule {
        Neurule { bias, ..self.clone() }
    }

    pub fn with_factor(&self, condition: &str, factor: f64) -> Result<Neurule, NeuruleError> {
        let i = self
            .position(condition)
            .ok_or_else(|| NeuruleError::UnknownCondition(condition.to_string()))?;
        let mut out = self.clone();
        out.conditions[i].1 = factor;
        Ok(out)
    }

    /// Input vector for a case where `holding` conditions are true.
    /// Conditions that share an exclusive group with a holding condition are
    /// false; everything else is unknown.
    pub fn input_for(&self, holding: &[&str], exclusive: &[&[&str]]) -> Vec<TriValue> {
        self.conditions
            .iter()
            .map(|(c, _)| {
                if holding.contains(&c.as_str()) {
                    TriValue::True
                } else if exclusive
                    .iter()
                    .any(|g| g.contains(&c.as_str()) && g.iter().any(|x| holding.contains(x)))
                {
                    TriValue::False
                } else {
                    TriValue::Unknown
                }
            })
            .collect()
    }

    /// Parses neurule definitions, one per line:
    /// `label bias cond:factor ... -> conclusion`.
    pub fn parse_file(text: &str) -> Result<Vec<Neurule>, NeuruleError> {
        let mut out = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            out.push(parse_line(content).map_err(|message| NeuruleError::Parse { line, message })?);
        }
        Ok(out)
    }
}

fn parse_line(content: &str) -> Result<Neurule, String> {
    let (lhs, conclusion) = content.split_once("->").ok_or("missing `-> conclusion`")?;
    let conclusion = conclusion.trim();
    validate_thing(conclusion).map_err(|e| e.to_string())?;
    let mut words = lhs.split_whitespace();
    let label = words.next().ok_or("missing label")?;
    let bias: f64 = words
        .next()
        .ok_or("missing bias")?
        .parse()
        .map_err(|e| format!("bad bias: {e}"))?;
    let mut conditions = Vec::new();
    for w in words {
        let (c, f) = w
            .rsplit_once(':')
            .ok_or_else(|| format!("expected condition:factor, got {w:?}"))?;
        validate_thing(c).map_err(|e| e.to_string())?;
        let f: f64 = f.parse().map_err(|e| format!("bad factor for {c}: {e}"))?;
        conditions.push((c.to_string(), f));
    }
    Neurule::new(label, bias, conditions, conclusion).map_err(|e| e.to_string())
}

impl fmt::Display for Neurule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.label, self.bias)?;
        for (c, sf) in &self.conditions {
            write!(f, " {c}:{sf}")?;
        }
        write!(f, " -> {}", self.conclusion)
    }
}

/// A named input to evaluate, e.g. one of the symbolic rules a neurule folds.
#[derive(Clone, Debug, PartialEq)]
pub struct NeuruleCase {
    pub label: String,
    pub input: Vec<TriValue>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Adjustment {
    Original,
    Bias(f64),
    Factor(String, f64),
}

impl fmt::Display for Adjustment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Adjustment::Original => f.write_str("original"),
            Adjustment::Bias(b) => write!(f, "bias {b}"),
            Adjustment::Factor(c, v) => write!(f, "{c} factor {v}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VariantOutcome {
    pub adjustment: Adjustment,
    /// `(case label, output)` in case order.
    pub outcomes: Vec<(String, NeuruleOutput)>,
}

impl VariantOutcome {
    pub fn represented(&self) -> Vec<&str> {
        self.outcomes
            .iter()
            .filter(|(_, o)| o.fires)
            .map(|(l, _)| l.as_str())
            .collect()
    }

    pub fn failed(&self) -> Vec<&str> {
        self.outcomes
            .iter()
            .filter(|(_, o)| !o.fires)
            .map(|(l, _)| l.as_str())
            .collect()
    }

    pub fn sum(&self, case: &str) -> Option<f64> {
        self.outcomes.iter().find(|(l, _)| l == case).map(|(_, o)| o.sum)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdjustmentReport {
    pub variants: Vec<VariantOutcome>,
}

impl AdjustmentReport {
    pub fn variant(&self, adjustment: &Adjustment) -> Option<&VariantOutcome> {
        self.variants.iter().find(|v| &v.adjustment == adjustment)
    }
}

impl fmt::Display for AdjustmentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.variants {
            writeln!(f, "{}:", v.adjustment)?;
            for (label, o) in &v.outcomes {
                writeln!(
                    f,
                    "  {label:<6} sum={:>6.1}  {}",
                    o.sum,
                    if o.fires { "represented" } else { "NOT represented" }
                )?;
            }
        }
        Ok(())
    }
}

/// Evaluates every case under the original neurule and under each
/// single-parameter adjustment.
pub fn adjustment_experiment(
    neurule: &Neurule,
    cases: &[NeuruleCase],
    adjustments: &[Adjustment],
) -> Result<AdjustmentReport, NeuruleError> {
    let mut all = vec![Adjustment::Original];
    all.extend(
        adjustments
            .iter()
            .filter(|a| **a != Adjustment::Original)
            .cloned(),
    );
    let mut variants = Vec::new();
    for adjustment in all {
        let nr = match &adjustment {
            Adjustment::Original => neurule.clone(),
            Adjustment::Bias(b) => neurule.with_bias(*b),
            Adjustment::Factor(c, v) => neurule.with_factor(c, *v)?,
        };
        let outcomes = cases
            .iter()
            .map(|c| Ok((c.label.clone(), nr.evaluate(&c.input)?)))
            .collect::<Result<_, NeuruleError>>()?;
        variants.push(VariantOutcome { adjustment, outcomes });
    }
    Ok(AdjustmentReport { variants })
}
