//! Bundled rule bases and the bone-disease neurule.

use crate::neurule::{Adjustment, Neurule, NeuruleCase};
use crate::rules::{parse_rule_file, RuleBase};

pub const ANIMAL_RULES: &str = include_str!("../data/animals.rules");
pub const BONE_R2_RULES: &str = include_str!("../data/bone_r2.rules");
pub const BONE_R7_RULES: &str = include_str!("../data/bone_r7.rules");
pub const BONE_R7_NEURULE: &str = include_str!("../data/bone_r7.neurule");

/// Condition groups of R7 whose members exclude each other (one pain kind,
/// one patient class).
pub const R7_EXCLUSIVE: [&[&str]; 2] = [
    &["continuous-pain", "night-pain"],
    &["patient-21-35", "patient-0-20"],
];

pub fn animal_rules() -> RuleBase {
    parse_rule_file(ANIMAL_RULES).expect("bundled rules parse")
}

pub fn r2_rules() -> RuleBase {
    parse_rule_file(BONE_R2_RULES).expect("bundled rules parse")
}

pub fn r7_rules() -> RuleBase {
    parse_rule_file(BONE_R7_RULES).expect("bundled rules parse")
}

pub fn r7_neurule() -> Neurule {
    Neurule::parse_file(BONE_R7_NEURULE)
        .expect("bundled neurule parses")
        .remove(0)
}

/// One case per symbolic R7 rule, labelled `R7.1` .. `R7.4`: the rule's
/// conditions are true, their exclusive alternatives false, the rest unknown.
pub fn r7_cases() -> Vec<NeuruleCase> {
    let nr = r7_neurule();
    r7_rules()
        .iter()
        .enumerate()
        .map(|(i, rule)| {
            let holding: Vec<&str> = rule.body.iter().map(|l| l.thing.as_str()).collect();
            NeuruleCase {
                label: format!("R7.{}", i + 1),
                input: nr.input_for(&holding, &R7_EXCLUSIVE),
            }
        })
        .collect()
}

/// The two single-parameter changes that try to drop R7.1: bias raised to
/// 17 and the night-pain factor raised to 19.6, both a 7.3 shift.
pub fn r7_adjustments() -> Vec<Adjustment> {
    vec![
        Adjustment::Bias(-17.0),
        Adjustment::Factor("night-pain".to_string(), 19.6),
    ]
}
