//! UCI dataset readers and the record-to-rule mapping.

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::validate_thing;
use crate::rules::{Literal, Rule};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("row {row}: {message}")]
    Malformed { row: usize, message: String },
    #[error("row {row}: unknown class token {token:?}")]
    UnknownClass { row: usize, token: String },
    #[error("asked for {asked} attributes, the dataset has {available}")]
    TooManyAttributes { asked: usize, available: usize },
}

/// Attribute columns of the UCI mushroom data, in file order (the class is
/// column 0 and precedes these).
pub const MUSHROOM_ATTRIBUTES: [&str; 22] = [
    "cap-shape",
    "cap-surface",
    "cap-color",
    "bruises",
    "odor",
    "gill-attachment",
    "gill-spacing",
    "gill-size",
    "gill-color",
    "stalk-shape",
    "stalk-root",
    "stalk-surface-above-ring",
    "stalk-surface-below-ring",
    "stalk-color-above-ring",
    "stalk-color-below-ring",
    "veil-type",
    "veil-color",
    "ring-number",
    "ring-type",
    "spore-print-color",
    "population",
    "habitat",
];

pub const SPECT_FEATURES: usize = 22;

/// One dataset row: attribute values plus the class.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Record {
    pub attributes: Vec<(String, String)>,
    pub class_attr: String,
    pub class_label: String,
}

impl Record {
    pub fn attribute_things(&self) -> impl Iterator<Item = String> + '_ {
        self.attributes.iter().map(|(a, v)| format!("{a}={v}"))
    }

    pub fn class_thing(&self) -> String {
        format!("{}={}", self.class_attr, self.class_label)
    }

    pub fn class_prefix(&self) -> String {
        format!("{}=", self.class_attr)
    }
}

/// The record's attributes become the positive body, its class the head.
pub fn record_to_rule(rec: &Record) -> Rule {
    Rule {
        body: rec.attribute_things().map(Literal::pos).collect(),
        unless: Vec::new(),
        head: Literal::pos(rec.class_thing()),
    }
}

fn read(path: &Path) -> Result<String, DataError> {
    std::fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn rows(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l.trim().split(',').map(str::trim).collect()))
}

pub fn load_mushroom(
    path: impl AsRef<Path>,
    n_attrs: usize,
    n_records: usize,
) -> Result<Vec<Record>, DataError> {
    parse_mushroom(&read(path.as_ref())?, n_attrs, n_records)
}

/// First `n_records` rows, first `n_attrs` attribute columns. Values become
/// `attr=value` things (`?` is read as `missing`); the class becomes
/// `class=edible` or `class=poisonous`.
pub fn parse_mushroom(text: &str, n_attrs: usize, n_records: usize) -> Result<Vec<Record>, DataError> {
    if n_attrs > MUSHROOM_ATTRIBUTES.len() {
        return Err(DataError::TooManyAttributes {
            asked: n_attrs,
            available: MUSHROOM_ATTRIBUTES.len(),
        });
    }
    let mut out = Vec::new();
    for (row, cols) in rows(text).take(n_records) {
        if cols.len() != MUSHROOM_ATTRIBUTES.len() + 1 {
            return Err(DataError::Malformed {
                row,
                message: format!(
                    "expected {} columns, found {}",
                    MUSHROOM_ATTRIBUTES.len() + 1,
                    cols.len()
                ),
            });
        }
        let class_label = match cols[0] {
            "e" => "edible",
            "p" => "poisonous",
            other => {
                return Err(DataError::UnknownClass {
                    row,
                    token: other.to_string(),
                })
            }
        };
        let mut attributes = Vec::with_capacity(n_attrs);
        for (name, value) in MUSHROOM_ATTRIBUTES.iter().zip(&cols[1..]).take(n_attrs) {
            let value = if *value == "?" { "missing" } else { value };
            validate_thing(value).map_err(|_| DataError::Malformed {
                row,
                message: format!("bad value {value:?} for {name}"),
            })?;
            attributes.push((name.to_string(), value.to_string()));
        }
        out.push(Record {
            attributes,
            class_attr: "class".to_string(),
            class_label: class_label.to_string(),
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectData {
    pub records: Vec<Record>,
    /// Records removed because the same feature vector carries both classes.
    pub dropped: usize,
}

pub fn load_spect(path: impl AsRef<Path>, drop_indecisive: bool) -> Result<SpectData, DataError> {
    parse_spect(&read(path.as_ref())?, drop_indecisive)
}

/// Rows are the class (`0` normal, `1` abnormal) followed by 22 binary
/// features, read as `F1=0|1` .. `F22=0|1` and `heart=normal|abnormal`.
/// With `drop_indecisive`, every record whose feature vector also appears
/// with the other class is removed.
pub fn parse_spect(text: &str, drop_indecisive: bool) -> Result<SpectData, DataError> {
    let mut records = Vec::new();
    for (row, cols) in rows(text) {
        if cols.len() != SPECT_FEATURES + 1 {
            return Err(DataError::Malformed {
                row,
                message: format!("expected {} columns, found {}", SPECT_FEATURES + 1, cols.len()),
            });
        }
        let class_label = match cols[0] {
            "0" => "normal",
            "1" => "abnormal",
            other => {
                return Err(DataError::UnknownClass {
                    row,
                    token: other.to_string(),
                })
            }
        };
        let mut attributes = Vec::with_capacity(SPECT_FEATURES);
        for (i, v) in cols[1..].iter().enumerate() {
            if *v != "0" && *v != "1" {
                return Err(DataError::Malformed {
                    row,
                    message: format!("feature F{} is {v:?}, expected 0 or 1", i + 1),
                });
            }
            attributes.push((format!("F{}", i + 1), v.to_string()));
        }
        records.push(Record {
            attributes,
            class_attr: "heart".to_string(),
            class_label: class_label.to_string(),
        });
    }
    if !drop_indecisive {
        return Ok(SpectData { records, dropped: 0 });
    }
    let conflicted: Vec<usize> = conflict_groups(&records).into_iter().flatten().collect();
    let dropped = conflicted.len();
    let records = records
        .into_iter()
        .enumerate()
        .filter(|(i, _)| !conflicted.contains(i))
        .map(|(_, r)| r)
        .collect();
    Ok(SpectData { records, dropped })
}

/// Groups of record indices that share an attribute vector but not a class.
/// Groups are ordered by their first index.
pub fn conflict_groups(records: &[Record]) -> Vec<Vec<usize>> {
    let mut by_attrs: BTreeMap<&[(String, String)], Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        by_attrs.entry(&r.attributes).or_default().push(i);
    }
    let mut groups: Vec<Vec<usize>> = by_attrs
        .into_values()
        .filter(|g| {
            g.iter()
                .any(|&i| records[i].class_label != records[g[0]].class_label)
        })
        .collect();
    groups.sort();
    groups
}

/// `n` records after a seeded shuffle of `records`.
pub fn select(records: &[Record], n: usize, seed: u64) -> Vec<Record> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut all = records.to_vec();
    all.shuffle(&mut rng);
    all.truncate(n);
    all
}

/// Value letters of each mushroom attribute, in column order.
const MUSHROOM_VALUES: [&str; 22] = [
    "bcxfks",
    "fgys",
    "nbcgrpuewy",
    "tf",
    "alcyfmnps",
    "adfn",
    "cwd",
    "bn",
    "knbhgropuewy",
    "et",
    "bcuezr?",
    "fyks",
    "fyks",
    "nbcgopewy",
    "nbcgopewy",
    "pu",
    "nowy",
    "not",
    "ceflnpsz",
    "knbhrouwy",
    "acnsvy",
    "glmpuwd",
];

/// Random rows in the UCI mushroom layout for benches and tests. The class
/// follows the odor column (almond, anise or none is edible), so every slice
/// that keeps the first five attributes is consistent.
pub fn synthetic_mushroom(rows: usize, seed: u64) -> String {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    for _ in 0..rows {
        let values: Vec<char> = MUSHROOM_VALUES
            .iter()
            .map(|alphabet| {
                let letters: Vec<char> = alphabet.chars().collect();
                letters[rng.gen_range(0..letters.len())]
            })
            .collect();
        out.push(if "aln".contains(values[4]) { 'e' } else { 'p' });
        for v in values {
            out.push(',');
            out.push(v);
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const ROW_E: &str = "e,x,s,y,t,a,f,c,b,k,e,c,s,s,w,w,p,w,o,p,n,n,g";
    const ROW_P: &str = "p,x,s,n,t,p,f,c,n,k,e,e,s,s,w,w,p,w,o,p,k,s,u";

    #[test]
    fn mushroom_slice() {
        let text = format!("{ROW_E}\n{ROW_P}\n{ROW_E}\n");
        let recs = parse_mushroom(&text, 10, 2).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].attributes.len(), 10);
        assert_eq!(recs[0].attributes[0], ("cap-shape".into(), "x".into()));
        assert_eq!(recs[1].class_thing(), "class=poisonous");
        assert!(parse_mushroom(&text, 10, 0).unwrap().is_empty());
        let full = parse_mushroom(&text, 22, usize::MAX).unwrap();
        assert_eq!(full.len(), 3);
        assert_eq!(full[0].attributes[21], ("habitat".into(), "g".into()));
    }

    #[test]
    fn mushroom_errors() {
        let short = "e,x,s\n";
        match parse_mushroom(&format!("{ROW_E}\n{short}"), 5, 10) {
            Err(DataError::Malformed { row, .. }) => assert_eq!(row, 2),
            other => panic!("{other:?}"),
        }
        let bad_class = ROW_E.replacen('e', "q", 1);
        assert!(matches!(
            parse_mushroom(&bad_class, 5, 10),
            Err(DataError::UnknownClass { row: 1, .. })
        ));
        assert!(matches!(
            parse_mushroom(ROW_E, 23, 1),
            Err(DataError::TooManyAttributes { .. })
        ));
    }

    #[test]
    fn missing_value_token() {
        let row = ROW_E.replace(",e,c,s,s", ",e,?,s,s");
        let rec = &parse_mushroom(&row, 22, 1).unwrap()[0];
        assert_eq!(rec.attributes[10], ("stalk-root".into(), "missing".into()));
    }

    fn spect_row(class: u8, bits: &str) -> String {
        let mut cols = vec![class.to_string()];
        cols.extend(bits.chars().map(|c| c.to_string()));
        cols.join(",")
    }

    #[test]
    fn spect_drops_indecisive_pairs() {
        let a = "1010101010101010101010";
        let b = "0000000000000000000011";
        let text = [spect_row(1, a), spect_row(0, a), spect_row(1, b)].join("\n");
        let data = parse_spect(&text, true).unwrap();
        assert_eq!(data.dropped, 2);
        assert_eq!(data.records.len(), 1);
        assert_eq!(data.records[0].class_thing(), "heart=abnormal");
        assert_eq!(data.records[0].attributes[21], ("F22".into(), "1".into()));
        let kept = parse_spect(&text, false).unwrap();
        assert_eq!((kept.records.len(), kept.dropped), (3, 0));
    }

    #[test]
    fn spect_clean_and_bad_tokens() {
        let text = spect_row(1, "1010101010101010101010");
        assert_eq!(parse_spect(&text, true).unwrap().dropped, 0);
        let bad = spect_row(1, "1010101010101010101012");
        assert!(matches!(
            parse_spect(&bad, true),
            Err(DataError::Malformed { row: 1, .. })
        ));
    }

    #[test]
    fn record_rule_shape() {
        let recs = parse_mushroom(ROW_E, 10, 1).unwrap();
        let rule = record_to_rule(&recs[0]);
        assert_eq!(rule.body.len(), 10);
        assert!(rule.body.iter().all(|l| !l.negated));
        assert_eq!(rule.head, Literal::pos("class=edible"));
        rule.validate().unwrap();
    }

    #[test]
    fn seeded_selection_is_deterministic() {
        let text = [ROW_E, ROW_P, ROW_E, ROW_P, ROW_P].join("\n");
        let recs = parse_mushroom(&text, 22, usize::MAX).unwrap();
        assert_eq!(select(&recs, 3, 7), select(&recs, 3, 7));
        assert_eq!(select(&recs, 10, 0).len(), 5);
    }

    #[test]
    fn synthetic_rows_parse() {
        let text = synthetic_mushroom(40, 3);
        assert_eq!(text, synthetic_mushroom(40, 3));
        let recs = parse_mushroom(&text, 5, usize::MAX).unwrap();
        assert_eq!(recs.len(), 40);
        assert!(conflict_groups(&recs).is_empty());
    }

    #[test]
    fn conflicts_found() {
        let text = [ROW_E, ROW_P, &ROW_P.replacen('p', "e", 1), ROW_E].join("\n");
        let recs = parse_mushroom(&text, 22, usize::MAX).unwrap();
        assert_eq!(conflict_groups(&recs), vec![vec![1, 2]]);
    }
}
