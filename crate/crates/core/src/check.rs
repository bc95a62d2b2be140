//! Committee constraint checker.
//!
//! Works directly on roster attribute strings and shares no code with the
//! solver's compiled representation, so it can certify solver output.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::model::{Bound, ElectionConfig};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Breach {
    WrongSize {
        expected: u32,
        actual: usize,
    },
    UnknownCandidate {
        candidate_id: String,
    },
    DuplicateCandidate {
        candidate_id: String,
    },
    Uncategorized {
        candidate_id: String,
        criterion: String,
    },
    Bound {
        criterion: String,
        category: String,
        bound: Bound,
        count: u32,
    },
}

/// Every constraint a committee breaks against `config`, including the size
/// constraint.
pub fn committee_breaches<'a, I>(committee: I, config: &ElectionConfig) -> Vec<Breach>
where
    I: IntoIterator<Item = &'a str>,
{
    let members: Vec<&str> = committee.into_iter().collect();
    let mut out = Vec::new();

    if members.len() != config.seats as usize {
        out.push(Breach::WrongSize {
            expected: config.seats,
            actual: members.len(),
        });
    }

    let mut seen = BTreeSet::new();
    let mut records = Vec::new();
    for id in &members {
        if !seen.insert(*id) {
            out.push(Breach::DuplicateCandidate {
                candidate_id: id.to_string(),
            });
            continue;
        }
        match config.roster.iter().find(|c| c.candidate_id == *id) {
            Some(record) => records.push(record),
            None => out.push(Breach::UnknownCandidate {
                candidate_id: id.to_string(),
            }),
        }
    }

    for criterion in &config.criteria {
        for record in &records {
            let declared = record
                .attributes
                .get(&criterion.attribute)
                .is_some_and(|cat| criterion.categories.iter().any(|c| &c.name == cat));
            if !declared {
                out.push(Breach::Uncategorized {
                    candidate_id: record.candidate_id.clone(),
                    criterion: criterion.attribute.clone(),
                });
            }
        }
        for category in &criterion.categories {
            let count = records
                .iter()
                .filter(|r| r.attributes.get(&criterion.attribute) == Some(&category.name))
                .count() as u32;
            if !category.bound.admits(count) {
                out.push(Breach::Bound {
                    criterion: criterion.attribute.clone(),
                    category: category.name.clone(),
                    bound: category.bound,
                    count,
                });
            }
        }
    }

    out
}

pub fn satisfies<'a, I>(committee: I, config: &ElectionConfig) -> bool
where
    I: IntoIterator<Item = &'a str>,
{
    committee_breaches(committee, config).is_empty()
}
