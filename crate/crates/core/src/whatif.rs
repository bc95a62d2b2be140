//! Hypothetical variants of a counted election: change criteria, add or
//! remove candidates, and see the new optimum and its price. The base
//! election is never modified.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::explain::{price_from_outcome, PriceReport};
use crate::model::{
    ensure_valid, Bound, CandidateRecord, CategoryBound, CriterionSpec, ElectionConfig, RelaxationPolicy, TiePolicy,
    Votes,
};
use crate::solver::{check_feasibility, solve_with, Feasibility, SolveOutcome, SolverOptions};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum CriterionEdit {
    AddCriterion {
        criterion: CriterionSpec,
    },
    RemoveCriterion {
        attribute: String,
    },
    /// Creates the category when the criterion does not have it yet.
    SetBound {
        attribute: String,
        category: String,
        bound: Bound,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypotheticalCandidate {
    pub candidate: CandidateRecord,
    pub votes: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WhatIfRequest {
    #[serde(default)]
    pub edits: Vec<CriterionEdit>,
    #[serde(default)]
    pub add_candidates: Vec<HypotheticalCandidate>,
    #[serde(default)]
    pub remove_candidates: Vec<String>,
    #[serde(default)]
    pub tie_policy: Option<TiePolicy>,
    #[serde(default)]
    pub relaxation_policy: Option<RelaxationPolicy>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WhatIfResponse {
    /// Feasibility of the edited config before any relaxation.
    pub feasibility: Feasibility,
    pub outcome: SolveOutcome,
    /// Absent when the outcome is infeasible.
    pub price: Option<PriceReport>,
    pub config: ElectionConfig,
}

fn edit_error(message: String) -> Error {
    Error::InvalidEdit(message)
}

/// The edited config and vote totals. Edits apply in order, then removals,
/// then additions; the result must pass config validation.
pub fn apply(config: &ElectionConfig, votes: &Votes, request: &WhatIfRequest) -> Result<(ElectionConfig, Votes)> {
    let mut config = config.clone();
    let mut votes = votes.clone();

    for edit in &request.edits {
        match edit {
            CriterionEdit::AddCriterion { criterion } => {
                if config.criterion(&criterion.attribute).is_some() {
                    return Err(edit_error(format!(
                        "criterion `{}` already exists",
                        criterion.attribute
                    )));
                }
                config.criteria.push(criterion.clone());
            }
            CriterionEdit::RemoveCriterion { attribute } => {
                let before = config.criteria.len();
                config.criteria.retain(|c| &c.attribute != attribute);
                if config.criteria.len() == before {
                    return Err(edit_error(format!("no criterion `{attribute}`")));
                }
            }
            CriterionEdit::SetBound {
                attribute,
                category,
                bound,
            } => {
                let criterion = config
                    .criteria
                    .iter_mut()
                    .find(|c| &c.attribute == attribute)
                    .ok_or_else(|| edit_error(format!("no criterion `{attribute}`")))?;
                match criterion.categories.iter_mut().find(|c| &c.name == category) {
                    Some(existing) => existing.bound = *bound,
                    None => criterion.categories.push(CategoryBound::new(category, *bound)),
                }
            }
        }
    }

    let removed: BTreeSet<&str> = request.remove_candidates.iter().map(String::as_str).collect();
    for id in &removed {
        if config.candidate(id).is_none() {
            return Err(Error::UnknownCandidate(id.to_string()));
        }
        votes.remove(id);
    }
    config.roster.retain(|c| !removed.contains(c.candidate_id.as_str()));

    for extra in &request.add_candidates {
        let id = &extra.candidate.candidate_id;
        if config.candidate(id).is_some() {
            return Err(edit_error(format!("candidate `{id}` already exists")));
        }
        config.roster.push(extra.candidate.clone());
        votes.set(id, extra.votes);
    }

    if let Some(policy) = request.tie_policy {
        config.tie_policy = policy;
    }
    if let Some(policy) = request.relaxation_policy {
        config.relaxation_policy = policy;
    }
    ensure_valid(&config)?;
    Ok((config, votes))
}

/// Apply the request and solve it under `options` (normally the what-if
/// node budget).
pub fn evaluate(
    config: &ElectionConfig,
    votes: &Votes,
    request: &WhatIfRequest,
    options: &SolverOptions,
) -> Result<WhatIfResponse> {
    let (config, votes) = apply(config, votes, request)?;
    let feasibility = check_feasibility(&config.roster, &config);
    let outcome = solve_with(&votes, &config, options)?;
    let price = if outcome.is_solved() {
        Some(price_from_outcome(&votes, &config, &outcome, options)?)
    } else {
        None
    };
    Ok(WhatIfResponse {
        feasibility,
        outcome,
        price,
        config,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::SolveStatus;

    fn config() -> ElectionConfig {
        ElectionConfig {
            election_id: "w".into(),
            seats: 2,
            max_selections: 2,
            roster: vec![
                CandidateRecord::new("a", "A", [("g", "m")]),
                CandidateRecord::new("b", "B", [("g", "m")]),
                CandidateRecord::new("c", "C", [("g", "f")]),
            ],
            criteria: vec![CriterionSpec::new(
                "g",
                1,
                vec![
                    CategoryBound::new("m", Bound::AtMost(2)),
                    CategoryBound::new("f", Bound::AtLeast(1)),
                ],
            )],
            tie_policy: Default::default(),
            relaxation_policy: Default::default(),
        }
    }

    fn votes() -> Votes {
        [("a", 9), ("b", 8), ("c", 1)]
            .iter()
            .map(|(id, v)| (id.to_string(), *v))
            .collect()
    }

    #[test]
    fn base_is_untouched() {
        let cfg = config();
        let request = WhatIfRequest {
            edits: vec![CriterionEdit::RemoveCriterion { attribute: "g".into() }],
            ..Default::default()
        };
        let response = evaluate(&cfg, &votes(), &request, &SolverOptions::default()).unwrap();
        assert_eq!(response.outcome.objective, 17);
        assert_eq!(response.price.unwrap().price, 0);
        assert_eq!(cfg, config());
    }

    #[test]
    fn raising_a_bound_past_supply_relaxes() {
        let request = WhatIfRequest {
            edits: vec![CriterionEdit::SetBound {
                attribute: "g".into(),
                category: "f".into(),
                bound: Bound::AtLeast(2),
            }],
            ..Default::default()
        };
        let response = evaluate(&config(), &votes(), &request, &SolverOptions::default()).unwrap();
        assert!(!response.feasibility.is_feasible());
        assert_eq!(response.outcome.status, SolveStatus::RelaxedOptimal);
        assert_eq!(response.outcome.objective, 10);
    }

    #[test]
    fn hypothetical_candidate_with_new_category() {
        let request = WhatIfRequest {
            edits: vec![CriterionEdit::SetBound {
                attribute: "g".into(),
                category: "x".into(),
                bound: Bound::AtLeast(1),
            }],
            add_candidates: vec![HypotheticalCandidate {
                candidate: CandidateRecord::new("d", "D", [("g", "x")]),
                votes: 3,
            }],
            remove_candidates: vec!["a".into()],
            ..Default::default()
        };
        let response = evaluate(&config(), &votes(), &request, &SolverOptions::default()).unwrap();
        assert_eq!(response.outcome.status, SolveStatus::Optimal);
        assert_eq!(
            response.outcome.committee,
            ["c", "d"].iter().map(|s| s.to_string()).collect()
        );
        assert_eq!(response.outcome.forced.len(), 2);
    }

    #[test]
    fn bad_edits_are_rejected() {
        let remove_unknown = WhatIfRequest {
            edits: vec![CriterionEdit::RemoveCriterion {
                attribute: "age".into(),
            }],
            ..Default::default()
        };
        assert!(matches!(
            apply(&config(), &votes(), &remove_unknown),
            Err(Error::InvalidEdit(_))
        ));

        let uncategorized = WhatIfRequest {
            add_candidates: vec![HypotheticalCandidate {
                candidate: CandidateRecord::new("d", "D", [("h", "x")]),
                votes: 3,
            }],
            ..Default::default()
        };
        assert!(matches!(
            apply(&config(), &votes(), &uncategorized),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn request_json_shape() {
        let json = r#"{"edits":[{"op":"set_bound","attribute":"g","category":"f","bound":{"AT_LEAST":2}}]}"#;
        let request: WhatIfRequest = serde_json::from_str(json).unwrap();
        assert_eq!(request.edits.len(), 1);
        assert!(request.add_candidates.is_empty());
    }
}
