//! Explore hypothetical variants of a counted election without touching it.

use pact_core::model::Bound;
use pact_core::monthey;
use pact_core::solver::{SolverOptions, WHATIF_NODE_BUDGET};
use pact_core::whatif::{evaluate, CriterionEdit, WhatIfRequest};

fn main() -> pact_core::Result<()> {
    let config = monthey::config();
    let votes = monthey::votes();
    let options = SolverOptions::with_budget(WHATIF_NODE_BUDGET);

    let no_gender = WhatIfRequest {
        edits: vec![CriterionEdit::RemoveCriterion {
            attribute: monthey::GENDER.into(),
        }],
        ..Default::default()
    };
    let response = evaluate(&config, &votes, &no_gender, &options)?;
    // Still 1440: the age criterion alone forces the same committee.
    println!("without the gender criterion: {} votes", response.outcome.objective);

    let none = WhatIfRequest {
        edits: [monthey::GENDER, monthey::AGE, monthey::REGION]
            .iter()
            .map(|a| CriterionEdit::RemoveCriterion {
                attribute: a.to_string(),
            })
            .collect(),
        ..Default::default()
    };
    let response = evaluate(&config, &votes, &none, &options)?;
    println!("without any criteria: {} votes", response.outcome.objective);

    let five_seniors = WhatIfRequest {
        edits: vec![CriterionEdit::SetBound {
            attribute: monthey::AGE.into(),
            category: "+65".into(),
            bound: Bound::AtLeast(5),
        }],
        ..Default::default()
    };
    let response = evaluate(&config, &votes, &five_seniors, &options)?;
    println!(
        "at least five over 65: {:?}, {} votes, relaxations {:?}",
        response.outcome.status, response.outcome.objective, response.outcome.applied_relaxations
    );
    Ok(())
}
