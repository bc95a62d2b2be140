use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Bound, ElectionConfig};

use super::feasibility::check_feasibility;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RelaxationAction {
    /// A lower bound was cut down to the category's candidate supply.
    FreeSeats,
    /// A whole criterion was removed.
    DropCriterion,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelaxationRecord {
    pub action: RelaxationAction,
    pub criterion: String,
    /// Absent for dropped criteria.
    pub category: Option<String>,
    pub old_bound: Option<Bound>,
    /// `None` when the criterion was dropped.
    pub new_bound: Option<Bound>,
    pub freed_seats: u32,
}

/// Stage 1 alone: every lower bound above its category's supply is reduced to
/// that supply, and the freed seats become open to anyone.
pub fn free_seats(config: &ElectionConfig) -> (ElectionConfig, Vec<RelaxationRecord>) {
    let mut relaxed = config.clone();
    let mut records = Vec::new();
    for criterion in &mut relaxed.criteria {
        for category in &mut criterion.categories {
            let supply = config.supply(&criterion.attribute, &category.name);
            let lower = category.bound.lower();
            if lower > supply {
                let old = category.bound;
                category.bound = old.with_lower(supply);
                records.push(RelaxationRecord {
                    action: RelaxationAction::FreeSeats,
                    criterion: criterion.attribute.clone(),
                    category: Some(category.name.clone()),
                    old_bound: Some(old),
                    new_bound: Some(category.bound),
                    freed_seats: lower - supply,
                });
            }
        }
    }
    (relaxed, records)
}

/// Relax an infeasible config until some committee satisfies it: first free
/// seats, then drop whole criteria starting from the least preferred. A
/// feasible config comes back unchanged with no records.
pub fn relax_until_feasible(config: &ElectionConfig) -> Result<(ElectionConfig, Vec<RelaxationRecord>)> {
    if config.seats as usize > config.roster.len() {
        return Err(Error::UnsatisfiableEvenEmpty {
            seats: config.seats,
            roster: config.roster.len(),
        });
    }
    if check_feasibility(&config.roster, config).is_feasible() {
        return Ok((config.clone(), Vec::new()));
    }

    let (mut relaxed, mut records) = free_seats(config);

    // Least preferred (highest rank) first.
    let mut drop_order: Vec<_> = relaxed
        .criteria
        .iter()
        .map(|c| (c.preference_rank, c.attribute.clone()))
        .collect();
    drop_order.sort_by(|a, b| b.cmp(a));

    let mut drops = drop_order.into_iter();
    while !check_feasibility(&relaxed.roster, &relaxed).is_feasible() {
        // Without criteria any k <= m committee is feasible, so this ends.
        let (_, attribute) = drops
            .next()
            .expect("an empty criteria list is always feasible when k <= m");
        relaxed.criteria.retain(|c| c.attribute != attribute);
        records.push(RelaxationRecord {
            action: RelaxationAction::DropCriterion,
            criterion: attribute,
            category: None,
            old_bound: None,
            new_bound: None,
            freed_seats: 0,
        });
    }
    Ok((relaxed, records))
}
