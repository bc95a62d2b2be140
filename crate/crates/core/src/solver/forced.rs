use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::ElectionConfig;

use super::feasibility::{check_feasibility, TypeModel};

/// Candidates present in every feasible committee: excluding any one of them
/// makes the instance infeasible.
///
/// A category whose supply equals its lower bound forces all its members
/// outright. Everything else is probed by removing one member of each
/// candidate type; interchangeable candidates share a single probe.
pub fn find_forced_candidates(config: &ElectionConfig) -> Result<BTreeSet<String>> {
    let model = TypeModel::new(&config.roster, config);
    if !model.feasible() {
        return Err(Error::Infeasible(
            check_feasibility(&config.roster, config).deficits().to_vec(),
        ));
    }

    let scarce: Vec<Vec<bool>> = (0..config.criteria.len())
        .map(|p| {
            model
                .category_supply(p)
                .iter()
                .enumerate()
                .map(|(c, &supply)| {
                    let lower = model.lower(p, c);
                    lower > 0 && supply <= lower
                })
                .collect()
        })
        .collect();

    let mut forced = BTreeSet::new();
    let mut supply = model.supply.clone();
    for (t, signature) in model.types.iter().enumerate() {
        let fast = signature.iter().enumerate().any(|(p, &c)| scarce[p][c]);
        let is_forced = fast || {
            supply[t] -= 1;
            let still = model.feasible_with(&supply);
            supply[t] += 1;
            !still
        };
        if is_forced {
            forced.extend(model.members[t].iter().cloned());
        }
    }
    Ok(forced)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Bound, CandidateRecord, CategoryBound, CriterionSpec};

    fn config(seats: u32, roster: Vec<CandidateRecord>, criteria: Vec<CriterionSpec>) -> ElectionConfig {
        ElectionConfig {
            election_id: "t".into(),
            seats,
            max_selections: seats,
            roster,
            criteria,
            tie_policy: Default::default(),
            relaxation_policy: Default::default(),
        }
    }

    #[test]
    fn zero_lower_bounds_force_nobody() {
        let roster = (0..4)
            .map(|i| CandidateRecord::new(&format!("c{i}"), "", [("g", if i % 2 == 0 { "M" } else { "F" })]))
            .collect();
        let crit = CriterionSpec::new(
            "g",
            1,
            vec![
                CategoryBound::new("M", Bound::AtLeast(0)),
                CategoryBound::new("F", Bound::AtLeast(0)),
            ],
        );
        assert!(find_forced_candidates(&config(2, roster, vec![crit]))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn whole_roster_is_forced_when_k_equals_m() {
        let roster = (0..3)
            .map(|i| CandidateRecord::new(&format!("c{i}"), "", Vec::<(String, String)>::new()))
            .collect();
        let forced = find_forced_candidates(&config(3, roster, vec![])).unwrap();
        assert_eq!(forced.len(), 3);
    }

    #[test]
    fn infeasible_instance_is_an_error() {
        let roster = vec![CandidateRecord::new("a", "", [("g", "M")])];
        let crit = CriterionSpec::new("g", 1, vec![CategoryBound::new("M", Bound::AtLeast(2))]);
        assert!(matches!(
            find_forced_candidates(&config(1, roster, vec![crit])),
            Err(Error::Infeasible(_))
        ));
    }
}
