//! Hand-built elections with known answers, each confirmed by enumeration.

use std::collections::BTreeSet;

use pact_core::explain::{displacement_report, price_report, SelectionReason};
use pact_core::model::{Bound, CandidateRecord, CategoryBound, CriterionSpec, ElectionConfig, RelaxationPolicy, Votes};
use pact_core::monthey;
use pact_core::solver::{
    brute_force_solve, find_forced_candidates, relax_until_feasible, solve, RelaxationAction, SolveStatus,
    SolverOptions,
};

fn set(ids: &[&str]) -> BTreeSet<String> {
    ids.iter().map(|s| s.to_string()).collect()
}

fn votes(pairs: &[(&str, u64)]) -> Votes {
    pairs.iter().map(|(id, v)| (id.to_string(), *v)).collect()
}

fn config(seats: u32, roster: Vec<CandidateRecord>, criteria: Vec<CriterionSpec>) -> ElectionConfig {
    ElectionConfig {
        election_id: "scenario".into(),
        seats,
        max_selections: seats,
        roster,
        criteria,
        tie_policy: Default::default(),
        relaxation_policy: Default::default(),
    }
}

fn criterion(attribute: &str, rank: u32, bounds: &[(&str, Bound)]) -> CriterionSpec {
    CriterionSpec::new(
        attribute,
        rank,
        bounds.iter().map(|(n, b)| CategoryBound::new(n, *b)).collect(),
    )
}

#[test]
fn missing_senior_frees_one_seat() {
    let mut cfg = monthey::config();
    cfg.roster.retain(|c| c.candidate_id != "Z");
    let mut votes = monthey::votes();
    votes.remove("Z");

    let outcome = solve(&votes, &cfg).unwrap();
    assert_eq!(outcome.status, SolveStatus::RelaxedOptimal);
    assert_eq!(outcome.applied_relaxations.len(), 1);
    let record = &outcome.applied_relaxations[0];
    assert_eq!(record.action, RelaxationAction::FreeSeats);
    assert_eq!(record.category.as_deref(), Some("+65"));
    assert_eq!(record.old_bound, Some(Bound::AtLeast(4)));
    assert_eq!(record.new_bound, Some(Bound::AtLeast(3)));
    assert_eq!(record.freed_seats, 1);

    // 27 candidates is past the enumeration limit; expected values come from
    // an external MILP solve of the relaxed model.
    assert_eq!(outcome.objective, 1477);
    assert_eq!(outcome.co_optimal_total, 1);
    assert_eq!(
        outcome.committee,
        set(&["A", "B", "C", "D", "E", "F", "G", "H", "I", "J", "K", "L", "M", "N", "S", "T", "W"])
    );
}

#[test]
fn impossible_exact_gender_split_is_dropped_when_least_preferred() {
    let people = [("m1", "M", "n"), ("m2", "M", "s"), ("m3", "M", "n"), ("f1", "F", "s")];
    let roster = people
        .iter()
        .map(|(id, g, r)| CandidateRecord::new(id, id, [("gender", *g), ("region", *r)]))
        .collect();
    let cfg = config(
        3,
        roster,
        vec![
            criterion("region", 1, &[("n", Bound::AtLeast(1)), ("s", Bound::AtLeast(1))]),
            criterion("gender", 2, &[("M", Bound::Exact(1)), ("F", Bound::Exact(2))]),
        ],
    );
    let votes = votes(&[("m1", 9), ("m2", 8), ("m3", 7), ("f1", 1)]);
    assert_eq!(
        brute_force_solve(&votes, &cfg, &SolverOptions::default())
            .unwrap()
            .status,
        SolveStatus::Infeasible
    );

    let outcome = solve(&votes, &cfg).unwrap();
    assert_eq!(outcome.status, SolveStatus::RelaxedOptimal);
    let dropped: Vec<&str> = outcome
        .applied_relaxations
        .iter()
        .filter(|r| r.action == RelaxationAction::DropCriterion)
        .map(|r| r.criterion.as_str())
        .collect();
    assert_eq!(dropped, vec!["gender"]);
    assert_eq!(outcome.committee, set(&["m1", "m2", "m3"]));
}

#[test]
fn district_whose_top_candidates_already_qualify_pays_nothing() {
    let people = [("a", "M"), ("b", "F"), ("c", "M"), ("d", "F"), ("e", "M")];
    let roster = people
        .iter()
        .map(|(id, g)| CandidateRecord::new(id, id, [("gender", *g)]))
        .collect();
    let cfg = config(
        3,
        roster,
        vec![criterion(
            "gender",
            1,
            &[("M", Bound::AtLeast(1)), ("F", Bound::AtLeast(1))],
        )],
    );
    let votes = votes(&[("a", 50), ("b", 40), ("c", 30), ("d", 5), ("e", 4)]);
    let price = price_report(&votes, &cfg, &SolverOptions::default()).unwrap();
    assert_eq!(price.price, 0);
    assert_eq!(price.price_pct.tenths(), 0);

    let oracle = brute_force_solve(&votes, &cfg, &SolverOptions::default()).unwrap();
    assert_eq!(oracle.objective, 120);
    let outcome = solve(&votes, &cfg).unwrap();
    assert!(displacement_report(&outcome, &votes, &cfg).unwrap().records.is_empty());
}

#[test]
fn lone_protected_candidate_below_the_cut_line() {
    let people = [("a", "young"), ("b", "young"), ("c", "young"), ("d", "senior")];
    let roster = people
        .iter()
        .map(|(id, age)| CandidateRecord::new(id, id, [("age", *age)]))
        .collect();
    let cfg = config(
        2,
        roster,
        vec![criterion(
            "age",
            1,
            &[("young", Bound::AtLeast(0)), ("senior", Bound::AtLeast(1))],
        )],
    );
    let votes = votes(&[("a", 30), ("b", 20), ("c", 10), ("d", 1)]);

    let oracle = brute_force_solve(&votes, &cfg, &SolverOptions::default()).unwrap();
    assert_eq!(oracle.forced, set(&["d"]));
    let outcome = solve(&votes, &cfg).unwrap();
    let report = displacement_report(&outcome, &votes, &cfg).unwrap();
    assert_eq!(report.records.len(), 1);
    let record = &report.records[0];
    assert_eq!(record.candidate_id, "d");
    assert_eq!(record.reason, SelectionReason::Protected);
    assert_eq!(record.categories.len(), 1);
    assert_eq!(record.categories[0].category, "senior");
    assert_eq!(record.outranked, vec!["b".to_string(), "c".to_string()]);
}

#[test]
fn three_criteria_force_a_candidate_outside_every_scarce_category() {
    let people = [
        ("a", "g1", "a1", "r1"),
        ("b", "g1", "a2", "r2"),
        ("c", "g2", "a1", "r2"),
        ("d", "g2", "a2", "r1"),
        ("e", "g1", "a1", "r1"),
        ("f", "g2", "a2", "r2"),
    ];
    let roster = people
        .iter()
        .map(|(id, g, a, r)| CandidateRecord::new(id, id, [("g", *g), ("a", *a), ("r", *r)]))
        .collect();
    let cfg = config(
        3,
        roster,
        vec![
            criterion("g", 1, &[("g1", Bound::Exact(2)), ("g2", Bound::Exact(1))]),
            criterion("a", 2, &[("a1", Bound::Exact(1)), ("a2", Bound::Exact(2))]),
            criterion("r", 3, &[("r1", Bound::Exact(1)), ("r2", Bound::Exact(2))]),
        ],
    );
    // Every category has more candidates than its bound.
    for c in &cfg.criteria {
        for cat in &c.categories {
            assert!(cfg.supply(&c.attribute, &cat.name) > cat.bound.lower());
        }
    }
    let oracle = brute_force_solve(&Votes::zeroed(&cfg), &cfg, &SolverOptions::default()).unwrap();
    let forced = find_forced_candidates(&cfg).unwrap();
    assert_eq!(forced, oracle.forced);
    assert!(
        !forced.is_empty(),
        "the instance no longer exercises cross-criterion forcing"
    );
}

#[test]
fn relaxation_refuses_more_seats_than_candidates() {
    let roster = vec![CandidateRecord::new("a", "a", [("g", "m")])];
    let mut cfg = config(2, roster, vec![criterion("g", 1, &[("m", Bound::AtLeast(0))])]);
    cfg.relaxation_policy = RelaxationPolicy::FreeSeatsThenDrop;
    assert!(relax_until_feasible(&cfg).is_err());
    cfg.relaxation_policy = RelaxationPolicy::Fail;
    assert_eq!(
        solve(&votes(&[("a", 1)]), &cfg).unwrap().status,
        SolveStatus::Infeasible
    );
}
