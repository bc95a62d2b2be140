//! Export the committee problem as a CPLEX LP file so any external ILP
//! solver can cross-check an outcome, and read its answer back.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::check::{committee_breaches, Breach};
use crate::model::{Bound, ElectionConfig, Votes};
use crate::solver::SolveOutcome;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpModel {
    pub text: String,
    /// Variable name to candidate id.
    pub variables: BTreeMap<String, String>,
}

impl LpModel {
    pub fn variable_of(&self, candidate_id: &str) -> Option<&str> {
        self.variables
            .iter()
            .find(|(_, id)| id.as_str() == candidate_id)
            .map(|(v, _)| v.as_str())
    }
}

fn sanitize(raw: &str) -> String {
    raw.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect()
}

fn unique(base: String, taken: &mut BTreeSet<String>) -> String {
    let mut name = base.clone();
    let mut n = 1;
    while !taken.insert(name.clone()) {
        n += 1;
        name = format!("{base}_{n}");
    }
    name
}

/// One binary `x_<id>` per candidate, the seat equation and one row per
/// category bound. Exact bounds become equalities.
pub fn to_lp(votes: &Votes, config: &ElectionConfig) -> LpModel {
    let mut taken = BTreeSet::new();
    let vars: Vec<(String, &str)> = config
        .roster
        .iter()
        .map(|c| {
            (
                unique(format!("x_{}", sanitize(&c.candidate_id)), &mut taken),
                c.candidate_id.as_str(),
            )
        })
        .collect();

    let sum = |members: &[&String]| -> String {
        match (members.is_empty(), vars.first()) {
            (false, _) => members.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(" + "),
            (true, Some((first, _))) => format!("0 {first}"),
            (true, None) => "0 x".to_string(),
        }
    };

    let mut text = String::new();
    let _ = writeln!(text, "\\ election {}", config.election_id);
    let _ = writeln!(text, "Maximize");
    let objective = vars
        .iter()
        .map(|(v, id)| format!("{} {v}", votes.get(id)))
        .collect::<Vec<_>>()
        .join(" + ");
    let _ = writeln!(
        text,
        " votes: {}",
        if objective.is_empty() { "0 x".into() } else { objective }
    );
    let _ = writeln!(text, "Subject To");
    let all: Vec<&String> = vars.iter().map(|(v, _)| v).collect();
    let _ = writeln!(text, " seats: {} = {}", sum(&all), config.seats);

    let mut row_names = BTreeSet::new();
    for criterion in &config.criteria {
        for category in &criterion.categories {
            let members: Vec<&String> = vars
                .iter()
                .filter(|(_, id)| {
                    config.candidate(id).and_then(|c| c.category(&criterion.attribute)) == Some(category.name.as_str())
                })
                .map(|(v, _)| v)
                .collect();
            let name = unique(
                format!("c_{}_{}", sanitize(&criterion.attribute), sanitize(&category.name)),
                &mut row_names,
            );
            let (op, n) = match category.bound {
                Bound::Exact(n) => ("=", n),
                Bound::AtLeast(n) => (">=", n),
                Bound::AtMost(n) => ("<=", n),
            };
            let _ = writeln!(text, " {name}: {} {op} {n}", sum(&members));
        }
    }

    let _ = writeln!(text, "Binary");
    for (v, _) in &vars {
        let _ = writeln!(text, " {v}");
    }
    let _ = writeln!(text, "End");

    LpModel {
        text,
        variables: vars.into_iter().map(|(v, id)| (v, id.to_string())).collect(),
    }
}

/// Read a solver's solution listing. Any line whose first known variable
/// token is followed by a number counts; values above one half select.
pub fn parse_assignment(model: &LpModel, solution: &str) -> BTreeSet<String> {
    let mut selected = BTreeSet::new();
    for line in solution.lines() {
        let tokens: Vec<&str> = line
            .split(|c: char| c.is_whitespace() || c == '=' || c == ':')
            .filter(|t| !t.is_empty())
            .collect();
        let Some(pos) = tokens.iter().position(|t| model.variables.contains_key(*t)) else {
            continue;
        };
        let value = tokens[pos + 1..].iter().find_map(|t| t.parse::<f64>().ok());
        if value.is_some_and(|v| v > 0.5) {
            selected.insert(model.variables[tokens[pos]].clone());
        }
    }
    selected
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub agrees: bool,
    pub external_objective: u64,
    pub breaches: Vec<Breach>,
}

/// Compare an externally solved committee with our outcome: it must be
/// feasible and reach the same objective. Ties may pick different members.
pub fn cross_check(
    external: &BTreeSet<String>,
    votes: &Votes,
    config: &ElectionConfig,
    outcome: &SolveOutcome,
) -> CrossCheck {
    let breaches = committee_breaches(external.iter().map(String::as_str), config);
    let external_objective = votes.sum_of(external.iter());
    CrossCheck {
        agrees: breaches.is_empty() && external_objective == outcome.objective,
        external_objective,
        breaches,
    }
}
