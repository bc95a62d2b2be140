//! Random small elections for property testing, oracle comparison and
//! benchmarking. Bounds are drawn around each category's fair share so that
//! both feasible and infeasible instances come up regularly.

use rand::Rng;

use crate::model::{
    Bound, CandidateRecord, CategoryBound, CriterionSpec, ElectionConfig, RelaxationPolicy, TiePolicy, Votes,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomShape {
    pub min_candidates: usize,
    pub max_candidates: usize,
    pub max_criteria: usize,
    pub max_categories: usize,
    /// Votes are drawn from `0..=max_votes`; small values make ties common.
    pub max_votes: u64,
}

impl Default for RandomShape {
    fn default() -> Self {
        Self {
            min_candidates: 1,
            max_candidates: 18,
            max_criteria: 3,
            max_categories: 4,
            max_votes: 40,
        }
    }
}

fn random_bound<R: Rng + ?Sized>(rng: &mut R, seats: u32, categories: u32) -> Bound {
    let share = seats.div_ceil(categories);
    match rng.gen_range(0..6) {
        0..=2 => Bound::AtLeast(rng.gen_range(0..=share)),
        3 | 4 => Bound::AtMost(rng.gen_range(share.saturating_sub(1)..=seats)),
        _ => Bound::Exact(rng.gen_range(0..=share + 1)),
    }
}

/// A random valid election with mixed bound kinds. Exact bounds in one
/// criterion are kept consistent with the seat count so the config passes
/// validation.
pub fn random_election<R: Rng + ?Sized>(rng: &mut R, shape: &RandomShape) -> (ElectionConfig, Votes) {
    let m = rng.gen_range(shape.min_candidates..=shape.max_candidates);
    let seats = rng.gen_range(1..=m as u32);
    let n_criteria = rng.gen_range(0..=shape.max_criteria);

    let shapes: Vec<usize> = (0..n_criteria)
        .map(|_| rng.gen_range(2..=shape.max_categories.max(2)))
        .collect();
    let roster: Vec<CandidateRecord> = (0..m)
        .map(|i| {
            let attrs: Vec<(String, String)> = shapes
                .iter()
                .enumerate()
                .map(|(p, &n)| (format!("p{p}"), format!("v{}", rng.gen_range(0..n))))
                .collect();
            CandidateRecord::new(&format!("c{i:02}"), &format!("Candidate {i}"), attrs)
        })
        .collect();

    let mut ranks: Vec<u32> = (1..=n_criteria as u32).collect();
    for i in (1..ranks.len()).rev() {
        ranks.swap(i, rng.gen_range(0..=i));
    }

    let criteria = shapes
        .iter()
        .enumerate()
        .map(|(p, &n)| {
            let mut categories: Vec<CategoryBound> = (0..n)
                .map(|c| CategoryBound::new(&format!("v{c}"), random_bound(rng, seats, n as u32)))
                .collect();
            let all_exact = categories.iter().all(|c| matches!(c.bound, Bound::Exact(_)));
            let exact_sum: u32 = categories.iter().map(|c| c.bound.lower()).sum();
            if all_exact && exact_sum != seats {
                // Keep the config valid: the last category absorbs the difference.
                let rest = exact_sum - categories[n - 1].bound.lower();
                categories[n - 1].bound = match seats.checked_sub(rest) {
                    Some(v) => Bound::Exact(v),
                    None => Bound::AtMost(seats),
                };
            }
            let lower_sum: u32 = categories.iter().map(|c| c.bound.lower()).sum();
            if lower_sum > seats {
                for c in &mut categories {
                    c.bound = Bound::AtLeast(c.bound.lower().min(seats / n as u32));
                }
            }
            CriterionSpec::new(&format!("p{p}"), ranks[p], categories)
        })
        .collect();

    let votes = roster
        .iter()
        .map(|c| (c.candidate_id.clone(), rng.gen_range(0..=shape.max_votes)))
        .collect();
    let config = ElectionConfig {
        election_id: "random".into(),
        seats,
        max_selections: seats,
        roster,
        criteria,
        tie_policy: if rng.gen_bool(0.5) {
            TiePolicy::ReportAll
        } else {
            TiePolicy::Lexicographic
        },
        relaxation_policy: if rng.gen_bool(0.5) {
            RelaxationPolicy::Fail
        } else {
            RelaxationPolicy::FreeSeatsThenDrop
        },
    };
    (config, votes)
}
