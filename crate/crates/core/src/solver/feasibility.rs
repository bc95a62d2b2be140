//! Exact feasibility of the committee constraints.
//!
//! Candidates that share a category in every criterion are interchangeable
//! for feasibility purposes, so the search runs over candidate *types* and
//! chooses how many members of each type to seat. That keeps the search
//! small even for large rosters, and makes "exclude this candidate" probes a
//! one-unit change to a type's supply.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::model::{CandidateRecord, ElectionConfig};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Deficit {
    /// Fewer usable candidates than seats.
    RosterTooSmall { roster: u32, seats: u32 },
    /// A category has fewer candidates than its lower bound.
    CategoryShortfall {
        criterion: String,
        category: String,
        supply: u32,
        required: u32,
        difference: i64,
    },
    /// The lower bounds of one criterion add up to more than the seats.
    PartitionOverDemand {
        criterion: String,
        required: u64,
        seats: u32,
    },
    /// Upper bounds and supplies of one criterion cannot fill every seat.
    PartitionUnderCapacity {
        criterion: String,
        capacity: u64,
        seats: u32,
    },
    /// Every criterion is satisfiable alone but not together.
    JointlyUnsatisfiable { criteria: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Feasibility {
    Feasible,
    Infeasible { deficits: Vec<Deficit> },
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible)
    }

    pub fn deficits(&self) -> &[Deficit] {
        match self {
            Feasibility::Feasible => &[],
            Feasibility::Infeasible { deficits } => deficits,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct TypeModel {
    seats: u32,
    lower: Vec<Vec<u32>>,
    upper: Vec<Vec<u32>>,
    /// Category index per criterion, one entry per type.
    pub types: Vec<Vec<usize>>,
    pub supply: Vec<u32>,
    /// Roster ids grouped by type.
    pub members: Vec<Vec<String>>,
}

impl TypeModel {
    /// Group `pool` by category signature under the criteria of `config`.
    /// Candidates without a declared category for some criterion cannot be
    /// seated and are left out.
    pub fn new(pool: &[CandidateRecord], config: &ElectionConfig) -> Self {
        let seats = config.seats;
        let lower = config
            .criteria
            .iter()
            .map(|c| c.categories.iter().map(|cb| cb.bound.lower()).collect())
            .collect();
        let upper = config
            .criteria
            .iter()
            .map(|c| {
                c.categories
                    .iter()
                    .map(|cb| cb.bound.upper().unwrap_or(seats).min(seats))
                    .collect()
            })
            .collect();

        let mut grouped: BTreeMap<Vec<usize>, Vec<String>> = BTreeMap::new();
        'pool: for candidate in pool {
            let mut signature = Vec::with_capacity(config.criteria.len());
            for criterion in &config.criteria {
                match candidate
                    .category(&criterion.attribute)
                    .and_then(|cat| criterion.category_index(cat))
                {
                    Some(i) => signature.push(i),
                    None => continue 'pool,
                }
            }
            grouped
                .entry(signature)
                .or_default()
                .push(candidate.candidate_id.clone());
        }

        let mut types = Vec::with_capacity(grouped.len());
        let mut supply = Vec::with_capacity(grouped.len());
        let mut members = Vec::with_capacity(grouped.len());
        for (signature, ids) in grouped {
            types.push(signature);
            supply.push(ids.len() as u32);
            members.push(ids);
        }

        Self {
            seats,
            lower,
            upper,
            types,
            supply,
            members,
        }
    }

    pub fn usable(&self) -> u32 {
        self.supply.iter().sum()
    }

    /// Candidates per category of criterion `p`.
    pub fn category_supply(&self, p: usize) -> Vec<u32> {
        let mut out = vec![0; self.lower[p].len()];
        for (t, sig) in self.types.iter().enumerate() {
            out[sig[p]] += self.supply[t];
        }
        out
    }

    pub fn lower(&self, p: usize, c: usize) -> u32 {
        self.lower[p][c]
    }

    pub fn feasible(&self) -> bool {
        self.feasible_with(&self.supply)
    }

    /// Whether some committee exists when type `t` has `supply[t]` members.
    pub fn feasible_with(&self, supply: &[u32]) -> bool {
        let parts = self.lower.len();
        let total: u32 = supply.iter().sum();
        if total < self.seats {
            return false;
        }
        if parts == 0 {
            return true;
        }

        // suffix[t][p][c]: members of category c (criterion p) among types t..
        let n = self.types.len();
        let mut suffix = vec![self.lower.iter().map(|l| vec![0u32; l.len()]).collect::<Vec<_>>(); n + 1];
        for t in (0..n).rev() {
            suffix[t] = suffix[t + 1].clone();
            for p in 0..parts {
                suffix[t][p][self.types[t][p]] += supply[t];
            }
        }

        let mut search = TypeSearch {
            model: self,
            supply,
            suffix: &suffix,
            counts: self.lower.iter().map(|l| vec![0; l.len()]).collect(),
            failed: HashSet::new(),
        };
        search.visit(0, self.seats)
    }
}

struct TypeSearch<'a> {
    model: &'a TypeModel,
    supply: &'a [u32],
    suffix: &'a [Vec<Vec<u32>>],
    counts: Vec<Vec<u32>>,
    failed: HashSet<(usize, Vec<Vec<u32>>)>,
}

impl TypeSearch<'_> {
    fn promising(&self, t: usize, left: u32) -> bool {
        for (p, counts) in self.counts.iter().enumerate() {
            let mut need_total = 0u32;
            let mut room_total = 0u32;
            for (c, &count) in counts.iter().enumerate() {
                let need = self.model.lower[p][c].saturating_sub(count);
                let rem = self.suffix[t][p][c];
                if need > rem {
                    return false;
                }
                need_total += need;
                room_total += (self.model.upper[p][c] - count).min(rem);
            }
            if need_total > left || room_total < left {
                return false;
            }
        }
        true
    }

    fn visit(&mut self, t: usize, left: u32) -> bool {
        if !self.promising(t, left) {
            return false;
        }
        if left == 0 {
            return true;
        }
        if t == self.model.types.len() {
            return false;
        }
        let key = (t, self.counts.clone());
        if self.failed.contains(&key) {
            return false;
        }

        let sig = &self.model.types[t];
        let mut most = self.supply[t].min(left);
        for (p, &c) in sig.iter().enumerate() {
            most = most.min(self.model.upper[p][c] - self.counts[p][c]);
        }
        for take in (0..=most).rev() {
            for (p, &c) in sig.iter().enumerate() {
                self.counts[p][c] += take;
            }
            let ok = self.visit(t + 1, left - take);
            for (p, &c) in sig.iter().enumerate() {
                self.counts[p][c] -= take;
            }
            if ok {
                return true;
            }
        }
        self.failed.insert(key);
        false
    }
}

/// Whether some size-`seats` committee drawn from `pool` satisfies every
/// criterion of `config`, and if not, why.
pub fn check_feasibility(pool: &[CandidateRecord], config: &ElectionConfig) -> Feasibility {
    let model = TypeModel::new(pool, config);
    let seats = config.seats;
    let mut deficits = Vec::new();

    let usable = model.usable();
    if usable < seats {
        deficits.push(Deficit::RosterTooSmall { roster: usable, seats });
    }

    for (p, criterion) in config.criteria.iter().enumerate() {
        let supply = model.category_supply(p);
        let mut required = 0u64;
        let mut capacity = 0u64;
        for (c, category) in criterion.categories.iter().enumerate() {
            let lower = category.bound.lower();
            let upper = category.bound.upper().unwrap_or(seats).min(seats);
            if supply[c] < lower {
                deficits.push(Deficit::CategoryShortfall {
                    criterion: criterion.attribute.clone(),
                    category: category.name.clone(),
                    supply: supply[c],
                    required: lower,
                    difference: supply[c] as i64 - lower as i64,
                });
            }
            required += lower as u64;
            capacity += upper.min(supply[c]) as u64;
        }
        if required > seats as u64 {
            deficits.push(Deficit::PartitionOverDemand {
                criterion: criterion.attribute.clone(),
                required,
                seats,
            });
        }
        if capacity < seats as u64 && usable >= seats {
            deficits.push(Deficit::PartitionUnderCapacity {
                criterion: criterion.attribute.clone(),
                capacity,
                seats,
            });
        }
    }

    if deficits.is_empty() {
        if model.feasible() {
            return Feasibility::Feasible;
        }
        deficits.push(Deficit::JointlyUnsatisfiable {
            criteria: config.criteria.iter().map(|c| c.attribute.clone()).collect(),
        });
    }
    Feasibility::Infeasible { deficits }
}
