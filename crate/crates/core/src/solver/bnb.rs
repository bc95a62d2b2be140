//! Depth-first branch-and-bound over candidates in descending vote order.
//!
//! Each node decides one candidate, include-branch first. The bound at a node
//! is the current vote total plus the best completion under a single
//! criterion, minimised over criteria. Each single-criterion completion is an
//! exact optimum of a relaxation (drop every other criterion), so the bound
//! never underestimates and pruning is safe.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

use super::instance::Instance;

pub(crate) struct SearchResult {
    pub objective: Option<u64>,
    /// Co-optimal committees as sorted id lists, smallest first, capped.
    pub committees: Vec<Vec<String>>,
    /// Number of co-optimal committees found, including those past the cap.
    pub total: u64,
    pub nodes: u64,
}

struct Search<'a> {
    inst: &'a Instance,
    budget: u64,
    cap: usize,
    counts: Vec<Vec<u32>>,
    remaining: Vec<Vec<u32>>,
    chosen: Vec<usize>,
    current: u64,
    best: Option<u64>,
    found: BTreeSet<Vec<String>>,
    total: u64,
    nodes: u64,
    scratch: Vec<u32>,
}

/// Find the optimal objective and up to `cap` co-optimal committees.
/// Nodes whose bound equals the incumbent are still explored so that every
/// tie is seen.
pub(crate) fn search(inst: &Instance, cap: usize, budget: u64) -> Result<SearchResult> {
    let remaining = inst
        .parts
        .iter()
        .map(|p| {
            let mut counts = vec![0u32; p.lower.len()];
            for &c in &p.of {
                counts[c] += 1;
            }
            counts
        })
        .collect();
    let mut s = Search {
        inst,
        budget,
        cap: cap.max(1),
        counts: inst.parts.iter().map(|p| vec![0; p.lower.len()]).collect(),
        remaining,
        chosen: Vec::with_capacity(inst.seats),
        current: 0,
        best: None,
        found: BTreeSet::new(),
        total: 0,
        nodes: 0,
        scratch: Vec::new(),
    };
    s.visit(0)?;
    Ok(SearchResult {
        objective: s.best,
        committees: s.found.into_iter().collect(),
        total: s.total,
        nodes: s.nodes,
    })
}

impl Search<'_> {
    fn visit(&mut self, depth: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::NodeBudgetExceeded { budget: self.budget });
        }

        let left = self.inst.seats - self.chosen.len();
        let Some(bound) = self.bound(depth, left) else {
            return Ok(());
        };
        if left == 0 {
            self.record();
            return Ok(());
        }
        if self.best.is_some_and(|best| bound < best) {
            return Ok(());
        }

        let i = depth;
        for (p, part) in self.inst.parts.iter().enumerate() {
            self.remaining[p][part.of[i]] -= 1;
        }

        let fits = self
            .inst
            .parts
            .iter()
            .enumerate()
            .all(|(p, part)| self.counts[p][part.of[i]] < part.upper[part.of[i]]);
        let mut outcome = Ok(());
        if fits {
            for (p, part) in self.inst.parts.iter().enumerate() {
                self.counts[p][part.of[i]] += 1;
            }
            self.chosen.push(i);
            self.current += self.inst.votes[i];
            outcome = self.visit(depth + 1);
            self.current -= self.inst.votes[i];
            self.chosen.pop();
            for (p, part) in self.inst.parts.iter().enumerate() {
                self.counts[p][part.of[i]] -= 1;
            }
        }
        if outcome.is_ok() {
            outcome = self.visit(depth + 1);
        }

        for (p, part) in self.inst.parts.iter().enumerate() {
            self.remaining[p][part.of[i]] += 1;
        }
        outcome
    }

    /// Upper bound on any completion of the current node, or `None` when some
    /// criterion can no longer be met.
    fn bound(&mut self, depth: usize, left: usize) -> Option<u64> {
        let inst = self.inst;
        if inst.len() - depth < left {
            return None;
        }
        if inst.parts.is_empty() {
            let rest: u64 = inst.votes[depth..depth + left].iter().sum();
            return Some(self.current + rest);
        }

        let mut tightest = u64::MAX;
        for (p, part) in inst.parts.iter().enumerate() {
            let counts = &self.counts[p];
            let remaining = &self.remaining[p];
            let mut need_total = 0usize;
            let mut room_total = 0usize;
            for c in 0..counts.len() {
                let need = part.lower[c].saturating_sub(counts[c]);
                if need > remaining[c] {
                    return None;
                }
                need_total += need as usize;
                room_total += (part.upper[c] - counts[c]).min(remaining[c]) as usize;
            }
            if need_total > left || room_total < left {
                return None;
            }

            // Greedy completion: the top `need` members of each category are
            // mandatory, the leftover seats go to the best remaining
            // candidates whose category still has room.
            let taken = &mut self.scratch;
            taken.clear();
            taken.resize(counts.len(), 0);
            let mut free = left - need_total;
            let mut picked = 0;
            let mut sum = 0u64;
            for j in depth..inst.len() {
                if picked == left {
                    break;
                }
                let c = part.of[j];
                let need = part.lower[c].saturating_sub(counts[c]);
                let room = part.upper[c] - counts[c];
                if taken[c] < need {
                    taken[c] += 1;
                } else if free > 0 && taken[c] < room {
                    taken[c] += 1;
                    free -= 1;
                } else {
                    continue;
                }
                picked += 1;
                sum += inst.votes[j];
            }
            tightest = tightest.min(sum);
        }
        Some(self.current + tightest)
    }

    fn record(&mut self) {
        let objective = self.current;
        match self.best {
            Some(best) if objective < best => return,
            Some(best) if objective == best => {}
            _ => {
                self.best = Some(objective);
                self.found.clear();
                self.total = 0;
            }
        }
        self.total += 1;
        let mut ids: Vec<String> = self.chosen.iter().map(|&i| self.inst.ids[i].clone()).collect();
        ids.sort();
        self.found.insert(ids);
        if self.found.len() > self.cap {
            self.found.pop_last();
        }
    }
}
