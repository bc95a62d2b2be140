use crate::error::{Error, Result};
use crate::model::{ElectionConfig, Votes};

/// One criterion compiled to category indices.
#[derive(Debug, Clone)]
pub(crate) struct Partition {
    pub lower: Vec<u32>,
    /// Upper bounds, capped at the seat count.
    pub upper: Vec<u32>,
    /// Category index of each candidate, in instance order.
    pub of: Vec<usize>,
}

/// Candidates sorted by votes descending, then id ascending, with every
/// criterion compiled to index form.
#[derive(Debug, Clone)]
pub(crate) struct Instance {
    pub ids: Vec<String>,
    pub votes: Vec<u64>,
    pub seats: usize,
    pub parts: Vec<Partition>,
}

impl Instance {
    pub fn build(votes: &Votes, config: &ElectionConfig) -> Result<Self> {
        let roster = config.candidate_ids();
        if let Some((unknown, _)) = votes.iter().find(|(id, _)| !roster.contains(id)) {
            return Err(Error::UnknownCandidate(unknown.to_string()));
        }

        let mut order: Vec<usize> = (0..config.roster.len()).collect();
        order.sort_by(|&a, &b| {
            let (ca, cb) = (&config.roster[a], &config.roster[b]);
            votes
                .get(&cb.candidate_id)
                .cmp(&votes.get(&ca.candidate_id))
                .then_with(|| ca.candidate_id.cmp(&cb.candidate_id))
        });

        let seats = config.seats;
        let mut parts = Vec::with_capacity(config.criteria.len());
        for criterion in &config.criteria {
            let mut of = Vec::with_capacity(order.len());
            for &i in &order {
                let record = &config.roster[i];
                let index = record
                    .category(&criterion.attribute)
                    .and_then(|cat| criterion.category_index(cat))
                    .ok_or_else(|| Error::Parse {
                        context: format!("candidate `{}`", record.candidate_id),
                        message: format!("no declared `{}` category", criterion.attribute),
                    })?;
                of.push(index);
            }
            parts.push(Partition {
                lower: criterion.categories.iter().map(|c| c.bound.lower()).collect(),
                upper: criterion
                    .categories
                    .iter()
                    .map(|c| c.bound.upper().unwrap_or(seats).min(seats))
                    .collect(),
                of,
            });
        }

        Ok(Self {
            ids: order.iter().map(|&i| config.roster[i].candidate_id.clone()).collect(),
            votes: order
                .iter()
                .map(|&i| votes.get(&config.roster[i].candidate_id))
                .collect(),
            seats: seats as usize,
            parts,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }
}
