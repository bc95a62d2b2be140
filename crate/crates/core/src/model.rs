//! Domain types shared by every stage of an election, and config validation.
//!
//! A config is a roster of candidates plus an ordered list of criteria. Each
//! criterion partitions the roster by one attribute (gender, age band,
//! region, ...) and attaches a seat-count bound to every category. Candidates
//! carry exactly one category per criterion attribute.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CandidateId = String;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub candidate_id: CandidateId,
    pub display_name: String,
    /// attribute name -> category name
    pub attributes: BTreeMap<String, String>,
}

impl CandidateRecord {
    pub fn new<I, A, C>(candidate_id: &str, display_name: &str, attributes: I) -> Self
    where
        I: IntoIterator<Item = (A, C)>,
        A: Into<String>,
        C: Into<String>,
    {
        Self {
            candidate_id: candidate_id.to_string(),
            display_name: display_name.to_string(),
            attributes: attributes.into_iter().map(|(a, c)| (a.into(), c.into())).collect(),
        }
    }

    pub fn category(&self, attribute: &str) -> Option<&str> {
        self.attributes.get(attribute).map(String::as_str)
    }
}

/// Seat-count bound on one category of a criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Bound {
    Exact(u32),
    AtLeast(u32),
    AtMost(u32),
}

impl Bound {
    pub fn lower(self) -> u32 {
        match self {
            Bound::Exact(n) | Bound::AtLeast(n) => n,
            Bound::AtMost(_) => 0,
        }
    }

    pub fn upper(self) -> Option<u32> {
        match self {
            Bound::Exact(n) | Bound::AtMost(n) => Some(n),
            Bound::AtLeast(_) => None,
        }
    }

    pub fn admits(self, count: u32) -> bool {
        match self {
            Bound::Exact(n) => count == n,
            Bound::AtLeast(n) => count >= n,
            Bound::AtMost(n) => count <= n,
        }
    }

    /// Same bound kind with the lower bound reduced to `n`. `AtMost` has no
    /// lower bound and is returned unchanged.
    pub fn with_lower(self, n: u32) -> Bound {
        match self {
            Bound::Exact(_) => Bound::Exact(n),
            Bound::AtLeast(_) => Bound::AtLeast(n),
            Bound::AtMost(m) => Bound::AtMost(m),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Exact(n) => write!(f, "={n}"),
            Bound::AtLeast(n) => write!(f, "≥{n}"),
            Bound::AtMost(n) => write!(f, "≤{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryBound {
    pub name: String,
    pub bound: Bound,
}

impl CategoryBound {
    pub fn new(name: &str, bound: Bound) -> Self {
        Self {
            name: name.to_string(),
            bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionSpec {
    pub attribute: String,
    pub categories: Vec<CategoryBound>,
    /// 1 is the most preferred criterion, relaxed last.
    pub preference_rank: u32,
}

impl CriterionSpec {
    pub fn new(attribute: &str, preference_rank: u32, categories: Vec<CategoryBound>) -> Self {
        Self {
            attribute: attribute.to_string(),
            categories,
            preference_rank,
        }
    }

    pub fn category(&self, name: &str) -> Option<&CategoryBound> {
        self.categories.iter().find(|c| c.name == name)
    }

    pub fn category_index(&self, name: &str) -> Option<usize> {
        self.categories.iter().position(|c| c.name == name)
    }

    pub fn lower_sum(&self) -> u64 {
        self.categories.iter().map(|c| c.bound.lower() as u64).sum()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TiePolicy {
    /// Surface every co-optimal committee (capped) and let organizers decide.
    #[default]
    ReportAll,
    /// Pick the smallest committee by sorted candidate id sequence.
    Lexicographic,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RelaxationPolicy {
    Fail,
    #[default]
    FreeSeatsThenDrop,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElectionConfig {
    pub election_id: String,
    pub seats: u32,
    pub max_selections: u32,
    pub roster: Vec<CandidateRecord>,
    #[serde(default)]
    pub criteria: Vec<CriterionSpec>,
    #[serde(default)]
    pub tie_policy: TiePolicy,
    #[serde(default)]
    pub relaxation_policy: RelaxationPolicy,
}

impl ElectionConfig {
    pub fn candidate(&self, id: &str) -> Option<&CandidateRecord> {
        self.roster.iter().find(|c| c.candidate_id == id)
    }

    pub fn criterion(&self, attribute: &str) -> Option<&CriterionSpec> {
        self.criteria.iter().find(|c| c.attribute == attribute)
    }

    pub fn candidate_ids(&self) -> BTreeSet<&str> {
        self.roster.iter().map(|c| c.candidate_id.as_str()).collect()
    }

    /// Number of roster candidates in `category` of `attribute`.
    pub fn supply(&self, attribute: &str, category: &str) -> u32 {
        self.roster
            .iter()
            .filter(|c| c.category(attribute) == Some(category))
            .count() as u32
    }

    /// The same election with every criterion removed (a plain top-k count).
    pub fn without_criteria(&self) -> ElectionConfig {
        ElectionConfig {
            criteria: Vec::new(),
            ..self.clone()
        }
    }

    pub fn base(&self) -> ElectionBase {
        ElectionBase {
            election_id: self.election_id.clone(),
            seats: self.seats,
            max_selections: self.max_selections,
            roster: self.roster.clone(),
            tie_policy: self.tie_policy,
            relaxation_policy: self.relaxation_policy,
        }
    }
}

/// An election config before the criteria vote has decided which criteria
/// apply.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElectionBase {
    pub election_id: String,
    pub seats: u32,
    pub max_selections: u32,
    pub roster: Vec<CandidateRecord>,
    #[serde(default)]
    pub tie_policy: TiePolicy,
    #[serde(default)]
    pub relaxation_policy: RelaxationPolicy,
}

impl ElectionBase {
    pub fn with_criteria(self, criteria: Vec<CriterionSpec>) -> ElectionConfig {
        ElectionConfig {
            election_id: self.election_id,
            seats: self.seats,
            max_selections: self.max_selections,
            roster: self.roster,
            criteria,
            tie_policy: self.tie_policy,
            relaxation_policy: self.relaxation_policy,
        }
    }
}

/// A phase-2 ballot: a set of approved candidates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ballot {
    pub ballot_id: String,
    pub selections: BTreeSet<CandidateId>,
    /// Hex SHA-256 receipt digest, when one was issued.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub receipt: Option<String>,
}

impl Ballot {
    pub fn new<I, S>(ballot_id: &str, selections: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            ballot_id: ballot_id.to_string(),
            selections: selections.into_iter().map(Into::into).collect(),
            receipt: None,
        }
    }
}

/// Per-candidate vote totals (`w_i`).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Votes(BTreeMap<CandidateId, u64>);

impl Votes {
    pub fn new() -> Self {
        Self::default()
    }

    /// Zero votes for every roster candidate.
    pub fn zeroed(config: &ElectionConfig) -> Self {
        Self(config.roster.iter().map(|c| (c.candidate_id.clone(), 0)).collect())
    }

    pub fn get(&self, id: &str) -> u64 {
        self.0.get(id).copied().unwrap_or(0)
    }

    pub fn set(&mut self, id: &str, votes: u64) {
        self.0.insert(id.to_string(), votes);
    }

    pub fn add(&mut self, id: &str, votes: u64) {
        *self.0.entry(id.to_string()).or_insert(0) += votes;
    }

    pub fn remove(&mut self, id: &str) -> Option<u64> {
        self.0.remove(id)
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Candidates ordered by votes descending, then id ascending.
    pub fn ranking(&self) -> Vec<(&str, u64)> {
        let mut ranked: Vec<_> = self.iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        ranked
    }

    pub fn sum_of<'a, I>(&self, ids: I) -> u64
    where
        I: IntoIterator<Item = &'a String>,
    {
        ids.into_iter().map(|id| self.get(id)).sum()
    }
}

impl FromIterator<(CandidateId, u64)> for Votes {
    fn from_iter<T: IntoIterator<Item = (CandidateId, u64)>>(iter: T) -> Self {
        Self(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub ballot_id: String,
    pub reason: InvalidReason,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum InvalidReason {
    TooManySelections,
    UnknownCandidate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TallyResult {
    pub votes: Votes,
    pub total_votes_cast: u64,
    pub ballots_counted: u64,
    pub ballots_rejected: Vec<Rejection>,
}

/// A percentage held as an integer count of tenths, rounded half-up.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Percent(u32);

impl Percent {
    pub fn from_tenths(tenths: u32) -> Self {
        Self(tenths)
    }

    /// `part / whole` as a percentage with one decimal, half-up. Zero when
    /// `whole` is zero.
    pub fn of(part: u64, whole: u64) -> Self {
        if whole == 0 {
            return Self(0);
        }
        let scaled = part as u128 * 2000 + whole as u128;
        Self((scaled / (2 * whole as u128)) as u32)
    }

    pub fn tenths(self) -> u32 {
        self.0
    }

    pub fn saturating_sub(self, other: Percent) -> Percent {
        Percent(self.0.saturating_sub(other.0))
    }
}

impl fmt::Display for Percent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}%", self.0 / 10, self.0 % 10)
    }
}

impl Serialize for Percent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.0 as f64 / 10.0)
    }
}

impl<'de> Deserialize<'de> for Percent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let value = f64::deserialize(d)?;
        if !(value.is_finite() && value >= 0.0) {
            return Err(serde::de::Error::custom("percentage must be non-negative"));
        }
        Ok(Percent((value * 10.0).round() as u32))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationCode {
    NoSeats,
    NoMaxSelections,
    DuplicateCandidateId,
    DuplicateCriterion,
    DuplicateCategory,
    DuplicatePreferenceRank,
    EmptyCriterion,
    ExactSumMismatch,
    LowerBoundSumExceedsK,
    UncategorizedCandidate,
    UnknownCategory,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
}

impl Violation {
    fn new(code: ViolationCode, message: String) -> Self {
        Self { code, message }
    }
}

/// Every invariant the config breaks. An empty list means the config is valid.
///
/// A roster smaller than the seat count is not a violation: it is reported
/// later as infeasibility.
pub fn validate_config(config: &ElectionConfig) -> Vec<Violation> {
    use ViolationCode::*;

    let mut out = Vec::new();
    let k = config.seats as u64;

    if config.seats == 0 {
        out.push(Violation::new(NoSeats, "seats must be positive".into()));
    }
    if config.max_selections == 0 {
        out.push(Violation::new(
            NoMaxSelections,
            "max_selections must be positive".into(),
        ));
    }

    let mut seen_ids = BTreeSet::new();
    for c in &config.roster {
        if !seen_ids.insert(c.candidate_id.as_str()) {
            out.push(Violation::new(
                DuplicateCandidateId,
                format!("candidate id `{}` appears more than once", c.candidate_id),
            ));
        }
    }

    let mut seen_attributes = BTreeSet::new();
    let mut seen_ranks = BTreeSet::new();
    for criterion in &config.criteria {
        let attr = &criterion.attribute;
        if !seen_attributes.insert(attr.as_str()) {
            out.push(Violation::new(
                DuplicateCriterion,
                format!("attribute `{attr}` has more than one criterion"),
            ));
        }
        if !seen_ranks.insert(criterion.preference_rank) {
            out.push(Violation::new(
                DuplicatePreferenceRank,
                format!(
                    "preference rank {} is used by more than one criterion",
                    criterion.preference_rank
                ),
            ));
        }
        if criterion.categories.is_empty() {
            out.push(Violation::new(
                EmptyCriterion,
                format!("criterion `{attr}` declares no categories"),
            ));
        }

        let mut seen_categories = BTreeSet::new();
        for category in &criterion.categories {
            if !seen_categories.insert(category.name.as_str()) {
                out.push(Violation::new(
                    DuplicateCategory,
                    format!("criterion `{attr}` declares `{}` twice", category.name),
                ));
            }
        }

        let lower = criterion.lower_sum();
        if lower > k {
            out.push(Violation::new(
                LowerBoundSumExceedsK,
                format!("criterion `{attr}` requires at least {lower} seats but only {k} exist"),
            ));
        }
        let all_exact =
            !criterion.categories.is_empty() && criterion.categories.iter().all(|c| matches!(c.bound, Bound::Exact(_)));
        if all_exact && lower != k {
            out.push(Violation::new(
                ExactSumMismatch,
                format!("criterion `{attr}` fixes {lower} seats exactly but there are {k}"),
            ));
        }

        for candidate in &config.roster {
            match candidate.category(attr) {
                None => out.push(Violation::new(
                    UncategorizedCandidate,
                    format!("candidate `{}` has no `{attr}` category", candidate.candidate_id),
                )),
                Some(cat) if criterion.category(cat).is_none() => out.push(Violation::new(
                    UnknownCategory,
                    format!(
                        "candidate `{}` has `{attr}` category `{cat}`, which the criterion does not declare",
                        candidate.candidate_id
                    ),
                )),
                Some(_) => {}
            }
        }
    }

    out
}

/// Validate and turn violations into an error.
pub fn ensure_valid(config: &ElectionConfig) -> Result<()> {
    let violations = validate_config(config);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(violations))
    }
}

/// Turn minimum population shares into `AtLeast` seat counts, rounding up so
/// the stated share is never undercut.
pub fn bounds_from_percentages(seats: u32, shares: &[(String, f64)]) -> Result<Vec<CategoryBound>> {
    // Slack for binary fractions such as 0.1 * 10 = 1.0000000000000002.
    const EPS: f64 = 1e-9;

    let mut sum = 0.0;
    for (category, fraction) in shares {
        if !(0.0..=1.0).contains(fraction) {
            return Err(Error::ShareOutOfRange {
                category: category.clone(),
                fraction: *fraction,
            });
        }
        sum += fraction;
    }
    if sum > 1.0 + EPS {
        return Err(Error::ShareSumExceedsOne { sum });
    }

    Ok(shares
        .iter()
        .map(|(category, fraction)| {
            let seats = (seats as f64 * fraction - EPS).ceil().max(0.0) as u32;
            CategoryBound::new(category, Bound::AtLeast(seats))
        })
        .collect())
}
