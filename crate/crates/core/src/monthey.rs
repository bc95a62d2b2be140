//! The Monthey election: 28 candidates for 17 seats under gender, age and
//! region criteria, with 1931 approvals cast on 331 ballots.
//!
//! Candidate attributes and vote totals are the published results. Individual
//! ballots were never published, so [`phase1_ballots`] and
//! [`phase2_ballots`] synthesize deterministic ballot sets that reproduce the
//! published totals exactly. [`write_fixtures`] writes the whole dataset in
//! the on-disk formats the CLI reads.

use std::fs::File;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::criteria_vote::{build_election_config, tally_criteria_vote, Answer, CriteriaBallot, CriteriaQuestion};
use crate::error::Result;
use crate::explain::build_report;
use crate::io;
use crate::ledger::{Ledger, Receipt, Salt};
use crate::model::{Ballot, Bound, CandidateRecord, CategoryBound, CriterionSpec, ElectionBase, ElectionConfig, Votes};
use crate::solver::{solve, SolverOptions};

pub const ELECTION_ID: &str = "monthey";
pub const SEATS: u32 = 17;
pub const BALLOTS: usize = 331;
pub const PARTICIPANTS: usize = 347;
/// Seed used for the committed fixtures.
pub const FIXTURE_SEED: u64 = 2020;

pub const GENDER: &str = "gender";
pub const AGE: &str = "age";
pub const REGION: &str = "region";

/// `(id, gender, age band, region, votes)`. The last two rows are the two
/// lowest-ranked candidates, left out of the published ranking table and
/// recovered from the published category supplies and vote total.
pub const CANDIDATES: [(&str, &str, &str, &str, u64); 28] = [
    ("A", "Male", "31-65", "Region 1", 166),
    ("B", "Female", "31-65", "Region 1", 128),
    ("C", "Female", "31-65", "Region 2", 121),
    ("D", "Male", "18-30", "Region 1", 114),
    ("E", "Female", "31-65", "Region 1", 111),
    ("F", "Female", "18-30", "Region 3", 92),
    ("G", "Female", "31-65", "Region 2", 90),
    ("H", "Male", "31-65", "Region 4", 89),
    ("I", "Male", "+65", "Region 4", 75),
    ("J", "Female", "31-65", "Region 1", 73),
    ("K", "Female", "18-30", "Region 2", 73),
    ("L", "Female", "18-30", "Region 2", 70),
    ("M", "Male", "+65", "Region 1", 70),
    ("N", "Male", "31-65", "Region 1", 64),
    ("O", "Male", "31-65", "Region 1", 58),
    ("P", "Female", "18-30", "Region 1", 57),
    ("Q", "Female", "31-65", "Region 2", 56),
    ("R", "Male", "18-30", "Region 1", 56),
    ("S", "Male", "31-65", "Region 3", 49),
    ("T", "Male", "+65", "Region 1", 47),
    ("U", "Male", "31-65", "Region 1", 45),
    ("V", "Male", "31-65", "Region 1", 45),
    ("W", "Female", "31-65", "Region 3", 45),
    ("X", "Male", "18-30", "Region 3", 42),
    ("Y", "Female", "18-30", "Region 2", 29),
    ("Z", "Male", "+65", "Region 1", 27),
    ("AA", "Male", "31-65", "Region 2", 20),
    ("AB", "Male", "31-65", "Region 4", 19),
];

/// Candidates shown in the published ranking table.
pub const RANKED: usize = 26;

/// Phase-1 `(question id, yes, no, blank)` counts over 347 participants.
pub const PHASE1_COUNTS: [(&str, u64, u64, u64); 3] =
    [(GENDER, 260, 68, 19), (AGE, 267, 61, 19), (REGION, 243, 75, 29)];

pub fn candidates() -> Vec<CandidateRecord> {
    CANDIDATES
        .iter()
        .map(|(id, gender, age, region, _)| {
            CandidateRecord::new(
                id,
                &format!("Candidate {id}"),
                [(GENDER, *gender), (AGE, *age), (REGION, *region)],
            )
        })
        .collect()
}

pub fn votes() -> Votes {
    CANDIDATES.iter().map(|c| (c.0.to_string(), c.4)).collect()
}

fn criterion(attribute: &str, rank: u32, bounds: &[(&str, Bound)]) -> CriterionSpec {
    CriterionSpec::new(
        attribute,
        rank,
        bounds.iter().map(|(name, b)| CategoryBound::new(name, *b)).collect(),
    )
}

/// Criteria in rank order: gender is the most preferred, region the least.
pub fn criteria() -> Vec<CriterionSpec> {
    vec![
        criterion(GENDER, 1, &[("Male", Bound::Exact(8)), ("Female", Bound::Exact(9))]),
        criterion(
            AGE,
            2,
            &[
                ("18-30", Bound::AtLeast(4)),
                ("31-65", Bound::AtLeast(7)),
                ("+65", Bound::AtLeast(4)),
            ],
        ),
        criterion(
            REGION,
            3,
            &[
                ("Region 1", Bound::AtLeast(5)),
                ("Region 2", Bound::AtLeast(4)),
                ("Region 3", Bound::AtLeast(3)),
                ("Region 4", Bound::AtLeast(2)),
            ],
        ),
    ]
}

pub fn questions() -> Vec<CriteriaQuestion> {
    let texts = [
        "Should the committee have 8 men and 9 women?",
        "Should the committee have at least 4 members aged 18-30, 7 aged 31-65 and 4 over 65?",
        "Should the committee have at least 5, 4, 3 and 2 members from regions 1 to 4?",
    ];
    criteria()
        .into_iter()
        .zip(texts)
        .map(|(criterion, text)| CriteriaQuestion {
            question_id: criterion.attribute.clone(),
            criterion,
            text: text.to_string(),
        })
        .collect()
}

pub fn base() -> ElectionBase {
    ElectionBase {
        election_id: ELECTION_ID.to_string(),
        seats: SEATS,
        max_selections: SEATS,
        roster: candidates(),
        tie_policy: Default::default(),
        relaxation_policy: Default::default(),
    }
}

/// The phase-2 config: every criterion was accepted in phase 1.
pub fn config() -> ElectionConfig {
    base().with_criteria(criteria())
}

/// [`config`] restricted to the 26 ranked candidates. Same optimum, but the
/// category supplies and vote total no longer match the published ones.
pub fn ranked_only_config() -> ElectionConfig {
    let mut config = config();
    config.roster.truncate(RANKED);
    config
}

pub fn ranked_only_votes() -> Votes {
    CANDIDATES[..RANKED].iter().map(|c| (c.0.to_string(), c.4)).collect()
}

/// 347 criteria ballots reproducing [`PHASE1_COUNTS`].
pub fn phase1_ballots(seed: u64) -> Vec<CriteriaBallot> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut columns = Vec::new();
    for (question, yes, no, blank) in PHASE1_COUNTS {
        let mut answers: Vec<Answer> = [(Answer::Yes, yes), (Answer::No, no), (Answer::Blank, blank)]
            .iter()
            .flat_map(|(a, n)| std::iter::repeat_n(*a, *n as usize))
            .collect();
        answers.shuffle(&mut rng);
        columns.push((question, answers));
    }
    (0..PARTICIPANTS)
        .map(|i| {
            CriteriaBallot::new(
                &format!("P{:04}", i + 1),
                columns.iter().map(|(q, answers)| (*q, answers[i])),
            )
        })
        .collect()
}

/// 331 approval ballots, each with 1 to 17 selections, whose tally equals
/// [`votes`] exactly.
pub fn phase2_ballots(seed: u64) -> Vec<Ballot> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total: u64 = CANDIDATES.iter().map(|c| c.4).sum();

    let mut sizes = vec![1usize; BALLOTS];
    for _ in 0..(total as usize - BALLOTS) {
        loop {
            let i = rng.gen_range(0..BALLOTS);
            if sizes[i] < SEATS as usize {
                sizes[i] += 1;
                break;
            }
        }
    }

    // Each candidate goes to the ballots with the most room left; this greedy
    // realizes any feasible row/column degree pair.
    let mut selections: Vec<Vec<&str>> = vec![Vec::new(); BALLOTS];
    let mut order: Vec<usize> = (0..BALLOTS).collect();
    for (id, _, _, _, v) in CANDIDATES {
        order.shuffle(&mut rng);
        order.sort_by_key(|&i| std::cmp::Reverse(sizes[i] - selections[i].len()));
        for &i in order.iter().take(v as usize) {
            assert!(selections[i].len() < sizes[i], "ballot synthesis ran out of room");
            selections[i].push(id);
        }
    }

    selections
        .into_iter()
        .enumerate()
        .map(|(i, s)| Ballot::new(&format!("B{:04}", i + 1), s))
        .collect()
}

/// Ballots as published (with digests) and the matching voter receipts.
pub fn ledger(seed: u64) -> Result<(Vec<Ballot>, Vec<Receipt>)> {
    let mut salt_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a17);
    let mut ledger = Ledger::new();
    let mut receipts = Vec::new();
    for ballot in phase2_ballots(seed) {
        receipts.push(ledger.append(ballot, &Salt::random(&mut salt_rng))?);
    }
    Ok((ledger.published().to_vec(), receipts))
}

/// Write the full dataset into `dir`:
/// candidates, questions, both ballot sets, receipts, base and phase-2
/// configs, tally, outcome and report.
pub fn write_fixtures(dir: &Path, seed: u64) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    io::write_candidates_csv(
        File::create(dir.join("candidates.csv"))?,
        &candidates(),
        &[GENDER, AGE, REGION],
    )?;
    io::write_json(dir.join("questions.json"), &questions())?;
    let phase1 = phase1_ballots(seed);
    io::write_criteria_ballots_csv(File::create(dir.join("phase1_ballots.csv"))?, &phase1)?;
    io::write_json(dir.join("base.json"), &base())?;

    let criteria_result = tally_criteria_vote(&questions(), &phase1)?;
    let config = build_election_config(base(), &criteria_result);
    io::write_json(dir.join("config.json"), &config)?;

    let (published, receipts) = ledger(seed)?;
    io::write_ballots_csv(File::create(dir.join("ballots.csv"))?, &published)?;
    io::write_receipts_csv(File::create(dir.join("receipts.csv"))?, &receipts)?;

    let tally = crate::tally::count_votes(&published, &config);
    io::write_tally_csv(File::create(dir.join("tally.csv"))?, &tally.votes)?;
    let outcome = solve(&tally.votes, &config)?;
    io::write_json(dir.join("outcome.json"), &outcome)?;
    let report = build_report(&outcome, &tally.votes, &config, &SolverOptions::default())?;
    io::write_json(dir.join("report.json"), &report)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_supplies() {
        let cfg = config();
        let supply = |a: &str, c: &str| cfg.supply(a, c);
        let regions: Vec<u32> = (1..=4).map(|i| supply(REGION, &format!("Region {i}"))).collect();
        assert_eq!(regions, vec![14, 7, 4, 3]);
        assert_eq!((supply(GENDER, "Male"), supply(GENDER, "Female")), (16, 12));
        assert_eq!(
            (supply(AGE, "18-30"), supply(AGE, "31-65"), supply(AGE, "+65")),
            (8, 16, 4)
        );
        assert_eq!(votes().total(), 1931);
    }

    #[test]
    fn synthesized_ballots_reproduce_totals() {
        let cfg = config();
        for seed in [FIXTURE_SEED, 1, 99] {
            let ballots = phase2_ballots(seed);
            assert_eq!(ballots.len(), BALLOTS);
            assert!(ballots
                .iter()
                .all(|b| (1..=SEATS as usize).contains(&b.selections.len())));
            let tally = crate::tally::count_votes(&ballots, &cfg);
            assert!(tally.ballots_rejected.is_empty());
            assert_eq!(tally.votes, votes());
        }
    }

    #[test]
    fn synthesized_criteria_ballots_reproduce_counts() {
        let result = tally_criteria_vote(&questions(), &phase1_ballots(FIXTURE_SEED)).unwrap();
        assert_eq!(result.participants, PARTICIPANTS as u64);
        for (q, (id, yes, no, blank)) in result.questions.iter().zip(PHASE1_COUNTS) {
            assert_eq!(q.question_id, id);
            assert_eq!((q.yes_count, q.no_count, q.blank_count), (yes, no, blank));
            assert!(q.accepted);
        }
    }
}
