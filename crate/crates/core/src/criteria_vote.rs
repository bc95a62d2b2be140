//! Phase 1: the yes/no/blank vote deciding which criteria bind the election.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CriterionSpec, ElectionBase, ElectionConfig, Percent};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriteriaQuestion {
    pub question_id: String,
    pub criterion: CriterionSpec,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Answer {
    Yes,
    No,
    Blank,
}

impl std::str::FromStr for Answer {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "YES" => Ok(Answer::Yes),
            "NO" => Ok(Answer::No),
            "BLANK" => Ok(Answer::Blank),
            other => Err(format!("answer must be YES, NO or BLANK, got `{other}`")),
        }
    }
}

impl Answer {
    pub fn as_str(self) -> &'static str {
        match self {
            Answer::Yes => "YES",
            Answer::No => "NO",
            Answer::Blank => "BLANK",
        }
    }
}

/// One participant's answers, keyed by question id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriteriaBallot {
    pub ballot_id: String,
    pub answers: BTreeMap<String, Answer>,
}

impl CriteriaBallot {
    pub fn new<I, Q>(ballot_id: &str, answers: I) -> Self
    where
        I: IntoIterator<Item = (Q, Answer)>,
        Q: Into<String>,
    {
        Self {
            ballot_id: ballot_id.to_string(),
            answers: answers.into_iter().map(|(q, a)| (q.into(), a)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionResult {
    pub question_id: String,
    pub criterion: CriterionSpec,
    pub yes_count: u64,
    pub no_count: u64,
    pub blank_count: u64,
    pub yes_pct: Percent,
    pub no_pct: Percent,
    pub blank_pct: Percent,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriteriaVoteResult {
    pub participants: u64,
    pub questions: Vec<QuestionResult>,
}

impl CriteriaVoteResult {
    pub fn question(&self, question_id: &str) -> Option<&QuestionResult> {
        self.questions.iter().find(|q| q.question_id == question_id)
    }
}

/// Count every question. A criterion is accepted on a strict majority of
/// non-blank answers; blanks count toward turnout and percentages only.
pub fn tally_criteria_vote(questions: &[CriteriaQuestion], ballots: &[CriteriaBallot]) -> Result<CriteriaVoteResult> {
    let mut index = BTreeMap::new();
    for (i, q) in questions.iter().enumerate() {
        if index.insert(q.question_id.as_str(), i).is_some() {
            return Err(Error::DuplicateQuestionId(q.question_id.clone()));
        }
    }

    let mut counts = vec![[0u64; 3]; questions.len()];
    let mut seen_ballots = BTreeSet::new();
    for ballot in ballots {
        if !seen_ballots.insert(ballot.ballot_id.as_str()) {
            return Err(Error::DuplicateBallot {
                ballot_id: ballot.ballot_id.clone(),
                question_id: ballot.answers.keys().next().cloned().unwrap_or_default(),
            });
        }
        for question_id in ballot.answers.keys() {
            if !index.contains_key(question_id.as_str()) {
                return Err(Error::UnknownQuestionId(question_id.clone()));
            }
        }
        for (i, q) in questions.iter().enumerate() {
            let answer = ballot.answers.get(&q.question_id).ok_or_else(|| Error::MissingAnswer {
                ballot_id: ballot.ballot_id.clone(),
                question_id: q.question_id.clone(),
            })?;
            let slot = match answer {
                Answer::Yes => 0,
                Answer::No => 1,
                Answer::Blank => 2,
            };
            counts[i][slot] += 1;
        }
    }

    let participants = ballots.len() as u64;
    let questions = questions
        .iter()
        .zip(counts)
        .map(|(q, [yes, no, blank])| QuestionResult {
            question_id: q.question_id.clone(),
            criterion: q.criterion.clone(),
            yes_count: yes,
            no_count: no,
            blank_count: blank,
            yes_pct: Percent::of(yes, participants),
            no_pct: Percent::of(no, participants),
            blank_pct: Percent::of(blank, participants),
            accepted: yes > no,
        })
        .collect();

    Ok(CriteriaVoteResult {
        participants,
        questions,
    })
}

/// The phase-2 config: the base election plus every accepted criterion.
pub fn build_election_config(base: ElectionBase, result: &CriteriaVoteResult) -> ElectionConfig {
    let criteria = result
        .questions
        .iter()
        .filter(|q| q.accepted)
        .map(|q| q.criterion.clone())
        .collect();
    base.with_criteria(criteria)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Bound, CategoryBound};

    fn question(id: &str, rank: u32) -> CriteriaQuestion {
        CriteriaQuestion {
            question_id: id.to_string(),
            criterion: CriterionSpec::new(id, rank, vec![CategoryBound::new("x", Bound::AtLeast(1))]),
            text: format!("Apply the {id} criterion?"),
        }
    }

    fn ballots(answers: &[Answer]) -> Vec<CriteriaBallot> {
        answers
            .iter()
            .enumerate()
            .map(|(i, a)| CriteriaBallot::new(&format!("v{i}"), [("q", *a)]))
            .collect()
    }

    #[test]
    fn all_blank_is_rejected() {
        let result = tally_criteria_vote(&[question("q", 1)], &ballots(&[Answer::Blank; 5])).unwrap();
        let q = &result.questions[0];
        assert_eq!((q.yes_count, q.no_count, q.blank_count), (0, 0, 5));
        assert!(!q.accepted);
    }

    #[test]
    fn tie_is_rejected() {
        let answers = [Answer::Yes, Answer::No, Answer::Blank, Answer::Yes, Answer::No];
        let result = tally_criteria_vote(&[question("q", 1)], &ballots(&answers)).unwrap();
        assert!(!result.questions[0].accepted);
    }

    #[test]
    fn blanks_do_not_block_a_majority() {
        let answers = [Answer::Yes, Answer::Blank, Answer::Blank, Answer::Blank];
        let result = tally_criteria_vote(&[question("q", 1)], &ballots(&answers)).unwrap();
        assert!(result.questions[0].accepted);
        assert_eq!(result.questions[0].blank_pct.tenths(), 750);
    }

    #[test]
    fn unknown_question_is_an_error() {
        let ballot = CriteriaBallot::new("v0", [("q", Answer::Yes), ("nope", Answer::No)]);
        let err = tally_criteria_vote(&[question("q", 1)], &[ballot]).unwrap_err();
        assert!(matches!(err, Error::UnknownQuestionId(id) if id == "nope"));
    }

    #[test]
    fn duplicate_voter_is_an_error() {
        let b = CriteriaBallot::new("v0", [("q", Answer::Yes)]);
        let err = tally_criteria_vote(&[question("q", 1)], &[b.clone(), b]).unwrap_err();
        assert!(matches!(err, Error::DuplicateBallot { .. }));
    }

    #[test]
    fn missing_answer_is_an_error() {
        let qs = [question("q", 1), question("r", 2)];
        let b = CriteriaBallot::new("v0", [("q", Answer::Yes)]);
        let err = tally_criteria_vote(&qs, &[b]).unwrap_err();
        assert!(matches!(err, Error::MissingAnswer { question_id, .. } if question_id == "r"));
    }

    #[test]
    fn config_keeps_only_accepted_criteria() {
        let qs = [question("gender", 1), question("age", 2)];
        let ballots = vec![
            CriteriaBallot::new("v0", [("gender", Answer::Yes), ("age", Answer::No)]),
            CriteriaBallot::new("v1", [("gender", Answer::Yes), ("age", Answer::Yes)]),
            CriteriaBallot::new("v2", [("gender", Answer::No), ("age", Answer::No)]),
        ];
        let result = tally_criteria_vote(&qs, &ballots).unwrap();
        let base = ElectionBase {
            election_id: "e".into(),
            seats: 1,
            max_selections: 1,
            roster: vec![],
            tie_policy: Default::default(),
            relaxation_policy: Default::default(),
        };
        let config = build_election_config(base.clone(), &result);
        assert_eq!(config.criteria.len(), 1);
        assert_eq!(config.criteria[0].attribute, "gender");
        assert_eq!(config.criteria[0].preference_rank, 1);

        let none = CriteriaVoteResult {
            participants: 0,
            questions: vec![],
        };
        assert!(build_election_config(base, &none).criteria.is_empty());
    }
}
