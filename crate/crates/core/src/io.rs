//! Published file formats: CSV for candidates, ballots, tallies and receipts;
//! JSON for configs, questions and outcomes.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::criteria_vote::{Answer, CriteriaBallot};
use crate::error::{Error, Result};
use crate::ledger::Receipt;
use crate::model::{Ballot, CandidateRecord, Votes};

const SELECTION_SEPARATOR: char = '|';

fn parse_error(context: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        context: context.to_string(),
        message: message.into(),
    }
}

fn expect_header(found: &csv::StringRecord, expected: &[&str], context: &str) -> Result<()> {
    let found: Vec<&str> = found.iter().collect();
    if found != expected {
        return Err(parse_error(
            context,
            format!("expected header `{}`, found `{}`", expected.join(","), found.join(",")),
        ));
    }
    Ok(())
}

/// `candidate_id,display_name,<attr1>,<attr2>,...`. Empty attribute cells
/// leave the attribute unset, which config validation reports.
pub fn read_candidates_csv<R: Read>(reader: R) -> Result<Vec<CandidateRecord>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.len() < 2 || &headers[0] != "candidate_id" || &headers[1] != "display_name" {
        return Err(parse_error(
            "candidates csv",
            "header must start with `candidate_id,display_name`",
        ));
    }
    let attributes: Vec<String> = headers.iter().skip(2).map(str::to_string).collect();

    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let mut record = CandidateRecord {
            candidate_id: row[0].to_string(),
            display_name: row[1].to_string(),
            attributes: BTreeMap::new(),
        };
        for (attr, value) in attributes.iter().zip(row.iter().skip(2)) {
            if !value.is_empty() {
                record.attributes.insert(attr.clone(), value.to_string());
            }
        }
        out.push(record);
    }
    Ok(out)
}

pub fn write_candidates_csv<W: Write>(writer: W, roster: &[CandidateRecord], attributes: &[&str]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec!["candidate_id", "display_name"];
    header.extend_from_slice(attributes);
    wtr.write_record(&header)?;
    for c in roster {
        let mut row = vec![c.candidate_id.as_str(), c.display_name.as_str()];
        row.extend(attributes.iter().map(|a| c.category(a).unwrap_or("")));
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct AnswerRow {
    ballot_id: String,
    question_id: String,
    answer: String,
}

/// `ballot_id,question_id,answer`, one row per answer. Ballots keep the order
/// of their first row.
pub fn read_criteria_ballots_csv<R: Read>(reader: R) -> Result<Vec<CriteriaBallot>> {
    let mut rdr = csv::Reader::from_reader(reader);
    expect_header(
        rdr.headers()?,
        &["ballot_id", "question_id", "answer"],
        "phase-1 ballots csv",
    )?;

    let mut order: Vec<String> = Vec::new();
    let mut answers: BTreeMap<String, BTreeMap<String, Answer>> = BTreeMap::new();
    for row in rdr.deserialize() {
        let row: AnswerRow = row?;
        let answer: Answer = row
            .answer
            .parse()
            .map_err(|e: String| parse_error(&format!("ballot `{}`", row.ballot_id), e))?;
        let ballot = answers.entry(row.ballot_id.clone()).or_insert_with(|| {
            order.push(row.ballot_id.clone());
            BTreeMap::new()
        });
        if ballot.insert(row.question_id.clone(), answer).is_some() {
            return Err(Error::DuplicateBallot {
                ballot_id: row.ballot_id,
                question_id: row.question_id,
            });
        }
    }
    Ok(order
        .into_iter()
        .map(|id| {
            let answers = answers.remove(&id).unwrap_or_default();
            CriteriaBallot { ballot_id: id, answers }
        })
        .collect())
}

pub fn write_criteria_ballots_csv<W: Write>(writer: W, ballots: &[CriteriaBallot]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["ballot_id", "question_id", "answer"])?;
    for ballot in ballots {
        for (question, answer) in &ballot.answers {
            wtr.write_record([ballot.ballot_id.as_str(), question, answer.as_str()])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct BallotRow {
    ballot_id: String,
    selections: String,
    receipt: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseWarning {
    pub ballot_id: String,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct BallotFile {
    pub ballots: Vec<Ballot>,
    /// Repeated candidate ids inside one ballot, removed on read.
    pub warnings: Vec<ParseWarning>,
}

/// `ballot_id,selections,receipt` with `|`-separated selections. This is the
/// public ledger format: it carries no voter-identifying column.
pub fn read_ballots_csv<R: Read>(reader: R) -> Result<BallotFile> {
    let mut rdr = csv::Reader::from_reader(reader);
    expect_header(rdr.headers()?, &["ballot_id", "selections", "receipt"], "ballots csv")?;

    let mut file = BallotFile::default();
    for row in rdr.deserialize() {
        let row: BallotRow = row?;
        let mut selections = BTreeSet::new();
        if !row.selections.is_empty() {
            for id in row.selections.split(SELECTION_SEPARATOR) {
                if !selections.insert(id.to_string()) {
                    file.warnings.push(ParseWarning {
                        ballot_id: row.ballot_id.clone(),
                        message: format!("candidate `{id}` selected more than once; counted once"),
                    });
                }
            }
        }
        file.ballots.push(Ballot {
            ballot_id: row.ballot_id,
            selections,
            receipt: (!row.receipt.is_empty()).then_some(row.receipt),
        });
    }
    Ok(file)
}

pub fn join_selections(selections: &BTreeSet<String>) -> String {
    selections
        .iter()
        .map(String::as_str)
        .collect::<Vec<_>>()
        .join(&SELECTION_SEPARATOR.to_string())
}

pub fn write_ballots_csv<W: Write>(writer: W, ballots: &[Ballot]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for ballot in ballots {
        wtr.serialize(BallotRow {
            ballot_id: ballot.ballot_id.clone(),
            selections: join_selections(&ballot.selections),
            receipt: ballot.receipt.clone().unwrap_or_default(),
        })?;
    }
    if ballots.is_empty() {
        wtr.write_record(["ballot_id", "selections", "receipt"])?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct TallyRow {
    candidate_id: String,
    votes: u64,
}

pub fn read_tally_csv<R: Read>(reader: R) -> Result<Votes> {
    let mut rdr = csv::Reader::from_reader(reader);
    expect_header(rdr.headers()?, &["candidate_id", "votes"], "tally csv")?;
    let mut votes = Votes::new();
    for row in rdr.deserialize() {
        let row: TallyRow = row?;
        if votes.iter().any(|(id, _)| id == row.candidate_id) {
            return Err(parse_error(
                "tally csv",
                format!("candidate `{}` listed twice", row.candidate_id),
            ));
        }
        votes.set(&row.candidate_id, row.votes);
    }
    Ok(votes)
}

/// Sorted by votes descending, then candidate id ascending.
pub fn write_tally_csv<W: Write>(writer: W, votes: &Votes) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["candidate_id", "votes"])?;
    for (id, n) in votes.ranking() {
        wtr.write_record([id, &n.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// `ballot_id,salt,digest`: the voter's private copy.
pub fn read_receipts_csv<R: Read>(reader: R) -> Result<Vec<Receipt>> {
    let mut rdr = csv::Reader::from_reader(reader);
    expect_header(rdr.headers()?, &["ballot_id", "salt", "digest"], "receipts csv")?;
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

pub fn write_receipts_csv<W: Write>(writer: W, receipts: &[Receipt]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    if receipts.is_empty() {
        wtr.write_record(["ballot_id", "salt", "digest"])?;
    }
    for r in receipts {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    fs::write(path, to_json(value)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn candidates_round_trip() {
        let text = "candidate_id,display_name,gender,age\nA,Candidate A,Male,31-65\nB,Candidate B,Female,\n";
        let roster = read_candidates_csv(text.as_bytes()).unwrap();
        assert_eq!(roster.len(), 2);
        assert_eq!(roster[0].category("age"), Some("31-65"));
        assert_eq!(roster[1].category("age"), None);
        let mut out = Vec::new();
        write_candidates_csv(&mut out, &roster, &["gender", "age"]).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), text);
    }

    #[test]
    fn ballots_dedupe_with_warning() {
        let text = "ballot_id,selections,receipt\nb1,A|B|A,\nb2,,\n";
        let file = read_ballots_csv(text.as_bytes()).unwrap();
        assert_eq!(file.ballots[0].selections.len(), 2);
        assert!(file.ballots[1].selections.is_empty());
        assert_eq!(file.warnings.len(), 1);
        assert_eq!(file.warnings[0].ballot_id, "b1");
    }

    #[test]
    fn wrong_header_is_rejected() {
        let text = "ballot_id,voter_email,selections,receipt\n";
        assert!(matches!(read_ballots_csv(text.as_bytes()), Err(Error::Parse { .. })));
    }

    #[test]
    fn duplicate_phase1_answer_is_rejected() {
        let text = "ballot_id,question_id,answer\nv1,gender,YES\nv1,gender,NO\n";
        assert!(matches!(
            read_criteria_ballots_csv(text.as_bytes()),
            Err(Error::DuplicateBallot { .. })
        ));
        let bad = "ballot_id,question_id,answer\nv1,gender,MAYBE\n";
        assert!(read_criteria_ballots_csv(bad.as_bytes()).is_err());
    }

    #[test]
    fn tally_is_sorted_on_write() {
        let votes: Votes = [("b", 3), ("a", 3), ("c", 9)]
            .iter()
            .map(|(id, n)| (id.to_string(), *n))
            .collect();
        let mut out = Vec::new();
        write_tally_csv(&mut out, &votes).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "candidate_id,votes\nc,9\na,3\nb,3\n");
    }

    proptest! {
        #[test]
        fn ballots_survive_a_write_read_cycle(
            raw in proptest::collection::vec(
                (proptest::collection::btree_set("[A-Z]{1,2}", 0..6), proptest::option::of("[0-9a-f]{64}")),
                0..20,
            )
        ) {
            let ballots: Vec<Ballot> = raw
                .into_iter()
                .enumerate()
                .map(|(i, (selections, receipt))| Ballot {
                    ballot_id: format!("b{i}"),
                    selections,
                    receipt,
                })
                .collect();
            let mut out = Vec::new();
            write_ballots_csv(&mut out, &ballots).unwrap();
            let back = read_ballots_csv(out.as_slice()).unwrap();
            prop_assert_eq!(back.ballots, ballots);
            prop_assert!(back.warnings.is_empty());
        }
    }
}
