//! Ballot receipts and independent recount verification.
//!
//! Each voter gets a private receipt `(ballot_id, salt, digest)` where the
//! digest is SHA-256 over the canonical ballot text followed by the salt. The
//! public ledger carries ballots and digests but never salts, so low-entropy
//! ballots cannot be recovered by hashing guesses.

use std::collections::BTreeSet;
use std::fmt;

use rand::RngCore;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::io::join_selections;
use crate::model::{Ballot, ElectionConfig};
use crate::solver::{solve_with, SolveOutcome, SolveStatus, SolverOptions};
use crate::tally::count_votes;

pub const SALT_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Salt([u8; SALT_LEN]);

impl Salt {
    pub fn new(bytes: [u8; SALT_LEN]) -> Self {
        Self(bytes)
    }

    pub fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        let mut bytes = [0u8; SALT_LEN];
        rng.fill_bytes(&mut bytes);
        Self(bytes)
    }

    pub fn from_hex(text: &str) -> Result<Self> {
        let bytes = hex::decode(text).map_err(|e| Error::Parse {
            context: "salt".into(),
            message: e.to_string(),
        })?;
        let bytes: [u8; SALT_LEN] = bytes.try_into().map_err(|_| Error::Parse {
            context: "salt".into(),
            message: format!("expected {SALT_LEN} bytes"),
        })?;
        Ok(Self(bytes))
    }

    pub fn to_hex(self) -> String {
        hex::encode(self.0)
    }
}

impl fmt::Display for Salt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Receipt {
    pub ballot_id: String,
    /// Hex-encoded 16-byte salt.
    pub salt: String,
    /// Hex-encoded SHA-256 digest.
    pub digest: String,
}

/// `ballot_id\n` + sorted selections joined by `|` + `\n` + salt hex.
pub fn canonical_ballot(ballot_id: &str, selections: &BTreeSet<String>, salt: &Salt) -> String {
    format!("{ballot_id}\n{}\n{}", join_selections(selections), salt.to_hex())
}

pub fn ballot_digest(ballot: &Ballot, salt: &Salt) -> String {
    let canonical = canonical_ballot(&ballot.ballot_id, &ballot.selections, salt);
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

pub fn make_receipt(ballot: &Ballot, salt: &Salt) -> Receipt {
    Receipt {
        ballot_id: ballot.ballot_id.clone(),
        salt: salt.to_hex(),
        digest: ballot_digest(ballot, salt),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ReceiptCheck {
    Match,
    NoMatch,
}

/// `Match` iff some published ballot hashes to the receipt digest under the
/// receipt salt and, when the ledger shows a digest for it, shows that one.
pub fn verify_receipt(receipt: &Receipt, published: &[Ballot]) -> ReceiptCheck {
    let Ok(salt) = Salt::from_hex(&receipt.salt) else {
        return ReceiptCheck::NoMatch;
    };
    let digest = receipt.digest.to_ascii_lowercase();
    let shown_as_issued = |b: &Ballot| b.receipt.as_ref().is_none_or(|r| r.eq_ignore_ascii_case(&digest));
    if published
        .iter()
        .any(|b| shown_as_issued(b) && ballot_digest(b, &salt) == digest)
    {
        ReceiptCheck::Match
    } else {
        ReceiptCheck::NoMatch
    }
}

/// Append-only ballot ledger. One writer appends; the published view can be
/// read at any time.
#[derive(Debug, Default)]
pub struct Ledger {
    ballots: Vec<Ballot>,
    ids: BTreeSet<String>,
}

impl Ledger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record a ballot and return the voter's receipt. The stored ballot
    /// carries the digest; the salt lives only in the receipt.
    pub fn append(&mut self, mut ballot: Ballot, salt: &Salt) -> Result<Receipt> {
        if self.ids.contains(&ballot.ballot_id) {
            return Err(Error::Parse {
                context: "ledger".into(),
                message: format!("ballot `{}` already recorded", ballot.ballot_id),
            });
        }
        let receipt = make_receipt(&ballot, salt);
        ballot.receipt = Some(receipt.digest.clone());
        self.ids.insert(ballot.ballot_id.clone());
        self.ballots.push(ballot);
        Ok(receipt)
    }

    pub fn published(&self) -> &[Ballot] {
        &self.ballots
    }

    pub fn len(&self) -> usize {
        self.ballots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ballots.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Discrepancy {
    Votes {
        candidate_id: String,
        published: u64,
        recounted: u64,
    },
    Status {
        published: SolveStatus,
        recounted: SolveStatus,
    },
    Objective {
        published: u64,
        recounted: u64,
    },
    /// Published as elected but absent from the recount committee.
    NotElected {
        candidate_id: String,
    },
    /// Elected in the recount but missing from the published committee.
    MissingFromPublished {
        candidate_id: String,
    },
    /// The recount itself failed.
    Recount {
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CountCheck {
    Confirmed,
    Mismatch { discrepancies: Vec<Discrepancy> },
}

impl CountCheck {
    pub fn is_confirmed(&self) -> bool {
        matches!(self, CountCheck::Confirmed)
    }
}

/// Re-tally the published ballots, re-solve, and compare with the published
/// outcome: per-candidate votes, status, objective and committee.
pub fn verify_count(
    published: &[Ballot],
    config: &ElectionConfig,
    outcome: &SolveOutcome,
    options: &SolverOptions,
) -> CountCheck {
    let tally = count_votes(published, config);
    let mut discrepancies = Vec::new();

    let ids: BTreeSet<&str> = tally
        .votes
        .iter()
        .map(|(id, _)| id)
        .chain(outcome.votes.iter().map(|(id, _)| id))
        .collect();
    for id in ids {
        let (published, recounted) = (outcome.votes.get(id), tally.votes.get(id));
        if published != recounted {
            discrepancies.push(Discrepancy::Votes {
                candidate_id: id.to_string(),
                published,
                recounted,
            });
        }
    }

    match solve_with(&tally.votes, config, options) {
        Err(e) => discrepancies.push(Discrepancy::Recount { message: e.to_string() }),
        Ok(recount) => {
            if recount.status != outcome.status {
                discrepancies.push(Discrepancy::Status {
                    published: outcome.status,
                    recounted: recount.status,
                });
            }
            if recount.objective != outcome.objective {
                discrepancies.push(Discrepancy::Objective {
                    published: outcome.objective,
                    recounted: recount.objective,
                });
            }
            for id in outcome.committee.difference(&recount.committee) {
                discrepancies.push(Discrepancy::NotElected {
                    candidate_id: id.clone(),
                });
            }
            for id in recount.committee.difference(&outcome.committee) {
                discrepancies.push(Discrepancy::MissingFromPublished {
                    candidate_id: id.clone(),
                });
            }
        }
    }

    if discrepancies.is_empty() {
        CountCheck::Confirmed
    } else {
        CountCheck::Mismatch { discrepancies }
    }
}
