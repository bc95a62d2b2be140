//! Layman-facing explanations of an outcome: how a (partial) committee stands
//! against each criterion, what the criteria cost in votes, and which
//! candidates were seated ahead of higher-voted ones and why.
//!
//! The displacement narrative is a heuristic. It follows the "top candidates,
//! then protected candidates, then fill the remaining deficits" reading of a
//! result and can fail to explain some selections; the solver's optimum is
//! the only authoritative answer.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Bound, ElectionConfig, Percent, Votes};
use crate::solver::{effective_config, solve_with, SolveOutcome, SolveStatus, SolverOptions};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeficitRow {
    pub criterion: String,
    pub category: String,
    pub target: Bound,
    pub reached: u32,
    /// `reached - target` for lower and exact bounds; `target - reached` for
    /// upper bounds, so a negative value always means "short".
    pub difference: i64,
    pub met: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeficitReport {
    pub rows: Vec<DeficitRow>,
    pub unmet: Vec<DeficitRow>,
}

impl DeficitReport {
    pub fn row(&self, category: &str) -> Option<&DeficitRow> {
        self.rows.iter().find(|r| r.category == category)
    }
}

/// Category counts of `partial` against every criterion target.
pub fn deficit_report<'a, I>(partial: I, config: &ElectionConfig) -> Result<DeficitReport>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut members = Vec::new();
    for id in partial {
        let record = config
            .candidate(id)
            .ok_or_else(|| Error::UnknownCandidate(id.to_string()))?;
        members.push(record);
    }

    let mut rows = Vec::new();
    for criterion in &config.criteria {
        for category in &criterion.categories {
            let reached = members
                .iter()
                .filter(|c| c.category(&criterion.attribute) == Some(category.name.as_str()))
                .count() as u32;
            let difference = match category.bound {
                Bound::Exact(n) | Bound::AtLeast(n) => reached as i64 - n as i64,
                Bound::AtMost(n) => n as i64 - reached as i64,
            };
            rows.push(DeficitRow {
                criterion: criterion.attribute.clone(),
                category: category.name.clone(),
                target: category.bound,
                reached,
                difference,
                met: category.bound.admits(reached),
            });
        }
    }
    let unmet = rows.iter().filter(|r| !r.met).cloned().collect();
    Ok(DeficitReport { rows, unmet })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PriceReport {
    pub total_votes_cast: u64,
    pub unconstrained_objective: u64,
    pub constrained_objective: u64,
    pub price: u64,
    /// Difference of the two lost-vote shares as printed, so the three
    /// percentages in a report always add up.
    pub price_pct: Percent,
    pub lost_votes_unconstrained: u64,
    pub lost_pct_unconstrained: Percent,
    pub lost_votes_constrained: u64,
    pub lost_pct_constrained: Percent,
}

/// What the criteria cost: the best unconstrained total minus the best
/// constrained total, in votes and as a share of votes cast.
pub fn price_report(votes: &Votes, config: &ElectionConfig, options: &SolverOptions) -> Result<PriceReport> {
    let constrained = solve_with(votes, config, options)?;
    price_from_outcome(votes, config, &constrained, options)
}

/// [`price_report`] for an outcome that is already solved.
pub fn price_from_outcome(
    votes: &Votes,
    config: &ElectionConfig,
    constrained: &SolveOutcome,
    options: &SolverOptions,
) -> Result<PriceReport> {
    if constrained.status == SolveStatus::Infeasible {
        return Err(Error::Infeasible(constrained.deficits.clone()));
    }
    let unconstrained = solve_with(votes, &config.without_criteria(), options)?;
    if unconstrained.status == SolveStatus::Infeasible {
        return Err(Error::Infeasible(unconstrained.deficits));
    }

    let total = votes.total();
    let lost_u = total - unconstrained.objective;
    let lost_c = total - constrained.objective;
    let pct_u = Percent::of(lost_u, total);
    let pct_c = Percent::of(lost_c, total);
    Ok(PriceReport {
        total_votes_cast: total,
        unconstrained_objective: unconstrained.objective,
        constrained_objective: constrained.objective,
        price: unconstrained.objective - constrained.objective,
        price_pct: pct_c.saturating_sub(pct_u),
        lost_votes_unconstrained: lost_u,
        lost_pct_unconstrained: pct_u,
        lost_votes_constrained: lost_c,
        lost_pct_constrained: pct_c,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SelectionReason {
    /// Guaranteed a seat: a category they belong to has no spare candidates.
    Protected,
    /// Seated to close a deficit left by the top and protected candidates.
    FillsDeficit,
    /// The heuristic has no simple account of this selection.
    Unexplained,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryRef {
    pub criterion: String,
    pub category: String,
    pub difference: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisplacementRecord {
    pub candidate_id: String,
    pub votes: u64,
    /// Unelected candidates with more votes.
    pub outranked: Vec<String>,
    pub reason: SelectionReason,
    pub categories: Vec<CategoryRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisplacementReport {
    /// Always true: this narrative does not certify optimality.
    pub heuristic: bool,
    /// Longest run of top-voted candidates that were all elected.
    pub top_candidates: Vec<String>,
    pub protected: Vec<String>,
    /// Top candidates only.
    pub top_deficits: DeficitReport,
    /// Top candidates plus protected candidates.
    pub partial_deficits: DeficitReport,
    pub records: Vec<DisplacementRecord>,
}

/// Explain every elected candidate who is outside every unconstrained top-k.
/// Infeasible outcomes produce an empty report.
pub fn displacement_report(
    outcome: &SolveOutcome,
    votes: &Votes,
    config: &ElectionConfig,
) -> Result<DisplacementReport> {
    let config = effective_config(config, outcome)?;
    let empty = DeficitReport {
        rows: Vec::new(),
        unmet: Vec::new(),
    };
    if outcome.status == SolveStatus::Infeasible {
        return Ok(DisplacementReport {
            heuristic: true,
            top_candidates: Vec::new(),
            protected: Vec::new(),
            top_deficits: empty.clone(),
            partial_deficits: empty,
            records: Vec::new(),
        });
    }

    let mut ranking: Vec<(&str, u64)> = config
        .roster
        .iter()
        .map(|c| (c.candidate_id.as_str(), votes.get(&c.candidate_id)))
        .collect();
    ranking.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let k = config.seats as usize;
    let cutoff = ranking.get(k.saturating_sub(1)).map_or(0, |(_, v)| *v);

    let elected = |id: &str| outcome.committee.contains(id);
    let top: Vec<&str> = ranking
        .iter()
        .take_while(|(id, _)| elected(id))
        .map(|(id, _)| *id)
        .collect();
    let mut partial: BTreeSet<&str> = top.iter().copied().collect();
    partial.extend(outcome.forced.iter().map(String::as_str));

    let top_deficits = deficit_report(top.iter().copied(), &config)?;
    let partial_deficits = deficit_report(partial.iter().copied(), &config)?;

    let mut records = Vec::new();
    for &(id, v) in &ranking {
        if !elected(id) || v >= cutoff {
            continue;
        }
        let record = config.candidate(id).expect("ranking is built from the roster");
        let outranked = ranking
            .iter()
            .filter(|(other, w)| *w > v && !elected(other))
            .map(|(other, _)| other.to_string())
            .collect();

        let own_rows = |report: &DeficitReport| -> Vec<CategoryRef> {
            report
                .rows
                .iter()
                .filter(|r| record.category(&r.criterion) == Some(r.category.as_str()))
                .filter(|r| r.difference < 0)
                .map(|r| CategoryRef {
                    criterion: r.criterion.clone(),
                    category: r.category.clone(),
                    difference: r.difference,
                })
                .collect()
        };

        let (reason, categories) = if outcome.forced.contains(id) {
            let scarce = own_rows(&top_deficits)
                .into_iter()
                .filter(|r| {
                    let lower = config
                        .criterion(&r.criterion)
                        .and_then(|c| c.category(&r.category))
                        .map_or(0, |c| c.bound.lower());
                    config.supply(&r.criterion, &r.category) <= lower
                })
                .collect();
            (SelectionReason::Protected, scarce)
        } else {
            let short = own_rows(&partial_deficits);
            if short.is_empty() {
                (SelectionReason::Unexplained, short)
            } else {
                (SelectionReason::FillsDeficit, short)
            }
        };

        records.push(DisplacementRecord {
            candidate_id: id.to_string(),
            votes: v,
            outranked,
            reason,
            categories,
        });
    }

    Ok(DisplacementReport {
        heuristic: true,
        top_candidates: top.iter().map(|s| s.to_string()).collect(),
        protected: outcome.forced.iter().cloned().collect(),
        top_deficits,
        partial_deficits,
        records,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultRow {
    pub candidate_id: String,
    pub display_name: String,
    /// One category per criterion, in `ElectionReport::attributes` order.
    pub categories: Vec<String>,
    pub votes: u64,
    pub elected: bool,
    pub protected: bool,
}

/// Everything published about one election's result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElectionReport {
    pub election_id: String,
    pub seats: u32,
    pub attributes: Vec<String>,
    /// Roster sorted by votes descending, then id.
    pub results: Vec<ResultRow>,
    pub outcome: SolveOutcome,
    pub committee_deficits: Option<DeficitReport>,
    pub price: Option<PriceReport>,
    pub displacement: Option<DisplacementReport>,
}

pub fn build_report(
    outcome: &SolveOutcome,
    votes: &Votes,
    config: &ElectionConfig,
    options: &SolverOptions,
) -> Result<ElectionReport> {
    let effective = effective_config(config, outcome)?;
    let attributes: Vec<String> = config.criteria.iter().map(|c| c.attribute.clone()).collect();

    let mut results: Vec<ResultRow> = config
        .roster
        .iter()
        .map(|c| ResultRow {
            candidate_id: c.candidate_id.clone(),
            display_name: c.display_name.clone(),
            categories: attributes
                .iter()
                .map(|a| c.category(a).unwrap_or("").to_string())
                .collect(),
            votes: votes.get(&c.candidate_id),
            elected: outcome.committee.contains(&c.candidate_id),
            protected: outcome.forced.contains(&c.candidate_id),
        })
        .collect();
    results.sort_by(|a, b| b.votes.cmp(&a.votes).then_with(|| a.candidate_id.cmp(&b.candidate_id)));

    let solved = outcome.is_solved();
    let committee_deficits = if solved {
        Some(deficit_report(
            outcome.committee.iter().map(String::as_str),
            &effective,
        )?)
    } else {
        None
    };
    let price = if solved {
        Some(price_from_outcome(votes, config, outcome, options)?)
    } else {
        None
    };
    let displacement = if solved {
        Some(displacement_report(outcome, votes, config)?)
    } else {
        None
    };

    Ok(ElectionReport {
        election_id: config.election_id.clone(),
        seats: config.seats,
        attributes,
        results,
        outcome: outcome.clone(),
        committee_deficits,
        price,
        displacement,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
    Markdown,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(ReportFormat::Text),
            "json" => Ok(ReportFormat::Json),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(format!("unknown report format `{other}`")),
        }
    }
}

pub fn render_report(report: &ElectionReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => crate::io::to_json(report),
        ReportFormat::Text => Ok(render_text(report)),
        ReportFormat::Markdown => Ok(render_markdown(report)),
    }
}

fn status_label(status: SolveStatus) -> &'static str {
    match status {
        SolveStatus::Optimal => "OPTIMAL",
        SolveStatus::Infeasible => "INFEASIBLE",
        SolveStatus::RelaxedOptimal => "RELAXED_OPTIMAL",
    }
}

fn signed(n: i64) -> String {
    if n > 0 {
        format!("+{n}")
    } else {
        n.to_string()
    }
}

fn result_cells(report: &ElectionReport) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header = vec!["Candidate".to_string()];
    header.extend(report.attributes.iter().cloned());
    header.extend(["Votes".to_string(), "Elected".to_string(), "Protected".to_string()]);
    let rows = report
        .results
        .iter()
        .map(|r| {
            let mut row = vec![r.display_name.clone()];
            row.extend(r.categories.iter().cloned());
            row.push(r.votes.to_string());
            row.push(if r.elected { "Yes" } else { "" }.to_string());
            row.push(if r.protected { "Yes" } else { "" }.to_string());
            row
        })
        .collect();
    (header, rows)
}

fn deficit_cells(report: &DeficitReport) -> (Vec<String>, Vec<Vec<String>>) {
    let header = ["Criterion", "Category", "Target", "Reached", "Difference"]
        .map(String::from)
        .to_vec();
    let rows = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.criterion.clone(),
                r.category.clone(),
                r.target.to_string(),
                r.reached.to_string(),
                signed(r.difference),
            ]
        })
        .collect();
    (header, rows)
}

fn text_table(out: &mut String, header: &[String], rows: &[Vec<String>]) {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let _ = writeln!(out, "{}", line(header));
    let _ = writeln!(
        out,
        "{}",
        widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  ")
    );
    for row in rows {
        let _ = writeln!(out, "{}", line(row));
    }
}

fn markdown_table(out: &mut String, header: &[String], rows: &[Vec<String>]) {
    let _ = writeln!(out, "| {} |", header.join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(header.len()));
    for row in rows {
        let _ = writeln!(out, "| {} |", row.join(" | "));
    }
}

fn describe_record(r: &DisplacementRecord) -> String {
    let categories = r
        .categories
        .iter()
        .map(|c| format!("{} ({})", c.category, signed(c.difference)))
        .collect::<Vec<_>>()
        .join(", ");
    let why = match r.reason {
        SelectionReason::Protected => format!("protected by {categories}"),
        SelectionReason::FillsDeficit => format!("fills deficit in {categories}"),
        SelectionReason::Unexplained => "no simple explanation".to_string(),
    };
    format!(
        "{} ({} votes): {}; seated ahead of {}",
        r.candidate_id,
        r.votes,
        why,
        if r.outranked.is_empty() {
            "nobody".to_string()
        } else {
            r.outranked.join(", ")
        }
    )
}

fn render_text(report: &ElectionReport) -> String {
    let mut out = String::new();
    let o = &report.outcome;
    let _ = writeln!(out, "Election {}: {} seats", report.election_id, report.seats);
    let _ = writeln!(
        out,
        "Status: {}  Objective: {} votes",
        status_label(o.status),
        o.objective
    );
    if o.is_tied() {
        let _ = writeln!(out, "Tie: {} co-optimal committees", o.co_optimal_total);
    }
    let _ = writeln!(out);
    let (header, rows) = result_cells(report);
    text_table(&mut out, &header, &rows);

    if let Some(price) = &report.price {
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "Price of criteria: {} votes ({} of {} votes cast)",
            price.price, price.price_pct, price.total_votes_cast
        );
        let _ = writeln!(
            out,
            "Lost votes: {} ({}) without criteria, {} ({}) with criteria",
            price.lost_votes_unconstrained,
            price.lost_pct_unconstrained,
            price.lost_votes_constrained,
            price.lost_pct_constrained
        );
    }
    if let Some(d) = &report.displacement {
        if !d.records.is_empty() {
            let _ = writeln!(out);
            let _ = writeln!(out, "Top candidates and protected candidates only:");
            let (header, rows) = deficit_cells(&d.partial_deficits);
            text_table(&mut out, &header, &rows);
            let _ = writeln!(out);
            let _ = writeln!(out, "Selected ahead of higher-voted candidates (heuristic):");
            for r in &d.records {
                let _ = writeln!(out, "  {}", describe_record(r));
            }
        }
    }
    out
}

fn render_markdown(report: &ElectionReport) -> String {
    let mut out = String::new();
    let o = &report.outcome;
    let _ = writeln!(out, "# Election {}", report.election_id);
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{} seats. Status **{}**, {} votes.",
        report.seats,
        status_label(o.status),
        o.objective
    );
    let _ = writeln!(out);
    let _ = writeln!(out, "## Results");
    let _ = writeln!(out);
    let (header, rows) = result_cells(report);
    markdown_table(&mut out, &header, &rows);

    if let Some(price) = &report.price {
        let _ = writeln!(out);
        let _ = writeln!(out, "## Price of criteria");
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "- Without criteria: {} votes elected, {} lost ({})",
            price.unconstrained_objective, price.lost_votes_unconstrained, price.lost_pct_unconstrained
        );
        let _ = writeln!(
            out,
            "- With criteria: {} votes elected, {} lost ({})",
            price.constrained_objective, price.lost_votes_constrained, price.lost_pct_constrained
        );
        let _ = writeln!(out, "- Price: {} votes ({})", price.price, price.price_pct);
    }
    if let Some(d) = &report.displacement {
        if !d.records.is_empty() {
            let _ = writeln!(out);
            let _ = writeln!(out, "## Criteria status for top and protected candidates");
            let _ = writeln!(out);
            let (header, rows) = deficit_cells(&d.partial_deficits);
            markdown_table(&mut out, &header, &rows);
            let _ = writeln!(out);
            let _ = writeln!(out, "## Why lower-voted candidates were selected");
            let _ = writeln!(out);
            let _ = writeln!(
                out,
                "_This explanation is a heuristic; the optimal committee above is authoritative._"
            );
            let _ = writeln!(out);
            for r in &d.records {
                let _ = writeln!(out, "- {}", describe_record(r));
            }
        }
    }
    out
}
