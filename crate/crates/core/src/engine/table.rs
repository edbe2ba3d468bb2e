use std::collections::BTreeSet;
use std::fmt;

use super::fisher::{fisher_branches, FisherAnalysis};
use super::rate::{run_quench, QuenchObservables};
use super::QuenchSpec;
use crate::error::DqptError;
use crate::ssh_model::SshParams;

/// A set of non-negative multiples of 1/2, stored in halves.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HalfSet(pub BTreeSet<u32>);

impl HalfSet {
    pub fn from_halves(h: &[u32]) -> Self {
        HalfSet(h.iter().copied().collect())
    }

    pub fn contains_half(&self) -> bool {
        self.0.iter().any(|h| h % 2 == 1)
    }
}

impl fmt::Display for HalfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&h| {
                if h % 2 == 0 {
                    (h / 2).to_string()
                } else {
                    format!("{h}/2")
                }
            })
            .collect();
        f.write_str(&parts.join(","))
    }
}

pub(crate) fn fmt_counts(c: &BTreeSet<usize>) -> String {
    c.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",")
}

/// Per-branch crossing counts and DTOP jump magnitudes of one quench
/// direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectedProfile {
    pub crossings: BTreeSet<usize>,
    pub jumps: HalfSet,
}

impl ExpectedProfile {
    fn new(crossings: &[usize], jump_halves: &[u32]) -> Self {
        ExpectedProfile {
            crossings: crossings.iter().copied().collect(),
            jumps: HalfSet::from_halves(jump_halves),
        }
    }

    pub fn crossings_str(&self) -> String {
        fmt_counts(&self.crossings)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub label: &'static str,
    pub left: SshParams,
    pub right: SshParams,
    /// Quench `left → right`.
    pub forward: ExpectedProfile,
    /// Quench `right → left`.
    pub reverse: ExpectedProfile,
}

/// The twelve quenches between and within the six regions, with their
/// published Fisher-zero profiles and DTOP jump sets.
pub fn table_s1_catalog() -> Vec<TableRow> {
    let p = SshParams::new;
    let e = ExpectedProfile::new;
    let row = |label, left, right, forward, reverse| TableRow {
        label,
        left,
        right,
        forward,
        reverse,
    };
    vec![
        row("I-II", p(-2.0, 5.0), p(0.2, 5.0), e(&[0, 1], &[2]), e(&[2], &[1])),
        row("I-III", p(-2.0, 5.0), p(2.0, 5.0), e(&[1], &[2]), e(&[1], &[2])),
        row("II-III", p(0.2, 5.0), p(2.0, 5.0), e(&[2, 3], &[1, 2]), e(&[0], &[])),
        row("IV-V", p(-2.0, 1.0), p(0.2, 1.0), e(&[1], &[2]), e(&[3, 4], &[1, 2])),
        row("IV-VI", p(-2.0, 1.0), p(2.0, 1.0), e(&[2], &[2]), e(&[2], &[2])),
        row("V-VI", p(0.2, 1.0), p(3.0, 1.0), e(&[2, 4], &[1, 2]), e(&[1], &[2])),
        row("I-I", p(-2.0, 5.0), p(-3.0, 5.0), e(&[0, 1], &[2]), e(&[0, 1], &[2])),
        row("II-II", p(0.2, 5.0), p(-0.2, 5.0), e(&[0, 1], &[1]), e(&[0, 1], &[1])),
        row("III-III", p(2.0, 5.0), p(3.0, 5.0), e(&[1], &[2]), e(&[1], &[2])),
        row("IV-IV", p(-2.0, 1.0), p(-1.0, 1.0), e(&[0, 2], &[2]), e(&[0, 2], &[2])),
        row(
            "V-V",
            p(0.2, 1.0),
            p(-0.2, 1.0),
            e(&[1, 2], &[1, 2]),
            e(&[1, 2], &[1, 2]),
        ),
        row("VI-VI", p(0.5, 1.0), p(5.0, 1.0), e(&[0, 2], &[2]), e(&[0, 2], &[2])),
    ]
}

/// Everything computed for one quench direction.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionRun {
    pub profile: ExpectedProfile,
    pub fisher: FisherAnalysis,
    pub observables: QuenchObservables,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionReport {
    pub pre: SshParams,
    pub post: SshParams,
    pub expected: ExpectedProfile,
    pub computed: Result<DirectionRun, DqptError>,
}

impl DirectionReport {
    pub fn pass(&self) -> bool {
        matches!(&self.computed, Ok(c) if c.profile == self.expected)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRowReport {
    pub label: &'static str,
    pub forward: DirectionReport,
    pub reverse: DirectionReport,
}

impl TableRowReport {
    pub fn pass(&self) -> bool {
        self.forward.pass() && self.reverse.pass()
    }
}

fn run_direction(spec: &QuenchSpec, n_range: std::ops::RangeInclusive<i32>) -> Result<DirectionRun, DqptError> {
    let fisher = fisher_branches(spec, n_range, spec.n_cells)?;
    let observables = run_quench(spec)?;
    let profile = ExpectedProfile {
        crossings: fisher.count_profile(),
        jumps: HalfSet(observables.dtop.magnitude_halves()),
    };
    Ok(DirectionRun {
        profile,
        fisher,
        observables,
    })
}

/// Run both directions of every row with the discretisation of `base`
/// (its `pre`/`post` are ignored). Failing computations are reported in the
/// row rather than aborting the table.
pub fn table_s1_report(
    rows: &[TableRow],
    base: &QuenchSpec,
    n_range: std::ops::RangeInclusive<i32>,
) -> Vec<TableRowReport> {
    rows.iter()
        .map(|row| {
            let direction = |pre: SshParams, post: SshParams, expected: &ExpectedProfile| {
                let spec = QuenchSpec { pre, post, ..*base };
                DirectionReport {
                    pre,
                    post,
                    expected: expected.clone(),
                    computed: run_direction(&spec, n_range.clone()),
                }
            };
            TableRowReport {
                label: row.label,
                forward: direction(row.left, row.right, &row.forward),
                reverse: direction(row.right, row.left, &row.reverse),
            }
        })
        .collect()
}

/// Look up catalog rows by label, failing on the first unknown one.
pub fn select_rows(rows: &[TableRow], labels: &[&str]) -> Result<Vec<TableRow>, DqptError> {
    labels
        .iter()
        .map(|l| {
            rows.iter()
                .find(|r| r.label == *l)
                .cloned()
                .ok_or_else(|| DqptError::Invalid(format!("unknown table row {l:?}")))
        })
        .collect()
}

pub const TABLE_CSV_HEADER: &str = "row,direction,pre_eta,pre_gamma,post_eta,post_gamma,expected_crossings,computed_crossings,expected_jumps,computed_jumps,status";

/// One CSV line per row and direction. Parameters use 17 significant
/// digits; set-valued columns are quoted.
pub fn table_s1_csv(reports: &[TableRowReport]) -> String {
    let mut out = String::from(TABLE_CSV_HEADER);
    out.push('\n');
    for r in reports {
        for (dir, d) in [("forward", &r.forward), ("reverse", &r.reverse)] {
            let (crossings, jumps) = match &d.computed {
                Ok(c) => (c.profile.crossings_str(), c.profile.jumps.to_string()),
                Err(_) => ("error".to_string(), "error".to_string()),
            };
            out.push_str(&format!(
                "{},{},{:.16e},{:.16e},{:.16e},{:.16e},\"{}\",\"{}\",\"{}\",\"{}\",{}\n",
                r.label,
                dir,
                d.pre.eta,
                d.pre.gamma,
                d.post.eta,
                d.post.gamma,
                d.expected.crossings_str(),
                crossings,
                d.expected.jumps,
                jumps,
                if d.pass() { "PASS" } else { "FAIL" }
            ));
        }
    }
    out
}
