//! Orchestration: candidate twist indices, the obstruction pipeline, report
//! assembly, and regression against an expected results table.

use crate::classical_obstructions::{
    arf_check, branched_rank_check_all, signature_twist_check, violating_pairs, ObstructionResult,
};
use crate::floer_engine::{
    alternating_allowed, l_interval, partner_v_check, required_v_check, upsilon_check_with_genus,
    upsilon_from_v, PartialV,
};
use crate::forms_and_d::{d_invariant_check, linking_form_check};
use crate::knot_model::{
    mirror, KnotRecord, ModelError, Sign, TwistIndex, TwistVerdict, VerdictStatus,
};
use crate::numeric::PLFunction;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(
        "convention calibration violated: {knot} has {index} recorded as realized, \
         but it was obstructed by {reasons:?}"
    )]
    CalibrationViolation {
        knot: String,
        index: TwistIndex,
        reasons: Vec<(String, String)>,
    },
    #[error("bad expected-table line {line}: {detail}")]
    BadExpectedTable { line: usize, detail: String },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Tunables for candidate generation.
#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    /// Cap on linking numbers for knots with no Floer or four-genus data.
    pub max_l: u32,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self { max_l: 16 }
    }
}

const CONVENTION_NOTE: &str = "sign convention: calibrated so that the right-handed trefoil \
     admits 2-, 3-, 0+; a negative twist of linking number l allows \
     sigma_{r/l} in {-2r(l-r), -2r(l-r)+2}, a positive twist the negated pair; \
     queries on signature jumps are answered from the left";

/// Result of analyzing one knot: one verdict per candidate index, ordered by
/// `(l, sign)`, plus the summary sets.
#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub knot: String,
    pub verdicts: Vec<TwistVerdict>,
    pub convention_note: String,
    pub known: BTreeSet<TwistIndex>,
    pub possible: BTreeSet<TwistIndex>,
    /// Pairs of surviving indices violating the gcd trichotomy, reported as
    /// notes since the failure cannot be pinned on either index alone.
    pub gcd_notes: Vec<String>,
}

/// Bounds on `nu+` for the given side (the knot itself for negative twists,
/// its mirror for positive ones), or `None` when nothing pins it down. The
/// flag records whether the bound is exact (from V-data) rather than the
/// `tau <= nu+ <= g4` squeeze.
fn nu_bounds(k: &KnotRecord, side: Sign) -> Option<(u64, u64, bool)> {
    let v = match side {
        Sign::Neg => k.effective_v(),
        Sign::Pos => k.effective_v_mirror(),
    };
    if let Some(v) = v {
        let nu = v.nu_plus() as u64;
        return Some((nu, nu, true));
    }
    let tau = k.tau?;
    let g4 = k.genus4?;
    let t = match side {
        Sign::Neg => tau,
        Sign::Pos => -tau,
    };
    Some((t.max(0) as u64, u64::from(g4), false))
}

/// True when both twist signs have their admissible linking numbers pinned
/// by exact `nu+` values; only then is the surviving set a faithful
/// approximation of the unknotting set and the size bounds provable.
fn nu_exact_both_sides(k: &KnotRecord) -> bool {
    [Sign::Neg, Sign::Pos]
        .into_iter()
        .all(|s| matches!(nu_bounds(k, s), Some((_, _, true))))
}

/// Candidate indices: `0` and `1` with both signs always, plus the linking
/// numbers admitted by the `nu+` interval on each side, plus any indices the
/// dataset already records.
pub fn candidates(k: &KnotRecord, config: &AnalysisConfig) -> BTreeSet<TwistIndex> {
    let mut out: BTreeSet<TwistIndex> = [0, 1]
        .into_iter()
        .flat_map(|l| [TwistIndex::neg(l), TwistIndex::pos(l)])
        .collect();
    for side in [Sign::Neg, Sign::Pos] {
        let (lo, hi, _) = nu_bounds(k, side).unwrap_or((0, u64::from(config.max_l), false));
        for l in l_interval(lo, hi) {
            out.insert(TwistIndex::new(l, side));
        }
    }
    out.extend(k.known_indices.iter().copied());
    out.extend(k.excluded_indices.iter().copied());
    out
}

/// Upsilon of the record if computable: stored (torus knots and their sums)
/// or rebuilt from the signature for thin knots.
fn effective_upsilon(k: &KnotRecord) -> Option<PLFunction> {
    if let Some(u) = &k.upsilon {
        return Some(u.clone());
    }
    if k.is_thin() {
        let v = k.effective_v()?;
        return Some(upsilon_from_v(&v, Some(k.genus)));
    }
    None
}

/// Every obstruction applied to one candidate, in a fixed cheap-first order.
/// All checks run so the report can attribute every independent reason.
fn run_checks(k: &KnotRecord, idx: TwistIndex) -> Vec<(String, ObstructionResult)> {
    let mut results: Vec<(String, ObstructionResult)> = Vec::new();
    let mut push = |name: &str, r: ObstructionResult| results.push((name.to_string(), r));

    if k.is_thin() {
        let allowed = alternating_allowed(k.signature).expect("even signature");
        if allowed.contains(&idx) {
            push(
                "alternating_table",
                ObstructionResult::passed("index allowed by the thin-knot table"),
            );
        } else {
            push(
                "alternating_table",
                ObstructionResult::obstructed(format!(
                    "thin knot with signature {} admits only {}",
                    k.signature,
                    format_set(&allowed)
                )),
            );
        }
    }

    push("arf", arf_check(k, idx));
    push("signature", signature_twist_check(k, idx));
    push("branched_rank", branched_rank_check_all(k, idx));

    // V-sequence checks run on the side matching the twist sign
    let side_v = match idx.sign {
        Sign::Neg => k.effective_v(),
        Sign::Pos => k.effective_v_mirror(),
    };
    match side_v {
        Some(v) => {
            let pv = PartialV::from(&v);
            push("forced_v", required_v_check(&pv, idx.l));
            push("partner_v", partner_v_check(&pv, idx.l));
        }
        None => {
            push(
                "forced_v",
                ObstructionResult::inconclusive("no V-sequence data for this side"),
            );
        }
    }

    if idx.l >= 1 {
        if let Some(upsilon) = effective_upsilon(k) {
            let side_upsilon = match idx.sign {
                Sign::Neg => upsilon,
                Sign::Pos => upsilon.negate(),
            };
            let genus = (k.genus >= 1).then_some(k.genus);
            push(
                "upsilon",
                upsilon_check_with_genus(&side_upsilon, idx.l, genus),
            );
        }
    }

    push("linking_form", linking_form_check(k, idx));
    push("d_invariants", d_invariant_check(k, idx));
    results
}

/// Analyzes one knot: classifies every candidate index as known, possible,
/// or obstructed, with reasons. Fails if a recorded-as-realized index gets
/// obstructed, since that can only mean a convention slipped.
pub fn analyze(k: &KnotRecord, config: &AnalysisConfig) -> Result<AnalysisReport, EngineError> {
    let mut verdicts = Vec::new();
    let mut known = BTreeSet::new();
    let mut possible = BTreeSet::new();
    for idx in candidates(k, config) {
        let results = run_checks(k, idx);
        let mut reasons: Vec<(String, String)> = results
            .iter()
            .filter(|(_, r)| !r.passed)
            .map(|(name, r)| (name.clone(), r.detail.clone()))
            .collect();
        if k.known_indices.contains(&idx) {
            if !reasons.is_empty() {
                return Err(EngineError::CalibrationViolation {
                    knot: k.name.clone(),
                    index: idx,
                    reasons,
                });
            }
            known.insert(idx);
            verdicts.push(TwistVerdict {
                index: idx,
                status: VerdictStatus::Known,
                reasons: Vec::new(),
            });
            continue;
        }
        if k.excluded_indices.contains(&idx) {
            reasons.push((
                "external".to_string(),
                "ruled out by a result recorded in the dataset, outside this suite".to_string(),
            ));
        }
        let status = if reasons.is_empty() {
            possible.insert(idx);
            VerdictStatus::Possible
        } else {
            VerdictStatus::Obstructed
        };
        verdicts.push(TwistVerdict {
            index: idx,
            status,
            reasons,
        });
    }

    // the size bounds are theorems about the true unknotting set; they apply
    // to the surviving set only when it is not an artifact of missing data
    let surviving: BTreeSet<TwistIndex> = known.union(&possible).copied().collect();
    if nu_exact_both_sides(k) {
        if surviving.len() > 6 {
            return Err(EngineError::Internal(format!(
                "{}: {} surviving indices, more than the provable maximum of 6",
                k.name,
                surviving.len()
            )));
        }
        if surviving.len() == 6 {
            let standard: BTreeSet<TwistIndex> = [0u32, 1, 2]
                .into_iter()
                .flat_map(|l| [TwistIndex::neg(l), TwistIndex::pos(l)])
                .collect();
            if surviving != standard {
                return Err(EngineError::Internal(format!(
                    "{}: six surviving indices must be 2-,1-,0-,0+,1+,2+, got {}",
                    k.name,
                    format_set(&surviving)
                )));
            }
        }
    }

    let gcd_notes = violating_pairs(&surviving)
        .into_iter()
        .map(|(a, b)| format!("{a} and {b} cannot both be realized (gcd constraint)"))
        .collect();

    Ok(AnalysisReport {
        knot: k.name.clone(),
        verdicts,
        convention_note: CONVENTION_NOTE.to_string(),
        known,
        possible,
        gcd_notes,
    })
}

/// Mirror-image report, used by the duality tests: every verdict of
/// `analyze(mirror(K))` is the sign-flip of the original.
pub fn analyze_mirror(
    k: &KnotRecord,
    config: &AnalysisConfig,
) -> Result<AnalysisReport, EngineError> {
    analyze(&mirror(k), config)
}

fn format_set(set: &BTreeSet<TwistIndex>) -> String {
    if set.is_empty() {
        return "{}".to_string();
    }
    let items: Vec<String> = set.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

// ---------------------------------------------------------------------------
// Report rendering
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
    Csv,
}

impl AnalysisReport {
    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Text => self.render_text(),
            ReportFormat::Json => self.render_json(),
            ReportFormat::Csv => self.render_csv(),
        }
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "knot {}", self.knot);
        for v in &self.verdicts {
            let status = match v.status {
                VerdictStatus::Known => "KNOWN",
                VerdictStatus::Possible => "POSSIBLE",
                VerdictStatus::Obstructed => "OBSTRUCTED",
            };
            let _ = writeln!(out, "  {:>4}  {}", v.index.to_string(), status);
            for (name, detail) in &v.reasons {
                let _ = writeln!(out, "        - {name}: {detail}");
            }
        }
        let _ = writeln!(out, "  known    = {}", format_set(&self.known));
        let _ = writeln!(out, "  possible = {}", format_set(&self.possible));
        for note in &self.gcd_notes {
            let _ = writeln!(out, "  note: {note}");
        }
        let _ = writeln!(out, "  note: {}", self.convention_note);
        out
    }

    fn render_json(&self) -> String {
        let verdicts: Vec<serde_json::Value> = self
            .verdicts
            .iter()
            .map(|v| {
                serde_json::json!({
                    "index": v.index.to_string(),
                    "status": v.status,
                    "reasons": v.reasons,
                })
            })
            .collect();
        let value = serde_json::json!({
            "knot": self.knot,
            "verdicts": verdicts,
            "known": self.known.iter().map(|i| i.to_string()).collect::<Vec<_>>(),
            "possible": self.possible.iter().map(|i| i.to_string()).collect::<Vec<_>>(),
            "gcd_notes": self.gcd_notes,
            "convention_note": self.convention_note,
        });
        serde_json::to_string_pretty(&value).expect("serializable")
    }

    fn render_csv(&self) -> String {
        let mut out = String::from("knot,index,status,reasons\n");
        for v in &self.verdicts {
            let status = match v.status {
                VerdictStatus::Known => "known",
                VerdictStatus::Possible => "possible",
                VerdictStatus::Obstructed => "obstructed",
            };
            let reasons = v
                .reasons
                .iter()
                .map(|(n, d)| format!("{n}: {d}"))
                .collect::<Vec<_>>()
                .join(" | ")
                .replace('"', "'");
            let _ = writeln!(out, "{},{},{},\"{}\"", self.knot, v.index, status, reasons);
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Expected-table regression
// ---------------------------------------------------------------------------

/// One expected row: the indices recorded as realized and the ones left
/// unresolved (neither realized nor obstructed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectedRow {
    pub knot: String,
    pub known: BTreeSet<TwistIndex>,
    pub unknown: BTreeSet<TwistIndex>,
}

/// Parses the expected-table format: one `name | known | unknown` row per
/// line, comma-separated indices, `#` comments and blank lines ignored.
pub fn parse_expected_table(text: &str) -> Result<Vec<ExpectedRow>, EngineError> {
    let mut rows = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split('|').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(EngineError::BadExpectedTable {
                line: n + 1,
                detail: format!("expected `name | known | unknown`, got {raw:?}"),
            });
        }
        let parse_set = |s: &str| -> Result<BTreeSet<TwistIndex>, EngineError> {
            if s.is_empty() {
                return Ok(BTreeSet::new());
            }
            s.split(',')
                .map(|item| {
                    item.trim()
                        .parse::<TwistIndex>()
                        .map_err(|e| EngineError::BadExpectedTable {
                            line: n + 1,
                            detail: e.to_string(),
                        })
                })
                .collect()
        };
        rows.push(ExpectedRow {
            knot: parts[0].to_string(),
            known: parse_set(parts[1])?,
            unknown: parse_set(parts[2])?,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct RowDiff {
    pub knot: String,
    pub expected_known: BTreeSet<TwistIndex>,
    pub expected_unknown: BTreeSet<TwistIndex>,
    pub got_known: BTreeSet<TwistIndex>,
    pub got_unknown: BTreeSet<TwistIndex>,
}

impl RowDiff {
    pub fn matches(&self) -> bool {
        self.expected_known == self.got_known && self.expected_unknown == self.got_unknown
    }
}

#[derive(Debug, Clone)]
pub struct TableReport {
    pub rows: Vec<RowDiff>,
    pub missing: Vec<String>,
}

impl TableReport {
    pub fn matched(&self) -> bool {
        self.missing.is_empty() && self.rows.iter().all(RowDiff::matches)
    }

    pub fn mismatches(&self) -> Vec<&RowDiff> {
        self.rows.iter().filter(|r| !r.matches()).collect()
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let mark = if row.matches() { "ok  " } else { "DIFF" };
            let _ = writeln!(
                out,
                "{mark} {:<8} known {} unknown {}",
                row.knot,
                format_set(&row.got_known),
                format_set(&row.got_unknown)
            );
            if !row.matches() {
                let _ = writeln!(
                    out,
                    "     expected known {} unknown {}",
                    format_set(&row.expected_known),
                    format_set(&row.expected_unknown)
                );
            }
        }
        for name in &self.missing {
            let _ = writeln!(out, "MISSING {name}");
        }
        let _ = writeln!(
            out,
            "{} rows, {} mismatching, {} missing",
            self.rows.len(),
            self.rows.iter().filter(|r| !r.matches()).count(),
            self.missing.len()
        );
        out
    }
}

/// Runs the analysis over every knot named in the expected table and diffs
/// the outcome row by row.
pub fn reproduce_table(
    records: &[KnotRecord],
    expected: &[ExpectedRow],
    config: &AnalysisConfig,
) -> Result<TableReport, EngineError> {
    let by_name: BTreeMap<&str, &KnotRecord> =
        records.iter().map(|r| (r.name.as_str(), r)).collect();
    let mut rows = Vec::new();
    let mut missing = Vec::new();
    for row in expected {
        let Some(rec) = by_name.get(row.knot.as_str()) else {
            missing.push(row.knot.clone());
            continue;
        };
        let report = analyze(rec, config)?;
        rows.push(RowDiff {
            knot: row.knot.clone(),
            expected_known: row.known.clone(),
            expected_unknown: row.unknown.clone(),
            got_known: report.known,
            got_unknown: report.possible,
        });
    }
    Ok(TableReport { rows, missing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knot_model::{connected_sum, torus_knot};

    #[test]
    fn trefoil_report_is_exact() {
        let k = torus_knot(2, 3).unwrap();
        let report = analyze(&k, &AnalysisConfig::default()).unwrap();
        let surviving: BTreeSet<TwistIndex> =
            report.known.union(&report.possible).copied().collect();
        assert_eq!(
            surviving,
            BTreeSet::from([TwistIndex::neg(2), TwistIndex::neg(3), TwistIndex::pos(0)])
        );
    }

    #[test]
    fn torus_7_8_candidates() {
        let k = torus_knot(7, 8).unwrap();
        let cands = candidates(&k, &AnalysisConfig::default());
        for idx in [
            TwistIndex::neg(7),
            TwistIndex::neg(8),
            TwistIndex::neg(0),
            TwistIndex::neg(1),
        ] {
            assert!(cands.contains(&idx), "missing {idx}");
        }
        let report = analyze(&k, &AnalysisConfig::default()).unwrap();
        assert!(report.possible.contains(&TwistIndex::neg(7)));
        assert!(report.possible.contains(&TwistIndex::neg(8)));
    }

    #[test]
    fn sum_example_candidates_and_upsilon() {
        let mut k = connected_sum(
            &torus_knot(2, 25).unwrap(),
            &crate::knot_model::mirror(&torus_knot(3, 8).unwrap()),
        );
        k.tau = Some(5);
        k.genus4 = Some(7);
        let cands = candidates(&k, &AnalysisConfig::default());
        assert!(cands.contains(&TwistIndex::neg(4)));
        assert!(cands.contains(&TwistIndex::neg(5)));
        assert!(!cands.contains(&TwistIndex::neg(6)));
        let report = analyze(&k, &AnalysisConfig::default()).unwrap();
        let v4 = report
            .verdicts
            .iter()
            .find(|v| v.index == TwistIndex::neg(4))
            .unwrap();
        assert_eq!(v4.status, VerdictStatus::Obstructed);
        assert!(v4.reasons.iter().any(|(n, _)| n == "upsilon"));
        let v5 = report
            .verdicts
            .iter()
            .find(|v| v.index == TwistIndex::neg(5))
            .unwrap();
        assert_eq!(v5.status, VerdictStatus::Obstructed);
    }

    #[test]
    fn expected_table_round_trip() {
        let text = "# comment\n3_1 | 3-,2-,0+ | \n5_2 | 2-,0+ | 1+\n";
        let rows = parse_expected_table(text).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].knot, "3_1");
        assert_eq!(rows[0].known.len(), 3);
        assert!(rows[0].unknown.is_empty());
        assert_eq!(rows[1].unknown, BTreeSet::from([TwistIndex::pos(1)]));
    }
}
