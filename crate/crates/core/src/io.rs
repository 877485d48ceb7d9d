//! Reference and hypothesis files, and rendered reports.
//!
//! Reference files are either CSV with an `id,rank` header or JSON Lines
//! with `{"id": .., "rank": ..}` objects. Hypotheses come as an order (one
//! id per line, best first; JSON Lines `{"id": ..}`) or as scores (CSV
//! `id,score`; JSON Lines `{"id": .., "score": ..}`). Line numbers in
//! errors are 1-based and count the header.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::baselines::MetricValue;
use crate::datagen::SweepTable;
use crate::error::{Error, Result};
use crate::rankdcg::{cost_curve, CostVariant};
use crate::ranking::{Hypothesis, RankedItem, RankedList};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DataFormat {
    Csv,
    JsonLines,
}

impl DataFormat {
    /// `.jsonl` / `.ndjson` / `.json` are JSON Lines, anything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl" | "ndjson" | "json") => DataFormat::JsonLines,
            _ => DataFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HypothesisMode {
    Order,
    Scores,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ReportFormat {
    #[default]
    Table,
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(ReportFormat::Table),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::invalid(format!("unknown output format `{other}`"))),
        }
    }
}

/// Non-blank lines with their 1-based line numbers, CR stripped.
fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .filter(|(_, l)| !l.trim().is_empty())
}

type CsvRecord = (usize, csv::StringRecord);

/// Non-blank CSV records with their 1-based line numbers, fields trimmed.
fn csv_records(text: &str) -> Result<Vec<CsvRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize);
            Error::parse(line, format!("invalid CSV: {e}"))
        })?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let line = rec.position().map_or(0, |p| p.line() as usize);
        out.push((line, rec));
    }
    Ok(out)
}

fn is_header(rec: &csv::StringRecord, header: &[&str]) -> bool {
    rec.iter().eq(header.iter().copied())
}

fn expect_header(records: &mut impl Iterator<Item = CsvRecord>, header: &[&str]) -> Result<()> {
    match records.next() {
        None => Err(Error::parse(None, "empty input")),
        Some((_, rec)) if is_header(&rec, header) => Ok(()),
        Some((n, rec)) => Err(Error::parse(
            n,
            format!("expected header `{}`, found `{}`", header.join(","), join(&rec)),
        )),
    }
}

fn join(rec: &csv::StringRecord) -> String {
    rec.iter().collect::<Vec<_>>().join(",")
}

fn two_fields(line_no: usize, rec: &csv::StringRecord) -> Result<(&str, &str)> {
    match (rec.get(0), rec.get(1), rec.len()) {
        (Some(id), Some(value), 2) if !id.is_empty() => Ok((id, value)),
        _ => Err(Error::parse(
            line_no,
            format!("expected two fields `id,value`, found `{}`", join(rec)),
        )),
    }
}

fn json_object(line_no: usize, line: &str) -> Result<Map<String, Value>> {
    match serde_json::from_str::<Value>(line) {
        Ok(Value::Object(obj)) => Ok(obj),
        Ok(_) => Err(Error::parse(line_no, "expected a JSON object")),
        Err(e) => Err(Error::parse(line_no, format!("invalid JSON: {e}"))),
    }
}

fn json_id(line_no: usize, obj: &Map<String, Value>) -> Result<String> {
    match obj.get("id") {
        Some(Value::String(s)) if !s.is_empty() => Ok(s.clone()),
        _ => Err(Error::parse(line_no, "field `id` must be a non-empty string")),
    }
}

fn parse_score(line_no: usize, raw: &str) -> Result<f64> {
    match raw.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::parse(
            line_no,
            format!("score `{raw}` is not a finite number"),
        )),
    }
}

struct UniqueIds(HashSet<String>);

impl UniqueIds {
    fn new() -> Self {
        UniqueIds(HashSet::new())
    }

    fn check(&mut self, line_no: usize, id: &str) -> Result<()> {
        if self.0.insert(id.to_string()) {
            Ok(())
        } else {
            Err(Error::parse(line_no, format!("duplicate id `{id}`")))
        }
    }
}

pub fn parse_reference(text: &str, format: DataFormat) -> Result<RankedList> {
    let mut ids = UniqueIds::new();
    let mut items = Vec::new();
    match format {
        DataFormat::Csv => {
            let mut records = csv_records(text)?.into_iter();
            expect_header(&mut records, &["id", "rank"])?;
            for (n, rec) in records {
                let (id, raw) = two_fields(n, &rec)?;
                let rank = raw
                    .parse::<u64>()
                    .map_err(|_| Error::parse(n, format!("rank `{raw}` is not a non-negative integer")))?;
                ids.check(n, id)?;
                items.push(RankedItem::new(id, rank));
            }
        }
        DataFormat::JsonLines => {
            for (n, line) in numbered_lines(text) {
                let obj = json_object(n, line)?;
                let id = json_id(n, &obj)?;
                let rank = obj
                    .get("rank")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| Error::parse(n, "field `rank` must be a non-negative integer"))?;
                ids.check(n, &id)?;
                items.push(RankedItem::new(id, rank));
            }
        }
    }
    if items.is_empty() {
        return Err(Error::parse(None, "no records"));
    }
    RankedList::new(items)
}

/// Guesses the hypothesis mode: CSV with an `id,score` header or JSON Lines
/// objects carrying `score` are scores, anything else an order.
pub fn detect_hypothesis_mode(text: &str, format: DataFormat) -> HypothesisMode {
    let scores = match format {
        DataFormat::Csv => csv_records(text)
            .ok()
            .and_then(|recs| recs.into_iter().next())
            .is_some_and(|(_, rec)| is_header(&rec, &["id", "score"])),
        DataFormat::JsonLines => numbered_lines(text)
            .next()
            .and_then(|(_, l)| serde_json::from_str::<Value>(l).ok())
            .is_some_and(|v| v.get("score").is_some()),
    };
    if scores {
        HypothesisMode::Scores
    } else {
        HypothesisMode::Order
    }
}

/// Parses a hypothesis. Ids are not checked against any reference here.
pub fn parse_hypothesis(text: &str, format: DataFormat, mode: HypothesisMode) -> Result<Hypothesis> {
    let mut ids = UniqueIds::new();
    let hyp = match (mode, format) {
        (HypothesisMode::Order, DataFormat::Csv) => {
            let mut order = Vec::new();
            for (n, rec) in csv_records(text)? {
                if rec.len() != 1 {
                    return Err(Error::parse(
                        n,
                        format!("expected a single id, found `{}`", join(&rec)),
                    ));
                }
                ids.check(n, &rec[0])?;
                order.push(rec[0].to_string());
            }
            Hypothesis::Order(order)
        }
        (HypothesisMode::Order, DataFormat::JsonLines) => {
            let mut order = Vec::new();
            for (n, line) in numbered_lines(text) {
                let id = json_id(n, &json_object(n, line)?)?;
                ids.check(n, &id)?;
                order.push(id);
            }
            Hypothesis::Order(order)
        }
        (HypothesisMode::Scores, DataFormat::Csv) => {
            let mut records = csv_records(text)?.into_iter();
            expect_header(&mut records, &["id", "score"])?;
            let mut pairs = Vec::new();
            for (n, rec) in records {
                let (id, raw) = two_fields(n, &rec)?;
                let score = parse_score(n, raw)?;
                ids.check(n, id)?;
                pairs.push((id.to_string(), score));
            }
            Hypothesis::Scores(pairs)
        }
        (HypothesisMode::Scores, DataFormat::JsonLines) => {
            let mut pairs = Vec::new();
            for (n, line) in numbered_lines(text) {
                let obj = json_object(n, line)?;
                let score = obj
                    .get("score")
                    .and_then(Value::as_f64)
                    .filter(|s| s.is_finite())
                    .ok_or_else(|| Error::parse(n, "field `score` must be a finite number"))?;
                let id = json_id(n, &obj)?;
                ids.check(n, &id)?;
                pairs.push((id, score));
            }
            Hypothesis::Scores(pairs)
        }
    };
    if hyp.is_empty() {
        return Err(Error::parse(None, "no records"));
    }
    Ok(hyp)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::parse(None, format!("{}: {e}", path.display())))
}

pub fn read_reference(path: &Path) -> Result<RankedList> {
    parse_reference(&read(path)?, DataFormat::from_path(path))
}

/// Reads a hypothesis file; `mode = None` detects the mode from the content.
pub fn read_hypothesis(path: &Path, mode: Option<HypothesisMode>) -> Result<Hypothesis> {
    let text = read(path)?;
    let format = DataFormat::from_path(path);
    let mode = mode.unwrap_or_else(|| detect_hypothesis_mode(&text, format));
    parse_hypothesis(&text, format, mode)
}

// readers trim fields, so edge whitespace would not survive a round trip
fn check_csv_id(id: &str) -> Result<()> {
    if id.trim() != id {
        Err(Error::invalid(format!(
            "id `{id}` has leading or trailing whitespace"
        )))
    } else {
        Ok(())
    }
}

/// Writes rows as CSV, quoting only where needed.
fn csv_text<R, F>(rows: R) -> String
where
    R: IntoIterator<Item = Vec<F>>,
    F: AsRef<[u8]>,
{
    let mut w = csv::WriterBuilder::new()
        .flexible(true)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for row in rows {
        w.write_record(row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("fields are UTF-8")
}

pub fn write_reference(list: &RankedList, format: DataFormat) -> Result<String> {
    Ok(match format {
        DataFormat::Csv => {
            for it in list.items() {
                check_csv_id(&it.id)?;
            }
            let header = vec!["id".to_string(), "rank".to_string()];
            csv_text(
                std::iter::once(header).chain(
                    list.items()
                        .iter()
                        .map(|it| vec![it.id.clone(), it.rank.to_string()]),
                ),
            )
        }
        DataFormat::JsonLines => list
            .items()
            .iter()
            .map(|it| json!({"id": it.id, "rank": it.rank}).to_string() + "\n")
            .collect(),
    })
}

pub fn write_hypothesis(hyp: &Hypothesis, format: DataFormat) -> Result<String> {
    if format == DataFormat::Csv {
        for id in hyp.ids() {
            check_csv_id(id)?;
        }
    }
    Ok(match (hyp, format) {
        (Hypothesis::Order(ids), DataFormat::Csv) => csv_text(ids.iter().map(|id| vec![id.as_str()])),
        (Hypothesis::Order(ids), DataFormat::JsonLines) => ids
            .iter()
            .map(|id| json!({ "id": id }).to_string() + "\n")
            .collect(),
        (Hypothesis::Scores(pairs), DataFormat::Csv) => {
            let header = vec!["id".to_string(), "score".to_string()];
            csv_text(
                std::iter::once(header).chain(pairs.iter().map(|(id, s)| vec![id.clone(), s.to_string()])),
            )
        }
        (Hypothesis::Scores(pairs), DataFormat::JsonLines) => pairs
            .iter()
            .map(|(id, s)| json!({"id": id, "score": s}).to_string() + "\n")
            .collect(),
    })
}

/// One row of a comparison report: a hypothesis name and its metric cells.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub name: String,
    pub scores: Vec<(String, MetricValue)>,
}

impl MetricReport {
    pub fn get(&self, metric: &str) -> Option<&MetricValue> {
        self.scores.iter().find(|(m, _)| m == metric).map(|(_, v)| v)
    }
}

/// Three decimals, half-to-even, trailing zeros dropped down to one decimal.
pub fn format_score(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    };
    let trimmed = s.trim_end_matches('0');
    if trimmed.ends_with('.') {
        format!("{trimmed}0")
    } else {
        trimmed.to_string()
    }
}

fn columns(reports: &[MetricReport]) -> Vec<&str> {
    let mut cols: Vec<&str> = Vec::new();
    for r in reports {
        for (m, _) in &r.scores {
            if !cols.contains(&m.as_str()) {
                cols.push(m);
            }
        }
    }
    cols
}

/// Renders a comparison matrix: one row per hypothesis, one column per
/// metric. Undefined cells are `nan` in tables, empty in CSV and `null` in
/// JSON; cells a row lacks are empty (absent in JSON).
pub fn write_report(reports: &[MetricReport], format: ReportFormat) -> String {
    let cols = columns(reports);
    match format {
        ReportFormat::Table => {
            let cell = |r: &MetricReport, c: &str| match r.get(c) {
                Some(MetricValue::Value(v)) => format_score(*v),
                Some(MetricValue::Undefined(_)) => "nan".to_string(),
                None => String::new(),
            };
            let name_w = reports.iter().map(|r| r.name.len()).chain([4]).max().unwrap_or(4);
            let widths: Vec<usize> = cols
                .iter()
                .map(|c| {
                    reports
                        .iter()
                        .map(|r| cell(r, c).len())
                        .chain([c.len()])
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let mut out = format!("{:<name_w$}", "name");
            for (c, w) in cols.iter().zip(&widths) {
                out.push_str(&format!("  {c:>w$}"));
            }
            out.push('\n');
            for r in reports {
                out.push_str(&format!("{:<name_w$}", r.name));
                for (c, w) in cols.iter().zip(&widths) {
                    out.push_str(&format!("  {:>w$}", cell(r, c)));
                }
                out.push('\n');
            }
            out
        }
        ReportFormat::Csv => {
            let header: Vec<String> = std::iter::once("name")
                .chain(cols.iter().copied())
                .map(str::to_string)
                .collect();
            let rows = reports.iter().map(|r| {
                let mut row = vec![r.name.clone()];
                row.extend(cols.iter().map(|c| match r.get(c) {
                    Some(MetricValue::Value(v)) => v.to_string(),
                    _ => String::new(),
                }));
                row
            });
            csv_text(std::iter::once(header).chain(rows))
        }
        ReportFormat::Json => {
            let rows: Vec<Value> = reports
                .iter()
                .map(|r| {
                    let scores: Map<String, Value> = r
                        .scores
                        .iter()
                        .map(|(m, v)| (m.clone(), v.value().map_or(Value::Null, |x| json!(x))))
                        .collect();
                    json!({"name": r.name, "scores": scores})
                })
                .collect();
            let mut out =
                serde_json::to_string_pretty(&json!({ "rows": rows })).expect("report values serialize");
            out.push('\n');
            out
        }
    }
}

/// `step,metric,score` rows; undefined scores are empty.
pub fn write_sweep_csv(table: &SweepTable) -> String {
    let mut out = String::from("step,metric,score\n");
    for row in &table.rows {
        let score = row.value.value().map(|v| v.to_string()).unwrap_or_default();
        out.push_str(&format!("{},{},{score}\n", row.step, row.metric));
    }
    out
}

/// `position,variant,cost` rows for each variant over the ideal ordering.
pub fn write_curves_csv(list: &RankedList, variants: &[CostVariant]) -> String {
    let mut out = String::from("position,variant,cost\n");
    for &variant in variants {
        for (pos, cost) in cost_curve(list, variant) {
            out.push_str(&format!("{pos},{},{cost}\n", variant.name()));
        }
    }
    out
}
