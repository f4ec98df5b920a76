//! File formats: quintuple objects, newline-delimited corpora and matrices.
//!
//! Quintuple object:
//! `{"m": x, "j": [4], "s": [4], "H": [h01, h02, h03, h12, h13, h23], "n": x,
//!   "frame"?: "world" | "local", "metric": [16 row-major]?}`.
//! `j` is upper-index, `s` and `H` lower-index. `metric` is required for world
//! rows and ignored otherwise. `frame` defaults to local.
//!
//! Every number is written with 17 significant digits, so parsing the output
//! gives back the same bits.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::clifford::RepKind;
use crate::frames::{
    tetrad_from_metric, world_to_local, AntisymmetricTensor, FrameError, IndexFrame, TensorQuintuple, WorldMetric,
};
use crate::linalg::{self, CMat4, C64};

pub const CORPUS_SCHEMA: &str = "quintuple/1";

/// Parse failure located in the input text.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct InputError {
    pub line: usize,
    pub message: String,
}

impl InputError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        Self { line, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum HField {
    Flat([f64; 6]),
    Nested([[f64; 6]; 1]),
}

/// Wire form of a [`TensorQuintuple`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuintupleRecord {
    pub m: f64,
    pub j: [f64; 4],
    pub s: [f64; 4],
    #[serde(rename = "H")]
    h: HField,
    pub n: f64,
    #[serde(default)]
    pub frame: IndexFrame,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<[f64; 16]>,
}

impl QuintupleRecord {
    pub fn from_quintuple(q: &TensorQuintuple, metric: Option<&WorldMetric>) -> Self {
        Self {
            m: q.m,
            j: q.j,
            s: q.s,
            h: HField::Flat(q.h.0),
            n: q.n,
            frame: q.frame,
            metric: metric.map(WorldMetric::row_major),
        }
    }

    pub fn quintuple(&self) -> TensorQuintuple {
        let h = match self.h {
            HField::Flat(h) => h,
            HField::Nested([h]) => h,
        };
        TensorQuintuple { m: self.m, j: self.j, s: self.s, h: AntisymmetricTensor(h), n: self.n, frame: self.frame }
    }

    pub fn world_metric(&self) -> Option<Result<WorldMetric, FrameError>> {
        self.metric.as_ref().map(WorldMetric::from_row_major)
    }

    /// Local-frame components, converting world rows through the canonical
    /// tetrad of their metric.
    pub fn to_local(&self) -> Result<TensorQuintuple, String> {
        let q = self.quintuple();
        match q.frame {
            IndexFrame::Local => Ok(q),
            IndexFrame::World => {
                let g = self
                    .world_metric()
                    .ok_or_else(|| "field `metric`: world-frame rows need a metric".to_string())?
                    .map_err(|e| format!("field `metric`: {e}"))?;
                world_to_local(&q, &tetrad_from_metric(&g)).map_err(|e| e.to_string())
            }
        }
    }
}

/// First line of a corpus file. Extra metadata is kept verbatim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusHeader {
    pub schema: String,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(flatten)]
    pub meta: serde_json::Map<String, serde_json::Value>,
}

impl CorpusHeader {
    pub fn new(seed: Option<u64>) -> Self {
        Self { schema: CORPUS_SCHEMA.to_string(), seed, meta: serde_json::Map::new() }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        let value = serde_json::to_value(value).expect("metadata serializes");
        self.meta.insert(key.to_string(), value);
        self
    }
}

/// One data row with its 1-based line number.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub line: usize,
    pub record: QuintupleRecord,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Corpus {
    pub header: Option<CorpusHeader>,
    pub rows: Vec<Row>,
}

fn is_header(value: &serde_json::Value) -> bool {
    value.get("schema").is_some()
}

fn header_from(value: serde_json::Value, line: usize) -> Result<CorpusHeader, InputError> {
    let header: CorpusHeader =
        serde_json::from_value(value).map_err(|e| InputError::new(line, format!("header: {e}")))?;
    if header.schema != CORPUS_SCHEMA {
        return Err(InputError::new(line, format!("unsupported schema `{}`", header.schema)));
    }
    Ok(header)
}

fn record_from(value: serde_json::Value, line: usize) -> Result<QuintupleRecord, InputError> {
    serde_json::from_value(value).map_err(|e| InputError::new(line, e.to_string()))
}

/// Reads either one (possibly multi-line) quintuple object or a
/// newline-delimited corpus with an optional header line.
pub fn parse_input(text: &str) -> Result<Corpus, InputError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Ok(Corpus::default());
    }
    let first_line = text.lines().position(|l| !l.trim().is_empty()).unwrap_or(0) + 1;
    if let Ok(value) = serde_json::from_str::<serde_json::Value>(trimmed) {
        if value.is_object() {
            if is_header(&value) {
                return Ok(Corpus { header: Some(header_from(value, first_line)?), rows: vec![] });
            }
            let record = record_from(value, first_line)?;
            return Ok(Corpus { header: None, rows: vec![Row { line: first_line, record }] });
        }
    }
    let mut corpus = Corpus::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(raw).map_err(|e| InputError::new(line, format!("invalid JSON: {e}")))?;
        if is_header(&value) {
            if corpus.header.is_some() || !corpus.rows.is_empty() {
                return Err(InputError::new(line, "header must be the first line"));
            }
            corpus.header = Some(header_from(value, line)?);
        } else {
            corpus.rows.push(Row { line, record: record_from(value, line)? });
        }
    }
    Ok(corpus)
}

pub fn parse_quintuple(text: &str) -> Result<QuintupleRecord, InputError> {
    let corpus = parse_input(text)?;
    match corpus.rows.as_slice() {
        [row] => Ok(row.record.clone()),
        rows => Err(InputError::new(1, format!("expected exactly one quintuple, found {}", rows.len()))),
    }
}

/// Writes `f64` values as `{:.16e}` (17 significant digits); non-finite
/// values become `null`.
#[derive(Debug, Clone, Copy, Default)]
pub struct FullPrecision;

impl serde_json::ser::Formatter for FullPrecision {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Compact single-line JSON with full-precision numbers.
pub fn to_json_line<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision);
    value.serialize(&mut ser).expect("in-memory serialization");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// Header line plus one line per row.
pub fn write_corpus(header: &CorpusHeader, rows: &[QuintupleRecord]) -> String {
    let mut out = to_json_line(header);
    out.push('\n');
    for r in rows {
        out.push_str(&to_json_line(r));
        out.push('\n');
    }
    out
}

/// Row-major 4×4 matrix with a representation tag; `im` is omitted for
/// exactly real matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub kind: RepKind,
    pub re: [f64; 16],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<[f64; 16]>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMat4, kind: RepKind) -> Self {
        let re = std::array::from_fn(|i| m[(i / 4, i % 4)].re);
        let im = (!linalg::is_exactly_real(m)).then(|| std::array::from_fn(|i| m[(i / 4, i % 4)].im));
        Self { kind, re, im }
    }

    pub fn to_matrix(&self) -> CMat4 {
        CMat4::from_fn(|r, c| C64::new(self.re[4 * r + c], self.im.map_or(0.0, |im| im[4 * r + c])))
    }
}
