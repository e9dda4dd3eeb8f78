//! Binary questionnaire responses and per-attribute frequency statistics.
//!
//! Input is a flat CSV: a header line of attribute names followed by one line
//! per respondent, each cell `0` or `1`. Quoting is not supported, so names
//! cannot contain commas.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

/// Index of a questionnaire attribute (a column of the response matrix).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AttributeId(pub usize);

impl AttributeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for AttributeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurveyError {
    #[error("input is empty")]
    EmptyInput,
    #[error("line {line}: empty attribute name in column {column}")]
    EmptyHeader { line: usize, column: usize },
    #[error("line {line}: duplicate attribute name {name:?} in column {column}")]
    DuplicateHeader {
        line: usize,
        column: usize,
        name: String,
    },
    #[error("line {line}: expected {expected} cells, found {found}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}, column {column}: expected 0 or 1, found {value:?}")]
    NonBinaryValue {
        line: usize,
        column: usize,
        value: String,
    },
    #[error("input has a header but no response rows")]
    NoRows,
}

/// N respondents by M binary attributes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseMatrix {
    attribute_names: Vec<String>,
    rows: Vec<Vec<bool>>,
}

impl ResponseMatrix {
    /// Builds a matrix from already-validated parts. Fails with the same errors
    /// the parser would report, with line numbers counted as if the data came
    /// from a CSV file (header on line 1).
    pub fn new(attribute_names: Vec<String>, rows: Vec<Vec<bool>>) -> Result<Self, SurveyError> {
        if attribute_names.is_empty() {
            return Err(SurveyError::EmptyInput);
        }
        let mut seen = HashSet::new();
        for (column, name) in attribute_names.iter().enumerate() {
            if name.is_empty() {
                return Err(SurveyError::EmptyHeader {
                    line: 1,
                    column: column + 1,
                });
            }
            if !seen.insert(name.as_str()) {
                return Err(SurveyError::DuplicateHeader {
                    line: 1,
                    column: column + 1,
                    name: name.clone(),
                });
            }
        }
        if rows.is_empty() {
            return Err(SurveyError::NoRows);
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != attribute_names.len() {
                return Err(SurveyError::RaggedRow {
                    line: i + 2,
                    expected: attribute_names.len(),
                    found: row.len(),
                });
            }
        }
        Ok(ResponseMatrix {
            attribute_names,
            rows,
        })
    }

    /// Convenience constructor for 0/1 integer rows with generated names `A`, `B`, ...
    /// (`A0`, `B0`, ... past 26 columns).
    pub fn from_bits(rows: &[Vec<u8>]) -> Result<Self, SurveyError> {
        let width = rows.first().map_or(0, Vec::len);
        let names = (0..width).map(default_name).collect();
        let mut bool_rows = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => out.push(false),
                    1 => out.push(true),
                    _ => {
                        return Err(SurveyError::NonBinaryValue {
                            line: i + 2,
                            column: j + 1,
                            value: v.to_string(),
                        })
                    }
                }
            }
            bool_rows.push(out);
        }
        ResponseMatrix::new(names, bool_rows)
    }

    pub fn attribute_names(&self) -> &[String] {
        &self.attribute_names
    }

    pub fn name(&self, id: AttributeId) -> &str {
        &self.attribute_names[id.0]
    }

    pub fn attribute_id(&self, name: &str) -> Option<AttributeId> {
        self.attribute_names
            .iter()
            .position(|n| n == name)
            .map(AttributeId)
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }

    /// Number of respondents (N).
    pub fn respondents(&self) -> usize {
        self.rows.len()
    }

    /// Number of attributes (M).
    pub fn attributes(&self) -> usize {
        self.attribute_names.len()
    }

    pub fn column(&self, id: AttributeId) -> Vec<bool> {
        self.rows.iter().map(|r| r[id.0]).collect()
    }

    pub fn column_count(&self, id: AttributeId) -> usize {
        self.rows.iter().filter(|r| r[id.0]).count()
    }

    /// Serializes back to the CSV input format, LF line endings, trailing newline.
    pub fn to_csv(&self) -> String {
        let mut out = self.attribute_names.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<&str> = row.iter().map(|&b| if b { "1" } else { "0" }).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn default_name(i: usize) -> String {
    let letter = (b'A' + (i % 26) as u8) as char;
    if i < 26 {
        letter.to_string()
    } else {
        format!("{}{}", letter, i / 26 - 1)
    }
}

/// Parses the CSV survey format. Accepts LF or CRLF line endings and an
/// optional trailing newline. Blank lines are not allowed.
pub fn parse_survey(text: &str) -> Result<ResponseMatrix, SurveyError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    if text.is_empty() {
        return Err(SurveyError::EmptyInput);
    }
    let body = text
        .strip_suffix("\r\n")
        .or_else(|| text.strip_suffix('\n'))
        .unwrap_or(text);
    let mut lines = body.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l));

    let header = lines.next().ok_or(SurveyError::EmptyInput)?;
    if header.is_empty() {
        return Err(SurveyError::EmptyInput);
    }
    let names: Vec<String> = header.split(',').map(str::to_owned).collect();
    let width = names.len();

    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let cells: Vec<&str> = if line.is_empty() {
            Vec::new()
        } else {
            line.split(',').collect()
        };
        if cells.len() != width {
            return Err(SurveyError::RaggedRow {
                line: line_no,
                expected: width,
                found: cells.len(),
            });
        }
        let row = cells
            .iter()
            .enumerate()
            .map(|(j, cell)| match *cell {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(SurveyError::NonBinaryValue {
                    line: line_no,
                    column: j + 1,
                    value: other.to_owned(),
                }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    ResponseMatrix::new(names, rows)
}

/// Per-attribute support, kept as integer counts over a fixed respondent total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyVector {
    counts: Vec<usize>,
    respondents: usize,
}

impl FrequencyVector {
    pub fn from_counts(counts: Vec<usize>, respondents: usize) -> Self {
        assert!(
            respondents > 0,
            "frequency vector needs at least one respondent"
        );
        assert!(counts.iter().all(|&c| c <= respondents));
        FrequencyVector {
            counts,
            respondents,
        }
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn respondents(&self) -> usize {
        self.respondents
    }

    pub fn count(&self, id: AttributeId) -> usize {
        self.counts[id.0]
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn support(&self, id: AttributeId) -> f64 {
        self.counts[id.0] as f64 / self.respondents as f64
    }

    pub fn supports(&self) -> Vec<f64> {
        (0..self.counts.len())
            .map(|j| self.support(AttributeId(j)))
            .collect()
    }
}

pub fn attribute_frequencies(matrix: &ResponseMatrix) -> FrequencyVector {
    let mut counts = vec![0usize; matrix.attributes()];
    for row in matrix.rows() {
        for (c, &cell) in counts.iter_mut().zip(row) {
            *c += usize::from(cell);
        }
    }
    FrequencyVector::from_counts(counts, matrix.respondents())
}

/// Attributes whose support is at least `threshold`, most frequent first.
/// Equal supports keep ascending attribute order.
pub fn select_top_requirements(freqs: &FrequencyVector, threshold: f64) -> Vec<AttributeId> {
    let mut picked: Vec<AttributeId> = (0..freqs.len())
        .map(AttributeId)
        .filter(|&id| freqs.support(id) >= threshold)
        .collect();
    // counts share one denominator, so comparing them is exact
    picked.sort_by(|a, b| freqs.count(*b).cmp(&freqs.count(*a)).then(a.cmp(b)));
    picked
}
