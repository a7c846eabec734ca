//! Reading and writing count files.
//!
//! JSON:
//!
//! ```json
//! { "axes": [ { "axis": 1, "n_plus": 80, "n_minus": 20 }, ... ] }
//! ```
//!
//! CSV: header `axis,n_plus,n_minus` followed by exactly three rows. In both
//! formats each axis 1, 2, 3 appears exactly once, in any order.

use serde::Serialize;
use serde_json::Value;
use stokes_mle::CountRecord;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Picks JSON when the first non-blank character opens an object.
pub fn sniff(text: &str) -> Format {
    if text.trim_start().starts_with('{') {
        Format::Json
    } else {
        Format::Csv
    }
}

pub fn parse(text: &str, format: Format) -> Result<CountRecord, CliError> {
    match format {
        Format::Json => parse_json(text),
        Format::Csv => parse_csv(text),
    }
}

#[derive(Serialize)]
struct AxisJson {
    axis: u64,
    n_plus: u64,
    n_minus: u64,
}

#[derive(Serialize)]
struct CountsJson {
    axes: Vec<AxisJson>,
}

pub fn emit(counts: &CountRecord, format: Format) -> String {
    match format {
        Format::Json => {
            let axes: Vec<AxisJson> = (0..3)
                .map(|i| AxisJson { axis: i as u64 + 1, n_plus: counts.n_plus[i], n_minus: counts.n_minus[i] })
                .collect();
            let mut text = serde_json::to_string_pretty(&CountsJson { axes }).expect("plain JSON");
            text.push('\n');
            text
        }
        Format::Csv => {
            let mut text = String::from("axis,n_plus,n_minus\n");
            for i in 0..3 {
                text.push_str(&format!("{},{},{}\n", i + 1, counts.n_plus[i], counts.n_minus[i]));
            }
            text
        }
    }
}

fn input(message: impl Into<String>) -> CliError {
    CliError::Input(message.into())
}

/// Collects (axis, n_plus, n_minus) triples into a record.
struct Assembler {
    n_plus: [Option<u64>; 3],
    n_minus: [u64; 3],
}

impl Assembler {
    fn new() -> Self {
        Self { n_plus: [None; 3], n_minus: [0; 3] }
    }

    fn add(&mut self, location: &str, axis: u64, n_plus: u64, n_minus: u64) -> Result<(), CliError> {
        if !(1..=3).contains(&axis) {
            return Err(input(format!("{location}.axis: expected 1, 2 or 3, got {axis}")));
        }
        let slot = axis as usize - 1;
        if self.n_plus[slot].is_some() {
            return Err(input(format!("{location}.axis: duplicate record for axis {axis}")));
        }
        if n_plus.checked_add(n_minus).is_none_or(|total| total == 0) {
            return Err(input(format!(
                "{location}: n_plus + n_minus must be at least 1 and fit in 64 bits"
            )));
        }
        self.n_plus[slot] = Some(n_plus);
        self.n_minus[slot] = n_minus;
        Ok(())
    }

    fn finish(self) -> Result<CountRecord, CliError> {
        let mut n_plus = [0; 3];
        for (slot, value) in self.n_plus.iter().enumerate() {
            n_plus[slot] = value.ok_or_else(|| input(format!("axes: missing record for axis {}", slot + 1)))?;
        }
        CountRecord::new(n_plus, self.n_minus).map_err(|e| input(e.to_string()))
    }
}

fn parse_json(text: &str) -> Result<CountRecord, CliError> {
    let root: Value = serde_json::from_str(text).map_err(|e| input(format!("malformed JSON: {e}")))?;
    let axes = root
        .get("axes")
        .ok_or_else(|| input("axes: missing field"))?
        .as_array()
        .ok_or_else(|| input("axes: expected an array of 3 records"))?;
    if axes.len() != 3 {
        return Err(input(format!("axes: expected exactly 3 records, got {}", axes.len())));
    }
    let mut assembler = Assembler::new();
    for (index, record) in axes.iter().enumerate() {
        let location = format!("axes[{index}]");
        let field = |name: &str| -> Result<u64, CliError> {
            record
                .get(name)
                .ok_or_else(|| input(format!("{location}.{name}: missing field")))?
                .as_u64()
                .ok_or_else(|| input(format!("{location}.{name}: expected a nonnegative integer")))
        };
        assembler.add(&location, field("axis")?, field("n_plus")?, field("n_minus")?)?;
    }
    assembler.finish()
}

fn parse_csv(text: &str) -> Result<CountRecord, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| input(format!("malformed CSV header: {e}")))?.clone();
    let expected = ["axis", "n_plus", "n_minus"];
    if headers.iter().ne(expected) {
        return Err(input(format!(
            "header: expected \"axis,n_plus,n_minus\", got \"{}\"",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut assembler = Assembler::new();
    let mut rows = 0;
    for (index, row) in reader.records().enumerate() {
        let row = row.map_err(|e| input(format!("row {}: {e}", index + 1)))?;
        rows += 1;
        if rows > 3 {
            return Err(input("rows: expected exactly 3 data rows, got more"));
        }
        let location = format!("row {}", index + 1);
        let values: Vec<u64> = expected
            .iter()
            .enumerate()
            .map(|(column, name)| {
                row.get(column)
                    .and_then(|v| v.parse::<u64>().ok())
                    .ok_or_else(|| input(format!("{location}.{name}: expected a nonnegative integer")))
            })
            .collect::<Result<_, _>>()?;
        assembler.add(&location, values[0], values[1], values[2])?;
    }
    if rows != 3 {
        return Err(input(format!("rows: expected exactly 3 data rows, got {rows}")));
    }
    assembler.finish()
}
