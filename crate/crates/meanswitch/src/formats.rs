//! Text formats accepted on the command line and in input files.

use std::io::Read;

use meanswitch_core::{Error, GeneratorSpec, Interval, Kernel, ProbabilityVector, SimpleMeasure, ValueMatrix};
use serde_json::Value;

use crate::error::{CliError, CliResult};

fn parse_number(text: &str) -> CliResult<f64> {
    let x: f64 = text.trim().parse().map_err(|_| Error::Parse(format!("`{}` is not a number", text.trim())))?;
    if !x.is_finite() {
        return Err(Error::Parse(format!("`{}` is not finite", text.trim())).into());
    }
    Ok(x)
}

/// Comma-separated finite decimals.
pub fn parse_list(text: &str) -> CliResult<Vec<f64>> {
    if text.trim().is_empty() {
        return Err(Error::Parse("empty list".into()).into());
    }
    text.split(',').map(parse_number).collect()
}

/// `lo,hi`.
pub fn parse_interval(text: &str) -> CliResult<Interval> {
    match parse_list(text)?.as_slice() {
        [lo, hi] => Ok(Interval::new(*lo, *hi)?),
        _ => Err(Error::Parse(format!("interval `{text}` must be `lo,hi`")).into()),
    }
}

pub fn parse_weights(text: &str) -> CliResult<ProbabilityVector> {
    Ok(ProbabilityVector::new(parse_list(text)?)?)
}

pub fn parse_generator(text: &str) -> CliResult<GeneratorSpec> {
    Ok(text.parse()?)
}

/// Contents of `path`, or of standard input for `-`.
pub fn read_source(path: &str) -> CliResult<String> {
    let mut text = String::new();
    let result = if path == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    result.map_err(|source| CliError::Io { path: path.to_string(), source })?;
    Ok(text)
}

/// A matrix from JSON (`{"rows","cols","data"}`, row-major) or CSV (one row
/// per line). The format is chosen by the first non-blank character.
pub fn parse_matrix(text: &str) -> CliResult<ValueMatrix> {
    if text.trim_start().starts_with('{') {
        parse_matrix_json(text)
    } else {
        parse_matrix_csv(text)
    }
}

fn parse_matrix_csv(text: &str) -> CliResult<ValueMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Input(e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        rows.push(record.iter().map(parse_number).collect::<CliResult<Vec<f64>>>()?);
    }
    if rows.is_empty() {
        return Err(Error::InvalidMatrix("no rows").into());
    }
    let cols = rows[0].len();
    if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
        return Err(Error::LengthMismatch { expected: cols, found: bad.len() }.into());
    }
    Ok(ValueMatrix::from_rows(&rows)?)
}

fn field<'a>(obj: &'a Value, key: &str) -> CliResult<&'a Value> {
    obj.get(key).ok_or_else(|| CliError::Input(format!("missing field `{key}`")))
}

fn float_array(value: &Value, what: &str) -> CliResult<Vec<f64>> {
    value
        .as_array()
        .ok_or_else(|| CliError::Input(format!("`{what}` must be an array")))?
        .iter()
        .map(|v| v.as_f64().ok_or_else(|| CliError::Input(format!("`{what}` must hold numbers"))))
        .collect()
}

fn parse_matrix_json(text: &str) -> CliResult<ValueMatrix> {
    let v: Value = serde_json::from_str(text).map_err(|e| CliError::Input(e.to_string()))?;
    let dim = |key: &str| -> CliResult<usize> {
        field(&v, key)?.as_u64().map(|d| d as usize).ok_or_else(|| CliError::Input(format!("`{key}` must be a count")))
    };
    let (rows, cols) = (dim("rows")?, dim("cols")?);
    Ok(ValueMatrix::new(rows, cols, float_array(field(&v, "data")?, "data")?)?)
}

pub fn matrix_to_csv(matrix: &ValueMatrix) -> String {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for i in 0..matrix.rows() {
        writer
            .write_record(matrix.row(i).iter().map(|x| crate::canonical::format_float(*x)))
            .expect("writing to memory");
    }
    String::from_utf8(writer.into_inner().expect("writing to memory")).expect("csv output is ASCII")
}

/// `{"atoms": [[location, mass], ...], "uniform": weight}`; either field may
/// be omitted. Accepts the JSON inline or a path to a file holding it.
pub fn parse_measure(arg: &str) -> CliResult<SimpleMeasure> {
    let text = if arg.trim_start().starts_with('{') { arg.to_string() } else { read_source(arg)? };
    let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Input(e.to_string()))?;
    if !v.is_object() {
        return Err(CliError::Input("a measure must be a JSON object".into()));
    }
    let atoms = match v.get("atoms") {
        None => Vec::new(),
        Some(list) => list
            .as_array()
            .ok_or_else(|| CliError::Input("`atoms` must be an array".into()))?
            .iter()
            .map(|pair| match float_array(pair, "atoms")?.as_slice() {
                [loc, mass] => Ok((*loc, *mass)),
                _ => Err(CliError::Input("each atom is [location, mass]".into())),
            })
            .collect::<CliResult<Vec<_>>>()?,
    };
    let uniform = match v.get("uniform") {
        None => 0.0,
        Some(u) => u.as_f64().ok_or_else(|| CliError::Input("`uniform` must be a number".into()))?,
    };
    Ok(SimpleMeasure::new(atoms, uniform)?)
}

/// `bilinear:c00,c10,c01,c11` or `step:a,b,c,d,s,t`.
pub fn parse_kernel(text: &str) -> CliResult<Kernel> {
    let (kind, rest) = text.split_once(':').ok_or_else(|| Error::Parse(format!("kernel `{text}` needs a kind prefix")))?;
    let c = parse_list(rest)?;
    match (kind.trim(), c.as_slice()) {
        ("bilinear", [c00, c10, c01, c11]) => Ok(Kernel::bilinear(*c00, *c10, *c01, *c11)?),
        ("step", [a, b, cc, d, s, t]) => Ok(Kernel::step(*a, *b, *cc, *d, *s, *t)?),
        ("bilinear", _) => Err(Error::Parse("bilinear kernels take 4 coefficients".into()).into()),
        ("step", _) => Err(Error::Parse("step kernels take a,b,c,d,s,t".into()).into()),
        (other, _) => Err(Error::Parse(format!("unknown kernel kind `{other}`")).into()),
    }
}
