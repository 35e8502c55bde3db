//! The line-oriented multi-label text format.
//!
//! ```text
//! 1,3 2:0.5 7:1.0
//!  4:2.0
//! ```
//!
//! The first whitespace-separated token is a comma-separated list of 1-based
//! labels; the remaining tokens are `index:value` pairs with strictly
//! increasing 1-based indices. A line starting with whitespace has an empty
//! label set. Completely empty lines are skipped.

use std::io::{BufRead, Write};

use super::{LabelVector, MultiLabelDataset, SparseVector};
use crate::error::{Error, Result};

fn parse_labels(field: &str, num_labels: usize, line: usize) -> Result<LabelVector> {
    let mut labels = LabelVector::negative(num_labels);
    if field.is_empty() {
        return Ok(labels);
    }
    for tok in field.split(',') {
        let k: usize = tok
            .parse()
            .map_err(|_| Error::parse(line, format!("malformed label `{tok}`")))?;
        if k == 0 || k > num_labels {
            return Err(Error::parse(
                line,
                format!("label {k} outside [1, {num_labels}]"),
            ));
        }
        labels.set(k - 1, true);
    }
    Ok(labels)
}

/// Splits a line into its label field (possibly empty) and the remaining tokens.
fn split_label_field(line: &str) -> (&str, &str) {
    if line.starts_with(char::is_whitespace) {
        return ("", line);
    }
    let (first, rest) = line
        .split_once(char::is_whitespace)
        .unwrap_or((line, ""));
    if first.contains(':') {
        // no label field at all, the line starts with a feature
        ("", line)
    } else {
        (first, rest)
    }
}

fn parse_features(rest: &str, line: usize) -> Result<SparseVector> {
    let mut entries = Vec::new();
    let mut prev = 0usize;
    for tok in rest.split_whitespace() {
        let (idx, val) = tok
            .split_once(':')
            .ok_or_else(|| Error::parse(line, format!("malformed feature `{tok}`")))?;
        let idx: usize = idx
            .parse()
            .map_err(|_| Error::parse(line, format!("malformed feature index in `{tok}`")))?;
        let val: f64 = val
            .parse()
            .map_err(|_| Error::parse(line, format!("malformed feature value in `{tok}`")))?;
        if idx == 0 {
            return Err(Error::parse(line, "feature indices are 1-based"));
        }
        if idx <= prev {
            return Err(Error::parse(
                line,
                format!("feature index {idx} does not increase past {prev}"),
            ));
        }
        if !val.is_finite() {
            return Err(Error::parse(
                line,
                format!("non-finite value at feature {idx}"),
            ));
        }
        prev = idx;
        entries.push((idx, val));
    }
    SparseVector::new(entries).map_err(|e| Error::parse(line, e.to_string()))
}

/// Reads a dataset. `num_features` defaults to the largest index seen.
pub fn parse_dataset<R: BufRead>(
    reader: R,
    num_labels: usize,
    num_features: Option<usize>,
) -> Result<MultiLabelDataset> {
    let mut instances = Vec::new();
    let mut labels = Vec::new();
    let mut max_index = 0;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.is_empty() {
            continue;
        }
        let lineno = lineno + 1;
        let (label_field, rest) = split_label_field(line);
        let s = parse_labels(label_field, num_labels, lineno)?;
        let x = parse_features(rest, lineno)?;
        max_index = max_index.max(x.max_index());
        if let Some(d) = num_features {
            if x.max_index() > d {
                return Err(Error::parse(
                    lineno,
                    format!("feature index {} exceeds dimension {d}", x.max_index()),
                ));
            }
        }
        instances.push(x);
        labels.push(s);
    }
    MultiLabelDataset::new(
        num_features.unwrap_or(max_index),
        num_labels,
        instances,
        labels,
        None,
    )
}

fn write_labels<W: Write>(w: &mut W, labels: &LabelVector) -> std::io::Result<()> {
    for (j, k) in labels.positives().enumerate() {
        if j > 0 {
            w.write_all(b",")?;
        }
        write!(w, "{}", k + 1)?;
    }
    Ok(())
}

/// Writes the observed labels and features; parsing the output gives back
/// an identical dataset (ground truth is not written).
pub fn write_dataset<W: Write>(ds: &MultiLabelDataset, mut w: W) -> Result<()> {
    for (x, s) in ds.instances().iter().zip(ds.observed_labels()) {
        write_labels(&mut w, s)?;
        if s.count_positive() == 0 && x.is_empty() {
            // a lone space keeps the empty instance from reading as a blank line
            w.write_all(b" ")?;
        }
        for (idx, v) in x.iter() {
            write!(w, " {idx}:{v}")?;
        }
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads one label set per line, including empty lines (empty set).
///
/// Accepts prediction files (label list optionally followed by
/// probabilities) and dataset files (features are ignored).
pub fn parse_label_sets<R: BufRead>(reader: R, num_labels: usize) -> Result<Vec<LabelVector>> {
    let mut out = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        let (field, _) = split_label_field(line);
        out.push(parse_labels(field, num_labels, lineno + 1)?);
    }
    Ok(out)
}

/// Writes one label set per line as comma-separated 1-based labels.
///
/// When `probabilities` is given, each line is followed by its q
/// space-separated probabilities.
pub fn write_label_sets<W: Write>(
    labels: &[LabelVector],
    probabilities: Option<&[Vec<f64>]>,
    mut w: W,
) -> Result<()> {
    for (i, s) in labels.iter().enumerate() {
        write_labels(&mut w, s)?;
        if let Some(probs) = probabilities {
            for p in &probs[i] {
                write!(w, " {p}")?;
            }
        }
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}
