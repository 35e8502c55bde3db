//! Text model files.
//!
//! ```text
//! SMILE-MODEL v1
//! levels 2 labels 3 features 5
//! level 0 label 1 c 6.9999999999999996e-1 bias -1.2000000000000000e0 nnz 2
//! 1:2.5000000000000000e-1 4:-1.0000000000000000e0
//! ...
//! ```
//!
//! Levels are 0-based, labels and feature indices 1-based. Numbers carry 17
//! significant digits, which round-trips every `f64`. Weights smaller than
//! [`WEIGHT_EPSILON`] in magnitude are omitted and read back as zero. A
//! non-default augmentation is recorded as a trailing `augment <kind>` on the
//! second line.

use std::io::{BufRead, Write};

use super::{Augmentation, StackedModel};
use crate::error::{Error, Result};
use crate::pu::PUBinaryModel;

pub const MODEL_HEADER: &str = "SMILE-MODEL v1";
pub const WEIGHT_EPSILON: f64 = 1e-12;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn save_model<W: Write>(model: &StackedModel, mut w: W) -> Result<()> {
    writeln!(w, "{MODEL_HEADER}")?;
    write!(
        w,
        "levels {} labels {} features {}",
        model.levels().len(),
        model.num_labels(),
        model.base_features()
    )?;
    if model.augmentation() != Augmentation::Probability {
        write!(w, " augment {}", model.augmentation().name())?;
    }
    writeln!(w)?;
    for (l, level) in model.levels().iter().enumerate() {
        for (k, m) in level.iter().enumerate() {
            let kept: Vec<(usize, f64)> = m
                .weights()
                .iter()
                .enumerate()
                .filter(|(_, w)| w.abs() >= WEIGHT_EPSILON)
                .map(|(j, &w)| (j + 1, w))
                .collect();
            writeln!(
                w,
                "level {l} label {} c {} bias {} nnz {}",
                k + 1,
                num(m.label_frequency_c()),
                num(m.bias()),
                kept.len()
            )?;
            let line: Vec<String> = kept.iter().map(|&(j, v)| format!("{j}:{}", num(v))).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
    }
    w.flush()?;
    Ok(())
}

fn format_err(msg: impl Into<String>) -> Error {
    Error::ModelFormat(msg.into())
}

/// Expects `key value` pairs in a fixed order and returns the values.
fn keyed<'a>(line: &'a str, keys: &[&str]) -> Result<Vec<&'a str>> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() != keys.len() * 2 {
        return Err(format_err(format!("malformed line `{line}`")));
    }
    toks.chunks(2)
        .zip(keys)
        .map(|(pair, key)| {
            if pair[0] == *key {
                Ok(pair[1])
            } else {
                Err(format_err(format!("expected `{key}` in `{line}`")))
            }
        })
        .collect()
}

fn parse_usize(s: &str, what: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| format_err(format!("bad {what} `{s}`")))
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    let v: f64 = s
        .parse()
        .map_err(|_| format_err(format!("bad {what} `{s}`")))?;
    if !v.is_finite() {
        return Err(format_err(format!("non-finite {what}")));
    }
    Ok(v)
}

pub fn load_model<R: BufRead>(reader: R) -> Result<StackedModel> {
    let mut lines = reader.lines();
    let mut next = |what: &str| -> Result<String> {
        match lines.next() {
            Some(line) => Ok(line?),
            None => Err(format_err(format!("truncated file: missing {what}"))),
        }
    };

    let header = next("header")?;
    if header.trim_end() != MODEL_HEADER {
        return Err(format_err(format!(
            "unsupported version: expected `{MODEL_HEADER}`, found `{}`",
            header.trim_end()
        )));
    }

    let shape = next("shape line")?;
    let (shape_part, augmentation) = match shape.split_once(" augment ") {
        Some((head, kind)) => {
            let aug = Augmentation::from_name(kind.trim())
                .ok_or_else(|| format_err(format!("unknown augmentation `{}`", kind.trim())))?;
            (head, aug)
        }
        None => (shape.as_str(), Augmentation::Probability),
    };
    let vals = keyed(shape_part, &["levels", "labels", "features"])?;
    let num_levels = parse_usize(vals[0], "level count")?;
    let q = parse_usize(vals[1], "label count")?;
    let d = parse_usize(vals[2], "feature count")?;
    if num_levels == 0 {
        return Err(format_err("a model needs at least one level"));
    }

    let mut levels = Vec::with_capacity(num_levels);
    for l in 0..num_levels {
        let dim = d + l * q;
        let mut level = Vec::with_capacity(q);
        for k in 0..q {
            let head = next(&format!("level {l} label {}", k + 1))?;
            let v = keyed(&head, &["level", "label", "c", "bias", "nnz"])?;
            if parse_usize(v[0], "level")? != l || parse_usize(v[1], "label")? != k + 1 {
                return Err(format_err(format!(
                    "expected level {l} label {}, found `{head}`",
                    k + 1
                )));
            }
            let c = parse_f64(v[2], "c")?;
            let bias = parse_f64(v[3], "bias")?;
            let nnz = parse_usize(v[4], "nnz")?;

            let body = next(&format!("weights of level {l} label {}", k + 1))?;
            let mut weights = vec![0.0; dim];
            let mut count = 0;
            let mut prev = 0;
            for tok in body.split_whitespace() {
                let (j, w) = tok
                    .split_once(':')
                    .ok_or_else(|| format_err(format!("bad weight `{tok}`")))?;
                let j = parse_usize(j, "weight index")?;
                if j == 0 || j > dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: j,
                    });
                }
                if j <= prev {
                    return Err(format_err(format!("weight index {j} out of order")));
                }
                prev = j;
                weights[j - 1] = parse_f64(w, "weight")?;
                count += 1;
            }
            if count != nnz {
                return Err(format_err(format!(
                    "level {l} label {}: header says {nnz} weights, found {count}",
                    k + 1
                )));
            }
            level.push(PUBinaryModel::new(weights, bias, c).map_err(|e| format_err(e.to_string()))?);
        }
        levels.push(level);
    }
    for line in lines {
        if !line?.trim().is_empty() {
            return Err(format_err("unexpected content after the last model"));
        }
    }
    StackedModel::new(q, d, augmentation, levels)
}
