//! Parsing of matrix, point and complex-number arguments.

use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context};
use serde::Serialize;
use specball_core::cmatrix::{jordan_build, parse_block_spec, ComplexMatrix};
use specball_core::domains::GPoint;
use specball_core::Complex64;

/// Where an input came from, recorded in the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Source {
    File(String),
    InlineJson(String),
    BlockSpec(String),
    RealList(String),
}

/// Reads `arg` as a JSON file, inline JSON, or otherwise as `text` itself.
fn json_text(arg: &str) -> anyhow::Result<Option<(String, Source)>> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {arg}"))?;
        return Ok(Some((text, Source::File(arg.to_string()))));
    }
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(Some((arg.to_string(), Source::InlineJson(arg.to_string()))));
    }
    Ok(None)
}

/// A matrix from a `{"n", "entries"}` JSON file, the same JSON inline, or a
/// Jordan block spec such as `0:2,0:1;0.8:1`.
pub fn matrix(arg: &str) -> anyhow::Result<(ComplexMatrix, Source)> {
    if let Some((text, source)) = json_text(arg)? {
        let m: ComplexMatrix = serde_json::from_str(&text).context("malformed matrix JSON")?;
        return Ok((m, source));
    }
    let blocks = parse_block_spec(arg).context("malformed block spec")?;
    let m = jordan_build(&blocks).context("cannot build Jordan matrix")?;
    Ok((m, Source::BlockSpec(arg.to_string())))
}

/// A point of `ℂⁿ` from `{"n", "z"}` JSON, a JSON array of numbers or
/// `[re, im]` pairs, or a comma-separated list of reals.
pub fn point(arg: &str) -> anyhow::Result<(GPoint, Source)> {
    if let Some((text, source)) = json_text(arg)? {
        let value: serde_json::Value = serde_json::from_str(&text).context("malformed point JSON")?;
        let p = match value {
            serde_json::Value::Array(items) => GPoint::new(
                items
                    .iter()
                    .map(json_complex)
                    .collect::<anyhow::Result<_>>()
                    .context("malformed point JSON")?,
            ),
            other => {
                let p: GPoint = serde_json::from_value(other).context("malformed point JSON")?;
                if p.z.len() != p.n {
                    bail!("malformed point JSON: n = {} but {} coordinates", p.n, p.z.len());
                }
                p
            }
        };
        if p.n == 0 {
            bail!("point must have at least one coordinate");
        }
        return Ok((p, source));
    }
    let values: Vec<f64> = arg
        .split(',')
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("cannot parse coordinate {s:?}")))
        .collect::<anyhow::Result<_>>()?;
    Ok((GPoint::from_real(&values), Source::RealList(arg.to_string())))
}

fn json_complex(v: &serde_json::Value) -> anyhow::Result<Complex64> {
    if let Some(x) = v.as_f64() {
        return Ok(Complex64::new(x, 0.0));
    }
    match v.as_array().map(|a| a.as_slice()) {
        Some([re, im]) => match (re.as_f64(), im.as_f64()) {
            (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
            _ => bail!("coordinate {v} is not a pair of numbers"),
        },
        _ => bail!("coordinate {v} is neither a number nor an [re, im] pair"),
    }
}

/// `0.5`, `-0.3i`, `0.2+0.1i`.
pub fn complex(arg: &str) -> anyhow::Result<Complex64> {
    Complex64::from_str(arg.trim()).map_err(|_| anyhow::anyhow!("cannot parse complex number {arg:?}"))
}
