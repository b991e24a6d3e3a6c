//! Text and JSON serialization.
//!
//! Text layout: an optional `# model: <tag>` comment, a header line `n m`,
//! then one line per edge, `k v1 ... vk`, with the ids strictly increasing.
//! Lines starting with `#` are comments.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Hypergraph, ModelTag};
use crate::error::{Error, Result};

pub fn to_text(h: &Hypergraph) -> String {
    let mut out = String::with_capacity(16 + h.incidence_count() * 6);
    if let Some(tag) = h.model_tag() {
        let _ = writeln!(out, "# model: {}", tag.as_str());
    }
    let _ = writeln!(out, "{} {}", h.n(), h.m());
    for e in h.edges() {
        out.push_str(&e.len().to_string());
        for v in e {
            out.push(' ');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out
}

pub fn from_text(text: &str) -> Result<Hypergraph> {
    let mut tag = None;
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<Vec<u32>> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(value) = comment.trim().strip_prefix("model:") {
                tag = ModelTag::parse(value.trim());
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let mut nums = line.split_whitespace().map(|tok| {
            tok.parse::<u64>()
                .map_err(|_| parse_err(format!("not a non-negative integer: {tok:?}")))
        });
        match header {
            None => {
                let n = nums.next().ok_or_else(|| parse_err("missing n".into()))??;
                let m = nums.next().ok_or_else(|| parse_err("missing m".into()))??;
                if nums.next().is_some() {
                    return Err(parse_err("header must be `n m`".into()));
                }
                if n > u32::MAX as u64 {
                    return Err(parse_err("n exceeds u32 range".into()));
                }
                header = Some((n as usize, m as usize));
                edges.reserve(m.min(1 << 20) as usize);
            }
            Some((n, m)) => {
                if edges.len() == m {
                    return Err(parse_err(format!("more than the declared {m} edges")));
                }
                let k = nums.next().ok_or_else(|| parse_err("missing edge size".into()))??;
                let ids = nums.collect::<Result<Vec<u64>>>()?;
                if ids.len() as u64 != k {
                    return Err(parse_err(format!("edge declares {k} ids but lists {}", ids.len())));
                }
                let mut edge = Vec::with_capacity(ids.len());
                for (j, &v) in ids.iter().enumerate() {
                    if v >= n as u64 {
                        return Err(parse_err(format!("vertex id {v} out of range for n = {n}")));
                    }
                    if j > 0 && ids[j - 1] >= v {
                        return Err(parse_err("vertex ids must be strictly increasing".into()));
                    }
                    edge.push(v as u32);
                }
                edges.push(edge);
            }
        }
    }

    let (n, m) = header.ok_or(Error::Parse {
        line: last_line.max(1),
        message: "missing `n m` header".into(),
    })?;
    if edges.len() != m {
        return Err(Error::Parse {
            line: last_line.max(1),
            message: format!("expected {m} edges, found {}", edges.len()),
        });
    }
    Ok(Hypergraph::new(n, edges)?.with_tag(tag))
}

#[derive(Serialize, Deserialize)]
struct JsonHypergraph {
    n: usize,
    m: usize,
    edges: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    model_tag: Option<ModelTag>,
}

pub fn to_json(h: &Hypergraph) -> String {
    serde_json::to_string(&JsonHypergraph {
        n: h.n(),
        m: h.m(),
        edges: h.edges().to_vec(),
        model_tag: h.model_tag(),
    })
    .expect("hypergraph serializes")
}

pub fn from_json(text: &str) -> Result<Hypergraph> {
    let j: JsonHypergraph = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    if j.edges.len() != j.m {
        return Err(Error::Parse {
            line: 1,
            message: format!("m = {} but {} edges listed", j.m, j.edges.len()),
        });
    }
    Ok(Hypergraph::new(j.n, j.edges)?.with_tag(j.model_tag))
}

fn is_json_path(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Writes `h` as text, or as JSON when the path ends in `.json`.
pub fn save(h: &Hypergraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let body = if is_json_path(path) {
        to_json(h)
    } else {
        to_text(h)
    };
    std::fs::write(path, body).map_err(|e| Error::io(path, e))
}

/// Reads either format; JSON is recognized by a leading `{`.
pub fn load(path: impl AsRef<Path>) -> Result<Hypergraph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if text.trim_start().starts_with('{') {
        from_json(&text)
    } else {
        from_text(&text)
    }
}
