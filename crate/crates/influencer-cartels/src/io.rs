//! File formats for the external interfaces.
//!
//! All CSV files are plain comma-separated text without quoting. Lines
//! starting with `#` are comments; writers put a versioned schema string in
//! the first row and the resolved run configuration in a `# config:` row, so
//! identical runs produce identical bytes. `-` stands for stdin/stdout.
//!
//! Formats:
//! - embeddings: header `id,<dim>`, then `id,v1,...,vd` rows;
//! - panel: header `author_id,commenter_id,class,similarity`;
//! - submission log: header `member_id,post_id,timestamp`;
//! - engagement events: header `member_id,post_id,timestamp,kind` with kind
//!   `like` or `comment`;
//! - corpus: header `user_id,token`, one row per token occurrence in order;
//! - raw posts: header `user_id,text` where text is the line remainder.

use std::fs;
use std::io::Read;
use std::path::Path;

use crate::empirics::lda::CorpusDoc;
use crate::empirics::panel::{CommenterClass, PanelObservation};
use crate::empirics::similarity::EmbeddingVector;
use crate::error::{Error, Result};
use crate::pod::{EngagementEvent, EngagementKind, Submission};

fn io_err(path: &str, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_string(),
        source,
    }
}

fn parse_err(path: &str, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        line,
        msg: msg.into(),
    }
}

/// Read a file, or stdin when `path` is `-`.
pub fn read_to_string(path: &str) -> Result<String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| io_err(path, e))?;
        Ok(buf)
    } else {
        fs::read_to_string(path).map_err(|e| io_err(path, e))
    }
}

/// Write a file atomically (temp file in the same directory, then rename),
/// or to stdout when `path` is `-`.
pub fn write_output(path: &str, content: &str) -> Result<()> {
    if path == "-" {
        print!("{content}");
        return Ok(());
    }
    let target = Path::new(path);
    if let Some(parent) = target.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| io_err(path, e))?;
        }
    }
    let tmp = target.with_extension(format!(
        "{}tmp",
        target
            .extension()
            .map(|e| format!("{}.", e.to_string_lossy()))
            .unwrap_or_default()
    ));
    fs::write(&tmp, content).map_err(|e| io_err(&tmp.to_string_lossy(), e))?;
    fs::rename(&tmp, target).map_err(|e| io_err(path, e))?;
    Ok(())
}

/// Non-comment lines with their 1-based line numbers.
fn data_lines(content: &str) -> impl Iterator<Item = (usize, &str)> {
    content
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim_start().starts_with('#') && !l.trim().is_empty())
}

fn schema_header(schema: &str, config_json: Option<&str>) -> String {
    let mut out = format!("# schema: {schema}\n");
    if let Some(cfg) = config_json {
        out.push_str("# config: ");
        out.push_str(cfg);
        out.push('\n');
    }
    out
}

pub fn embeddings_csv(
    vectors: &[EmbeddingVector],
    config_json: Option<&str>,
) -> Result<String> {
    let d = vectors
        .first()
        .map(|v| v.values.len())
        .ok_or_else(|| Error::config("no embedding vectors to write".to_string()))?;
    let mut out = schema_header("embeddings v1", config_json);
    out.push_str(&format!("id,{d}\n"));
    for v in vectors {
        if v.values.len() != d {
            return Err(Error::domain(format!(
                "vector `{}` has dimension {} but the file header says {d}",
                v.id,
                v.values.len()
            )));
        }
        out.push_str(&v.id);
        for x in &v.values {
            out.push(',');
            out.push_str(&x.to_string());
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn read_embeddings(path: &str) -> Result<Vec<EmbeddingVector>> {
    let content = read_to_string(path)?;
    let mut lines = data_lines(&content);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "missing embeddings header `id,<dim>`"))?;
    let dim: usize = match header.split(',').collect::<Vec<_>>().as_slice() {
        ["id", d] => d
            .trim()
            .parse()
            .map_err(|_| parse_err(path, hline, format!("bad dimension `{d}` in header")))?,
        _ => {
            return Err(parse_err(
                path,
                hline,
                format!("expected header `id,<dim>`, got `{header}`"),
            ))
        }
    };
    let mut vectors = Vec::new();
    for (lineno, line) in lines {
        let mut parts = line.split(',');
        let id = parts
            .next()
            .ok_or_else(|| parse_err(path, lineno, "empty row"))?
            .to_string();
        let values: Vec<f64> = parts
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| parse_err(path, lineno, format!("bad number `{p}`")))
            })
            .collect::<Result<_>>()?;
        if values.len() != dim {
            return Err(parse_err(
                path,
                lineno,
                format!("vector `{id}` has {} components, header says {dim}", values.len()),
            ));
        }
        vectors.push(EmbeddingVector { id, values });
    }
    Ok(vectors)
}

pub fn panel_csv(panel: &[PanelObservation], config_json: Option<&str>) -> String {
    let mut out = schema_header("panel v1", config_json);
    out.push_str("author_id,commenter_id,class,similarity\n");
    for obs in panel {
        out.push_str(&format!(
            "{},{},{},{}\n",
            obs.author_id, obs.commenter_id, obs.class, obs.similarity
        ));
    }
    out
}

pub fn read_panel(path: &str) -> Result<Vec<PanelObservation>> {
    let content = read_to_string(path)?;
    let mut lines = data_lines(&content);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "missing panel header"))?;
    if header != "author_id,commenter_id,class,similarity" {
        return Err(parse_err(
            path,
            hline,
            format!("expected header `author_id,commenter_id,class,similarity`, got `{header}`"),
        ));
    }
    let mut panel = Vec::new();
    for (lineno, line) in lines {
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 4 {
            return Err(parse_err(
                path,
                lineno,
                format!("expected 4 fields, got {}", parts.len()),
            ));
        }
        let class: CommenterClass = parts[2]
            .trim()
            .parse()
            .map_err(|e: Error| parse_err(path, lineno, e.to_string()))?;
        let similarity: f64 = parts[3]
            .trim()
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("bad similarity `{}`", parts[3])))?;
        panel.push(PanelObservation {
            author_id: parts[0].to_string(),
            commenter_id: parts[1].to_string(),
            class,
            similarity,
        });
    }
    Ok(panel)
}

pub fn read_submission_log(path: &str) -> Result<Vec<Submission>> {
    let content = read_to_string(path)?;
    let mut lines = data_lines(&content);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "missing submission log header"))?;
    if header != "member_id,post_id,timestamp" {
        return Err(parse_err(
            path,
            hline,
            format!("expected header `member_id,post_id,timestamp`, got `{header}`"),
        ));
    }
    let mut log = Vec::new();
    for (lineno, line) in lines {
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 3 {
            return Err(parse_err(
                path,
                lineno,
                format!("expected 3 fields, got {}", parts.len()),
            ));
        }
        let timestamp: u64 = parts[2]
            .trim()
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("bad timestamp `{}`", parts[2])))?;
        log.push(Submission {
            member_id: parts[0].to_string(),
            post_id: parts[1].to_string(),
            timestamp,
        });
    }
    Ok(log)
}

pub fn submission_log_csv(log: &[Submission], config_json: Option<&str>) -> String {
    let mut out = schema_header("pod-log v1", config_json);
    out.push_str("member_id,post_id,timestamp\n");
    for s in log {
        out.push_str(&format!("{},{},{}\n", s.member_id, s.post_id, s.timestamp));
    }
    out
}

pub fn read_events(path: &str) -> Result<Vec<EngagementEvent>> {
    let content = read_to_string(path)?;
    let mut lines = data_lines(&content);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "missing events header"))?;
    if header != "member_id,post_id,timestamp,kind" {
        return Err(parse_err(
            path,
            hline,
            format!("expected header `member_id,post_id,timestamp,kind`, got `{header}`"),
        ));
    }
    let mut events = Vec::new();
    for (lineno, line) in lines {
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 4 {
            return Err(parse_err(
                path,
                lineno,
                format!("expected 4 fields, got {}", parts.len()),
            ));
        }
        let timestamp: u64 = parts[2]
            .trim()
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("bad timestamp `{}`", parts[2])))?;
        let kind = match parts[3].trim() {
            "like" => EngagementKind::Like,
            "comment" => EngagementKind::Comment,
            other => {
                return Err(parse_err(
                    path,
                    lineno,
                    format!("bad kind `{other}` (expected like or comment)"),
                ))
            }
        };
        events.push(EngagementEvent {
            member_id: parts[0].to_string(),
            post_id: parts[1].to_string(),
            timestamp,
            kind,
        });
    }
    Ok(events)
}

/// Corpus rows `user_id,token`, grouped into per-user documents preserving
/// row order.
pub fn read_corpus(path: &str) -> Result<Vec<CorpusDoc>> {
    let content = read_to_string(path)?;
    let mut lines = data_lines(&content);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "missing corpus header"))?;
    if header != "user_id,token" {
        return Err(parse_err(
            path,
            hline,
            format!("expected header `user_id,token`, got `{header}`"),
        ));
    }
    let mut order: Vec<String> = Vec::new();
    let mut docs: std::collections::HashMap<String, Vec<String>> =
        std::collections::HashMap::new();
    for (lineno, line) in lines {
        let (user, token) = line
            .split_once(',')
            .ok_or_else(|| parse_err(path, lineno, "expected `user_id,token`"))?;
        let entry = docs.entry(user.to_string()).or_default();
        if entry.is_empty() {
            order.push(user.to_string());
        }
        entry.push(token.to_string());
    }
    Ok(order
        .into_iter()
        .map(|user| {
            let tokens = docs.remove(&user).unwrap_or_default();
            CorpusDoc {
                user_id: user,
                tokens,
            }
        })
        .collect())
}

pub fn corpus_csv(docs: &[CorpusDoc], config_json: Option<&str>) -> String {
    let mut out = schema_header("corpus v1", config_json);
    out.push_str("user_id,token\n");
    for doc in docs {
        for token in &doc.tokens {
            out.push_str(&format!("{},{token}\n", doc.user_id));
        }
    }
    out
}

/// Raw posts `user_id,text`; the text field is the remainder of the line and
/// may contain commas.
pub fn read_raw_posts(path: &str) -> Result<Vec<(String, String)>> {
    let content = read_to_string(path)?;
    let mut lines = data_lines(&content);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "missing raw posts header"))?;
    if header != "user_id,text" {
        return Err(parse_err(
            path,
            hline,
            format!("expected header `user_id,text`, got `{header}`"),
        ));
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines {
        let (user, text) = line
            .split_once(',')
            .ok_or_else(|| parse_err(path, lineno, "expected `user_id,text`"))?;
        rows.push((user.to_string(), text.to_string()));
    }
    Ok(rows)
}

/// Pretty JSON with a trailing newline, stable field order.
pub fn to_json_pretty<T: serde::Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Error::config(format!("serialization failed: {e}")))
}
