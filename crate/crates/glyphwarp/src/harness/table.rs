//! Error rates per (model, eval set, task), persisted as TSV.

use std::fmt::Write as _;

pub const HEADER: &str = "model\teval\ttask\tn\terror\tstderr\tstatus";

#[derive(Clone, Debug, PartialEq)]
pub enum Status {
    Ok,
    Failed(String),
}

/// One cell. `n` and `stderr` may be unknown for transcribed figures; a
/// failed cell has no error rate.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub model: String,
    pub eval: String,
    pub task: String,
    pub n: Option<usize>,
    pub error: Option<f64>,
    pub stderr: Option<f64>,
    pub status: Status,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum TableError {
    #[error("missing or wrong header, expected {HEADER:?}")]
    Header,
    #[error("line {line}: {reason}")]
    Row { line: usize, reason: String },
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

fn clean(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

impl ResultTable {
    pub fn push(&mut self, row: ResultRow) {
        self.rows.push(row);
    }

    pub fn get(&self, model: &str, eval: &str, task: &str) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.model == model && r.eval == eval && r.task == task)
    }

    /// Error rate of a successful cell.
    pub fn error(&self, model: &str, eval: &str, task: &str) -> Option<f64> {
        self.get(model, eval, task).filter(|r| r.status == Status::Ok).and_then(|r| r.error)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = format!("{HEADER}\n");
        for r in &self.rows {
            let status = match &r.status {
                Status::Ok => "ok".to_string(),
                Status::Failed(why) => format!("failed: {}", clean(why)),
            };
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                clean(&r.model),
                clean(&r.eval),
                clean(&r.task),
                opt(r.n),
                opt(r.error),
                opt(r.stderr),
                status
            );
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self, TableError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.trim_end() == HEADER => {}
            _ => return Err(TableError::Header),
        }
        let mut table = ResultTable::default();
        for (i, line) in lines {
            let bad = |reason: String| TableError::Row { line: i + 1, reason };
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 7 {
                return Err(bad(format!("expected 7 fields, found {}", f.len())));
            }
            let num = |s: &str, what: &str| -> Result<Option<f64>, TableError> {
                if s == "-" {
                    return Ok(None);
                }
                match s.parse::<f64>() {
                    Ok(v) if (0.0..=1.0).contains(&v) => Ok(Some(v)),
                    _ => Err(bad(format!("{what} {s:?} is not a rate in [0, 1]"))),
                }
            };
            let n = match f[3] {
                "-" => None,
                s => Some(s.parse().map_err(|_| bad(format!("count {s:?} is not an integer")))?),
            };
            let status = match f[6] {
                "ok" => Status::Ok,
                s => match s.strip_prefix("failed") {
                    Some(why) => Status::Failed(why.trim_start_matches(':').trim().to_string()),
                    None => return Err(bad(format!("unknown status {s:?}"))),
                },
            };
            table.push(ResultRow {
                model: f[0].to_string(),
                eval: f[1].to_string(),
                task: f[2].to_string(),
                n,
                error: num(f[4], "error")?,
                stderr: num(f[5], "stderr")?,
                status,
            });
        }
        Ok(table)
    }
}
