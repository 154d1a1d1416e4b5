//! Text tables in the layout of the paper's appendix: raw error rates,
//! relative change from perturbed training data, and single- versus
//! multi-task error.

use std::fmt::Write as _;

use glyphwarp_core::metrics::{rel_multitask_improvement, rel_ood_change};

use super::table::{ResultTable, Status};

pub const CLEAN: &str = "clean";
pub const FAMILIES: [&str; 2] = ["SDA", "MLP"];
/// Row order of the multi-task table.
pub const MULTITASK_TASKS: [&str; 3] = ["digits", "lower", "upper"];

/// A column of Tables 1 and 2: an eval set and a task.
#[derive(Clone, Debug, PartialEq)]
pub struct Column {
    pub eval: String,
    pub task: String,
}

impl Column {
    fn title(&self) -> String {
        if self.task == "all" {
            format!("{} test", self.eval)
        } else {
            format!("{} test {}", self.eval, self.task)
        }
    }
}

/// Main models are named family + training-set index, e.g. `SDA1`.
fn is_main_model(name: &str) -> bool {
    !name.contains('-')
}

/// Eval sets seen on the 62-class task in order of appearance, then clean
/// digits.
pub fn columns(t: &ResultTable) -> Vec<Column> {
    let mut cols: Vec<Column> = Vec::new();
    for r in t.rows.iter().filter(|r| r.task == "all" && is_main_model(&r.model)) {
        if !cols.iter().any(|c| c.eval == r.eval) {
            cols.push(Column { eval: r.eval.clone(), task: "all".into() });
        }
    }
    if t.rows.iter().any(|r| r.eval == CLEAN && r.task == "digits" && is_main_model(&r.model)) {
        cols.push(Column { eval: CLEAN.into(), task: "digits".into() });
    }
    cols
}

fn main_models(t: &ResultTable) -> Vec<String> {
    let mut models: Vec<String> = Vec::new();
    for r in t.rows.iter().filter(|r| is_main_model(&r.model)) {
        if !models.contains(&r.model) {
            models.push(r.model.clone());
        }
    }
    models
}

fn pct(v: f64, digits: usize) -> String {
    format!("{:.*}%", digits, 100.0 * v)
}

fn rate_cell(t: &ResultTable, model: &str, c: &Column) -> String {
    match t.get(model, &c.eval, &c.task) {
        None => String::new(),
        Some(r) => match (&r.status, r.error) {
            (Status::Ok, Some(e)) => match r.stderr {
                Some(s) => format!("{} ± {}", pct(e, 2), pct(s, 2)),
                None => pct(e, 2),
            },
            _ => "failed".into(),
        },
    }
}

fn render(out: &mut String, title: &str, head: &[String], rows: &[Vec<String>]) {
    let mut widths: Vec<usize> = head.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let mut s = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            let pad = w - cell.chars().count();
            if i == 0 {
                let _ = write!(s, "{cell}{}", " ".repeat(pad));
            } else {
                let _ = write!(s, " | {}{cell}", " ".repeat(pad));
            }
        }
        s.trim_end().to_string()
    };
    let rule: String = "-".repeat(line(head).chars().count());
    let _ = writeln!(out, "{title}\n{rule}\n{}\n{rule}", line(head));
    for row in rows {
        let _ = writeln!(out, "{}", line(row));
    }
    let _ = writeln!(out, "{rule}\n");
}

/// Raw error rates of the main models.
pub fn error_table(t: &ResultTable) -> String {
    let cols = columns(t);
    let mut head = vec![String::new()];
    head.extend(cols.iter().map(Column::title));
    let rows: Vec<Vec<String>> = main_models(t)
        .iter()
        .map(|m| {
            let mut row = vec![m.clone()];
            row.extend(cols.iter().map(|c| rate_cell(t, m, c)));
            row
        })
        .collect();
    let mut out = String::new();
    render(&mut out, "Table 1. Error rates (± std. err.)", &head, &rows);
    out
}

/// `100 · (F0 error / Fi error − 1)` for every trained pair; `None` when
/// no pair is present.
pub fn ood_table(t: &ResultTable) -> Option<String> {
    let cols = columns(t);
    let mut head = vec![String::new()];
    head.extend(cols.iter().map(Column::title));
    let mut rows = Vec::new();
    let models = main_models(t);
    for family in FAMILIES {
        let base = format!("{family}0");
        for i in 1..=2 {
            let other = format!("{family}{i}");
            if !models.contains(&base) || !models.contains(&other) {
                continue;
            }
            let mut row = vec![format!("{base}/{other}-1")];
            for c in &cols {
                let v = t
                    .error(&base, &c.eval, &c.task)
                    .zip(t.error(&other, &c.eval, &c.task))
                    .and_then(|(a, b)| rel_ood_change(a, b).ok());
                row.push(v.map_or_else(|| "-".into(), |v| format!("{v:.1}%")));
            }
            rows.push(row);
        }
    }
    if rows.is_empty() {
        return None;
    }
    let mut out = String::new();
    render(&mut out, "Table 2. Relative change in error from perturbed training data", &head, &rows);
    Some(out)
}

/// Multi-task error of a family: a dedicated `F-multi` model if present,
/// else the clean-trained 62-class model.
fn multitask_error(t: &ResultTable, family: &str, task: &str) -> Option<f64> {
    t.error(&format!("{family}-multi"), CLEAN, task)
        .or_else(|| t.error(&format!("{family}0"), CLEAN, task))
}

/// Single- versus multi-task error on clean data, relative improvement
/// `100 · (1 − single / multi)`; `None` without single-task models.
pub fn multitask_table(t: &ResultTable) -> Option<String> {
    let head: Vec<String> = ["", "single-task", "multi-task", "relative improvement"].map(String::from).to_vec();
    let mut rows = Vec::new();
    for family in ["MLP", "SDA"] {
        for task in MULTITASK_TASKS {
            let name = format!("{family}-{task}");
            let single = t.error(&name, CLEAN, task);
            if t.get(&name, CLEAN, task).is_none() {
                continue;
            }
            let multi = multitask_error(t, family, task);
            let rel = single.zip(multi).and_then(|(s, m)| rel_multitask_improvement(s, m).ok());
            let show = |v: Option<f64>| v.map_or_else(|| "-".into(), |v| pct(v, 2));
            rows.push(vec![
                name,
                show(single),
                show(multi),
                rel.map_or_else(|| "-".into(), |v| format!("{v:.1}%")),
            ]);
        }
    }
    if rows.is_empty() {
        return None;
    }
    let mut out = String::new();
    render(&mut out, "Table 3. Single-task versus multi-task error (clean test)", &head, &rows);
    Some(out)
}

/// All three tables; a table with no rows is left out.
pub fn report(t: &ResultTable) -> String {
    let mut out = error_table(t);
    out.extend(ood_table(t));
    out.extend(multitask_table(t));
    out
}
