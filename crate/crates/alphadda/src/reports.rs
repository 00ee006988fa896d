//! CSV report rows. Column names are the serde field names.

use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};

/// `elo.csv`: final round-robin ratings, highest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EloRow {
    pub agent: String,
    pub rating: f64,
}

/// `elo_games.csv`: every round-robin game in play order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EloGameRow {
    pub round: u32,
    pub first: String,
    pub second: String,
    pub c_win: i8,
}

/// `match.csv`: one row per opponent, counts from the subject's side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchRow {
    pub opponent: String,
    pub win: u32,
    pub loss: u32,
    pub draw: u32,
}

/// `match_games.csv`: one row per game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchGameRow {
    pub game: u64,
    pub opponent: String,
    pub subject_first: bool,
    /// Subject's score: 1, 0.5 or 0.
    pub score: f64,
    pub c_win: i8,
    pub turns: usize,
}

/// `sweep.csv`: subject rating for each parameter value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: String,
    pub value: f64,
    pub rating: f64,
    pub win: u32,
    pub loss: u32,
    pub draw: u32,
}

/// `grid.csv`: one row per (cell, opponent).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub cell: usize,
    pub params: String,
    pub opponent: String,
    pub win: u32,
    pub loss: u32,
    pub draw: u32,
    /// Cell objective: sum over its opponents of |win - loss| / games.
    pub objective: f64,
    pub best: bool,
}

/// `loss.csv`: one row per training iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossRow {
    pub iteration: u32,
    pub mean_loss: f32,
    pub queue_len: usize,
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<Vec<T>> {
    let mut r =
        csv::Reader::from_path(path).with_context(|| format!("cannot open {}", path.display()))?;
    r.deserialize()
        .collect::<Result<_, _>>()
        .with_context(|| format!("bad rows in {}", path.display()))
}

/// Left-aligned text table for terminal summaries.
pub fn render_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&width)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_owned()
    };
    let mut out = line(header.to_vec());
    out.push('\n');
    let rule: Vec<String> = width.iter().map(|&w| "-".repeat(w)).collect();
    out.push_str(&line(rule.iter().map(String::as_str).collect()));
    for row in rows {
        out.push('\n');
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}
