//! Game records as JSON lines, one object per turn.
//!
//! `board` is the position before `move`, in the core plain-text format.
//! `c_win` is the final result (+1 first player, -1 second, 0 draw) and is
//! `null` while a game is still running.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use alphadda_core::arena::GameLog;
use alphadda_core::dda::DdaDiagnostics;
use alphadda_core::eval::GameRecord;
use alphadda_core::{BoardState, Color, GameError, Move};
use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use crate::config::as_str;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DdaBlock {
    pub v_n: f64,
    pub v_bar: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_sim: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_drop: Option<f64>,
}

impl From<DdaDiagnostics> for DdaBlock {
    fn from(d: DdaDiagnostics) -> Self {
        Self {
            v_n: d.v_n,
            v_bar: d.v_bar,
            n_sim: d.n_sim,
            p_drop: d.p_drop,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TurnLine {
    pub game: u64,
    pub turn: u32,
    pub board: String,
    #[serde(rename = "move", with = "as_str")]
    pub mv: Move,
    /// Side that played `move`: 1 or -1.
    pub color: i8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi: Option<Vec<f32>>,
    pub c_win: Option<i8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dda: Option<DdaBlock>,
}

/// Self-play game with its search policies.
pub fn self_play_lines(game: u64, record: &GameRecord) -> Vec<TurnLine> {
    record
        .turns
        .iter()
        .zip(0..)
        .map(|(t, turn)| TurnLine {
            game,
            turn,
            board: t.state.to_string(),
            mv: t.mv,
            color: t.state.to_move().sign(),
            pi: Some(t.pi.clone()),
            c_win: Some(record.c_win()),
            dda: None,
        })
        .collect()
}

/// Arena game with any DDA diagnostics.
pub fn arena_lines(game: u64, log: &GameLog) -> Result<Vec<TurnLine>, GameError> {
    let mut state = BoardState::new_game(log.variant);
    let mut out = Vec::with_capacity(log.turns.len());
    for (t, turn) in log.turns.iter().zip(0..) {
        out.push(TurnLine {
            game,
            turn,
            board: state.to_string(),
            mv: t.mv,
            color: t.color.sign(),
            pi: None,
            c_win: Some(log.outcome.c_win()),
            dda: t.dda.map(DdaBlock::from),
        });
        state = state.apply_move(t.mv)?;
    }
    Ok(out)
}

/// Checks that every line's board follows from the previous move and
/// returns the position after the last one.
pub fn replay(lines: &[TurnLine]) -> anyhow::Result<BoardState> {
    let first = lines.first().context("empty game")?;
    let mut state: BoardState = first.board.parse()?;
    for (i, line) in lines.iter().enumerate() {
        let recorded: BoardState = line.board.parse()?;
        if recorded != state {
            bail!("turn {i}: board does not follow from the previous move");
        }
        if Color::from_sign(line.color) != Some(state.to_move()) {
            bail!("turn {i}: color {} is not the side to move", line.color);
        }
        state = state
            .apply_move(line.mv)
            .with_context(|| format!("turn {i}"))?;
    }
    Ok(state)
}

pub fn write_lines<'a>(
    w: &mut impl Write,
    lines: impl IntoIterator<Item = &'a TurnLine>,
) -> std::io::Result<()> {
    for line in lines {
        serde_json::to_writer(&mut *w, line)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_file(path: &Path, lines: &[TurnLine]) -> anyhow::Result<()> {
    let f = fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(f);
    write_lines(&mut w, lines)?;
    w.flush()?;
    Ok(())
}

pub fn read_file(path: &Path) -> anyhow::Result<Vec<TurnLine>> {
    let f = fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    BufReader::new(f)
        .lines()
        .enumerate()
        .filter(|(_, l)| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|(i, l)| {
            serde_json::from_str(&l?).with_context(|| format!("{}:{}", path.display(), i + 1))
        })
        .collect()
}
