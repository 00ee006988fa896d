//! Batch commands. Each writes its reports under the run's `out` directory
//! and returns the rendered summary table.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use alphadda_core::arena::{
    fixed_opponent_rating, game_rng, grid_search, match_series, round_robin, AgentSpec,
    EvaluatorSpec,
};
use alphadda_core::dda::DdaStrategy;
use alphadda_core::eval::{self, Learner, PolicyValueNet, ReplayQueue, TrainConfig};
use alphadda_core::GameVariant;
use anyhow::{bail, ensure, Context};

use crate::checkpoint::{self, CheckpointMeta};
use crate::config::{AgentConfig, RunConfig, SweepParam};
use crate::records;
use crate::reports::{
    read_csv, render_table, write_csv, EloGameRow, EloRow, GridRow, LossRow, MatchGameRow,
    MatchRow, SweepRow,
};

/// Stream index of the initial network weights, disjoint from iteration streams.
const INIT_STREAM: u64 = u64::MAX;

fn create_dir(path: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(path)
        .with_context(|| format!("cannot create output directory {}", path.display()))
}

/// Creates `out` and records the resolved configuration next to the reports.
fn prepare_out(cfg: &RunConfig) -> anyhow::Result<()> {
    create_dir(&cfg.out)?;
    let path = cfg.out.join("run.toml");
    let text = toml::to_string(cfg).context("config does not serialize")?;
    fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))
}

/// Loads each referenced checkpoint once.
#[derive(Default)]
pub struct NetworkCache {
    nets: HashMap<PathBuf, Arc<PolicyValueNet<f32>>>,
}

impl NetworkCache {
    pub fn evaluator(
        &mut self,
        path: Option<&Path>,
        variant: GameVariant,
    ) -> anyhow::Result<EvaluatorSpec> {
        let Some(path) = path else {
            return Ok(EvaluatorSpec::Heuristic);
        };
        if let Some(net) = self.nets.get(path) {
            return Ok(EvaluatorSpec::Network(net.clone()));
        }
        let (meta, net) = checkpoint::load(path)?;
        ensure!(
            meta.variant == variant,
            "checkpoint {} is for {}, the run plays {variant}",
            path.display(),
            meta.variant
        );
        let net = Arc::new(net);
        self.nets.insert(path.to_owned(), net.clone());
        Ok(EvaluatorSpec::Network(net))
    }

    pub fn spec(&mut self, agent: &AgentConfig, variant: GameVariant) -> anyhow::Result<AgentSpec> {
        let ev = if agent.kind.uses_evaluator() {
            self.evaluator(agent.checkpoint.as_deref(), variant)?
        } else {
            EvaluatorSpec::Heuristic
        };
        Ok(agent.to_spec(variant, ev)?)
    }
}

/// Labels made unique by suffixing repeats with `#2`, `#3`, ...
fn labels(cfg: &RunConfig) -> Vec<String> {
    let mut seen: HashMap<String, u32> = HashMap::new();
    cfg.agents
        .iter()
        .map(|a| {
            let base = a.label(cfg.variant);
            let n = seen.entry(base.clone()).or_insert(0);
            *n += 1;
            if *n == 1 {
                base
            } else {
                format!("{base}#{n}")
            }
        })
        .collect()
}

/// Distinct master seed for the series against opponent `k`.
fn opponent_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_add((k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn specs(cfg: &RunConfig) -> anyhow::Result<Vec<AgentSpec>> {
    let mut cache = NetworkCache::default();
    cfg.agents
        .iter()
        .map(|a| cache.spec(a, cfg.variant))
        .collect()
}

pub struct TrainReport {
    pub resumed_from: u32,
    pub checkpoints: Vec<PathBuf>,
    pub summary: String,
}

/// Self-play training. Iteration `i` draws from `game_rng(seed, i)`, and a
/// rerun picks up after the newest checkpoint in `out/checkpoints`.
pub fn train(cfg: &RunConfig) -> anyhow::Result<TrainReport> {
    prepare_out(cfg)?;
    let ckpt_dir = cfg.out.join("checkpoints");
    let rec_dir = cfg.out.join("records");
    create_dir(&ckpt_dir)?;
    create_dir(&rec_dir)?;
    let tcfg = cfg.train_config();
    let ncfg = cfg.network_config();

    let latest = checkpoint::latest(&ckpt_dir)
        .with_context(|| format!("cannot list {}", ckpt_dir.display()))?;
    let (start, net) = match latest {
        Some((it, path)) => {
            let (meta, net) = checkpoint::load(&path)?;
            if meta.network_config() != ncfg {
                bail!(
                    "checkpoint {} was trained with a different network configuration",
                    path.display()
                );
            }
            (it, net)
        }
        None => (
            0,
            PolicyValueNet::new(ncfg, &mut game_rng(cfg.seed, INIT_STREAM)),
        ),
    };

    let loss_path = cfg.out.join("loss.csv");
    let mut rows: Vec<LossRow> = if start > 0 && loss_path.exists() {
        read_csv(&loss_path)?
    } else {
        Vec::new()
    };
    rows.retain(|r| r.iteration <= start);

    let mut learner = Learner::new(net);
    let mut queue = ReplayQueue::new(tcfg.n_queue);
    let mut written = Vec::new();
    for it in start..tcfg.n_iter {
        let step = TrainConfig {
            n_iter: it + 1,
            ..tcfg
        };
        let mut rng = game_rng(cfg.seed, it as u64);
        eval::train(
            &step,
            &mut learner,
            &mut queue,
            it,
            &mut rng,
            |c| -> anyhow::Result<()> {
                let lines: Vec<_> = c
                    .games
                    .iter()
                    .zip(0..)
                    .flat_map(|(g, i)| records::self_play_lines(i, g))
                    .collect();
                records::write_file(
                    &rec_dir.join(format!("iter_{:04}.jsonl", c.iteration)),
                    &lines,
                )?;
                rows.push(LossRow {
                    iteration: c.iteration,
                    mean_loss: c.mean_loss,
                    queue_len: c.queue_len,
                });
                write_csv(&loss_path, &rows)?;
                let path = ckpt_dir.join(checkpoint::file_name(c.iteration));
                checkpoint::save(
                    &path,
                    c.net,
                    &CheckpointMeta::new(c.net, c.iteration, cfg.seed),
                )?;
                written.push(path);
                Ok(())
            },
        )?;
    }

    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.iteration.to_string(),
                format!("{:.4}", r.mean_loss),
                r.queue_len.to_string(),
            ]
        })
        .collect();
    Ok(TrainReport {
        resumed_from: start,
        checkpoints: written,
        summary: render_table(&["iteration", "mean_loss", "queue_len"], &table),
    })
}

pub struct MatchReport {
    pub rows: Vec<MatchRow>,
    pub games: Vec<MatchGameRow>,
    pub summary: String,
}

/// `agents[0]` plays `match.games` games against each later agent.
pub fn run_match(cfg: &RunConfig) -> anyhow::Result<MatchReport> {
    ensure!(
        cfg.agents.len() >= 2,
        "match needs a subject and at least one opponent in [[agents]]"
    );
    let specs = specs(cfg)?;
    prepare_out(cfg)?;
    let names = labels(cfg);
    let n = cfg.match_games();
    let (mut rows, mut games, mut lines) = (Vec::new(), Vec::new(), Vec::new());
    let mut index = 0u64;
    for (k, opp) in specs.iter().enumerate().skip(1) {
        let result = match_series(&specs[0], opp, cfg.variant, n, opponent_seed(cfg.seed, k))?;
        rows.push(MatchRow {
            opponent: names[k].clone(),
            win: result.wins,
            loss: result.losses,
            draw: result.draws,
        });
        for g in &result.games {
            games.push(MatchGameRow {
                game: index,
                opponent: names[k].clone(),
                subject_first: g.a_first,
                score: g.score_a(),
                c_win: g.log.outcome.c_win(),
                turns: g.log.turns.len(),
            });
            lines.extend(records::arena_lines(index, &g.log)?);
            index += 1;
        }
    }
    write_csv(&cfg.out.join("match.csv"), &rows)?;
    write_csv(&cfg.out.join("match_games.csv"), &games)?;
    records::write_file(&cfg.out.join("match_games.jsonl"), &lines)?;

    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.opponent.clone(),
                r.win.to_string(),
                r.loss.to_string(),
                r.draw.to_string(),
            ]
        })
        .collect();
    let summary = format!(
        "{} ({} preset, {n} games per opponent)\n{}",
        names[0],
        cfg.preset.name(),
        render_table(&["opponent", "win", "loss", "draw"], &table)
    );
    Ok(MatchReport {
        rows,
        games,
        summary,
    })
}

pub struct EloReport {
    pub rows: Vec<EloRow>,
    pub summary: String,
}

/// Round-robin tournament over every configured agent.
pub fn run_elo(cfg: &RunConfig) -> anyhow::Result<EloReport> {
    ensure!(cfg.agents.len() >= 2, "elo needs at least two [[agents]]");
    let specs = specs(cfg)?;
    prepare_out(cfg)?;
    let names = labels(cfg);
    let rr = round_robin(&specs, cfg.variant, cfg.elo_rounds(), cfg.seed)?;
    let mut rows: Vec<EloRow> = names
        .iter()
        .enumerate()
        .map(|(i, n)| EloRow {
            agent: n.clone(),
            rating: rr.table.rating(i),
        })
        .collect();
    rows.sort_by(|a, b| b.rating.total_cmp(&a.rating));
    let games: Vec<EloGameRow> = rr
        .games
        .iter()
        .map(|g| EloGameRow {
            round: g.round,
            first: names[g.first].clone(),
            second: names[g.second].clone(),
            c_win: g.outcome.c_win(),
        })
        .collect();
    write_csv(&cfg.out.join("elo.csv"), &rows)?;
    write_csv(&cfg.out.join("elo_games.csv"), &games)?;

    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![r.agent.clone(), format!("{:.1}", r.rating)])
        .collect();
    let summary = format!(
        "{} rounds, {} games ({} preset)\n{}",
        cfg.elo_rounds(),
        games.len(),
        cfg.preset.name(),
        render_table(&["agent", "rating"], &table)
    );
    Ok(EloReport { rows, summary })
}

pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub summary: String,
}

/// Rates `agents[0]` at every swept value against the frozen-rating agents
/// that follow it.
pub fn run_sweep(cfg: &RunConfig) -> anyhow::Result<SweepReport> {
    let sweep = cfg.sweep.as_ref().context("sweep needs a [sweep] table")?;
    ensure!(
        cfg.agents.len() >= 2,
        "sweep needs a subject and at least one rated opponent in [[agents]]"
    );
    let mut cache = NetworkCache::default();
    let mut opponents = Vec::new();
    for (k, a) in cfg.agents.iter().enumerate().skip(1) {
        let rating = a
            .rating
            .with_context(|| format!("`agents[{k}].rating` is required for sweep opponents"))?;
        opponents.push((cache.spec(a, cfg.variant)?, rating));
    }
    let mut subjects = Vec::new();
    for &v in &sweep.values {
        let mut subject = cfg.agents[0].clone();
        match sweep.param {
            SweepParam::NSim => {
                ensure!(
                    v >= 1.0 && v.fract() == 0.0,
                    "`sweep.values`: n_sim values must be positive integers"
                );
                subject.n_sim = Some(v as u32);
            }
            SweepParam::PDrop => subject.p_drop = Some(v as f32),
        }
        subjects.push(
            cache
                .spec(&subject, cfg.variant)
                .with_context(|| format!("sweep value {v}"))?,
        );
    }
    prepare_out(cfg)?;

    let n = cfg.sweep_games();
    let mut rows = Vec::new();
    for (subject, &value) in subjects.iter().zip(&sweep.values) {
        let r = fixed_opponent_rating(subject, &opponents, cfg.variant, n, cfg.seed)?;
        rows.push(SweepRow {
            param: sweep.param.name().to_owned(),
            value,
            rating: r.rating,
            win: r.results.iter().map(|m| m.wins).sum(),
            loss: r.results.iter().map(|m| m.losses).sum(),
            draw: r.results.iter().map(|m| m.draws).sum(),
        });
    }
    write_csv(&cfg.out.join("sweep.csv"), &rows)?;

    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.value.to_string(),
                format!("{:.1}", r.rating),
                r.win.to_string(),
                r.loss.to_string(),
                r.draw.to_string(),
            ]
        })
        .collect();
    let summary = format!(
        "{} sweep of {} ({} preset, {n} games per opponent)\n{}",
        sweep.param.name(),
        labels(cfg)[0],
        cfg.preset.name(),
        render_table(
            &[sweep.param.name(), "rating", "win", "loss", "draw"],
            &table
        )
    );
    Ok(SweepReport { rows, summary })
}

fn describe(s: &DdaStrategy) -> String {
    match s {
        DdaStrategy::Simulations(p) => format!(
            "n_h={};a_sim={};b_sim0={};n_max={}",
            p.n_h, p.a_sim, p.b_sim0, p.n_max
        ),
        DdaStrategy::Dropout(p) => format!(
            "n_h={};a_drop={};p_drop0={};p_max={}",
            p.n_h, p.a_drop, p.p_drop0, p.p_max
        ),
        DdaStrategy::ValueMatching(p) => format!("n_h={};c_explore={}", p.n_h, p.c_explore),
    }
}

pub struct GridReport {
    pub rows: Vec<GridRow>,
    pub best: String,
    pub summary: String,
}

/// Balance-objective grid search of a DDA agent against every configured agent.
pub fn run_gridsearch(cfg: &RunConfig) -> anyhow::Result<GridReport> {
    let grid = cfg
        .gridsearch
        .as_ref()
        .context("gridsearch needs a [gridsearch] table")?;
    ensure!(
        !cfg.agents.is_empty(),
        "gridsearch needs at least one opponent in [[agents]]"
    );
    let strategies = grid.strategies(cfg.variant)?;
    let mut cache = NetworkCache::default();
    let evaluator = cache.evaluator(grid.checkpoint.as_deref(), cfg.variant)?;
    let opponents = specs(cfg)?;
    prepare_out(cfg)?;
    let names = labels(cfg);

    let result = grid_search(
        cfg.variant,
        &strategies,
        &evaluator,
        grid.search(cfg.variant),
        &opponents,
        cfg.grid_games(),
        cfg.seed,
    )?;
    let mut rows = Vec::new();
    for (i, cell) in result.cells.iter().enumerate() {
        for (rec, name) in cell.records.iter().zip(&names) {
            rows.push(GridRow {
                cell: i,
                params: describe(&cell.params),
                opponent: name.clone(),
                win: rec.wins,
                loss: rec.losses,
                draw: rec.draws,
                objective: cell.objective,
                best: i == result.best,
            });
        }
    }
    write_csv(&cfg.out.join("grid.csv"), &rows)?;

    let table: Vec<Vec<String>> = result
        .cells
        .iter()
        .enumerate()
        .map(|(i, c)| {
            vec![
                i.to_string(),
                describe(&c.params),
                format!("{:.3}", c.objective),
                if i == result.best {
                    "*".into()
                } else {
                    String::new()
                },
            ]
        })
        .collect();
    let best = describe(&result.best_cell().params);
    let summary = format!(
        "{} grid ({} preset, {} games per opponent), best {best}\n{}",
        grid.kind.name(),
        cfg.preset.name(),
        cfg.grid_games(),
        render_table(&["cell", "params", "objective", "best"], &table)
    );
    Ok(GridReport {
        rows,
        best,
        summary,
    })
}
