use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use alphadda::checkpoint;
use alphadda::reports::{read_csv, EloRow, LossRow, MatchGameRow, MatchRow, SweepRow};

fn alphadda(dir: &Path, config: &str, args: &[&str]) -> Output {
    let cfg = dir.join("run.in.toml");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_alphadda"))
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(out: Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

const TINY_TRAIN: &str = r#"
variant = "connect4"
preset = "desk"
seed = 11
[network]
residual_blocks = 1
filters = 4
value_hidden = 8
policy_hidden = 8
[train]
n_iter = 3
n_self = 1
n_sim = 8
n_batch = 32
"#;

#[test]
fn train_writes_one_checkpoint_and_loss_row_per_iteration() {
    let dir = tempfile::tempdir().unwrap();
    ok(alphadda(dir.path(), TINY_TRAIN, &["train"]));
    let out = dir.path().join("out");
    for it in 1..=3 {
        let path = out.join("checkpoints").join(checkpoint::file_name(it));
        let (meta, _) = checkpoint::load(&path).unwrap();
        assert_eq!((meta.iteration, meta.seed), (it, 11));
        assert!(out
            .join("records")
            .join(format!("iter_{it:04}.jsonl"))
            .exists());
    }
    let rows: Vec<LossRow> = read_csv(&out.join("loss.csv")).unwrap();
    assert_eq!(
        rows.iter().map(|r| r.iteration).collect::<Vec<_>>(),
        [1, 2, 3]
    );
    assert!(rows.windows(2).all(|w| w[1].queue_len > w[0].queue_len));
    assert!(fs::read_to_string(out.join("run.toml"))
        .unwrap()
        .contains("preset = \"desk\""));
}

#[test]
fn train_resumes_after_the_newest_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    ok(alphadda(dir.path(), TINY_TRAIN, &["train"]));
    // Interrupted after iteration 2: the third checkpoint never landed.
    fs::remove_file(out.join("checkpoints").join(checkpoint::file_name(3))).unwrap();
    let more = TINY_TRAIN.replace("n_iter = 3", "n_iter = 4");
    ok(alphadda(dir.path(), &more, &["train"]));
    let rows: Vec<LossRow> = read_csv(&out.join("loss.csv")).unwrap();
    assert_eq!(
        rows.iter().map(|r| r.iteration).collect::<Vec<_>>(),
        [1, 2, 3, 4]
    );
    assert!(out
        .join("checkpoints")
        .join(checkpoint::file_name(4))
        .exists());
}

#[test]
fn corrupt_checkpoint_fails_with_its_path() {
    let dir = tempfile::tempdir().unwrap();
    let ckpts = dir.path().join("out").join("checkpoints");
    fs::create_dir_all(&ckpts).unwrap();
    fs::write(ckpts.join(checkpoint::file_name(2)), b"ALPHADDA garbage").unwrap();
    let out = alphadda(dir.path(), TINY_TRAIN, &["train"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("iter_0002.ckpt") && err.contains("corrupt"),
        "{err}"
    );
}

#[test]
fn invalid_variant_exits_nonzero_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let out = alphadda(dir.path(), "variant = \"chess\"", &["train"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("variant") && err.contains("chess"), "{err}");
}

#[test]
fn unwritable_output_path_fails() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, b"").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_alphadda"))
        .arg("--out")
        .arg(blocker.join("sub"))
        .arg("train")
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot create output directory"));
}

const RANDOM_MATCH: &str = r#"
seed = 3
[match]
games = 10
[[agents]]
kind = "Random"
[[agents]]
kind = "Random"
"#;

#[test]
fn random_match_has_one_row_per_game() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(alphadda(dir.path(), RANDOM_MATCH, &["match"]));
    let out = dir.path().join("out");
    let games: Vec<MatchGameRow> = read_csv(&out.join("match_games.csv")).unwrap();
    assert_eq!(games.len(), 10);
    assert_eq!(games.iter().filter(|g| g.subject_first).count(), 5);
    let summary: Vec<MatchRow> = read_csv(&out.join("match.csv")).unwrap();
    assert_eq!(summary.len(), 1);
    assert_eq!(summary[0].win + summary[0].loss + summary[0].draw, 10);
    assert_eq!(summary[0].opponent, "Random#2");
    assert!(stdout.contains("opponent") && stdout.contains("Random#2"));
    let records = fs::read_to_string(out.join("match_games.jsonl")).unwrap();
    let turns: usize = games.iter().map(|g| g.turns).sum();
    assert_eq!(records.lines().count(), turns);
}

#[test]
fn outputs_regenerate_bit_identically() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    ok(alphadda(a.path(), RANDOM_MATCH, &["match"]));
    ok(alphadda(b.path(), RANDOM_MATCH, &["match"]));
    for f in ["match.csv", "match_games.csv", "match_games.jsonl"] {
        let x = fs::read(a.path().join("out").join(f)).unwrap();
        let y = fs::read(b.path().join("out").join(f)).unwrap();
        assert_eq!(x, y, "{f}");
    }
    let c = tempfile::tempdir().unwrap();
    ok(alphadda(c.path(), RANDOM_MATCH, &["match", "--seed", "4"]));
    assert_ne!(
        fs::read(a.path().join("out/match_games.jsonl")).unwrap(),
        fs::read(c.path().join("out/match_games.jsonl")).unwrap()
    );
}

#[test]
fn missing_checkpoint_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"
[[agents]]
kind = "AlphaZero"
checkpoint = "nowhere/net.ckpt"
[[agents]]
kind = "Random"
"#;
    let out = alphadda(dir.path(), cfg, &["match"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("nowhere/net.ckpt"));
}

#[test]
fn sweep_emits_one_rating_row_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"
[sweep]
param = "n_sim"
values = [1, 10, 50]
games = 2
[[agents]]
kind = "MCTS1"
[[agents]]
kind = "Random"
rating = 900.0
"#;
    let stdout = ok(alphadda(dir.path(), cfg, &["sweep"]));
    let rows: Vec<SweepRow> = read_csv(&dir.path().join("out/sweep.csv")).unwrap();
    assert_eq!(
        rows.iter().map(|r| r.value).collect::<Vec<_>>(),
        [1.0, 10.0, 50.0]
    );
    assert!(rows
        .iter()
        .all(|r| r.param == "n_sim" && r.win + r.loss + r.draw == 2));
    assert!(stdout.contains("rating"));
}

#[test]
fn sweep_opponents_need_ratings() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[sweep]\nparam = \"n_sim\"\nvalues = [1]\n[[agents]]\nkind = \"MCTS1\"\n[[agents]]\nkind = \"Random\"\n";
    let out = alphadda(dir.path(), cfg, &["sweep"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("agents[1].rating"));
}

#[test]
fn elo_table_has_agent_and_rating_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"
variant = "othello6"
[elo]
rounds = 1
[[agents]]
kind = "AlphaZero"
n_sim = 10
[[agents]]
kind = "MCTS1"
n_sim = 30
[[agents]]
kind = "MCTS2"
n_sim = 10
[[agents]]
kind = "Minimax"
depth = 1
[[agents]]
kind = "Random"
"#;
    let stdout = ok(alphadda(dir.path(), cfg, &["elo"]));
    let path = dir.path().join("out/elo.csv");
    assert_eq!(
        fs::read_to_string(&path).unwrap().lines().next(),
        Some("agent,rating")
    );
    let rows: Vec<EloRow> = read_csv(&path).unwrap();
    assert_eq!(rows.len(), 5);
    assert!(rows.windows(2).all(|w| w[0].rating >= w[1].rating));
    let total: f64 = rows.iter().map(|r| r.rating).sum();
    assert!((total - 7500.0).abs() < 1e-6);
    assert!(stdout.contains("agent") && stdout.contains("MCTS(30)"));
}

#[test]
fn gridsearch_marks_one_best_cell() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"
[gridsearch]
kind = "DDA3"
n_h = [1, 2]
games = 2
[[agents]]
kind = "Random"
"#;
    ok(alphadda(dir.path(), cfg, &["gridsearch"]));
    let text = fs::read_to_string(dir.path().join("out/grid.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("cell,params,opponent,win,loss,draw,objective,best")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows.iter().filter(|r| r.ends_with("true")).count(), 1);
}
