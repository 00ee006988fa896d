use alphadda_core::arena::{
    fixed_opponent_rating, match_series, round_robin, AgentKind, AgentSpec, EvaluatorSpec,
};
use alphadda_core::GameVariant;

#[test]
fn mcts_beats_random() {
    let v = GameVariant::Connect4;
    let mcts = AgentSpec::preset(AgentKind::Mcts1, v, EvaluatorSpec::Heuristic);
    let r = match_series(&mcts, &AgentSpec::Random, v, 100, 1).unwrap();
    assert_eq!(r.played(), 100);
    assert!(r.win_rate() >= 0.9, "{r:?}");
}

#[test]
fn equal_agents_stay_near_the_initial_rating() {
    let agents = [AgentSpec::Random, AgentSpec::Random];
    let rr = round_robin(&agents, GameVariant::Othello6, 50, 8).unwrap();
    assert_eq!(rr.games.len(), 100);
    for &r in rr.table.ratings() {
        assert!((r - 1500.0).abs() <= 60.0, "{r}");
    }
}

#[test]
fn fixed_rating_recovers_an_equal_opponent() {
    let r = fixed_opponent_rating(
        &AgentSpec::Random,
        &[(AgentSpec::Random, 1500.0)],
        GameVariant::Connect4,
        200,
        3,
    )
    .unwrap();
    assert!((r.rating - 1500.0).abs() <= 100.0, "{}", r.rating);
}
