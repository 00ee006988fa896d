//! Self-play training: self-play, symmetry augmentation, mini-batch SGD.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore};

use super::{EvalError, Evaluator, PolicyValueNet};
use crate::game::{encode_planes, symmetries, BoardState, GameVariant, Move, Outcome, PlaneStack};
use crate::search::{
    mcts_search, select_played_move, softmax_visit_index, MoveSelection, RootNoise, SearchParams,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub variant: GameVariant,
    pub n_iter: u32,
    pub n_self: u32,
    pub n_sim: u32,
    pub c_puct: f64,
    pub t_opening: u32,
    pub tau: f32,
    /// Dirichlet mixing fraction at the self-play root; zero disables noise.
    pub epsilon_noise: f64,
    pub dirichlet_alpha: f64,
    pub n_queue: usize,
    pub n_epoch: u32,
    pub n_batch: usize,
    pub learning_rate: f32,
    pub momentum: f32,
    pub weight_decay: f32,
}

impl TrainConfig {
    pub fn paper(variant: GameVariant) -> Self {
        let (n_iter, n_self, n_sim, t_opening, tau, n_queue) = match variant {
            GameVariant::Connect4 => (600, 30, 200, 4, 50.0, 20_000),
            GameVariant::Othello6 => (600, 10, 200, 4, 20.0, 20_000),
            GameVariant::Othello8 => (700, 10, 400, 6, 40.0, 50_000),
        };
        Self {
            variant,
            n_iter,
            n_self,
            n_sim,
            c_puct: 1.25,
            t_opening,
            tau,
            epsilon_noise: 0.2,
            dirichlet_alpha: 1.0,
            n_queue,
            n_epoch: 1,
            n_batch: 2048,
            learning_rate: 0.2,
            momentum: 0.9,
            weight_decay: 1e-4,
        }
    }

    /// Scaled-down schedule for CPU runs measured in minutes.
    pub fn desk(variant: GameVariant) -> Self {
        Self {
            n_iter: 20,
            n_self: 4,
            n_sim: 50,
            n_queue: 5_000,
            n_batch: 128,
            learning_rate: 0.02,
            ..Self::paper(variant)
        }
    }

    /// Search settings used during self-play.
    pub fn search_params(&self) -> SearchParams {
        SearchParams {
            n_sim: self.n_sim,
            c_puct: self.c_puct,
            t_opening: self.t_opening,
            tau: self.tau,
            mode: MoveSelection::SoftmaxOpening,
            dropout: 0.0,
            root_noise: (self.epsilon_noise > 0.0).then_some(RootNoise {
                epsilon: self.epsilon_noise,
                alpha: self.dirichlet_alpha,
            }),
        }
    }
}

/// One training sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayItem {
    pub planes: PlaneStack,
    pub pi: Vec<f32>,
    pub c_win: f32,
}

/// Bounded FIFO of training samples.
#[derive(Debug, Clone, Default)]
pub struct ReplayQueue {
    items: VecDeque<ReplayItem>,
    capacity: usize,
    inserted: u64,
}

impl ReplayQueue {
    pub fn new(capacity: usize) -> Self {
        Self {
            items: VecDeque::with_capacity(capacity.min(1 << 16)),
            capacity,
            inserted: 0,
        }
    }

    pub fn push(&mut self, item: ReplayItem) {
        if self.capacity == 0 {
            return;
        }
        if self.items.len() == self.capacity {
            self.items.pop_front();
        }
        self.items.push_back(item);
        self.inserted += 1;
    }

    /// Adds every symmetric image of every turn of `game`.
    pub fn push_game(&mut self, game: &GameRecord) -> usize {
        let z = game.c_win() as f32;
        let before = self.inserted;
        for turn in &game.turns {
            for (state, pi) in symmetries(&turn.state, &turn.pi) {
                let planes =
                    encode_planes(&[state], state.to_move()).expect("single-state history");
                self.push(ReplayItem {
                    planes,
                    pi,
                    c_win: z,
                });
            }
        }
        (self.inserted - before) as usize
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Samples ever inserted, including evicted ones.
    pub fn total_inserted(&self) -> u64 {
        self.inserted
    }

    pub fn get(&self, i: usize) -> Option<&ReplayItem> {
        self.items.get(i)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ReplayItem> {
        self.items.iter()
    }
}

/// One self-play turn: the position, the root search probabilities and the move played.
#[derive(Debug, Clone, PartialEq)]
pub struct TurnRecord {
    pub state: BoardState,
    pub pi: Vec<f32>,
    pub mv: Move,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameRecord {
    pub variant: GameVariant,
    pub turns: Vec<TurnRecord>,
    pub outcome: Outcome,
}

impl GameRecord {
    pub fn c_win(&self) -> i8 {
        self.outcome.c_win()
    }
}

/// Samples an index from `exp(N^(1/tau)) / sum_b exp(N_b^(1/tau))`.
pub fn softmax_visit_sample<R: Rng + ?Sized>(visits: &[u32], tau: f32, rng: &mut R) -> usize {
    softmax_visit_index(visits, tau, rng)
}

/// Plays `n_games` games of the evaluator against itself.
pub fn self_play<E: Evaluator + ?Sized>(
    evaluator: &E,
    config: &TrainConfig,
    n_games: u32,
    rng: &mut dyn RngCore,
) -> Vec<GameRecord> {
    let params = config.search_params();
    (0..n_games)
        .map(|_| {
            let mut state = BoardState::new_game(config.variant);
            let mut turns = Vec::new();
            while !state.is_terminal() {
                let result = mcts_search(&state, evaluator, &params, None, rng)
                    .expect("non-terminal state has moves");
                let mv = select_played_move(&result, &state, &params, rng);
                turns.push(TurnRecord {
                    state,
                    pi: result.visit_distribution(config.variant),
                    mv,
                });
                state = state.apply_move(mv).expect("search returns legal moves");
            }
            GameRecord {
                variant: config.variant,
                turns,
                outcome: state.outcome().expect("loop ends at a terminal state"),
            }
        })
        .collect()
}

/// Network plus SGD momentum buffer.
#[derive(Debug, Clone)]
pub struct Learner {
    net: PolicyValueNet<f32>,
    velocity: Vec<f32>,
}

impl Learner {
    pub fn new(net: PolicyValueNet<f32>) -> Self {
        let velocity = alloc::vec![0.0; net.parameter_count()];
        Self { net, velocity }
    }

    pub fn net(&self) -> &PolicyValueNet<f32> {
        &self.net
    }

    pub fn into_net(self) -> PolicyValueNet<f32> {
        self.net
    }
}

/// Loss of a single sample: `(c_win - v)^2 - pi . log p`.
pub fn sample_loss(value: f64, policy: &[f64], c_win: f64, pi: &[f64]) -> f64 {
    let ce: f64 = pi
        .iter()
        .zip(policy)
        .filter(|(&q, _)| q > 0.0)
        .map(|(&q, &p)| q * libm::log(p))
        .sum();
    (c_win - value) * (c_win - value) - ce
}

/// One SGD step with momentum and weight decay. Returns the mean batch loss
/// measured before the update.
pub fn train_step(
    learner: &mut Learner,
    batch: &[&ReplayItem],
    config: &TrainConfig,
) -> Result<f32, EvalError> {
    let samples: Vec<(&PlaneStack, &[f32], f32)> = batch
        .iter()
        .map(|it| (&it.planes, &it.pi[..], it.c_win))
        .collect();
    let (loss, grad) = learner.net.loss_and_gradients(&samples)?;
    let (lr, mu, wd) = (config.learning_rate, config.momentum, config.weight_decay);
    for ((w, v), g) in learner
        .net
        .params_mut()
        .iter_mut()
        .zip(&mut learner.velocity)
        .zip(grad)
    {
        *v = mu * *v + g + wd * *w;
        *w -= lr * *v;
    }
    Ok(loss)
}

/// Progress report emitted after every iteration.
#[derive(Debug, Clone, Copy)]
pub struct Checkpoint<'a> {
    pub iteration: u32,
    pub net: &'a PolicyValueNet<f32>,
    /// Mean mini-batch loss of the iteration, `NaN` if no step ran.
    pub mean_loss: f32,
    pub queue_len: usize,
    pub games: &'a [GameRecord],
}

/// Runs iterations `start..config.n_iter` of self-play, augmentation and
/// learning, calling `on_checkpoint` after each one.
pub fn train<E>(
    config: &TrainConfig,
    learner: &mut Learner,
    queue: &mut ReplayQueue,
    start: u32,
    rng: &mut dyn RngCore,
    mut on_checkpoint: impl FnMut(&Checkpoint<'_>) -> Result<(), E>,
) -> Result<(), E> {
    for iteration in start..config.n_iter {
        let games = self_play(&learner.net, config, config.n_self, rng);
        for game in &games {
            queue.push_game(game);
        }

        let mut order: Vec<usize> = (0..queue.len()).collect();
        let (mut sum, mut steps) = (0.0f32, 0u32);
        for _ in 0..config.n_epoch {
            order.shuffle(rng);
            for chunk in order.chunks(config.n_batch.max(1)) {
                let batch: Vec<&ReplayItem> = chunk.iter().filter_map(|&i| queue.get(i)).collect();
                if let Ok(loss) = train_step(learner, &batch, config) {
                    sum += loss;
                    steps += 1;
                }
            }
        }
        on_checkpoint(&Checkpoint {
            iteration: iteration + 1,
            net: &learner.net,
            mean_loss: if steps == 0 {
                f32::NAN
            } else {
                sum / steps as f32
            },
            queue_len: queue.len(),
            games: &games,
        })?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{HeuristicEvaluator, NetworkConfig};
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tiny(variant: GameVariant) -> NetworkConfig {
        NetworkConfig {
            variant,
            history: 1,
            residual_blocks: 1,
            filters: 4,
            kernel_size: 3,
            value_hidden: 8,
            policy_hidden: 8,
        }
    }

    fn quick(variant: GameVariant) -> TrainConfig {
        TrainConfig {
            n_iter: 2,
            n_self: 1,
            n_sim: 8,
            n_batch: 32,
            ..TrainConfig::desk(variant)
        }
    }

    #[test]
    fn paper_presets() {
        let c = TrainConfig::paper(GameVariant::Othello8);
        assert_eq!(
            (c.n_iter, c.n_self, c.n_sim, c.t_opening),
            (700, 10, 400, 6)
        );
        assert_eq!((c.tau, c.n_queue, c.n_batch), (40.0, 50_000, 2048));
        let c = TrainConfig::paper(GameVariant::Connect4);
        assert_eq!((c.n_self, c.tau, c.n_queue), (30, 50.0, 20_000));
        assert_eq!(
            (c.learning_rate, c.momentum, c.weight_decay),
            (0.2, 0.9, 1e-4)
        );
    }

    #[test]
    fn loss_formula() {
        let uniform = [1.0 / 7.0; 7];
        let mut onehot = [0.0; 7];
        onehot[2] = 1.0;
        let l = sample_loss(0.0, &uniform, 1.0, &onehot);
        assert!((l - (1.0 + libm::log(7.0))).abs() < 1e-12);
        assert!((l - 2.9459).abs() < 1e-4);
        assert_eq!(sample_loss(1.0, &onehot, 1.0, &onehot), 0.0);
        assert_eq!(sample_loss(-1.0, &onehot, -1.0, &onehot), 0.0);
    }

    #[test]
    fn zero_network_loss_is_one_plus_ln7() {
        let cfg = tiny(GameVariant::Connect4);
        let n =
            PolicyValueNet::<f32>::new(cfg, &mut ChaCha8Rng::seed_from_u64(0)).parameter_count();
        let net = PolicyValueNet::<f64>::from_params(cfg, vec![0.0; n]).unwrap();
        let s = BoardState::new_game(GameVariant::Connect4);
        let planes = encode_planes(&[s], s.to_move()).unwrap();
        let pi = [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0];
        let (l, _) = net.loss_and_gradients(&[(&planes, &pi, 1.0)]).unwrap();
        assert!((l - (1.0 + libm::log(7.0))).abs() < 1e-9);
    }

    #[test]
    fn empty_batch_is_an_error() {
        let net = PolicyValueNet::new(
            tiny(GameVariant::Connect4),
            &mut ChaCha8Rng::seed_from_u64(0),
        );
        let mut learner = Learner::new(net);
        assert_eq!(
            train_step(&mut learner, &[], &quick(GameVariant::Connect4)),
            Err(EvalError::EmptyBatch)
        );
    }

    #[test]
    fn repeated_steps_descend() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cfg = quick(GameVariant::Connect4);
        let games = self_play(&HeuristicEvaluator, &cfg, 1, &mut rng);
        let mut queue = ReplayQueue::new(1000);
        queue.push_game(&games[0]);
        let batch: Vec<&ReplayItem> = queue.iter().collect();
        let mut learner = Learner::new(PolicyValueNet::new(tiny(GameVariant::Connect4), &mut rng));
        let first = train_step(&mut learner, &batch, &cfg).unwrap();
        let second = train_step(&mut learner, &batch, &cfg).unwrap();
        assert!(second <= first, "{second} > {first}");
    }

    #[test]
    fn queue_is_fifo_bounded() {
        let s = BoardState::new_game(GameVariant::Connect4);
        let planes = encode_planes(&[s], s.to_move()).unwrap();
        let mut q = ReplayQueue::new(10);
        for i in 0..15 {
            q.push(ReplayItem {
                planes: planes.clone(),
                pi: vec![i as f32],
                c_win: 0.0,
            });
        }
        assert_eq!(q.len(), 10);
        assert_eq!(q.total_inserted(), 15);
        assert_eq!(q.get(0).unwrap().pi, vec![5.0]);
        assert_eq!(q.get(9).unwrap().pi, vec![14.0]);
    }

    #[test]
    fn self_play_records_are_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cfg = quick(GameVariant::Connect4);
        let games = self_play(&HeuristicEvaluator, &cfg, 3, &mut rng);
        for g in &games {
            assert!((7..=42).contains(&g.turns.len()));
            let last = g.turns.last().unwrap();
            let end = last.state.apply_move(last.mv).unwrap();
            assert_eq!(end.outcome(), Some(g.outcome));
            for t in &g.turns {
                assert!((t.pi.iter().sum::<f32>() - 1.0).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn augmentation_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cfg = quick(GameVariant::Othello6);
        let game = &self_play(&HeuristicEvaluator, &cfg, 1, &mut rng)[0];
        let mut q = ReplayQueue::new(100_000);
        assert_eq!(q.push_game(game), 8 * game.turns.len());
        assert_eq!(q.len(), 8 * game.turns.len());
    }

    #[test]
    fn softmax_sample_is_even_for_equal_visits() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 4000;
        let zeros = (0..n)
            .filter(|_| softmax_visit_sample(&[1, 1], 0.7, &mut rng) == 0)
            .count();
        assert!((zeros as f64 / n as f64 - 0.5).abs() < 0.03);
    }

    #[test]
    fn train_emits_one_checkpoint_per_iteration() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let cfg = quick(GameVariant::Connect4);
        let mut learner = Learner::new(PolicyValueNet::new(tiny(GameVariant::Connect4), &mut rng));
        let mut queue = ReplayQueue::new(cfg.n_queue);
        let mut seen = Vec::new();
        train::<()>(&cfg, &mut learner, &mut queue, 0, &mut rng, |c| {
            let turns: usize = c.games.iter().map(|g| g.turns.len()).sum();
            seen.push((c.iteration, c.queue_len, turns, c.mean_loss));
            Ok(())
        })
        .unwrap();
        assert_eq!(seen.len(), 2);
        assert_eq!(seen[0].1, 2 * seen[0].2);
        assert_eq!(seen[1].1 - seen[0].1, 2 * seen[1].2);
        assert!(seen.iter().all(|s| s.3.is_finite()));
        assert_eq!((seen[0].0, seen[1].0), (1, 2));
    }
}
