mod common;

use alphadda_core::game::{symmetries, symmetry_count};
use alphadda_core::{BoardState, GameVariant, Move};

use common::{oracle_disagreements, random_positions};

#[test]
fn engine_agrees_with_naive_rules() {
    for v in GameVariant::ALL {
        assert_eq!(oracle_disagreements(v, 300, 17), 0, "{v}");
    }
}

#[test]
fn board_text_round_trips() {
    for v in GameVariant::ALL {
        for s in random_positions(v, 50, 4) {
            let back: BoardState = s.to_string().parse().unwrap();
            assert_eq!(back, s);
        }
    }
}

#[test]
fn move_text_round_trips() {
    for v in GameVariant::ALL {
        for s in random_positions(v, 20, 9) {
            for m in s.valid_moves().unwrap() {
                assert_eq!(m.to_string().parse::<Move>().unwrap(), m);
            }
        }
    }
    assert_eq!("pass".parse::<Move>().unwrap(), Move::Pass);
    assert!("drop".parse::<Move>().is_err());
    assert!("place 1".parse::<Move>().is_err());
}

/// Legal-move indicator vectors must map onto each other under every symmetry.
#[test]
fn symmetries_carry_legal_moves() {
    for v in GameVariant::ALL {
        for s in random_positions(v, 40, 21) {
            let mut legal = vec![0.0f32; v.action_count()];
            for m in s.valid_moves().unwrap() {
                legal[m.action(v)] = 1.0;
            }
            let images = symmetries(&s, &legal);
            assert_eq!(images.len(), symmetry_count(v));
            assert_eq!(images[0].0, s);
            for (image, pi) in &images {
                let mut expect = vec![0.0f32; v.action_count()];
                for m in image.valid_moves().unwrap() {
                    expect[m.action(v)] = 1.0;
                }
                assert_eq!(&expect, pi, "{v}\n{image}");
                assert_eq!(image.outcome(), s.outcome());
                assert_eq!(image.empty_count(), s.empty_count());
            }
        }
    }
}
