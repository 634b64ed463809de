mod common;

use common::shape_oracle::oracle_layer;
use deformbench::rng::SeededRandom;
use deformbench::shape::{
    apply_action, apply_actions, generate_shape, validate_shape, GenConfig, Layer, LayerSelector,
    Piece, Shape, ShapeAction, ShapeColor, ShapeKind, ShapeSpace,
};
use proptest::prelude::*;

fn arb_config() -> impl Strategy<Value = GenConfig> {
    (1u8..=4, 1u8..=4, 1u8..=8, any::<bool>(), any::<u64>()).prop_map(
        |(num_layers, num_shapes, num_colors, all_the_same, seed)| GenConfig {
            num_layers,
            num_shapes,
            num_colors,
            all_the_same,
            seed,
        },
    )
}

fn arb_shape() -> impl Strategy<Value = Shape> {
    arb_config().prop_map(|c| c.generate().unwrap())
}

fn arb_action() -> impl Strategy<Value = ShapeAction> {
    prop_oneof![
        Just(ShapeAction::Cut),
        Just(ShapeAction::RotateCw),
        Just(ShapeAction::RotateCcw),
        Just(ShapeAction::Mirror),
        (0usize..4, 0usize..8).prop_map(|(k, c)| ShapeAction::Fill {
            kind: ShapeKind::GENERATED[k],
            color: ShapeColor::ALL[c],
        }),
        (0u8..=4, 0usize..8).prop_map(|(l, c)| ShapeAction::Paint {
            layer: if l == 0 { LayerSelector::All } else { LayerSelector::Index(l) },
            color: ShapeColor::ALL[c],
        }),
        (any::<u64>()).prop_map(|seed| ShapeAction::Stack(
            GenConfig { num_layers: 1, seed, ..GenConfig::default() }.generate().unwrap()
        )),
    ]
}

fn sorted_pieces(layer: &Layer) -> Vec<Piece> {
    let mut v: Vec<Piece> = layer.pieces().collect();
    v.sort();
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn rotations_and_mirror_are_group_elements(shape in arb_shape()) {
        let sp = ShapeSpace::Stacked;
        let cw4 = apply_actions(&shape, &vec![ShapeAction::RotateCw; 4], sp).unwrap();
        prop_assert_eq!(&cw4, &shape);
        let back = apply_actions(&shape, &[ShapeAction::RotateCw, ShapeAction::RotateCcw], sp).unwrap();
        prop_assert_eq!(&back, &shape);
        let m2 = apply_actions(&shape, &[ShapeAction::Mirror, ShapeAction::Mirror], sp).unwrap();
        prop_assert_eq!(&m2, &shape);
    }

    #[test]
    fn closure_under_every_action(shape in arb_shape(), action in arb_action()) {
        if let Ok(out) = apply_action(&shape, &action, ShapeSpace::Stacked) {
            prop_assert!(validate_shape(&out).is_valid());
        }
    }

    #[test]
    fn geometric_ops_match_the_plane_oracle(shape in arb_shape(), which in 0usize..4) {
        let action = [ShapeAction::RotateCw, ShapeAction::RotateCcw, ShapeAction::Mirror, ShapeAction::Cut][which].clone();
        let expected: Vec<Layer> = shape.layers().iter().map(|l| oracle_layer(l, &action).unwrap()).collect();
        match apply_action(&shape, &action, ShapeSpace::Stacked) {
            Ok(out) => {
                // cut never unsupports anything, so no settling happens beyond
                // dropping emptied layers
                let kept: Vec<Layer> = expected.into_iter().filter(|l| !l.is_empty()).collect();
                prop_assert_eq!(out.layers(), kept.as_slice());
            }
            Err(_) => prop_assert!(expected.iter().all(Layer::is_empty)),
        }
    }

    #[test]
    fn paint_is_idempotent_and_keeps_kinds(shape in arb_shape(), c in 0usize..8) {
        let paint = ShapeAction::Paint { layer: LayerSelector::All, color: ShapeColor::ALL[c] };
        let once = apply_action(&shape, &paint, ShapeSpace::Stacked).unwrap();
        let twice = apply_action(&once, &paint, ShapeSpace::Stacked).unwrap();
        prop_assert_eq!(&once, &twice);
        let mut a: Vec<_> = shape.pieces().map(|p| p.kind).collect();
        let mut b: Vec<_> = once.pieces().map(|p| p.kind).collect();
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn rigid_ops_preserve_layer_multisets(shape in arb_shape(), which in 0usize..3) {
        let action = [ShapeAction::RotateCw, ShapeAction::RotateCcw, ShapeAction::Mirror][which].clone();
        let out = apply_action(&shape, &action, ShapeSpace::Stacked).unwrap();
        for (a, b) in shape.layers().iter().zip(out.layers()) {
            prop_assert_eq!(sorted_pieces(a), sorted_pieces(b));
        }
    }

    #[test]
    fn replay_is_deterministic(shape in arb_shape(), actions in proptest::collection::vec(arb_action(), 0..12)) {
        let a = apply_actions(&shape, &actions, ShapeSpace::Stacked);
        let b = apply_actions(&shape, &actions, ShapeSpace::Stacked);
        prop_assert_eq!(a, b);
    }
}

#[test]
fn generator_respects_sampled_kind_set() {
    let mut rng = SeededRandom::new(77);
    for num_shapes in 1..=4u8 {
        for _ in 0..200 {
            let cfg = GenConfig { num_layers: 4, num_shapes, num_colors: 8, all_the_same: false, seed: 0 };
            let s = generate_shape(&cfg, &mut rng).unwrap();
            let mut kinds: Vec<_> = s.pieces().map(|p| p.kind).collect();
            kinds.sort();
            kinds.dedup();
            assert!(kinds.len() <= usize::from(num_shapes));
        }
    }
}
