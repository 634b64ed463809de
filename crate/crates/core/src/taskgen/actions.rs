//! Action sampling and distractor synthesis.

use std::collections::HashSet;

use super::{Actions, Subject, TaskError, TaskSpec};
use crate::cube::{all_moves, CubeMove};
use crate::rng::SeededRandom;
use crate::shape::{
    apply_action, generate_shape, GenConfig, LayerSelector, Shape, ShapeAction, ShapeActionKind, ShapeColor,
    ShapeKind, ShapeSpace,
};

/// Attempts per sampling site before giving up.
pub const RETRY_CAP: usize = 1000;

/// One uniform draw from the action space. Arguments that depend on the
/// current shape (the paint layer) are drawn against `current`.
pub fn draw_shape_action(space: ShapeSpace, current: &Shape, rng: &mut SeededRandom) -> ShapeAction {
    match *rng.pick(space.action_kinds()) {
        ShapeActionKind::Cut => ShapeAction::Cut,
        ShapeActionKind::RotateCw => ShapeAction::RotateCw,
        ShapeActionKind::RotateCcw => ShapeAction::RotateCcw,
        ShapeActionKind::Mirror => ShapeAction::Mirror,
        ShapeActionKind::Fill => ShapeAction::Fill {
            kind: *rng.pick(&ShapeKind::GENERATED),
            color: *rng.pick(&ShapeColor::ALL),
        },
        ShapeActionKind::Paint => {
            let slot = rng.index(current.layer_count() + 1);
            let layer = if slot == 0 { LayerSelector::All } else { LayerSelector::Index(slot as u8) };
            ShapeAction::Paint { layer, color: *rng.pick(&ShapeColor::ALL) }
        }
        ShapeActionKind::Stack => {
            let operand = generate_shape(&GenConfig::default(), rng).expect("default generator config is valid");
            ShapeAction::Stack(operand)
        }
    }
}

fn draw_move(rng: &mut SeededRandom) -> CubeMove {
    *rng.pick(all_moves())
}

/// Step 2: `spec.n` uniform draws, built one step at a time. A draw whose
/// application fails on the running shape is redrawn.
pub fn gen_action_list(initial: &Subject, spec: &TaskSpec, rng: &mut SeededRandom) -> Result<Actions, TaskError> {
    let n = spec.n as usize;
    match (initial, spec.dimension.shape_space()) {
        (Subject::Cube(_), None) => Ok(Actions::Cube((0..n).map(|_| draw_move(rng)).collect())),
        (Subject::Shape(shape), Some(space)) => {
            let mut current = shape.clone();
            let mut list = Vec::with_capacity(n);
            for _ in 0..n {
                let (action, next) = (0..RETRY_CAP)
                    .find_map(|_| {
                        let a = draw_shape_action(space, &current, rng);
                        apply_action(&current, &a, space).ok().map(|s| (a, s))
                    })
                    .ok_or(TaskError::ExhaustedRetries { site: "action list", attempts: RETRY_CAP })?;
                list.push(action);
                current = next;
            }
            Ok(Actions::Shape(list))
        }
        _ => Err(TaskError::WrongActionKind(spec.dimension)),
    }
}

/// Step 3: `spec.k` lists, each the target with `spec.r` distinct positions
/// replaced by a different draw. A candidate is redrawn when the engine
/// rejects it or when its outcome collides with the target or an earlier
/// distractor.
pub fn gen_distractors(
    initial: &Subject,
    target: &Actions,
    spec: &TaskSpec,
    rng: &mut SeededRandom,
) -> Result<Vec<Actions>, TaskError> {
    let target_outcome = initial.apply(target, spec.dimension)?;
    let mut seen: HashSet<Subject> = HashSet::from([target_outcome]);
    let positions: Vec<usize> = (0..target.len()).collect();
    let mut out = Vec::with_capacity(spec.k as usize);
    for _ in 0..spec.k {
        let found = (0..RETRY_CAP).find_map(|_| {
            let mut picked = rng.sample(&positions, spec.r as usize);
            picked.sort_unstable();
            let candidate = replace_positions(initial, target, &picked, spec, rng)?;
            let outcome = initial.apply(&candidate, spec.dimension).ok()?;
            seen.insert(outcome).then_some(candidate)
        });
        out.push(found.ok_or(TaskError::ExhaustedRetries { site: "distractors", attempts: RETRY_CAP })?);
    }
    Ok(out)
}

/// None when a replaced or later step no longer applies.
fn replace_positions(
    initial: &Subject,
    target: &Actions,
    picked: &[usize],
    spec: &TaskSpec,
    rng: &mut SeededRandom,
) -> Option<Actions> {
    match (initial, target, spec.dimension.shape_space()) {
        (Subject::Cube(_), Actions::Cube(moves), None) => {
            let mut moves = moves.clone();
            for &i in picked {
                moves[i] = loop {
                    let m = draw_move(rng);
                    if m != moves[i] {
                        break m;
                    }
                };
            }
            Some(Actions::Cube(moves))
        }
        (Subject::Shape(shape), Actions::Shape(actions), Some(space)) => {
            let mut current = shape.clone();
            let mut list = actions.clone();
            for i in 0..list.len() {
                if picked.contains(&i) {
                    list[i] = (0..RETRY_CAP).find_map(|_| {
                        let a = draw_shape_action(space, &current, rng);
                        (a != actions[i]).then_some(a)
                    })?;
                }
                current = apply_action(&current, &list[i], space).ok()?;
            }
            Some(Actions::Shape(list))
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::parse_shape;
    use crate::taskgen::{Dimension, Direction, InputMode};

    fn spec(dim: Dimension, n: u32, seed: u64) -> TaskSpec {
        TaskSpec::new(dim, Direction::Forward, n, InputMode::Encoded, seed)
    }

    #[test]
    fn list_is_deterministic_and_sized() {
        let initial = Subject::Shape(parse_shape("CrRg--Wb").unwrap());
        let s = spec(Dimension::TwoD, 5, 77);
        let a = gen_action_list(&initial, &s, &mut SeededRandom::new(1)).unwrap();
        let b = gen_action_list(&initial, &s, &mut SeededRandom::new(1)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 5);
    }

    #[test]
    fn never_opens_with_annihilating_cut() {
        let initial = Subject::Shape(parse_shape("CrRg----").unwrap());
        let s = spec(Dimension::TwoD, 3, 0);
        for seed in 0..1000 {
            let Actions::Shape(list) = gen_action_list(&initial, &s, &mut SeededRandom::new(seed)).unwrap() else {
                panic!()
            };
            assert_ne!(list[0], ShapeAction::Cut);
        }
    }

    #[test]
    fn single_replacement_per_distractor() {
        let initial = Subject::Shape(parse_shape("CrRgSbWy").unwrap());
        let s = spec(Dimension::TwoD, 4, 0);
        let mut rng = SeededRandom::new(5);
        let target = gen_action_list(&initial, &s, &mut rng).unwrap();
        let ds = gen_distractors(&initial, &target, &s, &mut rng).unwrap();
        assert_eq!(ds.len(), 3);
        let Actions::Shape(t) = &target else { panic!() };
        for d in &ds {
            let Actions::Shape(d) = d else { panic!() };
            assert_eq!(t.iter().zip(d).filter(|(a, b)| a != b).count(), 1);
        }
    }

    #[test]
    fn mirror_replacement_never_collides() {
        // A symmetric shape makes many single actions coincide with Mirror.
        let initial = Subject::Shape(parse_shape("CrCrCrCr").unwrap());
        let target = Actions::Shape(vec![ShapeAction::Mirror]);
        let s = spec(Dimension::TwoD, 1, 0);
        for seed in 0..100 {
            let ds = gen_distractors(&initial, &target, &s, &mut SeededRandom::new(seed)).unwrap();
            let mut outs: Vec<Subject> = ds.iter().map(|d| initial.apply(d, Dimension::TwoD).unwrap()).collect();
            outs.push(initial.apply(&target, Dimension::TwoD).unwrap());
            let unique: HashSet<_> = outs.iter().collect();
            assert_eq!(unique.len(), 4);
        }
    }
}
