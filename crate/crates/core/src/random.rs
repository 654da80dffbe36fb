//! Seeded generators for formulas, topologies and models.
//!
//! Everything draws from [`ChaCha8Rng`] so that a seed reproduces the same
//! stream on every platform.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::Formula;
use crate::space::{Model, PointSet, SubsetSpace, Valuation};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random formula of depth at most `max_depth` over `atoms`. Surface
/// operators are produced through their desugarings.
pub fn formula(rng: &mut impl Rng, atoms: &[String], max_depth: usize) -> Formula {
    if max_depth == 0 || rng.gen_bool(0.25) {
        return leaf(rng, atoms);
    }
    let d = max_depth - 1;
    match rng.gen_range(0..8) {
        0 => Formula::not(formula(rng, atoms, d)),
        1 => Formula::and(formula(rng, atoms, d), formula(rng, atoms, d)),
        2 => Formula::knows(formula(rng, atoms, d)),
        3 => Formula::effort(formula(rng, atoms, d)),
        // Sugar desugars to three core levels, so children get two less.
        4 if d > 1 => Formula::implies(formula(rng, atoms, d - 2), formula(rng, atoms, d - 2)),
        5 if d > 1 => Formula::or(formula(rng, atoms, d - 2), formula(rng, atoms, d - 2)),
        6 if d > 1 => Formula::possible(formula(rng, atoms, d - 2)),
        7 if d > 1 => Formula::diamond(formula(rng, atoms, d - 2)),
        _ => Formula::not(formula(rng, atoms, d)),
    }
}

fn leaf(rng: &mut impl Rng, atoms: &[String]) -> Formula {
    if atoms.is_empty() || rng.gen_bool(0.15) {
        if rng.gen_bool(0.5) {
            Formula::Top
        } else {
            Formula::Bot
        }
    } else {
        Formula::Atom(atoms.choose(rng).unwrap().clone())
    }
}

/// Topology of up-closed sets of a preorder. `above[i]` lists every `j` with
/// `i ≤ j` and must already be reflexive and transitive.
pub fn topology_from_preorder(n: usize, above: &[PointSet]) -> SubsetSpace {
    let opens: Vec<PointSet> = (0..1u64 << n)
        .map(PointSet::from_bits)
        .filter(|u| u.iter().all(|x| above[x].is_subset(*u)))
        .collect();
    SubsetSpace::with_indices(n, opens).expect("up-sets always include X")
}

/// Reflexive transitive closure of a relation given as successor sets.
pub fn preorder_closure(n: usize, mut above: Vec<PointSet>) -> Vec<PointSet> {
    for (i, a) in above.iter_mut().enumerate() {
        a.insert(i);
    }
    for k in 0..n {
        for i in 0..n {
            if above[i].contains(k) {
                above[i] = above[i].union(above[k]);
            }
        }
    }
    above
}

/// Random topology on exactly `n` points, from a random preorder.
pub fn topology(rng: &mut impl Rng, n: usize) -> SubsetSpace {
    let density = rng.gen_range(0.05..0.5);
    let above = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && rng.gen_bool(density))
                .collect::<PointSet>()
        })
        .collect();
    topology_from_preorder(n, &preorder_closure(n, above))
}

pub fn valuation(rng: &mut impl Rng, n: usize, atoms: &[String]) -> Valuation {
    atoms
        .iter()
        .map(|a| {
            (
                a.clone(),
                PointSet::from_bits(rng.gen::<u64>()).intersection(PointSet::full(n)),
            )
        })
        .collect()
}

/// Random topological model with between 1 and `max_points` points.
pub fn topological_model(rng: &mut impl Rng, max_points: usize, atoms: &[String]) -> Model {
    let n = rng.gen_range(1..=max_points);
    let space = topology(rng, n);
    let val = valuation(rng, n, atoms);
    Model::new(space, val).expect("generated valuations are in range")
}

/// Random propositional formula over the given variables with `->`, `|`,
/// `&` and `~`.
pub fn propositional(rng: &mut impl Rng, vars: &[String], max_depth: usize) -> Formula {
    if max_depth == 0 || rng.gen_bool(0.3) {
        return Formula::Atom(vars.choose(rng).unwrap().clone());
    }
    let d = max_depth - 1;
    match rng.gen_range(0..4) {
        0 => Formula::not(propositional(rng, vars, d)),
        1 => Formula::and(propositional(rng, vars, d), propositional(rng, vars, d)),
        2 => Formula::or(propositional(rng, vars, d), propositional(rng, vars, d)),
        _ => Formula::implies(propositional(rng, vars, d), propositional(rng, vars, d)),
    }
}
