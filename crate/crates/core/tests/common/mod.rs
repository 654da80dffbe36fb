//! Independent reference implementations used as oracles by the integration
//! tests. Nothing here calls into the evaluator, enumerators or closure code
//! of the library; only its plain data types are shared.

#![allow(dead_code)]

use std::collections::BTreeSet;

use proptest::prelude::*;
use topologic::{Formula, Model, PointSet, SubsetSpace, Valuation};

/// Every family of subsets of an `n`-point set that contains ∅ and X and is
/// closed under pairwise ∩ and ∪, by trying all 2^(2^n - 2) candidates.
pub fn brute_force_topology_count(n: usize) -> usize {
    let subsets = 1usize << n;
    let full = subsets - 1;
    let inner: Vec<usize> = (1..full).collect();
    let mut count = 0;
    for mask in 0u64..1 << inner.len() {
        let mut fam = vec![false; subsets];
        fam[0] = true;
        fam[full] = true;
        for (bit, s) in inner.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                fam[*s] = true;
            }
        }
        let members: Vec<usize> = (0..subsets).filter(|s| fam[*s]).collect();
        let closed = members
            .iter()
            .all(|a| members.iter().all(|b| fam[a & b] && fam[a | b]));
        if closed {
            count += 1;
        }
    }
    count
}

/// Naive fixpoint closure under ∩ and ∪, plus ∅ and X.
pub fn naive_topology(n: usize, generators: &[u64]) -> Vec<u64> {
    let full = (1u64 << n) - 1;
    let mut fam: BTreeSet<u64> = generators.iter().map(|g| g & full).collect();
    fam.insert(0);
    fam.insert(full);
    loop {
        let current: Vec<u64> = fam.iter().copied().collect();
        let before = fam.len();
        for a in &current {
            for b in &current {
                fam.insert(a & b);
                fam.insert(a | b);
            }
        }
        if fam.len() == before {
            return current;
        }
    }
}

pub fn space_from_bits(n: usize, opens: &[u64]) -> SubsetSpace {
    SubsetSpace::with_indices(n, opens.iter().map(|b| PointSet::from_bits(*b)).collect()).unwrap()
}

pub fn model_from_bits(n: usize, opens: &[u64], atoms: &[(&str, u64)]) -> Model {
    let full = (1u64 << n) - 1;
    let val: Valuation = atoms
        .iter()
        .map(|(a, b)| (a.to_string(), PointSet::from_bits(b & full)))
        .collect();
    Model::new(space_from_bits(n, opens), val).unwrap()
}

/// Satisfaction straight from the clauses, quantifying over raw sets.
pub fn naive_sat(model: &Model, x: usize, u: PointSet, f: &Formula) -> bool {
    match f {
        Formula::Atom(a) => model.valuation()[a].contains(x),
        Formula::Top => true,
        Formula::Bot => false,
        Formula::Not(g) => !naive_sat(model, x, u, g),
        Formula::And(g, h) => naive_sat(model, x, u, g) && naive_sat(model, x, u, h),
        Formula::Knows(g) => u.iter().all(|y| naive_sat(model, y, u, g)),
        Formula::Effort(g) => model
            .space
            .opens()
            .iter()
            .filter(|v| v.contains(x) && v.is_subset(u))
            .all(|v| naive_sat(model, x, *v, g)),
    }
}

/// Existential readings of the dual operators, without going through negation.
pub fn naive_possible(model: &Model, _x: usize, u: PointSet, f: &Formula) -> bool {
    u.iter().any(|y| naive_sat(model, y, u, f))
}

pub fn naive_diamond(model: &Model, x: usize, u: PointSet, f: &Formula) -> bool {
    model
        .space
        .opens()
        .iter()
        .filter(|v| v.contains(x) && v.is_subset(u))
        .any(|v| naive_sat(model, x, *v, f))
}

pub fn naive_valid(model: &Model, f: &Formula) -> bool {
    model
        .space
        .opens()
        .iter()
        .all(|u| u.iter().all(|x| naive_sat(model, x, *u, f)))
}

/// Remainder of `u`: opens below `u` that sit below no member not above `u`.
pub fn naive_remainder(space: &SubsetSpace, family: &[PointSet], u: PointSet) -> Vec<PointSet> {
    space
        .opens()
        .iter()
        .copied()
        .filter(|v| v.is_subset(u))
        .filter(|v| {
            family
                .iter()
                .filter(|w| !u.is_subset(**w))
                .all(|w| !v.is_subset(*w))
        })
        .collect()
}

pub fn naive_interior(space: &SubsetSpace, s: PointSet) -> PointSet {
    space
        .opens()
        .iter()
        .copied()
        .filter(|u| u.is_subset(s))
        .fold(PointSet::EMPTY, PointSet::union)
}

pub fn atom_names(k: usize) -> Vec<String> {
    ["A", "B", "C"][..k].iter().map(|s| s.to_string()).collect()
}

/// Core formulas over the given atoms.
pub fn arb_formula(atoms: Vec<String>, depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        1 => Just(Formula::Top),
        1 => Just(Formula::Bot),
        6 => proptest::sample::select(atoms).prop_map(Formula::Atom),
    ];
    leaf.prop_recursive(depth, 32, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            inner.clone().prop_map(Formula::knows),
            inner.prop_map(Formula::effort),
        ]
    })
}

/// A topological model on 1..=max_points points with atoms A and B, built
/// from random generators by [`naive_topology`].
pub fn arb_model(max_points: usize) -> impl Strategy<Value = Model> {
    (1..=max_points).prop_flat_map(|n| {
        let full = (1u64 << n) - 1;
        (
            proptest::collection::vec(0..=full, 0..4),
            0..=full,
            0..=full,
        )
            .prop_map(move |(gens, a, b)| {
                let opens = naive_topology(n, &gens);
                model_from_bits(n, &opens, &[("A", a), ("B", b)])
            })
    })
}

/// A set of points of `model`'s space, not necessarily open.
pub fn arb_subset(n: usize) -> impl Strategy<Value = PointSet> {
    (0..1u64 << n).prop_map(PointSet::from_bits)
}
