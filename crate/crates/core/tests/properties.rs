mod common;

use common::*;
use proptest::prelude::*;
use topologic::decide::{decide_sat, decide_valid, SearchBound, Verdict};
use topologic::finitemodel::{extract_finite_model, point_quotient};
use topologic::semantics::pairs;
use topologic::space::{
    close_under_intersection, close_under_union, closure_family, generate_topology,
    heyting_implication, interior, is_intersection_closed, is_union_closed,
};
use topologic::splitting::{build_splitting, is_stable, same_class, Splitting};
use topologic::{model_valid, parse, satisfies, Evaluator, Formula, PointSet};

fn ab() -> Vec<String> {
    atom_names(2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn print_then_parse_is_identity(f in arb_formula(atom_names(3), 6)) {
        prop_assert_eq!(parse(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn sugared_forms_round_trip(f in arb_formula(ab(), 3), g in arb_formula(ab(), 3)) {
        for h in [
            Formula::or(f.clone(), g.clone()),
            Formula::implies(f.clone(), g.clone()),
            Formula::possible(f.clone()),
            Formula::diamond(g.clone()),
        ] {
            prop_assert_eq!(parse(&h.to_string()).unwrap(), h);
        }
    }

    #[test]
    fn subformulas_list_children_first(f in arb_formula(ab(), 6)) {
        let subs = f.subformulas();
        prop_assert_eq!(subs.last(), Some(&f));
        for (i, s) in subs.iter().enumerate() {
            for c in s.children() {
                let at = subs.iter().position(|t| t == c);
                prop_assert!(matches!(at, Some(j) if j < i));
            }
        }
    }

    #[test]
    fn evaluator_matches_clause_oracle(m in arb_model(4), f in arb_formula(ab(), 4)) {
        for p in pairs(&m.space) {
            let u = p.open_set(&m.space);
            prop_assert_eq!(satisfies(&m, p, &f).unwrap(), naive_sat(&m, p.point, u, &f));
        }
    }

    #[test]
    fn duals_have_existential_meaning(m in arb_model(4), f in arb_formula(ab(), 3)) {
        let l = parse(&format!("L ({f})")).unwrap();
        let d = parse(&format!("<> ({f})")).unwrap();
        for p in pairs(&m.space) {
            let u = p.open_set(&m.space);
            prop_assert_eq!(satisfies(&m, p, &l).unwrap(), naive_possible(&m, p.point, u, &f));
            prop_assert_eq!(satisfies(&m, p, &d).unwrap(), naive_diamond(&m, p.point, u, &f));
        }
    }

    #[test]
    fn reflexivity_and_negation(m in arb_model(4), f in arb_formula(ab(), 3)) {
        let mut ev = Evaluator::new(&m);
        for p in pairs(&m.space) {
            if ev.satisfies(p, &Formula::effort(f.clone())).unwrap()
                || ev.satisfies(p, &Formula::knows(f.clone())).unwrap()
            {
                prop_assert!(ev.satisfies(p, &f).unwrap());
            }
        }
        for u in m.space.opens() {
            let pos = ev.extension(*u, &f).unwrap();
            prop_assert_eq!(ev.extension(*u, &Formula::not(f.clone())).unwrap(), u.difference(pos));
        }
    }

    #[test]
    fn rules_preserve_validity(m in arb_model(3), f in arb_formula(ab(), 3), g in arb_formula(ab(), 3)) {
        let valid = |h: &Formula| model_valid(&m, h).unwrap().is_valid();
        if valid(&f) {
            prop_assert!(valid(&Formula::knows(f.clone())));
            prop_assert!(valid(&Formula::effort(f.clone())));
            if valid(&Formula::implies(f.clone(), g.clone())) {
                prop_assert!(valid(&g));
            }
        }
    }

    #[test]
    fn atoms_are_persistent_under_effort(m in arb_model(4)) {
        for a in ["A", "B"] {
            let inst = parse(&format!("({a} -> [] {a}) & (~{a} -> [] ~{a})")).unwrap();
            prop_assert!(model_valid(&m, &inst).unwrap().is_valid());
        }
    }

    #[test]
    fn interior_laws(m in arb_model(5), s in arb_subset(5), t in arb_subset(5)) {
        let sp = &m.space;
        let s = s.intersection(sp.full());
        let t = t.intersection(sp.full());
        let is = interior(sp, s).unwrap();
        prop_assert_eq!(is, naive_interior(sp, s));
        prop_assert!(is.is_subset(s));
        prop_assert!(sp.is_open(is));
        prop_assert_eq!(interior(sp, is).unwrap(), is);
        if s.is_subset(t) {
            prop_assert!(is.is_subset(interior(sp, t).unwrap()));
        }
        for u in sp.opens() {
            prop_assert_eq!(interior(sp, *u).unwrap(), *u);
        }
    }

    #[test]
    fn heyting_implication_is_residual(m in arb_model(4)) {
        let sp = &m.space;
        for u in sp.opens() {
            for w in sp.opens() {
                let imp = heyting_implication(sp, *u, *w).unwrap();
                prop_assert!(sp.is_open(imp));
                for v in sp.opens() {
                    prop_assert_eq!(v.is_subset(imp), v.intersection(*u).is_subset(*w));
                }
            }
        }
    }

    #[test]
    fn closures_are_extensive_idempotent_and_closed(
        raw in proptest::collection::vec(0u64..32, 0..6),
    ) {
        let fam: Vec<PointSet> = raw.iter().map(|b| PointSet::from_bits(*b)).collect();
        let ci = close_under_intersection(&fam);
        prop_assert!(fam.iter().all(|s| ci.contains(s)));
        prop_assert!(is_intersection_closed(&ci));
        prop_assert_eq!(close_under_intersection(&ci), ci.clone());
        let cu = close_under_union(&fam);
        prop_assert!(fam.iter().all(|s| cu.contains(s)));
        prop_assert!(is_union_closed(&cu));
        prop_assert_eq!(close_under_union(&cu), cu);
    }

    #[test]
    fn generated_topologies_match_naive_closure(raw in proptest::collection::vec(0u64..32, 0..5)) {
        let gens: Vec<PointSet> = raw.iter().map(|b| PointSet::from_bits(*b)).collect();
        let sp = generate_topology(&gens, 5).unwrap();
        prop_assert!(sp.is_topology());
        let mut expected = naive_topology(5, &raw);
        expected.sort();
        let mut got: Vec<u64> = sp.opens().iter().map(|s| s.bits()).collect();
        got.sort();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn closure_family_is_closed_and_its_opens_are_interiors(m in arb_model(4)) {
        let atoms = ab();
        let fm = closure_family(&m, &atoms).unwrap();
        let n = m.space.len();
        for s in &fm.sets {
            prop_assert!(fm.contains(s.complement(n)));
            prop_assert!(fm.contains(interior(&m.space, *s).unwrap()));
            for t in &fm.sets {
                prop_assert!(fm.contains(s.intersection(*t)));
            }
        }
        let interiors: std::collections::BTreeSet<PointSet> =
            fm.sets.iter().map(|s| interior(&m.space, *s).unwrap()).collect();
        let open_members: std::collections::BTreeSet<PointSet> =
            fm.sets.iter().copied().filter(|s| m.space.is_open(*s)).collect();
        prop_assert_eq!(&interiors, &open_members);
        prop_assert_eq!(open_members.into_iter().collect::<Vec<_>>(), fm.opens.clone());
    }

    #[test]
    fn remainders_partition_the_down_set(m in arb_model(5), pick in proptest::collection::vec(any::<prop::sample::Index>(), 0..4)) {
        let sp = &m.space;
        let chosen: Vec<PointSet> = pick.iter().map(|i| *i.get(sp.opens())).collect();
        let f = Splitting::closure_of(&[chosen, vec![sp.full()]].concat());
        let fam = f.family();
        let part = f.partition(sp).unwrap();
        // Disjoint and covering: every open is in exactly one naive remainder.
        for v in sp.opens() {
            let holders: Vec<&PointSet> = fam.iter().filter(|u| naive_remainder(sp, fam, **u).contains(v)).collect();
            prop_assert_eq!(holders.len(), 1);
            prop_assert_eq!(part.representative(*v), Some(*holders[0]));
            prop_assert_eq!(f.classify(*v).unwrap(), *holders[0]);
        }
        // Convex.
        for u in fam {
            let rem = naive_remainder(sp, fam, *u);
            for a in &rem {
                for b in &rem {
                    for c in sp.opens() {
                        if a.is_subset(*c) && c.is_subset(*b) {
                            prop_assert!(rem.contains(c));
                        }
                    }
                }
            }
        }
        for a in sp.opens() {
            for b in sp.opens() {
                prop_assert_eq!(same_class(fam, *a, *b), f.classify(*a).unwrap() == f.classify(*b).unwrap());
            }
        }
    }

    #[test]
    fn stability_is_inherited_by_sub_blocks(m in arb_model(4), f in arb_formula(ab(), 3), keep in any::<u64>()) {
        let sp = &m.space;
        let table = build_splitting(&m, &f).unwrap();
        let part = table.target().splitting.partition(sp).unwrap();
        for (_, block) in part.blocks() {
            let sub: Vec<PointSet> = block.iter().enumerate().filter(|(i, _)| keep >> (i % 64) & 1 == 1).map(|(_, v)| *v).collect();
            for g in f.subformulas() {
                prop_assert!(is_stable(&m, &block, &g).unwrap());
                prop_assert!(is_stable(&m, &sub, &g).unwrap());
            }
        }
    }

    #[test]
    fn refining_a_stable_splitting_keeps_it_stable(m in arb_model(4), f in arb_formula(ab(), 3), extra in any::<prop::sample::Index>()) {
        let sp = &m.space;
        let table = build_splitting(&m, &f).unwrap();
        let base = &table.target().splitting;
        let u0 = *extra.get(sp.opens());
        let refined = Splitting::closure_of(&[base.family().to_vec(), vec![u0]].concat());
        prop_assert!(base.is_subfamily_of(&refined));
        let coarse = base.partition(sp).unwrap();
        for (_, block) in refined.partition(sp).unwrap().blocks() {
            let reps: std::collections::BTreeSet<_> = block.iter().map(|v| coarse.representative(*v)).collect();
            prop_assert_eq!(reps.len(), 1);
            prop_assert!(is_stable(&m, &block, &f).unwrap());
        }
    }

    #[test]
    fn effort_case_claim(m in arb_model(4), f in arb_formula(ab(), 2)) {
        let sp = &m.space;
        let boxed = Formula::effort(f.clone());
        let table = build_splitting(&m, &boxed).unwrap();
        let fphi = table.entry(&f).unwrap().splitting.family().to_vec();
        let fbox = table.target().splitting.family().to_vec();
        for u in &fphi {
            let rem_u = naive_remainder(sp, &fphi, *u);
            for u2 in &fbox {
                let lhs = rem_u.contains(&u2.intersection(*u));
                for v in naive_remainder(sp, &fbox, *u2) {
                    prop_assert_eq!(rem_u.contains(&v.intersection(*u)), lhs);
                }
            }
        }
    }

    #[test]
    fn effort_extension_identity(m in arb_model(4), f in arb_formula(ab(), 3)) {
        let sp = &m.space;
        let table = build_splitting(&m, &f).unwrap();
        let fphi = table.target().splitting.family().to_vec();
        let mut ev = Evaluator::new(&m);
        let not_f = Formula::not(f.clone());
        let lhs_formula = Formula::not(Formula::effort(f.clone()));
        for u in sp.opens() {
            let mut acc = PointSet::EMPTY;
            for v in &fphi {
                if naive_remainder(sp, &fphi, *v).contains(&u.intersection(*v)) {
                    acc = acc.union(ev.extension(*v, &not_f).unwrap());
                }
            }
            prop_assert_eq!(ev.extension(*u, &lhs_formula).unwrap(), u.intersection(acc));
        }
    }

    #[test]
    fn fast_path_agrees_with_evaluator(m in arb_model(5), f in arb_formula(ab(), 4)) {
        let table = build_splitting(&m, &f).unwrap();
        prop_assert!(table.verify(&m).unwrap().is_empty());
        for g in f.subformulas() {
            for p in pairs(&m.space) {
                prop_assert_eq!(table.fast_satisfies(&m, p, &g).unwrap(), satisfies(&m, p, &g).unwrap());
            }
        }
    }

    #[test]
    fn quotient_preserves_satisfaction(m in arb_model(5), f in arb_formula(ab(), 4)) {
        let q = point_quotient(&m, &ab()).unwrap();
        prop_assert!(q.quotient.space.is_topology());
        prop_assert!(q.classes.len() <= m.space.len());
        for p in pairs(&m.space) {
            let t = q.translate(&m.space, p).unwrap();
            prop_assert_eq!(satisfies(&m, p, &f).unwrap(), satisfies(&q.quotient, t, &f).unwrap());
        }
    }

    #[test]
    fn finite_model_preserves_satisfiability(m in arb_model(5), f in arb_formula(ab(), 3)) {
        let fm = extract_finite_model(&m, &f).unwrap();
        let n_atoms = f.atoms().len();
        let fam = fm.table.target().splitting.family().len();
        prop_assert!(fm.quotient.classes.len() <= m.space.len().min(1usize << (fam + n_atoms).min(20)));
        let satisfiable = pairs(&m.space).any(|p| satisfies(&m, p, &f).unwrap());
        let finite_satisfiable = pairs(&fm.quotient.quotient.space).any(|p| satisfies(&fm.quotient.quotient, p, &f).unwrap());
        prop_assert_eq!(satisfiable, finite_satisfiable);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn decision_is_dual_and_deterministic(f in arb_formula(vec!["A".into()], 3)) {
        let bound = SearchBound::new(2, &["A"]);
        let valid = decide_valid(&f, &bound).unwrap();
        let sat_neg = decide_sat(&Formula::not(f.clone()), &bound).unwrap();
        prop_assert_eq!(valid == Verdict::ValidWithinBound, sat_neg == Verdict::NoModelWithinBound);
        prop_assert_eq!(decide_valid(&f, &bound).unwrap(), valid.clone());
        if let Verdict::Invalid(w) = &valid {
            prop_assert!(!satisfies(&w.model, w.pair, &f).unwrap());
        }
        if let Verdict::Satisfiable(w) = decide_sat(&f, &bound).unwrap() {
            prop_assert!(satisfies(&w.model, w.pair, &f).unwrap());
        }
    }
}

#[test]
fn derived_theorems_hold_within_bound() {
    let bound = SearchBound::new(3, &["A", "B"]);
    for text in [
        "K (A & B) -> K A",
        "A -> L A",
        "L K A -> K A",
        "[] A -> <> A",
        "<> <> A -> <> A",
        "<> L A -> L <> A",
        "<> A -> A",
        "K A & K (A -> B) -> K B",
        "[] [] A -> [] A",
    ] {
        let f = parse(text).unwrap();
        assert_eq!(
            decide_valid(&f, &bound).unwrap(),
            Verdict::ValidWithinBound,
            "{text}"
        );
    }
}
