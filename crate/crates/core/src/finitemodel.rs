//! Basis models and the two-step quotient that turns a satisfying model into
//! a finite one: restrict the opens to a stable splitting, then identify
//! points that no remaining open and no atom can tell apart.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::semantics::{model_valid, pairs, Evaluator, Pair};
use crate::space::{
    close_under_union, is_intersection_closed, is_union_closed, Model, PointSet, SubsetSpace,
    Valuation,
};
use crate::splitting::{build_splitting, remainder_of, SplittingTable};

fn check_basis(space: &SubsetSpace, basis: &[PointSet]) -> Result<()> {
    if let Some(b) = basis.iter().find(|b| !space.is_open(**b)) {
        return Err(Error::Precondition(format!(
            "basis member {b:?} is not open"
        )));
    }
    if !is_union_closed(basis) {
        return Err(Error::Precondition(
            "basis is not closed under union".into(),
        ));
    }
    for u in space.opens() {
        let covered = basis
            .iter()
            .filter(|b| b.is_subset(*u))
            .fold(PointSet::EMPTY, |acc, b| acc.union(*b));
        if covered != *u {
            return Err(Error::Precondition(format!(
                "open {u:?} is not a union of basis members"
            )));
        }
    }
    Ok(())
}

/// A union-closed basis member `U` with `x ∈ U ⊆ v` lying in the remainder of
/// `v` with respect to `family`.
///
/// For every member `f` of `family` not containing `v`, pick the least point of
/// `v − f` and a basic neighbourhood of it inside `v`; the union of those and a
/// basic neighbourhood of `x` escapes every such `f`.
pub fn basis_witness(
    space: &SubsetSpace,
    basis: &[PointSet],
    family: &[PointSet],
    v: PointSet,
    x: usize,
) -> Result<PointSet> {
    space.require_topology()?;
    check_basis(space, basis)?;
    if let Some(f) = family.iter().find(|f| !space.is_open(**f)) {
        return Err(Error::Precondition(format!(
            "family member {f:?} is not open"
        )));
    }
    if !family.contains(&v) {
        return Err(Error::Precondition(format!("{v:?} is not in the family")));
    }
    if !v.contains(x) {
        return Err(Error::Precondition(format!("point {x} is not in {v:?}")));
    }
    let mut sorted = basis.to_vec();
    sorted.sort();
    let neighbourhood = |p: usize| {
        sorted
            .iter()
            .copied()
            .find(|b| b.contains(p) && b.is_subset(v))
            .expect("v is a union of basis members")
    };
    let mut witness = neighbourhood(x);
    for f in family.iter().filter(|f| !v.is_subset(**f)) {
        let escape = v.difference(*f).first().expect("v is not below f");
        witness = witness.union(neighbourhood(escape));
    }
    if !basis.contains(&witness)
        || !witness.contains(x)
        || !witness.is_subset(v)
        || !remainder_of(space, family, v).contains(&witness)
    {
        return Err(Error::Inconsistency(format!(
            "basis witness {witness:?} for point {x} in {v:?} fails its checks"
        )));
    }
    Ok(witness)
}

/// Where a basis model and its topology disagreed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BasisDisagreement {
    /// Different truth values at a pair whose open is a basis member.
    Pointwise {
        formula: Formula,
        point: usize,
        open: PointSet,
    },
    /// Validity in one model but not the other.
    Validity { formula: Formula },
}

/// The model over the same points whose opens are `basis`.
pub fn basis_model(model: &Model, basis: &[PointSet]) -> Result<Model> {
    let space = SubsetSpace::new(model.space.point_names().to_vec(), basis.to_vec())?;
    model.with_space(space)
}

/// Compare satisfaction in the topology model and its basis model for each
/// formula, pointwise on basis members and at the level of validity.
pub fn basis_equivalent(
    model: &Model,
    basis: &[PointSet],
    formulas: &[Formula],
) -> Result<Option<BasisDisagreement>> {
    model.space.require_topology()?;
    check_basis(&model.space, basis)?;
    let reduced = basis_model(model, basis)?;
    let mut full_ev = Evaluator::new(model);
    let mut basis_ev = Evaluator::new(&reduced);
    for f in formulas {
        let full_ext = full_ev.extensions(f)?.to_vec();
        let basis_ext = basis_ev.extensions(f)?;
        for (bi, u) in reduced.space.opens().iter().enumerate() {
            let ti = model.space.open_index(*u).expect("basis members are open");
            if let Some(point) = u
                .iter()
                .find(|x| full_ext[ti].contains(*x) != basis_ext[bi].contains(*x))
            {
                return Ok(Some(BasisDisagreement::Pointwise {
                    formula: f.clone(),
                    point,
                    open: *u,
                }));
            }
        }
        if model_valid(model, f)?.is_valid() != model_valid(&reduced, f)?.is_valid() {
            return Ok(Some(BasisDisagreement::Validity { formula: f.clone() }));
        }
    }
    Ok(None)
}

/// Minimal neighbourhood of each point, i.e. the intersection of the opens
/// around it, deduplicated.
pub fn minimal_neighbourhoods(space: &SubsetSpace) -> Vec<PointSet> {
    let mut out: Vec<PointSet> = (0..space.len())
        .map(|x| {
            space
                .opens()
                .iter()
                .copied()
                .filter(|u| u.contains(x))
                .fold(space.full(), PointSet::intersection)
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Points identified by their open-membership and atom profiles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientMap {
    /// Class index of each original point.
    pub point_class: Vec<usize>,
    /// Original points in each class.
    pub classes: Vec<PointSet>,
    /// Image of each original open, indexed like the original opens.
    pub open_class: Vec<PointSet>,
    pub quotient: Model,
}

impl QuotientMap {
    /// `(x, U) ↦ (x*, U*)`.
    pub fn translate(&self, original: &SubsetSpace, pair: Pair) -> Result<Pair> {
        pair.validate(original)?;
        let image = self.open_class[pair.open];
        Pair::new(&self.quotient.space, self.point_class[pair.point], image)
    }
}

pub fn point_quotient<'a>(
    model: &Model,
    atoms: impl IntoIterator<Item = &'a String>,
) -> Result<QuotientMap> {
    let space = &model.space;
    let atom_sets: Vec<(String, PointSet)> = atoms
        .into_iter()
        .map(|a| Ok((a.clone(), model.truth_set(a)?)))
        .collect::<Result<_>>()?;
    let profile = |x: usize| -> (Vec<bool>, Vec<bool>) {
        (
            space.opens().iter().map(|u| u.contains(x)).collect(),
            atom_sets.iter().map(|(_, s)| s.contains(x)).collect(),
        )
    };
    let mut seen: BTreeMap<(Vec<bool>, Vec<bool>), usize> = BTreeMap::new();
    let mut point_class = Vec::with_capacity(space.len());
    let mut classes: Vec<PointSet> = Vec::new();
    for x in 0..space.len() {
        let next = classes.len();
        let c = *seen.entry(profile(x)).or_insert(next);
        if c == next {
            classes.push(PointSet::EMPTY);
        }
        classes[c].insert(x);
        point_class.push(c);
    }
    let image = |s: PointSet| -> PointSet { s.iter().map(|x| point_class[x]).collect() };
    let open_class: Vec<PointSet> = space.opens().iter().map(|u| image(*u)).collect();
    let mut valuation = Valuation::new();
    for (a, s) in &atom_sets {
        // Every class lies wholly inside or outside i(a).
        if classes
            .iter()
            .any(|c| !c.is_subset(*s) && !c.is_disjoint(*s))
        {
            return Err(Error::Inconsistency(format!(
                "quotient valuation of {a} is ill-defined"
            )));
        }
        valuation.insert(a.clone(), image(*s));
    }
    let names = (1..=classes.len()).map(|i| format!("x{i}")).collect();
    let qspace = SubsetSpace::new(names, open_class.clone())?;
    if space.is_topology() && !qspace.is_topology() {
        return Err(Error::Inconsistency(
            "quotient of a topology is not a topology".into(),
        ));
    }
    Ok(QuotientMap {
        point_class,
        classes,
        open_class,
        quotient: Model::new(qspace, valuation)?,
    })
}

/// Output of [`extract_finite_model`].
#[derive(Debug, Clone)]
pub struct FiniteModel {
    pub table: SplittingTable,
    /// Same points and valuation, opens cut down to the union closure of the
    /// target's splitting.
    pub restricted: Model,
    pub quotient: QuotientMap,
}

impl FiniteModel {
    /// Translate a pair of the original model whose open survived restriction.
    pub fn translate(&self, point: usize, open: PointSet) -> Result<Pair> {
        let pair = Pair::new(&self.restricted.space, point, open)?;
        self.quotient.translate(&self.restricted.space, pair)
    }
}

pub fn extract_finite_model(model: &Model, f: &Formula) -> Result<FiniteModel> {
    let table = build_splitting(model, f)?;
    let mut family = table.target().splitting.family().to_vec();
    family.push(PointSet::EMPTY);
    let family = close_under_union(&family);
    if !is_intersection_closed(&family) {
        return Err(Error::Inconsistency(
            "union closure of the splitting lost intersection closure".into(),
        ));
    }
    let atoms = f.atoms();
    let valuation: Valuation = atoms
        .iter()
        .map(|a| Ok((a.clone(), model.truth_set(a)?)))
        .collect::<Result<_>>()?;
    let restricted = Model::new(
        SubsetSpace::new(model.space.point_names().to_vec(), family)?,
        valuation,
    )?;
    let quotient = point_quotient(&restricted, &atoms)?;

    let mut original = Evaluator::new(model);
    let mut cut = Evaluator::new(&restricted);
    let mut small = Evaluator::new(&quotient.quotient);
    for psi in f.subformulas() {
        for pair in pairs(&restricted.space) {
            let open = pair.open_set(&restricted.space);
            let in_original =
                original.satisfies(Pair::new(&model.space, pair.point, open)?, &psi)?;
            let in_cut = cut.satisfies(pair, &psi)?;
            let in_small = small.satisfies(quotient.translate(&restricted.space, pair)?, &psi)?;
            if in_original != in_cut || in_cut != in_small {
                return Err(Error::Inconsistency(format!(
                    "{psi} at point {} and open {open:?}: original {in_original}, restricted {in_cut}, quotient {in_small}",
                    pair.point
                )));
            }
        }
    }
    Ok(FiniteModel {
        table,
        restricted,
        quotient,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::semantics::satisfies;
    use crate::space::tests::{m0_space, ps};

    fn m0_a() -> Model {
        let val: Valuation = [("A".to_string(), ps(&[0]))].into_iter().collect();
        Model::new(m0_space(), val).unwrap()
    }

    fn chain() -> Model {
        let opens = vec![
            ps(&[]),
            ps(&[0]),
            ps(&[0, 1]),
            ps(&[0, 1, 2]),
            ps(&[0, 1, 2, 3]),
        ];
        let space = SubsetSpace::with_indices(4, opens).unwrap();
        let val: Valuation = [("A".to_string(), ps(&[0]))].into_iter().collect();
        Model::new(space, val).unwrap()
    }

    #[test]
    fn witness_examples() {
        let s = m0_space();
        let x = s.full();
        let fam = [x, ps(&[0, 1])];
        assert_eq!(basis_witness(&s, s.opens(), &fam, x, 0).unwrap(), x);
        // Nothing escapes {0,1}, so the least neighbourhood of 0 is enough.
        assert_eq!(
            basis_witness(&s, s.opens(), &fam, ps(&[0, 1]), 0).unwrap(),
            ps(&[0])
        );
        for v in fam {
            for p in v.iter() {
                let w = basis_witness(&s, s.opens(), &fam, v, p).unwrap();
                assert!(w.contains(p) && w.is_subset(v));
                assert!(remainder_of(&s, &fam, v).contains(&w));
            }
        }
        assert!(basis_witness(&s, s.opens(), &fam, ps(&[0]), 0).is_err());
        assert!(basis_witness(&s, &[ps(&[0]), x], &fam, x, 0).is_err());
    }

    #[test]
    fn basis_equivalence_on_m0() {
        let m = m0_a();
        let fs: Vec<Formula> = ["K A", "[] L A", "<> K A -> A", "L [] ~A"]
            .iter()
            .map(|s| parse(s).unwrap())
            .collect();
        assert_eq!(basis_equivalent(&m, m.space.opens(), &fs).unwrap(), None);
        let reduced = vec![ps(&[0]), ps(&[0, 1]), m.space.full()];
        assert_eq!(basis_equivalent(&m, &reduced, &fs).unwrap(), None);
        assert_eq!(minimal_neighbourhoods(&m.space), reduced);
    }

    #[test]
    fn quotient_examples() {
        let m = m0_a();
        let q = point_quotient(&m, &["A".to_string()]).unwrap();
        assert_eq!(q.classes.len(), 3);
        assert_eq!(q.quotient.space.opens(), m.space.opens());

        let x = PointSet::full(4);
        let indiscrete = SubsetSpace::with_indices(4, vec![PointSet::EMPTY, x]).unwrap();
        let val: Valuation = [("A".to_string(), ps(&[0]))].into_iter().collect();
        let m = Model::new(indiscrete, val).unwrap();
        assert_eq!(
            point_quotient(&m, &["A".to_string()])
                .unwrap()
                .classes
                .len(),
            2
        );
        assert_eq!(point_quotient(&m, &[]).unwrap().classes.len(), 1);
        assert!(matches!(
            point_quotient(&m, &["B".to_string()]),
            Err(Error::UnknownAtom(_))
        ));
    }

    #[test]
    fn chain_collapses_to_two_points() {
        let m = chain();
        let fm = extract_finite_model(&m, &parse("A").unwrap()).unwrap();
        let q = &fm.quotient.quotient;
        assert_eq!(q.space.point_names(), &["x1".to_string(), "x2".to_string()]);
        assert_eq!(q.space.opens(), &[PointSet::EMPTY, ps(&[0, 1])]);
        assert_eq!(q.truth_set("A").unwrap(), ps(&[0]));
    }

    #[test]
    fn top_collapses_to_one_point() {
        let fm = extract_finite_model(&m0_a(), &Formula::Top).unwrap();
        assert_eq!(fm.quotient.quotient.space.len(), 1);
    }

    #[test]
    fn knowledge_extraction_keeps_satisfaction() {
        let m = m0_a();
        let ka = parse("K A").unwrap();
        let fm = extract_finite_model(&m, &ka).unwrap();
        assert_eq!(
            fm.restricted.space.opens(),
            &[ps(&[]), ps(&[0]), m.space.full()]
        );
        // Points 1 and 2 share both profiles once {0,1} is gone.
        assert_eq!(fm.quotient.classes, vec![ps(&[0]), ps(&[1, 2])]);
        for p in pairs(&fm.restricted.space) {
            let open = p.open_set(&fm.restricted.space);
            let orig = satisfies(&m, Pair::new(&m.space, p.point, open).unwrap(), &ka).unwrap();
            let t = fm.translate(p.point, open).unwrap();
            assert_eq!(satisfies(&fm.quotient.quotient, t, &ka).unwrap(), orig);
        }
    }
}
