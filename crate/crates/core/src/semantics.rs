//! Satisfaction at point/open pairs.
//!
//! The evaluator works on extensions: for a formula `f` and every open `U` it
//! stores the set of points `x ∈ U` with `x, U ⊨ f`. Extensions are memoised
//! per subformula, so one [`Evaluator`] amortises the cost over many queries
//! against the same model.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::space::{Model, PointSet, SubsetSpace};

/// A point together with an open containing it. `open` indexes
/// [`SubsetSpace::opens`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Pair {
    pub point: usize,
    pub open: usize,
}

impl Pair {
    pub fn new(space: &SubsetSpace, point: usize, open: PointSet) -> Result<Pair> {
        let idx = space
            .open_index(open)
            .ok_or_else(|| Error::Precondition(format!("{open:?} is not an open")))?;
        let pair = Pair { point, open: idx };
        pair.validate(space)?;
        Ok(pair)
    }

    pub fn open_set(&self, space: &SubsetSpace) -> PointSet {
        space.opens()[self.open]
    }

    pub fn validate(&self, space: &SubsetSpace) -> Result<()> {
        match space.opens().get(self.open) {
            Some(u) if u.contains(self.point) => Ok(()),
            Some(u) => Err(Error::Precondition(format!(
                "point {} is not in open {u:?}",
                self.point
            ))),
            None => Err(Error::Precondition(format!(
                "no open with index {}",
                self.open
            ))),
        }
    }

    pub fn render(&self, space: &SubsetSpace) -> String {
        format!(
            "point {}, open {}",
            space.point_names()[self.point],
            space.render(self.open_set(space))
        )
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, #{})", self.point, self.open)
    }
}

/// Every pair of the space in the fixed search order: points ascending, and
/// for each point its opens from largest to smallest in canonical order.
pub fn pairs(space: &SubsetSpace) -> impl Iterator<Item = Pair> + '_ {
    (0..space.len()).flat_map(move |point| {
        (0..space.opens().len())
            .rev()
            .filter(move |&open| space.opens()[open].contains(point))
            .map(move |open| Pair { point, open })
    })
}

pub struct Evaluator<'m> {
    model: &'m Model,
    memo: HashMap<Formula, Vec<PointSet>>,
}

impl<'m> Evaluator<'m> {
    pub fn new(model: &'m Model) -> Self {
        Evaluator {
            model,
            memo: HashMap::new(),
        }
    }

    pub fn model(&self) -> &'m Model {
        self.model
    }

    /// Extensions of `f`, indexed like the space's opens. Memoised per
    /// queried formula; subterms are recomputed, which on small spaces is
    /// cheaper than hashing every subtree.
    pub fn extensions(&mut self, f: &Formula) -> Result<&[PointSet]> {
        if !self.memo.contains_key(f) {
            let ext = compute(self.model, f, &|_| None)?;
            self.memo.insert(f.clone(), ext);
        }
        Ok(&self.memo[f])
    }

    pub fn satisfies(&mut self, pair: Pair, f: &Formula) -> Result<bool> {
        pair.validate(&self.model.space)?;
        Ok(self.extensions(f)?[pair.open].contains(pair.point))
    }

    pub fn extension(&mut self, open: PointSet, f: &Formula) -> Result<PointSet> {
        let idx = self
            .model
            .space
            .open_index(open)
            .ok_or_else(|| Error::Precondition(format!("{open:?} is not an open")))?;
        Ok(self.extensions(f)?[idx])
    }

    /// The least falsifying pair in [`pairs`] order, if any.
    pub fn counterexample(&mut self, f: &Formula) -> Result<Option<Pair>> {
        let ext = self.extensions(f)?.to_vec();
        Ok(pairs(&self.model.space).find(|p| !ext[p.open].contains(p.point)))
    }

    /// The least satisfying pair in [`pairs`] order, if any.
    pub fn witness(&mut self, f: &Formula) -> Result<Option<Pair>> {
        let ext = self.extensions(f)?.to_vec();
        Ok(pairs(&self.model.space).find(|p| ext[p.open].contains(p.point)))
    }
}

type Bindings<'b> = dyn Fn(&str) -> Option<&'b [PointSet]> + 'b;

/// Extensions of a template whose atoms may be bound to precomputed
/// extensions; unbound atoms read the valuation.
pub fn extensions_with<'b>(
    model: &Model,
    template: &Formula,
    bindings: &Bindings<'b>,
) -> Result<Vec<PointSet>> {
    compute(model, template, bindings)
}

fn compute<'b>(model: &Model, f: &Formula, bound: &Bindings<'b>) -> Result<Vec<PointSet>> {
    let opens = model.space.opens();
    Ok(match f {
        Formula::Atom(a) if bound(a).is_some() => bound(a).unwrap().to_vec(),
        Formula::Atom(a) => {
            let truth = model.truth_set(a)?;
            opens.iter().map(|u| u.intersection(truth)).collect()
        }
        Formula::Top => opens.to_vec(),
        Formula::Bot => vec![PointSet::EMPTY; opens.len()],
        Formula::Not(a) => {
            let inner = compute(model, a, bound)?;
            opens
                .iter()
                .zip(inner)
                .map(|(u, e)| u.difference(e))
                .collect()
        }
        Formula::And(a, b) => {
            let left = compute(model, a, bound)?;
            let right = compute(model, b, bound)?;
            left.iter()
                .zip(right)
                .map(|(l, r)| l.intersection(r))
                .collect()
        }
        Formula::Knows(a) => {
            let inner = compute(model, a, bound)?;
            opens
                .iter()
                .zip(inner)
                .map(|(u, e)| if e == *u { *u } else { PointSet::EMPTY })
                .collect()
        }
        Formula::Effort(a) => {
            let inner = compute(model, a, bound)?;
            // x survives in U unless some open V ⊆ U around x falsifies a at x.
            opens
                .iter()
                .map(|u| {
                    let refuted = opens
                        .iter()
                        .zip(&inner)
                        .filter(|(v, _)| v.is_subset(*u))
                        .fold(PointSet::EMPTY, |acc, (v, e)| acc.union(v.difference(*e)));
                    u.difference(refuted)
                })
                .collect()
        }
    })
}

pub fn satisfies(model: &Model, pair: Pair, f: &Formula) -> Result<bool> {
    Evaluator::new(model).satisfies(pair, f)
}

pub fn extension(model: &Model, open: PointSet, f: &Formula) -> Result<PointSet> {
    Evaluator::new(model).extension(open, f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Counterexample(Pair),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

pub fn model_valid(model: &Model, f: &Formula) -> Result<Validity> {
    Ok(match Evaluator::new(model).counterexample(f)? {
        None => Validity::Valid,
        Some(p) => Validity::Counterexample(p),
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::space::tests::{m0_space, ps};
    use crate::space::Valuation;

    /// M0 with i(A) = {0}, i(B) = {0,1}.
    pub(crate) fn m0() -> Model {
        let val: Valuation = [("A".to_string(), ps(&[0])), ("B".to_string(), ps(&[0, 1]))]
            .into_iter()
            .collect();
        Model::new(m0_space(), val).unwrap()
    }

    fn at(m: &Model, x: usize, u: &[usize]) -> Pair {
        Pair::new(&m.space, x, ps(u)).unwrap()
    }

    fn sat(m: &Model, x: usize, u: &[usize], f: &str) -> bool {
        satisfies(m, at(m, x, u), &parse(f).unwrap()).unwrap()
    }

    #[test]
    fn satisfaction_examples() {
        let m = m0();
        assert!(sat(&m, 0, &[0, 1], "K B"));
        assert!(sat(&m, 1, &[0, 1, 2], "<> K B"));
        assert!(sat(&m, 2, &[0, 1, 2], "[] L B"));
        assert!(!sat(&m, 2, &[0, 1, 2], "B"));
    }

    #[test]
    fn extension_examples() {
        let m = m0();
        let x = ps(&[0, 1, 2]);
        assert_eq!(extension(&m, x, &parse("A").unwrap()).unwrap(), ps(&[0]));
        assert_eq!(extension(&m, x, &parse("K A").unwrap()).unwrap(), ps(&[]));
        assert_eq!(
            extension(&m, ps(&[0]), &parse("K A").unwrap()).unwrap(),
            ps(&[0])
        );
    }

    #[test]
    fn validity_examples() {
        let m = m0();
        assert_eq!(
            model_valid(&m, &parse("K A -> A").unwrap()).unwrap(),
            Validity::Valid
        );
        assert_eq!(
            model_valid(&m, &parse("A -> K A").unwrap()).unwrap(),
            Validity::Counterexample(at(&m, 0, &[0, 1, 2]))
        );
        assert_eq!(
            model_valid(&m, &parse("[] L B -> B").unwrap()).unwrap(),
            Validity::Counterexample(at(&m, 2, &[0, 1, 2]))
        );
    }

    #[test]
    fn unknown_atoms_and_bad_pairs_are_errors() {
        let m = m0();
        let p = at(&m, 0, &[0]);
        assert!(matches!(
            satisfies(&m, p, &parse("K C").unwrap()),
            Err(Error::UnknownAtom(c)) if c == "C"
        ));
        let bad = Pair { point: 2, open: 1 };
        assert!(matches!(
            satisfies(&m, bad, &Formula::Top),
            Err(Error::Precondition(_))
        ));
        assert!(Pair::new(&m.space, 0, ps(&[1])).is_err());
    }

    #[test]
    fn pair_order_lists_point_then_largest_open() {
        let m = m0();
        let order: Vec<(usize, PointSet)> = pairs(&m.space)
            .map(|p| (p.point, p.open_set(&m.space)))
            .collect();
        assert_eq!(
            order,
            vec![
                (0, ps(&[0, 1, 2])),
                (0, ps(&[0, 1])),
                (0, ps(&[0])),
                (1, ps(&[0, 1, 2])),
                (1, ps(&[0, 1])),
                (2, ps(&[0, 1, 2])),
            ]
        );
    }

    #[test]
    fn negation_complements_extensions() {
        let m = m0();
        let mut ev = Evaluator::new(&m);
        for f in ["A", "K B", "[] L B", "<> K A & B"] {
            let f = parse(f).unwrap();
            let pos = ev.extensions(&f).unwrap().to_vec();
            let neg = ev.extensions(&Formula::not(f)).unwrap().to_vec();
            for (i, u) in m.space.opens().iter().enumerate() {
                assert_eq!(neg[i], u.difference(pos[i]));
            }
        }
    }
}
