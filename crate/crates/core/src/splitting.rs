//! Remainders of finite families of opens and the stable splittings built by
//! structural induction on a formula.
//!
//! A splitting is a finite family `F` of opens closed under intersection. The
//! remainder of `U ∈ F` is every open below `U` that is below no member of `F`
//! failing to contain `U`; the remainders partition `↓F`. A splitting is stable
//! for `φ` when, inside each remainder block, the truth of `φ` at a point does
//! not depend on which block member is the current open.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::semantics::{Evaluator, Pair};
use crate::space::{
    canonical, close_under_intersection, closure_family, heyting_implication, interior,
    is_intersection_closed, Model, PointSet, SubsetSpace,
};

/// Remainder of `u` in an arbitrary family, straight from the definition:
/// `↓u` minus `↓f` for every member `f` that does not contain `u`.
pub fn remainder_of(space: &SubsetSpace, family: &[PointSet], u: PointSet) -> Vec<PointSet> {
    let blockers: Vec<PointSet> = family
        .iter()
        .copied()
        .filter(|f| !u.is_subset(*f))
        .collect();
    space
        .down_set(u)
        .filter(|v| blockers.iter().all(|b| !v.is_subset(*b)))
        .collect()
}

/// `v1 ~ v2` iff they lie below exactly the same members of `family`.
pub fn same_class(family: &[PointSet], v1: PointSet, v2: PointSet) -> bool {
    family.iter().all(|u| v1.is_subset(*u) == v2.is_subset(*u))
}

/// Every open lying below some member of `family`.
pub fn down_family(space: &SubsetSpace, family: &[PointSet]) -> Vec<PointSet> {
    space
        .opens()
        .iter()
        .copied()
        .filter(|v| family.iter().any(|u| v.is_subset(*u)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Splitting {
    family: Vec<PointSet>,
}

impl Splitting {
    /// Requires the family to be closed under intersection.
    pub fn new(family: Vec<PointSet>) -> Result<Splitting> {
        let family = canonical(family);
        if !is_intersection_closed(&family) {
            return Err(Error::Precondition(
                "splitting family is not closed under intersection".into(),
            ));
        }
        Ok(Splitting { family })
    }

    /// The intersection closure of `family`.
    pub fn closure_of(family: &[PointSet]) -> Splitting {
        Splitting {
            family: close_under_intersection(family),
        }
    }

    pub fn family(&self) -> &[PointSet] {
        &self.family
    }

    pub fn contains(&self, u: PointSet) -> bool {
        self.family.binary_search(&u).is_ok()
    }

    pub fn is_subfamily_of(&self, other: &Splitting) -> bool {
        self.family.iter().all(|u| other.contains(*u))
    }

    /// Remainder of a member. The general definition and the form that only
    /// subtracts ideals of proper sub-members must agree on ∩-closed families.
    pub fn remainder(&self, space: &SubsetSpace, u: PointSet) -> Result<Vec<PointSet>> {
        if !self.contains(u) {
            return Err(Error::Precondition(format!(
                "{u:?} is not a member of the splitting"
            )));
        }
        let general = remainder_of(space, &self.family, u);
        let below: Vec<PointSet> = self
            .family
            .iter()
            .copied()
            .filter(|f| f.is_proper_subset(u))
            .collect();
        let simplified: Vec<PointSet> = space
            .down_set(u)
            .filter(|v| below.iter().all(|b| !v.is_subset(*b)))
            .collect();
        if general != simplified {
            return Err(Error::Inconsistency(format!(
                "remainder of {u:?}: general form {general:?} differs from simplified form {simplified:?}"
            )));
        }
        Ok(general)
    }

    /// Meet of all members containing `v`; `v` lies in that member's remainder.
    pub fn classify(&self, v: PointSet) -> Result<PointSet> {
        self.family
            .iter()
            .copied()
            .filter(|u| v.is_subset(*u))
            .reduce(PointSet::intersection)
            .ok_or_else(|| {
                Error::Precondition(format!("{v:?} lies below no member of the splitting"))
            })
    }

    /// Assign every open of `↓F` to its remainder, checking the partition laws
    /// on the way.
    pub fn partition(&self, space: &SubsetSpace) -> Result<RemainderPartition> {
        let mut assignment = BTreeMap::new();
        for u in &self.family {
            for v in self.remainder(space, *u)? {
                if let Some(prev) = assignment.insert(v, *u) {
                    return Err(Error::Inconsistency(format!(
                        "{v:?} lies in the remainders of both {prev:?} and {u:?}"
                    )));
                }
            }
        }
        let part = RemainderPartition { assignment };
        part.check_laws(space, self)?;
        Ok(part)
    }
}

/// Map from each open of `↓F` to the member whose remainder holds it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemainderPartition {
    assignment: BTreeMap<PointSet, PointSet>,
}

impl RemainderPartition {
    pub fn representative(&self, v: PointSet) -> Option<PointSet> {
        self.assignment.get(&v).copied()
    }

    pub fn assignment(&self) -> &BTreeMap<PointSet, PointSet> {
        &self.assignment
    }

    /// Blocks keyed by representative, members in canonical order.
    pub fn blocks(&self) -> BTreeMap<PointSet, Vec<PointSet>> {
        let mut out: BTreeMap<PointSet, Vec<PointSet>> = BTreeMap::new();
        for (v, rep) in &self.assignment {
            out.entry(*rep).or_default().push(*v);
        }
        out
    }

    fn check_laws(&self, space: &SubsetSpace, splitting: &Splitting) -> Result<()> {
        let fail = |msg: String| Err(Error::Inconsistency(msg));
        let covered: Vec<PointSet> = self.assignment.keys().copied().collect();
        if covered != down_family(space, splitting.family()) {
            return fail("remainders do not cover the ideal of the splitting".into());
        }
        for (rep, block) in self.blocks() {
            if !block.contains(&rep) {
                return fail(format!("{rep:?} is missing from its own remainder"));
            }
            // Convexity.
            for lo in &block {
                for hi in &block {
                    if !lo.is_subset(*hi) {
                        continue;
                    }
                    for mid in space.opens() {
                        if lo.is_subset(*mid)
                            && mid.is_subset(*hi)
                            && self.representative(*mid) != Some(rep)
                        {
                            return fail(format!("remainder of {rep:?} is not convex at {mid:?}"));
                        }
                    }
                }
            }
        }
        for (v, rep) in &self.assignment {
            if splitting.classify(*v)? != *rep {
                return fail(format!("{v:?} classifies away from its remainder {rep:?}"));
            }
        }
        for (v1, r1) in &self.assignment {
            for (v2, r2) in &self.assignment {
                if same_class(splitting.family(), *v1, *v2) != (r1 == r2) {
                    return fail(format!(
                        "class relation disagrees with remainders on {v1:?}, {v2:?}"
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Whether truth of `f` at each point is constant over the block's opens
/// containing that point.
pub fn is_stable(model: &Model, block: &[PointSet], f: &Formula) -> Result<bool> {
    is_stable_with(&mut Evaluator::new(model), block, f)
}

pub fn is_stable_with(ev: &mut Evaluator<'_>, block: &[PointSet], f: &Formula) -> Result<bool> {
    let space = &ev.model().space;
    let ext = ev.extensions(f)?;
    let mut truth: HashMap<usize, bool> = HashMap::new();
    for v in block {
        let idx = space
            .open_index(*v)
            .ok_or_else(|| Error::Precondition(format!("{v:?} is not an open")))?;
        for x in v.iter() {
            let here = ext[idx].contains(x);
            if *truth.entry(x).or_insert(here) != here {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableEntry {
    pub formula: Formula,
    pub splitting: Splitting,
    /// `U ↦ {x ∈ U | x, U ⊨ formula}` for every member `U`.
    pub extensions: BTreeMap<PointSet, PointSet>,
}

/// Stable splittings for a formula and each of its subformulas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplittingTable {
    entries: Vec<TableEntry>,
}

impl SplittingTable {
    /// Entries in subformula order; the target formula is last.
    pub fn entries(&self) -> &[TableEntry] {
        &self.entries
    }

    pub fn entry(&self, f: &Formula) -> Option<&TableEntry> {
        self.entries.iter().find(|e| &e.formula == f)
    }

    pub fn target(&self) -> &TableEntry {
        self.entries.last().expect("a table has at least one entry")
    }

    /// Answer `pair ⊨ f` from the recorded extension of the representative
    /// of `pair`'s open.
    pub fn fast_satisfies(&self, model: &Model, pair: Pair, f: &Formula) -> Result<bool> {
        pair.validate(&model.space)?;
        let entry = self
            .entry(f)
            .ok_or_else(|| Error::Precondition(format!("{f} is not covered by this table")))?;
        let rep = entry.splitting.classify(pair.open_set(&model.space))?;
        Ok(entry.extensions[&rep].contains(pair.point))
    }

    /// Check every guarantee the construction is supposed to give, returning
    /// a description of each failure. Empty means all hold.
    pub fn verify(&self, model: &Model) -> Result<Vec<String>> {
        let space = &model.space;
        let target = &self.target().formula;
        let fam = closure_family(model, &target.atoms())?;
        let mut ev = Evaluator::new(model);
        let mut failures = Vec::new();
        for entry in &self.entries {
            let psi = &entry.formula;
            let family = entry.splitting.family();
            if !entry.splitting.contains(space.full()) {
                failures.push(format!("X is missing from the splitting for {psi}"));
            }
            if !is_intersection_closed(family) {
                failures.push(format!(
                    "splitting for {psi} is not closed under intersection"
                ));
            }
            if let Some(u) = family.iter().find(|u| !fam.contains_open(**u)) {
                failures.push(format!(
                    "{u:?} in splitting for {psi} is outside the open closure family"
                ));
            }
            for (u, ext) in &entry.extensions {
                if !fam.contains(*ext) {
                    failures.push(format!(
                        "extension {ext:?} of {psi} at {u:?} is outside the closure family"
                    ));
                }
                if ev.extension(*u, psi)? != *ext {
                    failures.push(format!("recorded extension of {psi} at {u:?} is wrong"));
                }
            }
            let partition = match entry.splitting.partition(space) {
                Ok(p) => p,
                Err(Error::Inconsistency(msg)) => {
                    failures.push(format!("partition for {psi}: {msg}"));
                    continue;
                }
                Err(e) => return Err(e),
            };
            for phi in psi.subformulas() {
                if let Some(sub) = self.entry(&phi) {
                    if !sub.splitting.is_subfamily_of(&entry.splitting) {
                        failures.push(format!(
                            "splitting for {phi} is not contained in that for {psi}"
                        ));
                    }
                }
                for (rep, block) in partition.blocks() {
                    if !is_stable_with(&mut ev, &block, &phi)? {
                        failures.push(format!(
                            "remainder of {rep:?} in splitting for {psi} is not stable for {phi}"
                        ));
                    }
                }
            }
        }
        Ok(failures)
    }
}

/// Build stable splittings for `f` and every subformula, children first.
///
/// Leaves get `{X, ∅}`; negation reuses the child's splitting; conjunction
/// closes the union of both children's splittings. For `K φ` the interior
/// `W` of each member's `φ`-extension is added when it falls in that member's
/// remainder. For `[] φ` every Heyting implication between members is added.
pub fn build_splitting(model: &Model, f: &Formula) -> Result<SplittingTable> {
    let space = &model.space;
    space.require_topology()?;
    let leaf = Splitting::new(vec![space.full(), PointSet::EMPTY])?;
    let mut ev = Evaluator::new(model);
    let mut entries: Vec<TableEntry> = Vec::new();
    let mut index: HashMap<Formula, usize> = HashMap::new();

    for psi in f.subformulas() {
        let child = |g: &Formula| -> &Splitting { &entries[index[g]].splitting };
        let splitting = match &psi {
            Formula::Atom(_) | Formula::Top | Formula::Bot => leaf.clone(),
            Formula::Not(a) => child(a).clone(),
            Formula::And(a, b) => {
                let mut family = child(a).family().to_vec();
                family.extend_from_slice(child(b).family());
                Splitting::closure_of(&family)
            }
            Formula::Knows(a) => {
                let base = child(a).clone();
                let mut family = base.family().to_vec();
                for u in base.family() {
                    let w = interior(space, ev.extension(*u, a)?)?;
                    if base.remainder(space, *u)?.contains(&w) {
                        family.push(w);
                    }
                }
                Splitting::closure_of(&family)
            }
            Formula::Effort(a) => {
                let base = child(a).clone();
                let mut family = base.family().to_vec();
                for u in base.family() {
                    for w in base.family() {
                        family.push(heyting_implication(space, *u, *w)?);
                    }
                }
                Splitting::closure_of(&family)
            }
        };
        let mut extensions = BTreeMap::new();
        for u in splitting.family() {
            extensions.insert(*u, ev.extension(*u, &psi)?);
        }
        index.insert(psi.clone(), entries.len());
        entries.push(TableEntry {
            formula: psi,
            splitting,
            extensions,
        });
    }
    Ok(SplittingTable { entries })
}

/// Distinct members across the table, canonical order.
pub fn all_members(table: &SplittingTable) -> Vec<PointSet> {
    let set: BTreeSet<PointSet> = table
        .entries()
        .iter()
        .flat_map(|e| e.splitting.family().iter().copied())
        .collect();
    set.into_iter().collect()
}
