//! Finite subset spaces, topologies and the set-lattice operations used by
//! the splitting and quotient constructions.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::formula::RESERVED;

/// Largest supported universe.
pub const MAX_POINTS: usize = 64;

/// A set of point indices over a universe of at most [`MAX_POINTS`] points.
///
/// Ordered by cardinality first, then lexicographically by sorted members.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PointSet(u64);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);

    pub fn full(n: usize) -> PointSet {
        assert!(n <= MAX_POINTS);
        if n == MAX_POINTS {
            PointSet(u64::MAX)
        } else {
            PointSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> PointSet {
        assert!(i < MAX_POINTS);
        PointSet(1 << i)
    }

    pub fn from_bits(bits: u64) -> PointSet {
        PointSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_POINTS && self.0 & (1 << i) != 0
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < MAX_POINTS);
        self.0 |= 1 << i;
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: PointSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: PointSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_proper_subset(self, other: PointSet) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn union(self, other: PointSet) -> PointSet {
        PointSet(self.0 | other.0)
    }

    pub fn intersection(self, other: PointSet) -> PointSet {
        PointSet(self.0 & other.0)
    }

    pub fn difference(self, other: PointSet) -> PointSet {
        PointSet(self.0 & !other.0)
    }

    pub fn complement(self, n: usize) -> PointSet {
        PointSet::full(n).difference(self)
    }

    /// Members in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    pub fn first(self) -> Option<usize> {
        self.iter().next()
    }

    /// Largest index plus one, or 0 for the empty set.
    pub fn bound(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    /// Render with the given point names, e.g. `{a,b}`.
    pub fn render(self, names: &[String]) -> String {
        let members: Vec<&str> = self.iter().map(|i| names[i].as_str()).collect();
        format!("{{{}}}", members.join(","))
    }
}

impl FromIterator<usize> for PointSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = PointSet::EMPTY;
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl Ord for PointSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for PointSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let members: Vec<String> = self.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", members.join(","))
    }
}

/// Sort into the canonical family order and drop duplicates.
pub fn canonical(mut family: Vec<PointSet>) -> Vec<PointSet> {
    family.sort();
    family.dedup();
    family
}

pub fn is_intersection_closed(family: &[PointSet]) -> bool {
    let set: BTreeSet<PointSet> = family.iter().copied().collect();
    family
        .iter()
        .all(|a| family.iter().all(|b| set.contains(&a.intersection(*b))))
}

pub fn is_union_closed(family: &[PointSet]) -> bool {
    let set: BTreeSet<PointSet> = family.iter().copied().collect();
    family
        .iter()
        .all(|a| family.iter().all(|b| set.contains(&a.union(*b))))
}

fn close_under(family: &[PointSet], op: impl Fn(PointSet, PointSet) -> PointSet) -> Vec<PointSet> {
    let mut set: BTreeSet<PointSet> = family.iter().copied().collect();
    let mut frontier: Vec<PointSet> = set.iter().copied().collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        let current: Vec<PointSet> = set.iter().copied().collect();
        for a in &frontier {
            for b in &current {
                let c = op(*a, *b);
                if set.insert(c) {
                    next.push(c);
                }
            }
        }
        frontier = next;
    }
    set.into_iter().collect()
}

/// Least superfamily closed under pairwise intersection, in canonical order.
pub fn close_under_intersection(family: &[PointSet]) -> Vec<PointSet> {
    close_under(family, PointSet::intersection)
}

/// Least superfamily closed under pairwise union, in canonical order.
pub fn close_under_union(family: &[PointSet]) -> Vec<PointSet> {
    close_under(family, PointSet::union)
}

/// A finite subset space: named points and a family of opens containing X.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetSpace {
    point_names: Vec<String>,
    opens: Vec<PointSet>,
    intersection_closed: bool,
    union_closed: bool,
}

impl SubsetSpace {
    /// Validate and canonicalise. Duplicate opens are merged.
    pub fn new(point_names: Vec<String>, opens: Vec<PointSet>) -> Result<SubsetSpace> {
        let n = point_names.len();
        if n == 0 {
            return Err(Error::InvalidSpace("no points".into()));
        }
        if n > MAX_POINTS {
            return Err(Error::InvalidSpace(format!(
                "{n} points exceeds the supported maximum of {MAX_POINTS}"
            )));
        }
        let names: BTreeSet<&String> = point_names.iter().collect();
        if names.len() != n {
            return Err(Error::InvalidSpace("duplicate point names".into()));
        }
        let full = PointSet::full(n);
        if let Some(bad) = opens.iter().find(|o| !o.is_subset(full)) {
            return Err(Error::InvalidSpace(format!(
                "open {bad:?} has members outside 0..{n}"
            )));
        }
        let opens = canonical(opens);
        if !opens.contains(&full) {
            return Err(Error::InvalidSpace(
                "the whole point set X is not among the opens".into(),
            ));
        }
        Ok(SubsetSpace {
            intersection_closed: is_intersection_closed(&opens),
            union_closed: is_union_closed(&opens),
            point_names,
            opens,
        })
    }

    /// Space on points named `0..n`.
    pub fn with_indices(n: usize, opens: Vec<PointSet>) -> Result<SubsetSpace> {
        SubsetSpace::new((0..n).map(|i| i.to_string()).collect(), opens)
    }

    pub fn len(&self) -> usize {
        self.point_names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.point_names.is_empty()
    }

    pub fn point_names(&self) -> &[String] {
        &self.point_names
    }

    pub fn full(&self) -> PointSet {
        PointSet::full(self.len())
    }

    /// Opens in canonical order.
    pub fn opens(&self) -> &[PointSet] {
        &self.opens
    }

    pub fn open_index(&self, set: PointSet) -> Option<usize> {
        self.opens.binary_search(&set).ok()
    }

    pub fn is_open(&self, set: PointSet) -> bool {
        self.open_index(set).is_some()
    }

    pub fn is_intersection_closed(&self) -> bool {
        self.intersection_closed
    }

    pub fn is_union_closed(&self) -> bool {
        self.union_closed
    }

    /// Contains ∅ and X and is closed under pairwise ∩ and ∪.
    pub fn is_topology(&self) -> bool {
        self.intersection_closed && self.union_closed && self.is_open(PointSet::EMPTY)
    }

    pub fn require_topology(&self) -> Result<()> {
        if self.is_topology() {
            Ok(())
        } else {
            Err(Error::NotATopology)
        }
    }

    /// All opens contained in `u` (the principal ideal ↓u).
    pub fn down_set(&self, u: PointSet) -> impl Iterator<Item = PointSet> + '_ {
        self.opens.iter().copied().filter(move |v| v.is_subset(u))
    }

    pub fn render(&self, set: PointSet) -> String {
        set.render(&self.point_names)
    }

    pub fn point_index(&self, name: &str) -> Option<usize> {
        self.point_names.iter().position(|p| p == name)
    }
}

/// Least topology containing the subbasis, on `n` points named `0..n`.
pub fn generate_topology(subbasis: &[PointSet], n: usize) -> Result<SubsetSpace> {
    let full = PointSet::full(n);
    let mut seed: Vec<PointSet> = subbasis.to_vec();
    seed.push(PointSet::EMPTY);
    seed.push(full);
    let mut family = canonical(seed);
    loop {
        let next = close_under_union(&close_under_intersection(&family));
        if next == family {
            break;
        }
        family = next;
    }
    SubsetSpace::with_indices(n, family)
}

/// Union of all opens inside `set`.
pub fn interior(space: &SubsetSpace, set: PointSet) -> Result<PointSet> {
    space.require_topology()?;
    Ok(space
        .opens()
        .iter()
        .filter(|o| o.is_subset(set))
        .fold(PointSet::EMPTY, |acc, o| acc.union(*o)))
}

/// The largest open `v` with `v ∩ u ⊆ w`. Computed both as that maximum and as
/// the interior of `X − (u − w)`; the two must coincide.
pub fn heyting_implication(space: &SubsetSpace, u: PointSet, w: PointSet) -> Result<PointSet> {
    space.require_topology()?;
    for (label, s) in [("antecedent", u), ("consequent", w)] {
        if !space.is_open(s) {
            return Err(Error::Precondition(format!("{label} {s:?} is not open")));
        }
    }
    let candidates: Vec<PointSet> = space
        .opens()
        .iter()
        .copied()
        .filter(|v| v.intersection(u).is_subset(w))
        .collect();
    let largest = candidates
        .iter()
        .copied()
        .find(|v| candidates.iter().all(|c| c.is_subset(*v)))
        .ok_or_else(|| Error::Inconsistency(format!("no largest open under {u:?} => {w:?}")))?;
    let via_interior = interior(space, space.full().difference(u.difference(w)))?;
    if largest != via_interior {
        return Err(Error::Inconsistency(format!(
            "{u:?} => {w:?}: largest open {largest:?} differs from interior form {via_interior:?}"
        )));
    }
    Ok(largest)
}

/// The family generated from atom truth sets, X and ∅ under complement,
/// intersection and interior, together with its open members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureFamily {
    pub sets: Vec<PointSet>,
    pub opens: Vec<PointSet>,
}

impl ClosureFamily {
    pub fn contains(&self, s: PointSet) -> bool {
        self.sets.binary_search(&s).is_ok()
    }

    pub fn contains_open(&self, s: PointSet) -> bool {
        self.opens.binary_search(&s).is_ok()
    }
}

/// Valuation of atoms in a [`Model`].
pub type Valuation = BTreeMap<String, PointSet>;

/// A subset space with an atom valuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub space: SubsetSpace,
    valuation: Valuation,
}

impl Model {
    pub fn new(space: SubsetSpace, valuation: Valuation) -> Result<Model> {
        let full = space.full();
        for (atom, set) in &valuation {
            if RESERVED.contains(&atom.as_str()) || !is_identifier(atom) {
                return Err(Error::InvalidSpace(format!(
                    "`{atom}` is not a usable atom name"
                )));
            }
            if !set.is_subset(full) {
                return Err(Error::InvalidSpace(format!(
                    "valuation of {atom} has members outside the space"
                )));
            }
        }
        Ok(Model { space, valuation })
    }

    pub fn valuation(&self) -> &Valuation {
        &self.valuation
    }

    /// i(atom), or an error if the atom is not declared.
    pub fn truth_set(&self, atom: &str) -> Result<PointSet> {
        self.valuation
            .get(atom)
            .copied()
            .ok_or_else(|| Error::UnknownAtom(atom.to_string()))
    }

    pub fn with_space(&self, space: SubsetSpace) -> Result<Model> {
        Model::new(space, self.valuation.clone())
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Compute the closure family for the given atoms. Requires a topology.
pub fn closure_family<'a>(
    model: &Model,
    atoms: impl IntoIterator<Item = &'a String>,
) -> Result<ClosureFamily> {
    let space = &model.space;
    space.require_topology()?;
    let n = space.len();
    let full = space.full();
    let mut set: BTreeSet<PointSet> = [PointSet::EMPTY, full].into_iter().collect();
    for a in atoms {
        set.insert(model.truth_set(a)?);
    }
    // No family of subsets of X can exceed the powerset.
    let cap: u128 = 1u128 << n;
    let mut frontier: Vec<PointSet> = set.iter().copied().collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        let current: Vec<PointSet> = set.iter().copied().collect();
        for s in &frontier {
            let mut fresh = vec![s.complement(n), interior(space, *s)?];
            fresh.extend(current.iter().map(|t| s.intersection(*t)));
            for f in fresh {
                if set.insert(f) {
                    next.push(f);
                }
            }
        }
        if set.len() as u128 > cap {
            return Err(Error::Inconsistency(format!(
                "closure family grew past 2^{n} members"
            )));
        }
        frontier = next;
    }
    let sets: Vec<PointSet> = set.into_iter().collect();
    let interiors = canonical(
        sets.iter()
            .map(|s| interior(space, *s))
            .collect::<Result<Vec<_>>>()?,
    );
    let opens: Vec<PointSet> = sets.iter().copied().filter(|s| space.is_open(*s)).collect();
    if interiors != opens {
        return Err(Error::Inconsistency(
            "interiors of the closure family differ from its open members".into(),
        ));
    }
    Ok(ClosureFamily { sets, opens })
}
