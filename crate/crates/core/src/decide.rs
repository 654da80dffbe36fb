//! Bounded satisfiability and validity over finite topologies, axiom
//! soundness sweeps, and countermodel search over plain subset spaces.
//!
//! Search order is always: number of points ascending, then the family order
//! of [`enumerate_topologies`] (or [`enumerate_subset_spaces`]), then
//! valuation index, then instance, then pair. Candidates are checked in
//! parallel, but the answer is always the first one in that order.

use std::collections::BTreeSet;

use rand::Rng;
use rayon::prelude::*;

use crate::axioms::{
    instantiate_axiom, instantiate_tautology, is_subset_space_scheme, is_tautology,
    scheme_metavariables, scheme_template, Substitution, METAVARIABLES,
};
use crate::error::{Error, Result};
use crate::formula::{parse, Formula};
use crate::random;
use crate::semantics::{extensions_with, pairs, Evaluator, Pair};
use crate::space::{Model, PointSet, SubsetSpace, Valuation};

/// Largest point count [`enumerate_topologies`] accepts.
pub const TOPOLOGY_CAP: usize = 4;

/// Valuations drawn per space when valuations are sampled rather than enumerated.
pub const VALUATION_SAMPLES: usize = 16;

/// Labeled topologies on `n` points, each exactly once, via preorders and
/// their up-set families. Ordered by number of opens, then by the canonical
/// family order.
pub fn enumerate_topologies(n: usize) -> Result<Vec<SubsetSpace>> {
    if n == 0 || n > TOPOLOGY_CAP {
        return Err(Error::Bound(format!(
            "topology enumeration needs 1 <= n <= {TOPOLOGY_CAP}, got {n}"
        )));
    }
    let off_diagonal: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let mut families: BTreeSet<(usize, Vec<PointSet>)> = BTreeSet::new();
    for mask in 0u64..1 << off_diagonal.len() {
        let mut above: Vec<PointSet> = (0..n).map(PointSet::singleton).collect();
        for (bit, (i, j)) in off_diagonal.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                above[*i].insert(*j);
            }
        }
        let transitive = (0..n).all(|i| above[i].iter().all(|j| above[j].is_subset(above[i])));
        if !transitive {
            continue;
        }
        let space = random::topology_from_preorder(n, &above);
        families.insert((space.opens().len(), space.opens().to_vec()));
    }
    families
        .into_iter()
        .map(|(_, opens)| SubsetSpace::with_indices(n, opens))
        .collect()
}

/// Every subset space on `n` points (X among the opens, nothing else
/// required) with at most `max_opens` opens, ordered like topologies.
pub fn enumerate_subset_spaces(n: usize, max_opens: usize) -> Result<Vec<SubsetSpace>> {
    if n == 0 || n > TOPOLOGY_CAP {
        return Err(Error::Bound(format!(
            "subset space enumeration needs 1 <= n <= {TOPOLOGY_CAP}, got {n}"
        )));
    }
    let full = PointSet::full(n);
    let others: Vec<PointSet> =
        crate::space::canonical((0..full.bits()).map(PointSet::from_bits).collect());
    let mut out: Vec<(usize, Vec<PointSet>)> = Vec::new();
    let mut chosen = Vec::new();
    fn extend(
        others: &[PointSet],
        start: usize,
        left: usize,
        chosen: &mut Vec<PointSet>,
        full: PointSet,
        out: &mut Vec<(usize, Vec<PointSet>)>,
    ) {
        let mut family = chosen.clone();
        family.push(full);
        let family = crate::space::canonical(family);
        out.push((family.len(), family));
        if left == 0 {
            return;
        }
        for i in start..others.len() {
            chosen.push(others[i]);
            extend(others, i + 1, left - 1, chosen, full, out);
            chosen.pop();
        }
    }
    extend(
        &others,
        0,
        max_opens.saturating_sub(1),
        &mut chosen,
        full,
        &mut out,
    );
    out.sort();
    out.into_iter()
        .map(|(_, opens)| SubsetSpace::with_indices(n, opens))
        .collect()
}

/// How far the bounded search goes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchBound {
    pub max_points: usize,
    pub atoms: Vec<String>,
    /// All valuations when true; otherwise [`VALUATION_SAMPLES`] seeded draws per space.
    pub enumerate_valuations: bool,
    pub seed: u64,
}

impl SearchBound {
    pub fn new(max_points: usize, atoms: &[&str]) -> SearchBound {
        SearchBound {
            max_points,
            atoms: atoms.iter().map(|a| a.to_string()).collect(),
            enumerate_valuations: true,
            seed: 0,
        }
    }

    fn check(&self) -> Result<()> {
        if self.max_points == 0 || self.max_points > TOPOLOGY_CAP {
            return Err(Error::Bound(format!(
                "max_points must be between 1 and {TOPOLOGY_CAP}, got {}",
                self.max_points
            )));
        }
        if self.atoms.len() * self.max_points > 24 {
            return Err(Error::Bound(
                "too many atoms for valuation enumeration".into(),
            ));
        }
        Ok(())
    }

    fn valuations(&self, n: usize, space_index: usize) -> Vec<Valuation> {
        if self.enumerate_valuations {
            let count = 1u64 << (n * self.atoms.len());
            (0..count)
                .map(|i| valuation_at(n, &self.atoms, i))
                .collect()
        } else {
            let mut rng = random::rng(self.seed ^ ((n as u64) << 32) ^ space_index as u64);
            (0..VALUATION_SAMPLES)
                .map(|_| random::valuation(&mut rng, n, &self.atoms))
                .collect()
        }
    }
}

/// Valuation number `index`: atom `k` gets the bits `k*n .. (k+1)*n` of `index`.
pub fn valuation_at(n: usize, atoms: &[String], index: u64) -> Valuation {
    let mask = PointSet::full(n).bits();
    atoms
        .iter()
        .enumerate()
        .map(|(k, a)| (a.clone(), PointSet::from_bits((index >> (k * n)) & mask)))
        .collect()
}

/// Every model in search order for spaces produced per point count.
fn models_in_order(
    bound: &SearchBound,
    spaces_for: impl Fn(usize) -> Result<Vec<SubsetSpace>>,
) -> Result<Vec<Model>> {
    bound.check()?;
    let mut models = Vec::new();
    for n in 1..=bound.max_points {
        for (si, space) in spaces_for(n)?.into_iter().enumerate() {
            for val in bound.valuations(n, si) {
                models.push(Model::new(space.clone(), val)?);
            }
        }
    }
    Ok(models)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub model: Model,
    pub pair: Pair,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Satisfiable(Witness),
    NoModelWithinBound,
    ValidWithinBound,
    Invalid(Witness),
}

impl Verdict {
    /// `Satisfiable` and `ValidWithinBound` are the positive outcomes.
    pub fn is_positive(&self) -> bool {
        matches!(self, Verdict::Satisfiable(_) | Verdict::ValidWithinBound)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Satisfiable(w) | Verdict::Invalid(w) => Some(w),
            _ => None,
        }
    }
}

fn check_atoms(f: &Formula, bound: &SearchBound) -> Result<()> {
    match f.atoms().into_iter().find(|a| !bound.atoms.contains(a)) {
        Some(a) => Err(Error::Bound(format!(
            "atom {a} is not in the search alphabet"
        ))),
        None => Ok(()),
    }
}

pub fn decide_sat(f: &Formula, bound: &SearchBound) -> Result<Verdict> {
    check_atoms(f, bound)?;
    let models = models_in_order(bound, enumerate_topologies)?;
    let found = models
        .par_iter()
        .map(|m| Evaluator::new(m).witness(f).map(|p| p.map(|p| (m, p))))
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        });
    match found {
        None => Ok(Verdict::NoModelWithinBound),
        Some(Err(e)) => Err(e),
        Some(Ok(None)) => unreachable!(),
        Some(Ok(Some((model, pair)))) => {
            if !crate::semantics::satisfies(model, pair, f)? {
                return Err(Error::Inconsistency("witness does not re-verify".into()));
            }
            Ok(Verdict::Satisfiable(Witness {
                model: model.clone(),
                pair,
            }))
        }
    }
}

/// Validity within the bound, decided as unsatisfiability of the negation.
pub fn decide_valid(f: &Formula, bound: &SearchBound) -> Result<Verdict> {
    Ok(match decide_sat(&Formula::not(f.clone()), bound)? {
        Verdict::Satisfiable(w) => Verdict::Invalid(w),
        Verdict::NoModelWithinBound => Verdict::ValidWithinBound,
        other => unreachable!("decide_sat returned {other:?}"),
    })
}

/// An axiom instance failing at some pair of some model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub model: Model,
    pub instance: Formula,
    pub pair: Pair,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeReport {
    pub scheme: u8,
    pub instances: usize,
    pub models: usize,
    pub violation_count: usize,
    /// First few violations in search order.
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepReport {
    pub rows: Vec<SchemeReport>,
}

impl SweepReport {
    pub fn total_violations(&self) -> usize {
        self.rows.iter().map(|r| r.violation_count).sum()
    }
}

const KEPT_VIOLATIONS: usize = 5;

/// Depth bound for formulas substituted into schemes.
pub const INSTANCE_DEPTH: usize = 4;

fn scheme_seed(seed: u64, scheme: u8) -> u64 {
    seed ^ (scheme as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn tautology_skeleton(rng: &mut impl Rng) -> Formula {
    let vars: Vec<String> = METAVARIABLES.iter().map(|v| v.to_string()).collect();
    for _ in 0..10_000 {
        let candidate = random::propositional(rng, &vars, 3);
        if is_tautology(&candidate) {
            return candidate;
        }
    }
    parse("(phi -> psi) -> (~psi -> ~phi)").expect("well formed")
}

/// `trials` random instances of a scheme over `atoms`, reproducible from `seed`.
pub fn axiom_instances(
    scheme: u8,
    atoms: &[String],
    trials: usize,
    seed: u64,
) -> Result<Vec<Formula>> {
    let mut rng = random::rng(scheme_seed(seed, scheme));
    let mut out = Vec::with_capacity(trials);
    for _ in 0..trials {
        let mut subst = Substitution::new();
        for var in METAVARIABLES {
            let depth = rng.gen_range(0..=INSTANCE_DEPTH);
            subst.insert(var.to_string(), random::formula(&mut rng, atoms, depth));
        }
        let instance = match scheme {
            1 => instantiate_tautology(&tautology_skeleton(&mut rng), &subst)?,
            2 => {
                if atoms.is_empty() {
                    return Ok(Vec::new());
                }
                let a = &atoms[rng.gen_range(0..atoms.len())];
                subst.insert("phi".into(), Formula::atom(a.clone()));
                instantiate_axiom(2, &subst)?
            }
            _ => instantiate_axiom(scheme, &subst)?,
        };
        out.push(instance);
    }
    Ok(out)
}

fn violations_of(models: &[Model], instances: &[Formula]) -> Result<Vec<Violation>> {
    let per_model: Vec<Result<Vec<Violation>>> = models
        .par_iter()
        .map(|m| {
            let mut ev = Evaluator::new(m);
            let mut found = Vec::new();
            for inst in instances {
                if let Some(pair) = ev.counterexample(inst)? {
                    found.push(Violation {
                        model: m.clone(),
                        instance: inst.clone(),
                        pair,
                    });
                }
            }
            Ok(found)
        })
        .collect();
    let mut out = Vec::new();
    for r in per_model {
        out.extend(r?);
    }
    Ok(out)
}

/// Check random instances of each scheme on the given models.
pub fn sweep_models(
    models: &[Model],
    atoms: &[String],
    schemes: &[u8],
    trials: usize,
    seed: u64,
) -> Result<SweepReport> {
    let mut rows = Vec::new();
    for &scheme in schemes {
        let instances = axiom_instances(scheme, atoms, trials, seed)?;
        let violations = violations_of(models, &instances)?;
        rows.push(SchemeReport {
            scheme,
            instances: instances.len(),
            models: models.len(),
            violation_count: violations.len(),
            violations: violations.into_iter().take(KEPT_VIOLATIONS).collect(),
        });
    }
    Ok(SweepReport { rows })
}

/// Soundness sweep over every topology within the bound.
pub fn axiom_soundness_sweep(
    bound: &SearchBound,
    schemes: &[u8],
    trials: usize,
    seed: u64,
) -> Result<SweepReport> {
    let models = models_in_order(bound, enumerate_topologies)?;
    sweep_models(&models, &bound.atoms, schemes, trials, seed)
}

/// Small formulas over `atoms`: the atoms, constants, and one modal or
/// negation step applied to an atom or its negation.
pub fn small_formulas(atoms: &[String]) -> Vec<Formula> {
    let mut out: Vec<Formula> = atoms.iter().cloned().map(Formula::Atom).collect();
    out.push(Formula::Top);
    out.push(Formula::Bot);
    for a in atoms {
        let a = Formula::atom(a.clone());
        out.push(Formula::not(a.clone()));
        for base in [a.clone(), Formula::not(a)] {
            out.push(Formula::knows(base.clone()));
            out.push(Formula::effort(base.clone()));
            out.push(Formula::possible(base.clone()));
            out.push(Formula::diamond(base));
        }
    }
    out
}

fn countermodel_pool(scheme: u8, atoms: &[String]) -> Vec<Formula> {
    if scheme == 2 {
        atoms.iter().cloned().map(Formula::Atom).collect()
    } else {
        small_formulas(atoms)
    }
}

/// Pool indices for each metavariable, first metavariable varying slowest.
fn pool_assignments(vars: usize, pool: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..pool.pow(vars as u32)).map(move |mut k| {
        let mut idx = vec![0; vars];
        for slot in idx.iter_mut().rev() {
            *slot = k % pool;
            k /= pool;
        }
        idx
    })
}

fn assignment_substitution(vars: &[&str], pool: &[Formula], idx: &[usize]) -> Substitution {
    vars.iter()
        .zip(idx)
        .map(|(v, i)| (v.to_string(), pool[*i].clone()))
        .collect()
}

/// Instances tried by the countermodel search: every assignment of
/// [`small_formulas`] to the scheme's metavariables, then `trials` random ones.
pub fn countermodel_instances(
    scheme: u8,
    atoms: &[String],
    trials: usize,
    seed: u64,
) -> Result<Vec<Formula>> {
    let pool = countermodel_pool(scheme, atoms);
    let vars = scheme_metavariables(scheme);
    let mut out = Vec::new();
    for idx in pool_assignments(vars.len(), pool.len()) {
        out.push(instantiate_axiom(
            scheme,
            &assignment_substitution(&vars, &pool, &idx),
        )?);
    }
    out.extend(axiom_instances(scheme, atoms, trials, seed)?);
    Ok(out)
}

/// First instance of [`countermodel_instances`] falsified on `m`, and where.
/// The exhaustive part evaluates the scheme template against precomputed
/// extensions of the pool instead of instantiating every formula.
fn first_violation(
    m: &Model,
    scheme: u8,
    template: &Formula,
    pool: &[Formula],
    random_instances: &[Formula],
) -> Result<Option<Violation>> {
    let vars = scheme_metavariables(scheme);
    let mut ev = Evaluator::new(m);
    let pool_ext: Vec<Vec<PointSet>> = pool
        .iter()
        .map(|f| ev.extensions(f).map(<[PointSet]>::to_vec))
        .collect::<Result<_>>()?;
    for idx in pool_assignments(vars.len(), pool.len()) {
        let lookup = |a: &str| {
            vars.iter()
                .position(|v| *v == a)
                .map(|k| pool_ext[idx[k]].as_slice())
        };
        let ext = extensions_with(m, template, &lookup)?;
        if let Some(pair) = pairs(&m.space).find(|p| !ext[p.open].contains(p.point)) {
            let instance = instantiate_axiom(scheme, &assignment_substitution(&vars, pool, &idx))?;
            return Ok(Some(Violation {
                model: m.clone(),
                instance,
                pair,
            }));
        }
    }
    for inst in random_instances {
        if let Some(pair) = ev.counterexample(inst)? {
            return Ok(Some(Violation {
                model: m.clone(),
                instance: inst.clone(),
                pair,
            }));
        }
    }
    Ok(None)
}

/// Search plain subset spaces with at most `max_opens` opens for a model,
/// instance and pair falsifying the scheme. Returns the first in search order.
pub fn find_subset_space_countermodel(
    scheme: u8,
    bound: &SearchBound,
    max_opens: usize,
    trials: usize,
    seed: u64,
) -> Result<Option<Violation>> {
    let template = parse(
        scheme_template(scheme)
            .ok_or_else(|| Error::Precondition(format!("no axiom scheme {scheme}")))?,
    )?;
    let pool = countermodel_pool(scheme, &bound.atoms);
    let random_instances = axiom_instances(scheme, &bound.atoms, trials, seed)?;
    let models = models_in_order(bound, |n| enumerate_subset_spaces(n, max_opens))?;
    let found = models
        .par_iter()
        .map(|m| first_violation(m, scheme, &template, &pool, &random_instances))
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        });
    match found {
        None => Ok(None),
        Some(r) => {
            let v = r?.expect("filtered to hits");
            if crate::semantics::satisfies(&v.model, v.pair, &v.instance)? {
                return Err(Error::Inconsistency(
                    "countermodel does not re-verify".into(),
                ));
            }
            Ok(Some(v))
        }
    }
}

/// Whether a violation of this scheme on this model would contradict
/// soundness: schemes 1–10 on any subset space, 11–12 on topologies.
pub fn violation_is_unsound(scheme: u8, space: &SubsetSpace) -> bool {
    is_subset_space_scheme(scheme) || space.is_topology()
}
