//! The twelve axiom schemes and their instantiation.
//!
//! Schemes 1–10 axiomatise subset spaces; 11 (directedness) and 12 (union)
//! are added for topological spaces. Scheme 1 stands for every propositional
//! tautology; [`instantiate_axiom`] produces its canonical representative
//! `phi -> phi`, and [`instantiate_tautology`] instantiates any other
//! tautological skeleton.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::formula::{parse, Formula};

pub const METAVARIABLES: [&str; 3] = ["phi", "psi", "chi"];

pub const SCHEME_IDS: std::ops::RangeInclusive<u8> = 1..=12;

/// Template text for each scheme, over the metavariables `phi`, `psi`, `chi`.
pub fn scheme_template(id: u8) -> Option<&'static str> {
    Some(match id {
        1 => "phi -> phi",
        2 => "(phi -> [] phi) & (~phi -> [] ~phi)",
        3 => "[] (phi -> psi) -> ([] phi -> [] psi)",
        4 => "[] phi -> phi",
        5 => "[] phi -> [] [] phi",
        6 => "K (phi -> psi) -> (K phi -> K psi)",
        7 => "K phi -> phi",
        8 => "K phi -> K K phi",
        9 => "phi -> K L phi",
        10 => "K [] phi -> [] K phi",
        11 => "<> [] phi -> [] <> phi",
        12 => "<> (K phi & psi) & L <> (K phi & chi) -> <> (K <> phi & <> psi & L <> chi)",
        _ => return None,
    })
}

/// Metavariables a scheme mentions.
pub fn scheme_metavariables(id: u8) -> Vec<&'static str> {
    match id {
        3 | 6 => vec!["phi", "psi"],
        12 => vec!["phi", "psi", "chi"],
        _ => vec!["phi"],
    }
}

/// Whether a scheme belongs to the subset-space axiomatisation (1–10) rather
/// than the topological extension (11–12).
pub fn is_subset_space_scheme(id: u8) -> bool {
    (1..=10).contains(&id)
}

pub type Substitution = BTreeMap<String, Formula>;

pub fn substitution(entries: &[(&str, Formula)]) -> Substitution {
    entries
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn apply(template: &Formula, subst: &Substitution) -> Result<Formula> {
    for var in template.atoms() {
        if !subst.contains_key(&var) {
            return Err(Error::Precondition(format!(
                "substitution does not cover {var}"
            )));
        }
    }
    Ok(template.substitute(&|name| subst.get(name).cloned()))
}

pub fn instantiate_axiom(scheme: u8, subst: &Substitution) -> Result<Formula> {
    let text = scheme_template(scheme)
        .ok_or_else(|| Error::Precondition(format!("no axiom scheme {scheme}")))?;
    if scheme == 2 && !matches!(subst.get("phi"), Some(Formula::Atom(_))) {
        return Err(Error::Precondition(
            "scheme 2 only admits an atomic formula for phi".into(),
        ));
    }
    let template = parse(text).expect("scheme templates are well formed");
    apply(&template, subst)
}

/// Truth value of a Boolean combination of metavariables.
pub fn propositional_value(f: &Formula, assignment: &BTreeMap<String, bool>) -> Option<bool> {
    Some(match f {
        Formula::Atom(a) => *assignment.get(a)?,
        Formula::Top => true,
        Formula::Bot => false,
        Formula::Not(a) => !propositional_value(a, assignment)?,
        Formula::And(a, b) => {
            propositional_value(a, assignment)? && propositional_value(b, assignment)?
        }
        Formula::Knows(_) | Formula::Effort(_) => return None,
    })
}

/// Whether a modal-free formula is true under every assignment to its atoms.
pub fn is_tautology(skeleton: &Formula) -> bool {
    let vars: Vec<String> = skeleton.atoms().into_iter().collect();
    if vars.len() > 16 {
        return false;
    }
    (0u32..1 << vars.len()).all(|bits| {
        let assignment = vars
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), bits & (1 << i) != 0))
            .collect();
        propositional_value(skeleton, &assignment) == Some(true)
    })
}

/// Instance of scheme 1 from a tautological skeleton over metavariables.
pub fn instantiate_tautology(skeleton: &Formula, subst: &Substitution) -> Result<Formula> {
    if !is_tautology(skeleton) {
        return Err(Error::Precondition(format!(
            "{skeleton} is not a propositional tautology"
        )));
    }
    apply(skeleton, subst)
}
