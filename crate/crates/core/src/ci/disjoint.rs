//! Rewriting arbitrary CI implications into disjoint ones.

use std::collections::HashMap;

use crate::ci::{drain_relations, CISystem, Extras, Relation};
use crate::error::{Error, Result};
use crate::expr::{VarId, VarSet};
use crate::gadget::catalog::{Emitter, Gadget};

/// Refuse outputs whose relations would hold more set elements than this.
/// The saturation rows alone hold `36·n²` elements.
pub const DISJOINT_SIZE_CAP: usize = 50_000_000;

fn y(i: usize) -> VarId {
    VarId::new(format!("Y_{i}"))
}

fn z(i: usize) -> VarId {
    VarId::new(format!("Z_{i}"))
}

struct Copies {
    n: usize,
    index: HashMap<VarId, usize>,
}

impl Copies {
    fn new(ci: &CISystem) -> Self {
        let index = ci.vars.iter().enumerate().map(|(i, v)| (v.clone(), i + 1)).collect();
        Copies { n: ci.n, index }
    }

    /// `Y_{S + offset·n}`.
    fn shift(&self, s: &VarSet, offset: usize) -> VarSet {
        s.iter().map(|v| y(self.index[v] + offset * self.n)).collect()
    }

    fn relation(&self, r: &Relation) -> Relation {
        Relation::new(self.shift(&r.a, 0), self.shift(&r.b, 1), self.shift(&r.c, 2))
    }
}

/// Triple copies with `EQRES` links and saturation rows; relations mapped to
/// `(A, B+n, C+2n)`. The target is supplied by the caller.
fn core(ci: &CISystem, target: Relation, extras: Extras, mut audit: Vec<String>) -> Result<CISystem> {
    ci.validate()?;
    let n = ci.n;
    if n < 2 {
        return Err(Error::InvalidCiSystem("the target must range over at least two variables".into()));
    }
    let estimate = 36 * n * n + 3 * ci.size();
    if estimate > DISJOINT_SIZE_CAP {
        return Err(Error::InstanceTooLarge(format!("disjoint form of {n} variables needs about {estimate} set elements (cap {DISJOINT_SIZE_CAP})")));
    }
    let copies = Copies::new(ci);
    let mut vars: Vec<VarId> = (1..=3 * n).map(y).chain((1..=3 * n).map(z)).collect();
    let mut relations = Vec::new();

    let mut em = Emitter::new();
    for i in 1..=2 * n {
        em.emit(&Gadget::Eqres, &[y(i), z(i), y(i + n), z(i + n)], format!("d.{i}"))?;
        drain_relations(&mut em, &mut relations, &mut vars)?;
    }
    for i in 1..=3 * n {
        let (yi, zi) = (VarSet::of([y(i)]), VarSet::of([z(i)]));
        let rest: VarSet = (1..=3 * n).filter(|&j| j != i).flat_map(|j| [y(j), z(j)]).collect();
        relations.push(Relation::new(yi.clone(), rest.clone(), zi.clone()));
        relations.push(Relation::new(zi, rest, yi));
    }
    relations.extend(ci.relations.iter().map(|r| copies.relation(r)));

    audit.push(format!("disjoint form: Y_1..Y_{m}, Z_1..Z_{m}, EQRES for i in 1..={}, X_A;X_B|X_C as Y_A;Y_(B+{n})|Y_(C+{})", 2 * n, 2 * n, m = 3 * n));
    let out = CISystem { n: vars.len(), vars, relations, extras, target: Some(target), audit };
    out.validate()?;
    debug_assert!(out.is_disjoint());
    Ok(out)
}

/// Disjoint implication equivalent to `ci`'s relations implying its target.
pub fn disjointify(ci: &CISystem) -> Result<CISystem> {
    let target = ci.target.as_ref().ok_or_else(|| Error::InvalidCiSystem("disjointify needs a target relation".into()))?;
    let copies = Copies::new(ci);
    ci.validate()?;
    let mapped = copies.relation(target);
    let card_var = ci.extras.card_var.as_ref().map(|v| y(copies.index[v]));
    let extras = Extras { binary_var: None, card_var, card_bound: ci.extras.card_bound };
    core(ci, mapped, extras, ci.audit.clone())
}

/// Disjoint form of a cardinality implication: consequent `I(Y_1; Z_1) = 0`
/// and `card(Y_1) <= r`.
pub fn binary_implication_instance(ci: &CISystem, r: u64) -> Result<CISystem> {
    ci.validate()?;
    let first = ci.vars.first().ok_or(Error::MissingDesignated)?;
    match &ci.extras.card_var {
        Some(v) if v == first => {}
        Some(v) => return Err(Error::RosterMismatch(format!("card variable {v} is not the first variable"))),
        None => return Err(Error::MissingDesignated),
    }
    let expected = Relation::functional(VarSet::of([first.clone()]), VarSet::empty());
    if ci.target.as_ref() != Some(&expected) {
        return Err(Error::InvalidCiSystem(format!("consequent must be H({first}) = 0")));
    }
    let mut audit = ci.audit.clone();
    audit.push(format!("consequent H({first}) = 0 rewritten as I(Y_1;Z_1) = 0"));
    audit.push(format!("card({first}) <= {r} carried over as card(Y_1) <= {r}"));
    let target = Relation::new(VarSet::of([y(1)]), VarSet::of([z(1)]), VarSet::empty());
    let extras = Extras { binary_var: None, card_var: Some(y(1)), card_bound: Some(r) };
    core(ci, target, extras, audit)
}
