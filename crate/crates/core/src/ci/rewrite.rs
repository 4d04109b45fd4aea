//! CI-only re-expression of compiled systems and the cardinality implication.

use std::collections::{BTreeMap, HashSet};

use crate::ci::{drain_relations, CISystem, Extras, Relation};
use crate::compiler::constants::{floor_log2, pick_log_bounds, root_below_four, GAP_BOUNDS};
use crate::error::{Error, Result};
use crate::expr::{VarId, VarSet};
use crate::gadget::catalog::{gensym, Emitter, Gadget};
use crate::gadget::lint::{lint, RowShape};
use crate::gadget::system::ConstraintSystem;

/// Preferred name of the designated fair bit.
pub const DESIGNATED: &str = "X_1";

fn fresh(base: &str, taken: &HashSet<VarId>) -> VarId {
    let mut name = base.to_string();
    while taken.contains(&VarId::new(name.clone())) {
        name.push('\'');
    }
    VarId::new(name)
}

/// Replaces every `UNIF_a` bound pair by CI-only gadgets anchored to a single
/// designated fair bit, which becomes variable 1.
///
/// `UNIF_2(Y)` becomes `UNIF_EQ(Y; X_1)`. Larger `a` use the power/compare
/// chain; the part of that chain that depends only on `a` is emitted once per
/// `a` and shared by all instances.
pub fn to_ci_only(cs: &ConstraintSystem) -> Result<CISystem> {
    let shapes = lint(cs)?;
    let taken: HashSet<VarId> = cs.vars().cloned().collect();
    let x1 = fresh(DESIGNATED, &taken);
    let mut vars = vec![x1.clone()];
    vars.extend(cs.vars().cloned());

    let mut relations = Vec::new();
    let mut order: Vec<VarId> = Vec::new();
    let mut bounds: BTreeMap<VarId, (Option<u64>, Option<u64>)> = BTreeMap::new();
    for (shape, row) in shapes.into_iter().zip(&cs.rows) {
        match shape {
            RowShape::Ci { a, b, c } => relations.push(Relation::new(a, b, c)),
            RowShape::UnifBound { var, k, upper } => {
                let slot = bounds.entry(var.clone()).or_insert_with(|| {
                    order.push(var.clone());
                    (None, None)
                });
                let side = if upper { &mut slot.1 } else { &mut slot.0 };
                if side.is_some_and(|old| old != k) {
                    return Err(Error::InvalidCiSystem(format!("conflicting bounds at row {}", row.tag)));
                }
                *side = Some(k);
            }
        }
    }

    let mut em = Emitter::new();
    let mut shared: BTreeMap<u64, (VarId, VarId, VarId)> = BTreeMap::new();
    let mut per_k: BTreeMap<u64, usize> = BTreeMap::new();
    for (n, y) in order.iter().enumerate() {
        let k = match bounds[y] {
            (Some(lo), Some(hi)) if lo == hi => lo,
            _ => return Err(Error::InvalidCiSystem(format!("unpaired cardinality bound on {y}"))),
        };
        *per_k.entry(k).or_insert(0) += 1;
        let path = format!("ci.{n}");
        if k == 2 {
            em.emit(&Gadget::UnifEq, &[y.clone(), x1.clone()], path)?;
            drain_relations(&mut em, &mut relations, &mut vars)?;
            continue;
        }
        let lo = pick_log_bounds(k);
        let hi = pick_log_bounds(k + 1);
        if !shared.contains_key(&k) {
            let p = format!("k{k}");
            let mk = |local: &str| VarId::new(gensym("UNIF_K_CI", &p, local));
            let (u, v1, v2) = (mk("U"), mk("V1"), mk("V2"));
            vars.extend([u.clone(), v1.clone(), v2.clone()]);
            em.emit(&Gadget::UnifEq, &[u.clone(), x1.clone()], format!("{p}.0"))?;
            em.emit(&Gadget::Pow { k: lo.p }, &[u.clone(), v1.clone()], format!("{p}.1"))?;
            em.emit(&Gadget::Pow { k: hi.p }, &[u.clone(), v2.clone()], format!("{p}.2"))?;
            drain_relations(&mut em, &mut relations, &mut vars)?;
            shared.insert(k, (u, v1, v2));
        }
        let (_, v1, v2) = shared[&k].clone();
        let w1 = VarId::new(gensym("UNIF_K_CI", &path, "W1"));
        let w2 = VarId::new(gensym("UNIF_K_CI", &path, "W2"));
        vars.extend([w1.clone(), w2.clone()]);
        em.emit(&Gadget::Unif, &[y.clone()], format!("{path}.0"))?;
        em.emit(&Gadget::Pow { k: lo.q }, &[y.clone(), w1.clone()], format!("{path}.1"))?;
        em.emit(&Gadget::Le, &[v1, w1], format!("{path}.2"))?;
        em.emit(&Gadget::Pow { k: hi.q }, &[y.clone(), w2.clone()], format!("{path}.3"))?;
        em.emit(&Gadget::Le, &[w2, v2], format!("{path}.4"))?;
        drain_relations(&mut em, &mut relations, &mut vars)?;
    }

    let mut audit = vec![format!("designated fair bit {x1}")];
    for (k, count) in &per_k {
        if *k == 2 {
            audit.push(format!("{count} UNIF_2 bound pairs replaced by UNIF_EQ(.;{x1})"));
        } else {
            let (lo, hi) = (pick_log_bounds(*k), pick_log_bounds(k + 1));
            audit.push(format!("{count} UNIF_{k} bound pairs replaced by the power chain with (p,q) = ({},{}) and ({},{})", lo.p, lo.q, hi.p, hi.q));
        }
    }
    let ci = CISystem { n: vars.len(), vars, relations, extras: Extras { binary_var: Some(x1), ..Extras::default() }, target: None, audit };
    ci.validate()?;
    Ok(ci)
}

/// The implication "relations ∧ card(Y) ≤ r ⇒ H(Y) = 0" built from a system
/// with a designated fair bit `X_1`, where `Y` is a new first variable tied
/// to `X_1` by `POW_{⌊log r⌋}(X_1; Y)` and `UNIF_{≤2|≤3}(X_1)`.
pub fn to_cardinality_implication(ci: &CISystem, r: u64) -> Result<CISystem> {
    if r < 2 {
        return Err(Error::Parameter { gadget: "CARD_IMPLICATION".into(), reason: format!("r = {r} < 2") });
    }
    ci.validate()?;
    let x1 = ci.extras.binary_var.clone().ok_or(Error::MissingDesignated)?;
    let e = floor_log2(r);
    let taken: HashSet<VarId> = ci.vars.iter().cloned().collect();
    let y = fresh("CARD.Y", &taken);

    let mut vars = vec![y.clone()];
    vars.extend(ci.vars.iter().cloned());
    let mut relations = ci.relations.clone();
    let mut em = Emitter::new();
    em.emit(&Gadget::Pow { k: e }, &[x1.clone(), y.clone()], "card.0".into())?;
    drain_relations(&mut em, &mut relations, &mut vars)?;
    em.emit(&Gadget::UnifLe2Given3, &[x1.clone()], "card.1".into())?;
    drain_relations(&mut em, &mut relations, &mut vars)?;

    let mut audit = ci.audit.clone();
    audit.push(format!("(a) existence of {x1} ~ Bern(1/2) negated into the consequent H({x1}) = 0"));
    audit.push(format!(
        "(b) added POW_{e}({x1};{y}), card({y}) <= {r} and UNIF_LE2_GIVEN_LE3({x1}) with (p3,q3,p4,q4) = ({},{},{},{}); consequent H({y}) = 0",
        GAP_BOUNDS.p3, GAP_BOUNDS.q3, GAP_BOUNDS.p4, GAP_BOUNDS.q4
    ));
    audit.push(format!("(c) dropped the hypothesis {x1} ~ Bern(1/2)"));
    audit.push(format!("check: r^(1/floor(log r)) < 4, i.e. {r} < 4^{e}: {}", root_below_four(r)));
    let out = CISystem {
        n: vars.len(),
        vars,
        relations,
        extras: Extras { binary_var: None, card_var: Some(y.clone()), card_bound: Some(r) },
        target: Some(Relation::functional(VarSet::of([y]), VarSet::empty())),
        audit,
    };
    out.validate()?;
    Ok(out)
}
