//! Constraint systems: free and existential variables plus tagged affine rows.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{AffineConstraint, InfoExpr, Rel, VarId, VarSet};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub lhs: InfoExpr,
    pub rel: Rel,
    pub rhs: Rational,
    pub tag: String,
}

impl Row {
    pub fn new(c: AffineConstraint, tag: impl Into<String>) -> Self {
        Row { lhs: c.lhs, rel: c.rel, rhs: c.rhs, tag: tag.into() }
    }

    pub fn constraint(&self) -> AffineConstraint {
        AffineConstraint::new(self.lhs.clone(), self.rel, self.rhs.clone())
    }
}

/// Machine form of an affine existential information predicate.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintSystem {
    /// Gadget-instance counts, present on compiler output.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<BTreeMap<String, usize>>,
    pub free: Vec<VarId>,
    pub exists: Vec<VarId>,
    pub rows: Vec<Row>,
}

impl ConstraintSystem {
    pub fn empty() -> Self {
        ConstraintSystem::default()
    }

    /// A system with the given free variables and rows, no existentials.
    pub fn from_rows(free: Vec<VarId>, rows: Vec<Row>) -> Result<Self> {
        let cs = ConstraintSystem { manifest: None, free, exists: Vec::new(), rows };
        cs.validate()?;
        Ok(cs)
    }

    /// Free variables followed by existential ones.
    pub fn vars(&self) -> impl Iterator<Item = &VarId> {
        self.free.iter().chain(self.exists.iter())
    }

    pub fn var_count(&self) -> usize {
        self.free.len() + self.exists.len()
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for v in &self.free {
            if !seen.insert(v) {
                return Err(Error::DuplicateName(v.to_string()));
            }
        }
        for v in &self.exists {
            if !seen.insert(v) {
                return Err(if self.free.contains(v) { Error::NameCollision(v.to_string()) } else { Error::DuplicateName(v.to_string()) });
            }
        }
        for row in &self.rows {
            for (set, _) in row.lhs.terms() {
                for v in set.iter() {
                    if !seen.contains(v) {
                        return Err(Error::UnknownVariable(format!("{v} (row {})", row.tag)));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("constraint systems serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cs: ConstraintSystem = serde_json::from_str(text)?;
        cs.validate()?;
        Ok(cs)
    }

    /// Renames existential variables through `map`, leaving others alone.
    fn rename_exists(&mut self, map: &BTreeMap<VarId, VarId>) {
        if map.is_empty() {
            return;
        }
        for v in &mut self.exists {
            if let Some(n) = map.get(v) {
                *v = n.clone();
            }
        }
        for row in &mut self.rows {
            let mut lhs = InfoExpr::zero();
            for (set, coef) in row.lhs.terms() {
                let renamed: VarSet = set.iter().map(|v| map.get(v).cloned().unwrap_or_else(|| v.clone())).collect();
                lhs.add_term(renamed, coef.clone());
            }
            row.lhs = lhs;
        }
    }
}

fn freshen(name: &VarId, taken: &BTreeSet<VarId>) -> VarId {
    let mut cand = format!("{name}'");
    while taken.contains(&VarId::new(cand.clone())) {
        cand.push('\'');
    }
    VarId::new(cand)
}

/// Conjunction of two systems over a shared free namespace.
///
/// Existential names that clash with any name of the other system are
/// renamed by appending primes.
pub fn conjoin(p: &ConstraintSystem, q: &ConstraintSystem) -> Result<ConstraintSystem> {
    p.validate()?;
    q.validate()?;
    let mut taken: BTreeSet<VarId> = p.vars().chain(q.vars()).cloned().collect();

    let mut p = p.clone();
    let q_free: BTreeSet<&VarId> = q.free.iter().collect();
    let mut p_map = BTreeMap::new();
    for v in &p.exists {
        if q_free.contains(v) {
            let n = freshen(v, &taken);
            taken.insert(n.clone());
            p_map.insert(v.clone(), n);
        }
    }
    p.rename_exists(&p_map);

    let mut q = q.clone();
    let p_names: BTreeSet<VarId> = p.vars().cloned().collect();
    let mut q_map = BTreeMap::new();
    for v in &q.exists {
        if p_names.contains(v) {
            let n = freshen(v, &taken);
            taken.insert(n.clone());
            q_map.insert(v.clone(), n);
        }
    }
    q.rename_exists(&q_map);

    let mut free = p.free.clone();
    for v in &q.free {
        if !free.contains(v) {
            free.push(v.clone());
        }
    }
    let mut exists = p.exists.clone();
    exists.extend(q.exists.iter().cloned());
    let mut rows = p.rows;
    rows.extend(q.rows);
    let out = ConstraintSystem { manifest: None, free, exists, rows };
    out.validate()?;
    Ok(out)
}

/// Binds `new_vars` existentially and appends `extra` rows.
///
/// A new variable may be a free variable of `p` (it becomes bound) or an
/// unused name; binding a name that is already existential in `p` is a
/// collision. Variables of `extra` that are not yet declared become free.
pub fn exists_extend(p: &ConstraintSystem, new_vars: &[VarId], extra: Vec<Row>) -> Result<ConstraintSystem> {
    p.validate()?;
    let mut out = p.clone();
    out.manifest = None;
    for v in new_vars {
        if out.exists.contains(v) {
            return Err(Error::NameCollision(v.to_string()));
        }
        out.free.retain(|f| f != v);
        out.exists.push(v.clone());
    }
    for row in &extra {
        for (set, _) in row.lhs.terms() {
            for v in set.iter() {
                if !out.free.contains(v) && !out.exists.contains(v) {
                    out.free.push(v.clone());
                }
            }
        }
    }
    out.rows.extend(extra);
    out.validate()?;
    Ok(out)
}
