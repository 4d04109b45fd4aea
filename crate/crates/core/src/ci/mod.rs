//! Conditional-independence systems and their rewrites.

mod disjoint;
mod rewrite;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

pub use disjoint::{binary_implication_instance, disjointify, DISJOINT_SIZE_CAP};
pub use rewrite::{to_cardinality_implication, to_ci_only, DESIGNATED};

use crate::error::{Error, Result};
use crate::expr::{ci_expr, InfoExpr, VarId, VarSet};
use crate::gadget::catalog::Emitter;
use crate::gadget::lint::decode_ci;

/// `I(X_A; X_B | X_C) = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Relation {
    #[serde(rename = "A")]
    pub a: VarSet,
    #[serde(rename = "B")]
    pub b: VarSet,
    #[serde(rename = "C")]
    pub c: VarSet,
}

impl Relation {
    pub fn new(a: VarSet, b: VarSet, c: VarSet) -> Self {
        Relation { a, b, c }
    }

    /// `H(A|C) = 0`.
    pub fn functional(a: VarSet, c: VarSet) -> Self {
        Relation { b: a.clone(), a, c }
    }

    pub fn expr(&self) -> InfoExpr {
        ci_expr(&self.a, &self.b, &self.c)
    }

    pub fn is_disjoint(&self) -> bool {
        self.a.is_disjoint(&self.b) && self.a.is_disjoint(&self.c) && self.b.is_disjoint(&self.c)
    }

    pub fn vars(&self) -> VarSet {
        self.a.union(&self.b).union(&self.c)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extras {
    /// Variable constrained to be a fair bit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub binary_var: Option<VarId>,
    /// Variable carrying the cardinality bound, when different from `binary_var`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub card_var: Option<VarId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub card_bound: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[allow(clippy::upper_case_acronyms)]
pub struct CISystem {
    pub n: usize,
    /// Variable names; index `i` is `X_{i+1}`.
    pub vars: Vec<VarId>,
    pub relations: Vec<Relation>,
    #[serde(default)]
    pub extras: Extras,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Relation>,
    /// Human-readable record of the rewrite steps applied.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub audit: Vec<String>,
}

impl CISystem {
    pub fn validate(&self) -> Result<()> {
        if self.n != self.vars.len() {
            return Err(Error::InvalidCiSystem(format!("n = {} but {} names", self.n, self.vars.len())));
        }
        let names: HashSet<&VarId> = self.vars.iter().collect();
        if names.len() != self.vars.len() {
            return Err(Error::InvalidCiSystem("repeated variable name".into()));
        }
        let check = |r: &Relation| -> Result<()> {
            match r.vars().iter().find(|v| !names.contains(v)) {
                Some(v) => Err(Error::UnknownVariable(v.to_string())),
                None => Ok(()),
            }
        };
        self.relations.iter().try_for_each(check)?;
        if let Some(t) = &self.target {
            check(t)?;
        }
        for v in [&self.extras.binary_var, &self.extras.card_var].into_iter().flatten() {
            if !names.contains(v) {
                return Err(Error::UnknownVariable(v.to_string()));
            }
        }
        Ok(())
    }

    /// Every relation (and the target) has pairwise disjoint sets.
    pub fn is_disjoint(&self) -> bool {
        self.relations.iter().chain(self.target.iter()).all(Relation::is_disjoint)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("CI systems serialize") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ci: CISystem = serde_json::from_str(text)?;
        ci.validate()?;
        Ok(ci)
    }

    /// Total number of set elements over all relations, a size measure.
    pub fn size(&self) -> usize {
        self.relations.iter().chain(self.target.iter()).map(|r| r.a.len() + r.b.len() + r.c.len()).sum()
    }
}

/// Moves the rows collected by `em` into `out` as relations.
pub(crate) fn drain_relations(em: &mut Emitter, out: &mut Vec<Relation>, vars: &mut Vec<VarId>) -> Result<()> {
    vars.append(&mut em.exists);
    for row in em.rows.drain(..) {
        let (a, b, c) =
            decode_ci(&row.lhs).filter(|_| row.rhs.is_zero() && row.rel == crate::expr::Rel::Eq).ok_or_else(|| Error::NotLintClean { tag: row.tag.clone() })?;
        out.push(Relation::new(a, b, c));
    }
    Ok(())
}
