//! Flattened `(A, b)` systems and the slack-variable rewrite to equalities.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{InfoExpr, Rel, VarId, VarSet};
use crate::gadget::system::ConstraintSystem;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseRow {
    pub entries: InfoExpr,
    pub rel: Rel,
    pub rhs: Rational,
    pub tag: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseAffineSystem {
    pub var_names: Vec<VarId>,
    pub rows: Vec<SparseRow>,
}

impl SparseAffineSystem {
    pub fn validate(&self) -> Result<()> {
        let names: HashSet<&VarId> = self.var_names.iter().collect();
        if names.len() != self.var_names.len() {
            return Err(Error::DuplicateName("repeated entry in var_names".into()));
        }
        for row in &self.rows {
            for (set, _) in row.entries.terms() {
                if let Some(v) = set.iter().find(|v| !names.contains(v)) {
                    return Err(Error::UnknownVariable(format!("{v} (row {})", row.tag)));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("sparse systems serialize") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let sas: SparseAffineSystem = serde_json::from_str(text)?;
        sas.validate()?;
        Ok(sas)
    }

    pub fn is_ge_form(&self) -> bool {
        self.rows.iter().all(|r| r.rel == Rel::Ge)
    }

    /// Distinct column subsets used by some row.
    pub fn columns(&self) -> Vec<VarSet> {
        let mut cols: Vec<VarSet> = self.rows.iter().flat_map(|r| r.entries.terms().map(|(s, _)| s.clone())).collect();
        cols.sort();
        cols.dedup();
        cols
    }
}

/// `>=`-form rows equivalent to `lhs rel rhs`; equalities split in two.
pub fn ge_rows(tag: &str, lhs: &InfoExpr, rel: Rel, rhs: &Rational) -> Vec<SparseRow> {
    let row = |entries: InfoExpr, rhs: Rational, tag: String| SparseRow { entries, rel: Rel::Ge, rhs, tag };
    match rel {
        Rel::Ge => vec![row(lhs.clone(), rhs.clone(), tag.to_string())],
        Rel::Le => vec![row(lhs.negated(), -rhs, tag.to_string())],
        Rel::Eq => vec![row(lhs.clone(), rhs.clone(), format!("{tag}/ge")), row(lhs.negated(), -rhs, format!("{tag}/le"))],
    }
}

/// `>=`-form rows over the system's variables; equalities split in two.
pub fn flatten(cs: &ConstraintSystem) -> SparseAffineSystem {
    let var_names = cs.vars().cloned().collect();
    let rows = cs.rows.iter().flat_map(|r| ge_rows(&r.tag, &r.lhs, r.rel, &r.rhs)).collect();
    SparseAffineSystem { var_names, rows }
}

/// Name of the slack variable of 1-based row `j`.
pub fn slack_name(sas: &SparseAffineSystem, j: usize) -> VarId {
    let mut name = format!("slack.{j}");
    while sas.var_names.iter().any(|v| v.as_str() == name) {
        name.push('\'');
    }
    VarId::new(name)
}

/// Rewrites each `a·h >= b` row as `a·h − H(V_j) = b` with a fresh `V_j`.
/// Rows not yet in `>=` form are normalized first.
pub fn slackify(sas: &SparseAffineSystem) -> SparseAffineSystem {
    let ge: Vec<SparseRow> = sas.rows.iter().flat_map(|r| ge_rows(&r.tag, &r.entries, r.rel, &r.rhs)).collect();
    let mut out = SparseAffineSystem { var_names: sas.var_names.clone(), rows: Vec::new() };
    let slack: Vec<VarId> = (1..=ge.len()).map(|j| slack_name(sas, j)).collect();
    out.var_names.extend(slack.iter().cloned());
    for (row, v) in ge.into_iter().zip(slack) {
        let mut entries = row.entries;
        entries.add_term(VarSet::of([v]), Rational::integer(-1));
        out.rows.push(SparseRow { entries, rel: Rel::Eq, rhs: row.rhs, tag: row.tag });
    }
    out
}
