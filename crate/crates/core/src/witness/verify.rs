//! Numerical evaluation of constraint rows against a factored joint.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ci::CISystem;
use crate::compiler::sparse::SparseAffineSystem;
use crate::entropy::subset_entropy_with_stats;
use crate::error::{Error, Result};
use crate::expr::{InfoExpr, Rel, VarSet};
use crate::gadget::system::ConstraintSystem;
use crate::joint::FactoredJoint;
use crate::rational::Rational;

pub const UNIT_TOLERANCE: f64 = 1e-9;
pub const SYSTEM_TOLERANCE: f64 = 1e-6;
/// Atom budget for a single subset entropy on a compiled witness.
pub const LOCALITY_LIMIT: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowReport {
    pub tag: String,
    pub lhs: f64,
    pub rel: Rel,
    pub rhs: f64,
    /// `lhs − rhs`.
    pub residual: f64,
    pub pass: bool,
    /// Largest atom count over the row's subset entropies.
    pub atoms: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub rows: usize,
    pub failures: usize,
    pub max_residual: f64,
    pub max_atoms: u64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub rows: Vec<RowReport>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.summary.failures == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &RowReport> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }
}

/// A row to check: `Σ coef·H(S)  rel  rhs`.
pub struct Check<'a> {
    pub tag: &'a str,
    pub lhs: &'a InfoExpr,
    pub rel: Rel,
    pub rhs: &'a Rational,
}

fn violation(residual: f64, rel: Rel) -> f64 {
    match rel {
        Rel::Eq => residual.abs(),
        Rel::Ge => (-residual).max(0.0),
        Rel::Le => residual.max(0.0),
    }
}

/// Evaluates every check, computing each distinct subset entropy once.
pub fn verify_checks(joint: &FactoredJoint, checks: &[Check<'_>], tol: f64) -> Result<VerificationReport> {
    let sets: BTreeSet<&VarSet> = checks.iter().flat_map(|c| c.lhs.terms().map(|(s, _)| s)).collect();
    for s in &sets {
        for v in s.iter() {
            if !joint.contains_var(v) {
                return Err(Error::UnknownVariable(v.to_string()));
            }
        }
    }
    let sets: Vec<&VarSet> = sets.into_iter().collect();
    let values = sets.par_iter().map(|s| subset_entropy_with_stats(joint, s)).collect::<Result<Vec<_>>>()?;
    let cache: HashMap<&VarSet, (f64, u64)> = sets.into_iter().zip(values).collect();

    let mut summary = Summary { tolerance: tol, ..Summary::default() };
    let mut rows = Vec::with_capacity(checks.len());
    for c in checks {
        let mut lhs = 0.0;
        let mut atoms = 0;
        for (s, coef) in c.lhs.terms() {
            let (h, a) = cache[s];
            lhs += coef.to_f64() * h;
            atoms = atoms.max(a);
        }
        let rhs = c.rhs.to_f64();
        let residual = lhs - rhs;
        let bad = violation(residual, c.rel);
        let pass = bad <= tol;
        summary.rows += 1;
        summary.failures += usize::from(!pass);
        summary.max_residual = summary.max_residual.max(bad);
        summary.max_atoms = summary.max_atoms.max(atoms);
        rows.push(RowReport { tag: c.tag.to_string(), lhs, rel: c.rel, rhs, residual, pass, atoms });
    }
    Ok(VerificationReport { rows, summary })
}

/// Checks every row of `cs`; the joint must define all of its variables.
pub fn verify(joint: &FactoredJoint, cs: &ConstraintSystem, tol: f64) -> Result<VerificationReport> {
    for v in cs.vars() {
        if !joint.contains_var(v) {
            return Err(Error::RosterMismatch(format!("witness does not define `{v}`")));
        }
    }
    let checks: Vec<Check<'_>> = cs.rows.iter().map(|r| Check { tag: &r.tag, lhs: &r.lhs, rel: r.rel, rhs: &r.rhs }).collect();
    verify_checks(joint, &checks, tol)
}

pub fn verify_sparse(joint: &FactoredJoint, sas: &SparseAffineSystem, tol: f64) -> Result<VerificationReport> {
    let checks: Vec<Check<'_>> = sas.rows.iter().map(|r| Check { tag: &r.tag, lhs: &r.entries, rel: r.rel, rhs: &r.rhs }).collect();
    verify_checks(joint, &checks, tol)
}

/// Checks the relations of a CI system (not its target) as `= 0` rows.
pub fn verify_ci(joint: &FactoredJoint, ci: &CISystem, tol: f64) -> Result<VerificationReport> {
    let zero = Rational::zero();
    let tags: Vec<String> = (0..ci.relations.len()).map(|i| format!("rel:{i}")).collect();
    let exprs: Vec<InfoExpr> = ci.relations.iter().map(|r| r.expr()).collect();
    let checks: Vec<Check<'_>> = tags.iter().zip(&exprs).map(|(tag, lhs)| Check { tag, lhs, rel: Rel::Eq, rhs: &zero }).collect();
    verify_checks(joint, &checks, tol)
}
