//! Emission of the three single-statement forms, with an audit trail from
//! every emitted coefficient back to the rows it came from.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ci::CISystem;
use crate::compiler::sparse::SparseAffineSystem;
use crate::error::{Error, Result};
use crate::expr::{InfoExpr, Rel, VarId, VarSet};
use crate::gadget::catalog::{Emitter, Gadget};
use crate::gadget::lint::decode_ci;
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorollaryForm {
    /// `v ∈ Γ* ∧ a·v ≤ 0 ∧ v_1 ≤ 1 ⇒ v_1 = 0`.
    CondAffine,
    /// `∃ v ∈ Γ*: a·v = 0 ∧ v_1 = 1`.
    AffineSubspace,
    /// `∀ v ∈ Γ*: ∨_i a_i·v > b_i`.
    Boolean,
}

impl FromStr for CorollaryForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cond-affine" => Ok(CorollaryForm::CondAffine),
            "affine-subspace" => Ok(CorollaryForm::AffineSubspace),
            "boolean" => Ok(CorollaryForm::Boolean),
            other => Err(Error::Parameter { gadget: "emit".into(), reason: format!("unknown form {other}") }),
        }
    }
}

#[derive(Clone, Copy)]
pub enum CorollaryInput<'a> {
    Ci(&'a CISystem),
    Sparse(&'a SparseAffineSystem),
}

/// A source row in `lhs rel rhs` form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Source {
    pub id: String,
    pub lhs: InfoExpr,
    pub rel: Rel,
    pub rhs: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub set: VarSet,
    pub coef: Rational,
    /// `(source id, contribution)` pairs summing to `coef`.
    pub sources: Vec<(String, Rational)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Disjunct {
    pub lhs: InfoExpr,
    pub rhs: Rational,
    pub source: String,
    /// The disjunct is the source row multiplied by `-1`.
    pub negated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Statement {
    pub form: CorollaryForm,
    pub vars: Vec<VarId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub designated: Option<VarId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<InfoExpr>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub disjuncts: Vec<Disjunct>,
    pub sources: Vec<Source>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub audit: Vec<AuditEntry>,
}

/// CI sources of a system with a designated bit: every relation, then
/// `UNIF(X_1)` written as its six CI rows on two fresh variables.
fn ci_sources(ci: &CISystem) -> Result<(Vec<VarId>, VarId, Vec<Source>)> {
    ci.validate()?;
    let x1 = ci.extras.binary_var.clone().ok_or(Error::MissingDesignated)?;
    let mut em = Emitter::new();
    em.emit(&Gadget::Unif, &[x1.clone()], "cor".into())?;
    let mut vars = ci.vars.clone();
    vars.extend(em.exists.iter().cloned());
    let zero = Rational::zero();
    let mut sources: Vec<Source> =
        ci.relations.iter().enumerate().map(|(i, r)| Source { id: format!("rel:{i}"), lhs: r.expr(), rel: Rel::Eq, rhs: zero.clone() }).collect();
    for (j, row) in em.rows.iter().enumerate() {
        sources.push(Source { id: format!("unif:{j}"), lhs: row.lhs.clone(), rel: Rel::Eq, rhs: zero.clone() });
    }
    Ok((vars, x1, sources))
}

fn sparse_sources(sas: &SparseAffineSystem) -> Result<Vec<Source>> {
    sas.validate()?;
    Ok(sas.rows.iter().enumerate().map(|(i, r)| Source { id: format!("row:{i}:{}", r.tag), lhs: r.entries.clone(), rel: r.rel, rhs: r.rhs.clone() }).collect())
}

/// Sum a list of expressions in linear time by accumulating into one map.
fn sum_exprs<'a>(exprs: impl Iterator<Item = &'a InfoExpr>) -> InfoExpr {
    let mut acc: BTreeMap<VarSet, Rational> = BTreeMap::new();
    for e in exprs {
        for (s, c) in e.terms() {
            let slot = acc.entry(s.clone()).or_insert_with(Rational::zero);
            *slot += c;
        }
    }
    let mut out = InfoExpr::zero();
    for (s, c) in acc {
        out.add_term(s, c);
    }
    out
}

fn aggregate(sources: &[Source]) -> (InfoExpr, Vec<AuditEntry>) {
    let a = sum_exprs(sources.iter().map(|s| &s.lhs));
    let mut by_set: BTreeMap<VarSet, Vec<(String, Rational)>> = BTreeMap::new();
    for s in sources {
        for (set, coef) in s.lhs.terms() {
            by_set.entry(set.clone()).or_default().push((s.id.clone(), coef.clone()));
        }
    }
    let audit = by_set.into_iter().map(|(set, sources)| AuditEntry { coef: a.coef(&set), set, sources }).collect();
    (a, audit)
}

fn disjuncts(sources: &[Source]) -> Vec<Disjunct> {
    let mut out = Vec::new();
    for s in sources {
        // negate the row in <= form: a·v <= b becomes a·v > b
        let le = |negated: bool| {
            let (lhs, rhs) = if negated { (s.lhs.negated(), -&s.rhs) } else { (s.lhs.clone(), s.rhs.clone()) };
            Disjunct { lhs, rhs, source: s.id.clone(), negated }
        };
        match s.rel {
            Rel::Le => out.push(le(false)),
            Rel::Ge => out.push(le(true)),
            Rel::Eq => {
                out.push(le(false));
                out.push(le(true));
            }
        }
    }
    out
}

/// Emits `form` from a compiled system.
///
/// The two affine forms need a CI system with a designated fair bit; the
/// boolean form accepts either input.
pub fn emit_corollary(input: CorollaryInput<'_>, form: CorollaryForm) -> Result<Statement> {
    match (form, input) {
        (CorollaryForm::Boolean, CorollaryInput::Sparse(sas)) => {
            let sources = sparse_sources(sas)?;
            Ok(Statement { form, vars: sas.var_names.clone(), designated: None, a: None, disjuncts: disjuncts(&sources), sources, audit: Vec::new() })
        }
        (CorollaryForm::Boolean, CorollaryInput::Ci(ci)) => {
            let (vars, x1, mut sources) = ci_sources(ci)?;
            let h = InfoExpr::entropy(VarSet::of([x1.clone()]));
            sources.push(Source { id: "bit".into(), lhs: h, rel: Rel::Eq, rhs: Rational::one() });
            Ok(Statement { form, vars, designated: Some(x1), a: None, disjuncts: disjuncts(&sources), sources, audit: Vec::new() })
        }
        (_, CorollaryInput::Sparse(_)) => Err(Error::MissingDesignated),
        (_, CorollaryInput::Ci(ci)) => {
            let (vars, x1, sources) = ci_sources(ci)?;
            let (a, audit) = aggregate(&sources);
            Ok(Statement { form, vars, designated: Some(x1), a: Some(a), disjuncts: Vec::new(), sources, audit })
        }
    }
}

impl Statement {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("statements serialize") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Exact check that every emitted coefficient is accounted for by the
    /// sources, and every source contribution is really in that source.
    pub fn check_audit(&self) -> bool {
        let by_id: BTreeMap<&str, &Source> = self.sources.iter().map(|s| (s.id.as_str(), s)).collect();
        match self.form {
            CorollaryForm::Boolean => self.disjuncts.iter().all(|d| {
                let Some(src) = by_id.get(d.source.as_str()) else { return false };
                let (lhs, rhs) = if d.negated { (src.lhs.negated(), -&src.rhs) } else { (src.lhs.clone(), src.rhs.clone()) };
                lhs == d.lhs && rhs == d.rhs
            }),
            _ => {
                let Some(a) = &self.a else { return false };
                let mut seen = 0usize;
                for entry in &self.audit {
                    let mut total = Rational::zero();
                    for (id, c) in &entry.sources {
                        let Some(src) = by_id.get(id.as_str()) else { return false };
                        if src.lhs.coef(&entry.set) != *c {
                            return false;
                        }
                        total += c;
                    }
                    if total != entry.coef || a.coef(&entry.set) != entry.coef {
                        return false;
                    }
                    if !entry.coef.is_zero() {
                        seen += 1;
                    }
                }
                // every source row is a CI equality and every term of a is audited
                seen == a.len() && self.sources.iter().all(|s| s.rel == Rel::Eq && s.rhs.is_zero() && decode_ci(&s.lhs).is_some())
            }
        }
    }

    /// Re-emits from `input` and compares, then checks the audit trail.
    pub fn replay(&self, input: CorollaryInput<'_>) -> Result<bool> {
        let again = emit_corollary(input, self.form)?;
        Ok(&again == self && self.check_audit())
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let n = self.vars.len();
        let x1 = self.designated.as_ref().map(|v| v.to_string()).unwrap_or_default();
        match self.form {
            CorollaryForm::CondAffine => {
                let _ = writeln!(out, "For every entropic vector v over {n} variables:");
                let _ = writeln!(out, "  a.v <= 0 and v[{x1}] <= 1 implies v[{x1}] = 0");
            }
            CorollaryForm::AffineSubspace => {
                let _ = writeln!(out, "There is an entropic vector v over {n} variables with");
                let _ = writeln!(out, "  a.v = 0 and v[{x1}] = 1");
            }
            CorollaryForm::Boolean => {
                let _ = writeln!(out, "For every entropic vector v over {n} variables, at least one holds:");
                for d in &self.disjuncts {
                    let _ = writeln!(out, "  {} > {}    [{}]", d.lhs, d.rhs, d.source);
                }
            }
        }
        if let Some(a) = &self.a {
            let _ = writeln!(out, "where a.v = {a}");
            let _ = writeln!(out, "({} source rows, {} terms)", self.sources.len(), a.len());
        }
        out
    }
}
