//! Refutation of affine entropy systems over the Shannon outer bound.
//!
//! A system `a_r · h >= b_r` together with all elemental inequalities is
//! infeasible iff some `y >= 0` has `Σ y_r a_r = 0` and `Σ y_r b_r = 1`.
//! Such a `y` is the certificate. Failure to find one proves nothing, so
//! the only other outcome is `Unknown`.

pub mod simplex;

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::compiler::sparse::{ge_rows, SparseAffineSystem};
use crate::error::{Error, Result};
use crate::expr::{InfoExpr, VarId, VarSet};
use crate::rational::Rational;

/// Largest variable count accepted by [`refute`].
pub const MAX_VARS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ElementalKind {
    /// `H(X_i | X_rest) >= 0`.
    CondEntropy,
    /// `I(X_i; X_j | X_K) >= 0`.
    CondMutualInfo,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elemental {
    pub id: String,
    pub kind: ElementalKind,
    pub expr: InfoExpr,
}

/// `n + C(n, 2)·2^(n−2)`.
pub fn elemental_count(n: usize) -> usize {
    match n {
        0 => 0,
        1 => 1,
        _ => n + n * (n - 1) / 2 * (1 << (n - 2)),
    }
}

/// All elemental inequalities over `vars`, conditional entropies first,
/// then mutual informations by `(i, j)` and conditioning mask.
pub fn elemental_inequalities(vars: &[VarId]) -> Result<Vec<Elemental>> {
    let n = vars.len();
    if n > MAX_VARS {
        return Err(Error::LimitExceeded { got: n, limit: MAX_VARS });
    }
    let pick = |mask: usize| -> VarSet { (0..n).filter(|i| mask >> i & 1 == 1).map(|i| vars[i].clone()).collect() };
    let full = (1usize << n) - 1;
    let mut out = Vec::with_capacity(elemental_count(n));
    for i in 0..n {
        let mut expr = InfoExpr::entropy(pick(full));
        expr.add_term(pick(full & !(1 << i)), Rational::integer(-1));
        out.push(Elemental { id: format!("elem:H{i}"), kind: ElementalKind::CondEntropy, expr });
    }
    for i in 0..n {
        for j in i + 1..n {
            let rest = full & !(1 << i) & !(1 << j);
            let mut k = 0usize;
            loop {
                if k & !rest == 0 {
                    let expr = crate::expr::ci_expr(&pick(1 << i), &pick(1 << j), &pick(k));
                    let id = format!("elem:I{i},{j}|{k:x}");
                    out.push(Elemental { id, kind: ElementalKind::CondMutualInfo, expr });
                }
                if k == rest {
                    break;
                }
                k += 1;
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Refuted,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    /// Nonnegative weights of `>=` rows, by row id.
    pub multipliers: Vec<(String, Rational)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpOutcome {
    pub status: Status,
    pub vars: Vec<VarId>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<Certificate>,
}

impl LpOutcome {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("outcomes serialize") + "\n"
    }
}

/// One `expr >= rhs` row of the LP.
#[derive(Clone, Debug)]
pub struct LpRow {
    pub id: String,
    pub expr: InfoExpr,
    pub rhs: Rational,
}

/// The LP rows for `sas`, restricted to `restrict` when given: rows that
/// mention other variables are dropped.
pub fn lp_rows(sas: &SparseAffineSystem, restrict: Option<&[VarId]>) -> Result<(Vec<VarId>, Vec<LpRow>)> {
    let vars: Vec<VarId> = match restrict {
        Some(r) => {
            let mut v = r.to_vec();
            v.sort();
            v.dedup();
            v
        }
        None => {
            let mut all: VarSet = sas.var_names.iter().cloned().collect();
            for r in &sas.rows {
                all = all.union(&r.entries.support());
            }
            all.iter().cloned().collect()
        }
    };
    if vars.len() > MAX_VARS {
        return Err(Error::LimitExceeded { got: vars.len(), limit: MAX_VARS });
    }
    let scope: VarSet = vars.iter().cloned().collect();
    let mut rows: Vec<LpRow> = elemental_inequalities(&vars)?.into_iter().map(|e| LpRow { id: e.id, expr: e.expr, rhs: Rational::zero() }).collect();
    for (i, r) in sas.rows.iter().enumerate() {
        if !r.entries.support().is_subset(&scope) {
            continue;
        }
        let ge = ge_rows(&r.tag, &r.entries, r.rel, &r.rhs);
        let split = ge.len() > 1;
        for (side, g) in ge.into_iter().enumerate() {
            let suffix = if split { ["/ge", "/le"][side] } else { "" };
            rows.push(LpRow { id: format!("row:{i}{suffix}"), expr: g.entries, rhs: g.rhs });
        }
    }
    Ok((vars, rows))
}

/// Decides whether the Shannon outer bound already rules out `sas`.
pub fn refute(sas: &SparseAffineSystem, restrict: Option<&[VarId]>) -> Result<LpOutcome> {
    let (vars, rows) = lp_rows(sas, restrict)?;
    let mut index: BTreeMap<VarSet, usize> = BTreeMap::new();
    for r in &rows {
        for (s, _) in r.expr.terms() {
            let next = index.len();
            index.entry(s.clone()).or_insert(next);
        }
    }
    let m = index.len();
    let columns: Vec<simplex::Column> = rows
        .iter()
        .map(|r| {
            let mut col: Vec<(usize, BigRational)> = r.expr.terms().map(|(s, c)| (index[s], c.as_big().clone())).collect();
            if !r.rhs.is_zero() {
                col.push((m, r.rhs.as_big().clone()));
            }
            col
        })
        .collect();
    let mut b = vec![BigRational::from_integer(0.into()); m + 1];
    b[m] = BigRational::from_integer(1.into());
    let outcome = match simplex::feasible_point(&columns, &b) {
        Some(y) => {
            let multipliers =
                rows.iter().zip(y).filter(|(_, v)| *v != BigRational::from_integer(0.into())).map(|(r, v)| (r.id.clone(), Rational::from(v))).collect();
            LpOutcome { status: Status::Refuted, vars, certificate: Some(Certificate { multipliers }) }
        }
        None => LpOutcome { status: Status::Unknown, vars, certificate: None },
    };
    Ok(outcome)
}

/// Recomputes a certificate in exact arithmetic: the weighted rows must sum
/// to `0 >= c` with `c > 0`. Returns `c`.
pub fn replay(sas: &SparseAffineSystem, restrict: Option<&[VarId]>, cert: &Certificate) -> Result<Rational> {
    let (_, rows) = lp_rows(sas, restrict)?;
    let by_id: BTreeMap<&str, &LpRow> = rows.iter().map(|r| (r.id.as_str(), r)).collect();
    let mut expr = InfoExpr::zero();
    let mut rhs = Rational::zero();
    for (id, y) in &cert.multipliers {
        if y.is_negative() {
            return Err(Error::BadCertificate(format!("negative multiplier on `{id}`")));
        }
        let row = by_id.get(id.as_str()).ok_or_else(|| Error::BadCertificate(format!("unknown row `{id}`")))?;
        expr = expr.plus(&row.expr.scaled(y));
        rhs = &rhs + &(&row.rhs * y);
    }
    if !expr.is_zero() {
        return Err(Error::BadCertificate(format!("certificate leaves {expr} on the left")));
    }
    if !rhs.is_positive() {
        return Err(Error::BadCertificate(format!("certificate sums to 0 >= {rhs}, no contradiction")));
    }
    Ok(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(n: usize) -> Vec<VarId> {
        (1..=n).map(|i| VarId::new(i.to_string())).collect()
    }

    #[test]
    fn elemental_counts() {
        for n in 1..=6 {
            assert_eq!(elemental_inequalities(&vars(n)).unwrap().len(), elemental_count(n));
        }
        assert_eq!(elemental_count(2), 3);
        assert_eq!(elemental_count(3), 9);
        assert!(elemental_inequalities(&vars(11)).is_err());
    }
}
