//! Row-shape lint: every row must be a CI equality or a `UNIF_k` bound.

use crate::compiler::constants::alpha_index;
use crate::error::{Error, Result};
use crate::expr::{InfoExpr, Rel, VarId, VarSet};
use crate::gadget::system::ConstraintSystem;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RowShape {
    /// `I(A;B|C) = 0`, with `A = B` for functional dependencies.
    Ci { a: VarSet, b: VarSet, c: VarSet },
    /// `H(var) >= α_k` (lower) or `H(var) <= α_{k+1}` (upper).
    UnifBound { var: VarId, k: u64, upper: bool },
}

/// Recovers `(A, B, C)` with `expr == ci_expr(A, B, C)`, if one exists.
///
/// The result is canonical: `A` and `B` exclude `C`, and `A == B` when the
/// expression is a conditional entropy.
pub fn decode_ci(expr: &InfoExpr) -> Option<(VarSet, VarSet, VarSet)> {
    let one = Rational::one();
    let minus = Rational::integer(-1);
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (s, c) in expr.terms() {
        if *c == one {
            pos.push(s.clone());
        } else if *c == minus {
            neg.push(s.clone());
        } else {
            return None;
        }
    }
    let empty = VarSet::empty();
    match (pos.as_slice(), neg.as_slice()) {
        ([], []) => Some((empty.clone(), empty.clone(), empty)),
        // H(P) = H(P|∅)
        ([p], []) => Some((p.clone(), p.clone(), empty)),
        // H(P) − H(N) with N ⊂ P is H(P\N | N)
        ([p], [n]) if n.is_subset(p) && n != p => {
            let a = p.difference(n);
            Some((a.clone(), a, n.clone()))
        }
        // H(P1) + H(P2) − H(P1∪P2), disjoint
        ([p1, p2], [q]) if p1.is_disjoint(p2) && &p1.union(p2) == q => Some((p1.clone(), p2.clone(), empty)),
        // H(P1) + H(P2) − H(P1∪P2) − H(P1∩P2)
        ([p1, p2], [n1, n2]) => {
            let inter = p1.intersection(p2);
            let uni = p1.union(p2);
            let ok = (n1 == &uni && n2 == &inter) || (n2 == &uni && n1 == &inter);
            if !ok || inter.is_empty() || p1.is_subset(p2) || p2.is_subset(p1) {
                return None;
            }
            Some((p1.difference(&inter), p2.difference(&inter), inter))
        }
        _ => None,
    }
}

fn shape(lhs: &InfoExpr, rel: Rel, rhs: &Rational) -> Option<RowShape> {
    if rel == Rel::Eq && rhs.is_zero() {
        if let Some((a, b, c)) = decode_ci(lhs) {
            return Some(RowShape::Ci { a, b, c });
        }
    }
    let mut terms = lhs.terms();
    let (set, coef) = terms.next()?;
    if terms.next().is_some() || set.len() != 1 || *coef != Rational::one() {
        return None;
    }
    let var = set.iter().next()?.clone();
    let idx = alpha_index(rhs)?;
    match rel {
        Rel::Ge => Some(RowShape::UnifBound { var, k: idx, upper: false }),
        Rel::Le if idx >= 3 => Some(RowShape::UnifBound { var, k: idx - 1, upper: true }),
        _ => None,
    }
}

/// Classifies every row, failing on the first row of any other shape.
pub fn lint(cs: &ConstraintSystem) -> Result<Vec<RowShape>> {
    cs.rows.iter().map(|r| shape(&r.lhs, r.rel, &r.rhs).ok_or_else(|| Error::NotLintClean { tag: r.tag.clone() })).collect()
}
