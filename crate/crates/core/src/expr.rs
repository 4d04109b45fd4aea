//! Variable names, variable sets, entropy expressions and affine constraints.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarId(String);

impl VarId {
    pub fn new(name: impl Into<String>) -> Self {
        VarId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VarId {
    fn from(s: &str) -> Self {
        VarId(s.to_string())
    }
}

impl From<String> for VarId {
    fn from(s: String) -> Self {
        VarId(s)
    }
}

impl From<&VarId> for VarId {
    fn from(v: &VarId) -> Self {
        v.clone()
    }
}

/// A set of variables, kept in lexicographic name order.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarSet(BTreeSet<VarId>);

impl VarSet {
    pub fn empty() -> Self {
        VarSet::default()
    }

    pub fn of<I, T>(items: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<VarId>,
    {
        VarSet(items.into_iter().map(Into::into).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, v: &VarId) -> bool {
        self.0.contains(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = &VarId> {
        self.0.iter()
    }

    pub fn union(&self, other: &VarSet) -> VarSet {
        VarSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn intersection(&self, other: &VarSet) -> VarSet {
        VarSet(self.0.intersection(&other.0).cloned().collect())
    }

    pub fn difference(&self, other: &VarSet) -> VarSet {
        VarSet(self.0.difference(&other.0).cloned().collect())
    }

    pub fn is_subset(&self, other: &VarSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &VarSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn insert(&mut self, v: VarId) {
        self.0.insert(v);
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(VarId::as_str).collect();
        write!(f, "{}", names.join(","))
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

impl FromIterator<VarId> for VarSet {
    fn from_iter<I: IntoIterator<Item = VarId>>(iter: I) -> Self {
        VarSet(iter.into_iter().collect())
    }
}

/// A rational linear combination of joint-entropy terms `H(S)`.
///
/// Zero coefficients are never stored, and neither is the empty set since
/// `H(∅) = 0`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct InfoExpr {
    terms: BTreeMap<VarSet, Rational>,
}

impl InfoExpr {
    pub fn zero() -> Self {
        InfoExpr::default()
    }

    /// `H(S)`.
    pub fn entropy(set: VarSet) -> Self {
        let mut e = InfoExpr::zero();
        e.add_term(set, Rational::one());
        e
    }

    pub fn add_term(&mut self, set: VarSet, coef: Rational) {
        if set.is_empty() || coef.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(set) {
            Entry::Vacant(v) => {
                v.insert(coef);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &coef;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&VarSet, &Rational)> {
        self.terms.iter()
    }

    pub fn coef(&self, set: &VarSet) -> Rational {
        self.terms.get(set).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scaled(&self, k: &Rational) -> InfoExpr {
        let mut out = InfoExpr::zero();
        for (s, c) in &self.terms {
            out.add_term(s.clone(), c * k);
        }
        out
    }

    pub fn plus(&self, other: &InfoExpr) -> InfoExpr {
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.add_term(s.clone(), c.clone());
        }
        out
    }

    pub fn negated(&self) -> InfoExpr {
        self.scaled(&Rational::integer(-1))
    }

    /// Every variable mentioned by some term.
    pub fn support(&self) -> VarSet {
        let mut out = VarSet::empty();
        for s in self.terms.keys() {
            out = out.union(s);
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    coef: Rational,
    set: VarSet,
}

// Serialized as a list of `{"coef", "set"}` terms in canonical set order.
impl Serialize for InfoExpr {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = ser.serialize_seq(Some(self.terms.len()))?;
        for (set, coef) in &self.terms {
            seq.serialize_element(&TermRepr { coef: coef.clone(), set: set.clone() })?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for InfoExpr {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let terms = Vec::<TermRepr>::deserialize(de)?;
        let mut e = InfoExpr::zero();
        for t in terms {
            if t.set.is_empty() {
                return Err(serde::de::Error::custom("empty variable set in a term"));
            }
            e.add_term(t.set, t.coef);
        }
        Ok(e)
    }
}

impl fmt::Display for InfoExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (s, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if mag != Rational::one() {
                write!(f, "{mag}")?;
            }
            write!(f, "H({s})")?;
        }
        Ok(())
    }
}

impl fmt::Debug for InfoExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `I(A;B|C) = H(A∪C) + H(B∪C) − H(A∪B∪C) − H(C)`.
///
/// Overlapping arguments are allowed; `ci_expr(A, A, C)` is `H(A|C)`.
pub fn ci_expr(a: &VarSet, b: &VarSet, c: &VarSet) -> InfoExpr {
    let mut e = InfoExpr::zero();
    e.add_term(a.union(c), Rational::one());
    e.add_term(b.union(c), Rational::one());
    e.add_term(a.union(b).union(c), Rational::integer(-1));
    e.add_term(c.clone(), Rational::integer(-1));
    e
}

/// `H(A|C)`.
pub fn cond_entropy_expr(a: &VarSet, c: &VarSet) -> InfoExpr {
    ci_expr(a, a, c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rel {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "<=")]
    Le,
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rel::Ge => ">=",
            Rel::Eq => "=",
            Rel::Le => "<=",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineConstraint {
    pub lhs: InfoExpr,
    pub rel: Rel,
    pub rhs: Rational,
}

impl AffineConstraint {
    pub fn new(lhs: InfoExpr, rel: Rel, rhs: Rational) -> Self {
        AffineConstraint { lhs, rel, rhs }
    }

    /// `I(A;B|C) = 0`.
    pub fn ci(a: &VarSet, b: &VarSet, c: &VarSet) -> Self {
        AffineConstraint::new(ci_expr(a, b, c), Rel::Eq, Rational::zero())
    }

    /// Equivalent list of `lhs >= rhs` pairs; an equality splits in two.
    pub fn to_ge_form(&self) -> Vec<(InfoExpr, Rational)> {
        match self.rel {
            Rel::Ge => vec![(self.lhs.clone(), self.rhs.clone())],
            Rel::Le => vec![(self.lhs.negated(), -&self.rhs)],
            Rel::Eq => vec![(self.lhs.clone(), self.rhs.clone()), (self.lhs.negated(), -&self.rhs)],
        }
    }
}

impl fmt::Display for AffineConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.rel, self.rhs)
    }
}
