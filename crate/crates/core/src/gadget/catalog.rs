//! The named gadget catalog and its instantiation into tagged rows.

use std::collections::BTreeMap;

use crate::compiler::constants::{pick_alpha, pick_log_bounds, GAP_BOUNDS};
use crate::error::{Error, Result};
use crate::expr::{AffineConstraint, InfoExpr, Rel, VarId, VarSet};
use crate::gadget::system::{ConstraintSystem, Row};

/// Upper limit on `k` for gadgets that enumerate all of `{0,1}^k`.
pub const MAX_K: u32 = 13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SatKind {
    /// Two-vertex groups, forbids exactly one satisfying vertex.
    NeHalf,
    /// Two-vertex groups, at most one satisfying vertex.
    LeHalf,
    /// Four-vertex groups, at most three satisfying vertices.
    LeThreeQuarters,
}

impl SatKind {
    /// Cardinality of the uniform auxiliary `U`.
    pub fn uniform_size(self) -> u64 {
        match self {
            SatKind::NeHalf => 2,
            SatKind::LeHalf => 3,
            SatKind::LeThreeQuarters => 105,
        }
    }

    fn key(self) -> &'static str {
        match self {
            SatKind::NeHalf => "SAT_NE_HALF",
            SatKind::LeHalf => "SAT_LE_HALF",
            SatKind::LeThreeQuarters => "SAT_LE_3_4",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Gadget {
    Triple,
    Unif,
    UnifK {
        k: u64,
    },
    Cycs,
    Tori,
    Flip,
    Sw {
        k: u32,
    },
    Col {
        k: u32,
    },
    Cold {
        k: u32,
        x_len: usize,
    },
    /// `s` and `s_bar` hold 1-based switch indices.
    Sat {
        kind: SatKind,
        k: u32,
        e_len: usize,
        s: Vec<u32>,
        s_bar: Vec<u32>,
    },
    Ctori {
        k: u32,
    },
    Otori {
        k: u32,
    },
    /// Tiles as `[N, E, S, W]` colors in `1..=(k-1)/4`.
    Ttori {
        k: u32,
        tiles: Vec<[u32; 4]>,
    },
    UnifEq,
    Prod {
        l: usize,
    },
    Pow {
        k: u64,
    },
    Gesqrt,
    Le,
    UnifKCi {
        k: u64,
    },
    UnifLe2Given3,
    Res3,
    Eq,
    Eqres,
}

impl Gadget {
    /// Catalog key, also the first component of generated names.
    pub fn key(&self) -> &'static str {
        match self {
            Gadget::Triple => "TRIPLE",
            Gadget::Unif => "UNIF",
            Gadget::UnifK { .. } => "UNIF_K",
            Gadget::Cycs => "CYCS",
            Gadget::Tori => "TORI",
            Gadget::Flip => "FLIP",
            Gadget::Sw { .. } => "SW",
            Gadget::Col { .. } => "COL",
            Gadget::Cold { .. } => "COLD",
            Gadget::Sat { kind, .. } => kind.key(),
            Gadget::Ctori { .. } => "CTORI",
            Gadget::Otori { .. } => "OTORI",
            Gadget::Ttori { .. } => "TTORI",
            Gadget::UnifEq => "UNIF_EQ",
            Gadget::Prod { .. } => "PROD",
            Gadget::Pow { .. } => "POW",
            Gadget::Gesqrt => "GESQRT",
            Gadget::Le => "LE",
            Gadget::UnifKCi { .. } => "UNIF_K_CI",
            Gadget::UnifLe2Given3 => "UNIF_LE2_GIVEN_LE3",
            Gadget::Res3 => "RES3",
            Gadget::Eq => "EQ",
            Gadget::Eqres => "EQRES",
        }
    }

    pub fn arity(&self) -> usize {
        let switches = |k: u32| 3 * k as usize + 1;
        match self {
            Gadget::Triple => 3,
            Gadget::Unif | Gadget::UnifK { .. } | Gadget::UnifLe2Given3 => 1,
            Gadget::Cycs => 2,
            Gadget::Tori => 4,
            Gadget::Flip => 3,
            Gadget::Sw { k } | Gadget::Col { k } => switches(*k),
            Gadget::Cold { k, x_len } => x_len + switches(*k),
            Gadget::Sat { k, e_len, .. } => e_len + switches(*k),
            Gadget::Ctori { k } | Gadget::Otori { k } => 4 + switches(*k),
            Gadget::Ttori { .. } => 0,
            Gadget::UnifEq | Gadget::Pow { .. } | Gadget::Gesqrt | Gadget::Le => 2,
            Gadget::Prod { l } => l + 1,
            Gadget::UnifKCi { .. } => 2,
            Gadget::Res3 => 3,
            Gadget::Eq => 2,
            Gadget::Eqres => 4,
        }
    }

    /// Human-readable signature, e.g. `SW(W^k,V^k,Vbar^k,F)`.
    pub fn signature(&self) -> String {
        let sw = "W^k,V^k,Vbar^k,F";
        match self {
            Gadget::Triple => "TRIPLE(Y1,Y2,Y3)".into(),
            Gadget::Unif => "UNIF(X)".into(),
            Gadget::UnifK { k } => format!("UNIF_{k}(X)"),
            Gadget::Cycs => "CYCS(X1,X2)".into(),
            Gadget::Tori => "TORI(X1,X2,Y1,Y2)".into(),
            Gadget::Flip => "FLIP(F,G1,G2)".into(),
            Gadget::Sw { .. } => format!("SW({sw})"),
            Gadget::Col { .. } => format!("COL({sw})"),
            Gadget::Cold { x_len, .. } => format!("COLD(X^{x_len},{sw})"),
            Gadget::Sat { kind, e_len, s, s_bar, .. } => {
                format!("{}[S={s:?},Sbar={s_bar:?}](E^{e_len},{sw})", kind.key())
            }
            Gadget::Ctori { .. } => format!("CTORI(X1,X2,Y1,Y2,{sw})"),
            Gadget::Otori { .. } => format!("OTORI(X1,X2,Y1,Y2,{sw})"),
            Gadget::Ttori { tiles, .. } => format!("TTORI[{} tiles]()", tiles.len()),
            Gadget::UnifEq => "UNIF_EQ(Y;Z)".into(),
            Gadget::Prod { l } => format!("PROD(Y^{l};G)"),
            Gadget::Pow { k } => format!("POW_{k}(Y;G)"),
            Gadget::Gesqrt => "GESQRT(Y;G)".into(),
            Gadget::Le => "LE(Y;Z)".into(),
            Gadget::UnifKCi { k } => format!("UNIF_K_CI_{k}(Y;X_1)"),
            Gadget::UnifLe2Given3 => "UNIF_LE2_GIVEN_LE3(Y)".into(),
            Gadget::Res3 => "RES3(Y1,Y2,Y3)".into(),
            Gadget::Eq => "EQ(F,G)".into(),
            Gadget::Eqres => "EQRES(Y1,Z1,Y2,Z2)".into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: String| Err(Error::Parameter { gadget: self.key().to_string(), reason });
        let switch_k = |k: u32| -> Result<()> {
            if k < 4 {
                return bad(format!("k = {k} but switches need k >= 4"));
            }
            if k > MAX_K {
                return bad(format!("k = {k} exceeds the cap {MAX_K}"));
            }
            Ok(())
        };
        match self {
            Gadget::UnifK { k } | Gadget::UnifKCi { k } if *k < 2 => bad(format!("k = {k} < 2")),
            Gadget::Sw { k } | Gadget::Col { k } | Gadget::Ctori { k } => switch_k(*k),
            Gadget::Cold { k, x_len } => {
                switch_k(*k)?;
                if *x_len == 0 {
                    return bad("empty vertex tuple".into());
                }
                Ok(())
            }
            Gadget::Sat { k, e_len, s, s_bar, .. } => {
                switch_k(*k)?;
                if *e_len == 0 {
                    return bad("empty group tuple".into());
                }
                for &i in s.iter().chain(s_bar) {
                    if i == 0 || i > *k {
                        return bad(format!("switch index {i} outside 1..={k}"));
                    }
                }
                let mut all: Vec<u32> = s.iter().chain(s_bar).copied().collect();
                let n = all.len();
                all.sort_unstable();
                all.dedup();
                if all.len() != n {
                    return bad("S and Sbar must be disjoint and duplicate-free".into());
                }
                Ok(())
            }
            Gadget::Otori { k } | Gadget::Ttori { k, .. } => {
                switch_k(*k)?;
                if (k - 1) % 4 != 0 || k - 1 < 8 {
                    return bad(format!("k - 1 = {} must be a multiple of 4 and at least 8", k - 1));
                }
                if let Gadget::Ttori { tiles, .. } = self {
                    let t = (k - 1) / 4;
                    if tiles.is_empty() {
                        return bad("empty tile set".into());
                    }
                    for tile in tiles {
                        if tile.iter().any(|&c| c == 0 || c > t) {
                            return bad(format!("tile {tile:?} has a color outside 1..={t}"));
                        }
                    }
                }
                Ok(())
            }
            Gadget::Prod { l } if *l == 0 => bad("PROD needs at least one factor".into()),
            Gadget::Pow { k } if *k == 0 => bad("POW needs k >= 1".into()),
            _ => Ok(()),
        }
    }
}

/// One node of the instantiation tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub gadget: Gadget,
    pub path: String,
    pub actuals: Vec<VarId>,
    pub locals: Vec<VarId>,
    pub children: Vec<Instance>,
}

impl Instance {
    /// Generated name of a local variable of this node.
    pub fn local(&self, name: &str) -> &VarId {
        let want = gensym(self.gadget.key(), &self.path, name);
        self.locals.iter().find(|v| v.as_str() == want).unwrap_or_else(|| panic!("{} has no local {name}", self.path))
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Instance)) {
        f(self);
        for c in &self.children {
            c.walk(f);
        }
    }

    /// Number of nodes per catalog key in this subtree.
    pub fn census(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        self.walk(&mut |n| *out.entry(n.gadget.key().to_string()).or_insert(0) += 1);
        out
    }
}

pub fn gensym(key: &str, path: &str, local: &str) -> String {
    format!("{key}.{path}.{local}")
}

/// Accumulates rows and existential variables across a gadget tree.
#[derive(Default)]
pub struct Emitter {
    pub rows: Vec<Row>,
    pub exists: Vec<VarId>,
}

struct Ctx<'a> {
    em: &'a mut Emitter,
    node: Instance,
    row_no: usize,
}

fn set<'a>(vars: impl IntoIterator<Item = &'a VarId>) -> VarSet {
    vars.into_iter().cloned().collect()
}

impl Ctx<'_> {
    fn local(&mut self, name: &str) -> VarId {
        let v = VarId::new(gensym(self.node.gadget.key(), &self.node.path, name));
        self.em.exists.push(v.clone());
        self.node.locals.push(v.clone());
        v
    }

    fn row(&mut self, c: AffineConstraint) {
        self.row_no += 1;
        let tag = format!("{}@{}#{}", self.node.gadget.key(), self.node.path, self.row_no);
        self.em.rows.push(Row::new(c, tag));
    }

    fn ci(&mut self, a: &VarSet, b: &VarSet, c: &VarSet) {
        self.row(AffineConstraint::ci(a, b, c));
    }

    /// `H(A|C) = 0`.
    fn func(&mut self, a: &VarSet, c: &VarSet) {
        self.ci(a, a, c);
    }

    /// `I(A;B) = 0`.
    fn indep(&mut self, a: &VarSet, b: &VarSet) {
        self.ci(a, b, &VarSet::empty());
    }

    fn child(&mut self, g: Gadget, actuals: Vec<VarId>) -> Result<()> {
        let path = format!("{}.{}", self.node.path, self.node.children.len());
        let inst = self.em.emit(&g, &actuals, path)?;
        self.node.children.push(inst);
        Ok(())
    }
}

fn one(v: &VarId) -> VarSet {
    VarSet::of([v.clone()])
}

/// `[W^k, V^k, Vbar^k, F]` views into an actual-argument slice.
struct Switches<'a> {
    w: &'a [VarId],
    v: &'a [VarId],
    vbar: &'a [VarId],
    f: &'a VarId,
}

impl<'a> Switches<'a> {
    fn split(args: &'a [VarId], k: u32) -> Self {
        let k = k as usize;
        Switches { w: &args[..k], v: &args[k..2 * k], vbar: &args[2 * k..3 * k], f: &args[3 * k] }
    }

    /// `V_S ∪ Vbar_Sbar`, indices 1-based.
    fn selected(&self, s: &[u32], s_bar: &[u32]) -> VarSet {
        let mut out = VarSet::empty();
        for &i in s {
            out.insert(self.v[i as usize - 1].clone());
        }
        for &i in s_bar {
            out.insert(self.vbar[i as usize - 1].clone());
        }
        out
    }
}

/// `r(j) = ((j − 1) mod 4) + 1`, residues taking values in `1..=4`.
pub fn residue(j: u32) -> u32 {
    (j - 1) % 4 + 1
}

/// Ordered pairs `j1 <= j2` in `1..k` whose residue set is not one of `forbidden`.
pub fn otori_pairs(k: u32, forbidden: [[u32; 2]; 2]) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for j1 in 1..k {
        for j2 in j1..k {
            let mut r = [residue(j1), residue(j2)];
            r.sort_unstable();
            if !forbidden.contains(&r) {
                out.push((j1, j2));
            }
        }
    }
    out
}

/// Four-element sets with one member per residue class, in lexicographic order.
pub fn residue_quadruples(k: u32) -> Vec<[u32; 4]> {
    let class = |r: u32| (1..k).filter(move |&j| residue(j) == r);
    let mut out = Vec::new();
    for a in class(1) {
        for b in class(2) {
            for c in class(3) {
                for d in class(4) {
                    let mut q = [a, b, c, d];
                    q.sort_unstable();
                    out.push(q);
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// Sorted vertex-color sets `{4c1−3, 4c2−2, 4c3−1, 4c4}` of the tiles.
pub fn face_sets_11(tiles: &[[u32; 4]]) -> Vec<[u32; 4]> {
    tiles
        .iter()
        .map(|c| {
            let mut q = [4 * c[0] - 3, 4 * c[1] - 2, 4 * c[2] - 1, 4 * c[3]];
            q.sort_unstable();
            q
        })
        .collect()
}

/// Sorted vertex-color sets `{4c1−1, 4c2, 4c3−3, 4c4−2}` of the tiles.
pub fn face_sets_22(tiles: &[[u32; 4]]) -> Vec<[u32; 4]> {
    tiles
        .iter()
        .map(|c| {
            let mut q = [4 * c[0] - 1, 4 * c[1], 4 * c[2] - 3, 4 * c[3] - 2];
            q.sort_unstable();
            q
        })
        .collect()
}

/// `w^k` as a bit mask (bit `i-1` is `w_i`) belongs to `T_k`.
pub fn in_color_set(mask: u32, k: u32) -> bool {
    let full = (1u32 << k) - 1;
    let positive = mask.count_ones() == 1 && mask < (1 << (k - 1));
    let inv = full & !mask;
    let negative = inv.count_ones() == 1 && inv < (1 << (k - 1));
    positive || negative
}

fn complement(k: u32, j: &[u32]) -> Vec<u32> {
    (1..=k).filter(|i| !j.contains(i)).collect()
}

impl Emitter {
    pub fn new() -> Self {
        Emitter::default()
    }

    pub fn emit(&mut self, g: &Gadget, actuals: &[VarId], path: String) -> Result<Instance> {
        g.validate()?;
        if actuals.len() != g.arity() {
            return Err(Error::Arity { gadget: g.key().to_string(), expected: g.arity(), got: actuals.len() });
        }
        let node = Instance { gadget: g.clone(), path, actuals: actuals.to_vec(), locals: Vec::new(), children: Vec::new() };
        let mut cx = Ctx { em: self, node, row_no: 0 };
        body(&mut cx, g, actuals)?;
        Ok(cx.node)
    }
}

fn body(cx: &mut Ctx<'_>, g: &Gadget, a: &[VarId]) -> Result<()> {
    match g {
        Gadget::Triple => {
            let (y1, y2, y3) = (one(&a[0]), one(&a[1]), one(&a[2]));
            cx.func(&y1, &y2.union(&y3));
            cx.func(&y2, &y1.union(&y3));
            cx.func(&y3, &y1.union(&y2));
            cx.indep(&y1, &y2);
            cx.indep(&y1, &y3);
            cx.indep(&y2, &y3);
        }
        Gadget::Unif => {
            let u1 = cx.local("U1");
            let u2 = cx.local("U2");
            cx.child(Gadget::Triple, vec![a[0].clone(), u1, u2])?;
        }
        Gadget::UnifK { k } => {
            cx.child(Gadget::Unif, vec![a[0].clone()])?;
            let h = InfoExpr::entropy(one(&a[0]));
            cx.row(AffineConstraint::new(h.clone(), Rel::Ge, pick_alpha(*k)));
            cx.row(AffineConstraint::new(h, Rel::Le, pick_alpha(k + 1)));
        }
        Gadget::Cycs => {
            let u = cx.local("U");
            cx.child(Gadget::Unif, vec![a[0].clone()])?;
            cx.child(Gadget::Unif, vec![a[1].clone()])?;
            cx.child(Gadget::UnifK { k: 2 }, vec![u.clone()])?;
            let (x1, x2, u) = (one(&a[0]), one(&a[1]), one(&u));
            cx.indep(&x1, &u);
            cx.indep(&x2, &u);
            cx.func(&x1, &x2.union(&u));
            cx.func(&x2, &x1.union(&u));
            cx.func(&u, &x1.union(&x2));
        }
        Gadget::Tori => {
            cx.child(Gadget::Cycs, vec![a[0].clone(), a[1].clone()])?;
            cx.child(Gadget::Cycs, vec![a[2].clone(), a[3].clone()])?;
            cx.indep(&set(&a[0..2]), &set(&a[2..4]));
        }
        Gadget::Flip => {
            let (f, g1, g2) = (&a[0], &a[1], &a[2]);
            let u = cx.local("U");
            let z1 = cx.local("Z1");
            let z2 = cx.local("Z2");
            cx.child(Gadget::UnifK { k: 4 }, vec![u.clone()])?;
            cx.child(Gadget::UnifK { k: 2 }, vec![f.clone()])?;
            cx.func(&set([f, g1, g2]), &one(&u));
            cx.ci(&one(g1), &one(g2), &one(f));
            cx.child(Gadget::UnifK { k: 3 }, vec![z1.clone()])?;
            cx.indep(&one(&z1), &one(g1));
            cx.func(&one(&u), &set([g1, &z1]));
            cx.child(Gadget::UnifK { k: 3 }, vec![z2.clone()])?;
            cx.indep(&one(&z2), &one(g2));
            cx.func(&one(&u), &set([g2, &z2]));
        }
        Gadget::Sw { k } => {
            let sw = Switches::split(a, *k);
            let g = cx.local("G");
            cx.indep(&set(sw.w), &set([sw.f, &g]));
            for i in 0..*k as usize {
                let (w, v, vb) = (&sw.w[i], &sw.v[i], &sw.vbar[i]);
                cx.child(Gadget::UnifK { k: 2 }, vec![w.clone()])?;
                cx.func(&set([v, vb]), &set([w, sw.f]));
                cx.ci(&one(v), &one(vb), &one(w));
                cx.child(Gadget::Flip, vec![sw.f.clone(), g.clone(), v.clone()])?;
                cx.child(Gadget::Flip, vec![sw.f.clone(), g.clone(), vb.clone()])?;
            }
        }
        Gadget::Col { k } => {
            cx.child(Gadget::Sw { k: *k }, a.to_vec())?;
            let sw = Switches::split(a, *k);
            let wall = set(sw.w);
            for mask in 0u32..(1 << k) {
                if in_color_set(mask, *k) {
                    continue;
                }
                let ones: Vec<u32> = (1..=*k).filter(|i| mask >> (i - 1) & 1 == 1).collect();
                let zeros = complement(*k, &ones);
                let cond = sw.selected(&ones, &zeros).union(&wall);
                cx.func(&one(sw.f), &cond);
            }
        }
        Gadget::Cold { k, x_len } => {
            let x = set(&a[..*x_len]);
            let rest = &a[*x_len..];
            cx.child(Gadget::Col { k: *k }, rest.to_vec())?;
            let sw = Switches::split(rest, *k);
            let wall = set(sw.w);
            cx.func(&wall, &x);
            let payload = set(sw.v).union(&set(sw.vbar)).union(&one(sw.f));
            cx.ci(&payload, &x, &wall);
        }
        Gadget::Sat { kind, k, e_len, s, s_bar } => {
            let e = set(&a[..*e_len]);
            let sw = Switches::split(&a[*e_len..], *k);
            let u = cx.local("U");
            cx.child(Gadget::UnifK { k: kind.uniform_size() }, vec![u.clone()])?;
            let z = sw.selected(s, s_bar).union(&e);
            cx.indep(&one(&u), &z);
            cx.func(&one(sw.f), &z.union(&one(&u)));
        }
        Gadget::Ctori { k } => {
            cx.child(Gadget::Tori, a[..4].to_vec())?;
            cx.child(Gadget::Cold { k: *k, x_len: 4 }, a.to_vec())?;
        }
        Gadget::Otori { k } => otori(cx, *k, a)?,
        Gadget::Ttori { k, tiles } => ttori(cx, *k, tiles)?,
        Gadget::UnifEq => {
            let u1 = cx.local("U1");
            let u2 = cx.local("U2");
            let u3 = cx.local("U3");
            cx.child(Gadget::Triple, vec![a[0].clone(), u1.clone(), u2])?;
            cx.child(Gadget::Triple, vec![a[1].clone(), u1, u3])?;
        }
        Gadget::Prod { l } => {
            let zs: Vec<VarId> = (1..=*l).map(|i| cx.local(&format!("Z{i}"))).collect();
            let u = cx.local("U");
            for i in 0..*l {
                cx.child(Gadget::UnifEq, vec![a[i].clone(), zs[i].clone()])?;
                if i > 0 {
                    cx.indep(&one(&zs[i]), &set(&zs[..i]));
                }
            }
            cx.child(Gadget::UnifEq, vec![a[*l].clone(), u.clone()])?;
            cx.func(&one(&u), &set(&zs));
            cx.func(&set(&zs), &one(&u));
        }
        Gadget::Pow { k } => {
            let mut args = vec![a[0].clone(); *k as usize];
            args.push(a[1].clone());
            cx.child(Gadget::Prod { l: *k as usize }, args)?;
        }
        Gadget::Gesqrt => {
            let (y, g) = (&a[0], &a[1]);
            let z = cx.local("Z");
            let w = cx.local("W");
            let u = cx.local("U");
            let v = cx.local("V");
            cx.child(Gadget::UnifEq, vec![y.clone(), z.clone()])?;
            cx.child(Gadget::Unif, vec![w.clone()])?;
            cx.indep(&one(&w), &one(&z));
            cx.child(Gadget::UnifEq, vec![g.clone(), u.clone()])?;
            cx.func(&one(&u), &set([&z, &w]));
            cx.func(&set([&z, &w]), &one(&u));
            cx.child(Gadget::UnifEq, vec![z.clone(), v.clone()])?;
            cx.func(&one(&u), &set([&z, &v]));
        }
        Gadget::Le => {
            let u = cx.local("U");
            cx.child(Gadget::Prod { l: 2 }, vec![a[0].clone(), a[1].clone(), u.clone()])?;
            cx.child(Gadget::Gesqrt, vec![a[1].clone(), u])?;
        }
        Gadget::UnifKCi { k } => {
            let (y, anchor) = (&a[0], &a[1]);
            let lo = pick_log_bounds(*k);
            let hi = pick_log_bounds(k + 1);
            let u = cx.local("U");
            let v1 = cx.local("V1");
            let v2 = cx.local("V2");
            let w1 = cx.local("W1");
            let w2 = cx.local("W2");
            cx.child(Gadget::UnifEq, vec![u.clone(), anchor.clone()])?;
            cx.child(Gadget::Unif, vec![y.clone()])?;
            cx.child(Gadget::Pow { k: lo.p }, vec![u.clone(), v1.clone()])?;
            cx.child(Gadget::Pow { k: lo.q }, vec![y.clone(), w1.clone()])?;
            cx.child(Gadget::Le, vec![v1, w1])?;
            cx.child(Gadget::Pow { k: hi.p }, vec![u, v2.clone()])?;
            cx.child(Gadget::Pow { k: hi.q }, vec![y.clone(), w2.clone()])?;
            cx.child(Gadget::Le, vec![w2, v2])?;
        }
        Gadget::UnifLe2Given3 => {
            let y = &a[0];
            let b = GAP_BOUNDS;
            let u = cx.local("U");
            let v1 = cx.local("V1");
            let v2 = cx.local("V2");
            let w1 = cx.local("W1");
            let w2 = cx.local("W2");
            cx.child(Gadget::Unif, vec![y.clone()])?;
            cx.child(Gadget::Unif, vec![u.clone()])?;
            cx.child(Gadget::Pow { k: b.p3 }, vec![y.clone(), v1.clone()])?;
            cx.child(Gadget::Pow { k: b.q3 }, vec![u.clone(), w1.clone()])?;
            cx.child(Gadget::Le, vec![v1, w1])?;
            cx.child(Gadget::Pow { k: b.p4 }, vec![y.clone(), v2.clone()])?;
            cx.child(Gadget::Pow { k: b.q4 }, vec![u, w2.clone()])?;
            cx.child(Gadget::Le, vec![w2, v2])?;
        }
        Gadget::Res3 => {
            let (y1, y2, y3) = (one(&a[0]), one(&a[1]), one(&a[2]));
            cx.ci(&y1, &y2, &y3);
            cx.ci(&y2, &y3, &y1);
            cx.ci(&y3, &y1, &y2);
        }
        Gadget::Eq => {
            cx.func(&one(&a[0]), &one(&a[1]));
            cx.func(&one(&a[1]), &one(&a[0]));
        }
        Gadget::Eqres => {
            let u1 = cx.local("U1");
            let u2 = cx.local("U2");
            cx.child(Gadget::Res3, vec![a[0].clone(), a[1].clone(), u1.clone()])?;
            cx.child(Gadget::Res3, vec![a[1].clone(), u1.clone(), u2.clone()])?;
            cx.child(Gadget::Res3, vec![u1, u2.clone(), a[2].clone()])?;
            cx.child(Gadget::Res3, vec![u2, a[2].clone(), a[3].clone()])?;
        }
    }
    Ok(())
}

fn sat(kind: SatKind, k: u32, e: Vec<VarId>, sw: &[VarId], s: Vec<u32>, s_bar: Vec<u32>) -> (Gadget, Vec<VarId>) {
    let g = Gadget::Sat { kind, k, e_len: e.len(), s, s_bar };
    let mut args = e;
    args.extend_from_slice(sw);
    (g, args)
}

fn otori(cx: &mut Ctx<'_>, k: u32, a: &[VarId]) -> Result<()> {
    let (x1, x2, y1, y2) = (&a[0], &a[1], &a[2], &a[3]);
    let sw = &a[4..];
    cx.child(Gadget::Ctori { k }, a.to_vec())?;
    let vertical = [vec![x1.clone(), x2.clone(), y1.clone()], vec![x1.clone(), x2.clone(), y2.clone()]];
    let horizontal = [vec![x1.clone(), y1.clone(), y2.clone()], vec![x2.clone(), y1.clone(), y2.clone()]];
    for e in vertical.iter().chain(horizontal.iter()) {
        let (g, args) = sat(SatKind::NeHalf, k, e.clone(), sw, vec![k], vec![]);
        cx.child(g, args)?;
    }
    let blocks = [(&vertical, [[1, 4], [2, 3]]), (&horizontal, [[1, 2], [3, 4]])];
    for (edges, forbidden) in blocks {
        for (j1, j2) in otori_pairs(k, forbidden) {
            let rest = complement(k, &[j1, j2]);
            for e in edges.iter() {
                let (g, args) = sat(SatKind::LeHalf, k, e.clone(), sw, vec![], rest.clone());
                cx.child(g, args)?;
            }
            for e in edges.iter() {
                let (g, args) = sat(SatKind::LeHalf, k, e.clone(), sw, rest.clone(), vec![]);
                cx.child(g, args)?;
            }
        }
    }
    Ok(())
}

/// Names of the top-level variables of `TTORI`, in OTORI argument order.
pub fn ttori_roster(k: u32) -> Vec<String> {
    let mut out: Vec<String> = ["X1", "X2", "Y1", "Y2"].iter().map(|s| s.to_string()).collect();
    out.extend((1..=k).map(|i| format!("W{i}")));
    out.extend((1..=k).map(|i| format!("V{i}")));
    out.extend((1..=k).map(|i| format!("Vbar{i}")));
    out.push("F".into());
    out
}

fn ttori(cx: &mut Ctx<'_>, k: u32, tiles: &[[u32; 4]]) -> Result<()> {
    let vars: Vec<VarId> = ttori_roster(k).iter().map(|n| cx.local(n)).collect();
    cx.child(Gadget::Otori { k }, vars.clone())?;
    let sw = &vars[4..];
    let faces = [(vec![vars[0].clone(), vars[2].clone()], face_sets_11(tiles)), (vec![vars[1].clone(), vars[3].clone()], face_sets_22(tiles))];
    for (e, allowed) in faces {
        for q in residue_quadruples(k) {
            if allowed.contains(&q) {
                continue;
            }
            let rest = complement(k, &q);
            let (g, args) = sat(SatKind::LeThreeQuarters, k, e.clone(), sw, vec![], rest.clone());
            cx.child(g, args)?;
            let (g, args) = sat(SatKind::LeThreeQuarters, k, e.clone(), sw, rest, vec![]);
            cx.child(g, args)?;
        }
    }
    Ok(())
}

/// Instantiates `g` at path `path`, returning the system and its tree.
pub fn instantiate_at(g: &Gadget, actuals: &[VarId], path: &str) -> Result<(ConstraintSystem, Instance)> {
    let mut em = Emitter::new();
    let inst = em.emit(g, actuals, path.to_string())?;
    let mut free: Vec<VarId> = Vec::new();
    for v in actuals {
        if !free.contains(v) {
            free.push(v.clone());
        }
    }
    let cs = ConstraintSystem { manifest: None, free, exists: em.exists, rows: em.rows };
    cs.validate()?;
    Ok((cs, inst))
}

/// Instantiates `g` on `actuals` with root path `r`.
pub fn instantiate_gadget(g: &Gadget, actuals: &[VarId]) -> Result<ConstraintSystem> {
    instantiate_at(g, actuals, "r").map(|(cs, _)| cs)
}
