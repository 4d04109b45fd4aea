use aeip_core::compiler::pick_alpha;
use aeip_core::gadget::{conjoin, exists_extend, instantiate_at, instantiate_gadget, lint, ConstraintSystem, Gadget, Row, RowShape, SatKind};
use aeip_core::{AffineConstraint, Error, InfoExpr, Rational, Rel, VarId, VarSet};

fn names(prefix: &str, n: usize) -> Vec<VarId> {
    (1..=n).map(|i| VarId::new(format!("{prefix}{i}"))).collect()
}

fn set(vs: &[&VarId]) -> VarSet {
    VarSet::of(vs.iter().map(|v| (*v).clone()))
}

/// Every catalog entry with small parameters.
fn catalog() -> Vec<Gadget> {
    vec![
        Gadget::Triple,
        Gadget::Unif,
        Gadget::UnifK { k: 2 },
        Gadget::Cycs,
        Gadget::Tori,
        Gadget::Flip,
        Gadget::Sw { k: 5 },
        Gadget::Col { k: 5 },
        Gadget::Cold { k: 5, x_len: 2 },
        Gadget::Sat { kind: SatKind::NeHalf, k: 5, e_len: 1, s: vec![5], s_bar: vec![] },
        Gadget::Sat { kind: SatKind::LeHalf, k: 5, e_len: 2, s: vec![], s_bar: vec![3, 4, 5] },
        Gadget::Sat { kind: SatKind::LeThreeQuarters, k: 5, e_len: 2, s: vec![], s_bar: vec![5] },
        Gadget::Ctori { k: 5 },
        Gadget::Otori { k: 9 },
        Gadget::UnifEq,
        Gadget::Prod { l: 2 },
        Gadget::Pow { k: 3 },
        Gadget::Gesqrt,
        Gadget::Le,
        Gadget::UnifKCi { k: 3 },
        Gadget::UnifLe2Given3,
        Gadget::Res3,
        Gadget::Eq,
        Gadget::Eqres,
    ]
}

#[test]
fn arity_table_matches_signatures() {
    let golden = [
        ("TRIPLE", 3, "TRIPLE(Y1,Y2,Y3)"),
        ("UNIF", 1, "UNIF(X)"),
        ("UNIF_K", 1, "UNIF_2(X)"),
        ("CYCS", 2, "CYCS(X1,X2)"),
        ("TORI", 4, "TORI(X1,X2,Y1,Y2)"),
        ("FLIP", 3, "FLIP(F,G1,G2)"),
        ("SW", 16, "SW(W^k,V^k,Vbar^k,F)"),
        ("COL", 16, "COL(W^k,V^k,Vbar^k,F)"),
        ("COLD", 18, "COLD(X^2,W^k,V^k,Vbar^k,F)"),
        ("SAT_NE_HALF", 17, "SAT_NE_HALF[S=[5],Sbar=[]](E^1,W^k,V^k,Vbar^k,F)"),
        ("SAT_LE_HALF", 18, "SAT_LE_HALF[S=[],Sbar=[3, 4, 5]](E^2,W^k,V^k,Vbar^k,F)"),
        ("SAT_LE_3_4", 18, "SAT_LE_3_4[S=[],Sbar=[5]](E^2,W^k,V^k,Vbar^k,F)"),
        ("CTORI", 20, "CTORI(X1,X2,Y1,Y2,W^k,V^k,Vbar^k,F)"),
        ("OTORI", 32, "OTORI(X1,X2,Y1,Y2,W^k,V^k,Vbar^k,F)"),
        ("UNIF_EQ", 2, "UNIF_EQ(Y;Z)"),
        ("PROD", 3, "PROD(Y^2;G)"),
        ("POW", 2, "POW_3(Y;G)"),
        ("GESQRT", 2, "GESQRT(Y;G)"),
        ("LE", 2, "LE(Y;Z)"),
        ("UNIF_K_CI", 2, "UNIF_K_CI_3(Y;X_1)"),
        ("UNIF_LE2_GIVEN_LE3", 1, "UNIF_LE2_GIVEN_LE3(Y)"),
        ("RES3", 3, "RES3(Y1,Y2,Y3)"),
        ("EQ", 2, "EQ(F,G)"),
        ("EQRES", 4, "EQRES(Y1,Z1,Y2,Z2)"),
    ];
    let got: Vec<(&str, usize, String)> = catalog().iter().map(|g| (g.key(), g.arity(), g.signature())).collect();
    assert_eq!(got.len(), golden.len());
    for ((k, a, s), (gk, ga, gs)) in got.iter().zip(golden) {
        assert_eq!((*k, *a, s.as_str()), (gk, ga, gs));
    }
    let ttori = Gadget::Ttori { k: 9, tiles: vec![[1, 1, 1, 1]] };
    assert_eq!(ttori.arity(), 0);
}

#[test]
fn triple_is_six_ci_rows() {
    let v = names("A", 3);
    let cs = instantiate_gadget(&Gadget::Triple, &v).unwrap();
    assert_eq!(cs.rows.len(), 6);
    assert!(cs.exists.is_empty());
    assert!(cs.rows.iter().all(|r| r.rel == Rel::Eq && r.rhs.is_zero()));
    // I(Y_i;Y_j) = 0 and H(Y_k | Y_i, Y_j) = 0 for each choice of the odd one out
    let (a, b, c) = (&v[0], &v[1], &v[2]);
    for (x, y, z) in [(a, b, c), (a, c, b), (b, c, a)] {
        let indep = AffineConstraint::ci(&set(&[x]), &set(&[y]), &VarSet::empty()).lhs;
        let func = AffineConstraint::ci(&set(&[z]), &set(&[z]), &set(&[x, y])).lhs;
        assert!(cs.rows.iter().any(|r| r.lhs == indep), "missing I({x};{y})");
        assert!(cs.rows.iter().any(|r| r.lhs == func), "missing H({z}|{x},{y})");
    }
}

#[test]
fn unif_k_bounds_use_alpha() {
    let x = names("X", 1);
    let cs = instantiate_gadget(&Gadget::UnifK { k: 2 }, &x).unwrap();
    assert_eq!(cs.rows.len(), 8);
    assert_eq!(cs.exists.len(), 2);
    let hx = InfoExpr::entropy(set(&[&x[0]]));
    let lo = cs.rows.iter().find(|r| r.lhs == hx && r.rel == Rel::Ge).unwrap();
    let hi = cs.rows.iter().find(|r| r.lhs == hx && r.rel == Rel::Le).unwrap();
    assert_eq!(lo.rhs, Rational::new(1, 2));
    assert_eq!(hi.rhs, Rational::new(3, 2));
    assert_eq!((lo.rhs.clone(), hi.rhs.clone()), (pick_alpha(2), pick_alpha(3)));
}

#[test]
fn sat_le_half_has_one_uniform_auxiliary() {
    let k = 9;
    let args = names("a", 1 + 3 * k as usize + 1);
    let g = Gadget::Sat { kind: SatKind::LeHalf, k, e_len: 1, s: vec![], s_bar: (3..=k).collect() };
    let (cs, inst) = instantiate_at(&g, &args, "r").unwrap();
    // U, plus the two partners of its UNIF_3
    assert_eq!(cs.exists.len(), 3);
    assert_eq!(cs.rows.len(), 2 + 8);
    assert_eq!(inst.local("U").as_str(), "SAT_LE_HALF.r.U");
    assert_eq!(inst.census().get("UNIF_K"), Some(&1));
}

#[test]
fn col_excludes_all_non_colors() {
    let k = 5u32;
    let args = names("a", 3 * k as usize + 1);
    let sw = instantiate_gadget(&Gadget::Sw { k }, &args).unwrap();
    let col = instantiate_gadget(&Gadget::Col { k }, &args).unwrap();
    assert_eq!(col.rows.len() - sw.rows.len(), (1 << k) - 2 * (k as usize - 1));
}

#[test]
fn every_gadget_is_lint_clean() {
    for g in catalog() {
        let cs = instantiate_gadget(&g, &names("a", g.arity())).unwrap();
        let shapes = lint(&cs).unwrap_or_else(|e| panic!("{}: {e}", g.key()));
        assert_eq!(shapes.len(), cs.rows.len());
    }
}

#[test]
fn lint_rejects_other_rows() {
    let x = names("X", 2);
    let row = Row::new(AffineConstraint::new(InfoExpr::entropy(set(&[&x[0], &x[1]])), Rel::Ge, Rational::integer(3)), "odd");
    let cs = ConstraintSystem::from_rows(x.clone(), vec![row]).unwrap();
    assert!(lint(&cs).is_err());
    let bound = Row::new(AffineConstraint::new(InfoExpr::entropy(set(&[&x[0]])), Rel::Ge, pick_alpha(4)), "b");
    let cs = ConstraintSystem::from_rows(x, vec![bound]).unwrap();
    assert!(matches!(lint(&cs).unwrap()[0], RowShape::UnifBound { k: 4, upper: false, .. }));
}

#[test]
fn instantiation_is_deterministic() {
    for g in catalog() {
        let args = names("a", g.arity());
        let one = instantiate_gadget(&g, &args).unwrap().to_json();
        let two = instantiate_gadget(&g, &args).unwrap().to_json();
        assert_eq!(one, two, "{}", g.key());
        let back = ConstraintSystem::from_json(&one).unwrap();
        assert_eq!(back.to_json(), one);
    }
}

#[test]
fn bad_arguments_are_refused() {
    assert!(matches!(instantiate_gadget(&Gadget::Triple, &names("a", 2)), Err(Error::Arity { .. })));
    let overlap = Gadget::Sat { kind: SatKind::NeHalf, k: 5, e_len: 1, s: vec![2], s_bar: vec![2] };
    assert!(instantiate_gadget(&overlap, &names("a", overlap.arity())).is_err());
    let huge = Gadget::Col { k: 14 };
    assert!(instantiate_gadget(&huge, &names("a", huge.arity())).is_err());
}

#[test]
fn conjoin_concatenates() {
    let v = names("A", 3);
    let t = instantiate_gadget(&Gadget::Triple, &v).unwrap();
    let tt = conjoin(&t, &t).unwrap();
    assert_eq!(tt.rows.len(), 12);
    assert!(tt.exists.is_empty());
    assert_eq!(tt.free, t.free);

    let same = conjoin(&ConstraintSystem::empty(), &t).unwrap();
    assert_eq!(same.rows, t.rows);

    let x = names("X", 1);
    let unif = instantiate_gadget(&Gadget::Unif, &x).unwrap();
    let cap = Row::new(AffineConstraint::new(InfoExpr::entropy(set(&[&x[0]])), Rel::Le, Rational::one()), "cap");
    let one_row = ConstraintSystem::from_rows(x.clone(), vec![cap]).unwrap();
    let both = conjoin(&unif, &one_row).unwrap();
    assert_eq!(both.exists.len(), 2);
    assert_eq!(both.rows.len(), unif.rows.len() + 1);
}

#[test]
fn conjoin_freshens_existentials() {
    let x = names("X", 1);
    let unif = instantiate_gadget(&Gadget::Unif, &x).unwrap();
    let twice = conjoin(&unif, &unif).unwrap();
    assert_eq!(twice.exists.len(), 4);
    let distinct: std::collections::BTreeSet<_> = twice.exists.iter().collect();
    assert_eq!(distinct.len(), 4);
    twice.validate().unwrap();
}

#[test]
fn unif_is_triple_with_two_bound_partners() {
    let v = vec![VarId::new("X"), VarId::new("U1"), VarId::new("U2")];
    let t = instantiate_gadget(&Gadget::Triple, &v).unwrap();
    let u = exists_extend(&t, &v[1..], vec![]).unwrap();
    assert_eq!(u.exists.len(), 2);
    assert_eq!(u.rows.len(), 6);
    assert_eq!(u.free, vec![VarId::new("X")]);

    let w = VarId::new("W");
    let constant = Row::new(AffineConstraint::new(InfoExpr::entropy(set(&[&w])), Rel::Eq, Rational::zero()), "w");
    let ext = exists_extend(&u, &[w], vec![constant]).unwrap();
    assert_eq!(ext.rows.len(), 7);
    assert!(matches!(exists_extend(&u, &[VarId::new("U1")], vec![]), Err(Error::NameCollision(_))));
}
