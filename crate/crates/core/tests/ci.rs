mod common;

use aeip_core::ci::{binary_implication_instance, disjointify, to_cardinality_implication, to_ci_only, CISystem, Extras, Relation};
use aeip_core::compiler::{compile_ttori, pick_log_bounds};
use aeip_core::entropy::eval_expression;
use aeip_core::gadget::{decode_ci, instantiate_gadget, ConstraintSystem, Gadget, Row};
use aeip_core::joint::Input;
use aeip_core::witness::verify_ci;
use aeip_core::{ci_expr, AffineConstraint, Error, FactoredJoint, InfoExpr, Rational, Rel, VarId, VarSet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn v(name: &str) -> VarId {
    VarId::new(name)
}

fn one(name: &str) -> VarSet {
    VarSet::of([v(name)])
}

fn unif2(y: &str) -> ConstraintSystem {
    instantiate_gadget(&Gadget::UnifK { k: 2 }, &[v(y)]).unwrap()
}

#[test]
fn unif2_becomes_unif_eq() {
    let ci = to_ci_only(&unif2("Y")).unwrap();
    assert_eq!(ci.vars[0], v("X_1"));
    assert_eq!(ci.extras.binary_var, Some(v("X_1")));
    // X_1, Y, the two partners of UNIF(Y), and three auxiliaries of UNIF_EQ
    assert_eq!(ci.n, 7);
    assert_eq!(ci.relations.len(), 6 + 12);
    assert!(ci.audit.iter().any(|l| l.contains("UNIF_EQ")));
    ci.validate().unwrap();
}

#[test]
fn large_uniforms_use_the_power_chain() {
    let cs = instantiate_gadget(&Gadget::UnifK { k: 105 }, &[v("U")]).unwrap();
    let ci = to_ci_only(&cs).unwrap();
    let (lo, hi) = (pick_log_bounds(105), pick_log_bounds(106));
    let line = format!("({},{}) and ({},{})", lo.p, lo.q, hi.p, hi.q);
    assert!(ci.audit.iter().any(|l| l.contains(&line)), "{:?}", ci.audit);
    assert!(ci.vars.iter().any(|x| x.as_str() == "UNIF_K_CI.k105.U"));
}

#[test]
fn shared_chain_is_emitted_once_per_size() {
    let a = instantiate_gadget(&Gadget::UnifK { k: 3 }, &[v("A")]).unwrap();
    let b = instantiate_gadget(&Gadget::UnifK { k: 3 }, &[v("B")]).unwrap();
    let both = aeip_core::gadget::conjoin(&a, &b).unwrap();
    let ci_one = to_ci_only(&a).unwrap();
    let ci_two = to_ci_only(&both).unwrap();
    assert_eq!(ci_two.vars.iter().filter(|x| x.as_str().starts_with("UNIF_K_CI.k3.")).count(), 3);
    assert!(ci_two.relations.len() < 2 * ci_one.relations.len());
}

#[test]
fn non_ci_rows_are_refused() {
    let row = Row::new(AffineConstraint::new(InfoExpr::entropy(one("X")), Rel::Ge, Rational::integer(5)), "custom");
    let cs = ConstraintSystem::from_rows(vec![v("X")], vec![row]).unwrap();
    assert!(to_ci_only(&cs).is_err());
}

#[test]
fn ci_only_has_no_affine_rows() {
    let ci = to_ci_only(&unif2("Y")).unwrap();
    assert!(ci.relations.iter().all(|r| r.expr().is_zero() || decode_ci(&r.expr()).is_some()));
    let back = CISystem::from_json(&ci.to_json()).unwrap();
    assert_eq!(back, ci);
}

#[test]
fn cardinality_implication_steps() {
    let base = to_ci_only(&unif2("Y")).unwrap();
    for (r, e) in [(2u64, 1u64), (3, 1), (8, 3)] {
        let out = to_cardinality_implication(&base, r).unwrap();
        let y = out.vars[0].clone();
        assert_eq!(out.extras.card_var, Some(y.clone()));
        assert_eq!(out.extras.card_bound, Some(r));
        assert_eq!(out.extras.binary_var, None);
        assert_eq!(out.target, Some(Relation::functional(VarSet::of([y]), VarSet::empty())));
        assert!(out.audit.iter().any(|l| l.contains(&format!("POW_{e}("))), "{:?}", out.audit);
        assert!(out.audit.iter().any(|l| l.ends_with("true")));
        assert!(out.relations.len() > base.relations.len());
    }
    assert!(to_cardinality_implication(&base, 1).is_err());
}

fn fd_example() -> CISystem {
    CISystem {
        n: 2,
        vars: vec![v("X1"), v("X2")],
        relations: vec![Relation::new(one("X1"), one("X1"), one("X2"))],
        target: Some(Relation::new(one("X1"), one("X2"), VarSet::empty())),
        ..CISystem::default()
    }
}

#[test]
fn disjointify_counts_and_shapes() {
    let out = disjointify(&fd_example()).unwrap();
    assert!(out.is_disjoint());
    let named: Vec<_> = out.vars.iter().filter(|x| x.as_str().starts_with("Y_") || x.as_str().starts_with("Z_")).collect();
    assert_eq!(named.len(), 12);
    assert_eq!(out.vars.len() - named.len(), 8);
    let ys = |idx: &[usize]| VarSet::of(idx.iter().map(|i| v(&format!("Y_{i}"))));
    // I(X1;X1|X2) becomes I(Y_1;Y_3|Y_6)
    assert!(out.relations.contains(&Relation::new(ys(&[1]), ys(&[3]), ys(&[6]))));
    // the target I(X1;X2) becomes I(Y_1;Y_4)
    assert_eq!(out.target, Some(Relation::new(ys(&[1]), ys(&[4]), VarSet::empty())));
    // saturation rows for every index
    for i in 1..=6 {
        let rest: VarSet = (1..=6).filter(|&j| j != i).flat_map(|j| [v(&format!("Y_{j}")), v(&format!("Z_{j}"))]).collect();
        let (yi, zi) = (one(&format!("Y_{i}")), one(&format!("Z_{i}")));
        assert!(out.relations.contains(&Relation::new(yi.clone(), rest.clone(), zi.clone())));
        assert!(out.relations.contains(&Relation::new(zi, rest, yi)));
    }
}

#[test]
fn disjointify_rejects_degenerate_inputs() {
    let mut ci = fd_example();
    ci.target = None;
    assert!(disjointify(&ci).is_err());
    let single = CISystem {
        n: 1,
        vars: vec![v("X1")],
        relations: vec![Relation::new(one("X1"), one("X1"), VarSet::empty())],
        target: Some(Relation::new(one("X1"), one("X1"), VarSet::empty())),
        ..CISystem::default()
    };
    assert!(disjointify(&single).is_err());
}

/// Adds `Y_i = Z_i = X_{(i-1) mod n + 1}` and the auxiliaries as copies.
fn canonical_extension(j: &FactoredJoint, src: &CISystem, out: &CISystem) -> FactoredJoint {
    let n = src.n;
    let mut ext = j.clone();
    for name in &out.vars {
        let s = name.as_str();
        let idx: usize = match s.strip_prefix("Y_").or_else(|| s.strip_prefix("Z_")) {
            Some(rest) => rest.parse().unwrap(),
            None => s.split('.').nth(2).unwrap().parse().unwrap(),
        };
        let x = &src.vars[(idx - 1) % n];
        let Some(Input::Var(at)) = j.lookup(x.as_str()) else { panic!("no {x}") };
        let size = j.vars()[at].alphabet;
        ext.add_var(name.clone(), vec![Input::Var(at)], (0..size).collect()).unwrap();
    }
    ext
}

#[test]
fn canonical_extension_satisfies_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    for _ in 0..40 {
        let j = common::random_joint(&mut rng, 3);
        let vars: Vec<VarId> = (1..=3).map(|i| v(&format!("X{i}"))).collect();
        let sets = common::subsets(&vars);
        let mut relations = Vec::new();
        for a in &sets {
            for b in &sets {
                for c in sets.iter().chain([&VarSet::empty()]) {
                    if a.is_disjoint(c) && b.is_disjoint(c) && a <= b {
                        if eval_expression(&j, &ci_expr(a, b, c)).unwrap().abs() < 1e-12 {
                            relations.push(Relation::new(a.clone(), b.clone(), c.clone()));
                        }
                    }
                }
            }
        }
        if relations.is_empty() {
            continue;
        }
        let target = Relation::new(one("X1"), one("X2"), one("X3"));
        let ci = CISystem { n: 3, vars: vars.clone(), relations, target: Some(target), ..CISystem::default() };
        let out = disjointify(&ci).unwrap();
        assert!(out.is_disjoint());
        assert!(out.size() <= 36 * 9 + 3 * ci.size() + 300, "size {}", out.size());
        let ext = canonical_extension(&j, &ci, &out);
        let r = verify_ci(&ext, &out, 1e-9).unwrap();
        assert!(r.passed(), "{:?}", r.failures().next());
        checked += 1;
    }
    assert!(checked >= 10);
}

#[test]
fn output_size_is_quadratic_in_variables() {
    for n in 2..=12usize {
        let vars: Vec<VarId> = (1..=n).map(|i| v(&format!("X{i}"))).collect();
        let relations = (1..n).map(|i| Relation::new(one(&format!("X{i}")), one(&format!("X{}", i + 1)), VarSet::empty())).collect();
        let ci = CISystem { n, vars, relations, target: Some(Relation::new(one("X1"), one("X2"), VarSet::empty())), ..CISystem::default() };
        let out = disjointify(&ci).unwrap();
        // saturation rows hold 36n² elements, EQRES and copied relations are linear
        assert!(out.size() <= 36 * n * n + 3 * ci.size() + 100 * n, "n={n}: {}", out.size());
        // Y, Z copies plus two auxiliaries per EQRES over 2n indices
        assert_eq!(out.vars.len(), 6 * n + 4 * n);
    }
}

#[test]
fn binary_implication_rewrites_the_consequent() {
    let base = CISystem {
        n: 3,
        vars: vec![v("X_1"), v("A"), v("B")],
        relations: vec![Relation::new(one("A"), one("B"), one("X_1"))],
        extras: Extras { binary_var: Some(v("X_1")), ..Extras::default() },
        ..CISystem::default()
    };
    let card = to_cardinality_implication(&base, 3).unwrap();
    let out = binary_implication_instance(&card, 3).unwrap();
    assert!(out.is_disjoint());
    assert_eq!(out.target, Some(Relation::new(one("Y_1"), one("Z_1"), VarSet::empty())));
    assert_eq!(out.extras.card_var, Some(v("Y_1")));
    assert_eq!(out.extras.card_bound, Some(3));
    assert!(out.audit.iter().any(|l| l.contains("I(Y_1;Z_1) = 0")));
    assert!(matches!(binary_implication_instance(&base, 3), Err(Error::MissingDesignated)));
}

#[test]
fn monochrome_binary_implication_is_refused_as_too_large() {
    let ci = to_ci_only(&compile_ttori(&common::mono()).unwrap()).unwrap();
    assert!(ci.relations.iter().all(|r| r.vars().iter().all(|x| ci.vars.contains(x))));
    let card = to_cardinality_implication(&ci, 2).unwrap();
    assert!(matches!(binary_implication_instance(&card, 2), Err(Error::InstanceTooLarge(_))));
}
