//! Entropy evaluation over factored joints.
//!
//! Marginals are computed by sweeping over only the seeds that the queried
//! variables (transitively) depend on. After each seed is folded in, every
//! variable whose inputs are all known is evaluated, and any seed or
//! intermediate value no longer needed is summed out. This keeps rows such
//! as `H(U | U1, U2)` cheap even when `U` depends on a large product of seeds.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap};
use std::hash::BuildHasherDefault;

use crate::error::{Error, Result};
use crate::expr::{InfoExpr, VarId, VarSet};
use crate::joint::{FactoredJoint, Input};
use crate::rational::Rational;

type StableMap<K, V> = HashMap<K, V, BuildHasherDefault<DefaultHasher>>;

/// Default cap on the number of variables in [`entropic_vector`].
pub const DEFAULT_VECTOR_LIMIT: usize = 16;

/// Probability arithmetic used by the marginalizer.
pub trait Prob: Clone {
    fn one() -> Self;
    fn seed_prob(joint: &FactoredJoint, seed: usize, value: usize) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn accumulate(&mut self, other: &Self);
    fn is_zero(&self) -> bool;
}

impl Prob for f64 {
    fn one() -> Self {
        1.0
    }
    fn seed_prob(joint: &FactoredJoint, seed: usize, value: usize) -> Self {
        joint.seeds()[seed].probs_f64[value]
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn accumulate(&mut self, other: &Self) {
        *self += other;
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

impl Prob for Rational {
    fn one() -> Self {
        Rational::one()
    }
    fn seed_prob(joint: &FactoredJoint, seed: usize, value: usize) -> Self {
        joint.seeds()[seed].probs[value].clone()
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn accumulate(&mut self, other: &Self) {
        *self += other;
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
}

/// A marginal pmf over `vars`, sorted by value tuple.
#[derive(Clone, Debug)]
pub struct Marginal<P> {
    pub vars: Vec<VarId>,
    pub pmf: Vec<(Vec<u32>, P)>,
    /// Number of (state, seed value) expansions performed.
    pub atoms: u64,
}

impl Marginal<f64> {
    pub fn entropy(&self) -> f64 {
        entropy_of(self.pmf.iter().map(|(_, p)| *p))
    }
}

fn entropy_of(ps: impl Iterator<Item = f64>) -> f64 {
    let h: f64 = ps.filter(|&p| p > 0.0).map(|p| -p * p.log2()).sum();
    h.max(0.0)
}

/// `H_b(p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_of([p, 1.0 - p].into_iter())
}

fn resolve(joint: &FactoredJoint, names: &[VarId]) -> Result<Vec<usize>> {
    let mut out: Vec<usize> = Vec::with_capacity(names.len());
    for n in names {
        let i = joint.var_index(n)?;
        if !out.contains(&i) {
            out.push(i);
        }
    }
    Ok(out)
}

pub fn marginal_f64(joint: &FactoredJoint, vars: &[VarId]) -> Result<Marginal<f64>> {
    marginal(joint, vars)
}

pub fn marginal_exact(joint: &FactoredJoint, vars: &[VarId]) -> Result<Marginal<Rational>> {
    marginal(joint, vars)
}

pub fn marginal<P: Prob>(joint: &FactoredJoint, vars: &[VarId]) -> Result<Marginal<P>> {
    let query = resolve(joint, vars)?;
    let (map, atoms) = sweep::<P>(joint, &query);
    let mut pmf: Vec<(Vec<u32>, P)> = map.into_iter().collect();
    pmf.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(Marginal { vars: query.iter().map(|&i| joint.vars()[i].name.clone()).collect(), pmf, atoms })
}

struct Plan<'a> {
    joint: &'a FactoredJoint,
    required: Vec<bool>,
    in_query: Vec<bool>,
    /// For each seed / var: the required vars that read it.
    seed_readers: Vec<Vec<usize>>,
    var_readers: Vec<Vec<usize>>,
}

impl<'a> Plan<'a> {
    fn new(joint: &'a FactoredJoint, query: &[usize]) -> Self {
        let nv = joint.vars().len();
        let mut required = vec![false; nv];
        let mut stack: Vec<usize> = query.to_vec();
        while let Some(v) = stack.pop() {
            if required[v] {
                continue;
            }
            required[v] = true;
            for inp in &joint.vars()[v].inputs {
                if let Input::Var(u) = *inp {
                    stack.push(u);
                }
            }
        }
        let mut in_query = vec![false; nv];
        for &q in query {
            in_query[q] = true;
        }
        let mut seed_readers = vec![Vec::new(); joint.seeds().len()];
        let mut var_readers = vec![Vec::new(); nv];
        for v in (0..nv).filter(|&v| required[v]) {
            for inp in &joint.vars()[v].inputs {
                match *inp {
                    Input::Seed(s) => seed_readers[s].push(v),
                    Input::Var(u) => var_readers[u].push(v),
                }
            }
        }
        Plan { joint, required, in_query, seed_readers, var_readers }
    }

    fn seeds_needed(&self) -> Vec<usize> {
        (0..self.seed_readers.len()).filter(|&s| !self.seed_readers[s].is_empty()).collect()
    }

    fn available(&self, inp: Input, seeds_done: &[bool], computed: &[bool]) -> bool {
        match inp {
            Input::Seed(s) => seeds_done[s],
            Input::Var(v) => computed[v],
        }
    }

    /// Required vars that become computable, in index (topological) order.
    fn newly_computable(&self, seeds_done: &[bool], computed: &mut [bool]) -> Vec<usize> {
        let mut out = Vec::new();
        for v in 0..computed.len() {
            if self.required[v] && !computed[v] && self.joint.vars()[v].inputs.iter().all(|&i| self.available(i, seeds_done, computed)) {
                computed[v] = true;
                out.push(v);
            }
        }
        out
    }

    fn is_live(&self, slot: Input, computed: &[bool]) -> bool {
        let readers = match slot {
            Input::Seed(s) => &self.seed_readers[s],
            Input::Var(v) => {
                if self.in_query[v] {
                    return true;
                }
                &self.var_readers[v]
            }
        };
        readers.iter().any(|&r| !computed[r])
    }
}

fn sweep<P: Prob>(joint: &FactoredJoint, query: &[usize]) -> (StableMap<Vec<u32>, P>, u64) {
    let plan = Plan::new(joint, query);
    let nv = joint.vars().len();
    let mut seeds_done = vec![false; joint.seeds().len()];
    let mut computed = vec![false; nv];
    let mut schema: Vec<Input> = Vec::new();
    let mut states: StableMap<Vec<u32>, P> = StableMap::default();
    states.insert(Vec::new(), P::one());
    let mut atoms = 0u64;

    let mut pending = plan.seeds_needed();
    // constants (variables with no inputs) first
    extend_computed(&plan, &seeds_done, &mut computed, &mut schema, &mut states);
    prune(&plan, &computed, &mut schema, &mut states);

    while !pending.is_empty() {
        let pick = choose_seed(&plan, &pending, &seeds_done, &computed);
        let s = pending.remove(pick);
        let size = joint.seeds()[s].size();
        let mut next: StableMap<Vec<u32>, P> = StableMap::default();
        for (key, p) in &states {
            for v in 0..size {
                let q = P::seed_prob(joint, s, v);
                if q.is_zero() {
                    continue;
                }
                atoms += 1;
                let mut k = key.clone();
                k.push(v as u32);
                let pq = p.times(&q);
                next.entry(k).and_modify(|acc| acc.accumulate(&pq)).or_insert(pq);
            }
        }
        states = next;
        schema.push(Input::Seed(s));
        seeds_done[s] = true;
        extend_computed(&plan, &seeds_done, &mut computed, &mut schema, &mut states);
        prune(&plan, &computed, &mut schema, &mut states);
    }
    // reorder to query order
    let positions: Vec<usize> = query.iter().map(|&q| schema.iter().position(|&s| s == Input::Var(q)).expect("query variable evaluated")).collect();
    let mut out: StableMap<Vec<u32>, P> = StableMap::default();
    for (key, p) in states {
        let k: Vec<u32> = positions.iter().map(|&i| key[i]).collect();
        out.entry(k).and_modify(|acc| acc.accumulate(&p)).or_insert(p);
    }
    (out, atoms)
}

fn extend_computed<P: Prob>(plan: &Plan<'_>, seeds_done: &[bool], computed: &mut [bool], schema: &mut Vec<Input>, states: &mut StableMap<Vec<u32>, P>) {
    let new_vars = plan.newly_computable(seeds_done, computed);
    if new_vars.is_empty() {
        return;
    }
    let joint = plan.joint;
    for &v in &new_vars {
        let def = &joint.vars()[v];
        let pos: Vec<usize> = def.inputs.iter().map(|i| schema.iter().position(|s| s == i).expect("input still live")).collect();
        let radices: Vec<usize> = def.inputs.iter().map(|&i| joint.radix(i)).collect();
        let old = std::mem::take(states);
        for (mut key, p) in old {
            let mut idx = 0usize;
            for (&ps, &r) in pos.iter().zip(&radices) {
                idx = idx * r + key[ps] as usize;
            }
            key.push(def.table[idx]);
            states.insert(key, p);
        }
        schema.push(Input::Var(v));
    }
}

fn prune<P: Prob>(plan: &Plan<'_>, computed: &[bool], schema: &mut Vec<Input>, states: &mut StableMap<Vec<u32>, P>) {
    let keep: Vec<usize> = (0..schema.len()).filter(|&i| plan.is_live(schema[i], computed)).collect();
    if keep.len() == schema.len() {
        return;
    }
    let old = std::mem::take(states);
    for (key, p) in old {
        let k: Vec<u32> = keep.iter().map(|&i| key[i]).collect();
        states.entry(k).and_modify(|acc| acc.accumulate(&p)).or_insert(p);
    }
    *schema = keep.iter().map(|&i| schema[i]).collect();
}

/// Greedy seed order: the seed whose inclusion leaves the smallest live
/// state space (product of live slot radices).
fn choose_seed(plan: &Plan<'_>, pending: &[usize], seeds_done: &[bool], computed: &[bool]) -> usize {
    let joint = plan.joint;
    let mut best = (f64::INFINITY, usize::MAX, 0usize);
    for (idx, &s) in pending.iter().enumerate() {
        let mut sd = seeds_done.to_vec();
        sd[s] = true;
        let mut comp = computed.to_vec();
        plan.newly_computable(&sd, &mut comp);
        let mut width = 0.0f64;
        for (t, &done) in sd.iter().enumerate() {
            if done && plan.is_live(Input::Seed(t), &comp) {
                width += (joint.seeds()[t].size() as f64).log2();
            }
        }
        for (v, &c) in comp.iter().enumerate() {
            if c && plan.is_live(Input::Var(v), &comp) {
                width += (joint.vars()[v].alphabet.max(1) as f64).log2();
            }
        }
        let size = joint.seeds()[s].size();
        let cand = (width, size, idx);
        if cand.0 < best.0 - 1e-12 || ((cand.0 - best.0).abs() <= 1e-12 && size < best.1) {
            best = cand;
        }
    }
    best.2
}

fn set_names(set: &VarSet) -> Vec<VarId> {
    set.iter().cloned().collect()
}

/// Joint entropy of `vars` in bits; `H(∅) = 0`.
pub fn subset_entropy(joint: &FactoredJoint, vars: &VarSet) -> Result<f64> {
    subset_entropy_with_stats(joint, vars).map(|(h, _)| h)
}

pub fn subset_entropy_with_stats(joint: &FactoredJoint, vars: &VarSet) -> Result<(f64, u64)> {
    if vars.is_empty() {
        return Ok((0.0, 0));
    }
    let m = marginal_f64(joint, &set_names(vars))?;
    Ok((m.entropy(), m.atoms))
}

/// `Σ coef · H(S)` over the terms of `expr`.
pub fn eval_expression(joint: &FactoredJoint, expr: &InfoExpr) -> Result<f64> {
    eval_expression_with_stats(joint, expr).map(|(v, _)| v)
}

/// Value plus the largest atom count of any single term.
pub fn eval_expression_with_stats(joint: &FactoredJoint, expr: &InfoExpr) -> Result<(f64, u64)> {
    let mut total = 0.0;
    let mut worst = 0u64;
    for (set, coef) in expr.terms() {
        let (h, atoms) = subset_entropy_with_stats(joint, set)?;
        total += coef.to_f64() * h;
        worst = worst.max(atoms);
    }
    Ok((total, worst))
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyVector {
    pub vars: Vec<VarId>,
    pub entries: BTreeMap<VarSet, f64>,
}

impl EntropyVector {
    pub fn n(&self) -> usize {
        self.vars.len()
    }

    pub fn get(&self, set: &VarSet) -> f64 {
        if set.is_empty() {
            0.0
        } else {
            self.entries[set]
        }
    }
}

/// All `2^n − 1` nonempty-subset entropies of `vars`.
pub fn entropic_vector(joint: &FactoredJoint, vars: &[VarId], limit: usize) -> Result<EntropyVector> {
    if vars.len() > limit {
        return Err(Error::LimitExceeded { got: vars.len(), limit });
    }
    let mut entries = BTreeMap::new();
    for mask in 1u64..(1u64 << vars.len()) {
        let set: VarSet = (0..vars.len()).filter(|i| mask >> i & 1 == 1).map(|i| vars[i].clone()).collect();
        let h = subset_entropy(joint, &set)?;
        entries.insert(set, h);
    }
    Ok(EntropyVector { vars: vars.to_vec(), entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::ci_expr;

    fn s(names: &[&str]) -> VarSet {
        VarSet::of(names.iter().copied())
    }

    fn two_bits() -> FactoredJoint {
        let mut j = FactoredJoint::new();
        let a = j.add_uniform_seed("a", 2).unwrap();
        let b = j.add_uniform_seed("b", 2).unwrap();
        j.add_var("X", vec![a], vec![0, 1]).unwrap();
        j.add_var("Y", vec![b], vec![0, 1]).unwrap();
        j
    }

    /// (F, G1, G2) uniform over {(0,0,0),(0,1,0),(1,0,0),(1,0,1)}.
    fn flip_pmf() -> FactoredJoint {
        let mut j = FactoredJoint::new();
        let a = j.add_uniform_seed("atom", 4).unwrap();
        j.add_var("F", vec![a], vec![0, 0, 1, 1]).unwrap();
        j.add_var("G1", vec![a], vec![0, 1, 0, 0]).unwrap();
        j.add_var("G2", vec![a], vec![0, 0, 0, 1]).unwrap();
        j
    }

    #[test]
    fn independent_bits_have_two_bits() {
        let j = two_bits();
        assert_eq!(subset_entropy(&j, &s(&["X", "Y"])).unwrap(), 2.0);
        let mi = ci_expr(&s(&["X"]), &s(&["Y"]), &VarSet::empty());
        assert!(eval_expression(&j, &mi).unwrap().abs() < 1e-12);
        assert_eq!(eval_expression(&j, &InfoExpr::entropy(s(&["X"]))).unwrap(), 1.0);
    }

    #[test]
    fn flip_table_entropy_and_independence() {
        let j = flip_pmf();
        assert!((subset_entropy(&j, &s(&["F", "G1", "G2"])).unwrap() - 2.0).abs() < 1e-15);
        let e = ci_expr(&s(&["G1"]), &s(&["G2"]), &s(&["F"]));
        assert!(eval_expression(&j, &e).unwrap().abs() < 1e-12);
    }

    #[test]
    fn bernoulli_quarter() {
        let mut j = FactoredJoint::new();
        let a = j.add_seed("a", vec![Rational::new(1, 4), Rational::new(3, 4)]).unwrap();
        j.add_var("X", vec![a], vec![1, 0]).unwrap();
        let expected = -0.25 * 0.25f64.log2() - 0.75 * 0.75f64.log2();
        let h = subset_entropy(&j, &s(&["X"])).unwrap();
        assert!((h - expected).abs() < 1e-15);
        assert!((h - 0.811_278_124_459_132_8).abs() < 1e-12);
        assert!((binary_entropy(0.25) - h).abs() < 1e-15);
    }

    #[test]
    fn entropic_vector_shapes() {
        let v = entropic_vector(&two_bits(), &["X".into(), "Y".into()], DEFAULT_VECTOR_LIMIT).unwrap();
        assert_eq!(v.entries.len(), 3);
        assert_eq!(v.get(&s(&["X"])), 1.0);
        assert_eq!(v.get(&s(&["X", "Y"])), 2.0);

        let mut j = FactoredJoint::new();
        let a = j.add_seed("a", vec![Rational::new(1, 3), Rational::new(2, 3)]).unwrap();
        j.add_var("X", vec![a], vec![0, 1]).unwrap();
        j.add_var("Y", vec![a], vec![0, 1]).unwrap();
        let v = entropic_vector(&j, &["X".into(), "Y".into()], 16).unwrap();
        let hx = v.get(&s(&["X"]));
        assert_eq!(v.get(&s(&["Y"])), hx);
        assert_eq!(v.get(&s(&["X", "Y"])), hx);
    }

    #[test]
    fn mod3_sum_vector() {
        let mut j = FactoredJoint::new();
        let a = j.add_uniform_seed("a", 3).unwrap();
        let b = j.add_uniform_seed("b", 3).unwrap();
        j.add_var("Y1", vec![a], vec![0, 1, 2]).unwrap();
        j.add_var("Y2", vec![b], vec![0, 1, 2]).unwrap();
        j.add_var_fn("Y3", vec![a, b], |v| (v[0] + v[1]) % 3).unwrap();
        let names: Vec<VarId> = ["Y1", "Y2", "Y3"].iter().map(|&n| n.into()).collect();
        let v = entropic_vector(&j, &names, 16).unwrap();
        let l3 = 3f64.log2();
        for (set, h) in &v.entries {
            let want = if set.len() == 1 { l3 } else { 2.0 * l3 };
            assert!((h - want).abs() < 1e-12, "{set:?}: {h}");
        }
    }

    #[test]
    fn vector_limit_enforced() {
        let names: Vec<VarId> = (0..17).map(|i| VarId::new(format!("v{i}"))).collect();
        let err = entropic_vector(&FactoredJoint::new(), &names, 16).unwrap_err();
        assert_eq!(err, Error::LimitExceeded { got: 17, limit: 16 });
    }

    #[test]
    fn unknown_variable_is_an_error() {
        let err = subset_entropy(&two_bits(), &s(&["Q"])).unwrap_err();
        assert_eq!(err, Error::UnknownVariable("Q".into()));
    }

    #[test]
    fn derived_chain_sums_out_intermediate_seeds() {
        // U over a 3-seed product, V = U + r: the sweep should not multiply
        // all four seeds together.
        let mut j = FactoredJoint::new();
        let a = j.add_uniform_seed("a", 8).unwrap();
        let b = j.add_uniform_seed("b", 8).unwrap();
        let c = j.add_uniform_seed("c", 8).unwrap();
        let r = j.add_uniform_seed("r", 8).unwrap();
        let u = j.add_var_fn("U", vec![a, b, c], |v| (v[0] + v[1] + v[2]) % 8).unwrap();
        j.add_var("R", vec![r], (0..8).collect()).unwrap();
        j.add_var_fn("V", vec![u, r], |v| (v[0] + v[1]) % 8).unwrap();
        let m = marginal_f64(&j, &["U".into(), "R".into(), "V".into()]).unwrap();
        assert!((m.entropy() - 6.0).abs() < 1e-12);
        assert!(m.atoms < 8 * 8 * 8 * 8, "atoms {}", m.atoms);
    }

    #[test]
    fn exact_marginal_is_rational() {
        let j = flip_pmf();
        let m = marginal_exact(&j, &["F".into()]).unwrap();
        assert_eq!(m.pmf, vec![(vec![0], Rational::new(1, 2)), (vec![1], Rational::new(1, 2))]);
    }
}
