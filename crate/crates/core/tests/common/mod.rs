#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use aeip_core::joint::{FactoredJoint, Input};
use aeip_core::tiling::TileSet;
use aeip_core::{Rational, VarId, VarSet};
use rand::Rng;

/// Random joint: up to three seeds of size 1..=4 with integer weights, and
/// `n` variables reading random seeds and possibly the previous variable.
pub fn random_joint(rng: &mut impl Rng, n: usize) -> FactoredJoint {
    let mut j = FactoredJoint::new();
    let seeds = rng.gen_range(1..=3);
    let mut handles = Vec::new();
    for s in 0..seeds {
        let size = rng.gen_range(1..=4);
        let w: Vec<i64> = (0..size).map(|_| rng.gen_range(1..=9)).collect();
        let total: i64 = w.iter().sum();
        let probs = w.iter().map(|&x| Rational::new(x, total)).collect();
        handles.push(j.add_seed(format!("s{s}"), probs).unwrap());
    }
    let mut prev: Option<Input> = None;
    for v in 0..n {
        let mut inputs: Vec<Input> = handles.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
        if inputs.is_empty() {
            inputs.push(handles[rng.gen_range(0..handles.len())]);
        }
        if let Some(p) = prev {
            if rng.gen_bool(0.4) {
                inputs.push(p);
            }
        }
        let len: usize = inputs.iter().map(|&i| j.radix(i)).product();
        let table = (0..len).map(|_| rng.gen_range(0..4)).collect();
        prev = Some(j.add_var(format!("X{}", v + 1), inputs, table).unwrap());
    }
    j
}

fn eval(j: &FactoredJoint, var: usize, seed_vals: &[usize]) -> u32 {
    let def = &j.vars()[var];
    let mut idx = 0usize;
    for inp in &def.inputs {
        let (val, radix) = match *inp {
            Input::Seed(s) => (seed_vals[s], j.seeds()[s].size()),
            Input::Var(w) => (eval(j, w, seed_vals) as usize, j.vars()[w].alphabet as usize),
        };
        idx = idx * radix + val;
    }
    def.table[idx]
}

/// Entropy of `set` by enumerating the full product of all seeds.
pub fn brute_entropy(j: &FactoredJoint, set: &VarSet) -> f64 {
    let idx: Vec<usize> = set.iter().map(|v| j.var_index(v).unwrap()).collect();
    let sizes: Vec<usize> = j.seeds().iter().map(|s| s.size()).collect();
    let mut pmf: HashMap<Vec<u32>, f64> = HashMap::new();
    let mut vals = vec![0usize; sizes.len()];
    loop {
        let p: f64 = vals.iter().enumerate().map(|(s, &v)| j.seeds()[s].probs[v].to_f64()).product();
        let key: Vec<u32> = idx.iter().map(|&v| eval(j, v, &vals)).collect();
        *pmf.entry(key).or_insert(0.0) += p;
        let mut pos = 0;
        loop {
            if pos == vals.len() {
                return pmf.values().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum();
            }
            vals[pos] += 1;
            if vals[pos] < sizes[pos] {
                break;
            }
            vals[pos] = 0;
            pos += 1;
        }
    }
}

pub fn subsets(vars: &[VarId]) -> Vec<VarSet> {
    (1u32..1 << vars.len()).map(|m| (0..vars.len()).filter(|i| m >> i & 1 == 1).map(|i| vars[i].clone()).collect()).collect()
}

/// Does an `a × b` torus tiling exist? Tries every assignment.
pub fn naive_tiles_torus(ts: &TileSet, a: usize, b: usize) -> bool {
    let t = ts.tiles.len();
    let cells = a * b;
    let mut g = vec![0usize; cells];
    let at = |g: &[usize], u: usize, v: usize| ts.tiles[g[(v % b) * a + u % a]];
    loop {
        let ok = (0..a).all(|u| (0..b).all(|v| at(&g, u, v)[1] == at(&g, u + 1, v)[3] && at(&g, u, v)[0] == at(&g, u, v + 1)[2]));
        if ok {
            return true;
        }
        let mut pos = 0;
        loop {
            if pos == cells {
                return false;
            }
            g[pos] += 1;
            if g[pos] < t {
                break;
            }
            g[pos] = 0;
            pos += 1;
        }
    }
}

pub fn naive_has_tiling(ts: &TileSet, max_period: usize) -> bool {
    (1..=max_period).any(|a| (1..=max_period).any(|b| naive_tiles_torus(ts, a, b)))
}

/// Gadget counts of the compiled system for a tile set whose tiles yield
/// `allowed11` / `allowed22` distinct residue-quadruple face sets, derived
/// from the construction by hand.
pub fn hand_manifest(k: u64, allowed11: u64, allowed22: u64) -> BTreeMap<String, usize> {
    let palette: Vec<u64> = (1..k).collect();
    let residue = |j: u64| (j - 1) % 4 + 1;
    let pairs = |forbid: [[u64; 2]; 2]| -> u64 {
        let mut n = 0;
        for (x, &j1) in palette.iter().enumerate() {
            for &j2 in &palette[x..] {
                let mut r = [residue(j1), residue(j2)];
                r.sort();
                if !forbid.contains(&r) {
                    n += 1;
                }
            }
        }
        n
    };
    let vertical = pairs([[1, 4], [2, 3]]);
    let horizontal = pairs([[1, 2], [3, 4]]);
    let per_class = (k - 1) / 4;
    let quads = per_class.pow(4);
    let sat_ne = 4;
    let sat_le_half = 4 * (vertical + horizontal);
    let sat_le_34 = 2 * (quads - allowed11) + 2 * (quads - allowed22);
    let flip = 2 * k;
    let cycs = 2;
    // one UNIF_K per CYCS, four per FLIP, one per switch bit, one per SAT
    let unif_k = cycs + 4 * flip + k + sat_ne + sat_le_half + sat_le_34;
    let unif = 2 * cycs + unif_k;
    let mut m = BTreeMap::new();
    for (key, n) in [
        ("TTORI", 1),
        ("OTORI", 1),
        ("CTORI", 1),
        ("TORI", 1),
        ("COLD", 1),
        ("COL", 1),
        ("SW", 1),
        ("CYCS", cycs),
        ("FLIP", flip),
        ("SAT_NE_HALF", sat_ne),
        ("SAT_LE_HALF", sat_le_half),
        ("SAT_LE_3_4", sat_le_34),
        ("UNIF_K", unif_k),
        ("UNIF", unif),
        ("TRIPLE", unif),
    ] {
        m.insert(key.to_string(), n as usize);
    }
    m
}

pub fn mono() -> TileSet {
    TileSet::new(1, vec![[1, 1, 1, 1]]).unwrap()
}

pub fn checkerboard() -> TileSet {
    TileSet::new(2, vec![[1, 1, 2, 2], [2, 2, 1, 1]]).unwrap()
}
