//! Realizes the existential variables of a gadget tree on top of a joint
//! that already defines the tree's actual arguments.

use std::collections::{BTreeMap, HashMap};

use num_integer::Integer;
use num_traits::One;

use crate::compiler::ttori::{compile_ttori_tree, Compiled};
use crate::entropy::marginal_exact;
use crate::error::{Error, Result};
use crate::expr::VarId;
use crate::gadget::catalog::{Gadget, Instance};
use crate::joint::{FactoredJoint, Input};
use crate::rational::Rational;
use crate::tiling::{PeriodicTiling, TileSet};

use super::torus::{half_side, tiling_to_colored_tori, ColoredTorus};

/// Largest lookup table the builder will materialize.
pub const MAX_TABLE: usize = 50_000_000;

struct Geometry<'a> {
    ts: &'a TileSet,
    tiling: &'a PeriodicTiling,
}

#[derive(Default)]
struct UniformCache {
    /// Support size and rank of each value, per variable.
    ranks: HashMap<VarId, (u32, Vec<u32>)>,
}

pub struct Builder<'a> {
    pub joint: FactoredJoint,
    geometry: Option<Geometry<'a>>,
    uniform: UniformCache,
}

fn refuse<T>(msg: String) -> Result<T> {
    Err(Error::WitnessRefused(msg))
}

fn var(j: &FactoredJoint, v: &VarId) -> Result<Input> {
    Ok(Input::Var(j.var_index(v)?))
}

impl<'a> Builder<'a> {
    pub fn new(joint: FactoredJoint) -> Self {
        Builder { joint, geometry: None, uniform: UniformCache::default() }
    }

    /// A builder whose `TTORI` nodes are realized from `tiling`.
    pub fn with_tiling(ts: &'a TileSet, tiling: &'a PeriodicTiling) -> Self {
        Builder { joint: FactoredJoint::new(), geometry: Some(Geometry { ts, tiling }), uniform: UniformCache::default() }
    }

    /// Defines the locals of `node` and of all its descendants.
    pub fn fill(&mut self, node: &Instance) -> Result<()> {
        match &node.gadget {
            Gadget::Ttori { k, .. } => self.ttori(node, *k)?,
            Gadget::Unif => self.unif(node)?,
            Gadget::Cycs => self.cycs(node)?,
            Gadget::Flip => self.flip(node)?,
            Gadget::Sw { k } => self.sw(node, *k)?,
            Gadget::Sat { kind, k, e_len, s, s_bar } => self.sat(node, kind.uniform_size() as u32, *k, *e_len, s, s_bar)?,
            Gadget::Triple | Gadget::UnifK { .. } | Gadget::Tori | Gadget::Col { .. } | Gadget::Cold { .. } | Gadget::Ctori { .. } | Gadget::Otori { .. } => {}
            g => return refuse(format!("no witness rule for {}", g.key())),
        }
        for c in &node.children {
            self.fill(c)?;
        }
        Ok(())
    }

    fn ttori(&mut self, node: &Instance, k: u32) -> Result<()> {
        let Some(geo) = &self.geometry else {
            return refuse("TTORI needs a tiling".into());
        };
        let tori = tiling_to_colored_tori(geo.ts, geo.tiling, k)?;
        let l = half_side(geo.tiling) as u32;
        let j = &mut self.joint;
        let seed = |n: &str| format!("{}.seed.{n}", node.path);
        let sign = j.add_uniform_seed(seed("sign"), 2)?;
        let si = j.add_uniform_seed(seed("i"), 2 * l as usize)?;
        let sj = j.add_uniform_seed(seed("j"), 2 * l as usize)?;
        let sf = j.add_uniform_seed(seed("F"), 2)?;
        j.add_var_fn(node.local("X1").clone(), vec![sign, si], |v| v[0] * l + v[1] / 2)?;
        j.add_var_fn(node.local("X2").clone(), vec![sign, si], |v| v[0] * l + (v[1] + 1) / 2 % l)?;
        j.add_var_fn(node.local("Y1").clone(), vec![sj], |v| v[0] / 2)?;
        j.add_var_fn(node.local("Y2").clone(), vec![sj], |v| (v[0] + 1) / 2 % l)?;
        let f = j.add_var(node.local("F").clone(), vec![sf], vec![0, 1])?;
        let color = |t: &[ColoredTorus; 2], v: &[u32]| t[v[0] as usize].color(v[1] as usize, v[2] as usize);
        let mut ws = Vec::new();
        for t in 1..=k as i32 {
            let w = j.add_var_fn(node.local(&format!("W{t}")).clone(), vec![sign, si, sj], |v| {
                let c = color(&tori, v);
                u32::from(if c > 0 { c == t } else { -c != t })
            })?;
            ws.push(w);
        }
        for (t, &w) in ws.iter().enumerate() {
            j.add_var_fn(node.local(&format!("V{}", t + 1)).clone(), vec![w, f], |v| (1 - v[0]) * v[1])?;
        }
        for (t, &w) in ws.iter().enumerate() {
            j.add_var_fn(node.local(&format!("Vbar{}", t + 1)).clone(), vec![w, f], |v| v[0] * v[1])?;
        }
        Ok(())
    }

    /// Support size and value ranks of an exactly uniform variable.
    fn uniform_ranks(&mut self, x: &VarId) -> Result<(u32, Vec<u32>)> {
        if let Some(r) = self.uniform.ranks.get(x) {
            return Ok(r.clone());
        }
        let m = marginal_exact(&self.joint, std::slice::from_ref(x))?;
        let size = m.pmf.len();
        let p = Rational::new(1, size as i64);
        if let Some((v, q)) = m.pmf.iter().find(|(_, q)| *q != p) {
            return refuse(format!("`{x}` is not uniform: P({x} = {}) = {q}", v[0]));
        }
        let alphabet = self.joint.vars()[self.joint.var_index(x)?].alphabet;
        let mut rank = vec![0u32; alphabet as usize];
        for (r, (v, _)) in m.pmf.iter().enumerate() {
            rank[v[0] as usize] = r as u32;
        }
        let out = (size as u32, rank);
        self.uniform.ranks.insert(x.clone(), out.clone());
        Ok(out)
    }

    fn unif(&mut self, node: &Instance) -> Result<()> {
        let x = &node.actuals[0];
        let (size, rank) = self.uniform_ranks(x)?;
        let (u1, u2) = (node.local("U1"), node.local("U2"));
        let j = &mut self.joint;
        let xi = var(j, x)?;
        let s = j.add_uniform_seed(format!("{u1}.seed"), size as usize)?;
        j.add_var(u1.clone(), vec![s], (0..size).collect())?;
        j.add_var_fn(u2.clone(), vec![xi, s], |v| (rank[v[0] as usize] + v[1]) % size)?;
        Ok(())
    }

    /// Two-colors the edges of the support graph of `(X1, X2)`.
    fn cycs(&mut self, node: &Instance) -> Result<()> {
        let (x1, x2) = (&node.actuals[0], &node.actuals[1]);
        let m = marginal_exact(&self.joint, &node.actuals[..2])?;
        let p0 = m.pmf[0].1.clone();
        if m.pmf.iter().any(|(_, p)| *p != p0) {
            return refuse(format!("support of ({x1}, {x2}) is not equiprobable"));
        }
        let edges: Vec<(u32, u32)> = m.pmf.iter().map(|(v, _)| (v[0], v[1])).collect();
        let mut at: HashMap<(u8, u32), Vec<usize>> = HashMap::new();
        for (e, &(a, b)) in edges.iter().enumerate() {
            at.entry((0, a)).or_default().push(e);
            at.entry((1, b)).or_default().push(e);
        }
        if let Some(((side, v), es)) = at.iter().find(|(_, es)| es.len() != 2) {
            let name = if *side == 0 { x1 } else { x2 };
            return refuse(format!("{name} = {v} has degree {} in the support graph", es.len()));
        }
        let mut color: Vec<Option<u32>> = vec![None; edges.len()];
        for start in 0..edges.len() {
            if color[start].is_some() {
                continue;
            }
            let (mut e, mut side, mut c) = (start, 1u8, 0u32);
            while color[e].is_none() {
                color[e] = Some(c);
                let end = if side == 0 { (0, edges[e].0) } else { (1, edges[e].1) };
                let pair = &at[&end];
                e = if pair[0] == e { pair[1] } else { pair[0] };
                side ^= 1;
                c ^= 1;
            }
        }
        let table: HashMap<(u32, u32), u32> = edges.iter().zip(&color).map(|(&ab, c)| (ab, c.expect("all edges colored"))).collect();
        let j = &mut self.joint;
        let inputs = vec![var(j, x1)?, var(j, x2)?];
        j.add_var_fn(node.local("U").clone(), inputs, |v| table.get(&(v[0], v[1])).copied().unwrap_or(0))?;
        Ok(())
    }

    fn flip(&mut self, node: &Instance) -> Result<()> {
        let m = marginal_exact(&self.joint, &node.actuals)?;
        let quarter = Rational::new(1, 4);
        if m.pmf.len() != 4 || m.pmf.iter().any(|(_, p)| *p != quarter) {
            return refuse(format!("FLIP at {} needs four equiprobable atoms, found {}", node.path, m.pmf.len()));
        }
        let atoms: Vec<Vec<u32>> = m.pmf.iter().map(|(v, _)| v.clone()).collect();
        let j = &mut self.joint;
        let inputs = node.actuals.iter().map(|v| var(j, v)).collect::<Result<Vec<_>>>()?;
        let u = j.add_var_fn(node.local("U").clone(), inputs, |v| atoms.iter().position(|a| a.as_slice() == v).unwrap_or(0) as u32)?;
        for (pos, z) in [(1usize, "Z1"), (2, "Z2")] {
            let mut groups: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
            for (idx, a) in atoms.iter().enumerate() {
                groups.entry(a[pos]).or_default().push(idx as u32);
            }
            let mut sizes: Vec<usize> = groups.values().map(Vec::len).collect();
            sizes.sort_unstable();
            if sizes != [1, 3] {
                return refuse(format!("FLIP at {}: {} splits the atoms as {sizes:?}, need [1, 3]", node.path, node.actuals[pos]));
            }
            let name = node.local(z).clone();
            let g = var(j, &node.actuals[pos])?;
            let s = j.add_uniform_seed(format!("{name}.seed"), 3)?;
            j.add_var_fn(name, vec![g, u, s], |v| match groups.get(&v[0]) {
                Some(grp) if grp.len() == 3 => grp.iter().position(|&a| a == v[1]).unwrap_or(0) as u32,
                _ => v[2],
            })?;
        }
        Ok(())
    }

    fn sw(&mut self, node: &Instance, k: u32) -> Result<()> {
        let f = &node.actuals[3 * k as usize];
        let j = &mut self.joint;
        let fi = var(j, f)?;
        if j.radix(fi) > 2 {
            return refuse(format!("`{f}` is not a bit"));
        }
        let g = node.local("G").clone();
        let s = j.add_uniform_seed(format!("{g}.seed"), 2)?;
        j.add_var_fn(g, vec![fi, s], |v| (1 - v[0]) * v[1])?;
        Ok(())
    }

    /// `U` is uniform on `m` values, independent of the conditioning tuple
    /// `z`, and partitioned into blocks of size `m·P(F = f | z)`.
    fn sat(&mut self, node: &Instance, m: u32, k: u32, e_len: usize, s: &[u32], s_bar: &[u32]) -> Result<()> {
        let a = &node.actuals;
        let k = k as usize;
        let mut z: Vec<VarId> = a[..e_len].to_vec();
        z.extend(s.iter().map(|&i| a[e_len + k + i as usize - 1].clone()));
        z.extend(s_bar.iter().map(|&i| a[e_len + 2 * k + i as usize - 1].clone()));
        let f = a[e_len + 3 * k].clone();
        let mut query = z.clone();
        query.push(f);
        let marg = marginal_exact(&self.joint, &query)?;
        if marg.vars.len() != query.len() {
            return refuse(format!("SAT at {} has repeated arguments", node.path));
        }
        let nz = z.len();

        let mut law: BTreeMap<Vec<u32>, Vec<(u32, Rational)>> = BTreeMap::new();
        for (v, p) in &marg.pmf {
            law.entry(v[..nz].to_vec()).or_default().push((v[nz], p.clone()));
        }
        // value tuple -> per-F-value (start, size)
        let mut blocks: HashMap<Vec<u32>, Vec<(u32, u32, u32)>> = HashMap::new();
        let mut lcm = 1u32;
        let m_r = Rational::integer(m as i64);
        for (zv, fs) in &law {
            let total: Rational = fs.iter().map(|(_, p)| p.clone()).sum();
            let mut start = 0u32;
            let mut row = Vec::new();
            for (fv, p) in fs {
                let share = &(&m_r * p) / &total;
                if !share.denom().is_one() {
                    return refuse(format!("SAT at {}: P({} = {fv} | z = {zv:?}) = {} is not a multiple of 1/{m}", node.path, query[nz], p / &total));
                }
                let size = share.to_f64().round() as u32;
                row.push((*fv, start, size));
                start += size;
                lcm = lcm.lcm(&size);
            }
            blocks.insert(zv.clone(), row);
        }

        let j = &mut self.joint;
        let var_ids = query.iter().map(|v| j.var_index(v)).collect::<Result<Vec<_>>>()?;
        let by_vars: usize = var_ids.iter().map(|&v| j.radix(Input::Var(v))).product();
        let mut roots: Vec<usize> = var_ids.iter().flat_map(|&v| j.root_seeds(v)).collect();
        roots.sort_unstable();
        roots.dedup();
        let by_seeds: usize = roots.iter().map(|&s| j.seeds()[s].size()).product();
        let rows = by_vars.min(by_seeds).saturating_mul(lcm as usize);
        if rows > MAX_TABLE {
            return Err(Error::InstanceTooLarge(format!("SAT at {} needs a table of {rows} rows", node.path)));
        }

        let u = node.local("U").clone();
        let su = j.add_uniform_seed(format!("{u}.seed"), lcm as usize)?;
        let pick = |vals: &[u32], su: u32| -> u32 {
            let (zv, fv) = vals.split_at(nz);
            blocks.get(zv).and_then(|row| row.iter().find(|b| b.0 == fv[0])).map_or(0, |&(_, start, size)| start + su % size)
        };
        if by_vars <= by_seeds {
            let mut inputs: Vec<Input> = var_ids.iter().map(|&v| Input::Var(v)).collect();
            inputs.push(su);
            j.add_var_fn(u, inputs, |v| pick(&v[..nz + 1], v[nz + 1]))?;
        } else {
            let mut inputs: Vec<Input> = roots.iter().map(|&s| Input::Seed(s)).collect();
            inputs.push(su);
            let mut seed_vals = vec![0u32; j.seeds().len()];
            let jr = &*j;
            let table = {
                let mut table = Vec::with_capacity(rows);
                let radices: Vec<usize> = inputs.iter().map(|&i| jr.radix(i)).collect();
                let mut digits = vec![0u32; radices.len()];
                let mut vals = vec![0u32; query.len()];
                for _ in 0..rows {
                    for (&s, &d) in roots.iter().zip(&digits) {
                        seed_vals[s] = d;
                    }
                    for (slot, &v) in vals.iter_mut().zip(&var_ids) {
                        *slot = jr.eval_var(v, &seed_vals);
                    }
                    table.push(pick(&vals, *digits.last().expect("seed input")));
                    for pos in (0..digits.len()).rev() {
                        digits[pos] += 1;
                        if (digits[pos] as usize) < radices[pos] {
                            break;
                        }
                        digits[pos] = 0;
                    }
                }
                table
            };
            j.add_var(u, inputs, table)?;
        }
        Ok(())
    }
}

/// A witness for the full system of a tile set together with its tree.
pub struct Witness {
    pub compiled: Compiled,
    pub joint: FactoredJoint,
}

/// Builds a joint realizing every variable of the compiled system of `ts`.
pub fn build_witness(ts: &TileSet, tiling: &PeriodicTiling) -> Result<Witness> {
    let compiled = compile_ttori_tree(ts)?;
    let mut b = Builder::with_tiling(ts, tiling);
    b.fill(&compiled.tree)?;
    for v in compiled.system.vars() {
        if !b.joint.contains_var(v) {
            return Err(Error::RosterMismatch(format!("witness leaves `{v}` undefined")));
        }
    }
    Ok(Witness { compiled, joint: b.joint })
}
