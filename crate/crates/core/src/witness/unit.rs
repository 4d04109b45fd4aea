//! Small standalone witnesses for single gadgets.

use crate::error::Result;
use crate::expr::VarId;
use crate::gadget::catalog::{instantiate_at, Gadget, SatKind};
use crate::gadget::system::ConstraintSystem;
use crate::joint::FactoredJoint;

use super::builder::Builder;

/// A gadget system together with a joint defining all of its variables.
pub struct UnitWitness {
    pub system: ConstraintSystem,
    pub joint: FactoredJoint,
}

fn names(prefix: &str, k: u32) -> Vec<VarId> {
    (1..=k).map(|i| VarId::new(format!("{prefix}{i}"))).collect()
}

fn complete(joint: FactoredJoint, g: &Gadget, actuals: &[VarId]) -> Result<UnitWitness> {
    let (system, tree) = instantiate_at(g, actuals, "u")?;
    let mut b = Builder::new(joint);
    b.fill(&tree)?;
    Ok(UnitWitness { system, joint: b.joint })
}

/// `Y1, Y2` independent uniform on three points, `Y3 = Y1 + Y2 mod 3`.
pub fn triple() -> Result<UnitWitness> {
    let mut j = FactoredJoint::new();
    let a = j.add_uniform_seed("a", 3)?;
    let b = j.add_uniform_seed("b", 3)?;
    j.add_var("Y1", vec![a], vec![0, 1, 2])?;
    j.add_var("Y2", vec![b], vec![0, 1, 2])?;
    j.add_var_fn("Y3", vec![a, b], |v| (v[0] + v[1]) % 3)?;
    complete(j, &Gadget::Triple, &names("Y", 3))
}

/// The switch table `F`, `G = (1−F)·g`, `V = (1−W)·F` for a fair bit `W`.
pub fn flip() -> Result<UnitWitness> {
    let mut j = FactoredJoint::new();
    let f = j.add_uniform_seed("f", 2)?;
    let g = j.add_uniform_seed("g", 2)?;
    let w = j.add_uniform_seed("w", 2)?;
    j.add_var("F", vec![f], vec![0, 1])?;
    j.add_var_fn("G", vec![f, g], |v| (1 - v[0]) * v[1])?;
    j.add_var_fn("V", vec![f, w], |v| (1 - v[1]) * v[0])?;
    let args: Vec<VarId> = ["F", "G", "V"].iter().map(|&s| VarId::new(s)).collect();
    complete(j, &Gadget::Flip, &args)
}

/// Vertices with the given signed colors, grouped into hyperedges; the
/// core seed picks a uniform vertex. Defines `E`, `W1..Wk`, `V1..Vk`,
/// `Vbar1..Vbark` and `F`, and returns the switch arguments in order.
pub fn colored_vertices(groups: &[Vec<i32>], k: u32) -> Result<(FactoredJoint, Vec<VarId>)> {
    let colors: Vec<i32> = groups.iter().flatten().copied().collect();
    let group_of: Vec<u32> = groups.iter().enumerate().flat_map(|(g, vs)| vec![g as u32; vs.len()]).collect();
    let mut j = FactoredJoint::new();
    let x = j.add_uniform_seed("vertex", colors.len())?;
    let f = j.add_uniform_seed("f", 2)?;
    j.add_var("E", vec![x], group_of)?;
    let mut ws = Vec::new();
    for t in 1..=k as i32 {
        let table = colors.iter().map(|&c| u32::from(if c > 0 { c == t } else { -c != t })).collect();
        ws.push(j.add_var(format!("W{t}"), vec![x], table)?);
    }
    let fv = j.add_var("F", vec![f], vec![0, 1])?;
    for (t, &w) in ws.iter().enumerate() {
        j.add_var_fn(format!("V{}", t + 1), vec![w, fv], |v| (1 - v[0]) * v[1])?;
    }
    for (t, &w) in ws.iter().enumerate() {
        j.add_var_fn(format!("Vbar{}", t + 1), vec![w, fv], |v| v[0] * v[1])?;
    }
    let mut args = names("W", k);
    args.extend(names("V", k));
    args.extend(names("Vbar", k));
    args.push(VarId::new("F"));
    Ok((j, args))
}

/// `SW` over vertices carrying every color of `T_k` once, so each `W_i` is a fair bit.
pub fn sw(k: u32) -> Result<UnitWitness> {
    let all: Vec<i32> = (1..k as i32).chain((1..k as i32).map(|c| -c)).collect();
    let (j, args) = colored_vertices(&[all], k)?;
    complete(j, &Gadget::Sw { k }, &args)
}

/// A `SAT` gadget over `groups`, with `E` the group index.
pub fn sat(kind: SatKind, k: u32, s: Vec<u32>, s_bar: Vec<u32>, groups: &[Vec<i32>]) -> Result<UnitWitness> {
    let (j, sw) = colored_vertices(groups, k)?;
    let mut args = vec![VarId::new("E")];
    args.extend(sw);
    complete(j, &Gadget::Sat { kind, k, e_len: 1, s, s_bar }, &args)
}
