//! Factored joint distributions: independent finite seeds plus deterministic
//! lookup tables.
//!
//! A variable's table is indexed row-major (mixed radix, last input fastest)
//! over the product of its inputs. An input is either a seed or a variable
//! declared earlier in the list; a variable input's radix is its alphabet
//! size, i.e. one more than the largest entry of its table.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::VarId;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq)]
pub struct Seed {
    pub name: String,
    pub probs: Vec<Rational>,
    pub(crate) probs_f64: Vec<f64>,
}

impl Seed {
    pub fn size(&self) -> usize {
        self.probs.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Input {
    Seed(usize),
    Var(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarDef {
    pub name: VarId,
    pub inputs: Vec<Input>,
    pub table: Vec<u32>,
    pub alphabet: u32,
}

#[derive(Clone, Debug, Default)]
pub struct FactoredJoint {
    seeds: Vec<Seed>,
    vars: Vec<VarDef>,
    names: HashMap<String, Input>,
}

impl PartialEq for FactoredJoint {
    fn eq(&self, other: &Self) -> bool {
        self.seeds == other.seeds && self.vars == other.vars
    }
}

impl FactoredJoint {
    pub fn new() -> Self {
        FactoredJoint::default()
    }

    pub fn seeds(&self) -> &[Seed] {
        &self.seeds
    }

    pub fn vars(&self) -> &[VarDef] {
        &self.vars
    }

    pub fn var_index(&self, name: &VarId) -> Result<usize> {
        match self.names.get(name.as_str()) {
            Some(Input::Var(i)) => Ok(*i),
            _ => Err(Error::UnknownVariable(name.to_string())),
        }
    }

    pub fn contains_var(&self, name: &VarId) -> bool {
        matches!(self.names.get(name.as_str()), Some(Input::Var(_)))
    }

    pub fn lookup(&self, name: &str) -> Option<Input> {
        self.names.get(name).copied()
    }

    pub fn radix(&self, input: Input) -> usize {
        match input {
            Input::Seed(s) => self.seeds[s].size(),
            Input::Var(v) => self.vars[v].alphabet as usize,
        }
    }

    fn claim(&mut self, name: &str, slot: Input) -> Result<()> {
        if self.names.contains_key(name) {
            return Err(Error::DuplicateName(name.to_string()));
        }
        self.names.insert(name.to_string(), slot);
        Ok(())
    }

    pub fn add_seed(&mut self, name: impl Into<String>, probs: Vec<Rational>) -> Result<Input> {
        let name = name.into();
        if probs.is_empty() {
            return Err(Error::InvalidJoint(format!("seed `{name}` is empty")));
        }
        if probs.iter().any(Rational::is_negative) {
            return Err(Error::InvalidJoint(format!("seed `{name}` has a negative probability")));
        }
        let total: Rational = probs.iter().cloned().sum();
        if total != Rational::one() {
            return Err(Error::InvalidJoint(format!("seed `{name}` probabilities sum to {total}")));
        }
        let slot = Input::Seed(self.seeds.len());
        self.claim(&name, slot)?;
        let probs_f64 = probs.iter().map(Rational::to_f64).collect();
        self.seeds.push(Seed { name, probs, probs_f64 });
        Ok(slot)
    }

    pub fn add_uniform_seed(&mut self, name: impl Into<String>, size: usize) -> Result<Input> {
        let p = Rational::new(1, size as i64);
        self.add_seed(name, vec![p; size])
    }

    pub fn add_var(&mut self, name: impl Into<VarId>, inputs: Vec<Input>, table: Vec<u32>) -> Result<Input> {
        let name = name.into();
        for inp in &inputs {
            let ok = match *inp {
                Input::Seed(s) => s < self.seeds.len(),
                Input::Var(v) => v < self.vars.len(),
            };
            if !ok {
                return Err(Error::InvalidJoint(format!("`{name}` references an undeclared input")));
            }
        }
        let expected: usize = inputs.iter().map(|&i| self.radix(i)).product();
        if table.len() != expected {
            return Err(Error::InvalidJoint(format!("`{name}` table has {} entries, expected {expected}", table.len())));
        }
        let alphabet = table.iter().copied().max().map_or(1, |m| m + 1);
        let slot = Input::Var(self.vars.len());
        self.claim(name.as_str(), slot)?;
        self.vars.push(VarDef { name, inputs, table, alphabet });
        Ok(slot)
    }

    /// Declares a variable by evaluating `f` on every input tuple.
    pub fn add_var_fn(&mut self, name: impl Into<VarId>, inputs: Vec<Input>, mut f: impl FnMut(&[u32]) -> u32) -> Result<Input> {
        let radices: Vec<usize> = inputs.iter().map(|&i| self.radix(i)).collect();
        let total: usize = radices.iter().product();
        let mut table = Vec::with_capacity(total);
        let mut digits = vec![0u32; radices.len()];
        for _ in 0..total {
            table.push(f(&digits));
            for pos in (0..digits.len()).rev() {
                digits[pos] += 1;
                if (digits[pos] as usize) < radices[pos] {
                    break;
                }
                digits[pos] = 0;
            }
        }
        self.add_var(name, inputs, table)
    }

    /// Replaces the definition of an existing variable in place. Inputs must
    /// be declared before it; the alphabet never shrinks, so tables reading
    /// the variable keep their shape.
    pub fn redefine_var(&mut self, name: &VarId, inputs: Vec<Input>, table: Vec<u32>) -> Result<()> {
        let at = self.var_index(name)?;
        if inputs.iter().any(|i| matches!(*i, Input::Var(v) if v >= at)) {
            return Err(Error::InvalidJoint(format!("`{name}` would read a later variable")));
        }
        let expected: usize = inputs.iter().map(|&i| self.radix(i)).product();
        if table.len() != expected {
            return Err(Error::InvalidJoint(format!("`{name}` table has {} entries, expected {expected}", table.len())));
        }
        let old = self.vars[at].alphabet;
        let alphabet = table.iter().copied().max().map_or(1, |m| m + 1);
        if alphabet > old && self.vars[at + 1..].iter().any(|d| d.inputs.contains(&Input::Var(at))) {
            return Err(Error::InvalidJoint(format!("`{name}` would outgrow its alphabet")));
        }
        self.vars[at] = VarDef { name: name.clone(), inputs, table, alphabet: alphabet.max(old) };
        Ok(())
    }

    /// Seeds that `var` depends on, directly or through other variables.
    pub fn root_seeds(&self, var: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![var];
        let mut seen = vec![false; self.vars.len()];
        while let Some(v) = stack.pop() {
            if std::mem::replace(&mut seen[v], true) {
                continue;
            }
            for inp in &self.vars[v].inputs {
                match *inp {
                    Input::Seed(s) => out.push(s),
                    Input::Var(w) => stack.push(w),
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Value of `var` when seed `s` takes value `seed_values[s]`.
    pub fn eval_var(&self, var: usize, seed_values: &[u32]) -> u32 {
        let def = &self.vars[var];
        let mut idx = 0usize;
        for inp in &def.inputs {
            let v = match *inp {
                Input::Seed(s) => seed_values[s],
                Input::Var(w) => self.eval_var(w, seed_values),
            };
            idx = idx * self.radix(*inp) + v as usize;
        }
        def.table[idx]
    }

    /// Table index of an input tuple.
    pub fn table_index(&self, var: usize, values: &[u32]) -> usize {
        let def = &self.vars[var];
        let mut idx = 0usize;
        for (inp, &v) in def.inputs.iter().zip(values) {
            idx = idx * self.radix(*inp) + v as usize;
        }
        idx
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_raw()).expect("joint serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawJoint = serde_json::from_str(text)?;
        FactoredJoint::from_raw(raw)
    }

    fn to_raw(&self) -> RawJoint {
        let name_of = |i: &Input| match *i {
            Input::Seed(s) => self.seeds[s].name.clone(),
            Input::Var(v) => self.vars[v].name.to_string(),
        };
        RawJoint {
            seeds: self.seeds.iter().map(|s| RawSeed { name: s.name.clone(), size: s.size(), probs: s.probs.clone() }).collect(),
            vars: self
                .vars
                .iter()
                .map(|v| RawVar { name: v.name.to_string(), seeds: v.inputs.iter().map(name_of).collect(), table: v.table.clone() })
                .collect(),
        }
    }

    fn from_raw(raw: RawJoint) -> Result<Self> {
        let mut j = FactoredJoint::new();
        for s in raw.seeds {
            if s.size != s.probs.len() {
                return Err(Error::InvalidJoint(format!("seed `{}` declares size {} but lists {} probabilities", s.name, s.size, s.probs.len())));
            }
            j.add_seed(s.name, s.probs)?;
        }
        for v in raw.vars {
            let inputs = v.seeds.iter().map(|n| j.lookup(n).ok_or_else(|| Error::UnknownVariable(n.clone()))).collect::<Result<Vec<_>>>()?;
            j.add_var(v.name, inputs, v.table)?;
        }
        Ok(j)
    }
}

#[derive(Serialize, Deserialize)]
struct RawSeed {
    name: String,
    size: usize,
    probs: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct RawVar {
    name: String,
    seeds: Vec<String>,
    table: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct RawJoint {
    seeds: Vec<RawSeed>,
    vars: Vec<RawVar>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unnormalized_seed() {
        let mut j = FactoredJoint::new();
        let err = j.add_seed("s", vec![Rational::new(1, 2), Rational::new(1, 3)]);
        assert!(matches!(err, Err(Error::InvalidJoint(_))));
    }

    #[test]
    fn rejects_short_table_and_duplicates() {
        let mut j = FactoredJoint::new();
        let s = j.add_uniform_seed("s", 3).unwrap();
        assert!(j.add_var("X", vec![s], vec![0, 1]).is_err());
        j.add_var("X", vec![s], vec![0, 1, 2]).unwrap();
        assert!(matches!(j.add_var("X", vec![], vec![0]), Err(Error::DuplicateName(_))));
        assert!(matches!(j.add_uniform_seed("X", 2), Err(Error::DuplicateName(_))));
    }

    #[test]
    fn json_round_trip_with_derived_inputs() {
        let mut j = FactoredJoint::new();
        let a = j.add_uniform_seed("a", 2).unwrap();
        let b = j.add_seed("b", vec![Rational::new(1, 4), Rational::new(3, 4)]).unwrap();
        let x = j.add_var("X", vec![a, b], vec![0, 1, 1, 2]).unwrap();
        j.add_var_fn("Y", vec![x, a], |v| (v[0] + v[1]) % 2).unwrap();
        let text = j.to_json();
        let back = FactoredJoint::from_json(&text).unwrap();
        assert_eq!(back, j);
        assert_eq!(back.to_json(), text);
        assert!(text.contains(r#""probs":["1/4","3/4"]"#));
    }

    #[test]
    fn table_is_row_major_last_input_fastest() {
        let mut j = FactoredJoint::new();
        let a = j.add_uniform_seed("a", 2).unwrap();
        let b = j.add_uniform_seed("b", 3).unwrap();
        let x = j.add_var_fn("X", vec![a, b], |v| v[0] * 10 + v[1]).unwrap();
        let Input::Var(xi) = x else { unreachable!() };
        assert_eq!(j.vars()[xi].table, vec![0, 1, 2, 10, 11, 12]);
        assert_eq!(j.table_index(xi, &[1, 2]), 5);
    }
}
