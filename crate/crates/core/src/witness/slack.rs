//! Realizing slack variables of a slackified system.

use crate::compiler::sparse::SparseAffineSystem;
use crate::entropy::binary_entropy;
use crate::error::{Error, Result};
use crate::expr::{InfoExpr, Rel, VarId};
use crate::joint::FactoredJoint;
use crate::rational::Rational;

use super::verify::{verify_checks, Check};

/// Denominator used for the Bernoulli part of a slack variable.
const BERN_DENOM: i64 = 1 << 40;
/// Largest uniform part, in bits.
const MAX_SLACK_BITS: u32 = 24;

/// `p ∈ [0, 1/2]` with `H_b(p) = h`, by bisection.
pub fn inverse_binary_entropy(h: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if binary_entropy(mid) < h {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Extends `joint` with one independent variable per slack column of
/// `slackified`, each carrying the entropy its row leaves over: a uniform
/// on `2^⌊s⌋` points times a Bernoulli with `H_b(p) = s − ⌊s⌋`.
///
/// A slack column is a singleton term with coefficient −1 whose variable
/// the joint does not define yet.
pub fn extend_with_slack(joint: &FactoredJoint, slackified: &SparseAffineSystem, tol: f64) -> Result<FactoredJoint> {
    let mut out = joint.clone();
    let mut rests = Vec::with_capacity(slackified.rows.len());
    let mut slack_vars: Vec<VarId> = Vec::new();
    for row in &slackified.rows {
        let minus_one = Rational::integer(-1);
        let slack = row
            .entries
            .terms()
            .find(|(s, c)| s.len() == 1 && **c == minus_one && !joint.contains_var(s.iter().next().unwrap()))
            .map(|(s, _)| s.clone())
            .ok_or_else(|| Error::WitnessRefused(format!("row `{}` has no slack column", row.tag)))?;
        let mut rest = row.entries.clone();
        rest.add_term(slack.clone(), Rational::one());
        rests.push(rest);
        slack_vars.push(slack.iter().next().unwrap().clone());
    }
    let checks: Vec<Check<'_>> =
        slackified.rows.iter().zip(&rests).map(|(r, rest): (_, &InfoExpr)| Check { tag: &r.tag, lhs: rest, rel: Rel::Ge, rhs: &r.rhs }).collect();
    let report = verify_checks(joint, &checks, tol)?;
    for (row, v) in report.rows.iter().zip(slack_vars) {
        if !row.pass {
            return Err(Error::WitnessRefused(format!("row `{}` is violated by {:.3e}; no slack realizes it", row.tag, -row.residual)));
        }
        let s = row.residual.max(0.0);
        let bits = s.floor();
        if bits > MAX_SLACK_BITS as f64 {
            return Err(Error::InstanceTooLarge(format!("slack for `{}` needs {bits} bits", row.tag)));
        }
        let frac = s - bits;
        let size = 1usize << bits as u32;
        let p = (inverse_binary_entropy(frac) * BERN_DENOM as f64).round() as i64;
        let u = out.add_uniform_seed(format!("{v}.seed.u"), size)?;
        let b = out.add_seed(format!("{v}.seed.b"), vec![Rational::new(BERN_DENOM - p, BERN_DENOM), Rational::new(p, BERN_DENOM)])?;
        out.add_var_fn(v, vec![u, b], |x| 2 * x[0] + x[1])?;
    }
    Ok(out)
}
