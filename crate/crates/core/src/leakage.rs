//! Decision-theoretic leakage: optimal Bayes values with and without the
//! observation, their difference (EVSI, additive g-leakage) and their
//! scaled log-ratio (multiplicative g-leakage).

use crate::error::{Error, Result};
use crate::scoring::{expected_score, GainMatrix, Orientation, ScoringRule};
use crate::simplex::{posterior, Channel, Pmf};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeakageReport {
    /// Best expected value without the observation.
    pub prior_value: f64,
    /// Best expected value when acting on the observation.
    pub posterior_value: f64,
    /// Improvement: `posterior - prior` for gains, `prior - posterior` for
    /// losses.
    pub additive: f64,
    pub multiplicative: Option<f64>,
}

fn improvement(orientation: Orientation, prior: f64, post: f64) -> f64 {
    match orientation {
        Orientation::Gain => post - prior,
        Orientation::Loss => prior - post,
    }
}

/// `c * ln(post / prior)` after checking that both values and every
/// per-output value carry the sign of `c`.
fn log_ratio(c: f64, prior: f64, post: f64, parts: &[f64]) -> Result<f64> {
    if prior == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    let sign = c.signum();
    if parts.iter().chain([&prior, &post]).any(|v| v.signum() != sign && *v != 0.0) {
        return Err(Error::MixedSign);
    }
    Ok(c * (post / prior).ln())
}

fn check_states(m: &GainMatrix, p: &Pmf) -> Result<()> {
    if m.states() != p.len() {
        return Err(Error::DimensionMismatch {
            expected: m.states(),
            found: p.len(),
        });
    }
    Ok(())
}

/// Optimal Bayes value `sum_y p_Y(y) opt_a E[g(X, a) | Y = y]`.
pub fn bayes_value(m: &GainMatrix, p: &Pmf, w: &Channel) -> Result<f64> {
    check_states(m, p)?;
    let post = posterior(p, w)?;
    Ok(post.support().map(|(_, py, col)| py * m.best_action(col.as_slice()).1).sum())
}

fn matrix_values(m: &GainMatrix, p: &Pmf, w: &Channel) -> Result<(f64, f64, Vec<f64>)> {
    check_states(m, p)?;
    let prior = m.best_action(p.as_slice()).1;
    let post = posterior(p, w)?;
    let parts: Vec<f64> = post.support().map(|(_, _, col)| m.best_action(col.as_slice()).1).collect();
    let value = post.support().zip(&parts).map(|((_, py, _), v)| py * v).sum();
    Ok((prior, value, parts))
}

pub fn evsi(m: &GainMatrix, p: &Pmf, w: &Channel) -> Result<LeakageReport> {
    let (prior, post, parts) = matrix_values(m, p, w)?;
    let c = matrix_constant(m);
    Ok(LeakageReport {
        prior_value: prior,
        posterior_value: post,
        additive: improvement(m.orientation(), prior, post),
        multiplicative: c.and_then(|c| log_ratio(c, prior, post, &parts).ok()),
    })
}

/// `c(g)` for a matrix: its common sign, if it has one. Loss matrices have
/// none.
fn matrix_constant(m: &GainMatrix) -> Option<f64> {
    if m.orientation() != Orientation::Gain {
        return None;
    }
    if m.values().iter().all(|v| *v >= 0.0) {
        Some(1.0)
    } else if m.values().iter().all(|v| *v <= 0.0) {
        Some(-1.0)
    } else {
        None
    }
}

/// Multiplicative leakage of a finite gain matrix with `c(g) = sign(g)`.
pub fn mevsi(m: &GainMatrix, p: &Pmf, w: &Channel) -> Result<f64> {
    if m.orientation() != Orientation::Gain {
        return Err(Error::NoMultiplicativeConstant("loss matrix".into()));
    }
    let c = matrix_constant(m).ok_or(Error::MixedSign)?;
    let (prior, post, parts) = matrix_values(m, p, w)?;
    log_ratio(c, prior, post, &parts)
}

fn rule_values(rule: &ScoringRule, p: &Pmf, w: &Channel) -> Result<(f64, f64, Vec<f64>)> {
    let prior = expected_score(rule, p, &rule.respond(p))?;
    let post = posterior(p, w)?;
    let parts = post
        .support()
        .map(|(_, _, col)| expected_score(rule, col, &rule.respond(col)))
        .collect::<Result<Vec<_>>>()?;
    let value = post.support().zip(&parts).map(|((_, py, _), v)| py * v).sum();
    Ok((prior, value, parts))
}

/// EVSI over the pmf action space, acting with the rule's responder.
pub fn evsi_scoring(rule: &ScoringRule, p: &Pmf, w: &Channel) -> Result<LeakageReport> {
    let (prior, post, parts) = rule_values(rule, p, w)?;
    Ok(LeakageReport {
        prior_value: prior,
        posterior_value: post,
        additive: improvement(rule.orientation(), prior, post),
        multiplicative: rule.c_of_g().and_then(|c| log_ratio(c, prior, post, &parts).ok()),
    })
}

/// `c(g) ln(posterior value / prior value)`.
///
/// The sign condition is checked on this instance's optimal values: the
/// prior value, the value at each posterior, and their average.
pub fn mevsi_scoring(rule: &ScoringRule, p: &Pmf, w: &Channel) -> Result<f64> {
    let c = rule
        .c_of_g()
        .ok_or_else(|| Error::NoMultiplicativeConstant(rule.name().to_string()))?;
    let (prior, post, parts) = rule_values(rule, p, w)?;
    log_ratio(c, prior, post, &parts)
}
