//! Scoring rules on pmf-valued actions, finite gain/loss matrices, and the
//! proper loss generated by a concave core.

use std::fmt;
use std::sync::Arc;

use crate::entropy::Core;
use crate::error::{Error, Result};
use crate::simplex::{alpha_tilt, check_alpha, norm, posterior, pow0, power_sum, weighted_sum, Channel, Pmf};

/// Slack allowed between the minimal expected core loss and the core value.
pub const CORE_LOSS_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Gain,
    Loss,
}

/// A scoring rule supplied by the caller.
pub trait CustomScore: Send + Sync + fmt::Debug {
    fn score(&self, x: usize, q: &Pmf) -> f64;
    /// Optimal action for a belief.
    fn respond(&self, belief: &Pmf) -> Pmf;
    fn is_proper(&self) -> bool;
}

#[derive(Debug, Clone)]
pub enum Family {
    /// `ln q(x)`
    Log,
    /// `1/(a-1) (q(x)/||q||_a)^(a-1)`
    PseudoSpherical { alpha: f64 },
    /// `a/(a-1) q(x)^(a-1) - ||q||_a^a`
    Power { alpha: f64 },
    /// `a/(a-1) q(x)^((a-1)/a)`; not proper, answered by the a-tilt.
    Alpha { alpha: f64 },
    Custom(Arc<dyn CustomScore>),
}

#[derive(Debug, Clone)]
pub struct ScoringRule {
    name: String,
    family: Family,
    orientation: Orientation,
    c_of_g: Option<f64>,
}

fn check_order(alpha: f64) -> Result<()> {
    check_alpha(alpha)?;
    if alpha == 1.0 {
        return Err(Error::BadAlpha {
            alpha,
            reason: "parametric scoring rules need order != 1",
        });
    }
    Ok(())
}

impl ScoringRule {
    pub fn log_score() -> Self {
        Self::builtin("log-score", Family::Log, Orientation::Gain, None)
    }

    pub fn log_loss() -> Self {
        Self::builtin("log-loss", Family::Log, Orientation::Loss, None)
    }

    pub fn pseudo_spherical_score(alpha: f64) -> Result<Self> {
        check_order(alpha)?;
        Ok(Self::builtin(
            "ps-score",
            Family::PseudoSpherical { alpha },
            Orientation::Gain,
            Some(alpha / (alpha - 1.0)),
        ))
    }

    pub fn pseudo_spherical_loss(alpha: f64) -> Result<Self> {
        check_order(alpha)?;
        Ok(Self::builtin("ps-loss", Family::PseudoSpherical { alpha }, Orientation::Loss, None))
    }

    pub fn power_score(alpha: f64) -> Result<Self> {
        check_order(alpha)?;
        Ok(Self::builtin(
            "power-score",
            Family::Power { alpha },
            Orientation::Gain,
            Some(1.0 / (alpha - 1.0)),
        ))
    }

    pub fn power_loss(alpha: f64) -> Result<Self> {
        check_order(alpha)?;
        Ok(Self::builtin("power-loss", Family::Power { alpha }, Orientation::Loss, None))
    }

    pub fn alpha_score(alpha: f64) -> Result<Self> {
        check_order(alpha)?;
        Ok(Self::builtin(
            "alpha-score",
            Family::Alpha { alpha },
            Orientation::Gain,
            Some(alpha / (alpha - 1.0)),
        ))
    }

    pub fn alpha_loss(alpha: f64) -> Result<Self> {
        check_order(alpha)?;
        Ok(Self::builtin("alpha-loss", Family::Alpha { alpha }, Orientation::Loss, None))
    }

    /// A caller-defined rule. Multiplicative leakage is available only when
    /// `c_of_g` is declared.
    pub fn custom(
        name: impl Into<String>,
        orientation: Orientation,
        rule: Arc<dyn CustomScore>,
        c_of_g: Option<f64>,
    ) -> Self {
        Self::builtin(name, Family::Custom(rule), orientation, c_of_g)
    }

    /// Looks a built-in rule up by the name it reports.
    pub fn by_name(name: &str, alpha: Option<f64>) -> Result<Self> {
        let need = |a: Option<f64>| {
            a.ok_or(Error::BadAlpha {
                alpha: f64::NAN,
                reason: "this rule needs an order",
            })
        };
        match name {
            "log-score" | "log" => Ok(Self::log_score()),
            "log-loss" => Ok(Self::log_loss()),
            "ps-score" | "pseudo-spherical" => Self::pseudo_spherical_score(need(alpha)?),
            "ps-loss" => Self::pseudo_spherical_loss(need(alpha)?),
            "power-score" | "power" => Self::power_score(need(alpha)?),
            "power-loss" => Self::power_loss(need(alpha)?),
            "alpha-score" => Self::alpha_score(need(alpha)?),
            "alpha-loss" => Self::alpha_loss(need(alpha)?),
            other => Err(Error::InvalidConfig(format!("unknown scoring rule `{other}`"))),
        }
    }

    fn builtin(name: impl Into<String>, family: Family, orientation: Orientation, c_of_g: Option<f64>) -> Self {
        ScoringRule {
            name: name.into(),
            family,
            orientation,
            c_of_g,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn c_of_g(&self) -> Option<f64> {
        self.c_of_g
    }

    pub fn alpha(&self) -> Option<f64> {
        match self.family {
            Family::PseudoSpherical { alpha } | Family::Power { alpha } | Family::Alpha { alpha } => Some(alpha),
            _ => None,
        }
    }

    pub fn is_proper(&self) -> bool {
        match &self.family {
            Family::Alpha { .. } => false,
            Family::Custom(c) => c.is_proper(),
            _ => true,
        }
    }

    /// Gain-oriented value of the rule.
    fn gain(&self, x: usize, q: &Pmf) -> f64 {
        let qx = q[x];
        match &self.family {
            Family::Log => qx.ln(),
            Family::PseudoSpherical { alpha } => {
                let a = *alpha;
                (qx / norm(q.as_slice(), a)).powf(a - 1.0) / (a - 1.0)
            }
            Family::Power { alpha } => {
                let a = *alpha;
                a / (a - 1.0) * qx.powf(a - 1.0) - power_sum(q.as_slice(), a)
            }
            Family::Alpha { alpha } => {
                let a = *alpha;
                a / (a - 1.0) * pow0(qx, (a - 1.0) / a)
            }
            Family::Custom(c) => c.score(x, q),
        }
    }

    /// `g(x, q)` for gains, `l(x, q)` for losses. Log-type scores at a zero
    /// coordinate are infinite, never NaN.
    pub fn score(&self, x: usize, q: &Pmf) -> f64 {
        if let Family::Custom(c) = &self.family {
            return c.score(x, q);
        }
        let g = self.gain(x, q);
        match self.orientation {
            Orientation::Gain => g,
            Orientation::Loss => match self.family {
                Family::Log => -g,
                // l = 1/(a-1) - g, minimized at the Tsallis-type entropies
                Family::PseudoSpherical { alpha } | Family::Power { alpha } => 1.0 / (alpha - 1.0) - g,
                // l = a/(a-1) - g
                Family::Alpha { alpha } => alpha / (alpha - 1.0) - g,
                Family::Custom(_) => unreachable!(),
            },
        }
    }

    /// Action minimizing expected loss (maximizing expected gain) under
    /// `belief`.
    pub fn respond(&self, belief: &Pmf) -> Pmf {
        match &self.family {
            Family::Alpha { alpha } => alpha_tilt(belief, *alpha).expect("order checked at construction"),
            Family::Custom(c) => c.respond(belief),
            _ => belief.clone(),
        }
    }

    pub fn score_vector(&self, q: &Pmf) -> Vec<f64> {
        (0..q.len()).map(|x| self.score(x, q)).collect()
    }
}

/// All built-in rules of order `alpha`.
pub fn standard_rules(alpha: f64) -> Result<Vec<ScoringRule>> {
    Ok(vec![
        ScoringRule::log_score(),
        ScoringRule::log_loss(),
        ScoringRule::pseudo_spherical_score(alpha)?,
        ScoringRule::pseudo_spherical_loss(alpha)?,
        ScoringRule::power_score(alpha)?,
        ScoringRule::power_loss(alpha)?,
        ScoringRule::alpha_score(alpha)?,
        ScoringRule::alpha_loss(alpha)?,
    ])
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `E_p[score(X, q)]`.
pub fn expected_score(rule: &ScoringRule, p: &Pmf, q: &Pmf) -> Result<f64> {
    check_len(p.len(), q.len())?;
    Ok(weighted_sum(p.as_slice(), &rule.score_vector(q)))
}

/// `sum_y p_Y(y) E_{p(.|y)}[score(X, q_y)]` for a per-output action family.
pub fn bayes_quantity(rule: &ScoringRule, p: &Pmf, w: &Channel, actions: &[Option<Pmf>]) -> Result<f64> {
    let post = posterior(p, w)?;
    let mut total = 0.0;
    for (y, py, col) in post.support() {
        let q = actions.get(y).and_then(Option::as_ref).ok_or(Error::MissingColumn(y))?;
        let v = expected_score(rule, col, q)?;
        if py != 0.0 {
            total += py * v;
        }
    }
    Ok(total)
}

pub fn optimal_response(rule: &ScoringRule, belief: &Pmf) -> Pmf {
    rule.respond(belief)
}

/// `l_F(x, q) = F(q) + z . (e_x - q)` with `z` the core gradient at `q`.
pub fn loss_from_core(core: &Core, q: &Pmf) -> Result<Vec<f64>> {
    let z = core.gradient(q.as_slice());
    if let Some((index, &value)) = z.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite { index, value });
    }
    let f = core.value(q.as_slice());
    let zq: f64 = z.iter().zip(q.as_slice()).map(|(a, b)| a * b).sum();
    Ok(z.iter().map(|zx| f + zx - zq).collect())
}

/// `E_p[l_F(X, p)]`, checked against `F(p)`.
pub fn min_expected_core_loss(core: &Core, p: &Pmf) -> Result<f64> {
    let loss = weighted_sum(p.as_slice(), &loss_from_core(core, p)?);
    let f = core.value(p.as_slice());
    if (loss - f).abs() > CORE_LOSS_TOLERANCE {
        return Err(Error::Inconsistent { loss, core: f });
    }
    Ok(loss)
}

/// Utility or cost of each action in each state, `|X| x |A|`.
#[derive(Debug, Clone, PartialEq)]
pub struct GainMatrix {
    states: usize,
    actions: usize,
    values: Vec<f64>,
    orientation: Orientation,
}

impl GainMatrix {
    pub fn new(rows: Vec<Vec<f64>>, orientation: Orientation) -> Result<Self> {
        let states = rows.len();
        if states == 0 || rows[0].is_empty() {
            return Err(Error::Empty);
        }
        let actions = rows[0].len();
        let mut values = Vec::with_capacity(states * actions);
        for row in rows {
            check_len(actions, row.len())?;
            for (index, v) in row.into_iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite { index, value: v });
                }
                values.push(v);
            }
        }
        Ok(GainMatrix {
            states,
            actions,
            values,
            orientation,
        })
    }

    /// 0-1 gain: guess the state, score one when right (MAP estimation).
    pub fn identity(m: usize) -> Self {
        let rows = (0..m).map(|i| (0..m).map(|j| f64::from(u8::from(i == j))).collect()).collect();
        Self::new(rows, Orientation::Gain).expect("identity is well formed")
    }

    /// 0-1 loss.
    pub fn zero_one_loss(m: usize) -> Self {
        let rows = (0..m).map(|i| (0..m).map(|j| f64::from(u8::from(i != j))).collect()).collect();
        Self::new(rows, Orientation::Loss).expect("0-1 loss is well formed")
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    #[inline]
    pub fn get(&self, x: usize, a: usize) -> f64 {
        self.values[x * self.actions + a]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Best action for `belief` with its expected value; ties go to the lowest
    /// action index.
    pub fn best_action(&self, belief: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::NAN);
        for a in 0..self.actions {
            let v: f64 = (0..self.states).map(|x| belief[x] * self.get(x, a)).sum();
            let better = match self.orientation {
                Orientation::Gain => v > best.1,
                Orientation::Loss => v < best.1,
            };
            if a == 0 || better {
                best = (a, v);
            }
        }
        best
    }
}
