//! Core-concave entropy pairs `H = (eta, F)` and the H-mutual information
//! built from them.
//!
//! `H(X) = eta(F(p_X))`, and the conditional form averages the core over
//! posteriors inside the outer function:
//! `H(X|Y) = eta(sum_y p_Y(y) F(p_{X|Y}(.|y)))`. All values are in nats.
//!
//! For orders above one the norm-based cores are negated so that `F` stays
//! concave; the matching outer function then takes `ln(-t)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::simplex::{check_alpha, norm, posterior, power_sum, xlogy, Channel, Pmf};

/// Weight of the uniform component mixed in before differentiating a core.
pub const INTERIOR_SHIFT: f64 = 1e-12;

/// A user-supplied concave core.
pub trait ConcaveCore: Send + Sync + fmt::Debug {
    fn value(&self, p: &[f64]) -> f64;
    /// Any supergradient of the core at an interior point.
    fn gradient(&self, p: &[f64]) -> Vec<f64>;
}

#[derive(Debug, Clone)]
pub enum Core {
    /// `-sum p ln p`
    Shannon,
    /// `+-||p||_a`, negative for `a > 1`
    Norm { alpha: f64 },
    /// `+-||p||_a^a`, negative for `a > 1`
    NormPower { alpha: f64 },
    /// `-||p||_a^(a/(a-1))`, `a > 1`
    FehrBerens { alpha: f64 },
    Custom(Arc<dyn ConcaveCore>),
}

fn order_sign(alpha: f64) -> f64 {
    if alpha < 1.0 {
        1.0
    } else {
        -1.0
    }
}

impl Core {
    pub fn value(&self, p: &[f64]) -> f64 {
        match self {
            Core::Shannon => -p.iter().map(|&v| xlogy(v, v)).sum::<f64>(),
            Core::Norm { alpha } => order_sign(*alpha) * norm(p, *alpha),
            Core::NormPower { alpha } => order_sign(*alpha) * power_sum(p, *alpha),
            Core::FehrBerens { alpha } => -power_sum(p, *alpha).powf(1.0 / (alpha - 1.0)),
            Core::Custom(c) => c.value(p),
        }
    }

    /// Analytic gradient at `p` after mixing it with the uniform distribution
    /// at weight [`INTERIOR_SHIFT`].
    pub fn gradient(&self, p: &[f64]) -> Vec<f64> {
        let u = INTERIOR_SHIFT / p.len() as f64;
        let q: Vec<f64> = p.iter().map(|v| (1.0 - INTERIOR_SHIFT) * v + u).collect();
        self.raw_gradient(&q)
    }

    fn raw_gradient(&self, q: &[f64]) -> Vec<f64> {
        match self {
            Core::Shannon => q.iter().map(|v| -v.ln() - 1.0).collect(),
            Core::Norm { alpha } => {
                let a = *alpha;
                let n = norm(q, a);
                q.iter().map(|v| order_sign(a) * (v / n).powf(a - 1.0)).collect()
            }
            Core::NormPower { alpha } => {
                let a = *alpha;
                q.iter().map(|v| order_sign(a) * a * v.powf(a - 1.0)).collect()
            }
            Core::FehrBerens { alpha } => {
                let a = *alpha;
                let s = power_sum(q, a);
                let scale = -(a / (a - 1.0)) * s.powf((2.0 - a) / (a - 1.0));
                q.iter().map(|v| scale * v.powf(a - 1.0)).collect()
            }
            Core::Custom(c) => c.gradient(q),
        }
    }
}

/// Strictly increasing outer function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outer {
    /// `eta(t) = t` on the whole line.
    Identity,
    /// `eta(t) = scale * ln(t)` on `t > 0`, or `scale * ln(-t)` on `t < 0`
    /// when `negated`. The sign of `scale` must make the map increasing.
    Log { scale: f64, negated: bool },
}

impl Outer {
    pub fn eval(&self, t: f64) -> Result<f64> {
        match *self {
            Outer::Identity => {
                if t.is_nan() {
                    Err(Error::Domain { value: t, domain: "real line" })
                } else {
                    Ok(t)
                }
            }
            Outer::Log { scale, negated } => {
                let arg = if negated { -t } else { t };
                if arg > 0.0 {
                    Ok(scale * arg.ln())
                } else {
                    Err(Error::Domain {
                        value: t,
                        domain: self.domain_name(),
                    })
                }
            }
        }
    }

    /// Open interval on which the outer function is defined.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Outer::Identity => (f64::NEG_INFINITY, f64::INFINITY),
            Outer::Log { negated: false, .. } => (0.0, f64::INFINITY),
            Outer::Log { negated: true, .. } => (f64::NEG_INFINITY, 0.0),
        }
    }

    pub fn domain_name(&self) -> &'static str {
        match self {
            Outer::Identity => "real line",
            Outer::Log { negated: false, .. } => "t > 0",
            Outer::Log { negated: true, .. } => "t < 0",
        }
    }
}

/// `H = (eta, F)`.
#[derive(Debug, Clone)]
pub struct EntropyPair {
    name: String,
    alpha: Option<f64>,
    core: Core,
    outer: Outer,
}

/// Entropies and their difference, in nats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiReport {
    pub h_x: f64,
    pub h_x_given_y: f64,
    pub mi: f64,
}

fn check_renyi_order(alpha: f64) -> Result<()> {
    check_alpha(alpha)?;
    if alpha == 1.0 {
        return Err(Error::BadAlpha {
            alpha,
            reason: "order 1 is the Shannon case; use the Shannon pair",
        });
    }
    Ok(())
}

pub fn shannon_pair() -> EntropyPair {
    EntropyPair {
        name: "shannon".into(),
        alpha: None,
        core: Core::Shannon,
        outer: Outer::Identity,
    }
}

/// Arimoto's pair: `F = +-||p||_a`, `eta(t) = a/(1-a) ln(+-t)`.
pub fn arimoto_pair(alpha: f64) -> Result<EntropyPair> {
    check_renyi_order(alpha)?;
    Ok(EntropyPair {
        name: "arimoto".into(),
        alpha: Some(alpha),
        core: Core::Norm { alpha },
        outer: Outer::Log {
            scale: alpha / (1.0 - alpha),
            negated: alpha > 1.0,
        },
    })
}

/// Hayashi's pair: `F = +-||p||_a^a`, `eta(t) = 1/(1-a) ln(+-t)`.
pub fn hayashi_pair(alpha: f64) -> Result<EntropyPair> {
    check_renyi_order(alpha)?;
    Ok(EntropyPair {
        name: "hayashi".into(),
        alpha: Some(alpha),
        core: Core::NormPower { alpha },
        outer: Outer::Log {
            scale: 1.0 / (1.0 - alpha),
            negated: alpha > 1.0,
        },
    })
}

/// Fehr–Berens pair: `F = -||p||_a^(a/(a-1))`, `eta(t) = -ln(-t)`, `a > 1`.
pub fn fehr_berens_pair(alpha: f64) -> Result<EntropyPair> {
    check_alpha(alpha)?;
    if alpha <= 1.0 {
        return Err(Error::BadAlpha {
            alpha,
            reason: "Fehr-Berens entropy needs order above 1",
        });
    }
    Ok(EntropyPair {
        name: "fehr-berens".into(),
        alpha: Some(alpha),
        core: Core::FehrBerens { alpha },
        outer: Outer::Log {
            scale: -1.0,
            negated: true,
        },
    })
}

impl EntropyPair {
    pub fn custom(name: impl Into<String>, core: Arc<dyn ConcaveCore>, outer: Outer) -> Self {
        EntropyPair {
            name: name.into(),
            alpha: None,
            core: Core::Custom(core),
            outer,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    pub fn core(&self) -> &Core {
        &self.core
    }

    pub fn outer(&self) -> Outer {
        self.outer
    }

    pub fn core_value(&self, p: &[f64]) -> f64 {
        self.core.value(p)
    }

    pub fn core_gradient(&self, p: &[f64]) -> Vec<f64> {
        self.core.gradient(p)
    }

    pub fn eta(&self, t: f64) -> Result<f64> {
        self.outer.eval(t)
    }

    /// `H(X) = eta(F(p))`.
    pub fn entropy(&self, p: &Pmf) -> Result<f64> {
        self.eta(self.core_value(p.as_slice()))
    }

    /// Averaged core `sum_y p_Y(y) F(p(.|y))`, before the outer function.
    pub fn averaged_core(&self, p: &Pmf, w: &Channel) -> Result<f64> {
        let post = posterior(p, w)?;
        Ok(post
            .support()
            .map(|(_, py, col)| py * self.core_value(col.as_slice()))
            .sum())
    }

    /// `H(X|Y)` in the eta-averaging form.
    pub fn conditional_entropy(&self, p: &Pmf, w: &Channel) -> Result<f64> {
        self.eta(self.averaged_core(p, w)?)
    }

    pub fn mutual_information(&self, p: &Pmf, w: &Channel) -> Result<MiReport> {
        let h_x = self.entropy(p)?;
        let h_x_given_y = self.conditional_entropy(p, w)?;
        Ok(MiReport {
            h_x,
            h_x_given_y,
            mi: h_x - h_x_given_y,
        })
    }
}

pub fn h_mi(pair: &EntropyPair, p: &Pmf, w: &Channel) -> Result<MiReport> {
    pair.mutual_information(p, w)
}

pub fn shannon_mi(p: &Pmf, w: &Channel) -> Result<f64> {
    Ok(shannon_pair().mutual_information(p, w)?.mi)
}

pub fn arimoto_mi(alpha: f64, p: &Pmf, w: &Channel) -> Result<f64> {
    Ok(arimoto_pair(alpha)?.mutual_information(p, w)?.mi)
}

pub fn hayashi_mi(alpha: f64, p: &Pmf, w: &Channel) -> Result<f64> {
    Ok(hayashi_pair(alpha)?.mutual_information(p, w)?.mi)
}

pub fn fb_mi(alpha: f64, p: &Pmf, w: &Channel) -> Result<f64> {
    Ok(fehr_berens_pair(alpha)?.mutual_information(p, w)?.mi)
}
