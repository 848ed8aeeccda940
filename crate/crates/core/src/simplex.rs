//! Probability vectors, channels and the derived joint/posterior objects.
//!
//! Conventions used throughout the crate:
//! * `0^a = 0` for every positive `a`, and `0 * ln 0 = 0`;
//! * output symbols with zero marginal probability have no posterior and
//!   carry zero weight in every expectation over `Y`.

use std::ops::Index;

use crate::error::{Error, Result};

/// Absolute slack for the sum-to-one invariant.
pub const SUM_TOLERANCE: f64 = 1e-9;
/// Negative entries above this are treated as round-off and clamped to zero.
pub const NEGATIVE_SLACK: f64 = -1e-12;
const ZERO_MASS: f64 = 1e-15;

/// `x^a` with the continuous extension `0^a = 0` for `a > 0`.
///
/// Negative exponents keep IEEE semantics (`0^a = +inf`) so callers can see
/// the blow-up.
#[inline]
pub(crate) fn pow0(x: f64, a: f64) -> f64 {
    if x == 0.0 && a > 0.0 {
        0.0
    } else {
        x.powf(a)
    }
}

/// `x * ln y` with `0 * ln y = 0`.
#[inline]
pub(crate) fn xlogy(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

/// Sum of `w_i * v_i` where zero weights contribute nothing, even against
/// infinite values.
pub(crate) fn weighted_sum(weights: &[f64], values: &[f64]) -> f64 {
    weights
        .iter()
        .zip(values)
        .filter(|(w, _)| **w != 0.0)
        .map(|(w, v)| w * v)
        .sum()
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::BadAlpha {
            alpha,
            reason: "order must be finite and positive",
        });
    }
    Ok(())
}

/// A probability mass function on `{0, .., m-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf(Vec<f64>);

impl Pmf {
    /// Sanitizing constructor: clamps round-off negatives, rejects anything
    /// worse, then renormalizes.
    pub fn new(values: impl Into<Vec<f64>>) -> Result<Self> {
        let mut values = values.into();
        if values.is_empty() {
            return Err(Error::Empty);
        }
        for (index, v) in values.iter_mut().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { index, value: *v });
            }
            if *v < NEGATIVE_SLACK {
                return Err(Error::Negative { index, value: *v });
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let total: f64 = values.iter().sum();
        if total <= ZERO_MASS {
            return Err(Error::AllZero);
        }
        values.iter_mut().for_each(|v| *v /= total);
        Ok(Pmf(values))
    }

    pub fn uniform(m: usize) -> Self {
        assert!(m > 0, "uniform distribution needs a non-empty alphabet");
        Pmf(vec![1.0 / m as f64; m])
    }

    pub fn point_mass(m: usize, at: usize) -> Self {
        assert!(at < m, "point mass index out of range");
        let mut v = vec![0.0; m];
        v[at] = 1.0;
        Pmf(v)
    }

    /// Normalizes strictly non-negative weights. Returns `None` when they sum
    /// to zero or are not finite.
    pub(crate) fn from_weights(mut weights: Vec<f64>) -> Option<Self> {
        let total: f64 = weights.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return None;
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Some(Pmf(weights))
    }

    /// Normalizes `exp(logw)` using max-subtraction. Entries at `-inf` get
    /// probability zero.
    pub(crate) fn from_log_weights(logw: &[f64]) -> Option<Self> {
        let max = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return None;
        }
        Self::from_weights(logw.iter().map(|l| (l - max).exp()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// `(1 - weight) * self + weight * uniform`.
    pub fn mix_uniform(&self, weight: f64) -> Pmf {
        let u = weight / self.len() as f64;
        Pmf(self.0.iter().map(|p| (1.0 - weight) * p + u).collect())
    }

    pub fn max_abs_diff(&self, other: &Pmf) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for Pmf {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl AsRef<[f64]> for Pmf {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Convenience alias for [`Pmf::new`].
pub fn make_pmf(values: &[f64]) -> Result<Pmf> {
    Pmf::new(values.to_vec())
}

/// Row-stochastic matrix `W(y|x)`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    inputs: usize,
    outputs: usize,
    data: Vec<f64>,
}

impl Channel {
    /// Builds a channel from rows, sanitizing each row like [`Pmf::new`].
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let inputs = rows.len();
        if inputs == 0 {
            return Err(Error::Empty);
        }
        let outputs = rows[0].len();
        let mut data = Vec::with_capacity(inputs * outputs);
        for row in rows {
            if row.len() != outputs {
                return Err(Error::DimensionMismatch {
                    expected: outputs,
                    found: row.len(),
                });
            }
            data.extend(Pmf::new(row)?.into_vec());
        }
        Ok(Channel {
            inputs,
            outputs,
            data,
        })
    }

    pub fn from_row_major(inputs: usize, outputs: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != inputs * outputs {
            return Err(Error::DimensionMismatch {
                expected: inputs * outputs,
                found: data.len(),
            });
        }
        if outputs == 0 {
            return Err(Error::Empty);
        }
        Self::new(data.chunks(outputs).map(<[f64]>::to_vec).collect())
    }

    pub fn from_pmfs(rows: &[Pmf]) -> Result<Self> {
        Self::new(rows.iter().map(|r| r.as_slice().to_vec()).collect())
    }

    /// Binary symmetric channel with crossover probability `eps`.
    pub fn bsc(eps: f64) -> Result<Self> {
        Self::new(vec![vec![1.0 - eps, eps], vec![eps, 1.0 - eps]])
    }

    /// Noiseless `m x m` channel.
    pub fn identity(m: usize) -> Self {
        let mut data = vec![0.0; m * m];
        for i in 0..m {
            data[i * m + i] = 1.0;
        }
        Channel {
            inputs: m,
            outputs: m,
            data,
        }
    }

    /// Channel whose output ignores the input: every row equals `row`.
    pub fn constant(inputs: usize, row: &Pmf) -> Self {
        Channel {
            inputs,
            outputs: row.len(),
            data: row.as_slice().repeat(inputs),
        }
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[x * self.outputs + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.data[x * self.outputs..(x + 1) * self.outputs]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.outputs)
    }

    /// Channel `X -> Z` obtained by following `self` with `next`.
    pub fn compose(&self, next: &Channel) -> Result<Channel> {
        if self.outputs != next.inputs {
            return Err(Error::DimensionMismatch {
                expected: self.outputs,
                found: next.inputs,
            });
        }
        let rows = (0..self.inputs)
            .map(|x| {
                (0..next.outputs)
                    .map(|z| (0..self.outputs).map(|y| self.get(x, y) * next.get(y, z)).sum())
                    .collect()
            })
            .collect();
        Channel::new(rows)
    }

    pub(crate) fn check_input(&self, p: &Pmf) -> Result<()> {
        if p.len() != self.inputs {
            return Err(Error::DimensionMismatch {
                expected: self.inputs,
                found: p.len(),
            });
        }
        Ok(())
    }
}

/// `p(x) W(y|x)` on `X x Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Joint {
    inputs: usize,
    outputs: usize,
    cells: Vec<f64>,
}

impl Joint {
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.cells[x * self.outputs + y]
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn y_marginal(&self) -> Vec<f64> {
        (0..self.outputs)
            .map(|y| (0..self.inputs).map(|x| self.get(x, y)).sum())
            .collect()
    }

    pub fn total(&self) -> f64 {
        self.cells.iter().sum()
    }
}

pub fn joint(p: &Pmf, w: &Channel) -> Result<Joint> {
    w.check_input(p)?;
    let cells = (0..w.inputs())
        .flat_map(|x| w.row(x).iter().map(move |wy| p[x] * wy))
        .collect();
    Ok(Joint {
        inputs: w.inputs(),
        outputs: w.outputs(),
        cells,
    })
}

/// Output marginal together with the posterior columns `p(.|y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    p_y: Pmf,
    cols: Vec<Option<Pmf>>,
}

impl Posterior {
    pub fn p_y(&self) -> &Pmf {
        &self.p_y
    }

    /// `p(.|y)`, or `None` when `p_Y(y) = 0`.
    pub fn column(&self, y: usize) -> Option<&Pmf> {
        self.cols[y].as_ref()
    }

    pub fn columns(&self) -> &[Option<Pmf>] {
        &self.cols
    }

    /// Supported outputs with their weight and posterior.
    pub fn support(&self) -> impl Iterator<Item = (usize, f64, &Pmf)> {
        self.cols
            .iter()
            .enumerate()
            .filter_map(|(y, c)| c.as_ref().map(|c| (y, self.p_y[y], c)))
    }
}

pub fn posterior(p: &Pmf, w: &Channel) -> Result<Posterior> {
    let j = joint(p, w)?;
    let marg = j.y_marginal();
    let cols = (0..w.outputs())
        .map(|y| {
            if marg[y] > 0.0 {
                Pmf::from_weights((0..w.inputs()).map(|x| j.get(x, y)).collect())
            } else {
                None
            }
        })
        .collect();
    // The marginal of a normalized prior through a stochastic matrix sums to
    // one up to rounding.
    let p_y = Pmf::from_weights(marg).ok_or(Error::AllZero)?;
    Ok(Posterior { p_y, cols })
}

/// `p^a / sum p^a`, computed in the log domain so large orders do not
/// underflow.
pub fn alpha_tilt(p: &Pmf, alpha: f64) -> Result<Pmf> {
    check_alpha(alpha)?;
    let logw: Vec<f64> = p
        .as_slice()
        .iter()
        .map(|&v| if v > 0.0 { alpha * v.ln() } else { f64::NEG_INFINITY })
        .collect();
    Pmf::from_log_weights(&logw).ok_or(Error::AllZero)
}

/// `(sum p^a)^(1/a)`; a quasi-norm when `a < 1`.
pub fn p_norm(p: &Pmf, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(norm(p.as_slice(), alpha))
}

/// Unchecked `(sum p^a)^(1/a)` on a raw slice.
pub(crate) fn norm(p: &[f64], alpha: f64) -> f64 {
    power_sum(p, alpha).powf(1.0 / alpha)
}

/// Unchecked `sum p^a` on a raw slice.
pub(crate) fn power_sum(p: &[f64], alpha: f64) -> f64 {
    p.iter().map(|&v| pow0(v, alpha)).sum()
}
