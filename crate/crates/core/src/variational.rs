//! Two-argument functionals `F_H(p, q)` whose maximum over the family
//! `q = {q(.|y)}` is the H-mutual information, with the alternating
//! updates used by the capacity solver.
//!
//! The generic functional is `eta(F(p)) - eta(E_{p,W}[l_F(X, q(.|Y))])`
//! with `l_F` the proper loss generated by the core. The named variants
//! evaluate their closed algebraic forms directly:
//!
//! | spec       | value                                                                 |
//! |------------|-----------------------------------------------------------------------|
//! | Shannon    | `E[ln q(X|Y)/p(X)]`                                                   |
//! | Arimoto A1 | `a/(a-1) ln(E[q(X|Y)^((a-1)/a)] / ||p||_a)`                           |
//! | Arimoto A2 | `a/(a-1) ln(E[(q(X|Y)/||q(.|Y)||_a)^(a-1)] / ||p||_a)`                |
//! | Hayashi    | `1/(a-1) ln(E[a q^(a-1) - (a-1)||q||_a^a] / ||p||_a^a)`               |
//! | FB         | `ln(-E[l_F(X, q)] / ||p||_a^(a/(a-1)))`                               |
//!
//! A family `q` for which the expected loss leaves the domain of `eta`
//! through its upper end (possible for the negated cores) is infeasible and
//! scores `-inf`, the limit of the functional at that boundary.

use crate::entropy::{arimoto_pair, fehr_berens_pair, hayashi_pair, shannon_pair, EntropyPair, Outer};
use crate::error::{Error, Result};
use crate::scoring::loss_from_core;
use crate::simplex::{alpha_tilt, norm, posterior, pow0, power_sum, Channel, Pmf};

/// Relative step of the central differences in [`p_step_numeric`].
pub const FD_RELATIVE_STEP: f64 = 1e-6;
/// [`p_step_numeric`] stops once an accepted step gains less than this.
pub const NUMERIC_MIN_GAIN: f64 = 1e-12;
const NUMERIC_MIN_STEP: f64 = 1e-14;

/// One conditional pmf over `X` per output symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct QFamily {
    cols: Vec<Pmf>,
}

impl QFamily {
    pub fn new(cols: Vec<Pmf>) -> Result<Self> {
        let m = cols.first().ok_or(Error::Empty)?.len();
        if let Some(c) = cols.iter().find(|c| c.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: c.len(),
            });
        }
        Ok(QFamily { cols })
    }

    pub fn column(&self, y: usize) -> &Pmf {
        &self.cols[y]
    }

    pub fn columns(&self) -> &[Pmf] {
        &self.cols
    }

    pub fn outputs(&self) -> usize {
        self.cols.len()
    }

    pub fn inputs(&self) -> usize {
        self.cols[0].len()
    }

    /// Column-wise a-tilt.
    pub fn tilted(&self, alpha: f64) -> Result<QFamily> {
        Ok(QFamily {
            cols: self.cols.iter().map(|c| alpha_tilt(c, alpha)).collect::<Result<_>>()?,
        })
    }

    fn check(&self, w: &Channel) -> Result<()> {
        if self.outputs() != w.outputs() {
            return Err(Error::DimensionMismatch {
                expected: w.outputs(),
                found: self.outputs(),
            });
        }
        if self.inputs() != w.inputs() {
            return Err(Error::DimensionMismatch {
                expected: w.inputs(),
                found: self.inputs(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub enum FunctionalSpec {
    /// Any core-concave pair with a proper core loss.
    Generic(EntropyPair),
    Shannon,
    /// Arimoto information through the (non-proper) a-score; its maximizer
    /// is the a-tilted posterior.
    ArimotoA1 { alpha: f64 },
    /// Arimoto information through the pseudo-spherical loss.
    ArimotoA2 { alpha: f64 },
    Hayashi { alpha: f64 },
    FehrBerens { alpha: f64 },
}

impl FunctionalSpec {
    pub fn arimoto_a1(alpha: f64) -> Result<Self> {
        arimoto_pair(alpha)?;
        Ok(FunctionalSpec::ArimotoA1 { alpha })
    }

    pub fn arimoto_a2(alpha: f64) -> Result<Self> {
        arimoto_pair(alpha)?;
        Ok(FunctionalSpec::ArimotoA2 { alpha })
    }

    pub fn hayashi(alpha: f64) -> Result<Self> {
        hayashi_pair(alpha)?;
        Ok(FunctionalSpec::Hayashi { alpha })
    }

    pub fn fehr_berens(alpha: f64) -> Result<Self> {
        fehr_berens_pair(alpha)?;
        Ok(FunctionalSpec::FehrBerens { alpha })
    }

    /// The entropy pair whose H-MI this functional characterizes.
    pub fn pair(&self) -> EntropyPair {
        match self {
            FunctionalSpec::Generic(h) => h.clone(),
            FunctionalSpec::Shannon => shannon_pair(),
            FunctionalSpec::ArimotoA1 { alpha } | FunctionalSpec::ArimotoA2 { alpha } => {
                arimoto_pair(*alpha).expect("order validated at construction")
            }
            FunctionalSpec::Hayashi { alpha } => hayashi_pair(*alpha).expect("order validated at construction"),
            FunctionalSpec::FehrBerens { alpha } => fehr_berens_pair(*alpha).expect("order validated at construction"),
        }
    }

    pub fn name(&self) -> String {
        match self {
            FunctionalSpec::Generic(h) => format!("generic({})", h.name()),
            FunctionalSpec::Shannon => "shannon".into(),
            FunctionalSpec::ArimotoA1 { .. } => "arimoto-a1".into(),
            FunctionalSpec::ArimotoA2 { .. } => "arimoto-a2".into(),
            FunctionalSpec::Hayashi { .. } => "hayashi".into(),
            FunctionalSpec::FehrBerens { .. } => "fehr-berens".into(),
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match self {
            FunctionalSpec::Generic(h) => h.alpha(),
            FunctionalSpec::Shannon => None,
            FunctionalSpec::ArimotoA1 { alpha }
            | FunctionalSpec::ArimotoA2 { alpha }
            | FunctionalSpec::Hayashi { alpha }
            | FunctionalSpec::FehrBerens { alpha } => Some(*alpha),
        }
    }

    pub fn has_closed_p_step(&self) -> bool {
        matches!(
            self,
            FunctionalSpec::Shannon | FunctionalSpec::ArimotoA1 { .. } | FunctionalSpec::ArimotoA2 { .. }
        )
    }
}

/// `sum_{x,y} p(x) W(y|x) f(x, y)` skipping cells of zero joint mass.
fn joint_expectation(p: &[f64], w: &Channel, mut f: impl FnMut(usize, usize) -> f64) -> f64 {
    let mut total = 0.0;
    for (x, &px) in p.iter().enumerate() {
        if px == 0.0 {
            continue;
        }
        for (y, &wyx) in w.row(x).iter().enumerate() {
            if wyx != 0.0 {
                total += px * wyx * f(x, y);
            }
        }
    }
    total
}

/// `ln(r)` for a ratio that must be positive; non-positive ratios mark an
/// infeasible family.
fn ln_ratio(r: f64) -> f64 {
    if r > 0.0 {
        r.ln()
    } else {
        f64::NEG_INFINITY
    }
}

pub fn eval_functional(spec: &FunctionalSpec, p: &Pmf, w: &Channel, q: &QFamily) -> Result<f64> {
    w.check_input(p)?;
    q.check(w)?;
    eval_raw(spec, p.as_slice(), w, q)
}

/// Evaluates the functional at a raw input vector (finite-difference probes
/// are not renormalized).
pub(crate) fn eval_raw(spec: &FunctionalSpec, p: &[f64], w: &Channel, q: &QFamily) -> Result<f64> {
    let value = match spec {
        FunctionalSpec::Shannon => joint_expectation(p, w, |x, y| {
            let qxy = q.column(y)[x];
            if qxy == 0.0 {
                f64::NEG_INFINITY
            } else {
                (qxy / p[x]).ln()
            }
        }),
        FunctionalSpec::ArimotoA1 { alpha } => {
            let a = *alpha;
            let beta = (a - 1.0) / a;
            let e = joint_expectation(p, w, |x, y| pow0(q.column(y)[x], beta));
            a / (a - 1.0) * ln_ratio(e / norm(p, a))
        }
        FunctionalSpec::ArimotoA2 { alpha } => {
            let a = *alpha;
            let norms: Vec<f64> = q.columns().iter().map(|c| norm(c.as_slice(), a)).collect();
            let e = joint_expectation(p, w, |x, y| pow0(q.column(y)[x] / norms[y], a - 1.0));
            a / (a - 1.0) * ln_ratio(e / norm(p, a))
        }
        FunctionalSpec::Hayashi { alpha } => {
            let a = *alpha;
            let sums: Vec<f64> = q.columns().iter().map(|c| power_sum(c.as_slice(), a)).collect();
            let e = joint_expectation(p, w, |x, y| a * pow0(q.column(y)[x], a - 1.0) - (a - 1.0) * sums[y]);
            ln_ratio(e / power_sum(p, a)) / (a - 1.0)
        }
        FunctionalSpec::FehrBerens { alpha } => {
            let a = *alpha;
            let sums: Vec<f64> = q.columns().iter().map(|c| power_sum(c.as_slice(), a)).collect();
            let e = joint_expectation(p, w, |x, y| {
                let s = sums[y];
                s.powf(1.0 / (a - 1.0)) / (a - 1.0)
                    - a / (a - 1.0) * s.powf((2.0 - a) / (a - 1.0)) * pow0(q.column(y)[x], a - 1.0)
            });
            ln_ratio(-e / power_sum(p, a).powf(1.0 / (a - 1.0)))
        }
        FunctionalSpec::Generic(h) => {
            let losses = q
                .columns()
                .iter()
                .map(|c| loss_from_core(h.core(), c))
                .collect::<Result<Vec<_>>>()?;
            let t = joint_expectation(p, w, |x, y| losses[y][x]);
            let head = h.eta(h.core_value(p))?;
            let (_, upper) = h.outer().domain();
            if t >= upper && matches!(h.outer(), Outer::Log { negated: true, .. }) {
                f64::NEG_INFINITY
            } else {
                head - h.eta(t)?
            }
        }
    };
    if value.is_nan() {
        return Err(Error::NonFinite { index: 0, value });
    }
    Ok(value)
}

/// Maximizer over `q` for fixed `p`: the posterior, or its a-tilt for A1.
/// Outputs of zero probability get `p` itself.
pub fn q_step(spec: &FunctionalSpec, p: &Pmf, w: &Channel) -> Result<QFamily> {
    let post = posterior(p, w)?;
    let cols = post
        .columns()
        .iter()
        .map(|c| match (c, spec) {
            (None, _) => Ok(p.clone()),
            (Some(c), FunctionalSpec::ArimotoA1 { alpha }) => alpha_tilt(c, *alpha),
            (Some(c), _) => Ok(c.clone()),
        })
        .collect::<Result<Vec<_>>>()?;
    QFamily::new(cols)
}

/// Closed-form maximizer over `p` for fixed `q` (Shannon, Arimoto A1/A2).
///
/// * Shannon: `p(x) ∝ prod_y q(x|y)^W(y|x)`
/// * A1: `p(x) ∝ (sum_y W(y|x) q(x|y)^((a-1)/a))^(1/(a-1))`
/// * A2: the A1 update applied to the column-wise a-tilt of `q`
pub fn p_step_closed(spec: &FunctionalSpec, w: &Channel, q: &QFamily) -> Result<Pmf> {
    q.check(w)?;
    let logw: Vec<f64> = match spec {
        FunctionalSpec::Shannon => (0..w.inputs())
            .map(|x| {
                w.row(x)
                    .iter()
                    .enumerate()
                    .filter(|(_, &wyx)| wyx != 0.0)
                    .map(|(y, &wyx)| wyx * q.column(y)[x].ln())
                    .sum()
            })
            .collect(),
        FunctionalSpec::ArimotoA1 { alpha } => arimoto_log_weights(*alpha, w, q),
        FunctionalSpec::ArimotoA2 { alpha } => arimoto_log_weights(*alpha, w, &q.tilted(*alpha)?),
        other => return Err(Error::UnsupportedSpec(other.name())),
    };
    Pmf::from_log_weights(&logw).ok_or(Error::NonFinite {
        index: 0,
        value: f64::NEG_INFINITY,
    })
}

fn arimoto_log_weights(a: f64, w: &Channel, q: &QFamily) -> Vec<f64> {
    let beta = (a - 1.0) / a;
    (0..w.inputs())
        .map(|x| {
            let c: f64 = w
                .row(x)
                .iter()
                .enumerate()
                .filter(|(_, &wyx)| wyx != 0.0)
                .map(|(y, &wyx)| wyx * pow0(q.column(y)[x], beta))
                .sum();
            c.ln() / (a - 1.0)
        })
        .collect()
}

/// Safeguarded exponentiated-gradient ascent of `p -> F_H(p, q)`.
///
/// Partial derivatives are central differences along `e_i - e_r`, where `r`
/// is the largest coordinate, with step `FD_RELATIVE_STEP * p_i`. A step
/// that lowers the objective is halved and retried; the loop ends after
/// `iters` accepted steps or once a step gains less than
/// [`NUMERIC_MIN_GAIN`].
pub fn p_step_numeric(
    spec: &FunctionalSpec,
    w: &Channel,
    q: &QFamily,
    p_init: &Pmf,
    iters: usize,
    step: f64,
) -> Result<Pmf> {
    w.check_input(p_init)?;
    q.check(w)?;
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidConfig(format!("numeric step must be positive, got {step}")));
    }
    let objective = |p: &[f64]| eval_raw(spec, p, w, q);
    let mut p = p_init.clone();
    let mut f = objective(p.as_slice())?;
    if !f.is_finite() {
        return Err(Error::NonFinite { index: 0, value: f });
    }
    let m = p.len();
    if m == 1 {
        return Ok(p);
    }
    let mut step = step;
    for _ in 0..iters {
        let grad = fd_gradient(&objective, p.as_slice())?;
        let logp: Vec<f64> = p.as_slice().iter().map(|v| v.ln()).collect();
        let accepted = loop {
            let logw: Vec<f64> = logp.iter().zip(&grad).map(|(l, g)| l + step * g).collect();
            let cand = Pmf::from_log_weights(&logw).ok_or(Error::NonFinite {
                index: 0,
                value: f64::NAN,
            })?;
            let fc = objective(cand.as_slice())?;
            if fc >= f {
                break Some((cand, fc));
            }
            step *= 0.5;
            if step < NUMERIC_MIN_STEP {
                break None;
            }
        };
        let Some((cand, fc)) = accepted else { break };
        let gain = fc - f;
        p = cand;
        f = fc;
        if gain < NUMERIC_MIN_GAIN {
            break;
        }
    }
    Ok(p)
}

fn fd_gradient(objective: &impl Fn(&[f64]) -> Result<f64>, p: &[f64]) -> Result<Vec<f64>> {
    let r = (0..p.len()).fold(0, |best, i| if p[i] > p[best] { i } else { best });
    let mut grad = vec![0.0; p.len()];
    let mut probe = p.to_vec();
    for i in (0..p.len()).filter(|&i| i != r) {
        let h = FD_RELATIVE_STEP * p[i];
        if h == 0.0 {
            continue;
        }
        probe[i] = p[i] + h;
        probe[r] = p[r] - h;
        let up = objective(&probe)?;
        probe[i] = p[i] - h;
        probe[r] = p[r] + h;
        let down = objective(&probe)?;
        probe[i] = p[i];
        probe[r] = p[r];
        let g = (up - down) / (2.0 * h);
        if !g.is_finite() {
            return Err(Error::NonFinite { index: i, value: g });
        }
        grad[i] = g;
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::{arimoto_mi, hayashi_pair};
    use crate::fixtures::SplitMix64;
    use std::f64::consts::LN_2;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn specs() -> Vec<FunctionalSpec> {
        vec![
            FunctionalSpec::Shannon,
            FunctionalSpec::arimoto_a1(0.5).unwrap(),
            FunctionalSpec::arimoto_a1(3.0).unwrap(),
            FunctionalSpec::arimoto_a2(0.5).unwrap(),
            FunctionalSpec::arimoto_a2(3.0).unwrap(),
            FunctionalSpec::hayashi(0.5).unwrap(),
            FunctionalSpec::hayashi(2.0).unwrap(),
            FunctionalSpec::fehr_berens(2.0).unwrap(),
            FunctionalSpec::fehr_berens(4.0).unwrap(),
            FunctionalSpec::Generic(hayashi_pair(2.0).unwrap()),
            FunctionalSpec::Generic(crate::entropy::fehr_berens_pair(3.0).unwrap()),
        ]
    }

    #[test]
    fn eval_examples() {
        let u = Pmf::uniform(2);
        let bsc = Channel::bsc(0.1).unwrap();
        let q = q_step(&FunctionalSpec::Shannon, &u, &bsc).unwrap();
        let v = eval_functional(&FunctionalSpec::Shannon, &u, &bsc, &q).unwrap();
        assert!(close(v, 0.368064, 1e-6));

        let prior = Pmf::new(vec![0.35, 0.65]).unwrap();
        let indep = Channel::constant(2, &Pmf::new(vec![0.3, 0.7]).unwrap());
        for spec in specs() {
            let q = q_step(&spec, &prior, &indep).unwrap();
            assert!(close(eval_functional(&spec, &prior, &indep, &q).unwrap(), 0.0, 1e-10), "{}", spec.name());
        }

        let a1 = FunctionalSpec::arimoto_a1(2.0).unwrap();
        let post = q_step(&FunctionalSpec::Shannon, &u, &bsc).unwrap();
        let tilted = post.tilted(2.0).unwrap();
        let v = eval_functional(&a1, &u, &bsc, &tilted).unwrap();
        assert!(close(v, LN_2 + 0.82_f64.ln(), 1e-12) && close(v, 0.4947, 1e-4));
    }

    #[test]
    fn q_step_examples() {
        let q = q_step(&FunctionalSpec::Shannon, &Pmf::uniform(3), &Channel::identity(3)).unwrap();
        for y in 0..3 {
            assert_eq!(q.column(y), &Pmf::point_mass(3, y));
        }
        let u = Pmf::uniform(2);
        let bsc = Channel::bsc(0.1).unwrap();
        let near = q_step(&FunctionalSpec::arimoto_a1(1.0 + 1e-9).unwrap(), &u, &bsc).unwrap();
        let plain = q_step(&FunctionalSpec::Shannon, &u, &bsc).unwrap();
        assert!(near.column(0).max_abs_diff(plain.column(0)) < 1e-8);
        let q = q_step(&FunctionalSpec::arimoto_a1(2.0).unwrap(), &u, &bsc).unwrap();
        assert!(close(q.column(0)[0], 0.2025 / 0.205, 1e-14) && close(q.column(0)[0], 0.987805, 1e-6));
        assert!(close(q.column(0)[1], 0.012195, 1e-6));
    }

    #[test]
    fn q_step_fills_unreachable_outputs_with_prior() {
        let prior = Pmf::new(vec![0.4, 0.6]).unwrap();
        let w = Channel::new(vec![vec![0.5, 0.0, 0.5], vec![0.2, 0.0, 0.8]]).unwrap();
        let q = q_step(&FunctionalSpec::Shannon, &prior, &w).unwrap();
        assert_eq!(q.column(1), &prior);
    }

    #[test]
    fn q_step_dominates_random_families() {
        let mut rng = SplitMix64::new(41);
        for spec in specs() {
            for _ in 0..20 {
                let p = rng.pmf(3);
                let w = rng.channel(3, 3);
                let best = eval_functional(&spec, &p, &w, &q_step(&spec, &p, &w).unwrap()).unwrap();
                for _ in 0..25 {
                    let q = QFamily::new((0..3).map(|_| rng.pmf(3)).collect()).unwrap();
                    let v = eval_functional(&spec, &p, &w, &q).unwrap();
                    assert!(v <= best + 1e-9, "{}: {v} > {best}", spec.name());
                }
            }
        }
    }

    #[test]
    fn maximum_over_q_is_the_h_mi() {
        let mut rng = SplitMix64::new(42);
        for spec in specs() {
            for _ in 0..30 {
                let p = rng.pmf(3);
                let w = rng.channel(3, 4);
                let v = eval_functional(&spec, &p, &w, &q_step(&spec, &p, &w).unwrap()).unwrap();
                let mi = spec.pair().mutual_information(&p, &w).unwrap().mi;
                assert!(close(v, mi, 1e-8), "{}: {v} vs {mi}", spec.name());
            }
        }
    }

    #[test]
    fn named_forms_agree_with_the_generic_functional() {
        let mut rng = SplitMix64::new(43);
        let named = [
            FunctionalSpec::arimoto_a2(0.6).unwrap(),
            FunctionalSpec::arimoto_a2(2.5).unwrap(),
            FunctionalSpec::hayashi(0.6).unwrap(),
            FunctionalSpec::hayashi(2.5).unwrap(),
            FunctionalSpec::fehr_berens(2.5).unwrap(),
            FunctionalSpec::Shannon,
        ];
        for spec in named {
            let generic = FunctionalSpec::Generic(spec.pair());
            for _ in 0..30 {
                let p = rng.pmf(3);
                let w = rng.channel(3, 3);
                let q = QFamily::new((0..3).map(|_| rng.pmf(3).mix_uniform(0.05)).collect()).unwrap();
                let a = eval_functional(&spec, &p, &w, &q).unwrap();
                let b = eval_functional(&generic, &p, &w, &q).unwrap();
                if a.is_finite() || b.is_finite() {
                    assert!(close(a, b, 1e-9), "{}: {a} vs {b}", spec.name());
                }
            }
        }
    }

    #[test]
    fn arimoto_tilted_form_matches() {
        // a/(a-1) ln sum p_a(x)^(1/a) W(y|x) q(x|y)^((a-1)/a), p_a the a-tilt of p
        let mut rng = SplitMix64::new(44);
        for a in [0.5, 2.0, 5.0] {
            let a1 = FunctionalSpec::arimoto_a1(a).unwrap();
            let a2 = FunctionalSpec::arimoto_a2(a).unwrap();
            for _ in 0..20 {
                let p = rng.pmf(3);
                let w = rng.channel(3, 2);
                let q = QFamily::new((0..2).map(|_| rng.pmf(3)).collect()).unwrap();
                let pa = alpha_tilt(&p, a).unwrap();
                let form = |q: &QFamily| {
                    let mut s = 0.0;
                    for x in 0..3 {
                        for y in 0..2 {
                            s += pa[x].powf(1.0 / a) * w.get(x, y) * q.column(y)[x].powf((a - 1.0) / a);
                        }
                    }
                    a / (a - 1.0) * s.ln()
                };
                assert!(close(eval_functional(&a1, &p, &w, &q).unwrap(), form(&q), 1e-12));
                let qt = q.tilted(a).unwrap();
                assert!(close(eval_functional(&a2, &p, &w, &q).unwrap(), form(&qt), 1e-12));
            }
        }
    }

    #[test]
    fn shannon_functional_from_the_joint() {
        let mut rng = SplitMix64::new(45);
        for _ in 0..50 {
            let p = rng.pmf(3);
            let w = rng.channel(3, 3);
            let q = q_step(&FunctionalSpec::Shannon, &p, &w).unwrap();
            let j = crate::simplex::joint(&p, &w).unwrap();
            let py = j.y_marginal();
            let mut direct = 0.0;
            for x in 0..3 {
                for y in 0..3 {
                    let pxy = j.get(x, y);
                    direct += pxy * ((pxy / py[y]) / p[x]).ln();
                }
            }
            let v = eval_functional(&FunctionalSpec::Shannon, &p, &w, &q).unwrap();
            assert!(close(v, direct, 1e-12));
        }
    }

    #[test]
    fn zero_q_on_positive_mass_is_minus_infinity() {
        let u = Pmf::uniform(2);
        let bsc = Channel::bsc(0.1).unwrap();
        let q = QFamily::new(vec![Pmf::point_mass(2, 0), Pmf::point_mass(2, 1)]).unwrap();
        assert_eq!(eval_functional(&FunctionalSpec::Shannon, &u, &bsc, &q).unwrap(), f64::NEG_INFINITY);
        assert_eq!(eval_functional(&FunctionalSpec::arimoto_a1(0.5).unwrap(), &u, &bsc, &q).unwrap(), f64::NEG_INFINITY);
        // hayashi a > 1: the expected loss leaves the outer domain
        let wrong = QFamily::new(vec![Pmf::point_mass(2, 1), Pmf::point_mass(2, 0)]).unwrap();
        let id = Channel::identity(2);
        for spec in [FunctionalSpec::hayashi(2.0).unwrap(), FunctionalSpec::Generic(hayashi_pair(2.0).unwrap())] {
            assert_eq!(eval_functional(&spec, &u, &id, &wrong).unwrap(), f64::NEG_INFINITY);
        }
    }

    #[test]
    fn eval_dimension_errors() {
        let q = QFamily::new(vec![Pmf::uniform(2), Pmf::uniform(2)]).unwrap();
        let w = Channel::identity(3);
        assert!(eval_functional(&FunctionalSpec::Shannon, &Pmf::uniform(3), &w, &q).is_err());
        assert!(QFamily::new(vec![Pmf::uniform(2), Pmf::uniform(3)]).is_err());
    }

    #[test]
    fn p_step_closed_examples() {
        let q = q_step(&FunctionalSpec::Shannon, &Pmf::uniform(3), &Channel::identity(3)).unwrap();
        let p = p_step_closed(&FunctionalSpec::Shannon, &Channel::identity(3), &q).unwrap();
        assert!(p.max_abs_diff(&Pmf::uniform(3)) < 1e-15);

        let sym = Channel::new(vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.7, 0.2], vec![0.2, 0.1, 0.7]]).unwrap();
        for a in [0.5, 2.0] {
            let spec = FunctionalSpec::arimoto_a2(a).unwrap();
            let q = q_step(&spec, &Pmf::uniform(3), &sym).unwrap();
            assert!(p_step_closed(&spec, &sym, &q).unwrap().max_abs_diff(&Pmf::uniform(3)) < 1e-14);
        }

        let one = Channel::new(vec![vec![0.3, 0.7]]).unwrap();
        for spec in [FunctionalSpec::Shannon, FunctionalSpec::arimoto_a1(2.0).unwrap()] {
            let q = q_step(&spec, &Pmf::uniform(1), &one).unwrap();
            assert_eq!(p_step_closed(&spec, &one, &q).unwrap().as_slice(), &[1.0]);
        }

        let q = q_step(&FunctionalSpec::Shannon, &Pmf::uniform(2), &Channel::bsc(0.1).unwrap()).unwrap();
        assert!(matches!(
            p_step_closed(&FunctionalSpec::hayashi(2.0).unwrap(), &Channel::bsc(0.1).unwrap(), &q),
            Err(Error::UnsupportedSpec(_))
        ));
    }

    #[test]
    fn p_step_closed_is_an_argmax() {
        // Certifies the printed exponent 1/(a-1) of the Arimoto updates.
        let mut rng = SplitMix64::new(46);
        for spec in [
            FunctionalSpec::Shannon,
            FunctionalSpec::arimoto_a1(0.3).unwrap(),
            FunctionalSpec::arimoto_a1(2.0).unwrap(),
            FunctionalSpec::arimoto_a1(5.0).unwrap(),
            FunctionalSpec::arimoto_a2(0.5).unwrap(),
            FunctionalSpec::arimoto_a2(3.0).unwrap(),
        ] {
            for _ in 0..5 {
                let w = rng.channel(3, 3);
                let q = q_step(&spec, &rng.pmf(3), &w).unwrap();
                let best = p_step_closed(&spec, &w, &q).unwrap();
                let fbest = eval_functional(&spec, &best, &w, &q).unwrap();
                for _ in 0..200 {
                    let other = rng.pmf(3);
                    assert!(eval_functional(&spec, &other, &w, &q).unwrap() <= fbest + 1e-7, "{}", spec.name());
                }
            }
        }
    }

    #[test]
    fn numeric_step_agrees_with_closed_form() {
        let mut rng = SplitMix64::new(47);
        for spec in [FunctionalSpec::Shannon, FunctionalSpec::arimoto_a2(2.0).unwrap()] {
            for _ in 0..5 {
                let w = rng.channel(3, 3);
                let q = q_step(&spec, &rng.pmf(3), &w).unwrap();
                let closed = p_step_closed(&spec, &w, &q).unwrap();
                let numeric = p_step_numeric(&spec, &w, &q, &Pmf::uniform(3), 5000, 1.0).unwrap();
                let a = eval_functional(&spec, &closed, &w, &q).unwrap();
                let b = eval_functional(&spec, &numeric, &w, &q).unwrap();
                assert!(close(a, b, 1e-6), "{}: {a} vs {b}", spec.name());
            }
        }
    }

    #[test]
    fn numeric_step_matches_grid_argmax_for_hayashi() {
        let mut rng = SplitMix64::new(48);
        let spec = FunctionalSpec::hayashi(2.0).unwrap();
        for _ in 0..5 {
            let w = rng.channel(2, 2);
            let q = q_step(&spec, &rng.pmf(2), &w).unwrap();
            let numeric = p_step_numeric(&spec, &w, &q, &Pmf::uniform(2), 5000, 1.0).unwrap();
            let mut best = (0.0, f64::NEG_INFINITY);
            for i in 0..=10_000 {
                let t = i as f64 * 1e-4;
                let v = eval_raw(&spec, &[t, 1.0 - t], &w, &q).unwrap();
                if v > best.1 {
                    best = (t, v);
                }
            }
            assert!((numeric[0] - best.0).abs() <= 2e-3, "{} vs {}", numeric[0], best.0);
        }
    }

    #[test]
    fn numeric_step_keeps_an_optimal_start() {
        let bsc = Channel::bsc(0.2).unwrap();
        let spec = FunctionalSpec::hayashi(3.0).unwrap();
        let u = Pmf::uniform(2);
        let q = q_step(&spec, &u, &bsc).unwrap();
        let p = p_step_numeric(&spec, &bsc, &q, &u, 100, 1.0).unwrap();
        assert!(p.max_abs_diff(&u) < 1e-12);
    }

    #[test]
    fn arimoto_near_one_approaches_shannon() {
        let mut rng = SplitMix64::new(49);
        for _ in 0..10 {
            let p = rng.pmf(3);
            let w = rng.channel(3, 3);
            let s = crate::entropy::shannon_mi(&p, &w).unwrap();
            for a in [1.0 - 1e-4, 1.0 + 1e-4] {
                assert!(close(arimoto_mi(a, &p, &w).unwrap(), s, 1e-3));
            }
        }
    }
}
