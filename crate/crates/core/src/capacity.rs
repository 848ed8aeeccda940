//! H-capacity `C_H = max_p max_q F_H(p, q)` by alternating maximization,
//! and a brute-force grid oracle over the input simplex.

use crate::entropy::EntropyPair;
use crate::error::{Error, Result};
use crate::par::{map_range, Execution};
use crate::simplex::{Channel, Pmf};
use crate::variational::{eval_functional, p_step_closed, p_step_numeric, q_step, FunctionalSpec};

/// A decrease of the objective larger than this aborts [`solve`].
pub const DIVERGENCE_SLACK: f64 = 1e-8;
pub const MAX_ORACLE_INPUTS: usize = 4;
const MIN_RESOLUTION: f64 = 1e-4;
const MAX_RESOLUTION: f64 = 1e-1;
const REFINE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PStep {
    /// Closed form where one exists, exponentiated gradient otherwise.
    #[default]
    Auto,
    Closed,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stopping {
    /// `|F_k - F_{k-1}| < epsilon`
    #[default]
    Absolute,
    /// `|F_k - F_{k-1}| < epsilon * |F_k|`
    Relative,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub spec: FunctionalSpec,
    pub epsilon: f64,
    pub max_iter: usize,
    /// Starting input distribution; uniform when `None`.
    pub p0: Option<Pmf>,
    pub p_step: PStep,
    pub stopping: Stopping,
    /// Initial step of the exponentiated-gradient p-step.
    pub numeric_step: f64,
    /// Accepted inner steps per outer iteration.
    pub numeric_iters: usize,
}

impl SolverConfig {
    pub fn new(spec: FunctionalSpec) -> Self {
        SolverConfig {
            spec,
            epsilon: 1e-10,
            max_iter: 10_000,
            p0: None,
            p_step: PStep::Auto,
            stopping: Stopping::Absolute,
            numeric_step: 1.0,
            numeric_iters: 100,
        }
    }

    pub fn epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn p0(mut self, p0: Pmf) -> Self {
        self.p0 = Some(p0);
        self
    }

    pub fn p_step(mut self, p_step: PStep) -> Self {
        self.p_step = p_step;
        self
    }

    pub fn stopping(mut self, stopping: Stopping) -> Self {
        self.stopping = stopping;
        self
    }

    /// The p-step [`solve`] will actually run.
    pub fn resolved_p_step(&self) -> Result<PStep> {
        match (self.p_step, self.spec.has_closed_p_step()) {
            (PStep::Auto, true) | (PStep::Closed, true) => Ok(PStep::Closed),
            (PStep::Auto, false) | (PStep::Numeric, _) => Ok(PStep::Numeric),
            (PStep::Closed, false) => Err(Error::UnsupportedSpec(self.spec.name())),
        }
    }

    fn validate(&self, w: &Channel) -> Result<Pmf> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidConfig(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be positive".into()));
        }
        if !(self.numeric_step.is_finite() && self.numeric_step > 0.0) || self.numeric_iters == 0 {
            return Err(Error::InvalidConfig("numeric step and iteration count must be positive".into()));
        }
        let p0 = self.p0.clone().unwrap_or_else(|| Pmf::uniform(w.inputs()));
        w.check_input(&p0)?;
        if let Some(i) = p0.as_slice().iter().position(|v| *v <= 0.0) {
            return Err(Error::InvalidConfig(format!("p0 must be strictly positive (entry {i} is zero)")));
        }
        Ok(p0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub capacity: f64,
    pub argmax_p: Pmf,
    /// Number of completed p-step/q-step rounds.
    pub iterations: usize,
    /// `F^(k,k)` for `k = 0..=iterations`.
    pub trace: Vec<f64>,
    pub converged: bool,
    pub p_step: PStep,
}

/// Alternating maximization: starting from `q = q_step(p0)`, repeat a
/// p-step then a q-step until the objective moves by less than `epsilon`
/// or `max_iter` rounds have run.
pub fn solve(cfg: &SolverConfig, w: &Channel) -> Result<SolveResult> {
    let mut p = cfg.validate(w)?;
    let p_step = cfg.resolved_p_step()?;
    let spec = &cfg.spec;
    let mut q = q_step(spec, &p, w)?;
    let mut f = eval_functional(spec, &p, w, &q)?;
    let mut trace = vec![f];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iter {
        p = match p_step {
            PStep::Numeric => p_step_numeric(spec, w, &q, &p, cfg.numeric_iters, cfg.numeric_step)?,
            _ => p_step_closed(spec, w, &q)?,
        };
        q = q_step(spec, &p, w)?;
        let next = eval_functional(spec, &p, w, &q)?;
        iterations += 1;
        trace.push(next);
        let delta = next - f;
        if delta < -DIVERGENCE_SLACK || next.is_nan() {
            return Err(Error::Diverged {
                iteration: iterations,
                drop: -delta,
            });
        }
        f = next;
        let threshold = match cfg.stopping {
            Stopping::Absolute => cfg.epsilon,
            Stopping::Relative => cfg.epsilon * f.abs(),
        };
        if delta.abs() < threshold {
            converged = true;
            break;
        }
    }
    Ok(SolveResult {
        capacity: f,
        argmax_p: p,
        iterations,
        trace,
        converged,
        p_step,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub k: usize,
    pub value: f64,
    /// `F^(k,k) - F^(k-1,k-1)`; absent for the first row.
    pub delta: Option<f64>,
}

pub fn convergence_trace(result: &SolveResult) -> Vec<TraceRow> {
    result
        .trace
        .iter()
        .enumerate()
        .map(|(k, &value)| TraceRow {
            k,
            value,
            delta: k.checked_sub(1).map(|j| value - result.trace[j]),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub value: f64,
    pub point: Pmf,
}

/// Grid-search estimate of `max_p I_H(p, W)` computed from `h_mi` directly.
pub fn brute_force_capacity(spec: &FunctionalSpec, w: &Channel, resolution: f64) -> Result<f64> {
    Ok(grid_oracle(&spec.pair(), w, resolution, Execution::default())?.value)
}

/// Evaluates `I_H` at every point of the simplex grid with spacing
/// `1/n`, `n = ceil(1/resolution)`, then refines around the best point:
/// golden-section search for two inputs, a shrinking local grid for three
/// or four. Ties go to the lexicographically smallest grid point, so the
/// result does not depend on `exec`.
pub fn grid_oracle(h: &EntropyPair, w: &Channel, resolution: f64, exec: Execution) -> Result<OracleResult> {
    let m = w.inputs();
    if m > MAX_ORACLE_INPUTS {
        return Err(Error::TooLarge(m));
    }
    if !(MIN_RESOLUTION..=MAX_RESOLUTION).contains(&resolution) {
        return Err(Error::InvalidConfig(format!(
            "resolution must lie in [{MIN_RESOLUTION}, {MAX_RESOLUTION}], got {resolution}"
        )));
    }
    let n = (1.0 / resolution - 1e-9).ceil() as usize;
    let eval = |counts: &[usize]| -> Result<f64> {
        let p: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
        h.mutual_information(&Pmf::new(p)?, w).map(|r| r.mi)
    };
    if m == 1 {
        return Ok(OracleResult {
            value: eval(&[n])?,
            point: Pmf::uniform(1),
        });
    }
    // one slab per first coordinate, scanned in lexicographic order
    let slabs = map_range(exec, n + 1, |first| -> Result<(f64, Vec<usize>)> {
        let mut best = (f64::NEG_INFINITY, Vec::new());
        let mut counts = vec![0; m];
        counts[0] = first;
        scan(&mut counts, 1, n - first, &mut |c| {
            let v = eval(c)?;
            if v > best.0 {
                best = (v, c.to_vec());
            }
            Ok(())
        })?;
        Ok(best)
    });
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for slab in slabs {
        let slab = slab?;
        if slab.0 > best.0 {
            best = slab;
        }
    }
    let (grid_value, counts) = best;
    let start: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
    let step = 1.0 / n as f64;
    let (value, point) = if m == 2 {
        refine_golden(h, w, &start, step)?
    } else {
        refine_local(h, w, &start, step)?
    };
    let (value, point) = if value >= grid_value { (value, point) } else { (grid_value, start) };
    Ok(OracleResult {
        value,
        point: Pmf::new(point)?,
    })
}

fn scan(
    counts: &mut [usize],
    at: usize,
    left: usize,
    visit: &mut impl FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    if at == counts.len() - 1 {
        counts[at] = left;
        return visit(counts);
    }
    for c in 0..=left {
        counts[at] = c;
        scan(counts, at + 1, left - c, visit)?;
    }
    Ok(())
}

fn mi_at(h: &EntropyPair, w: &Channel, p: &[f64]) -> Result<f64> {
    h.mutual_information(&Pmf::new(p.to_vec())?, w).map(|r| r.mi)
}

/// Golden-section search of `t -> I_H((t, 1-t))` over the two grid cells
/// adjacent to the best grid point.
fn refine_golden(h: &EntropyPair, w: &Channel, start: &[f64], step: f64) -> Result<(f64, Vec<f64>)> {
    let f = |t: f64| mi_at(h, w, &[t, 1.0 - t]);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = ((start[0] - step).max(0.0), (start[0] + step).min(1.0));
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > REFINE_TOLERANCE {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let mut best = (f64::NEG_INFINITY, vec![]);
    for t in [a, (a + b) / 2.0, b] {
        let v = f(t)?;
        if v > best.0 {
            best = (v, vec![t, 1.0 - t]);
        }
    }
    Ok(best)
}

/// Repeatedly searches an 11-point-per-axis grid on the box of half-width
/// `radius` around the incumbent (free coordinates `0..m-1`, the last one
/// fills the remainder), shrinking the box fourfold each round.
fn refine_local(h: &EntropyPair, w: &Channel, start: &[f64], step: f64) -> Result<(f64, Vec<f64>)> {
    const SIDE: usize = 11;
    let m = start.len();
    let free = m - 1;
    let mut best = (mi_at(h, w, start)?, start.to_vec());
    let mut radius = step;
    while radius > REFINE_TOLERANCE {
        let center = best.1.clone();
        for idx in 0..SIDE.pow(free as u32) {
            let mut p = vec![0.0; m];
            let mut rest = idx;
            for i in 0..free {
                let t = (rest % SIDE) as f64 / (SIDE - 1) as f64 * 2.0 - 1.0;
                rest /= SIDE;
                p[i] = center[i] + t * radius;
            }
            let tail = 1.0 - p[..free].iter().sum::<f64>();
            if p[..free].iter().any(|v| *v < 0.0) || tail < 0.0 {
                continue;
            }
            p[free] = tail;
            let v = mi_at(h, w, &p)?;
            if v > best.0 {
                best = (v, p);
            }
        }
        radius /= 4.0;
    }
    Ok(best)
}
