//! Seeded random instances.
//!
//! The generator is fixed so fixtures can be regenerated by any
//! implementation from the seed alone:
//!
//! * the bit source is SplitMix64 (`state += 0x9E3779B97F4A7C15`, then the
//!   standard two xor-shift-multiply rounds and a final `z ^ (z >> 31)`);
//! * a uniform draw is `(next >> 11) * 2^-53`, in `[0, 1)`;
//! * a random pmf of length `m` draws `e_i = -ln(1 - u_i)` for `i = 0..m`
//!   in order and normalizes (a flat Dirichlet sample);
//! * a random channel draws its rows in order, each as a random pmf.

use crate::simplex::{Channel, Pmf};

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        (self.next_f64() * n as f64) as usize
    }

    pub fn pmf(&mut self, m: usize) -> Pmf {
        let draws: Vec<f64> = (0..m).map(|_| -(1.0 - self.next_f64()).ln()).collect();
        // all-zero draws need 2^-53 odds m times over; resample the first
        // entry if it ever happens
        Pmf::new(draws).unwrap_or_else(|_| Pmf::point_mass(m, 0))
    }

    pub fn channel(&mut self, inputs: usize, outputs: usize) -> Channel {
        let rows: Vec<Pmf> = (0..inputs).map(|_| self.pmf(outputs)).collect();
        Channel::from_pmfs(&rows).expect("random rows are valid pmfs")
    }
}

/// Channel drawn from `seed` with the documented generator.
pub fn random_channel(seed: u64, inputs: usize, outputs: usize) -> Channel {
    SplitMix64::new(seed).channel(inputs, outputs)
}
