//! Deterministic seeded sampling for identity checks.
//!
//! All randomized harnesses in this crate draw from [`SplitMix64`] so that a
//! fixed seed reproduces the same sample stream on every platform.

use num_complex::Complex64 as C64;

/// SplitMix64 pseudo-random generator (Steele, Lea, Flood 2014).
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Complex number with real and imaginary parts uniform in the given ranges.
    pub fn complex_in(&mut self, re: (f64, f64), im: (f64, f64)) -> C64 {
        C64::new(self.uniform_in(re.0, re.1), self.uniform_in(im.0, im.1))
    }

    /// Complex number with modulus uniform in (r_min, r_max) and uniform phase.
    pub fn complex_annulus(&mut self, r_min: f64, r_max: f64) -> C64 {
        let r = self.uniform_in(r_min, r_max);
        let phi = self.uniform_in(0.0, std::f64::consts::TAU);
        C64::from_polar(r, phi)
    }

    /// A vector of pairwise-separated complex points in a box around the origin.
    ///
    /// Resamples a coordinate until it keeps distance `floor` from the ones
    /// already drawn (the box is large enough that this terminates quickly).
    pub fn separated_points(&mut self, count: usize, scale: f64, floor: f64) -> Vec<C64> {
        let mut out: Vec<C64> = Vec::with_capacity(count);
        while out.len() < count {
            let cand = self.complex_in((-scale, scale), (-scale, scale));
            if out.iter().all(|&p| (p - cand).norm() > floor) {
                out.push(cand);
            }
        }
        out
    }
}
