//! Deterministic instance generation from a 64-bit seed.
//!
//! The generator is a xorshift64* stream. Given the state `x`, one step is
//!
//! ```text
//! x ^= x >> 12;  x ^= x << 25;  x ^= x >> 27;  output = x * 0x2545F4914F6CDD1D
//! ```
//!
//! with a seed of 0 replaced by `0x9E3779B97F4A7C15` (the state must never
//! be zero). Draws happen in a fixed order: all edge capacities first, then
//! per task its start, end, demand (redrawn while it exceeds the subpath
//! bottleneck, at most eight times, then clamped), and profit. Identical
//! parameters therefore produce byte-identical instances on every platform.

use crate::model::{Instance, Task};
use crate::Result;

/// xorshift64* stream; `below` reduces by modulo, which is biased for
/// ranges that are not powers of two but keeps the generator portable.
#[derive(Debug, Clone)]
pub struct XorShift64Star {
    state: u64,
}

impl XorShift64Star {
    pub fn new(seed: u64) -> XorShift64Star {
        let state = if seed == 0 { 0x9E3779B97F4A7C15 } else { seed };
        XorShift64Star { state }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state ^= self.state >> 12;
        self.state ^= self.state << 25;
        self.state ^= self.state >> 27;
        self.state.wrapping_mul(0x2545F4914F6CDD1D)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        self.next_u64() % n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfitMode {
    /// Uniform in `1..=100`.
    Uniform,
    /// Demand times span length.
    Proportional,
}

#[derive(Debug, Clone)]
pub struct GenParams {
    pub n: usize,
    pub m: usize,
    pub cap_max: i64,
    pub demand_max: i64,
    pub profit: ProfitMode,
    pub seed: u64,
}

/// Random instance: capacities uniform in `1..=cap_max`, task spans
/// uniform among subpaths, demands uniform in `1..=demand_max` but forced
/// under the subpath bottleneck (so every generated task is deliverable).
pub fn gen_random(params: &GenParams) -> Result<Instance> {
    let GenParams { n, m, cap_max, demand_max, profit, seed } = *params;
    assert!(m >= 1 && cap_max >= 1 && demand_max >= 1, "degenerate parameters");
    let mut rng = XorShift64Star::new(seed);

    let capacities: Vec<i64> = (0..m).map(|_| 1 + rng.below(cap_max as u64) as i64).collect();

    let mut tasks = Vec::with_capacity(n);
    for id in 0..n {
        let s = rng.below(m as u64) as usize;
        let t = s + 1 + rng.below((m - s) as u64) as usize;
        let b = *capacities[s..t].iter().min().expect("nonempty span");
        let mut d = 1 + rng.below(demand_max as u64) as i64;
        for _ in 0..8 {
            if d <= b {
                break;
            }
            d = 1 + rng.below(demand_max as u64) as i64;
        }
        d = d.min(b);
        let w = match profit {
            ProfitMode::Uniform => 1 + rng.below(100) as i64,
            ProfitMode::Proportional => d * (t - s) as i64,
        };
        tasks.push(Task { id, s, t, d, w });
    }
    Instance::new(m, capacities, tasks)
}
