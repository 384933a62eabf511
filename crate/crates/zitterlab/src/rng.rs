//! Seeded pseudo-random numbers with a pinned, documented algorithm.
//!
//! Reports must be byte-identical across runs and across implementations for
//! the same seed, so the generator is spelled out exactly rather than
//! delegated to a library whose stream could change between versions:
//!
//! 1. The user seed is mixed once through **splitmix64**
//!    (`z = (seed + 0x9E3779B97F4A7C15); z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
//!    z = (z ^ (z >> 27)) * 0x94D049BB133111EB; state = z ^ (z >> 31)`),
//!    which also rescues the degenerate all-zero state.
//! 2. Each draw advances **xorshift64\***:
//!    `s ^= s >> 12; s ^= s << 25; s ^= s >> 27; output = s·0x2545F4914F6CDD1D (mod 2⁶⁴)`.
//! 3. A float in [0,1) takes the top 53 bits: `(output >> 11) · 2⁻⁵³`.

/// Deterministic xorshift64* generator (see module docs for the exact stream).
#[derive(Debug, Clone)]
pub struct XorShift64Star {
    state: u64,
}

impl XorShift64Star {
    /// Create a generator from a user seed (any value, including 0).
    pub fn new(seed: u64) -> Self {
        // splitmix64 scrambles low-entropy seeds and never yields 0.
        let mut z = seed.wrapping_add(0x9E3779B97F4A7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        let state = z ^ (z >> 31);
        XorShift64Star {
            state: if state == 0 {
                0x9E3779B97F4A7C15
            } else {
                state
            },
        }
    }

    /// Next raw 64-bit word of the stream.
    pub fn next_u64(&mut self) -> u64 {
        self.state ^= self.state >> 12;
        self.state ^= self.state << 25;
        self.state ^= self.state >> 27;
        self.state.wrapping_mul(0x2545F4914F6CDD1D)
    }

    /// Uniform float in [0, 1) with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform float in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}
