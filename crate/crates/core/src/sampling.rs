//! Scalar laws, the seeded RNG contract, and the small newtypes shared by
//! generators and diagnostics.

use std::fmt;

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HrvError, Result};

/// Positive tail exponent (α, α₀, α⋆ all live here).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct TailIndex(f64);

impl TailIndex {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(TailIndex(value))
        } else {
            Err(HrvError::Config(format!(
                "tail index must be a finite positive number, got {value}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for TailIndex {
    type Error = HrvError;
    fn try_from(value: f64) -> Result<Self> {
        TailIndex::new(value)
    }
}

impl From<TailIndex> for f64 {
    fn from(t: TailIndex) -> f64 {
        t.0
    }
}

impl fmt::Display for TailIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Probability(f64);

impl Probability {
    pub fn new(p: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&p) {
            Ok(Probability(p))
        } else {
            Err(HrvError::Config(format!(
                "probability must lie in [0, 1], got {p}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Probability {
    type Error = HrvError;
    fn try_from(value: f64) -> Result<Self> {
        Probability::new(value)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

/// One-dimensional building-block laws for radii, axis magnitudes and ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarLaw {
    /// Standard Pareto on `[1, ∞)` with survival `x^(-alpha)`.
    Pareto {
        alpha: TailIndex,
    },
    UnitExponential,
    /// `1 + Exp(1)`, supported on `[1, ∞)`.
    ShiftedUnitExponential,
    PointMass {
        c: f64,
    },
}

impl ScalarLaw {
    pub fn pareto(alpha: f64) -> Result<Self> {
        Ok(ScalarLaw::Pareto {
            alpha: TailIndex::new(alpha)?,
        })
    }

    /// Draw a single variate. `PointMass` consumes no randomness.
    pub fn draw(&self, rng: &mut RngStream) -> f64 {
        match *self {
            ScalarLaw::Pareto { alpha } => rng.uniform_open().powf(-1.0 / alpha.value()),
            ScalarLaw::UnitExponential => -rng.uniform_open().ln(),
            ScalarLaw::ShiftedUnitExponential => 1.0 - rng.uniform_open().ln(),
            ScalarLaw::PointMass { c } => c,
        }
    }

    /// Lower end of the support.
    pub fn lower_bound(&self) -> f64 {
        match *self {
            ScalarLaw::Pareto { .. } | ScalarLaw::ShiftedUnitExponential => 1.0,
            ScalarLaw::UnitExponential => 0.0,
            ScalarLaw::PointMass { c } => c,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if let ScalarLaw::PointMass { c } = self {
            if !c.is_finite() {
                return Err(HrvError::Config(format!(
                    "point mass must be finite, got {c}"
                )));
            }
        }
        Ok(())
    }
}

/// Draw `n` iid variates from `law`.
pub fn sample_scalar(law: &ScalarLaw, n: usize, rng: &mut RngStream) -> Vec<f64> {
    (0..n).map(|_| law.draw(rng)).collect()
}

/// Returns `true` with probability `p`.
pub fn bernoulli(p: Probability, rng: &mut RngStream) -> bool {
    rng.uniform_open() < p.value()
}

/// Like [`bernoulli`] but validates a raw probability first.
pub fn bernoulli_checked(p: f64, rng: &mut RngStream) -> Result<bool> {
    Ok(bernoulli(Probability::new(p)?, rng))
}

/// Seeded, splittable random stream.
///
/// Backed by ChaCha20 keyed from the 64-bit seed; each sub-stream selects a
/// distinct ChaCha stream id, so streams derived from one seed never overlap
/// and the output is identical on every platform.
#[derive(Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha20Rng,
}

impl RngStream {
    /// Identity of the generator, recorded in report metadata.
    pub const ALGORITHM: &'static str =
        "chacha20 (rand_chacha 0.3, seed_from_u64, splitmix64 stream ids, open-interval uniforms)";

    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream { seed, stream, rng }
    }

    /// Independent child stream `index` of this stream. Depends only on
    /// `(seed, stream id, index)`, never on how much of the parent was consumed.
    pub fn substream(&self, index: u64) -> RngStream {
        let id = splitmix64(self.stream ^ splitmix64(index.wrapping_add(0x9E37_79B9_7F4A_7C15)));
        Self::with_stream(self.seed, id)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream
    }

    /// Uniform on the open interval (0, 1).
    pub fn uniform_open(&mut self) -> f64 {
        self.rng.sample(Open01)
    }
}

impl fmt::Debug for RngStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RngStream")
            .field("seed", &self.seed)
            .field("stream", &self.stream)
            .finish_non_exhaustive()
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
