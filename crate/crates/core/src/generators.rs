//! Bivariate constructions with prescribed regular variation.
//!
//! Every scheme is a pure function of `(spec, n, seed, partitions)`. A batch
//! of `n` points is cut into `partitions` contiguous chunks; chunk `j` draws
//! from sub-stream `j` of the seed, so the output depends on the declared
//! partition count but not on the thread pool that evaluates the chunks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{HrvError, Result};
use crate::sampling::{bernoulli, Probability, RngStream, ScalarLaw, TailIndex};

pub type Pair = (f64, f64);

/// Law of the first-coordinate share `w` of a point `(w, 1 - w)` on the L1 sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AngularLawE {
    Uniform01,
    /// `a` with probability `prob_a`, else `b`.
    TwoPoint {
        a: f64,
        b: f64,
        prob_a: Probability,
    },
    PointMass {
        w: f64,
    },
}

impl AngularLawE {
    pub fn draw(&self, rng: &mut RngStream) -> f64 {
        match *self {
            AngularLawE::Uniform01 => rng.uniform_open(),
            AngularLawE::TwoPoint { a, b, prob_a } => {
                if bernoulli(prob_a, rng) {
                    a
                } else {
                    b
                }
            }
            AngularLawE::PointMass { w } => w,
        }
    }

    fn validate(&self) -> Result<()> {
        let in_unit = |w: f64| (0.0..=1.0).contains(&w);
        let ok = match *self {
            AngularLawE::Uniform01 => true,
            AngularLawE::TwoPoint { a, b, .. } => in_unit(a) && in_unit(b),
            AngularLawE::PointMass { w } => in_unit(w),
        };
        if ok {
            Ok(())
        } else {
            Err(HrvError::Config(format!(
                "angular law {self:?} puts mass outside [0, 1]"
            )))
        }
    }
}

/// Angular law on the two half-lines of the [axes] sphere:
/// `B(θ₁, 1) + (1 - B)(1, θ₂)` with `B ~ Bernoulli(p)`, `θᵢ ~ gᵢ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HiddenAngularSpec {
    pub p: Probability,
    pub g1: ScalarLaw,
    pub g2: ScalarLaw,
}

impl HiddenAngularSpec {
    fn validate(&self) -> Result<()> {
        for (name, g) in [("g1", &self.g1), ("g2", &self.g2)] {
            g.validate()?;
            if g.lower_bound() < 1.0 {
                return Err(HrvError::Config(format!(
                    "{name} must be supported on [1, inf), got {g:?}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialAngularE {
    pub alpha: TailIndex,
    pub angular: AngularLawE,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HiddenE0 {
    pub alpha0: TailIndex,
    pub angular: HiddenAngularSpec,
}

/// Pareto magnitude placed on the horizontal axis with probability `axis_prob`,
/// on the vertical axis otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxesY {
    pub alpha: TailIndex,
    pub axis_prob: Probability,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mixture {
    pub mix_prob: Probability,
    pub y: AxesY,
    pub v: HiddenE0,
}

/// Asymptotically independent summand of the additive model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdditiveY {
    Axes(AxesY),
    /// Two iid Pareto(alpha) coordinates.
    IidPair {
        alpha: TailIndex,
    },
}

impl AdditiveY {
    pub fn alpha(&self) -> TailIndex {
        match self {
            AdditiveY::Axes(y) => y.alpha,
            AdditiveY::IidPair { alpha } => *alpha,
        }
    }

    pub fn draw(&self, rng: &mut RngStream) -> Pair {
        match self {
            AdditiveY::Axes(y) => {
                draw_axes(&ScalarLaw::Pareto { alpha: y.alpha }, y.axis_prob, rng)
            }
            AdditiveY::IidPair { alpha } => {
                let law = ScalarLaw::Pareto { alpha: *alpha };
                (law.draw(rng), law.draw(rng))
            }
        }
    }
}

/// Summand carrying the hidden regular variation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdditiveV {
    /// `(V₁, V₂)` iid Pareto(alpha_star); hidden index `2·alpha_star`.
    IidParetoPair {
        alpha_star: TailIndex,
    },
    HiddenE0(HiddenE0),
    /// `B·R(θ, 1) + (1 - B)·R(1, θ)`, `R ~ Pareto(alpha0)`, `θ ~ Pareto(alpha_star)`, `B ~ Bernoulli(p)`.
    RadialRatio {
        alpha0: TailIndex,
        alpha_star: TailIndex,
        p: Probability,
    },
}

impl AdditiveV {
    pub fn draw(&self, rng: &mut RngStream) -> Pair {
        match self {
            AdditiveV::IidParetoPair { alpha_star } => {
                let law = ScalarLaw::Pareto { alpha: *alpha_star };
                (law.draw(rng), law.draw(rng))
            }
            AdditiveV::HiddenE0(h) => draw_hidden(h, rng).pair,
            AdditiveV::RadialRatio { .. } => {
                draw_hidden(&self.as_hidden().expect("radial ratio"), rng).pair
            }
        }
    }

    /// The equivalent hidden-E0 construction, when one exists.
    pub fn as_hidden(&self) -> Option<HiddenE0> {
        match *self {
            AdditiveV::HiddenE0(h) => Some(h),
            AdditiveV::RadialRatio {
                alpha0,
                alpha_star,
                p,
            } => {
                let theta = ScalarLaw::Pareto { alpha: alpha_star };
                Some(HiddenE0 {
                    alpha0,
                    angular: HiddenAngularSpec {
                        p,
                        g1: theta,
                        g2: theta,
                    },
                })
            }
            AdditiveV::IidParetoPair { .. } => None,
        }
    }

    /// `(alpha_star, alpha0)` when both are defined by the construction.
    pub fn indices(&self) -> Option<(f64, f64)> {
        match *self {
            AdditiveV::IidParetoPair { alpha_star } => {
                Some((alpha_star.value(), 2.0 * alpha_star.value()))
            }
            AdditiveV::RadialRatio {
                alpha0, alpha_star, ..
            } => Some((alpha_star.value(), alpha0.value())),
            AdditiveV::HiddenE0(_) => None,
        }
    }
}

/// Which of the three additive regimes a parameterization falls into,
/// by the sign of `alpha_star - (alpha0 - alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// negative: hidden index of the sum is `alpha + alpha_star`
    Case1,
    /// positive: hidden measure of the sum is that of V
    Case2,
    /// zero
    Case3,
}

impl Regime {
    pub fn classify(alpha: f64, alpha_star: f64, alpha0: f64) -> Regime {
        let d = alpha_star - (alpha0 - alpha);
        if d.abs() <= 1e-12 {
            Regime::Case3
        } else if d < 0.0 {
            Regime::Case1
        } else {
            Regime::Case2
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Additive {
    pub y: AdditiveY,
    pub v: AdditiveV,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<Regime>,
}

impl Additive {
    pub fn computed_regime(&self) -> Option<Regime> {
        self.v
            .indices()
            .map(|(star, a0)| Regime::classify(self.y.alpha().value(), star, a0))
    }
}

/// Serializable description of one generation scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum GeneratorSpec {
    RadialAngularE(RadialAngularE),
    HiddenE0(HiddenE0),
    AxesY(AxesY),
    Mixture(Mixture),
    Additive(Additive),
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            GeneratorSpec::RadialAngularE(s) => s.angular.validate(),
            GeneratorSpec::HiddenE0(s) => s.angular.validate(),
            GeneratorSpec::AxesY(_) => Ok(()),
            GeneratorSpec::Mixture(m) => m.v.angular.validate(),
            GeneratorSpec::Additive(a) => {
                if let AdditiveV::HiddenE0(h) = &a.v {
                    h.angular.validate()?;
                }
                match (a.regime, a.computed_regime()) {
                    (Some(tag), Some(actual)) if tag != actual => Err(HrvError::Config(format!(
                        "regime tag {tag:?} contradicts the parameters, which give {actual:?}"
                    ))),
                    (Some(tag), None) => Err(HrvError::Config(format!(
                        "regime tag {tag:?} given but V has no alpha_star"
                    ))),
                    _ => Ok(()),
                }
            }
        }
    }

    /// Short content hash of the canonical JSON form.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_string(self).expect("spec serializes");
        let digest = Sha256::digest(json.as_bytes());
        hex::encode(&digest[..8])
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BatchMeta {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec_fingerprint: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partitions: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rng: Option<String>,
}

/// `n` nonnegative bivariate observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub pairs: Vec<Pair>,
    pub meta: BatchMeta,
}

impl SampleBatch {
    /// Wraps externally supplied data; coordinates must be finite and nonnegative.
    pub fn from_pairs(pairs: Vec<Pair>) -> Result<Self> {
        if let Some((i, p)) = pairs
            .iter()
            .enumerate()
            .find(|(_, p)| !(p.0 >= 0.0 && p.1 >= 0.0 && p.0.is_finite() && p.1.is_finite()))
        {
            return Err(HrvError::Domain(format!(
                "observation {} = ({}, {}) is not a finite nonnegative pair",
                i + 1,
                p.0,
                p.1
            )));
        }
        let n = pairs.len();
        Ok(SampleBatch {
            pairs,
            meta: BatchMeta {
                n,
                ..Default::default()
            },
        })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn first(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn second(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.1).collect()
    }

    pub fn mins(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.0.min(p.1)).collect()
    }

    pub fn maxs(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.0.max(p.1)).collect()
    }
}

/// One hidden-E0 draw with its internal components exposed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HiddenDraw {
    pub radius: f64,
    pub theta: f64,
    /// `B = 1`: the point lies on the horizontal branch `(θ₁, 1)`.
    pub first_branch: bool,
    pub pair: Pair,
}

pub fn draw_hidden(spec: &HiddenE0, rng: &mut RngStream) -> HiddenDraw {
    let radius = ScalarLaw::Pareto { alpha: spec.alpha0 }.draw(rng);
    let first_branch = bernoulli(spec.angular.p, rng);
    let theta = if first_branch {
        spec.angular.g1.draw(rng)
    } else {
        spec.angular.g2.draw(rng)
    };
    let pair = if first_branch {
        (radius * theta, radius)
    } else {
        (radius, radius * theta)
    };
    HiddenDraw {
        radius,
        theta,
        first_branch,
        pair,
    }
}

fn draw_axes(law: &ScalarLaw, axis_prob: Probability, rng: &mut RngStream) -> Pair {
    let horizontal = bernoulli(axis_prob, rng);
    let xi = law.draw(rng);
    if horizontal {
        (xi, 0.0)
    } else {
        (0.0, xi)
    }
}

fn draw_radial_angular(spec: &RadialAngularE, rng: &mut RngStream) -> Pair {
    let r = ScalarLaw::Pareto { alpha: spec.alpha }.draw(rng);
    let w = spec.angular.draw(rng);
    // Take the larger share by product and the smaller by difference, so
    // the difference is exact and z1 + z2 == r holds bit for bit.
    if w >= 0.5 {
        let z1 = r * w;
        (z1, r - z1)
    } else {
        let z2 = r * (1.0 - w);
        (r - z2, z2)
    }
}

/// Runs `draw(main, aux)` for every point; each partition owns a main stream
/// and an auxiliary stream derived from it.
fn generate_with<T, F>(n: usize, rng: &RngStream, partitions: usize, draw: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut RngStream, &mut RngStream) -> T + Sync,
{
    let partitions = partitions.max(1);
    (0..partitions)
        .into_par_iter()
        .map(|j| {
            let start = j * n / partitions;
            let end = (j + 1) * n / partitions;
            let mut main = rng.substream(j as u64);
            let mut aux = main.substream(1);
            (start..end)
                .map(|_| draw(&mut main, &mut aux))
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

fn batch(pairs: Vec<Pair>) -> SampleBatch {
    let n = pairs.len();
    SampleBatch {
        pairs,
        meta: BatchMeta {
            n,
            ..Default::default()
        },
    }
}

pub fn gen_radial_angular_e(
    spec: &RadialAngularE,
    n: usize,
    rng: &RngStream,
    partitions: usize,
) -> SampleBatch {
    batch(generate_with(n, rng, partitions, |r, _| {
        draw_radial_angular(spec, r)
    }))
}

pub fn gen_hidden_e0(spec: &HiddenE0, n: usize, rng: &RngStream, partitions: usize) -> SampleBatch {
    batch(generate_with(n, rng, partitions, |r, _| {
        draw_hidden(spec, r).pair
    }))
}

/// [`gen_hidden_e0`] returning the internal radial/angular draws alongside the batch.
pub fn gen_hidden_e0_traced(
    spec: &HiddenE0,
    n: usize,
    rng: &RngStream,
    partitions: usize,
) -> (SampleBatch, Vec<HiddenDraw>) {
    let draws = generate_with(n, rng, partitions, |r, _| draw_hidden(spec, r));
    (batch(draws.iter().map(|d| d.pair).collect()), draws)
}

pub fn gen_axes_y(spec: &AxesY, n: usize, rng: &RngStream, partitions: usize) -> SampleBatch {
    let law = ScalarLaw::Pareto { alpha: spec.alpha };
    batch(generate_with(n, rng, partitions, |r, _| {
        draw_axes(&law, spec.axis_prob, r)
    }))
}

pub fn gen_mixture(spec: &Mixture, n: usize, rng: &RngStream, partitions: usize) -> SampleBatch {
    let law = ScalarLaw::Pareto {
        alpha: spec.y.alpha,
    };
    batch(generate_with(n, rng, partitions, |r, _| {
        if bernoulli(spec.mix_prob, r) {
            draw_axes(&law, spec.y.axis_prob, r)
        } else {
            draw_hidden(&spec.v, r).pair
        }
    }))
}

/// `Z = Y + V`; `Y` draws from each partition's main stream, `V` from its auxiliary stream.
pub fn gen_additive(spec: &Additive, n: usize, rng: &RngStream, partitions: usize) -> SampleBatch {
    additive_with(|r| spec.y.draw(r), &spec.v, n, rng, partitions)
}

fn additive_with<Y>(
    y: Y,
    v: &AdditiveV,
    n: usize,
    rng: &RngStream,
    partitions: usize,
) -> SampleBatch
where
    Y: Fn(&mut RngStream) -> Pair + Sync,
{
    batch(generate_with(n, rng, partitions, |main, aux| {
        let a = y(main);
        let b = v.draw(aux);
        (a.0 + b.0, a.1 + b.1)
    }))
}

/// Validates `spec` and generates `n` points from `seed`, stamping provenance metadata.
pub fn generate(
    spec: &GeneratorSpec,
    n: usize,
    seed: u64,
    partitions: usize,
) -> Result<SampleBatch> {
    spec.validate()?;
    let partitions = partitions.max(1);
    let rng = RngStream::new(seed);
    let mut out = match spec {
        GeneratorSpec::RadialAngularE(s) => gen_radial_angular_e(s, n, &rng, partitions),
        GeneratorSpec::HiddenE0(s) => gen_hidden_e0(s, n, &rng, partitions),
        GeneratorSpec::AxesY(s) => gen_axes_y(s, n, &rng, partitions),
        GeneratorSpec::Mixture(s) => gen_mixture(s, n, &rng, partitions),
        GeneratorSpec::Additive(s) => gen_additive(s, n, &rng, partitions),
    };
    out.meta = BatchMeta {
        n,
        spec_fingerprint: Some(spec.fingerprint()),
        seed: Some(seed),
        partitions: Some(partitions),
        rng: Some(RngStream::ALGORITHM.to_string()),
    };
    Ok(out)
}
