//! Weight densities on `[1, ∞)`, weight sampling, and the moment integrals
//! `A(α) = ∫ φ^{1-α}` that drive the asymptotics of the graph model.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::erf;

use crate::error::{CameoError, Result};
use crate::quad;
use crate::rng::{self, Domain};

const QUAD_ABS_TOL: f64 = 1e-10;
const QUAD_REL_TOL: f64 = 1e-10;
/// Improper integrals are cut off at `quantile(1 - CUTOFF_SURVIVAL)`.
pub const CUTOFF_SURVIVAL: f64 = 1e-12;

/// A probability density `φ` supported on `[1, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum WeightDistribution {
    /// `φ(ω) = (γ-1) ω^{-γ}`, `γ > 1`.
    PowerLaw { gamma: f64 },
    /// `φ(ω) = rate · e^{-rate(ω-1)}`.
    Exponential { rate: f64 },
    /// `φ(ω) = 2/(scale·√π) · e^{-((ω-1)/scale)²}`.
    GaussianTail { scale: f64 },
}

/// Value of a moment integral that may diverge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Moment {
    Finite(f64),
    Divergent,
}

impl Moment {
    pub fn finite(self) -> Option<f64> {
        match self {
            Moment::Finite(v) => Some(v),
            Moment::Divergent => None,
        }
    }

    pub fn is_divergent(self) -> bool {
        matches!(self, Moment::Divergent)
    }
}

impl fmt::Display for Moment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Moment::Finite(v) => write!(f, "{v}"),
            Moment::Divergent => f.write_str("divergent"),
        }
    }
}

impl WeightDistribution {
    pub fn power_law(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 1.0) {
            return Err(CameoError::domain(format!("power-law exponent must be > 1, got {gamma}")));
        }
        Ok(Self::PowerLaw { gamma })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(CameoError::domain(format!("exponential rate must be > 0, got {rate}")));
        }
        Ok(Self::Exponential { rate })
    }

    pub fn gaussian_tail(scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(CameoError::domain(format!("gaussian-tail scale must be > 0, got {scale}")));
        }
        Ok(Self::GaussianTail { scale })
    }

    /// True for the families that decay faster than any power.
    pub fn is_fast_decay(&self) -> bool {
        !matches!(self, Self::PowerLaw { .. })
    }

    /// `ln φ(ω)`; `-∞` outside the support.
    pub fn log_density(&self, omega: f64) -> f64 {
        if omega < 1.0 {
            return f64::NEG_INFINITY;
        }
        match *self {
            Self::PowerLaw { gamma } => (gamma - 1.0).ln() - gamma * omega.ln(),
            Self::Exponential { rate } => rate.ln() - rate * (omega - 1.0),
            Self::GaussianTail { scale } => {
                let t = (omega - 1.0) / scale;
                (2.0 / (scale * std::f64::consts::PI.sqrt())).ln() - t * t
            }
        }
    }

    pub fn density(&self, omega: f64) -> f64 {
        if omega < 1.0 {
            0.0
        } else {
            self.log_density(omega).exp()
        }
    }

    /// `d ln φ / dω` on the support.
    pub fn log_density_slope(&self, omega: f64) -> f64 {
        match *self {
            Self::PowerLaw { gamma } => -gamma / omega,
            Self::Exponential { rate } => -rate,
            Self::GaussianTail { scale } => -2.0 * (omega - 1.0) / (scale * scale),
        }
    }

    /// `Dφ(ω)` on the support.
    pub fn density_derivative(&self, omega: f64) -> f64 {
        self.density(omega) * self.log_density_slope(omega)
    }

    pub fn cdf(&self, omega: f64) -> f64 {
        if omega <= 1.0 {
            return 0.0;
        }
        match *self {
            Self::GaussianTail { scale } => erf::erf((omega - 1.0) / scale),
            _ => 1.0 - self.survival(omega),
        }
    }

    /// `F*(ω) = 1 - F(ω)`, computed without cancellation.
    pub fn survival(&self, omega: f64) -> f64 {
        if omega <= 1.0 {
            return 1.0;
        }
        match *self {
            Self::PowerLaw { gamma } => omega.powf(1.0 - gamma),
            Self::Exponential { rate } => (-rate * (omega - 1.0)).exp(),
            Self::GaussianTail { scale } => erf::erfc((omega - 1.0) / scale),
        }
    }

    /// `F^{-1}(u)` for `u ∈ [0, 1)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&u) {
            return Err(CameoError::domain(format!("quantile argument must lie in [0, 1), got {u}")));
        }
        if let Self::GaussianTail { scale } = *self {
            if u < 0.5 {
                return Ok(1.0 + scale * erf::erf_inv(u));
            }
        }
        Ok(self.inverse_survival(1.0 - u))
    }

    /// `(F*)^{-1}(s)` for `s ∈ (0, 1]`; precise deep in the tail.
    pub fn inverse_survival(&self, s: f64) -> f64 {
        debug_assert!(s > 0.0 && s <= 1.0);
        match *self {
            Self::PowerLaw { gamma } => s.powf(-1.0 / (gamma - 1.0)),
            Self::Exponential { rate } => 1.0 - s.ln() / rate,
            Self::GaussianTail { scale } => {
                if s >= 1.0 {
                    1.0
                } else {
                    1.0 + scale * erf::erfc_inv(s)
                }
            }
        }
    }

    /// `A(α) = ∫_1^∞ φ^{1-α}(ω) dω`, or [`Moment::Divergent`] when `α ∉ B(φ)`.
    ///
    /// Divergence is decided from the decay exponents, never numerically.
    pub fn moment_a(&self, alpha: f64) -> Moment {
        let e = 1.0 - alpha;
        match *self {
            Self::PowerLaw { gamma } => {
                let decay = gamma * e;
                if decay <= 1.0 {
                    Moment::Divergent
                } else {
                    Moment::Finite((gamma - 1.0).powf(e) / (decay - 1.0))
                }
            }
            Self::Exponential { rate } => {
                if e <= 0.0 {
                    Moment::Divergent
                } else {
                    Moment::Finite(rate.powf(-alpha) / e)
                }
            }
            Self::GaussianTail { scale } => {
                if e <= 0.0 {
                    Moment::Divergent
                } else {
                    let k = 2.0 / (scale * std::f64::consts::PI.sqrt());
                    Moment::Finite(k.powf(e) * 0.5 * scale * (std::f64::consts::PI / e).sqrt())
                }
            }
        }
    }

    /// Numeric `∫_1^{upper} φ^{1-β}(ω) dω`.
    pub fn integrate_power(&self, beta: f64, upper: f64) -> f64 {
        let e = 1.0 - beta;
        let f = |w: f64| (e * self.log_density(w)).exp();
        if upper <= 1.0 {
            return 0.0;
        }
        match self {
            Self::PowerLaw { .. } => quad::integrate_log(f, 1.0, upper, QUAD_ABS_TOL, QUAD_REL_TOL).value,
            _ => quad::integrate(f, 1.0, upper, QUAD_ABS_TOL, QUAD_REL_TOL).value,
        }
    }

    /// Truncated moment `∫_1^{F^{-1}(1-1/n)} φ^{1-β}(ω) dω`.
    pub fn truncated_moment(&self, beta: f64, n: u64) -> Result<f64> {
        if n < 2 {
            return Err(CameoError::domain("truncated moment needs n >= 2"));
        }
        Ok(self.integrate_power(beta, self.expected_max_weight(n)))
    }

    /// `F^{-1}(1 - 1/n)`, the typical size of the largest of `n` weights.
    pub fn expected_max_weight(&self, n: u64) -> f64 {
        if n <= 1 {
            return 1.0;
        }
        self.inverse_survival(1.0 / n as f64)
    }

    /// Density exponent `θ` of `y = φ(ω)^{-β}`, i.e. `ψ(y) = y^{-θ + o(1)}`.
    pub fn induced_tail_exponent(&self, beta: f64) -> Result<f64> {
        if beta.is_nan() || beta <= 0.0 {
            return Err(CameoError::domain(format!("induced tail needs beta > 0, got {beta}")));
        }
        Ok(match *self {
            Self::PowerLaw { gamma } => 1.0 + 1.0 / beta - 1.0 / (beta * gamma),
            _ => 1.0 + 1.0 / beta,
        })
    }

    /// `log(-φ/Dφ) / log φ` at each grid point.
    ///
    /// Tends to zero for the fast-decay families and stays bounded away
    /// from zero for the power law. Points where `Dφ = 0` yield NaN.
    pub fn regularity_exponent(&self, omega_grid: &[f64]) -> Vec<f64> {
        omega_grid
            .iter()
            .map(|&w| {
                let slope = self.log_density_slope(w);
                if slope == 0.0 {
                    return f64::NAN;
                }
                let num = (-1.0 / slope).ln();
                if num == 0.0 {
                    0.0
                } else {
                    num / self.log_density(w)
                }
            })
            .collect()
    }
}

impl fmt::Display for WeightDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PowerLaw { gamma } => write!(f, "powerlaw:gamma={gamma}"),
            Self::Exponential { rate } => write!(f, "exponential:rate={rate}"),
            Self::GaussianTail { scale } => write!(f, "gaussiantail:scale={scale}"),
        }
    }
}

impl TryFrom<String> for WeightDistribution {
    type Error = CameoError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<WeightDistribution> for String {
    fn from(d: WeightDistribution) -> Self {
        d.to_string()
    }
}

impl FromStr for WeightDistribution {
    type Err = CameoError;

    /// Parses `powerlaw:gamma=3.0`, `exponential:rate=1.0` or `gaussiantail:scale=1.0`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, param) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| CameoError::parse(format!("distribution spec `{s}` lacks `kind:key=value`")))?;
        let (key, value) = param
            .split_once('=')
            .ok_or_else(|| CameoError::parse(format!("distribution parameter `{param}` lacks `=`")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| CameoError::parse(format!("bad number `{value}` in `{s}`")))?;
        match (kind.trim().to_ascii_lowercase().as_str(), key.trim()) {
            ("powerlaw", "gamma") => Self::power_law(value),
            ("exponential", "rate") => Self::exponential(value),
            ("gaussiantail", "scale") => Self::gaussian_tail(value),
            _ => Err(CameoError::parse(format!("unknown distribution spec `{s}`"))),
        }
    }
}

/// `n` i.i.d. weights with the derived visibilities `y_i = φ(ω_i)^{-α}`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSample {
    pub omegas: Vec<f64>,
    pub ys: Vec<f64>,
    pub alpha: f64,
    /// `S = Σ y_i`.
    pub normalizer: f64,
    /// Seed of the generating stream; `None` for samples assembled by hand or read from disk.
    pub seed: Option<u64>,
    pub distribution: Option<WeightDistribution>,
}

impl WeightSample {
    /// Assembles a sample from explicit values.
    pub fn from_parts(omegas: Vec<f64>, ys: Vec<f64>, alpha: f64) -> Result<Self> {
        if omegas.is_empty() || omegas.len() != ys.len() {
            return Err(CameoError::domain("weight sample needs equally long, nonempty omega and y lists"));
        }
        if let Some(w) = omegas.iter().find(|w| w.is_nan() || **w < 1.0) {
            return Err(CameoError::domain(format!("weight {w} lies outside [1, inf)")));
        }
        if let Some(y) = ys.iter().find(|y| !(y.is_finite() && **y > 0.0)) {
            return Err(CameoError::domain(format!("visibility {y} is not a positive finite number")));
        }
        let normalizer = ys.iter().sum();
        Ok(Self { omegas, ys, alpha, normalizer, seed: None, distribution: None })
    }

    /// Sample whose weights are irrelevant; every `ω_i` is set to 1.
    pub fn from_ys(ys: Vec<f64>, alpha: f64) -> Result<Self> {
        Self::from_parts(vec![1.0; ys.len()], ys, alpha)
    }

    pub fn n(&self) -> usize {
        self.omegas.len()
    }

    /// Writes the CSV form `index,omega,y`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "index,omega,y")?;
        for (i, (w, y)) in self.omegas.iter().zip(&self.ys).enumerate() {
            writeln!(out, "{i},{w},{y}")?;
        }
        Ok(())
    }

    /// Reads the CSV form written by [`WeightSample::write_csv`].
    pub fn read_csv<R: BufRead>(input: R, alpha: f64) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines.next().transpose()?;
        if header.as_deref().map(str::trim) != Some("index,omega,y") {
            return Err(CameoError::parse("weights CSV must start with `index,omega,y`"));
        }
        let mut omegas = Vec::new();
        let mut ys = Vec::new();
        for (row, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(CameoError::parse(format!("weights CSV row {row}: expected 3 fields")));
            }
            let index: usize = fields[0]
                .trim()
                .parse()
                .map_err(|_| CameoError::parse(format!("weights CSV row {row}: bad index")))?;
            if index != omegas.len() {
                return Err(CameoError::parse(format!("weights CSV row {row}: index {index} out of order")));
            }
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| CameoError::parse(format!("weights CSV row {row}: bad number `{s}`")))
            };
            omegas.push(parse(fields[1])?);
            ys.push(parse(fields[2])?);
        }
        Self::from_parts(omegas, ys, alpha)
    }
}

/// Draws `n` weights by inverse-CDF sampling from stream `(seed, Weights, 0)`.
pub fn sample_weights(dist: &WeightDistribution, n: usize, alpha: f64, seed: u64) -> Result<WeightSample> {
    if n == 0 {
        return Err(CameoError::domain("cannot sample zero weights"));
    }
    let mut rng = rng::stream(seed, Domain::Weights, 0);
    let omegas: Vec<f64> = (0..n).map(|_| dist.inverse_survival(rng::open_unit(&mut rng))).collect();
    let ys: Vec<f64> = omegas.iter().map(|&w| (-alpha * dist.log_density(w)).exp()).collect();
    let normalizer = ys.iter().sum();
    Ok(WeightSample { omegas, ys, alpha, normalizer, seed: Some(seed), distribution: Some(*dist) })
}

/// `φ(ω)^{-β}` for every weight in the sample.
pub fn induced_values(dist: &WeightDistribution, omegas: &[f64], beta: f64) -> Vec<f64> {
    omegas.iter().map(|&w| (-beta * dist.log_density(w)).exp()).collect()
}
