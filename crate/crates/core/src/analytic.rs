//! Path-count combinatorics and threshold predictions.
//!
//! Expanding `Π_{l=0}^{L} (y_{x_l} + y_{x_{l+1}})` over a string of `L + 2`
//! vertices gives `2^{L+1}` monomials. [`PathCoefficients`] counts them by the
//! number `m` of interior vertices that appear squared. The counts follow a
//! 4-state transfer recursion whose reduced 2×2 form `[[1, z], [1, 1]]` has
//! eigenvalues `1 ± √z`, which fixes the growth rate `A + √A₂` of the path
//! expectation and hence the jump value of the path count.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{CameoError, Result};
use crate::graphgen::CameoParams;
use crate::weights::{Moment, WeightDistribution, WeightSample};

/// Largest word length accepted by [`coefficients_bruteforce`].
pub const BRUTEFORCE_MAX_L: usize = 20;

/// `C_m` for `m = 0..=⌊(L+1)/2⌋` at word length `L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathCoefficients {
    pub word_length: usize,
    pub coeffs: Vec<BigUint>,
}

impl PathCoefficients {
    pub fn total(&self) -> BigUint {
        self.coeffs.iter().sum()
    }

    /// `Σ_m C_m z^m` evaluated in floating point.
    pub fn evaluate(&self, z: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * z + c.to_f64().unwrap_or(f64::INFINITY))
    }

    /// Coefficients as `u64` when they all fit.
    pub fn to_u64(&self) -> Option<Vec<u64>> {
        self.coeffs.iter().map(|c| c.to_u64()).collect()
    }
}

fn max_squares(l: usize) -> usize {
    l.div_ceil(2)
}

/// Exact coefficients from the reduced recursion
/// `X'_m = X_m + Y_{m-1}`, `Y'_m = X_m + Y_m`, started at `X = 1 + z`, `Y = 2`.
pub fn path_coefficients(l: usize) -> Result<PathCoefficients> {
    if l == 0 {
        return Err(CameoError::domain("word length must be >= 1"));
    }
    let width = max_squares(l) + 1;
    let mut x = vec![BigUint::zero(); width + 1];
    let mut y = vec![BigUint::zero(); width + 1];
    x[0] = BigUint::one();
    x[1] = BigUint::one();
    y[0] = BigUint::from(2u32);
    for _ in 1..l {
        let mut nx = vec![BigUint::zero(); width + 1];
        let mut ny = vec![BigUint::zero(); width + 1];
        for m in 0..=width {
            nx[m] = if m > 0 { &x[m] + &y[m - 1] } else { x[m].clone() };
            ny[m] = &x[m] + &y[m];
        }
        x = nx;
        y = ny;
    }
    let coeffs = (0..width).map(|m| &x[m] + &y[m]).collect();
    Ok(PathCoefficients { word_length: l, coeffs })
}

/// Coefficients by direct expansion of the `L + 1` binomials.
///
/// Each binomial picks its left or right vertex; a term has `m` squares when
/// `m` interior vertices are picked by both neighbouring binomials.
pub fn coefficients_bruteforce(l: usize) -> Result<PathCoefficients> {
    if l == 0 {
        return Err(CameoError::domain("word length must be >= 1"));
    }
    if l > BRUTEFORCE_MAX_L {
        return Err(CameoError::resource(format!(
            "brute-force expansion limited to L <= {BRUTEFORCE_MAX_L}, got {l}"
        )));
    }
    let binomials = l + 1;
    let mut counts = vec![0u64; max_squares(l) + 1];
    let mut mult = vec![0u8; l + 2];
    for choice in 0u64..(1u64 << binomials) {
        mult.iter_mut().for_each(|m| *m = 0);
        for b in 0..binomials {
            let vertex = b + ((choice >> b) & 1) as usize;
            mult[vertex] += 1;
        }
        let squares = mult[1..=l].iter().filter(|&&m| m == 2).count();
        counts[squares] += 1;
    }
    Ok(PathCoefficients { word_length: l, coeffs: counts.into_iter().map(BigUint::from).collect() })
}

/// Closed forms of `f_X(L, z)` and `f_Y(L, z)`.
pub fn generating_function(l: usize, z: f64) -> Result<(f64, f64)> {
    if l == 0 {
        return Err(CameoError::domain("word length must be >= 1"));
    }
    if !(z >= 0.0 && z.is_finite()) {
        return Err(CameoError::domain(format!("generating function needs finite z >= 0, got {z}")));
    }
    let p = (l - 1) as i32;
    let r = z.sqrt();
    let l1 = 1.0 + r;
    let l2 = 1.0 - r;
    let (e1, e2) = (l1.powi(p), l2.powi(p));
    let even = 0.5 * (e1 + e2);
    // (λ₁^p − λ₂^p) / (2√z), which stays finite as z → 0.
    let odd_over_r = if r < 1e-4 {
        (0..p).map(|i| l1.powi(p - 1 - i) * l2.powi(i)).sum()
    } else {
        0.5 * (e1 - e2) / r
    };
    let fx = 0.5 * (1.0 + z) * (e1 + e2) + r * (e1 - e2);
    let fy = 2.0 * even + odd_over_r + 0.5 * r * (e1 - e2);
    Ok((fx, fy))
}

/// `S(k, A₂, A) = A^k · (f_X + f_Y)(k - 1, A₂/A²)`.
pub fn s_value(k: usize, a: f64, a2: f64) -> Result<f64> {
    if k < 2 {
        return Err(CameoError::domain("s_value needs k >= 2"));
    }
    if !(a > 0.0 && a2 > 0.0) {
        return Err(CameoError::domain(format!("s_value needs A > 0 and A2 > 0, got {a}, {a2}")));
    }
    let (fx, fy) = generating_function(k - 1, a2 / (a * a))?;
    Ok(a.powi(k as i32) * (fx + fy))
}

/// Expected number of `k`-walks from `i` to `j` under the unclamped kernel:
/// `(c/S)^k Σ_{x_1..x_{k-1}} Π (y_{x_l} + y_{x_{l+1}})`, interior vertices unrestricted.
///
/// The walk weight stays in `span{1, y}`, so `k - 1` steps of the 2×2
/// recurrence `(a, b) → (S₁a + S₂b, n·a + S₁b)` evaluate the sum in `O(n + k)`.
pub fn expected_gamma_walks(sample: &WeightSample, c: f64, k: usize, i: usize, j: usize) -> Result<f64> {
    let n = sample.n();
    if k == 0 {
        return Err(CameoError::domain("walk length must be >= 1"));
    }
    if i == j {
        return Err(CameoError::domain("walk endpoints must differ"));
    }
    if i >= n || j >= n {
        return Err(CameoError::domain(format!("vertex out of range for n={n}")));
    }
    let scale = c / sample.normalizer;
    let s1 = sample.normalizer;
    let s2: f64 = sample.ys.iter().map(|y| y * y).sum();
    let nf = n as f64;
    // Weight on x after the first step: scale·(y_i + y_x) = a + b·y_x.
    let (mut a, mut b) = (scale * sample.ys[i], scale);
    for _ in 1..k {
        let na = scale * (s1 * a + s2 * b);
        let nb = scale * (nf * a + s1 * b);
        a = na;
        b = nb;
    }
    Ok(a + b * sample.ys[j])
}

/// Exact `E[Γ_k(i, j)]`: sum over all repetition-free interior strings of the
/// product of clamped edge probabilities. Costs `O(n^{k-1})`.
pub fn expected_gamma_paths_exact(
    params: &CameoParams,
    sample: &WeightSample,
    k: usize,
    i: usize,
    j: usize,
) -> Result<f64> {
    let n = params.n;
    if sample.n() != n || sample.alpha != params.alpha {
        return Err(CameoError::domain("weight sample does not match parameters"));
    }
    if k == 0 || i == j || i >= n || j >= n {
        return Err(CameoError::domain("need k >= 1 and distinct in-range endpoints"));
    }
    let work = (n as f64).powi(k as i32 - 1);
    if work > 5e9 {
        return Err(CameoError::resource(format!("exact path expectation needs ~{work:.1e} strings")));
    }
    let scale = params.c / sample.normalizer;
    let p = |u: usize, v: usize| (scale * (sample.ys[u] + sample.ys[v])).min(1.0);
    let mut used = vec![false; n];
    used[i] = true;
    used[j] = true;

    fn walk(
        p: &dyn Fn(usize, usize) -> f64,
        used: &mut [bool],
        at: usize,
        remaining: usize,
        target: usize,
        acc: f64,
    ) -> f64 {
        if remaining == 1 {
            return acc * p(at, target);
        }
        let mut total = 0.0;
        for x in 0..used.len() {
            if used[x] {
                continue;
            }
            used[x] = true;
            total += walk(p, used, x, remaining - 1, target, acc * p(at, x));
            used[x] = false;
        }
        total
    }

    Ok(walk(&p, &mut used, i, k, j, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `α ∈ (½, 1)`: the path count jumps at a constant length.
    HighAlpha,
    /// `α ∈ [0, ½)` with `B > 1`: the jump sits at `ln n / ln B`.
    LowAlpha,
    /// `α ∈ [0, ½)` with `B ≤ 1`: expected path counts vanish for every length.
    Subcritical,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::HighAlpha => "HighAlpha",
            Regime::LowAlpha => "LowAlpha",
            Regime::Subcritical => "Subcritical",
        })
    }
}

/// Predicted regime and jump value of the path count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdPrediction {
    pub regime: Regime,
    pub c: f64,
    pub alpha: f64,
    pub a: Moment,
    pub a2: Moment,
    /// Growth exponent of the truncated second moment (HighAlpha only).
    pub delta: Option<f64>,
    /// `B = c(1 + √A₂/A)` (LowAlpha and Subcritical).
    pub b: Option<f64>,
    /// `2/δ` (HighAlpha only).
    pub k_c_constant: Option<f64>,
    /// `1/ln B` (LowAlpha only).
    pub k_c_logslope: Option<f64>,
}

impl ThresholdPrediction {
    /// Predicted jump length at size `n`, if the regime has one.
    pub fn k_c(&self, n: usize) -> Option<f64> {
        match self.regime {
            Regime::HighAlpha => self.k_c_constant,
            Regime::LowAlpha => self.k_c_logslope.map(|s| (n as f64).ln() * s),
            Regime::Subcritical => None,
        }
    }

    /// Exponent of `n` in the HighAlpha path-expectation bounds, `δ⌊k/2⌋ - 1`.
    pub fn high_alpha_exponent(&self, k: usize) -> Option<f64> {
        self.delta.map(|d| d * (k / 2) as f64 - 1.0)
    }

    /// Lower and upper bounds on `E[Γ_k(i, j)]` at size `n`, with the
    /// `1 + o(1)` factors dropped. `None` when `A` diverges.
    pub fn expectation_bounds(&self, n: usize, k: usize) -> Option<(f64, f64)> {
        let a = self.a.finite()?;
        let nf = n as f64;
        let kf = k as i32;
        match self.regime {
            Regime::HighAlpha => {
                let e = self.high_alpha_exponent(k)?;
                let lower = (self.c / a).powi(kf) * nf.powf(e);
                let upper = (2.0 * self.c).powi(kf) * nf.powf(e);
                Some((lower, upper))
            }
            Regime::LowAlpha | Regime::Subcritical => {
                let a2 = self.a2.finite()?;
                let lower = self.c.powi(kf) / nf;
                let upper = (self.c / a).powi(kf) * (2.0 * a2).powf(k as f64 / 2.0) / nf;
                Some((lower, upper))
            }
        }
    }

    /// Flat `key=value` block; `n` adds the numeric jump length for LowAlpha.
    pub fn to_key_value(&self, n: Option<usize>) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| x.to_string());
        let k_c = match (self.regime, n) {
            (Regime::HighAlpha, _) => opt(self.k_c_constant),
            (Regime::LowAlpha, Some(n)) => opt(self.k_c(n)),
            _ => "NA".to_string(),
        };
        format!(
            "regime={}\nc={}\nalpha={}\nA={}\nA2={}\ndelta={}\nB={}\nk_c_constant={}\nk_c_logslope={}\nk_c={}\n",
            self.regime,
            self.c,
            self.alpha,
            self.a,
            self.a2,
            opt(self.delta),
            opt(self.b),
            opt(self.k_c_constant),
            opt(self.k_c_logslope),
            k_c
        )
    }
}

/// Regime and jump value of the path count for `(φ, c, α)`.
///
/// `α = ½` and `α ∉ [0, 1)` are boundary cases outside the prediction's scope.
pub fn predict_threshold(dist: &WeightDistribution, c: f64, alpha: f64) -> Result<ThresholdPrediction> {
    if !(c.is_finite() && c > 0.0) {
        return Err(CameoError::domain(format!("need c > 0, got {c}")));
    }
    if alpha == 0.5 {
        return Err(CameoError::domain("boundary case: alpha = 1/2 is not covered"));
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(CameoError::domain(format!("boundary case: alpha must lie in [0, 1), got {alpha}")));
    }
    let a = dist.moment_a(alpha);
    let a2 = dist.moment_a(2.0 * alpha);
    let base = ThresholdPrediction {
        regime: Regime::HighAlpha,
        c,
        alpha,
        a,
        a2,
        delta: None,
        b: None,
        k_c_constant: None,
        k_c_logslope: None,
    };
    if alpha > 0.5 {
        let delta = match *dist {
            WeightDistribution::PowerLaw { gamma } => (gamma / (gamma - 1.0)) * (2.0 * alpha - 1.0 + 1.0 / gamma),
            _ => 2.0 * alpha - 1.0,
        };
        return Ok(ThresholdPrediction { delta: Some(delta), k_c_constant: Some(2.0 / delta), ..base });
    }
    let (Some(av), Some(a2v)) = (a.finite(), a2.finite()) else {
        return Err(CameoError::domain(format!(
            "A2 = ∫φ^(1-2α) diverges for {dist} at alpha={alpha}; no low-alpha prediction"
        )));
    };
    let b = c * (1.0 + a2v.sqrt() / av);
    if b <= 1.0 {
        Ok(ThresholdPrediction { regime: Regime::Subcritical, b: Some(b), ..base })
    } else {
        Ok(ThresholdPrediction { regime: Regime::LowAlpha, b: Some(b), k_c_logslope: Some(1.0 / b.ln()), ..base })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn as_u64(p: &PathCoefficients) -> Vec<u64> {
        p.to_u64().unwrap()
    }

    // Independent oracle: iterate [[1, z], [1, 1]] from (1 + z, 2).
    fn matrix_power(l: usize, z: f64) -> (f64, f64) {
        let (mut x, mut y) = (1.0 + z, 2.0);
        for _ in 1..l {
            let nx = x + z * y;
            let ny = x + y;
            x = nx;
            y = ny;
        }
        (x, y)
    }

    #[test]
    fn coefficient_examples() {
        assert_eq!(as_u64(&path_coefficients(1).unwrap()), vec![3, 1]);
        assert_eq!(as_u64(&path_coefficients(2).unwrap()), vec![4, 4]);
        assert_eq!(as_u64(&path_coefficients(3).unwrap()), vec![5, 10, 1]);
        assert!(path_coefficients(0).is_err());
    }

    #[test]
    fn bruteforce_examples() {
        assert_eq!(as_u64(&coefficients_bruteforce(3).unwrap()), vec![5, 10, 1]);
        assert_eq!(as_u64(&coefficients_bruteforce(1).unwrap()), vec![3, 1]);
        assert_eq!(as_u64(&coefficients_bruteforce(2).unwrap()), vec![4, 4]);
        assert!(matches!(coefficients_bruteforce(21), Err(CameoError::Resource(_))));
    }

    #[test]
    fn recursion_matches_bruteforce() {
        for l in 1..=12 {
            assert_eq!(path_coefficients(l).unwrap(), coefficients_bruteforce(l).unwrap(), "L={l}");
        }
    }

    #[test]
    fn totals_are_four_times_powers_of_two() {
        for l in 1..=80 {
            let t = path_coefficients(l).unwrap().total();
            assert_eq!(t, BigUint::from(4u32) << (l - 1), "L={l}");
        }
    }

    #[test]
    fn large_l_stays_exact() {
        let p = path_coefficients(100).unwrap();
        assert_eq!(p.coeffs.len(), 51);
        assert!(p.to_u64().is_none());
        assert_eq!(p.coeffs[50], BigUint::from(102u32));
        assert_eq!(p.total(), BigUint::from(4u32) << 99);
        let odd = path_coefficients(101).unwrap();
        assert_eq!(odd.coeffs.len(), 52);
        assert_eq!(odd.coeffs[51], BigUint::one());
    }

    #[test]
    fn generating_function_examples() {
        assert_eq!(generating_function(1, 2.0).unwrap(), (3.0, 2.0));
        let (fx, fy) = generating_function(3, 1.0).unwrap();
        assert!((fx - 8.0).abs() < 1e-12 && (fy - 8.0).abs() < 1e-12);
        let (fx, fy) = generating_function(3, 0.0).unwrap();
        assert!((fx + fy - 5.0).abs() < 1e-12);
        assert!(generating_function(3, -1.0).is_err());
    }

    #[test]
    fn generating_function_matches_coefficients_and_matrix_power() {
        for l in 1..=60 {
            let p = path_coefficients(l).unwrap();
            for z in [0.25, 1.0, 4.0, 1e-9, 1e-3] {
                let (fx, fy) = generating_function(l, z).unwrap();
                let (mx, my) = matrix_power(l, z);
                let poly = p.evaluate(z);
                assert!(((fx + fy) - poly).abs() / poly < 1e-9, "L={l} z={z}");
                assert!((fx - mx).abs() / mx < 1e-9 && (fy - my).abs() / my < 1e-9, "L={l} z={z}");
            }
        }
    }

    #[test]
    fn s_value_examples() {
        for k in 2..20 {
            let a = 1.3;
            let v = s_value(k, a, a * a).unwrap();
            let expected = (2.0 * a).powi(k as i32);
            assert!((v - expected).abs() < 1e-10 * expected);
        }
        assert!((s_value(4, 1.0, 1.0).unwrap() - 16.0).abs() < 1e-12);
        assert!(s_value(4, 0.0, 1.0).is_err());
        assert!(s_value(1, 1.0, 1.0).is_err());
    }

    #[test]
    fn s_value_growth_rate() {
        let d = WeightDistribution::power_law(3.0).unwrap();
        let a = d.moment_a(0.25).finite().unwrap();
        let a2 = d.moment_a(0.5).finite().unwrap();
        assert!((a2 - 2.82843).abs() < 1e-5);
        let ratio = s_value(51, a, a2).unwrap() / s_value(50, a, a2).unwrap();
        let target = a + a2.sqrt();
        assert!((target - 3.02722).abs() < 1e-5);
        assert!((ratio - target).abs() / target < 0.01);
    }

    #[test]
    fn walk_examples() {
        let s = WeightSample::from_ys(vec![0.5, 1.5, 2.0, 0.7], 0.3).unwrap();
        let w = expected_gamma_walks(&s, 1.2, 1, 0, 2).unwrap();
        assert!((w - 1.2 / s.normalizer * 2.5).abs() < 1e-15);
        assert!(expected_gamma_walks(&s, 1.0, 2, 1, 1).is_err());

        let h = WeightSample::from_ys(vec![1.0; 100], 0.0).unwrap();
        assert!((expected_gamma_walks(&h, 1.0, 2, 0, 1).unwrap() - 0.04).abs() < 1e-15);
    }

    #[test]
    fn walks_match_direct_enumeration() {
        let s = WeightSample::from_ys(vec![0.5, 1.5, 2.0, 0.7, 1.1, 3.0], 0.3).unwrap();
        let n = s.n();
        let c = 0.8;
        let scale = c / s.normalizer;
        let k_ = |u: usize, v: usize| scale * (s.ys[u] + s.ys[v]);
        // k = 3: sum over all (x1, x2) in [n]^2.
        let mut direct = 0.0;
        for x1 in 0..n {
            for x2 in 0..n {
                direct += k_(1, x1) * k_(x1, x2) * k_(x2, 4);
            }
        }
        let w = expected_gamma_walks(&s, c, 3, 1, 4).unwrap();
        assert!((w - direct).abs() < 1e-14 * direct);
    }

    #[test]
    fn walks_bound_paths_and_converge() {
        // Homogeneous: walks/paths = n² / ((n-2)(n-3)) exactly, 1.19 at n = 30.
        let n = 30;
        let h = WeightSample::from_ys(vec![1.0; n], 0.0).unwrap();
        let params = CameoParams::new(n, 1.0, 0.0).unwrap();
        let w = expected_gamma_walks(&h, 1.0, 3, 0, 1).unwrap();
        let p = expected_gamma_paths_exact(&params, &h, 3, 0, 1).unwrap();
        assert!((w / p - 900.0 / 756.0).abs() < 1e-12);

        let d = WeightDistribution::exponential(1.0).unwrap();
        for (n, tol) in [(30, 0.25), (400, 0.05)] {
            let params = CameoParams::new(n, 1.0, 0.25).unwrap();
            let s = crate::weights::sample_weights(&d, n, 0.25, 7).unwrap();
            let w = expected_gamma_walks(&s, 1.0, 3, 0, 1).unwrap();
            let p = expected_gamma_paths_exact(&params, &s, 3, 0, 1).unwrap();
            assert!(w >= p);
            assert!(w / p - 1.0 < tol, "n={n} ratio={}", w / p);
        }
    }

    #[test]
    fn homogeneous_walks_closed_form() {
        let n = 10_000;
        let s = WeightSample::from_ys(vec![1.0; n], 0.0).unwrap();
        for k in 1..=4 {
            let c = 1.7;
            let w = expected_gamma_walks(&s, c, k, 3, 9).unwrap();
            let closed = (2.0 * c / n as f64).powi(k as i32) * (n as f64).powi(k as i32 - 1);
            assert!((w / closed - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn prediction_examples() {
        let e = WeightDistribution::exponential(1.0).unwrap();
        let p = predict_threshold(&e, 2.0, 0.75).unwrap();
        assert_eq!(p.regime, Regime::HighAlpha);
        assert!((p.delta.unwrap() - 0.5).abs() < 1e-15);
        assert!((p.k_c_constant.unwrap() - 4.0).abs() < 1e-12);

        let pl = WeightDistribution::power_law(3.0).unwrap();
        let p = predict_threshold(&pl, 1.0, 0.25).unwrap();
        assert_eq!(p.regime, Regime::LowAlpha);
        // √A₂/A = 5/4 exactly for this case, so B = 9/4.
        assert!((p.b.unwrap() - 2.25).abs() < 1e-12);
        assert!((p.b.unwrap() - 2.25007).abs() < 1e-4);
        assert!((p.k_c_logslope.unwrap() - 1.0 / p.b.unwrap().ln()).abs() < 1e-15);

        let p = predict_threshold(&pl, 0.2, 0.25).unwrap();
        assert_eq!(p.regime, Regime::Subcritical);
        assert!((p.b.unwrap() - 0.45001).abs() < 1e-4);

        assert!(predict_threshold(&pl, 1.0, 0.5).is_err());
        assert!(predict_threshold(&pl, 1.0, 1.0).is_err());
        assert!(predict_threshold(&pl, 1.0, -0.1).is_err());
    }

    #[test]
    fn power_law_high_alpha_delta() {
        let pl = WeightDistribution::power_law(3.0).unwrap();
        let p = predict_threshold(&pl, 1.0, 0.75).unwrap();
        // (3/2)(0.5 + 1/3) = 1.25
        assert!((p.delta.unwrap() - 1.25).abs() < 1e-12);
        assert!(p.a.is_divergent());
        assert!(p.expectation_bounds(1000, 3).is_none());
    }

    #[test]
    fn high_alpha_bounds_cross_between_k_c_and_k_c_plus_one() {
        let e = WeightDistribution::exponential(1.0).unwrap();
        for alpha in [0.6, 0.75, 0.9] {
            let p = predict_threshold(&e, 2.0, alpha).unwrap();
            let kc = p.k_c_constant.unwrap();
            for k in 1..30 {
                let ex = p.high_alpha_exponent(k).unwrap();
                if (k as f64) < kc {
                    assert!(ex < 0.0, "alpha={alpha} k={k}");
                }
                if (k as f64) > kc + 1.0 {
                    assert!(ex > 0.0, "alpha={alpha} k={k}");
                }
            }
            let (lo, hi) = p.expectation_bounds(1_000_000, 3).unwrap();
            assert!(lo <= hi);
        }
    }

    #[test]
    fn key_value_block() {
        let pl = WeightDistribution::power_law(3.0).unwrap();
        let p = predict_threshold(&pl, 1.0, 0.25).unwrap();
        let text = p.to_key_value(Some(30_000));
        assert!(text.contains("regime=LowAlpha\n"));
        assert!(text.contains("delta=NA\n"));
        let kc: f64 = text.lines().find_map(|l| l.strip_prefix("k_c=")).unwrap().parse().unwrap();
        assert!((kc - 30_000f64.ln() / 2.25007f64.ln()).abs() < 1e-3);
    }
}
