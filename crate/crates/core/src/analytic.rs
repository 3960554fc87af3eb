//! Double-precision analytic layer: Gamma, Hurwitz zeta, Dirichlet L-values,
//! completed L-functions and functional equations, the trivial zeros of a
//! Gamma-factor ratio, and zero-free certificates for Dirichlet series.

use crate::arith::{bernoulli_numbers, gcd};
use crate::chars::{DirichletCharacter, Parity};
use crate::error::{Error, Result};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::OnceLock;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn nonpositive_integer(s: Complex64) -> Option<i64> {
    (s.im == 0.0 && s.re <= 0.0 && s.re.fract() == 0.0).then(|| s.re as i64)
}

/// B_{2j} / (2j)! for j = 1..=12, and B_{2j} / (2j (2j - 1)) for Stirling.
fn bernoulli_tables() -> &'static (Vec<f64>, Vec<f64>) {
    static T: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    T.get_or_init(|| {
        let b = bernoulli_numbers(24);
        let mut fact = 1.0f64;
        let mut by_fact = Vec::new();
        let mut stirling = Vec::new();
        for j in 1..=12usize {
            fact *= ((2 * j - 1) * (2 * j)) as f64;
            let b2j = b[2 * j].to_f64().expect("finite");
            by_fact.push(b2j / fact);
            stirling.push(b2j / ((2 * j) * (2 * j - 1)) as f64);
        }
        (by_fact, stirling)
    })
}

/// Principal branch of log Gamma.
pub fn log_gamma(s: Complex64) -> Result<Complex64> {
    if let Some(n) = nonpositive_integer(s) {
        return Err(Error::Pole {
            function: "gamma",
            location: n.to_string(),
        });
    }
    let mut z = s;
    let mut shift = c(0.0);
    while z.re < 15.0 {
        shift += z.ln();
        z += 1.0;
    }
    let stirling = &bernoulli_tables().1;
    let zinv = z.inv();
    let zinv2 = zinv * zinv;
    let mut series = c(0.0);
    let mut pow = zinv;
    for &coef in stirling.iter().take(10) {
        series += pow * coef;
        pow *= zinv2;
    }
    Ok((z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series - shift)
}

pub fn gamma(s: Complex64) -> Result<Complex64> {
    log_gamma(s).map(Complex64::exp)
}

/// 1 / Gamma(s), entire; exactly zero at the nonpositive integers.
pub fn rgamma(s: Complex64) -> Complex64 {
    match log_gamma(s) {
        Ok(l) => (-l).exp(),
        Err(_) => c(0.0),
    }
}

/// Digamma on the positive reals.
pub fn digamma(x: f64) -> f64 {
    assert!(x > 0.0, "digamma is only provided on the positive reals");
    let mut x = x;
    let mut acc = 0.0;
    while x < 12.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let b = bernoulli_numbers(16);
    let x2 = x * x;
    let mut pow = x2;
    let mut series = 0.0;
    for j in 1..=8usize {
        series += b[2 * j].to_f64().expect("finite") / (2 * j) as f64 / pow;
        pow *= x2;
    }
    acc + x.ln() - 0.5 / x - series
}

fn rising(s: Complex64, m: usize) -> Complex64 {
    (0..m).fold(c(1.0), |acc, j| acc * (s + j as f64))
}

/// Hurwitz zeta function zeta(s, a) = sum_{n >= 0} (n + a)^{-s}, 0 < a <= 1.
///
/// Euler-Maclaurin with corrections through B_16 for Re s >= -3, and
/// Hurwitz's formula in terms of periodic zeta functions to the left of that.
pub fn hurwitz_zeta(s: Complex64, a: f64) -> Result<Complex64> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::Domain(format!("Hurwitz parameter {} outside (0, 1]", a)));
    }
    if s == c(1.0) {
        return Err(Error::Pole {
            function: "hurwitz_zeta",
            location: "1".into(),
        });
    }
    if s.re < -3.0 {
        return Ok(hurwitz_reflected(s, a));
    }
    Ok(hurwitz_euler_maclaurin(s, a, s.norm().ceil() as usize + 6))
}

/// x^{-s} for x > 0.
fn pow_neg(x: f64, s: Complex64) -> Complex64 {
    if s.im == 0.0 {
        c(x.powf(-s.re))
    } else {
        (-s * x.ln()).exp()
    }
}

fn hurwitz_euler_maclaurin(s: Complex64, a: f64, n: usize) -> Complex64 {
    let mut sum = c(0.0);
    for k in (0..n).rev() {
        sum += pow_neg(k as f64 + a, s);
    }
    let x = n as f64 + a;
    let x_s = pow_neg(x, s);
    sum += x_s * x / (s - 1.0) + 0.5 * x_s;
    let by_fact = &bernoulli_tables().0;
    let mut xp = x_s / x;
    let x2 = x * x;
    for (j, &coef) in by_fact.iter().take(8).enumerate() {
        sum += rising(s, 2 * j + 1) * coef * xp;
        xp /= x2;
    }
    sum
}

/// zeta(1 - w, a) = Gamma(w) (2 pi)^{-w} (e^{-pi i w/2} F(a, w) + e^{pi i w/2} F(-a, w)),
/// F(a, w) = sum_{k >= 1} e^{2 pi i k a} k^{-w}, for Re w > 4.
fn hurwitz_reflected(s: Complex64, a: f64) -> Complex64 {
    let w = 1.0 - s;
    let terms = (1e16f64.powf(1.0 / (w.re - 1.0))).ceil().clamp(8.0, 1e6) as usize;
    let (mut plus, mut minus) = (c(0.0), c(0.0));
    for k in (1..=terms).rev() {
        let kw = (-w * (k as f64).ln()).exp();
        let phase = Complex64::from_polar(1.0, 2.0 * PI * ((k as f64 * a) % 1.0));
        plus += phase * kw;
        minus += phase.conj() * kw;
    }
    let base = log_gamma(w).expect("Re w > 4") - w * (2.0 * PI).ln();
    (base - I * PI * w / 2.0).exp() * plus + (base + I * PI * w / 2.0).exp() * minus
}

/// M^{-s} zeta(s, h/M), the partial zeta function of the class h mod M.
pub fn partial_zeta(h: u64, modulus: u64, s: Complex64) -> Result<Complex64> {
    if h == 0 || h > modulus {
        return Err(Error::Domain(format!("need 1 <= h <= M, got h = {}, M = {}", h, modulus)));
    }
    Ok(pow_neg(modulus as f64, s) * hurwitz_zeta(s, h as f64 / modulus as f64)?)
}

/// L(s, chi) = sum_h chi(h) zeta_{h,M}(s), continued to the whole plane.
pub fn l_value(chi: &DirichletCharacter, s: Complex64) -> Result<Complex64> {
    let m = chi.modulus();
    if s == c(1.0) {
        if chi.is_principal() {
            return Err(Error::Pole {
                function: "dirichlet_l",
                location: "1".into(),
            });
        }
        // L(1, chi) = -(1/M) sum chi(h) digamma(h/M)
        let sum: Complex64 = (1..=m)
            .filter(|&h| gcd(h, m) == 1)
            .map(|h| chi.eval_complex(h as i64) * digamma(h as f64 / m as f64))
            .sum();
        return Ok(-sum / m as f64);
    }
    let mut acc = c(0.0);
    for h in (1..=m).filter(|&h| gcd(h, m) == 1) {
        acc += chi.eval_complex(h as i64) * partial_zeta(h, m, s)?;
    }
    Ok(acc)
}

/// Direct truncated sum sum_{n <= nmax} c(n) n^{-s}; `coeffs[n - 1]` is c(n).
pub fn dirichlet_sum(coeffs: &[Complex64], s: Complex64) -> Complex64 {
    coeffs
        .iter()
        .enumerate()
        .filter(|(_, b)| **b != c(0.0))
        .map(|(i, b)| b * (-s * ((i + 1) as f64).ln()).exp())
        .sum()
}

/// tau(chi) = sum_{a mod M} chi(a) e^{2 pi i a / M}.
pub fn gauss_sum(chi: &DirichletCharacter) -> Complex64 {
    let m = chi.modulus();
    (1..=m)
        .map(|a| chi.eval_complex(a as i64) * Complex64::from_polar(1.0, 2.0 * PI * a as f64 / m as f64))
        .sum()
}

/// Lambda(s, chi) = (f/pi)^{(s + delta)/2} Gamma((s + delta)/2) L(s, chi) for a
/// primitive chi of conductor f, with Lambda(s, chi) = epsilon Lambda(1 - s, conj chi).
#[derive(Clone, Debug)]
pub struct CompletedL {
    chi: DirichletCharacter,
    delta: u32,
    conductor: u64,
    epsilon: Complex64,
}

impl CompletedL {
    pub fn new(chi: &DirichletCharacter) -> Result<Self> {
        if !chi.is_primitive() {
            return Err(Error::Imprimitive {
                modulus: chi.modulus(),
                conductor: chi.conductor(),
            });
        }
        let delta = match chi.parity() {
            Parity::Even => 0,
            Parity::Odd => 1,
        };
        let f = chi.modulus();
        let epsilon = gauss_sum(chi) / (I.powu(delta) * (f as f64).sqrt());
        Ok(CompletedL {
            chi: chi.clone(),
            delta,
            conductor: f,
            epsilon,
        })
    }

    pub fn character(&self) -> &DirichletCharacter {
        &self.chi
    }

    pub fn delta(&self) -> u32 {
        self.delta
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn epsilon(&self) -> Complex64 {
        self.epsilon
    }

    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        completed_value(&self.chi, self.delta, s)
    }

    /// |Lambda(s, chi) - epsilon Lambda(1 - s, conj chi)|.
    pub fn functional_eq_residual(&self, s: Complex64) -> Result<f64> {
        let lhs = self.eval(s)?;
        let rhs = self.epsilon * completed_value(&self.chi.conj(), self.delta, 1.0 - s)?;
        Ok((lhs - rhs).norm())
    }
}

fn completed_value(chi: &DirichletCharacter, delta: u32, s: Complex64) -> Result<Complex64> {
    let z = (s + delta as f64) / 2.0;
    let f = chi.modulus() as f64;
    let lg = log_gamma(z)?;
    Ok((z * (f / PI).ln() + lg).exp() * l_value(chi, s)?)
}

pub fn completed_lambda(chi: &DirichletCharacter, s: Complex64) -> Result<Complex64> {
    CompletedL::new(chi)?.eval(s)
}

pub fn functional_eq_residual(chi: &DirichletCharacter, s: Complex64) -> Result<f64> {
    CompletedL::new(chi)?.functional_eq_residual(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct FunctionalEquationReport {
    pub check: &'static str,
    pub chi_modulus: u64,
    pub s: [f64; 2],
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn functional_eq_report(chi: &DirichletCharacter, s: Complex64, tolerance: f64) -> Result<FunctionalEquationReport> {
    let residual = functional_eq_residual(chi, s)?;
    Ok(FunctionalEquationReport {
        check: "functional_equation",
        chi_modulus: chi.modulus(),
        s: [s.re, s.im],
        residual,
        tolerance,
        pass: residual <= tolerance,
    })
}

/// Completed L-function of the Eisenstein series with L-series
/// L(s, chi) L(s - k + 1, psi) at level N:
/// Lambda(s) = (2 pi / sqrt N)^{-s} Gamma(s) L(s, chi) L(s - k + 1, psi).
pub fn eisenstein_lambda(
    chi: &DirichletCharacter,
    psi: &DirichletCharacter,
    k: u64,
    level: u64,
    s: Complex64,
) -> Result<Complex64> {
    let scale = -s * (2.0 * PI / (level as f64).sqrt()).ln();
    let lg = log_gamma(s)?;
    Ok((scale + lg).exp() * l_value(chi, s)? * l_value(psi, s - (k as f64 - 1.0))?)
}

/// |Lambda_f(s) - i^k W Lambda_g(k - s)| where f has L-series L(s, chi) L(s-k+1, psi),
/// g has L(s, conj psi) L(s-k+1, conj chi), and
/// W = (-1)^k tau(chi) tau(psi) A^{-k/2} B^{k/2-1} with A, B the conductors.
/// The level defaults to A B.
pub fn eisenstein_fe_residual(
    chi: &DirichletCharacter,
    psi: &DirichletCharacter,
    k: u64,
    level: Option<u64>,
    s: Complex64,
) -> Result<f64> {
    for x in [chi, psi] {
        if !x.is_primitive() {
            return Err(Error::Imprimitive {
                modulus: x.modulus(),
                conductor: x.conductor(),
            });
        }
    }
    let odd = (chi.parity() == Parity::Odd) != (psi.parity() == Parity::Odd);
    if odd != (k % 2 == 1) {
        return Err(Error::Parity("(chi psi)(-1) must equal (-1)^k".into()));
    }
    let (a, b) = (chi.modulus() as f64, psi.modulus() as f64);
    let level = level.unwrap_or(chi.modulus() * psi.modulus());
    let kf = k as f64;
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let w = gauss_sum(chi) * gauss_sum(psi) * sign * a.powf(-kf / 2.0) * b.powf(kf / 2.0 - 1.0);
    let lhs = eisenstein_lambda(chi, psi, k, level, s)?;
    let rhs = I.powu(k as u32) * w * eisenstein_lambda(&psi.conj(), &chi.conj(), k, level, kf - s)?;
    Ok((lhs - rhs).norm())
}

/// Value of Gamma(s/2) / Gamma((s - k + 1 + delta)/2) at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RatioValue {
    Finite(Complex64),
    /// Numerator pole with a regular denominator.
    Pole,
    /// Both Gamma factors singular.
    Indeterminate,
}

impl RatioValue {
    pub fn is_zero_within(&self, tol: f64) -> bool {
        matches!(self, RatioValue::Finite(v) if v.norm() < tol)
    }
}

pub fn gamma_ratio_zero_check(k: u64, delta: u32, points: &[Complex64]) -> Result<Vec<RatioValue>> {
    if delta > 1 {
        return Err(Error::Domain(format!("delta must be 0 or 1, got {}", delta)));
    }
    Ok(points
        .iter()
        .map(|&s| {
            let num = s / 2.0;
            let den = (s - k as f64 + 1.0 + delta as f64) / 2.0;
            match (nonpositive_integer(num), nonpositive_integer(den)) {
                (Some(_), Some(_)) => RatioValue::Indeterminate,
                (Some(_), None) => RatioValue::Pole,
                (None, Some(_)) => RatioValue::Finite(c(0.0)),
                (None, None) => {
                    RatioValue::Finite(gamma(num).expect("regular") * rgamma(den))
                }
            }
        })
        .collect())
}

/// Whether the coefficient array is the whole series or a truncation whose
/// continuation obeys the growth bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesExtent {
    Exact,
    Truncated,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroFreeCertificate {
    /// L(s) != 0 for Re s >= sigma0; -inf for a single-term series.
    pub sigma0: f64,
    pub n0: usize,
    pub lead_abs: f64,
    pub tail_bound_at_sigma0: f64,
    pub lambda: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub n1: usize,
    pub extent: SeriesExtent,
}

/// C n0^sigma int_{x0}^inf x^{lambda - sigma} dx, infinite when divergent.
fn integral_tail(c_bound: f64, lambda: f64, x0: f64, sigma: f64) -> f64 {
    let a = sigma - lambda;
    if a <= 1.0 {
        return f64::INFINITY;
    }
    c_bound * x0.powf(1.0 - a) / (a - 1.0)
}

/// int_{x0}^inf x^{lambda - sigma} ln x dx.
fn integral_log_tail(c_bound: f64, lambda: f64, x0: f64, sigma: f64) -> f64 {
    let a = sigma - lambda;
    if a <= 1.0 {
        return f64::INFINITY;
    }
    c_bound * x0.powf(1.0 - a) * (x0.ln() / (a - 1.0) + 1.0 / ((a - 1.0) * (a - 1.0)))
}

/// Certifies L(s) = sum B(n) n^{-s} != 0 for Re s >= sigma0 by finding the
/// smallest sigma0 (to 1e-10) with
/// sum_{n0 < n <= n1} |B(n)| (n0/n)^sigma0 + C n0^sigma0 int_{n1}^inf x^{lambda - sigma0} dx < |B(n0)|.
///
/// `coeffs[n - 1]` is B(n). The growth bound |B(n)| <= C n^lambda is checked
/// on n1 <= n <= nmax. With `SeriesExtent::Exact` there is no tail term.
pub fn zero_free_certificate(
    coeffs: &[Complex64],
    c_bound: f64,
    lambda: f64,
    n1: usize,
    extent: SeriesExtent,
) -> Result<ZeroFreeCertificate> {
    let nmax = coeffs.len();
    let n0 = coeffs
        .iter()
        .position(|b| b.norm() != 0.0)
        .map(|i| i + 1)
        .ok_or(Error::ZeroSeries)?;
    if n1 == 0 || n1 > nmax {
        return Err(Error::Domain(format!("n1 = {} must lie in 1..={}", n1, nmax)));
    }
    for n in n1..=nmax {
        if coeffs[n - 1].norm() > c_bound * (n as f64).powf(lambda) * (1.0 + 1e-12) {
            return Err(Error::GrowthBound {
                c: c_bound,
                lambda,
                n,
            });
        }
    }
    let lead = coeffs[n0 - 1].norm();
    let split = match extent {
        SeriesExtent::Exact => nmax,
        SeriesExtent::Truncated => n1.max(n0),
    };
    let finite: Vec<(f64, f64)> = (n0 + 1..=split)
        .filter(|&n| coeffs[n - 1].norm() != 0.0)
        .map(|n| (coeffs[n - 1].norm(), (n0 as f64 / n as f64).ln()))
        .collect();
    let bound = |sigma: f64| -> f64 {
        let head: f64 = finite.iter().map(|(b, lr)| b * (lr * sigma).exp()).sum();
        let tail = match extent {
            SeriesExtent::Exact => 0.0,
            SeriesExtent::Truncated => {
                (n0 as f64).powf(sigma) * integral_tail(c_bound, lambda, split as f64, sigma)
            }
        };
        head + tail
    };
    let make = |sigma0: f64, tail: f64| ZeroFreeCertificate {
        sigma0,
        n0,
        lead_abs: lead,
        tail_bound_at_sigma0: tail,
        lambda,
        c: c_bound,
        n1,
        extent,
    };
    if extent == SeriesExtent::Exact && finite.is_empty() {
        return Ok(make(f64::NEG_INFINITY, 0.0));
    }
    let mut lo = match extent {
        SeriesExtent::Exact => -1.0,
        SeriesExtent::Truncated => lambda + 1.0,
    };
    if extent == SeriesExtent::Exact {
        while bound(lo) < lead {
            lo = 2.0 * lo - 1.0;
            if lo < -1e6 {
                return Ok(make(lo, bound(lo)));
            }
        }
    }
    let mut hi = lo.abs().max(1.0) + 1.0;
    while !(bound(hi) < lead) {
        hi = 2.0 * hi + 1.0;
        if hi > 1e9 {
            return Err(Error::Domain("no finite certificate exists".into()));
        }
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if bound(mid) < lead {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(make(hi, bound(hi)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanRegion {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub t_max: f64,
    pub step: f64,
}

/// A grid cell in which vanishing could not be excluded.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SuspectedZero {
    pub center: [f64; 2],
    pub abs_value: f64,
    pub bound: f64,
}

/// Scans cells [sigma, sigma + step] x [t - step/2, t + step/2]. A cell is
/// cleared when the leading term dominates at its left edge, or when
/// |S(center)| exceeds tail + r * (derivative bound) over the disk of radius
/// r = step / sqrt 2 around the center. Remaining cells are returned.
pub fn zero_scan(
    coeffs: &[Complex64],
    c_bound: f64,
    lambda: f64,
    extent: SeriesExtent,
    region: ScanRegion,
) -> Result<Vec<SuspectedZero>> {
    if !(region.step > 0.0) || region.sigma_max < region.sigma_min || region.t_max < 0.0 {
        return Err(Error::Domain("invalid scan region".into()));
    }
    let nmax = coeffs.len();
    let Some(n0) = coeffs.iter().position(|b| b.norm() != 0.0).map(|i| i + 1) else {
        return Ok(Vec::new());
    };
    let lead = coeffs[n0 - 1].norm();
    let abs: Vec<(f64, f64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, b)| b.norm() != 0.0)
        .map(|(i, b)| (b.norm(), ((i + 1) as f64).ln()))
        .collect();
    let tail = |sigma: f64| match extent {
        SeriesExtent::Exact => 0.0,
        SeriesExtent::Truncated => integral_tail(c_bound, lambda, nmax as f64, sigma),
    };
    let log_tail = |sigma: f64| match extent {
        SeriesExtent::Exact => 0.0,
        SeriesExtent::Truncated => integral_log_tail(c_bound, lambda, nmax as f64, sigma),
    };
    let dominates = |sigma: f64| {
        let ln0 = (n0 as f64).ln();
        let rest: f64 = abs
            .iter()
            .filter(|(_, ln)| *ln > ln0)
            .map(|(b, ln)| b * (-(ln - ln0) * sigma).exp())
            .sum();
        rest + (ln0 * sigma).exp() * tail(sigma) < lead
    };
    let derivative = |sigma: f64| -> f64 {
        abs.iter().map(|(b, ln)| b * ln * (-ln * sigma).exp()).sum::<f64>() + log_tail(sigma)
    };
    let radius = region.step * std::f64::consts::FRAC_1_SQRT_2;
    let n_sigma = ((region.sigma_max - region.sigma_min) / region.step).ceil().max(1.0) as usize;
    let n_t = (2.0 * region.t_max / region.step).round() as usize;
    let mut out = Vec::new();
    for js in 0..n_sigma {
        let left = region.sigma_min + js as f64 * region.step;
        if dominates(left) {
            continue;
        }
        let cre = left + region.step / 2.0;
        let low = cre - radius;
        let slack = tail(low) + radius * derivative(low);
        for jt in 0..=n_t {
            let t = -region.t_max + jt as f64 * region.step;
            let value = dirichlet_sum(coeffs, Complex64::new(cre, t)).norm();
            if !(value > slack) {
                out.push(SuspectedZero {
                    center: [cre, t],
                    abs_value: value,
                    bound: slack,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::bernoulli_poly;
    use crate::chars::{character_by_index, enumerate_characters, generalized_bernoulli};
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    /// zeta(s, a) for Re s > 1 by a long partial sum plus the integral tail
    /// and its first Euler-Maclaurin correction.
    fn hurwitz_oracle(s: f64, a: f64) -> f64 {
        let n = 200_000;
        let head: f64 = (0..n).map(|k| (k as f64 + a).powf(-s)).sum();
        let x = n as f64 + a;
        head + x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s) + s * x.powf(-s - 1.0) / 12.0
    }

    #[test]
    fn log_gamma_examples() {
        assert!(log_gamma(c(1.0)).unwrap().norm() < 1e-14);
        assert!(close(log_gamma(c(0.5)).unwrap(), c(0.5 * PI.ln()), 1e-14));
        assert!(close(log_gamma(c(5.0)).unwrap(), c(24f64.ln()), 1e-13));
        assert!(matches!(log_gamma(c(-3.0)), Err(Error::Pole { .. })));
        assert!(matches!(log_gamma(c(0.0)), Err(Error::Pole { .. })));
        // reflection: Gamma(s) Gamma(1 - s) = pi / sin(pi s)
        for s in [Complex64::new(0.3, 2.0), Complex64::new(-4.7, 0.5), Complex64::new(2.5, -30.0)] {
            let lhs = gamma(s).unwrap() * gamma(1.0 - s).unwrap();
            let rhs = PI / (PI * s).sin();
            assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm(), "{}", s);
        }
        // recurrence and conjugate symmetry at large |s|
        for s in [Complex64::new(40.0, 60.0), Complex64::new(-30.5, 70.0)] {
            let a = gamma(s + 1.0).unwrap();
            let b = s * gamma(s).unwrap();
            assert!((a - b).norm() <= 1e-12 * a.norm());
            let l = log_gamma(s).unwrap();
            assert!((log_gamma(s.conj()).unwrap() - l.conj()).norm() <= 1e-12 * l.norm());
        }
    }

    #[test]
    fn rgamma_vanishes_at_poles() {
        for n in 0..10 {
            assert_eq!(rgamma(c(-(n as f64))), c(0.0));
        }
        assert!(close(rgamma(c(4.0)), c(1.0 / 6.0), 1e-15));
    }

    #[test]
    fn digamma_values() {
        let euler = 0.577_215_664_901_532_9;
        assert!((digamma(1.0) + euler).abs() < 1e-14);
        assert!((digamma(0.5) + euler + 2.0 * 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn hurwitz_positive_oracle() {
        assert!(close(hurwitz_zeta(c(2.0), 1.0).unwrap(), c(PI * PI / 6.0), 1e-12));
        assert!((hurwitz_oracle(2.0, 1.0) - PI * PI / 6.0).abs() < 1e-12);
        for a in [0.1, 0.25, 0.5, 0.9, 1.0] {
            for s in [1.5, 2.0, 3.5, 7.0] {
                let v = hurwitz_zeta(c(s), a).unwrap();
                assert!((v.re - hurwitz_oracle(s, a)).abs() < 1e-10 * v.re.max(1.0), "s={} a={}", s, a);
            }
        }
    }

    #[test]
    fn hurwitz_bernoulli_values() {
        // zeta(-n, a) = -B_{n+1}(a) / (n + 1)
        assert!(close(hurwitz_zeta(c(-1.0), 1.0).unwrap(), c(-1.0 / 12.0), 1e-12));
        for a in [(1i64, 7i64), (1, 2), (3, 4), (5, 6), (1, 1)] {
            let af = a.0 as f64 / a.1 as f64;
            let q = BigRational::new(BigInt::from(a.0), BigInt::from(a.1));
            for n in 0..=20usize {
                let exact = -bernoulli_poly(n + 1, &q).to_f64().unwrap() / (n + 1) as f64;
                let v = hurwitz_zeta(c(-(n as f64)), af).unwrap();
                assert!((v.re - exact).abs() <= 1e-11 * exact.abs().max(1.0), "n={} a={}: {} vs {}", n, af, v, exact);
                assert!(v.im.abs() <= 1e-11 * exact.abs().max(1.0));
            }
        }
        assert!(matches!(hurwitz_zeta(c(1.0), 0.5), Err(Error::Pole { .. })));
        assert!(hurwitz_zeta(c(2.0), 0.0).is_err());
    }

    #[test]
    fn hurwitz_branches_agree() {
        for a in [0.2, 0.5, 0.77, 1.0] {
            for t in [0.0, 1.0, 7.5, 25.0] {
                for sigma in [-3.5, -4.0, -5.0] {
                    let s = Complex64::new(sigma, t);
                    let em = hurwitz_euler_maclaurin(s, a, s.norm().ceil() as usize + 6);
                    let refl = hurwitz_zeta(s, a).unwrap();
                    assert!((em - refl).norm() <= 1e-8 * refl.norm().max(1.0) && (hurwitz_reflected(s, a) - refl).norm() == 0.0, "{} {}: {} vs {}", s, a, em, refl);
                }
            }
        }
    }

    #[test]
    fn hurwitz_zero_from_bernoulli() {
        for a in [0.05, 0.3, 0.5, 0.8] {
            assert!(close(hurwitz_zeta(c(0.0), a).unwrap(), c(0.5 - a), 1e-13));
        }
    }

    #[test]
    fn l_value_examples() {
        let one = DirichletCharacter::principal(1);
        assert!(close(l_value(&one, c(2.0)).unwrap(), c(PI * PI / 6.0), 1e-12));
        assert!(matches!(l_value(&one, c(1.0)), Err(Error::Pole { .. })));
        let chi4 = character_by_index(4, 1).unwrap();
        let exact = -generalized_bernoulli(&chi4, 1).unwrap().to_complex();
        assert!(close(exact, c(0.5), 1e-15));
        assert!(close(l_value(&chi4, c(0.0)).unwrap(), exact, 1e-12));
        assert!(close(l_value(&chi4, c(1.0)).unwrap(), c(PI / 4.0), 1e-13));
        // L(-n, chi) = -B_{n+1,chi}/(n+1)
        for m in [3u64, 5, 7, 8, 12] {
            for chi in enumerate_characters(m) {
                for n in 0..4u32 {
                    let b = generalized_bernoulli(&chi, n + 1).unwrap().to_complex();
                    let v = l_value(&chi, c(-(n as f64))).unwrap();
                    // the class sum multiplies Hurwitz errors by M^n
                    let tol = (1e-12 * (m as f64).powi(n as i32 + 1)).max(1e-10) * b.norm().max(1.0);
                    assert!(close(v, -b / (n + 1) as f64, tol), "{:?} n={} {} vs {}", chi, n, v, b);
                }
            }
        }
    }

    #[test]
    fn l_value_matches_direct_sums() {
        let s = Complex64::new(3.0, 1.7);
        for m in [5u64, 8, 9] {
            for chi in enumerate_characters(m) {
                let coeffs: Vec<Complex64> = (1..=1_000_000).map(|n| chi.eval_complex(n)).collect();
                let direct = dirichlet_sum(&coeffs, s);
                assert!(close(l_value(&chi, s).unwrap(), direct, 1e-8));
            }
        }
    }

    #[test]
    fn functional_equation_examples() {
        let chi4 = character_by_index(4, 1).unwrap();
        assert!(functional_eq_residual(&chi4, c(0.5)).unwrap() < 1e-10);
        for chi in enumerate_characters(5).into_iter().filter(|c| !c.is_principal()) {
            assert!(functional_eq_residual(&chi, Complex64::new(2.0, 3.0)).unwrap() < 1e-8);
        }
        let chi3 = character_by_index(3, 1).unwrap();
        let lam = completed_lambda(&chi3, c(-2.0)).unwrap();
        assert!(lam.norm().is_finite());
        assert!(functional_eq_residual(&chi3, c(-2.0)).unwrap() < 1e-8);
        assert!(matches!(
            functional_eq_residual(&DirichletCharacter::principal(6), c(2.0)),
            Err(Error::Imprimitive { .. })
        ));
        let riemann = functional_eq_residual(&DirichletCharacter::principal(1), Complex64::new(0.3, 14.0)).unwrap();
        assert!(riemann < 1e-10);
        let report = functional_eq_report(&chi4, c(0.5), 1e-8).unwrap();
        assert!(report.pass);
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["check"], "functional_equation");
        assert_eq!(json["s"][0], 0.5);
    }

    #[test]
    fn root_numbers_have_unit_modulus() {
        for m in 1..=30u64 {
            for chi in enumerate_characters(m).into_iter().filter(|c| c.is_primitive()) {
                let l = CompletedL::new(&chi).unwrap();
                assert!((l.epsilon().norm() - 1.0).abs() < 1e-12);
                assert!((gauss_sum(&chi).norm() - (m as f64).sqrt()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn lambda_matches_direct_sum_right_of_two() {
        for (m, idx) in [(5u64, 1usize), (7, 2), (8, 1), (12, 3)] {
            let chi = character_by_index(m, idx).unwrap();
            let l = CompletedL::new(&chi).unwrap();
            let coeffs: Vec<Complex64> = (1..=200_000).map(|n| chi.eval_complex(n)).collect();
            for s in [Complex64::new(2.0, 0.0), Complex64::new(2.5, 4.0), Complex64::new(4.0, -7.0)] {
                let z = (s + l.delta() as f64) / 2.0;
                let direct = (z * (m as f64 / PI).ln()).exp() * gamma(z).unwrap() * dirichlet_sum(&coeffs, s);
                assert!(close(l.eval(s).unwrap(), direct, 1e-8));
            }
        }
    }

    #[test]
    fn eisenstein_functional_equation() {
        let prims: Vec<DirichletCharacter> = [1u64, 3, 4, 5, 7]
            .iter()
            .flat_map(|&m| enumerate_characters(m))
            .filter(|c| c.is_primitive())
            .collect();
        let points = [Complex64::new(0.3, 1.1), Complex64::new(2.7, -0.4), Complex64::new(1.5, 3.0)];
        let mut checked = 0;
        for chi in &prims {
            for psi in &prims {
                for k in 1..=4u64 {
                    for &s in &points {
                        match eisenstein_fe_residual(chi, psi, k, None, s) {
                            Ok(r) => {
                                let scale = eisenstein_lambda(chi, psi, k, chi.modulus() * psi.modulus(), s)
                                    .unwrap()
                                    .norm()
                                    .max(1.0);
                                assert!(r < 1e-8 * scale, "{:?} {:?} k={} s={}: {}", chi, psi, k, s, r);
                                checked += 1;
                            }
                            Err(Error::Parity(_)) => {}
                            Err(e) => panic!("{}", e),
                        }
                    }
                }
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn gamma_ratio_examples() {
        // k = 2, delta = 0: zeros at -1, -3, -5, ...
        let pts: Vec<Complex64> = (1..=10).map(|j| c(-(2 * j - 1) as f64)).collect();
        let v = gamma_ratio_zero_check(2, 0, &pts).unwrap();
        assert!(v.iter().all(|r| r.is_zero_within(1e-12)));
        // k = 1, delta = 1: Gamma(s/2) / Gamma((s+1)/2), zeros at negative odd integers
        let v = gamma_ratio_zero_check(1, 1, &pts).unwrap();
        assert!(v.iter().all(|r| r.is_zero_within(1e-12)));
        let v = gamma_ratio_zero_check(1, 1, &[c(2.0)]).unwrap();
        assert!(matches!(v[0], RatioValue::Finite(x) if (x.re - 2.0 / PI.sqrt()).abs() < 1e-14));
        // k = 3, delta = 1
        let v = gamma_ratio_zero_check(3, 1, &pts[1..]).unwrap();
        assert!(v.iter().all(|r| r.is_zero_within(1e-12)));
        // even integers are poles
        let v = gamma_ratio_zero_check(4, 0, &[c(-2.0), c(-4.0), c(0.0)]).unwrap();
        assert!(v.iter().all(|r| *r == RatioValue::Pole));
        // both singular
        let v = gamma_ratio_zero_check(2, 1, &[c(-2.0)]).unwrap();
        assert_eq!(v[0], RatioValue::Indeterminate);
        assert!(gamma_ratio_zero_check(2, 2, &pts).is_err());
    }

    #[test]
    fn certificate_examples() {
        let mut delta = vec![c(0.0); 50];
        delta[0] = c(1.0);
        let cert = zero_free_certificate(&delta, 1.0, 0.0, 50, SeriesExtent::Exact).unwrap();
        assert_eq!(cert.sigma0, f64::NEG_INFINITY);
        assert_eq!(cert.tail_bound_at_sigma0, 0.0);
        let cert = zero_free_certificate(&delta, 1.0, 0.0, 50, SeriesExtent::Truncated).unwrap();
        assert!(cert.tail_bound_at_sigma0 < 1.0 && cert.sigma0 > 1.0);

        let ones = vec![c(1.0); 5000];
        let cert = zero_free_certificate(&ones, 1.0, 0.0, 5000, SeriesExtent::Truncated).unwrap();
        // sum_{n >= 2} n^{-sigma} = 1 at sigma ~ 1.7286
        assert!(cert.sigma0 > 1.72 && cert.sigma0 < 1.76, "{}", cert.sigma0);
        assert!(cert.tail_bound_at_sigma0 < cert.lead_abs);
        for j in 0..=50 {
            let s = c(cert.sigma0 + 0.1 * j as f64);
            assert!(hurwitz_zeta(s, 1.0).unwrap().norm() > 0.5);
        }

        let linear: Vec<Complex64> = (1..=5000).map(|n| c(n as f64)).collect();
        let cert1 = zero_free_certificate(&linear, 1.0, 1.0, 5000, SeriesExtent::Truncated).unwrap();
        assert!((cert1.sigma0 - cert.sigma0 - 1.0).abs() < 0.05);

        assert_eq!(
            zero_free_certificate(&vec![c(0.0); 10], 1.0, 0.0, 5, SeriesExtent::Exact),
            Err(Error::ZeroSeries)
        );
        let big: Vec<Complex64> = (1..=20).map(|n| c((n * n) as f64)).collect();
        assert!(matches!(
            zero_free_certificate(&big, 1.0, 1.0, 3, SeriesExtent::Truncated),
            Err(Error::GrowthBound { n: 3, .. })
        ));
    }

    #[test]
    fn planted_zero_is_found() {
        let coeffs = vec![c(1.0), c(-2.0)];
        let cert = zero_free_certificate(&coeffs, 2.0, 0.0, 1, SeriesExtent::Exact).unwrap();
        assert!(cert.sigma0 > 1.0 && cert.sigma0 < 1.0 + 1e-8);
        let region = ScanRegion {
            sigma_min: 0.5,
            sigma_max: 1.5,
            t_max: 10.0,
            step: 0.05,
        };
        let hits = zero_scan(&coeffs, 2.0, 0.0, SeriesExtent::Exact, region).unwrap();
        assert!(hits.iter().any(|z| (z.center[0] - 1.0).abs() < 0.06 && z.center[1].abs() < 0.06));
        let t1 = 2.0 * PI / 2f64.ln();
        assert!(hits.iter().any(|z| (z.center[1] - t1).abs() < 0.06));
        assert!(hits.iter().all(|z| z.center[0] < cert.sigma0 + 0.05));
        let right = ScanRegion {
            sigma_min: cert.sigma0,
            ..region
        };
        assert!(zero_scan(&coeffs, 2.0, 0.0, SeriesExtent::Exact, right).unwrap().is_empty());
    }

    #[test]
    fn scans_of_delta_and_zeta_are_empty() {
        let mut delta = vec![c(0.0); 30];
        delta[0] = c(1.0);
        let region = ScanRegion {
            sigma_min: -3.0,
            sigma_max: 3.0,
            t_max: 10.0,
            step: 0.5,
        };
        assert!(zero_scan(&delta, 1.0, 0.0, SeriesExtent::Exact, region).unwrap().is_empty());
        let ones = vec![c(1.0); 3000];
        let region = ScanRegion {
            sigma_min: 2.0,
            sigma_max: 5.0,
            t_max: 10.0,
            step: 0.1,
        };
        assert!(zero_scan(&ones, 1.0, 0.0, SeriesExtent::Truncated, region).unwrap().is_empty());
    }

    #[test]
    fn certified_regions_scan_empty_for_random_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let n = 150;
            let coeffs: Vec<Complex64> = (1..=n)
                .map(|k| {
                    let r = rng.gen_range(0.0..=1.0) * (k * k) as f64;
                    Complex64::from_polar(r, rng.gen_range(0.0..2.0 * PI))
                })
                .collect();
            let cert = zero_free_certificate(&coeffs, 1.0, 2.0, n, SeriesExtent::Truncated).unwrap();
            let region = ScanRegion {
                sigma_min: cert.sigma0,
                sigma_max: cert.sigma0 + 3.0,
                t_max: 20.0,
                step: 0.25,
            };
            assert!(zero_scan(&coeffs, 1.0, 2.0, SeriesExtent::Truncated, region).unwrap().is_empty());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]

        #[test]
        fn partial_zeta_sum_is_l_value(
            m in 2u64..30,
            idx in 0usize..12,
            re in -2.5f64..4.0,
            im in -20.0f64..20.0,
        ) {
            let chars = enumerate_characters(m);
            let chi = &chars[idx % chars.len()];
            let s = Complex64::new(re, im);
            prop_assume!((s - 1.0).norm() > 1e-3);
            let via_partial: Complex64 = (1..=m)
                .filter(|&h| gcd(h, m) == 1)
                .map(|h| chi.eval_complex(h as i64) * partial_zeta(h, m, s).unwrap())
                .sum();
            let v = l_value(chi, s).unwrap();
            prop_assert!((v - via_partial).norm() <= 1e-9 * v.norm().max(1.0));
            // coefficientwise the partial zeta functions rebuild L(s, chi)
            let direct: Complex64 = (1..=2000u64)
                .map(|n| chi.eval_complex(n as i64) * (-s * (n as f64).ln()).exp())
                .sum();
            if re >= 3.0 {
                prop_assert!((v - direct).norm() < 1e-6);
            }
        }

        #[test]
        fn conjugate_symmetry_of_l(m in 3u64..20, idx in 0usize..8, re in -2.0f64..3.0, im in 0.5f64..15.0) {
            let chars = enumerate_characters(m);
            let chi = &chars[idx % chars.len()];
            let s = Complex64::new(re, im);
            let a = l_value(chi, s.conj()).unwrap().conj();
            let b = l_value(&chi.conj(), s).unwrap();
            prop_assert!((a - b).norm() <= 1e-10 * a.norm().max(1.0));
        }
    }
}
