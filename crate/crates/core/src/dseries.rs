//! Formal Dirichlet series sum c(n) n^{-s} over exact cyclotomic scalars.

use crate::arith::{factorize, gcd, lcm, totient};
use crate::chars::{enumerate_characters, DirichletCharacter};
use crate::cyclo::{CycloNumber, IntegralAccumulator};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;

/// Coefficients c(1..=nmax) of a truncated Dirichlet series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirichletSeriesCoeffs {
    coeffs: Vec<CycloNumber>,
}

impl DirichletSeriesCoeffs {
    /// `coeffs[n - 1]` is c(n).
    pub fn new(coeffs: Vec<CycloNumber>) -> Self {
        DirichletSeriesCoeffs { coeffs }
    }

    pub fn zeros(nmax: usize) -> Self {
        Self::new(vec![CycloNumber::zero(); nmax])
    }

    /// The identity for convolution: 1 at n = 1.
    pub fn delta(nmax: usize) -> Self {
        let mut s = Self::zeros(nmax);
        if nmax > 0 {
            s.coeffs[0] = CycloNumber::one();
        }
        s
    }

    /// Coefficients of zeta(s).
    pub fn ones(nmax: usize) -> Self {
        Self::new(vec![CycloNumber::one(); nmax])
    }

    pub fn from_fn(nmax: usize, f: impl Fn(u64) -> CycloNumber) -> Self {
        Self::new((1..=nmax as u64).map(f).collect())
    }

    pub fn nmax(&self) -> usize {
        self.coeffs.len()
    }

    /// c(n) for 1 <= n <= nmax.
    pub fn get(&self, n: usize) -> &CycloNumber {
        &self.coeffs[n - 1]
    }

    pub fn set(&mut self, n: usize, value: CycloNumber) {
        self.coeffs[n - 1] = value;
    }

    pub fn coeffs(&self) -> &[CycloNumber] {
        &self.coeffs
    }

    pub fn truncate(&self, nmax: usize) -> Self {
        Self::new(self.coeffs[..nmax.min(self.nmax())].to_vec())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(CycloNumber::is_zero)
    }

    /// Termwise sum over the common range.
    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn scale(&self, c: &CycloNumber) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Adds `c * dilate(other, l)` in place over the common range.
    pub fn add_scaled_dilated(&mut self, other: &Self, c: &CycloNumber, l: u64) {
        if c.is_zero() {
            return;
        }
        let l = l as usize;
        let top = self.nmax().min(other.nmax() * l);
        for n in (l..=top).step_by(l) {
            let src = other.get(n / l);
            if !src.is_zero() {
                self.coeffs[n - 1] += &(src * c);
            }
        }
    }

    /// Multiplication of the series by l^{-s}: coefficient c(n/l) at n when l | n.
    pub fn dilate(&self, l: u64) -> Self {
        let mut out = Self::zeros(self.nmax());
        out.add_scaled_dilated(self, &CycloNumber::one(), l);
        out
    }

    /// First index n (1-based) where the two series differ on the common range.
    pub fn first_difference(&self, other: &Self) -> Option<usize> {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .position(|(a, b)| a != b)
            .map(|i| i + 1)
    }

    /// max_n |c(n) - c'(n)| under the complex embedding.
    pub fn max_abs_difference(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .filter(|(a, b)| a != b)
            .map(|(a, b)| (a - b).to_complex().norm())
            .fold(0.0, f64::max)
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(CycloNumber::to_complex).collect()
    }
}

/// Dirichlet convolution: result(n) = sum_{m | n} a(m) b(n/m).
pub fn convolve(a: &DirichletSeriesCoeffs, b: &DirichletSeriesCoeffs) -> DirichletSeriesCoeffs {
    let nmax = a.nmax().min(b.nmax());
    convolve_integral(a, b, nmax).unwrap_or_else(|| convolve_generic(a, b, nmax))
}

const INTEGRAL_SLOT_LIMIT: usize = 1 << 23;

/// Entries as sparse power-basis integer vectors at a common order, scaled by
/// a common denominator.
fn integral_form(s: &DirichletSeriesCoeffs, nmax: usize, order: u64) -> Option<(BigInt, Vec<Vec<(u64, i128)>>)> {
    let denom = s.coeffs[..nmax]
        .iter()
        .filter(|c| !c.is_zero())
        .fold(BigInt::one(), |acc, c| {
            let d = c.denominator();
            if d.is_one() {
                acc
            } else {
                acc.lcm(&d)
            }
        });
    if denom.bits() > 62 {
        return None;
    }
    let terms = s.coeffs[..nmax]
        .iter()
        .map(|c| {
            if c.is_zero() {
                Some(Vec::new())
            } else {
                c.integral_terms(order, &denom)
            }
        })
        .collect::<Option<Vec<_>>>()?;
    Some((denom, terms))
}

fn convolve_integral(a: &DirichletSeriesCoeffs, b: &DirichletSeriesCoeffs, nmax: usize) -> Option<DirichletSeriesCoeffs> {
    let order = a.coeffs[..nmax]
        .iter()
        .chain(&b.coeffs[..nmax])
        .filter(|c| !c.is_zero())
        .fold(1u64, |acc, c| lcm(acc, c.order()));
    if nmax.checked_mul(order as usize)? > INTEGRAL_SLOT_LIMIT {
        return None;
    }
    let (da, ta) = integral_form(a, nmax, order)?;
    let (db, tb) = integral_form(b, nmax, order)?;
    let mut acc: Vec<IntegralAccumulator> = (0..nmax).map(|_| IntegralAccumulator::new(order)).collect();
    for m in 1..=nmax {
        let am = &ta[m - 1];
        if am.is_empty() {
            continue;
        }
        for j in 1..=nmax / m {
            let bj = &tb[j - 1];
            if bj.is_empty() {
                continue;
            }
            let slot = &mut acc[m * j - 1];
            for &(e1, c1) in am {
                for &(e2, c2) in bj {
                    if !slot.add_term(e1 + e2, c1.checked_mul(c2)?) {
                        return None;
                    }
                }
            }
        }
    }
    let denom = da * db;
    Some(DirichletSeriesCoeffs::new(
        acc.iter()
            .map(|x| {
                if x.is_zero() {
                    CycloNumber::zero()
                } else {
                    x.to_cyclo(&denom)
                }
            })
            .collect(),
    ))
}

fn convolve_generic(a: &DirichletSeriesCoeffs, b: &DirichletSeriesCoeffs, nmax: usize) -> DirichletSeriesCoeffs {
    let mut out = DirichletSeriesCoeffs::zeros(nmax);
    for m in 1..=nmax {
        let am = a.get(m);
        if am.is_zero() {
            continue;
        }
        for j in 1..=nmax / m {
            let bj = b.get(j);
            if !bj.is_zero() {
                out.coeffs[m * j - 1] += &(am * bj);
            }
        }
    }
    out
}

/// Coefficients chi(n) n^shift of L(s - shift, chi).
pub fn l_coeffs(chi: &DirichletCharacter, shift: i64, nmax: usize) -> Result<DirichletSeriesCoeffs> {
    if shift < 0 {
        return Err(Error::Unsupported(format!(
            "negative shift {} (only nonnegative integral shifts are exact)",
            shift
        )));
    }
    let m = chi.modulus();
    let residues: Vec<CycloNumber> = (0..m.min(nmax as u64 + 1)).map(|r| chi.eval(r as i64)).collect();
    Ok(DirichletSeriesCoeffs::from_fn(nmax, |n| {
        let v = &residues[(n % m) as usize];
        if v.is_zero() || shift == 0 {
            v.clone()
        } else {
            v.scale(&BigRational::from_integer(BigInt::from(n).pow(shift as u32)))
        }
    }))
}

/// Indicator coefficients of the partial zeta function zeta_{h,M}(s).
pub fn partial_zeta_coeffs(h: u64, modulus: u64, nmax: usize) -> Result<DirichletSeriesCoeffs> {
    if modulus == 0 || h == 0 || h > modulus {
        return Err(Error::Domain(format!(
            "partial zeta needs 1 <= h <= M, got h = {}, M = {}",
            h, modulus
        )));
    }
    Ok(DirichletSeriesCoeffs::from_fn(nmax, |n| {
        if n % modulus == h % modulus {
            CycloNumber::one()
        } else {
            CycloNumber::zero()
        }
    }))
}

/// The coefficients beta_chi(h) with zeta_{h,M}(s) = sum_chi beta_chi(h) L(s, chi).
#[derive(Clone, Debug)]
pub struct BetaMatrix {
    modulus: u64,
    characters: Vec<DirichletCharacter>,
    /// `values[i][h]` is beta_{chi_i}(h); entries at non-units are unused.
    values: Vec<Vec<Option<CycloNumber>>>,
}

impl BetaMatrix {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn characters(&self) -> &[DirichletCharacter] {
        &self.characters
    }

    /// beta_{chi_i}(h) for the i-th character of [`enumerate_characters`].
    pub fn beta(&self, chi_index: usize, h: u64) -> Result<&CycloNumber> {
        let m = self.modulus;
        let r = (h % m) as usize;
        if gcd(h, m) != 1 {
            return Err(Error::Domain(format!(
                "residue {} is not a unit mod {}; its class is not decomposed by characters",
                h, m
            )));
        }
        self.values
            .get(chi_index)
            .and_then(|row| row[r].as_ref())
            .ok_or_else(|| Error::Domain(format!("character index {} out of range", chi_index)))
    }
}

/// beta_chi(h) = conj(chi(h)) / phi(M), the inverse of the character table.
pub fn beta_matrix(modulus: u64) -> BetaMatrix {
    let characters = enumerate_characters(modulus);
    let inv_phi = CycloNumber::from_ratio(1, totient(modulus) as i64);
    let values = characters
        .iter()
        .map(|chi| {
            (0..modulus)
                .map(|h| {
                    if gcd(h, modulus) == 1 {
                        Some(chi.eval(h as i64).conj() * &inv_phi)
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect();
    BetaMatrix {
        modulus,
        characters,
        values,
    }
}

/// Sparse terms (n, c) of prod_{p | M, p not dividing f} (1 - chi0(p) p^shift p^{-s}),
/// where chi0 is the primitive character inducing chi and f its conductor.
pub fn euler_factor_terms(chi: &DirichletCharacter, shift: u32) -> Vec<(u64, CycloNumber)> {
    let prim = chi.restrict_to_conductor();
    let f = chi.conductor();
    let mut terms = vec![(1u64, CycloNumber::one())];
    for (p, _) in factorize(chi.modulus()) {
        if f % p == 0 {
            continue;
        }
        let c = -(prim.eval(p as i64) * CycloNumber::from_integer(BigInt::from(p).pow(shift)));
        let extra: Vec<(u64, CycloNumber)> = terms.iter().map(|(n, v)| (n * p, v * &c)).collect();
        terms.extend(extra);
    }
    terms.retain(|(_, c)| !c.is_zero());
    terms.sort_by_key(|(n, _)| *n);
    terms
}

/// Finite Euler product relating L(s, chi) to L(s, chi0) for the primitive chi0.
pub fn reduce_to_primitive(chi: &DirichletCharacter, nmax: usize) -> DirichletSeriesCoeffs {
    let mut out = DirichletSeriesCoeffs::zeros(nmax);
    for (n, c) in euler_factor_terms(chi, 0) {
        if (n as usize) <= nmax {
            out.set(n as usize, c);
        }
    }
    out
}
