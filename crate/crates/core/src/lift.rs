//! Coefficient-level Shimura lift, Hecke Eisenstein forms and the exact
//! residual of the L-series identity for periodic coefficient blocks.

use crate::arith::{divisors, gcd, lcm};
use crate::chars::{generalized_bernoulli, twist_psi_d, DirichletCharacter, Parity};
use crate::cyclo::{CycloNumber, IntegralAccumulator};
use crate::dseries::{beta_matrix, convolve, euler_factor_terms, l_coeffs, DirichletSeriesCoeffs};
use crate::error::{Error, Result};
use crate::qseries::CoefficientBlock;
use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;
use std::collections::HashMap;

/// Parameters (k, d, psi, l) of a weight k + 1/2 form and its block period.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftParams {
    k: u64,
    d: u64,
    psi: DirichletCharacter,
    psi_d: DirichletCharacter,
    period: u64,
}

impl LiftParams {
    pub fn new(k: u64, d: u64, psi: DirichletCharacter, period: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("the lift needs k >= 1".into()));
        }
        if period == 0 {
            return Err(Error::Domain("period must be at least 1".into()));
        }
        let psi_d = twist_psi_d(&psi, k, d)?;
        Ok(LiftParams {
            k,
            d,
            psi,
            psi_d,
            period,
        })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn psi(&self) -> &DirichletCharacter {
        &self.psi
    }

    pub fn psi_d(&self) -> &DirichletCharacter {
        &self.psi_d
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    /// Nebentypus characters of half-integral weight forms are even; an odd
    /// psi is accepted but reported here.
    pub fn psi_is_odd(&self) -> bool {
        self.psi.parity() == Parity::Odd
    }
}

/// A(n) = sum_{m | n} psi_d(m) m^{k-1} a(d (n/m)^2).
pub fn shimura_a(block: &CoefficientBlock, params: &LiftParams, nmax: usize) -> Result<DirichletSeriesCoeffs> {
    let series = block.unscaled_series(nmax)?;
    let twist = l_coeffs(&params.psi_d, params.k as i64 - 1, nmax)?;
    Ok(convolve(&twist, &series))
}

/// alpha_chi = sum over units h mod l of block(h) beta_chi(h), for every
/// character mod l in enumeration order. The block must be periodic mod l.
pub fn alpha_coeffs(block: &CoefficientBlock, l: u64) -> Result<Vec<(DirichletCharacter, CycloNumber)>> {
    if block.len() < l as usize {
        return Err(Error::Range {
            requested: l as usize,
            available: block.len(),
        });
    }
    block.check_periodic(l)?;
    Ok(alpha_at(block, 1, l))
}

/// The alpha coefficients of the part of the block with gcd(n, l) = g.
fn alpha_at(block: &CoefficientBlock, g: u64, l: u64) -> Vec<(DirichletCharacter, CycloNumber)> {
    let reduced = l / g;
    let beta = beta_matrix(reduced);
    beta.characters()
        .iter()
        .enumerate()
        .map(|(idx, chi)| {
            let alpha = (1..=reduced)
                .filter(|&h| gcd(h, reduced) == 1)
                .map(|h| block.value((g * h) as usize) * beta.beta(idx, h).expect("unit"))
                .sum();
            (chi.clone(), alpha)
        })
        .collect()
}

/// One term coefficient * n^{-s} L(s - i, chi) with chi primitive.
#[derive(Clone, Debug, PartialEq)]
pub struct LTerm {
    pub coefficient: CycloNumber,
    pub dilation: u64,
    pub character: DirichletCharacter,
}

/// Decomposes sum_n block(n) n^{-(s-i)} for a block of period l into
/// primitive L-series, collecting like terms. Only the first period is read.
///
/// Each class gcd(n, l) = g contributes g^{-(s-i)} sum_chi alpha^(g)_chi
/// L(s - i, chi) over characters mod l/g; every L is then written through
/// its Euler factors in terms of the primitive character inducing it.
pub fn block_decomposition(block: &CoefficientBlock, l: u64) -> Result<Vec<LTerm>> {
    if block.len() < l as usize {
        return Err(Error::Range {
            requested: l as usize,
            available: block.len(),
        });
    }
    let i = block.scale_exponent();
    let mut merged: HashMap<(u64, DirichletCharacter), CycloNumber> = HashMap::new();
    for g in divisors(l) {
        let g_pow = CycloNumber::from_integer(BigInt::from(g).pow(i));
        for (chi, alpha) in alpha_at(block, g, l) {
            if alpha.is_zero() {
                continue;
            }
            let prim = chi.restrict_to_conductor();
            let scaled = &alpha * &g_pow;
            for (n, c) in euler_factor_terms(&chi, i) {
                let entry = merged
                    .entry((g * n, prim.clone()))
                    .or_insert_with(CycloNumber::zero);
                *entry += &(&scaled * &c);
            }
        }
    }
    let mut terms: Vec<LTerm> = merged
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|((dilation, character), coefficient)| LTerm {
            coefficient,
            dilation,
            character,
        })
        .collect();
    terms.sort_by(|a, b| {
        (a.dilation, a.character.modulus(), a.character.exponents())
            .cmp(&(b.dilation, b.character.modulus(), b.character.exponents()))
    });
    Ok(terms)
}

/// Coefficients of sum_terms coefficient * n^{-s} L(s - shift, chi).
pub fn terms_series(terms: &[LTerm], shift: u32, nmax: usize) -> Result<DirichletSeriesCoeffs> {
    let mut out = DirichletSeriesCoeffs::zeros(nmax);
    let mut cache: HashMap<&DirichletCharacter, DirichletSeriesCoeffs> = HashMap::new();
    for t in terms {
        let top = nmax / t.dilation as usize;
        if top == 0 {
            continue;
        }
        if !cache.contains_key(&t.character) {
            cache.insert(&t.character, l_coeffs(&t.character, shift as i64, nmax)?);
        }
        out.add_scaled_dilated(&cache[&t.character], &t.coefficient, t.dilation);
    }
    Ok(out)
}

/// L(s - k + 1, psi_d) rebuilt from its primitive character and Euler factors.
fn twist_series(params: &LiftParams, nmax: usize) -> Result<DirichletSeriesCoeffs> {
    let shift = params.k as u32 - 1;
    let terms: Vec<LTerm> = euler_factor_terms(&params.psi_d, shift)
        .into_iter()
        .map(|(n, c)| LTerm {
            coefficient: c,
            dilation: n,
            character: params.psi_d.restrict_to_conductor(),
        })
        .collect();
    terms_series(&terms, shift, nmax)
}

/// Outcome of an exact two-sided coefficient comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityResidual {
    /// max_n |lhs(n) - rhs(n)| under the complex embedding.
    pub max_abs: f64,
    /// First index where the two sides differ exactly.
    pub witness_index: Option<usize>,
    /// First (index, reference) pair breaking periodicity of the block, if any.
    pub periodicity_violation: Option<(usize, usize)>,
    /// Set when the block scaling exponent equals k.
    pub shift_equals_weight: bool,
}

impl IdentityResidual {
    pub fn exact_zero(&self) -> bool {
        self.witness_index.is_none()
    }
}

#[derive(Serialize)]
struct IdentityRecord<'a> {
    check: &'a str,
    k: u64,
    d: u64,
    l: u64,
    i: u32,
    nmax: usize,
    residual_exact_zero: bool,
    residual_max_abs: f64,
    witness_index: Option<usize>,
}

/// JSON record of one identity check.
pub fn identity_record(
    check: &str,
    params: &LiftParams,
    i: u32,
    nmax: usize,
    residual: &IdentityResidual,
) -> serde_json::Value {
    serde_json::to_value(IdentityRecord {
        check,
        k: params.k,
        d: params.d,
        l: params.period,
        i,
        nmax,
        residual_exact_zero: residual.exact_zero(),
        residual_max_abs: residual.max_abs,
        witness_index: residual.witness_index,
    })
    .expect("serializable record")
}

fn identity_residual(block: &CoefficientBlock, params: &LiftParams, nmax: usize) -> Result<IdentityResidual> {
    let l = params.period;
    if block.len() < nmax {
        return Err(Error::Range {
            requested: nmax,
            available: block.len(),
        });
    }
    let periodicity_violation = match block.check_periodic(l) {
        Ok(()) => None,
        Err(Error::PeriodicityViolation { index, reference, .. }) => Some((index, reference)),
        Err(e) => return Err(e),
    };
    let lhs = shimura_a(block, params, nmax)?;
    let terms = block_decomposition(block, l)?;
    let block_side = terms_series(&terms, block.scale_exponent(), nmax)?;
    let rhs = convolve(&block_side, &twist_series(params, nmax)?);
    Ok(IdentityResidual {
        max_abs: lhs.max_abs_difference(&rhs),
        witness_index: lhs.first_difference(&rhs),
        periodicity_violation,
        shift_equals_weight: block.scale_exponent() as u64 == params.k,
    })
}

/// Compares sum A(n) n^{-s} with its decomposition into products
/// L(s, chi) L(s - k + 1, psi_d) built from the first period of the block.
///
/// The right side assumes periodicity, so an aperiodic block shows up both
/// in `periodicity_violation` and as a nonzero residual.
pub fn master_identity_residual(
    block: &CoefficientBlock,
    params: &LiftParams,
    nmax: usize,
) -> Result<IdentityResidual> {
    if block.scale_exponent() != 0 {
        return Err(Error::Domain(
            "the master identity takes an unscaled block; use remark_variant_residual".into(),
        ));
    }
    identity_residual(block, params, nmax)
}

/// The same comparison for a block of a(dn^2)/n^i with i >= 1, where every
/// L(s, chi) becomes L(s - i, chi). The case i = k is accepted and flagged.
pub fn remark_variant_residual(
    block: &CoefficientBlock,
    params: &LiftParams,
    nmax: usize,
) -> Result<IdentityResidual> {
    if block.scale_exponent() == 0 {
        return Err(Error::Domain("the scaled variant needs a block with i >= 1".into()));
    }
    identity_residual(block, params, nmax)
}

/// Hecke's Eisenstein series with L-series L(s, chi) L(s - k + 1, psi).
#[derive(Clone, Debug, PartialEq)]
pub struct EisensteinForm {
    pub k: u64,
    pub chi: DirichletCharacter,
    pub psi: DirichletCharacter,
    pub coeffs: DirichletSeriesCoeffs,
    pub constant_term: CycloNumber,
    pub level: u64,
    pub nebentypus: DirichletCharacter,
}

/// c(n) = sum_{m | n} chi(n/m) psi(m) m^{k-1}, with constant term
/// -B_{k,psi}/(2k) when chi is trivial and 0 otherwise.
pub fn hecke_eisenstein(
    chi: &DirichletCharacter,
    psi: &DirichletCharacter,
    k: u64,
    nmax: usize,
) -> Result<EisensteinForm> {
    if k == 0 {
        return Err(Error::Domain("weight must be positive".into()));
    }
    let odd = (chi.parity() == Parity::Odd) != (psi.parity() == Parity::Odd);
    if odd != (k % 2 == 1) {
        return Err(Error::Parity(format!(
            "(chi psi)(-1) = {} but (-1)^k = {}",
            if odd { -1 } else { 1 },
            if k % 2 == 1 { -1 } else { 1 }
        )));
    }
    for c in [chi, psi] {
        if !c.is_primitive() {
            return Err(Error::Imprimitive {
                modulus: c.modulus(),
                conductor: c.conductor(),
            });
        }
    }
    let order = lcm(chi.order(), psi.order());
    let (sc, sp) = (order / chi.order(), order / psi.order());
    let (cm, pm) = (chi.modulus(), psi.modulus());
    let chi_exp: Vec<Option<u64>> = (0..cm).map(|r| chi.value_exponent(r as i64)).collect();
    let psi_exp: Vec<Option<u64>> = (0..pm).map(|r| psi.value_exponent(r as i64)).collect();
    let mut acc: Vec<IntegralAccumulator> = (0..nmax).map(|_| IntegralAccumulator::new(order)).collect();
    let mut wide = vec![false; nmax];
    for m in 1..=nmax {
        let Some(b) = psi_exp[m % pm as usize] else {
            continue;
        };
        let w = (m as i128).checked_pow(k as u32 - 1);
        for j in 1..=nmax / m {
            let Some(a) = chi_exp[j % cm as usize] else {
                continue;
            };
            let n = m * j;
            match w {
                Some(w) if !wide[n - 1] => {
                    if !acc[n - 1].add_term(a * sc + b * sp, w) {
                        wide[n - 1] = true;
                    }
                }
                _ => wide[n - 1] = true,
            }
        }
    }
    let denom = BigInt::one();
    let coeffs = (1..=nmax)
        .map(|n| {
            if wide[n - 1] {
                divisor_sum_wide(chi, psi, k, n as u64)
            } else if acc[n - 1].is_zero() {
                CycloNumber::zero()
            } else {
                acc[n - 1].to_cyclo(&denom)
            }
        })
        .collect();
    let constant_term = if chi.modulus() == 1 {
        let b = generalized_bernoulli(psi, k as u32)?;
        b.scale(&num_rational::BigRational::new((-1).into(), BigInt::from(2 * k)))
    } else {
        CycloNumber::zero()
    };
    Ok(EisensteinForm {
        k,
        chi: chi.clone(),
        psi: psi.clone(),
        coeffs: DirichletSeriesCoeffs::new(coeffs),
        constant_term,
        level: chi.modulus() * psi.modulus(),
        nebentypus: chi.mul(psi),
    })
}

fn divisor_sum_wide(chi: &DirichletCharacter, psi: &DirichletCharacter, k: u64, n: u64) -> CycloNumber {
    divisors(n)
        .into_iter()
        .map(|m| {
            chi.eval((n / m) as i64)
                * psi.eval(m as i64)
                * CycloNumber::from_integer(BigInt::from(m).pow(k as u32 - 1))
        })
        .sum()
}
