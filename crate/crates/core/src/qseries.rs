//! Truncated q-expansions, theta series, V_l, T(p^2) and coefficient blocks.

use crate::arith::{is_prime, is_square_free, isqrt};
use crate::chars::{kronecker, DirichletCharacter};
use crate::cyclo::CycloNumber;
use crate::dseries::DirichletSeriesCoeffs;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

/// Coefficients a(0), ..., a(precision - 1) of a q-expansion at infinity.
///
/// Weight, level and nebentypus are metadata: arithmetic never checks
/// modularity.
#[derive(Clone, Debug, PartialEq)]
pub struct QExpansion {
    coeffs: Vec<CycloNumber>,
    weight_twice: u32,
    level: u64,
    character: DirichletCharacter,
    cuspidal: bool,
    shimura_cuspidal: bool,
}

impl QExpansion {
    pub fn new(
        coeffs: Vec<CycloNumber>,
        weight_twice: u32,
        level: u64,
        character: DirichletCharacter,
    ) -> Self {
        QExpansion {
            coeffs,
            weight_twice,
            level,
            character,
            cuspidal: false,
            shimura_cuspidal: false,
        }
    }

    pub fn zero(precision: usize, weight_twice: u32, level: u64, character: DirichletCharacter) -> Self {
        Self::new(vec![CycloNumber::zero(); precision], weight_twice, level, character)
    }

    /// Tags the expansion as a cusp form; requires a(0) = 0.
    pub fn into_cuspidal(mut self) -> Result<Self> {
        if self.coeffs.first().is_some_and(|c| !c.is_zero()) {
            return Err(Error::Domain("cusp forms have vanishing constant term".into()));
        }
        self.cuspidal = true;
        Ok(self)
    }

    /// User assertion that the Shimura lift of this weight-3/2 form is
    /// cuspidal. Nothing checks it.
    pub fn with_shimura_cuspidal(mut self, flag: bool) -> Self {
        self.shimura_cuspidal = flag;
        self
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[CycloNumber] {
        &self.coeffs
    }

    /// a(n), for n < precision.
    pub fn coeff(&self, n: usize) -> &CycloNumber {
        &self.coeffs[n]
    }

    pub fn weight_twice(&self) -> u32 {
        self.weight_twice
    }

    pub fn is_half_integral(&self) -> bool {
        self.weight_twice % 2 == 1
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn character(&self) -> &DirichletCharacter {
        &self.character
    }

    pub fn is_cuspidal(&self) -> bool {
        self.cuspidal
    }

    pub fn is_shimura_cuspidal(&self) -> bool {
        self.shimura_cuspidal
    }

    /// Coefficientwise sum on the common precision.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.weight_twice != other.weight_twice {
            return Err(Error::Domain(format!(
                "cannot add weights {}/2 and {}/2",
                self.weight_twice, other.weight_twice
            )));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        let mut out = Self::new(
            coeffs,
            self.weight_twice,
            crate::arith::lcm(self.level, other.level),
            self.character.clone(),
        );
        out.cuspidal = self.cuspidal && other.cuspidal;
        Ok(out)
    }

    pub fn scale(&self, c: &CycloNumber) -> Self {
        let mut out = self.clone();
        out.coeffs = self.coeffs.iter().map(|a| a * c).collect();
        out
    }
}

/// theta_{psi,d} = sum psi(n) q^{d n^2} (weight 1/2), or the weight-3/2
/// variant sum psi(n) n q^{d n^2}.
///
/// The nebentypus tag is psi for weight 1/2 and psi times the character of
/// Q(i) for weight 3/2; the level tag is 4 d M^2 with M the modulus of psi.
pub fn theta_series(
    psi: &DirichletCharacter,
    d: u64,
    weight3half: bool,
    precision: usize,
) -> Result<QExpansion> {
    if !is_square_free(d) {
        return Err(Error::NotSquareFree(d));
    }
    if precision == 0 {
        return Err(Error::Domain("precision must be at least 1".into()));
    }
    let mut coeffs = vec![CycloNumber::zero(); precision];
    let mut n = 1u64;
    while ((d * n * n) as usize) < precision {
        let v = psi.eval(n as i64);
        coeffs[(d * n * n) as usize] = if weight3half {
            v * CycloNumber::from_integer(n as i64)
        } else {
            v
        };
        n += 1;
    }
    let m = psi.modulus();
    let (weight_twice, character) = if weight3half {
        let chi4 = DirichletCharacter::from_exponents(4, vec![1]).expect("character mod 4");
        (3, psi.mul(&chi4))
    } else {
        (1, psi.clone())
    };
    QExpansion::new(coeffs, weight_twice, 4 * d * m * m, character).into_cuspidal()
}

/// f | V_l, i.e. f(lz).
pub fn shift_v(f: &QExpansion, l: u64) -> Result<QExpansion> {
    if l == 0 {
        return Err(Error::Domain("V_l needs l >= 1".into()));
    }
    let l = l as usize;
    let precision = l * (f.precision() - 1) + 1;
    let mut coeffs = vec![CycloNumber::zero(); precision];
    for (n, c) in f.coeffs.iter().enumerate() {
        coeffs[n * l] = c.clone();
    }
    let mut out = QExpansion::new(coeffs, f.weight_twice, f.level * l as u64, f.character.clone());
    out.cuspidal = f.cuspidal;
    out.shimura_cuspidal = f.shimura_cuspidal;
    Ok(out)
}

/// Half-integral weight Hecke operator T(p^2) on a form of weight k + 1/2:
///
/// b(n) = a(p^2 n) + psi(p) ((-1)^k n / p) p^{k-1} a(n) + psi(p^2) p^{2k-1} a(n/p^2).
pub fn hecke_tp2(f: &QExpansion, p: u64, psi: &DirichletCharacter) -> Result<QExpansion> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if !f.is_half_integral() {
        return Err(Error::Domain(format!(
            "T(p^2) acts on half-integral weight, got weight {}/2",
            f.weight_twice
        )));
    }
    let k = (f.weight_twice - 1) / 2;
    let p2 = (p * p) as usize;
    let precision = (f.precision() - 1) / p2 + 1;
    let psi_p = psi.eval(p as i64);
    let psi_p2 = psi.eval((p * p) as i64);
    let pow_p = |e: i64| -> CycloNumber {
        let base = BigRational::from_integer(BigInt::from(p));
        let r = if e >= 0 {
            crate::arith::pow_rational(&base, e as u32)
        } else {
            BigRational::one() / crate::arith::pow_rational(&base, (-e) as u32)
        };
        CycloNumber::from_rational(r)
    };
    let middle = &psi_p * &pow_p(k as i64 - 1);
    let last = &psi_p2 * &pow_p(2 * k as i64 - 1);
    let sign = if k % 2 == 0 { 1 } else { -1 };
    let coeffs = (0..precision)
        .map(|n| {
            let mut b = f.coeffs[p2 * n].clone();
            let an = &f.coeffs[n];
            if !an.is_zero() {
                let symbol = kronecker(sign * n as i64, p as i64).expect("p is nonzero");
                if symbol != 0 {
                    b += &(&middle * an * CycloNumber::from_integer(symbol as i64));
                }
            }
            if n % p2 == 0 {
                b += &(&last * &f.coeffs[n / p2]);
            }
            b
        })
        .collect();
    let mut out = QExpansion::new(coeffs, f.weight_twice, f.level, f.character.clone());
    out.cuspidal = f.cuspidal;
    Ok(out)
}

/// Scalar lambda with T(p^2) f = lambda f on the computable range, if any.
pub fn hecke_eigenvalue(f: &QExpansion, p: u64, psi: &DirichletCharacter) -> Result<Option<CycloNumber>> {
    let tf = hecke_tp2(f, p, psi)?;
    let n = tf.precision();
    let Some(first) = (0..n).find(|&i| !f.coeffs[i].is_zero()) else {
        return Ok(if tf.coeffs.iter().all(CycloNumber::is_zero) {
            Some(CycloNumber::zero())
        } else {
            None
        });
    };
    let lambda = &tf.coeffs[first] * &f.coeffs[first].inv().expect("nonzero");
    let consistent = (0..n).all(|i| tf.coeffs[i] == &lambda * &f.coeffs[i]);
    Ok(consistent.then_some(lambda))
}

/// The sequence a(d n^2) / n^i for 1 <= n <= length.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientBlock {
    d: u64,
    scale_exponent: u32,
    values: Vec<CycloNumber>,
    source_precision: usize,
}

impl CoefficientBlock {
    /// A block given directly by its values; `values[n - 1]` is a(dn^2)/n^i.
    pub fn from_values(d: u64, scale_exponent: u32, values: Vec<CycloNumber>) -> Result<Self> {
        if !is_square_free(d) {
            return Err(Error::NotSquareFree(d));
        }
        let len = values.len();
        Ok(CoefficientBlock {
            d,
            scale_exponent,
            values,
            source_precision: d as usize * len * len + 1,
        })
    }

    /// The block whose first `period` entries repeat up to `len`.
    pub fn periodic(d: u64, scale_exponent: u32, pattern: &[CycloNumber], len: usize) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::Domain("empty period pattern".into()));
        }
        let values = (0..len).map(|i| pattern[i % pattern.len()].clone()).collect();
        Self::from_values(d, scale_exponent, values)
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn scale_exponent(&self) -> u32 {
        self.scale_exponent
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[CycloNumber] {
        &self.values
    }

    /// Stored entry a(dn^2)/n^i, 1-based.
    pub fn value(&self, n: usize) -> &CycloNumber {
        &self.values[n - 1]
    }

    /// The unscaled coefficient a(dn^2).
    pub fn coefficient(&self, n: usize) -> CycloNumber {
        let v = self.value(n);
        if self.scale_exponent == 0 || v.is_zero() {
            return v.clone();
        }
        v * &CycloNumber::from_integer(BigInt::from(n).pow(self.scale_exponent))
    }

    pub fn source_precision(&self) -> usize {
        self.source_precision
    }

    pub fn with_values(&self, values: Vec<CycloNumber>) -> Self {
        CoefficientBlock {
            values,
            ..self.clone()
        }
    }

    /// Checks values[n] = values[n + period] on the whole stored range.
    pub fn check_periodic(&self, period: u64) -> Result<()> {
        let l = period as usize;
        if l == 0 {
            return Err(Error::Domain("period must be positive".into()));
        }
        for n in (l + 1)..=self.len() {
            let reference = (n - 1) % l + 1;
            if self.values[n - 1] != self.values[reference - 1] {
                return Err(Error::PeriodicityViolation {
                    period,
                    index: n,
                    reference,
                });
            }
        }
        Ok(())
    }

    /// The block read as a Dirichlet series sum a(d m^2) m^{-s} (unscaled).
    pub fn unscaled_series(&self, nmax: usize) -> Result<DirichletSeriesCoeffs> {
        if nmax > self.len() {
            return Err(Error::Range {
                requested: nmax,
                available: self.len(),
            });
        }
        Ok(DirichletSeriesCoeffs::new(
            (1..=nmax).map(|n| self.coefficient(n)).collect(),
        ))
    }
}

/// Extracts a(dn^2)/n^i for every n with dn^2 < precision.
pub fn block(f: &QExpansion, d: u64, i: u32) -> Result<CoefficientBlock> {
    if !is_square_free(d) {
        return Err(Error::NotSquareFree(d));
    }
    let p = f.precision() as u64;
    let len = if p == 0 { 0 } else { isqrt((p - 1) / d) as usize };
    let values = (1..=len)
        .map(|n| {
            let a = f.coeff(d as usize * n * n);
            if i == 0 || a.is_zero() {
                a.clone()
            } else {
                let denom = BigRational::from_integer(BigInt::from(n).pow(i));
                a.scale(&denom.recip())
            }
        })
        .collect();
    Ok(CoefficientBlock {
        d,
        scale_exponent: i,
        values,
        source_precision: f.precision(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chars::{character_by_index, enumerate_characters};
    use proptest::prelude::*;

    fn int(n: i64) -> CycloNumber {
        CycloNumber::from_integer(n)
    }

    fn support(f: &QExpansion) -> Vec<(usize, CycloNumber)> {
        f.coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(n, c)| (n, c.clone()))
            .collect()
    }

    fn psi12() -> DirichletCharacter {
        let psi = character_by_index(12, 3).unwrap();
        assert_eq!(psi.eval(5), int(-1));
        assert_eq!(psi.eval(7), int(-1));
        assert_eq!(psi.eval(11), int(1));
        psi
    }

    #[test]
    fn theta_examples() {
        let one = DirichletCharacter::principal(1);
        let t = theta_series(&one, 1, false, 10).unwrap();
        assert_eq!(support(&t), vec![(1, int(1)), (4, int(1)), (9, int(1))]);
        assert_eq!(t.weight_twice(), 1);
        assert!(t.is_cuspidal());

        let t = theta_series(&psi12(), 1, false, 50).unwrap();
        assert_eq!(support(&t), vec![(1, int(1)), (25, int(-1)), (49, int(-1))]);

        let t = theta_series(&DirichletCharacter::principal(2), 1, true, 50).unwrap();
        assert_eq!(
            support(&t),
            vec![(1, int(1)), (9, int(3)), (25, int(5)), (49, int(7))]
        );
        assert_eq!(t.weight_twice(), 3);

        assert_eq!(theta_series(&one, 4, false, 10), Err(Error::NotSquareFree(4)));
        assert!(theta_series(&one, 1, false, 0).is_err());
    }

    #[test]
    fn shift_examples() {
        let one = DirichletCharacter::principal(1);
        let f = QExpansion::new(vec![int(0), int(1), int(2)], 4, 1, one.clone());
        assert_eq!(shift_v(&f, 1).unwrap(), f);
        let g = shift_v(&f, 3).unwrap();
        assert_eq!(support(&g), vec![(3, int(1)), (6, int(2))]);
        assert_eq!(g.precision(), 7);
        assert_eq!(g.level(), 3);

        // block of theta_{psi,1} | V_l at d = l recovers psi(n)
        let psi = character_by_index(5, 1).unwrap();
        let theta = theta_series(&psi, 1, false, 120).unwrap();
        for l in [2u64, 3, 5] {
            let b = block(&shift_v(&theta, l).unwrap(), l, 0).unwrap();
            assert!(b.len() >= 10);
            for n in 1..=b.len() {
                assert_eq!(*b.value(n), psi.eval(n as i64));
            }
        }
    }

    #[test]
    fn shift_by_square_rescales_blocks() {
        let psi = character_by_index(7, 2).unwrap();
        let theta = theta_series(&psi, 3, false, 3000).unwrap();
        let l = 2u64;
        let shifted = shift_v(&theta, l * l).unwrap();
        let b = block(&theta, 3, 0).unwrap();
        let bs = block(&shifted, 3, 0).unwrap();
        // a_shifted(d (ln)^2) = a(d n^2); entries with l not dividing n vanish
        for n in 1..=bs.len() {
            if n % l as usize == 0 {
                assert_eq!(bs.value(n), b.value(n / l as usize));
            } else {
                assert!(bs.value(n).is_zero());
            }
        }
    }

    #[test]
    fn hecke_examples() {
        let one = DirichletCharacter::principal(4);
        let zero = QExpansion::zero(100, 3, 4, one.clone());
        let t = hecke_tp2(&zero, 3, &one).unwrap();
        assert!(t.coeffs().iter().all(CycloNumber::is_zero));
        assert_eq!(t.precision(), (100 - 1) / 9 + 1);

        assert_eq!(hecke_tp2(&zero, 4, &one), Err(Error::NotPrime(4)));
        let integral = QExpansion::zero(10, 4, 4, one.clone());
        assert!(hecke_tp2(&integral, 3, &one).is_err());
    }

    #[test]
    fn weight_three_half_theta_is_an_eigenform() {
        // sum psi(n) n q^{n^2} has nebentypus psi * chi_{-4}; eigenvalue psi(p)(p + 1)
        for (m, idx) in [(1u64, 0usize), (3, 1), (5, 1), (5, 2), (8, 1)] {
            let psi = character_by_index(m, idx).unwrap();
            let theta = theta_series(&psi, 1, true, 4000).unwrap();
            let neben = theta.character().clone();
            for p in [3u64, 5, 7, 11, 13] {
                let lambda = hecke_eigenvalue(&theta, p, &neben).unwrap();
                let expected = psi.eval(p as i64) * int(p as i64 + 1);
                assert_eq!(lambda, Some(expected), "psi mod {} idx {} p {}", m, idx, p);
            }
        }
    }

    #[test]
    fn weight_half_theta_is_an_eigenform() {
        for psi in enumerate_characters(5).into_iter().chain(enumerate_characters(8)) {
            if psi.parity() != crate::chars::Parity::Even {
                continue;
            }
            let theta = theta_series(&psi, 1, false, 5000).unwrap();
            for p in [3u64, 7, 11] {
                let lambda = hecke_eigenvalue(&theta, p, &psi).unwrap();
                let expected = psi.eval(p as i64) * CycloNumber::from_ratio(p as i64 + 1, p as i64);
                assert_eq!(lambda, Some(expected));
            }
        }
    }

    #[test]
    fn hecke_on_square_support_without_p() {
        // a supported on m^2 with p not dividing m: third term vanishes
        let psi = DirichletCharacter::principal(4);
        let p = 3u64;
        let mut coeffs = vec![CycloNumber::zero(); 400];
        for m in [1usize, 2, 4, 5] {
            coeffs[m * m] = int(m as i64 + 10);
        }
        let f = QExpansion::new(coeffs, 3, 4, psi.clone());
        let t = hecke_tp2(&f, p, &psi).unwrap();
        for m in [1usize, 2, 4, 5] {
            let n = m * m;
            if n >= t.precision() {
                continue;
            }
            let symbol = kronecker(-(n as i64), p as i64).unwrap();
            let expected = f.coeff(9 * n) + &(psi.eval(3) * f.coeff(n) * int(symbol as i64));
            assert_eq!(*t.coeff(n), expected);
        }
    }

    #[test]
    fn block_examples() {
        let psi = character_by_index(7, 3).unwrap();
        let theta = theta_series(&psi, 1, false, 500).unwrap();
        let b = block(&theta, 1, 0).unwrap();
        assert_eq!(b.len(), 22);
        for n in 1..=b.len() {
            assert_eq!(*b.value(n), psi.eval(n as i64));
        }
        b.check_periodic(7).unwrap();

        let t3 = theta_series(&DirichletCharacter::principal(2), 1, true, 1000).unwrap();
        let b = block(&t3, 1, 1).unwrap();
        for n in 1..=b.len() {
            assert_eq!(*b.value(n), int((n % 2) as i64));
        }
        b.check_periodic(2).unwrap();
        assert_eq!(b.coefficient(5), int(5));

        // form supported on odd exponents: d = 2 block is zero
        let coeffs = (0..200).map(|n| int((n % 2) as i64)).collect();
        let f = QExpansion::new(coeffs, 3, 4, DirichletCharacter::principal(4));
        let b = block(&f, 2, 0).unwrap();
        assert!(b.values().iter().all(CycloNumber::is_zero));
    }

    #[test]
    fn periodicity_violation_reports_first_index() {
        let mut vals: Vec<CycloNumber> = (0..20).map(|n| int((n % 3) as i64)).collect();
        vals[10] = int(99);
        let b = CoefficientBlock::from_values(1, 0, vals).unwrap();
        assert_eq!(
            b.check_periodic(3),
            Err(Error::PeriodicityViolation {
                period: 3,
                index: 11,
                reference: 2
            })
        );
    }

    #[test]
    fn addition_rules() {
        let one = DirichletCharacter::principal(4);
        let a = QExpansion::new(vec![int(1); 10], 3, 4, one.clone());
        let b = QExpansion::new(vec![int(2); 6], 3, 4, one.clone());
        let s = a.add(&b).unwrap();
        assert_eq!(s.precision(), 6);
        assert_eq!(*s.coeff(5), int(3));
        let c = QExpansion::new(vec![int(2); 6], 5, 4, one);
        assert!(a.add(&c).is_err());
    }

    proptest! {
        #[test]
        fn hecke_is_linear(
            a in prop::collection::vec(-4i64..=4, 120),
            b in prop::collection::vec(-4i64..=4, 90),
            p in prop::sample::select(vec![2u64, 3, 5]),
            k in 0u32..3,
        ) {
            let psi = character_by_index(12, 2).unwrap();
            let f = QExpansion::new(a.into_iter().map(int).collect(), 2 * k + 1, 12, psi.clone());
            let g = QExpansion::new(b.into_iter().map(int).collect(), 2 * k + 1, 12, psi.clone());
            let lhs = hecke_tp2(&f.add(&g).unwrap(), p, &psi).unwrap();
            let rhs = hecke_tp2(&f, p, &psi).unwrap().add(&hecke_tp2(&g, p, &psi).unwrap()).unwrap();
            prop_assert_eq!(lhs.coeffs(), rhs.coeffs());
        }

        #[test]
        fn theta_block_is_the_character(m in 1u64..25, idx in 0usize..16, d in prop::sample::select(vec![1u64, 2, 3, 5, 6])) {
            let chars = enumerate_characters(m);
            let psi = &chars[idx % chars.len()];
            let theta = theta_series(psi, d, false, 2000).unwrap();
            let b = block(&theta, d, 0).unwrap();
            for n in 1..=b.len() {
                prop_assert_eq!(b.value(n), &psi.eval(n as i64));
            }
        }
    }
}
