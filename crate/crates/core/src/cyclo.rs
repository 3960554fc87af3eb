//! Exact arithmetic in cyclotomic fields Q(zeta_m).
//!
//! An element of order `m` is stored in the power basis
//! `1, zeta_m, ..., zeta_m^(phi(m)-1)` reduced modulo the m-th cyclotomic
//! polynomial. Orders congruent to 2 mod 4 are folded onto `m/2`, since
//! Q(zeta_2m) = Q(zeta_m) for odd m, so every stored order is odd or divisible
//! by four. Mixed-order arithmetic happens at the lcm of the operand orders.

use crate::arith::{divisors, lcm, mobius, totient};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Arc, OnceLock, RwLock};

/// Reduction data for one order: `rows[e]` expresses zeta^e in the power basis.
struct CycloTable {
    phi: usize,
    rows: Vec<Vec<(usize, i64)>>,
}

fn normalize_order(m: u64) -> u64 {
    assert!(m >= 1, "cyclotomic order must be positive");
    if m % 4 == 2 {
        m / 2
    } else {
        m
    }
}

/// Coefficients (low to high) of the m-th cyclotomic polynomial.
fn cyclotomic_poly(m: u64) -> Vec<i64> {
    let mut num: Vec<i64> = vec![1];
    let mut dens = Vec::new();
    for d in divisors(m) {
        match mobius(m / d) {
            1 => num = poly_mul(&num, &x_pow_minus_one(d as usize)),
            -1 => dens.push(d as usize),
            _ => {}
        }
    }
    for d in dens {
        num = poly_div_monic(&num, &x_pow_minus_one(d));
    }
    num
}

fn x_pow_minus_one(d: usize) -> Vec<i64> {
    let mut p = vec![0; d + 1];
    p[0] = -1;
    p[d] = 1;
    p
}

fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_div_monic(a: &[i64], b: &[i64]) -> Vec<i64> {
    let db = b.len() - 1;
    let mut rem = a.to_vec();
    let mut q = vec![0i64; a.len() - db];
    for i in (0..q.len()).rev() {
        let c = rem[i + db];
        q[i] = c;
        if c != 0 {
            for (j, &bj) in b.iter().enumerate() {
                rem[i + j] -= c * bj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0), "inexact cyclotomic division");
    q
}

impl CycloTable {
    fn build(order: u64) -> Self {
        let phi = totient(order) as usize;
        let cyc = cyclotomic_poly(order);
        debug_assert_eq!(cyc.len(), phi + 1);
        let mut dense: Vec<Vec<i64>> = Vec::with_capacity(order as usize);
        for e in 0..order as usize {
            if e < phi {
                let mut r = vec![0; phi];
                r[e] = 1;
                dense.push(r);
            } else {
                // zeta^e = zeta * zeta^(e-1), with zeta^phi = -sum cyc[j] zeta^j
                let prev = &dense[e - 1];
                let top = prev[phi - 1];
                let mut r = vec![0; phi];
                for j in (1..phi).rev() {
                    r[j] = prev[j - 1];
                }
                for (j, rj) in r.iter_mut().enumerate() {
                    *rj -= top * cyc[j];
                }
                dense.push(r);
            }
        }
        let rows = dense
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .enumerate()
                    .filter(|&(_, c)| c != 0)
                    .collect()
            })
            .collect();
        CycloTable { phi, rows }
    }
}

fn table(order: u64) -> Arc<CycloTable> {
    static TABLES: OnceLock<RwLock<HashMap<u64, Arc<CycloTable>>>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(t) = tables.read().expect("cyclotomic table lock").get(&order) {
        return Arc::clone(t);
    }
    let built = Arc::new(CycloTable::build(order));
    let mut w = tables.write().expect("cyclotomic table lock");
    Arc::clone(w.entry(order).or_insert(built))
}

/// An exact element of a cyclotomic field.
#[derive(Clone, Debug)]
pub struct CycloNumber {
    order: u64,
    coeffs: Vec<BigRational>,
}

impl CycloNumber {
    pub fn zero() -> Self {
        Self::from_rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_rational(q: BigRational) -> Self {
        CycloNumber {
            order: 1,
            coeffs: vec![q],
        }
    }

    pub fn from_integer<T: Into<BigInt>>(n: T) -> Self {
        Self::from_rational(BigRational::from_integer(n.into()))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(num.into(), den.into()))
    }

    /// The element zeta_order^exp.
    pub fn root_of_unity(order: u64, exp: u64) -> Self {
        Self::from_powers(order, [(exp, BigRational::one())])
    }

    /// Builds `sum c * zeta_order^e` from (exponent, coefficient) pairs.
    pub fn from_powers<I>(order: u64, terms: I) -> Self
    where
        I: IntoIterator<Item = (u64, BigRational)>,
    {
        let (target, fold) = if order % 4 == 2 {
            (order / 2, true)
        } else {
            (order, false)
        };
        let t = table(target);
        let mut coeffs = vec![BigRational::zero(); t.phi];
        for (e, c) in terms {
            if c.is_zero() {
                continue;
            }
            let e = e % order;
            let (e, c) = if fold {
                // zeta_{2m} = -zeta_m^{(m+1)/2} for odd m
                let half = (target + 1) / 2;
                let c = if e % 2 == 1 { -c } else { c };
                ((e * half) % target, c)
            } else {
                (e, c)
            };
            for &(idx, r) in &t.rows[e as usize] {
                coeffs[idx] += &c * BigRational::from_integer(r.into());
            }
        }
        CycloNumber {
            order: target,
            coeffs,
        }
    }

    /// Builds an element from power-basis coefficients at the given order.
    pub fn from_coeffs(order: u64, coeffs: Vec<BigRational>) -> Option<Self> {
        if order == 0 || order % 4 == 2 || coeffs.len() != totient(order) as usize {
            return None;
        }
        Some(CycloNumber { order, coeffs })
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|q| q.is_one())
    }

    /// The rational value, if the element lies in Q.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    /// Coefficients re-expressed at order `target` (a multiple of the own order).
    fn promoted(&self, target: u64) -> Vec<BigRational> {
        if target == self.order {
            return self.coeffs.clone();
        }
        debug_assert!(target % self.order == 0);
        let t = table(target);
        let step = target / self.order;
        let mut out = vec![BigRational::zero(); t.phi];
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for &(idx, r) in &t.rows[j * step as usize] {
                out[idx] += c * BigRational::from_integer(r.into());
            }
        }
        out
    }

    pub fn promote(&self, target: u64) -> Self {
        let target = normalize_order(target);
        assert!(
            target % self.order == 0,
            "cannot promote order {} to {}",
            self.order,
            target
        );
        CycloNumber {
            order: target,
            coeffs: self.promoted(target),
        }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        CycloNumber {
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| {
                    if c.is_zero() {
                        BigRational::zero()
                    } else if c.denom().is_one() && q.denom().is_one() {
                        BigRational::from_integer(c.numer() * q.numer())
                    } else {
                        c * q
                    }
                })
                .collect(),
        }
    }

    /// Complex conjugate (zeta -> zeta^-1).
    pub fn conj(&self) -> Self {
        if self.order == 1 {
            return self.clone();
        }
        let m = self.order;
        Self::from_powers(
            m,
            self.coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(j, c)| ((m - j as u64) % m, c.clone())),
        )
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(q) = self.as_rational() {
            return Some(Self::from_rational(q.recip()));
        }
        // Solve (self * x) = 1 using the multiplication-by-self matrix.
        let phi = self.coeffs.len();
        let mut cols = Vec::with_capacity(phi);
        for j in 0..phi {
            let basis = Self::root_of_unity(self.order, j as u64);
            cols.push((self * &basis).coeffs);
        }
        let mut aug: Vec<Vec<BigRational>> = (0..phi)
            .map(|i| {
                let mut row: Vec<BigRational> = (0..phi).map(|j| cols[j][i].clone()).collect();
                row.push(if i == 0 {
                    BigRational::one()
                } else {
                    BigRational::zero()
                });
                row
            })
            .collect();
        solve_in_place(&mut aug)?;
        Some(CycloNumber {
            order: self.order,
            coeffs: aug.into_iter().map(|mut r| r.pop().unwrap()).collect(),
        })
    }

    /// Embedding into C sending zeta_m to exp(2 pi i / m).
    pub fn to_complex(&self) -> Complex64 {
        let m = self.order as f64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / m;
                Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN), theta)
            })
            .sum()
    }

    fn binary(&self, other: &Self, f: impl Fn(&mut BigRational, &BigRational)) -> Self {
        if self.order == other.order {
            let mut coeffs = self.coeffs.clone();
            for (a, b) in coeffs.iter_mut().zip(&other.coeffs) {
                f(a, b);
            }
            return CycloNumber {
                order: self.order,
                coeffs,
            };
        }
        let l = lcm(self.order, other.order);
        let mut coeffs = self.promoted(l);
        for (a, b) in coeffs.iter_mut().zip(other.promoted(l)) {
            f(a, &b);
        }
        CycloNumber { order: l, coeffs }
    }

    fn mul_ref(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if let Some(q) = self.as_rational() {
            return other.scale(q);
        }
        if let Some(q) = other.as_rational() {
            return self.scale(q);
        }
        let l = lcm(self.order, other.order);
        let x = self.promoted(l);
        let y = other.promoted(l);
        let t = table(l);
        let phi = t.phi;
        let mut prod = vec![BigRational::zero(); 2 * phi - 1];
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        let mut high = prod.split_off(phi);
        for (k, c) in high.iter_mut().enumerate() {
            if c.is_zero() {
                continue;
            }
            let deg = (phi + k) % l as usize;
            for &(idx, r) in &t.rows[deg] {
                prod[idx] += &*c * BigRational::from_integer(r.into());
            }
        }
        CycloNumber {
            order: l,
            coeffs: prod,
        }
    }
}

/// Integer combinations sum c_e zeta_order^e accumulated without reduction,
/// with an optional common denominator applied on conversion.
#[derive(Clone, Debug)]
pub struct IntegralAccumulator {
    order: u64,
    slots: Vec<i128>,
}

impl IntegralAccumulator {
    pub fn new(order: u64) -> Self {
        IntegralAccumulator {
            order,
            slots: vec![0; order as usize],
        }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.slots.iter().all(|&c| c == 0)
    }

    /// Adds c * zeta^e; `false` on overflow (the accumulator is then unusable).
    #[inline]
    pub fn add_term(&mut self, e: u64, c: i128) -> bool {
        let slot = &mut self.slots[(e % self.order) as usize];
        match slot.checked_add(c) {
            Some(v) => {
                *slot = v;
                true
            }
            None => false,
        }
    }

    /// The exact value divided by `denom`.
    pub fn to_cyclo(&self, denom: &BigInt) -> CycloNumber {
        let order = self.order;
        let (target, fold) = if order % 4 == 2 {
            (order / 2, true)
        } else {
            (order, false)
        };
        let t = table(target);
        let mut acc = vec![0i128; t.phi];
        let mut wide: Option<Vec<BigInt>> = None;
        for (e, &c) in self.slots.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let e = e as u64;
            let (e, c) = if fold {
                let half = (target + 1) / 2;
                ((e * half) % target, if e % 2 == 1 { -c } else { c })
            } else {
                (e, c)
            };
            for &(idx, r) in &t.rows[e as usize] {
                if let Some(w) = wide.as_mut() {
                    w[idx] += BigInt::from(c) * r;
                    continue;
                }
                match c.checked_mul(r as i128).and_then(|v| acc[idx].checked_add(v)) {
                    Some(v) => acc[idx] = v,
                    None => {
                        let mut w: Vec<BigInt> = acc.iter().map(|&v| BigInt::from(v)).collect();
                        w[idx] += BigInt::from(c) * r;
                        wide = Some(w);
                    }
                }
            }
        }
        let nums: Vec<BigInt> = match wide {
            Some(w) => w,
            None => acc.into_iter().map(BigInt::from).collect(),
        };
        CycloNumber {
            order: target,
            coeffs: nums
                .into_iter()
                .map(|n| {
                    if n.is_zero() {
                        BigRational::zero()
                    } else if denom.is_one() {
                        BigRational::from_integer(n)
                    } else {
                        BigRational::new(n, denom.clone())
                    }
                })
                .collect(),
        }
    }
}

impl CycloNumber {
    /// Terms (e, c) with self * scale = sum c zeta_order^e, where `order` is a
    /// multiple of the own order. `None` if a coefficient times `scale` is not
    /// an integer or does not fit.
    pub fn integral_terms(&self, order: u64, scale: &BigInt) -> Option<Vec<(u64, i128)>> {
        if order % self.order != 0 {
            return None;
        }
        let stride = order / self.order;
        let mut out = Vec::new();
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = if c.denom().is_one() {
                if scale.is_one() {
                    c.numer().to_i128()?
                } else {
                    (c.numer() * scale).to_i128()?
                }
            } else {
                let (q, r) = scale.div_rem(c.denom());
                if !r.is_zero() {
                    return None;
                }
                (c.numer() * q).to_i128()?
            };
            out.push((j as u64 * stride, v));
        }
        Some(out)
    }

    /// Lcm of the coefficient denominators.
    pub fn denominator(&self) -> BigInt {
        self.coeffs
            .iter()
            .filter(|c| !c.denom().is_one())
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }
}

/// Gauss-Jordan elimination on an augmented square system; the solution is
/// left in the last column.
fn solve_in_place(aug: &mut [Vec<BigRational>]) -> Option<()> {
    let n = aug.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !aug[r][col].is_zero())?;
        aug.swap(col, pivot);
        let p = aug[col][col].clone();
        for v in aug[col].iter_mut() {
            *v /= &p;
        }
        for r in 0..n {
            if r != col && !aug[r][col].is_zero() {
                let f = aug[r][col].clone();
                let (src, dst) = if r < col {
                    let (a, b) = aug.split_at_mut(col);
                    (&b[0], &mut a[r])
                } else {
                    let (a, b) = aug.split_at_mut(r);
                    (&a[col], &mut b[0])
                };
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    *d -= &f * s;
                }
            }
        }
    }
    Some(())
}

impl PartialEq for CycloNumber {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        let l = lcm(self.order, other.order);
        self.promoted(l) == other.promoted(l)
    }
}

impl Eq for CycloNumber {}

impl Default for CycloNumber {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for CycloNumber {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl From<BigRational> for CycloNumber {
    fn from(q: BigRational) -> Self {
        Self::from_rational(q)
    }
}

impl fmt::Display for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", sign)?;
            }
            first = false;
            match j {
                0 => write!(f, "{}", mag)?,
                _ if mag.is_one() => write!(f, "z{}^{}", self.order, j)?,
                _ => write!(f, "{}*z{}^{}", mag, self.order, j)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&CycloNumber> for &CycloNumber {
            type Output = CycloNumber;
            fn $method(self, rhs: &CycloNumber) -> CycloNumber {
                let f: fn(&CycloNumber, &CycloNumber) -> CycloNumber = $body;
                f(self, rhs)
            }
        }
        impl $tr<CycloNumber> for CycloNumber {
            type Output = CycloNumber;
            fn $method(self, rhs: CycloNumber) -> CycloNumber {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&CycloNumber> for CycloNumber {
            type Output = CycloNumber;
            fn $method(self, rhs: &CycloNumber) -> CycloNumber {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a.binary(b, |x, y| *x += y));
forward_binop!(Sub, sub, |a, b| a.binary(b, |x, y| *x -= y));
forward_binop!(Mul, mul, |a, b| a.mul_ref(b));

impl AddAssign<&CycloNumber> for CycloNumber {
    fn add_assign(&mut self, rhs: &CycloNumber) {
        if rhs.is_zero() {
            return;
        }
        if self.order == rhs.order {
            for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
                *a += b;
            }
        } else {
            *self = &*self + rhs;
        }
    }
}

impl AddAssign for CycloNumber {
    fn add_assign(&mut self, rhs: CycloNumber) {
        *self += &rhs;
    }
}

impl SubAssign<&CycloNumber> for CycloNumber {
    fn sub_assign(&mut self, rhs: &CycloNumber) {
        if rhs.is_zero() {
            return;
        }
        if self.order == rhs.order {
            for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
                *a -= b;
            }
        } else {
            *self = &*self - rhs;
        }
    }
}

impl MulAssign<&CycloNumber> for CycloNumber {
    fn mul_assign(&mut self, rhs: &CycloNumber) {
        *self = &*self * rhs;
    }
}

impl Neg for &CycloNumber {
    type Output = CycloNumber;
    fn neg(self) -> CycloNumber {
        CycloNumber {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CycloNumber {
    type Output = CycloNumber;
    fn neg(self) -> CycloNumber {
        -&self
    }
}

impl std::iter::Sum for CycloNumber {
    fn sum<I: Iterator<Item = CycloNumber>>(iter: I) -> Self {
        iter.fold(CycloNumber::zero(), |mut acc, x| {
            acc += &x;
            acc
        })
    }
}
