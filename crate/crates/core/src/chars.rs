//! Dirichlet characters with exact root-of-unity values.
//!
//! The unit group (Z/MZ)^x is split by CRT into cyclic factors: for an odd
//! prime power the smallest primitive root, for 2^a the pair {-1, 5}. A
//! character is an exponent vector on those generators; evaluation goes
//! through per-modulus discrete-log tables, so no floating point is involved.

use crate::arith::{
    bernoulli_poly, divisors, factorize, gcd, is_square_free, lcm, mod_inverse, pow_mod, totient,
};
use crate::cyclo::CycloNumber;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
        }
    }
}

#[derive(Debug)]
enum Factor {
    /// Cyclic group mod an odd prime power; table maps residue -> log.
    Cyclic { table: Vec<u32> },
    /// The {+1, -1} factor of (Z/2^a)^x, a >= 2.
    MinusOne,
    /// The <5> factor of (Z/2^a)^x, a >= 3; table maps residue -> log of +-n.
    Five { table: Vec<u32> },
}

#[derive(Debug)]
struct Component {
    prime_power: u64,
    order: u64,
    /// Generator lifted to an element mod M that is 1 on the other factors.
    generator: u64,
    factor: Factor,
}

const NO_LOG: u32 = u32::MAX;

impl Component {
    fn log(&self, n: u64) -> u64 {
        let r = n % self.prime_power;
        match &self.factor {
            Factor::Cyclic { table } => table[r as usize] as u64,
            Factor::MinusOne => {
                if r % 4 == 1 {
                    0
                } else {
                    1
                }
            }
            Factor::Five { table } => {
                let r = if r % 4 == 3 { self.prime_power - r } else { r };
                table[r as usize] as u64
            }
        }
    }
}

/// CRT decomposition and discrete-log tables of (Z/MZ)^x.
#[derive(Debug)]
pub struct UnitGroup {
    modulus: u64,
    components: Vec<Component>,
    exponent: u64,
}

fn smallest_primitive_root(p: u64, pa: u64) -> u64 {
    let order = totient(pa);
    let order_primes: Vec<u64> = factorize(order).into_iter().map(|(q, _)| q).collect();
    (2..pa)
        .find(|&g| gcd(g, p) == 1 && order_primes.iter().all(|&q| pow_mod(g, order / q, pa) != 1))
        .unwrap_or(1)
}

fn crt_lift(residue: u64, prime_power: u64, modulus: u64) -> u64 {
    let rest = modulus / prime_power;
    if rest == 1 {
        return residue % modulus;
    }
    // x = 1 + rest * t with x = residue (mod prime_power)
    let inv = mod_inverse(rest % prime_power, prime_power).expect("coprime CRT factors");
    let t = ((residue + prime_power - 1) % prime_power) as u128 * inv as u128 % prime_power as u128;
    ((1 + rest as u128 * t) % modulus as u128) as u64
}

impl UnitGroup {
    fn build(modulus: u64) -> Self {
        let mut components = Vec::new();
        for (p, a) in factorize(modulus) {
            let pa = p.pow(a);
            if p == 2 {
                if a >= 2 {
                    components.push(Component {
                        prime_power: pa,
                        order: 2,
                        generator: crt_lift(pa - 1, pa, modulus),
                        factor: Factor::MinusOne,
                    });
                }
                if a >= 3 {
                    let order = pa / 4;
                    let mut table = vec![NO_LOG; pa as usize];
                    let mut x = 1u64;
                    for e in 0..order {
                        table[x as usize] = e as u32;
                        x = x * 5 % pa;
                    }
                    components.push(Component {
                        prime_power: pa,
                        order,
                        generator: crt_lift(5, pa, modulus),
                        factor: Factor::Five { table },
                    });
                }
            } else {
                let g = smallest_primitive_root(p, pa);
                let order = totient(pa);
                let mut table = vec![NO_LOG; pa as usize];
                let mut x = 1u64;
                for e in 0..order {
                    table[x as usize] = e as u32;
                    x = x * g % pa;
                }
                components.push(Component {
                    prime_power: pa,
                    order,
                    generator: crt_lift(g, pa, modulus),
                    factor: Factor::Cyclic { table },
                });
            }
        }
        let exponent = components.iter().fold(1, |acc, c| lcm(acc, c.order));
        UnitGroup {
            modulus,
            components,
            exponent,
        }
    }

    /// Shared, lazily built group for a modulus.
    pub fn get(modulus: u64) -> Arc<UnitGroup> {
        static GROUPS: OnceLock<RwLock<HashMap<u64, Arc<UnitGroup>>>> = OnceLock::new();
        assert!(modulus >= 1, "modulus must be positive");
        let groups = GROUPS.get_or_init(|| RwLock::new(HashMap::new()));
        if let Some(g) = groups.read().expect("unit group lock").get(&modulus) {
            return Arc::clone(g);
        }
        let built = Arc::new(UnitGroup::build(modulus));
        let mut w = groups.write().expect("unit group lock");
        Arc::clone(w.entry(modulus).or_insert(built))
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Orders of the cyclic factors, in generator order.
    pub fn factor_orders(&self) -> Vec<u64> {
        self.components.iter().map(|c| c.order).collect()
    }

    /// Generators of the cyclic factors as residues mod M.
    pub fn generators(&self) -> Vec<u64> {
        self.components.iter().map(|c| c.generator).collect()
    }

    /// Exponent of the group (lcm of factor orders).
    pub fn exponent(&self) -> u64 {
        self.exponent
    }
}

/// A Dirichlet character modulo M.
#[derive(Clone)]
pub struct DirichletCharacter {
    group: Arc<UnitGroup>,
    exponents: Vec<u64>,
    order: u64,
    conductor: u64,
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.modulus() == other.modulus() && self.exponents == other.exponents
    }
}

impl Eq for DirichletCharacter {}

impl std::hash::Hash for DirichletCharacter {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.modulus().hash(state);
        self.exponents.hash(state);
    }
}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DirichletCharacter({})", self.dump_line())
    }
}

impl DirichletCharacter {
    /// Character with the given exponent vector on the group's generators.
    pub fn from_exponents(modulus: u64, exponents: Vec<u64>) -> Result<Self> {
        let group = UnitGroup::get(modulus);
        if exponents.len() != group.components.len() {
            return Err(Error::Domain(format!(
                "modulus {} has {} generators, got {} exponents",
                modulus,
                group.components.len(),
                exponents.len()
            )));
        }
        let exponents: Vec<u64> = exponents
            .iter()
            .zip(&group.components)
            .map(|(&e, c)| e % c.order)
            .collect();
        let order = exponents
            .iter()
            .zip(&group.components)
            .fold(1, |acc, (&e, c)| lcm(acc, c.order / gcd(e, c.order)));
        let mut chi = DirichletCharacter {
            group,
            exponents,
            order,
            conductor: 0,
        };
        chi.conductor = chi.compute_conductor();
        Ok(chi)
    }

    pub fn principal(modulus: u64) -> Self {
        let n = UnitGroup::get(modulus).components.len();
        Self::from_exponents(modulus, vec![0; n]).expect("principal character")
    }

    /// Builds the character whose value at each generator `g` of (Z/MZ)^x is
    /// `zeta_o^e` where `(o, e) = value(g)`.
    pub fn from_generator_values<F>(modulus: u64, value: F) -> Result<Self>
    where
        F: Fn(u64) -> (u64, u64),
    {
        let group = UnitGroup::get(modulus);
        let mut exponents = Vec::with_capacity(group.components.len());
        for c in &group.components {
            let (o, e) = value(c.generator);
            if (e * c.order) % o != 0 {
                return Err(Error::Domain(format!(
                    "value zeta_{}^{} at generator {} is not a {}-th root of unity",
                    o, e, c.generator, c.order
                )));
            }
            exponents.push((e * c.order / o) % c.order);
        }
        Self::from_exponents(modulus, exponents)
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    /// Multiplicative order of the character.
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_principal(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus()
    }

    pub fn parity(&self) -> Parity {
        let m = self.modulus();
        match self.value_exponent(m as i64 - 1) {
            Some(0) | None => Parity::Even,
            Some(_) => Parity::Odd,
        }
    }

    /// chi(m) = zeta_order^e, or `None` when gcd(m, M) > 1.
    pub fn value_exponent(&self, m: i64) -> Option<u64> {
        let modulus = self.modulus();
        let r = m.rem_euclid(modulus as i64) as u64;
        if gcd(r, modulus) != 1 {
            return None;
        }
        let big = self.group.exponent;
        let mut acc = 0u64;
        for (c, &e) in self.group.components.iter().zip(&self.exponents) {
            if e == 0 {
                continue;
            }
            let l = c.log(r);
            acc = (acc + (e * l % c.order) * (big / c.order)) % big;
        }
        Some(acc / (big / self.order))
    }

    /// Exact value chi(m).
    pub fn eval(&self, m: i64) -> CycloNumber {
        match self.value_exponent(m) {
            None => CycloNumber::zero(),
            Some(0) => CycloNumber::one(),
            Some(e) => CycloNumber::root_of_unity(self.order, e),
        }
    }

    /// Complex embedding of chi(m).
    pub fn eval_complex(&self, m: i64) -> num_complex::Complex64 {
        match self.value_exponent(m) {
            None => num_complex::Complex64::new(0.0, 0.0),
            Some(e) => num_complex::Complex64::from_polar(
                1.0,
                2.0 * std::f64::consts::PI * e as f64 / self.order as f64,
            ),
        }
    }

    pub fn conj(&self) -> Self {
        let exps = self
            .exponents
            .iter()
            .zip(&self.group.components)
            .map(|(&e, c)| (c.order - e) % c.order)
            .collect();
        Self::from_exponents(self.modulus(), exps).expect("conjugate character")
    }

    /// Pointwise product, as a character mod lcm of the moduli.
    pub fn mul(&self, other: &Self) -> Self {
        let m = lcm(self.modulus(), other.modulus());
        let o = lcm(self.order, other.order);
        Self::from_generator_values(m, |g| {
            let a = self.value_exponent(g as i64).expect("unit") * (o / self.order);
            let b = other.value_exponent(g as i64).expect("unit") * (o / other.order);
            (o, (a + b) % o)
        })
        .expect("product of characters")
    }

    /// The character mod `modulus` (a multiple of M) induced by this one.
    pub fn induce(&self, modulus: u64) -> Result<Self> {
        if modulus % self.modulus() != 0 {
            return Err(Error::Domain(format!(
                "{} is not a multiple of {}",
                modulus,
                self.modulus()
            )));
        }
        Self::from_generator_values(modulus, |g| {
            (self.order, self.value_exponent(g as i64).expect("unit"))
        })
    }

    fn compute_conductor(&self) -> u64 {
        let m = self.modulus();
        if self.is_principal() {
            return 1;
        }
        for f in divisors(m) {
            // chi is trivial on units congruent to 1 mod f
            let trivial = (0..m / f)
                .map(|t| 1 + t * f)
                .filter(|&n| gcd(n, m) == 1)
                .all(|n| self.value_exponent(n as i64) == Some(0));
            if trivial {
                return f;
            }
        }
        m
    }

    /// The primitive character mod the conductor that induces this one.
    pub fn restrict_to_conductor(&self) -> Self {
        let f = self.conductor;
        let m = self.modulus();
        if f == m {
            return self.clone();
        }
        Self::from_generator_values(f, |x| {
            let lift = (0..)
                .map(|t| x + t * f)
                .find(|&y| gcd(y, m) == 1)
                .expect("a unit lift exists");
            (self.order, self.value_exponent(lift as i64).expect("unit"))
        })
        .expect("restriction to conductor")
    }

    /// Debug dump line: `M;[e1,e2,...];conductor;parity`.
    pub fn dump_line(&self) -> String {
        let exps: Vec<String> = self.exponents.iter().map(|e| e.to_string()).collect();
        format!(
            "{};[{}];{};{}",
            self.modulus(),
            exps.join(","),
            self.conductor,
            self.parity()
        )
    }
}

/// All phi(M) characters mod M, principal first, in lexicographic order of
/// exponent vectors.
pub fn enumerate_characters(modulus: u64) -> Vec<DirichletCharacter> {
    let group = UnitGroup::get(modulus);
    let orders = group.factor_orders();
    let mut out = Vec::with_capacity(totient(modulus) as usize);
    let mut current = vec![0u64; orders.len()];
    loop {
        out.push(
            DirichletCharacter::from_exponents(modulus, current.clone())
                .expect("valid exponent vector"),
        );
        // odometer, last coordinate fastest
        let mut i = orders.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            current[i] += 1;
            if current[i] < orders[i] {
                break;
            }
            current[i] = 0;
        }
    }
}

/// Character mod M selected by its position in [`enumerate_characters`].
pub fn character_by_index(modulus: u64, index: usize) -> Result<DirichletCharacter> {
    if modulus == 0 {
        return Err(Error::Domain("modulus must be positive".into()));
    }
    let all = enumerate_characters(modulus);
    let n = all.len();
    all.into_iter().nth(index).ok_or_else(|| {
        Error::Domain(format!(
            "character index {} out of range for modulus {} ({} characters)",
            index, modulus, n
        ))
    })
}

/// Kronecker symbol (d/m).
pub fn kronecker(d: i64, m: i64) -> Result<i32> {
    if d == 0 && m == 0 {
        return Err(Error::Domain("kronecker symbol (0/0) is undefined".into()));
    }
    let mut a = d as i128;
    let mut b = m as i128;
    if b == 0 {
        return Ok(if a.abs() == 1 { 1 } else { 0 });
    }
    if a % 2 == 0 && b % 2 == 0 {
        return Ok(0);
    }
    const TAB: [i32; 8] = [0, 1, 0, -1, 0, -1, 0, 1];
    let v = b.trailing_zeros();
    b >>= v;
    let mut k = if v % 2 == 0 {
        1
    } else {
        TAB[(a & 7) as usize]
    };
    if b < 0 {
        b = -b;
        if a < 0 {
            k = -k;
        }
    }
    // b odd positive from here on; `&` on negative a reads two's complement,
    // which is what the reciprocity sign test needs.
    loop {
        if a == 0 {
            return Ok(if b > 1 { 0 } else { k });
        }
        let v = a.trailing_zeros();
        a >>= v;
        if v % 2 == 1 {
            k *= TAB[(b & 7) as usize];
        }
        if a & b & 2 != 0 {
            k = -k;
        }
        let r = a.abs();
        a = b % r;
        b = r;
    }
}

/// psi_d(m) = psi(m) (-1/m)^k (d/m), as a character mod d * lcm(N, 4).
///
/// The symbols are only evaluated at units, which are odd, so (-1/m) and
/// (d/m) are Jacobi symbols there. N is raised to a multiple of 4 because
/// (-1/m) has conductor 4.
pub fn twist_psi_d(psi: &DirichletCharacter, k: u64, d: u64) -> Result<DirichletCharacter> {
    if !is_square_free(d) {
        return Err(Error::NotSquareFree(d));
    }
    let modulus = d * lcm(psi.modulus(), 4);
    let o = lcm(psi.order(), 2);
    DirichletCharacter::from_generator_values(modulus, |g| {
        let base = psi.value_exponent(g as i64).expect("unit") * (o / psi.order());
        let mut sign = kronecker(d as i64, g as i64).expect("nonzero modulus");
        if k % 2 == 1 && g % 4 == 3 {
            sign = -sign;
        }
        let e = if sign < 0 { (base + o / 2) % o } else { base };
        (o, e)
    })
}

/// Generalized Bernoulli number B_{k,chi} = f^{k-1} sum_{a=1}^{f} chi(a) B_k(a/f),
/// with f the modulus of chi. For the trivial character mod 1 and k = 1 this
/// returns -1/2.
pub fn generalized_bernoulli(chi: &DirichletCharacter, k: u32) -> Result<CycloNumber> {
    if k == 0 {
        return Err(Error::Domain("generalized Bernoulli numbers need k >= 1".into()));
    }
    let f = chi.modulus();
    if f == 1 && k == 1 {
        return Ok(CycloNumber::from_ratio(-1, 2));
    }
    let fk = BigRational::from_integer(BigInt::from(f).pow(k - 1));
    let mut by_exponent: HashMap<u64, BigRational> = HashMap::new();
    for a in 1..=f {
        if let Some(e) = chi.value_exponent(a as i64) {
            let x = BigRational::new(BigInt::from(a), BigInt::from(f));
            *by_exponent.entry(e).or_insert_with(BigRational::zero) +=
                bernoulli_poly(k as usize, &x);
        }
    }
    let value = CycloNumber::from_powers(
        chi.order(),
        by_exponent.into_iter().map(|(e, c)| (e, c * &fk)),
    );
    Ok(value)
}

/// Brute-force Legendre/Jacobi oracle used in tests: (a/p) via Euler's criterion.
#[cfg(test)]
fn legendre_brute(a: i64, p: u64) -> i32 {
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if (1..p).any(|x| x * x % p == r) {
        1
    } else {
        -1
    }
}
