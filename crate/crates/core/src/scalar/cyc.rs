use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::Rat;
use crate::error::{Error, Result};

/// Sparse `exponent -> coefficient` description of `sum c_e zeta^e`.
pub type Expansion = BTreeMap<u64, Rat>;

const PRIME_CEILING: u64 = 1 << 62;

#[derive(Debug)]
struct Modulus {
    prime: u64,
    /// `root^k` for `k < N`, where `root` has exact multiplicative order `N`.
    powers: Vec<u64>,
}

/// Shared data for cyclotomic values of a fixed order `N`.
///
/// A value `x` in `Z[zeta_N]` is stored through its images under every
/// embedding `zeta -> root^j` (`j` a unit mod `N`) modulo each attached prime.
/// Since each prime splits completely, `x` is zero exactly when all images
/// vanish, provided the tracked bound on `|sigma(x)|` stays below the product
/// of the primes.
#[derive(Debug)]
pub struct CycRing {
    order: u64,
    units: Vec<u64>,
    conj: Vec<usize>,
    moduli: Vec<Modulus>,
    log2_product: f64,
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let g = BigInt::from(a).extended_gcd(&BigInt::from(m));
    if !g.gcd.is_one() {
        return None;
    }
    g.x.mod_floor(&BigInt::from(m)).to_u64()
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn reduce_bigint(v: &BigInt, m: u64) -> u64 {
    v.mod_floor(&BigInt::from(m)).to_u64().expect("residue fits u64")
}

fn reduce_rat(v: &Rat, m: u64) -> Result<u64> {
    let num = reduce_bigint(v.numer(), m);
    let den = reduce_bigint(v.denom(), m);
    let inv =
        inv_mod(den, m).ok_or_else(|| Error::Consistency(format!("denominator {} vanishes modulo {m}", v.denom())))?;
    Ok(mul_mod(num, inv, m))
}

fn rat_to_f64(v: &Rat) -> f64 {
    let n = v.numer().to_f64().unwrap_or(f64::INFINITY);
    let d = v.denom().to_f64().unwrap_or(f64::INFINITY);
    if n.is_finite() && d.is_finite() {
        n / d
    } else {
        // Very large values: scale down before dividing.
        let shift = v.numer().bits().max(v.denom().bits()).saturating_sub(900);
        let n = (v.numer() >> shift).to_f64().unwrap_or(0.0);
        let d = (v.denom() >> shift).to_f64().unwrap_or(1.0);
        n / d
    }
}

impl CycRing {
    /// Ring of order `order` whose primes multiply to more than `2^bound_bits`.
    pub fn new(order: u64, bound_bits: f64) -> Result<Arc<CycRing>> {
        Self::with_offset(order, bound_bits, 0)
    }

    /// Same as [`CycRing::new`] but skips the first `skip` admissible primes,
    /// giving a disjoint modulus set for cross-checks.
    pub fn with_offset(order: u64, bound_bits: f64, skip: usize) -> Result<Arc<CycRing>> {
        if order == 0 {
            return Err(Error::InvalidArgument("cyclotomic order must be positive".into()));
        }
        let needed = (((bound_bits.max(0.0) + 4.0) / 61.0).ceil() as usize).max(2);
        let factors = prime_factors(order);
        let mut k = (PRIME_CEILING - 1) / order;
        let mut moduli = Vec::with_capacity(needed);
        let mut skipped = 0;
        while moduli.len() < needed {
            if k == 0 {
                return Err(Error::NoSuitablePrime(order));
            }
            let p = k * order + 1;
            k -= 1;
            if p <= order || !is_prime_u64(p) {
                continue;
            }
            if skipped < skip {
                skipped += 1;
                continue;
            }
            let root = (2..p)
                .map(|g| pow_mod(g, (p - 1) / order, p))
                .find(|&w| factors.iter().all(|&f| pow_mod(w, order / f, p) != 1))
                .ok_or(Error::NoSuitablePrime(order))?;
            let mut powers = Vec::with_capacity(order as usize);
            let mut acc = 1u64;
            for _ in 0..order {
                powers.push(acc);
                acc = mul_mod(acc, root, p);
            }
            moduli.push(Modulus { prime: p, powers });
        }
        let units: Vec<u64> = (0..order).filter(|j| j.gcd(&order) == 1).collect();
        let conj = units
            .iter()
            .map(|&j| {
                let neg = (order - j) % order;
                units.binary_search(&neg).expect("units closed under negation")
            })
            .collect();
        let log2_product = moduli.iter().map(|m| (m.prime as f64).log2()).sum();
        Ok(Arc::new(CycRing { order, units, conj, moduli, log2_product }))
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn primes(&self) -> Vec<u64> {
        self.moduli.iter().map(|m| m.prime).collect()
    }

    /// Exponents `j` of the embeddings `zeta -> root^j`, in residue order.
    pub fn embeddings(&self) -> &[u64] {
        &self.units
    }

    pub fn modulus_bits(&self) -> f64 {
        self.log2_product
    }

    fn width(&self) -> usize {
        self.units.len()
    }

    fn same(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other)
            || (self.order == other.order
                && self.moduli.len() == other.moduli.len()
                && self.moduli.iter().zip(&other.moduli).all(|(a, b)| a.prime == b.prime))
    }

    pub fn zero(self: &Arc<Self>) -> CycValue {
        CycValue {
            ring: self.clone(),
            residues: vec![0; self.width() * self.moduli.len()],
            shadow: Complex64::new(0.0, 0.0),
            bound: 0.0,
        }
    }

    pub fn int<T: Into<BigInt>>(self: &Arc<Self>, v: T) -> CycValue {
        let v: BigInt = v.into();
        let w = self.width();
        let mut residues = Vec::with_capacity(w * self.moduli.len());
        for m in &self.moduli {
            let r = reduce_bigint(&v, m.prime);
            residues.extend(std::iter::repeat_n(r, w));
        }
        let f = v.to_f64().unwrap_or(f64::INFINITY);
        CycValue { ring: self.clone(), residues, shadow: Complex64::new(f, 0.0), bound: f.abs() }
    }

    /// `zeta_N^e`.
    pub fn root(self: &Arc<Self>, e: u64) -> CycValue {
        let mut map = Expansion::new();
        map.insert(e % self.order, Rat::one());
        self.from_expansion(&map).expect("unit coefficient reduces")
    }

    /// `sum c_e zeta^e` for rational `c_e`.
    ///
    /// Zero tests on the result are only conclusive for algebraic integers.
    pub fn from_expansion(self: &Arc<Self>, map: &Expansion) -> Result<CycValue> {
        let w = self.width();
        let n = self.order;
        let mut residues = vec![0u64; w * self.moduli.len()];
        let mut shadow = Complex64::new(0.0, 0.0);
        let mut bound = 0.0;
        for (&e, c) in map {
            if e >= n {
                return Err(Error::InvalidArgument(format!("exponent {e} not below order {n}")));
            }
            if c.is_zero() {
                continue;
            }
            let cf = rat_to_f64(c);
            bound += cf.abs();
            shadow += Complex64::from_polar(cf, std::f64::consts::TAU * e as f64 / n as f64);
            for (mi, m) in self.moduli.iter().enumerate() {
                let cr = reduce_rat(c, m.prime)?;
                let row = &mut residues[mi * w..(mi + 1) * w];
                for (slot, &j) in row.iter_mut().zip(&self.units) {
                    let z = m.powers[((j * e) % n) as usize];
                    *slot = add_mod(*slot, mul_mod(cr, z, m.prime), m.prime);
                }
            }
        }
        Ok(CycValue { ring: self.clone(), residues, shadow, bound })
    }

    pub fn from_int_map(self: &Arc<Self>, map: &BTreeMap<u64, i64>) -> Result<CycValue> {
        let exp: Expansion = map.iter().map(|(&e, &c)| (e, Rat::from_integer(c.into()))).collect();
        self.from_expansion(&exp)
    }
}

/// `sum c_e zeta_N^e` in a fresh ring of order `n` sized for the coefficients.
pub fn cyc_make(n: u64, coeffs: &BTreeMap<u64, i64>) -> Result<CycValue> {
    let total: f64 = coeffs.values().map(|c| (*c as f64).abs()).sum();
    let ring = CycRing::new(n, (2.0 * total + 2.0).log2() + 1.0)?;
    ring.from_int_map(coeffs)
}

/// Element of `Z[zeta_N]` held through modular embeddings plus a float shadow.
#[derive(Clone)]
pub struct CycValue {
    ring: Arc<CycRing>,
    residues: Vec<u64>,
    shadow: Complex64,
    bound: f64,
}

impl fmt::Debug for CycValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycValue(N={}, ~{}, |.|<={:.3e})", self.ring.order, self.shadow, self.bound)
    }
}

impl CycValue {
    pub fn ring(&self) -> &Arc<CycRing> {
        &self.ring
    }

    pub fn shadow(&self) -> Complex64 {
        self.shadow
    }

    /// Upper bound on the absolute value under every complex embedding.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Residues for modulus `k`, one per embedding in [`CycRing::embeddings`] order.
    pub fn residues(&self, k: usize) -> &[u64] {
        let w = self.ring.width();
        &self.residues[k * w..(k + 1) * w]
    }

    fn check(&self, other: &CycValue) {
        assert!(self.ring.same(&other.ring), "cyclotomic values from different rings");
    }

    fn zip_with(&self, other: &CycValue, f: impl Fn(u64, u64, u64) -> u64) -> Vec<u64> {
        self.check(other);
        let w = self.ring.width();
        let mut out = Vec::with_capacity(self.residues.len());
        for (mi, m) in self.ring.moduli.iter().enumerate() {
            for i in mi * w..(mi + 1) * w {
                out.push(f(self.residues[i], other.residues[i], m.prime));
            }
        }
        out
    }

    fn map_res(&self, f: impl Fn(u64, u64) -> u64) -> Vec<u64> {
        let w = self.ring.width();
        let mut out = Vec::with_capacity(self.residues.len());
        for (mi, m) in self.ring.moduli.iter().enumerate() {
            for i in mi * w..(mi + 1) * w {
                out.push(f(self.residues[i], m.prime));
            }
        }
        out
    }

    pub fn conj(&self) -> CycValue {
        let w = self.ring.width();
        let mut residues = vec![0; self.residues.len()];
        for mi in 0..self.ring.moduli.len() {
            for (u, &c) in self.ring.conj.iter().enumerate() {
                residues[mi * w + u] = self.residues[mi * w + c];
            }
        }
        CycValue { ring: self.ring.clone(), residues, shadow: self.shadow.conj(), bound: self.bound }
    }

    pub fn scale_int(&self, k: &BigInt) -> CycValue {
        let kf = k.to_f64().unwrap_or(f64::INFINITY);
        let primes: Vec<u64> = self.ring.primes();
        let ks: Vec<u64> = primes.iter().map(|&p| reduce_bigint(k, p)).collect();
        let w = self.ring.width();
        let mut residues = self.residues.clone();
        for (mi, &p) in primes.iter().enumerate() {
            for r in &mut residues[mi * w..(mi + 1) * w] {
                *r = mul_mod(*r, ks[mi], p);
            }
        }
        CycValue { ring: self.ring.clone(), residues, shadow: self.shadow * kf, bound: self.bound * kf.abs() }
    }

    /// Multiplies by a rational; the caller keeps the result integral.
    pub fn scale_rat(&self, r: &Rat) -> Result<CycValue> {
        let rf = rat_to_f64(r);
        let mut factors = Vec::new();
        for m in &self.ring.moduli {
            factors.push(reduce_rat(r, m.prime)?);
        }
        let w = self.ring.width();
        let mut residues = self.residues.clone();
        for (mi, m) in self.ring.moduli.iter().enumerate() {
            for x in &mut residues[mi * w..(mi + 1) * w] {
                *x = mul_mod(*x, factors[mi], m.prime);
            }
        }
        Ok(CycValue { ring: self.ring.clone(), residues, shadow: self.shadow * rf, bound: self.bound * rf.abs() })
    }

    /// Division by a positive integer known to divide the value exactly.
    pub fn div_exact(&self, k: u64) -> Result<CycValue> {
        if k == 0 {
            return Err(Error::InvalidArgument("division by zero".into()));
        }
        self.scale_rat(&Rat::new(BigInt::one(), BigInt::from(k)))
    }

    fn check_bound(&self) -> Result<()> {
        let need = (2.0 * self.bound).max(1.0).log2();
        if !(need < self.ring.log2_product - 1.0) {
            return Err(Error::BoundExceeded { bound_bits: need, modulus_bits: self.ring.log2_product });
        }
        Ok(())
    }

    pub fn is_zero(&self) -> Result<bool> {
        self.check_bound()?;
        Ok(self.residues.iter().all(|&r| r == 0))
    }

    pub fn equals(&self, other: &CycValue) -> Result<bool> {
        (self - other).is_zero()
    }

    pub fn is_real(&self) -> Result<bool> {
        self.equals(&self.conj())
    }

    /// `Some(m)` if the value is the rational integer `m`, `None` otherwise.
    pub fn to_integer(&self) -> Result<Option<BigInt>> {
        self.check_bound()?;
        let w = self.ring.width();
        let mut acc = BigInt::zero();
        let mut modulus = BigInt::one();
        for (mi, m) in self.ring.moduli.iter().enumerate() {
            let row = &self.residues[mi * w..(mi + 1) * w];
            let r = row[0];
            if row.iter().any(|&x| x != r) {
                return Ok(None);
            }
            let p = BigInt::from(m.prime);
            let cur = reduce_bigint(&acc, m.prime);
            let diff = (r as u128 + m.prime as u128 - cur as u128) as u64 % m.prime;
            let minv = inv_mod(reduce_bigint(&modulus, m.prime), m.prime).expect("distinct primes");
            let t = mul_mod(diff, minv, m.prime);
            acc += &modulus * BigInt::from(t);
            modulus *= p;
        }
        if &acc * 2 > modulus {
            acc -= &modulus;
        }
        let exact = acc.to_f64().unwrap_or(f64::INFINITY);
        let tol = 1e-4 + 1e-9 * self.bound;
        let dev = (self.shadow - Complex64::new(exact, 0.0)).norm();
        if !(dev <= tol) {
            return Err(Error::ShadowMismatch { shadow: self.shadow.to_string(), exact: acc.to_string() });
        }
        Ok(Some(acc))
    }

    /// Like [`CycValue::to_integer`] but treats a non-integer as an error.
    pub fn expect_integer(&self) -> Result<BigInt> {
        self.to_integer()?.ok_or_else(|| Error::NotRational(format!("value {} is not a rational integer", self.shadow)))
    }
}

impl Add for &CycValue {
    type Output = CycValue;
    fn add(self, rhs: &CycValue) -> CycValue {
        CycValue {
            ring: self.ring.clone(),
            residues: self.zip_with(rhs, add_mod),
            shadow: self.shadow + rhs.shadow,
            bound: self.bound + rhs.bound,
        }
    }
}

impl Sub for &CycValue {
    type Output = CycValue;
    fn sub(self, rhs: &CycValue) -> CycValue {
        CycValue {
            ring: self.ring.clone(),
            residues: self.zip_with(rhs, |a, b, p| add_mod(a, p - b, p)),
            shadow: self.shadow - rhs.shadow,
            bound: self.bound + rhs.bound,
        }
    }
}

impl Mul for &CycValue {
    type Output = CycValue;
    fn mul(self, rhs: &CycValue) -> CycValue {
        CycValue {
            ring: self.ring.clone(),
            residues: self.zip_with(rhs, mul_mod),
            shadow: self.shadow * rhs.shadow,
            bound: self.bound * rhs.bound,
        }
    }
}

impl Neg for &CycValue {
    type Output = CycValue;
    fn neg(self) -> CycValue {
        CycValue {
            ring: self.ring.clone(),
            residues: self.map_res(|a, p| (p - a) % p),
            shadow: -self.shadow,
            bound: self.bound,
        }
    }
}
