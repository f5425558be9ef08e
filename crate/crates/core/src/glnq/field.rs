//! Finite field towers `F_q ⊂ F_{q^d}` with discrete logarithm tables.

use crate::error::{Error, Result};
use crate::scalar::prime_factors;

/// Arithmetic needed by the generic polynomial helpers below.
trait Arith {
    fn size(&self) -> u32;
    fn add(&self, a: u32, b: u32) -> u32;
    fn mul(&self, a: u32, b: u32) -> u32;
    fn neg(&self, a: u32) -> u32;
    fn inv(&self, a: u32) -> u32;
}

struct PrimeArith(u32);

impl Arith for PrimeArith {
    fn size(&self) -> u32 {
        self.0
    }
    fn add(&self, a: u32, b: u32) -> u32 {
        (a + b) % self.0
    }
    fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }
    fn neg(&self, a: u32) -> u32 {
        (self.0 - a) % self.0
    }
    fn inv(&self, a: u32) -> u32 {
        (1..self.0).find(|&b| self.mul(a, b) == 1).expect("nonzero element")
    }
}

/// `a mod f` for monic `f`, coefficients low-to-high.
fn poly_rem<F: Arith>(f: &F, a: &[u32], m: &[u32]) -> Vec<u32> {
    let dm = m.len() - 1;
    let mut r = a.to_vec();
    while r.len() > dm {
        let c = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if c != 0 {
            for (i, &mi) in m.iter().enumerate() {
                r[shift + i] = f.add(r[shift + i], f.neg(f.mul(c, mi)));
            }
        }
        r.pop();
    }
    r
}

fn poly_mul<F: Arith>(f: &F, a: &[u32], b: &[u32]) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    out
}

/// Monic polynomials of degree `d`, lowest coefficient varying slowest.
fn monic_polys(size: u32, d: usize) -> impl Iterator<Item = Vec<u32>> {
    let count = (size as u64).pow(d as u32);
    (0..count).map(move |mut idx| {
        let mut c = vec![0u32; d + 1];
        for i in (0..d).rev() {
            c[i] = (idx % size as u64) as u32;
            idx /= size as u64;
        }
        c[d] = 1;
        c
    })
}

fn is_irreducible<F: Arith>(f: &F, poly: &[u32]) -> bool {
    let d = poly.len() - 1;
    for k in 1..=d / 2 {
        for g in monic_polys(f.size(), k) {
            if poly_rem(f, poly, &g).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn least_irreducible<F: Arith>(f: &F, d: usize) -> Vec<u32> {
    monic_polys(f.size(), d).find(|p| is_irreducible(f, p)).expect("irreducible polynomials exist in every degree")
}

fn split_digits(mut x: u32, base: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(x % base);
        x /= base;
    }
    out
}

fn join_digits(d: &[u32], base: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * base + c)
}

/// `F_q` given by tables; elements are integers `sum c_i p^i`.
#[derive(Clone, Debug)]
pub struct BaseField {
    pub p: u32,
    pub e: u32,
    pub q: u32,
    /// Defining polynomial over `F_p`, monic, low-to-high.
    pub modulus: Vec<u32>,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

impl Arith for BaseField {
    fn size(&self) -> u32 {
        self.q
    }
    fn add(&self, a: u32, b: u32) -> u32 {
        self.add[(a * self.q + b) as usize]
    }
    fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[(a * self.q + b) as usize]
    }
    fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize]
    }
    fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }
}

impl BaseField {
    fn new(p: u32, e: u32) -> BaseField {
        let fp = PrimeArith(p);
        let modulus = least_irreducible(&fp, e as usize);
        let q = p.pow(e);
        let mut add = vec![0; (q * q) as usize];
        let mut mul = vec![0; (q * q) as usize];
        for a in 0..q {
            let da = split_digits(a, p, e as usize);
            for b in 0..q {
                let db = split_digits(b, p, e as usize);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = join_digits(&s, p);
                let mut prod = poly_rem(&fp, &poly_mul(&fp, &da, &db), &modulus);
                prod.resize(e as usize, 0);
                mul[(a * q + b) as usize] = join_digits(&prod, p);
            }
        }
        let neg = (0..q).map(|a| (0..q).find(|&b| add[(a * q + b) as usize] == 0).unwrap()).collect();
        let inv = (0..q)
            .map(|a| if a == 0 { 0 } else { (1..q).find(|&b| mul[(a * q + b) as usize] == 1).unwrap() })
            .collect();
        BaseField { p, e, q, modulus, add, mul, neg, inv }
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        Arith::add(self, a, b)
    }
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        Arith::add(self, a, Arith::neg(self, b))
    }
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        Arith::mul(self, a, b)
    }
    pub fn neg(&self, a: u32) -> u32 {
        Arith::neg(self, a)
    }
    /// Inverse; `0` maps to `0`.
    pub fn inv(&self, a: u32) -> u32 {
        Arith::inv(self, a)
    }
}

/// `F_{q^d} = F_q[y]/(f_d)`; elements are integers `sum a_i q^i`.
#[derive(Clone, Debug)]
pub struct ExtField {
    pub d: usize,
    pub size: u64,
    /// Defining polynomial over `F_q`, monic, low-to-high.
    pub modulus: Vec<u32>,
    pub generator: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl ExtField {
    fn new(base: &BaseField, d: usize, base_gen: Option<u32>) -> Result<ExtField> {
        let q = base.q;
        let size = (q as u64).pow(d as u32);
        if size > 1 << 22 {
            return Err(Error::OutOfRange { what: "q^d", value: size, range: "<= 2^22" });
        }
        let modulus = least_irreducible(base, d);
        let mul_raw = |a: u32, b: u32| -> u32 {
            let da = split_digits(a, q, d);
            let db = split_digits(b, q, d);
            let mut prod = poly_rem(base, &poly_mul(base, &da, &db), &modulus);
            prod.resize(d, 0);
            join_digits(&prod, q)
        };
        let pow_raw = |mut a: u32, mut k: u64| -> u32 {
            let mut acc = 1u32;
            while k > 0 {
                if k & 1 == 1 {
                    acc = mul_raw(acc, a);
                }
                a = mul_raw(a, a);
                k >>= 1;
            }
            acc
        };
        let order = size - 1;
        let factors = prime_factors(order);
        let norm_exp = order / (q as u64 - 1);
        let generator = (1..size as u32)
            .find(|&g| {
                factors.iter().all(|&f| pow_raw(g, order / f) != 1)
                    && base_gen.is_none_or(|g1| pow_raw(g, norm_exp) == g1)
            })
            .ok_or_else(|| Error::Consistency(format!("no compatible generator of F_{{q^{d}}}")))?;
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![u32::MAX; size as usize];
        let mut acc = 1u32;
        for k in 0..order as u32 {
            exp.push(acc);
            log[acc as usize] = k;
            acc = mul_raw(acc, generator);
        }
        Ok(ExtField { d, size, modulus, generator, exp, log })
    }

    pub fn order(&self) -> u64 {
        self.size - 1
    }

    /// Element with discrete logarithm `k`.
    pub fn exp(&self, k: u64) -> u32 {
        self.exp[(k % self.order()) as usize]
    }

    /// Discrete logarithm; `None` for zero.
    pub fn log(&self, x: u32) -> Option<u64> {
        match self.log[x as usize] {
            u32::MAX => None,
            k => Some(k as u64),
        }
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match (self.log(a), self.log(b)) {
            (Some(x), Some(y)) => self.exp(x + y),
            _ => 0,
        }
    }

    pub fn add(&self, base: &BaseField, a: u32, b: u32) -> u32 {
        let da = split_digits(a, base.q, self.d);
        let db = split_digits(b, base.q, self.d);
        let s: Vec<u32> = da.iter().zip(&db).map(|(&x, &y)| base.add(x, y)).collect();
        join_digits(&s, base.q)
    }

    pub fn neg(&self, base: &BaseField, a: u32) -> u32 {
        let da: Vec<u32> = split_digits(a, base.q, self.d).iter().map(|&x| base.neg(x)).collect();
        join_digits(&da, base.q)
    }
}

/// Monic irreducible polynomial over `F_q`, coefficients low-to-high.
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(transparent)]
pub struct IrrPoly(pub Vec<u32>);

impl IrrPoly {
    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.0
    }

    pub fn spec(&self) -> String {
        self.0.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
    }
}

impl PartialOrd for IrrPoly {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for IrrPoly {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.degree(), &self.0).cmp(&(other.degree(), &other.0))
    }
}

impl std::fmt::Display for IrrPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}]", self.0.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","))
    }
}

/// Irreducible polynomial together with the smallest exponent of its roots.
#[derive(Clone, Debug)]
pub struct Irreducible {
    pub poly: IrrPoly,
    pub degree: usize,
    pub exponent: u64,
}

/// Prime power decomposition, `None` unless `q = p^e` with `e >= 1`.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let f = prime_factors(q);
    if f.len() != 1 {
        return None;
    }
    let p = f[0];
    let mut e = 0;
    let mut x = q;
    while x.is_multiple_of(p) {
        x /= p;
        e += 1;
    }
    Some((p as u32, e))
}

pub const MAX_Q: u32 = 32;

#[derive(Clone, Debug)]
pub struct FieldTower {
    pub base: BaseField,
    exts: Vec<ExtField>,
    irreducibles: Vec<Vec<Irreducible>>,
    /// Per degree: exponent -> index into `irreducibles[d-1]`, or `usize::MAX`
    /// when the element lies in a proper subfield.
    root_index: Vec<Vec<usize>>,
}

impl FieldTower {
    pub fn new(q: u32, max_degree: usize) -> Result<FieldTower> {
        let (p, e) = prime_power(q as u64).ok_or(Error::NotPrimePower(q as u64))?;
        if q > MAX_Q {
            return Err(Error::OutOfRange { what: "q", value: q as u64, range: "2..=32" });
        }
        if !(1..=3).contains(&max_degree) {
            return Err(Error::OutOfRange { what: "degree", value: max_degree as u64, range: "1..=3" });
        }
        let base = BaseField::new(p, e);
        let mut exts = Vec::new();
        let f1 = ExtField::new(&base, 1, None)?;
        let g1 = f1.generator;
        exts.push(f1);
        for d in 2..=max_degree {
            exts.push(ExtField::new(&base, d, Some(g1))?);
        }
        let mut tower = FieldTower { base, exts, irreducibles: Vec::new(), root_index: Vec::new() };
        for d in 1..=max_degree {
            let (list, index) = tower.find_irreducibles(d);
            tower.irreducibles.push(list);
            tower.root_index.push(index);
        }
        Ok(tower)
    }

    pub fn q(&self) -> u32 {
        self.base.q
    }

    pub fn p(&self) -> u32 {
        self.base.p
    }

    pub fn max_degree(&self) -> usize {
        self.exts.len()
    }

    pub fn ext(&self, d: usize) -> &ExtField {
        &self.exts[d - 1]
    }

    /// Length of the orbit of `e` under multiplication by `q` in `Z/(q^d-1)`.
    pub fn orbit_len(&self, d: usize, e: u64) -> usize {
        let m = self.ext(d).order();
        let q = self.q() as u64;
        let mut x = (e * q) % m;
        let mut len = 1;
        while x != e % m {
            x = (x * q) % m;
            len += 1;
        }
        len
    }

    /// Minimal polynomial over `F_q` of `g_d^e`.
    pub fn min_poly(&self, d: usize, e: u64) -> IrrPoly {
        let f = self.ext(d);
        let m = f.order();
        let q = self.q() as u64;
        let len = self.orbit_len(d, e);
        let mut poly = vec![1u32];
        let mut x = e % m;
        for _ in 0..len {
            let root = f.exp(x);
            let neg_root = f.neg(&self.base, root);
            let mut next = vec![0u32; poly.len() + 1];
            for (i, &c) in poly.iter().enumerate() {
                next[i + 1] = f.add(&self.base, next[i + 1], c);
                next[i] = f.add(&self.base, next[i], f.mul(c, neg_root));
            }
            poly = next;
            x = (x * q) % m;
        }
        assert!(poly.iter().all(|&c| (c as u64) < q), "minimal polynomial not over F_q");
        IrrPoly(poly)
    }

    fn find_irreducibles(&self, d: usize) -> (Vec<Irreducible>, Vec<usize>) {
        let m = self.ext(d).order();
        let q = self.q() as u64;
        let mut index = vec![usize::MAX; m as usize];
        let mut seen = vec![false; m as usize];
        let mut list = Vec::new();
        for e in 0..m {
            if seen[e as usize] {
                continue;
            }
            let mut orbit = vec![e];
            seen[e as usize] = true;
            let mut x = (e * q) % m;
            while x != e {
                seen[x as usize] = true;
                orbit.push(x);
                x = (x * q) % m;
            }
            if orbit.len() == d {
                for &o in &orbit {
                    index[o as usize] = list.len();
                }
                list.push(Irreducible { poly: self.min_poly(d, e), degree: d, exponent: e });
            }
        }
        (list, index)
    }

    /// Irreducible polynomials of exact degree `d`, other than `x`.
    pub fn irreducibles(&self, d: usize) -> &[Irreducible] {
        &self.irreducibles[d - 1]
    }

    /// Minimal polynomial of `g_L^e` via the stored tables, where `L` is the
    /// field degree and the root's own degree divides `L`.
    pub fn poly_of(&self, l: usize, e: u64) -> (usize, IrrPoly) {
        let d = self.orbit_len(l, e);
        if d == l {
            let idx = self.root_index[l - 1][(e % self.ext(l).order()) as usize];
            return (d, self.irreducibles[l - 1][idx].poly.clone());
        }
        let scale = self.ext(l).order() / self.ext(d).order();
        debug_assert_eq!(e % scale, 0);
        let idx = self.root_index[d - 1][(e / scale) as usize];
        (d, self.irreducibles[d - 1][idx].poly.clone())
    }

    /// Discrete log in `F_q^×`.
    pub fn log_base(&self, x: u32) -> Option<u64> {
        self.ext(1).log(x)
    }

    pub fn exp_base(&self, k: u64) -> u32 {
        self.ext(1).exp(k)
    }
}
