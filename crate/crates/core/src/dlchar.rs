//! Class functions of `GL_n(q)`: Deligne-Lusztig characters, almost unipotent
//! characters, inner products and the brute force multiplicity.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::glnq::TinyGroup;
use crate::group::Gln;
use crate::scalar::{rat_string, CycRing, CycValue, Expansion, Rat};
use crate::torus::TorusChar;
use crate::weyl::Partition;

/// Values of a class function on every class, in [`crate::glnq::ClassTable`] order.
#[derive(Clone, Debug)]
pub struct ClassFunction {
    pub n: usize,
    pub q: u64,
    pub ring: Arc<CycRing>,
    pub values: Vec<CycValue>,
    /// The same values as `zeta_N`-expansions, `N` the ring order.
    pub expansions: Vec<Expansion>,
}

impl ClassFunction {
    fn from_expansions(g: &Gln, ring: &Arc<CycRing>, expansions: Vec<Expansion>) -> Result<ClassFunction> {
        let values = expansions.iter().map(|e| ring.from_expansion(e)).collect::<Result<_>>()?;
        Ok(ClassFunction { n: g.n, q: g.q, ring: ring.clone(), values, expansions })
    }

    fn from_ints(g: &Gln, ring: &Arc<CycRing>, ints: Vec<BigInt>) -> Result<ClassFunction> {
        let expansions = ints
            .into_iter()
            .map(|v| {
                let mut e = Expansion::new();
                if !v.is_zero() {
                    e.insert(0, Rat::from_integer(v));
                }
                e
            })
            .collect();
        Self::from_expansions(g, ring, expansions)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn check(&self, g: &Gln) -> Result<()> {
        if self.n != g.n || self.q != g.q || self.values.len() != g.classes.len() {
            return Err(Error::ContextMismatch(format!(
                "class function of GL_{}({}) used with GL_{}({})",
                self.n, self.q, g.n, g.q
            )));
        }
        Ok(())
    }

    fn check_pair(&self, other: &ClassFunction) -> Result<()> {
        if self.n != other.n || self.q != other.q || self.values.len() != other.values.len() {
            return Err(Error::ContextMismatch("class functions of different groups".into()));
        }
        if self.ring.order() != other.ring.order() || self.ring.primes() != other.ring.primes() {
            return Err(Error::ContextMismatch("class functions over different cyclotomic rings".into()));
        }
        Ok(())
    }

    /// `a f + b g`.
    pub fn combine(&self, a: &Rat, other: &ClassFunction, b: &Rat) -> Result<ClassFunction> {
        self.check_pair(other)?;
        let mut expansions = Vec::with_capacity(self.len());
        for (x, y) in self.expansions.iter().zip(&other.expansions) {
            let mut e = Expansion::new();
            for (k, c) in x {
                *e.entry(*k).or_insert_with(Rat::zero) += c * a;
            }
            for (k, c) in y {
                *e.entry(*k).or_insert_with(Rat::zero) += c * b;
            }
            e.retain(|_, c| !c.is_zero());
            expansions.push(e);
        }
        let values = expansions.iter().map(|e| self.ring.from_expansion(e)).collect::<Result<_>>()?;
        Ok(ClassFunction { n: self.n, q: self.q, ring: self.ring.clone(), values, expansions })
    }

    /// Value on a class as an integer, if it is one.
    pub fn integer_value(&self, class: usize) -> Result<Option<BigInt>> {
        self.values[class].to_integer()
    }

    pub fn to_json(&self, g: &Gln) -> Result<serde_json::Value> {
        self.check(g)?;
        let rows: Vec<serde_json::Value> = g
            .classes
            .classes
            .iter()
            .zip(&self.expansions)
            .map(|(c, e)| {
                let value: BTreeMap<String, String> = e.iter().map(|(k, v)| (k.to_string(), rat_string(v))).collect();
                json!({ "class": c.label.canonical(), "value": value })
            })
            .collect();
        Ok(json!({ "n": self.n, "q": self.q, "order": self.ring.order(), "classes": rows }))
    }
}

/// `R_{T_w}(theta)` by the character formula.
pub fn dl_character(g: &Gln, w: &Partition, theta: &TorusChar, ring: &Arc<CycRing>) -> Result<ClassFunction> {
    let entry = g.torus(w)?;
    let t = &entry.datum;
    t.check_char(theta)?;
    if !ring.order().is_multiple_of(t.exponent) {
        return Err(Error::ContextMismatch(format!(
            "ring of order {} cannot hold characters of order {}",
            ring.order(),
            t.exponent
        )));
    }
    let scale = ring.order() / t.exponent;
    let expansions = g
        .classes
        .classes
        .par_iter()
        .map(|c| -> Result<Expansion> {
            let mut e = Expansion::new();
            let Some(info) = entry.lookup(&c.label.semisimple_key()) else {
                return Ok(e);
            };
            let node = &entry.poset.nodes[info.node];
            let kappa: Vec<_> = node.orbits.iter().map(|o| o.kappa.clone()).collect();
            let mu: Vec<_> = info.polys.iter().map(|p| c.label.0[p].clone()).collect();
            let mut qv = BigInt::one();
            for ((o, k), m) in node.orbits.iter().zip(&kappa).zip(&mu) {
                let qd = BigInt::from(g.q).pow(o.d as u32);
                qv *= g.green.table(o.m)?.value(m, k, &qd)?;
            }
            if qv.is_zero() {
                return Ok(e);
            }
            for v in &node.cosets {
                let vs = t.act_on_element(v, &info.s)?;
                let k = t.pair(theta, &vs) * scale;
                *e.entry(k).or_insert_with(Rat::zero) += Rat::from_integer(qv.clone());
            }
            e.retain(|_, c| !c.is_zero());
            Ok(e)
        })
        .collect::<Result<Vec<_>>>()?;
    ClassFunction::from_expansions(g, ring, expansions)
}

/// `U_chi = (1/|W|) sum_w chi(w) R_{T_w}(1)`, evaluated type by type.
pub fn almost_unipotent(g: &Gln, chi: &Partition, ring: &Arc<CycRing>) -> Result<ClassFunction> {
    let ints = g.class_type.iter().map(|&t| g.u_value(chi, t)).collect::<Result<Vec<_>>>()?;
    ClassFunction::from_ints(g, ring, ints)
}

pub fn steinberg(g: &Gln, ring: &Arc<CycRing>) -> Result<ClassFunction> {
    almost_unipotent(g, &Partition::column(g.n), ring)
}

pub fn trivial(g: &Gln, ring: &Arc<CycRing>) -> Result<ClassFunction> {
    ClassFunction::from_ints(g, ring, vec![BigInt::one(); g.classes.len()])
}

fn class_sum(g: &Gln, terms: impl Iterator<Item = CycValue>, ring: &Arc<CycRing>) -> Result<Rat> {
    let mut acc = ring.zero();
    for (c, v) in g.classes.classes.iter().zip(terms) {
        acc = &acc + &v.scale_int(&BigInt::from(c.size));
    }
    let total =
        acc.to_integer()?.ok_or_else(|| Error::NotRational(format!("class sum has shadow {}", acc.shadow())))?;
    Ok(Rat::new(total, BigInt::from(g.order())))
}

/// `(1/|G|) sum_g f(g) conj(h(g))`.
pub fn inner_product(g: &Gln, f: &ClassFunction, h: &ClassFunction) -> Result<Rat> {
    f.check(g)?;
    f.check_pair(h)?;
    class_sum(g, f.values.iter().zip(&h.values).map(|(a, b)| a * &b.conj()), &f.ring)
}

/// `(1/|G|) sum_g prod_i f_i(g)`.
pub fn brute_multiplicity(g: &Gln, factors: &[ClassFunction]) -> Result<Rat> {
    let first = factors.first().ok_or_else(|| Error::InvalidArgument("no factors".into()))?;
    first.check(g)?;
    for f in &factors[1..] {
        first.check_pair(f)?;
    }
    let ring = first.ring.clone();
    let products = (0..g.classes.len()).map(|c| {
        let mut v = factors[0].values[c].clone();
        for f in &factors[1..] {
            v = &v * &f.values[c];
        }
        v
    });
    class_sum(g, products, &ring)
}

/// [`brute_multiplicity`] of `U_{chi_1} x ... x R_{T_w}(theta_1) x ...`;
/// an empty product is the trivial character.
pub fn oracle_multiplicity(g: &Gln, chars: &[Partition], torus: &Partition, thetas: &[TorusChar]) -> Result<Rat> {
    let ring = g.ring(&[torus], chars.len() + thetas.len())?;
    let mut fs: Vec<ClassFunction> = chars.iter().map(|c| almost_unipotent(g, c, &ring)).collect::<Result<_>>()?;
    for th in thetas {
        fs.push(dl_character(g, torus, th, &ring)?);
    }
    if fs.is_empty() {
        fs.push(trivial(g, &ring)?);
    }
    brute_multiplicity(g, &fs)
}

/// Borel data of each class of `g`: see [`TinyGroup::borel_diagonal_counts`].
pub struct BorelData {
    pub order: u128,
    pub counts: Vec<BTreeMap<Vec<u64>, u64>>,
}

pub fn borel_data(g: &Gln, tiny: &TinyGroup) -> Result<BorelData> {
    if tiny.n != g.n || tiny.q as u64 != g.q {
        return Err(Error::ContextMismatch("tiny group of a different GL_n(q)".into()));
    }
    let counts = g
        .classes
        .classes
        .par_iter()
        .map(|c| {
            let i = tiny.classes.index_of(&c.label).ok_or_else(|| {
                Error::Consistency(format!("class {} missing from the tiny group", c.label.canonical()))
            })?;
            Ok(tiny.borel_diagonal_counts(i))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BorelData { order: tiny.borel_order(), counts })
}

/// `Ind_B^G(theta)` by summing over the whole group.
pub fn hc_induce(g: &Gln, tiny: &TinyGroup, theta: &TorusChar, ring: &Arc<CycRing>) -> Result<ClassFunction> {
    hc_induce_with(g, &borel_data(g, tiny)?, theta, ring)
}

pub fn hc_induce_with(g: &Gln, borel: &BorelData, theta: &TorusChar, ring: &Arc<CycRing>) -> Result<ClassFunction> {
    let qm = g.q - 1;
    if theta.0.len() != g.n || theta.0.iter().any(|&b| b >= qm) {
        return Err(Error::InvalidArgument(format!("({theta}) is not a character of the split torus")));
    }
    if !ring.order().is_multiple_of(qm) {
        return Err(Error::ContextMismatch("ring does not contain (q-1)-th roots of unity".into()));
    }
    let scale = ring.order() / qm;
    let b = BigInt::from(borel.order);
    let expansions = borel
        .counts
        .iter()
        .map(|counts| {
            let mut e = Expansion::new();
            for (diag, &c) in counts {
                let k: u64 = diag.iter().zip(&theta.0).map(|(d, t)| d * t).sum::<u64>() % qm;
                *e.entry(k * scale).or_insert_with(Rat::zero) += Rat::new(BigInt::from(c), b.clone());
            }
            e.retain(|_, c| !c.is_zero());
            e
        })
        .collect();
    ClassFunction::from_expansions(g, ring, expansions)
}
