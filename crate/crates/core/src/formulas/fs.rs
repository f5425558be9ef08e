//! Coefficients `<chi, w>` where `w` is the indicator of `x^Q = 1`, `Q = |G|_{p'}`,
//! i.e. of the semisimple elements.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::dlchar::ClassFunction;
use crate::error::{Error, Result};
use crate::glnq::TinyGroup;
use crate::group::Gln;
use crate::scalar::Rat;
use crate::torus::TorusChar;
use crate::weyl::Partition;

/// A uniform virtual character `sum_k c_k R_{T_{w_k}}(theta_k)`.
#[derive(Clone, Debug, Default)]
pub struct FsQuery {
    pub terms: Vec<(Rat, Partition, TorusChar)>,
}

impl FsQuery {
    pub fn dl(w: Partition, theta: TorusChar) -> FsQuery {
        FsQuery { terms: vec![(Rat::from_integer(1.into()), w, theta)] }
    }

    /// `<R_{T_w}(theta), chi>`, read off from orthogonality.
    fn pairing(&self, g: &Gln, w: &Partition, theta: &TorusChar) -> Result<Rat> {
        let mut acc = Rat::zero();
        for (c, w2, th2) in &self.terms {
            if w2 == w {
                let t = g.torus(w)?;
                acc += c * Rat::from_integer(t.datum.orbit_count(theta, th2)?.into());
            }
        }
        Ok(acc)
    }
}

/// `Q = |G|_{p'}`.
pub fn p_prime_order(g: &Gln) -> u128 {
    g.classes.p_prime_order()
}

fn p_part(shape: &crate::green::LeviShape, q: u64) -> BigInt {
    BigInt::from(q).pow(shape.p_part_exponent() as u32)
}

fn check(g: &Gln, chi: &FsQuery) -> Result<()> {
    for (_, w, th) in &chi.terms {
        g.torus(w)?.datum.check_char(th)?;
    }
    Ok(())
}

/// `<chi, w> = sum_w 1/(|T_w| z_w) sum_theta eps_T <R_T(theta), chi>
/// sum_L (eps_L / |L|_p) sum_{L' >= L} mu(L, L') delta(theta, L')`.
pub fn fs_indicator(g: &Gln, chi: &FsQuery) -> Result<Rat> {
    check(g, chi)?;
    let mut total = Rat::zero();
    for w in &g.weyl.classes {
        if !chi.terms.iter().any(|(_, w2, _)| w2 == w) {
            continue;
        }
        let entry = g.torus(w)?;
        let t = &entry.datum;
        let mut inner = Rat::zero();
        for theta in t.characters() {
            let pair = chi.pairing(g, w, &theta)?;
            if pair.is_zero() {
                continue;
            }
            let mut s = Rat::zero();
            for (ni, node) in entry.poset.nodes.iter().enumerate() {
                let md = entry.poset.mobius_delta(t, &theta, ni);
                if md != 0 {
                    s += Rat::new(BigInt::from(node.shape.sign() * md), p_part(&node.shape, g.q));
                }
            }
            inner += pair * s * Rat::from_integer(t.epsilon().into());
        }
        total += inner / Rat::from_integer(BigInt::from(t.group_order) * BigInt::from(t.weyl_group().len()));
    }
    Ok(total)
}

/// The same sum with the normalisation `(1/|G|) (1/(|L| |L|_p)) |W_L(T)|/|W(T)|`
/// per pseudo-Levi and the `(T, theta)` sum weighted by `|G| / |N(T)|`.
pub fn fs_indicator_literal(g: &Gln, chi: &FsQuery) -> Result<Rat> {
    check(g, chi)?;
    let mut total = Rat::zero();
    for w in &g.weyl.classes {
        if !chi.terms.iter().any(|(_, w2, _)| w2 == w) {
            continue;
        }
        let entry = g.torus(w)?;
        let t = &entry.datum;
        let z = BigInt::from(t.weyl_group().len());
        let mut inner = Rat::zero();
        for theta in t.characters() {
            let pair = chi.pairing(g, w, &theta)?;
            if pair.is_zero() {
                continue;
            }
            let mut s = Rat::zero();
            for (ni, node) in entry.poset.nodes.iter().enumerate() {
                let md = entry.poset.mobius_delta(t, &theta, ni);
                if md == 0 {
                    continue;
                }
                let levi: BigInt = node
                    .shape
                    .factors
                    .iter()
                    .map(|&(m, d)| BigInt::from(crate::glnq::gl_order(m, g.q.pow(d as u32))))
                    .product();
                s += Rat::new(
                    BigInt::from(node.shape.sign() * md) * BigInt::from(node.stabilizer),
                    levi * p_part(&node.shape, g.q) * &z,
                );
            }
            inner += pair * s * Rat::from_integer(t.epsilon().into());
        }
        total += inner / Rat::from_integer(BigInt::from(t.group_order) * &z);
    }
    Ok(total)
}

/// `(1/|G|) sum_{x^Q = 1} chi(x)`, summing over group elements.
pub fn fs_lhs(g: &Gln, tiny: &TinyGroup, chi: &ClassFunction) -> Result<Rat> {
    if tiny.n != g.n || tiny.q as u64 != g.q || chi.n != g.n || chi.q != g.q {
        return Err(Error::ContextMismatch("group data of different GL_n(q)".into()));
    }
    let counts = semisimple_counts(g, tiny)?;
    let mut acc = chi.ring.zero();
    for (c, &k) in counts.iter().enumerate() {
        if k > 0 {
            acc = &acc + &chi.values[c].scale_int(&BigInt::from(k));
        }
    }
    let v =
        acc.to_integer()?.ok_or_else(|| Error::NotRational(format!("semisimple sum has shadow {}", acc.shadow())))?;
    Ok(Rat::new(v, BigInt::from(g.order())))
}

/// Number of elements with `x^Q = 1` in each class of `g`.
pub fn semisimple_counts(g: &Gln, tiny: &TinyGroup) -> Result<Vec<u64>> {
    let qq = p_prime_order(g);
    let map: Vec<usize> = tiny
        .classes
        .classes
        .iter()
        .map(|c| g.classes.index_of(&c.label).ok_or_else(|| Error::Consistency("class tables disagree".into())))
        .collect::<Result<_>>()?;
    let mut counts = vec![0u64; g.classes.len()];
    for (i, x) in tiny.elements().iter().enumerate() {
        if tiny.power_map_indicator(x, qq) {
            counts[map[tiny.class_of(i)]] += 1;
        }
    }
    Ok(counts)
}

/// `gamma(1) = |G| sum_chi |<chi, w>|^2`, assembled from the coefficients
/// `<R_{T_w}(theta), w>` of all Deligne-Lusztig characters.
pub fn gamma_one(g: &Gln) -> Result<Rat> {
    let mut acc = Rat::zero();
    for w in &g.weyl.classes {
        let t = g.torus(w)?;
        let mut s = Rat::zero();
        for theta in t.datum.characters() {
            let c = fs_indicator(g, &FsQuery::dl(w.clone(), theta))?;
            s += &c * &c;
        }
        acc += s / Rat::from_integer(BigInt::from(t.datum.weyl_group().len()));
    }
    Ok(acc * Rat::from_integer(BigInt::from(g.order())))
}
