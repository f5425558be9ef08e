//! Twisted tori `T_w^F`, their characters, signatures and centralizer posets.

mod poset;
mod types;

pub use poset::{BlockOrbit, Node, Poset};
pub use types::{types_and_fibers, TypeFactor, TypeLabel, TypeRecord};

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::weyl::{Partition, Perm, SlotLayout};

/// `T_w^F = prod_i F_{q^{lambda_i}}^×`, elements given by discrete logs.
#[derive(Clone, Debug)]
pub struct TorusDatum {
    pub n: usize,
    pub q: u64,
    pub cycle_type: Partition,
    pub layout: SlotLayout,
    /// `q^{lambda_i} - 1`.
    pub orders: Vec<u64>,
    /// `L = lcm(lambda_i)`.
    pub cover_degree: usize,
    pub cover_order: u64,
    /// `(q^L - 1) / (q^{lambda_i} - 1)`.
    pub scales: Vec<u64>,
    /// Exponent of the group, `lcm(orders)`.
    pub exponent: u64,
    pub group_order: u64,
    centralizer: Vec<Perm>,
}

/// Character of `T_w^F` by exponents `b_i mod (q^{lambda_i} - 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct TorusChar(pub Vec<u64>);

impl fmt::Display for TorusChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|b| b.to_string()).collect();
        f.write_str(&s.join(","))
    }
}

impl FromStr for TorusChar {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.split(',')
            .map(|x| x.trim().parse::<u64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(TorusChar)
            .map_err(|_| Error::InvalidArgument(format!("cannot parse torus character '{s}'")))
    }
}

/// Equal-eigenvalue pattern of a torus element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Signature {
    /// Block id per slot, in first-occurrence order.
    pub blocks: Vec<usize>,
    /// Degree of the common eigenvalue of each block.
    pub degrees: Vec<usize>,
}

impl Signature {
    pub fn block_count(&self) -> usize {
        self.degrees.len()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.block_count()];
        for &b in &self.blocks {
            sizes[b] += 1;
        }
        sizes
    }

    /// `self <= other`: every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &Signature) -> bool {
        let mut map = vec![usize::MAX; self.block_count()];
        for (x, &b) in self.blocks.iter().enumerate() {
            let t = other.blocks[x];
            if map[b] == usize::MAX {
                map[b] = t;
            } else if map[b] != t {
                return false;
            }
        }
        true
    }

    pub fn canonical(&self) -> String {
        let b: Vec<String> = self.blocks.iter().map(|x| x.to_string()).collect();
        let d: Vec<String> = self.degrees.iter().map(|x| x.to_string()).collect();
        format!("{}/{}", b.join("."), d.join("."))
    }

    /// Relabels blocks in first-occurrence order.
    pub(crate) fn normalize<T: std::hash::Hash + Eq + Copy>(labels: &[T]) -> Vec<usize> {
        let mut map = std::collections::HashMap::new();
        labels
            .iter()
            .map(|l| {
                let k = map.len();
                *map.entry(*l).or_insert(k)
            })
            .collect()
    }
}

fn pow_u64(q: u64, e: usize) -> u64 {
    q.checked_pow(e as u32).expect("field size overflow")
}

impl TorusDatum {
    pub fn new(q: u64, cycle_type: &Partition) -> Result<TorusDatum> {
        let n = cycle_type.size();
        if n == 0 || n > 6 {
            return Err(Error::OutOfRange { what: "n", value: n as u64, range: "1..=6" });
        }
        let layout = SlotLayout::new(cycle_type);
        let orders: Vec<u64> = cycle_type.parts().iter().map(|&l| pow_u64(q, l) - 1).collect();
        let cover_degree = cycle_type.parts().iter().fold(1usize, |a, &b| a.lcm(&b));
        let cover_order = pow_u64(q, cover_degree) - 1;
        let scales = orders.iter().map(|o| cover_order / o).collect();
        let exponent = orders.iter().fold(1u64, |a, &b| a.lcm(&b));
        let group_order = orders.iter().product();
        let centralizer = layout.centralizer();
        Ok(TorusDatum {
            n,
            q,
            cycle_type: cycle_type.clone(),
            layout,
            orders,
            cover_degree,
            cover_order,
            scales,
            exponent,
            group_order,
            centralizer,
        })
    }

    /// `C_{S_n}(w)`, sorted.
    pub fn weyl_group(&self) -> &[Perm] {
        &self.centralizer
    }

    pub fn rank(&self) -> usize {
        self.cycle_type.len()
    }

    /// `(-1)^{l(lambda)}`.
    pub fn epsilon(&self) -> i64 {
        if self.rank().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// `(-1)^n`, the sign of the ambient group.
    pub fn epsilon_group(&self) -> i64 {
        if self.n.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn element(&self, mut idx: u64) -> Vec<u64> {
        self.orders
            .iter()
            .map(|&o| {
                let a = idx % o;
                idx /= o;
                a
            })
            .collect()
    }

    pub fn element_index(&self, a: &[u64]) -> u64 {
        a.iter().zip(&self.orders).rev().fold(0, |acc, (&x, &o)| acc * o + x % o)
    }

    pub fn elements(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        (0..self.group_order).map(|i| self.element(i))
    }

    /// Characters in exponent-tuple order.
    pub fn characters(&self) -> impl Iterator<Item = TorusChar> + '_ {
        (0..self.group_order).map(|i| TorusChar(self.element(i)))
    }

    pub fn check_char(&self, theta: &TorusChar) -> Result<()> {
        if theta.0.len() != self.rank() || theta.0.iter().zip(&self.orders).any(|(b, o)| b >= o) {
            return Err(Error::InvalidArgument(format!(
                "character ({theta}) does not live on the torus {}",
                self.cycle_type
            )));
        }
        Ok(())
    }

    /// `theta(s)` as an exponent of `zeta_{exponent}`.
    pub fn pair(&self, theta: &TorusChar, s: &[u64]) -> u64 {
        let e = self.exponent as u128;
        let mut acc = 0u128;
        for i in 0..self.rank() {
            let o = self.orders[i] as u128;
            acc = (acc + (theta.0[i] as u128 * s[i] as u128 % o) * (e / o)) % e;
        }
        acc as u64
    }

    /// Eigenvalue exponent of each slot in `F_{q^L}^×`.
    pub fn slot_eigenvalues(&self, s: &[u64]) -> Vec<u64> {
        let m = self.cover_order as u128;
        let q = self.q as u128;
        let mut out = vec![0; self.n];
        for (i, &l) in self.cycle_type.parts().iter().enumerate() {
            let mut e = (s[i] as u128 * self.scales[i] as u128) % m;
            for j in 0..l {
                out[self.layout.slot(i, j)] = e as u64;
                e = (e * q) % m;
            }
        }
        out
    }

    /// Length of the Frobenius orbit of a cover exponent.
    pub fn eigen_degree(&self, e: u64) -> usize {
        let m = self.cover_order as u128;
        let q = self.q as u128;
        let mut x = (e as u128 * q) % m;
        let mut d = 1;
        while x != e as u128 {
            x = (x * q) % m;
            d += 1;
        }
        d
    }

    pub fn signature_of(&self, s: &[u64]) -> Signature {
        let eig = self.slot_eigenvalues(s);
        let blocks = Signature::normalize(&eig);
        let count = blocks.iter().max().map_or(0, |&m| m + 1);
        let mut degrees = vec![0; count];
        for (x, &b) in blocks.iter().enumerate() {
            if degrees[b] == 0 {
                degrees[b] = self.eigen_degree(eig[x]);
            }
        }
        Signature { blocks, degrees }
    }

    /// `v . s`, with `v` a centralizer element.
    pub fn act_on_element(&self, v: &Perm, s: &[u64]) -> Result<Vec<u64>> {
        let dec = self.layout.decompose(v)?;
        let mut out = vec![0; self.rank()];
        for (i, &(pi, k)) in dec.iter().enumerate() {
            let l = self.cycle_type.parts()[i];
            let o = self.orders[i] as u128;
            let f = (self.q as u128).pow((l - k) as u32) % o;
            out[pi] = ((s[i] as u128 * f) % o) as u64;
        }
        Ok(out)
    }

    /// `v . theta`, defined by `(v . theta)(s) = theta(v . s)`.
    pub fn weyl_act(&self, v: &Perm, theta: &TorusChar) -> Result<TorusChar> {
        self.check_char(theta)?;
        let dec = self.layout.decompose(v)?;
        let mut out = vec![0; self.rank()];
        for (i, &(pi, k)) in dec.iter().enumerate() {
            let l = self.cycle_type.parts()[i];
            let o = self.orders[i] as u128;
            let f = (self.q as u128).pow((l - k) as u32) % o;
            out[i] = ((theta.0[pi] as u128 * f) % o) as u64;
        }
        Ok(TorusChar(out))
    }

    /// `#{v in W(T_w)^F : v . theta = theta'}`.
    pub fn orbit_count(&self, theta: &TorusChar, other: &TorusChar) -> Result<u64> {
        let mut c = 0;
        for v in &self.centralizer {
            if self.weyl_act(v, theta)? == *other {
                c += 1;
            }
        }
        Ok(c)
    }

    /// No nontrivial Weyl element fixes `theta`.
    pub fn in_general_position(&self, theta: &TorusChar) -> Result<bool> {
        Ok(self.orbit_count(theta, theta)? == 1)
    }

    pub fn product_char(&self, thetas: &[TorusChar]) -> TorusChar {
        TorusChar((0..self.rank()).map(|i| thetas.iter().map(|t| t.0[i]).sum::<u64>() % self.orders[i]).collect())
    }

    pub fn trivial_char(&self) -> TorusChar {
        TorusChar(vec![0; self.rank()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    #[test]
    fn signature_examples() {
        let t = TorusDatum::new(5, &p("1,1")).unwrap();
        let c = t.signature_of(&[0, 0]);
        assert_eq!(c.blocks, vec![0, 0]);
        assert_eq!(c.degrees, vec![1]);
        let r = t.signature_of(&[0, 1]);
        assert_eq!(r.blocks, vec![0, 1]);
        assert_eq!(r.degrees, vec![1, 1]);
        let cox = TorusDatum::new(5, &p("2")).unwrap();
        let g = cox.signature_of(&[1]);
        assert_eq!(g.blocks, vec![0, 1]);
        assert_eq!(g.degrees, vec![2, 2]);
    }

    #[test]
    fn generator_of_f25_has_quadratic_minimal_polynomial() {
        let tower = crate::glnq::FieldTower::new(5, 2).unwrap();
        let cox = TorusDatum::new(5, &p("2")).unwrap();
        let e = cox.slot_eigenvalues(&[1])[0];
        let (d, poly) = tower.poly_of(2, e);
        assert_eq!(d, 2);
        assert_eq!(poly.degree(), 2);
    }

    #[test]
    fn weyl_act_examples() {
        let cox = TorusDatum::new(5, &p("2")).unwrap();
        let frob = cox.layout.frobenius();
        assert_eq!(cox.weyl_act(&frob, &TorusChar(vec![1])).unwrap(), TorusChar(vec![5]));
        let id = Perm::identity(2);
        assert_eq!(cox.weyl_act(&id, &TorusChar(vec![7])).unwrap(), TorusChar(vec![7]));
        let split = TorusDatum::new(5, &p("1,1")).unwrap();
        let swap = Perm(vec![1, 0]);
        assert_eq!(split.weyl_act(&swap, &TorusChar(vec![1, 3])).unwrap(), TorusChar(vec![3, 1]));
        let bad = TorusDatum::new(5, &p("2,1")).unwrap();
        assert!(bad.weyl_act(&Perm(vec![2, 1, 0]), &TorusChar(vec![0, 0])).is_err());
    }

    #[test]
    fn weyl_group_orders() {
        for l in Partition::all(3) {
            let t = TorusDatum::new(4, &l).unwrap();
            assert_eq!(t.weyl_group().len() as u64, l.z());
            assert_eq!(t.group_order, l.parts().iter().map(|&x| 4u64.pow(x as u32) - 1).product::<u64>());
        }
    }

    proptest! {
        #[test]
        fn action_is_compatible(idx in 0usize..3, s_idx in 0u64..10_000, t_idx in 0u64..10_000, v_idx in 0usize..6) {
            let lambda = Partition::all(3)[idx].clone();
            let t = TorusDatum::new(5, &lambda).unwrap();
            let s = t.element(s_idx % t.group_order);
            let theta = TorusChar(t.element(t_idx % t.group_order));
            let v = &t.weyl_group()[v_idx % t.weyl_group().len()];
            let vs = t.act_on_element(v, &s).unwrap();
            prop_assert_eq!(t.pair(&theta, &vs), t.pair(&t.weyl_act(v, &theta).unwrap(), &s));
            // eigenvalue multiset is preserved
            let mut a = t.slot_eigenvalues(&s);
            let mut b = t.slot_eigenvalues(&vs);
            a.sort();
            b.sort();
            prop_assert_eq!(a, b);
        }
    }
}
