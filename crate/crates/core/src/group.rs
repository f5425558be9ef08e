//! Everything about one `GL_n(q)` that the character code needs, built once.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::glnq::{ClassTable, FieldTower, IrrPoly, MAX_Q};
use crate::green::GreenTables;
use crate::scalar::{CycRing, Rat};
use crate::torus::{types_and_fibers, Poset, TorusDatum, TypeLabel, TypeRecord};
use crate::weyl::{build_table, Partition, WeylTable};

pub const MAX_N: usize = 3;

/// Sorted `(minimal polynomial, multiplicity)` pairs of a semisimple element.
pub type SemisimpleKey = Vec<(IrrPoly, usize)>;

/// A torus element representing one semisimple class.
#[derive(Clone, Debug)]
pub struct SsInfo {
    pub s: Vec<u64>,
    pub node: usize,
    /// Minimal polynomial of each block orbit of the node, in orbit order.
    pub polys: Vec<IrrPoly>,
}

#[derive(Debug)]
pub struct TorusEntry {
    pub datum: TorusDatum,
    pub poset: Poset,
    ss: HashMap<SemisimpleKey, SsInfo>,
}

impl TorusEntry {
    fn build(tower: &FieldTower, q: u64, w: &Partition) -> Result<TorusEntry> {
        let datum = TorusDatum::new(q, w)?;
        let poset = Poset::build(&datum)?;
        let mut ss = HashMap::new();
        for s in datum.elements() {
            let node = poset.node_of(&datum, &s);
            let polys = orbit_polys(tower, &datum, &poset, &s, node);
            let key = key_of(&poset, node, &polys);
            ss.entry(key).or_insert(SsInfo { s, node, polys });
        }
        Ok(TorusEntry { datum, poset, ss })
    }

    /// First torus element (in index order) with the given semisimple part.
    pub fn lookup(&self, key: &[(IrrPoly, usize)]) -> Option<&SsInfo> {
        self.ss.get(key)
    }

    pub fn semisimple_classes(&self) -> usize {
        self.ss.len()
    }
}

fn orbit_polys(tower: &FieldTower, t: &TorusDatum, poset: &Poset, s: &[u64], node: usize) -> Vec<IrrPoly> {
    let eig = t.slot_eigenvalues(s);
    let n = &poset.nodes[node];
    n.orbits
        .iter()
        .map(|o| {
            let x = n.signature.blocks.iter().position(|&b| b == o.blocks[0]).expect("block has a slot");
            tower.poly_of(t.cover_degree, eig[x]).1
        })
        .collect()
}

fn key_of(poset: &Poset, node: usize, polys: &[IrrPoly]) -> SemisimpleKey {
    let mut map = BTreeMap::new();
    for (o, p) in poset.nodes[node].orbits.iter().zip(polys) {
        *map.entry(p.clone()).or_insert(0) += o.m;
    }
    map.into_iter().collect()
}

/// The group `GL_n(q)` with its classes, types, Weyl and Green data.
#[derive(Debug)]
pub struct Gln {
    pub n: usize,
    pub q: u64,
    pub tower: FieldTower,
    pub classes: ClassTable,
    pub types: Vec<TypeRecord>,
    /// Type index of every class.
    pub class_type: Vec<usize>,
    pub weyl: WeylTable,
    pub green: GreenTables,
    tori: Vec<OnceLock<Result<Arc<TorusEntry>>>>,
    u_table: OnceLock<Vec<Vec<BigInt>>>,
}

impl Gln {
    pub fn new(n: usize, q: u64) -> Result<Gln> {
        if n == 0 || n > MAX_N {
            return Err(Error::OutOfRange { what: "n", value: n as u64, range: "1..=3" });
        }
        if q > MAX_Q as u64 {
            return Err(Error::OutOfRange { what: "q", value: q, range: "prime powers up to 32" });
        }
        let tower = FieldTower::new(q as u32, n)?;
        let classes = ClassTable::build(&tower, n)?;
        let types = types_and_fibers(&classes)?;
        let index: HashMap<&TypeLabel, usize> = types.iter().enumerate().map(|(i, r)| (&r.label, i)).collect();
        let class_type = classes.classes.iter().map(|c| index[&TypeLabel::of_class(&c.label)]).collect();
        let weyl = build_table(n)?;
        let green = GreenTables::new(n)?;
        let tori = weyl.classes.iter().map(|_| OnceLock::new()).collect();
        Ok(Gln { n, q, tower, classes, types, class_type, weyl, green, tori, u_table: OnceLock::new() })
    }

    pub fn order(&self) -> u128 {
        self.classes.order
    }

    /// `|Phi^+| = n(n-1)/2`.
    pub fn positive_roots(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    pub fn torus(&self, w: &Partition) -> Result<Arc<TorusEntry>> {
        let i = self
            .weyl
            .class_index(w)
            .ok_or_else(|| Error::InvalidArgument(format!("{w} is not a cycle type of S_{}", self.n)))?;
        self.tori[i].get_or_init(|| TorusEntry::build(&self.tower, self.q, w).map(Arc::new)).clone()
    }

    /// Ring holding values of characters of the given tori and products of
    /// `factors` class functions summed over the group.
    pub fn ring(&self, tori: &[&Partition], factors: usize) -> Result<Arc<CycRing>> {
        let mut order = 1u64;
        for w in tori {
            order = order.lcm(&self.torus(w)?.datum.exponent);
        }
        let bits = (factors as f64 + 1.0) * (self.order() as f64).log2() + 16.0;
        CycRing::new(order, bits)
    }

    /// Ring containing every torus character value.
    pub fn full_ring(&self, factors: usize) -> Result<Arc<CycRing>> {
        let ws: Vec<&Partition> = self.weyl.classes.iter().collect();
        self.ring(&ws, factors)
    }

    /// `U_chi` on elements of the given type.
    pub fn u_value(&self, chi: &Partition, type_idx: usize) -> Result<BigInt> {
        let ci = self
            .weyl
            .char_index(chi)
            .ok_or_else(|| Error::InvalidArgument(format!("{chi} is not a character of S_{}", self.n)))?;
        let table = match self.u_table.get() {
            Some(t) => t,
            None => {
                let t = self
                    .weyl
                    .chars
                    .iter()
                    .map(|c| (0..self.types.len()).map(|i| self.compute_u(c, &self.types[i].label)).collect())
                    .collect::<Result<Vec<Vec<_>>>>()?;
                self.u_table.get_or_init(|| t)
            }
        };
        table[ci].get(type_idx).cloned().ok_or(Error::OutOfRange {
            what: "type index",
            value: type_idx as u64,
            range: "within the type list",
        })
    }

    fn compute_u(&self, chi: &Partition, label: &TypeLabel) -> Result<BigInt> {
        let mut acc = Rat::zero();
        let mut kappas: Vec<Partition> = Vec::new();
        self.u_rec(chi, label, &mut kappas, &mut acc)?;
        if !acc.is_integer() {
            return Err(Error::NotRational(format!("U_{chi} on type {label} is {acc}")));
        }
        Ok(acc.to_integer())
    }

    fn u_rec(&self, chi: &Partition, label: &TypeLabel, kappas: &mut Vec<Partition>, acc: &mut Rat) -> Result<()> {
        let j = kappas.len();
        if j == label.factors.len() {
            let rho = Partition::union(
                label.factors.iter().zip(kappas.iter()).flat_map(|(f, k)| k.scaled(f.d).parts().to_vec()),
            );
            let mut num = BigInt::from(self.weyl.value(chi, &rho)?);
            let mut den = BigInt::one();
            for (f, k) in label.factors.iter().zip(kappas.iter()) {
                let qd = BigInt::from(self.q).pow(f.d as u32);
                num *= self.green.table(f.m)?.value(&f.mu, k, &qd)?;
                den *= k.z();
            }
            *acc += Rat::new(num, den);
            return Ok(());
        }
        for k in Partition::all(label.factors[j].m) {
            kappas.push(k);
            self.u_rec(chi, label, kappas, acc)?;
            kappas.pop();
        }
        Ok(())
    }

    /// Weyl character parsed from `triv`, `sgn` or a partition of `n`.
    pub fn parse_char(&self, s: &str) -> Result<Partition> {
        let p = match s.trim() {
            "triv" | "trivial" => Partition::row(self.n),
            "sgn" | "sign" | "st" => Partition::column(self.n),
            other => other.parse::<Partition>()?,
        };
        if p.size() != self.n {
            return Err(Error::InvalidArgument(format!("{p} is not a partition of {}", self.n)));
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_semisimple_class_is_found() {
        let g = Gln::new(3, 4).unwrap();
        let mut hit = vec![false; g.classes.len()];
        for w in g.weyl.classes.clone() {
            let t = g.torus(&w).unwrap();
            for (i, c) in g.classes.classes.iter().enumerate() {
                if t.lookup(&c.label.semisimple_key()).is_some() {
                    hit[i] = true;
                }
            }
        }
        assert!(hit.iter().all(|&h| h));
    }

    #[test]
    fn u_values_gl2() {
        let g = Gln::new(2, 5).unwrap();
        let sgn = Partition::column(2);
        for (i, t) in g.types.iter().enumerate() {
            let v = g.u_value(&sgn, i).unwrap();
            let expect: i64 = match t.label.to_string().as_str() {
                "GL2(q^1):(1,1)" => 5,
                "GL2(q^1):(2)" => 0,
                "GL1(q^1):(1) x GL1(q^1):(1)" => 1,
                "GL1(q^2):(1)" => -1,
                other => panic!("unexpected type {other}"),
            };
            assert_eq!(v, BigInt::from(expect), "{}", t.label);
            assert_eq!(g.u_value(&Partition::row(2), i).unwrap(), BigInt::one());
        }
    }
}
