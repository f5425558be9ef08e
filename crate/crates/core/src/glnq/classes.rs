//! Conjugacy classes of `GL_n(q)` labelled by elementary divisors.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::Write;

use super::field::{FieldTower, IrrPoly};
use crate::error::{Error, Result};
use crate::weyl::Partition;

/// Map from irreducible polynomials (not `x`) to partitions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassLabel(pub BTreeMap<IrrPoly, Partition>);

impl ClassLabel {
    pub fn n(&self) -> usize {
        self.0.iter().map(|(f, l)| f.degree() * l.size()).sum()
    }

    pub fn is_semisimple(&self) -> bool {
        self.0.values().all(|l| l.parts().iter().all(|&p| p == 1))
    }

    /// Characteristic polynomial factorization: `(phi, |lambda_phi|)`.
    pub fn semisimple_key(&self) -> Vec<(IrrPoly, usize)> {
        self.0.iter().map(|(f, l)| (f.clone(), l.size())).collect()
    }

    pub fn canonical(&self) -> String {
        self.0.iter().map(|(f, l)| format!("{f}:{l}")).collect::<Vec<_>>().join(";")
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

#[derive(Clone, Debug)]
pub struct ClassRecord {
    pub label: ClassLabel,
    pub size: u128,
    pub centralizer: u128,
}

/// `Q^{sum lambda'_i^2} prod_i prod_{k<=m_i} (1 - Q^{-k})`.
pub fn unipotent_centralizer(lambda: &Partition, big_q: u128) -> u128 {
    let conj = lambda.conjugate();
    let sq: usize = conj.parts().iter().map(|c| c * c).sum();
    let mut drop = 0usize;
    let mut prod = 1u128;
    for &m in lambda.multiplicities().values() {
        drop += m * (m + 1) / 2;
        for k in 1..=m as u32 {
            prod *= big_q.pow(k) - 1;
        }
    }
    big_q.pow((sq - drop) as u32) * prod
}

pub fn gl_order(n: usize, q: u64) -> u128 {
    let q = q as u128;
    (0..n as u32).map(|i| q.pow(n as u32) - q.pow(i)).product()
}

#[derive(Clone, Debug)]
pub struct ClassTable {
    pub n: usize,
    pub q: u32,
    pub order: u128,
    pub classes: Vec<ClassRecord>,
    index: HashMap<ClassLabel, usize>,
}

pub const MAX_CLASS_N: usize = 3;

impl ClassTable {
    pub fn build(tower: &FieldTower, n: usize) -> Result<ClassTable> {
        if !(1..=MAX_CLASS_N).contains(&n) || tower.max_degree() < n {
            return Err(Error::OutOfRange { what: "n", value: n as u64, range: "1..=3" });
        }
        let q = tower.q();
        let polys: Vec<IrrPoly> = (1..=n).flat_map(|d| tower.irreducibles(d).iter().map(|i| i.poly.clone())).collect();
        let order = gl_order(n, q as u64);
        let mut labels = Vec::new();
        fn rec(
            polys: &[IrrPoly],
            start: usize,
            rest: usize,
            cur: &mut BTreeMap<IrrPoly, Partition>,
            out: &mut Vec<ClassLabel>,
        ) {
            if rest == 0 {
                out.push(ClassLabel(cur.clone()));
                return;
            }
            for (i, f) in polys.iter().enumerate().skip(start) {
                let d = f.degree();
                if d > rest {
                    continue;
                }
                for k in 1..=rest / d {
                    for lambda in Partition::all(k) {
                        cur.insert(f.clone(), lambda);
                        rec(polys, i + 1, rest - d * k, cur, out);
                        cur.remove(f);
                    }
                }
            }
        }
        rec(&polys, 0, n, &mut BTreeMap::new(), &mut labels);
        labels.sort();
        let mut classes = Vec::with_capacity(labels.len());
        let mut total = 0u128;
        for label in labels {
            let centralizer: u128 =
                label.0.iter().map(|(f, l)| unipotent_centralizer(l, (q as u128).pow(f.degree() as u32))).product();
            if !order.is_multiple_of(centralizer) {
                return Err(Error::Consistency(format!("centralizer of {label} does not divide |G|")));
            }
            let size = order / centralizer;
            total += size;
            classes.push(ClassRecord { label, size, centralizer });
        }
        if total != order {
            return Err(Error::Consistency(format!("class sizes sum to {total}, not {order}")));
        }
        let index = classes.iter().enumerate().map(|(i, c)| (c.label.clone(), i)).collect();
        Ok(ClassTable { n, q, order, classes, index })
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn index_of(&self, label: &ClassLabel) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// `|G|_{p'}`, the number of semisimple elements' exponent bound.
    pub fn p_prime_order(&self) -> u128 {
        let qn = (self.q as u128).pow((self.n * (self.n - 1) / 2) as u32);
        self.order / qn
    }

    /// CSV with columns polynomial-spec, partition, size, centralizer_order.
    /// Multi-factor classes join factors with `;`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["polynomial-spec", "partition", "size", "centralizer_order"])?;
        for c in &self.classes {
            let polys = c.label.0.keys().map(|f| f.spec()).collect::<Vec<_>>().join(";");
            let parts = c.label.0.values().map(|l| l.csv()).collect::<Vec<_>>().join(";");
            wr.write_record([polys, parts, c.size.to_string(), c.centralizer.to_string()])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Class table for `GL_n(q)` with its own field tower.
pub fn enumerate_classes(n: usize, q: u32) -> Result<ClassTable> {
    let tower = FieldTower::new(q, n.clamp(1, 3))?;
    ClassTable::build(&tower, n)
}
