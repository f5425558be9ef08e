use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::glnq::{gl_order, unipotent_centralizer, ClassLabel, ClassTable};
use crate::green::LeviShape;
use crate::weyl::Partition;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TypeFactor {
    pub d: usize,
    pub m: usize,
    pub mu: Partition,
}

/// `[L, u]`: Levi shape of the semisimple part plus unipotent partitions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TypeLabel {
    pub factors: Vec<TypeFactor>,
}

impl TypeLabel {
    pub fn new(mut factors: Vec<TypeFactor>) -> TypeLabel {
        factors.sort();
        TypeLabel { factors }
    }

    pub fn of_class(label: &ClassLabel) -> TypeLabel {
        TypeLabel::new(label.0.iter().map(|(f, l)| TypeFactor { d: f.degree(), m: l.size(), mu: l.clone() }).collect())
    }

    pub fn shape(&self) -> LeviShape {
        LeviShape::new(self.factors.iter().map(|f| (f.m, f.d)).collect()).expect("positive factors")
    }

    pub fn is_semisimple(&self) -> bool {
        self.factors.iter().all(|f| f.mu.len() == f.m)
    }

    /// `|C_G(su)|` for an element of this type.
    pub fn centralizer_order(&self, q: u64) -> u128 {
        self.factors.iter().map(|f| unipotent_centralizer(&f.mu, (q as u128).pow(f.d as u32))).product()
    }

    /// Torus type `(d_j)` when every factor has `m = 1`.
    pub fn torus_class(&self) -> Option<Partition> {
        self.shape().is_torus().then(|| Partition::new(self.factors.iter().map(|f| f.d).collect()))
    }
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|x| format!("GL{}(q^{}):{}", x.m, x.d, x.mu)).collect();
        f.write_str(&parts.join(" x "))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TypeRecord {
    pub label: TypeLabel,
    pub fiber: u128,
    pub centralizer: u128,
    pub classes: usize,
}

/// Groups all classes by type, with fiber sizes and centralizer orders.
pub fn types_and_fibers(classes: &ClassTable) -> Result<Vec<TypeRecord>> {
    let q = classes.q as u64;
    let mut map: BTreeMap<TypeLabel, TypeRecord> = BTreeMap::new();
    for c in &classes.classes {
        let label = TypeLabel::of_class(&c.label);
        let cent = label.centralizer_order(q);
        // |L^F| / (unipotent class size in L) must reproduce the class data
        let levi: u128 = label.factors.iter().map(|f| gl_order(f.m, q.pow(f.d as u32))).product();
        let unip_size: u128 = label
            .factors
            .iter()
            .map(|f| {
                let qd = (q as u128).pow(f.d as u32);
                gl_order(f.m, q.pow(f.d as u32)) / unipotent_centralizer(&f.mu, qd)
            })
            .product();
        if levi / unip_size != c.centralizer || cent != c.centralizer {
            return Err(Error::Consistency(format!("centralizer of type {label} disagrees with class data")));
        }
        let rec = map.entry(label.clone()).or_insert(TypeRecord { label, fiber: 0, centralizer: cent, classes: 0 });
        rec.fiber += c.size;
        rec.classes += 1;
    }
    let out: Vec<TypeRecord> = map.into_values().collect();
    let total: u128 = out.iter().map(|r| r.fiber).sum();
    if total != classes.order {
        return Err(Error::Consistency("fiber sizes do not sum to |G|".into()));
    }
    Ok(out)
}
