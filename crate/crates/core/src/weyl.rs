//! Symmetric group data: partitions, character tables, centralizers.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Rat;

pub const MAX_TABLE_N: usize = 6;

/// Weakly decreasing list of positive integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition(Vec<usize>);

impl Partition {
    /// Sorts the parts and drops zeros.
    pub fn new(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn from_sorted(parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(format!("{parts:?} is not a partition")));
        }
        Ok(Partition(parts))
    }

    pub fn row(n: usize) -> Self {
        Self::new(vec![n])
    }

    pub fn column(n: usize) -> Self {
        Partition(vec![1; n])
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn conjugate(&self) -> Partition {
        let first = self.0.first().copied().unwrap_or(0);
        Partition((1..=first).map(|k| self.0.iter().filter(|&&p| p >= k).count()).collect())
    }

    /// `sum (i-1) lambda_i`.
    pub fn n_value(&self) -> usize {
        self.0.iter().enumerate().map(|(i, &p)| i * p).sum()
    }

    pub fn multiplicities(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for &p in &self.0 {
            *m.entry(p).or_insert(0) += 1;
        }
        m
    }

    /// Order of the centralizer of a permutation of this cycle type.
    pub fn z(&self) -> u64 {
        self.multiplicities()
            .iter()
            .map(|(&k, &m)| (k as u64).pow(m as u32) * (1..=m as u64).product::<u64>())
            .product()
    }

    /// Sign of a permutation with this cycle type.
    pub fn sign(&self) -> i64 {
        if (self.size() - self.len()).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Every partition of `n`, reverse-lexicographically: `(n)` first, `(1^n)` last.
    pub fn all(n: usize) -> Vec<Partition> {
        fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if rest == 0 {
                out.push(Partition(cur.clone()));
                return;
            }
            for p in (1..=rest.min(max)).rev() {
                cur.push(p);
                rec(rest - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, n, &mut Vec::new(), &mut out);
        out
    }

    /// Union of parts, each multiplied by `scale`.
    pub fn scaled(&self, scale: usize) -> Partition {
        Partition(self.0.iter().map(|p| p * scale).collect())
    }

    pub fn union(parts: impl IntoIterator<Item = usize>) -> Partition {
        Partition::new(parts.into_iter().collect())
    }

    pub fn csv(&self) -> String {
        self.0.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.csv())
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Accepts `2,1`, `(2,1)`, `[2,1]`, `2+1` and `2.1`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
        let parts: std::result::Result<Vec<usize>, _> =
            t.split([',', '+', '.']).filter(|x| !x.trim().is_empty()).map(|x| x.trim().parse::<usize>()).collect();
        let parts = parts.map_err(|_| Error::InvalidArgument(format!("cannot parse partition '{s}'")))?;
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::InvalidArgument(format!("cannot parse partition '{s}'")));
        }
        Ok(Partition::new(parts))
    }
}

/// Murnaghan-Nakayama rule on beta sets.
pub fn mn_value(lambda: &Partition, rho: &Partition) -> i64 {
    assert_eq!(lambda.size(), rho.size(), "sizes differ");
    let l = lambda.len();
    let beta: Vec<usize> = lambda.parts().iter().enumerate().map(|(i, &p)| p + l - 1 - i).collect();
    mn_rec(beta, rho.parts())
}

fn mn_rec(beta: Vec<usize>, rho: &[usize]) -> i64 {
    let Some((&k, rest)) = rho.split_first() else {
        return 1;
    };
    let mut total = 0;
    for (idx, &b) in beta.iter().enumerate() {
        if b < k || beta.contains(&(b - k)) {
            continue;
        }
        let between = beta.iter().filter(|&&x| x > b - k && x < b).count();
        let mut next = beta.clone();
        next[idx] = b - k;
        let sign = if between % 2 == 0 { 1 } else { -1 };
        total += sign * mn_rec(next, rest);
    }
    total
}

#[derive(Clone, Debug, Serialize)]
pub struct WeylTable {
    pub n: usize,
    pub classes: Vec<Partition>,
    pub chars: Vec<Partition>,
    /// `values[chi][rho]`.
    pub values: Vec<Vec<i64>>,
    pub centralizer_orders: Vec<u64>,
}

fn hardcoded(n: usize) -> Option<Vec<Vec<i64>>> {
    match n {
        1 => Some(vec![vec![1]]),
        2 => Some(vec![vec![1, 1], vec![-1, 1]]),
        3 => Some(vec![vec![1, 1, 1], vec![-1, 0, 2], vec![1, -1, 1]]),
        _ => None,
    }
}

pub fn build_table(n: usize) -> Result<WeylTable> {
    if !(1..=MAX_TABLE_N).contains(&n) {
        return Err(Error::OutOfRange { what: "n", value: n as u64, range: "1..=6" });
    }
    let parts = Partition::all(n);
    let values: Vec<Vec<i64>> = parts.iter().map(|chi| parts.iter().map(|rho| mn_value(chi, rho)).collect()).collect();
    if let Some(fixed) = hardcoded(n) {
        if fixed != values {
            return Err(Error::Consistency(format!("character table of S_{n} disagrees with the fixed table")));
        }
    }
    Ok(WeylTable {
        n,
        centralizer_orders: parts.iter().map(Partition::z).collect(),
        classes: parts.clone(),
        chars: parts,
        values,
    })
}

impl WeylTable {
    pub fn order(&self) -> u64 {
        (1..=self.n as u64).product()
    }

    pub fn class_index(&self, rho: &Partition) -> Option<usize> {
        self.classes.iter().position(|c| c == rho)
    }

    pub fn char_index(&self, chi: &Partition) -> Option<usize> {
        self.chars.iter().position(|c| c == chi)
    }

    pub fn value(&self, chi: &Partition, rho: &Partition) -> Result<i64> {
        let i = self
            .char_index(chi)
            .ok_or_else(|| Error::InvalidArgument(format!("{chi} is not a character of S_{}", self.n)))?;
        let j = self
            .class_index(rho)
            .ok_or_else(|| Error::InvalidArgument(format!("{rho} is not a class of S_{}", self.n)))?;
        Ok(self.values[i][j])
    }

    pub fn class_size(&self, rho: &Partition) -> u64 {
        self.order() / rho.z()
    }
}

/// `<chi_1 ... chi_m, 1>` over the symmetric group.
pub fn kronecker_mult(chars: &[Partition], table: &WeylTable) -> Result<u64> {
    if let Some(bad) = chars.iter().find(|c| c.size() != table.n) {
        return Err(Error::InvalidArgument(format!("{bad} is not a partition of {}", table.n)));
    }
    let mut total = Rat::zero();
    for j in 0..table.classes.len() {
        let mut prod = BigInt::one();
        for chi in chars {
            let i = table.char_index(chi).expect("checked size");
            prod *= table.values[i][j];
        }
        total += Rat::new(prod, BigInt::from(table.centralizer_orders[j]));
    }
    if !total.is_integer() || total < Rat::zero() {
        return Err(Error::Consistency(format!("Kronecker multiplicity {total} not a natural number")));
    }
    Ok(u64::try_from(total.to_integer()).expect("small multiplicity"))
}

/// Permutation of `0..len` by image list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(pub Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm((0..n).collect())
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn cycle_type(&self) -> Partition {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut parts = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                x = self.0[x];
                len += 1;
            }
            parts.push(len);
        }
        Partition::new(parts)
    }
}

/// Slot layout of the standard permutation with cycle type `lambda`:
/// slot `(i, j)` is `offset[i] + j` and is sent to `(i, j+1 mod lambda_i)`.
#[derive(Clone, Debug)]
pub struct SlotLayout {
    pub lambda: Partition,
    pub offsets: Vec<usize>,
}

impl SlotLayout {
    pub fn new(lambda: &Partition) -> SlotLayout {
        let mut offsets = Vec::with_capacity(lambda.len());
        let mut acc = 0;
        for &p in lambda.parts() {
            offsets.push(acc);
            acc += p;
        }
        SlotLayout { lambda: lambda.clone(), offsets }
    }

    pub fn n(&self) -> usize {
        self.lambda.size()
    }

    pub fn slot(&self, i: usize, j: usize) -> usize {
        self.offsets[i] + j % self.lambda.parts()[i]
    }

    /// `(cycle, position)` of a slot.
    pub fn coords(&self, slot: usize) -> (usize, usize) {
        let i = self.offsets.iter().rposition(|&o| o <= slot).expect("slot in range");
        (i, slot - self.offsets[i])
    }

    pub fn frobenius(&self) -> Perm {
        Perm(
            (0..self.n())
                .map(|s| {
                    let (i, j) = self.coords(s);
                    self.slot(i, j + 1)
                })
                .collect(),
        )
    }

    /// Elements of the centralizer of [`SlotLayout::frobenius`], sorted.
    pub fn centralizer(&self) -> Vec<Perm> {
        let parts = self.lambda.parts();
        let k = parts.len();
        let mut out = Vec::new();
        let mut images = vec![0usize; k];
        let mut used = vec![false; k];
        fn rec(
            layout: &SlotLayout,
            i: usize,
            images: &mut Vec<usize>,
            used: &mut Vec<bool>,
            out: &mut Vec<Vec<usize>>,
        ) {
            let parts = layout.lambda.parts();
            if i == parts.len() {
                out.push(images.clone());
                return;
            }
            for c in 0..parts.len() {
                if !used[c] && parts[c] == parts[i] {
                    used[c] = true;
                    images[i] = c;
                    rec(layout, i + 1, images, used, out);
                    used[c] = false;
                }
            }
        }
        let mut maps = Vec::new();
        rec(self, 0, &mut images, &mut used, &mut maps);
        for pi in maps {
            let mut shifts = vec![0usize; k];
            loop {
                let mut img = vec![0; self.n()];
                for i in 0..k {
                    for j in 0..parts[i] {
                        img[self.slot(i, j)] = self.slot(pi[i], j + shifts[i]);
                    }
                }
                out.push(Perm(img));
                let mut pos = 0;
                while pos < k {
                    shifts[pos] += 1;
                    if shifts[pos] < parts[pos] {
                        break;
                    }
                    shifts[pos] = 0;
                    pos += 1;
                }
                if pos == k {
                    break;
                }
            }
        }
        out.sort();
        out
    }

    /// Cycle map and shifts of a centralizer element: `v(i, 0) = (pi(i), k_i)`.
    pub fn decompose(&self, v: &Perm) -> Result<Vec<(usize, usize)>> {
        if v.0.len() != self.n() || v.compose(&self.frobenius()) != self.frobenius().compose(v) {
            return Err(Error::InvalidArgument("permutation does not centralize the torus class".into()));
        }
        Ok((0..self.lambda.len()).map(|i| self.coords(v.apply(self.slot(i, 0)))).collect())
    }
}

/// Order of the subgroup of `C(w)` preserving every block of `blocks`
/// (a block label per slot).
pub fn centralizer_stabilizer(w_class: &Partition, blocks: &[usize]) -> Result<u64> {
    let layout = SlotLayout::new(w_class);
    if blocks.len() != layout.n() {
        return Err(Error::InvalidArgument(format!("pattern has {} slots, expected {}", blocks.len(), layout.n())));
    }
    let frob = layout.frobenius();
    let mut image: BTreeMap<usize, usize> = BTreeMap::new();
    for s in 0..blocks.len() {
        let t = blocks[frob.apply(s)];
        if *image.entry(blocks[s]).or_insert(t) != t {
            return Err(Error::InvalidArgument("pattern is not Frobenius stable".into()));
        }
    }
    let count =
        layout.centralizer().iter().filter(|v| (0..blocks.len()).all(|s| blocks[v.apply(s)] == blocks[s])).count();
    Ok(count as u64)
}
