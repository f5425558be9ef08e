use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::glnq::gl_order;
use crate::group::{Gln, TorusEntry};
use crate::scalar::{rat_string, Rat};
use crate::torus::{Node, TorusChar, TypeLabel};
use crate::weyl::{build_table, Partition};

/// `<U_{chi_1} x ... x U_{chi_m} x R_{T_w}(theta_1) x ... x R_{T_w}(theta_k), 1>`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultiplicityQuery {
    pub n: usize,
    pub q: u64,
    pub chars: Vec<Partition>,
    pub torus: Partition,
    pub thetas: Vec<TorusChar>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TypeTerm {
    pub label: String,
    #[serde(serialize_with = "ser_rat")]
    pub value: Rat,
}

#[derive(Clone, Debug, Serialize)]
pub struct MultiplicityResult {
    #[serde(serialize_with = "ser_rat")]
    pub value: Rat,
    pub breakdown: Vec<TypeTerm>,
}

pub(crate) fn ser_rat<S: serde::Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rat_string(r))
}

impl MultiplicityQuery {
    fn validate(&self, g: &Gln) -> Result<()> {
        if self.n != g.n || self.q != g.q {
            return Err(Error::ContextMismatch(format!(
                "query for GL_{}({}) evaluated in GL_{}({})",
                self.n, self.q, g.n, g.q
            )));
        }
        if self.chars.is_empty() && self.thetas.is_empty() {
            return Err(Error::InvalidArgument("need at least one character".into()));
        }
        for c in &self.chars {
            if g.weyl.char_index(c).is_none() {
                return Err(Error::InvalidArgument(format!("{c} is not a character of S_{}", g.n)));
            }
        }
        if self.torus.size() != g.n {
            return Err(Error::InvalidArgument(format!("torus {} is not a cycle type of S_{}", self.torus, g.n)));
        }
        Ok(())
    }
}

/// Distinct ways of attaching the unipotent parts of `label` to the block
/// orbits of `node`, as one partition per orbit.
fn assignments(node: &Node, label: &TypeLabel) -> Vec<Vec<Partition>> {
    let mut out = BTreeSet::new();
    let k = node.orbits.len();
    if k != label.factors.len() {
        return Vec::new();
    }
    fn rec(
        node: &Node,
        label: &TypeLabel,
        used: &mut Vec<bool>,
        cur: &mut Vec<Partition>,
        out: &mut BTreeSet<Vec<Partition>>,
    ) {
        let j = cur.len();
        if j == node.orbits.len() {
            out.insert(cur.clone());
            return;
        }
        let o = &node.orbits[j];
        for (i, f) in label.factors.iter().enumerate() {
            if !used[i] && f.d == o.d && f.m == o.m {
                used[i] = true;
                cur.push(f.mu.clone());
                rec(node, label, used, cur, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    rec(node, label, &mut vec![false; k], &mut Vec::new(), &mut out);
    out.into_iter().collect()
}

fn green_at(g: &Gln, node: &Node, mu: &[Partition]) -> Result<BigInt> {
    let mut acc = BigInt::one();
    for (o, m) in node.orbits.iter().zip(mu) {
        let qd = BigInt::from(g.q).pow(o.d as u32);
        acc *= g.green.table(o.m)?.value(m, &o.kappa, &qd)?;
    }
    Ok(acc)
}

/// `sum over coset tuples (v_1..v_k) of sum_{N' >= N} mu(N, N') delta(prod v_j theta_j, N')`.
fn coset_sum(entry: &TorusEntry, node: usize, thetas: &[TorusChar]) -> Result<i64> {
    let t = &entry.datum;
    let cosets = &entry.poset.nodes[node].cosets;
    let moved: Vec<Vec<TorusChar>> = thetas
        .iter()
        .map(|th| cosets.iter().map(|v| t.weyl_act(v, th)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let mut idx = vec![0usize; thetas.len()];
    let mut total = 0i64;
    loop {
        let pick: Vec<TorusChar> = idx.iter().zip(&moved).map(|(&i, m)| m[i].clone()).collect();
        total += entry.poset.mobius_delta(t, &t.product_char(&pick), node);
        let mut j = 0;
        loop {
            if j == idx.len() {
                return Ok(total);
            }
            idx[j] += 1;
            if idx[j] < cosets.len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

fn u_product(g: &Gln, chars: &[Partition], type_idx: usize) -> Result<BigInt> {
    let mut acc = BigInt::one();
    for c in chars {
        acc *= g.u_value(c, type_idx)?;
    }
    Ok(acc)
}

/// The closed type-sum formula for the multiplicity.
pub fn closed_multiplicity(g: &Gln, query: &MultiplicityQuery) -> Result<MultiplicityResult> {
    query.validate(g)?;
    if g.q <= g.n as u64 + 1 {
        return Err(Error::Precondition(format!("closed formula needs q > n + 1, got q = {}", g.q)));
    }
    if query.thetas.is_empty() {
        return u_only(g, &query.chars);
    }
    let entry = g.torus(&query.torus)?;
    for th in &query.thetas {
        entry.datum.check_char(th)?;
    }
    let w_order = entry.datum.weyl_group().len() as u64;
    let k = query.thetas.len() as u32;
    let mut sums: HashMap<usize, i64> = HashMap::new();
    let mut value = Rat::zero();
    let mut breakdown = Vec::new();
    for (ti, rec) in g.types.iter().enumerate() {
        let shape = rec.label.shape();
        let members: Vec<usize> = (0..entry.poset.len()).filter(|&i| entry.poset.nodes[i].shape == shape).collect();
        if members.is_empty() {
            continue;
        }
        let u = u_product(g, &query.chars, ti)?;
        if u.is_zero() {
            continue;
        }
        let mut inner = BigInt::zero();
        for &ni in &members {
            let node = &entry.poset.nodes[ni];
            let cs = match sums.get(&ni) {
                Some(&c) => c,
                None => {
                    let c = coset_sum(&entry, ni, &query.thetas)?;
                    sums.insert(ni, c);
                    c
                }
            };
            if cs == 0 {
                continue;
            }
            for mu in assignments(node, &rec.label) {
                let qv = green_at(g, node, &mu)?;
                inner += BigInt::from(node.stabilizer) * qv.pow(k) * cs;
            }
        }
        if inner.is_zero() {
            continue;
        }
        let term = Rat::new(u * inner, BigInt::from(w_order) * BigInt::from(rec.centralizer));
        value += &term;
        breakdown.push(TypeTerm { label: rec.label.to_string(), value: term });
    }
    Ok(MultiplicityResult { value, breakdown })
}

/// `<U_{chi_1} x ... x U_{chi_m}, 1>` as a sum over types.
pub fn u_only(g: &Gln, chars: &[Partition]) -> Result<MultiplicityResult> {
    if chars.is_empty() {
        return Err(Error::InvalidArgument("need at least one character".into()));
    }
    let mut value = Rat::zero();
    let mut breakdown = Vec::new();
    for (ti, rec) in g.types.iter().enumerate() {
        let u = u_product(g, chars, ti)?;
        if u.is_zero() {
            continue;
        }
        let term = Rat::new(u * BigInt::from(rec.fiber), BigInt::from(g.order()));
        value += &term;
        breakdown.push(TypeTerm { label: rec.label.to_string(), value: term });
    }
    Ok(MultiplicityResult { value, breakdown })
}

/// `(1/|G|) sum over regular semisimple types [T_w, 1] of |fiber| prod_i chi_i(w)`.
pub fn torus_part_sum(g: &Gln, chars: &[Partition]) -> Result<Rat> {
    let mut acc = Rat::zero();
    for rec in &g.types {
        let Some(w) = rec.label.torus_class() else { continue };
        let mut prod = BigInt::from(rec.fiber);
        for c in chars {
            prod *= g.weyl.value(c, &w)?;
        }
        acc += Rat::new(prod, BigInt::one());
    }
    Ok(acc / Rat::from_integer(BigInt::from(g.order())))
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitReport {
    #[serde(serialize_with = "ser_rat")]
    pub closed: Rat,
    #[serde(serialize_with = "ser_rat")]
    pub split_expression: Rat,
    pub equal: bool,
}

/// Evaluates the split torus expression that keeps only semisimple types and
/// writes `U_chi(s)` through restriction multiplicities, next to the closed formula.
pub fn split_case_check(g: &Gln, chars: &[Partition], thetas: &[TorusChar]) -> Result<SplitReport> {
    let split = Partition::column(g.n);
    let query =
        MultiplicityQuery { n: g.n, q: g.q, chars: chars.to_vec(), torus: split.clone(), thetas: thetas.to_vec() };
    let closed = closed_multiplicity(g, &query)?.value;
    let entry = g.torus(&split)?;
    for th in thetas {
        entry.datum.check_char(th)?;
    }
    let w_order = entry.datum.weyl_group().len() as u64;
    let tables = (1..=g.n).map(build_table).collect::<Result<Vec<_>>>()?;
    let mut total = Rat::zero();
    let mut seen = BTreeSet::new();
    for ni in 0..entry.poset.len() {
        let node = &entry.poset.nodes[ni];
        if !seen.insert(node.shape.clone()) {
            continue;
        }
        // dim U_psi^L for psi = (psi_j) and the restriction multiplicities
        let factors: Vec<usize> = node.shape.factors.iter().map(|&(m, _)| m).collect();
        let mut per_char = Vec::with_capacity(chars.len());
        for chi in chars {
            let mut s = Rat::zero();
            for psi in product_of_partitions(&factors) {
                let mult = restriction_mult(g, &tables, chi, &psi)?;
                if mult.is_zero() {
                    continue;
                }
                let mut dim = Rat::one();
                for (m, p) in factors.iter().zip(&psi) {
                    dim *= unipotent_degree(g, &tables[m - 1], p, *m)?;
                }
                s += mult * dim;
            }
            per_char.push(s);
        }
        let levi: u128 = node.shape.factors.iter().map(|&(m, d)| gl_order(m, g.q.pow(d as u32))).product();
        let mut inner = BigInt::zero();
        for mi in (0..entry.poset.len()).filter(|&i| entry.poset.nodes[i].shape == node.shape) {
            let member = &entry.poset.nodes[mi];
            let ones: Vec<Partition> = member.orbits.iter().map(|o| Partition::column(o.m)).collect();
            let qv = green_at(g, member, &ones)?;
            inner += BigInt::from(member.stabilizer) * qv.pow(thetas.len() as u32) * coset_sum(&entry, mi, thetas)?;
        }
        let mut term = Rat::new(inner, BigInt::from(w_order) * BigInt::from(levi));
        for s in per_char {
            term *= s;
        }
        total += term;
    }
    let equal = total == closed;
    Ok(SplitReport { closed, split_expression: total, equal })
}

fn product_of_partitions(sizes: &[usize]) -> Vec<Vec<Partition>> {
    let mut out = vec![Vec::new()];
    for &m in sizes {
        let mut next = Vec::new();
        for prefix in &out {
            for p in Partition::all(m) {
                let mut v: Vec<Partition> = prefix.clone();
                v.push(p);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// `<Res chi, psi_1 x ... x psi_k>` over `S_{m_1} x ... x S_{m_k}`.
fn restriction_mult(g: &Gln, tables: &[crate::weyl::WeylTable], chi: &Partition, psi: &[Partition]) -> Result<Rat> {
    let sizes: Vec<usize> = psi.iter().map(|p| p.size()).collect();
    let mut acc = Rat::zero();
    for kappa in product_of_partitions(&sizes) {
        let rho = Partition::union(kappa.iter().flat_map(|k| k.parts().to_vec()));
        let mut num = BigInt::from(g.weyl.value(chi, &rho)?);
        let mut den = BigInt::one();
        for (p, k) in psi.iter().zip(&kappa) {
            num *= tables[p.size() - 1].value(p, k)?;
            den *= k.z();
        }
        acc += Rat::new(num, den);
    }
    Ok(acc)
}

/// `U_psi(1)` in `GL_m(q)`.
fn unipotent_degree(g: &Gln, table: &crate::weyl::WeylTable, psi: &Partition, m: usize) -> Result<Rat> {
    let qb = BigInt::from(g.q);
    let mut acc = Rat::zero();
    for kappa in Partition::all(m) {
        let qv = g.green.table(m)?.value(&Partition::column(m), &kappa, &qb)?;
        acc += Rat::new(BigInt::from(table.value(psi, &kappa)?) * qv, BigInt::from(kappa.z()));
    }
    Ok(acc)
}
