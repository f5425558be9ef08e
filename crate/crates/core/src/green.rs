//! Green polynomials of `GL_m` from Hall-Littlewood functions.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{rat_int, QPolynomial, Rat};
use crate::weyl::{build_table, Partition};

pub const MAX_GREEN_M: usize = 4;

/// Rational form `prod_j GL_{m_j}(q^{d_j})`, factors sorted by `(d, m)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LeviShape {
    /// `(m_j, d_j)` pairs.
    pub factors: Vec<(usize, usize)>,
}

impl LeviShape {
    pub fn new(mut factors: Vec<(usize, usize)>) -> Result<LeviShape> {
        if factors.iter().any(|&(m, d)| m == 0 || d == 0) {
            return Err(Error::InvalidArgument("Levi factors need m, d >= 1".into()));
        }
        factors.sort_by_key(|&(m, d)| (d, m));
        Ok(LeviShape { factors })
    }

    pub fn n(&self) -> usize {
        self.factors.iter().map(|(m, d)| m * d).sum()
    }

    pub fn is_torus(&self) -> bool {
        self.factors.iter().all(|&(m, _)| m == 1)
    }

    /// `|L^F|_p = prod q^{d m (m-1) / 2}` as an exponent of `q`.
    pub fn p_part_exponent(&self) -> usize {
        self.factors.iter().map(|&(m, d)| d * m * (m - 1) / 2).sum()
    }

    pub fn sign(&self) -> i64 {
        let s: usize = self.factors.iter().map(|(m, _)| m).sum();
        if s.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

impl fmt::Display for LeviShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|(m, d)| format!("GL{m}(q^{d})")).collect();
        f.write_str(&parts.join("x"))
    }
}

type Poly = QPolynomial;

fn t_poly() -> Poly {
    Poly::from_ints(&[0, 1])
}

/// `prod_{j=1}^r (1 - t^j) / (1 - t)`.
fn v_r(r: usize) -> Poly {
    let mut acc = Poly::one();
    for j in 1..=r {
        let mut c = vec![0i64; j];
        c.iter_mut().for_each(|x| *x = 1);
        acc = &acc * &Poly::from_ints(&c);
    }
    acc
}

/// Coefficients of `P_lambda` in the Schur basis, using `m = |lambda|` variables.
fn hall_littlewood_schur(lambda: &Partition, m: usize) -> Result<BTreeMap<Partition, Poly>> {
    let mut start = lambda.parts().to_vec();
    start.resize(m, 0);
    let mut f: HashMap<Vec<usize>, Poly> = HashMap::new();
    f.insert(start, Poly::one());
    let minus_t = -&t_poly();
    for i in 0..m {
        for j in i + 1..m {
            let mut next: HashMap<Vec<usize>, Poly> = HashMap::new();
            for (mono, c) in &f {
                let mut a = mono.clone();
                a[i] += 1;
                let e = next.entry(a).or_default();
                *e = &*e + c;
                let mut b = mono.clone();
                b[j] += 1;
                let e = next.entry(b).or_default();
                *e = &*e + &(c * &minus_t);
            }
            f = next;
        }
    }
    let mut anti: BTreeMap<Vec<usize>, Poly> = BTreeMap::new();
    for (mono, c) in f {
        let mut idx: Vec<usize> = (0..m).collect();
        idx.sort_by(|&a, &b| mono[b].cmp(&mono[a]));
        let beta: Vec<usize> = idx.iter().map(|&k| mono[k]).collect();
        if beta.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        let mut inversions = 0;
        for a in 0..m {
            for b in a + 1..m {
                if idx[a] > idx[b] {
                    inversions += 1;
                }
            }
        }
        let signed = if inversions % 2 == 0 { c } else { -&c };
        let e = anti.entry(beta).or_default();
        *e = &*e + &signed;
    }
    let mut v = Poly::one();
    let mut mult = lambda.multiplicities();
    mult.insert(0, m - lambda.len());
    for &r in mult.values() {
        v = &v * &v_r(r);
    }
    let mut out = BTreeMap::new();
    for (beta, c) in anti {
        if c.is_zero() {
            continue;
        }
        let nu = Partition::new(beta.iter().enumerate().map(|(i, &b)| b - (m - 1 - i)).collect());
        out.insert(nu, c.div_exact(&v)?);
    }
    Ok(out)
}

/// Kostka-Foulkes matrix `K[nu][lambda]` with `s_nu = sum_lambda K P_lambda`.
pub fn kostka_foulkes(m: usize) -> Result<BTreeMap<(Partition, Partition), Poly>> {
    let parts = Partition::all(m);
    let k = parts.len();
    let mut mat = vec![vec![Poly::zero(); k]; k];
    for (i, lambda) in parts.iter().enumerate() {
        let row = hall_littlewood_schur(lambda, m)?;
        for (nu, c) in row {
            let j = parts.iter().position(|p| *p == nu).expect("partition of m");
            mat[i][j] = c;
        }
    }
    for i in 0..k {
        if mat[i][i] != Poly::one() || (0..i).any(|j| !mat[i][j].is_zero()) {
            return Err(Error::Consistency("Hall-Littlewood transition is not unitriangular".into()));
        }
    }
    // inverse of an upper unitriangular matrix
    let mut inv = vec![vec![Poly::zero(); k]; k];
    for i in (0..k).rev() {
        inv[i][i] = Poly::one();
        for j in i + 1..k {
            let mut acc = Poly::zero();
            for l in i + 1..=j {
                acc = &acc + &(&mat[i][l] * &inv[l][j]);
            }
            inv[i][j] = -&acc;
        }
    }
    let mut out = BTreeMap::new();
    for (i, nu) in parts.iter().enumerate() {
        for (j, lambda) in parts.iter().enumerate() {
            out.insert((nu.clone(), lambda.clone()), inv[i][j].clone());
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct GreenTable {
    pub m: usize,
    /// `(lambda unipotent, rho torus) -> Q^lambda_rho(t)`.
    pub entries: BTreeMap<(Partition, Partition), Poly>,
    pub transposed: bool,
}

fn gl_p_prime(m: usize, q: &BigInt) -> BigInt {
    (1..=m as u32).map(|i| q.pow(i) - 1).product()
}

impl GreenTable {
    pub fn get(&self, lambda: &Partition, rho: &Partition) -> Result<&Poly> {
        self.entries.get(&(lambda.clone(), rho.clone())).ok_or_else(|| {
            Error::InvalidArgument(format!("no Green polynomial for ({lambda}, {rho}) with m = {}", self.m))
        })
    }

    pub fn value(&self, lambda: &Partition, rho: &Partition, q: &BigInt) -> Result<BigInt> {
        let v = self.get(lambda, rho)?.eval(&Rat::from_integer(q.clone()));
        Ok(v.to_integer())
    }

    fn check_identities(&self) -> bool {
        let col = Partition::column(self.m);
        let row = Partition::row(self.m);
        for q in [3i64, 5, 7] {
            let qb = BigInt::from(q);
            for rho in Partition::all(self.m) {
                let sign = if (self.m + rho.len()).is_multiple_of(2) { 1 } else { -1 };
                let torus: BigInt = rho.parts().iter().map(|&r| qb.pow(r as u32) - 1).product();
                let expect = Rat::new(gl_p_prime(self.m, &qb) * sign, torus);
                let Ok(got) = self.get(&col, &rho) else { return false };
                if got.eval(&rat_int(q)) != expect {
                    return false;
                }
                let Ok(reg) = self.get(&row, &rho) else { return false };
                if reg.eval(&rat_int(q)) != Rat::one() {
                    return false;
                }
            }
        }
        true
    }
}

pub fn green_table(m: usize) -> Result<GreenTable> {
    if !(1..=MAX_GREEN_M).contains(&m) {
        return Err(Error::OutOfRange { what: "m", value: m as u64, range: "1..=4" });
    }
    let kf = kostka_foulkes(m)?;
    let chars = build_table(m)?;
    let parts = Partition::all(m);
    let mut entries = BTreeMap::new();
    for lambda in &parts {
        for rho in &parts {
            let mut x = Poly::zero();
            for nu in &parts {
                let chi = chars.value(nu, rho)?;
                x = &x + &kf[&(nu.clone(), lambda.clone())].scale(&rat_int(chi));
            }
            let qpoly = x
                .reciprocal(lambda.n_value())
                .ok_or_else(|| Error::Consistency(format!("X^{lambda}_{rho} has degree above n(lambda)")))?;
            if !qpoly.is_integral() {
                return Err(Error::Consistency("Green polynomial with fractional coefficients".into()));
            }
            entries.insert((lambda.clone(), rho.clone()), qpoly);
        }
    }
    let table = GreenTable { m, entries, transposed: false };
    if table.check_identities() {
        return Ok(table);
    }
    let flipped: BTreeMap<_, _> =
        table.entries.iter().map(|((l, r), p)| ((l.conjugate(), r.clone()), p.clone())).collect();
    let table = GreenTable { m, entries: flipped, transposed: true };
    if table.check_identities() {
        return Ok(table);
    }
    Err(Error::Consistency(format!("Green table for m = {m} fails its identities")))
}

/// Green tables for `GL_1` through `GL_max`.
#[derive(Clone, Debug)]
pub struct GreenTables {
    tables: Vec<GreenTable>,
}

impl GreenTables {
    pub fn new(max: usize) -> Result<GreenTables> {
        Ok(GreenTables { tables: (1..=max).map(green_table).collect::<Result<_>>()? })
    }

    pub fn table(&self, m: usize) -> Result<&GreenTable> {
        self.tables.get(m.wrapping_sub(1)).ok_or(Error::OutOfRange {
            what: "m",
            value: m as u64,
            range: "within the built tables",
        })
    }

    /// `prod_j Q^{mu_j}_{kappa_j}(q^{d_j})`.
    pub fn green_value(&self, shape: &LeviShape, kappa: &[Partition], mu: &[Partition], q: u64) -> Result<BigInt> {
        if kappa.len() != shape.factors.len() || mu.len() != shape.factors.len() {
            return Err(Error::InvalidArgument("one torus and one unipotent partition per factor".into()));
        }
        let mut acc = BigInt::one();
        for (j, &(m, d)) in shape.factors.iter().enumerate() {
            if kappa[j].size() != m || mu[j].size() != m {
                return Err(Error::InvalidArgument(format!("partition sizes differ from m = {m}")));
            }
            let qd = BigInt::from(q).pow(d as u32);
            acc *= self.table(m)?.value(&mu[j], &kappa[j], &qd)?;
        }
        Ok(acc)
    }

    /// Tuples `kappa_j |- m_j` whose scaled union `d_j kappa_j` is `w`;
    /// empty when no torus of type `w` lies in the shape.
    pub fn torus_embeddings(shape: &LeviShape, w: &Partition) -> Vec<Vec<Partition>> {
        let mut out = Vec::new();
        fn rec(
            shape: &LeviShape,
            j: usize,
            cur: &mut Vec<Partition>,
            parts: &mut Vec<usize>,
            w: &Partition,
            out: &mut Vec<Vec<Partition>>,
        ) {
            if j == shape.factors.len() {
                if Partition::new(parts.clone()) == *w {
                    out.push(cur.clone());
                }
                return;
            }
            let (m, d) = shape.factors[j];
            for kappa in Partition::all(m) {
                let added: Vec<usize> = kappa.parts().iter().map(|p| p * d).collect();
                parts.extend(&added);
                cur.push(kappa);
                rec(shape, j + 1, cur, parts, w, out);
                cur.pop();
                parts.truncate(parts.len() - added.len());
            }
        }
        rec(shape, 0, &mut Vec::new(), &mut Vec::new(), w, &mut out);
        out
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["m", "lambda", "rho", "coefficients"])?;
        for t in &self.tables {
            for ((l, r), p) in &t.entries {
                let coeffs: Vec<String> = p.coeffs().iter().map(|c| c.to_string()).collect();
                wr.write_record([t.m.to_string(), l.csv(), r.csv(), coeffs.join(" ")])?;
            }
        }
        wr.flush()?;
        Ok(())
    }
}

/// `<U, 1>`-style weight: Steinberg degree check helper, `q^{m(m-1)/2}`.
pub fn steinberg_average(table: &GreenTable, q: i64) -> Result<Rat> {
    let m = table.m;
    let col = Partition::column(m);
    let fact: i64 = (1..=m as i64).product();
    let mut acc = Rat::zero();
    for rho in Partition::all(m) {
        let size = fact / rho.z() as i64;
        let v = table.get(&col, &rho)?.eval(&rat_int(q));
        acc += v * rat_int(size * rho.sign());
    }
    Ok(acc / rat_int(fact))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    /// t-analogue of Kostant's partition function for type A_{m-1}.
    fn kostant(gamma: &[i64], memo: &mut HashMap<Vec<i64>, Poly>) -> Poly {
        let m = gamma.len();
        let roots: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
        fn in_cone(g: &[i64]) -> bool {
            let mut s = 0;
            for &x in g {
                s += x;
                if s < 0 {
                    return false;
                }
            }
            s == 0
        }
        fn rec(g: &mut Vec<i64>, idx: usize, roots: &[(usize, usize)], memo: &mut HashMap<Vec<i64>, Poly>) -> Poly {
            if !in_cone(g) {
                return Poly::zero();
            }
            if idx == roots.len() {
                return if g.iter().all(|&x| x == 0) { Poly::one() } else { Poly::zero() };
            }
            let mut key = g.clone();
            key.push(idx as i64);
            if let Some(v) = memo.get(&key) {
                return v.clone();
            }
            let (i, j) = roots[idx];
            let mut acc = Poly::zero();
            let mut k = 0usize;
            let saved = g.clone();
            while in_cone(g) {
                let sub = rec(g, idx + 1, roots, memo);
                acc = &acc + &(&Poly::monomial(Rat::one(), k) * &sub);
                g[i] -= 1;
                g[j] += 1;
                k += 1;
            }
            *g = saved;
            memo.insert(key, acc.clone());
            acc
        }
        let mut g = gamma.to_vec();
        rec(&mut g, 0, &roots, memo)
    }

    fn perms(m: usize) -> Vec<Vec<usize>> {
        if m == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(m - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, m - 1);
                out.push(q);
            }
        }
        out
    }

    fn sign(p: &[usize]) -> i64 {
        let mut inv = 0;
        for a in 0..p.len() {
            for b in a + 1..p.len() {
                if p[a] > p[b] {
                    inv += 1;
                }
            }
        }
        if inv % 2 == 0 {
            1
        } else {
            -1
        }
    }

    fn padded(l: &Partition, m: usize) -> Vec<i64> {
        let mut v: Vec<i64> = l.parts().iter().map(|&x| x as i64).collect();
        v.resize(m, 0);
        v
    }

    #[test]
    fn kostka_foulkes_matches_q_kostant_formula() {
        for m in 1..=4 {
            let kf = kostka_foulkes(m).unwrap();
            let mut memo = HashMap::new();
            for lambda in Partition::all(m) {
                for mu in Partition::all(m) {
                    let l = padded(&lambda, m);
                    let u = padded(&mu, m);
                    let mut acc = Poly::zero();
                    for w in perms(m) {
                        // w(lambda + delta) - (mu + delta)
                        let ld: Vec<i64> = (0..m).map(|i| l[i] + (m - 1 - i) as i64).collect();
                        let g: Vec<i64> = (0..m).map(|i| ld[w[i]] - u[i] - (m - 1 - i) as i64).collect();
                        let k = kostant(&g, &mut memo);
                        acc = &acc + &k.scale(&rat_int(sign(&w)));
                    }
                    assert_eq!(kf[&(lambda.clone(), mu.clone())], acc, "K_{lambda},{mu}");
                }
            }
        }
    }

    #[test]
    fn gl2_entries() {
        let t = green_table(2).unwrap();
        assert_eq!(t.get(&p("1,1"), &p("1,1")).unwrap(), &Poly::from_ints(&[1, 1]));
        assert_eq!(t.get(&p("1,1"), &p("2")).unwrap(), &Poly::from_ints(&[1, -1]));
        assert_eq!(t.get(&p("2"), &p("1,1")).unwrap(), &Poly::one());
        assert!(!t.transposed);
    }

    #[test]
    fn tables_satisfy_identities_and_steinberg_average() {
        for m in 1..=4 {
            let t = green_table(m).unwrap();
            assert!(t.check_identities());
            if m <= 3 {
                for q in [3i64, 5] {
                    assert_eq!(steinberg_average(&t, q).unwrap(), rat_int(q.pow((m * (m - 1) / 2) as u32)));
                }
            }
        }
        assert!(green_table(5).is_err());
        assert!(green_table(0).is_err());
    }

    #[test]
    fn green_value_examples() {
        let g = GreenTables::new(3).unwrap();
        let s = LeviShape::new(vec![(2, 1)]).unwrap();
        assert_eq!(g.green_value(&s, &[p("1,1")], &[p("1,1")], 5).unwrap(), BigInt::from(6));
        let torus = LeviShape::new(vec![(1, 1), (1, 1)]).unwrap();
        assert_eq!(g.green_value(&torus, &[p("1"), p("1")], &[p("1"), p("1")], 7).unwrap(), BigInt::one());
        let cox = LeviShape::new(vec![(1, 2)]).unwrap();
        assert_eq!(g.green_value(&cox, &[p("1")], &[p("1")], 3).unwrap(), BigInt::one());
        assert!(g.green_value(&s, &[p("1")], &[p("1,1")], 5).is_err());
    }

    #[test]
    fn embeddings() {
        let s = LeviShape::new(vec![(2, 1), (1, 1)]).unwrap();
        assert_eq!(GreenTables::torus_embeddings(&s, &p("2,1")), vec![vec![p("1"), p("2")]]);
        assert!(GreenTables::torus_embeddings(&s, &p("3")).is_empty());
        let c = LeviShape::new(vec![(1, 3)]).unwrap();
        assert_eq!(GreenTables::torus_embeddings(&c, &p("3")).len(), 1);
    }
}
