//! Element-level model of small `GL_n(q)` for brute-force checks.

use std::collections::BTreeMap;

use super::classes::{ClassLabel, ClassTable};
use super::field::{FieldTower, IrrPoly};
use crate::error::{Error, Result};
use crate::weyl::Partition;

pub const TINY_LIMIT: u128 = 500_000;

/// Square matrix of size at most 3, row-major with stride `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    pub n: usize,
    pub e: [u8; 9],
}

impl Matrix {
    pub fn identity(n: usize) -> Matrix {
        let mut e = [0u8; 9];
        for i in 0..n {
            e[i * n + i] = 1;
        }
        Matrix { n, e }
    }

    pub fn from_rows(rows: &[&[u32]]) -> Matrix {
        let n = rows.len();
        let mut e = [0u8; 9];
        for (i, r) in rows.iter().enumerate() {
            for (j, &x) in r.iter().enumerate() {
                e[i * n + j] = x as u8;
            }
        }
        Matrix { n, e }
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.e[i * self.n + j] as u32
    }

    fn set(&mut self, i: usize, j: usize, v: u32) {
        self.e[i * self.n + j] = v as u8;
    }
}

fn mat_mul(t: &FieldTower, a: &Matrix, b: &Matrix) -> Matrix {
    let f = &t.base;
    let n = a.n;
    let mut out = Matrix { n, e: [0; 9] };
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0;
            for k in 0..n {
                acc = f.add(acc, f.mul(a.get(i, k), b.get(k, j)));
            }
            out.set(i, j, acc);
        }
    }
    out
}

fn rank(t: &FieldTower, m: &Matrix) -> usize {
    let f = &t.base;
    let n = m.n;
    let mut a = *m;
    let mut r = 0;
    for c in 0..n {
        let Some(piv) = (r..n).find(|&i| a.get(i, c) != 0) else {
            continue;
        };
        for j in 0..n {
            let (x, y) = (a.get(r, j), a.get(piv, j));
            a.set(r, j, y);
            a.set(piv, j, x);
        }
        let inv = f.inv(a.get(r, c));
        for i in 0..n {
            if i != r && a.get(i, c) != 0 {
                let factor = f.mul(a.get(i, c), inv);
                for j in 0..n {
                    let v = f.sub(a.get(i, j), f.mul(factor, a.get(r, j)));
                    a.set(i, j, v);
                }
            }
        }
        r += 1;
    }
    r
}

fn inverse(t: &FieldTower, m: &Matrix) -> Option<Matrix> {
    let f = &t.base;
    let n = m.n;
    let mut a = *m;
    let mut b = Matrix::identity(n);
    for c in 0..n {
        let piv = (c..n).find(|&i| a.get(i, c) != 0)?;
        for j in 0..n {
            let (x, y) = (a.get(c, j), a.get(piv, j));
            a.set(c, j, y);
            a.set(piv, j, x);
            let (x, y) = (b.get(c, j), b.get(piv, j));
            b.set(c, j, y);
            b.set(piv, j, x);
        }
        let inv = f.inv(a.get(c, c));
        for j in 0..n {
            a.set(c, j, f.mul(a.get(c, j), inv));
            b.set(c, j, f.mul(b.get(c, j), inv));
        }
        for i in 0..n {
            if i != c && a.get(i, c) != 0 {
                let factor = a.get(i, c);
                for j in 0..n {
                    let v = f.sub(a.get(i, j), f.mul(factor, a.get(c, j)));
                    a.set(i, j, v);
                    let w = f.sub(b.get(i, j), f.mul(factor, b.get(c, j)));
                    b.set(i, j, w);
                }
            }
        }
    }
    Some(b)
}

/// Characteristic polynomial, monic, low-to-high.
fn char_poly(t: &FieldTower, m: &Matrix) -> Vec<u32> {
    let f = &t.base;
    let g = |i, j| m.get(i, j);
    match m.n {
        1 => vec![f.neg(g(0, 0)), 1],
        2 => {
            let tr = f.add(g(0, 0), g(1, 1));
            let det = f.sub(f.mul(g(0, 0), g(1, 1)), f.mul(g(0, 1), g(1, 0)));
            vec![det, f.neg(tr), 1]
        }
        3 => {
            let tr = f.add(f.add(g(0, 0), g(1, 1)), g(2, 2));
            let minor = |a: usize, b: usize| f.sub(f.mul(g(a, a), g(b, b)), f.mul(g(a, b), g(b, a)));
            let c1 = f.add(f.add(minor(0, 1), minor(0, 2)), minor(1, 2));
            let det = {
                let t1 = f.mul(g(0, 0), f.sub(f.mul(g(1, 1), g(2, 2)), f.mul(g(1, 2), g(2, 1))));
                let t2 = f.mul(g(0, 1), f.sub(f.mul(g(1, 0), g(2, 2)), f.mul(g(1, 2), g(2, 0))));
                let t3 = f.mul(g(0, 2), f.sub(f.mul(g(1, 0), g(2, 1)), f.mul(g(1, 1), g(2, 0))));
                f.add(f.sub(t1, t2), t3)
            };
            vec![f.neg(det), c1, f.neg(tr), 1]
        }
        _ => unreachable!("n <= 3"),
    }
}

/// Divides `a` by monic `b` if exact.
fn poly_div_exact(t: &FieldTower, a: &[u32], b: &[u32]) -> Option<Vec<u32>> {
    let f = &t.base;
    let db = b.len() - 1;
    if a.len() <= db {
        return None;
    }
    let mut r = a.to_vec();
    let mut quot = vec![0; a.len() - db];
    for k in (0..quot.len()).rev() {
        let c = r[k + db];
        quot[k] = c;
        for (i, &bi) in b.iter().enumerate() {
            r[k + i] = f.sub(r[k + i], f.mul(c, bi));
        }
    }
    if r[..db].iter().all(|&x| x == 0) {
        Some(quot)
    } else {
        None
    }
}

fn eval_poly_at(t: &FieldTower, poly: &[u32], m: &Matrix) -> Matrix {
    let f = &t.base;
    let n = m.n;
    let mut acc = Matrix { n, e: [0; 9] };
    for &c in poly.iter().rev() {
        acc = mat_mul(t, &acc, m);
        for i in 0..n {
            let v = f.add(acc.get(i, i), c);
            acc.set(i, i, v);
        }
    }
    acc
}

pub struct TinyGroup {
    pub n: usize,
    pub q: u32,
    pub tower: FieldTower,
    pub classes: ClassTable,
    elements: Vec<Matrix>,
    lookup: Vec<u32>,
    class_of: Vec<u32>,
}

impl TinyGroup {
    pub fn new(n: usize, q: u32) -> Result<TinyGroup> {
        let tower = FieldTower::new(q, n.clamp(1, 3))?;
        let classes = ClassTable::build(&tower, n)?;
        if classes.order > TINY_LIMIT {
            return Err(Error::OutOfRange {
                what: "|GL_n(q)|",
                value: classes.order as u64,
                range: "<= 500000 for element-level mode",
            });
        }
        let cells = (q as usize).pow((n * n) as u32);
        let mut elements = Vec::with_capacity(classes.order as usize);
        let mut lookup = vec![u32::MAX; cells];
        for code in 0..cells {
            let mut e = [0u8; 9];
            let mut x = code;
            for slot in e.iter_mut().take(n * n) {
                *slot = (x % q as usize) as u8;
                x /= q as usize;
            }
            let m = Matrix { n, e };
            if rank(&tower, &m) == n {
                lookup[code] = elements.len() as u32;
                elements.push(m);
            }
        }
        if elements.len() as u128 != classes.order {
            return Err(Error::Consistency("invertible matrix count differs from |GL_n(q)|".into()));
        }
        let mut g = TinyGroup { n, q, tower, classes, elements, lookup, class_of: Vec::new() };
        let class_of: Result<Vec<u32>> = g
            .elements
            .iter()
            .map(|m| {
                let label = g.classify(m)?;
                g.classes
                    .index_of(&label)
                    .map(|i| i as u32)
                    .ok_or_else(|| Error::Consistency(format!("unlisted class {label}")))
            })
            .collect();
        g.class_of = class_of?;
        Ok(g)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Matrix] {
        &self.elements
    }

    pub fn class_of(&self, idx: usize) -> usize {
        self.class_of[idx] as usize
    }

    pub fn index_of(&self, m: &Matrix) -> Option<usize> {
        let q = self.q as usize;
        let code = m.e[..self.n * self.n].iter().rev().fold(0usize, |acc, &x| acc * q + x as usize);
        match self.lookup[code] {
            u32::MAX => None,
            i => Some(i as usize),
        }
    }

    pub fn mul(&self, a: &Matrix, b: &Matrix) -> Matrix {
        mat_mul(&self.tower, a, b)
    }

    pub fn inverse(&self, a: &Matrix) -> Option<Matrix> {
        inverse(&self.tower, a)
    }

    /// Elementary divisor label of an invertible matrix.
    pub fn classify(&self, m: &Matrix) -> Result<ClassLabel> {
        let t = &self.tower;
        if m.n != self.n || rank(t, m) != self.n {
            return Err(Error::InvalidArgument("matrix is singular or of the wrong size".into()));
        }
        let mut cp = char_poly(t, m);
        let mut label = BTreeMap::new();
        for d in 1..=self.n {
            for irr in t.irreducibles(d) {
                let phi = irr.poly.coeffs();
                let mut k = 0;
                while let Some(qt) = poly_div_exact(t, &cp, phi) {
                    cp = qt;
                    k += 1;
                }
                if k == 0 {
                    continue;
                }
                let base = eval_poly_at(t, phi, m);
                let mut power = Matrix::identity(self.n);
                let mut prev_null = 0;
                let mut conj = Vec::new();
                for _ in 0..k {
                    power = mat_mul(t, &power, &base);
                    let null = self.n - rank(t, &power);
                    if !(null - prev_null).is_multiple_of(d) {
                        return Err(Error::Consistency("kernel growth not divisible by degree".into()));
                    }
                    if null > prev_null {
                        conj.push((null - prev_null) / d);
                    }
                    prev_null = null;
                }
                let lambda = Partition::new(conj).conjugate();
                if lambda.size() != k {
                    return Err(Error::Consistency("elementary divisors inconsistent".into()));
                }
                label.insert(IrrPoly(phi.to_vec()), lambda);
            }
        }
        if cp.len() != 1 {
            return Err(Error::Consistency("characteristic polynomial did not factor".into()));
        }
        Ok(ClassLabel(label))
    }

    pub fn power_map_indicator(&self, g: &Matrix, m: u128) -> bool {
        let mut acc = Matrix::identity(self.n);
        let mut base = *g;
        let mut e = m;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc == Matrix::identity(self.n)
    }

    fn generators(&self) -> Vec<Matrix> {
        let n = self.n;
        let p = self.tower.p();
        let mut gens = Vec::new();
        let mut basis = vec![1u32];
        while (basis.len() as u32) < self.tower.base.e {
            basis.push(basis.last().unwrap() * p);
        }
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    for &c in &basis {
                        let mut m = Matrix::identity(n);
                        m.set(i, j, c);
                        gens.push(m);
                    }
                }
            }
        }
        let mut d = Matrix::identity(n);
        d.set(0, 0, self.tower.ext(1).generator);
        gens.push(d);
        gens
    }

    /// Orbit id per element under conjugation, via union-find on generators.
    pub fn conjugacy_orbits(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.order()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let gens: Vec<(Matrix, Matrix)> =
            self.generators().into_iter().map(|h| (h, self.inverse(&h).unwrap())).collect();
        for (i, g) in self.elements.iter().enumerate() {
            for (h, hi) in &gens {
                let c = self.mul(&self.mul(h, g), hi);
                let j = self.index_of(&c).expect("conjugate is invertible");
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        (0..self.order()).map(|i| find(&mut parent, i)).collect()
    }

    /// Elements of the class with index `class` in [`TinyGroup::classes`].
    pub fn representative(&self, class: usize) -> Option<&Matrix> {
        self.class_of.iter().position(|&c| c as usize == class).map(|i| &self.elements[i])
    }

    /// For a class representative `g`, counts `x` with `x g x^{-1}` upper
    /// triangular, keyed by the discrete logs of that diagonal.
    pub fn borel_diagonal_counts(&self, class: usize) -> BTreeMap<Vec<u64>, u64> {
        let g = *self.representative(class).expect("class is nonempty");
        let n = self.n;
        let mut out = BTreeMap::new();
        for x in &self.elements {
            let xi = self.inverse(x).unwrap();
            let y = self.mul(&self.mul(x, &g), &xi);
            if (0..n).all(|i| (0..i).all(|j| y.get(i, j) == 0)) {
                let diag: Vec<u64> =
                    (0..n).map(|i| self.tower.log_base(y.get(i, i)).expect("invertible diagonal")).collect();
                *out.entry(diag).or_insert(0) += 1;
            }
        }
        out
    }

    /// Order of the upper triangular Borel subgroup.
    pub fn borel_order(&self) -> u128 {
        let q = self.q as u128;
        (q - 1).pow(self.n as u32) * q.pow((self.n * (self.n - 1) / 2) as u32)
    }
}
