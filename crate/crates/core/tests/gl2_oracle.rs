//! Multiplicities for GL_2(p), p prime, recomputed from the textbook
//! character values of GL_2 on explicit matrices.

use std::collections::HashMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use num_traits::ToPrimitive;

use dlmult::formulas::{closed_multiplicity, MultiplicityQuery};
use dlmult::group::Gln;
use dlmult::torus::TorusChar;
use dlmult::weyl::Partition;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Kind {
    Scalar(u64),
    Unipotent(u64),
    Split(u64, u64),
    /// `log` of one eigenvalue in `F_{p^2}^x`, the smaller of the pair.
    Elliptic(u64),
}

struct Gl2 {
    p: u64,
    nonresidue: u64,
    /// log in `F_p^x`, indexed by element
    log1: Vec<u64>,
    /// log in `F_{p^2}^x`, indexed by `a + b p` for `a + b x`, `x^2 = nonresidue`
    log2: Vec<u64>,
    classes: Vec<(Kind, u64)>,
    order: u64,
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

impl Gl2 {
    fn new(p: u64) -> Gl2 {
        let is_square = |a: u64| pow_mod(a, (p - 1) / 2, p) == 1;
        let nonresidue = (2..p).find(|&a| !is_square(a)).unwrap();
        let g1 = (2..p).find(|&g| (1..p - 1).all(|e| pow_mod(g, e, p) != 1)).unwrap();
        let mut log1 = vec![0; p as usize];
        let mut x = 1;
        for e in 0..p - 1 {
            log1[x as usize] = e;
            x = x * g1 % p;
        }
        let mul = |(a, b): (u64, u64), (c, d): (u64, u64)| ((a * c + b * d % p * nonresidue) % p, (a * d + b * c) % p);
        let n2 = p * p - 1;
        let mut log2 = vec![u64::MAX; (p * p) as usize];
        'search: for a in 0..p {
            for b in 1..p {
                let mut y = (1, 0);
                let mut seen = 0;
                for e in 0..n2 {
                    if e > 0 && y == (1, 0) {
                        continue 'search;
                    }
                    log2[(y.0 + y.1 * p) as usize] = e;
                    seen += 1;
                    y = mul(y, (a, b));
                }
                if seen == n2 {
                    break 'search;
                }
            }
        }
        let inv2 = p.div_ceil(2);
        let mut counts: HashMap<Kind, u64> = HashMap::new();
        let mut order = 0;
        for a in 0..p {
            for b in 0..p {
                for c in 0..p {
                    for d in 0..p {
                        let det = (a * d + p * p - b * c % p) % p;
                        if det == 0 {
                            continue;
                        }
                        order += 1;
                        let t = (a + d) % p;
                        let disc = (t * t + 4 * p * p - 4 * det) % p;
                        let kind = if disc == 0 {
                            let l = log1[(t * inv2 % p) as usize];
                            if b == 0 && c == 0 {
                                Kind::Scalar(l)
                            } else {
                                Kind::Unipotent(l)
                            }
                        } else if is_square(disc) {
                            let s = (1..p).find(|s| s * s % p == disc).unwrap();
                            let r1 = (t + s) * inv2 % p;
                            let r2 = (t + p - s) * inv2 % p;
                            let (x, y) = (log1[r1 as usize], log1[r2 as usize]);
                            Kind::Split(x.min(y), x.max(y))
                        } else {
                            let target = disc * pow_mod(nonresidue, p - 2, p) % p;
                            let s = (1..p).find(|s| s * s % p == target).unwrap();
                            let e = log2[((t * inv2 % p) + (s * inv2 % p) * p) as usize];
                            Kind::Elliptic(e.min(e * p % n2))
                        };
                        *counts.entry(kind).or_default() += 1;
                    }
                }
            }
        }
        let mut classes: Vec<(Kind, u64)> = counts.into_iter().collect();
        classes.sort_by_key(|c| format!("{:?}", c.0));
        Gl2 { p, nonresidue, log1, log2, classes, order }
    }

    fn base_log2(&self, l1: u64) -> u64 {
        let g1 = (0..self.p).find(|&x| self.log1[x as usize] == l1 && x != 0).unwrap();
        self.log2[g1 as usize]
    }

    fn split(&self, k: (u64, u64), kind: Kind) -> Complex64 {
        let z = |e: u64| Complex64::from_polar(1.0, TAU * (e % (self.p - 1)) as f64 / (self.p - 1) as f64);
        let q = self.p as f64;
        match kind {
            Kind::Scalar(l) => z((k.0 + k.1) * l) * (q + 1.0),
            Kind::Unipotent(l) => z((k.0 + k.1) * l),
            Kind::Split(x, y) => z(k.0 * x + k.1 * y) + z(k.0 * y + k.1 * x),
            Kind::Elliptic(_) => Complex64::new(0.0, 0.0),
        }
    }

    fn coxeter(&self, k: u64, kind: Kind) -> Complex64 {
        let n2 = self.p * self.p - 1;
        let z = |e: u64| Complex64::from_polar(1.0, TAU * (e % n2) as f64 / n2 as f64);
        let q = self.p as f64;
        match kind {
            Kind::Scalar(l) => z(k * self.base_log2(l)) * (1.0 - q),
            Kind::Unipotent(l) => z(k * self.base_log2(l)),
            Kind::Split(..) => Complex64::new(0.0, 0.0),
            Kind::Elliptic(e) => z(k * e) + z(k * e * self.p),
        }
    }

    fn steinberg(&self, kind: Kind) -> Complex64 {
        Complex64::new(
            match kind {
                Kind::Scalar(_) => self.p as f64,
                Kind::Unipotent(_) => 0.0,
                Kind::Split(..) => 1.0,
                Kind::Elliptic(_) => -1.0,
            },
            0.0,
        )
    }

    fn average(&self, f: impl Fn(Kind) -> Complex64) -> f64 {
        let s: Complex64 = self.classes.iter().map(|&(k, c)| f(k) * c as f64).sum();
        assert!(s.im.abs() < 1e-6, "imaginary part {}", s.im);
        s.re / self.order as f64
    }

    /// Torus characters of `T_w` as exponent tuples in this module's coordinates.
    fn characters(&self, cox: bool) -> Vec<Vec<u64>> {
        if cox {
            (0..self.p * self.p - 1).map(|k| vec![k]).collect()
        } else {
            (0..self.p - 1).flat_map(|a| (0..self.p - 1).map(move |b| vec![a, b])).collect()
        }
    }

    fn dl(&self, cox: bool, k: &[u64], kind: Kind) -> Complex64 {
        if cox {
            self.coxeter(k[0], kind)
        } else {
            self.split((k[0], k[1]), kind)
        }
    }
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

fn assert_same(a: &[f64], b: &[f64], what: &str) {
    assert_eq!(a.len(), b.len(), "{what}");
    for (x, y) in a.iter().zip(b) {
        assert!((x - y).abs() < 1e-7, "{what}: {x} vs {y}");
    }
}

fn closed(g: &Gln, chars: &[&str], torus: &Partition, thetas: Vec<TorusChar>) -> f64 {
    let chars = chars.iter().map(|c| g.parse_char(c).unwrap()).collect();
    let query = MultiplicityQuery { n: 2, q: g.q, chars, torus: torus.clone(), thetas };
    closed_multiplicity(g, &query).unwrap().value.to_f64().unwrap()
}

#[test]
fn field_tables_are_complete() {
    for p in [5u64, 7] {
        let f = Gl2::new(p);
        assert_eq!(f.order, (p * p - 1) * (p * p - p));
        assert_eq!(f.log2.iter().filter(|&&l| l == u64::MAX).count(), 1);
        assert_eq!(f.classes.len() as u64, p * p - 1);
        assert!(f.nonresidue > 1);
    }
}

#[test]
fn single_theta_multisets_match() {
    for p in [5u64, 7] {
        let f = Gl2::new(p);
        let g = Gln::new(2, p).unwrap();
        for cox in [false, true] {
            let w: Partition = if cox { "2" } else { "1,1" }.parse().unwrap();
            let lib_chars: Vec<TorusChar> = g.torus(&w).unwrap().datum.characters().collect();
            for chars in [&[][..], &["triv"], &["sgn"], &["sgn", "sgn"], &["triv", "sgn", "sgn"]] {
                let n_st = chars.iter().filter(|&&c| c == "sgn").count() as i32;
                let want: Vec<f64> = f
                    .characters(cox)
                    .iter()
                    .map(|k| f.average(|kind| f.dl(cox, k, kind) * f.steinberg(kind).powi(n_st)))
                    .collect();
                let got: Vec<f64> = lib_chars.iter().map(|th| closed(&g, chars, &w, vec![th.clone()])).collect();
                assert_same(&sorted(got), &sorted(want), &format!("p={p} torus {w} chars {chars:?}"));
            }
        }
    }
}

#[test]
fn theta_pair_multisets_match() {
    let p = 5;
    let f = Gl2::new(p);
    let g = Gln::new(2, p).unwrap();
    for cox in [false, true] {
        let w: Partition = if cox { "2" } else { "1,1" }.parse().unwrap();
        let lib_chars: Vec<TorusChar> = g.torus(&w).unwrap().datum.characters().collect();
        let mine = f.characters(cox);
        for n_st in 0..2 {
            let chars: &[&str] = if n_st == 0 { &[] } else { &["sgn"] };
            let mut want = Vec::new();
            for a in &mine {
                for b in &mine {
                    want.push(f.average(|kind| f.dl(cox, a, kind) * f.dl(cox, b, kind) * f.steinberg(kind).powi(n_st)));
                }
            }
            let mut got = Vec::new();
            for a in &lib_chars {
                for b in &lib_chars {
                    got.push(closed(&g, chars, &w, vec![a.clone(), b.clone()]));
                }
            }
            assert_same(&sorted(got), &sorted(want), &format!("torus {w} with {n_st} Steinberg factors"));
        }
    }
}
