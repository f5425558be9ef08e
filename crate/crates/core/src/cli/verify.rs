use clap::ValueEnum;
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{Suite, SCHEMA};
use crate::dlchar::{
    almost_unipotent, borel_data, brute_multiplicity, dl_character, hc_induce_with, inner_product, ClassFunction,
};
use crate::error::Result;
use crate::formulas::{closed_multiplicity, fs_indicator, fs_lhs, gamma_one, FsQuery, MultiplicityQuery};
use crate::glnq::TinyGroup;
use crate::green::{green_table, steinberg_average};
use crate::group::Gln;
use crate::scalar::{rat_string, CycRing, Rat};
use crate::torus::TorusChar;
use crate::weyl::Partition;

struct Case {
    name: String,
    pass: bool,
    detail: String,
}

fn case(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Case {
    Case { name: name.into(), pass, detail: detail.into() }
}

pub(super) fn run(suite: Suite, seed: u64) -> Result<(Value, bool)> {
    let cases = match suite {
        Suite::Orthogonality => orthogonality()?,
        Suite::SplitOracle => split_oracle()?,
        Suite::FormulaOracle => formula_oracle(seed)?,
        Suite::Fs => fs()?,
        Suite::Green => green()?,
        Suite::Poset => poset()?,
    };
    let ok = cases.iter().all(|c| c.pass);
    let failed = cases.iter().filter(|c| !c.pass).count();
    let json = json!({
        "schema": SCHEMA,
        "command": "verify",
        "suite": suite.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default(),
        "seed": seed,
        "cases": cases.iter().map(|c| json!({ "case": c.name, "pass": c.pass, "detail": c.detail })).collect::<Vec<_>>(),
        "passed": cases.len() - failed,
        "failed": failed,
    });
    Ok((json, ok))
}

fn orthogonality() -> Result<Vec<Case>> {
    let mut out = Vec::new();
    for (n, q) in [(2usize, 5u64), (3, 4)] {
        let g = Gln::new(n, q)?;
        let ring = g.full_ring(2)?;
        let mut chars: Vec<(usize, TorusChar)> = Vec::new();
        for (i, w) in g.weyl.classes.iter().enumerate() {
            chars.extend(g.torus(w)?.datum.characters().map(|t| (i, t)));
        }
        let fs: Vec<ClassFunction> =
            chars.par_iter().map(|(i, t)| dl_character(&g, &g.weyl.classes[*i], t, &ring)).collect::<Result<_>>()?;
        let bad: Vec<String> = (0..chars.len())
            .into_par_iter()
            .flat_map(|a| (a..chars.len()).into_par_iter().map(move |b| (a, b)))
            .filter_map(|(a, b)| {
                let (wa, ta) = &chars[a];
                let (wb, tb) = &chars[b];
                let want =
                    if wa == wb { g.torus(&g.weyl.classes[*wa]).ok()?.datum.orbit_count(ta, tb).ok()? } else { 0 };
                match inner_product(&g, &fs[a], &fs[b]) {
                    Ok(v) if v == Rat::from_integer(BigInt::from(want)) => None,
                    other => Some(format!("({ta}) vs ({tb}): {other:?}, want {want}")),
                }
            })
            .collect();
        let pairs = chars.len() * (chars.len() + 1) / 2;
        out.push(case(
            format!("GL_{n}({q})"),
            bad.is_empty(),
            bad.first().cloned().unwrap_or_else(|| format!("{pairs} pairs")),
        ));
    }
    Ok(out)
}

fn split_oracle() -> Result<Vec<Case>> {
    let mut out = Vec::new();
    for (n, q) in [(2usize, 3u64), (2, 5), (3, 2), (3, 3)] {
        let g = Gln::new(n, q)?;
        let tiny = TinyGroup::new(n, q as u32)?;
        let split = Partition::column(n);
        let ring = g.ring(&[&split], 1)?;
        let borel = borel_data(&g, &tiny)?;
        for th in g.torus(&split)?.datum.characters() {
            let a = dl_character(&g, &split, &th, &ring)?;
            let b = hc_induce_with(&g, &borel, &th, &ring)?;
            let mut pass = true;
            for c in 0..g.classes.len() {
                pass &= a.values[c].equals(&b.values[c])?;
            }
            out.push(case(format!("GL_{n}({q}) theta ({th})"), pass, ""));
        }
    }
    Ok(out)
}

fn formula_oracle(seed: u64) -> Result<Vec<Case>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (n, q, per_torus) in [(2usize, 5u64, usize::MAX), (3, 5, 8)] {
        let g = Gln::new(n, q)?;
        for w in g.weyl.classes.clone() {
            let ring = g.ring(&[&w], 3)?;
            let us: Vec<ClassFunction> =
                g.weyl.chars.iter().map(|c| almost_unipotent(&g, c, &ring)).collect::<Result<_>>()?;
            let mut thetas: Vec<TorusChar> = g.torus(&w)?.datum.characters().collect();
            if thetas.len() > per_torus {
                let first = thetas[0].clone();
                thetas[1..].shuffle(&mut rng);
                thetas.truncate(per_torus);
                thetas[0] = first;
            }
            let mut lists: Vec<Vec<usize>> = vec![Vec::new()];
            for a in 0..us.len() {
                lists.push(vec![a]);
                for b in a..us.len() {
                    lists.push(vec![a, b]);
                }
            }
            let mut bad = Vec::new();
            let mut count = 0;
            for th in &thetas {
                let r = dl_character(&g, &w, th, &ring)?;
                for l in &lists {
                    let chars: Vec<Partition> = l.iter().map(|&i| g.weyl.chars[i].clone()).collect();
                    let query = MultiplicityQuery { n, q, chars, torus: w.clone(), thetas: vec![th.clone()] };
                    let closed = closed_multiplicity(&g, &query)?.value;
                    let mut fs: Vec<ClassFunction> = l.iter().map(|&i| us[i].clone()).collect();
                    fs.push(r.clone());
                    let brute = brute_multiplicity(&g, &fs)?;
                    if closed != brute {
                        bad.push(format!("{query:?}: {} vs {}", rat_string(&closed), rat_string(&brute)));
                    }
                    count += 1;
                }
            }
            out.push(case(
                format!("GL_{n}({q}) torus {w}"),
                bad.is_empty(),
                bad.first().cloned().unwrap_or_else(|| format!("{count} queries")),
            ));
        }
    }
    Ok(out)
}

fn fs() -> Result<Vec<Case>> {
    let mut out = Vec::new();
    for q in [3u64, 5] {
        let g = Gln::new(2, q)?;
        let tiny = TinyGroup::new(2, q as u32)?;
        let ring = g.full_ring(1)?;
        if q == 3 {
            let one = crate::dlchar::trivial(&g, &ring)?;
            let lhs = fs_lhs(&g, &tiny, &one)?;
            let half = Rat::new(1.into(), 2.into());
            let rhs = fs_indicator(
                &g,
                &FsQuery {
                    terms: vec![
                        (half.clone(), Partition::column(2), TorusChar(vec![0, 0])),
                        (half, Partition::row(2), TorusChar(vec![0])),
                    ],
                },
            )?;
            out.push(case(
                "GL_2(3) trivial character",
                lhs == rhs,
                format!("{} vs {}", rat_string(&lhs), rat_string(&rhs)),
            ));
            let gamma = gamma_one(&g)?;
            let qq = g.classes.p_prime_order();
            let brute = tiny.elements().iter().filter(|x| tiny.power_map_indicator(x, qq)).count();
            out.push(case(
                "GL_2(3) gamma(1)",
                gamma == Rat::from_integer(BigInt::from(brute)),
                format!("{} vs {brute}", rat_string(&gamma)),
            ));
        }
        for w in g.weyl.classes.clone() {
            for th in g.torus(&w)?.datum.characters() {
                let f = dl_character(&g, &w, &th, &ring)?;
                let lhs = fs_lhs(&g, &tiny, &f)?;
                let rhs = fs_indicator(&g, &FsQuery::dl(w.clone(), th.clone()))?;
                out.push(case(
                    format!("GL_2({q}) R_{w}({th})"),
                    lhs == rhs,
                    format!("{} vs {}", rat_string(&lhs), rat_string(&rhs)),
                ));
            }
        }
    }
    Ok(out)
}

fn green() -> Result<Vec<Case>> {
    let mut out = Vec::new();
    for m in 1..=4usize {
        let table = green_table(m)?;
        for q in [3i64, 5, 7] {
            let st = steinberg_average(&table, q)?;
            let want = Rat::from_integer(BigInt::from(q).pow((m * (m - 1) / 2) as u32));
            out.push(case(format!("m={m} q={q} Steinberg average"), st == want, rat_string(&st)));
        }
        for q in [3i64, 5, 7] {
            let qb = BigInt::from(q);
            let gp: BigInt = (1..=m as u32).map(|k| qb.pow(k) - 1).product();
            let mut pass = true;
            for rho in Partition::all(m) {
                let sign = if (m + rho.len()) % 2 == 0 { 1 } else { -1 };
                let tp: BigInt = rho.parts().iter().map(|&r| qb.pow(r as u32) - 1).product();
                let id = table.value(&Partition::column(m), &rho, &qb)?;
                pass &= Rat::from_integer(id) == Rat::new(&gp * sign, tp);
                pass &= table.value(&Partition::row(m), &rho, &qb)? == BigInt::from(1);
            }
            out.push(case(format!("m={m} q={q} identity and regular unipotent values"), pass, ""));
        }
    }
    Ok(out)
}

fn poset() -> Result<Vec<Case>> {
    let g = Gln::new(3, 5)?;
    let mut out = Vec::new();
    for w in g.weyl.classes.clone() {
        let entry = g.torus(&w)?;
        let t = &entry.datum;
        let ring = CycRing::new(t.exponent, 24.0)?;
        let elems: Vec<Vec<u64>> = t.elements().collect();
        let mut pass = true;
        for th in t.characters() {
            let mut sums = vec![ring.zero(); entry.poset.len()];
            for s in &elems {
                let k = entry.poset.node_of(t, s);
                sums[k] = &sums[k] + &ring.root(t.pair(&th, s));
            }
            for (k, s) in sums.iter().enumerate() {
                pass &= s.equals(&ring.int(entry.poset.mobius_delta(t, &th, k)))?;
            }
        }
        out.push(case(format!("GL_3(5) torus {w}"), pass, format!("{} nodes", entry.poset.len())));
    }
    Ok(out)
}
