use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use proptest::prelude::*;

use dlmult::dlchar::{almost_unipotent, brute_multiplicity, dl_character, inner_product, steinberg};
use dlmult::formulas::{closed_multiplicity, u_only, MultiplicityQuery};
use dlmult::group::Gln;
use dlmult::scalar::{interpolate, rat, CycRing, QPolynomial, Rat};
use dlmult::torus::TorusChar;
use dlmult::weyl::Partition;

const GRID: [(usize, u64); 5] = [(2, 4), (2, 5), (2, 7), (3, 4), (3, 5)];

fn group(i: usize) -> &'static Gln {
    static CELLS: [OnceLock<Gln>; 5] = [const { OnceLock::new() }; 5];
    CELLS[i].get_or_init(|| Gln::new(GRID[i].0, GRID[i].1).unwrap())
}

fn pick<T: Clone>(v: &[T], k: usize) -> T {
    v[k % v.len()].clone()
}

fn ring(g: &Gln, w: &Partition, factors: usize) -> Arc<CycRing> {
    g.ring(&[w], factors).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn unipotent_characters_are_orthonormal(gi in 0..GRID.len(), a in 0usize..8, b in 0usize..8) {
        let g = group(gi);
        let ring = g.full_ring(2).unwrap();
        let (x, y) = (pick(&g.weyl.chars, a), pick(&g.weyl.chars, b));
        let ux = almost_unipotent(g, &x, &ring).unwrap();
        let uy = almost_unipotent(g, &y, &ring).unwrap();
        let want = if x == y { 1 } else { 0 };
        prop_assert_eq!(inner_product(g, &ux, &uy).unwrap(), rat(want, 1));
    }

    #[test]
    fn dl_orthogonality(gi in 0..GRID.len(), w in 0usize..3, a in any::<u64>(), b in any::<u64>()) {
        let g = group(gi);
        let w = pick(&g.weyl.classes, w);
        let entry = g.torus(&w).unwrap();
        let chars: Vec<TorusChar> = entry.datum.characters().collect();
        let (ta, tb) = (pick(&chars, a as usize), pick(&chars, b as usize));
        let ring = ring(g, &w, 2);
        let ra = dl_character(g, &w, &ta, &ring).unwrap();
        let rb = dl_character(g, &w, &tb, &ring).unwrap();
        let want = entry.datum.orbit_count(&ta, &tb).unwrap();
        prop_assert_eq!(inner_product(g, &ra, &rb).unwrap(), Rat::from_integer(BigInt::from(want)));
    }

    #[test]
    fn steinberg_vanishes_off_semisimple_classes(gi in 0..GRID.len()) {
        let g = group(gi);
        let ring = g.full_ring(1).unwrap();
        let st = steinberg(g, &ring).unwrap();
        for (c, rec) in g.classes.classes.iter().enumerate() {
            prop_assert_eq!(st.values[c].is_zero().unwrap(), !rec.label.is_semisimple());
        }
    }

    #[test]
    fn closed_form_matches_class_sum(
        gi in 0..GRID.len(),
        w in 0usize..3,
        chars in prop::collection::vec(0usize..3, 0..3),
        thetas in prop::collection::vec(any::<u64>(), 1..3),
    ) {
        let g = group(gi);
        prop_assume!(g.q > g.n as u64 + 1);
        let w = pick(&g.weyl.classes, w);
        let all: Vec<TorusChar> = g.torus(&w).unwrap().datum.characters().collect();
        let chars: Vec<Partition> = chars.iter().map(|&i| pick(&g.weyl.chars, i)).collect();
        let thetas: Vec<TorusChar> = thetas.iter().map(|&i| pick(&all, i as usize)).collect();
        let query = MultiplicityQuery { n: g.n, q: g.q, chars: chars.clone(), torus: w.clone(), thetas: thetas.clone() };
        let closed = closed_multiplicity(g, &query).unwrap().value;
        let ring = ring(g, &w, chars.len() + thetas.len());
        let mut fs: Vec<_> = chars.iter().map(|c| almost_unipotent(g, c, &ring).unwrap()).collect();
        fs.extend(thetas.iter().map(|t| dl_character(g, &w, t, &ring).unwrap()));
        prop_assert_eq!(closed, brute_multiplicity(g, &fs).unwrap());
    }

    #[test]
    fn unipotent_products_are_natural(gi in 0..GRID.len(), chars in prop::collection::vec(0usize..3, 1..4)) {
        let g = group(gi);
        let chars: Vec<Partition> = chars.iter().map(|&i| pick(&g.weyl.chars, i)).collect();
        let v = u_only(g, &chars).unwrap().value;
        prop_assert!(v.is_integer() && v >= rat(0, 1));
    }

    #[test]
    fn interpolation_recovers_polynomials(
        coeffs in prop::collection::vec((-50i64..50, 1i64..6), 1..6),
        shift in 2i64..20,
    ) {
        let poly = QPolynomial::new(coeffs.iter().map(|&(a, b)| rat(a, b)).collect());
        let points: Vec<(Rat, Rat)> = (0..coeffs.len() as i64 + 1)
            .map(|i| {
                let x = rat(shift + 3 * i, 1);
                let y = poly.eval(&x);
                (x, y)
            })
            .collect();
        prop_assert_eq!(interpolate(&points).unwrap(), poly);
    }
}
