use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::{Signature, TorusChar, TorusDatum};
use crate::error::{Error, Result};
use crate::green::LeviShape;
use crate::weyl::{centralizer_stabilizer, Partition, Perm};

pub const MAX_TORUS_ORDER: u64 = 200_000;

/// Frobenius orbit of blocks, i.e. one factor `GL_m(q^d)` of `G_s`.
#[derive(Clone, Debug, Serialize)]
pub struct BlockOrbit {
    /// `B, F(B), F^2(B), ...` starting from the smallest block id.
    pub blocks: Vec<usize>,
    pub d: usize,
    pub m: usize,
    /// Cycles of the torus whose slots lie in this orbit.
    pub cycles: Vec<usize>,
    /// Type of `T_w` inside the factor: parts `lambda_i / d`.
    pub kappa: Partition,
}

#[derive(Clone, Debug)]
pub struct Node {
    pub signature: Signature,
    pub orbits: Vec<BlockOrbit>,
    pub shape: LeviShape,
    /// `|W_{G_s}(T_w)^F|`.
    pub stabilizer: u64,
    /// Representatives of `W(T_w)^F / W_{G_s}(T_w)^F`, smallest first.
    pub cosets: Vec<Perm>,
    /// One generator of `Z(G_s)^F` per block orbit.
    pub center_gens: Vec<Vec<u64>>,
    pub center_order: u64,
    /// `#{s : Signature(s) = this}`.
    pub members: u64,
    pub representative: Vec<u64>,
}

/// Poset of centralizers `G_s`, `s in T_w^F`, ordered by inclusion.
#[derive(Clone, Debug)]
pub struct Poset {
    pub nodes: Vec<Node>,
    leq: Vec<Vec<bool>>,
    mobius: Vec<Vec<i64>>,
    node_of: Vec<u32>,
}

fn block_orbits(t: &TorusDatum, sig: &Signature) -> Vec<BlockOrbit> {
    let frob = t.layout.frobenius();
    let k = sig.block_count();
    let mut f_block = vec![usize::MAX; k];
    for (x, &b) in sig.blocks.iter().enumerate() {
        f_block[b] = sig.blocks[frob.apply(x)];
    }
    let sizes = sig.block_sizes();
    let mut seen = vec![false; k];
    let mut out = Vec::new();
    for b in 0..k {
        if seen[b] {
            continue;
        }
        let mut blocks = vec![b];
        seen[b] = true;
        let mut c = f_block[b];
        while c != b {
            seen[c] = true;
            blocks.push(c);
            c = f_block[c];
        }
        let d = blocks.len();
        let cycles: Vec<usize> = (0..t.rank()).filter(|&i| blocks.contains(&sig.blocks[t.layout.slot(i, 0)])).collect();
        let kappa = Partition::new(cycles.iter().map(|&i| t.cycle_type.parts()[i] / d).collect());
        out.push(BlockOrbit { blocks, d, m: sizes[b], cycles, kappa });
    }
    out
}

/// `s` with eigenvalue `gamma^{q^k}` on the `k`-th block of `orbit`, 1 elsewhere,
/// `gamma` a generator of `F_{q^d}^×`.
fn center_generator(t: &TorusDatum, sig: &Signature, orbit: &BlockOrbit) -> Vec<u64> {
    let m = t.cover_order as u128;
    let q = t.q as u128;
    let c = (t.cover_order / (t.q.pow(orbit.d as u32) - 1)) as u128;
    let mut eig_of_block = HashMap::new();
    let mut e = c % m;
    for &b in &orbit.blocks {
        eig_of_block.insert(b, e);
        e = (e * q) % m;
    }
    (0..t.rank())
        .map(|i| {
            let b = sig.blocks[t.layout.slot(i, 0)];
            let e = eig_of_block.get(&b).copied().unwrap_or(0);
            let scale = t.scales[i] as u128;
            debug_assert_eq!(e % scale, 0);
            ((e / scale) % t.orders[i] as u128) as u64
        })
        .collect()
}

impl Poset {
    pub fn build(t: &TorusDatum) -> Result<Poset> {
        if t.group_order > MAX_TORUS_ORDER {
            return Err(Error::OutOfRange {
                what: "|T_w^F|",
                value: t.group_order,
                range: "<= 200000 for enumeration",
            });
        }
        let mut ids: HashMap<Signature, usize> = HashMap::new();
        let mut sigs: Vec<(Signature, u64, Vec<u64>)> = Vec::new();
        let mut raw_of = Vec::with_capacity(t.group_order as usize);
        for s in t.elements() {
            let sig = t.signature_of(&s);
            let id = *ids.entry(sig.clone()).or_insert_with(|| {
                sigs.push((sig, 0, s.clone()));
                sigs.len() - 1
            });
            sigs[id].1 += 1;
            raw_of.push(id);
        }
        let mut order: Vec<usize> = (0..sigs.len()).collect();
        order.sort_by(|&a, &b| {
            let (sa, sb) = (&sigs[a].0, &sigs[b].0);
            sb.block_count().cmp(&sa.block_count()).then(sa.cmp(sb))
        });
        let mut rank_of = vec![0; sigs.len()];
        for (r, &i) in order.iter().enumerate() {
            rank_of[i] = r;
        }
        let node_of = raw_of.iter().map(|&i| rank_of[i] as u32).collect();
        let weyl = t.weyl_group();
        let mut nodes = Vec::with_capacity(order.len());
        for &i in &order {
            let (sig, members, rep) = sigs[i].clone();
            let orbits = block_orbits(t, &sig);
            let shape = LeviShape::new(orbits.iter().map(|o| (o.m, o.d)).collect())?;
            let stabilizer = centralizer_stabilizer(&t.cycle_type, &sig.blocks)?;
            let mut seen = HashSet::new();
            let mut cosets = Vec::new();
            for v in weyl {
                let inv = v.inverse();
                let image: Vec<usize> = (0..t.n).map(|y| sig.blocks[inv.apply(y)]).collect();
                if seen.insert(image) {
                    cosets.push(v.clone());
                }
            }
            if cosets.len() as u64 * stabilizer != weyl.len() as u64 {
                return Err(Error::Consistency("coset count times stabilizer differs from |W|".into()));
            }
            let center_gens = orbits.iter().map(|o| center_generator(t, &sig, o)).collect();
            let center_order = orbits.iter().map(|o| t.q.pow(o.d as u32) - 1).product();
            nodes.push(Node {
                signature: sig,
                orbits,
                shape,
                stabilizer,
                cosets,
                center_gens,
                center_order,
                members,
                representative: rep,
            });
        }
        let k = nodes.len();
        let leq: Vec<Vec<bool>> =
            (0..k).map(|a| (0..k).map(|b| nodes[a].signature.refines(&nodes[b].signature)).collect()).collect();
        let mut mobius = vec![vec![0i64; k]; k];
        for a in 0..k {
            mobius[a][a] = 1;
            for c in a + 1..k {
                if !leq[a][c] {
                    continue;
                }
                let s: i64 = (a..c).filter(|&b| leq[a][b] && leq[b][c]).map(|b| mobius[a][b]).sum();
                mobius[a][c] = -s;
            }
        }
        Ok(Poset { nodes, leq, mobius, node_of })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn mobius(&self, a: usize, b: usize) -> i64 {
        self.mobius[a][b]
    }

    /// Node of the element with the given index in [`TorusDatum::element`] order.
    pub fn node_of_index(&self, idx: u64) -> usize {
        self.node_of[idx as usize] as usize
    }

    pub fn node_of(&self, t: &TorusDatum, s: &[u64]) -> usize {
        self.node_of_index(t.element_index(s))
    }

    pub fn top(&self) -> usize {
        self.nodes.len() - 1
    }

    /// `|Z(node)^F|` if `theta` is trivial there, else 0.
    pub fn delta(&self, t: &TorusDatum, theta: &TorusChar, node: usize) -> u64 {
        let n = &self.nodes[node];
        if n.center_gens.iter().all(|g| t.pair(theta, g) == 0) {
            n.center_order
        } else {
            0
        }
    }

    /// `sum_{node' >= node} mu(node, node') delta(theta, node')`.
    pub fn mobius_delta(&self, t: &TorusDatum, theta: &TorusChar, node: usize) -> i64 {
        (node..self.len())
            .filter(|&b| self.leq[node][b])
            .map(|b| self.mobius[node][b] * self.delta(t, theta, b) as i64)
            .sum()
    }

    /// Which nodes `theta` is trivial on, as a bit vector.
    pub fn delta_pattern(&self, t: &TorusDatum, theta: &TorusChar) -> Vec<bool> {
        (0..self.len()).map(|b| self.delta(t, theta, b) != 0).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let nodes: Vec<serde_json::Value> = self
            .nodes
            .iter()
            .map(|n| {
                serde_json::json!({
                    "signature": n.signature.canonical(),
                    "shape": n.shape.to_string(),
                    "members": n.members,
                    "stabilizer": n.stabilizer,
                    "center_order": n.center_order,
                })
            })
            .collect();
        let mut edges = Vec::new();
        let mut mu = Vec::new();
        for a in 0..self.len() {
            for b in a + 1..self.len() {
                if !self.leq[a][b] {
                    continue;
                }
                mu.push(serde_json::json!([a, b, self.mobius[a][b]]));
                let covered = !(a + 1..b).any(|c| self.leq[a][c] && self.leq[c][b]);
                if covered {
                    edges.push(serde_json::json!([a, b]));
                }
            }
        }
        serde_json::json!({ "nodes": nodes, "edges": edges, "mobius": mu })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::CycRing;
    use num_bigint::BigInt;

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    #[test]
    fn chains_in_rank_two() {
        for w in ["2", "1,1"] {
            let t = TorusDatum::new(5, &p(w)).unwrap();
            let ps = Poset::build(&t).unwrap();
            assert_eq!(ps.len(), 2);
            assert_eq!(ps.mobius(0, 1), -1);
        }
    }

    #[test]
    fn split_gl3_is_the_partition_lattice() {
        let t = TorusDatum::new(5, &p("1,1,1")).unwrap();
        let ps = Poset::build(&t).unwrap();
        assert_eq!(ps.len(), 5);
        assert_eq!(ps.mobius(0, ps.top()), 2);
        for mid in 1..4 {
            assert_eq!(ps.nodes[mid].shape, LeviShape::new(vec![(2, 1), (1, 1)]).unwrap());
        }
    }

    #[test]
    fn coxeter_center_delta() {
        let t = TorusDatum::new(5, &p("2")).unwrap();
        let ps = Poset::build(&t).unwrap();
        let top = ps.top();
        for b in 0..24 {
            let expect = if b % 4 == 0 { 4 } else { 0 };
            assert_eq!(ps.delta(&t, &TorusChar(vec![b]), top), expect);
        }
        assert_eq!(ps.delta(&t, &TorusChar(vec![0]), 0), 24);
        assert_eq!(ps.delta(&t, &TorusChar(vec![3]), 0), 0);
        // the center consists of the exponents divisible by 6
        let center: Vec<u64> = (0..24).filter(|&a| ps.node_of(&t, &[a]) == top).collect();
        assert_eq!(center, vec![0, 6, 12, 18]);
    }

    #[test]
    fn mobius_inversion_and_stabilizers_gl3() {
        for w in Partition::all(3) {
            let t = TorusDatum::new(5, &w).unwrap();
            let ps = Poset::build(&t).unwrap();
            for a in 0..ps.len() {
                let above: i64 = (a..ps.len())
                    .filter(|&b| ps.leq(a, b))
                    .map(|b| {
                        let z = (0..ps.len()).filter(|&c| ps.leq(b, c)).map(|c| ps.nodes[c].members).sum::<u64>();
                        assert_eq!(z, ps.nodes[b].center_order);
                        ps.mobius(a, b) * z as i64
                    })
                    .sum();
                assert_eq!(above, ps.nodes[a].members as i64);
            }
            for s in t.elements() {
                let node = &ps.nodes[ps.node_of(&t, &s)];
                let orbit: HashSet<Vec<u64>> =
                    t.weyl_group().iter().map(|v| t.act_on_element(v, &s).unwrap()).collect();
                assert_eq!(node.stabilizer * orbit.len() as u64, w.z());
            }
        }
    }

    #[test]
    fn delta_equals_character_sum() {
        let t = TorusDatum::new(5, &p("2,1")).unwrap();
        let ps = Poset::build(&t).unwrap();
        let ring = CycRing::new(t.exponent, 40.0).unwrap();
        for theta in t.characters().step_by(7) {
            for node in 0..ps.len() {
                let mut acc = ring.zero();
                for (i, s) in t.elements().enumerate() {
                    let b = ps.node_of_index(i as u64);
                    if ps.leq(node, b) {
                        acc = &acc + &ring.root(t.pair(&theta, &s));
                    }
                }
                assert_eq!(acc.to_integer().unwrap(), Some(BigInt::from(ps.delta(&t, &theta, node))));
            }
        }
    }
}
