//! Zelikovsky's 3-star heuristic and two variants.
//!
//! All three work on a shadow graph: the metric closure of the terminals,
//! where contracting a triple merges its three nodes and keeps the smaller
//! distance to every other node. A triple `{a, b, c}` with connection cost
//! `d` through center `c*` is worth
//!
//! ```text
//! win = mst(G') - mst(G' / {a, b, c}) - d
//! ```
//!
//! and the best positive triple is contracted each round. The centers of
//! contracted triples are then added to the terminals for one final
//! spanning-tree computation.
//!
//! - [`zelikovsky`] fixes the triple costs up front from the original
//!   terminals.
//! - [`zelikovsky_minus`] recomputes them every round against the merged
//!   groups.
//! - [`zelikovsky_plus`] is the latter with the MST+ finish.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{VertexId, WorkingGraph};
use crate::mst::{improve_by_branching, mst_terminals, prune_leaves, Subtree};
use crate::paths::{Dijkstra, UNREACHED};

/// Cheapest known connection of each terminal triple: `(cost, center)`.
/// Keys are sorted triples.
pub type TripleTable = BTreeMap<[VertexId; 3], (u64, VertexId)>;

/// One contraction of the main loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZelikovskyRound {
    /// The contracted triple as stored in the table: original terminals
    /// for the fixed variant, group representatives for the others.
    pub triple: [VertexId; 3],
    pub center: VertexId,
    /// `mst(G')` before the contraction.
    pub mst: u64,
    /// `mst(G') - mst(G'/triple)`.
    pub gain: u64,
    /// Connection cost of the triple.
    pub cost: u64,
    pub win: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZelikovskyResult {
    pub tree: Subtree,
    pub rounds: Vec<ZelikovskyRound>,
}

/// Terminal-to-everything distances; `rows[i][v]` is the distance from the
/// `i`th terminal to `v`.
struct Distances {
    terminals: Vec<VertexId>,
    rows: Vec<Vec<u64>>,
}

impl Distances {
    fn new(g: &WorkingGraph) -> Self {
        let terminals: Vec<VertexId> = g.terminals().collect();
        let mut dj = Dijkstra::new(g.capacity());
        let rows = terminals.iter().map(|&t| dj.distances_from(g, t)).collect();
        Self { terminals, rows }
    }

    fn len(&self) -> usize {
        self.terminals.len()
    }
}

/// Proposes, for each vertex `v` with nearest group `g0`, the triples made
/// of `g0` and any two other groups, costed through `v`. Groups are given as
/// a representative index per terminal index.
fn triple_table(g: &WorkingGraph, dist: &Distances, group_of: &[usize]) -> TripleTable {
    let t = dist.len();
    let mut reps: Vec<usize> = group_of.to_vec();
    reps.sort_unstable();
    reps.dedup();
    let mut table = TripleTable::new();
    if reps.len() < 3 {
        return table;
    }
    let mut to_group = vec![UNREACHED; t];
    for v in g.vertices() {
        to_group.fill(UNREACHED);
        for (&r, row) in group_of.iter().zip(&dist.rows) {
            to_group[r] = to_group[r].min(row[v]);
        }
        // nearest group, ties to the smaller terminal id
        let Some(&near) = reps
            .iter()
            .filter(|&&r| to_group[r] != UNREACHED)
            .min_by_key(|&&r| (to_group[r], dist.terminals[r]))
        else {
            continue;
        };
        let others: Vec<usize> = reps
            .iter()
            .copied()
            .filter(|&r| r != near && to_group[r] != UNREACHED)
            .collect();
        for (i, &a) in others.iter().enumerate() {
            for &b in &others[i + 1..] {
                let cost = to_group[near] + to_group[a] + to_group[b];
                let mut key = [dist.terminals[near], dist.terminals[a], dist.terminals[b]];
                key.sort_unstable();
                table
                    .entry(key)
                    .and_modify(|e| {
                        if cost < e.0 {
                            *e = (cost, v);
                        }
                    })
                    .or_insert((cost, v));
            }
        }
    }
    table
}

/// Triple costs over the original terminals.
pub fn precompute_triples(g: &WorkingGraph) -> TripleTable {
    let dist = Distances::new(g);
    let singletons: Vec<usize> = (0..dist.len()).collect();
    triple_table(g, &dist, &singletons)
}

/// Metric closure over terminal groups, merged by row minimum.
struct Shadow {
    /// Group distances indexed by representative terminal index.
    d: Vec<Vec<u64>>,
    /// Representative of each terminal index: the smallest index in its
    /// group, which is also the smallest vertex id.
    group: Vec<usize>,
}

impl Shadow {
    fn new(dist: &Distances) -> Self {
        let t = dist.len();
        let d = (0..t)
            .map(|i| (0..t).map(|j| dist.rows[i][dist.terminals[j]]).collect())
            .collect();
        Self {
            d,
            group: (0..t).collect(),
        }
    }

    fn live(&self) -> Vec<usize> {
        (0..self.group.len())
            .filter(|&i| self.group[i] == i)
            .collect()
    }

    /// Minimum spanning tree weight over live groups and, for every pair,
    /// the heaviest tree edge on the path between them.
    fn mst_with_bottlenecks(&self) -> (u64, Vec<Vec<u64>>) {
        let live = self.live();
        let k = live.len();
        let mut bottleneck = vec![vec![0u64; self.group.len()]; self.group.len()];
        if k < 2 {
            return (0, bottleneck);
        }
        let mut in_tree = vec![false; k];
        let mut key = vec![UNREACHED; k];
        let mut parent = vec![usize::MAX; k];
        let mut adj: Vec<Vec<(usize, u64)>> = vec![Vec::new(); k];
        key[0] = 0;
        let mut total = 0;
        for _ in 0..k {
            let i = (0..k)
                .filter(|&i| !in_tree[i])
                .min_by_key(|&i| (key[i], i))
                .expect("a vertex remains");
            in_tree[i] = true;
            if parent[i] != usize::MAX {
                total += key[i];
                adj[i].push((parent[i], key[i]));
                adj[parent[i]].push((i, key[i]));
            }
            for j in 0..k {
                let w = self.d[live[i]][live[j]];
                if !in_tree[j] && w < key[j] {
                    key[j] = w;
                    parent[j] = i;
                }
            }
        }
        for s in 0..k {
            let mut stack = vec![(s, usize::MAX, 0u64)];
            while let Some((x, from, worst)) = stack.pop() {
                bottleneck[live[s]][live[x]] = worst;
                for &(y, w) in &adj[x] {
                    if y != from {
                        stack.push((y, x, worst.max(w)));
                    }
                }
            }
        }
        (total, bottleneck)
    }

    /// Merges the groups of three representatives.
    fn contract(&mut self, reps: [usize; 3]) {
        let keep = *reps.iter().min().expect("three reps");
        for g in self.group.iter_mut() {
            if reps.contains(g) {
                *g = keep;
            }
        }
        for &gone in reps.iter().filter(|&&r| r != keep) {
            for y in 0..self.d.len() {
                let m = self.d[keep][y].min(self.d[gone][y]);
                self.d[keep][y] = m;
                self.d[y][keep] = m;
            }
        }
        self.d[keep][keep] = 0;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Variant {
    Fixed,
    Recomputed,
}

fn run(g: &WorkingGraph, variant: Variant) -> Result<(Vec<VertexId>, Vec<ZelikovskyRound>)> {
    let dist = Distances::new(g);
    let t = dist.len();
    if let Some(&lost) = dist
        .terminals
        .iter()
        .find(|&&x| t > 0 && dist.rows[0][x] == UNREACHED)
    {
        return Err(Error::Infeasible(format!(
            "terminals {} and {} are not connected",
            dist.terminals[0] + 1,
            lost + 1
        )));
    }
    let index_of: BTreeMap<VertexId, usize> = dist
        .terminals
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    let mut shadow = Shadow::new(&dist);
    let mut table = match variant {
        Variant::Fixed => triple_table(g, &dist, &(0..t).collect::<Vec<_>>()),
        Variant::Recomputed => TripleTable::new(),
    };
    let mut rounds = Vec::new();
    let mut centers = Vec::new();
    loop {
        let group_of = shadow.group.clone();
        if variant == Variant::Recomputed {
            table = triple_table(g, &dist, &group_of);
        }
        let (mst, bottleneck) = shadow.mst_with_bottlenecks();
        let mut best: Option<(ZelikovskyRound, [usize; 3])> = None;
        for (&key, &(cost, center)) in &table {
            let [a, b, c] = key.map(|v| group_of[index_of[&v]]);
            if a == b || b == c || a == c {
                continue;
            }
            let (ab, ac, bc) = (bottleneck[a][b], bottleneck[a][c], bottleneck[b][c]);
            let gain = ab + ac + bc - ab.max(ac).max(bc);
            if gain <= cost {
                continue;
            }
            let win = gain - cost;
            // table order is lexicographic, so ties keep the smallest triple
            if best.as_ref().is_none_or(|(r, _)| win > r.win) {
                let round = ZelikovskyRound {
                    triple: key,
                    center,
                    mst,
                    gain,
                    cost,
                    win,
                };
                best = Some((round, [a, b, c]));
            }
        }
        let Some((round, groups)) = best else { break };
        shadow.contract(groups);
        centers.push(round.center);
        rounds.push(round);
    }
    Ok((centers, rounds))
}

fn finish(g: &WorkingGraph, centers: &[VertexId], plus: bool) -> Result<Subtree> {
    let required: Vec<VertexId> = g.terminals().collect();
    let mut seeds = required.clone();
    seeds.extend_from_slice(centers);
    seeds.sort_unstable();
    seeds.dedup();
    let tree = mst_terminals(g, &seeds)?;
    let is_required = |v: VertexId| required.binary_search(&v).is_ok();
    let tree = Subtree::from_edges(g, prune_leaves(g, &tree.edges, is_required));
    if plus {
        improve_by_branching(g, &seeds, &required, tree)
    } else {
        Ok(tree)
    }
}

/// Triple costs computed once; finish with the terminal MST over the
/// terminals and the chosen centers.
pub fn zelikovsky(g: &WorkingGraph) -> Result<ZelikovskyResult> {
    let (centers, rounds) = run(g, Variant::Fixed)?;
    Ok(ZelikovskyResult {
        tree: finish(g, &centers, false)?,
        rounds,
    })
}

/// Triple costs recomputed against the current groups in every round.
pub fn zelikovsky_minus(g: &WorkingGraph) -> Result<ZelikovskyResult> {
    let (centers, rounds) = run(g, Variant::Recomputed)?;
    Ok(ZelikovskyResult {
        tree: finish(g, &centers, false)?,
        rounds,
    })
}

/// [`zelikovsky_minus`] finished by the MST+ improvement loop.
pub fn zelikovsky_plus(g: &WorkingGraph) -> Result<ZelikovskyResult> {
    let (centers, rounds) = run(g, Variant::Recomputed)?;
    Ok(ZelikovskyResult {
        tree: finish(g, &centers, true)?,
        rounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Instance;

    fn wg(n: usize, edges: &[(usize, usize, u64)], terms: &[usize]) -> WorkingGraph {
        WorkingGraph::from_instance(
            &Instance::new(n, edges.iter().copied(), terms.iter().copied()).unwrap(),
        )
    }

    fn unit_star() -> WorkingGraph {
        wg(4, &[(3, 0, 1), (3, 1, 1), (3, 2, 1)], &[0, 1, 2])
    }

    fn gadget() -> WorkingGraph {
        wg(
            6,
            &[(0, 4, 1), (1, 4, 1), (4, 5, 1), (5, 2, 1), (5, 3, 1)],
            &[0, 1, 2, 3],
        )
    }

    #[test]
    fn triple_tables() {
        let star = precompute_triples(&unit_star());
        assert_eq!(star.get(&[0, 1, 2]), Some(&(3, 3)));

        let gadget = precompute_triples(&gadget());
        assert_eq!(gadget.get(&[0, 1, 2]), Some(&(4, 4)));

        let path = wg(3, &[(0, 1, 1), (1, 2, 1)], &[0, 1, 2]);
        assert_eq!(precompute_triples(&path).get(&[0, 1, 2]), Some(&(2, 1)));

        assert!(precompute_triples(&wg(2, &[(0, 1, 1)], &[0, 1])).is_empty());
    }

    #[test]
    fn unit_star_trace() {
        for f in [zelikovsky, zelikovsky_minus, zelikovsky_plus] {
            let out = f(&unit_star()).unwrap();
            assert_eq!(out.rounds.len(), 1);
            let r = &out.rounds[0];
            assert_eq!((r.mst, r.gain, r.cost, r.win, r.center), (4, 4, 3, 1, 3));
            assert_eq!(out.tree.weight, 3);
        }
    }

    #[test]
    fn gadget_trace() {
        for f in [zelikovsky, zelikovsky_minus, zelikovsky_plus] {
            let out = f(&gadget()).unwrap();
            assert_eq!(out.rounds.len(), 1);
            let r = &out.rounds[0];
            assert_eq!(r.triple, [0, 1, 2]);
            assert_eq!(
                (r.mst, r.gain - r.cost, r.cost, r.win, r.center),
                (7, 1, 4, 1, 4)
            );
            assert_eq!(out.tree.weight, 5);
        }
    }

    #[test]
    fn two_terminals_fall_back_to_mst() {
        let g = wg(3, &[(0, 1, 2), (1, 2, 2), (0, 2, 5)], &[0, 2]);
        let out = zelikovsky(&g).unwrap();
        assert!(out.rounds.is_empty());
        assert_eq!(out.tree.weight, 4);
        assert_eq!(zelikovsky_plus(&g).unwrap().tree.weight, 4);
    }

    #[test]
    fn disconnected_terminals() {
        let g = wg(4, &[(0, 1, 1), (2, 3, 1)], &[0, 1, 3]);
        assert!(matches!(zelikovsky(&g), Err(Error::Infeasible(_))));
    }
}
