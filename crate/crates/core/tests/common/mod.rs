//! Independent oracles: everything here is brute force and shares no code
//! with the algorithms under test beyond the graph containers.
#![allow(dead_code)]

use std::cmp::Ordering;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use steiner_core::random::random_small_instance;
use steiner_core::{Instance, VertexId, WorkingGraph};

pub const INF: u64 = u64::MAX;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small(seed: u64, max_vertices: usize, max_terminals: usize) -> Instance {
    random_small_instance(&mut rng(seed), max_vertices, max_terminals)
}

pub fn gadget() -> Instance {
    Instance::new(
        6,
        [(0, 4, 1), (1, 4, 1), (4, 5, 1), (5, 2, 1), (5, 3, 1)],
        [0, 1, 2, 3],
    )
    .unwrap()
}

/// All-pairs distances over the live working graph, indexed by vertex id.
pub fn floyd(g: &WorkingGraph) -> Vec<Vec<u64>> {
    let n = g.capacity();
    let mut d = vec![vec![INF; n]; n];
    for v in g.vertices() {
        d[v][v] = 0;
    }
    for (_, e) in g.edges() {
        let [a, b] = e.ends;
        d[a][b] = d[a][b].min(e.weight);
        d[b][a] = d[b][a].min(e.weight);
    }
    for k in 0..n {
        for i in 0..n {
            if d[i][k] == INF {
                continue;
            }
            for j in 0..n {
                if d[k][j] != INF && d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Minimum spanning tree weight of the subgraph induced by `keep`, or
/// `None` if that subgraph is disconnected.
fn induced_mst(inst: &Instance, keep: &[bool]) -> Option<u64> {
    let mut edges: Vec<_> = inst
        .edges()
        .iter()
        .filter(|e| keep[e.u] && keep[e.v])
        .map(|e| (e.weight, e.u, e.v))
        .collect();
    edges.sort_unstable();
    let mut parent: Vec<usize> = (0..inst.vertex_count()).collect();
    let mut components = keep.iter().filter(|&&k| k).count();
    let mut total = 0;
    for (w, u, v) in edges {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a != b {
            parent[a] = b;
            total += w;
            components -= 1;
        }
    }
    (components <= 1).then_some(total)
}

/// Optimum by enumerating the Steiner vertex set: an optimal tree is a
/// spanning tree of the subgraph induced by its vertices.
pub fn brute_force_optimum(inst: &Instance) -> Option<u64> {
    let n = inst.vertex_count();
    let steiner: Vec<VertexId> = (0..n).filter(|&v| !inst.is_terminal(v)).collect();
    assert!(
        steiner.len() <= 20,
        "too many Steiner vertices to enumerate"
    );
    let mut best = None;
    for mask in 0u32..(1 << steiner.len()) {
        let mut keep: Vec<bool> = (0..n).map(|v| inst.is_terminal(v)).collect();
        for (i, &s) in steiner.iter().enumerate() {
            keep[s] = mask >> i & 1 == 1;
        }
        if let Some(w) = induced_mst(inst, &keep) {
            best = Some(best.map_or(w, |b: u64| b.min(w)));
        }
    }
    best
}

/// Brute-force optimum of the live part of a working graph.
pub fn working_brute_optimum(g: &WorkingGraph) -> Option<u64> {
    let (inst, _) = g.to_instance().ok()?;
    brute_force_optimum(&inst)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteStar {
    pub center: VertexId,
    /// Sorted.
    pub terminals: Vec<VertexId>,
    pub num: u64,
    pub den: u64,
}

impl BruteStar {
    fn cmp_ratio(&self, other: &BruteStar) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }

    /// Lower ratio, more terminals, smaller center, smaller terminal ids.
    fn better_than(&self, other: &BruteStar) -> bool {
        self.cmp_ratio(other)
            .then(other.terminals.len().cmp(&self.terminals.len()))
            .then(self.center.cmp(&other.center))
            .then_with(|| self.terminals.cmp(&other.terminals))
            == Ordering::Less
    }
}

/// Best basic star of the metric closure, by enumerating every center and
/// terminal subset of size at least two.
pub fn brute_best_star(g: &WorkingGraph) -> Option<BruteStar> {
    let d = floyd(g);
    let terminals: Vec<VertexId> = g.terminals().collect();
    let mut best: Option<BruteStar> = None;
    for c in g.vertices() {
        let reach: Vec<VertexId> = terminals
            .iter()
            .copied()
            .filter(|&t| d[c][t] != INF)
            .collect();
        for mask in 1u32..(1 << reach.len()) {
            if mask.count_ones() < 2 {
                continue;
            }
            let chosen: Vec<VertexId> = (0..reach.len())
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| reach[i])
                .collect();
            let star = BruteStar {
                center: c,
                num: chosen.iter().map(|&t| d[c][t]).sum(),
                den: chosen.len() as u64 - 1,
                terminals: chosen,
            };
            if best.as_ref().is_none_or(|b| star.better_than(b)) {
                best = Some(star);
            }
        }
    }
    best
}

/// Minimum spanning tree weight of the metric closure over `vertices`.
pub fn metric_mst(d: &[Vec<u64>], vertices: &[VertexId]) -> Option<u64> {
    let k = vertices.len();
    if k == 0 {
        return Some(0);
    }
    let mut in_tree = vec![false; k];
    let mut key = vec![INF; k];
    key[0] = 0;
    let mut total = 0;
    for _ in 0..k {
        let i = (0..k).filter(|&i| !in_tree[i]).min_by_key(|&i| key[i])?;
        if key[i] == INF {
            return None;
        }
        in_tree[i] = true;
        total += key[i];
        for j in 0..k {
            key[j] = key[j].min(d[vertices[i]][vertices[j]]);
        }
    }
    Some(total)
}
