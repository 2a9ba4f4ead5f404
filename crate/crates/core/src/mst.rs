//! Terminal spanning tree heuristics on a [`WorkingGraph`].
//!
//! [`mst_terminals`] builds the Voronoi regions of the terminals and connects
//! neighbouring regions through their cheapest boundary edges. The result is
//! a minimum spanning tree of the terminal distance graph realised as a
//! subgraph, at most twice the optimum. [`mst_plus`] repeats it after
//! promoting the branching Steiner vertices of the current tree.

use std::collections::BTreeSet;

use crate::dsu::UnionFind;
use crate::error::{Error, Result};
use crate::graph::{VertexId, WorkingEdgeId, WorkingGraph};
use crate::paths::{voronoi_partition, VoronoiPartition};

/// A tree in the working graph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Subtree {
    /// Sorted working edge ids.
    pub edges: Vec<WorkingEdgeId>,
    pub weight: u64,
}

impl Subtree {
    pub fn from_edges(g: &WorkingGraph, edges: impl IntoIterator<Item = WorkingEdgeId>) -> Self {
        let mut edges: Vec<WorkingEdgeId> = edges.into_iter().collect();
        edges.sort_unstable();
        edges.dedup();
        let weight = g.weight_of(&edges);
        Self { edges, weight }
    }

    /// Vertices with their degree in the tree, by vertex id.
    pub fn degrees(&self, g: &WorkingGraph) -> Vec<(VertexId, usize)> {
        let mut ends: Vec<VertexId> = self
            .edges
            .iter()
            .flat_map(|&e| g.edge(e).expect("live edge").ends)
            .collect();
        ends.sort_unstable();
        let mut out: Vec<(VertexId, usize)> = Vec::new();
        for v in ends {
            match out.last_mut() {
                Some((last, d)) if *last == v => *d += 1,
                _ => out.push((v, 1)),
            }
        }
        out
    }
}

/// Kruskal over `edges`, lightest first, ties by edge id.
pub fn spanning_forest(g: &WorkingGraph, edges: &[WorkingEdgeId]) -> Vec<WorkingEdgeId> {
    let mut order = edges.to_vec();
    order.sort_unstable_by_key(|&e| (g.weight(e), e));
    order.dedup();
    let mut uf = UnionFind::new(g.capacity());
    order
        .into_iter()
        .filter(|&e| {
            let [a, b] = g.edge(e).expect("live edge").ends;
            uf.union(a, b)
        })
        .collect()
}

/// Repeatedly removes leaves for which `keep` is false.
pub fn prune_leaves(
    g: &WorkingGraph,
    edges: &[WorkingEdgeId],
    keep: impl Fn(VertexId) -> bool,
) -> Vec<WorkingEdgeId> {
    let mut degree = vec![0usize; g.capacity()];
    let mut incident: Vec<Vec<WorkingEdgeId>> = vec![Vec::new(); g.capacity()];
    for &e in edges {
        for v in g.edge(e).expect("live edge").ends {
            degree[v] += 1;
            incident[v].push(e);
        }
    }
    let mut removed = BTreeSet::new();
    let mut stack: Vec<VertexId> = (0..g.capacity())
        .filter(|&v| degree[v] == 1 && !keep(v))
        .collect();
    while let Some(v) = stack.pop() {
        if degree[v] != 1 {
            continue;
        }
        let e = *incident[v]
            .iter()
            .find(|e| !removed.contains(*e))
            .expect("leaf has a live edge");
        removed.insert(e);
        degree[v] = 0;
        let w = g.edge(e).expect("live edge").other(v);
        degree[w] -= 1;
        if degree[w] == 1 && !keep(w) {
            stack.push(w);
        }
    }
    edges
        .iter()
        .copied()
        .filter(|e| !removed.contains(e))
        .collect()
}

struct AuxEdge {
    weight: u64,
    a: VertexId,
    b: VertexId,
    crossing: WorkingEdgeId,
}

fn sorted_terminals(terminals: &[VertexId]) -> Vec<VertexId> {
    let mut t = terminals.to_vec();
    t.sort_unstable();
    t.dedup();
    t
}

/// Minimum spanning tree of the Voronoi boundary graph: each chosen aux edge
/// `(vor(u), vor(v))` with its weight and the crossing working edge.
fn aux_mst(
    g: &WorkingGraph,
    terminals: &[VertexId],
    vor: &VoronoiPartition,
) -> Result<Vec<AuxEdge>> {
    let mut aux: Vec<AuxEdge> = g
        .edges()
        .filter_map(|(id, e)| {
            let [u, v] = e.ends;
            let (bu, bv) = (vor.nearest[u]?, vor.nearest[v]?);
            (bu != bv).then(|| AuxEdge {
                weight: vor.dist[u] + e.weight + vor.dist[v],
                a: bu.min(bv),
                b: bu.max(bv),
                crossing: id,
            })
        })
        .collect();
    aux.sort_unstable_by_key(|x| (x.weight, x.a, x.b, x.crossing));
    let mut uf = UnionFind::new(g.capacity());
    let chosen: Vec<AuxEdge> = aux.into_iter().filter(|x| uf.union(x.a, x.b)).collect();
    if chosen.len() + 1 < terminals.len() {
        let root = terminals[0];
        let lost = terminals
            .iter()
            .find(|&&t| !uf.same(t, root))
            .expect("some terminal is cut off");
        return Err(Error::Infeasible(format!(
            "terminals {} and {} are not connected",
            root + 1,
            lost + 1
        )));
    }
    Ok(chosen)
}

/// Weight of the terminal distance graph's minimum spanning tree.
pub fn aux_mst_weight(g: &WorkingGraph, terminals: &[VertexId]) -> Result<u64> {
    let terminals = sorted_terminals(terminals);
    if terminals.len() < 2 {
        return Ok(0);
    }
    let vor = voronoi_partition(g, &terminals);
    Ok(aux_mst(g, &terminals, &vor)?.iter().map(|x| x.weight).sum())
}

/// The Voronoi-based terminal MST, expanded into the working graph and
/// cleaned up: MST of the union of the certified paths, then non-terminal
/// leaves pruned.
pub fn mst_terminals(g: &WorkingGraph, terminals: &[VertexId]) -> Result<Subtree> {
    let terminals = sorted_terminals(terminals);
    if terminals.len() < 2 {
        return Ok(Subtree::default());
    }
    let vor = voronoi_partition(g, &terminals);
    let chosen = aux_mst(g, &terminals, &vor)?;
    let mut union = BTreeSet::new();
    for x in &chosen {
        let [u, v] = g.edge(x.crossing).expect("live edge").ends;
        union.insert(x.crossing);
        union.extend(vor.path_to_base(g, u));
        union.extend(vor.path_to_base(g, v));
    }
    let union: Vec<WorkingEdgeId> = union.into_iter().collect();
    let tree = spanning_forest(g, &union);
    let tree = prune_leaves(g, &tree, |v| terminals.binary_search(&v).is_ok());
    Ok(Subtree::from_edges(g, tree))
}

/// Iterated [`mst_terminals`]: while the weight strictly drops, the Steiner
/// vertices of degree at least three in the current tree join the terminal
/// set for the next run. The branch set is rebuilt from each new tree.
pub fn mst_plus(g: &WorkingGraph, terminals: &[VertexId]) -> Result<Subtree> {
    let terminals = sorted_terminals(terminals);
    let start = mst_terminals(g, &terminals)?;
    improve_by_branching(g, &terminals, &terminals, start)
}

/// The improvement loop of [`mst_plus`] from an arbitrary start tree.
/// Every rerun connects `seeds` plus the branch vertices and is then pruned
/// down to `required`, so the result never weighs more than `start`.
pub fn improve_by_branching(
    g: &WorkingGraph,
    seeds: &[VertexId],
    required: &[VertexId],
    start: Subtree,
) -> Result<Subtree> {
    let required = sorted_terminals(required);
    let is_required = |v: VertexId| required.binary_search(&v).is_ok();
    let mut best = start;
    loop {
        let mut extended = sorted_terminals(seeds);
        let branch: Vec<VertexId> = best
            .degrees(g)
            .into_iter()
            .filter(|&(v, d)| d >= 3 && !is_required(v) && extended.binary_search(&v).is_err())
            .map(|(v, _)| v)
            .collect();
        if branch.is_empty() {
            return Ok(best);
        }
        extended.extend(branch);
        let candidate = mst_terminals(g, &extended)?;
        let candidate = Subtree::from_edges(g, prune_leaves(g, &candidate.edges, is_required));
        if candidate.weight >= best.weight {
            return Ok(best);
        }
        best = candidate;
    }
}
