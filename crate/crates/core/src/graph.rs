use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use crate::dsu::UnionFind;
use crate::error::{Error, Result};

pub type VertexId = usize;
/// Index of an edge in the original [`Instance`].
pub type EdgeId = usize;
/// Index of an edge slot in a [`WorkingGraph`].
pub type WorkingEdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub weight: u64,
}

impl Edge {
    pub fn other(&self, x: VertexId) -> VertexId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// An immutable Steiner tree problem: a simple weighted graph plus terminals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    vertex_count: usize,
    edges: Vec<Edge>,
    terminals: Vec<VertexId>,
    is_terminal: Vec<bool>,
}

impl Instance {
    /// Builds an instance from 0-based edges. Parallel edges collapse onto
    /// the first occurrence and keep the minimum weight.
    pub fn new(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (VertexId, VertexId, u64)>,
        terminals: impl IntoIterator<Item = VertexId>,
    ) -> Result<Self> {
        let mut index: BTreeMap<(VertexId, VertexId), usize> = BTreeMap::new();
        let mut kept: Vec<Edge> = Vec::new();
        for (u, v, weight) in edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::InvalidArgument(format!(
                    "edge {u}-{v} out of range for {vertex_count} vertices"
                )));
            }
            if u == v {
                return Err(Error::InvalidArgument(format!("loop at vertex {u}")));
            }
            let key = (u.min(v), u.max(v));
            match index.get(&key) {
                Some(&i) => kept[i].weight = kept[i].weight.min(weight),
                None => {
                    index.insert(key, kept.len());
                    kept.push(Edge {
                        u: key.0,
                        v: key.1,
                        weight,
                    });
                }
            }
        }
        let mut is_terminal = vec![false; vertex_count];
        for t in terminals {
            if t >= vertex_count {
                return Err(Error::InvalidArgument(format!(
                    "terminal {t} out of range for {vertex_count} vertices"
                )));
            }
            is_terminal[t] = true;
        }
        let terminals: Vec<VertexId> = (0..vertex_count).filter(|&v| is_terminal[v]).collect();
        if terminals.is_empty() {
            return Err(Error::InvalidArgument("instance has no terminals".into()));
        }
        Ok(Self {
            vertex_count,
            edges: kept,
            terminals,
            is_terminal,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    /// Sorted terminal list.
    pub fn terminals(&self) -> &[VertexId] {
        &self.terminals
    }

    pub fn is_terminal(&self, v: VertexId) -> bool {
        self.is_terminal[v]
    }

    pub fn total_weight(&self, ids: impl IntoIterator<Item = EdgeId>) -> u64 {
        ids.into_iter().map(|e| self.edges[e].weight).sum()
    }
}

/// A tree of original instance edges spanning every terminal.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SolutionTree {
    /// Sorted original edge ids.
    pub edges: Vec<EdgeId>,
    pub weight: u64,
}

/// Turns an arbitrary set of bought edges into a Steiner tree.
///
/// Keeps a minimum spanning forest of the bought subgraph, drops every
/// component without the terminals, and then strips non-terminal leaves.
pub fn finalize_solution(
    inst: &Instance,
    bought: impl IntoIterator<Item = EdgeId>,
) -> Result<SolutionTree> {
    let ids: BTreeSet<EdgeId> = bought.into_iter().collect();
    let mut order: Vec<EdgeId> = ids.into_iter().collect();
    order.sort_by_key(|&e| (inst.edges[e].weight, e));

    let n = inst.vertex_count;
    let mut uf = UnionFind::new(n);
    let mut forest = Vec::new();
    for e in order {
        let edge = inst.edges[e];
        if uf.union(edge.u, edge.v) {
            forest.push(e);
        }
    }
    let root = inst.terminals[0];
    if let Some(&t) = inst.terminals.iter().find(|&&t| !uf.same(t, root)) {
        return Err(Error::Infeasible(format!(
            "terminals {} and {} are not connected by the bought edges",
            root + 1,
            t + 1
        )));
    }
    forest.retain(|&e| uf.same(inst.edges[e].u, root));

    let mut degree = vec![0usize; n];
    let mut incident: Vec<Vec<EdgeId>> = vec![Vec::new(); n];
    for &e in &forest {
        let edge = inst.edges[e];
        degree[edge.u] += 1;
        degree[edge.v] += 1;
        incident[edge.u].push(e);
        incident[edge.v].push(e);
    }
    let mut removed = vec![false; inst.edges.len()];
    let mut queue: VecDeque<VertexId> = (0..n)
        .filter(|&v| degree[v] == 1 && !inst.is_terminal[v])
        .collect();
    while let Some(v) = queue.pop_front() {
        if degree[v] != 1 {
            continue;
        }
        let e = *incident[v]
            .iter()
            .find(|&&e| !removed[e])
            .expect("leaf has one live edge");
        removed[e] = true;
        degree[v] = 0;
        let w = inst.edges[e].other(v);
        degree[w] -= 1;
        if degree[w] == 1 && !inst.is_terminal[w] {
            queue.push_back(w);
        }
    }
    let mut edges: Vec<EdgeId> = forest.into_iter().filter(|&e| !removed[e]).collect();
    edges.sort_unstable();
    let weight = inst.total_weight(edges.iter().copied());
    Ok(SolutionTree { edges, weight })
}

/// Returns true when `edges` form a tree spanning every terminal of `inst`.
pub fn is_steiner_tree(inst: &Instance, edges: &[EdgeId]) -> bool {
    let mut uf = UnionFind::new(inst.vertex_count);
    for &e in edges {
        let edge = inst.edges[e];
        if !uf.union(edge.u, edge.v) {
            return false;
        }
    }
    let root = inst.terminals[0];
    inst.terminals.iter().all(|&t| uf.same(t, root))
}

/// An edge of the working graph together with the original edges it stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkingEdge {
    pub ends: [VertexId; 2],
    pub weight: u64,
    /// Original edges whose weights sum to `weight`.
    pub path: Vec<EdgeId>,
}

impl WorkingEdge {
    pub fn other(&self, v: VertexId) -> VertexId {
        if self.ends[0] == v {
            self.ends[1]
        } else {
            self.ends[0]
        }
    }

    /// Parallel-edge preference: lighter first, then smaller original id.
    fn key(&self) -> (u64, EdgeId) {
        (
            self.weight,
            self.path.iter().copied().min().unwrap_or(EdgeId::MAX),
        )
    }
}

/// Mutable view of an [`Instance`] under contractions, suppressions and deletions.
///
/// Vertex ids stay the original ids; a contraction keeps one endpoint as the
/// representative of the merged vertex. Every working edge remembers the
/// original edges it represents, so any working subgraph maps back to the
/// instance.
#[derive(Debug, Clone)]
pub struct WorkingGraph {
    instance: Arc<Instance>,
    adj: Vec<BTreeMap<VertexId, WorkingEdgeId>>,
    edges: Vec<Option<WorkingEdge>>,
    terminal: Vec<bool>,
    alive: Vec<bool>,
    merged_into: Vec<VertexId>,
    bought: Vec<EdgeId>,
    bought_weight: u64,
    alive_count: usize,
    edge_count: usize,
    terminal_count: usize,
}

impl WorkingGraph {
    pub fn new(instance: Arc<Instance>) -> Self {
        let n = instance.vertex_count;
        let mut adj = vec![BTreeMap::new(); n];
        let mut edges = Vec::with_capacity(instance.edges.len());
        for (id, e) in instance.edges.iter().enumerate() {
            adj[e.u].insert(e.v, id);
            adj[e.v].insert(e.u, id);
            edges.push(Some(WorkingEdge {
                ends: [e.u, e.v],
                weight: e.weight,
                path: vec![id],
            }));
        }
        Self {
            terminal: instance.is_terminal.clone(),
            alive: vec![true; n],
            merged_into: (0..n).collect(),
            bought: Vec::new(),
            bought_weight: 0,
            alive_count: n,
            edge_count: edges.len(),
            terminal_count: instance.terminals.len(),
            adj,
            edges,
            instance,
        }
    }

    pub fn from_instance(instance: &Instance) -> Self {
        Self::new(Arc::new(instance.clone()))
    }

    pub fn instance(&self) -> &Arc<Instance> {
        &self.instance
    }

    /// Upper bound on vertex ids (the original vertex count).
    pub fn capacity(&self) -> usize {
        self.adj.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.alive_count
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn terminal_count(&self) -> usize {
        self.terminal_count
    }

    pub fn is_alive(&self, v: VertexId) -> bool {
        self.alive[v]
    }

    pub fn is_terminal(&self, v: VertexId) -> bool {
        self.alive[v] && self.terminal[v]
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.adj.len()).filter(move |&v| self.alive[v])
    }

    pub fn terminals(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.adj.len()).filter(move |&v| self.alive[v] && self.terminal[v])
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    /// `(neighbor, edge)` pairs in increasing neighbor order.
    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = (VertexId, WorkingEdgeId)> + '_ {
        self.adj[v].iter().map(|(&n, &e)| (n, e))
    }

    pub fn edge(&self, e: WorkingEdgeId) -> Option<&WorkingEdge> {
        self.edges.get(e).and_then(Option::as_ref)
    }

    pub fn weight(&self, e: WorkingEdgeId) -> u64 {
        self.edges[e].as_ref().expect("live working edge").weight
    }

    pub fn edge_between(&self, a: VertexId, b: VertexId) -> Option<WorkingEdgeId> {
        self.adj.get(a).and_then(|m| m.get(&b)).copied()
    }

    /// Live edges in increasing id order.
    pub fn edges(&self) -> impl Iterator<Item = (WorkingEdgeId, &WorkingEdge)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.as_ref().map(|e| (i, e)))
    }

    /// Original edges committed to the solution so far.
    pub fn bought(&self) -> &[EdgeId] {
        &self.bought
    }

    pub fn bought_weight(&self) -> u64 {
        self.bought_weight
    }

    /// The working vertex that original vertex `v` has been merged into.
    /// Deleted vertices map to themselves.
    pub fn representative(&self, mut v: VertexId) -> VertexId {
        while self.merged_into[v] != v {
            v = self.merged_into[v];
        }
        v
    }

    fn compress(&mut self, v: VertexId) -> VertexId {
        let root = self.representative(v);
        let mut x = v;
        while self.merged_into[x] != root && x != root {
            let next = self.merged_into[x];
            self.merged_into[x] = root;
            x = next;
        }
        root
    }

    /// Original vertices merged into working vertex `v`.
    pub fn members(&self, v: VertexId) -> Vec<VertexId> {
        (0..self.adj.len())
            .filter(|&x| self.representative(x) == v)
            .collect()
    }

    fn take_edge(&mut self, e: WorkingEdgeId) -> Option<WorkingEdge> {
        let edge = self.edges.get_mut(e)?.take()?;
        let [a, b] = edge.ends;
        self.adj[a].remove(&b);
        self.adj[b].remove(&a);
        self.edge_count -= 1;
        Some(edge)
    }

    /// Places `edge` into slot `id`, resolving a parallel edge by keeping the
    /// preferred one. Returns the surviving edge id.
    fn attach(&mut self, id: WorkingEdgeId, edge: WorkingEdge) -> WorkingEdgeId {
        let [a, b] = edge.ends;
        debug_assert_ne!(a, b);
        if let Some(&old) = self.adj[a].get(&b) {
            let old_key = self.edges[old].as_ref().expect("live parallel").key();
            if edge.key() < old_key {
                self.edges[old] = None;
                self.adj[a].insert(b, id);
                self.adj[b].insert(a, id);
                self.edges[id] = Some(edge);
                id
            } else {
                self.edges[id] = None;
                old
            }
        } else {
            self.adj[a].insert(b, id);
            self.adj[b].insert(a, id);
            self.edges[id] = Some(edge);
            self.edge_count += 1;
            id
        }
    }

    /// Contracts working edge `e`. When `buy` is set its original edges are
    /// committed to the solution. Returns the merged vertex.
    pub fn contract_edge(&mut self, e: WorkingEdgeId, buy: bool) -> Result<VertexId> {
        let edge = self
            .take_edge(e)
            .ok_or_else(|| Error::InvalidArgument(format!("no working edge {e}")))?;
        let [a, b] = edge.ends;
        if buy {
            self.bought_weight += edge.weight;
            self.bought.extend_from_slice(&edge.path);
        }
        let (keep, gone) = if (self.adj[a].len(), std::cmp::Reverse(a))
            >= (self.adj[b].len(), std::cmp::Reverse(b))
        {
            (a, b)
        } else {
            (b, a)
        };
        let moved = std::mem::take(&mut self.adj[gone]);
        for (nbr, id) in moved {
            self.adj[nbr].remove(&gone);
            let mut edge = self.edges[id].take().expect("live incident edge");
            self.edge_count -= 1;
            edge.ends = [keep.min(nbr), keep.max(nbr)];
            self.attach(id, edge);
        }
        if self.terminal[gone] {
            if self.terminal[keep] {
                self.terminal_count -= 1;
            }
            self.terminal[keep] = true;
        }
        self.terminal[gone] = false;
        self.alive[gone] = false;
        self.alive_count -= 1;
        self.merged_into[gone] = keep;
        Ok(keep)
    }

    /// Contracts the edge currently joining the working vertices that `a`
    /// and `b` belong to. A no-op when they are already merged.
    pub fn contract_between(&mut self, a: VertexId, b: VertexId, buy: bool) -> Result<VertexId> {
        let (a, b) = (self.compress(a), self.compress(b));
        if a == b {
            return Ok(a);
        }
        let e = self.edge_between(a, b).ok_or_else(|| {
            Error::InvalidArgument(format!("vertices {a} and {b} are not adjacent"))
        })?;
        self.contract_edge(e, buy)
    }

    /// Replaces a degree-2 Steiner vertex by a single edge between its
    /// neighbors. Returns the id of the edge that now joins them.
    pub fn suppress_vertex(&mut self, v: VertexId) -> Result<WorkingEdgeId> {
        if !self.alive[v] || self.terminal[v] || self.adj[v].len() != 2 {
            return Err(Error::InvalidArgument(format!(
                "vertex {v} is not a live degree-2 Steiner vertex"
            )));
        }
        let incident: Vec<WorkingEdgeId> = self.adj[v].values().copied().collect();
        let first = self.take_edge(incident[0]).expect("live");
        let second = self.take_edge(incident[1]).expect("live");
        let (x, y) = (first.other(v), second.other(v));
        let mut path = first.path;
        path.extend(second.path);
        self.alive[v] = false;
        self.alive_count -= 1;
        let id = self.edges.len();
        self.edges.push(None);
        Ok(self.attach(
            id,
            WorkingEdge {
                ends: [x.min(y), x.max(y)],
                weight: first.weight + second.weight,
                path,
            },
        ))
    }

    pub fn delete_edge(&mut self, e: WorkingEdgeId) -> Result<()> {
        self.take_edge(e)
            .map(|_| ())
            .ok_or_else(|| Error::InvalidArgument(format!("no working edge {e}")))
    }

    /// Removes a Steiner vertex together with its incident edges.
    pub fn delete_vertex(&mut self, v: VertexId) -> Result<()> {
        if !self.alive[v] || self.terminal[v] {
            return Err(Error::InvalidArgument(format!(
                "vertex {v} is not a live Steiner vertex"
            )));
        }
        let incident: Vec<WorkingEdgeId> = self.adj[v].values().copied().collect();
        for e in incident {
            self.take_edge(e);
        }
        self.alive[v] = false;
        self.alive_count -= 1;
        Ok(())
    }

    /// Maps working edges back to the instance and finalizes them together
    /// with everything bought so far.
    pub fn solution_from(&self, edges: &[WorkingEdgeId]) -> Result<SolutionTree> {
        let extra = edges.iter().flat_map(|&e| {
            self.edges[e]
                .as_ref()
                .expect("live working edge")
                .path
                .iter()
                .copied()
        });
        finalize_solution(&self.instance, self.bought.iter().copied().chain(extra))
    }

    /// Sum of working edge weights.
    pub fn weight_of(&self, edges: &[WorkingEdgeId]) -> u64 {
        edges.iter().map(|&e| self.weight(e)).sum()
    }

    /// A standalone instance for the live part of the graph. The second
    /// value maps new vertex ids to working vertex ids.
    pub fn to_instance(&self) -> Result<(Instance, Vec<VertexId>)> {
        let mapping: Vec<VertexId> = self.vertices().collect();
        let mut index = vec![usize::MAX; self.adj.len()];
        for (i, &v) in mapping.iter().enumerate() {
            index[v] = i;
        }
        let edges = self
            .edges()
            .map(|(_, e)| (index[e.ends[0]], index[e.ends[1]], e.weight));
        let terminals = self.terminals().map(|t| index[t]);
        Ok((Instance::new(mapping.len(), edges, terminals)?, mapping))
    }

    /// Checks the structural invariants; used by tests.
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidArgument(m));
        let mut count = 0;
        for (id, e) in self.edges() {
            count += 1;
            let [a, b] = e.ends;
            if a == b || !self.alive[a] || !self.alive[b] {
                return fail(format!("edge {id} has bad endpoints {a}-{b}"));
            }
            if self.adj[a].get(&b) != Some(&id) || self.adj[b].get(&a) != Some(&id) {
                return fail(format!("edge {id} missing from adjacency"));
            }
            if self.instance.total_weight(e.path.iter().copied()) != e.weight {
                return fail(format!("edge {id} provenance weight mismatch"));
            }
        }
        if count != self.edge_count {
            return fail(format!("edge count {} != {count}", self.edge_count));
        }
        let adj_total: usize = self.adj.iter().map(BTreeMap::len).sum();
        if adj_total != 2 * count {
            return fail("adjacency has stale entries".into());
        }
        if self.terminals().count() != self.terminal_count {
            return fail("terminal count mismatch".into());
        }
        if self.vertices().count() != self.alive_count {
            return fail("vertex count mismatch".into());
        }
        Ok(())
    }
}
