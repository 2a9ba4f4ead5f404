//! Dijkstra scans over a [`WorkingGraph`].
//!
//! [`Dijkstra`] owns reusable scratch arrays and counts settled vertices;
//! a [`Scan`] borrows it and yields vertices lazily in nondecreasing
//! distance, so callers can stop as soon as they have what they need.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::graph::{VertexId, WorkingEdgeId, WorkingGraph};

pub const UNREACHED: u64 = u64::MAX;

#[derive(Debug, Clone)]
pub struct Dijkstra {
    dist: Vec<u64>,
    parent: Vec<Option<WorkingEdgeId>>,
    seen: Vec<u32>,
    settled: Vec<u32>,
    epoch: u32,
    heap: BinaryHeap<Reverse<(u64, VertexId)>>,
    visited: u64,
}

impl Dijkstra {
    pub fn new(capacity: usize) -> Self {
        Self {
            dist: vec![UNREACHED; capacity],
            parent: vec![None; capacity],
            seen: vec![0; capacity],
            settled: vec![0; capacity],
            epoch: 0,
            heap: BinaryHeap::new(),
            visited: 0,
        }
    }

    /// Total number of vertices settled by every scan so far.
    pub fn visited(&self) -> u64 {
        self.visited
    }

    fn begin(&mut self, capacity: usize) {
        if self.dist.len() < capacity {
            *self = Self {
                visited: self.visited,
                ..Self::new(capacity)
            };
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.seen.fill(0);
            self.settled.fill(0);
            self.epoch = 1;
        }
        self.heap.clear();
    }

    /// Starts a scan seeded with `(vertex, offset)` sources. Vertices farther
    /// than `cutoff` are never settled.
    pub fn scan<'a>(
        &'a mut self,
        g: &'a WorkingGraph,
        sources: &[(VertexId, u64)],
        cutoff: Option<u64>,
    ) -> Scan<'a> {
        self.scan_excluding(g, sources, cutoff, None)
    }

    /// Like [`Dijkstra::scan`] but pretends `excluded` is not in the graph.
    pub fn scan_excluding<'a>(
        &'a mut self,
        g: &'a WorkingGraph,
        sources: &[(VertexId, u64)],
        cutoff: Option<u64>,
        excluded: Option<WorkingEdgeId>,
    ) -> Scan<'a> {
        self.begin(g.capacity());
        for &(v, offset) in sources {
            debug_assert!(g.is_alive(v));
            if !self.reached(v) || offset < self.dist[v] {
                self.seen[v] = self.epoch;
                self.dist[v] = offset;
                self.parent[v] = None;
                self.heap.push(Reverse((offset, v)));
            }
        }
        Scan {
            engine: self,
            g,
            cutoff,
            excluded,
            settled_here: 0,
        }
    }

    fn reached(&self, v: VertexId) -> bool {
        self.seen[v] == self.epoch
    }

    fn is_settled(&self, v: VertexId) -> bool {
        self.settled[v] == self.epoch
    }

    /// Full single-source distances; unreachable vertices get [`UNREACHED`].
    pub fn distances_from(&mut self, g: &WorkingGraph, source: VertexId) -> Vec<u64> {
        let mut out = vec![UNREACHED; g.capacity()];
        let mut scan = self.scan(g, &[(source, 0)], None);
        for (v, d) in scan.by_ref() {
            out[v] = d;
        }
        out
    }
}

/// A lazily evaluated Dijkstra run. Dropping it early truncates the search.
pub struct Scan<'a> {
    engine: &'a mut Dijkstra,
    g: &'a WorkingGraph,
    cutoff: Option<u64>,
    excluded: Option<WorkingEdgeId>,
    settled_here: u64,
}

impl Scan<'_> {
    /// Distance of a settled vertex.
    pub fn distance(&self, v: VertexId) -> Option<u64> {
        self.engine.is_settled(v).then(|| self.engine.dist[v])
    }

    pub fn is_settled(&self, v: VertexId) -> bool {
        self.engine.is_settled(v)
    }

    /// Edge through which a settled vertex was reached; `None` for sources.
    pub fn parent_edge(&self, v: VertexId) -> Option<WorkingEdgeId> {
        if self.engine.is_settled(v) {
            self.engine.parent[v]
        } else {
            None
        }
    }

    /// Edges of the shortest path from the source set to settled vertex `v`,
    /// listed from `v` backwards.
    pub fn path_to(&self, mut v: VertexId) -> Vec<WorkingEdgeId> {
        let mut path = Vec::new();
        while let Some(e) = self.parent_edge(v) {
            path.push(e);
            v = self.g.edge(e).expect("live edge").other(v);
        }
        path
    }

    /// Vertices settled by this scan.
    pub fn settled_count(&self) -> u64 {
        self.settled_here
    }
}

impl Iterator for Scan<'_> {
    type Item = (VertexId, u64);

    fn next(&mut self) -> Option<Self::Item> {
        let engine = &mut *self.engine;
        while let Some(Reverse((d, v))) = engine.heap.pop() {
            if engine.is_settled(v) || d > engine.dist[v] {
                continue;
            }
            if self.cutoff.is_some_and(|c| d > c) {
                engine.heap.clear();
                return None;
            }
            engine.settled[v] = engine.epoch;
            engine.visited += 1;
            self.settled_here += 1;
            for (w, e) in self.g.neighbors(v) {
                if Some(e) == self.excluded || engine.is_settled(w) {
                    continue;
                }
                let nd = d + self.g.weight(e);
                if !engine.reached(w) || nd < engine.dist[w] {
                    engine.seen[w] = engine.epoch;
                    engine.dist[w] = nd;
                    engine.parent[w] = Some(e);
                    engine.heap.push(Reverse((nd, w)));
                }
            }
            return Some((v, d));
        }
        None
    }
}

/// Nearest-terminal labelling of every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoronoiPartition {
    /// Nearest terminal, `None` for dead or unreachable vertices.
    pub nearest: Vec<Option<VertexId>>,
    /// Distance to `nearest`; [`UNREACHED`] when there is none.
    pub dist: Vec<u64>,
    /// Edge towards `nearest` on a shortest path.
    pub parent: Vec<Option<WorkingEdgeId>>,
}

impl VoronoiPartition {
    /// Edges from `v` back to its region's terminal.
    pub fn path_to_base(&self, g: &WorkingGraph, mut v: VertexId) -> Vec<WorkingEdgeId> {
        let mut path = Vec::new();
        while let Some(e) = self.parent[v] {
            path.push(e);
            v = g.edge(e).expect("live edge").other(v);
        }
        path
    }
}

/// Multi-source Dijkstra from `terminals`; ties between equally near
/// terminals go to the smaller terminal id.
pub fn voronoi_partition(g: &WorkingGraph, terminals: &[VertexId]) -> VoronoiPartition {
    let n = g.capacity();
    let mut nearest: Vec<Option<VertexId>> = vec![None; n];
    let mut dist = vec![UNREACHED; n];
    let mut parent = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &t in terminals {
        if nearest[t].is_none_or(|b| t < b) {
            nearest[t] = Some(t);
            dist[t] = 0;
            heap.push(Reverse((0u64, t, t)));
        }
    }
    while let Some(Reverse((d, base, v))) = heap.pop() {
        if done[v] || (d, Some(base)) != (dist[v], nearest[v]) {
            continue;
        }
        done[v] = true;
        for (w, e) in g.neighbors(v) {
            if done[w] || nearest[w] == Some(w) {
                continue;
            }
            let nd = d + g.weight(e);
            if (nd, base) < (dist[w], nearest[w].unwrap_or(usize::MAX)) {
                dist[w] = nd;
                nearest[w] = Some(base);
                parent[w] = Some(e);
                heap.push(Reverse((nd, base, w)));
            }
        }
    }
    VoronoiPartition {
        nearest,
        dist,
        parent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Instance;

    fn path_graph() -> WorkingGraph {
        // a=0 -1- b=1 -2- c=2
        WorkingGraph::from_instance(&Instance::new(3, [(0, 1, 1), (1, 2, 2)], [0, 2]).unwrap())
    }

    #[test]
    fn streams_in_distance_order() {
        let g = path_graph();
        let mut dj = Dijkstra::new(3);
        let got: Vec<_> = dj.scan(&g, &[(0, 0)], None).collect();
        assert_eq!(got, vec![(0, 0), (1, 1), (2, 3)]);
        assert_eq!(dj.visited(), 3);
    }

    #[test]
    fn cutoff_truncates() {
        let g = path_graph();
        let mut dj = Dijkstra::new(3);
        let got: Vec<_> = dj.scan(&g, &[(0, 0)], Some(1)).collect();
        assert_eq!(got, vec![(0, 0), (1, 1)]);
        assert_eq!(dj.visited(), 2);
    }

    #[test]
    fn multi_source() {
        let g = path_graph();
        let mut dj = Dijkstra::new(3);
        let got: Vec<_> = dj.scan(&g, &[(0, 0), (2, 0)], None).collect();
        assert_eq!(got, vec![(0, 0), (2, 0), (1, 1)]);
    }

    #[test]
    fn excluded_edge_and_paths() {
        let g = WorkingGraph::from_instance(
            &Instance::new(3, [(0, 1, 1), (1, 2, 1), (0, 2, 5)], [0]).unwrap(),
        );
        let mut dj = Dijkstra::new(3);
        let mut scan = dj.scan(&g, &[(0, 0)], None);
        let all: Vec<_> = scan.by_ref().collect();
        assert_eq!(all.last(), Some(&(2, 2)));
        assert_eq!(scan.path_to(2), vec![1, 0]);
        let skip: Vec<_> = dj.scan_excluding(&g, &[(0, 0)], None, Some(1)).collect();
        assert_eq!(skip, vec![(0, 0), (1, 1), (2, 5)]);
    }

    #[test]
    fn voronoi_examples() {
        // t1=0 -1- v=1 -2- t2=2
        let g =
            WorkingGraph::from_instance(&Instance::new(3, [(0, 1, 1), (1, 2, 2)], [0, 2]).unwrap());
        let vor = voronoi_partition(&g, &[0, 2]);
        assert_eq!(vor.nearest[1], Some(0));
        assert_eq!(vor.dist[1], 1);

        let tie =
            WorkingGraph::from_instance(&Instance::new(3, [(0, 1, 2), (1, 2, 2)], [0, 2]).unwrap());
        let vor = voronoi_partition(&tie, &[2, 0]);
        assert_eq!(vor.nearest[1], Some(0));

        let all = voronoi_partition(&g, &[0, 1, 2]);
        assert_eq!(all.nearest, vec![Some(0), Some(1), Some(2)]);
        assert_eq!(all.dist, vec![0, 0, 0]);
    }

    #[test]
    fn voronoi_unreachable() {
        let g = WorkingGraph::from_instance(&Instance::new(3, [(0, 1, 1)], [0]).unwrap());
        let vor = voronoi_partition(&g, &[0]);
        assert_eq!(vor.nearest[2], None);
        assert_eq!(vor.dist[2], UNREACHED);
    }
}
