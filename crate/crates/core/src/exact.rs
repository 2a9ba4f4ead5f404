//! Dreyfus–Wagner dynamic program for small terminal counts.
//!
//! `cost[S][v]` is the lightest tree connecting the terminal subset `S` and
//! vertex `v`. A tree for `S ∪ {v}` either branches at some `u` into two
//! subtrees for a split of `S`, or reaches `v` from such a `u` by a shortest
//! path. The last terminal is left out of the subsets and used as the root.

use crate::error::{Error, Result};
use crate::graph::{finalize_solution, EdgeId, Instance, SolutionTree, WorkingGraph};
use crate::paths::{Dijkstra, UNREACHED};

/// Hard cap on terminal count; the table has `2^(t-1) · n` entries.
pub const MAX_TERMINALS: usize = 14;

pub fn dreyfus_wagner(inst: &Instance) -> Result<SolutionTree> {
    let terminals = inst.terminals();
    let t = terminals.len();
    if t > MAX_TERMINALS {
        return Err(Error::TooManyTerminals {
            count: t,
            limit: MAX_TERMINALS,
        });
    }
    if t == 1 {
        return Ok(SolutionTree::default());
    }
    let n = inst.vertex_count();
    let g = WorkingGraph::from_instance(inst);
    let mut dj = Dijkstra::new(n);
    let mut dist = vec![vec![UNREACHED; n]; n];
    // first edge of a shortest path from u towards v, walking back from v
    let mut back: Vec<Vec<Option<EdgeId>>> = vec![vec![None; n]; n];
    for u in 0..n {
        let mut scan = dj.scan(&g, &[(u, 0)], None);
        while let Some((v, d)) = scan.next() {
            dist[u][v] = d;
            back[u][v] = scan.parent_edge(v);
        }
    }
    let root = terminals[t - 1];
    if let Some(&lost) = terminals.iter().find(|&&x| dist[root][x] == UNREACHED) {
        return Err(Error::Infeasible(format!(
            "terminals {} and {} are not connected",
            root + 1,
            lost + 1
        )));
    }

    let k = t - 1;
    let full = (1usize << k) - 1;
    let mut cost = vec![vec![UNREACHED; n]; full + 1];
    // where the subtree for S attaches: the branching vertex for cost[S][v]
    let mut via = vec![vec![usize::MAX; n]; full + 1];
    let mut split = vec![vec![0usize; n]; full + 1];
    for (i, &ti) in terminals[..k].iter().enumerate() {
        for v in 0..n {
            cost[1 << i][v] = dist[ti][v];
            via[1 << i][v] = ti;
        }
    }
    let mut branch = vec![UNREACHED; n];
    for s in 1..=full {
        if s.count_ones() < 2 {
            continue;
        }
        let low = s & s.wrapping_neg();
        for u in 0..n {
            branch[u] = UNREACHED;
            // subsets containing the lowest bit enumerate each split once
            let rest = s ^ low;
            let mut a = rest;
            loop {
                let left = a | low;
                if left != s {
                    let c = cost[left][u].saturating_add(cost[s ^ left][u]);
                    if c < branch[u] {
                        branch[u] = c;
                        split[s][u] = left;
                    }
                }
                if a == 0 {
                    break;
                }
                a = (a - 1) & rest;
            }
        }
        for v in 0..n {
            for u in 0..n {
                let c = branch[u].saturating_add(dist[u][v]);
                if c < cost[s][v] {
                    cost[s][v] = c;
                    via[s][v] = u;
                }
            }
        }
    }

    let mut edges = Vec::new();
    let mut stack = vec![(full, root)];
    while let Some((s, v)) = stack.pop() {
        let u = via[s][v];
        let mut x = v;
        while let Some(e) = back[u][x] {
            edges.push(e);
            x = inst.edge(e).other(x);
        }
        if s.count_ones() >= 2 {
            let left = split[s][u];
            stack.push((left, u));
            stack.push((s ^ left, u));
        }
    }
    let optimum = cost[full][root];
    let tree = finalize_solution(inst, edges)?;
    debug_assert_eq!(tree.weight, optimum);
    Ok(tree)
}

/// Exact optimum weight only.
pub fn optimum(inst: &Instance) -> Result<u64> {
    dreyfus_wagner(inst).map(|t| t.weight)
}

/// Optimum of the live part of a working graph, ignoring what it bought.
pub fn working_optimum(g: &WorkingGraph) -> Result<u64> {
    let (inst, _) = g.to_instance()?;
    optimum(&inst)
}
