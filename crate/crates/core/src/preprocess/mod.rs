//! Reductions that keep the optimum: the optimum of the input equals the
//! weight bought by the reductions plus the optimum of what is left.

pub mod bridges;

use serde::Serialize;

use crate::graph::{VertexId, WorkingEdgeId, WorkingGraph};
use crate::paths::Dijkstra;
use bridges::IncrementalBridges;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    ZeroEdges,
    SteinerLowDegree,
    TerminalPendant,
    CheapestTerminalEdge,
    SptTwoEdges,
    SptFull,
    Tdt,
}

impl Rule {
    pub const ALL: [Rule; 7] = [
        Rule::ZeroEdges,
        Rule::SteinerLowDegree,
        Rule::TerminalPendant,
        Rule::CheapestTerminalEdge,
        Rule::SptTwoEdges,
        Rule::SptFull,
        Rule::Tdt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::ZeroEdges => "zero_edges",
            Rule::SteinerLowDegree => "steiner_low_degree",
            Rule::TerminalPendant => "terminal_pendant",
            Rule::CheapestTerminalEdge => "cheapest_terminal_edge",
            Rule::SptTwoEdges => "spt_two_edges",
            Rule::SptFull => "spt_full",
            Rule::Tdt => "tdt",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RuleStats {
    pub applications: u64,
    /// Original edges committed to the solution by this rule.
    pub edges_bought: u64,
}

/// One conclusive or inconclusive terminal distance test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TdtTest {
    /// Endpoints of the tested former bridge when it was tested.
    pub bridge: (VertexId, VertexId),
    pub bridge_weight: u64,
    /// Weight of the edge whose insertion closed the cycle.
    pub cover_weight: u64,
    /// `d(t1, u) + w(b) + d(v, t2)`, or `None` when no terminal pair is
    /// within `cover_weight`.
    pub value: Option<u64>,
    pub bought: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReductionReport {
    stats: [RuleStats; Rule::ALL.len()],
    /// Passes of the cheap-rule loop, summed over all invocations.
    pub rounds: u64,
    pub vertices_removed: usize,
    pub edges_removed: usize,
    pub tdt_tests: Vec<TdtTest>,
}

impl ReductionReport {
    pub fn rule(&self, rule: Rule) -> RuleStats {
        self.stats[rule as usize]
    }

    pub fn total_applications(&self) -> u64 {
        self.stats.iter().map(|s| s.applications).sum()
    }

    fn record(&mut self, rule: Rule, applications: usize, bought: usize) {
        let s = &mut self.stats[rule as usize];
        s.applications += applications as u64;
        s.edges_bought += bought as u64;
    }

    fn absorb(&mut self, other: ReductionReport) {
        for (a, b) in self.stats.iter_mut().zip(other.stats) {
            a.applications += b.applications;
            a.edges_bought += b.edges_bought;
        }
        self.rounds += other.rounds;
        self.tdt_tests.extend(other.tdt_tests);
    }

    /// `rule,applications,edges_bought` rows, one per rule.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["rule", "applications", "edges_bought"])
            .expect("in-memory write");
        for rule in Rule::ALL {
            let s = self.rule(rule);
            w.write_record([
                rule.name().to_string(),
                s.applications.to_string(),
                s.edges_bought.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("ascii")
    }
}

/// Runs `f` and records its application count and the edges it bought.
fn tracked(
    g: &mut WorkingGraph,
    report: &mut ReductionReport,
    rule: Rule,
    f: impl FnOnce(&mut WorkingGraph) -> usize,
) -> usize {
    let before = g.bought().len();
    let n = f(g);
    report.record(rule, n, g.bought().len() - before);
    n
}

/// Contracts every zero-weight edge and buys it. Returns the number of
/// contractions.
pub fn contract_zero_edges(g: &mut WorkingGraph) -> usize {
    let mut count = 0;
    loop {
        let zero: Vec<WorkingEdgeId> = g
            .edges()
            .filter(|(_, e)| e.weight == 0)
            .map(|(id, _)| id)
            .collect();
        if zero.is_empty() {
            return count;
        }
        for id in zero {
            // an earlier contraction may have replaced it by a parallel edge
            if g.edge(id).is_some_and(|e| e.weight == 0) {
                g.contract_edge(id, true).expect("live edge");
                count += 1;
            }
        }
    }
}

/// Deletes Steiner vertices of degree at most one and suppresses those of
/// degree two, to a fixed point.
pub fn remove_degree_low_steiner(g: &mut WorkingGraph) -> usize {
    let mut count = 0;
    let mut queue: Vec<VertexId> = g.vertices().collect();
    queue.reverse();
    while let Some(v) = queue.pop() {
        if !g.is_alive(v) || g.is_terminal(v) {
            continue;
        }
        let nbrs: Vec<VertexId> = g.neighbors(v).map(|(n, _)| n).collect();
        match nbrs.len() {
            0 | 1 => g.delete_vertex(v).expect("live Steiner vertex"),
            2 => {
                g.suppress_vertex(v).expect("degree-2 Steiner vertex");
            }
            _ => continue,
        }
        count += 1;
        queue.extend(nbrs);
    }
    count
}

/// Buys the only edge of every degree-one terminal. With a single terminal
/// left the optimum is empty, so nothing is bought.
pub fn contract_terminal_pendant(g: &mut WorkingGraph) -> usize {
    let mut count = 0;
    let mut queue: Vec<VertexId> = g.terminals().collect();
    queue.reverse();
    while let Some(t) = queue.pop() {
        if g.terminal_count() < 2 || !g.is_terminal(t) || g.degree(t) != 1 {
            continue;
        }
        let (_, e) = g.neighbors(t).next().expect("degree one");
        let merged = g.contract_edge(e, true).expect("live edge");
        count += 1;
        queue.push(merged);
    }
    count
}

/// Buys a terminal-terminal edge strictly lighter than every other edge at
/// either endpoint.
pub fn contract_cheapest_terminal_edge(g: &mut WorkingGraph) -> usize {
    let lightest_other = |g: &WorkingGraph, x: VertexId, skip: WorkingEdgeId| {
        g.neighbors(x)
            .filter(|&(_, e)| e != skip)
            .map(|(_, e)| g.weight(e))
            .min()
            .unwrap_or(u64::MAX)
    };
    let mut count = 0;
    loop {
        let candidates: Vec<WorkingEdgeId> = g
            .edges()
            .filter(|(_, e)| g.is_terminal(e.ends[0]) && g.is_terminal(e.ends[1]))
            .map(|(id, _)| id)
            .collect();
        let mut changed = false;
        for id in candidates {
            let Some(e) = g.edge(id) else { continue };
            let [s, t] = e.ends;
            if !(g.is_terminal(s) && g.is_terminal(t)) {
                continue;
            }
            let w = e.weight;
            if w < lightest_other(g, s, id) && w < lightest_other(g, t, id) {
                g.contract_edge(id, true).expect("live edge");
                count += 1;
                changed = true;
            }
        }
        if !changed {
            return count;
        }
    }
}

/// Rules 1 to 4 until none applies.
pub fn quick_heuristics(g: &mut WorkingGraph) -> ReductionReport {
    let mut report = ReductionReport::default();
    loop {
        report.rounds += 1;
        let mut n = tracked(g, &mut report, Rule::ZeroEdges, contract_zero_edges);
        n += tracked(
            g,
            &mut report,
            Rule::SteinerLowDegree,
            remove_degree_low_steiner,
        );
        n += tracked(
            g,
            &mut report,
            Rule::TerminalPendant,
            contract_terminal_pendant,
        );
        n += tracked(
            g,
            &mut report,
            Rule::CheapestTerminalEdge,
            contract_cheapest_terminal_edge,
        );
        if n == 0 {
            return report;
        }
    }
}

/// Deletes every edge beaten by a path of two edges.
///
/// Deleting all of them at once is safe: with positive weights each deleted
/// edge is beaten by strictly lighter edges, so distances are preserved.
pub fn spt_two_edges(g: &mut WorkingGraph) -> usize {
    let doomed: Vec<WorkingEdgeId> = g
        .edges()
        .filter(|(_, e)| {
            let [u, v] = e.ends;
            let (small, big) = if g.degree(u) <= g.degree(v) {
                (u, v)
            } else {
                (v, u)
            };
            g.neighbors(small).any(|(x, ux)| {
                x != big
                    && g.weight(ux) < e.weight
                    && g.edge_between(x, big)
                        .is_some_and(|xv| g.weight(ux) + g.weight(xv) < e.weight)
            })
        })
        .map(|(id, _)| id)
        .collect();
    for &id in &doomed {
        g.delete_edge(id).expect("live edge");
    }
    doomed.len()
}

/// Deletes every edge strictly longer than the distance between its endpoints.
pub fn spt_full(g: &mut WorkingGraph) -> usize {
    let mut dj = Dijkstra::new(g.capacity());
    let mut doomed = Vec::new();
    for u in g.vertices() {
        let reach = g
            .neighbors(u)
            .filter(|&(v, _)| v > u)
            .map(|(_, e)| g.weight(e))
            .max();
        let Some(reach) = reach else { continue };
        let mut scan = dj.scan(g, &[(u, 0)], Some(reach));
        scan.by_ref().for_each(drop);
        for (v, e) in g.neighbors(u) {
            if v > u && scan.distance(v).is_some_and(|d| d < g.weight(e)) {
                doomed.push(e);
            }
        }
    }
    for &id in &doomed {
        g.delete_edge(id).expect("live edge");
    }
    doomed.len()
}

/// The two-edge pass followed by the full pass.
pub fn spt(g: &mut WorkingGraph) -> ReductionReport {
    let mut report = ReductionReport::default();
    tracked(g, &mut report, Rule::SptTwoEdges, spt_two_edges);
    tracked(g, &mut report, Rule::SptFull, spt_full);
    report
}

fn nearest_terminal_excluding(
    dj: &mut Dijkstra,
    g: &WorkingGraph,
    from: VertexId,
    excluded: WorkingEdgeId,
    cap: u64,
) -> Option<u64> {
    dj.scan_excluding(g, &[(from, 0)], Some(cap), Some(excluded))
        .find(|&(v, _)| g.is_terminal(v))
        .map(|(_, d)| d)
}

/// Terminal distance test. Edges are inserted in increasing `(weight, id)`
/// order; whenever an insertion `f` ends the bridge status of `b`, `b` is
/// the lightest edge of a cut whose second lightest edge weighs `w(f)`.
/// `b` is bought when a terminal path through it fits under `w(f)`.
///
/// Tests with `w(f) == w(b)` are skipped.
pub fn tdt(g: &mut WorkingGraph) -> ReductionReport {
    let mut order: Vec<(u64, WorkingEdgeId)> = g.edges().map(|(id, e)| (e.weight, id)).collect();
    order.sort_unstable();
    let mut structure = IncrementalBridges::new(g.capacity());
    let mut dj = Dijkstra::new(g.capacity());
    let mut tests = Vec::new();
    let mut buy: Vec<(VertexId, VertexId)> = Vec::new();
    for &(wf, f) in &order {
        let [a, b] = g.edge(f).expect("live edge").ends;
        for bridge in structure.add_edge(a, b, f) {
            let e = g.edge(bridge).expect("live edge");
            let [u, v] = e.ends;
            let wb = e.weight;
            if wf <= wb {
                continue;
            }
            let cap = wf - wb;
            let value = nearest_terminal_excluding(&mut dj, g, u, bridge, cap).and_then(|d1| {
                nearest_terminal_excluding(&mut dj, g, v, bridge, cap - d1).map(|d2| d1 + wb + d2)
            });
            let bought = value.is_some_and(|x| x <= wf);
            if bought {
                buy.push((u, v));
            }
            tests.push(TdtTest {
                bridge: (u, v),
                bridge_weight: wb,
                cover_weight: wf,
                value,
                bought,
            });
        }
    }
    let mut report = ReductionReport {
        tdt_tests: tests,
        ..Default::default()
    };
    tracked(g, &mut report, Rule::Tdt, |g| {
        for &(u, v) in &buy {
            g.contract_between(u, v, true)
                .expect("bridge endpoints stay adjacent");
        }
        buy.len()
    });
    report
}

/// The fixed schedule: cheap rules, SPT, cheap rules, TDT, cheap rules,
/// SPT, cheap rules.
pub fn preprocessing(g: &mut WorkingGraph) -> ReductionReport {
    let (vertices, edges) = (g.vertex_count(), g.edge_count());
    let mut report = quick_heuristics(g);
    report.absorb(spt(g));
    report.absorb(quick_heuristics(g));
    report.absorb(tdt(g));
    report.absorb(quick_heuristics(g));
    report.absorb(spt(g));
    report.absorb(quick_heuristics(g));
    report.vertices_removed = vertices - g.vertex_count();
    report.edges_removed = edges - g.edge_count();
    report
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

    fn gadget() -> WorkingGraph {
        wg(
            6,
            &[(0, 4, 1), (1, 4, 1), (4, 5, 1), (5, 2, 1), (5, 3, 1)],
            &[0, 1, 2, 3],
        )
    }

    #[test]
    fn zero_edges() {
        let mut g = wg(3, &[(0, 1, 0), (1, 2, 4)], &[0, 2]);
        assert_eq!(contract_zero_edges(&mut g), 1);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.bought().len(), 1);
        assert_eq!(contract_zero_edges(&mut g), 0);

        let mut chain = wg(4, &[(0, 1, 0), (1, 2, 0), (2, 3, 5)], &[0, 3]);
        assert_eq!(contract_zero_edges(&mut chain), 2);
        assert_eq!(chain.vertex_count(), 2);
    }

    #[test]
    fn low_degree_steiner() {
        let mut g = wg(3, &[(0, 1, 1), (1, 2, 2)], &[0]);
        assert_eq!(remove_degree_low_steiner(&mut g), 2);
        assert_eq!(g.vertex_count(), 1);

        let mut path = wg(3, &[(0, 1, 2), (1, 2, 3)], &[0, 2]);
        assert_eq!(remove_degree_low_steiner(&mut path), 1);
        let (_, e) = path.edges().next().unwrap();
        assert_eq!(e.weight, 5);
        assert_eq!(e.path.len(), 2);

        let mut pendant_terminal = wg(2, &[(0, 1, 1)], &[0, 1]);
        assert_eq!(remove_degree_low_steiner(&mut pendant_terminal), 0);
    }

    #[test]
    fn terminal_pendant() {
        // t - v(3), v - x(1), x - t2(1), v - t2(5)
        let mut g = wg(4, &[(0, 1, 3), (1, 2, 1), (2, 3, 1), (1, 3, 5)], &[0, 3]);
        assert_eq!(contract_terminal_pendant(&mut g), 1);
        assert_eq!(g.bought_weight(), 3);
        let merged = g.representative(0);
        assert!(g.is_terminal(merged));
        assert!(g.is_terminal(g.representative(1)));

        let mut isolated = wg(2, &[], &[0, 1]);
        assert_eq!(contract_terminal_pendant(&mut isolated), 0);

        let mut single = wg(2, &[(0, 1, 7)], &[0, 1]);
        assert_eq!(contract_terminal_pendant(&mut single), 1);
        assert_eq!(single.terminal_count(), 1);
        assert_eq!(single.bought_weight(), 7);
    }

    #[test]
    fn lone_terminal_buys_nothing() {
        let mut g = wg(3, &[(0, 1, 1), (1, 2, 1)], &[0]);
        let report = quick_heuristics(&mut g);
        assert_eq!(g.bought_weight(), 0);
        assert_eq!(report.rule(Rule::TerminalPendant).applications, 0);
    }

    #[test]
    fn cheapest_terminal_edge() {
        // s=0, t=1, Steiner 2,3
        let mut g = wg(4, &[(0, 1, 1), (0, 2, 2), (1, 3, 2), (2, 3, 1)], &[0, 1]);
        assert_eq!(contract_cheapest_terminal_edge(&mut g), 1);
        assert_eq!(g.terminal_count(), 1);

        let mut steiner = wg(3, &[(0, 2, 1), (2, 1, 3)], &[0, 1]);
        assert_eq!(contract_cheapest_terminal_edge(&mut steiner), 0);

        let mut tie = wg(4, &[(0, 1, 2), (0, 2, 2), (1, 3, 3), (2, 3, 1)], &[0, 1]);
        assert_eq!(contract_cheapest_terminal_edge(&mut tie), 0);
    }

    #[test]
    fn quick_zero_edge_then_suppress() {
        // t0 -0- a -2- b -3- t3: a merges into t0, then b is suppressed
        let mut g = wg(4, &[(0, 1, 0), (1, 2, 2), (2, 3, 3)], &[0, 3]);
        let report = quick_heuristics(&mut g);
        assert_eq!(report.rule(Rule::ZeroEdges).applications, 1);
        assert!(report.rule(Rule::SteinerLowDegree).applications >= 1);
        g.validate().unwrap();
    }

    #[test]
    fn quick_collapses_pendant_chain() {
        // t - a - b with a, b Steiner: b deleted, a deleted, t alone
        let mut g = wg(3, &[(0, 1, 1), (1, 2, 1)], &[0]);
        quick_heuristics(&mut g);
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn quick_on_reduced_instance_is_identity() {
        let mut g = wg(
            4,
            &[
                (0, 1, 1),
                (0, 2, 1),
                (0, 3, 1),
                (1, 2, 1),
                (1, 3, 1),
                (2, 3, 1),
            ],
            &[0, 1, 2, 3],
        );
        let report = quick_heuristics(&mut g);
        assert_eq!(report.total_applications(), 0);
        assert_eq!(report.rounds, 1);
    }

    #[test]
    fn spt_examples() {
        let mut tri = wg(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 3)], &[0, 2]);
        assert_eq!(spt_two_edges(&mut tri), 1);
        assert_eq!(tri.edge_between(0, 2), None);

        let mut tight = wg(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 2)], &[0, 2]);
        assert_eq!(spt_two_edges(&mut tight), 0);
        assert_eq!(spt_full(&mut tight), 0);

        let mut square = wg(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)], &[0, 2]);
        assert_eq!(spt_two_edges(&mut square), 0);

        // t1 - t2 (3) versus t1 - v - t2 (1 + 1)
        let mut full = wg(3, &[(0, 1, 3), (0, 2, 1), (2, 1, 1)], &[0, 1]);
        assert_eq!(spt_full(&mut full), 1);

        let mut tree = wg(4, &[(0, 1, 1), (1, 2, 2), (1, 3, 3)], &[0, 2, 3]);
        assert_eq!(spt_full(&mut tree), 0);
    }

    #[test]
    fn spt_full_needs_long_paths() {
        let mut g = wg(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 3, 4)], &[0, 3]);
        assert_eq!(spt_two_edges(&mut g), 0);
        assert_eq!(spt_full(&mut g), 1);
    }

    #[test]
    fn tdt_four_cycle() {
        // t1=0, a=1, t2=2, b=3
        let mut g = wg(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 3), (3, 0, 3)], &[0, 2]);
        let report = tdt(&mut g);
        let t1a = report
            .tdt_tests
            .iter()
            .find(|t| t.bridge == (0, 1))
            .expect("t1-a tested");
        assert_eq!(t1a.cover_weight, 3);
        assert_eq!(t1a.value, Some(2));
        assert!(t1a.bought);
        assert_eq!(report.rule(Rule::Tdt).applications, 2);
        assert!(g.bought().contains(&0));
    }

    #[test]
    fn tdt_equality_buys() {
        let mut g = wg(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 2), (3, 0, 2)], &[0, 2]);
        let report = tdt(&mut g);
        let t1a = report
            .tdt_tests
            .iter()
            .find(|t| t.bridge == (0, 1))
            .unwrap();
        assert_eq!(
            (t1a.value, t1a.cover_weight, t1a.bought),
            (Some(2), 2, true)
        );
        // equal-weight bridge and cover are never tested
        assert!(report
            .tdt_tests
            .iter()
            .all(|t| t.cover_weight > t.bridge_weight));
    }

    #[test]
    fn tdt_tree_is_untouched() {
        let mut g = wg(4, &[(0, 1, 1), (1, 2, 2), (1, 3, 3)], &[0, 2, 3]);
        let report = tdt(&mut g);
        assert!(report.tdt_tests.is_empty());
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn gadget_collapses_through_pendant_terminals() {
        // every terminal of the gadget is a leaf, so nothing survives
        let mut g = gadget();
        let report = preprocessing(&mut g);
        assert!(report.rule(Rule::TerminalPendant).applications >= 3);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.bought_weight(), 5);
    }

    #[test]
    fn report_csv() {
        let mut g = wg(3, &[(0, 1, 0), (1, 2, 4)], &[0, 2]);
        let report = preprocessing(&mut g);
        let csv = report.to_csv();
        assert!(csv.starts_with("rule,applications,edges_bought\nzero_edges,1,1\n"));
        assert_eq!(csv.lines().count(), 1 + Rule::ALL.len());
    }
}
