//! Best-star search and the star contraction driver.
//!
//! A star is a center `c` with terminals `R'` (|R'| ≥ 2) joined by shortest
//! paths; its ratio is the star weight over `|R'| - 1`. The driver contracts
//! the best star until at most `tau` terminals remain.
//!
//! Per-vertex results are cached between rounds. An entry stays valid until
//! a contraction lands within the radius its search explored.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{VertexId, WorkingEdgeId, WorkingGraph};
use crate::paths::{Dijkstra, UNREACHED};
use crate::WorkCounter;

/// Non-negative rational with a positive denominator, compared exactly.
#[derive(Debug, Clone, Copy)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "ratio with zero denominator");
        Self { num, den }
    }

    pub fn integer(n: u64) -> Self {
        Self { num: n, den: 1 }
    }

    pub fn reduced(self) -> Self {
        let (mut a, mut b) = (self.num, self.den);
        while b != 0 {
            (a, b) = (b, a % b);
        }
        Self {
            num: self.num / a,
            den: self.den / a,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `self < d`.
    fn below(self, d: u64) -> bool {
        (self.num as u128) < d as u128 * self.den as u128
    }

    /// `d > 2 * self`.
    fn more_than_twice(self, d: u64) -> bool {
        d as u128 * self.den as u128 > 2 * self.num as u128
    }
}

impl PartialEq for Ratio {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ratio {}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.reduced();
        if r.den == 1 {
            write!(f, "{}", r.num)
        } else {
            write!(f, "{}/{}", r.num, r.den)
        }
    }
}

/// Sum of distances over one less than their count.
pub fn star_ratio(distances: &[u64]) -> Result<Ratio> {
    if distances.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "a star needs at least two terminals, got {}",
            distances.len()
        )));
    }
    Ok(Ratio::new(
        distances.iter().sum(),
        distances.len() as u64 - 1,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StarMode {
    /// Weight is the sum of center-terminal distances.
    Basic,
    /// Weight is the realized tree grown from the center.
    Improved,
}

impl StarMode {
    pub fn name(self) -> &'static str {
        match self {
            StarMode::Basic => "basic",
            StarMode::Improved => "improved",
        }
    }
}

impl fmt::Display for StarMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StarMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "basic" => Ok(StarMode::Basic),
            "improved" => Ok(StarMode::Improved),
            _ => Err(Error::InvalidArgument(format!("unknown star mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Star {
    pub center: VertexId,
    /// In acceptance order, which is nondecreasing distance for basic stars.
    pub terminals: Vec<VertexId>,
    /// Distance from the center (basic) or marginal tree cost (improved).
    pub distances: Vec<u64>,
    pub weight: u64,
    pub ratio: Ratio,
    /// Explicit tree for improved stars; empty for basic ones, whose paths
    /// are recomputed on contraction.
    pub tree: Vec<WorkingEdgeId>,
}

impl Star {
    pub fn size(&self) -> usize {
        self.terminals.len()
    }

    fn sorted_terminals(&self) -> Vec<VertexId> {
        let mut t = self.terminals.clone();
        t.sort_unstable();
        t
    }

    /// Lower ratio first, then more terminals, smaller center, and
    /// lexicographically smaller terminal ids.
    pub fn preference(&self, other: &Star) -> Ordering {
        self.ratio
            .cmp(&other.ratio)
            .then(other.size().cmp(&self.size()))
            .then(self.center.cmp(&other.center))
            .then_with(|| self.sorted_terminals().cmp(&other.sorted_terminals()))
    }
}

/// Result of the search at one center.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StarOutcome {
    Exact(Star),
    /// No star at this center has a ratio below the bound.
    LowerBound(Ratio),
    /// Fewer than two terminals reachable.
    NoStar,
}

#[derive(Debug, Clone)]
enum Entry {
    Invalid,
    Valid { outcome: StarOutcome, radius: u64 },
}

struct Builder {
    terminals: Vec<VertexId>,
    distances: Vec<u64>,
    weight: u64,
}

impl Builder {
    fn new() -> Self {
        Self {
            terminals: Vec::new(),
            distances: Vec::new(),
            weight: 0,
        }
    }

    fn count(&self) -> usize {
        self.terminals.len()
    }

    fn ratio(&self) -> Option<Ratio> {
        (self.count() >= 2).then(|| Ratio::new(self.weight, self.count() as u64 - 1))
    }

    fn accept(&mut self, t: VertexId, d: u64) {
        self.terminals.push(t);
        self.distances.push(d);
        self.weight += d;
    }

    fn finish(self, center: VertexId, tree: Vec<WorkingEdgeId>) -> Star {
        let ratio = self.ratio().expect("star with at least two terminals");
        Star {
            center,
            terminals: self.terminals,
            distances: self.distances,
            weight: self.weight,
            ratio,
            tree,
        }
    }
}

/// Best-star search state: scratch Dijkstra, optional cache, work counters.
#[derive(Debug, Clone)]
pub struct StarSearch {
    mode: StarMode,
    max_terminals: Option<usize>,
    cache: Option<Vec<Entry>>,
    dj: Dijkstra,
    ratios: u64,
}

impl StarSearch {
    /// `max_terminals` caps star size (`None` for unbounded, at least 2).
    pub fn new(
        g: &WorkingGraph,
        mode: StarMode,
        max_terminals: Option<usize>,
        cache: bool,
    ) -> Self {
        if let Some(k) = max_terminals {
            assert!(k >= 2, "stars have at least two terminals");
        }
        Self {
            mode,
            max_terminals,
            cache: cache.then(|| vec![Entry::Invalid; g.capacity()]),
            dj: Dijkstra::new(g.capacity()),
            ratios: 0,
        }
    }

    pub fn mode(&self) -> StarMode {
        self.mode
    }

    pub fn work(&self) -> WorkCounter {
        WorkCounter {
            visited: self.dj.visited(),
            ratios: self.ratios,
        }
    }

    fn full(&self, count: usize) -> bool {
        self.max_terminals == Some(count)
    }

    /// Search at center `v`. The scan gives up once it passes twice `bound`;
    /// in basic mode everything beyond that radius is certified worse.
    pub fn find_at(&mut self, g: &WorkingGraph, v: VertexId, bound: Option<Ratio>) -> StarOutcome {
        self.search(g, v, bound).0
    }

    fn search(
        &mut self,
        g: &WorkingGraph,
        v: VertexId,
        bound: Option<Ratio>,
    ) -> (StarOutcome, u64) {
        self.ratios += 1;
        match self.mode {
            StarMode::Basic => self.basic_at(g, v, bound),
            StarMode::Improved => self.improved_at(g, v, bound),
        }
    }

    fn basic_at(
        &mut self,
        g: &WorkingGraph,
        v: VertexId,
        bound: Option<Ratio>,
    ) -> (StarOutcome, u64) {
        let full_at = self.max_terminals;
        let mut star = Builder::new();
        for (u, d) in self.dj.scan(g, &[(v, 0)], None) {
            // every accepted terminal so far is no farther than the ratio
            if star.ratio().is_some_and(|r| r.below(d)) {
                return (StarOutcome::Exact(star.finish(v, Vec::new())), d);
            }
            if bound.is_some_and(|b| b.more_than_twice(d)) {
                return (StarOutcome::LowerBound(Ratio::integer(d)), d);
            }
            if g.is_terminal(u) {
                star.accept(u, d);
                if full_at == Some(star.count()) {
                    return (StarOutcome::Exact(star.finish(v, Vec::new())), d);
                }
            }
        }
        match star.ratio() {
            Some(_) => (StarOutcome::Exact(star.finish(v, Vec::new())), UNREACHED),
            None => (StarOutcome::NoStar, UNREACHED),
        }
    }

    /// Grows a tree from `v`: each scan starts from the whole tree and the
    /// first terminal it settles joins at its marginal cost, unless the
    /// current ratio is already below that cost.
    fn improved_at(
        &mut self,
        g: &WorkingGraph,
        v: VertexId,
        bound: Option<Ratio>,
    ) -> (StarOutcome, u64) {
        let mut star = Builder::new();
        let mut tree_vertices = vec![v];
        let mut tree_edges: Vec<WorkingEdgeId> = Vec::new();
        let mut radius = 0u64;
        if g.is_terminal(v) {
            star.accept(v, 0);
        }
        loop {
            let sources: Vec<(VertexId, u64)> = tree_vertices.iter().map(|&x| (x, 0)).collect();
            let mut scan = self.dj.scan(g, &sources, None);
            let mut joined = None;
            while let Some((u, d)) = scan.next() {
                radius = radius.max(star.weight.saturating_add(d));
                if star.ratio().is_some_and(|r| r.below(d)) {
                    return (StarOutcome::Exact(star.finish(v, tree_edges)), radius);
                }
                if bound.is_some_and(|b| b.more_than_twice(d)) {
                    return (StarOutcome::LowerBound(Ratio::integer(d)), radius);
                }
                if d > 0 && g.is_terminal(u) {
                    joined = Some((u, d, scan.path_to(u)));
                    break;
                }
            }
            let Some((u, d, path)) = joined else {
                return match star.ratio() {
                    Some(_) => (StarOutcome::Exact(star.finish(v, tree_edges)), UNREACHED),
                    None => (StarOutcome::NoStar, UNREACHED),
                };
            };
            star.accept(u, d);
            for &e in &path {
                let [a, b] = g.edge(e).expect("live edge").ends;
                for x in [a, b] {
                    if !tree_vertices.contains(&x) {
                        tree_vertices.push(x);
                    }
                }
            }
            tree_edges.extend(path);
            if self.full(star.count()) {
                return (StarOutcome::Exact(star.finish(v, tree_edges)), radius);
            }
        }
    }

    /// The best star over all centers, or `None` with fewer than two
    /// connected terminals.
    pub fn find_best(&mut self, g: &WorkingGraph) -> Option<Star> {
        let mut best: Option<Star> = None;
        let vertices: Vec<VertexId> = g.vertices().collect();
        for v in vertices {
            let bound = best.as_ref().map(|s| s.ratio);
            let cached = self.cache.as_ref().and_then(|c| match &c[v] {
                Entry::Valid { outcome, .. } => Some(outcome.clone()),
                Entry::Invalid => None,
            });
            let outcome = match cached {
                Some(StarOutcome::NoStar) => continue,
                // a tie may still win on size, so only a strictly larger bound skips
                Some(StarOutcome::LowerBound(l)) if bound.is_some_and(|b| l > b) => continue,
                Some(StarOutcome::Exact(star)) => StarOutcome::Exact(star),
                _ => {
                    let (outcome, radius) = self.search(g, v, bound);
                    if let Some(cache) = self.cache.as_mut() {
                        cache[v] = Entry::Valid {
                            outcome: outcome.clone(),
                            radius,
                        };
                    }
                    outcome
                }
            };
            if let StarOutcome::Exact(star) = outcome {
                if best
                    .as_ref()
                    .is_none_or(|b| star.preference(b) == Ordering::Less)
                {
                    best = Some(star);
                }
            }
        }
        best
    }

    /// Edges joining the star's terminals: the explicit tree of an improved
    /// star, or the shortest-path tree from the center for a basic one.
    pub fn star_edges(&mut self, g: &WorkingGraph, star: &Star) -> Vec<WorkingEdgeId> {
        if !star.tree.is_empty() || star.size() < 2 {
            return star.tree.clone();
        }
        let reach = star.distances.iter().copied().max().unwrap_or(0);
        let mut scan = self.dj.scan(g, &[(star.center, 0)], Some(reach));
        scan.by_ref().for_each(drop);
        let mut edges: Vec<WorkingEdgeId> = star
            .terminals
            .iter()
            .flat_map(|&t| scan.path_to(t))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    /// Contracts the star's edges, buying them, and invalidates cache entries
    /// whose search could see the merged vertex. Returns the endpoint pairs
    /// in contraction order, which is all [`replay`] needs.
    pub fn contract(
        &mut self,
        g: &mut WorkingGraph,
        star: &Star,
    ) -> Result<Vec<(VertexId, VertexId)>> {
        let edges = self.star_edges(g, star);
        let pairs: Vec<(VertexId, VertexId)> = edges
            .iter()
            .map(|&e| {
                let [a, b] = g.edge(e).expect("live edge").ends;
                (a, b)
            })
            .collect();
        let mut z = star.center;
        for &(a, b) in &pairs {
            z = g.contract_between(a, b, true)?;
        }
        self.invalidate_around(g, z);
        Ok(pairs)
    }

    fn invalidate_around(&mut self, g: &WorkingGraph, z: VertexId) {
        let Some(cache) = self.cache.as_mut() else {
            return;
        };
        let mut reach = 0;
        for (v, entry) in cache.iter_mut().enumerate() {
            if !g.is_alive(v) {
                *entry = Entry::Invalid;
            } else if let Entry::Valid { radius, .. } = entry {
                reach = reach.max(*radius);
            }
        }
        let cutoff = (reach != UNREACHED).then_some(reach);
        for (v, d) in self.dj.scan(g, &[(z, 0)], cutoff) {
            if let Entry::Valid { radius, .. } = cache[v] {
                if d <= radius {
                    cache[v] = Entry::Invalid;
                }
            }
        }
    }
}

/// Convenience wrapper running one uncached basic-or-improved search.
pub fn find_best_star_at(
    g: &WorkingGraph,
    v: VertexId,
    mode: StarMode,
    bound: Option<Ratio>,
) -> StarOutcome {
    StarSearch::new(g, mode, None, false).find_at(g, v, bound)
}

pub fn find_best_star(g: &WorkingGraph, mode: StarMode) -> Option<Star> {
    StarSearch::new(g, mode, None, false).find_best(g)
}

/// Parameters of the contraction loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContractConfig {
    pub mode: StarMode,
    /// Largest star allowed; `None` for unbounded.
    pub max_terminals: Option<usize>,
    /// Contract while more than this many terminals remain.
    pub tau: usize,
    pub cache: bool,
}

impl ContractConfig {
    /// Unbounded stars down to a single terminal.
    pub fn exhaustive(mode: StarMode) -> Self {
        Self {
            mode,
            max_terminals: None,
            tau: 1,
            cache: true,
        }
    }
}

/// One round of the contraction loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionRecord {
    pub round: usize,
    pub center: VertexId,
    pub size: usize,
    pub ratio: Ratio,
    /// Weight of the contracted working edges.
    pub weight: u64,
    /// Work spent up to and including this round.
    pub work: WorkCounter,
    pub pairs: Vec<(VertexId, VertexId)>,
}

/// Repeatedly contracts the best star while more than `tau` terminals remain
/// and some star exists.
pub fn contract_stars(
    g: &mut WorkingGraph,
    config: &ContractConfig,
) -> Result<Vec<ContractionRecord>> {
    let mut search = StarSearch::new(g, config.mode, config.max_terminals, config.cache);
    let mut log = Vec::new();
    while g.terminal_count() > config.tau.max(1) {
        let Some(star) = search.find_best(g) else {
            break;
        };
        let before = g.bought_weight();
        let pairs = search.contract(g, &star)?;
        log.push(ContractionRecord {
            round: log.len(),
            center: star.center,
            size: star.size(),
            ratio: star.ratio,
            weight: g.bought_weight() - before,
            work: search.work(),
            pairs,
        });
    }
    Ok(log)
}

/// Re-applies recorded contractions to a graph in the state the log
/// started from.
pub fn replay(g: &mut WorkingGraph, records: &[ContractionRecord]) -> Result<()> {
    for r in records {
        for &(a, b) in &r.pairs {
            g.contract_between(a, b, true)?;
        }
    }
    Ok(())
}

/// `round,center,size,ratio_num,ratio_den,weight,mode,visited,ratios`.
pub fn contraction_log_csv(records: &[ContractionRecord], mode: StarMode) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "round",
        "center",
        "size",
        "ratio_num",
        "ratio_den",
        "weight",
        "mode",
        "visited",
        "ratios",
    ])
    .expect("in-memory write");
    for r in records {
        let ratio = r.ratio.reduced();
        w.write_record([
            r.round.to_string(),
            (r.center + 1).to_string(),
            r.size.to_string(),
            ratio.num.to_string(),
            ratio.den.to_string(),
            r.weight.to_string(),
            mode.name().to_string(),
            r.work.visited.to_string(),
            r.work.ratios.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("ascii")
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

    fn exact(outcome: StarOutcome) -> Star {
        match outcome {
            StarOutcome::Exact(s) => s,
            other => panic!("expected a star, got {other:?}"),
        }
    }

    #[test]
    fn ratio_arithmetic() {
        assert_eq!(star_ratio(&[3, 5]).unwrap(), Ratio::integer(8));
        assert_eq!(star_ratio(&[1, 1, 2, 2]).unwrap(), Ratio::integer(2));
        assert!(star_ratio(&[4]).is_err());
        assert_eq!(Ratio::new(4, 2), Ratio::new(2, 1));
        assert!(Ratio::new(5, 3) < Ratio::integer(2));
        assert_eq!(Ratio::new(10, 6).to_string(), "5/3");
        assert!(Ratio::new(5, 2).below(3) && !Ratio::new(6, 2).below(3));
        assert!(Ratio::integer(1).more_than_twice(3) && !Ratio::integer(1).more_than_twice(2));
    }

    #[test]
    fn gadget_basic_star() {
        let g = gadget();
        let s1 = exact(find_best_star_at(&g, 4, StarMode::Basic, None));
        assert_eq!(s1.ratio, Ratio::integer(2));
        assert_eq!(s1.size(), 4);
        assert_eq!(s1.distances, vec![1, 1, 2, 2]);
        let best = find_best_star(&g, StarMode::Basic).unwrap();
        assert_eq!(
            (best.center, best.size(), best.ratio),
            (4, 4, Ratio::integer(2))
        );
    }

    #[test]
    fn gadget_improved_star() {
        let g = gadget();
        let s1 = exact(find_best_star_at(&g, 4, StarMode::Improved, None));
        assert_eq!(s1.ratio, Ratio::new(5, 3));
        assert_eq!(s1.weight, 5);
        let mut tree = s1.tree.clone();
        tree.sort_unstable();
        assert_eq!(tree, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn adjacent_terminals_make_a_two_star() {
        let g = wg(4, &[(0, 1, 1), (1, 2, 9), (2, 3, 9)], &[0, 1, 3]);
        let s = exact(find_best_star_at(&g, 0, StarMode::Basic, None));
        assert_eq!((s.size(), s.ratio), (2, Ratio::integer(1)));
    }

    #[test]
    fn bound_cuts_the_scan() {
        let g = wg(3, &[(0, 1, 3), (1, 2, 3)], &[1, 2]);
        let out = find_best_star_at(&g, 0, StarMode::Basic, Some(Ratio::integer(1)));
        assert_eq!(out, StarOutcome::LowerBound(Ratio::integer(3)));
    }

    #[test]
    fn lone_terminal_has_no_star() {
        let g = wg(2, &[(0, 1, 1)], &[0]);
        assert_eq!(
            find_best_star_at(&g, 1, StarMode::Basic, None),
            StarOutcome::NoStar
        );
        assert!(find_best_star(&g, StarMode::Improved).is_none());
    }

    #[test]
    fn gadget_contractions() {
        for mode in [StarMode::Basic, StarMode::Improved] {
            let mut g = gadget();
            let log = contract_stars(&mut g, &ContractConfig::exhaustive(mode)).unwrap();
            assert_eq!(log.len(), 1, "{mode}");
            assert_eq!(log[0].weight, 5);
            assert_eq!(g.terminal_count(), 1);
            assert_eq!(g.solution_from(&[]).unwrap().weight, 5);

            let mut again = gadget();
            replay(&mut again, &log).unwrap();
            assert_eq!(again.bought(), g.bought());
        }
    }

    #[test]
    fn two_stars_are_cheapest_pairs() {
        let mut g = wg(4, &[(0, 1, 2), (1, 2, 3), (2, 3, 1)], &[0, 1, 2, 3]);
        let config = ContractConfig {
            max_terminals: Some(2),
            ..ContractConfig::exhaustive(StarMode::Basic)
        };
        let log = contract_stars(&mut g, &config).unwrap();
        let ratios: Vec<Ratio> = log.iter().map(|r| r.ratio).collect();
        assert_eq!(
            ratios,
            vec![Ratio::integer(1), Ratio::integer(2), Ratio::integer(3)]
        );
        assert_eq!(g.bought_weight(), 6);
    }

    #[test]
    fn tau_stops_early() {
        let mut g = gadget();
        let config = ContractConfig {
            tau: 4,
            ..ContractConfig::exhaustive(StarMode::Basic)
        };
        assert!(contract_stars(&mut g, &config).unwrap().is_empty());
    }

    #[test]
    fn log_csv() {
        let mut g = gadget();
        let log = contract_stars(&mut g, &ContractConfig::exhaustive(StarMode::Improved)).unwrap();
        let csv = contraction_log_csv(&log, StarMode::Improved);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next(),
            Some("round,center,size,ratio_num,ratio_den,weight,mode,visited,ratios")
        );
        assert!(lines.next().unwrap().starts_with("0,1,4,5,3,5,improved,"));
    }
}
