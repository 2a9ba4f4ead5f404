//! Seeded random connected instances for tests and benchmarks.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSpec {
    pub vertices: usize,
    /// Edges added on top of a random spanning tree. Duplicates collapse,
    /// so the final edge count can be lower.
    pub extra_edges: usize,
    pub terminals: usize,
    pub min_weight: u64,
    pub max_weight: u64,
}

impl RandomSpec {
    pub fn small(vertices: usize, extra_edges: usize, terminals: usize) -> Self {
        Self {
            vertices,
            extra_edges,
            terminals,
            min_weight: 1,
            max_weight: 10,
        }
    }
}

/// A connected instance: a random recursive spanning tree plus extra edges.
pub fn random_instance(spec: &RandomSpec, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_instance_with(spec, &mut rng)
}

pub fn random_instance_with(spec: &RandomSpec, rng: &mut impl Rng) -> Instance {
    let n = spec.vertices.max(1);
    let mut edges = Vec::with_capacity(n - 1 + spec.extra_edges);
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push((u, v, rng.gen_range(spec.min_weight..=spec.max_weight)));
    }
    if n > 1 {
        for _ in 0..spec.extra_edges {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n - 1);
            let v = if v >= u { v + 1 } else { v };
            edges.push((u, v, rng.gen_range(spec.min_weight..=spec.max_weight)));
        }
    }
    let t = spec.terminals.clamp(1, n);
    let terminals = sample(rng, n, t).into_vec();
    Instance::new(n, edges, terminals).expect("generated instance is valid")
}

/// Draws sizes uniformly, then an instance; the shape used by the oracle
/// checks (`max_vertices` vertices at most, `max_terminals` terminals).
pub fn random_small_instance(
    rng: &mut impl Rng,
    max_vertices: usize,
    max_terminals: usize,
) -> Instance {
    let n = rng.gen_range(2..=max_vertices);
    let extra = rng.gen_range(0..=n * (n - 1) / 2);
    let t = rng.gen_range(2..=max_terminals.min(n));
    random_instance_with(&RandomSpec::small(n, extra, t), rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsu::UnionFind;

    #[test]
    fn seeded_and_connected() {
        let spec = RandomSpec::small(30, 40, 6);
        let a = random_instance(&spec, 7);
        assert_eq!(a, random_instance(&spec, 7));
        assert_eq!(a.terminals().len(), 6);
        let mut uf = UnionFind::new(30);
        for e in a.edges() {
            assert!((1..=10).contains(&e.weight));
            uf.union(e.u, e.v);
        }
        assert_eq!(uf.size_of(0), 30);
    }
}
