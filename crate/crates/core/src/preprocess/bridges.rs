//! Additions-only 2-edge-connectivity.
//!
//! Vertices are grouped into 2-edge-connected components (one union-find)
//! and the components of each connected piece form a rooted tree whose links
//! are exactly the current bridges. Adding an edge inside one tree collapses
//! the tree path between its endpoints and reports the bridges on it.

const NONE: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct IncrementalBridges<Id: Copy = usize> {
    /// 2-edge-connected component union-find.
    two_edge: Vec<usize>,
    /// Connected component union-find over 2ecc representatives.
    conn: Vec<usize>,
    conn_size: Vec<usize>,
    /// Tree parent of a 2ecc representative (any vertex of the parent component).
    parent: Vec<usize>,
    /// Edge linking a 2ecc representative to its parent.
    parent_edge: Vec<Option<Id>>,
    mark: Vec<u64>,
    stamp: u64,
}

impl<Id: Copy> IncrementalBridges<Id> {
    pub fn new(n: usize) -> Self {
        Self {
            two_edge: (0..n).collect(),
            conn: (0..n).collect(),
            conn_size: vec![1; n],
            parent: vec![NONE; n],
            parent_edge: vec![None; n],
            mark: vec![0; n],
            stamp: 0,
        }
    }

    fn find_two_edge(&mut self, mut v: usize) -> usize {
        let mut root = v;
        while self.two_edge[root] != root {
            root = self.two_edge[root];
        }
        while self.two_edge[v] != root {
            let next = self.two_edge[v];
            self.two_edge[v] = root;
            v = next;
        }
        root
    }

    fn find_conn(&mut self, v: usize) -> usize {
        let mut x = self.find_two_edge(v);
        let mut chain = Vec::new();
        loop {
            let next = self.find_two_edge(self.conn[x]);
            if next == x {
                break;
            }
            chain.push(x);
            x = next;
        }
        for c in chain {
            self.conn[c] = x;
        }
        x
    }

    pub fn two_edge_connected(&mut self, a: usize, b: usize) -> bool {
        self.find_two_edge(a) == self.find_two_edge(b)
    }

    pub fn connected(&mut self, a: usize, b: usize) -> bool {
        self.find_conn(a) == self.find_conn(b)
    }

    /// Reverses parent links so that `v`'s component becomes the tree root.
    fn make_root(&mut self, v: usize) {
        let root = v;
        let mut cur = v;
        let mut child = NONE;
        let mut child_edge = None;
        while cur != NONE {
            let p = if self.parent[cur] == NONE {
                NONE
            } else {
                self.find_two_edge(self.parent[cur])
            };
            let pe = self.parent_edge[cur];
            self.parent[cur] = child;
            self.parent_edge[cur] = child_edge;
            self.conn[cur] = root;
            child = cur;
            child_edge = pe;
            cur = p;
        }
        self.conn_size[root] = self.conn_size[child];
    }

    /// Adds edge `id` between `a` and `b` and returns the edges that were
    /// bridges before the addition and are not any more.
    pub fn add_edge(&mut self, a: usize, b: usize, id: Id) -> Vec<Id> {
        let mut a = self.find_two_edge(a);
        let mut b = self.find_two_edge(b);
        if a == b {
            return Vec::new();
        }
        let mut ca = self.find_conn(a);
        let mut cb = self.find_conn(b);
        if ca != cb {
            if self.conn_size[ca] > self.conn_size[cb] {
                std::mem::swap(&mut a, &mut b);
                std::mem::swap(&mut ca, &mut cb);
            }
            self.make_root(a);
            self.parent[a] = b;
            self.parent_edge[a] = Some(id);
            self.conn[a] = b;
            self.conn_size[cb] += self.conn_size[a];
            return Vec::new();
        }
        self.merge_path(a, b)
    }

    fn merge_path(&mut self, a: usize, b: usize) -> Vec<Id> {
        self.stamp += 1;
        let (mut a, mut b) = (a, b);
        let mut path_a = Vec::new();
        let mut path_b = Vec::new();
        let lca;
        loop {
            if a != NONE {
                a = self.find_two_edge(a);
                path_a.push(a);
                if self.mark[a] == self.stamp {
                    lca = a;
                    break;
                }
                self.mark[a] = self.stamp;
                a = self.parent[a];
            }
            if b != NONE {
                b = self.find_two_edge(b);
                path_b.push(b);
                if self.mark[b] == self.stamp {
                    lca = b;
                    break;
                }
                self.mark[b] = self.stamp;
                b = self.parent[b];
            }
        }
        // both walks end at the lca; anything pushed after it lies above
        let mut covered = Vec::new();
        for path in [path_a, path_b] {
            for v in path {
                if v == lca {
                    break;
                }
                covered.push(self.parent_edge[v].expect("non-root has a parent edge"));
                self.two_edge[v] = lca;
            }
        }
        covered
    }
}
