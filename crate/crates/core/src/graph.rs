//! Sensor communication graph and breadth-first utilities.
//!
//! The default communication graph is the mesh edge graph; a unit-disk graph
//! over the vertex positions can be built instead when a radio radius is
//! given.

use alloc::vec;
use alloc::vec::Vec;

use crate::mesh::TriMesh;

pub const NO_VERTEX: u32 = u32::MAX;

/// Undirected graph in compressed adjacency form, vertices `0..n`.
#[derive(Debug, Clone)]
pub struct CommGraph {
    offsets: Vec<u32>,
    neighbors: Vec<u32>,
}

impl CommGraph {
    /// Build from an undirected edge list.
    pub fn from_edges(n_vertices: usize, edges: impl IntoIterator<Item = [u32; 2]>) -> Self {
        let mut degree = vec![0u32; n_vertices];
        let edges: Vec<[u32; 2]> = edges.into_iter().collect();
        for &[a, b] in &edges {
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        let mut offsets = vec![0u32; n_vertices + 1];
        for v in 0..n_vertices {
            offsets[v + 1] = offsets[v] + degree[v];
        }
        let mut neighbors = vec![0u32; offsets[n_vertices] as usize];
        let mut cursor: Vec<u32> = offsets[..n_vertices].to_vec();
        for &[a, b] in &edges {
            neighbors[cursor[a as usize] as usize] = b;
            cursor[a as usize] += 1;
            neighbors[cursor[b as usize] as usize] = a;
            cursor[b as usize] += 1;
        }
        // Sorted adjacency gives deterministic traversal order everywhere.
        for v in 0..n_vertices {
            neighbors[offsets[v] as usize..offsets[v + 1] as usize].sort_unstable();
        }
        CommGraph { offsets, neighbors }
    }

    /// The mesh edge graph (one graph edge per mesh edge).
    pub fn from_mesh_edges(mesh: &TriMesh) -> Self {
        Self::from_edges(mesh.n_vertices(), mesh.edges().iter().copied())
    }

    /// Unit-disk graph: vertices within 3D distance `radius` are connected.
    pub fn unit_disk(mesh: &TriMesh, radius: f64) -> Self {
        let pos = mesh.positions();
        let n = pos.len();
        // Uniform spatial hash with cell size = radius.
        let mut lo = [f64::INFINITY; 3];
        for p in pos {
            for a in 0..3 {
                lo[a] = lo[a].min(p[a]);
            }
        }
        let cell_of = |p: &[f64; 3]| -> (i64, i64, i64) {
            (
                ((p[0] - lo[0]) / radius) as i64,
                ((p[1] - lo[1]) / radius) as i64,
                ((p[2] - lo[2]) / radius) as i64,
            )
        };
        let mut bins: alloc::collections::BTreeMap<(i64, i64, i64), Vec<u32>> =
            alloc::collections::BTreeMap::new();
        for (v, p) in pos.iter().enumerate() {
            bins.entry(cell_of(p)).or_default().push(v as u32);
        }
        let mut edges = Vec::new();
        let r2 = radius * radius;
        for (v, p) in pos.iter().enumerate() {
            let (cx, cy, cz) = cell_of(p);
            for dx in -1..=1 {
                for dy in -1..=1 {
                    for dz in -1..=1 {
                        let Some(cand) = bins.get(&(cx + dx, cy + dy, cz + dz)) else {
                            continue;
                        };
                        for &w in cand {
                            if w as usize <= v {
                                continue;
                            }
                            let q = pos[w as usize];
                            let d = [q[0] - p[0], q[1] - p[1], q[2] - p[2]];
                            if d[0] * d[0] + d[1] * d[1] + d[2] * d[2] <= r2 {
                                edges.push([v as u32, w]);
                            }
                        }
                    }
                }
            }
        }
        Self::from_edges(n, edges)
    }

    pub fn n_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn n_edges(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.neighbors[self.offsets[v as usize] as usize..self.offsets[v as usize + 1] as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.neighbors(v).len()
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        self.neighbors(a).binary_search(&b).is_ok()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n_vertices();
        if n == 0 {
            return true;
        }
        let (dist, _) = self.bfs(0);
        dist.iter().all(|&d| d != u32::MAX)
    }

    /// BFS from `root`: (hop distance, parent vertex) per vertex.
    /// Unreached vertices get distance `u32::MAX`; neighbors are expanded in
    /// sorted order, so the tree is deterministic (lowest index first).
    pub fn bfs(&self, root: u32) -> (Vec<u32>, Vec<u32>) {
        let n = self.n_vertices();
        let mut dist = vec![u32::MAX; n];
        let mut parent = vec![NO_VERTEX; n];
        let mut queue = alloc::collections::VecDeque::new();
        dist[root as usize] = 0;
        queue.push_back(root);
        while let Some(v) = queue.pop_front() {
            for &w in self.neighbors(v) {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dist[v as usize] + 1;
                    parent[w as usize] = v;
                    queue.push_back(w);
                }
            }
        }
        (dist, parent)
    }

    /// Hop distance from every vertex to the nearest source.
    pub fn multi_source_distance(&self, sources: impl IntoIterator<Item = u32>) -> Vec<u32> {
        let n = self.n_vertices();
        let mut dist = vec![u32::MAX; n];
        let mut queue = alloc::collections::VecDeque::new();
        for s in sources {
            if dist[s as usize] == u32::MAX {
                dist[s as usize] = 0;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &w in self.neighbors(v) {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dist[v as usize] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Shortest path `from -> to` as a vertex sequence (inclusive), by BFS.
    pub fn shortest_path(&self, from: u32, to: u32) -> Option<Vec<u32>> {
        if from == to {
            return Some(vec![from]);
        }
        let (dist, parent) = self.bfs(from);
        if dist[to as usize] == u32::MAX {
            return None;
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            cur = parent[cur as usize];
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }
}
