//! Path strategies over the communication graph and their coverage metrics.
//!
//! Three strategies are compared by the harness: the dense-curve path built
//! by [`crate::curve`], an Eulerian tour of a doubled spanning tree, and a
//! uniform random walk. Metrics follow the path hop by hop: coverage rate
//! (fraction of vertices visited) and average hop distance from unvisited
//! vertices to the visited set.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::graph::CommGraph;
use crate::rng;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("graph is disconnected")]
    Disconnected,
    #[error("start vertex {0} out of range")]
    StartOutOfRange(u32),
}

/// A hop-by-hop walk over the communication graph. Every consecutive pair of
/// vertices is a graph edge; hops inserted to rescue a stranded walker are
/// flagged as bridges.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiscretePath {
    pub vertices: Vec<u32>,
    /// One flag per hop (`vertices.len() - 1` entries).
    pub bridge: Vec<bool>,
}

impl DiscretePath {
    pub fn from_vertices(vertices: Vec<u32>) -> Self {
        let hops = vertices.len().saturating_sub(1);
        DiscretePath {
            vertices,
            bridge: vec![false; hops],
        }
    }

    pub fn hops(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn bridge_hops(&self) -> usize {
        self.bridge.iter().filter(|&&b| b).count()
    }

    /// Vertices in first-visit order.
    pub fn visit_order(&self, n_vertices: usize) -> Vec<u32> {
        let mut seen = vec![false; n_vertices];
        let mut order = Vec::new();
        for &v in &self.vertices {
            if !seen[v as usize] {
                seen[v as usize] = true;
                order.push(v);
            }
        }
        order
    }

    /// Largest number of times any single vertex appears in the path.
    pub fn max_multiplicity(&self, n_vertices: usize) -> u32 {
        let mut count = vec![0u32; n_vertices];
        for &v in &self.vertices {
            count[v as usize] += 1;
        }
        count.into_iter().max().unwrap_or(0)
    }

    /// Check that every hop is a graph edge.
    pub fn is_walk_of(&self, graph: &CommGraph) -> bool {
        self.vertices
            .windows(2)
            .all(|w| graph.has_edge(w[0], w[1]))
    }
}

/// One sampled point of a path's progress.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    /// Hops consumed so far.
    pub step: u64,
    pub visited: u32,
    /// visited / V, non-decreasing in `step`.
    pub coverage: f64,
    /// Mean hop distance from unvisited vertices to the visited set;
    /// `None` once everything is visited.
    pub avg_dist: Option<f64>,
}

/// Per-step record of a discrete path's coverage progress.
#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub strategy: String,
    pub seed: u64,
    pub records: Vec<TraceRecord>,
}

impl SimTrace {
    pub fn final_coverage(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.coverage)
    }
}

/// Eulerian tour of the doubled BFS spanning tree rooted at `root`: exactly
/// `2(V-1)` hops, visiting every vertex.
pub fn euler_path(graph: &CommGraph, root: u32) -> Result<DiscretePath, SimError> {
    let n = graph.n_vertices();
    if root as usize >= n {
        return Err(SimError::StartOutOfRange(root));
    }
    let (dist, parent) = graph.bfs(root);
    if dist.iter().any(|&d| d == u32::MAX) {
        return Err(SimError::Disconnected);
    }
    // Children lists in index order (deterministic tour).
    let mut children: Vec<Vec<u32>> = vec![Vec::new(); n];
    for v in 0..n as u32 {
        if v != root && parent[v as usize] != crate::graph::NO_VERTEX {
            children[parent[v as usize] as usize].push(v);
        }
    }
    // Iterative depth-first tour: each tree edge walked down once, up once.
    let mut tour = vec![root];
    let mut stack = vec![(root, 0usize)];
    while let Some(&mut (v, ref mut next_child)) = stack.last_mut() {
        if *next_child < children[v as usize].len() {
            let c = children[v as usize][*next_child];
            *next_child += 1;
            tour.push(c);
            stack.push((c, 0));
        } else {
            stack.pop();
            if let Some(&(p, _)) = stack.last() {
                tour.push(p);
            }
        }
    }
    debug_assert_eq!(tour.len(), 2 * n - 1);
    Ok(DiscretePath::from_vertices(tour))
}

/// Uniform random walk of `steps` hops from `start`, driven by the
/// `random-walk` stream of `seed`.
pub fn random_walk(graph: &CommGraph, start: u32, steps: usize, seed: u64) -> DiscretePath {
    let mut gen = rng::stream_rng(seed, rng::stream::RANDOM_WALK);
    random_walk_with(graph, start, steps, &mut gen)
}

pub fn random_walk_with(
    graph: &CommGraph,
    start: u32,
    steps: usize,
    gen: &mut impl RngCore,
) -> DiscretePath {
    let mut vertices = Vec::with_capacity(steps + 1);
    vertices.push(start);
    let mut cur = start;
    for _ in 0..steps {
        let nbrs = graph.neighbors(cur);
        if nbrs.is_empty() {
            break;
        }
        cur = nbrs[rng::uniform_index(gen, nbrs.len())];
        vertices.push(cur);
    }
    DiscretePath::from_vertices(vertices)
}

/// Sample coverage rate and average shortest distance every `stride` hops.
///
/// Rows are emitted at hops `0, stride, 2*stride, ...` up to the path length;
/// the distance at each sample is one multi-source BFS from the visited set.
pub fn measure(graph: &CommGraph, path: &DiscretePath, stride: usize, strategy: &str, seed: u64) -> SimTrace {
    let stride = stride.max(1);
    let n = graph.n_vertices();
    let mut visited = vec![false; n];
    let mut visited_count = 0u32;
    let mut records = Vec::new();
    for (i, &v) in path.vertices.iter().enumerate() {
        if !visited[v as usize] {
            visited[v as usize] = true;
            visited_count += 1;
        }
        let step = i; // hops consumed after arriving at vertices[i]
        if step % stride == 0 {
            records.push(sample(graph, &visited, visited_count, step as u64));
        }
    }
    SimTrace {
        strategy: String::from(strategy),
        seed,
        records,
    }
}

fn sample(graph: &CommGraph, visited: &[bool], visited_count: u32, step: u64) -> TraceRecord {
    let n = graph.n_vertices();
    let coverage = visited_count as f64 / n as f64;
    let avg_dist = if (visited_count as usize) < n {
        let sources = (0..n as u32).filter(|&v| visited[v as usize]);
        let dist = graph.multi_source_distance(sources);
        let mut total = 0u64;
        let mut count = 0u64;
        for v in 0..n {
            if !visited[v] {
                total += dist[v] as u64;
                count += 1;
            }
        }
        Some(total as f64 / count as f64)
    } else {
        None
    };
    TraceRecord {
        step,
        visited: visited_count,
        coverage,
        avg_dist,
    }
}

/// Hops needed to first reach coverage `target` (fraction of V), if reached.
pub fn hops_to_coverage(graph: &CommGraph, path: &DiscretePath, target: f64) -> Option<u64> {
    let n = graph.n_vertices();
    let needed = libm::ceil(target * n as f64) as u32;
    let mut visited = vec![false; n];
    let mut visited_count = 0u32;
    for (i, &v) in path.vertices.iter().enumerate() {
        if !visited[v as usize] {
            visited[v as usize] = true;
            visited_count += 1;
            if visited_count >= needed {
                return Some(i as u64);
            }
        }
    }
    None
}

/// Average shortest distance at the first moment `m` vertices are visited.
pub fn distance_at_visited(graph: &CommGraph, path: &DiscretePath, m: u32) -> Option<f64> {
    let n = graph.n_vertices();
    let mut visited = vec![false; n];
    let mut visited_count = 0u32;
    for (i, &v) in path.vertices.iter().enumerate() {
        if !visited[v as usize] {
            visited[v as usize] = true;
            visited_count += 1;
            if visited_count == m {
                return sample(graph, &visited, visited_count, i as u64).avg_dist;
            }
        }
    }
    None
}

/// Joint result of several mules advancing in lockstep (one hop per mule per
/// round).
#[derive(Debug, Clone)]
pub struct FleetResult {
    pub per_mule: Vec<SimTrace>,
    /// Joint coverage; `step` counts rounds (hops per mule).
    pub joint: SimTrace,
    /// Final pairwise overlap counts of visited sets.
    pub overlap: Vec<Vec<u32>>,
}

/// Advance the given mule paths in lockstep and record joint coverage plus
/// pairwise overlaps.
pub fn run_fleet(graph: &CommGraph, paths: &[DiscretePath], stride: usize) -> FleetResult {
    let stride = stride.max(1);
    let n = graph.n_vertices();
    let k = paths.len();
    let rounds = paths.iter().map(|p| p.vertices.len()).max().unwrap_or(0);

    let per_mule: Vec<SimTrace> = paths
        .iter()
        .enumerate()
        .map(|(i, p)| measure(graph, p, stride, "fleet-mule", i as u64))
        .collect();

    let mut joint_visited = vec![false; n];
    let mut joint_count = 0u32;
    let mut sets: Vec<Vec<bool>> = vec![vec![false; n]; k];
    let mut records = Vec::new();
    for round in 0..rounds {
        for (m, path) in paths.iter().enumerate() {
            if let Some(&v) = path.vertices.get(round) {
                sets[m][v as usize] = true;
                if !joint_visited[v as usize] {
                    joint_visited[v as usize] = true;
                    joint_count += 1;
                }
            }
        }
        if round % stride == 0 {
            records.push(sample(graph, &joint_visited, joint_count, round as u64));
        }
    }
    let mut overlap = vec![vec![0u32; k]; k];
    for i in 0..k {
        for j in 0..k {
            overlap[i][j] = (0..n).filter(|&v| sets[i][v] && sets[j][v]).count() as u32;
        }
    }
    FleetResult {
        per_mule,
        joint: SimTrace {
            strategy: String::from("fleet-joint"),
            seed: 0,
            records,
        },
        overlap,
    }
}

/// Overlap of the first `m` vertices visited by each pair of paths.
pub fn overlap_of_first(paths: &[DiscretePath], n_vertices: usize, m: usize) -> Vec<Vec<u32>> {
    let orders: Vec<Vec<u32>> = paths
        .iter()
        .map(|p| {
            let mut o = p.visit_order(n_vertices);
            o.truncate(m);
            o
        })
        .collect();
    let k = paths.len();
    let mut overlap = vec![vec![0u32; k]; k];
    for i in 0..k {
        let mut in_i = vec![false; n_vertices];
        for &v in &orders[i] {
            in_i[v as usize] = true;
        }
        for j in 0..k {
            overlap[i][j] = orders[j].iter().filter(|&&v| in_i[v as usize]).count() as u32;
        }
    }
    overlap
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::TriMesh;

    fn path_graph(n: usize) -> CommGraph {
        CommGraph::from_edges(n, (0..n - 1).map(|i| [i as u32, i as u32 + 1]))
    }

    #[test]
    fn euler_tour_of_path3() {
        let g = path_graph(3);
        let tour = euler_path(&g, 0).unwrap();
        assert_eq!(tour.hops(), 4);
        assert_eq!(tour.vertices, vec![0, 1, 2, 1, 0]);
    }

    #[test]
    fn euler_tour_of_star() {
        let g = CommGraph::from_edges(5, [[0u32, 1], [0, 2], [0, 3], [0, 4]]);
        let tour = euler_path(&g, 0).unwrap();
        assert_eq!(tour.hops(), 8);
        let center_visits = tour.vertices.iter().filter(|&&v| v == 0).count();
        assert_eq!(center_visits, 5); // revisited 4 times after first arrival
    }

    #[test]
    fn euler_tour_covers_genus2_graph() {
        let m = TriMesh::generate_genus_g(2, 8).unwrap();
        let g = CommGraph::from_mesh_edges(&m);
        let tour = euler_path(&g, 0).unwrap();
        assert_eq!(tour.hops(), 2 * (g.n_vertices() - 1));
        assert!(tour.is_walk_of(&g));
        assert_eq!(
            tour.visit_order(g.n_vertices()).len(),
            g.n_vertices(),
            "tree tour visits every vertex"
        );
    }

    #[test]
    fn random_walk_zero_steps() {
        let g = path_graph(3);
        let p = random_walk(&g, 1, 0, 42);
        assert_eq!(p.vertices, vec![1]);
    }

    #[test]
    fn random_walk_on_two_vertices_alternates() {
        let g = path_graph(2);
        let p = random_walk(&g, 0, 7, 1);
        assert_eq!(p.vertices, vec![0, 1, 0, 1, 0, 1, 0, 1]);
    }

    #[test]
    fn random_walk_is_deterministic_per_seed() {
        let m = TriMesh::generate_genus_g(1, 8).unwrap();
        let g = CommGraph::from_mesh_edges(&m);
        let a = random_walk(&g, 0, 500, 9);
        let b = random_walk(&g, 0, 500, 9);
        let c = random_walk(&g, 0, 500, 10);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.is_walk_of(&g));
    }

    #[test]
    fn random_walk_undercovers_at_linear_length() {
        // Coupon-collector regime: V steps cover well below everything.
        let m = TriMesh::generate_genus_g(1, 16).unwrap();
        let g = CommGraph::from_mesh_edges(&m);
        let v = g.n_vertices();
        for seed in 0..20u64 {
            let p = random_walk(&g, 0, v, seed);
            let covered = p.visit_order(v).len();
            assert!(covered < v, "seed {seed} covered everything in V steps");
        }
    }

    #[test]
    fn measure_trace_is_monotone() {
        let m = TriMesh::generate_genus_g(1, 8).unwrap();
        let g = CommGraph::from_mesh_edges(&m);
        let tour = euler_path(&g, 0).unwrap();
        let trace = measure(&g, &tour, 5, "euler", 0);
        for w in trace.records.windows(2) {
            assert!(w[1].coverage >= w[0].coverage);
            assert!(w[1].step > w[0].step);
        }
        assert!((trace.final_coverage() - 1.0).abs() < 1e-12);
        assert!(trace.records.last().unwrap().avg_dist.is_none());
    }

    #[test]
    fn measure_single_vertex_prefix() {
        let g = path_graph(4);
        let p = DiscretePath::from_vertices(vec![2]);
        let trace = measure(&g, &p, 10, "stub", 0);
        assert_eq!(trace.records.len(), 1);
        assert!((trace.records[0].coverage - 0.25).abs() < 1e-12);
        // Unvisited 0,1,3 at distances 2,1,1.
        assert!((trace.records[0].avg_dist.unwrap() - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn coverage_milestones_on_euler_tour() {
        let g = path_graph(10);
        let tour = euler_path(&g, 0).unwrap();
        // Path graph tour: reaches vertex k at hop k.
        assert_eq!(hops_to_coverage(&g, &tour, 1.0), Some(9));
        assert_eq!(hops_to_coverage(&g, &tour, 0.5), Some(4));
        assert_eq!(distance_at_visited(&g, &tour, 10), None);
        let d = distance_at_visited(&g, &tour, 5).unwrap();
        assert!((d - 3.0).abs() < 1e-12); // unvisited 5..9 at distances 1..5
    }

    #[test]
    fn fleet_joint_dominates_single() {
        let m = TriMesh::generate_genus_g(1, 8).unwrap();
        let g = CommGraph::from_mesh_edges(&m);
        let a = random_walk(&g, 0, 300, 1);
        let b = random_walk(&g, 40, 300, 2);
        let fleet = run_fleet(&g, &[a.clone(), b], 10);
        let single = measure(&g, &a, 10, "rw", 1);
        for (j, s) in fleet.joint.records.iter().zip(single.records.iter()) {
            assert_eq!(j.step, s.step);
            assert!(j.coverage >= s.coverage);
        }
        // Identical paths overlap fully.
        let dup = run_fleet(&g, &[a.clone(), a.clone()], 10);
        let visited = a.visit_order(g.n_vertices()).len() as u32;
        assert_eq!(dup.overlap[0][1], visited);
    }

    #[test]
    fn overlap_of_first_counts_shared_prefix() {
        let p1 = DiscretePath::from_vertices(vec![0, 1, 2, 3]);
        let p2 = DiscretePath::from_vertices(vec![5, 1, 2, 4]);
        let ov = overlap_of_first(&[p1, p2], 6, 3);
        assert_eq!(ov[0][1], 2); // {1,2}
        assert_eq!(ov[1][0], 2);
        assert_eq!(ov[0][0], 3);
    }
}
