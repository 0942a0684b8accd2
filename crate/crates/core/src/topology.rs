//! Surface topology: dual spanning trees, cut graphs, homology basis loops,
//! and slicing the mesh open along an edge subgraph.
//!
//! The tree-cotree construction: a spanning tree of the dual graph picks
//! F−1 edges; the primal edges whose duals are left out form the cut graph
//! G, and slicing the surface along G leaves a topological disk. A spanning
//! tree of G then leaves exactly 2g edges, each closing a loop of the
//! homology basis.

use alloc::vec;
use alloc::vec::Vec;

use crate::graph::NO_VERTEX;
use crate::mesh::{EdgeId, FaceId, HalfedgeId, TriMesh, VertexId};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TopologyError {
    #[error("mesh is disconnected; dual tree cannot span all faces")]
    DisconnectedMesh,
    #[error("genus is zero: no homology basis loops exist")]
    GenusZero,
    #[error("cut graph is inconsistent: expected {expected} non-tree edges, found {found}")]
    BadCutGraph { expected: usize, found: usize },
}

/// Spanning tree of the dual graph (faces are nodes, mesh edges connect
/// adjacent faces).
#[derive(Debug, Clone)]
pub struct DualTree {
    pub root: FaceId,
    /// Parent face per face; `NO_VERTEX` for the root.
    pub parent: Vec<u32>,
    /// Mesh edge crossed to reach the parent face.
    pub parent_edge: Vec<EdgeId>,
    /// Per mesh edge: whether its dual edge is in the tree.
    pub in_tree: Vec<bool>,
}

impl DualTree {
    pub fn n_tree_edges(&self) -> usize {
        self.in_tree.iter().filter(|&&t| t).count()
    }
}

/// Breadth-first spanning tree of the dual mesh rooted at `root`,
/// expanding lowest face index first.
pub fn dual_spanning_tree(mesh: &TriMesh, root: FaceId) -> Result<DualTree, TopologyError> {
    let nf = mesh.n_faces();
    let mut parent = vec![NO_VERTEX; nf];
    let mut parent_edge = vec![u32::MAX; nf];
    let mut in_tree = vec![false; mesh.n_edges()];
    let mut reached = vec![false; nf];
    let mut queue = alloc::collections::VecDeque::new();
    reached[root as usize] = true;
    queue.push_back(root);
    while let Some(f) = queue.pop_front() {
        // Neighbor faces in edge order of the face, ties broken by index.
        let mut nbrs: [(FaceId, EdgeId); 3] = [(0, 0); 3];
        for i in 0..3u32 {
            let h = 3 * f + i;
            let e = mesh.he_edge(h);
            nbrs[i as usize] = (mesh.he_face(mesh.he_twin(h)), e);
        }
        nbrs.sort_unstable_by_key(|&(g, _)| g);
        for (g, e) in nbrs {
            if !reached[g as usize] {
                reached[g as usize] = true;
                parent[g as usize] = f;
                parent_edge[g as usize] = e;
                in_tree[e as usize] = true;
                queue.push_back(g);
            }
        }
    }
    if reached.iter().any(|&r| !r) {
        return Err(TopologyError::DisconnectedMesh);
    }
    Ok(DualTree {
        root,
        parent,
        parent_edge,
        in_tree,
    })
}

/// Edge subgraph whose removal opens the surface into a disk.
#[derive(Debug, Clone)]
pub struct CutGraph {
    /// Edge ids in the cut, ascending.
    pub edges: Vec<EdgeId>,
    /// Per mesh edge membership flag.
    pub on_cut: Vec<bool>,
}

impl CutGraph {
    pub fn from_flags(on_cut: Vec<bool>) -> Self {
        let edges = (0..on_cut.len() as u32).filter(|&e| on_cut[e as usize]).collect();
        CutGraph { edges, on_cut }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Cut graph of the mesh: all edges whose dual edge is not in `tree`.
pub fn cut_graph(mesh: &TriMesh, tree: &DualTree) -> CutGraph {
    let on_cut: Vec<bool> = tree.in_tree.iter().map(|&t| !t).collect();
    debug_assert_eq!(
        on_cut.iter().filter(|&&c| c).count(),
        mesh.n_edges() - (mesh.n_faces() - 1)
    );
    CutGraph::from_flags(on_cut)
}

/// Euler characteristic of the surface sliced open along the flagged edges,
/// without building the sliced complex: cut vertices multiply into one copy
/// per fan sector, cut edges double.
pub fn sliced_euler_characteristic(mesh: &TriMesh, on_cut: &[bool]) -> i64 {
    let mut v_sliced: i64 = 0;
    for v in 0..mesh.n_vertices() as VertexId {
        let cut_degree = mesh
            .vertex_star(v)
            .filter(|&h| on_cut[mesh.he_edge(h) as usize])
            .count() as i64;
        v_sliced += if cut_degree == 0 { 1 } else { cut_degree };
    }
    let cut_edges = on_cut.iter().filter(|&&c| c).count() as i64;
    let e_sliced = mesh.n_edges() as i64 + cut_edges;
    v_sliced - e_sliced + mesh.n_faces() as i64
}

/// True when slicing along the flagged edges yields a single disk
/// (connected through unflagged edges, Euler characteristic 1).
pub fn slices_to_disk(mesh: &TriMesh, on_cut: &[bool]) -> bool {
    // Face connectivity through non-cut edges.
    let nf = mesh.n_faces();
    if nf == 0 {
        return false;
    }
    let mut reached = vec![false; nf];
    let mut stack = vec![0u32];
    reached[0] = true;
    let mut count = 1;
    while let Some(f) = stack.pop() {
        for i in 0..3u32 {
            let h = 3 * f + i;
            if on_cut[mesh.he_edge(h) as usize] {
                continue;
            }
            let g = mesh.he_face(mesh.he_twin(h));
            if !reached[g as usize] {
                reached[g as usize] = true;
                count += 1;
                stack.push(g);
            }
        }
    }
    count == nf && sliced_euler_characteristic(mesh, on_cut) == 1
}

/// A closed loop as a chain of halfedges, head to tail.
#[derive(Debug, Clone, PartialEq)]
pub struct Loop {
    pub halfedges: Vec<HalfedgeId>,
}

impl Loop {
    pub fn len(&self) -> usize {
        self.halfedges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.halfedges.is_empty()
    }

    /// Vertices in traversal order (source of each halfedge).
    pub fn vertices(&self, mesh: &TriMesh) -> Vec<VertexId> {
        self.halfedges.iter().map(|&h| mesh.he_src(h)).collect()
    }

    pub fn is_closed(&self, mesh: &TriMesh) -> bool {
        if self.halfedges.is_empty() {
            return false;
        }
        self.halfedges.windows(2).all(|w| mesh.he_dst(w[0]) == mesh.he_src(w[1]))
            && mesh.he_dst(*self.halfedges.last().unwrap()) == mesh.he_src(self.halfedges[0])
    }
}

/// 2g closed loops generating the first homology group.
#[derive(Debug, Clone, PartialEq)]
pub struct HomologyBasis {
    pub loops: Vec<Loop>,
}

/// Homology basis from the cut graph: a breadth-first spanning tree of the
/// cut graph leaves 2g extra edges; each, joined with the two tree paths
/// back to where they meet, closes one basis loop.
pub fn homology_basis(mesh: &TriMesh, cut: &CutGraph) -> Result<HomologyBasis, TopologyError> {
    let n = mesh.n_vertices();
    // Vertices and adjacency of the cut subgraph.
    let mut adj: Vec<Vec<(VertexId, EdgeId)>> = vec![Vec::new(); n];
    for &e in &cut.edges {
        let [a, b] = mesh.edge_endpoints(e);
        adj[a as usize].push((b, e));
        adj[b as usize].push((a, e));
    }
    for l in adj.iter_mut() {
        l.sort_unstable();
    }
    let Some(root) = (0..n as u32).find(|&v| !adj[v as usize].is_empty()) else {
        return Err(TopologyError::GenusZero);
    };

    // BFS tree over the cut graph, lowest index first.
    let mut parent = vec![NO_VERTEX; n];
    let mut depth = vec![u32::MAX; n];
    let mut tree_edge = vec![false; mesh.n_edges()];
    let mut queue = alloc::collections::VecDeque::new();
    depth[root as usize] = 0;
    queue.push_back(root);
    while let Some(v) = queue.pop_front() {
        for &(w, e) in &adj[v as usize] {
            if depth[w as usize] == u32::MAX {
                depth[w as usize] = depth[v as usize] + 1;
                parent[w as usize] = v;
                tree_edge[e as usize] = true;
                queue.push_back(w);
            }
        }
    }
    if cut.edges.iter().any(|&e| {
        let [a, _] = mesh.edge_endpoints(e);
        depth[a as usize] == u32::MAX
    }) {
        // Cut graph of a closed connected surface is always connected;
        // anything else means corrupt input.
        return Err(TopologyError::BadCutGraph {
            expected: 0,
            found: usize::MAX,
        });
    }

    let generators: Vec<EdgeId> = cut
        .edges
        .iter()
        .copied()
        .filter(|&e| !tree_edge[e as usize])
        .collect();
    let expected = 2 * mesh.genus() as usize;
    if generators.is_empty() {
        return Err(TopologyError::GenusZero);
    }
    if generators.len() != expected {
        return Err(TopologyError::BadCutGraph {
            expected,
            found: generators.len(),
        });
    }

    let halfedge_between = |a: VertexId, b: VertexId| -> HalfedgeId {
        mesh.vertex_star(a)
            .find(|&h| mesh.he_dst(h) == b)
            .expect("tree edge exists in mesh")
    };

    let mut loops = Vec::with_capacity(generators.len());
    for &e in &generators {
        let [u, v] = mesh.edge_endpoints(e);
        // Root-ward vertex paths from both endpoints.
        let path_up = |mut x: VertexId| -> Vec<VertexId> {
            let mut p = vec![x];
            while parent[x as usize] != NO_VERTEX {
                x = parent[x as usize];
                p.push(x);
            }
            p
        };
        let pu = path_up(u);
        let pv = path_up(v);
        // Strip the common suffix; keep the meet vertex once on each side.
        let mut iu = pu.len();
        let mut iv = pv.len();
        while iu > 1 && iv > 1 && pu[iu - 2] == pv[iv - 2] {
            iu -= 1;
            iv -= 1;
        }
        // Loop: u -e-> v, v up to meet, meet down to u.
        let mut hes = Vec::new();
        let h_uv = halfedge_between(u, v);
        hes.push(h_uv);
        for w in pv[..iv].windows(2) {
            hes.push(halfedge_between(w[0], w[1]));
        }
        for w in pu[..iu].windows(2).rev() {
            hes.push(halfedge_between(w[1], w[0]));
        }
        loops.push(Loop { halfedges: hes });
    }
    Ok(HomologyBasis { loops })
}

/// Mesh cut open along an edge subgraph: same faces, with vertices on the
/// cut multiplied into one copy per fan sector of their one-ring.
#[derive(Debug, Clone)]
pub struct SlicedMesh {
    /// Sliced vertex id for each face corner (indexed by halfedge id).
    pub corner_vertex: Vec<u32>,
    /// Original vertex of each sliced vertex.
    pub orig_of: Vec<VertexId>,
    /// Sliced copies of each original vertex.
    pub copies_of: Vec<Vec<u32>>,
}

impl SlicedMesh {
    pub fn n_vertices(&self) -> usize {
        self.orig_of.len()
    }
}

/// Slice the mesh along the flagged edges.
pub fn slice_along(mesh: &TriMesh, on_cut: &[bool]) -> SlicedMesh {
    let nv = mesh.n_vertices();
    let mut corner_vertex = vec![u32::MAX; mesh.n_halfedges()];
    let mut orig_of: Vec<VertexId> = Vec::new();
    let mut copies_of: Vec<Vec<u32>> = vec![Vec::new(); nv];

    for v in 0..nv as u32 {
        let star: Vec<HalfedgeId> = mesh.vertex_star(v).collect();
        let cut_positions: Vec<usize> = star
            .iter()
            .enumerate()
            .filter(|&(_, &h)| on_cut[mesh.he_edge(h) as usize])
            .map(|(i, _)| i)
            .collect();
        if cut_positions.is_empty() {
            let id = orig_of.len() as u32;
            orig_of.push(v);
            copies_of[v as usize].push(id);
            for &h in &star {
                corner_vertex[h as usize] = id;
            }
        } else {
            // One copy per fan; a fan starts at each cut out-halfedge.
            // Rotate so the star begins at the first cut edge.
            let first = cut_positions[0];
            let mut current = u32::MAX;
            for i in 0..star.len() {
                let h = star[(first + i) % star.len()];
                if on_cut[mesh.he_edge(h) as usize] {
                    current = orig_of.len() as u32;
                    orig_of.push(v);
                    copies_of[v as usize].push(current);
                }
                corner_vertex[h as usize] = current;
            }
        }
    }
    SlicedMesh {
        corner_vertex,
        orig_of,
        copies_of,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::TriMesh;

    fn tetrahedron() -> TriMesh {
        let positions = vec![
            [1.0, 1.0, 1.0],
            [1.0, -1.0, -1.0],
            [-1.0, 1.0, -1.0],
            [-1.0, -1.0, 1.0],
        ];
        TriMesh::from_faces(positions, vec![[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]]).unwrap()
    }

    #[test]
    fn dual_tree_spans_all_faces() {
        let m = tetrahedron();
        let t = dual_spanning_tree(&m, 0).unwrap();
        assert_eq!(t.n_tree_edges(), 3);

        let torus = TriMesh::generate_genus_g(1, 8).unwrap();
        let t = dual_spanning_tree(&torus, 0).unwrap();
        assert_eq!(t.n_tree_edges(), 127);

        let g2 = TriMesh::generate_genus_g(2, 8).unwrap();
        let t = dual_spanning_tree(&g2, 0).unwrap();
        assert_eq!(t.n_tree_edges(), g2.n_faces() - 1);
    }

    #[test]
    fn cut_graph_sizes() {
        let m = tetrahedron();
        let cut = cut_graph(&m, &dual_spanning_tree(&m, 0).unwrap());
        assert_eq!(cut.len(), 3);

        let torus = TriMesh::generate_genus_g(1, 8).unwrap();
        let cut = cut_graph(&torus, &dual_spanning_tree(&torus, 0).unwrap());
        assert_eq!(cut.len(), 192 - 127);
    }

    #[test]
    fn cut_complement_is_disk() {
        for mesh in [
            tetrahedron(),
            TriMesh::generate_genus_g(1, 8).unwrap(),
            TriMesh::generate_genus_g(2, 8).unwrap(),
            TriMesh::generate_genus_g(3, 8).unwrap(),
        ] {
            let cut = cut_graph(&mesh, &dual_spanning_tree(&mesh, 0).unwrap());
            assert!(slices_to_disk(&mesh, &cut.on_cut));
        }
    }

    #[test]
    fn homology_basis_has_2g_closed_loops() {
        for (g, res) in [(1u32, 8u32), (2, 8), (3, 8)] {
            let mesh = TriMesh::generate_genus_g(g, res).unwrap();
            let cut = cut_graph(&mesh, &dual_spanning_tree(&mesh, 0).unwrap());
            let basis = homology_basis(&mesh, &cut).unwrap();
            assert_eq!(basis.loops.len(), 2 * g as usize);
            for lp in &basis.loops {
                assert!(lp.is_closed(&mesh));
                // Simple: no vertex repeats.
                let mut vs = lp.vertices(&mesh);
                vs.sort_unstable();
                let before = vs.len();
                vs.dedup();
                assert_eq!(vs.len(), before, "loop revisits a vertex");
                // Loop edges lie in the cut graph.
                for &h in &lp.halfedges {
                    assert!(cut.on_cut[mesh.he_edge(h) as usize]);
                }
            }
        }
    }

    #[test]
    fn genus_zero_has_no_basis() {
        let m = tetrahedron();
        let cut = cut_graph(&m, &dual_spanning_tree(&m, 0).unwrap());
        assert_eq!(homology_basis(&m, &cut), Err(TopologyError::GenusZero));
    }

    #[test]
    fn slicing_a_loop_doubles_its_vertices() {
        let mesh = TriMesh::generate_genus_g(1, 8).unwrap();
        let cut = cut_graph(&mesh, &dual_spanning_tree(&mesh, 0).unwrap());
        let basis = homology_basis(&mesh, &cut).unwrap();
        let lp = &basis.loops[0];
        let mut on_loop = vec![false; mesh.n_edges()];
        for &h in &lp.halfedges {
            on_loop[mesh.he_edge(h) as usize] = true;
        }
        let sliced = slice_along(&mesh, &on_loop);
        let loop_len = lp.len();
        assert_eq!(sliced.n_vertices(), mesh.n_vertices() + loop_len);
        for v in lp.vertices(&mesh) {
            assert_eq!(sliced.copies_of[v as usize].len(), 2);
        }
        // Sliced along a single loop: chi(cylinder) = 0.
        assert_eq!(sliced_euler_characteristic(&mesh, &on_loop), 0);
    }

    #[test]
    fn slicing_cut_graph_gives_disk_counts() {
        let mesh = TriMesh::generate_genus_g(2, 8).unwrap();
        let cut = cut_graph(&mesh, &dual_spanning_tree(&mesh, 0).unwrap());
        let sliced = slice_along(&mesh, &cut.on_cut);
        let v = sliced.n_vertices() as i64;
        let e = mesh.n_edges() as i64 + cut.len() as i64;
        let f = mesh.n_faces() as i64;
        assert_eq!(v - e + f, 1);
        assert_eq!(v - e + f, sliced_euler_characteristic(&mesh, &cut.on_cut));
    }
}
