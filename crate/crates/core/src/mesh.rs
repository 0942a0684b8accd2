//! Closed oriented triangle meshes with halfedge connectivity.
//!
//! Index-based arena storage: halfedge `3*f + i` runs from `faces[f][i]` to
//! `faces[f][(i+1)%3]`. Meshes are immutable after construction and safe to
//! share read-only across workers.
//!
//! Geometry is intrinsic: all downstream computations (cotangent weights,
//! planar face layouts, areas) read per-edge lengths, which default to the
//! 3D chord lengths of the stored positions but can be overridden, e.g. to
//! build an exactly flat torus — see [`TriMesh::flat_torus_grid`].

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::math;

pub type VertexId = u32;
pub type EdgeId = u32;
pub type FaceId = u32;
pub type HalfedgeId = u32;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MeshError {
    #[error("face {0} is degenerate (repeated vertex)")]
    RepeatedVertex(FaceId),
    #[error("face {0} has near-zero area")]
    DegenerateFace(FaceId),
    #[error("face {0} references vertex {1} out of range")]
    VertexOutOfRange(FaceId, u32),
    #[error("edge ({0},{1}) bounds {2} faces, expected 2 (surface not closed or non-manifold)")]
    NonManifold(VertexId, VertexId, usize),
    #[error("edge ({0},{1}) appears twice with the same direction (inconsistent face orientation)")]
    InconsistentOrientation(VertexId, VertexId),
    #[error("vertex {0} has a disconnected one-ring (non-manifold vertex)")]
    NonManifoldVertex(VertexId),
    #[error("Euler characteristic {0} is odd (connectivity corrupt)")]
    NonIntegerGenus(i64),
    #[error("genus {genus} requires resolution >= {min}, got {res}")]
    ResolutionTooSmall { genus: u32, res: u32, min: u32 },
    #[error("mesh is disconnected ({0} shells)")]
    Disconnected(usize),
}

/// Closed oriented triangle mesh: the sensor field.
#[derive(Debug, Clone)]
pub struct TriMesh {
    positions: Vec<[f64; 3]>,
    faces: Vec<[VertexId; 3]>,
    twin: Vec<HalfedgeId>,
    he_edge: Vec<EdgeId>,
    /// Unordered vertex pairs, canonical orientation lo -> hi.
    edges: Vec<[VertexId; 2]>,
    /// The halfedge running lo -> hi for each edge.
    edge_he: Vec<HalfedgeId>,
    /// One outgoing halfedge per vertex.
    out_he: Vec<HalfedgeId>,
    edge_lengths: Vec<f64>,
    genus: u32,
}

impl TriMesh {
    /// Build and validate a mesh from an indexed triangle soup.
    ///
    /// Faces must be counter-clockwise and consistently oriented; every edge
    /// must bound exactly two faces (closed surface).
    pub fn from_faces(
        positions: Vec<[f64; 3]>,
        faces: Vec<[VertexId; 3]>,
    ) -> Result<Self, MeshError> {
        let nv = positions.len() as u32;
        for (f, tri) in faces.iter().enumerate() {
            let f = f as FaceId;
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[2] == tri[0] {
                return Err(MeshError::RepeatedVertex(f));
            }
            for &v in tri {
                if v >= nv {
                    return Err(MeshError::VertexOutOfRange(f, v));
                }
            }
        }

        // Pair halfedges by canonical (lo, hi) key.
        let nh = faces.len() * 3;
        let mut by_edge: BTreeMap<(VertexId, VertexId), Vec<HalfedgeId>> = BTreeMap::new();
        for h in 0..nh as u32 {
            let (a, b) = he_endpoints_of(&faces, h);
            let key = if a < b { (a, b) } else { (b, a) };
            by_edge.entry(key).or_default().push(h);
        }

        let mut twin = vec![u32::MAX; nh];
        let mut he_edge = vec![u32::MAX; nh];
        let mut edges = Vec::with_capacity(by_edge.len());
        let mut edge_he = Vec::with_capacity(by_edge.len());
        for (&(lo, hi), hs) in &by_edge {
            if hs.len() != 2 {
                return Err(MeshError::NonManifold(lo, hi, hs.len()));
            }
            let (h0, h1) = (hs[0], hs[1]);
            let (a0, _) = he_endpoints_of(&faces, h0);
            let (a1, _) = he_endpoints_of(&faces, h1);
            if a0 == a1 {
                return Err(MeshError::InconsistentOrientation(lo, hi));
            }
            twin[h0 as usize] = h1;
            twin[h1 as usize] = h0;
            let e = edges.len() as EdgeId;
            he_edge[h0 as usize] = e;
            he_edge[h1 as usize] = e;
            edges.push([lo, hi]);
            edge_he.push(if a0 == lo { h0 } else { h1 });
        }

        let mut out_he = vec![u32::MAX; positions.len()];
        let mut he_count = vec![0u32; positions.len()];
        for h in 0..nh as u32 {
            let (a, _) = he_endpoints_of(&faces, h);
            out_he[a as usize] = h;
            he_count[a as usize] += 1;
        }

        let edge_lengths: Vec<f64> = edges
            .iter()
            .map(|&[a, b]| dist3(positions[a as usize], positions[b as usize]))
            .collect();

        let mesh = TriMesh {
            positions,
            faces,
            twin,
            he_edge,
            edges,
            edge_he,
            out_he,
            edge_lengths,
            genus: 0,
        };
        mesh.finish_validation()
    }

    fn finish_validation(mut self) -> Result<Self, MeshError> {
        // Zero-area faces.
        for f in 0..self.n_faces() as FaceId {
            let [l01, l12, l20] = self.face_edge_lengths(f);
            let area = math::area_from_lengths(l01, l12, l20);
            let scale = l01.max(l12).max(l20);
            if !(area > 1e-14 * scale * scale) {
                return Err(MeshError::DegenerateFace(f));
            }
        }
        // One-ring of each vertex must be a single fan.
        for v in 0..self.n_vertices() as VertexId {
            let mut seen = 0usize;
            let start = self.out_he[v as usize];
            if start == u32::MAX {
                return Err(MeshError::NonManifoldVertex(v));
            }
            let mut h = start;
            loop {
                seen += 1;
                h = self.rotate_ccw(h);
                if h == start {
                    break;
                }
                if seen > self.twin.len() {
                    return Err(MeshError::NonManifoldVertex(v));
                }
            }
            let total = (0..self.twin.len() as u32)
                .filter(|&h| self.he_src(h) == v)
                .count();
            if seen != total {
                return Err(MeshError::NonManifoldVertex(v));
            }
        }
        // Connectivity (flood over faces).
        let shells = self.count_shells();
        if shells != 1 {
            return Err(MeshError::Disconnected(shells));
        }
        let chi = self.euler_characteristic();
        if (2 - chi) % 2 != 0 || chi > 2 {
            return Err(MeshError::NonIntegerGenus(chi));
        }
        self.genus = ((2 - chi) / 2) as u32;
        Ok(self)
    }

    fn count_shells(&self) -> usize {
        let nf = self.n_faces();
        if nf == 0 {
            return 0;
        }
        let mut comp = vec![u32::MAX; nf];
        let mut shells = 0;
        for seed in 0..nf {
            if comp[seed] != u32::MAX {
                continue;
            }
            let mut stack = vec![seed as u32];
            comp[seed] = shells;
            while let Some(f) = stack.pop() {
                for i in 0..3 {
                    let g = self.he_face(self.he_twin(3 * f + i));
                    if comp[g as usize] == u32::MAX {
                        comp[g as usize] = shells;
                        stack.push(g);
                    }
                }
            }
            shells += 1;
        }
        shells as usize
    }

    // --- counts -----------------------------------------------------------

    pub fn n_vertices(&self) -> usize {
        self.positions.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.n_vertices() as i64 - self.n_edges() as i64 + self.n_faces() as i64
    }

    /// g = (2 − V + E − F) / 2.
    pub fn genus(&self) -> u32 {
        self.genus
    }

    // --- raw data ---------------------------------------------------------

    pub fn positions(&self) -> &[[f64; 3]] {
        &self.positions
    }

    pub fn faces(&self) -> &[[VertexId; 3]] {
        &self.faces
    }

    pub fn face(&self, f: FaceId) -> [VertexId; 3] {
        self.faces[f as usize]
    }

    pub fn edges(&self) -> &[[VertexId; 2]] {
        &self.edges
    }

    pub fn edge_endpoints(&self, e: EdgeId) -> [VertexId; 2] {
        self.edges[e as usize]
    }

    pub fn edge_length(&self, e: EdgeId) -> f64 {
        self.edge_lengths[e as usize]
    }

    pub fn mean_edge_length(&self) -> f64 {
        self.edge_lengths.iter().sum::<f64>() / self.edge_lengths.len() as f64
    }

    // --- halfedge navigation ----------------------------------------------

    pub fn n_halfedges(&self) -> usize {
        self.twin.len()
    }

    pub fn he_face(&self, h: HalfedgeId) -> FaceId {
        h / 3
    }

    pub fn he_next(&self, h: HalfedgeId) -> HalfedgeId {
        3 * (h / 3) + (h % 3 + 1) % 3
    }

    pub fn he_prev(&self, h: HalfedgeId) -> HalfedgeId {
        3 * (h / 3) + (h % 3 + 2) % 3
    }

    pub fn he_twin(&self, h: HalfedgeId) -> HalfedgeId {
        self.twin[h as usize]
    }

    pub fn he_src(&self, h: HalfedgeId) -> VertexId {
        self.faces[(h / 3) as usize][(h % 3) as usize]
    }

    pub fn he_dst(&self, h: HalfedgeId) -> VertexId {
        self.faces[(h / 3) as usize][((h % 3 + 1) % 3) as usize]
    }

    pub fn he_edge(&self, h: HalfedgeId) -> EdgeId {
        self.he_edge[h as usize]
    }

    /// Halfedge running lo -> hi (canonical direction) of edge `e`.
    pub fn edge_halfedge(&self, e: EdgeId) -> HalfedgeId {
        self.edge_he[e as usize]
    }

    /// The two faces incident to edge `e`; `[0]` sees the edge lo -> hi.
    pub fn edge_faces(&self, e: EdgeId) -> [FaceId; 2] {
        let h = self.edge_he[e as usize];
        [self.he_face(h), self.he_face(self.he_twin(h))]
    }

    pub fn out_halfedge(&self, v: VertexId) -> HalfedgeId {
        self.out_he[v as usize]
    }

    /// Next outgoing halfedge around `he_src(h)`, counter-clockwise.
    pub fn rotate_ccw(&self, h: HalfedgeId) -> HalfedgeId {
        self.he_twin(self.he_prev(h))
    }

    /// Outgoing halfedges of `v` in counter-clockwise order.
    pub fn vertex_star(&self, v: VertexId) -> VertexStar<'_> {
        VertexStar {
            mesh: self,
            start: self.out_he[v as usize],
            current: Some(self.out_he[v as usize]),
        }
    }

    pub fn vertex_degree(&self, v: VertexId) -> usize {
        self.vertex_star(v).count()
    }

    /// Edge id joining `a` and `b`, if present.
    pub fn edge_between(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        self.vertex_star(a)
            .find(|&h| self.he_dst(h) == b)
            .map(|h| self.he_edge(h))
    }

    /// Lengths (l01, l12, l20) of the oriented sides of face `f`.
    pub fn face_edge_lengths(&self, f: FaceId) -> [f64; 3] {
        [
            self.edge_lengths[self.he_edge[(3 * f) as usize] as usize],
            self.edge_lengths[self.he_edge[(3 * f + 1) as usize] as usize],
            self.edge_lengths[self.he_edge[(3 * f + 2) as usize] as usize],
        ]
    }

    pub fn face_area(&self, f: FaceId) -> f64 {
        let [a, b, c] = self.face_edge_lengths(f);
        math::area_from_lengths(a, b, c)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_faces() as FaceId).map(|f| self.face_area(f)).sum()
    }

    /// Isometric layout of face `f` in the plane: corner i of the face maps
    /// to entry i, with corner 0 at the origin and corner 1 on +x.
    pub fn face_plane(&self, f: FaceId) -> [math::Complex64; 3] {
        let [l01, l12, l20] = self.face_edge_lengths(f);
        math::plane_triangle(l01, l12, l20)
    }

    // --- generators --------------------------------------------------------

    /// Closed genus-g surface built from g revolution tori chained by tubes.
    ///
    /// Each torus cell is a near-isotropic `3*resolution x resolution` grid
    /// on a revolution torus (major radius 3, minor 1). For g >= 2 a 2x2
    /// block of cells is removed from the facing sides of adjacent tori and
    /// the boundary rings are bridged with a triangle strip whose depth
    /// matches the local grid step. Keeping the necks small and the cells
    /// near-square is what keeps the discrete holomorphic forms well
    /// behaved there.
    pub fn generate_genus_g(g: u32, resolution: u32) -> Result<Self, MeshError> {
        assert!(g >= 1, "genus must be >= 1");
        let min = if g == 1 { 4 } else { 8 };
        if resolution < min {
            return Err(MeshError::ResolutionTooSmall {
                genus: g,
                res: resolution,
                min,
            });
        }
        let res = resolution as usize;
        let res_t = 3 * res; // along the major circle
        let hole = 2usize; // cells removed per hole side
        let (major, minor) = (3.0f64, 1.0f64);
        let step = minor * math::TAU / res as f64;
        let spacing = 2.0 * (major + minor) + step;

        let mut positions: Vec<[f64; 3]> = Vec::new();
        let mut faces: Vec<[u32; 3]> = Vec::new();

        let vid = |k: usize, i: usize, j: usize| -> u32 {
            (k * res_t * res + (i % res_t) * res + (j % res)) as u32
        };

        for k in 0..g as usize {
            let cx = k as f64 * spacing;
            for i in 0..res_t {
                // theta: position along the major circle; theta = 0 faces +x
                let theta = math::TAU * i as f64 / res_t as f64;
                for j in 0..res {
                    // phi: position around the tube; phi = 0 is the outer equator
                    let phi = math::TAU * j as f64 / res as f64;
                    let w = major + minor * math::cos(phi);
                    positions.push([
                        cx + w * math::cos(theta),
                        w * math::sin(theta),
                        minor * math::sin(phi),
                    ]);
                }
            }
            let in_block = |c: usize, center: usize, n: usize| -> bool {
                let start = (center + n - hole / 2) % n;
                (c + n - start) % n < hole
            };
            let right_hole = |i: usize, j: usize| {
                k + 1 < g as usize && in_block(i, 0, res_t) && in_block(j, 0, res)
            };
            let left_hole =
                |i: usize, j: usize| k > 0 && in_block(i, res_t / 2, res_t) && in_block(j, 0, res);

            for i in 0..res_t {
                for j in 0..res {
                    if right_hole(i, j) || left_hole(i, j) {
                        continue;
                    }
                    let a = vid(k, i, j);
                    let b = vid(k, i + 1, j);
                    let c = vid(k, i + 1, j + 1);
                    let d = vid(k, i, j + 1);
                    faces.push([a, b, c]);
                    faces.push([a, c, d]);
                }
            }
        }

        // Bridge each junction: chain the two boundary rings and join them.
        // A middle torus has holes on both sides, so the filter also keys on
        // position: the right hole of torus k sits at x > cx(k), the left
        // hole of torus k+1 at x < cx(k+1).
        for k in 0..(g as usize).saturating_sub(1) {
            let cell = (res_t * res) as u32;
            let ring_a = boundary_ring(&faces, |v| {
                v / cell == k as u32 && positions[v as usize][0] > k as f64 * spacing
            });
            let ring_b = boundary_ring(&faces, |v| {
                v / cell == k as u32 + 1 && positions[v as usize][0] < (k + 1) as f64 * spacing
            });
            join_rings(&mut faces, &positions, &ring_a, &ring_b);
        }

        // Drop unreferenced vertices (hole interiors) and compact ids.
        let mut remap = vec![u32::MAX; positions.len()];
        let mut kept: Vec<[f64; 3]> = Vec::new();
        for tri in &faces {
            for &v in tri {
                if remap[v as usize] == u32::MAX {
                    remap[v as usize] = kept.len() as u32;
                    kept.push(positions[v as usize]);
                }
            }
        }
        for tri in &mut faces {
            for v in tri.iter_mut() {
                *v = remap[*v as usize];
            }
        }

        let mesh = Self::from_faces(kept, faces)?;
        debug_assert_eq!(mesh.genus(), g);
        Ok(mesh)
    }

    /// Replace the intrinsic edge lengths (e.g. to impose an exact flat
    /// metric that 3D positions cannot represent). Faces are re-checked for
    /// degeneracy under the new metric.
    pub fn override_edge_lengths(mut self, lengths: Vec<f64>) -> Result<Self, MeshError> {
        assert_eq!(lengths.len(), self.n_edges());
        self.edge_lengths = lengths;
        for f in 0..self.n_faces() as FaceId {
            let [l01, l12, l20] = self.face_edge_lengths(f);
            let area = math::area_from_lengths(l01, l12, l20);
            let scale = l01.max(l12).max(l20);
            if !(area > 1e-14 * scale * scale) {
                return Err(MeshError::DegenerateFace(f));
            }
        }
        Ok(self)
    }

    /// Grid torus with exactly flat intrinsic geometry: an `n × n` grid on
    /// the unit square with opposite sides identified. Stored positions are
    /// the unwrapped grid points (for inspection only); edge lengths are
    /// overridden with the true flat lengths, so wrap-around faces carry the
    /// same shape as interior ones.
    pub fn flat_torus_grid(n: u32) -> Self {
        assert!(n >= 4);
        let n = n as usize;
        let step = 1.0 / n as f64;
        let mut positions = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                positions.push([i as f64 * step, j as f64 * step, 0.0]);
            }
        }
        let vid = |i: usize, j: usize| ((i % n) * n + j % n) as u32;
        let mut faces = Vec::with_capacity(2 * n * n);
        for i in 0..n {
            for j in 0..n {
                let (a, b, c, d) = (vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1));
                faces.push([a, b, c]);
                faces.push([a, c, d]);
            }
        }
        let mut mesh = Self::from_faces(positions, faces).expect("grid torus is valid");
        let diag = math::hypot(step, step);
        for (e, &[a, b]) in mesh.edges.clone().iter().enumerate() {
            let (ai, aj) = ((a as usize) / n, (a as usize) % n);
            let (bi, bj) = ((b as usize) / n, (b as usize) % n);
            let di = (ai + n - bi) % n;
            let dj = (aj + n - bj) % n;
            mesh.edge_lengths[e] = match (di.min(n - di), dj.min(n - dj)) {
                (1, 0) | (0, 1) => step,
                (1, 1) => diag,
                other => unreachable!("grid edge with offset {other:?}"),
            };
        }
        mesh
    }
}

/// Counter-clockwise iterator over the outgoing halfedges of a vertex.
pub struct VertexStar<'a> {
    mesh: &'a TriMesh,
    start: HalfedgeId,
    current: Option<HalfedgeId>,
}

impl Iterator for VertexStar<'_> {
    type Item = HalfedgeId;

    fn next(&mut self) -> Option<HalfedgeId> {
        let h = self.current?;
        let next = self.mesh.rotate_ccw(h);
        self.current = if next == self.start { None } else { Some(next) };
        Some(h)
    }
}

fn he_endpoints_of(faces: &[[u32; 3]], h: HalfedgeId) -> (VertexId, VertexId) {
    let tri = faces[(h / 3) as usize];
    let i = (h % 3) as usize;
    (tri[i], tri[(i + 1) % 3])
}

fn dist3(a: [f64; 3], b: [f64; 3]) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    math::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2])
}

/// Directed boundary cycle of the open side of a face soup, restricted to
/// vertices accepted by `belongs`. Each returned edge (v[i] -> v[i+1]) is the
/// direction a new face must use to close the surface consistently.
fn boundary_ring(faces: &[[u32; 3]], belongs: impl Fn(u32) -> bool) -> Vec<u32> {
    let mut directed: BTreeMap<(u32, u32), ()> = BTreeMap::new();
    for tri in faces {
        for i in 0..3 {
            directed.insert((tri[i], tri[(i + 1) % 3]), ());
        }
    }
    // Boundary halfedges: present in one direction only. The missing
    // (reversed) direction is what the bridging faces must use.
    let mut next_of: BTreeMap<u32, u32> = BTreeMap::new();
    for &(a, b) in directed.keys() {
        if !directed.contains_key(&(b, a)) && belongs(a) && belongs(b) {
            next_of.insert(b, a); // reversed
        }
    }
    let &start = next_of.keys().next().expect("ring not found");
    let mut ring = vec![start];
    let mut cur = start;
    loop {
        let nxt = next_of[&cur];
        if nxt == start {
            break;
        }
        ring.push(nxt);
        cur = nxt;
    }
    assert_eq!(ring.len(), next_of.len(), "hole boundary is a single cycle");
    ring
}

/// Join two directed boundary rings with a strip of 2L triangles, choosing
/// the rotation that keeps the strip shortest.
fn join_rings(faces: &mut Vec<[u32; 3]>, positions: &[[f64; 3]], a: &[u32], b: &[u32]) {
    let l = a.len();
    assert_eq!(l, b.len(), "rings must have matching length");
    // Ring b is traversed in the opposite cyclic direction; pick the offset
    // m minimizing total strut length between matched vertices.
    let score = |m: usize| -> f64 {
        (0..l)
            .map(|i| {
                dist3(
                    positions[a[i] as usize],
                    positions[b[(m + l - i) % l] as usize],
                )
            })
            .sum()
    };
    let m_best = (0..l)
        .min_by(|&x, &y| score(x).partial_cmp(&score(y)).unwrap())
        .unwrap();
    for i in 0..l {
        let ai = a[i];
        let ai1 = a[(i + 1) % l];
        let bj = b[(m_best + l - i) % l];
        let bj1 = b[(m_best + l - i - 1) % l];
        faces.push([ai, ai1, bj1]);
        faces.push([ai, bj1, bj]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn tetrahedron() -> TriMesh {
        let positions = vec![
            [1.0, 1.0, 1.0],
            [1.0, -1.0, -1.0],
            [-1.0, 1.0, -1.0],
            [-1.0, -1.0, 1.0],
        ];
        let faces = vec![[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]];
        TriMesh::from_faces(positions, faces).unwrap()
    }

    #[test]
    fn tetrahedron_counts() {
        let m = tetrahedron();
        assert_eq!((m.n_vertices(), m.n_edges(), m.n_faces()), (4, 6, 4));
        assert_eq!(m.genus(), 0);
    }

    #[test]
    fn torus_grid_counts() {
        // 3*res x res grid: V = 3*64, E = 3V, F = 2V.
        let m = TriMesh::generate_genus_g(1, 8).unwrap();
        assert_eq!((m.n_vertices(), m.n_edges(), m.n_faces()), (192, 576, 384));
        assert_eq!(m.genus(), 1);
    }

    #[test]
    fn generated_genus_matches_request() {
        for g in 1..=5 {
            for res in [8u32, 16] {
                let m = TriMesh::generate_genus_g(g, res).unwrap();
                assert_eq!(m.genus(), g, "genus {g} res {res}");
                assert_eq!(3 * m.n_faces(), 2 * m.n_edges());
            }
        }
        let m = TriMesh::generate_genus_g(3, 32).unwrap();
        assert_eq!(m.genus(), 3);
    }

    #[test]
    fn euler_characteristics() {
        assert_eq!(TriMesh::generate_genus_g(1, 16).unwrap().euler_characteristic(), 0);
        assert_eq!(TriMesh::generate_genus_g(2, 16).unwrap().euler_characteristic(), -2);
        assert_eq!(TriMesh::generate_genus_g(3, 8).unwrap().euler_characteristic(), -4);
    }

    #[test]
    fn nonmanifold_edge_is_rejected() {
        // Three faces sharing edge (0,1).
        let positions = vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [1.0, 1.0, 1.0],
        ];
        let faces = vec![[0, 1, 2], [1, 0, 3], [0, 1, 4]];
        match TriMesh::from_faces(positions, faces) {
            Err(MeshError::NonManifold(0, 1, 3)) => {}
            other => panic!("expected NonManifold, got {other:?}"),
        }
    }

    #[test]
    fn inconsistent_orientation_is_rejected() {
        let positions = vec![
            [1.0, 1.0, 1.0],
            [1.0, -1.0, -1.0],
            [-1.0, 1.0, -1.0],
            [-1.0, -1.0, 1.0],
        ];
        // Second face flipped relative to the tetrahedron above.
        let faces = vec![[0, 2, 1], [0, 3, 1], [0, 3, 2], [1, 2, 3]];
        assert!(matches!(
            TriMesh::from_faces(positions, faces),
            Err(MeshError::InconsistentOrientation(..)) | Err(MeshError::NonManifold(..))
        ));
    }

    #[test]
    fn vertex_star_is_full_ring() {
        let m = TriMesh::generate_genus_g(1, 8).unwrap();
        for v in 0..m.n_vertices() as u32 {
            assert_eq!(m.vertex_degree(v), 6);
            for h in m.vertex_star(v) {
                assert_eq!(m.he_src(h), v);
            }
        }
    }

    #[test]
    fn flat_torus_has_flat_lengths() {
        let m = TriMesh::flat_torus_grid(8);
        assert_eq!(m.genus(), 1);
        let step = 1.0 / 8.0;
        for e in 0..m.n_edges() as u32 {
            let l = m.edge_length(e);
            assert!(
                (l - step).abs() < 1e-15 || (l - step * 2.0f64.sqrt()).abs() < 1e-15,
                "unexpected flat length {l}"
            );
        }
        // Total area is exactly the unit square.
        assert!((m.total_area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn low_resolution_rejected_for_high_genus() {
        assert!(matches!(
            TriMesh::generate_genus_g(2, 6),
            Err(MeshError::ResolutionTooSmall { .. })
        ));
    }
}
