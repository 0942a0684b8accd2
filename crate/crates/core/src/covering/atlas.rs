//! Handle segmentation and the glued flat-torus atlas.
//!
//! Cutting the surface along the critical graph leaves g components. Every
//! face is divided by its critical chords into horizontal slabs; slabs
//! connect across the sub-intervals of shared edges left free by the
//! crossings, and a union-find over those adjacencies yields the
//! components. Developing each component face by face (translations only)
//! wraps it onto a flat torus: the translation defects of the non-tree
//! adjacencies generate the component's period lattice. A critical segment
//! whose two sides fall in the same component is interior to its handle;
//! one separating two components becomes a slit, its two sides glued to
//! each other by a rigid translation ("top of one torus to bottom of the
//! other").

use alloc::vec;
use alloc::vec::Vec;

use super::trace::CriticalGraph;
use super::{CoveringError, FormCharts, ZeroPoint};
use crate::math::{self, Complex64};
use crate::mesh::{EdgeId, FaceId, HalfedgeId, TriMesh, VertexId};

/// One slab of a face developed into a handle's plane.
#[derive(Debug, Clone)]
pub struct Tile {
    pub face: FaceId,
    /// Developed chart corners of the face (corner i of the face).
    pub corners: [Complex64; 3],
    /// Valid band of imaginary parts inside this tile (slab bounds).
    pub im_lo: f64,
    pub im_hi: f64,
}

/// One side of a slit: a horizontal segment in a handle's development, glued
/// to its partner side on another handle.
#[derive(Debug, Clone)]
pub struct SlitSide {
    pub handle: usize,
    pub start: Complex64,
    pub end: Complex64,
    /// True when the handle's material lies above the slit (the side is hit
    /// by downward motion).
    pub from_above: bool,
    /// Index of the glued partner side in `CoveringAtlas::slit_sides`.
    pub partner: usize,
    /// Critical segment this side belongs to.
    pub segment: usize,
}

impl SlitSide {
    pub fn length(&self) -> f64 {
        (self.end - self.start).norm()
    }
}

/// One genus-1 component developed onto `R^2 / lattice`.
pub struct Handle {
    /// Two lattice generators, positively oriented.
    pub lattice: [Complex64; 2],
    pub tiles: Vec<Tile>,
    /// Developed position of every mesh vertex carried by this handle.
    pub vertex_flat: Vec<Option<Complex64>>,
    /// Faces contributing at least one tile.
    pub faces: Vec<FaceId>,
    /// Indices into `CoveringAtlas::slit_sides` of the sides in this handle.
    pub slit_ids: Vec<usize>,
    /// Area of the fundamental parallelogram.
    pub area: f64,
    inv: [[f64; 2]; 2],
    grid: LocatorGrid,
}

impl Handle {
    /// Lattice coordinates (s, t) of a plane point: `p = s g1 + t g2`.
    pub fn to_st(&self, p: Complex64) -> (f64, f64) {
        (
            self.inv[0][0] * p.re + self.inv[0][1] * p.im,
            self.inv[1][0] * p.re + self.inv[1][1] * p.im,
        )
    }

    pub fn to_plane(&self, s: f64, t: f64) -> Complex64 {
        self.lattice[0] * s + self.lattice[1] * t
    }

    /// Canonical representative inside the fundamental parallelogram.
    pub fn reduce(&self, p: Complex64) -> Complex64 {
        let (s, t) = self.to_st(p);
        self.to_plane(fract(s), fract(t))
    }

    /// Flat distance between two points of the torus.
    pub fn torus_distance(&self, a: Complex64, b: Complex64) -> f64 {
        let d = self.reduce(a - b);
        let mut best = f64::INFINITY;
        for m in -1..=1 {
            for n in -1..=1 {
                let cand = d + self.lattice[0] * m as f64 + self.lattice[1] * n as f64;
                best = best.min(cand.norm());
            }
        }
        best
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * (self.lattice[0].norm() + self.lattice[1].norm())
    }

    /// Find the tile containing `p` (any lattice representative) and return
    /// it with the matching developed-frame representative of `p`.
    pub fn locate(&self, p: Complex64, eps_rel: f64) -> Option<(usize, Complex64)> {
        let (s, t) = self.to_st(p);
        let (s, t) = (fract(s), fract(t));
        let bin = self.grid.bin_of(s, t);
        let base = self.to_plane(s, t);
        let mut best: Option<(usize, Complex64, f64)> = None;
        for &(tile_idx, m, n) in &self.grid.bins[bin] {
            let cand = base + self.lattice[0] * m as f64 + self.lattice[1] * n as f64;
            let tile = &self.tiles[tile_idx as usize];
            if let Some(margin) = tile_margin(tile, cand) {
                if margin >= -eps_rel && best.map_or(true, |(_, _, bm)| margin > bm) {
                    best = Some((tile_idx as usize, cand, margin));
                }
            }
        }
        best.map(|(i, c, _)| (i, c))
    }
}

/// Smallest normalized barycentric coordinate of `p` in the tile, or `None`
/// when outside the tile's imaginary band. Non-negative means inside.
fn tile_margin(tile: &Tile, p: Complex64) -> Option<f64> {
    let band = (tile.im_hi - tile.im_lo).min(1.0);
    let band_eps = 1e-9 * (1.0 + band.abs());
    if p.im < tile.im_lo - band_eps || p.im > tile.im_hi + band_eps {
        return None;
    }
    let [a, b, c] = tile.corners;
    let area2 = cross(b - a, c - a);
    if area2 <= 0.0 {
        return None;
    }
    let ba = cross(b - a, p - a) / area2;
    let cb = cross(c - b, p - b) / area2;
    let ac = cross(a - c, p - c) / area2;
    Some(ba.min(cb).min(ac))
}

/// Barycentric coordinates of `p` with respect to the tile's face corners.
pub fn tile_barycentric(tile: &Tile, p: Complex64) -> [f64; 3] {
    let [a, b, c] = tile.corners;
    let area2 = cross(b - a, c - a);
    let wa = cross(b - p, c - p) / area2;
    let wb = cross(c - p, a - p) / area2;
    [wa, wb, 1.0 - wa - wb]
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn fract(x: f64) -> f64 {
    let f = x - math::floor(x);
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// The branched-covering image: g flat tori with slits and their gluing.
pub struct CoveringAtlas {
    pub handles: Vec<Handle>,
    pub slit_sides: Vec<SlitSide>,
    pub zeros: Vec<ZeroPoint>,
}

impl CoveringAtlas {
    pub fn n_handles(&self) -> usize {
        self.handles.len()
    }

    /// Handle and developed position of a vertex (first carrying handle).
    pub fn vertex_location(&self, v: VertexId) -> Option<(usize, Complex64)> {
        for (hi, h) in self.handles.iter().enumerate() {
            if let Some(p) = h.vertex_flat[v as usize] {
                return Some((hi, p));
            }
        }
        None
    }

    pub fn total_perimeter(&self) -> f64 {
        self.handles.iter().map(|h| h.perimeter()).sum()
    }

    pub fn total_area(&self) -> f64 {
        self.handles.iter().map(|h| h.area).sum()
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            self.parent[x as usize] = self.parent[self.parent[x as usize] as usize];
            x = self.parent[x as usize];
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb) as usize] = ra.min(rb);
        }
    }
}

/// Cut the surface along the critical graph, develop each component onto
/// its flat torus, and assemble the atlas of slits and gluings.
pub fn segment_handles(
    mesh: &TriMesh,
    charts: &FormCharts,
    zeros: &[ZeroPoint],
    graph: &CriticalGraph,
) -> Result<CoveringAtlas, CoveringError> {
    let g = mesh.genus() as usize;
    let nf = mesh.n_faces();
    let total_chart_area = charts.total_area(mesh);
    let scale = math::sqrt(total_chart_area);
    let tol = 1e-9 * scale;

    // Chords per face (level + owning segment piece) and crossings per edge.
    let mut face_chords: Vec<Vec<(f64, usize, usize)>> = vec![Vec::new(); nf];
    let mut edge_params: Vec<Vec<f64>> = vec![Vec::new(); mesh.n_edges()];
    for (si, seg) in graph.segments.iter().enumerate() {
        for (pi, piece) in seg.pieces.iter().enumerate() {
            face_chords[piece.face as usize].push((piece.level(), si, pi));
        }
        for &(e, t) in &seg.crossings {
            edge_params[e as usize].push(t);
        }
    }
    for chords in face_chords.iter_mut() {
        chords.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    }
    // Validate chord separation and interiority.
    for f in 0..nf {
        let chords = &face_chords[f];
        if chords.is_empty() {
            continue;
        }
        let tri = charts.face_triangle(f as FaceId);
        let (min_im, max_im) = tri.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
            (lo.min(c.im), hi.max(c.im))
        });
        for w in chords.windows(2) {
            if w[1].0 - w[0].0 <= tol {
                return Err(CoveringError::DegenerateLevels);
            }
        }
        for &(level, _, _) in chords {
            if level <= min_im + tol || level >= max_im - tol {
                return Err(CoveringError::DegenerateLevels);
            }
        }
    }

    // Slab ids: chords split face f into face_chords[f].len() + 1 bands.
    let mut slab_offset = vec![0u32; nf + 1];
    for f in 0..nf {
        slab_offset[f + 1] = slab_offset[f] + face_chords[f].len() as u32 + 1;
    }
    let n_slabs = slab_offset[nf] as usize;
    let slab_of = |f: usize, im: f64| -> Result<u32, CoveringError> {
        let chords = &face_chords[f];
        let mut idx = 0u32;
        for &(level, _, _) in chords {
            if math::abs(im - level) <= tol {
                return Err(CoveringError::DegenerateLevels);
            }
            if im > level {
                idx += 1;
            }
        }
        Ok(slab_offset[f] + idx)
    };

    // Connect slabs across the free sub-intervals of every edge.
    let mut uf = UnionFind::new(n_slabs);
    let mut adjacency: Vec<(u32, u32, Complex64)> = Vec::new();
    for e in 0..mesh.n_edges() as u32 {
        let params = &mut edge_params[e as usize];
        params.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for w in params.windows(2) {
            if w[1] - w[0] <= 1e-12 {
                return Err(CoveringError::DegenerateLevels);
            }
        }
        let h = mesh.edge_halfedge(e);
        let h_twin = mesh.he_twin(h);
        let shift = charts.transition(mesh, h); // face(h) -> face(h_twin)
        let mut bounds = alloc::vec![0.0f64];
        bounds.extend_from_slice(params);
        bounds.push(1.0);
        for w in bounds.windows(2) {
            if w[1] - w[0] <= 1e-12 {
                continue;
            }
            let mid = 0.5 * (w[0] + w[1]);
            // Imaginary part of the midpoint in both side charts. The
            // canonical halfedge runs lo -> hi with parameter `mid`; the
            // twin sees 1 - mid.
            let ca = charts.corner(h);
            let cb = charts.corner(mesh.he_next(h));
            let im_a = ca.im + mid * (cb.im - ca.im);
            let cc = charts.corner(h_twin);
            let cd = charts.corner(mesh.he_next(h_twin));
            let im_b = cc.im + (1.0 - mid) * (cd.im - cc.im);
            let sa = slab_of(mesh.he_face(h) as usize, im_a)?;
            let sb = slab_of(mesh.he_face(h_twin) as usize, im_b)?;
            uf.union(sa, sb);
            adjacency.push((sa, sb, shift));
        }
    }

    // Components of the cut surface.
    let mut comp_of = vec![u32::MAX; n_slabs];
    let mut n_comps = 0u32;
    for s in 0..n_slabs as u32 {
        let r = uf.find(s);
        if comp_of[r as usize] == u32::MAX {
            comp_of[r as usize] = n_comps;
            n_comps += 1;
        }
        comp_of[s as usize] = comp_of[r as usize];
    }
    if n_comps as usize != g {
        return Err(CoveringError::WrongComponentCount {
            found: n_comps as usize,
            expected: g,
        });
    }

    // Chord index of each segment piece within its face's sorted levels.
    let chord_rank = |si: usize, pi: usize, f: usize| -> u32 {
        face_chords[f]
            .iter()
            .position(|&(_, s, p)| s == si && p == pi)
            .expect("piece registered") as u32
    };
    let slabs_beside = |si: usize, pi: usize, f: usize| -> (u32, u32) {
        let j = chord_rank(si, pi, f);
        (slab_offset[f] + j, slab_offset[f] + j + 1) // (below, above)
    };

    // Classify segments: interior to one handle, or a slit between two.
    let mut seg_comps = Vec::with_capacity(graph.segments.len());
    for (si, seg) in graph.segments.iter().enumerate() {
        let mut below_above: Option<(u32, u32)> = None;
        for (pi, piece) in seg.pieces.iter().enumerate() {
            let (b, a) = slabs_beside(si, pi, piece.face as usize);
            let pair = (comp_of[b as usize], comp_of[a as usize]);
            match below_above {
                None => below_above = Some(pair),
                Some(prev) if prev == pair => {}
                Some(_) => return Err(CoveringError::DegenerateLevels),
            }
        }
        seg_comps.push(below_above.expect("segment has pieces"));
    }

    // Development: internal chords reconnect the two slabs of their face.
    let mut dev_adjacency = adjacency;
    for (si, seg) in graph.segments.iter().enumerate() {
        let (below, above) = seg_comps[si];
        if below == above {
            for (pi, piece) in seg.pieces.iter().enumerate() {
                let (b, a) = slabs_beside(si, pi, piece.face as usize);
                dev_adjacency.push((b, a, Complex64::new(0.0, 0.0)));
            }
        }
    }
    let mut adj_lists: Vec<Vec<(u32, Complex64)>> = vec![Vec::new(); n_slabs];
    for &(a, b, t) in &dev_adjacency {
        adj_lists[a as usize].push((b, t));
        adj_lists[b as usize].push((a, -t));
    }
    let mut offset = vec![Complex64::new(f64::NAN, f64::NAN); n_slabs];
    let mut discrepancies: Vec<Vec<Complex64>> = vec![Vec::new(); g];
    for root in 0..n_slabs as u32 {
        if !offset[root as usize].re.is_nan() {
            continue;
        }
        offset[root as usize] = Complex64::new(0.0, 0.0);
        let mut queue = alloc::collections::VecDeque::new();
        queue.push_back(root);
        while let Some(s) = queue.pop_front() {
            let comp = comp_of[s as usize] as usize;
            for &(w, t) in &adj_lists[s as usize] {
                let expected = offset[s as usize] + t;
                if offset[w as usize].re.is_nan() {
                    offset[w as usize] = expected;
                    queue.push_back(w);
                } else {
                    let d = offset[w as usize] - expected;
                    if d.norm() > tol {
                        discrepancies[comp].push(d);
                    }
                }
            }
        }
    }

    let mut lattices = Vec::with_capacity(g);
    for (comp, cands) in discrepancies.iter().enumerate() {
        let lat = lattice_basis(cands, scale).ok_or(CoveringError::LatticeRank(comp))?;
        lattices.push(lat);
    }

    // Slit sides of interface segments, developed by walking the pieces.
    let mut slit_sides: Vec<SlitSide> = Vec::new();
    for (si, seg) in graph.segments.iter().enumerate() {
        let (below_comp, above_comp) = seg_comps[si];
        if below_comp == above_comp {
            continue;
        }
        let (b0, a0) = slabs_beside(si, 0, seg.pieces[0].face as usize);
        let mut endpoints = [Complex64::new(0.0, 0.0); 4]; // above start/end, below start/end
        for (k, start_slab) in [a0, b0].iter().enumerate() {
            let mut o = offset[*start_slab as usize];
            let mut start = seg.pieces[0].enter + o;
            let mut end = seg.pieces[0].exit + o;
            for (pi, piece) in seg.pieces.iter().enumerate().skip(1) {
                let (e, _) = seg.crossings[pi - 1];
                let prev_face = seg.pieces[pi - 1].face;
                let h = (0..3u32)
                    .map(|i| 3 * prev_face + i)
                    .find(|&h| mesh.he_edge(h) == e)
                    .expect("crossed edge bounds previous face");
                o += charts.transition(mesh, h);
                end = piece.exit + o;
                let _ = piece;
            }
            if k == 0 {
                endpoints[0] = start;
                endpoints[1] = end;
            } else {
                endpoints[2] = start;
                endpoints[3] = end;
            }
            let _ = &mut start;
        }
        let snap_tol = 1.05
            * (graph.snap_radius[seg.start_zero] + graph.snap_radius[seg.end_zero])
            + tol;
        if math::abs(endpoints[1].im - endpoints[0].im) > snap_tol
            || math::abs(endpoints[3].im - endpoints[2].im) > snap_tol
        {
            return Err(CoveringError::NonHorizontalSlit);
        }
        let above_len = (endpoints[1] - endpoints[0]).norm();
        let below_len = (endpoints[3] - endpoints[2]).norm();
        if math::abs(above_len - below_len) > 1e-6 {
            return Err(CoveringError::NonHorizontalSlit);
        }
        let idx = slit_sides.len();
        slit_sides.push(SlitSide {
            handle: above_comp as usize,
            start: endpoints[0],
            end: endpoints[1],
            from_above: true,
            partner: idx + 1,
            segment: si,
        });
        slit_sides.push(SlitSide {
            handle: below_comp as usize,
            start: endpoints[2],
            end: endpoints[3],
            from_above: false,
            partner: idx,
            segment: si,
        });
    }

    // Assemble handles: tiles, vertex positions, face lists, grids.
    let mut handles: Vec<Handle> = Vec::with_capacity(g);
    for comp in 0..g {
        let lattice = lattices[comp];
        let det = cross(lattice[0], lattice[1]);
        let inv = [
            [lattice[1].im / det, -lattice[1].re / det],
            [-lattice[0].im / det, lattice[0].re / det],
        ];
        let mut tiles = Vec::new();
        let mut vertex_flat = vec![None; mesh.n_vertices()];
        let mut faces = Vec::new();
        let mut face_seen = vec![false; nf];
        for f in 0..nf {
            let levels = &face_chords[f];
            let n_bands = levels.len() + 1;
            for j in 0..n_bands {
                let slab = slab_offset[f] + j as u32;
                if comp_of[slab as usize] as usize != comp {
                    continue;
                }
                let o = offset[slab as usize];
                let tri = charts.face_triangle(f as FaceId);
                let corners = [tri[0] + o, tri[1] + o, tri[2] + o];
                let im_lo = if j == 0 {
                    f64::NEG_INFINITY
                } else {
                    levels[j - 1].0 + o.im
                };
                let im_hi = if j == levels.len() {
                    f64::INFINITY
                } else {
                    levels[j].0 + o.im
                };
                tiles.push(Tile {
                    face: f as FaceId,
                    corners,
                    im_lo,
                    im_hi,
                });
                if !face_seen[f] {
                    face_seen[f] = true;
                    faces.push(f as FaceId);
                }
                for (i, c) in corners.iter().enumerate() {
                    if c.im >= im_lo - tol && c.im <= im_hi + tol {
                        let v = mesh.face(f as FaceId)[i] as usize;
                        if vertex_flat[v].is_none() {
                            vertex_flat[v] = Some(*c);
                        }
                    }
                }
            }
        }
        let area = math::abs(det);
        let grid = LocatorGrid::build(&tiles, &lattice, &inv);
        handles.push(Handle {
            lattice,
            tiles,
            vertex_flat,
            faces,
            slit_ids: Vec::new(),
            area,
            inv,
            grid,
        });
    }

    // Normalize slit representatives into the fundamental parallelogram and
    // register them with their handles.
    for (i, side) in slit_sides.iter_mut().enumerate() {
        let h = &handles[side.handle];
        let mid = (side.start + side.end) * 0.5;
        let shift = h.reduce(mid) - mid;
        side.start += shift;
        side.end += shift;
        let _ = i;
    }
    for (i, side) in slit_sides.iter().enumerate() {
        handles[side.handle].slit_ids.push(i);
    }

    // The handle parallelograms together must tile the whole flat surface.
    let handle_area: f64 = handles.iter().map(|h| h.area).sum();
    if math::abs(handle_area - total_chart_area) > 1e-6 * total_chart_area {
        return Err(CoveringError::AreaMismatch {
            handles: handle_area,
            total: total_chart_area,
        });
    }

    Ok(CoveringAtlas {
        handles,
        slit_sides,
        zeros: zeros.to_vec(),
    })
}

/// Reduce a set of lattice-vector candidates to two independent generators;
/// every candidate must be an integer combination of the result.
///
/// Greedy insertion in norm order; when a candidate leaves a residual that
/// the current pair cannot represent, the residual is a shorter lattice
/// vector and the insertion restarts with it included. Each restart shrinks
/// the basis determinant by an integer factor, so the loop terminates.
fn lattice_basis(cands: &[Complex64], scale: f64) -> Option<[Complex64; 2]> {
    let tol = 1e-6 * scale;
    let mut vs: Vec<Complex64> = cands.iter().copied().filter(|v| v.norm() > tol).collect();
    let mut basis: Vec<Complex64> = Vec::new();
    'restart: for _attempt in 0..16 {
        vs.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
        vs.dedup_by(|a, b| (*a - *b).norm() <= tol);
        basis.clear();
        for &v in &vs {
            let r = reduce_against(v, &basis);
            if r.norm() > tol {
                if basis.len() < 2 {
                    basis.push(r);
                    lagrange_reduce(&mut basis);
                } else {
                    vs.push(r);
                    continue 'restart;
                }
            }
        }
        break;
    }
    if basis.len() != 2 {
        return None;
    }
    // Verify integrality of all candidates.
    let det = cross(basis[0], basis[1]);
    if math::abs(det) <= tol * tol {
        return None;
    }
    for &v in &vs {
        let s = cross(v, basis[1]) / det;
        let t = cross(basis[0], v) / det;
        if math::abs(s - math::round(s)) > 1e-4 || math::abs(t - math::round(t)) > 1e-4 {
            return None;
        }
    }
    let mut out = [basis[0], basis[1]];
    if cross(out[0], out[1]) < 0.0 {
        out.swap(0, 1);
    }
    Some(out)
}

fn reduce_against(mut v: Complex64, basis: &[Complex64]) -> Complex64 {
    match basis.len() {
        0 => v,
        1 => {
            let g = basis[0];
            let k = math::round((v.re * g.re + v.im * g.im) / g.norm_sqr());
            v - g * k
        }
        _ => {
            let det = cross(basis[0], basis[1]);
            let s = cross(v, basis[1]) / det;
            let t = cross(basis[0], v) / det;
            v -= basis[0] * math::round(s) + basis[1] * math::round(t);
            v
        }
    }
}

fn lagrange_reduce(basis: &mut Vec<Complex64>) {
    if basis.len() < 2 {
        return;
    }
    for _ in 0..64 {
        if basis[0].norm() > basis[1].norm() {
            basis.swap(0, 1);
        }
        let g = basis[0];
        let k = math::round((basis[1].re * g.re + basis[1].im * g.im) / g.norm_sqr());
        let reduced = basis[1] - g * k;
        if reduced.norm() >= basis[1].norm() - 1e-15 {
            break;
        }
        basis[1] = reduced;
    }
    if basis[0].norm() > basis[1].norm() {
        basis.swap(0, 1);
    }
}

/// Uniform grid over the fundamental parallelogram mapping bins to the
/// tiles (with lattice offsets) that may contain a query point.
struct LocatorGrid {
    res: usize,
    bins: Vec<Vec<(u32, i8, i8)>>,
}

impl LocatorGrid {
    fn build(tiles: &[Tile], lattice: &[Complex64; 2], inv: &[[f64; 2]; 2]) -> Self {
        let res = ((tiles.len() as f64).sqrt() as usize).clamp(4, 128);
        let mut bins = vec![Vec::new(); res * res];
        let to_st = |p: Complex64| -> (f64, f64) {
            (
                inv[0][0] * p.re + inv[0][1] * p.im,
                inv[1][0] * p.re + inv[1][1] * p.im,
            )
        };
        let _ = lattice;
        for (ti, tile) in tiles.iter().enumerate() {
            let sts: Vec<(f64, f64)> = tile.corners.iter().map(|&c| to_st(c)).collect();
            let (mut s_lo, mut s_hi, mut t_lo, mut t_hi) =
                (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
            for &(s, t) in &sts {
                s_lo = s_lo.min(s);
                s_hi = s_hi.max(s);
                t_lo = t_lo.min(t);
                t_hi = t_hi.max(t);
            }
            let pad = 1e-9;
            // A reduced query point q in [0,1)^2 matches this tile with
            // offset (m, n) iff q + (m, n) lies in the tile's st-bbox.
            let m_lo = math::floor(s_lo - pad) as i64;
            let m_hi = math::floor(s_hi + pad) as i64;
            let n_lo = math::floor(t_lo - pad) as i64;
            let n_hi = math::floor(t_hi + pad) as i64;
            for m in m_lo..=m_hi {
                for n in n_lo..=n_hi {
                    // Query region covered: bbox shifted by -(m, n), clipped.
                    let qs_lo = (s_lo - pad - m as f64).max(0.0);
                    let qs_hi = (s_hi + pad - m as f64).min(1.0 - f64::EPSILON);
                    let qt_lo = (t_lo - pad - n as f64).max(0.0);
                    let qt_hi = (t_hi + pad - n as f64).min(1.0 - f64::EPSILON);
                    if qs_lo > qs_hi || qt_lo > qt_hi {
                        continue;
                    }
                    let bs_lo = (qs_lo * res as f64) as usize;
                    let bs_hi = (qs_hi * res as f64) as usize;
                    let bt_lo = (qt_lo * res as f64) as usize;
                    let bt_hi = (qt_hi * res as f64) as usize;
                    for bs in bs_lo..=bs_hi.min(res - 1) {
                        for bt in bt_lo..=bt_hi.min(res - 1) {
                            bins[bs * res + bt].push((ti as u32, m as i8, n as i8));
                        }
                    }
                }
            }
        }
        LocatorGrid { res, bins }
    }

    fn bin_of(&self, s: f64, t: f64) -> usize {
        let bs = ((s * self.res as f64) as usize).min(self.res - 1);
        let bt = ((t * self.res as f64) as usize).min(self.res - 1);
        bs * self.res + bt
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::{find_zeros, select_covering_form, trace_critical, FormCharts};
    use crate::hodge::holomorphic_basis;
    use crate::topology::{cut_graph, dual_spanning_tree};

    #[test]
    fn lattice_basis_recovers_generators() {
        let g1 = Complex64::new(1.0, 0.0);
        let g2 = Complex64::new(0.25, 0.75);
        let cands = vec![
            g1 * 3.0 + g2,
            g2 * 2.0,
            g1 - g2 * 5.0,
            g1,
            g1 * -2.0 + g2 * 7.0,
        ];
        let basis = lattice_basis(&cands, 1.0).unwrap();
        let det = (basis[0].re * basis[1].im - basis[0].im * basis[1].re).abs();
        assert!((det - (g1.re * g2.im - g1.im * g2.re).abs()).abs() < 1e-9);
    }

    #[test]
    fn lattice_basis_rejects_rank_one() {
        let g1 = Complex64::new(1.0, 0.5);
        let cands = vec![g1, g1 * 2.0, g1 * -3.0];
        assert!(lattice_basis(&cands, 1.0).is_none());
    }

    #[test]
    fn flat_torus_atlas_is_one_square_handle() {
        let n = 8;
        let mesh = TriMesh::flat_torus_grid(n);
        let form = crate::covering::tests::flat_torus_form(&mesh, n);
        let charts = FormCharts::new(&mesh, &form);
        let zeros = find_zeros(&mesh, &charts).unwrap();
        let graph = trace_critical(&mesh, &charts, &zeros, 100.0).unwrap();
        let atlas = segment_handles(&mesh, &charts, &zeros, &graph).unwrap();
        assert_eq!(atlas.n_handles(), 1);
        assert!(atlas.slit_sides.is_empty());
        let h = &atlas.handles[0];
        assert!((h.area - 1.0).abs() < 1e-9);
        assert!((h.lattice[0].norm() - 1.0).abs() < 1e-9);
        assert!((h.lattice[1].norm() - 1.0).abs() < 1e-9);
        assert_eq!(h.tiles.len(), mesh.n_faces());
        // Every vertex is carried with a position.
        assert!(h.vertex_flat.iter().all(|p| p.is_some()));
    }

    #[test]
    fn flat_torus_locate_roundtrip() {
        let n = 8;
        let mesh = TriMesh::flat_torus_grid(n);
        let form = crate::covering::tests::flat_torus_form(&mesh, n);
        let charts = FormCharts::new(&mesh, &form);
        let zeros = find_zeros(&mesh, &charts).unwrap();
        let graph = trace_critical(&mesh, &charts, &zeros, 100.0).unwrap();
        let atlas = segment_handles(&mesh, &charts, &zeros, &graph).unwrap();
        let h = &atlas.handles[0];
        let mut gen = crate::rng::stream_rng(3, "locate");
        for _ in 0..500 {
            let p = Complex64::new(
                crate::rng::uniform_open01(&mut gen) * 3.0 - 1.5,
                crate::rng::uniform_open01(&mut gen) * 3.0 - 1.5,
            );
            let (tile_idx, dev) = h.locate(p, 1e-9).expect("point on torus must locate");
            let tile = &h.tiles[tile_idx];
            let bary = tile_barycentric(tile, dev);
            for b in bary {
                assert!(b >= -1e-9 && b <= 1.0 + 1e-9);
            }
            // The developed representative reduces to the query point.
            assert!(h.torus_distance(dev, p) < 1e-9);
        }
    }

    #[test]
    fn genus2_atlas_structure() {
        let mesh = TriMesh::generate_genus_g(2, 12).unwrap();
        let basis = holomorphic_basis(&mesh, 7).unwrap();
        let cut = cut_graph(&mesh, &dual_spanning_tree(&mesh, 0).unwrap());
        let covering = select_covering_form(&mesh, &cut, &basis, 0, 7).unwrap();
        let atlas = &covering.atlas;
        assert_eq!(atlas.n_handles(), 2);
        // Gluing is an involution with no fixed side, across handles.
        assert!(!atlas.slit_sides.is_empty());
        for (i, side) in atlas.slit_sides.iter().enumerate() {
            let partner = &atlas.slit_sides[side.partner];
            assert_eq!(partner.partner, i);
            assert_ne!(side.handle, partner.handle);
            assert_ne!(side.from_above, partner.from_above);
            assert!((side.length() - partner.length()).abs() <= 1e-6);
            // Horizontal in flat coordinates.
            let rise = (side.end.im - side.start.im).abs();
            assert!(rise <= 1.05 * (graph_snap_sum(&covering.critical, side.segment)) + 1e-9);
        }
        // Both handles carry vertices and tiles; areas tile the surface.
        for h in &atlas.handles {
            assert!(!h.tiles.is_empty());
            assert!(h.vertex_flat.iter().any(|p| p.is_some()));
            assert!(h.area > 0.0);
        }
        let total = covering.charts.total_area(&mesh);
        assert!((atlas.total_area() - total).abs() <= 1e-6 * total);
    }

    fn graph_snap_sum(graph: &crate::covering::CriticalGraph, seg: usize) -> f64 {
        let s = &graph.segments[seg];
        graph.snap_radius[s.start_zero] + graph.snap_radius[s.end_zero]
    }
}
