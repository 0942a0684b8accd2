//! Branched covering of the surface induced by a holomorphic 1-form.
//!
//! Integrating a holomorphic form develops every face into the complex
//! plane. Because both components of the form are closed, the two faces
//! sharing an edge assign it the same complex vector, so chart transitions
//! between adjacent faces are pure translations: away from the form's zeros
//! the surface carries a translation structure, and "horizontal" (constant
//! imaginary part) is globally meaningful.
//!
//! The zeros are the cone points of that structure. A simple zero has cone
//! angle 4π — the map looks like z ↦ z² — and is found by summing the chart
//! corner angles around each vertex. Horizontal trajectories through the
//! zeros (four prongs each) are traced face by face; cutting along them
//! splits the surface into g genus-1 pieces, each developing onto a flat
//! torus with horizontal slits glued to the other pieces — see [`atlas`].

mod atlas;
mod trace;

pub use atlas::{segment_handles, CoveringAtlas, Handle, SlitSide, Tile};
pub use trace::{trace_critical, CriticalGraph, CriticalSegment, SegPiece};

use alloc::vec;
use alloc::vec::Vec;

use crate::hodge::HolomorphicForm;
use crate::math::{self, Complex64};
use crate::mesh::{FaceId, HalfedgeId, TriMesh, VertexId};
use crate::rng;
use crate::topology::{slice_along, CutGraph, SlicedMesh};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoveringError {
    #[error("chart triangle of face {0} is folded or degenerate")]
    FoldedChart(FaceId),
    #[error("found {found} zeros, expected {expected} (2g-2)")]
    WrongZeroCount { found: usize, expected: usize },
    #[error("zero at vertex {vertex} has {found} horizontal prongs, expected {expected}")]
    BadProngCount {
        vertex: VertexId,
        found: usize,
        expected: usize,
    },
    #[error("horizontal trace hit a degenerate crossing")]
    DegenerateTrace,
    #[error("critical trajectory exceeded the escape bound without reaching a zero")]
    TraceEscape,
    #[error("arriving trajectory could not be matched to a prong")]
    UnmatchedProng,
    #[error("two critical chords coincide inside one face")]
    DegenerateLevels,
    #[error("segmentation produced {found} components, expected genus {expected}")]
    WrongComponentCount { found: usize, expected: usize },
    #[error("slit endpoints are not on a horizontal line")]
    NonHorizontalSlit,
    #[error("handle {0} has fewer than two independent periods")]
    LatticeRank(usize),
    #[error("flat areas of handles disagree with the total ({handles:.6} vs {total:.6})")]
    AreaMismatch { handles: f64, total: f64 },
    #[error("integration is path dependent (closure residual {0:.3e})")]
    PathDependence(f64),
    #[error("no holomorphic form candidate produced a valid covering in {0} attempts")]
    FormSelectionFailure(usize),
}

/// Developed triangle per face: chart coordinate of each face corner,
/// indexed by halfedge (the corner at the halfedge source). Transitions
/// between adjacent faces are translations.
pub struct FormCharts {
    corners: Vec<Complex64>,
}

impl FormCharts {
    pub fn new(mesh: &TriMesh, form: &HolomorphicForm) -> Self {
        let mut corners = vec![Complex64::new(0.0, 0.0); mesh.n_halfedges()];
        for f in 0..mesh.n_faces() as FaceId {
            let w0 = form.on_halfedge(mesh, 3 * f);
            let w1 = form.on_halfedge(mesh, 3 * f + 1);
            corners[(3 * f + 1) as usize] = w0;
            corners[(3 * f + 2) as usize] = w0 + w1;
        }
        FormCharts { corners }
    }

    /// Chart coordinate of the corner at `he_src(h)` in face `he_face(h)`.
    #[inline]
    pub fn corner(&self, h: HalfedgeId) -> Complex64 {
        self.corners[h as usize]
    }

    pub fn face_triangle(&self, f: FaceId) -> [Complex64; 3] {
        [
            self.corners[(3 * f) as usize],
            self.corners[(3 * f + 1) as usize],
            self.corners[(3 * f + 2) as usize],
        ]
    }

    /// Translation taking the chart of `he_face(h)` to the chart of the
    /// face across `h`.
    pub fn transition(&self, mesh: &TriMesh, h: HalfedgeId) -> Complex64 {
        let t = mesh.he_twin(h);
        // Shared vertex: src(h) = dst(t), whose corner in the twin face is
        // at next(t).
        self.corners[mesh.he_next(t) as usize] - self.corners[h as usize]
    }

    /// Signed chart area of face `f` (positive when the development
    /// preserves orientation).
    pub fn face_signed_area(&self, f: FaceId) -> f64 {
        let [a, b, c] = self.face_triangle(f);
        let u = b - a;
        let v = c - a;
        0.5 * (u.re * v.im - u.im * v.re)
    }

    pub fn total_area(&self, mesh: &TriMesh) -> f64 {
        (0..mesh.n_faces() as FaceId)
            .map(|f| self.face_signed_area(f))
            .sum()
    }

    /// Smallest signed area relative to the face's squared scale; negative
    /// means the development folds over itself and the form is unusable.
    pub fn min_relative_area(&self, mesh: &TriMesh) -> f64 {
        (0..mesh.n_faces() as FaceId)
            .map(|f| {
                let [a, b, c] = self.face_triangle(f);
                let scale = (b - a).norm_sqr().max((c - a).norm_sqr()).max((c - b).norm_sqr());
                if scale == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    self.face_signed_area(f) / scale
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Chart length of the edge under halfedge `h`.
    pub fn he_length(&self, mesh: &TriMesh, h: HalfedgeId) -> f64 {
        (self.corners[mesh.he_next(h) as usize] - self.corners[h as usize]).norm()
    }
}

/// A zero (branch point) of the holomorphic form, pinned to a vertex.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ZeroPoint {
    pub vertex: VertexId,
    /// Total chart angle around the vertex; 4π for a simple zero.
    pub cone_angle: f64,
    /// Winding order: 1 for a simple zero.
    pub index: u32,
}

/// Chart angle sum around every vertex.
pub fn cone_angles(mesh: &TriMesh, charts: &FormCharts) -> Vec<f64> {
    let mut angle = vec![0.0; mesh.n_vertices()];
    for h in 0..mesh.n_halfedges() as HalfedgeId {
        let apex = charts.corner(h);
        let p = charts.corner(mesh.he_next(h));
        let q = charts.corner(mesh.he_prev(h));
        angle[mesh.he_src(h) as usize] += math::corner_angle(apex, p, q);
    }
    angle
}

/// Locate the 2g−2 simple zeros of the form: vertices whose chart cone
/// angle is 4π instead of 2π. Genus 1 yields an empty list.
pub fn find_zeros(mesh: &TriMesh, charts: &FormCharts) -> Result<Vec<ZeroPoint>, CoveringError> {
    let expected = 2 * mesh.genus() as usize - 2;
    let mut zeros = Vec::new();
    for (v, &theta) in cone_angles(mesh, charts).iter().enumerate() {
        let index = math::round((theta - math::TAU) / math::TAU);
        if index >= 0.5 {
            zeros.push(ZeroPoint {
                vertex: v as VertexId,
                cone_angle: theta,
                index: index as u32,
            });
        } else if theta > math::TAU + math::PI * 0.5 {
            // Ambiguous cone angle that rounds to neither 2π nor 4π.
            return Err(CoveringError::WrongZeroCount {
                found: usize::MAX,
                expected,
            });
        }
    }
    let weighted: usize = zeros.iter().map(|z| z.index as usize).sum();
    if weighted != expected || zeros.iter().any(|z| z.index != 1) {
        return Err(CoveringError::WrongZeroCount {
            found: weighted,
            expected,
        });
    }
    Ok(zeros)
}

/// Global development of the fundamental domain: the mesh sliced open along
/// the cut graph, with a complex coordinate per sliced vertex obtained by
/// integrating the form from a base vertex.
pub struct FlatChart {
    pub sliced: SlicedMesh,
    pub phi: Vec<Complex64>,
    pub base: VertexId,
    /// Largest closure defect over non-tree sliced edges.
    pub max_closure: f64,
    /// Bounding-box diagonal of the development.
    pub diameter: f64,
}

/// Integrate the form over the disk obtained by slicing along the cut
/// graph, breadth-first from `base`. Fails if the integration is path
/// dependent beyond `1e-8 *` the development diameter.
pub fn integrate(
    mesh: &TriMesh,
    cut: &CutGraph,
    form: &HolomorphicForm,
    base: VertexId,
) -> Result<FlatChart, CoveringError> {
    let sliced = slice_along(mesh, &cut.on_cut);
    let n = sliced.n_vertices();
    // Adjacency over sliced vertices from face corners. Slicing never cuts
    // through a face, so every halfedge relates corners on one side of the
    // cut — including halfedges lying on cut edges.
    let mut adj: Vec<Vec<(u32, Complex64)>> = vec![Vec::new(); n];
    for h in 0..mesh.n_halfedges() as HalfedgeId {
        let a = sliced.corner_vertex[h as usize];
        let b = sliced.corner_vertex[mesh.he_next(h) as usize];
        let w = form.on_halfedge(mesh, h);
        adj[a as usize].push((b, w));
    }
    let root = sliced.copies_of[base as usize][0];
    let mut phi = vec![Complex64::new(f64::NAN, f64::NAN); n];
    phi[root as usize] = Complex64::new(0.0, 0.0);
    let mut queue = alloc::collections::VecDeque::new();
    queue.push_back(root);
    while let Some(v) = queue.pop_front() {
        for &(w, val) in &adj[v as usize] {
            if phi[w as usize].re.is_nan() {
                phi[w as usize] = phi[v as usize] + val;
                queue.push_back(w);
            }
        }
    }
    if phi.iter().any(|p| p.re.is_nan()) {
        // The sliced disk must be connected when the cut graph is valid.
        return Err(CoveringError::PathDependence(f64::INFINITY));
    }
    let mut max_closure = 0.0f64;
    for (v, list) in adj.iter().enumerate() {
        for &(w, val) in list {
            let defect = (phi[w as usize] - phi[v] - val).norm();
            max_closure = max_closure.max(defect);
        }
    }
    let (mut lo, mut hi) = (
        Complex64::new(f64::INFINITY, f64::INFINITY),
        Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
    );
    for p in &phi {
        lo = Complex64::new(lo.re.min(p.re), lo.im.min(p.im));
        hi = Complex64::new(hi.re.max(p.re), hi.im.max(p.im));
    }
    let diameter = (hi - lo).norm();
    if max_closure > 1e-8 * diameter {
        return Err(CoveringError::PathDependence(max_closure));
    }
    Ok(FlatChart {
        sliced,
        phi,
        base,
        max_closure,
        diameter,
    })
}

/// A holomorphic form accepted for covering construction, with the
/// structures derived from it.
pub struct Covering {
    /// Coefficients of the chosen form over the holomorphic basis.
    pub coefficients: Vec<f64>,
    pub form: HolomorphicForm,
    pub charts: FormCharts,
    pub chart: FlatChart,
    pub zeros: Vec<ZeroPoint>,
    pub critical: CriticalGraph,
    pub atlas: CoveringAtlas,
}

/// Try holomorphic basis elements, then signed pairs, then random rational
/// combinations, until one yields a compact critical graph and a valid
/// g-handle segmentation.
pub fn select_covering_form(
    mesh: &TriMesh,
    cut: &CutGraph,
    basis: &[HolomorphicForm],
    base: VertexId,
    seed: u64,
) -> Result<Covering, CoveringError> {
    let n = basis.len();
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let mut c = vec![0.0; n];
        c[i] = 1.0;
        candidates.push(c);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            for s in [1.0, -1.0] {
                let mut c = vec![0.0; n];
                c[i] = 1.0;
                c[j] = s;
                candidates.push(c);
            }
        }
    }
    let mut gen = rng::stream_rng(seed, rng::stream::FORM_SELECT);
    let attempts = 256usize;
    while candidates.len() < attempts {
        // Small random integer combinations with nonzero weight everywhere
        // keep the form O(1) on every handle and slit coordinates generic.
        let c: Vec<f64> = (0..n)
            .map(|_| {
                let mag = 1.0 + rng::uniform_index(&mut gen, 3) as f64;
                if rng::uniform_index(&mut gen, 2) == 0 {
                    mag
                } else {
                    -mag
                }
            })
            .collect();
        candidates.push(c);
    }

    let mut last_err = CoveringError::FormSelectionFailure(attempts);
    for coeffs in candidates {
        match try_covering(mesh, cut, basis, &coeffs, base) {
            Ok(covering) => return Ok(covering),
            Err(e) => last_err = e,
        }
    }
    Err(last_err)
}

fn try_covering(
    mesh: &TriMesh,
    cut: &CutGraph,
    basis: &[HolomorphicForm],
    coeffs: &[f64],
    base: VertexId,
) -> Result<Covering, CoveringError> {
    let form = HolomorphicForm::combine(mesh, basis, coeffs);
    let charts = FormCharts::new(mesh, &form);
    if charts.min_relative_area(mesh) <= 1e-10 {
        return Err(CoveringError::FoldedChart(
            (0..mesh.n_faces() as FaceId)
                .min_by(|&a, &b| {
                    charts
                        .face_signed_area(a)
                        .partial_cmp(&charts.face_signed_area(b))
                        .unwrap()
                })
                .unwrap_or(0),
        ));
    }
    let chart = integrate(mesh, cut, &form, base)?;
    let zeros = find_zeros(mesh, &charts)?;
    let critical = trace_critical(mesh, &charts, &zeros, 100.0 * chart.diameter)?;
    let atlas = segment_handles(mesh, &charts, &zeros, &critical)?;
    Ok(Covering {
        coefficients: coeffs.to_vec(),
        form,
        charts,
        chart,
        zeros,
        critical,
        atlas,
    })
}

pub(crate) fn point_segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).re * ab.re + (p - a).im * ab.im) / len2;
    let t = t.clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}
