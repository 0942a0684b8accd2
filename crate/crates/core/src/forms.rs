//! Discrete differential forms on the mesh.
//!
//! A 0-form is a value per vertex, a 1-form a value per oriented edge with
//! `w([a,b]) = -w([b,a])` (stored once per edge in the canonical lo -> hi
//! direction), a 2-form a value per oriented face. `d0`/`d1` are the
//! coboundary operators; a closed 1-form sums to zero around every face.
//!
//! The cohomology basis dual to a homology basis is built per loop: slice
//! the mesh along the loop, set a potential to 1 on one boundary copy, 0 on
//! the other, random in (0,1) inside, and push its differential back to the
//! closed surface (zero on the loop itself). The result is closed but not
//! exact, and its periods over the basis loops are integers.

use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::mesh::{EdgeId, FaceId, HalfedgeId, TriMesh, VertexId};
use crate::rng;
use crate::topology::{slice_along, HomologyBasis, Loop};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FormsError {
    #[error("basis loop {0} failed to slice into two boundary sides")]
    SliceFailure(usize),
    #[error("period matrix is rank deficient")]
    RankDeficient,
}

/// Real value per oriented edge; reversal negates.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OneForm {
    /// Value on each edge in its canonical lo -> hi direction.
    pub values: Vec<f64>,
}

impl OneForm {
    pub fn zeros(mesh: &TriMesh) -> Self {
        OneForm {
            values: vec![0.0; mesh.n_edges()],
        }
    }

    /// Value on the oriented edge `he` (canonical value, sign-flipped when
    /// the halfedge runs hi -> lo).
    pub fn on_halfedge(&self, mesh: &TriMesh, he: HalfedgeId) -> f64 {
        let e = mesh.he_edge(he);
        let v = self.values[e as usize];
        if mesh.edge_halfedge(e) == he {
            v
        } else {
            -v
        }
    }

    /// Value on edge `e` traversed from `src`.
    pub fn from_vertex(&self, mesh: &TriMesh, e: EdgeId, src: VertexId) -> f64 {
        let [lo, _] = mesh.edge_endpoints(e);
        if src == lo {
            self.values[e as usize]
        } else {
            -self.values[e as usize]
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        OneForm {
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add_scaled(&mut self, other: &OneForm, s: f64) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b * s;
        }
    }

    /// Maximum absolute edge value.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(crate::math::abs(*v)))
    }

    /// Integral along a closed loop of halfedges.
    pub fn period(&self, mesh: &TriMesh, lp: &Loop) -> f64 {
        lp.halfedges
            .iter()
            .map(|&h| self.on_halfedge(mesh, h))
            .sum()
    }
}

/// Real value per oriented face.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoForm {
    pub values: Vec<f64>,
}

impl TwoForm {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(crate::math::abs(*v)))
    }
}

/// Coboundary of a vertex function: `df([a,b]) = f(b) - f(a)`.
pub fn d0(mesh: &TriMesh, f: &[f64]) -> OneForm {
    debug_assert_eq!(f.len(), mesh.n_vertices());
    let values = mesh
        .edges()
        .iter()
        .map(|&[a, b]| f[b as usize] - f[a as usize])
        .collect();
    OneForm { values }
}

/// Coboundary of a 1-form: per face, the sum over its oriented boundary.
pub fn d1(mesh: &TriMesh, w: &OneForm) -> TwoForm {
    let values = (0..mesh.n_faces() as FaceId)
        .map(|f| {
            (0..3u32)
                .map(|i| w.on_halfedge(mesh, 3 * f + i))
                .sum::<f64>()
        })
        .collect();
    TwoForm { values }
}

/// Closed 1-forms dual to the homology basis loops, one per loop.
///
/// Interior potential values are drawn from the `cohomology-rand` stream of
/// `seed`, so the basis is reproducible.
pub fn cohomology_basis(
    mesh: &TriMesh,
    basis: &HomologyBasis,
    seed: u64,
) -> Result<Vec<OneForm>, FormsError> {
    let mut gen = rng::stream_rng(seed, rng::stream::COHOMOLOGY_RAND);
    basis
        .loops
        .iter()
        .enumerate()
        .map(|(k, lp)| loop_dual_form(mesh, k, lp, &mut gen))
        .collect()
}

fn loop_dual_form(
    mesh: &TriMesh,
    k: usize,
    lp: &Loop,
    gen: &mut impl RngCore,
) -> Result<OneForm, FormsError> {
    let mut on_loop = vec![false; mesh.n_edges()];
    for &h in &lp.halfedges {
        on_loop[mesh.he_edge(h) as usize] = true;
    }
    let sliced = slice_along(mesh, &on_loop);
    for v in lp.vertices(mesh) {
        if sliced.copies_of[v as usize].len() != 2 {
            return Err(FormsError::SliceFailure(k));
        }
    }
    // Potential on sliced vertices: 1 on the left boundary copy, 0 on the
    // right, random in (0,1) elsewhere. Faces lie left of their halfedges,
    // so the left copy of src(h) is the corner of h itself.
    let mut f = vec![f64::NAN; sliced.n_vertices()];
    for &h in &lp.halfedges {
        let t = mesh.he_twin(h);
        f[sliced.corner_vertex[h as usize] as usize] = 1.0;
        f[sliced.corner_vertex[mesh.he_next(h) as usize] as usize] = 1.0;
        f[sliced.corner_vertex[t as usize] as usize] = 0.0;
        f[sliced.corner_vertex[mesh.he_next(t) as usize] as usize] = 0.0;
    }
    for value in f.iter_mut() {
        if value.is_nan() {
            *value = rng::uniform_open01(gen);
        }
    }
    // Push the differential back to the closed mesh.
    let mut values = vec![0.0; mesh.n_edges()];
    for e in 0..mesh.n_edges() as EdgeId {
        if on_loop[e as usize] {
            continue;
        }
        let h = mesh.edge_halfedge(e);
        let tail = sliced.corner_vertex[h as usize] as usize;
        let head = sliced.corner_vertex[mesh.he_next(h) as usize] as usize;
        values[e as usize] = f[head] - f[tail];
    }
    Ok(OneForm { values })
}

/// Entry (i, j) is the period of form i over basis loop j.
pub fn period_matrix(mesh: &TriMesh, forms: &[OneForm], basis: &HomologyBasis) -> Vec<Vec<f64>> {
    forms
        .iter()
        .map(|w| basis.loops.iter().map(|lp| w.period(mesh, lp)).collect())
        .collect()
}

/// Determinant of a small dense matrix (Gaussian elimination, partial
/// pivoting). Used to certify the period matrix is non-singular.
pub fn det_dense(matrix: &[Vec<f64>]) -> f64 {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                crate::math::abs(a[i][col])
                    .partial_cmp(&crate::math::abs(a[j][col]))
                    .unwrap()
            })
            .unwrap();
        if crate::math::abs(a[pivot][col]) == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for c in col..n {
                a[row][c] -= factor * a[col][c];
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::TriMesh;
    use crate::topology::{cut_graph, dual_spanning_tree, homology_basis};

    fn pipeline(g: u32, res: u32) -> (TriMesh, HomologyBasis, Vec<OneForm>) {
        let mesh = TriMesh::generate_genus_g(g, res).unwrap();
        let cut = cut_graph(&mesh, &dual_spanning_tree(&mesh, 0).unwrap());
        let basis = homology_basis(&mesh, &cut).unwrap();
        let forms = cohomology_basis(&mesh, &basis, 7).unwrap();
        (mesh, basis, forms)
    }

    #[test]
    fn d0_of_constant_is_zero() {
        let mesh = TriMesh::generate_genus_g(1, 8).unwrap();
        let w = d0(&mesh, &vec![3.25; mesh.n_vertices()]);
        assert_eq!(w.max_abs(), 0.0);
    }

    #[test]
    fn d0_of_indicator_hits_incident_edges() {
        let mesh = TriMesh::generate_genus_g(1, 8).unwrap();
        let mut f = vec![0.0; mesh.n_vertices()];
        f[5] = 1.0;
        let w = d0(&mesh, &f);
        for e in 0..mesh.n_edges() as u32 {
            let [a, b] = mesh.edge_endpoints(e);
            let expect = if b == 5 {
                1.0
            } else if a == 5 {
                -1.0
            } else {
                0.0
            };
            assert_eq!(w.values[e as usize], expect);
        }
    }

    #[test]
    fn d1_of_single_face_boundary() {
        let mesh = TriMesh::generate_genus_g(1, 8).unwrap();
        let mut w = OneForm::zeros(&mesh);
        // +1 along the oriented boundary of face 7.
        for i in 0..3u32 {
            let h = 3 * 7 + i;
            let e = mesh.he_edge(h);
            w.values[e as usize] = if mesh.edge_halfedge(e) == h { 1.0 } else { -1.0 };
        }
        let dw = d1(&mesh, &w);
        assert_eq!(dw.values[7], 3.0);
    }

    #[test]
    fn d1_after_d0_vanishes() {
        // deterministic pseudo-random vertex functions
        let mesh = TriMesh::generate_genus_g(2, 8).unwrap();
        let mut gen = crate::rng::stream_rng(3, "test-dd");
        for _ in 0..50 {
            let f: Vec<f64> = (0..mesh.n_vertices())
                .map(|_| crate::rng::uniform_open01(&mut gen) * 10.0 - 5.0)
                .collect();
            let dd = d1(&mesh, &d0(&mesh, &f));
            assert!(dd.max_abs() <= 1e-12);
        }
    }

    #[test]
    fn cohomology_basis_forms_are_closed() {
        let (mesh, _, forms) = pipeline(2, 8);
        assert_eq!(forms.len(), 4);
        for w in &forms {
            assert!(d1(&mesh, w).max_abs() <= 1e-12);
        }
    }

    #[test]
    fn periods_are_integral_and_nonsingular() {
        for (g, res) in [(1u32, 8u32), (2, 8)] {
            let (mesh, basis, forms) = pipeline(g, res);
            let pm = period_matrix(&mesh, &forms, &basis);
            let mut any_nonzero = vec![false; forms.len()];
            for (i, row) in pm.iter().enumerate() {
                for &p in row {
                    let nearest = crate::math::round(p);
                    assert!(
                        crate::math::abs(p - nearest) <= 1e-9,
                        "period {p} is not integral"
                    );
                    if crate::math::abs(p) >= 0.5 {
                        any_nonzero[i] = true;
                    }
                }
                assert!(any_nonzero[i], "form {i} has all-zero periods");
            }
            let det = det_dense(&pm);
            assert!(crate::math::abs(det) >= 1.0 - 1e-6, "det = {det}");
        }
    }

    #[test]
    fn own_loop_period_is_nontrivial() {
        let (mesh, basis, forms) = pipeline(2, 8);
        for w in &forms {
            let best = basis
                .loops
                .iter()
                .map(|lp| crate::math::abs(w.period(&mesh, lp)))
                .fold(0.0, f64::max);
            assert!(best >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn periods_invariant_under_exact_shift() {
        let (mesh, basis, forms) = pipeline(2, 8);
        let mut gen = crate::rng::stream_rng(11, "exact-shift");
        let h: Vec<f64> = (0..mesh.n_vertices())
            .map(|_| crate::rng::uniform_open01(&mut gen))
            .collect();
        let dh = d0(&mesh, &h);
        for w in &forms {
            let mut shifted = w.clone();
            shifted.add_scaled(&dh, 1.0);
            for lp in &basis.loops {
                assert!(
                    crate::math::abs(shifted.period(&mesh, lp) - w.period(&mesh, lp)) <= 1e-9
                );
            }
        }
    }

    #[test]
    fn exact_form_has_zero_periods() {
        let (mesh, basis, _) = pipeline(1, 8);
        let mut gen = crate::rng::stream_rng(5, "exact");
        let f: Vec<f64> = (0..mesh.n_vertices())
            .map(|_| crate::rng::uniform_open01(&mut gen))
            .collect();
        let w = d0(&mesh, &f);
        for lp in &basis.loops {
            assert!(crate::math::abs(w.period(&mesh, lp)) <= 1e-9);
        }
    }
}
