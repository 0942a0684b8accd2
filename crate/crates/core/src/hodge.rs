//! Harmonic and holomorphic 1-forms.
//!
//! A closed 1-form is made harmonic by adding the differential of a potential
//! that kills its weighted divergence: at every vertex,
//! `sum_j w_ij (h(v_j) - h(v_i) + w([v_i,v_j])) = 0`, with `w_ij` the
//! cotangent edge weight. The system matrix is the cotangent Laplacian,
//! positive definite once one vertex is pinned to fix the constant kernel.
//!
//! On each face (laid out isometrically in the plane) a closed form is a
//! constant covector `a dx + b dy`; the Hodge star rotates it a quarter turn
//! to `a dy - b dx`. The conjugate of a harmonic form is harmonic again, so
//! it expands over the harmonic basis; matching wedge integrals against the
//! face-local star yields a 2g x 2g system for the coefficients. Basis forms
//! paired with their conjugates form the holomorphic 1-form basis.

use alloc::vec;
use alloc::vec::Vec;

use crate::forms::{cohomology_basis, d0, OneForm};
use crate::mesh::{FaceId, TriMesh};
use crate::sparse::{self, CsrMatrix};
use crate::topology::{cut_graph, dual_spanning_tree, homology_basis};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HodgeError {
    #[error("face {0} is degenerate; cotangent weights undefined")]
    DegenerateFace(FaceId),
    #[error("Laplace solve failed: {0}")]
    SolverFailure(#[from] sparse::SolveError),
    #[error("wedge Gram matrix is singular")]
    SingularGram,
    #[error("topology stage failed: {0}")]
    Topology(#[from] crate::topology::TopologyError),
    #[error("cohomology stage failed: {0}")]
    Forms(#[from] crate::forms::FormsError),
    #[error("pipeline requires genus >= 1")]
    GenusZero,
}

/// Cotangent weight per edge: the two cotangents of the corner angles
/// opposite the edge. Negative values (obtuse pairs) are kept as-is.
#[derive(Debug, Clone)]
pub struct CotanWeights {
    pub values: Vec<f64>,
}

pub fn cotan_weights(mesh: &TriMesh) -> Result<CotanWeights, HodgeError> {
    let mut values = vec![0.0; mesh.n_edges()];
    for f in 0..mesh.n_faces() as FaceId {
        let lens = mesh.face_edge_lengths(f);
        for i in 0..3usize {
            // Corner i+2 is opposite the face side i.
            let opp = lens[i];
            let adj1 = lens[(i + 1) % 3];
            let adj2 = lens[(i + 2) % 3];
            let cot = crate::math::cot_from_lengths(adj1, adj2, opp);
            if !cot.is_finite() {
                return Err(HodgeError::DegenerateFace(f));
            }
            values[mesh.he_edge(3 * f + i as u32) as usize] += cot;
        }
    }
    Ok(CotanWeights { values })
}

/// Weighted divergence of a 1-form at every vertex:
/// `div_i = sum_j w_ij * w([v_i, v_j])`.
pub fn divergence(mesh: &TriMesh, weights: &CotanWeights, w: &OneForm) -> Vec<f64> {
    let mut div = vec![0.0; mesh.n_vertices()];
    for e in 0..mesh.n_edges() as u32 {
        let [a, b] = mesh.edge_endpoints(e);
        let wv = weights.values[e as usize] * w.values[e as usize];
        div[a as usize] += wv;
        div[b as usize] -= wv;
    }
    div
}

/// Harmonic representative of the cohomology class of `w`: returns
/// `w + d0(h)` where `h` solves the cotangent Laplace system (vertex 0
/// pinned). The result keeps the periods of `w` and has vanishing weighted
/// divergence.
pub fn harmonize(
    mesh: &TriMesh,
    weights: &CotanWeights,
    w: &OneForm,
) -> Result<OneForm, HodgeError> {
    let h = harmonic_potential(mesh, weights, w)?;
    let mut result = w.clone();
    result.add_scaled(&d0(mesh, &h), 1.0);
    Ok(result)
}

/// The potential `h` with `h[0] = 0` making `w + d0(h)` harmonic.
pub fn harmonic_potential(
    mesh: &TriMesh,
    weights: &CotanWeights,
    w: &OneForm,
) -> Result<Vec<f64>, HodgeError> {
    let n = mesh.n_vertices();
    // Reduced system without vertex 0: L h = b, b_i = div_i(w).
    let mut triplets: Vec<(u32, u32, f64)> = Vec::with_capacity(4 * mesh.n_edges());
    for e in 0..mesh.n_edges() as u32 {
        let [a, b] = mesh.edge_endpoints(e);
        let wt = weights.values[e as usize];
        for &v in &[a, b] {
            if v > 0 {
                triplets.push((v - 1, v - 1, wt));
            }
        }
        if a > 0 && b > 0 {
            triplets.push((a - 1, b - 1, -wt));
            triplets.push((b - 1, a - 1, -wt));
        }
    }
    let lap = CsrMatrix::from_triplets(n - 1, triplets);
    let div = divergence(mesh, weights, w);
    let b: Vec<f64> = div[1..].to_vec();
    let sol = sparse::conjugate_gradient(&lap, &b, 1e-10, 40 * n.max(100))?;
    let mut h = vec![0.0; n];
    h[1..].copy_from_slice(&sol);
    Ok(h)
}

/// Constant covector (a, b) representing the closed form `w` on face `f`,
/// in the face's isometric plane layout.
pub fn face_coeffs(mesh: &TriMesh, f: FaceId, w: &OneForm) -> (f64, f64) {
    let [p0, p1, p2] = mesh.face_plane(f);
    let e1 = p1 - p0;
    let e2 = p2 - p0;
    let w1 = w.on_halfedge(mesh, 3 * f); // v0 -> v1
    let w2 = -w.on_halfedge(mesh, 3 * f + 2); // v0 -> v2 (reverse of side 2)
    // [e1x e1y; e2x e2y] (a,b)^T = (w1, w2); det = 2 * area > 0.
    let det = e1.re * e2.im - e1.im * e2.re;
    let a = (w1 * e2.im - w2 * e1.im) / det;
    let b = (w2 * e1.re - w1 * e2.re) / det;
    (a, b)
}

/// Quarter-turn of a face covector: star(a dx + b dy) = a dy - b dx.
pub fn hodge_star_face(coeffs: (f64, f64)) -> (f64, f64) {
    (-coeffs.1, coeffs.0)
}

/// Integral of `wi ∧ wj` over the surface: per face
/// `(a_i b_j - a_j b_i) * area`, summed.
pub fn wedge_integral(mesh: &TriMesh, wi: &OneForm, wj: &OneForm) -> f64 {
    (0..mesh.n_faces() as FaceId)
        .map(|f| {
            let (ai, bi) = face_coeffs(mesh, f, wi);
            let (aj, bj) = face_coeffs(mesh, f, wj);
            (ai * bj - aj * bi) * mesh.face_area(f)
        })
        .sum()
}

/// Integral of `w ∧ star(w)` using the face-local star: the Dirichlet
/// energy `sum_f (a^2 + b^2) * area`.
pub fn dirichlet_energy(mesh: &TriMesh, w: &OneForm) -> f64 {
    (0..mesh.n_faces() as FaceId)
        .map(|f| {
            let (a, b) = face_coeffs(mesh, f, w);
            (a * a + b * b) * mesh.face_area(f)
        })
        .sum()
}

/// Antisymmetric Gram matrix `W[k][l] = integral of w_k ∧ w_l` of a basis.
pub fn wedge_gram(mesh: &TriMesh, basis: &[OneForm]) -> Vec<Vec<f64>> {
    let coeffs: Vec<Vec<(f64, f64)>> = basis
        .iter()
        .map(|w| {
            (0..mesh.n_faces() as FaceId)
                .map(|f| face_coeffs(mesh, f, w))
                .collect()
        })
        .collect();
    let areas: Vec<f64> = (0..mesh.n_faces() as FaceId).map(|f| mesh.face_area(f)).collect();
    let n = basis.len();
    let mut gram = vec![vec![0.0; n]; n];
    for k in 0..n {
        for l in (k + 1)..n {
            let mut acc = 0.0;
            for f in 0..areas.len() {
                let (ak, bk) = coeffs[k][f];
                let (al, bl) = coeffs[l][f];
                acc += (ak * bl - al * bk) * areas[f];
            }
            gram[k][l] = acc;
            gram[l][k] = -acc;
        }
    }
    gram
}

/// Conjugate (Hodge star) of a harmonic form `w` lying in the span of
/// `basis`: solves `integral(star(w) ∧ w_k) = sum_i lambda_i
/// integral(w_i ∧ w_k)` and returns `sum_i lambda_i w_i`.
pub fn conjugate(mesh: &TriMesh, basis: &[OneForm], w: &OneForm) -> Result<OneForm, HodgeError> {
    let gram = wedge_gram(mesh, basis);
    conjugate_with_gram(mesh, basis, &gram, w)
}

/// As [`conjugate`], reusing a precomputed Gram matrix.
pub fn conjugate_with_gram(
    mesh: &TriMesh,
    basis: &[OneForm],
    gram: &[Vec<f64>],
    w: &OneForm,
) -> Result<OneForm, HodgeError> {
    let n = basis.len();
    // rhs_k = integral(star(w) ∧ w_k), star taken face-locally.
    let mut rhs = vec![0.0; n];
    for f in 0..mesh.n_faces() as FaceId {
        let (a, b) = face_coeffs(mesh, f, w);
        let (sa, sb) = hodge_star_face((a, b));
        let area = mesh.face_area(f);
        for (k, wk) in basis.iter().enumerate() {
            let (ak, bk) = face_coeffs(mesh, f, wk);
            rhs[k] += (sa * bk - ak * sb) * area;
        }
    }
    // Row k of the system is sum_i lambda_i gram[i][k] = rhs_k.
    let a: Vec<Vec<f64>> = (0..n).map(|k| (0..n).map(|i| gram[i][k]).collect()).collect();
    let lambda = sparse::dense_solve(a, rhs).map_err(|_| HodgeError::SingularGram)?;
    let mut out = OneForm::zeros(mesh);
    for (l, wi) in lambda.iter().zip(basis) {
        out.add_scaled(wi, *l);
    }
    Ok(out)
}

/// A harmonic 1-form paired with its conjugate: the real and imaginary
/// parts of a holomorphic 1-form.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HolomorphicForm {
    pub omega: OneForm,
    pub conj: OneForm,
}

impl HolomorphicForm {
    /// Complex edge value on a halfedge.
    pub fn on_halfedge(&self, mesh: &TriMesh, he: u32) -> crate::math::Complex64 {
        crate::math::Complex64::new(
            self.omega.on_halfedge(mesh, he),
            self.conj.on_halfedge(mesh, he),
        )
    }

    /// Linear combination of holomorphic forms (still holomorphic).
    pub fn combine(mesh: &TriMesh, forms: &[HolomorphicForm], coeffs: &[f64]) -> HolomorphicForm {
        let mut omega = OneForm::zeros(mesh);
        let mut conj = OneForm::zeros(mesh);
        for (f, &c) in forms.iter().zip(coeffs) {
            omega.add_scaled(&f.omega, c);
            conj.add_scaled(&f.conj, c);
        }
        HolomorphicForm { omega, conj }
    }
}

/// The 2g harmonic basis forms (harmonized cohomology basis).
pub fn harmonic_basis(
    mesh: &TriMesh,
    weights: &CotanWeights,
    cohomology: &[OneForm],
) -> Result<Vec<OneForm>, HodgeError> {
    cohomology.iter().map(|w| harmonize(mesh, weights, w)).collect()
}

/// Full pipeline from the mesh to the 2g-element holomorphic basis:
/// homology -> cohomology -> harmonic -> conjugates.
pub fn holomorphic_basis(mesh: &TriMesh, seed: u64) -> Result<Vec<HolomorphicForm>, HodgeError> {
    if mesh.genus() == 0 {
        return Err(HodgeError::GenusZero);
    }
    let tree = dual_spanning_tree(mesh, 0)?;
    let cut = cut_graph(mesh, &tree);
    let basis = homology_basis(mesh, &cut)?;
    let cohom = cohomology_basis(mesh, &basis, seed)?;
    let weights = cotan_weights(mesh)?;
    let harmonic = harmonic_basis(mesh, &weights, &cohom)?;
    let gram = wedge_gram(mesh, &harmonic);
    harmonic
        .iter()
        .map(|w| {
            Ok(HolomorphicForm {
                omega: w.clone(),
                conj: conjugate_with_gram(mesh, &harmonic, &gram, w)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{d1, period_matrix};
    use crate::math::abs;

    fn equilateral_tetrahedron() -> TriMesh {
        let s = 8.0f64.sqrt(); // edge length of this embedding
        let positions = vec![
            [1.0, 1.0, 1.0],
            [1.0, -1.0, -1.0],
            [-1.0, 1.0, -1.0],
            [-1.0, -1.0, 1.0],
        ];
        let mesh =
            TriMesh::from_faces(positions, vec![[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]])
                .unwrap();
        assert!((mesh.edge_length(0) - s).abs() < 1e-12);
        mesh
    }

    fn split_cube() -> TriMesh {
        // Cube corners; each square face split along a diagonal.
        let positions = vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [1.0, 1.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 1.0],
            [1.0, 1.0, 1.0],
            [0.0, 1.0, 1.0],
        ];
        let faces = vec![
            [0, 2, 1],
            [0, 3, 2], // bottom (z=0), outward = -z
            [4, 5, 6],
            [4, 6, 7], // top
            [0, 1, 5],
            [0, 5, 4], // y=0 side
            [1, 2, 6],
            [1, 6, 5], // x=1 side
            [2, 3, 7],
            [2, 7, 6], // y=1 side
            [3, 0, 4],
            [3, 4, 7], // x=0 side
        ];
        TriMesh::from_faces(positions, faces).unwrap()
    }

    #[test]
    fn cotan_weight_of_equilateral_pair() {
        let mesh = equilateral_tetrahedron();
        let w = cotan_weights(&mesh).unwrap();
        let expect = 2.0 / 3.0f64.sqrt(); // 2 * cot 60 = 1.1547005383792515
        for e in 0..mesh.n_edges() {
            assert!((w.values[e] - expect).abs() < 1e-12, "{}", w.values[e]);
        }
        assert!((expect - 1.154_700_538_379_251_5).abs() < 1e-15);
    }

    #[test]
    fn cotan_weight_of_square_diagonal_is_zero() {
        let mesh = split_cube();
        let w = cotan_weights(&mesh).unwrap();
        let diag = 2.0f64.sqrt();
        let mut checked = 0;
        for e in 0..mesh.n_edges() as u32 {
            if (mesh.edge_length(e) - diag).abs() < 1e-12 {
                // Both opposite corners are right angles: cot 90 + cot 90 = 0.
                assert!(w.values[e as usize].abs() < 1e-12);
                checked += 1;
            }
        }
        assert_eq!(checked, 6);
    }

    #[test]
    fn cotan_weight_of_obtuse_pair_is_negative() {
        // Tetrahedron connectivity with lengths making both corners opposite
        // edge (0,1) equal to 120 degrees.
        let mesh = equilateral_tetrahedron();
        let mut lengths = vec![1.0; mesh.n_edges()];
        let e01 = mesh.edge_between(0, 1).unwrap();
        lengths[e01 as usize] = 3.0f64.sqrt();
        let mesh = mesh.override_edge_lengths(lengths).unwrap();
        let w = cotan_weights(&mesh).unwrap();
        let expect = -2.0 / 3.0f64.sqrt(); // 2 * cot 120
        assert!((w.values[e01 as usize] - expect).abs() < 1e-12);
    }

    fn genus2_setup() -> (TriMesh, crate::topology::HomologyBasis, Vec<OneForm>, CotanWeights) {
        let mesh = TriMesh::generate_genus_g(2, 8).unwrap();
        let tree = dual_spanning_tree(&mesh, 0).unwrap();
        let cut = cut_graph(&mesh, &tree);
        let basis = homology_basis(&mesh, &cut).unwrap();
        let cohom = cohomology_basis(&mesh, &basis, 7).unwrap();
        let weights = cotan_weights(&mesh).unwrap();
        (mesh, basis, cohom, weights)
    }

    #[test]
    fn harmonize_kills_divergence_and_keeps_periods() {
        let (mesh, basis, cohom, weights) = genus2_setup();
        for w in &cohom {
            let h = harmonize(&mesh, &weights, w).unwrap();
            let div = divergence(&mesh, &weights, &h);
            let max_div = div.iter().fold(0.0, |m, d| f64::max(m, abs(*d)));
            assert!(max_div <= 1e-8, "divergence {max_div}");
            for lp in &basis.loops {
                assert!(abs(h.period(&mesh, lp) - w.period(&mesh, lp)) <= 1e-9);
            }
            // Idempotence: already harmonic input is unchanged.
            let h2 = harmonize(&mesh, &weights, &h).unwrap();
            let drift = h2
                .values
                .iter()
                .zip(&h.values)
                .map(|(a, b)| abs(a - b))
                .fold(0.0, f64::max);
            assert!(drift <= 1e-8, "harmonize not idempotent: {drift}");
        }
    }

    #[test]
    fn harmonize_of_exact_form_is_zero() {
        let mesh = TriMesh::generate_genus_g(1, 8).unwrap();
        let weights = cotan_weights(&mesh).unwrap();
        let mut gen = crate::rng::stream_rng(3, "exact-harm");
        let f: Vec<f64> = (0..mesh.n_vertices())
            .map(|_| crate::rng::uniform_open01(&mut gen))
            .collect();
        let w = d0(&mesh, &f);
        let h = harmonize(&mesh, &weights, &w).unwrap();
        assert!(h.max_abs() <= 1e-8, "residual {}", h.max_abs());
    }

    #[test]
    fn hodge_star_face_rotates() {
        assert_eq!(hodge_star_face((1.0, 0.0)), (0.0, 1.0));
        assert_eq!(hodge_star_face((0.0, 1.0)), (-1.0, 0.0));
        let twice = hodge_star_face(hodge_star_face((0.3, -0.7)));
        assert_eq!(twice, (-0.3, 0.7));
    }

    #[test]
    fn wedge_is_antisymmetric() {
        let (mesh, _, cohom, _) = genus2_setup();
        for wi in &cohom {
            assert!(abs(wedge_integral(&mesh, wi, wi)) <= 1e-12);
            for wj in &cohom {
                let a = wedge_integral(&mesh, wi, wj);
                let b = wedge_integral(&mesh, wj, wi);
                assert!(abs(a + b) <= 1e-12);
            }
        }
    }

    #[test]
    fn face_coeffs_reproduce_third_edge() {
        let (mesh, _, cohom, _) = genus2_setup();
        for w in &cohom {
            for f in 0..mesh.n_faces() as u32 {
                let (a, b) = face_coeffs(&mesh, f, w);
                let [p0, _, p2] = mesh.face_plane(f);
                // side 2 runs v2 -> v0
                let e = p0 - p2;
                let integral = a * e.re + b * e.im;
                let actual = w.on_halfedge(&mesh, 3 * f + 2);
                assert!(abs(integral - actual) <= 1e-9, "{integral} vs {actual}");
            }
        }
    }

    #[test]
    fn energy_identity_for_harmonic_basis() {
        let (mesh, _, cohom, weights) = genus2_setup();
        let harmonic = harmonic_basis(&mesh, &weights, &cohom).unwrap();
        let gram = wedge_gram(&mesh, &harmonic);
        // Antisymmetric within rounding.
        for k in 0..gram.len() {
            assert!(abs(gram[k][k]) <= 1e-10);
            for l in 0..gram.len() {
                assert!(abs(gram[k][l] + gram[l][k]) <= 1e-10);
            }
        }
        for w in &harmonic {
            let conj = conjugate_with_gram(&mesh, &harmonic, &gram, w).unwrap();
            let energy = dirichlet_energy(&mesh, w);
            let wedge = wedge_integral(&mesh, w, &conj);
            assert!(wedge > 0.0);
            assert!(
                abs(wedge - energy) <= 1e-8 * energy,
                "wedge {wedge} vs energy {energy}"
            );
        }
    }

    #[test]
    fn flat_torus_conjugate_is_exact_rotation() {
        let mesh = TriMesh::flat_torus_grid(8);
        let tree = dual_spanning_tree(&mesh, 0).unwrap();
        let cut = cut_graph(&mesh, &tree);
        let basis = homology_basis(&mesh, &cut).unwrap();
        let cohom = cohomology_basis(&mesh, &basis, 7).unwrap();
        let weights = cotan_weights(&mesh).unwrap();
        let harmonic = harmonic_basis(&mesh, &weights, &cohom).unwrap();

        // Build the form with periods (1, 0) — the flat dx — by solving the
        // 2x2 period system over the harmonic basis.
        let pm = period_matrix(&mesh, &harmonic, &basis);
        let a = vec![
            vec![pm[0][0], pm[1][0]],
            vec![pm[0][1], pm[1][1]],
        ];
        let alpha = sparse::dense_solve(a, vec![1.0, 0.0]).unwrap();
        let mut dx = OneForm::zeros(&mesh);
        dx.add_scaled(&harmonic[0], alpha[0]);
        dx.add_scaled(&harmonic[1], alpha[1]);

        let conj = conjugate(&mesh, &harmonic, &dx).unwrap();
        // Complementary period profile: zero over the loop dx wraps, unit
        // magnitude over the other.
        let p1 = conj.period(&mesh, &basis.loops[0]);
        let p2 = conj.period(&mesh, &basis.loops[1]);
        assert!(abs(p1) <= 1e-6, "period over own loop {p1}");
        assert!((abs(p2) - 1.0).abs() <= 1e-6, "period over dual loop {p2}");

        // Star of star negates (exact on the flat torus).
        let conj2 = conjugate(&mesh, &harmonic, &conj).unwrap();
        for lp in &basis.loops {
            let orig = dx.period(&mesh, lp);
            let back = conj2.period(&mesh, lp);
            assert!(abs(back + orig) <= 1e-6, "{back} vs -{orig}");
        }
    }

    #[test]
    fn holomorphic_basis_counts_and_quality() {
        let torus = TriMesh::generate_genus_g(1, 8).unwrap();
        assert_eq!(holomorphic_basis(&torus, 7).unwrap().len(), 2);

        let (mesh, _, _, weights) = genus2_setup();
        let holo = holomorphic_basis(&mesh, 7).unwrap();
        assert_eq!(holo.len(), 4);
        for hf in &holo {
            for part in [&hf.omega, &hf.conj] {
                let div = divergence(&mesh, &weights, part);
                let max_div = div.iter().fold(0.0, |m, d| f64::max(m, abs(*d)));
                assert!(max_div <= 1e-8, "divergence {max_div}");
            }
            // Conjugate component closed too (combination of closed forms).
            assert!(d1(&mesh, &hf.conj).max_abs() <= 1e-6);
            assert!(wedge_integral(&mesh, &hf.omega, &hf.conj) > 0.0);
        }
    }
}
