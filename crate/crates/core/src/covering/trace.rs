//! Tracing horizontal critical trajectories through the form's zeros.
//!
//! Within one face the trajectory is a horizontal chord of the chart
//! triangle; crossing an edge translates the point into the neighbor's
//! chart and keeps the direction. From each zero, one trajectory leaves
//! along every horizontal prong (four for a simple zero). A trace ends when
//! it enters the snap disk of a zero (half the local mean edge length) and
//! is then attached to the matching prong there, so every critical segment
//! is traced exactly once.

use alloc::vec;
use alloc::vec::Vec;

use super::{CoveringError, FormCharts, ZeroPoint};
use crate::math::{self, Complex64};
use crate::mesh::{EdgeId, FaceId, HalfedgeId, TriMesh, VertexId};

/// One horizontal chord of a face chart traversed by a critical segment.
#[derive(Debug, Clone)]
pub struct SegPiece {
    pub face: FaceId,
    /// Entry point in the face chart (a corner for end pieces).
    pub enter: Complex64,
    pub exit: Complex64,
}

impl SegPiece {
    /// The trace level of this chord in its face chart.
    pub fn level(&self) -> f64 {
        self.enter.im
    }
}

/// A maximal horizontal trajectory joining two zeros (possibly the same).
#[derive(Debug, Clone)]
pub struct CriticalSegment {
    pub start_zero: usize,
    pub end_zero: usize,
    pub pieces: Vec<SegPiece>,
    /// Edge crossed between piece i and i+1, with the crossing parameter in
    /// the edge's canonical lo -> hi direction.
    pub crossings: Vec<(EdgeId, f64)>,
    pub length: f64,
}

/// All critical segments plus the snap radius used around each zero.
#[derive(Debug, Clone)]
pub struct CriticalGraph {
    pub segments: Vec<CriticalSegment>,
    pub snap_radius: Vec<f64>,
}

impl CriticalGraph {
    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(|s| s.length).sum()
    }
}

/// A horizontal ray leaving a zero into one face.
#[derive(Debug, Clone)]
struct Prong {
    /// Outgoing halfedge at the zero whose face carries the ray.
    halfedge: HalfedgeId,
    /// +1 for +x in the face chart, -1 for -x.
    dir: f64,
    /// Angle of the ray in the unfolded cone around the zero.
    unfolded: f64,
}

const ANGLE_EPS: f64 = 1e-10;

/// The horizontal prongs of one zero, in star order.
fn zero_prongs(
    mesh: &TriMesh,
    charts: &FormCharts,
    zero: &ZeroPoint,
) -> Result<Vec<Prong>, CoveringError> {
    let mut prongs = Vec::new();
    let mut cum = 0.0;
    for h in mesh.vertex_star(zero.vertex) {
        let apex = charts.corner(h);
        let u = charts.corner(mesh.he_next(h)) - apex;
        let w = charts.corner(mesh.he_prev(h)) - apex;
        let theta = math::abs(math::atan2(
            u.re * w.im - u.im * w.re,
            u.re * w.re + u.im * w.im,
        ));
        let beta = math::atan2(u.im, u.re);
        for (target, dir) in [(0.0, 1.0), (math::PI, -1.0)] {
            let mut phi = target - beta;
            while phi < 0.0 {
                phi += math::TAU;
            }
            while phi >= math::TAU {
                phi -= math::TAU;
            }
            if phi < theta {
                if phi < ANGLE_EPS || theta - phi < ANGLE_EPS {
                    return Err(CoveringError::DegenerateTrace);
                }
                prongs.push(Prong {
                    halfedge: h,
                    dir,
                    unfolded: cum + phi,
                });
            }
        }
        cum += theta;
    }
    let expected = 2 * (zero.index as usize + 1);
    if prongs.len() != expected {
        return Err(CoveringError::BadProngCount {
            vertex: zero.vertex,
            found: prongs.len(),
            expected,
        });
    }
    prongs.sort_by(|a, b| a.unfolded.partial_cmp(&b.unfolded).unwrap());
    Ok(prongs)
}

/// Unfolded angle of the direction `v` (expressed in the chart of
/// `he_face(h)`) inside the cone around the zero at `he_src(h)`.
fn unfolded_angle_of(
    mesh: &TriMesh,
    charts: &FormCharts,
    zero_vertex: VertexId,
    h_target: HalfedgeId,
    v: Complex64,
) -> f64 {
    let mut cum = 0.0;
    for h in mesh.vertex_star(zero_vertex) {
        let apex = charts.corner(h);
        let u = charts.corner(mesh.he_next(h)) - apex;
        let w = charts.corner(mesh.he_prev(h)) - apex;
        let theta = math::abs(math::atan2(
            u.re * w.im - u.im * w.re,
            u.re * w.re + u.im * w.im,
        ));
        if h == h_target {
            let mut delta = math::atan2(
                u.re * v.im - u.im * v.re,
                u.re * v.re + u.im * v.im,
            );
            if delta < 0.0 {
                delta += math::TAU;
            }
            return cum + delta.min(theta);
        }
        cum += theta;
    }
    cum
}

struct TraceOutcome {
    end_zero: usize,
    /// Halfedge at the end zero identifying the corner of the final face.
    end_corner: HalfedgeId,
    /// Direction of arrival in the final face chart.
    end_dir: f64,
    /// Entry point of the final piece (for prong matching).
    end_entry: Complex64,
    pieces: Vec<SegPiece>,
    crossings: Vec<(EdgeId, f64)>,
    length: f64,
}

/// Trace all critical trajectories of the form. `escape_bound` caps the
/// flat length of a single trajectory; exceeding it means the chosen form
/// does not close up its critical graph and should be replaced.
pub fn trace_critical(
    mesh: &TriMesh,
    charts: &FormCharts,
    zeros: &[ZeroPoint],
    escape_bound: f64,
) -> Result<CriticalGraph, CoveringError> {
    let mut zero_of_vertex = vec![u32::MAX; mesh.n_vertices()];
    for (i, z) in zeros.iter().enumerate() {
        zero_of_vertex[z.vertex as usize] = i as u32;
    }
    let snap_radius: Vec<f64> = zeros
        .iter()
        .map(|z| {
            let star: Vec<HalfedgeId> = mesh.vertex_star(z.vertex).collect();
            let mean: f64 = star
                .iter()
                .map(|&h| charts.he_length(mesh, h))
                .sum::<f64>()
                / star.len() as f64;
            0.5 * mean
        })
        .collect();

    let all_prongs: Vec<Vec<Prong>> = zeros
        .iter()
        .map(|z| zero_prongs(mesh, charts, z))
        .collect::<Result<_, _>>()?;
    let cone_angles: Vec<f64> = zeros.iter().map(|z| z.cone_angle).collect();

    let mut visited: Vec<Vec<bool>> = all_prongs.iter().map(|p| vec![false; p.len()]).collect();
    let mut segments = Vec::new();

    for zi in 0..zeros.len() {
        for pi in 0..all_prongs[zi].len() {
            if visited[zi][pi] {
                continue;
            }
            visited[zi][pi] = true;
            let prong = &all_prongs[zi][pi];
            let outcome = trace_one(
                mesh,
                charts,
                &zero_of_vertex,
                &snap_radius,
                zeros,
                zi,
                prong,
                escape_bound,
            )?;
            // Mark the prong the trajectory arrives along, so it is not
            // traced again from the other end.
            let zj = outcome.end_zero;
            let back = outcome.end_entry - charts.corner(outcome.end_corner);
            let arrival = unfolded_angle_of(mesh, charts, zeros[zj].vertex, outcome.end_corner, back);
            let cone = cone_angles[zj];
            let mut best: Option<(usize, f64)> = None;
            for (qi, q) in all_prongs[zj].iter().enumerate() {
                if visited[zj][qi] && !(zj == zi && qi == pi) {
                    continue;
                }
                if zj == zi && qi == pi {
                    continue; // a trajectory cannot retrace its own prong
                }
                let mut d = math::abs(q.unfolded - arrival) % cone;
                d = d.min(cone - d);
                if best.map_or(true, |(_, bd)| d < bd) {
                    best = Some((qi, d));
                }
            }
            let Some((qi, d)) = best else {
                return Err(CoveringError::UnmatchedProng);
            };
            if d > 0.5 * math::PI {
                return Err(CoveringError::UnmatchedProng);
            }
            visited[zj][qi] = true;
            segments.push(CriticalSegment {
                start_zero: zi,
                end_zero: zj,
                pieces: outcome.pieces,
                crossings: outcome.crossings,
                length: outcome.length,
            });
            let _ = outcome.end_dir;
        }
    }
    Ok(CriticalGraph {
        segments,
        snap_radius,
    })
}

#[allow(clippy::too_many_arguments)]
fn trace_one(
    mesh: &TriMesh,
    charts: &FormCharts,
    zero_of_vertex: &[u32],
    snap_radius: &[f64],
    zeros: &[ZeroPoint],
    start_zero: usize,
    prong: &Prong,
    escape_bound: f64,
) -> Result<TraceOutcome, CoveringError> {
    let mut face = mesh.he_face(prong.halfedge);
    let mut pos = charts.corner(prong.halfedge);
    let dir = prong.dir;
    let mut enter_he: Option<HalfedgeId> = None;
    let mut pieces: Vec<SegPiece> = Vec::new();
    let mut crossings: Vec<(EdgeId, f64)> = Vec::new();
    let mut length = 0.0f64;
    let start_suppress = 2.0 * snap_radius[start_zero];
    let step_cap = 200 * mesh.n_faces() + 1000;

    for _ in 0..step_cap {
        let level = pos.im;
        // Exit through one of the other two sides: the level line meets the
        // boundary at exactly one more point.
        let mut exit: Option<(HalfedgeId, f64, f64)> = None; // (halfedge, t, x)
        for i in 0..3u32 {
            let h = 3 * face + i;
            if Some(h) == enter_he {
                continue;
            }
            let ca = charts.corner(h);
            let cb = charts.corner(mesh.he_next(h));
            let da = ca.im - level;
            let db = cb.im - level;
            if da * db >= 0.0 {
                continue;
            }
            let t = da / (da - db);
            let x = ca.re + t * (cb.re - ca.re);
            if (x - pos.re) * dir <= 0.0 {
                continue;
            }
            if exit.map_or(true, |(_, _, xe)| {
                math::abs(x - pos.re) < math::abs(xe - pos.re)
            }) {
                exit = Some((h, t, x));
            }
        }
        let Some((h_exit, t, x)) = exit else {
            return Err(CoveringError::DegenerateTrace);
        };
        let exit_point = Complex64::new(x, level);

        // Snap into a zero when the chord passes its disk.
        let mut hit: Option<(HalfedgeId, f64)> = None; // corner halfedge, distance
        for i in 0..3u32 {
            let h = 3 * face + i;
            let v = mesh.he_src(h);
            let zi = zero_of_vertex[v as usize];
            if zi == u32::MAX {
                continue;
            }
            if zi as usize == start_zero && length < start_suppress {
                continue;
            }
            let zc = charts.corner(h);
            let d = super::point_segment_distance(zc, pos, exit_point);
            if d <= snap_radius[zi as usize] && hit.map_or(true, |(_, hd)| d < hd) {
                hit = Some((h, d));
            }
        }
        if let Some((h_corner, _)) = hit {
            let zc = charts.corner(h_corner);
            length += (zc - pos).norm();
            let entry = pos;
            pieces.push(SegPiece {
                face,
                enter: pos,
                exit: zc,
            });
            let zi = zero_of_vertex[mesh.he_src(h_corner) as usize] as usize;
            debug_assert!(zi < zeros.len());
            return Ok(TraceOutcome {
                end_zero: zi,
                end_corner: h_corner,
                end_dir: dir,
                end_entry: entry,
                pieces,
                crossings,
                length,
            });
        }

        // Commit the chord and cross into the neighbor chart.
        pieces.push(SegPiece {
            face,
            enter: pos,
            exit: exit_point,
        });
        length += (exit_point - pos).norm();
        if length > escape_bound {
            return Err(CoveringError::TraceEscape);
        }
        let e = mesh.he_edge(h_exit);
        let t_canonical = if mesh.edge_halfedge(e) == h_exit { t } else { 1.0 - t };
        crossings.push((e, t_canonical));
        let shift = charts.transition(mesh, h_exit);
        pos = exit_point + shift;
        enter_he = Some(mesh.he_twin(h_exit));
        face = mesh.he_face(mesh.he_twin(h_exit));
    }
    Err(CoveringError::TraceEscape)
}
