//! Float math routed through `libm` so the crate builds without `std` and
//! produces identical bits on every platform.

pub use num_complex::Complex64;

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn tan(x: f64) -> f64 {
    libm::tan(x)
}

#[inline]
pub fn acos(x: f64) -> f64 {
    libm::acos(x)
}

#[inline]
pub fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}

pub const PI: f64 = core::f64::consts::PI;
pub const TAU: f64 = 2.0 * core::f64::consts::PI;

/// Euler's number, the default line slope for dense-curve tracing.
pub const E: f64 = core::f64::consts::E;

/// cot of the corner angle at `c` in the triangle with vertices `a`, `b`, `c`,
/// from squared edge lengths only: cot γ = (a² + b² − c²) / (4·Area) with the
/// law of cosines, where the edge of length c is opposite the corner.
pub fn cot_from_lengths(adj1: f64, adj2: f64, opp: f64) -> f64 {
    let a2 = adj1 * adj1;
    let b2 = adj2 * adj2;
    let c2 = opp * opp;
    let area4 = sqrt(f64::max(
        (a2 + b2 + c2) * (a2 + b2 + c2) - 2.0 * (a2 * a2 + b2 * b2 + c2 * c2),
        0.0,
    ));
    (a2 + b2 - c2) / area4
}

/// Triangle area from edge lengths (numerically stable Heron, Kahan's order).
pub fn area_from_lengths(mut a: f64, mut b: f64, mut c: f64) -> f64 {
    // sort so a >= b >= c
    if a < b {
        core::mem::swap(&mut a, &mut b);
    }
    if b < c {
        core::mem::swap(&mut b, &mut c);
    }
    if a < b {
        core::mem::swap(&mut a, &mut b);
    }
    let t = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    0.25 * sqrt(f64::max(t, 0.0))
}

/// Lay out a triangle with edge lengths (l01, l12, l20) in the plane:
/// v0 at the origin, v1 on the positive x-axis, v2 in the upper half plane.
pub fn plane_triangle(l01: f64, l12: f64, l20: f64) -> [Complex64; 3] {
    let x = (l01 * l01 + l20 * l20 - l12 * l12) / (2.0 * l01);
    let y2 = l20 * l20 - x * x;
    let y = sqrt(f64::max(y2, 0.0));
    [
        Complex64::new(0.0, 0.0),
        Complex64::new(l01, 0.0),
        Complex64::new(x, y),
    ]
}

/// Unsigned angle at `apex` between the rays to `p` and to `q`.
pub fn corner_angle(apex: Complex64, p: Complex64, q: Complex64) -> f64 {
    let u = p - apex;
    let v = q - apex;
    let dot = u.re * v.re + u.im * v.im;
    let cross = u.re * v.im - u.im * v.re;
    abs(atan2(cross, dot))
}
