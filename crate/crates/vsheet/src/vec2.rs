//! Minimal planar vector helpers.

pub type Point = [f64; 2];

#[inline]
pub fn add(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1]]
}

#[inline]
pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn scale(c: f64, a: Point) -> Point {
    [c * a[0], c * a[1]]
}

#[inline]
pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn norm2(a: Point) -> f64 {
    dot(a, a)
}

#[inline]
pub fn norm(a: Point) -> f64 {
    norm2(a).sqrt()
}

/// Clockwise quarter turn `(a₂, −a₁)`, so that `∇⊥ψ = perp(∇ψ)`.
#[inline]
pub fn perp(a: Point) -> Point {
    [a[1], -a[0]]
}

/// Unit vector `(cos θ, sin θ)`.
#[inline]
pub fn unit(theta: f64) -> Point {
    [theta.cos(), theta.sin()]
}
