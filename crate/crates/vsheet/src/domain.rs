//! Canonical planar domains with closed-form Green functions.
//!
//! `G(x, y) = (1/2π) ln(1/|x − y|) − H(x, y)` with `H` the regular part:
//!
//! * free plane: `H = 0`;
//! * unit disk: `H(x, y) = −(1/4π) ln(1 − 2x·y + |x|²|y|²)`;
//! * upper half-plane: `H(x, y) = (1/2π) ln(1/|x − ȳ|)`, `ȳ = (y₁, −y₂)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vec2::{self, Point};

/// Points closer than this to the boundary count as outside.
pub const BOUNDARY_MARGIN: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DomainModel {
    #[serde(rename = "free")]
    FreePlane,
    #[serde(rename = "disk")]
    UnitDisk,
    #[serde(rename = "halfplane")]
    HalfPlane,
}

impl DomainModel {
    pub fn key(self) -> &'static str {
        match self {
            DomainModel::FreePlane => "free",
            DomainModel::UnitDisk => "disk",
            DomainModel::HalfPlane => "halfplane",
        }
    }

    /// Distance from `x` to the boundary, negative outside, infinite for the plane.
    pub fn boundary_distance(self, x: Point) -> f64 {
        match self {
            DomainModel::FreePlane => f64::INFINITY,
            DomainModel::UnitDisk => 1.0 - vec2::norm(x),
            DomainModel::HalfPlane => x[1],
        }
    }

    pub fn contains(self, x: Point) -> bool {
        x[0].is_finite() && x[1].is_finite() && self.boundary_distance(x) > BOUNDARY_MARGIN
    }

    pub fn check_point(self, x: Point) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::Input(format!(
                "point ({}, {}) is not inside the {} domain",
                x[0],
                x[1],
                self.key()
            )))
        }
    }

    /// Green function `G(x, y)`.
    pub fn green(self, x: Point, y: Point) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(y)?;
        let r2 = vec2::norm2(vec2::sub(x, y));
        if r2 == 0.0 {
            return Err(Error::Domain("green function at coincident points".into()));
        }
        Ok(-r2.ln() / (4.0 * PI) - self.h_raw(x, y))
    }

    /// Regular part `H(x, y)`; `h_regular(x, x)` is the Robin function.
    pub fn h_regular(self, x: Point, y: Point) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(y)?;
        Ok(self.h_raw(x, y))
    }

    /// `∇ₓG(x, y)`.
    pub fn grad_green_x(self, x: Point, y: Point) -> Result<Point> {
        self.check_point(x)?;
        self.check_point(y)?;
        let d = vec2::sub(x, y);
        let r2 = vec2::norm2(d);
        if r2 == 0.0 {
            return Err(Error::Domain("green gradient at coincident points".into()));
        }
        let free = vec2::scale(-1.0 / (2.0 * PI * r2), d);
        Ok(vec2::sub(free, self.grad_h_raw(x, y)))
    }

    /// `∇ₓH(x, y)`.
    pub fn grad_h_x(self, x: Point, y: Point) -> Result<Point> {
        self.check_point(x)?;
        self.check_point(y)?;
        Ok(self.grad_h_raw(x, y))
    }

    /// Robin function `H(x, x)`.
    pub fn robin(self, x: Point) -> Result<f64> {
        self.h_regular(x, x)
    }

    /// `∇[H(x, x)] = 2 (∇ₓH)(x, x)` by symmetry of `H`.
    pub fn grad_robin(self, x: Point) -> Result<Point> {
        Ok(vec2::scale(2.0, self.grad_h_x(x, x)?))
    }

    /// Unchecked `H`; callers guarantee both points are inside.
    pub(crate) fn h_raw(self, x: Point, y: Point) -> f64 {
        match self {
            DomainModel::FreePlane => 0.0,
            DomainModel::UnitDisk => {
                let q = 1.0 - 2.0 * vec2::dot(x, y) + vec2::norm2(x) * vec2::norm2(y);
                -q.ln() / (4.0 * PI)
            }
            DomainModel::HalfPlane => {
                let d = [x[0] - y[0], x[1] + y[1]];
                -vec2::norm2(d).ln() / (4.0 * PI)
            }
        }
    }

    /// Unchecked `∇ₓH`.
    pub(crate) fn grad_h_raw(self, x: Point, y: Point) -> Point {
        match self {
            DomainModel::FreePlane => [0.0, 0.0],
            DomainModel::UnitDisk => {
                let y2 = vec2::norm2(y);
                let q = 1.0 - 2.0 * vec2::dot(x, y) + vec2::norm2(x) * y2;
                vec2::scale(1.0 / (2.0 * PI * q), vec2::sub(y, vec2::scale(y2, x)))
            }
            DomainModel::HalfPlane => {
                let d = [x[0] - y[0], x[1] + y[1]];
                vec2::scale(-1.0 / (2.0 * PI * vec2::norm2(d)), d)
            }
        }
    }
}

impl fmt::Display for DomainModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for DomainModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free" => Ok(DomainModel::FreePlane),
            "disk" => Ok(DomainModel::UnitDisk),
            "halfplane" => Ok(DomainModel::HalfPlane),
            other => Err(Error::Input(format!("unknown domain key {other:?}"))),
        }
    }
}
