//! Points, dimensionality and line-of-sight geometry helpers.

use std::fmt;

/// Coordinates are stored in 3D; planar scenarios keep `z = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y, z: 0.0 }
    }

    pub const fn new3(x: f64, y: f64, z: f64) -> Self {
        Point { x, y, z }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Rotates about `pivot` by `angle` radians in the horizontal plane.
    pub fn rotated_about(&self, pivot: &Point, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        let (dx, dy) = (self.x - pivot.x, self.y - pivot.y);
        Point::new3(pivot.x + c * dx - s * dy, pivot.y + s * dx + c * dy, self.z)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.z == 0.0 {
            write!(f, "({}, {})", self.x, self.y)
        } else {
            write!(f, "({}, {}, {})", self.x, self.y, self.z)
        }
    }
}

/// Spatial dimensionality of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Dims {
    #[default]
    Planar,
    Spatial,
}

impl Dims {
    pub fn count(self) -> usize {
        match self {
            Dims::Planar => 2,
            Dims::Spatial => 3,
        }
    }

    pub fn from_count(n: usize) -> Option<Dims> {
        match n {
            2 => Some(Dims::Planar),
            3 => Some(Dims::Spatial),
            _ => None,
        }
    }

    /// Components of `p` that participate in this dimensionality.
    pub fn components(self, p: &Point) -> [f64; 3] {
        match self {
            Dims::Planar => [p.x, p.y, 0.0],
            Dims::Spatial => [p.x, p.y, p.z],
        }
    }
}

/// Unit vector pointing from `from` towards `to`, restricted to `dims`.
/// Returns `None` when the two points coincide.
pub fn unit_vector(from: &Point, to: &Point, dims: Dims) -> Option<[f64; 3]> {
    let a = dims.components(from);
    let b = dims.components(to);
    let d = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let norm = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    if norm == 0.0 {
        return None;
    }
    Some([d[0] / norm, d[1] / norm, d[2] / norm])
}

/// Axis-aligned search rectangle in the horizontal plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn square(side: f64, margin: f64) -> Self {
        Rect {
            min: Point::new(-margin, -margin),
            max: Point::new(side + margin, side + margin),
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn clamp(&self, p: &Point) -> Point {
        Point::new3(
            p.x.clamp(self.min.x, self.max.x),
            p.y.clamp(self.min.y, self.max.y),
            p.z,
        )
    }

    /// Largest and smallest distance from `center` to any point of the rectangle.
    pub fn distance_range(&self, center: &Point) -> (f64, f64) {
        let dx = (self.min.x - center.x).max(center.x - self.max.x).max(0.0);
        let dy = (self.min.y - center.y).max(center.y - self.max.y).max(0.0);
        let near = (dx * dx + dy * dy).sqrt();
        let fx = (center.x - self.min.x).abs().max((center.x - self.max.x).abs());
        let fy = (center.y - self.min.y).abs().max((center.y - self.max.y).abs());
        (near, (fx * fx + fy * fy).sqrt())
    }
}
