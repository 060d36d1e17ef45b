//! Taxicab-geometry primitives for the grid road network.
//!
//! Streets form an axis-aligned lattice and the millimeter-wave signal
//! propagates along street canyons, so the propagation distance between two
//! vehicles is the Manhattan distance and the communication range of a
//! vehicle is a Manhattan ball (a square rotated 45 degrees). Coordinates
//! are meters in the road-aligned frame; the source-to-destination axis of
//! the bundled scenarios runs along the `(-1, -1)` diagonal of this frame.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    /// Transmitter and destination coincide, so the progress axis is undefined.
    #[error("forward progress axis is degenerate: transmitter equals destination")]
    DegenerateAxis,
    #[error("invalid grid parameter: {0}")]
    InvalidGrid(String),
    #[error("invalid region query: {0}")]
    InvalidRegion(String),
}

/// Position in meters in the road-aligned frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Axis-aligned rectangle, used to clip road segments when populating fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Bounds {
    pub fn new(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Self {
        Self {
            min_x,
            min_y,
            max_x,
            max_y,
        }
    }

    /// True when the rectangle encloses zero area.
    pub fn is_empty(&self) -> bool {
        !(self.min_x < self.max_x && self.min_y < self.max_y)
    }
}

/// Road lattice: vertical roads every `rx` meters, horizontal roads every
/// `ry` meters. Roads are zero-width lines.
///
/// `eta` is the road-length-per-area coefficient of the lattice. It is kept
/// for documentation only: it cancels out of every distribution derived from
/// area ratios, so nothing in this crate uses it numerically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridGeometry {
    pub rx: f64,
    pub ry: f64,
    pub eta: f64,
}

impl GridGeometry {
    /// Builds a lattice with spacings `rx`, `ry` (meters) and the implied
    /// road density `eta = 1/rx + 1/ry`.
    pub fn new(rx: f64, ry: f64) -> Result<Self, GeometryError> {
        if !rx.is_finite() || rx <= 0.0 {
            return Err(GeometryError::InvalidGrid(format!(
                "rx must be positive and finite, got {rx}"
            )));
        }
        if !ry.is_finite() || ry <= 0.0 {
            return Err(GeometryError::InvalidGrid(format!(
                "ry must be positive and finite, got {ry}"
            )));
        }
        Ok(Self {
            rx,
            ry,
            eta: 1.0 / rx + 1.0 / ry,
        })
    }

    /// Indices `k` of horizontal roads `y = k * ry` intersecting `bounds`;
    /// empty for empty bounds.
    pub fn horizontal_road_indices(&self, bounds: &Bounds) -> std::ops::RangeInclusive<i64> {
        if bounds.is_empty() {
            return std::ops::RangeInclusive::new(1, 0);
        }
        let lo = (bounds.min_y / self.ry).ceil() as i64;
        let hi = (bounds.max_y / self.ry).floor() as i64;
        lo..=hi
    }

    /// Indices `m` of vertical roads `x = m * rx` intersecting `bounds`;
    /// empty for empty bounds.
    pub fn vertical_road_indices(&self, bounds: &Bounds) -> std::ops::RangeInclusive<i64> {
        if bounds.is_empty() {
            return std::ops::RangeInclusive::new(1, 0);
        }
        let lo = (bounds.min_x / self.rx).ceil() as i64;
        let hi = (bounds.max_x / self.rx).floor() as i64;
        lo..=hi
    }
}

/// `|x1 - x2| + |y1 - y2|`.
#[inline]
pub fn manhattan_distance(a: Point, b: Point) -> f64 {
    (a.x - b.x).abs() + (a.y - b.y).abs()
}

/// Closed-ball membership: true iff the Manhattan distance is at most `lt`.
///
/// The boundary is deliberately inclusive; whether the range boundary counts
/// only matters for measure-zero configurations and the closed convention
/// keeps exact-boundary tests unambiguous.
#[inline]
pub fn in_range(center: Point, other: Point, lt: f64) -> bool {
    debug_assert!(lt > 0.0);
    manhattan_distance(center, other) <= lt
}

/// Signed forward progress of `candidate` relative to `tx`: the Euclidean
/// scalar projection of `candidate - tx` onto the unit vector from `tx`
/// toward `dest`.
///
/// For candidates inside the Manhattan ball of radius `lt` with the
/// destination on the frame diagonal, the result lies in
/// `[-lt/sqrt(2), lt/sqrt(2)]`.
pub fn forward_progress(tx: Point, candidate: Point, dest: Point) -> Result<f64, GeometryError> {
    let ax = dest.x - tx.x;
    let ay = dest.y - tx.y;
    let norm = (ax * ax + ay * ay).sqrt();
    if norm == 0.0 {
        return Err(GeometryError::DegenerateAxis);
    }
    let dx = candidate.x - tx.x;
    let dy = candidate.y - tx.y;
    Ok((dx * ax + dy * ay) / norm)
}

/// Areas of the range regions behind the Manhattan-distance law.
///
/// Within the half of the communication square that offers positive forward
/// progress, the sub-region closer than `dman` has area `dman^2` and the
/// whole half-square has area `lt^2`. Their ratio is the CDF of the relay
/// Manhattan distance under uniform relay selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionAreas {
    /// Area of the region within Manhattan distance `dman`, in m^2.
    pub area_d: f64,
    /// Total area of the selection region, `lt^2`, in m^2.
    pub area_total: f64,
}

impl RegionAreas {
    /// `area_d / area_total`, the Manhattan-distance CDF value.
    pub fn ratio(&self) -> f64 {
        self.area_d / self.area_total
    }
}

/// Computes [`RegionAreas`] for range `lt` and distance `dman`.
///
/// Errors when inputs are negative, non-finite, or `dman > lt`.
pub fn region_areas(lt: f64, dman: f64) -> Result<RegionAreas, GeometryError> {
    if !lt.is_finite() || lt <= 0.0 {
        return Err(GeometryError::InvalidRegion(format!(
            "lt must be positive and finite, got {lt}"
        )));
    }
    if !(0.0..=lt).contains(&dman) {
        return Err(GeometryError::InvalidRegion(format!(
            "dman must lie in [0, lt] = [0, {lt}], got {dman}"
        )));
    }
    Ok(RegionAreas {
        area_d: dman * dman,
        area_total: lt * lt,
    })
}
