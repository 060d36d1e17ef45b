//! Vehicle placement on the road grid.
//!
//! Headways (head-to-head distances between consecutive vehicles on one
//! road) follow a shifted-exponential law: a hard minimum gap `d_safe` plus
//! an exponential free component with rate `mu`. Poisson traffic is the
//! `d_safe = 0` special case.
//!
//! Each road carries an independent stationary renewal process. The first
//! vehicle's offset from the clipping bound is drawn from the equilibrium
//! residual-gap distribution, which makes the vehicle density translation
//! invariant: the expected count on any segment of length `L` is exactly
//! `L / (d_safe + 1/mu)`. The process initialization is a modeling choice of
//! this crate; the equilibrium start is what makes short clipped segments
//! unbiased.

use crate::geometry::{Bounds, GridGeometry, Point};
use crate::rng::derive_rng;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TrafficError {
    #[error("invalid headway parameter: {0}")]
    InvalidParameter(String),
}

/// Shifted-exponential headway law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeadwayModel {
    /// Minimum gap guaranteed between consecutive vehicles, meters.
    pub d_safe: f64,
    /// Rate of the exponential free component, 1/meters.
    pub mu: f64,
}

impl HeadwayModel {
    pub fn new(d_safe: f64, mu: f64) -> Result<Self, TrafficError> {
        if !d_safe.is_finite() || d_safe < 0.0 {
            return Err(TrafficError::InvalidParameter(format!(
                "d_safe must be non-negative and finite, got {d_safe}"
            )));
        }
        if !mu.is_finite() || mu <= 0.0 {
            return Err(TrafficError::InvalidParameter(format!(
                "mu must be positive and finite, got {mu}"
            )));
        }
        Ok(Self { d_safe, mu })
    }

    /// Mean headway `d_safe + 1/mu`, meters.
    pub fn mean_headway(&self) -> f64 {
        self.d_safe + 1.0 / self.mu
    }

    /// CDF of the headway: `1 - exp(-mu (d - d_safe))` for `d >= d_safe`.
    pub fn cdf(&self, d: f64) -> f64 {
        if d < self.d_safe {
            0.0
        } else {
            1.0 - (-self.mu * (d - self.d_safe)).exp()
        }
    }

    /// Draws one headway; always at least `d_safe`.
    pub fn sample_headway(&self, rng: &mut ChaCha8Rng) -> f64 {
        let exp = Exp::new(self.mu).expect("mu validated positive");
        self.d_safe + exp.sample(rng)
    }

    /// Draws the offset of the first vehicle past a clipping bound, from the
    /// equilibrium residual-gap distribution of the renewal process: uniform
    /// on `[0, d_safe)` with probability `d_safe / mean`, otherwise
    /// `d_safe + Exp(mu)`.
    fn sample_equilibrium_offset(&self, rng: &mut ChaCha8Rng) -> f64 {
        let mean = self.mean_headway();
        let u: f64 = rng.random();
        if u < self.d_safe / mean {
            rng.random_range(0.0..self.d_safe)
        } else {
            self.sample_headway(rng)
        }
    }
}

/// Identifies one road line of the lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RoadId {
    /// `y = index * ry`
    Horizontal(i64),
    /// `x = index * rx`
    Vertical(i64),
}

impl std::fmt::Display for RoadId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RoadId::Horizontal(k) => write!(f, "h{k}"),
            RoadId::Vertical(m) => write!(f, "v{m}"),
        }
    }
}

/// Vehicles of a single road, sorted by their coordinate along the road.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadVehicles {
    pub id: RoadId,
    /// The fixed coordinate of the road line (y for horizontal, x for vertical).
    pub line: f64,
    /// Sorted positions along the road axis.
    pub along: Vec<f64>,
}

impl RoadVehicles {
    fn point_at(&self, along: f64) -> Point {
        match self.id {
            RoadId::Horizontal(_) => Point::new(along, self.line),
            RoadId::Vertical(_) => Point::new(self.line, along),
        }
    }
}

/// Snapshot of vehicle positions on every road inside a bounding rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct VehicleField {
    roads: Vec<RoadVehicles>,
    bounds: Bounds,
}

impl VehicleField {
    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn roads(&self) -> &[RoadVehicles] {
        &self.roads
    }

    pub fn vehicle_count(&self) -> usize {
        self.roads.iter().map(|r| r.along.len()).sum()
    }

    /// Iterates all vehicles as `(position, road)` pairs.
    pub fn vehicles(&self) -> impl Iterator<Item = (Point, RoadId)> + '_ {
        self.roads
            .iter()
            .flat_map(|r| r.along.iter().map(move |&a| (r.point_at(a), r.id)))
    }

    /// Calls `f` for every vehicle within Manhattan distance `lt` of
    /// `center` (closed ball). Roads are pruned by their offset from the
    /// center and each surviving road contributes a contiguous coordinate
    /// interval, located by binary search; the exact distance check on the
    /// interval's contents keeps the membership contract free of the
    /// rounding slack in the interval endpoints.
    pub fn for_each_in_ball<F: FnMut(Point)>(&self, center: Point, lt: f64, mut f: F) {
        for road in &self.roads {
            let (offset, center_along) = match road.id {
                RoadId::Horizontal(_) => ((road.line - center.y).abs(), center.x),
                RoadId::Vertical(_) => ((road.line - center.x).abs(), center.y),
            };
            if offset > lt {
                continue;
            }
            let reach = lt - offset;
            let lo = center_along - reach;
            let hi = center_along + reach;
            let start = road.along.partition_point(|&a| a < lo);
            for &a in &road.along[start..] {
                if a > hi {
                    break;
                }
                let p = road.point_at(a);
                if crate::geometry::in_range(center, p, lt) {
                    f(p);
                }
            }
        }
    }

    /// Builds a field from explicit per-road vehicle lists, for synthetic
    /// scenarios and tests. Positions within each road must be sorted.
    pub fn from_roads(roads: Vec<RoadVehicles>, bounds: Bounds) -> Self {
        for road in &roads {
            assert!(
                road.along.windows(2).all(|w| w[0] <= w[1]),
                "road {} positions must be sorted",
                road.id
            );
        }
        Self { roads, bounds }
    }

    /// Writes the field as CSV with columns `road_id,x,y` (debugging aid).
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "road_id,x,y")?;
        for (p, id) in self.vehicles() {
            writeln!(w, "{id},{},{}", p.x, p.y)?;
        }
        Ok(())
    }
}

/// Populates every road inside `bounds` with an independent stationary
/// renewal process drawn from `model`.
///
/// One `u64` is taken from `rng` as the base for per-road substreams, so the
/// result is deterministic for a given generator state and independent of
/// the order in which roads are filled.
pub fn populate_grid(
    geom: &GridGeometry,
    model: &HeadwayModel,
    bounds: &Bounds,
    rng: &mut ChaCha8Rng,
) -> VehicleField {
    let base: u64 = rng.random();
    let mut roads = Vec::new();
    if bounds.is_empty() {
        return VehicleField {
            roads,
            bounds: *bounds,
        };
    }

    for k in geom.horizontal_road_indices(bounds) {
        let id = RoadId::Horizontal(k);
        let line = k as f64 * geom.ry;
        let mut road_rng = derive_rng(base, road_stream(id));
        let along = fill_road(model, bounds.min_x, bounds.max_x, &mut road_rng);
        roads.push(RoadVehicles { id, line, along });
    }
    for m in geom.vertical_road_indices(bounds) {
        let id = RoadId::Vertical(m);
        let line = m as f64 * geom.rx;
        let mut road_rng = derive_rng(base, road_stream(id));
        let along = fill_road(model, bounds.min_y, bounds.max_y, &mut road_rng);
        roads.push(RoadVehicles { id, line, along });
    }

    VehicleField {
        roads,
        bounds: *bounds,
    }
}

/// Unique substream identifier per road: low bit separates the two road
/// orientations, remaining bits carry the lattice index.
fn road_stream(id: RoadId) -> u64 {
    match id {
        RoadId::Horizontal(k) => (k as u64) << 1,
        RoadId::Vertical(m) => ((m as u64) << 1) | 1,
    }
}

fn fill_road(model: &HeadwayModel, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut along = Vec::new();
    let mut pos = lo + model.sample_equilibrium_offset(rng);
    while pos <= hi {
        along.push(pos);
        pos += model.sample_headway(rng);
    }
    along
}
