//! Delay and reliability of millimeter-wave multi-hop vehicle-to-vehicle
//! links on an urban grid road network.
//!
//! Messages travel from a source vehicle to a destination vehicle through
//! randomly selected relays. Signals propagate along street canyons, so
//! distances are Manhattan distances and a vehicle's communication range is
//! a Manhattan ball. Vehicle headways on each road follow a
//! shifted-exponential law: a minimum safe gap `d_safe` plus an exponential
//! free component.
//!
//! The crate evaluates end-to-end message delay and reliability along two
//! independent routes that validate each other:
//!
//! * [`analytics`] — closed-form per-hop distributions combined into
//!   multi-hop expectations, evaluated by adaptive quadrature. This layer
//!   models relay positions as a continuum along the roads and therefore
//!   does not depend on `d_safe` at all.
//! * [`montecarlo`] — a discrete-vehicle simulator that places individual
//!   vehicles, forwards a message hop by hop, and estimates the same
//!   quantities with confidence intervals. Discreteness effects — the
//!   influence of `d_safe`, stranded paths with no forward relay — exist
//!   only here.
//!
//! Everything is deterministic given a seed: replications, road processes,
//! and sweep points each draw from derived random streams, so results do
//! not depend on thread count or scheduling.

pub mod analytics;
pub mod geometry;
pub mod montecarlo;
pub mod quad;
pub mod radiolink;
pub mod rng;
pub mod stats;
pub mod traffic;

pub use analytics::{AnalyticResult, AnalyticsError, QuadratureSpec};
pub use geometry::{Bounds, GeometryError, GridGeometry, Point, RegionAreas};
pub use montecarlo::{
    Estimate, Hop, PathOutcome, PathRecord, ScenarioConfig, ScenarioError, SimulationSummary,
};
pub use radiolink::{AntennaPattern, LinkBudget, LinkSample, RadioError, Side};
pub use traffic::{HeadwayModel, RoadId, RoadVehicles, TrafficError, VehicleField};
