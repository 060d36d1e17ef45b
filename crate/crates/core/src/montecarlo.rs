//! Discrete-vehicle end-to-end simulator.
//!
//! Each replication draws a fresh vehicle field (positions are frozen for
//! the whole message transmission), then forwards the message hop by hop:
//! the transmitter picks a relay uniformly at random among vehicles inside
//! its communication range that offer positive forward progress, drawing an
//! independent shadowing value per hop. When the destination itself is in
//! range it is chosen directly, which is the minimal consistent termination
//! rule. A path strands when no positive-progress relay exists; with
//! discrete vehicles this has positive probability even though the
//! continuum analytics cannot express it, so stranding is reported as its
//! own metric rather than folded into reliability.
//!
//! Replications run in parallel; replication `i` uses the random stream
//! derived from `(seed, i)`, so results are bit-identical regardless of
//! thread count or scheduling.

use crate::analytics::hop_count;
use crate::geometry::{forward_progress, in_range, manhattan_distance, Bounds, GridGeometry, Point};
use crate::radiolink::{single_hop_delay_s, single_hop_reliability_indicator, snr_db, LinkBudget};
use crate::rng::derive_rng;
use crate::stats;
use crate::traffic::{populate_grid, HeadwayModel, VehicleField};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use std::f64::consts::SQRT_2;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

/// Full description of one simulated scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    /// Euclidean source-destination separation, meters.
    pub r_valid_m: f64,
    /// Communication range (Manhattan radius), meters; must be below
    /// `r_valid_m`.
    pub lt_m: f64,
    pub geom: GridGeometry,
    pub headway: HeadwayModel,
    pub budget: LinkBudget,
    /// Per-hop SNR threshold for the reliability event, dB.
    pub epsilon_db: f64,
    pub replications: u32,
    pub seed: u64,
    /// Optional hop-count safety cap; defaults to ten times the expected
    /// hop count when absent.
    pub max_hops: Option<u32>,
}

impl ScenarioConfig {
    /// Checks the cross-field invariants and returns the config unchanged.
    pub fn validated(self) -> Result<Self, ScenarioError> {
        if !self.lt_m.is_finite() || self.lt_m <= 0.0 {
            return Err(ScenarioError::Invalid(format!(
                "lt must be positive and finite, got {}",
                self.lt_m
            )));
        }
        if !self.r_valid_m.is_finite() || self.r_valid_m <= 0.0 {
            return Err(ScenarioError::Invalid(format!(
                "r_valid must be positive and finite, got {}",
                self.r_valid_m
            )));
        }
        if self.lt_m >= self.r_valid_m {
            return Err(ScenarioError::Invalid(format!(
                "lt ({}) must be strictly below r_valid ({})",
                self.lt_m, self.r_valid_m
            )));
        }
        if self.replications == 0 {
            return Err(ScenarioError::Invalid(
                "replications must be at least 1".into(),
            ));
        }
        if let Some(cap) = self.max_hops {
            let k = hop_count(self.r_valid_m, self.lt_m);
            if (cap as f64) < k {
                return Err(ScenarioError::Invalid(format!(
                    "max_hops {cap} is below the expected hop count {k:.1}"
                )));
            }
        }
        Ok(self)
    }

    /// Source vehicle position: the origin intersection.
    pub fn source(&self) -> Point {
        Point::new(0.0, 0.0)
    }

    /// Destination vehicle position, down the frame diagonal at Euclidean
    /// distance `r_valid_m`.
    pub fn dest(&self) -> Point {
        let c = -self.r_valid_m / SQRT_2;
        Point::new(c, c)
    }

    /// Rectangle covering source and destination plus an `lt` margin; the
    /// vehicle field is drawn inside it.
    pub fn field_bounds(&self) -> Bounds {
        let s = self.source();
        let d = self.dest();
        Bounds::new(
            s.x.min(d.x) - self.lt_m,
            s.y.min(d.y) - self.lt_m,
            s.x.max(d.x) + self.lt_m,
            s.y.max(d.y) + self.lt_m,
        )
    }

    /// Hop cap in effect: the explicit value or ten times the expected hop
    /// count.
    pub fn resolved_max_hops(&self) -> u32 {
        self.max_hops
            .unwrap_or_else(|| (10.0 * hop_count(self.r_valid_m, self.lt_m)).ceil() as u32)
    }
}

impl Default for ScenarioConfig {
    /// Urban defaults: 50 m road spacings, 4 m minimum gap with mu = 0.08,
    /// source and destination 500*sqrt(2) m apart, 100 m range, 5 dB
    /// threshold, 10^4 replications.
    fn default() -> Self {
        Self {
            r_valid_m: 500.0 * SQRT_2,
            lt_m: 100.0,
            geom: GridGeometry::new(50.0, 50.0).expect("default grid is valid"),
            headway: HeadwayModel::new(4.0, 0.08).expect("default headway is valid"),
            budget: LinkBudget::default(),
            epsilon_db: 5.0,
            replications: 10_000,
            seed: 42,
            max_hops: None,
        }
    }
}

/// One realized hop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hop {
    pub tx: Point,
    pub rx: Point,
    pub d_man_m: f64,
    pub fp_m: f64,
    pub snr_db: f64,
    pub delay_s: f64,
    /// Whether this hop met the SNR threshold.
    pub success: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathOutcome {
    Delivered,
    /// No in-range relay with positive forward progress existed.
    Stranded,
    /// The safety cap on hops fired before delivery.
    HopCapExceeded,
}

/// Trace of one end-to-end attempt.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    pub hops: Vec<Hop>,
    pub outcome: PathOutcome,
    /// Sum of hop delays plus per-relay processing; present when delivered.
    pub total_delay_s: Option<f64>,
}

impl PathRecord {
    /// True when the path was delivered and every hop met the threshold.
    pub fn all_hops_reliable(&self) -> bool {
        self.outcome == PathOutcome::Delivered && self.hops.iter().all(|h| h.success)
    }
}

/// Picks the next relay for `current`.
///
/// The destination is returned deterministically as soon as it is in range;
/// otherwise the relay is a uniform choice among in-range vehicles with
/// positive forward progress, and `None` signals a stranded path.
pub fn select_relay(
    current: Point,
    dest: Point,
    field: &VehicleField,
    lt: f64,
    rng: &mut ChaCha8Rng,
) -> Option<Point> {
    if in_range(current, dest, lt) {
        return Some(dest);
    }
    let mut candidates = Vec::new();
    field.for_each_in_ball(current, lt, |p| {
        let fp = forward_progress(current, p, dest).unwrap_or(0.0);
        if fp > 0.0 {
            candidates.push(p);
        }
    });
    if candidates.is_empty() {
        None
    } else {
        Some(candidates[rng.random_range(0..candidates.len())])
    }
}

/// Runs one message transmission over a frozen vehicle field.
pub fn run_path(config: &ScenarioConfig, field: &VehicleField, rng: &mut ChaCha8Rng) -> PathRecord {
    let source = config.source();
    let dest = config.dest();
    let lt = config.lt_m;
    let cap = config.resolved_max_hops();
    let shadowing =
        Normal::new(0.0, config.budget.sigma_db).expect("sigma validated non-negative");

    let mut hops: Vec<Hop> = Vec::new();
    let mut tx = source;
    let outcome = loop {
        if hops.len() as u32 >= cap {
            break PathOutcome::HopCapExceeded;
        }
        let Some(rx) = select_relay(tx, dest, field, lt, rng) else {
            break PathOutcome::Stranded;
        };
        let d_man_m = manhattan_distance(tx, rx);
        let fp_m = forward_progress(tx, rx, dest).expect("tx never equals dest here");
        // Hop contract: positive progress within the communication range.
        assert!(fp_m > 0.0, "selected relay must make positive progress");
        assert!(d_man_m <= lt, "selected relay must be within range");
        let rho_db = shadowing.sample(rng);
        let snr = snr_db(&config.budget, d_man_m, rho_db).expect("hop distance is positive");
        let hop = Hop {
            tx,
            rx,
            d_man_m,
            fp_m,
            snr_db: snr,
            delay_s: single_hop_delay_s(&config.budget, snr),
            success: single_hop_reliability_indicator(snr, config.epsilon_db),
        };
        hops.push(hop);
        tx = rx;
        if tx == dest {
            break PathOutcome::Delivered;
        }
    };

    let total_delay_s = (outcome == PathOutcome::Delivered).then(|| {
        let transmit: f64 = hops.iter().map(|h| h.delay_s).sum();
        transmit + (hops.len().saturating_sub(1)) as f64 * config.budget.proc_delay_s
    });

    PathRecord {
        hops,
        outcome,
        total_delay_s,
    }
}

/// Point estimate with a 95% confidence half-width.
///
/// `n` is the number of observations behind the mean; a delay estimate with
/// `n == 0` (no delivered paths) is invalid and carries a NaN mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub ci_halfwidth: f64,
    pub n: u64,
    pub stranded_fraction: f64,
}

impl Estimate {
    pub fn is_valid(&self) -> bool {
        self.n > 0 && self.mean.is_finite()
    }
}

/// Aggregates of a full batch of replications.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationSummary {
    /// End-to-end delay over delivered paths, seconds.
    pub delay: Estimate,
    /// Fraction of replications delivered with every hop meeting the SNR
    /// threshold. Undelivered replications (stranded or capped) count as
    /// failures.
    pub reliability: Estimate,
    /// Mean hop count over delivered paths (NaN if none).
    pub mean_hops_delivered: f64,
    pub delivered: u64,
    pub stranded: u64,
    pub hop_cap_exceeded: u64,
    pub replications: u64,
}

struct RepOutcome {
    outcome: PathOutcome,
    total_delay_s: Option<f64>,
    hops: u32,
    reliable: bool,
}

/// Runs all replications of `config` in parallel and aggregates them.
pub fn simulate(config: &ScenarioConfig) -> SimulationSummary {
    let reps: Vec<RepOutcome> = (0..config.replications)
        .into_par_iter()
        .map(|i| {
            let mut rng = derive_rng(config.seed, i as u64);
            let field = populate_grid(
                &config.geom,
                &config.headway,
                &config.field_bounds(),
                &mut rng,
            );
            let record = run_path(config, &field, &mut rng);
            RepOutcome {
                outcome: record.outcome,
                total_delay_s: record.total_delay_s,
                hops: record.hops.len() as u32,
                reliable: record.all_hops_reliable(),
            }
        })
        .collect();

    let n = reps.len() as u64;
    let delivered = reps
        .iter()
        .filter(|r| r.outcome == PathOutcome::Delivered)
        .count() as u64;
    let stranded = reps
        .iter()
        .filter(|r| r.outcome == PathOutcome::Stranded)
        .count() as u64;
    let hop_cap_exceeded = n - delivered - stranded;
    let stranded_fraction = stranded as f64 / n as f64;

    let delays: Vec<f64> = reps.iter().filter_map(|r| r.total_delay_s).collect();
    let delay = Estimate {
        mean: stats::mean(&delays),
        ci_halfwidth: if delays.is_empty() {
            f64::NAN
        } else {
            stats::ci95_halfwidth(&delays)
        },
        n: delays.len() as u64,
        stranded_fraction,
    };

    let successes = reps.iter().filter(|r| r.reliable).count() as u64;
    let reliability = Estimate {
        mean: successes as f64 / n as f64,
        ci_halfwidth: stats::proportion_ci95_halfwidth(successes, n),
        n,
        stranded_fraction,
    };

    let hop_counts: Vec<f64> = reps
        .iter()
        .filter(|r| r.outcome == PathOutcome::Delivered)
        .map(|r| r.hops as f64)
        .collect();

    SimulationSummary {
        delay,
        reliability,
        mean_hops_delivered: stats::mean(&hop_counts),
        delivered,
        stranded,
        hop_cap_exceeded,
        replications: n,
    }
}

/// Delay and reliability estimates for `config`; see [`simulate`] for the
/// full aggregate set.
pub fn estimate(config: &ScenarioConfig) -> (Estimate, Estimate) {
    let summary = simulate(config);
    (summary.delay, summary.reliability)
}
