//! Parameter sweeps: evaluate the analytic and/or simulated model over a
//! list of values of one variable.

use mmv2v::analytics::{
    avg_total_delay, avg_total_reliability, hop_count, AnalyticsError, QuadratureSpec,
};
use mmv2v::montecarlo::{simulate, ScenarioConfig, ScenarioError};
use mmv2v::radiolink::{LinkBudget, RadioError};
use mmv2v::traffic::{HeadwayModel, TrafficError};
use rayon::prelude::*;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep: {0}")]
    Spec(String),
    #[error("sweep value {value}: {source}")]
    Scenario {
        value: f64,
        #[source]
        source: ScenarioError,
    },
    #[error("sweep value {value}: {source}")]
    Radio {
        value: f64,
        #[source]
        source: RadioError,
    },
    #[error("sweep value {value}: {source}")]
    Traffic {
        value: f64,
        #[source]
        source: TrafficError,
    },
    #[error("sweep value {value}: {source}")]
    Analytics {
        value: f64,
        #[source]
        source: AnalyticsError,
    },
}

impl SweepError {
    /// True when the underlying failure is numerical non-convergence rather
    /// than a configuration problem.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            SweepError::Analytics {
                source: AnalyticsError::NonConvergent { .. },
                ..
            }
        )
    }
}

/// The swept variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    Lt,
    Alpha,
    DSafe,
    Epsilon,
}

impl SweepVariable {
    /// The config key this variable corresponds to.
    pub fn config_key(&self) -> &'static str {
        match self {
            SweepVariable::Lt => "lt",
            SweepVariable::Alpha => "alpha",
            SweepVariable::DSafe => "d_safe",
            SweepVariable::Epsilon => "epsilon",
        }
    }

    /// Unit suffix for axis labels; empty for dimensionless.
    pub fn unit(&self) -> &'static str {
        match self {
            SweepVariable::Lt | SweepVariable::DSafe => "m",
            SweepVariable::Alpha => "",
            SweepVariable::Epsilon => "dB",
        }
    }
}

impl FromStr for SweepVariable {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lt" => Ok(SweepVariable::Lt),
            "alpha" => Ok(SweepVariable::Alpha),
            "d_safe" => Ok(SweepVariable::DSafe),
            "epsilon" => Ok(SweepVariable::Epsilon),
            other => Err(format!(
                "unknown sweep variable `{other}` (expected lt, alpha, d_safe, or epsilon)"
            )),
        }
    }
}

impl std::fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.config_key())
    }
}

/// Which evaluation routes a sweep runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Modes {
    pub analytic: bool,
    pub simulated: bool,
}

impl FromStr for Modes {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut modes = Modes {
            analytic: false,
            simulated: false,
        };
        for part in s.split(',') {
            match part.trim() {
                "analytic" => modes.analytic = true,
                "simulated" => modes.simulated = true,
                other => {
                    return Err(format!(
                        "unknown mode `{other}` (expected analytic and/or simulated)"
                    ))
                }
            }
        }
        if !modes.analytic && !modes.simulated {
            return Err("at least one mode is required".into());
        }
        Ok(modes)
    }
}

/// A validated sweep request.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub base: ScenarioConfig,
    pub modes: Modes,
    pub quad: QuadratureSpec,
}

impl SweepSpec {
    pub fn validated(self) -> Result<Self, SweepError> {
        if self.values.is_empty() {
            return Err(SweepError::Spec("values list is empty".into()));
        }
        if !self.values.windows(2).all(|w| w[0] < w[1]) {
            return Err(SweepError::Spec(
                "values must be strictly increasing".into(),
            ));
        }
        Ok(self)
    }
}

/// One evaluated sweep point. Fields for modes that did not run are `None`;
/// simulated fields reported from zero delivered paths are also `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub analytic_delay_s: Option<f64>,
    pub analytic_reliability: Option<f64>,
    pub sim_delay_s: Option<f64>,
    pub sim_delay_ci95_s: Option<f64>,
    pub sim_reliability: Option<f64>,
    pub sim_reliability_ci95: Option<f64>,
    pub stranded_fraction: Option<f64>,
    pub hop_count_analytic: f64,
    pub mean_hops_sim: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub variable: SweepVariable,
    pub rows: Vec<SweepRow>,
}

/// Rebuilds the scenario with `variable` set to `value`, re-running all
/// validation.
pub fn apply_variable(
    base: &ScenarioConfig,
    variable: SweepVariable,
    value: f64,
) -> Result<ScenarioConfig, SweepError> {
    let mut config = *base;
    match variable {
        SweepVariable::Lt => config.lt_m = value,
        SweepVariable::Alpha => {
            let b = &base.budget;
            config.budget = LinkBudget::new(
                b.p_t_dbm,
                b.n0_dbm_hz,
                b.bandwidth_hz,
                value,
                b.sigma_db,
                b.slot_s,
                b.pilot_s,
                b.proc_delay_s,
                b.packet_bits,
                b.antenna,
            )
            .map_err(|source| SweepError::Radio { value, source })?;
        }
        SweepVariable::DSafe => {
            config.headway = HeadwayModel::new(value, base.headway.mu)
                .map_err(|source| SweepError::Traffic { value, source })?;
        }
        SweepVariable::Epsilon => config.epsilon_db = value,
    }
    config
        .validated()
        .map_err(|source| SweepError::Scenario { value, source })
}

fn evaluate_point(spec: &SweepSpec, value: f64) -> Result<SweepRow, SweepError> {
    let config = apply_variable(&spec.base, spec.variable, value)?;
    let annotate = |source: AnalyticsError| SweepError::Analytics { value, source };

    let mut row = SweepRow {
        value,
        analytic_delay_s: None,
        analytic_reliability: None,
        sim_delay_s: None,
        sim_delay_ci95_s: None,
        sim_reliability: None,
        sim_reliability_ci95: None,
        stranded_fraction: None,
        hop_count_analytic: hop_count(config.r_valid_m, config.lt_m),
        mean_hops_sim: None,
    };

    if spec.modes.analytic {
        row.analytic_delay_s = Some(
            avg_total_delay(&config.budget, config.r_valid_m, config.lt_m, &spec.quad)
                .map_err(annotate)?
                .value,
        );
        row.analytic_reliability = Some(
            avg_total_reliability(
                &config.budget,
                config.r_valid_m,
                config.lt_m,
                config.epsilon_db,
                &spec.quad,
            )
            .map_err(annotate)?
            .value,
        );
    }

    if spec.modes.simulated {
        let s = simulate(&config);
        row.sim_delay_s = s.delay.is_valid().then_some(s.delay.mean);
        row.sim_delay_ci95_s = s.delay.is_valid().then_some(s.delay.ci_halfwidth);
        row.sim_reliability = Some(s.reliability.mean);
        row.sim_reliability_ci95 = Some(s.reliability.ci_halfwidth);
        row.stranded_fraction = Some(s.reliability.stranded_fraction);
        row.mean_hops_sim = s.mean_hops_delivered.is_finite().then_some(s.mean_hops_delivered);
    }

    Ok(row)
}

/// Evaluates every sweep value (in parallel) and collects rows in sweep
/// order. All points share the base seed, so a single-value sweep equals a
/// direct call on the scenario.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult, SweepError> {
    let rows: Result<Vec<SweepRow>, SweepError> = spec
        .values
        .par_iter()
        .map(|&v| evaluate_point(spec, v))
        .collect();
    Ok(SweepResult {
        variable: spec.variable,
        rows: rows?,
    })
}
