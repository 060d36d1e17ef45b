//! Acceptance suite.
//!
//! Each test evaluates one acceptance criterion at its stated tolerance and
//! prints one `criterion N: PASS/FAIL` line (visible with `--nocapture`).
//! Expensive sweeps are computed once and shared across criteria.

use mmv2v::analytics::{
    avg_total_delay, avg_total_reliability, hop_count, snr_cdf, QuadratureSpec,
};
use mmv2v::geometry::{forward_progress, manhattan_distance, Bounds, GridGeometry, Point};
use mmv2v::montecarlo::{run_path, select_relay, simulate, ScenarioConfig};
use mmv2v::radiolink::{effective_rate_bps, LinkBudget};
use mmv2v::rng::derive_rng;
use mmv2v::stats::ks_statistic;
use mmv2v::traffic::{populate_grid, HeadwayModel};
use mmv2v_cli::sweep::{run_sweep, SweepResult, SweepSpec, SweepVariable};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use std::f64::consts::SQRT_2;
use std::sync::OnceLock;
use std::time::Instant;

const R_VALID: f64 = 707.1067811865476; // 500 * sqrt(2)
const LT_GRID: [f64; 10] = [60.0, 80.0, 100.0, 120.0, 140.0, 160.0, 180.0, 200.0, 220.0, 240.0];

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

fn quad() -> QuadratureSpec {
    QuadratureSpec::default()
}

/// Simulated lt sweeps at the default replication count, one per d_safe,
/// shared by criteria 4, 5, and 7's companions.
fn sim_lt_sweeps() -> &'static Vec<(f64, SweepResult)> {
    static SWEEPS: OnceLock<Vec<(f64, SweepResult)>> = OnceLock::new();
    SWEEPS.get_or_init(|| {
        [2.0, 4.0, 6.0]
            .iter()
            .map(|&d_safe| {
                let base = ScenarioConfig {
                    headway: HeadwayModel::new(d_safe, 0.08).unwrap(),
                    ..ScenarioConfig::default()
                };
                let spec = SweepSpec {
                    variable: SweepVariable::Lt,
                    values: LT_GRID.to_vec(),
                    base,
                    modes: "simulated".parse().unwrap(),
                    quad: quad(),
                }
                .validated()
                .unwrap();
                (d_safe, run_sweep(&spec).unwrap())
            })
            .collect()
    })
}

fn analytic_lt_sweep() -> &'static SweepResult {
    static SWEEP: OnceLock<SweepResult> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let spec = SweepSpec {
            variable: SweepVariable::Lt,
            values: LT_GRID.to_vec(),
            base: ScenarioConfig::default(),
            modes: "analytic".parse().unwrap(),
            quad: quad(),
        }
        .validated()
        .unwrap();
        run_sweep(&spec).unwrap()
    })
}

#[test]
fn criterion_1_analytic_constants() {
    let budget = LinkBudget::default();
    let tau = budget.alignment_delay_s();
    let beam_pairs_exact = budget.antenna.beam_pairs() == 16.0;
    let tau_exact = tau == 16.0 * budget.pilot_s && tau == 0.0032;
    let m = budget.link_margin_db();
    let m_ok = (m - 71.3897).abs() <= 1e-4;
    report(
        "1",
        beam_pairs_exact && tau_exact && m_ok,
        &format!("alignment delay {tau} s (exactly 3.2 ms), link margin {m:.6} dB (71.3897 +- 1e-4)"),
    );
}

#[test]
fn criterion_2_continuum_limit_recovers_hop_laws() {
    // Continuum limit: no minimum gap, dense vehicles (2 per meter of
    // road would be unphysical; 0.5 veh/m with 10 m road spacing is dense
    // enough that both hop laws converge). Hops are drawn independently in
    // the geometry the per-hop laws describe: transmitter at an
    // intersection, destination far down the frame diagonal.
    let start = Instant::now();
    let lt = 100.0;
    let geom = GridGeometry::new(10.0, 10.0).unwrap();
    let headway = HeadwayModel::new(0.0, 0.5).unwrap();
    let source = Point::new(0.0, 0.0);
    let dest = Point::new(-1000.0, -1000.0);
    let bounds = Bounds::new(-lt - 1.0, -lt - 1.0, lt + 1.0, lt + 1.0);
    let n = 100_000usize;
    let mut fps = Vec::with_capacity(n);
    let mut ds = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = derive_rng(0xACCE55, i as u64);
        let field = populate_grid(&geom, &headway, &bounds, &mut rng);
        let relay = select_relay(source, dest, &field, lt, &mut rng)
            .expect("dense field always offers a forward relay");
        fps.push(forward_progress(source, relay, dest).unwrap());
        ds.push(manhattan_distance(source, relay));
    }
    fps.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    ds.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let ks_fp = ks_statistic(&fps, |z| (z * SQRT_2 / lt).clamp(0.0, 1.0));
    let ks_d = ks_statistic(&ds, |d| (d * d / (lt * lt)).clamp(0.0, 1.0));
    let elapsed = start.elapsed();
    report(
        "2",
        ks_fp < 0.02 && ks_d < 0.02 && elapsed.as_secs() <= 120,
        &format!(
            "10^5 hops: KS(forward progress vs uniform) = {ks_fp:.4}, \
             KS(distance vs quadratic law) = {ks_d:.4}, both < 0.02, in {elapsed:.2?}"
        ),
    );
}

// --- Criterion 3: brute-force oracles -------------------------------------

struct HopOracle {
    budget: LinkBudget,
    lt: f64,
}

impl HopOracle {
    /// Draws (snr_db, hop_delay_s) from the per-hop laws.
    fn draw(&self, rng: &mut rand_chacha::ChaCha8Rng, normal: &Normal<f64>) -> (f64, f64) {
        let u: f64 = rng.random();
        let d = self.lt * u.sqrt();
        let rho = normal.sample(rng);
        let snr = self.budget.link_margin_db() - 10.0 * self.budget.alpha * d.log10() - rho;
        let rate = effective_rate_bps(&self.budget, snr);
        (snr, self.budget.packet_bits / rate)
    }
}

#[test]
fn criterion_3_analytics_match_sampling_oracles() {
    let start = Instant::now();
    let budget = LinkBudget::default();
    let lt = 100.0;
    let eps = 5.0;
    let n = 10_000_000u64;
    let oracle = HopOracle { budget, lt };
    let normal = Normal::new(0.0, budget.sigma_db).unwrap();
    let mut rng = derive_rng(0x0AC1E, 0);

    let mut below = 0u64;
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    for _ in 0..n {
        let (snr, delay) = oracle.draw(&mut rng, &normal);
        if snr <= eps {
            below += 1;
        }
        sum += delay;
        sum_sq += delay * delay;
    }
    let nf = n as f64;
    let k = hop_count(R_VALID, lt);

    // SNR CDF at the default threshold.
    let f_mc = below as f64 / nf;
    let f_se = (f_mc * (1.0 - f_mc) / nf).sqrt();
    let f_ana = snr_cdf(eps, &budget, lt, &quad()).unwrap();
    let f_tol = 3.0 * f_se + f_ana.est_error;
    let f_gap = (f_ana.value - f_mc).abs();
    let f_ok = f_gap <= f_tol;

    // Mean total delay.
    let hop_mean = sum / nf;
    let hop_var = (sum_sq / nf - hop_mean * hop_mean).max(0.0);
    let d_mc = k * hop_mean + (k - 1.0) * budget.proc_delay_s;
    let d_se = k * (hop_var / nf).sqrt();
    let d_ana = avg_total_delay(&budget, R_VALID, lt, &quad()).unwrap();
    let d_tol = 3.0 * d_se + d_ana.est_error;
    let d_gap = (d_ana.value - d_mc).abs();
    let d_ok = d_gap <= d_tol;

    // Reliability, with the delta-method standard error of (1-F)^k.
    let r_mc = (1.0 - f_mc).powf(k);
    let r_se = k * (1.0 - f_mc).powf(k - 1.0) * f_se;
    let r_ana = avg_total_reliability(&budget, R_VALID, lt, eps, &quad()).unwrap();
    let r_tol = 3.0 * r_se + r_ana.est_error;
    let r_gap = (r_ana.value - r_mc).abs();
    let r_ok = r_gap <= r_tol;

    let elapsed = start.elapsed();
    report(
        "3",
        f_ok && d_ok && r_ok && elapsed.as_secs() <= 300,
        &format!(
            "10^7 draws: snr_cdf gap {f_gap:.2e} <= {f_tol:.2e}; \
             delay gap {d_gap:.2e} s <= {d_tol:.2e} s; \
             reliability gap {r_gap:.2e} <= {r_tol:.2e}; in {elapsed:.2?}"
        ),
    );
}

#[test]
fn criterion_4_delay_minimum_location() {
    let analytic = analytic_lt_sweep();
    let delays: Vec<f64> = analytic
        .rows
        .iter()
        .map(|r| r.analytic_delay_s.unwrap())
        .collect();
    let argmin_ana = delays
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap()
        .0;
    let interior = argmin_ana > 0 && argmin_ana < LT_GRID.len() - 1;
    let lt_ana = LT_GRID[argmin_ana];
    let in_window = (100.0..=180.0).contains(&lt_ana);

    let sim = &sim_lt_sweeps()
        .iter()
        .find(|(d, _)| *d == 4.0)
        .unwrap()
        .1;
    let sim_delays: Vec<f64> = sim.rows.iter().map(|r| r.sim_delay_s.unwrap()).collect();
    let argmin_sim = sim_delays
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap()
        .0;
    let lt_sim = LT_GRID[argmin_sim];
    let close = (lt_ana - lt_sim).abs() <= 20.0 + 1e-9;

    report(
        "4",
        interior && in_window && close,
        &format!(
            "analytic delay minimum at lt = {lt_ana} m (interior, within [100, 180]); \
             simulated minimum at lt = {lt_sim} m (within one 20 m grid step)"
        ),
    );
}

#[test]
fn criterion_5_reliability_monotone_in_range() {
    let mut detail = String::new();
    let mut all_ok = true;
    for (d_safe, sweep) in sim_lt_sweeps() {
        let mut violations = 0usize;
        for pair in sweep.rows.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            let ra = a.sim_reliability.unwrap();
            let rb = b.sim_reliability.unwrap();
            if rb > ra {
                // Increase: tolerated only within overlapping 95% CIs.
                let ci_a = a.sim_reliability_ci95.unwrap();
                let ci_b = b.sim_reliability_ci95.unwrap();
                if rb - ci_b > ra + ci_a {
                    violations += 1;
                }
            }
        }
        all_ok &= violations == 0;
        detail.push_str(&format!("d_safe={d_safe}: {violations} violations; "));
    }
    report(
        "5",
        all_ok,
        &format!("simulated reliability non-increasing over lt grid ({detail}CI-overlap rule)"),
    );
}

#[test]
fn criterion_6_reliability_strictly_decreasing_in_path_loss_exponent() {
    let alphas = [2.7, 2.9, 3.1];
    let base = ScenarioConfig::default();
    let spec = SweepSpec {
        variable: SweepVariable::Alpha,
        values: alphas.to_vec(),
        base,
        modes: "analytic,simulated".parse().unwrap(),
        quad: quad(),
    }
    .validated()
    .unwrap();
    let result = run_sweep(&spec).unwrap();
    let ana: Vec<f64> = result
        .rows
        .iter()
        .map(|r| r.analytic_reliability.unwrap())
        .collect();
    let sim: Vec<f64> = result
        .rows
        .iter()
        .map(|r| r.sim_reliability.unwrap())
        .collect();
    let ana_strict = ana.windows(2).all(|w| w[1] < w[0]);
    let sim_strict = sim.windows(2).all(|w| w[1] < w[0]);
    report(
        "6",
        ana_strict && sim_strict,
        &format!(
            "at lt=100 m, d_safe=4 m: analytic {ana:.6?} and simulated {sim:.5?} \
             both strictly decreasing over alpha {alphas:?}"
        ),
    );
}

#[test]
fn criterion_7_minimum_gap_sensitivity() {
    // Exploratory criterion: surface the d_safe effect the continuum
    // analytics cannot express. The effect at lt = 140 m is tiny, so the
    // replication count is raised until the delay CIs resolve it. The
    // direction is reported, not asserted. The reliability effect is a
    // near-cancellation of the hop-count and per-hop shifts; its deltas
    // are reported with their (overlapping) CIs rather than asserted,
    // since separating them is beyond any feasible replication budget.
    let reps = 1_000_000u32;
    let d_safes = [2.0, 4.0, 6.0];
    let spec = SweepSpec {
        variable: SweepVariable::DSafe,
        values: d_safes.to_vec(),
        base: ScenarioConfig {
            lt_m: 140.0,
            replications: reps,
            ..ScenarioConfig::default()
        },
        modes: "simulated".parse().unwrap(),
        quad: quad(),
    }
    .validated()
    .unwrap();
    let result = run_sweep(&spec).unwrap();
    let rows = &result.rows;

    let delay: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.sim_delay_s.unwrap(), r.sim_delay_ci95_s.unwrap()))
        .collect();
    let rel: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.sim_reliability.unwrap(), r.sim_reliability_ci95.unwrap()))
        .collect();

    // Delay separation between the extreme d_safe values.
    let (d_lo, ci_lo) = delay[0];
    let (d_hi, ci_hi) = delay[2];
    let separated = (d_lo - ci_lo > d_hi + ci_hi) || (d_hi - ci_hi > d_lo + ci_lo);
    let direction = if d_hi < d_lo {
        "delay decreases as d_safe grows"
    } else {
        "delay increases as d_safe grows"
    };

    let rel_overlap = (rel[0].0 - rel[2].0).abs() <= rel[0].1 + rel[2].1;
    println!(
        "criterion 7 (reported): delay at lt=140 m over d_safe {d_safes:?} = \
         [{:.6e} +- {:.1e}, {:.6e} +- {:.1e}, {:.6e} +- {:.1e}] s; {direction}",
        delay[0].0, delay[0].1, delay[1].0, delay[1].1, delay[2].0, delay[2].1
    );
    println!(
        "criterion 7 (reported): reliability deltas (d_safe 2 vs 6) = {:+.2e} with CI half-widths \
         {:.1e}/{:.1e} — {}",
        rel[2].0 - rel[0].0,
        rel[0].1,
        rel[2].1,
        if rel_overlap {
            "statistically unresolved at 10^6 replications (not asserted)"
        } else {
            "separated"
        }
    );
    report(
        "7",
        separated,
        &format!(
            "simulated delay separates beyond overlapping 95% CIs at 10^6 replications \
             ({:.6e} vs {:.6e} s, half-widths {:.1e}/{:.1e}); {direction}",
            d_lo, d_hi, ci_lo, ci_hi
        ),
    );
}

#[test]
fn criterion_8_property_spot_checks() {
    // The full property suite is the workspace test run itself; this test
    // re-executes the load-bearing invariants in one place.
    let start = Instant::now();
    let budget = LinkBudget::default();

    // Per-hop density normalizations by the crate's own quadrature.
    let lt = 100.0;
    let fp_mass = mmv2v::quad::integrate(
        |z| mmv2v::analytics::fp_pdf(z, lt),
        0.0,
        lt / SQRT_2,
        1e-12,
        1e-12,
        64,
    )
    .unwrap()
    .value;
    let d_mass = mmv2v::quad::integrate(
        |d| mmv2v::analytics::manhattan_pdf(d, lt),
        0.0,
        lt,
        1e-12,
        1e-12,
        64,
    )
    .unwrap()
    .value;
    let norm_ok = (fp_mass - 1.0).abs() < 1e-9 && (d_mass - 1.0).abs() < 1e-9;

    // SNR CDF monotonicity.
    let mut monotone = true;
    let mut prev = -1.0;
    for i in 0..60 {
        let gamma = -40.0 + 2.0 * i as f64;
        let v = snr_cdf(gamma, &budget, lt, &quad()).unwrap().value;
        monotone &= v >= prev - 1e-10;
        prev = v;
    }

    // Seed determinism of the simulator.
    let config = ScenarioConfig {
        replications: 200,
        ..ScenarioConfig::default()
    };
    let determinism = simulate(&config) == simulate(&config);

    // Headway floor and hop constraints.
    let headway = HeadwayModel::new(4.0, 0.08).unwrap();
    let mut rng = derive_rng(0xC8, 0);
    let headway_ok = (0..20_000).all(|_| headway.sample_headway(&mut rng) >= 4.0);
    let mut hops_ok = true;
    for i in 0..50 {
        let mut rng = derive_rng(0xC8, 1000 + i);
        let field = populate_grid(&config.geom, &config.headway, &config.field_bounds(), &mut rng);
        let record = run_path(&config, &field, &mut rng);
        hops_ok &= record
            .hops
            .iter()
            .all(|h| h.fp_m > 0.0 && h.d_man_m <= config.lt_m);
    }

    let elapsed = start.elapsed();
    report(
        "8",
        norm_ok && monotone && determinism && headway_ok && hops_ok && elapsed.as_secs() <= 600,
        &format!(
            "pdf normalization (1e-9), CDF monotonicity, seed determinism, headway floor, \
             hop constraints all hold; spot checks in {elapsed:.2?}"
        ),
    );
}
