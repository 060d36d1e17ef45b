//! Per-link radio computations: sectorized antenna gains, the street-canyon
//! channel attenuation, SNR, beam-alignment overhead, effective data rate,
//! and single-hop delay and reliability.
//!
//! All link math stays in the dB domain; linearization happens only inside
//! the Shannon-rate step. The attenuation law `69.6 + 10 a log10(d) + rho`
//! enters the budget with a negative sign, i.e. it is a path loss even
//! though channel models often label the same quantity a gain.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RadioError {
    #[error("invalid antenna pattern: {0}")]
    InvalidAntenna(String),
    #[error("invalid link budget: {0}")]
    InvalidBudget(String),
    #[error("distance must be positive, got {0}")]
    NonPositiveDistance(f64),
}

/// Which end of the link an antenna query refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Tx,
    Rx,
}

/// Sectorized antenna: main-lobe gain inside the beam, side-lobe gain
/// outside, with sector-level beamwidth `psi` and beam-level beamwidth `phi`
/// per side (degrees).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaPattern {
    pub g_main_db: f64,
    pub g_side_db: f64,
    pub psi_tx_deg: f64,
    pub psi_rx_deg: f64,
    pub phi_tx_deg: f64,
    pub phi_rx_deg: f64,
}

impl AntennaPattern {
    pub fn new(
        g_main_db: f64,
        g_side_db: f64,
        psi_tx_deg: f64,
        psi_rx_deg: f64,
        phi_tx_deg: f64,
        phi_rx_deg: f64,
    ) -> Result<Self, RadioError> {
        if g_main_db.is_nan() || g_side_db.is_nan() || g_main_db <= g_side_db {
            return Err(RadioError::InvalidAntenna(format!(
                "main lobe gain {g_main_db} dB must exceed side lobe gain {g_side_db} dB"
            )));
        }
        for (phi, psi, side) in [
            (phi_tx_deg, psi_tx_deg, "tx"),
            (phi_rx_deg, psi_rx_deg, "rx"),
        ] {
            if !(phi > 0.0 && phi <= psi && psi <= 360.0) {
                return Err(RadioError::InvalidAntenna(format!(
                    "{side} beamwidths must satisfy 0 < phi <= psi <= 360, got phi {phi}, psi {psi}"
                )));
            }
        }
        Ok(Self {
            g_main_db,
            g_side_db,
            psi_tx_deg,
            psi_rx_deg,
            phi_tx_deg,
            phi_rx_deg,
        })
    }

    /// Number of beam pairs probed by an exhaustive beam-level sweep:
    /// `(psi_tx * psi_rx) / (phi_tx * phi_rx)`.
    pub fn beam_pairs(&self) -> f64 {
        (self.psi_tx_deg * self.psi_rx_deg) / (self.phi_tx_deg * self.phi_rx_deg)
    }
}

impl Default for AntennaPattern {
    /// Urban defaults: 10 dB main lobe, -10 dB side lobe, 40 degree sectors,
    /// 10 degree beams on both sides.
    fn default() -> Self {
        Self::new(10.0, -10.0, 40.0, 40.0, 10.0, 10.0).expect("default pattern is valid")
    }
}

/// Directivity gain of one side: main-lobe gain when the steering error is
/// within half the beam-level beamwidth (boundary inclusive), side-lobe gain
/// otherwise.
pub fn directivity_gain_db(pattern: &AntennaPattern, alignment_error_deg: f64, side: Side) -> f64 {
    let phi = match side {
        Side::Tx => pattern.phi_tx_deg,
        Side::Rx => pattern.phi_rx_deg,
    };
    if alignment_error_deg.abs() <= phi / 2.0 {
        pattern.g_main_db
    } else {
        pattern.g_side_db
    }
}

/// Beam-alignment delay of an exhaustive beam-level sweep: one pilot of
/// duration `pilot_s` per beam pair.
pub fn alignment_delay_s(pattern: &AntennaPattern, pilot_s: f64) -> f64 {
    pattern.beam_pairs() * pilot_s
}

/// Immutable radio constants of a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    /// Transmit power, dBm.
    pub p_t_dbm: f64,
    /// Noise power density, dBm/Hz.
    pub n0_dbm_hz: f64,
    /// Bandwidth, Hz.
    pub bandwidth_hz: f64,
    /// Path loss exponent.
    pub alpha: f64,
    /// Shadow fading standard deviation, dB.
    pub sigma_db: f64,
    /// Slot duration, seconds.
    pub slot_s: f64,
    /// Pilot duration, seconds.
    pub pilot_s: f64,
    /// Per-relay processing delay, seconds.
    pub proc_delay_s: f64,
    /// Message size, bits.
    pub packet_bits: f64,
    pub antenna: AntennaPattern,
}

impl LinkBudget {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        p_t_dbm: f64,
        n0_dbm_hz: f64,
        bandwidth_hz: f64,
        alpha: f64,
        sigma_db: f64,
        slot_s: f64,
        pilot_s: f64,
        proc_delay_s: f64,
        packet_bits: f64,
        antenna: AntennaPattern,
    ) -> Result<Self, RadioError> {
        if bandwidth_hz.is_nan() || bandwidth_hz <= 0.0 {
            return Err(RadioError::InvalidBudget(format!(
                "bandwidth must be positive, got {bandwidth_hz}"
            )));
        }
        if alpha.is_nan() || alpha <= 0.0 {
            return Err(RadioError::InvalidBudget(format!(
                "path loss exponent must be positive, got {alpha}"
            )));
        }
        if sigma_db.is_nan() || sigma_db < 0.0 {
            return Err(RadioError::InvalidBudget(format!(
                "shadowing sigma must be non-negative, got {sigma_db}"
            )));
        }
        if pilot_s.is_nan() || pilot_s <= 0.0 {
            return Err(RadioError::InvalidBudget(format!(
                "pilot duration must be positive, got {pilot_s}"
            )));
        }
        if proc_delay_s.is_nan() || proc_delay_s < 0.0 {
            return Err(RadioError::InvalidBudget(format!(
                "processing delay must be non-negative, got {proc_delay_s}"
            )));
        }
        if packet_bits.is_nan() || packet_bits < 0.0 {
            return Err(RadioError::InvalidBudget(format!(
                "packet size must be non-negative, got {packet_bits}"
            )));
        }
        let budget = Self {
            p_t_dbm,
            n0_dbm_hz,
            bandwidth_hz,
            alpha,
            sigma_db,
            slot_s,
            pilot_s,
            proc_delay_s,
            packet_bits,
            antenna,
        };
        let tau = budget.alignment_delay_s();
        if slot_s.is_nan() || slot_s <= tau {
            return Err(RadioError::InvalidBudget(format!(
                "slot duration {slot_s} s leaves no data time after the {tau} s alignment sweep"
            )));
        }
        Ok(budget)
    }

    /// Beam-alignment overhead of this budget's antenna, seconds.
    pub fn alignment_delay_s(&self) -> f64 {
        alignment_delay_s(&self.antenna, self.pilot_s)
    }

    /// Fraction of the slot left for data: `1 - tau / slot`.
    pub fn data_fraction(&self) -> f64 {
        1.0 - self.alignment_delay_s() / self.slot_s
    }

    /// Distance-independent part of the SNR budget, dB:
    /// `P_t - N_0 - 10 log10(B) + 2 G_main - 69.6`.
    pub fn link_margin_db(&self) -> f64 {
        self.p_t_dbm - self.n0_dbm_hz - 10.0 * self.bandwidth_hz.log10()
            + 2.0 * self.antenna.g_main_db
            - 69.6
    }

    /// Samples the full per-link chain at Manhattan distance `d_man_m` under
    /// shadowing draw `rho_db`.
    pub fn sample_link(&self, d_man_m: f64, rho_db: f64) -> Result<LinkSample, RadioError> {
        let snr_db = snr_db(self, d_man_m, rho_db)?;
        Ok(LinkSample {
            d_man_m,
            rho_db,
            snr_db,
            rate_bps: effective_rate_bps(self, snr_db),
            delay_s: single_hop_delay_s(self, snr_db),
        })
    }
}

impl Default for LinkBudget {
    /// Urban defaults: 30 dBm over 200 MHz at -174 dBm/Hz noise density,
    /// path loss exponent 2.9, 4 dB shadowing, 4 ms slots with 0.2 ms
    /// pilots, 20 us relay processing, 24 kbit packets.
    fn default() -> Self {
        Self::new(
            30.0,
            -174.0,
            2.0e8,
            2.9,
            4.0,
            4.0e-3,
            2.0e-4,
            2.0e-5,
            24_000.0,
            AntennaPattern::default(),
        )
        .expect("default budget is valid")
    }
}

/// One realized link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSample {
    pub d_man_m: f64,
    pub rho_db: f64,
    pub snr_db: f64,
    pub rate_bps: f64,
    pub delay_s: f64,
}

/// Street-canyon attenuation in dB at Manhattan distance `d_man_m` with
/// shadowing `rho_db`: `69.6 + 10 alpha log10(d) + rho`.
pub fn channel_gain_db(budget: &LinkBudget, d_man_m: f64, rho_db: f64) -> Result<f64, RadioError> {
    if d_man_m.is_nan() || d_man_m <= 0.0 {
        return Err(RadioError::NonPositiveDistance(d_man_m));
    }
    Ok(69.6 + 10.0 * budget.alpha * d_man_m.log10() + rho_db)
}

/// Post-alignment SNR in dB, with main-lobe gains on both ends:
/// `M - 10 alpha log10(d) - rho` where `M` is [`LinkBudget::link_margin_db`].
pub fn snr_db(budget: &LinkBudget, d_man_m: f64, rho_db: f64) -> Result<f64, RadioError> {
    if d_man_m.is_nan() || d_man_m <= 0.0 {
        return Err(RadioError::NonPositiveDistance(d_man_m));
    }
    Ok(budget.link_margin_db() - 10.0 * budget.alpha * d_man_m.log10() - rho_db)
}

/// Effective data rate in bit/s: the Shannon rate over the post-alignment
/// remainder of the slot, `(1 - tau/T) B log2(1 + snr)`.
pub fn effective_rate_bps(budget: &LinkBudget, snr_db: f64) -> f64 {
    let snr_linear = 10f64.powf(snr_db / 10.0);
    budget.data_fraction() * budget.bandwidth_hz * snr_linear.ln_1p() / std::f64::consts::LN_2
}

/// Single-hop message delay in seconds: packet size over effective rate.
///
/// Zero-rate links (SNR of negative infinity) yield `f64::INFINITY`, which
/// callers treat as hop failure; an empty packet takes zero time.
pub fn single_hop_delay_s(budget: &LinkBudget, snr_db: f64) -> f64 {
    if budget.packet_bits == 0.0 {
        return 0.0;
    }
    let rate = effective_rate_bps(budget, snr_db);
    if rate == 0.0 {
        f64::INFINITY
    } else {
        budget.packet_bits / rate
    }
}

/// Per-hop reliability indicator: SNR meets the threshold (closed comparison).
#[inline]
pub fn single_hop_reliability_indicator(snr_db: f64, epsilon_db: f64) -> bool {
    snr_db >= epsilon_db
}
