//! Adaptive Gauss-Kronrod quadrature.
//!
//! A 15-point Kronrod rule with its embedded 7-point Gauss rule supplies a
//! per-segment error estimate; the driver repeatedly bisects the segment with
//! the largest estimated error until the combined error drops below the
//! requested tolerance. Tolerances are interpreted as
//! `max(abs_tol, rel_tol * |integral|)`.

use thiserror::Error;

/// Converged integral with its error estimate and integrand-evaluation count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOutcome {
    pub value: f64,
    pub est_error: f64,
    pub evaluations: u64,
}

#[derive(Debug, Error, PartialEq)]
pub enum QuadError {
    #[error(
        "quadrature did not converge after {evaluations} evaluations \
         (value {value:.6e}, estimated error {est_error:.3e})"
    )]
    NonConvergent {
        evaluations: u64,
        value: f64,
        est_error: f64,
    },
    #[error("invalid integration interval [{a}, {b}]")]
    BadInterval { a: f64, b: f64 },
}

// 15-point Kronrod abscissae on [-1, 1], positive half in descending order.
// Odd entries are the embedded 7-point Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// QUADPACK error rescaling: sharpens the raw `|kronrod - gauss|` estimate
/// and floors it at the roundoff level of the computed integral.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// One 15-point Kronrod evaluation over `[a, b]`; returns the integral and
/// its rescaled error estimate.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut fv1 = [0.0f64; 7];
    let mut fv2 = [0.0f64; 7];

    let mut res_gauss = 0.0;
    let mut res_kronrod = f_center * WGK[7];
    let mut res_abs = res_kronrod.abs();

    // Gauss nodes (odd Kronrod indices).
    for (j, wg) in WG.iter().enumerate().take(3) {
        let idx = 2 * j + 1;
        let abscissa = half * XGK[idx];
        let f1 = f(center - abscissa);
        let f2 = f(center + abscissa);
        fv1[idx] = f1;
        fv2[idx] = f2;
        res_gauss += wg * (f1 + f2);
        res_kronrod += WGK[idx] * (f1 + f2);
        res_abs += WGK[idx] * (f1.abs() + f2.abs());
    }
    res_gauss += WG[3] * f_center;

    // Kronrod-only nodes (even indices 0, 2, 4, 6).
    for j in 0..4 {
        let idx = 2 * j;
        let abscissa = half * XGK[idx];
        let f1 = f(center - abscissa);
        let f2 = f(center + abscissa);
        fv1[idx] = f1;
        fv2[idx] = f2;
        res_kronrod += WGK[idx] * (f1 + f2);
        res_abs += WGK[idx] * (f1.abs() + f2.abs());
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let err = (res_kronrod - res_gauss) * half;
    let value = res_kronrod * half;
    let abserr = rescale_error(err, res_abs * half.abs(), res_asc * half.abs());
    (value, abserr)
}

#[derive(Debug)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err
            .partial_cmp(&other.err)
            .unwrap_or(std::cmp::Ordering::Equal)
    }
}

/// Integrates `f` over `[a, b]` to the requested tolerance.
///
/// `max_subdivisions` caps the number of bisections before the computation
/// is abandoned as non-convergent.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: u32,
) -> Result<QuadOutcome, QuadError> {
    if !a.is_finite() || !b.is_finite() || a > b {
        return Err(QuadError::BadInterval { a, b });
    }
    if a == b {
        return Ok(QuadOutcome {
            value: 0.0,
            est_error: 0.0,
            evaluations: 0,
        });
    }

    let mut evaluations: u64 = 15;
    let (value, err) = gk15(&f, a, b);
    let mut heap = std::collections::BinaryHeap::new();
    let mut total_value = value;
    let mut total_err = err;
    heap.push(Segment { a, b, value, err });

    let mut splits = 0u32;
    loop {
        let tol = abs_tol.max(rel_tol * total_value.abs());
        if total_err <= tol {
            return Ok(QuadOutcome {
                value: total_value,
                est_error: total_err,
                evaluations,
            });
        }
        if splits >= max_subdivisions {
            return Err(QuadError::NonConvergent {
                evaluations,
                value: total_value,
                est_error: total_err,
            });
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval at floating-point resolution; cannot refine further.
            return Err(QuadError::NonConvergent {
                evaluations,
                value: total_value,
                est_error: total_err,
            });
        }
        let (lv, le) = gk15(&f, worst.a, mid);
        let (rv, re) = gk15(&f, mid, worst.b);
        evaluations += 30;
        splits += 1;
        total_value += lv + rv - worst.value;
        total_err += le + re - worst.err;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: lv,
            err: le,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: rv,
            err: re,
        });
    }
}
