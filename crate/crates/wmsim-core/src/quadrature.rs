//! Adaptive integration of complex-valued functions over the whole real line.
//!
//! The line is split at caller-supplied mandatory breakpoints; finite panels
//! use an adaptive 15-point Gauss–Kronrod rule bisected on the embedded error
//! estimate, and the two infinite tails are folded onto finite intervals with
//! the rational map x = t/(1−t²), which resolves algebraic decay without
//! assuming exponential falloff.

use crate::linalg::C64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadratureError {
    #[error("tolerance must be positive (got {0})")]
    BadTolerance(f64),
    #[error("breakpoints must be finite")]
    NonFiniteBreakpoint,
    #[error("integrand returned a non-finite value at x = {0}")]
    NonFiniteSample(f64),
}

/// What to integrate and how hard to try.
pub struct QuadratureRequest<'a> {
    pub integrand: &'a (dyn Fn(f64) -> C64 + Sync),
    pub tol: f64,
    pub breakpoints: Vec<f64>,
    pub max_evals: usize,
}

pub const DEFAULT_MAX_EVALS: usize = 1_000_000;

impl<'a> QuadratureRequest<'a> {
    pub fn new(integrand: &'a (dyn Fn(f64) -> C64 + Sync), tol: f64) -> Self {
        QuadratureRequest {
            integrand,
            tol,
            breakpoints: Vec::new(),
            max_evals: DEFAULT_MAX_EVALS,
        }
    }

    pub fn with_breakpoints(mut self, mut pts: Vec<f64>) -> Self {
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * (1.0 + a.abs().max(b.abs())));
        self.breakpoints = pts;
        self
    }

    pub fn with_max_evals(mut self, max_evals: usize) -> Self {
        self.max_evals = max_evals;
        self
    }
}

#[derive(Debug, Clone)]
pub struct QuadratureOutcome {
    pub value: C64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

// 15-point Kronrod nodes (positive half) and weights; 7-point Gauss weights.
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
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
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

/// How a panel's local coordinate maps into the integration variable.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Region {
    /// Identity map; local coordinate is x itself.
    Central,
    /// x = anchor + t/(1−t²); t ∈ (−1, 0] for the left tail, [0, 1) for the right.
    Tail { anchor: f64 },
}

#[derive(Debug, Clone)]
struct Panel {
    region_idx: usize,
    lo: f64,
    hi: f64,
    value: C64,
    error: f64,
    seq: u64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error && self.seq == other.seq
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // Max-heap on error; ties broken by insertion order for determinism.
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
            .then(other.seq.cmp(&self.seq))
    }
}

struct Evaluator<'a, 'b> {
    f: &'a (dyn Fn(f64) -> C64 + Sync),
    regions: &'b [Region],
    evals: usize,
    bad_sample: Option<f64>,
}

impl<'a, 'b> Evaluator<'a, 'b> {
    /// Integrand pulled back to the panel's local coordinate, including the
    /// Jacobian for tail regions.
    fn sample(&mut self, region_idx: usize, t: f64) -> C64 {
        let (x, jac) = match self.regions[region_idx] {
            Region::Central => (t, 1.0),
            Region::Tail { anchor } => {
                let d = 1.0 - t * t;
                (anchor + t / d, (1.0 + t * t) / (d * d))
            }
        };
        self.evals += 1;
        let v = (self.f)(x);
        if !v.re.is_finite() || !v.im.is_finite() {
            self.bad_sample.get_or_insert(x);
            return C64::new(0.0, 0.0);
        }
        v * jac
    }

    /// One GK 15/7 application over [lo, hi] in local coordinates.
    fn gk15(&mut self, region_idx: usize, lo: f64, hi: f64, seq: u64) -> Panel {
        let center = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);

        let f_center = self.sample(region_idx, center);
        let mut res_gauss = C64::new(0.0, 0.0);
        let mut res_kronrod = f_center * WGK[7];
        let mut res_abs = res_kronrod.norm();

        let mut fv1 = [C64::new(0.0, 0.0); 7];
        let mut fv2 = [C64::new(0.0, 0.0); 7];
        for j in 0..7 {
            let absc = half * XGK[j];
            let v1 = self.sample(region_idx, center - absc);
            let v2 = self.sample(region_idx, center + absc);
            fv1[j] = v1;
            fv2[j] = v2;
            let fsum = v1 + v2;
            if j % 2 != 0 {
                res_gauss += fsum * WG[j / 2];
            }
            res_kronrod += fsum * WGK[j];
            res_abs += WGK[j] * (v1.norm() + v2.norm());
        }
        res_gauss += f_center * WG[3];

        let mean = res_kronrod * 0.5;
        let mut res_asc = WGK[7] * (f_center - mean).norm();
        for j in 0..7 {
            res_asc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
        }

        let raw_err = ((res_kronrod - res_gauss) * half).norm();
        res_abs *= half.abs();
        res_asc *= half.abs();

        let mut err = raw_err;
        if res_asc != 0.0 && err != 0.0 {
            let scale = (200.0 * err / res_asc).powf(1.5);
            err = if scale < 1.0 { res_asc * scale } else { res_asc };
        }
        if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            err = err.max(50.0 * f64::EPSILON * res_abs);
        }

        Panel {
            region_idx,
            lo,
            hi,
            value: res_kronrod * half,
            error: err,
            seq,
        }
    }
}

/// Integrate over (−∞, ∞), honoring mandatory subdivision points.
pub fn integrate_real_line(req: &QuadratureRequest) -> Result<QuadratureOutcome, QuadratureError> {
    if !(req.tol > 0.0) {
        return Err(QuadratureError::BadTolerance(req.tol));
    }
    if req.breakpoints.iter().any(|b| !b.is_finite()) {
        return Err(QuadratureError::NonFiniteBreakpoint);
    }

    // Region table plus the initial panel list in local coordinates.
    let mut regions = Vec::new();
    let mut seeds: Vec<(usize, f64, f64)> = Vec::new();
    if req.breakpoints.is_empty() {
        regions.push(Region::Tail { anchor: 0.0 });
        seeds.push((0, -1.0, 0.0));
        seeds.push((0, 0.0, 1.0));
    } else {
        let first = req.breakpoints[0];
        let last = *req.breakpoints.last().unwrap();
        regions.push(Region::Tail { anchor: first });
        seeds.push((0, -1.0, 0.0));
        for w in req.breakpoints.windows(2) {
            let idx = regions.len();
            regions.push(Region::Central);
            seeds.push((idx, w[0], w[1]));
        }
        let idx = regions.len();
        regions.push(Region::Tail { anchor: last });
        seeds.push((idx, 0.0, 1.0));
    }

    let mut ev = Evaluator {
        f: req.integrand,
        regions: &regions,
        evals: 0,
        bad_sample: None,
    };

    let mut seq: u64 = 0;
    let mut heap = BinaryHeap::new();
    for (ridx, lo, hi) in seeds {
        let p = ev.gk15(ridx, lo, hi, seq);
        seq += 1;
        heap.push(p);
    }
    if let Some(x) = ev.bad_sample {
        return Err(QuadratureError::NonFiniteSample(x));
    }

    let mut converged;
    loop {
        let total_err: f64 = heap.iter().map(|p| p.error).sum();
        if total_err <= req.tol {
            converged = true;
            break;
        }
        if ev.evals + 30 > req.max_evals {
            converged = false;
            break;
        }
        let worst = heap.pop().expect("heap nonempty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // Panel narrower than representable; keep it and give up refining.
            heap.push(worst);
            converged = false;
            break;
        }
        let left = ev.gk15(worst.region_idx, worst.lo, mid, seq);
        seq += 1;
        let right = ev.gk15(worst.region_idx, mid, worst.hi, seq);
        seq += 1;
        if let Some(x) = ev.bad_sample {
            return Err(QuadratureError::NonFiniteSample(x));
        }
        heap.push(left);
        heap.push(right);
    }

    // Bitwise-deterministic reduction: sum panels ordered by interval.
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.sort_by(|a, b| {
        a.region_idx
            .cmp(&b.region_idx)
            .then(a.lo.partial_cmp(&b.lo).unwrap_or(Ordering::Equal))
    });
    let mut value = C64::new(0.0, 0.0);
    let mut error = 0.0;
    for p in &panels {
        value += p.value;
        error += p.error;
    }
    if converged && error > req.tol {
        converged = false;
    }

    Ok(QuadratureOutcome {
        value,
        abs_error_estimate: error,
        evaluations: ev.evals,
        converged,
    })
}
