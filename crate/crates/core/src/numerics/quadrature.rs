//! Adaptive Gauss-Kronrod quadrature on finite and semi-infinite ranges.
//!
//! Every spectral integral in the crate goes through [`integrate_semi_infinite`].
//! Oscillatory integrands are cut into half-period panels starting at a known
//! zero of the oscillating factor; the partial sums of the panels form an
//! alternating sequence that is summed with Wynn's epsilon algorithm.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// 21-point Kronrod abscissae on [-1, 1]; odd entries are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_351_996,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_5,
    0.149_445_554_002_916_9,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

const MAX_SUBINTERVALS: usize = 4000;
const MAX_PANELS: usize = 20_000;
const MIN_PANELS: usize = 10;
const EPSILON_WINDOW: usize = 48;

/// Outcome of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Estimated absolute error, always non-negative.
    pub error_estimate: f64,
    /// Number of Gauss-Kronrod panels evaluated.
    pub panels: usize,
}

/// Structural hints about an integrand on `[0, inf)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KernelHints {
    /// Full period of an oscillating factor such as `sin(w t)` (period `2 pi / t`).
    pub oscillation_period: Option<f64>,
    /// Location of a zero of the oscillating factor; half-period panels start here.
    pub first_zero: f64,
    /// Characteristic scales (poles nearby the real axis, cross-overs,
    /// integrable singularities) where the adaptive splitting should start.
    pub breakpoints: Vec<f64>,
}

impl KernelHints {
    pub fn smooth(breakpoints: impl Into<Vec<f64>>) -> Self {
        Self {
            oscillation_period: None,
            first_zero: 0.0,
            breakpoints: breakpoints.into(),
        }
    }

    pub fn oscillatory(period: f64, first_zero: f64, breakpoints: impl Into<Vec<f64>>) -> Self {
        Self {
            oscillation_period: Some(period),
            first_zero,
            breakpoints: breakpoints.into(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Rule {
    value: f64,
    error: f64,
    abs: f64,
}

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

fn gauss_kronrod_21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Rule {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut res_k = f_center * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = (res_k).abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half.abs();
    let value = res_k * half;
    let error = rescale_error((res_k - res_g) * half, res_abs * scale, res_asc * scale);
    Rule {
        value,
        error,
        abs: res_abs * scale,
    }
}

/// Coordinate used on a segment: plain, or the reciprocal map `w = c / u`
/// that carries `u in (0, 1]` onto `[c, inf)`.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Map {
    Identity,
    Reciprocal(f64),
}

impl Map {
    fn rule<F: Fn(f64) -> f64>(self, f: &F, a: f64, b: f64) -> Rule {
        match self {
            Map::Identity => gauss_kronrod_21(f, a, b),
            Map::Reciprocal(c) => gauss_kronrod_21(
                &|u: f64| {
                    if u <= 0.0 {
                        0.0
                    } else {
                        f(c / u) * c / (u * u)
                    }
                },
                a,
                b,
            ),
        }
    }
}

struct Segment {
    a: f64,
    b: f64,
    map: Map,
    rule: Rule,
}

impl Segment {
    fn key(&self) -> f64 {
        match self.map {
            Map::Identity => self.a,
            Map::Reciprocal(c) => c / self.b,
        }
    }
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rule
            .error
            .total_cmp(&other.rule.error)
            // Tie-break on position so the bisection order is fully determined.
            .then_with(|| other.key().total_cmp(&self.key()))
    }
}

/// Globally adaptive integration over the union of `pieces`.
fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    pieces: &[(f64, f64, Map)],
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadratureResult> {
    let mut heap = BinaryHeap::new();
    let mut panels = 0usize;
    // Running sums drive the stopping test; the reported value is re-summed in
    // position order.
    let (mut value, mut error, mut abs) = (0.0, 0.0, 0.0);
    for &(a, b, map) in pieces {
        if b > a {
            let rule = map.rule(f, a, b);
            value += rule.value;
            error += rule.error;
            abs += rule.abs;
            heap.push(Segment { a, b, map, rule });
            panels += 1;
        }
    }
    loop {
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::QuadratureNonConvergence {
                value,
                error_estimate: error,
                requested: rel_tol,
                detail: "integrand produced a non-finite value".into(),
            });
        }
        let target = abs_tol.max(rel_tol * value.abs());
        if error <= target || error <= 50.0 * f64::EPSILON * abs {
            let (value, error) = totals(&heap);
            return Ok(QuadratureResult {
                value,
                error_estimate: error,
                panels,
            });
        }
        let worst = match heap.pop() {
            Some(s) => s,
            None => {
                return Ok(QuadratureResult {
                    value: 0.0,
                    error_estimate: 0.0,
                    panels,
                })
            }
        };
        let mid = 0.5 * (worst.a + worst.b);
        let too_narrow = mid <= worst.a || mid >= worst.b;
        if panels >= MAX_SUBINTERVALS || too_narrow {
            heap.push(worst);
            let (value, error) = totals(&heap);
            return Err(Error::QuadratureNonConvergence {
                value,
                error_estimate: error,
                requested: rel_tol,
                detail: format!("subinterval cap reached after {panels} panels"),
            });
        }
        let map = worst.map;
        let left = map.rule(f, worst.a, mid);
        let right = map.rule(f, mid, worst.b);
        value += left.value + right.value - worst.rule.value;
        error += left.error + right.error - worst.rule.error;
        abs += left.abs + right.abs - worst.rule.abs;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            map,
            rule: left,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            map,
            rule: right,
        });
        panels += 2;
    }
}

fn totals(heap: &BinaryHeap<Segment>) -> (f64, f64) {
    let mut segs: Vec<&Segment> = heap.iter().collect();
    segs.sort_by(|x, y| x.key().total_cmp(&y.key()));
    segs.iter()
        .fold((0.0, 0.0), |(v, e), s| (v + s.rule.value, e + s.rule.error))
}

fn split_at(a: f64, b: f64, breakpoints: &[f64]) -> Vec<(f64, f64, Map)> {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x.is_finite() && x > a && x < b)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut out = Vec::with_capacity(cuts.len() + 1);
    let mut lo = a;
    for c in cuts {
        out.push((lo, c, Map::Identity));
        lo = c;
    }
    out.push((lo, b, Map::Identity));
    out
}

/// Adaptive integral of `f` over the finite range `[a, b]` with optional interior
/// breakpoints, to relative tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: f64,
) -> Result<QuadratureResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidInput(format!("finite limits required, got [{a}, {b}]")));
    }
    if b < a {
        let r = integrate(f, b, a, breakpoints, tol)?;
        return Ok(QuadratureResult { value: -r.value, ..r });
    }
    adaptive(&f, &split_at(a, b, breakpoints), tol, 0.0)
}

/// Integral of `f` over `[start, inf)` without oscillation handling.
///
/// The largest breakpoint beyond `start` begins the mapped tail `w = c / u`.
fn integrate_smooth_tail<F: Fn(f64) -> f64>(
    f: &F,
    start: f64,
    breakpoints: &[f64],
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadratureResult> {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x.is_finite() && x > start)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let tail_start = match cuts.pop() {
        Some(c) => c,
        None if start > 0.0 => start,
        None => 1.0,
    };
    let mut pieces = if tail_start > start {
        split_at(start, tail_start, &cuts)
    } else {
        Vec::new()
    };
    let map = Map::Reciprocal(tail_start);
    pieces.push((0.0, 0.5, map));
    pieces.push((0.5, 1.0, map));
    adaptive(f, &pieces, rel_tol, abs_tol)
}

/// Integral of `f` over `[0, inf)`.
///
/// Converges when the estimated error is below `tol * |value|`, or has reached
/// the round-off floor of the absolute integrand. With an oscillation period the
/// integrand is integrated panel by panel beyond `hints.first_zero` and the
/// partial sums are extrapolated.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    hints: &KernelHints,
    tol: f64,
) -> Result<QuadratureResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    match hints.oscillation_period {
        None => integrate_smooth_tail(&f, 0.0, &hints.breakpoints, tol, 0.0),
        Some(period) => {
            if !(period > 0.0 && period.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "oscillation period must be positive, got {period}"
                )));
            }
            integrate_oscillatory(&f, period, hints.first_zero.max(0.0), &hints.breakpoints, tol)
        }
    }
}

fn integrate_oscillatory<F: Fn(f64) -> f64>(
    f: &F,
    period: f64,
    first_zero: f64,
    breakpoints: &[f64],
    tol: f64,
) -> Result<QuadratureResult> {
    let half = 0.5 * period;
    let mut panels = 0usize;
    let mut head = QuadratureResult {
        value: 0.0,
        error_estimate: 0.0,
        panels: 0,
    };
    if first_zero > 0.0 {
        head = integrate(f, 0.0, first_zero, breakpoints, 0.1 * tol)?;
        panels += head.panels;
    }
    let mut partial = Vec::with_capacity(256);
    let mut running = head.value;
    let mut panel_error = head.error_estimate;
    let mut best = (running, f64::INFINITY);
    let mut history: Vec<f64> = Vec::new();
    let mut quiet = 0usize;

    for k in 0..MAX_PANELS {
        let a = first_zero + k as f64 * half;
        let b = a + half;
        let scale = running.abs().max(best.0.abs());
        let piece = adaptive(f, &split_at(a, b, breakpoints), 0.1 * tol, 1e-3 * tol * scale)?;
        panels += piece.panels;
        panel_error += piece.error_estimate;
        running += piece.value;
        partial.push(running);

        // Absolute convergence of the raw series.
        if piece.value.abs() <= 1e-3 * tol * running.abs() || piece.value == 0.0 {
            quiet += 1;
        } else {
            quiet = 0;
        }
        if quiet >= 3 && k + 1 >= MIN_PANELS {
            return Ok(QuadratureResult {
                value: running,
                error_estimate: panel_error + piece.value.abs(),
                panels,
            });
        }

        if partial.len() >= 3 {
            let window = &partial[partial.len().saturating_sub(EPSILON_WINDOW)..];
            let estimate = wynn_epsilon(window);
            history.push(estimate);
            let n = history.len();
            if n >= 3 {
                let e = (history[n - 1] - history[n - 2]).abs()
                    + (history[n - 1] - history[n - 3]).abs();
                let err = e + panel_error;
                if err < best.1 {
                    best = (history[n - 1], err);
                }
                let target = tol * history[n - 1].abs();
                let floor = 1e3 * f64::EPSILON * running.abs().max(history[n - 1].abs());
                if k + 1 >= MIN_PANELS && (err <= target || e <= floor) {
                    return Ok(QuadratureResult {
                        value: history[n - 1],
                        error_estimate: err.max(f64::EPSILON * history[n - 1].abs()),
                        panels,
                    });
                }
            }
        }
    }
    Err(Error::QuadratureNonConvergence {
        value: best.0,
        error_estimate: best.1,
        requested: tol,
        detail: format!("oscillatory panel cap reached after {panels} panels"),
    })
}

/// Wynn's epsilon algorithm: the deepest even-column entry for the sequence.
pub fn wynn_epsilon(seq: &[f64]) -> f64 {
    let n = seq.len();
    if n == 0 {
        return 0.0;
    }
    if n < 3 {
        return seq[n - 1];
    }
    // prev = column k-1, cur = column k; columns shrink by one each step.
    let mut prev = vec![0.0; n + 1];
    let mut cur: Vec<f64> = seq.to_vec();
    let mut best = seq[n - 1];
    let mut k = 0usize;
    while cur.len() >= 2 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let diff = cur[i + 1] - cur[i];
            if diff == 0.0 || !diff.is_finite() {
                // Converged (or stalled) at this depth.
                return if k % 2 == 0 { cur[i + 1] } else { best };
            }
            next.push(prev[i + 1] + 1.0 / diff);
        }
        prev = cur;
        cur = next;
        k += 1;
        if k % 2 == 0 {
            if let Some(&v) = cur.last() {
                if v.is_finite() {
                    best = v;
                } else {
                    break;
                }
            }
        }
    }
    best
}
