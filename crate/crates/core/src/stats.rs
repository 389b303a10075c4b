//! Sample summaries, Welch's two-sample t-test and the log-linear fit of
//! mapping share against success mattering and sharer count.

use std::f64::consts::PI;

use crate::error::StatsError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleStats {
    pub n: usize,
    pub mean: f64,
    /// Unbiased standard deviation; `None` for a single observation.
    pub sd: Option<f64>,
    pub sem: Option<f64>,
}

pub fn aggregate(values: &[f64]) -> Result<SampleStats, StatsError> {
    let n = values.len();
    if n == 0 {
        return Err(StatsError::EmptySample);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let (sd, sem) = if n >= 2 {
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        let sd = (ss / (n - 1) as f64).sqrt();
        (Some(sd), Some(sd / (n as f64).sqrt()))
    } else {
        (None, None)
    };
    Ok(SampleStats { n, mean, sd, sem })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonResult {
    pub t: f64,
    pub df: f64,
    /// Two-sided p-value.
    pub p: f64,
    /// Both samples had zero variance; `t` is infinite (or zero) and `p`
    /// is a placeholder.
    pub degenerate: bool,
}

/// Welch's unequal-variance t-test of `a` against `b`.
pub fn welch_t(a: &SampleStats, b: &SampleStats) -> Result<ComparisonResult, StatsError> {
    let (Some(sa), Some(sb)) = (a.sd, b.sd) else {
        return Err(StatsError::TooFewObservations { needed: 2, got: a.n.min(b.n) });
    };
    let va = sa * sa / a.n as f64;
    let vb = sb * sb / b.n as f64;
    let diff = a.mean - b.mean;
    let se2 = va + vb;
    if se2 == 0.0 {
        let df = (a.n + b.n - 2) as f64;
        return Ok(if diff == 0.0 {
            ComparisonResult { t: 0.0, df, p: 1.0, degenerate: true }
        } else {
            ComparisonResult { t: f64::INFINITY.copysign(diff), df, p: f64::MIN_POSITIVE, degenerate: true }
        });
    }
    let t = diff / se2.sqrt();
    let df = se2 * se2 / (va * va / (a.n - 1) as f64 + vb * vb / (b.n - 1) as f64);
    Ok(ComparisonResult { t, df, p: student_t_sf(t, df), degenerate: false })
}

/// Two-sided tail probability `P(|T| >= |t|)` of Student's t with `df`
/// degrees of freedom.
pub fn student_t_sf(t: f64, df: f64) -> f64 {
    assert!(df > 0.0, "degrees of freedom must be positive");
    if t.is_nan() {
        return f64::NAN;
    }
    if t == 0.0 {
        return 1.0;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let t2 = t * t;
    // P = I_x(df/2, 1/2) with x = df / (df + t^2); 1 - x is formed directly
    // so that small |t| keeps full precision.
    let x = df / (df + t2);
    let one_minus_x = t2 / (df + t2);
    inc_beta_pair(0.5 * df, 0.5, x, one_minus_x).min(1.0)
}

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn inc_beta(a: f64, b: f64, x: f64) -> f64 {
    inc_beta_pair(a, b, x, 1.0 - x)
}

/// `I_x(a, b)` given both `x` and `1 - x`, evaluated by continued fraction
/// on whichever side converges quickly.
fn inc_beta_pair(a: f64, b: f64, x: f64, y: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if y <= 0.0 {
        return 1.0;
    }
    let front = |a: f64, b: f64, x: f64, y: f64| (a * x.ln() + b * y.ln() - ln_beta(a, b)).exp() / a;
    if x < (a + 1.0) / (a + b + 2.0) {
        front(a, b, x, y) * beta_cf(a, b, x)
    } else {
        1.0 - front(b, a, y, x) * beta_cf(b, a, y)
    }
}

/// Modified Lentz evaluation of the incomplete beta continued fraction.
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let clamp = |v: f64| if v.abs() < TINY { TINY } else { v };
    let mut c = 1.0;
    let mut d = 1.0 / clamp(1.0 - (a + b) * x / (a + 1.0));
    let mut h = d;
    for m in 1..100_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let even = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
        d = 1.0 / clamp(1.0 + even * d);
        c = clamp(1.0 + even / c);
        h *= d * c;
        let odd = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
        d = 1.0 / clamp(1.0 + odd * d);
        c = clamp(1.0 + odd / c);
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Fitted `ln(share) = p_sm * ln_a - k * ln_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub ln_a: f64,
    pub ln_b: f64,
    /// Coefficient of determination on the log scale, against the mean of
    /// the log responses.
    pub r2: f64,
    pub n_points: usize,
    /// Points dropped because their ratio was not positive.
    pub excluded: usize,
}

impl FitResult {
    pub fn a(&self) -> f64 {
        self.ln_a.exp()
    }

    pub fn b(&self) -> f64 {
        self.ln_b.exp()
    }
}

/// One observation for [`fit_mapshare`]: share of mappings known by exactly
/// `k` agents at success-mattering level `p_sm`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharePoint {
    pub p_sm: f64,
    pub k: f64,
    pub ratio: f64,
}

/// Least-squares fit of `share = a^p_sm * b^-k` in log space, without an
/// intercept.
pub fn fit_mapshare(points: &[SharePoint]) -> Result<FitResult, StatsError> {
    let usable: Vec<&SharePoint> = points.iter().filter(|p| p.ratio > 0.0 && p.ratio.is_finite()).collect();
    let excluded = points.len() - usable.len();
    if usable.len() < 3 {
        return Err(StatsError::TooFewObservations { needed: 3, got: usable.len() });
    }
    let distinct = |f: fn(&SharePoint) -> f64| {
        let mut v: Vec<f64> = usable.iter().map(|p| f(p)).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v.len()
    };
    if distinct(|p| p.p_sm) < 2 || distinct(|p| p.k) < 2 {
        return Err(StatsError::SingularFit("need at least two distinct p_sm levels and two distinct k values".into()));
    }
    // Regressors u = p_sm, v = -k; response y = ln(ratio).
    let (mut suu, mut suv, mut svv, mut suy, mut svy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for p in &usable {
        let (u, v, y) = (p.p_sm, -p.k, p.ratio.ln());
        suu += u * u;
        suv += u * v;
        svv += v * v;
        suy += u * y;
        svy += v * y;
    }
    let det = suu * svv - suv * suv;
    if det.abs() <= 1e-12 * suu * svv {
        return Err(StatsError::SingularFit("regressors are collinear".into()));
    }
    let ln_a = (svv * suy - suv * svy) / det;
    let ln_b = (suu * svy - suv * suy) / det;

    let n = usable.len() as f64;
    let mean_y = usable.iter().map(|p| p.ratio.ln()).sum::<f64>() / n;
    let (mut ss_res, mut ss_tot) = (0.0, 0.0);
    for p in &usable {
        let y = p.ratio.ln();
        let r = y - (p.p_sm * ln_a - p.k * ln_b);
        ss_res += r * r;
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    let r2 = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else if ss_res <= 1e-24 {
        1.0
    } else {
        f64::NEG_INFINITY
    };
    Ok(FitResult { ln_a, ln_b, r2, n_points: usable.len(), excluded })
}
