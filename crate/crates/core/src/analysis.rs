//! Error metrics, error-ratio curves, Dolan-More performance profiles, and
//! the uncertainty-versus-error diagnostic.

use std::fmt;
use std::str::FromStr;

use ndarray::{ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mcdue::{mcdue_scores, McConfig};
use crate::nn::Network;

/// Which error column of a [`MetricsRecord`] to read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MetricKind {
    Rmse,
    Mae,
    MaxAe,
}

impl MetricKind {
    pub const ALL: [MetricKind; 3] = [MetricKind::Rmse, MetricKind::Mae, MetricKind::MaxAe];
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricKind::Rmse => write!(f, "rmse"),
            MetricKind::Mae => write!(f, "mae"),
            MetricKind::MaxAe => write!(f, "maxae"),
        }
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rmse" => Ok(MetricKind::Rmse),
            "mae" => Ok(MetricKind::Mae),
            "maxae" => Ok(MetricKind::MaxAe),
            other => Err(Error::Config(format!("unknown metric '{other}'"))),
        }
    }
}

/// Test-set errors after one active-learning iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub iteration: usize,
    pub labeled_size: usize,
    pub rmse: f64,
    pub mae: f64,
    pub maxae: f64,
}

impl MetricsRecord {
    pub fn metric(&self, kind: MetricKind) -> f64 {
        match kind {
            MetricKind::Rmse => self.rmse,
            MetricKind::Mae => self.mae,
            MetricKind::MaxAe => self.maxae,
        }
    }

    pub fn with_context(mut self, iteration: usize, labeled_size: usize) -> Self {
        self.iteration = iteration;
        self.labeled_size = labeled_size;
        self
    }
}

/// RMSE, MAE and MaxAE of `preds` against `targets`, in target units.
pub fn metrics(preds: ArrayView1<'_, f64>, targets: ArrayView1<'_, f64>) -> Result<MetricsRecord> {
    if preds.is_empty() {
        return Err(Error::Empty("metrics need at least one prediction".into()));
    }
    if preds.len() != targets.len() {
        return Err(Error::Shape(format!(
            "{} predictions vs {} targets",
            preds.len(),
            targets.len()
        )));
    }
    let n = preds.len() as f64;
    let mut sq = 0.0;
    let mut abs = 0.0;
    let mut max = 0.0f64;
    for (p, t) in preds.iter().zip(targets.iter()) {
        let r = (p - t).abs();
        sq += r * r;
        abs += r;
        max = max.max(r);
    }
    Ok(MetricsRecord {
        iteration: 0,
        labeled_size: 0,
        rmse: (sq / n).sqrt(),
        mae: abs / n,
        maxae: max,
    })
}

/// One grid point of a ratio curve: baseline error over candidate error,
/// averaged across replicates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioPoint {
    pub labeled_size: usize,
    pub mean: f64,
    pub std: f64,
}

/// Error-ratio training curve. Values above 1 favor the candidate.
#[derive(Debug, Clone)]
pub struct RatioCurve {
    pub metric: MetricKind,
    pub points: Vec<RatioPoint>,
    /// Labeled sizes dropped because the candidate error was zero there.
    pub excluded: Vec<usize>,
}

/// Pointwise `baseline / candidate` error ratio for one replicate pair.
pub fn ratio_curve(
    candidate: &[MetricsRecord],
    baseline: &[MetricsRecord],
    metric: MetricKind,
) -> Result<RatioCurve> {
    let c = vec![candidate.to_vec()];
    let b = vec![baseline.to_vec()];
    ratio_curve_replicates(&c, &b, metric)
}

/// Mean and standard deviation of the per-replicate error ratios at each
/// labeled size. Histories must share the labeled-size grid; points where
/// any candidate error is zero are excluded and reported.
pub fn ratio_curve_replicates(
    candidate: &[Vec<MetricsRecord>],
    baseline: &[Vec<MetricsRecord>],
    metric: MetricKind,
) -> Result<RatioCurve> {
    if candidate.is_empty() || candidate.len() != baseline.len() {
        return Err(Error::Config(format!(
            "{} candidate vs {} baseline replicates",
            candidate.len(),
            baseline.len()
        )));
    }
    let grid: Vec<usize> = candidate[0].iter().map(|r| r.labeled_size).collect();
    for history in candidate.iter().chain(baseline.iter()) {
        let this: Vec<usize> = history.iter().map(|r| r.labeled_size).collect();
        if this != grid {
            return Err(Error::Shape(format!(
                "labeled-size grids are misaligned: {this:?} vs {grid:?}"
            )));
        }
    }

    let mut points = Vec::new();
    let mut excluded = Vec::new();
    for (i, &labeled_size) in grid.iter().enumerate() {
        let mut ratios = Vec::with_capacity(candidate.len());
        let mut degenerate = false;
        for (c, b) in candidate.iter().zip(baseline.iter()) {
            let denom = c[i].metric(metric);
            if denom == 0.0 {
                degenerate = true;
                break;
            }
            ratios.push(b[i].metric(metric) / denom);
        }
        if degenerate {
            excluded.push(labeled_size);
            continue;
        }
        let n = ratios.len() as f64;
        let mean = ratios.iter().sum::<f64>() / n;
        let std = if ratios.len() > 1 {
            (ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        points.push(RatioPoint {
            labeled_size,
            mean,
            std,
        });
    }
    Ok(RatioCurve {
        metric,
        points,
        excluded,
    })
}

/// Error table `q[problem][algorithm]`, the input to a performance profile.
#[derive(Debug, Clone)]
pub struct ProblemResultTable {
    pub problems: Vec<String>,
    pub algorithms: Vec<String>,
    /// Row-major: `errors[p * algorithms.len() + a]`.
    errors: Vec<f64>,
}

impl ProblemResultTable {
    pub fn new(problems: Vec<String>, algorithms: Vec<String>, errors: Vec<f64>) -> Result<Self> {
        if problems.is_empty() || algorithms.is_empty() {
            return Err(Error::Empty("result table has no problems or algorithms".into()));
        }
        if errors.len() != problems.len() * algorithms.len() {
            return Err(Error::Shape(format!(
                "{} errors for {} problems x {} algorithms",
                errors.len(),
                problems.len(),
                algorithms.len()
            )));
        }
        if errors.iter().any(|q| !q.is_finite() || *q <= 0.0) {
            return Err(Error::Config(
                "performance profiles need strictly positive errors".into(),
            ));
        }
        Ok(Self {
            problems,
            algorithms,
            errors,
        })
    }

    pub fn error(&self, problem: usize, algorithm: usize) -> f64 {
        self.errors[problem * self.algorithms.len() + algorithm]
    }

    /// Performance ratios `q / min_over_algorithms(q)` per problem.
    fn ratios(&self) -> Vec<f64> {
        let na = self.algorithms.len();
        let mut out = Vec::with_capacity(self.errors.len());
        for p in 0..self.problems.len() {
            let row = &self.errors[p * na..(p + 1) * na];
            let best = row.iter().cloned().fold(f64::INFINITY, f64::min);
            out.extend(row.iter().map(|q| q / best));
        }
        out
    }
}

/// One algorithm's profile curve and its normalized area under the curve.
#[derive(Debug, Clone)]
pub struct ProfileCurve {
    pub algorithm: String,
    pub rho: Vec<f64>,
    pub auc: f64,
}

/// Dolan-More performance profile over a shared ratio-factor grid.
#[derive(Debug, Clone)]
pub struct PerformanceProfile {
    pub tau: Vec<f64>,
    pub curves: Vec<ProfileCurve>,
}

/// 200 log-spaced grid points on `[1, max_ratio]`. The endpoints are pinned
/// exactly so the largest observed ratio always lands inside the grid.
pub fn default_tau_grid(max_ratio: f64) -> Vec<f64> {
    let hi = max_ratio.max(1.0 + 1e-9);
    let n = 200;
    let mut grid: Vec<f64> = (0..n)
        .map(|i| (hi.ln() * i as f64 / (n - 1) as f64).exp())
        .collect();
    grid[0] = 1.0;
    grid[n - 1] = hi;
    grid
}

/// Compute the profile: for each algorithm, the fraction of problems whose
/// error is within a factor tau of the best algorithm on that problem. The
/// AUC is the trapezoidal integral of the curve over log tau, normalized by
/// `log(tau_max)` so it lands in `[0, 1]`.
pub fn dolan_more(table: &ProblemResultTable, tau: Option<Vec<f64>>) -> Result<PerformanceProfile> {
    let ratios = table.ratios();
    let tau = match tau {
        Some(grid) => {
            if grid.is_empty() {
                return Err(Error::Empty("tau grid is empty".into()));
            }
            if (grid[0] - 1.0).abs() > 1e-12 {
                return Err(Error::Config(format!(
                    "tau grid must start at 1, got {}",
                    grid[0]
                )));
            }
            if grid.windows(2).any(|w| w[1] < w[0]) {
                return Err(Error::Config("tau grid must be ascending".into()));
            }
            grid
        }
        None => {
            let max_ratio = ratios.iter().cloned().fold(1.0f64, f64::max);
            default_tau_grid(max_ratio)
        }
    };

    let np = table.problems.len();
    let na = table.algorithms.len();
    let mut curves = Vec::with_capacity(na);
    for a in 0..na {
        // ratios sit exactly on grid boundaries (r = 1 for the winner), so
        // compare with a hair of relative tolerance to keep the curve stable
        // under benign rescaling of a problem's error row
        let rho: Vec<f64> = tau
            .iter()
            .map(|&t| {
                let bound = t * (1.0 + 1e-12);
                let hits = (0..np).filter(|&p| ratios[p * na + a] <= bound).count();
                hits as f64 / np as f64
            })
            .collect();
        let auc = log_auc(&tau, &rho);
        curves.push(ProfileCurve {
            algorithm: table.algorithms[a].clone(),
            rho,
            auc,
        });
    }
    Ok(PerformanceProfile { tau, curves })
}

fn log_auc(tau: &[f64], rho: &[f64]) -> f64 {
    let span = tau.last().unwrap().ln();
    if span <= 0.0 {
        return *rho.last().unwrap();
    }
    let mut area = 0.0;
    for i in 1..tau.len() {
        let width = tau[i].ln() - tau[i - 1].ln();
        area += 0.5 * (rho[i] + rho[i - 1]) * width;
    }
    area / span
}

/// Pearson correlation coefficient; `None` when either side is constant.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys.iter()) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

// linear-interpolation quantile on a sorted slice
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

// fraction of values <= x
fn percentile_rank(sorted: &[f64], x: f64) -> f64 {
    sorted.partition_point(|v| *v <= x) as f64 / sorted.len() as f64
}

/// Scatter data and summary statistics relating MC-dropout uncertainty to
/// prediction error.
#[derive(Debug, Clone)]
pub struct DiagnosticReport {
    /// Per-point `(mc_std, abs_error)` pairs, in evaluation order.
    pub points: Vec<(f64, f64)>,
    /// `None` when the MC-std or error vector is constant.
    pub pearson_r: Option<f64>,
    pub median_std: f64,
    pub median_abs_error: f64,
    /// 0.99 quantile of the MC-std distribution.
    pub std_quantile_99: f64,
    /// Median percentile rank (within the error distribution) of the points
    /// whose MC std exceeds the 0.99 std quantile; `None` when no point does.
    pub high_std_error_percentile: Option<f64>,
}

/// Relate each evaluation point's MC-dropout std to its absolute prediction
/// error (mask-free forward). Targets must be in the same units the network
/// predicts.
pub fn std_error_diagnostic(
    net: &Network,
    x: ArrayView2<'_, f64>,
    y: ArrayView1<'_, f64>,
    cfg: &McConfig,
) -> Result<DiagnosticReport> {
    if x.nrows() != y.len() {
        return Err(Error::Shape(format!(
            "{} rows vs {} targets",
            x.nrows(),
            y.len()
        )));
    }
    let scores = mcdue_scores(net, x, cfg)?;
    let preds = net.forward_batch(x, None)?;
    let stds: Vec<f64> = scores.iter().map(|s| s.score).collect();
    let errors: Vec<f64> = preds
        .iter()
        .zip(y.iter())
        .map(|(p, t)| (p - t).abs())
        .collect();
    diagnostic_from_pairs(&stds, &errors)
}

/// Build the report from precomputed `(mc_std, abs_error)` vectors.
pub fn diagnostic_from_pairs(stds: &[f64], errors: &[f64]) -> Result<DiagnosticReport> {
    if stds.is_empty() || stds.len() != errors.len() {
        return Err(Error::Shape(format!(
            "{} stds vs {} errors",
            stds.len(),
            errors.len()
        )));
    }
    let mut sorted_stds = stds.to_vec();
    sorted_stds.sort_by(f64::total_cmp);
    let mut sorted_errors = errors.to_vec();
    sorted_errors.sort_by(f64::total_cmp);

    let std_quantile_99 = quantile(&sorted_stds, 0.99);
    let mut high_ranks: Vec<f64> = stds
        .iter()
        .zip(errors.iter())
        .filter(|(s, _)| **s > std_quantile_99)
        .map(|(_, e)| percentile_rank(&sorted_errors, *e))
        .collect();
    high_ranks.sort_by(f64::total_cmp);
    let high_std_error_percentile = if high_ranks.is_empty() {
        None
    } else {
        Some(median(&high_ranks))
    };

    Ok(DiagnosticReport {
        points: stds.iter().cloned().zip(errors.iter().cloned()).collect(),
        pearson_r: pearson(stds, errors),
        median_std: median(&sorted_stds),
        median_abs_error: median(&sorted_errors),
        std_quantile_99,
        high_std_error_percentile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    fn rec(labeled: usize, rmse: f64) -> MetricsRecord {
        MetricsRecord {
            iteration: 0,
            labeled_size: labeled,
            rmse,
            mae: rmse,
            maxae: rmse,
        }
    }

    #[test]
    fn metrics_hand_values() {
        let zero = metrics(array![1.0, 2.0].view(), array![1.0, 2.0].view()).unwrap();
        assert_eq!((zero.rmse, zero.mae, zero.maxae), (0.0, 0.0, 0.0));

        // residuals [3, -4]
        let m = metrics(array![3.0, -4.0].view(), array![0.0, 0.0].view()).unwrap();
        assert!((m.mae - 3.5).abs() < 1e-15);
        assert!((m.rmse - 12.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(m.maxae, 4.0);

        // single residual: all three collapse
        let m = metrics(array![2.5].view(), array![1.0].view()).unwrap();
        assert_eq!((m.rmse, m.mae, m.maxae), (1.5, 1.5, 1.5));

        assert!(metrics(array![].view(), array![].view()).is_err());
    }

    proptest! {
        #[test]
        fn metric_power_mean_inequalities(
            residuals in proptest::collection::vec(-1e4f64..1e4, 1..80),
        ) {
            let preds = ndarray::Array1::from_vec(residuals.clone());
            let targets = ndarray::Array1::zeros(residuals.len());
            let m = metrics(preds.view(), targets.view()).unwrap();
            prop_assert!(m.mae <= m.rmse * (1.0 + 1e-12));
            prop_assert!(m.rmse <= m.maxae * (1.0 + 1e-12));
        }
    }

    #[test]
    fn ratio_curve_identity_and_scaling() {
        let hist: Vec<MetricsRecord> = (0..4).map(|i| rec(100 + i * 10, 2.0)).collect();
        let same = ratio_curve(&hist, &hist, MetricKind::Rmse).unwrap();
        assert!(same.points.iter().all(|p| p.mean == 1.0 && p.std == 0.0));

        let halved: Vec<MetricsRecord> = hist.iter().map(|r| rec(r.labeled_size, 1.0)).collect();
        let curve = ratio_curve(&halved, &hist, MetricKind::Rmse).unwrap();
        assert!(curve.points.iter().all(|p| p.mean == 2.0));
    }

    #[test]
    fn ratio_curve_rejects_misaligned_grids_and_flags_zeros() {
        let a: Vec<MetricsRecord> = (0..3).map(|i| rec(100 + i * 10, 1.0)).collect();
        let b: Vec<MetricsRecord> = (0..3).map(|i| rec(101 + i * 10, 1.0)).collect();
        assert!(matches!(
            ratio_curve(&a, &b, MetricKind::Rmse),
            Err(Error::Shape(_))
        ));

        let mut zeroed = a.clone();
        zeroed[1] = rec(110, 0.0);
        let curve = ratio_curve(&zeroed, &a, MetricKind::Rmse).unwrap();
        assert_eq!(curve.points.len(), 2);
        assert_eq!(curve.excluded, vec![110]);
    }

    #[test]
    fn ratio_curve_replicate_statistics() {
        let cand = vec![
            vec![rec(10, 1.0), rec(20, 1.0)],
            vec![rec(10, 2.0), rec(20, 1.0)],
        ];
        let base = vec![
            vec![rec(10, 2.0), rec(20, 3.0)],
            vec![rec(10, 2.0), rec(20, 3.0)],
        ];
        let curve = ratio_curve_replicates(&cand, &base, MetricKind::Rmse).unwrap();
        // ratios at 10: [2, 1] -> mean 1.5, sample std sqrt(0.5)
        assert!((curve.points[0].mean - 1.5).abs() < 1e-15);
        assert!((curve.points[0].std - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((curve.points[1].mean - 3.0).abs() < 1e-15);
    }

    fn table_2x2() -> ProblemResultTable {
        // two problems, two algorithms; a1 ties or wins everywhere
        ProblemResultTable::new(
            vec!["p1".into(), "p2".into()],
            vec!["a1".into(), "a2".into()],
            vec![1.0, 2.0, 2.0, 2.0],
        )
        .unwrap()
    }

    #[test]
    fn dolan_more_hand_example() {
        let profile = dolan_more(&table_2x2(), Some(vec![1.0, 2.0])).unwrap();
        let a1 = &profile.curves[0];
        let a2 = &profile.curves[1];
        assert_eq!(a1.rho, vec![1.0, 1.0]);
        assert_eq!(a2.rho, vec![0.5, 1.0]);
        assert_eq!(a1.auc, 1.0);
    }

    #[test]
    fn dolan_more_single_algorithm_is_flat_one() {
        let table = ProblemResultTable::new(
            vec!["p1".into(), "p2".into(), "p3".into()],
            vec!["only".into()],
            vec![0.5, 8.0, 3.0],
        )
        .unwrap();
        let profile = dolan_more(&table, None).unwrap();
        assert!(profile.curves[0].rho.iter().all(|r| *r == 1.0));
        assert_eq!(profile.curves[0].auc, 1.0);
    }

    #[test]
    fn dolan_more_rho_at_one_counts_wins() {
        let table = ProblemResultTable::new(
            vec!["p1".into(), "p2".into(), "p3".into()],
            vec!["a".into(), "b".into()],
            vec![1.0, 2.0, 5.0, 4.0, 3.0, 3.0],
        )
        .unwrap();
        let profile = dolan_more(&table, None).unwrap();
        // a is best on p1 and ties on p3 -> 2/3; b is best on p2 and ties on p3 -> 2/3
        assert!((profile.curves[0].rho[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((profile.curves[1].rho[0] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn dolan_more_rejects_bad_inputs() {
        assert!(ProblemResultTable::new(
            vec!["p".into()],
            vec!["a".into()],
            vec![0.0]
        )
        .is_err());
        let t = table_2x2();
        assert!(dolan_more(&t, Some(vec![2.0, 3.0])).is_err());
        assert!(dolan_more(&t, Some(vec![1.0, 0.5])).is_err());
    }

    proptest! {
        #[test]
        fn dolan_more_monotone_and_row_scale_invariant(
            rows in proptest::collection::vec(
                proptest::collection::vec(0.1f64..100.0, 3),
                2..12,
            ),
            scale in 0.5f64..20.0,
        ) {
            let np = rows.len();
            let errors: Vec<f64> = rows.concat();
            let names = (0..np).map(|i| format!("p{i}")).collect::<Vec<_>>();
            let algos = vec!["a".into(), "b".into(), "c".into()];
            let table = ProblemResultTable::new(names.clone(), algos.clone(), errors.clone()).unwrap();
            let profile = dolan_more(&table, None).unwrap();
            for c in &profile.curves {
                prop_assert!(c.rho.windows(2).all(|w| w[1] >= w[0]));
                prop_assert!(c.rho.iter().all(|r| (0.0..=1.0).contains(r)));
                prop_assert_eq!(*c.rho.last().unwrap(), 1.0);
            }
            // at least one algorithm attains ratio 1 on every problem
            let wins: f64 = profile.curves.iter().map(|c| c.rho[0]).sum::<f64>() * np as f64;
            prop_assert!(wins >= np as f64 - 1e-9);

            // scaling one problem's whole row leaves the profile unchanged
            let mut scaled = errors;
            for v in scaled[0..3].iter_mut() {
                *v *= scale;
            }
            let table2 = ProblemResultTable::new(names, algos, scaled).unwrap();
            let tau = profile.tau.clone();
            let profile2 = dolan_more(&table2, Some(tau.clone())).unwrap();
            let profile1 = dolan_more(&table, Some(tau)).unwrap();
            for (c1, c2) in profile1.curves.iter().zip(&profile2.curves) {
                for (r1, r2) in c1.rho.iter().zip(&c2.rho) {
                    prop_assert!((r1 - r2).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn pearson_matches_naive_oracle() {
        // naive two-pass covariance / (std * std)
        fn naive(xs: &[f64], ys: &[f64]) -> f64 {
            let n = xs.len() as f64;
            let mx = xs.iter().sum::<f64>() / n;
            let my = ys.iter().sum::<f64>() / n;
            let cov = xs
                .iter()
                .zip(ys)
                .map(|(x, y)| (x - mx) * (y - my))
                .sum::<f64>()
                / n;
            let sx = (xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>() / n).sqrt();
            let sy = (ys.iter().map(|y| (y - my).powi(2)).sum::<f64>() / n).sqrt();
            cov / (sx * sy)
        }
        let mut r = crate::rng::stream(13, &[]);
        use rand::Rng as _;
        for _ in 0..50 {
            let xs: Vec<f64> = (0..40).map(|_| r.random_range(-5.0..5.0)).collect();
            let ys: Vec<f64> = (0..40).map(|_| r.random_range(-5.0..5.0)).collect();
            let ours = pearson(&xs, &ys).unwrap();
            assert!((ours - naive(&xs, &ys)).abs() < 1e-12);
        }
    }

    #[test]
    fn pearson_perfect_and_degenerate() {
        let xs = vec![1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x).collect();
        assert!((pearson(&xs, &ys).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(pearson(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]), None);
    }

    #[test]
    fn diagnostic_perfect_relation_and_percentiles() {
        let stds: Vec<f64> = (1..=200).map(|i| i as f64 * 0.01).collect();
        let errors: Vec<f64> = stds.iter().map(|s| 4.0 * s).collect();
        let report = diagnostic_from_pairs(&stds, &errors).unwrap();
        assert!((report.pearson_r.unwrap() - 1.0).abs() < 1e-12);
        // errors are a monotone map of stds: the highest-std points sit at
        // the top of the error distribution
        assert!(report.high_std_error_percentile.unwrap() > 0.98);
        assert!((report.median_std - median(&{
            let mut s = stds.clone();
            s.sort_by(f64::total_cmp);
            s
        })).abs() < 1e-15);
    }

    #[test]
    fn diagnostic_constant_std_has_no_correlation() {
        let stds = vec![0.5; 30];
        let errors: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let report = diagnostic_from_pairs(&stds, &errors).unwrap();
        assert_eq!(report.pearson_r, None);
        // nothing exceeds the 0.99 quantile of a constant distribution
        assert_eq!(report.high_std_error_percentile, None);
    }
}
