//! Kendall rank correlation against time order, with a tie-corrected tau-b
//! and a two-sided significance test: exact permutation enumeration for short
//! series, normal approximation with tie and continuity corrections beyond.

use super::AnalyticsError;

/// Series at or below this length get the exact permutation p-value; the
/// n! enumeration stays cheap up to here (8! = 40320).
pub const EXACT_P_MAX_LEN: usize = 8;

/// Minimum number of observations for a meaningful rank correlation.
pub const MIN_SERIES_LEN: usize = 3;

/// Kendall tau-b of `series` against its own index order (time), returning
/// `(tau, p_value)` for the two-sided test of no association.
///
/// Index order is strictly increasing, so only ties within `series` need
/// correction. A constant series carries no rank information and is reported
/// as `(0.0, 1.0)`.
pub fn kendall_tau(series: &[f64]) -> Result<(f64, f64), AnalyticsError> {
    if series.len() < MIN_SERIES_LEN {
        return Err(AnalyticsError::InsufficientData(format!(
            "kendall tau needs at least {MIN_SERIES_LEN} observations, got {}",
            series.len()
        )));
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(AnalyticsError::InvalidParameter(
            "kendall tau requires finite values".into(),
        ));
    }

    let n = series.len();
    let s = pair_statistic(series);

    // Tie corrections: time indices are never tied, so n1 = 0.
    let n0 = (n * (n - 1) / 2) as f64;
    let n2: f64 = tie_group_sizes(series)
        .iter()
        .map(|&u| (u * (u - 1) / 2) as f64)
        .sum();
    let denom_sq = n0 * (n0 - n2);
    if denom_sq == 0.0 {
        // Every value identical.
        return Ok((0.0, 1.0));
    }
    let tau = s as f64 / denom_sq.sqrt();

    let p = if n <= EXACT_P_MAX_LEN {
        exact_two_sided_p(series, s)
    } else {
        normal_two_sided_p(series, s)
    };
    Ok((tau, p))
}

/// S = concordant - discordant over all index pairs, an integer because each
/// pair contributes exactly -1, 0, or +1.
fn pair_statistic(series: &[f64]) -> i64 {
    let mut s = 0i64;
    for j in 1..series.len() {
        for i in 0..j {
            s += match series[i].partial_cmp(&series[j]).expect("finite values") {
                std::cmp::Ordering::Less => 1,
                std::cmp::Ordering::Equal => 0,
                std::cmp::Ordering::Greater => -1,
            };
        }
    }
    s
}

fn tie_group_sizes(series: &[f64]) -> Vec<u64> {
    let mut sorted: Vec<f64> = series.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let mut groups = Vec::new();
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            groups.push(run);
            run = 1;
        }
    }
    groups.push(run);
    groups
}

/// Fraction of the n! value orderings whose |S| reaches |S_observed|.
/// Duplicated values are permuted as distinguishable items, which weights
/// each distinct arrangement by its multiset multiplicity.
fn exact_two_sided_p(series: &[f64], s_observed: i64) -> f64 {
    let mut values: Vec<f64> = series.to_vec();
    let threshold = s_observed.abs();
    let mut hits = 0u64;
    let mut total = 0u64;

    // Heap's algorithm, iterative form: visits each permutation exactly once.
    let n = values.len();
    let mut counters = vec![0usize; n];
    let mut tally = |perm: &[f64]| {
        total += 1;
        if pair_statistic(perm).abs() >= threshold {
            hits += 1;
        }
    };
    tally(&values);
    let mut i = 1;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                values.swap(0, i);
            } else {
                values.swap(counters[i], i);
            }
            tally(&values);
            counters[i] += 1;
            i = 1;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    hits as f64 / total as f64
}

/// Large-sample null: S is asymptotically normal with
/// var(S) = (n(n-1)(2n+5) - sum u(u-1)(2u+5)) / 18, the sum running over the
/// value tie groups (time indices are untied). A continuity correction of 1
/// is applied to |S|.
fn normal_two_sided_p(series: &[f64], s: i64) -> f64 {
    let n = series.len() as f64;
    let v0 = n * (n - 1.0) * (2.0 * n + 5.0);
    let vu: f64 = tie_group_sizes(series)
        .iter()
        .map(|&u| {
            let u = u as f64;
            u * (u - 1.0) * (2.0 * u + 5.0)
        })
        .sum();
    let var_s = (v0 - vu) / 18.0;
    if var_s <= 0.0 {
        return 1.0;
    }
    let z = ((s.abs() as f64) - 1.0).max(0.0) / var_s.sqrt();
    (statrs::function::erf::erfc(z / std::f64::consts::SQRT_2)).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rejects_short_series() {
        assert!(matches!(
            kendall_tau(&[1.0, 2.0]),
            Err(AnalyticsError::InsufficientData(_))
        ));
        assert!(matches!(
            kendall_tau(&[]),
            Err(AnalyticsError::InsufficientData(_))
        ));
    }

    #[test]
    fn rejects_non_finite_values() {
        assert!(matches!(
            kendall_tau(&[1.0, f64::NAN, 2.0]),
            Err(AnalyticsError::InvalidParameter(_))
        ));
    }

    #[test]
    fn constant_series_has_no_trend() {
        let (tau, p) = kendall_tau(&[4.0; 6]).unwrap();
        assert_eq!(tau, 0.0);
        assert_eq!(p, 1.0);
    }

    #[test]
    fn strictly_increasing_series_is_perfectly_concordant() {
        let series: Vec<f64> = (0..6).map(f64::from).collect();
        let (tau, p) = kendall_tau(&series).unwrap();
        assert_abs_diff_eq!(tau, 1.0, epsilon = 1e-12);
        // Only the two monotone orderings of six distinct values reach |S| = 15.
        assert_abs_diff_eq!(p, 2.0 / 720.0, epsilon = 1e-12);
    }

    #[test]
    fn single_swap_tau_known_value() {
        // [1,3,2,4]: 5 concordant, 1 discordant pairs, no ties.
        let (tau, p) = kendall_tau(&[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert_abs_diff_eq!(tau, 4.0 / 6.0, epsilon = 1e-12);
        // |S| = 4 means at most one (or at least five) inversions: 8 of the
        // 24 orderings.
        assert_abs_diff_eq!(p, 8.0 / 24.0, epsilon = 1e-12);
    }

    #[test]
    fn tied_values_shrink_the_denominator() {
        // [1,1,2]: S = 2, n0 = 3, n2 = 1, tau = 2/sqrt(3*2).
        let (tau, _) = kendall_tau(&[1.0, 1.0, 2.0]).unwrap();
        assert_abs_diff_eq!(tau, 2.0 / 6.0f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn ten_quarter_decline_normal_approximation() {
        // Strictly decreasing, n = 10: S = -45, var_S = 10*9*25/18 = 125,
        // z = 44/sqrt(125), p = erfc(z/sqrt(2)) ~ 8.29e-5.
        let series: Vec<f64> = (0..10).rev().map(f64::from).collect();
        let (tau, p) = kendall_tau(&series).unwrap();
        assert_abs_diff_eq!(tau, -1.0, epsilon = 1e-12);
        let z: f64 = 44.0 / 125.0f64.sqrt();
        let expected = statrs::function::erf::erfc(z / std::f64::consts::SQRT_2);
        assert_abs_diff_eq!(p, expected, epsilon = 1e-15);
        assert!(p < 1e-4, "p = {p}");
    }

    #[test]
    fn normal_branch_applies_tie_correction() {
        // Nine distinct values plus one tie pair: vu = 2*1*9 = 18.
        let series = [0.0, 1.0, 2.0, 3.0, 4.0, 4.0, 5.0, 6.0, 7.0, 8.0];
        let (_, p) = kendall_tau(&series).unwrap();
        let var_s: f64 = (10.0 * 9.0 * 25.0 - 18.0) / 18.0;
        let s = pair_statistic(&series).abs() as f64;
        let expected =
            statrs::function::erf::erfc(((s - 1.0) / var_s.sqrt()) / std::f64::consts::SQRT_2);
        assert_abs_diff_eq!(p, expected, epsilon = 1e-15);
    }

    #[test]
    fn exact_branch_counts_duplicate_arrangements() {
        // [0,0,1]: S = 2. Arrangements and their S: (0,0,1) -> 2,
        // (0,1,0) -> 0, (1,0,0) -> -2, each appearing twice among 3! = 6.
        let (_, p) = kendall_tau(&[0.0, 0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(p, 4.0 / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn tau_is_antisymmetric_under_reversal() {
        let series = [2.0, 5.0, 3.0, 7.0, 1.0, 8.0, 4.0];
        let reversed: Vec<f64> = series.iter().rev().copied().collect();
        let (tau_fwd, p_fwd) = kendall_tau(&series).unwrap();
        let (tau_rev, p_rev) = kendall_tau(&reversed).unwrap();
        assert_abs_diff_eq!(tau_fwd, -tau_rev, epsilon = 1e-12);
        assert_abs_diff_eq!(p_fwd, p_rev, epsilon = 1e-12);
    }
}
