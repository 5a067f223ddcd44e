//! Locally weighted scatterplot smoothing with tricube weights and a local
//! fit of degree 0 (weighted mean) or 1 (weighted line), evaluated at every
//! input point.

use super::AnalyticsError;

/// Smooths `points` and returns `(x, fitted_y)` pairs in input order.
///
/// For each point the window is the `ceil(span * n)` nearest neighbours by
/// |x - x_i| (nearer index wins distance ties). Weights are tricube in the
/// scaled distance, so boundary neighbours at the maximum distance weigh
/// zero. A window whose maximum distance is zero degenerates to the plain
/// mean of its values, and a singular degree-1 system falls back to the
/// weighted mean.
pub fn loess_smooth(
    points: &[(f64, f64)],
    span: f64,
    degree: u8,
) -> Result<Vec<(f64, f64)>, AnalyticsError> {
    if points.len() < 2 {
        return Err(AnalyticsError::InsufficientData(format!(
            "loess needs at least 2 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(AnalyticsError::InvalidParameter(
            "loess requires finite coordinates".into(),
        ));
    }
    if points.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(AnalyticsError::InvalidParameter(
            "loess requires strictly increasing x values".into(),
        ));
    }
    if !(span > 0.0 && span <= 1.0) {
        return Err(AnalyticsError::InvalidParameter(format!(
            "loess span must be in (0, 1], got {span}"
        )));
    }
    if degree > 1 {
        return Err(AnalyticsError::InvalidParameter(format!(
            "loess degree must be 0 or 1, got {degree}"
        )));
    }
    let n = points.len();
    if span * (n as f64) < f64::from(degree) + 1.0 {
        return Err(AnalyticsError::InvalidParameter(format!(
            "loess span {span} over {n} points leaves fewer than {} observations per window",
            degree + 1
        )));
    }

    let q = ((span * n as f64).ceil() as usize).min(n);
    let mut fitted = Vec::with_capacity(n);
    let mut by_distance: Vec<(f64, usize)> = Vec::with_capacity(n);

    for &(x0, _) in points {
        by_distance.clear();
        by_distance.extend(
            points
                .iter()
                .enumerate()
                .map(|(j, &(x, _))| ((x - x0).abs(), j)),
        );
        by_distance.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let window = &by_distance[..q];
        let d_max = window[q - 1].0;

        if d_max == 0.0 {
            let mean = window.iter().map(|&(_, j)| points[j].1).sum::<f64>() / q as f64;
            fitted.push((x0, mean));
            continue;
        }

        let mut sw = 0.0;
        let mut swy = 0.0;
        let mut swu = 0.0;
        let mut swu2 = 0.0;
        let mut swuy = 0.0;
        for &(d, j) in window {
            let w = tricube(d / d_max);
            let (x, y) = points[j];
            let u = x - x0;
            sw += w;
            swy += w * y;
            swu += w * u;
            swu2 += w * u * u;
            swuy += w * u * y;
        }

        let value = if degree == 0 {
            swy / sw
        } else {
            // Weighted normal equations centred at x0; the intercept is the
            // fit at x0.
            let det = sw * swu2 - swu * swu;
            if det.abs() <= f64::EPSILON * sw * swu2 {
                swy / sw
            } else {
                (swu2 * swy - swu * swuy) / det
            }
        };
        fitted.push((x0, value));
    }
    Ok(fitted)
}

fn tricube(t: f64) -> f64 {
    let c = 1.0 - t.powi(3);
    if c <= 0.0 { 0.0 } else { c.powi(3) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn line(n: usize, slope: f64, intercept: f64) -> Vec<(f64, f64)> {
        (0..n)
            .map(|i| (i as f64, slope * i as f64 + intercept))
            .collect()
    }

    #[test]
    fn rejects_bad_inputs() {
        let pts = line(10, 1.0, 0.0);
        assert!(matches!(
            loess_smooth(&pts[..1], 0.5, 1),
            Err(AnalyticsError::InsufficientData(_))
        ));
        assert!(matches!(
            loess_smooth(&pts, 0.0, 1),
            Err(AnalyticsError::InvalidParameter(_))
        ));
        assert!(matches!(
            loess_smooth(&pts, 1.1, 1),
            Err(AnalyticsError::InvalidParameter(_))
        ));
        assert!(matches!(
            loess_smooth(&pts, 0.5, 2),
            Err(AnalyticsError::InvalidParameter(_))
        ));
        // span * n = 1.5 < degree + 1 = 2.
        assert!(matches!(
            loess_smooth(&pts[..3], 0.5, 1),
            Err(AnalyticsError::InvalidParameter(_))
        ));
        let unsorted = [(0.0, 1.0), (0.0, 2.0), (1.0, 3.0)];
        assert!(matches!(
            loess_smooth(&unsorted, 1.0, 0),
            Err(AnalyticsError::InvalidParameter(_))
        ));
        let non_finite = [(0.0, 1.0), (1.0, f64::NAN), (2.0, 3.0)];
        assert!(matches!(
            loess_smooth(&non_finite, 1.0, 0),
            Err(AnalyticsError::InvalidParameter(_))
        ));
    }

    #[test]
    fn degree_one_reproduces_lines_exactly() {
        let pts = line(15, -3.5, 11.0);
        for span in [0.2, 0.5, 0.8, 1.0] {
            let out = loess_smooth(&pts, span, 1).unwrap();
            for (&(x, y), &(ox, oy)) in pts.iter().zip(&out) {
                assert_eq!(x, ox);
                assert_abs_diff_eq!(y, oy, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn degree_zero_reproduces_constants_exactly() {
        let pts: Vec<(f64, f64)> = (0..9).map(|i| (i as f64, 4.25)).collect();
        for span in [0.3, 1.0] {
            let out = loess_smooth(&pts, span, 0).unwrap();
            for &(_, y) in &out {
                assert_abs_diff_eq!(y, 4.25, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn full_span_degree_zero_weights_centre_most() {
        // A single spike: the smoothed curve must peak at the spike and decay
        // away from it, since tricube weight falls with distance.
        let mut pts = line(11, 0.0, 0.0);
        pts[5].1 = 10.0;
        let out = loess_smooth(&pts, 1.0, 0).unwrap();
        assert!(out[5].1 > out[4].1 && out[5].1 > out[6].1);
        assert!(out[4].1 > out[2].1);
        assert!(out[0].1 < out[3].1);
        for &(_, y) in &out {
            assert!(y >= 0.0 && y <= 10.0);
        }
    }

    #[test]
    fn smoothing_reduces_noise_variance() {
        // Deterministic pseudo-noise around a line.
        let pts: Vec<(f64, f64)> = (0u64..40)
            .map(|i| {
                let x = i as f64;
                let noise = ((i * 2654435761 % 97) as f64 / 97.0 - 0.5) * 2.0;
                (x, 0.5 * x + noise)
            })
            .collect();
        let out = loess_smooth(&pts, 0.5, 1).unwrap();
        let resid =
            |data: &[(f64, f64)]| -> f64 { data.iter().map(|&(x, y)| (y - 0.5 * x).powi(2)).sum() };
        assert!(resid(&out) < resid(&pts) * 0.5);
    }

    #[test]
    fn two_point_window_falls_back_to_weighted_mean() {
        // q = 2: the non-centre neighbour sits at d_max and weighs zero, so
        // the degree-1 system is singular and the fit returns the centre y.
        let pts = vec![(0.0, 1.0), (1.0, 5.0), (2.0, 2.0), (3.0, 8.0)];
        let out = loess_smooth(&pts, 0.5, 1).unwrap();
        for (&(x, y), &(ox, oy)) in pts.iter().zip(&out) {
            assert_eq!(x, ox);
            assert_abs_diff_eq!(y, oy, epsilon = 1e-12);
        }
    }

    #[test]
    fn output_preserves_x_and_length() {
        let pts = line(25, 2.0, -1.0);
        let out = loess_smooth(&pts, 0.4, 0).unwrap();
        assert_eq!(out.len(), pts.len());
        for (&(x, _), &(ox, _)) in pts.iter().zip(&out) {
            assert_eq!(x, ox);
        }
    }
}
