/// A cusp must exceed this multiple of the median kink strength.
pub const CUSP_MEDIAN_FACTOR: f64 = 5.0;

/// Absolute floor on the kink strength, so flat series have no cusps.
pub const CUSP_FLOOR: f64 = 1e-10;

/// Kink strength at each interior sample: the second difference minus the
/// mean of its two neighbours. A slope discontinuity at sample `j` puts an
/// isolated spike into the second difference at `j`; smooth curvature, which
/// varies linearly over three samples, cancels.
fn kink_strength(series: &[f64]) -> Vec<f64> {
    let n = series.len();
    let mut s = vec![0.0; n];
    if n < 5 {
        return s;
    }
    let d2: Vec<f64> = series.windows(3).map(|w| w[2] - 2.0 * w[1] + w[0]).collect();
    // d2[i] belongs to sample i + 1.
    for i in 1..d2.len() - 1 {
        s[i + 1] = (d2[i] - 0.5 * (d2[i - 1] + d2[i + 1])).abs();
    }
    s
}

/// Indices of cusps in a uniformly sampled series.
///
/// A cusp is a local maximum of the kink strength above
/// `max(CUSP_MEDIAN_FACTOR · median, CUSP_FLOOR)`, the median taken over
/// the samples where the strength is defined. The first and last of those
/// samples only serve as neighbours.
pub fn detect_cusps(series: &[f64]) -> Vec<usize> {
    let s = kink_strength(series);
    let n = s.len();
    if n < 5 {
        return Vec::new();
    }
    let mut sorted = s[2..n - 2].to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let threshold = (CUSP_MEDIAN_FACTOR * median).max(CUSP_FLOOR);
    // Both neighbours of a candidate must carry a defined strength.
    (3..n - 3)
        .filter(|&j| s[j] > threshold && s[j] >= s[j - 1] && s[j] > s[j + 1])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_and_smooth_series_have_no_cusps() {
        assert!(detect_cusps(&[0.0; 100]).is_empty());
        let line: Vec<f64> = (0..100).map(|j| 0.3 * j as f64).collect();
        assert!(detect_cusps(&line).is_empty());
        let wave: Vec<f64> = (0..400).map(|j| (0.01 * j as f64).sin() * 3.0).collect();
        assert!(detect_cusps(&wave).is_empty());
    }

    #[test]
    fn finds_kinks() {
        let f: Vec<f64> = (0..400)
            .map(|j| {
                let t = j as f64 * 0.01;
                (t - 1.0).abs() + 0.5 * (t - 2.5).abs() + 0.1 * t.sin()
            })
            .collect();
        assert_eq!(detect_cusps(&f), vec![100, 250]);
    }

    #[test]
    fn weak_kink_on_strong_curvature() {
        let f: Vec<f64> = (0..500)
            .map(|j| {
                let t = j as f64 * 0.01;
                4.0 * t * t + 0.02 * (t - 3.0).abs()
            })
            .collect();
        assert_eq!(detect_cusps(&f), vec![300]);
    }

    #[test]
    fn no_cusps_at_the_ends_of_smooth_series() {
        let rising: Vec<f64> = (0..300).map(|j| (j as f64 * 0.01).powi(6)).collect();
        assert!(detect_cusps(&rising).is_empty());
        let falling: Vec<f64> = (0..300).map(|j| (-(j as f64) * 0.02).exp()).collect();
        assert!(detect_cusps(&falling).is_empty());
    }

    #[test]
    fn short_series() {
        assert!(detect_cusps(&[]).is_empty());
        assert!(detect_cusps(&[1.0, 0.0, 1.0]).is_empty());
    }
}
