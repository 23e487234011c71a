//! Univariate robust statistics and the two univariate depth kernels.
//!
//! Multivariate projection depth reduces to these through the projection
//! property: project the data on a direction, then measure how far the
//! projected query point sits from the median in MAD units. The symmetric
//! kernel uses the absolute deviation and plain MAD; the asymmetric one uses
//! the positive part of the deviation and the median of deviations of points
//! strictly above the median, so only the upper tail counts.

use crate::error::Error;
use crate::Result;

/// Median with the even-length convention: mean of the two middle order
/// statistics. Odd length returns the exact middle order statistic.
pub fn median(sample: &[f64]) -> Result<f64> {
    validate(sample)?;
    let mut buf = sample.to_vec();
    Ok(median_in_place(&mut buf))
}

/// Median absolute deviation from the median. 0 is a legal return; depth
/// callers handle that degeneracy explicitly.
pub fn mad(sample: &[f64]) -> Result<f64> {
    validate(sample)?;
    let mut buf = sample.to_vec();
    let med = median_in_place(&mut buf);
    for (slot, &x) in buf.iter_mut().zip(sample) {
        *slot = (x - med).abs();
    }
    Ok(median_in_place(&mut buf))
}

/// Median of the deviations of points strictly above the median; 0 when no
/// point exceeds the median.
pub fn mad_plus(sample: &[f64]) -> Result<f64> {
    validate(sample)?;
    let mut buf = sample.to_vec();
    let med = median_in_place(&mut buf);
    buf.clear();
    buf.extend(sample.iter().filter(|&&x| x > med).map(|&x| x - med));
    if buf.is_empty() {
        Ok(0.0)
    } else {
        Ok(median_in_place(&mut buf))
    }
}

/// Symmetric univariate projection depth, 1 / (|z - med|/MAD + 1).
pub fn depth1_pd(z: f64, sample: &[f64]) -> Result<f64> {
    validate(sample)?;
    validate_query(z)?;
    let mut buf = sample.to_vec();
    let med = median_in_place(&mut buf);
    for (slot, &x) in buf.iter_mut().zip(sample) {
        *slot = (x - med).abs();
    }
    let spread = median_in_place(&mut buf);
    Ok(depth_from_pd(z, med, spread))
}

/// Asymmetric univariate projection depth, 1 / ((z - med)+/MAD+ + 1).
/// Points at or below the median have depth 1: only positive departure from
/// the median counts as outlying.
pub fn depth1_apd(z: f64, sample: &[f64]) -> Result<f64> {
    validate(sample)?;
    validate_query(z)?;
    let mut buf = sample.to_vec();
    let med = median_in_place(&mut buf);
    buf.clear();
    buf.extend(sample.iter().filter(|&&x| x > med).map(|&x| x - med));
    let spread = if buf.is_empty() {
        0.0
    } else {
        median_in_place(&mut buf)
    };
    Ok(depth_from_apd(z, med, spread))
}

fn validate(sample: &[f64]) -> Result<()> {
    if sample.is_empty() {
        return Err(Error::invalid("empty sample"));
    }
    if let Some(i) = sample.iter().position(|x| !x.is_finite()) {
        return Err(Error::invalid(format!("sample entry {i} is not finite")));
    }
    Ok(())
}

fn validate_query(z: f64) -> Result<()> {
    if z.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("query point is not finite"))
    }
}

// In-place kernels below are the hot path of the direction search. They skip
// validation: the depth engine only feeds them projections of already
// validated finite data.

/// Selects the median, scrambling `buf`. Expected linear time.
pub(crate) fn median_in_place(buf: &mut [f64]) -> f64 {
    let n = buf.len();
    debug_assert!(n > 0);
    if n == 1 {
        return buf[0];
    }
    let mid = n / 2;
    let (lo, upper_mid, _) = buf.select_nth_unstable_by(mid, f64::total_cmp);
    if n % 2 == 1 {
        *upper_mid
    } else {
        // Lower middle order statistic is the largest element left of the
        // partition point.
        let lower_mid = lo.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        f64::midpoint(lower_mid, *upper_mid)
    }
}

/// (median, MAD) of `proj`, using `scratch` as workspace.
pub(crate) fn pd_stats(proj: &[f64], scratch: &mut Vec<f64>) -> (f64, f64) {
    scratch.clear();
    scratch.extend_from_slice(proj);
    let med = median_in_place(scratch);
    scratch.clear();
    scratch.extend(proj.iter().map(|&x| (x - med).abs()));
    let spread = median_in_place(scratch);
    (med, spread)
}

/// (median, MAD+) of `proj`, using `scratch` as workspace.
pub(crate) fn apd_stats(proj: &[f64], scratch: &mut Vec<f64>) -> (f64, f64) {
    scratch.clear();
    scratch.extend_from_slice(proj);
    let med = median_in_place(scratch);
    scratch.clear();
    scratch.extend(proj.iter().filter(|&&x| x > med).map(|&x| x - med));
    let spread = if scratch.is_empty() {
        0.0
    } else {
        median_in_place(scratch)
    };
    (med, spread)
}

/// Depth from precomputed symmetric stats. Zero spread collapses the sample
/// to its median: depth is 1 exactly on it and 0 anywhere else (the limit of
/// the formula as spread shrinks).
#[inline]
pub(crate) fn depth_from_pd(z: f64, med: f64, spread: f64) -> f64 {
    let num = (z - med).abs();
    if spread == 0.0 {
        if num == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 / (num / spread + 1.0)
    }
}

/// Depth from precomputed asymmetric stats; same degeneracy rule with the
/// positive part as numerator.
#[inline]
pub(crate) fn depth_from_apd(z: f64, med: f64, spread: f64) -> f64 {
    let num = (z - med).max(0.0);
    if spread == 0.0 {
        if num == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 / (num / spread + 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_middle_order_statistics() {
        assert_eq!(median(&[2.0, 1.0, 3.0]).unwrap(), 2.0);
        assert_eq!(median(&[1.0, 2.0, 3.0, 4.0]).unwrap(), 2.5);
        assert_eq!(median(&[5.0]).unwrap(), 5.0);
    }

    #[test]
    fn median_rejects_empty_and_non_finite() {
        assert!(median(&[]).is_err());
        assert!(median(&[1.0, f64::NAN]).is_err());
        assert!(depth1_pd(f64::INFINITY, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn mad_hand_enumerations() {
        assert_eq!(mad(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap(), 1.0);
        assert_eq!(mad(&[7.0, 7.0, 7.0]).unwrap(), 0.0);
        assert_eq!(mad(&[0.0, 0.0, 10.0]).unwrap(), 0.0);
    }

    #[test]
    fn mad_plus_counts_only_points_above_median() {
        assert_eq!(mad_plus(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap(), 1.5);
        assert_eq!(mad_plus(&[7.0, 7.0, 7.0]).unwrap(), 0.0);
        assert_eq!(mad_plus(&[0.0, 10.0]).unwrap(), 5.0);
    }

    #[test]
    fn depth_pd_closed_form_points() {
        let s = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(depth1_pd(3.0, &s).unwrap(), 1.0);
        assert_eq!(depth1_pd(4.0, &s).unwrap(), 0.5);
        assert_eq!(depth1_pd(5.0, &s).unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn depth_apd_upper_tail_only() {
        let s = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(depth1_apd(2.0, &s).unwrap(), 1.0);
        assert_eq!(depth1_apd(3.0, &s).unwrap(), 1.0);
        assert_eq!(depth1_apd(6.0, &s).unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn zero_spread_degeneracy_is_total() {
        let s = [1.0, 1.0, 1.0];
        assert_eq!(depth1_pd(1.0, &s).unwrap(), 1.0);
        assert_eq!(depth1_pd(2.0, &s).unwrap(), 0.0);
        assert_eq!(depth1_apd(1.0, &s).unwrap(), 1.0);
        assert_eq!(depth1_apd(2.0, &s).unwrap(), 0.0);
        // Below-median query against a sample whose upper tail is empty.
        assert_eq!(depth1_apd(0.0, &[5.0, 5.0]).unwrap(), 1.0);
    }

    #[test]
    fn even_length_spread_uses_middle_pair() {
        // med([0,10]) = 5, deviations {5,5}, MAD 5.
        assert_eq!(mad(&[0.0, 10.0]).unwrap(), 5.0);
        // Four points: med 2.5, |devs| {1.5, 0.5, 0.5, 1.5}, MAD 1.0.
        assert_eq!(mad(&[1.0, 2.0, 3.0, 4.0]).unwrap(), 1.0);
    }
}
