//! Least-squares fits with the intercept pinned by theory.

use crate::error::{Error, Result};

/// Points whose `|x|` lies within a factor of ten of the smallest non-zero
/// `|x|` (zeros are kept: they carry no information but do no harm).
pub fn smallest_decade(xs: &[f64]) -> Vec<usize> {
    let smallest = xs
        .iter()
        .map(|x| x.abs())
        .filter(|&x| x > 0.0)
        .fold(f64::INFINITY, f64::min);
    (0..xs.len())
        .filter(|&i| xs[i].abs() <= 10.0 * smallest * (1.0 + 1e-12))
        .collect()
}

/// Slope of `y = s x` by ordinary least squares.
pub fn slope_through_origin(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::domain("fit needs equally many x and y values"));
    }
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    if !(sxx > 0.0) {
        return Err(Error::domain("fit needs at least one non-zero x"));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    Ok(sxy / sxx)
}

/// `(s1, s2)` of `y = s1 x + s2 x^2` by ordinary least squares.
pub fn quadratic_through_origin(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() {
        return Err(Error::domain("fit needs equally many x and y values"));
    }
    let (mut s2, mut s3, mut s4, mut sy1, mut sy2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        s2 += x * x;
        s3 += x * x * x;
        s4 += x * x * x * x;
        sy1 += x * y;
        sy2 += x * x * y;
    }
    let det = s2 * s4 - s3 * s3;
    if !(det.abs() > 1e-300) {
        return Err(Error::domain(
            "quadratic fit needs at least two distinct non-zero x",
        ));
    }
    Ok(((sy1 * s4 - sy2 * s3) / det, (s2 * sy2 - s3 * sy1) / det))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_line_and_parabola() {
        let xs = [0.1, 0.2, 0.4];
        let line: Vec<f64> = xs.iter().map(|x| 3.0 * x).collect();
        assert!((slope_through_origin(&xs, &line).unwrap() - 3.0).abs() < 1e-15);
        let parab: Vec<f64> = xs.iter().map(|x| 2.0 * x - 5.0 * x * x).collect();
        let (a, b) = quadratic_through_origin(&xs, &parab).unwrap();
        assert!((a - 2.0).abs() < 1e-12 && (b + 5.0).abs() < 1e-10);
    }

    #[test]
    fn decade_selection() {
        assert_eq!(
            smallest_decade(&[0.0025, 0.005, 0.01, 0.02, 0.05]),
            vec![0, 1, 2, 3]
        );
        assert_eq!(smallest_decade(&[-0.01, 0.0, 0.001, 0.1]), vec![0, 1, 2]);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(slope_through_origin(&[0.0], &[1.0]).is_err());
        assert!(quadratic_through_origin(&[1.0], &[1.0]).is_err());
        assert!(slope_through_origin(&[1.0, 2.0], &[1.0]).is_err());
    }
}
