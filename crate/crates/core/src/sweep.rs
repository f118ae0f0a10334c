//! Temperature and force sweeps with theory-pinned slope fits.

use rayon::prelude::*;
use serde::Serialize;

use crate::ensemble::{Ensemble, EnsembleParams};
use crate::error::{Error, Result};
use crate::fit;
use crate::laplace;
use crate::potentials::Potential;
use crate::quadrature::QuadOptions;

fn check_grid(grid: &[f64], name: &str) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::domain(format!("{name} grid is empty")));
    }
    if grid.iter().any(|x| !x.is_finite()) || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::domain(format!(
            "{name} grid must be finite and strictly increasing"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TemperatureRow {
    pub temperature: f64,
    pub m_quadrature: f64,
    pub m_laplace: f64,
    pub residual: f64,
}

/// `m(T)` by quadrature next to the first-order prediction `a + m1 T`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TemperatureSweep {
    pub rows: Vec<TemperatureRow>,
    pub a: f64,
    pub m1: f64,
    /// Grid indices used by the fits (smallest decade of `T`).
    pub fit_points: Vec<usize>,
    /// OLS slope of `m - a` against `T` with the intercept pinned at `a`.
    pub slope: f64,
    /// `(s1, s2)` of `m - a = s1 T + s2 T^2`, assuming the remainder after
    /// the linear term is `O(T^2)`. `None` with fewer than two fit points.
    pub slope_quadratic: Option<(f64, f64)>,
}

pub fn temperature_sweep(
    p: &Potential,
    temperatures: &[f64],
    opts: &QuadOptions,
) -> Result<TemperatureSweep> {
    check_grid(temperatures, "temperature")?;
    if temperatures[0] <= 0.0 {
        return Err(Error::domain("temperatures must be positive"));
    }
    let taylor = p.taylor_coefficients()?;
    let m1 = laplace::thermal_expansion_coefficient(taylor.c2, taylor.c3)?;
    let rows = temperatures
        .par_iter()
        .map(|&t| {
            let e = EnsembleParams::from_temperature(t, 0.0)?;
            let m_quadrature = Ensemble::with_options(p, e, *opts)?.mean()?;
            let m_laplace = laplace::low_temperature_mean(&taylor, t)?;
            Ok(TemperatureRow {
                temperature: t,
                m_quadrature,
                m_laplace,
                residual: m_quadrature - m_laplace,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fit_points = fit::smallest_decade(temperatures);
    let xs: Vec<f64> = fit_points.iter().map(|&i| rows[i].temperature).collect();
    let ys: Vec<f64> = fit_points
        .iter()
        .map(|&i| rows[i].m_quadrature - taylor.a)
        .collect();
    let slope = fit::slope_through_origin(&xs, &ys)?;
    let slope_quadratic = fit::quadratic_through_origin(&xs, &ys).ok();
    Ok(TemperatureSweep {
        rows,
        a: taylor.a,
        m1,
        fit_points,
        slope,
        slope_quadratic,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForceRow {
    pub force: f64,
    pub mean: f64,
    pub elastic_expansion: f64,
    pub linear_response: f64,
}

/// `m(T, F)` over a force grid next to the linear response `R F`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForceSweep {
    pub temperature: f64,
    pub rows: Vec<ForceRow>,
    pub modulus: f64,
    pub fit_points: Vec<usize>,
    /// OLS slope of the elastic expansion against `F`, intercept pinned at 0.
    pub slope: f64,
}

pub fn force_sweep(
    p: &Potential,
    temperature: f64,
    forces: &[f64],
    opts: &QuadOptions,
) -> Result<ForceSweep> {
    check_grid(forces, "force")?;
    let e0 = EnsembleParams::from_temperature(temperature, 0.0)?;
    let ens0 = Ensemble::with_options(p, e0, *opts)?;
    let m0 = ens0.mean()?;
    let modulus = e0.beta * ens0.variance()?;
    let rows = forces
        .par_iter()
        .map(|&f| {
            let (mean, expansion) = if f == 0.0 {
                (m0, 0.0)
            } else {
                let e = EnsembleParams::from_temperature(temperature, f)?;
                let m = Ensemble::with_options(p, e, *opts)?.mean()?;
                (m, m - m0)
            };
            Ok(ForceRow {
                force: f,
                mean,
                elastic_expansion: expansion,
                linear_response: modulus * f,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fit_points: Vec<usize> = fit::smallest_decade(forces);
    let xs: Vec<f64> = fit_points.iter().map(|&i| rows[i].force).collect();
    let ys: Vec<f64> = fit_points
        .iter()
        .map(|&i| rows[i].elastic_expansion)
        .collect();
    let slope = fit::slope_through_origin(&xs, &ys)?;
    Ok(ForceSweep {
        temperature,
        rows,
        modulus,
        fit_points,
        slope,
    })
}
