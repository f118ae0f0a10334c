//! Low-temperature asymptotics of the mean spacing.
//!
//! The substitution `V(a + chi(z)) = V(a) + z^2` turns both Gibbs integrals
//! into Gaussian moments of `chi'(z)` and `(a + chi(z)) chi'(z)`. The series
//! of `chi` is obtained by reverting the Taylor series of `V` about its
//! minimum, matching powers of `z` one order at a time.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::potentials::{Potential, TaylorData};

/// Below this value of `beta c2 a^2` the two-term expansion is flagged as
/// unreliable.
pub const RELIABLE_BETA_C2_A2: f64 = 50.0;

/// Coefficients `f_1, f_2, ...` of `chi(z) = f_1 z + f_2 z^2 + ...`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSeries {
    f: Vec<f64>,
}

/// Product of two power series truncated after degree `max_degree`.
fn mul_truncated(x: &[f64], y: &[f64], max_degree: usize) -> Vec<f64> {
    let mut out = vec![0.0; max_degree + 1];
    for (i, xi) in x.iter().enumerate().take(max_degree + 1) {
        if *xi == 0.0 {
            continue;
        }
        for (j, yj) in y.iter().enumerate().take(max_degree + 1 - i) {
            out[i + j] += xi * yj;
        }
    }
    out
}

/// Coefficient of `z^degree` in `sum_k c[k-2] chi(z)^k`, where `chi` is
/// given by its coefficients indexed by degree (`chi[0] = 0`).
fn composed_coefficient(c: &[f64], chi: &[f64], degree: usize) -> f64 {
    let mut power = mul_truncated(chi, chi, degree);
    let mut total = 0.0;
    for ck in c {
        total += ck * power.get(degree).copied().unwrap_or(0.0);
        power = mul_truncated(&power, chi, degree);
    }
    total
}

impl ChiSeries {
    /// Reverts `sum_k c[k-2] y^k = z^2` to `order` terms by matching
    /// coefficients of `z^2, z^3, ..., z^(order+1)`.
    ///
    /// Coefficients beyond the end of `c` are taken as zero.
    pub fn revert(c: &[f64], order: usize) -> Result<Self> {
        let c2 = *c.first().ok_or_else(|| Error::domain("series needs c2"))?;
        if !(c2 > 0.0) {
            return Err(Error::domain(format!("c2 must be positive, got {c2}")));
        }
        if order == 0 {
            return Err(Error::domain("reversion order must be at least 1"));
        }
        let f1 = c2.powf(-0.5);
        // chi indexed by degree, chi[0] = 0
        let mut chi = vec![0.0; order + 1];
        chi[1] = f1;
        for n in 2..=order {
            // f_n enters the z^(n+1) coefficient only through 2 c2 f1 f_n
            let residual = composed_coefficient(c, &chi, n + 1);
            chi[n] = -residual / (2.0 * c2 * f1);
        }
        Ok(ChiSeries {
            f: chi[1..].to_vec(),
        })
    }

    pub fn order(&self) -> usize {
        self.f.len()
    }

    /// `f_k` for `k >= 1`; zero beyond the computed order.
    pub fn coefficient(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.f.get(k - 1).copied().unwrap_or(0.0)
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.f
    }

    /// `chi(z)`.
    pub fn evaluate(&self, z: f64) -> f64 {
        self.f.iter().rev().fold(0.0, |acc, fk| (acc + fk) * z)
    }

    /// Coefficients of `chi'(z)`, indexed by degree.
    fn derivative_coefficients(&self) -> Vec<f64> {
        self.f
            .iter()
            .enumerate()
            .map(|(i, fk)| (i + 1) as f64 * fk)
            .collect()
    }
}

/// The closed forms for `f_1, f_2, f_3` obtained by matching `z^2, z^3, z^4`.
///
/// `f_3 = -(c2 f2^2 + 3 c3 f1^2 f2 + c4 f1^4) / (2 c2 f1)`.
pub fn closed_form_chi(t: &TaylorData) -> [f64; 3] {
    let TaylorData { c2, c3, c4, .. } = *t;
    let f1 = c2.powf(-0.5);
    let f2 = -c3 / (2.0 * c2 * c2);
    let f3 = -(c2 * f2 * f2 + 3.0 * c3 * f1 * f1 * f2 + c4 * f1.powi(4)) / (2.0 * c2 * f1);
    [f1, f2, f3]
}

/// Reverts `V(a + chi) = V(a) + z^2` for the Taylor data of a potential.
pub fn invert_series(t: &TaylorData, order: usize) -> Result<ChiSeries> {
    if order < 3 {
        return Err(Error::domain(format!(
            "reversion order must be at least 3, got {order}"
        )));
    }
    ChiSeries::revert(&t.coefficients(), order)
}

/// Two-term Laplace coefficients of the Gibbs integrals.
///
/// Denominator `~ sqrt(pi/beta) e^{-beta V(a)} (b0 + b2 / (2 beta))`,
/// numerator `~ sqrt(pi/beta) e^{-beta V(a)} (d0 + d2 / (2 beta))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaplaceExpansion {
    pub a: f64,
    pub b0: f64,
    pub b2: f64,
    pub d0: f64,
    pub d2: f64,
    pub m1: f64,
}

impl LaplaceExpansion {
    /// `(d0 + d2/(2 beta)) / (b0 + b2/(2 beta))`.
    pub fn mean(&self, beta: f64) -> f64 {
        (self.d0 + self.d2 / (2.0 * beta)) / (self.b0 + self.b2 / (2.0 * beta))
    }
}

/// `b_k` from `chi'(z) = sum b_k z^k` and `d_k` from
/// `(a + chi(z)) chi'(z) = sum d_k z^k`, then
/// `m1 = d2/(2 b0) - d0 b2/(2 b0^2)`.
pub fn laplace_coefficients(a: f64, chi: &ChiSeries) -> Result<LaplaceExpansion> {
    if chi.order() < 3 {
        return Err(Error::domain(
            "Laplace coefficients need chi to third order",
        ));
    }
    if !(chi.coefficient(1) > 0.0) {
        return Err(Error::domain("chi'(0) must be positive"));
    }
    let b = chi.derivative_coefficients();
    let mut shifted = vec![a];
    shifted.extend_from_slice(chi.coefficients());
    let d = mul_truncated(&shifted, &b, 2);
    let (b0, b2) = (b[0], b[2]);
    let (d0, d2) = (d[0], d[2]);
    let m1 = d2 / (2.0 * b0) - d0 * b2 / (2.0 * b0 * b0);
    Ok(LaplaceExpansion {
        a,
        b0,
        b2,
        d0,
        d2,
        m1,
    })
}

/// `m1 = -3 c3 / (4 c2^2)`.
pub fn thermal_expansion_coefficient(c2: f64, c3: f64) -> Result<f64> {
    if !(c2 > 0.0) {
        return Err(Error::domain(format!("c2 must be positive, got {c2}")));
    }
    Ok(-3.0 * c3 / (4.0 * c2 * c2))
}

/// First-order low-temperature mean spacing `a + m1 T`.
pub fn low_temperature_mean(t: &TaylorData, temperature: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(Error::domain(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    Ok(t.a + thermal_expansion_coefficient(t.c2, t.c3)? * temperature)
}

/// Two-term Laplace approximations of the Gibbs integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticIntegrals {
    /// `int u exp(-beta V) du`, approximated.
    pub numerator: f64,
    /// `int exp(-beta V) du`, approximated.
    pub denominator: f64,
    /// Their ratio, computed without the common `exp(-beta V(a))` factor.
    pub ratio: f64,
    pub beta_c2_a2: f64,
    /// `beta c2 a^2 >= 50`.
    pub reliable: bool,
}

pub fn asymptotic_gibbs_integrals(p: &Potential, beta: f64) -> Result<AsymptoticIntegrals> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::domain(format!(
            "beta must be positive and finite, got {beta}"
        )));
    }
    let t = p.taylor_coefficients()?;
    let expansion = laplace_coefficients(t.a, &invert_series(&t, 3)?)?;
    let prefactor = (PI / beta).sqrt() * (-beta * t.v_min).exp();
    let den = expansion.b0 + expansion.b2 / (2.0 * beta);
    let num = expansion.d0 + expansion.d2 / (2.0 * beta);
    let beta_c2_a2 = beta * t.c2 * t.a * t.a;
    Ok(AsymptoticIntegrals {
        numerator: prefactor * num,
        denominator: prefactor * den,
        ratio: num / den,
        beta_c2_a2,
        reliable: beta_c2_a2 >= RELIABLE_BETA_C2_A2,
    })
}
