//! Gibbs expectations of a single spacing.
//!
//! Nearest-neighbour interactions make the spacings `u_i = x_i - x_{i-1}`
//! independent and identically distributed with density proportional to
//! `exp(-beta (V(u) - F u))` on `(0, wall]`. Every quantity here is a ratio
//! of one-dimensional integrals against that weight.
//!
//! The weight is evaluated as `exp(-beta (W(u) - W*))`, with `W = V - F u`
//! and `W*` its minimum, so nothing underflows at large `beta`. The shift
//! cancels in every ratio.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::potentials::Potential;
use crate::quadrature::{self, QuadOptions, QuadResult};
use crate::roots;

/// `beta * (W - W*)` beyond which the weight is below `1e-16` of its peak.
const SUPPORT_EXPONENT: f64 = 36.841_361_487_904_734; // ln(1e16)

/// Inverse temperature and external pulling force.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleParams {
    pub beta: f64,
    pub force: f64,
}

impl EnsembleParams {
    pub fn new(beta: f64, force: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::domain(format!(
                "beta must be positive and finite, got {beta}"
            )));
        }
        if !force.is_finite() {
            return Err(Error::domain(format!("force must be finite, got {force}")));
        }
        Ok(EnsembleParams { beta, force })
    }

    pub fn from_temperature(temperature: f64, force: f64) -> Result<Self> {
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(Error::domain(format!(
                "temperature must be positive and finite, got {temperature}"
            )));
        }
        EnsembleParams::new(1.0 / temperature, force)
    }

    pub fn temperature(&self) -> f64 {
        1.0 / self.beta
    }
}

/// Spacing distribution of one potential at fixed `(beta, F)`.
///
/// Construction locates the effective minimum and the numerically relevant
/// support once; all expectations then share the same panel layout.
#[derive(Debug, Clone)]
pub struct Ensemble<'p> {
    potential: &'p Potential,
    params: EnsembleParams,
    opts: QuadOptions,
    u_star: f64,
    w_star: f64,
    support: (f64, f64),
    breakpoints: Vec<f64>,
}

impl<'p> Ensemble<'p> {
    pub fn new(potential: &'p Potential, params: EnsembleParams) -> Result<Self> {
        Ensemble::with_options(potential, params, QuadOptions::default())
    }

    pub fn with_options(
        potential: &'p Potential,
        params: EnsembleParams,
        opts: QuadOptions,
    ) -> Result<Self> {
        let EnsembleParams { beta, force } = params;
        let wall = potential.wall();
        let w = |u: f64| potential.energy(u) - force * u;
        let dw = |u: f64| potential.nth_derivative(u, 1) - force;
        let d2w = |u: f64| potential.nth_derivative(u, 2);

        // interior local minima of W, keep the deepest
        let grid: Vec<f64> = potential.grid().collect();
        let mut best: Option<(f64, f64)> = None;
        let mut breakpoints = vec![0.0, wall];
        for pair in grid.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            if dw(lo) < 0.0 && dw(hi) >= 0.0 {
                let u = roots::safeguarded_newton(dw, d2w, lo, hi, 1e-15 * hi)?;
                let wu = w(u);
                breakpoints.push(u);
                if best.is_none_or(|(_, wb)| wu < wb) {
                    best = Some((u, wu));
                }
            }
        }
        let (u_star, w_star) = best.ok_or_else(|| {
            Error::domain(format!(
                "force {force} leaves no interior minimum of V(u) - F u: the chain is pushed against the boundary"
            ))
        })?;
        // boundaries: the hard core only matters if W stays finite towards 0
        let w_wall = w(wall);
        let w_core = w(grid[0]);
        if w_wall <= w_star || w_core <= w_star {
            return Err(Error::domain(format!(
                "force {force} moves the minimum of V(u) - F u onto the domain boundary \
                 (W* = {w_star}, W(wall) = {w_wall}); linear response no longer applies"
            )));
        }

        let curvature = d2w(u_star).max(f64::MIN_POSITIVE);
        let width = (1.0 / (beta * curvature)).sqrt();
        let over = |u: f64| beta * (w(u) - w_star) - SUPPORT_EXPONENT;
        let mut support = (0.0, wall);
        // left edge of the support
        let mut step = width;
        let mut inner = u_star;
        loop {
            let u = u_star - step;
            if u <= 0.0 {
                break;
            }
            if over(u) >= 0.0 {
                support.0 = roots::bisect(over, u, inner, 1e-12 * u_star)?;
                breakpoints.push(support.0);
                break;
            }
            inner = u;
            step *= 2.0;
        }
        // right edge
        let mut step = width;
        let mut inner = u_star;
        loop {
            let u = u_star + step;
            if u >= wall {
                break;
            }
            if over(u) >= 0.0 {
                support.1 = roots::bisect(over, inner, u, 1e-12 * u_star)?;
                breakpoints.push(support.1);
                break;
            }
            inner = u;
            step *= 2.0;
        }
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();

        Ok(Ensemble {
            potential,
            params,
            opts,
            u_star,
            w_star,
            support,
            breakpoints,
        })
    }

    pub fn potential(&self) -> &'p Potential {
        self.potential
    }

    pub fn params(&self) -> EnsembleParams {
        self.params
    }

    pub fn options(&self) -> QuadOptions {
        self.opts
    }

    /// Minimum of the effective potential `V(u) - F u`.
    pub fn effective_minimum(&self) -> (f64, f64) {
        (self.u_star, self.w_star)
    }

    /// Interval outside of which the weight stays below `1e-16` of its peak
    /// (up to the domain boundaries, where it may be cut off earlier).
    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// Panel boundaries: `0`, support edges, effective minima, `wall`.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Unnormalized weight `exp(-beta (W(u) - W*))`; zero outside the domain.
    pub fn weight(&self, u: f64) -> f64 {
        if !(u > 0.0 && u <= self.potential.wall()) {
            return 0.0;
        }
        let EnsembleParams { beta, force } = self.params;
        let e = beta * (self.potential.energy(u) - force * u - self.w_star);
        if e.is_nan() {
            0.0
        } else {
            (-e).exp()
        }
    }

    /// `int h(u) weight(u) du` over `[lo, hi]`, split at the interior
    /// breakpoints.
    pub fn integrate_range<H>(&self, h: H, lo: f64, hi: f64) -> Result<QuadResult>
    where
        H: Fn(f64) -> f64,
    {
        let lo = lo.max(0.0);
        let hi = hi.min(self.potential.wall());
        if hi <= lo {
            return Ok(QuadResult {
                value: 0.0,
                abs_error: 0.0,
                evaluations: 0,
            });
        }
        let mut points = vec![lo];
        points.extend(
            self.breakpoints
                .iter()
                .copied()
                .filter(|&b| b > lo && b < hi),
        );
        points.push(hi);
        quadrature::integrate(|u| h(u) * self.weight(u), &points, &self.opts)
    }

    /// `int h(u) weight(u) du` over the whole domain.
    pub fn integrate<H>(&self, h: H) -> Result<QuadResult>
    where
        H: Fn(f64) -> f64,
    {
        self.integrate_range(h, 0.0, self.potential.wall())
    }

    /// Normalizing integral of the shifted weight.
    pub fn shifted_partition(&self) -> Result<QuadResult> {
        self.integrate(|_| 1.0)
    }

    /// `int_0^wall exp(-beta (V(u) - F u)) du` without the energy shift.
    /// Overflows to a domain error for extreme `beta * W*`.
    pub fn partition_integral(&self) -> Result<QuadResult> {
        let shifted = self.shifted_partition()?;
        let scale = (-self.params.beta * self.w_star).exp();
        let value = shifted.value * scale;
        if !value.is_finite() {
            return Err(Error::domain(format!(
                "partition integral overflows: exp(-beta W*) with beta W* = {}",
                self.params.beta * self.w_star
            )));
        }
        Ok(QuadResult {
            value,
            abs_error: shifted.abs_error * scale,
            evaluations: shifted.evaluations,
        })
    }

    /// `<h(u)>` under the normalized spacing density.
    pub fn expectation<H>(&self, h: H) -> Result<f64>
    where
        H: Fn(f64) -> f64,
    {
        let z = self.shifted_partition()?;
        let num = self.integrate(h)?;
        Ok(num.value / z.value)
    }

    /// `<u^k>`.
    pub fn moment(&self, k: u32) -> Result<f64> {
        if k == 0 {
            return Ok(1.0);
        }
        self.expectation(|u| u.powi(k as i32))
    }

    /// `<u>`, the mean spacing `m(T, F)`.
    pub fn mean(&self) -> Result<f64> {
        self.moment(1)
    }

    /// `<(u - <u>)^k>`, computed in two passes to avoid cancellation.
    pub fn central_moment(&self, k: u32) -> Result<f64> {
        let m = self.mean()?;
        self.expectation(|u| (u - m).powi(k as i32))
    }

    pub fn variance(&self) -> Result<f64> {
        self.central_moment(2)
    }

    /// `<u V> - <u><V>` under this ensemble's weight.
    pub fn covariance_uv(&self) -> Result<f64> {
        let m = self.mean()?;
        let v0 = self.potential.minimum().v_min;
        let z = self.shifted_partition()?.value;
        let cross = self
            .integrate(|u| (u - m) * (self.potential.energy(u) - v0))?
            .value
            / z;
        let centred = self.integrate(|u| u - m)?.value / z;
        let mean_v = self.integrate(|u| self.potential.energy(u) - v0)?.value / z;
        Ok(cross - centred * mean_v)
    }

    /// `P(u' <= u)`.
    pub fn cdf(&self, u: f64) -> Result<f64> {
        if u <= 0.0 {
            return Ok(0.0);
        }
        if u >= self.potential.wall() {
            return Ok(1.0);
        }
        let z = self.shifted_partition()?.value;
        Ok(self.integrate_range(|_| 1.0, 0.0, u)?.value / z)
    }
}

/// Normalizing integral of the spacing density.
pub fn partition_integral(p: &Potential, e: EnsembleParams) -> Result<QuadResult> {
    Ensemble::new(p, e)?.partition_integral()
}

/// `<u^k>` at `(beta, F)`.
pub fn moment(p: &Potential, e: EnsembleParams, k: u32) -> Result<f64> {
    Ensemble::new(p, e)?.moment(k)
}

/// `m(T, F)`.
pub fn mean_spacing(p: &Potential, temperature: f64, force: f64) -> Result<f64> {
    Ensemble::new(p, EnsembleParams::from_temperature(temperature, force)?)?.mean()
}

/// `R = beta (<u^2> - <u>^2)` at zero force.
pub fn elastic_modulus(p: &Potential, temperature: f64) -> Result<f64> {
    let e = EnsembleParams::from_temperature(temperature, 0.0)?;
    Ok(e.beta * Ensemble::new(p, e)?.variance()?)
}

/// `m(T, F) - m(T, 0)`.
pub fn elastic_expansion(p: &Potential, temperature: f64, force: f64) -> Result<f64> {
    if force == 0.0 {
        EnsembleParams::from_temperature(temperature, 0.0)?;
        return Ok(0.0);
    }
    Ok(mean_spacing(p, temperature, force)? - mean_spacing(p, temperature, 0.0)?)
}

/// `<uV> - <u><V>` at zero force.
pub fn covariance_uv(p: &Potential, beta: f64) -> Result<f64> {
    Ensemble::new(p, EnsembleParams::new(beta, 0.0)?)?.covariance_uv()
}

/// Mean length `<x_N> = N m(T, F)` of a chain of `n` spacings.
pub fn chain_length(p: &Potential, temperature: f64, force: f64, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("chain needs at least one spacing"));
    }
    Ok(n as f64 * mean_spacing(p, temperature, force)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn quad(a: f64, c2: f64) -> Potential {
        Potential::quadratic(a, c2, 10.0 * a).unwrap()
    }

    fn lj() -> Potential {
        Potential::lennard_jones(1.0, 10.0 * 2f64.powf(1.0 / 6.0)).unwrap()
    }

    #[test]
    fn gaussian_partition() {
        let p = quad(5.0, 1.0);
        let z1 = partition_integral(&p, EnsembleParams::new(1.0, 0.0).unwrap()).unwrap();
        assert!((z1.value - PI.sqrt()).abs() < 1e-10 * PI.sqrt());
        let z4 = partition_integral(&p, EnsembleParams::new(4.0, 0.0).unwrap()).unwrap();
        assert!((z4.value - (PI / 4.0).sqrt()).abs() < 1e-10);
        assert!(z4.abs_error >= 0.0 && z4.abs_error <= 1e-10 * z4.value);
    }

    #[test]
    fn zeroth_moment_is_one() {
        let e = EnsembleParams::new(100.0, 0.0).unwrap();
        assert_eq!(moment(&lj(), e, 0).unwrap(), 1.0);
    }

    #[test]
    fn gaussian_mean_and_shift() {
        let p = quad(5.0, 1.0);
        assert!((mean_spacing(&p, 0.01, 0.0).unwrap() - 5.0).abs() < 1e-8);
        // completing the square: mean moves by F / (2 c2)
        assert!((mean_spacing(&p, 0.01, 0.2).unwrap() - 5.1).abs() < 1e-6);
        assert!((elastic_expansion(&p, 0.01, 0.2).unwrap() - 0.1).abs() < 1e-6);
        assert_eq!(elastic_expansion(&p, 0.01, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_modulus() {
        for c2 in [1.0, 4.0] {
            let r = elastic_modulus(&quad(5.0, c2), 0.01).unwrap();
            assert!((r - 0.5 / c2).abs() < 1e-6 * (0.5 / c2), "c2 = {c2}: {r}");
        }
    }

    #[test]
    fn symmetric_well_has_no_uv_correlation() {
        assert!(covariance_uv(&quad(5.0, 1.0), 100.0).unwrap().abs() < 1e-8);
    }

    #[test]
    fn cubic_sign_controls_correlation() {
        let soft = Potential::polynomial(1.0, vec![1.0, -0.05], 10.0).unwrap();
        let hard = Potential::polynomial(1.0, vec![1.0, 0.05], 10.0).unwrap();
        assert!(covariance_uv(&soft, 200.0).unwrap() > 0.0);
        assert!(covariance_uv(&hard, 200.0).unwrap() < 0.0);
        assert!(covariance_uv(&lj(), 100.0).unwrap() > 0.0);
    }

    #[test]
    fn chain_length_is_n_times_mean() {
        let p = quad(5.0, 1.0);
        let m = mean_spacing(&p, 0.01, 0.0).unwrap();
        assert_eq!(chain_length(&p, 0.01, 0.0, 1).unwrap(), m);
        assert!((chain_length(&p, 0.01, 0.0, 1000).unwrap() - 5000.0).abs() < 1e-5);
        assert!(chain_length(&p, 0.01, 0.0, 0).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(EnsembleParams::new(0.0, 0.0).is_err());
        assert!(EnsembleParams::from_temperature(-1.0, 0.0).is_err());
        assert!(mean_spacing(&lj(), 0.0, 0.0).is_err());
    }

    #[test]
    fn large_force_is_flagged() {
        // LJ V' peaks near 2.7; beyond that no interior minimum survives
        let r = mean_spacing(&lj(), 0.01, 5.0);
        assert!(matches!(r, Err(Error::Domain(_))), "{r:?}");
        // moderate force whose minimum lands on the wall
        let r = mean_spacing(&lj(), 0.01, 0.5);
        assert!(matches!(r, Err(Error::Domain(_))), "{r:?}");
    }

    #[test]
    fn large_beta_spike_is_resolved() {
        let p = quad(5.0, 1.0);
        let e = EnsembleParams::new(1e6, 0.0).unwrap();
        let z = partition_integral(&p, e).unwrap();
        assert!((z.value - (PI / 1e6).sqrt()).abs() < 1e-10 * z.value);
    }

    #[test]
    fn cdf_is_monotone_and_normalized() {
        let p = lj();
        let ens = Ensemble::new(&p, EnsembleParams::new(100.0, 0.0).unwrap()).unwrap();
        let a = p.a();
        let mut prev = 0.0;
        for u in [0.9, a - 0.05, a, a + 0.05, a + 0.2, 3.0] {
            let c = ens.cdf(u).unwrap();
            assert!(c >= prev);
            prev = c;
        }
        assert!((ens.cdf(p.wall()).unwrap() - 1.0).abs() < 1e-15);
        // LJ plateau beyond u = 3 still carries ~2e-9 of the mass at beta = 100
        assert!((prev - 1.0).abs() < 1e-8);
    }
}
