use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::ensemble::{Ensemble, EnsembleParams};
use crate::error::{Error, Result};
use crate::potentials::Potential;
use crate::quadrature::gauss_kronrod_21;
use crate::roots;

/// Anything that draws one spacing at a time.
pub trait SpacingSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64;
}

/// Maximum pointwise error of the interpolated CDF.
const CDF_TOLERANCE: f64 = 1e-8;
const INITIAL_PANELS: usize = 64;
const MAX_DEPTH: u32 = 40;
/// Panels carrying less mass than this are interpolated linearly.
const NEGLIGIBLE_MASS: f64 = 1e-15;

#[derive(Debug, Clone, Copy)]
struct Panel {
    x0: f64,
    width: f64,
    /// cumulative mass before this panel
    start: f64,
    mass: f64,
    /// CDF slopes in panel coordinates `t in [0, 1]`
    slope0: f64,
    slope1: f64,
    linear: bool,
}

impl Panel {
    /// Cubic Hermite CDF increment at `t`.
    fn increment(&self, t: f64) -> f64 {
        if self.linear {
            return self.mass * t;
        }
        let t2 = t * t;
        let t3 = t2 * t;
        (t3 - 2.0 * t2 + t) * self.slope0
            + (3.0 * t2 - 2.0 * t3) * self.mass
            + (t3 - t2) * self.slope1
    }

    fn increment_derivative(&self, t: f64) -> f64 {
        if self.linear {
            return self.mass;
        }
        let t2 = t * t;
        (3.0 * t2 - 4.0 * t + 1.0) * self.slope0
            + 6.0 * (t - t2) * self.mass
            + (3.0 * t2 - 2.0 * t) * self.slope1
    }

    fn invert(&self, target: f64) -> f64 {
        if target <= 0.0 || self.mass <= 0.0 {
            return 0.0;
        }
        if target >= self.mass {
            return 1.0;
        }
        if self.linear {
            return target / self.mass;
        }
        roots::safeguarded_newton(
            |t| self.increment(t) - target,
            |t| self.increment_derivative(t),
            0.0,
            1.0,
            1e-15,
        )
        .unwrap_or(target / self.mass)
    }
}

/// Inverse-CDF sampler over a table of cubic Hermite panels.
///
/// Panel masses come from Gauss-Kronrod quadrature of the Gibbs weight and
/// the CDF slopes at the nodes are the exact density values. Panels are
/// bisected until the interpolated CDF at each panel midpoint agrees with
/// quadrature to `1e-8` and the cubic is monotone.
#[derive(Debug, Clone)]
pub struct InverseCdfSampler {
    panels: Vec<Panel>,
    lo: f64,
    hi: f64,
}

impl InverseCdfSampler {
    pub fn new(ens: &Ensemble<'_>) -> Result<Self> {
        let total = ens.shifted_partition()?.value;
        let (mut lo, mut hi) = ens.support();
        let inside = ens.integrate_range(|_| 1.0, lo, hi)?.value;
        if (total - inside) > 1e-13 * total {
            lo = 0.0;
            hi = ens.potential().wall();
        }

        let mut nodes: Vec<f64> = (0..=INITIAL_PANELS)
            .map(|i| lo + (hi - lo) * i as f64 / INITIAL_PANELS as f64)
            .collect();
        nodes.extend(
            ens.breakpoints()
                .iter()
                .copied()
                .filter(|&b| b > lo && b < hi),
        );
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();

        let weight = |u: f64| ens.weight(u);
        let mut raw = Vec::new();
        for pair in nodes.windows(2) {
            refine(&weight, pair[0], pair[1], total, 0, &mut raw)?;
        }

        let table_mass: f64 = raw.iter().map(|p: &Panel| p.mass).sum();
        if !(table_mass > 0.0) {
            return Err(Error::convergence("inverse-CDF table has no mass"));
        }
        let mut start = 0.0;
        let panels = raw
            .into_iter()
            .map(|mut p| {
                p.mass /= table_mass;
                p.slope0 /= table_mass;
                p.slope1 /= table_mass;
                p.start = start;
                start += p.mass;
                p
            })
            .collect();
        Ok(InverseCdfSampler { panels, lo, hi })
    }

    pub fn panel_count(&self) -> usize {
        self.panels.len()
    }

    /// Interval covered by the table.
    pub fn range(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Interpolated CDF.
    pub fn cdf(&self, u: f64) -> f64 {
        if u <= self.lo {
            return 0.0;
        }
        if u >= self.hi {
            return 1.0;
        }
        let i = self.panels.partition_point(|p| p.x0 <= u).saturating_sub(1);
        let p = &self.panels[i];
        let t = ((u - p.x0) / p.width).clamp(0.0, 1.0);
        (p.start + p.increment(t)).min(1.0)
    }

    /// Inverse of [`cdf`](Self::cdf) at `prob` in `[0, 1)`.
    pub fn quantile(&self, prob: f64) -> f64 {
        let i = self
            .panels
            .partition_point(|p| p.start <= prob)
            .saturating_sub(1);
        let p = &self.panels[i];
        let t = p.invert(prob - p.start);
        let u = p.x0 + t * p.width;
        if u > 0.0 {
            u
        } else {
            f64::MIN_POSITIVE
        }
    }
}

fn refine<W>(
    weight: &W,
    x0: f64,
    x1: f64,
    total: f64,
    depth: u32,
    out: &mut Vec<Panel>,
) -> Result<()>
where
    W: Fn(f64) -> f64,
{
    let width = x1 - x0;
    let mid = 0.5 * (x0 + x1);
    let (left, _, left_err) = gauss_kronrod_21(weight, x0, mid);
    let (right, _, right_err) = gauss_kronrod_21(weight, mid, x1);
    let mass = left + right;
    let slope0 = width * weight(x0);
    let slope1 = width * weight(x1);

    if mass <= NEGLIGIBLE_MASS * total {
        out.push(Panel {
            x0,
            width,
            start: 0.0,
            mass: mass.max(0.0),
            slope0,
            slope1,
            linear: true,
        });
        return Ok(());
    }

    let hermite_mid = 0.5 * mass + (slope0 - slope1) / 8.0;
    let interp_ok = (hermite_mid - left).abs() <= CDF_TOLERANCE * total;
    let quad_ok = left_err + right_err <= 1e-12 * total;
    let alpha = slope0 / mass;
    let beta = slope1 / mass;
    let monotone = alpha * alpha + beta * beta <= 9.0;

    if (interp_ok && quad_ok && monotone) || depth >= MAX_DEPTH {
        if depth >= MAX_DEPTH && !(interp_ok && quad_ok) {
            return Err(Error::convergence(format!(
                "inverse-CDF table could not resolve [{x0}, {x1}]"
            )));
        }
        out.push(Panel {
            x0,
            width,
            start: 0.0,
            mass,
            slope0,
            slope1,
            linear: !monotone,
        });
        return Ok(());
    }
    refine(weight, x0, mid, total, depth + 1, out)?;
    refine(weight, mid, x1, total, depth + 1, out)
}

impl SpacingSampler for InverseCdfSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }
}

/// Rejection sampler with a Gaussian envelope centred on the effective
/// minimum, mixed with a small uniform component over the whole domain so
/// that the envelope also dominates flat far tails.
#[derive(Debug, Clone)]
pub struct RejectionSampler<'p> {
    ens: Ensemble<'p>,
    centre: f64,
    scale: f64,
    uniform_fraction: f64,
    bound: f64,
}

impl<'p> RejectionSampler<'p> {
    pub fn new(ens: Ensemble<'p>) -> Result<Self> {
        let (centre, _) = ens.effective_minimum();
        let p = ens.potential();
        let beta = ens.params().beta;
        let curvature = p.nth_derivative(centre, 2);
        if !(curvature > 0.0) {
            return Err(Error::domain("effective minimum has no positive curvature"));
        }
        let scale = 1.5 / (beta * curvature).sqrt();
        let mut sampler = RejectionSampler {
            ens,
            centre,
            scale,
            uniform_fraction: 0.01,
            bound: 1.0,
        };
        // sup of weight / envelope over a dense grid, with a 10% margin
        let (lo, hi) = sampler.ens.support();
        let step = scale / 50.0;
        let n = ((hi - lo) / step).ceil() as usize;
        let dense = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64);
        let sup = dense
            .chain(p.grid())
            .filter(|&u| u > 0.0)
            .map(|u| sampler.ens.weight(u) / sampler.envelope(u))
            .fold(0.0, f64::max);
        sampler.bound = 1.1 * sup;
        Ok(sampler)
    }

    fn envelope(&self, u: f64) -> f64 {
        let z = (u - self.centre) / self.scale;
        let gauss = (-0.5 * z * z).exp() / (self.scale * (2.0 * PI).sqrt());
        (1.0 - self.uniform_fraction) * gauss + self.uniform_fraction / self.ens.potential().wall()
    }
}

impl SpacingSampler for RejectionSampler<'_> {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let wall = self.ens.potential().wall();
        loop {
            let u = if rng.random::<f64>() < self.uniform_fraction {
                wall * (1.0 - rng.random::<f64>())
            } else {
                self.centre + self.scale * rng.sample::<f64, _>(StandardNormal)
            };
            if !(u > 0.0 && u <= wall) {
                continue;
            }
            if rng.random::<f64>() * self.bound * self.envelope(u) <= self.ens.weight(u) {
                return u;
            }
        }
    }
}

/// One draw from the spacing density at `(beta, F)`.
///
/// Builds the inverse-CDF table on every call; reuse an
/// [`InverseCdfSampler`] for repeated draws.
pub fn sample_spacing<R: Rng + ?Sized>(
    p: &Potential,
    e: EnsembleParams,
    rng: &mut R,
) -> Result<f64> {
    let ens = Ensemble::new(p, e)?;
    Ok(InverseCdfSampler::new(&ens)?.sample(rng))
}
