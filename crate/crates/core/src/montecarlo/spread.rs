use rand::Rng;
use rand_distr::{Distribution, Normal, Pareto};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Marginal law of the deviations `xi_i = x_i - i a` from the ground state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailModel {
    /// Uniform on `[-m, m]`.
    Bounded { m: f64 },
    /// Centred normal with standard deviation `s`.
    Gaussian { s: f64 },
    /// Symmetric Pareto with unit scale and tail index `alpha`:
    /// `P(|xi| > x) = x^-alpha` for `x >= 1`.
    Pareto { alpha: f64 },
}

impl TailModel {
    fn check(&self) -> Result<()> {
        let (name, v) = match *self {
            TailModel::Bounded { m } => ("M", m),
            TailModel::Gaussian { s } => ("s", s),
            TailModel::Pareto { alpha } => ("alpha", alpha),
        };
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "tail parameter {name} must be positive, got {v}"
            )))
        }
    }

    /// Whether `P(|xi| > x) = o(1/x)` holds.
    pub fn has_light_tail(&self) -> bool {
        match *self {
            TailModel::Bounded { .. } | TailModel::Gaussian { .. } => true,
            TailModel::Pareto { alpha } => alpha > 1.0,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            TailModel::Bounded { m } => format!("bounded(M={m})"),
            TailModel::Gaussian { s } => format!("gaussian(s={s})"),
            TailModel::Pareto { alpha } => format!("pareto(alpha={alpha})"),
        }
    }
}

/// Spread of one frozen configuration: `X / (N a)` with
/// `X = max_i x_i - min_i x_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpreadResult {
    pub n: usize,
    pub ratio: f64,
    pub tail_model: TailModel,
}

/// Places particles `i = 0..=n` at `i a + xi_i` with independent `xi_i`
/// from `tail` and returns the relative spread.
pub fn harmonic_spread_experiment<R: Rng + ?Sized>(
    tail: TailModel,
    a: f64,
    n: usize,
    rng: &mut R,
) -> Result<SpreadResult> {
    tail.check()?;
    if n < 10 {
        return Err(Error::domain(format!("need N >= 10, got {n}")));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::domain(format!(
            "lattice constant must be positive, got {a}"
        )));
    }
    let mut draw: Box<dyn FnMut(&mut R) -> f64> = match tail {
        TailModel::Bounded { m } => Box::new(move |r: &mut R| m * (2.0 * r.random::<f64>() - 1.0)),
        TailModel::Gaussian { s } => {
            let normal = Normal::new(0.0, s).map_err(|e| Error::domain(e.to_string()))?;
            Box::new(move |r: &mut R| normal.sample(r))
        }
        TailModel::Pareto { alpha } => {
            let pareto = Pareto::new(1.0, alpha).map_err(|e| Error::domain(e.to_string()))?;
            Box::new(move |r: &mut R| {
                let magnitude: f64 = pareto.sample(r);
                if r.random::<bool>() {
                    magnitude
                } else {
                    -magnitude
                }
            })
        }
    };
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..=n {
        let x = i as f64 * a + draw(rng);
        lo = lo.min(x);
        hi = hi.max(x);
    }
    Ok(SpreadResult {
        n,
        ratio: (hi - lo) / (n as f64 * a),
        tail_model: tail,
    })
}
