//! Confining pair potentials on the half line.
//!
//! A [`Potential`] is defined on `(0, wall]`: the hard core at zero and the
//! hard wall at `wall` are domain restrictions, never numeric infinities.
//! Construction validates that the potential has exactly one interior local
//! minimum and that this minimum is also the global one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots;

/// Number of log-spaced grid points used to validate a potential.
pub const VALIDATION_GRID: usize = 20_000;

/// Default wall position in units of the minimum location.
pub const DEFAULT_WALL_FACTOR: f64 = 10.0;

/// The analytic family a potential belongs to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialKind {
    /// `(sigma/r)^12 - (sigma/r)^6`.
    LennardJones { sigma: f64 },
    /// `sum_k coeffs[k-2] * (u - a)^k` for `k >= 2`.
    Polynomial { a: f64, coeffs: Vec<f64> },
    /// `c2 * (u - a)^2`.
    Quadratic { a: f64, c2: f64 },
}

/// Serialized form of a potential, as read from JSON.
///
/// `wall` may be omitted, in which case it defaults to ten times the
/// minimum location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialConfig {
    #[serde(flatten)]
    pub kind: PotentialKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall: Option<f64>,
}

/// Location and depth of the potential minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Minimum {
    pub a: f64,
    pub v_min: f64,
}

/// Coefficients of `V(a+y) = V(a) + c2 y^2 + c3 y^3 + c4 y^4 + o(y^4)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TaylorData {
    pub a: f64,
    pub v_min: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

impl TaylorData {
    pub fn new(a: f64, v_min: f64, c2: f64, c3: f64, c4: f64) -> Result<Self> {
        if !(c2 > 0.0) {
            return Err(Error::domain(format!("c2 must be positive, got {c2}")));
        }
        if !(a.is_finite() && v_min.is_finite() && c3.is_finite() && c4.is_finite()) {
            return Err(Error::domain("Taylor coefficients must be finite"));
        }
        Ok(TaylorData {
            a,
            v_min,
            c2,
            c3,
            c4,
        })
    }

    /// `[c2, c3, c4]`.
    pub fn coefficients(&self) -> [f64; 3] {
        [self.c2, self.c3, self.c4]
    }
}

/// An admissible pair potential with its cached minimum.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    kind: PotentialKind,
    wall: f64,
    minimum: Minimum,
}

impl PotentialKind {
    /// Closed-form (or defining) location of the minimum, used for the
    /// default wall and as the length scale of the validation grid.
    fn natural_length(&self) -> f64 {
        match self {
            PotentialKind::LennardJones { sigma } => sigma * 2f64.powf(1.0 / 6.0),
            PotentialKind::Polynomial { a, .. } | PotentialKind::Quadratic { a, .. } => *a,
        }
    }

    fn check(&self) -> Result<()> {
        match self {
            PotentialKind::LennardJones { sigma } => {
                if !(*sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::domain(format!(
                        "sigma must be positive, got {sigma}"
                    )));
                }
            }
            PotentialKind::Polynomial { a, coeffs } => {
                if !(*a > 0.0 && a.is_finite()) {
                    return Err(Error::domain(format!("a must be positive, got {a}")));
                }
                match coeffs.first() {
                    None => return Err(Error::domain("polynomial needs at least c2")),
                    Some(c2) if !(*c2 > 0.0) => {
                        return Err(Error::domain(format!("c2 must be positive, got {c2}")))
                    }
                    _ => {}
                }
                if coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(Error::domain("polynomial coefficients must be finite"));
                }
            }
            PotentialKind::Quadratic { a, c2 } => {
                if !(*a > 0.0 && a.is_finite()) {
                    return Err(Error::domain(format!("a must be positive, got {a}")));
                }
                if !(*c2 > 0.0 && c2.is_finite()) {
                    return Err(Error::domain(format!("c2 must be positive, got {c2}")));
                }
            }
        }
        Ok(())
    }

    /// n-th derivative of the raw formula, `n = 0` being the value.
    /// No domain check.
    fn derivative(&self, u: f64, n: u32) -> f64 {
        match self {
            PotentialKind::LennardJones { sigma } => {
                let s = sigma / u;
                let s6 = s.powi(6);
                let s12 = s6 * s6;
                // d^n/du^n u^{-p} = (-1)^n p (p+1) ... (p+n-1) u^{-p-n}
                let falling = |p: u32| -> f64 { (p..p + n).map(f64::from).product() };
                let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
                sign * (falling(12) * s12 - falling(6) * s6) / u.powi(n as i32)
            }
            PotentialKind::Polynomial { a, coeffs } => polynomial_derivative(coeffs, u - a, n),
            PotentialKind::Quadratic { a, c2 } => polynomial_derivative(&[*c2], u - a, n),
        }
    }
}

/// n-th derivative of `sum_k c[k-2] y^k` at `y`.
fn polynomial_derivative(coeffs: &[f64], y: f64, n: u32) -> f64 {
    let n = n as usize;
    let lowest = n.max(2);
    let degree = coeffs.len() + 1;
    if degree < lowest {
        return 0.0;
    }
    // Horner over the differentiated coefficients, degrees `degree..=lowest`
    let mut acc = 0.0;
    for k in (lowest..=degree).rev() {
        let falling: f64 = ((k - n + 1)..=k).map(|j| j as f64).product();
        acc = acc * y + coeffs[k - 2] * falling;
    }
    acc * y.powi((lowest - n) as i32)
}

impl Potential {
    pub fn new(kind: PotentialKind, wall: f64) -> Result<Self> {
        kind.check()?;
        let scale = kind.natural_length();
        if !(wall > 2.0 * scale && wall.is_finite()) {
            return Err(Error::domain(format!(
                "wall {wall} must exceed twice the minimum location ({})",
                2.0 * scale
            )));
        }
        let mut p = Potential {
            kind,
            wall,
            minimum: Minimum {
                a: scale,
                v_min: f64::NAN,
            },
        };
        p.minimum = p.find_minimum()?;
        if !(p.wall > 2.0 * p.minimum.a) {
            return Err(Error::domain(format!(
                "wall {wall} must exceed twice the minimum location ({})",
                2.0 * p.minimum.a
            )));
        }
        p.validate_global_minimum()?;
        Ok(p)
    }

    pub fn from_config(config: &PotentialConfig) -> Result<Self> {
        config.kind.check()?;
        let wall = config
            .wall
            .unwrap_or(DEFAULT_WALL_FACTOR * config.kind.natural_length());
        Potential::new(config.kind.clone(), wall)
    }

    pub fn to_config(&self) -> PotentialConfig {
        PotentialConfig {
            kind: self.kind.clone(),
            wall: Some(self.wall),
        }
    }

    pub fn lennard_jones(sigma: f64, wall: f64) -> Result<Self> {
        Potential::new(PotentialKind::LennardJones { sigma }, wall)
    }

    pub fn polynomial(a: f64, coeffs: Vec<f64>, wall: f64) -> Result<Self> {
        Potential::new(PotentialKind::Polynomial { a, coeffs }, wall)
    }

    pub fn quadratic(a: f64, c2: f64, wall: f64) -> Result<Self> {
        Potential::new(PotentialKind::Quadratic { a, c2 }, wall)
    }

    /// Same potential with the wall at its default position.
    pub fn with_default_wall(kind: PotentialKind) -> Result<Self> {
        Potential::from_config(&PotentialConfig { kind, wall: None })
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    /// Short identifier of the kind, as used in JSON.
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            PotentialKind::LennardJones { .. } => "lennard_jones",
            PotentialKind::Polynomial { .. } => "polynomial",
            PotentialKind::Quadratic { .. } => "quadratic",
        }
    }

    pub fn wall(&self) -> f64 {
        self.wall
    }

    pub fn minimum(&self) -> Minimum {
        self.minimum
    }

    /// Minimum location.
    pub fn a(&self) -> f64 {
        self.minimum.a
    }

    fn check_domain(&self, u: f64) -> Result<()> {
        if u > 0.0 && u <= self.wall {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "u = {u} lies outside the potential domain (0, {}]",
                self.wall
            )))
        }
    }

    /// `V(u)` for `0 < u <= wall`.
    pub fn evaluate(&self, u: f64) -> Result<f64> {
        self.check_domain(u)?;
        Ok(self.energy(u))
    }

    /// `V'(u)` for `0 < u <= wall`.
    pub fn derivative(&self, u: f64) -> Result<f64> {
        self.check_domain(u)?;
        Ok(self.kind.derivative(u, 1))
    }

    /// Raw `V(u)` with no domain check; callers guarantee `0 < u <= wall`.
    pub(crate) fn energy(&self, u: f64) -> f64 {
        self.kind.derivative(u, 0)
    }

    pub(crate) fn nth_derivative(&self, u: f64, n: u32) -> f64 {
        self.kind.derivative(u, n)
    }

    pub(crate) fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        let lo = 1e-3 * self.kind.natural_length();
        let ratio = (self.wall / lo).ln() / (VALIDATION_GRID - 1) as f64;
        (0..VALIDATION_GRID).map(move |i| {
            if i + 1 == VALIDATION_GRID {
                self.wall
            } else {
                lo * (ratio * i as f64).exp()
            }
        })
    }

    /// Brackets of the interior local minima: consecutive grid points where
    /// `V'` goes from negative to non-negative.
    pub fn minimum_brackets(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut prev: Option<(f64, f64)> = None;
        for u in self.grid() {
            let d = self.kind.derivative(u, 1);
            if let Some((pu, pd)) = prev {
                if pd < 0.0 && d >= 0.0 {
                    out.push((pu, u));
                }
            }
            prev = Some((u, d));
        }
        out
    }

    /// Number of sign changes of `V'` on the validation grid.
    pub fn derivative_sign_changes(&self) -> usize {
        let signs: Vec<bool> = self
            .grid()
            .map(|u| self.kind.derivative(u, 1))
            .filter(|d| *d != 0.0)
            .map(|d| d > 0.0)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Locates the unique interior minimum: bracket the sign change of `V'`
    /// on a log grid, bisect to `1e-14`, then one safeguarded Newton step.
    pub fn find_minimum(&self) -> Result<Minimum> {
        let brackets = self.minimum_brackets();
        let (lo, hi) = match brackets.as_slice() {
            [one] => *one,
            [] => {
                return Err(Error::domain(
                    "V' has no negative-to-positive sign change: no interior minimum",
                ))
            }
            many => {
                return Err(Error::domain(format!(
                    "potential has {} interior local minima, expected exactly one",
                    many.len()
                )))
            }
        };
        let d1 = |u: f64| self.kind.derivative(u, 1);
        let d2 = |u: f64| self.kind.derivative(u, 2);
        let tol = 1e-14 * self.kind.natural_length().max(1.0);
        let a = roots::bisect(d1, lo, hi, tol)?;
        let a = roots::newton_polish(d1, d2, a, lo, hi);
        if !(d2(a) > 0.0) {
            return Err(Error::domain(format!(
                "stationary point at {a} is not a quadratic minimum (V'' = {})",
                d2(a)
            )));
        }
        Ok(Minimum {
            a,
            v_min: self.energy(a),
        })
    }

    fn validate_global_minimum(&self) -> Result<()> {
        let Minimum { a, v_min } = self.minimum;
        let slack = 1e-12 * v_min.abs().max(1.0);
        for u in self.grid() {
            let v = self.energy(u);
            if v < v_min - slack {
                return Err(Error::domain(format!(
                    "V({u}) = {v} lies below the local minimum V({a}) = {v_min}: second well inside the domain"
                )));
            }
        }
        Ok(())
    }

    /// `c_k = V^(k)(a) / k!` for `k = 2, 3, 4`, from the analytic derivatives.
    pub fn taylor_coefficients(&self) -> Result<TaylorData> {
        let Minimum { a, v_min } = self.minimum;
        let c2 = self.nth_derivative(a, 2) / 2.0;
        let c3 = self.nth_derivative(a, 3) / 6.0;
        let c4 = self.nth_derivative(a, 4) / 24.0;
        TaylorData::new(a, v_min, c2, c3, c4)
    }
}

/// Taylor coefficients `c2, c3, c4` of an arbitrary smooth `f` at `a` by
/// central differences with step `h`, Richardson-extrapolated from `h` and
/// `h/2`.
pub fn finite_difference_taylor<F>(f: F, a: f64, h: f64) -> [f64; 3]
where
    F: Fn(f64) -> f64,
{
    let stencil = |h: f64| {
        let f0 = f(a);
        let (p1, m1) = (f(a + h), f(a - h));
        let (p2, m2) = (f(a + 2.0 * h), f(a - 2.0 * h));
        let d2 = (p1 - 2.0 * f0 + m1) / (h * h);
        let d3 = (p2 - 2.0 * p1 + 2.0 * m1 - m2) / (2.0 * h * h * h);
        let d4 = (p2 - 4.0 * p1 + 6.0 * f0 - 4.0 * m1 + m2) / (h * h * h * h);
        [d2, d3, d4]
    };
    let coarse = stencil(h);
    let fine = stencil(0.5 * h);
    let factorial = [2.0, 6.0, 24.0];
    let mut out = [0.0; 3];
    for k in 0..3 {
        out[k] = (4.0 * fine[k] - coarse[k]) / 3.0 / factorial[k];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lj() -> Potential {
        Potential::with_default_wall(PotentialKind::LennardJones { sigma: 1.0 }).unwrap()
    }

    #[test]
    fn lj_minimum_matches_closed_form() {
        let p = lj();
        let a = 2f64.powf(1.0 / 6.0);
        assert!((p.a() - a).abs() < 1e-14);
        assert!(p.derivative(p.a()).unwrap().abs() <= 1e-12);
        assert!((p.minimum().v_min + 0.25).abs() < 1e-15);
    }

    #[test]
    fn lj_evaluate_examples() {
        let p = lj();
        assert!((p.evaluate(2f64.powf(1.0 / 6.0)).unwrap() + 0.25).abs() < 1e-15);
        assert_eq!(p.evaluate(1.0).unwrap(), 0.0);
    }

    #[test]
    fn evaluate_outside_domain_is_error() {
        let p = lj();
        assert!(matches!(p.evaluate(0.0), Err(Error::Domain(_))));
        assert!(matches!(p.evaluate(-1.0), Err(Error::Domain(_))));
        assert!(matches!(
            p.evaluate(p.wall() * 1.0001),
            Err(Error::Domain(_))
        ));
        assert!(p.evaluate(p.wall()).is_ok());
    }

    #[test]
    fn lj_taylor_analytic() {
        let t = lj().taylor_coefficients().unwrap();
        // V''(r) = 156 r^-14 - 42 r^-8 at r^6 = 2
        let r = 2f64.powf(1.0 / 6.0);
        let c2 = (156.0 * r.powi(-14) - 42.0 * r.powi(-8)) / 2.0;
        assert!((t.c2 - c2).abs() < 1e-12);
        assert!((t.c2 - 18.0 * 2f64.powf(-4.0 / 3.0)).abs() < 1e-12);
        assert!((t.c3 + 63.0 / 2f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn quadratic_taylor_is_exact() {
        let p = Potential::quadratic(3.0, 5.0, 30.0).unwrap();
        assert_eq!(p.a(), 3.0);
        let t = p.taylor_coefficients().unwrap();
        assert_eq!((t.c2, t.c3, t.c4), (5.0, 0.0, 0.0));
        assert_eq!(p.evaluate(3.0).unwrap(), 0.0);
    }

    #[test]
    fn cubic_perturbed_well_is_admissible() {
        let p = Potential::polynomial(1.0, vec![1.0, -0.1], 10.0).unwrap();
        assert!((p.a() - 1.0).abs() < 1e-14);
        let t = p.taylor_coefficients().unwrap();
        assert!((t.c3 + 0.1).abs() < 1e-14);
    }

    #[test]
    fn second_well_is_rejected() {
        // V'(1+y) = 2y + 30y^2 vanishes at y = -1/15; V dives below V(a) toward 0
        let r = Potential::polynomial(1.0, vec![1.0, 10.0], 10.0);
        assert!(matches!(r, Err(Error::Domain(_))), "{r:?}");
    }

    #[test]
    fn construction_errors() {
        assert!(Potential::lennard_jones(0.0, 10.0).is_err());
        assert!(Potential::lennard_jones(1.0, 2.0).is_err());
        assert!(Potential::polynomial(1.0, vec![-1.0], 10.0).is_err());
        assert!(Potential::polynomial(1.0, vec![], 10.0).is_err());
        assert!(Potential::quadratic(1.0, 0.0, 10.0).is_err());
    }

    #[test]
    fn lj_derivative_sign_changes_once() {
        assert_eq!(lj().derivative_sign_changes(), 1);
        let q = Potential::quadratic(5.0, 1.0, 50.0).unwrap();
        assert_eq!(q.derivative_sign_changes(), 1);
    }

    #[test]
    fn minimum_is_stable_under_wall_enlargement() {
        let p = lj();
        let q = Potential::lennard_jones(1.0, 2.0 * p.wall()).unwrap();
        assert!((p.a() - q.a()).abs() < 1e-12);
    }

    #[test]
    fn lj_scaling() {
        let a1 = Potential::lennard_jones(1.0, 5.0).unwrap().a();
        for sigma in [0.5, 2.0] {
            let a = Potential::lennard_jones(sigma, 5.0 * sigma).unwrap().a();
            assert!((a - sigma * a1).abs() <= 4.0 * f64::EPSILON * a, "{sigma}");
        }
    }

    #[test]
    fn finite_difference_recovers_quartic() {
        let f =
            |u: f64| 2.0 * (u - 1.0).powi(2) - 0.5 * (u - 1.0).powi(3) + 3.0 * (u - 1.0).powi(4);
        let c = finite_difference_taylor(f, 1.0, 1e-3);
        assert!((c[0] - 2.0).abs() < 1e-6);
        assert!((c[1] + 0.5).abs() < 1e-4);
        assert!((c[2] - 3.0).abs() < 1e-2);
    }

    #[test]
    fn polynomial_derivative_matches_hand_expansion() {
        let c = [1.0, -0.1, 0.3];
        let y: f64 = 0.7;
        let v = y * y - 0.1 * y.powi(3) + 0.3 * y.powi(4);
        let d1 = 2.0 * y - 0.3 * y * y + 1.2 * y.powi(3);
        let d2 = 2.0 - 0.6 * y + 3.6 * y * y;
        let d5 = 0.0;
        assert!((polynomial_derivative(&c, y, 0) - v).abs() < 1e-15);
        assert!((polynomial_derivative(&c, y, 1) - d1).abs() < 1e-15);
        assert!((polynomial_derivative(&c, y, 2) - d2).abs() < 1e-14);
        assert_eq!(polynomial_derivative(&c, y, 5), d5);
    }

    #[test]
    fn json_schema_round_trip() {
        let lj: PotentialConfig =
            serde_json::from_str(r#"{"kind":"lennard_jones","sigma":1.0,"wall":11.22}"#).unwrap();
        assert_eq!(lj.kind, PotentialKind::LennardJones { sigma: 1.0 });
        assert_eq!(lj.wall, Some(11.22));
        let poly: PotentialConfig = serde_json::from_str(
            r#"{"kind":"polynomial","a":1.0,"coeffs":[1.0,-0.1],"wall":10.0}"#,
        )
        .unwrap();
        let p = Potential::from_config(&poly).unwrap();
        assert_eq!(p.wall(), 10.0);
        let back = serde_json::to_string(&p.to_config()).unwrap();
        assert_eq!(
            back,
            r#"{"kind":"polynomial","a":1.0,"coeffs":[1.0,-0.1],"wall":10.0}"#
        );
    }
}
