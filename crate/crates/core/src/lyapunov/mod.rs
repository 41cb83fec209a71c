//! First three Lyapunov (focal) coefficients of the weak focus.
//!
//! Three routes are provided and only ever compared by sign, since each is
//! defined up to a positive factor:
//!
//! * [`lyapunov_generic`]: the Liénard focal formulas evaluated on exact
//!   Taylor coefficients;
//! * [`lyapunov_closed`]: closed polynomials in `theta = exp(4 u0)` and
//!   `d = a - b`, valid on the Hopf manifold;
//! * [`focal_oracle`]: a numerical fit of the Poincaré displacement.

mod oracle;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lienard::LienardCoeffs;
use crate::model::Params;

pub use oracle::{focal_oracle, focal_oracle_field, OracleConfig, OracleFit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Generic,
    ClosedForm,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovCoeffs {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub source: Source,
}

/// Liénard focal formulas. Requires `p_1 < 0`.
pub fn lyapunov_generic(lc: &LienardCoeffs) -> Result<LyapunovCoeffs> {
    let p = |k: usize| lc.p(k);
    let q = |k: usize| lc.q(k);
    if !(p(1) < 0.0) {
        return Err(Error::NotAFocus(format!("p1 = {} is not negative", p(1))));
    }
    let l1 = p(2) * q(1) - p(1) * q(2);
    let l2 = 5.0 * (p(2) * q(3) - p(3) * q(2)) + 3.0 * (p(4) * q(1) - p(1) * q(4));
    let l3 = 14.0 * p(2) * (p(2) * q(4) - p(4) * q(2))
        + 21.0 * p(1) * (p(3) * q(4) - p(4) * q(3))
        + 35.0 * p(1) * (p(5) * q(2) - p(2) * q(5))
        + 15.0 * p(1) * (p(1) * q(6) - p(6) * q(1));
    Ok(LyapunovCoeffs {
        l1,
        l2,
        l3,
        source: Source::Generic,
    })
}

/// Coefficients of the closed-form `l1` in powers of `theta`.
pub fn l1_poly(d: f64) -> [f64; 5] {
    [1.0, -2.0, -(6.0 - 8.0 * d), -2.0, 1.0]
}

/// Coefficients of the closed-form `l2` in powers of `theta`.
pub fn l2_poly(d: f64) -> [f64; 7] {
    let m = 45.0 + 8.0 * d;
    [3.0, -72.0, m, 240.0 - 368.0 * d, m, -72.0, 3.0]
}

/// Coefficients of the closed-form `l3` in powers of `theta`. The sequence
/// is palindromic, as required by the `theta -> 1/theta` reflection.
pub fn l3_poly(d: f64) -> [f64; 11] {
    let d2 = d * d;
    let c1 = -4.0 * (29.0 + d);
    let c2 = 717.0 + 160.0 * d;
    let c3 = 16.0 * (102.0 - 205.0 * d - 6.0 * d2);
    let c4 = -2.0 * (903.0 - 1904.0 * d - 384.0 * d2);
    let c5 = -8.0 * (651.0 - 1813.0 * d + 1608.0 * d2);
    [1.0, c1, c2, c3, c4, c5, c4, c3, c2, c1, 1.0]
}

/// Horner evaluation of `sum coeffs[k] theta^k`.
pub fn eval_poly(coeffs: &[f64], theta: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * theta + c)
}

/// Largest `|coeffs[k] theta^k|`, the natural scale for rounding error.
pub fn largest_monomial(coeffs: &[f64], theta: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| (c * theta.powi(k as i32)).abs())
        .fold(0.0, f64::max)
}

/// Closed-form coefficients on the Hopf manifold, with `theta = exp(4 u0)`
/// and `d = a - b`.
pub fn lyapunov_closed(theta: f64, d: f64) -> Result<LyapunovCoeffs> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "theta",
            reason: format!("must be positive and finite, got {theta}"),
        });
    }
    Ok(LyapunovCoeffs {
        l1: eval_poly(&l1_poly(d), theta),
        l2: eval_poly(&l2_poly(d), theta),
        l3: eval_poly(&l3_poly(d), theta),
        source: Source::ClosedForm,
    })
}

/// Positive factors `k` with `generic = k * closed` for each order on the
/// Hopf manifold: `16/(1+t)^4`, `64/(3(1+t)^6)` and `512/(3(1+t)^10)`.
pub fn generic_scale(theta: f64) -> [f64; 3] {
    let s = 1.0 + theta;
    [16.0 / s.powi(4), 64.0 / (3.0 * s.powi(6)), 512.0 / (3.0 * s.powi(10))]
}

/// Both analytic routes at one Hopf point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub params: Params,
    pub u0: f64,
    pub generic: LyapunovCoeffs,
    pub closed: LyapunovCoeffs,
    /// Per order: `|generic - k closed| <= rel_tol * k * largest monomial`.
    pub agree: [bool; 3],
}

/// Evaluates both routes at the Hopf point with `theta = exp(4 u0)` and
/// `a - b = d`, where `a = (1 + theta)^2 / (2 theta)`.
pub fn cross_check(theta: f64, d: f64, rel_tol: f64) -> Result<CrossCheck> {
    let closed = lyapunov_closed(theta, d)?;
    let u0 = 0.25 * theta.ln();
    let a = 1.0 + (4.0 * u0).cosh();
    let h = crate::lienard::hopf_manifold(u0, a - d)?;
    let params = h.params()?;
    let generic = lyapunov_generic(&crate::lienard::taylor_coeffs_at(&params, u0))?;
    let k = generic_scale(theta);
    let g = [generic.l1, generic.l2, generic.l3];
    let c = [closed.l1, closed.l2, closed.l3];
    let m = [
        largest_monomial(&l1_poly(d), theta),
        largest_monomial(&l2_poly(d), theta),
        largest_monomial(&l3_poly(d), theta),
    ];
    let agree = std::array::from_fn(|i| (g[i] - k[i] * c[i]).abs() <= rel_tol * k[i] * m[i]);
    Ok(CrossCheck {
        params,
        u0,
        generic,
        closed,
        agree,
    })
}

/// Second coefficient restricted to the Bautin curve:
/// `2 (1 + t)^2 (1 - 14 t + 6 t^2 - 14 t^3 + t^4)`.
pub fn l2bar(vartheta: f64) -> f64 {
    let t = vartheta;
    2.0 * (1.0 + t).powi(2) * (1.0 + t * (-14.0 + t * (6.0 + t * (-14.0 + t))))
}

/// The two positive zeros of `l2bar`, larger first. Dividing the quartic by
/// `t^2` and writing `w = t + 1/t` gives `w^2 - 14 w + 4 = 0`, whose root
/// `w = 7 + 3 sqrt 5` is the one with `w >= 2`.
pub fn l2bar_roots() -> (f64, f64) {
    let w = 7.0 + 3.0 * 5f64.sqrt();
    // sqrt(w^2 - 4) = sqrt(90 + 42 sqrt 5)
    let disc = (90.0 + 42.0 * 5f64.sqrt()).sqrt();
    let theta1 = 0.5 * (w + disc);
    // the product of the roots is 1
    (theta1, 1.0 / theta1)
}

/// A point of the curve where the first coefficient vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BautinPoint {
    pub vartheta: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// `ln(vartheta) / 4`
    pub u0: f64,
}

impl BautinPoint {
    pub fn params(&self) -> Params {
        Params::new(self.a, self.b, self.c).expect("Bautin curve has positive gains")
    }

    /// `a - b`
    pub fn d(&self) -> f64 {
        self.a - self.b
    }

    pub fn l2bar(&self) -> f64 {
        l2bar(self.vartheta)
    }
}

pub fn bautin_curve(vartheta: f64) -> Result<BautinPoint> {
    if !(vartheta > 0.0) || !vartheta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "vartheta",
            reason: format!("must be positive and finite, got {vartheta}"),
        });
    }
    if vartheta == 1.0 {
        return Err(Error::InvalidParameter {
            name: "vartheta",
            reason: "vartheta = 1 is the doubly degenerate point with p1 = 0".into(),
        });
    }
    let t = vartheta;
    let sq = (1.0 + t) * (1.0 + t);
    Ok(BautinPoint {
        vartheta: t,
        a: sq / (2.0 * t),
        b: sq * (1.0 + t * t) / (8.0 * t * t),
        c: (1.0 - 3.0 * t - 3.0 * t * t + t * t * t + 2.0 * t * t.ln()) / (8.0 * t),
        u0: 0.25 * t.ln(),
    })
}
