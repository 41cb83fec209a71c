//! Liénard form of the reduced system around an equilibrium.
//!
//! With `x = u - u0` and `y = u'` the system becomes
//!
//! ```text
//! x' = y
//! y' = p(x) + y q(x)
//! p(x) = c + (a - b) phi(u0 + x) - u0 - x
//! q(x) = -2 + a phi'(u0 + x)
//! ```
//!
//! Taylor coefficients of `p` and `q` at the origin are obtained exactly from
//! the logistic derivative identity `phi^(k)(u) = P_k(phi(u))`, where the
//! `P_k` are integer polynomials.

use serde::{Deserialize, Serialize};

use crate::dynamics::PlanarField;
use crate::error::{Error, Result};
use crate::model::{sigmoid, sigmoid_slope, Equilibrium, Params};

/// Highest power of `x` kept for `p`.
pub const P_ORDER: usize = 7;
/// Highest power of `x` kept for `q`.
pub const Q_ORDER: usize = 6;

const MAX_DERIVATIVE: usize = 8;

/// Polynomial in `s = phi(u)` with integer coefficients, lowest power first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmoidPoly {
    pub coeffs: Vec<i64>,
}

impl SigmoidPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c as f64)
    }

    fn derivative(&self) -> SigmoidPoly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, &c)| c * j as i64)
            .collect();
        SigmoidPoly { coeffs }
    }

    /// Product with `4s - 4s^2`.
    fn times_logistic(&self) -> SigmoidPoly {
        let mut coeffs = vec![0i64; self.coeffs.len() + 2];
        for (j, &c) in self.coeffs.iter().enumerate() {
            coeffs[j + 1] += 4 * c;
            coeffs[j + 2] -= 4 * c;
        }
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0 {
            coeffs.pop();
        }
        SigmoidPoly { coeffs }
    }
}

/// `P_1 .. P_n` with `phi^(k)(u) = P_k(phi(u))`, via
/// `P_1 = 4s(1 - s)` and `P_{k+1} = P_k' * 4s(1 - s)`.
pub fn sigmoid_derivative_polys(n: usize) -> Result<Vec<SigmoidPoly>> {
    if !(1..=MAX_DERIVATIVE).contains(&n) {
        return Err(Error::OrderOutOfRange(n));
    }
    let mut polys = Vec::with_capacity(n);
    polys.push(SigmoidPoly { coeffs: vec![0, 4, -4] });
    while polys.len() < n {
        let next = polys.last().unwrap().derivative().times_logistic();
        polys.push(next);
    }
    Ok(polys)
}

/// Evaluates `phi^(k)(u0)` for `k = 1..=n` from the integer polynomials.
///
/// `P_k(1 - s) = (-1)^(k+1) P_k(s)`, so the polynomials are always evaluated
/// at the smaller of `phi(u0)` and `1 - phi(u0)` to avoid cancellation in the
/// tails.
fn sigmoid_derivatives(u0: f64, n: usize) -> Vec<f64> {
    let polys = sigmoid_derivative_polys(n).expect("order within range");
    let (s, flip) = if u0 > 0.0 {
        (sigmoid(-u0), true)
    } else {
        (sigmoid(u0), false)
    };
    polys
        .iter()
        .enumerate()
        .map(|(i, poly)| {
            let k = i + 1;
            let value = poly.eval(s);
            if flip && k % 2 == 0 {
                -value
            } else {
                value
            }
        })
        .collect()
}

/// Taylor data of the Liénard form at an equilibrium.
///
/// `p[k - 1]` is the coefficient of `x^k` in `p(x)` (k = 1..=7) and `q[k - 1]`
/// that of `x^k` in `q(x)` (k = 1..=6). `p0`, `q0` are the constant terms,
/// which vanish at a Hopf point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LienardCoeffs {
    pub p: [f64; P_ORDER],
    pub q: [f64; Q_ORDER],
    pub p0: f64,
    pub q0: f64,
    /// `exp(4 u0)`
    pub theta: f64,
    /// `a - b`
    pub d: f64,
}

impl LienardCoeffs {
    /// Coefficient of `x^k` in `p` (1-based, as in the focal formulas).
    pub fn p(&self, k: usize) -> f64 {
        self.p[k - 1]
    }

    /// Coefficient of `x^k` in `q`.
    pub fn q(&self, k: usize) -> f64 {
        self.q[k - 1]
    }
}

pub fn taylor_coeffs(p: &Params, eq: &Equilibrium) -> LienardCoeffs {
    taylor_coeffs_at(p, eq.u0)
}

pub fn taylor_coeffs_at(params: &Params, u0: f64) -> LienardCoeffs {
    let derivs = sigmoid_derivatives(u0, MAX_DERIVATIVE.min(P_ORDER.max(Q_ORDER + 1)));
    let d = params.d();
    let a = params.a();
    let mut factorial = 1.0;
    let mut p = [0.0; P_ORDER];
    let mut q = [0.0; Q_ORDER];
    for k in 1..=P_ORDER {
        factorial *= k as f64;
        p[k - 1] = d * derivs[k - 1] / factorial;
        if k <= Q_ORDER {
            q[k - 1] = a * derivs[k] / factorial;
        }
    }
    p[0] -= 1.0;
    LienardCoeffs {
        p,
        q,
        p0: params.c() + d * sigmoid(u0) - u0,
        q0: -2.0 + a * derivs[0],
        theta: (4.0 * u0).exp(),
        d,
    }
}

/// The Liénard system `x' = y, y' = p(x) + y q(x)` as closures over the
/// parameters and the base point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LienardSystem {
    pub params: Params,
    pub u0: f64,
}

impl LienardSystem {
    pub fn p(&self, x: f64) -> f64 {
        let pr = &self.params;
        pr.c() + pr.d() * sigmoid(self.u0 + x) - self.u0 - x
    }

    pub fn q(&self, x: f64) -> f64 {
        -2.0 + self.params.a() * sigmoid_slope(self.u0 + x)
    }

    /// Maps a state of the original system to Liénard coordinates.
    pub fn to_xy(&self, u: f64, v: f64) -> [f64; 2] {
        let pr = &self.params;
        [u - self.u0, -u + pr.a() * sigmoid(u) - pr.b() * v + pr.c()]
    }

    /// Inverse of [`Self::to_xy`].
    pub fn to_uv(&self, x: f64, y: f64) -> [f64; 2] {
        let pr = &self.params;
        let u = self.u0 + x;
        [u, (-u + pr.a() * sigmoid(u) + pr.c() - y) / pr.b()]
    }
}

impl PlanarField for LienardSystem {
    fn eval(&self, z: [f64; 2]) -> [f64; 2] {
        [z[1], self.p(z[0]) + z[1] * self.q(z[0])]
    }
}

pub fn to_lienard(p: &Params, eq: &Equilibrium) -> LienardSystem {
    LienardSystem { params: *p, u0: eq.u0 }
}

/// A point of the Hopf manifold `trace = 0` parametrised by `(u0, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopfPoint {
    pub u0: f64,
    pub theta: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Linear coefficient `p_1 = -1 + 4(a - b) theta / (1 + theta)^2`;
    /// negative at a complex focus.
    pub p1: f64,
    pub is_focus: bool,
}

impl HopfPoint {
    pub fn params(&self) -> Result<Params> {
        Params::new(self.a, self.b, self.c)
    }
}

/// `a = (1 + theta)^2 / (2 theta)` and `c = (b - a) theta / (1 + theta) + u0`
/// with `theta = exp(4 u0)`.
pub fn hopf_manifold(u0: f64, b: f64) -> Result<HopfPoint> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::InvalidParameter {
            name: "b",
            reason: format!("must be positive and finite, got {b}"),
        });
    }
    if !u0.is_finite() {
        return Err(Error::InvalidParameter {
            name: "u0",
            reason: format!("must be finite, got {u0}"),
        });
    }
    // (1 + theta)^2 / (2 theta) = 1 + cosh(4 u0)
    let a = 1.0 + (4.0 * u0).cosh();
    let c = (b - a) * sigmoid(u0) + u0;
    let p1 = -1.0 + (a - b) * sigmoid_slope(u0);
    Ok(HopfPoint {
        u0,
        theta: (4.0 * u0).exp(),
        a,
        b,
        c,
        p1,
        is_focus: p1 < 0.0,
    })
}

/// The two base points `u0 = ±acosh(a - 1) / 4` of the Hopf manifold in the
/// slice of fixed `a`, left first. `None` when `a < 2`.
pub fn hopf_branches(a: f64) -> Option<(f64, f64)> {
    if !(a >= 2.0) {
        return None;
    }
    let u = 0.25 * (a - 1.0).acosh();
    Some((-u, u))
}
