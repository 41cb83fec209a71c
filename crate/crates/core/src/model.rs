//! The reduced two-neuron system
//!
//! ```text
//! u' = -u + a*phi(u) - b*v + c
//! v' = -v + phi(u),          phi(u) = 1 / (1 + exp(-4u))
//! ```
//!
//! together with the map from the original five-parameter network, the
//! point reflection `(u, v) -> (-u, 1 - v)`, the equilibrium solver and the
//! fold / Bogdanov-Takens residuals.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots;

/// Default threshold on `|trace|` and `|det|` below which an equilibrium is
/// reported as [`EquilibriumKind::Degenerate`].
pub const DEFAULT_DEGENERATE_TOL: f64 = 1e-9;

/// Logistic activation `1 / (1 + exp(-4u))`, evaluated without overflow.
pub fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-4.0 * u).exp())
    } else {
        let e = (4.0 * u).exp();
        e / (1.0 + e)
    }
}

/// `phi(u) * (1 - phi(u))`, accurate in both tails.
pub fn sigmoid_variance(u: f64) -> f64 {
    let e = (-4.0 * u.abs()).exp();
    e / ((1.0 + e) * (1.0 + e))
}

/// Derivative `phi'(u) = 4 phi (1 - phi)`.
pub fn sigmoid_slope(u: f64) -> f64 {
    4.0 * sigmoid_variance(u)
}

/// Parameters of the original network before reduction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OriginalParams {
    pub q11: f64,
    pub q12: f64,
    pub q21: f64,
    pub e1: f64,
    pub e2: f64,
}

impl OriginalParams {
    pub fn new(q11: f64, q12: f64, q21: f64, e1: f64, e2: f64) -> Result<Self> {
        for (name, value) in [("q11", q11), ("q12", q12), ("q21", q21)] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be positive and finite, got {value}"),
                });
            }
        }
        for (name, value) in [("e1", e1), ("e2", e2)] {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite, got {value}"),
                });
            }
        }
        Ok(Self { q11, q12, q21, e1, e2 })
    }
}

/// Affine change of state variables `u = u1`, `v = (u2 - e2) / q21`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateMap {
    pub q21: f64,
    pub e2: f64,
}

impl StateMap {
    pub fn apply(&self, u1: f64, u2: f64) -> State {
        State::new(u1, (u2 - self.e2) / self.q21)
    }

    pub fn invert(&self, s: State) -> (f64, f64) {
        (s.u, s.v * self.q21 + self.e2)
    }
}

/// Reduces the original network to the three-parameter system:
/// `a = q11`, `b = q12 q21`, `c = e1 - q12 e2`.
pub fn reduce_original(p: &OriginalParams) -> (Params, StateMap) {
    let params = Params::new(p.q11, p.q12 * p.q21, p.e1 - p.q12 * p.e2)
        .expect("positive couplings always reduce to valid parameters");
    (params, StateMap { q21: p.q21, e2: p.e2 })
}

/// A parameter point `(a, b, c)` with `a, b > 0`.
///
/// The reflected offset `b - a - c` is kept symbolic, so reflecting twice
/// gives back the original bits.
#[derive(Clone, Copy)]
pub struct Params {
    a: f64,
    b: f64,
    c: f64,
    mirrored: bool,
}

impl Params {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidParameter {
                name: "a",
                reason: format!("must be positive and finite, got {a}"),
            });
        }
        if !(b > 0.0) || !b.is_finite() {
            return Err(Error::InvalidParameter {
                name: "b",
                reason: format!("must be positive and finite, got {b}"),
            });
        }
        if !c.is_finite() {
            return Err(Error::InvalidParameter {
                name: "c",
                reason: format!("must be finite, got {c}"),
            });
        }
        Ok(Self {
            a,
            b,
            c,
            mirrored: false,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        if self.mirrored {
            -self.a + self.b - self.c
        } else {
            self.c
        }
    }

    /// `a - b`, the net self-excitation.
    pub fn d(&self) -> f64 {
        self.a - self.b
    }

    /// Signed side of the symmetry hyperplane, `a - b + 2c`.
    pub fn hyperplane_side(&self) -> f64 {
        self.a - self.b + 2.0 * self.c()
    }

    /// Same `(a, b)` with a different offset.
    pub fn with_c(&self, c: f64) -> Result<Self> {
        Self::new(self.a, self.b, c)
    }
}

impl fmt::Debug for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Params")
            .field("a", &self.a)
            .field("b", &self.b)
            .field("c", &self.c())
            .finish()
    }
}

impl PartialEq for Params {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b && self.c() == other.c()
    }
}

impl Serialize for Params {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("Params", 3)?;
        st.serialize_field("a", &self.a)?;
        st.serialize_field("b", &self.b)?;
        st.serialize_field("c", &self.c())?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Params {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            a: f64,
            b: f64,
            c: f64,
        }
        let raw = Raw::deserialize(deserializer)?;
        Params::new(raw.a, raw.b, raw.c).map_err(serde::de::Error::custom)
    }
}

/// A point of the `(u, v)` phase plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub u: f64,
    pub v: f64,
}

impl State {
    pub fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.u, self.v]
    }

    pub fn from_array(x: [f64; 2]) -> Self {
        Self { u: x[0], v: x[1] }
    }
}

/// Right-hand side of the reduced system.
pub fn vector_field(p: &Params, s: State) -> State {
    let phi = sigmoid(s.u);
    State::new(-s.u + p.a * phi - p.b * s.v + p.c(), -s.v + phi)
}

/// Point reflection `(u, v) -> (-u, 1 - v)` of the phase plane.
pub fn reflect_state(s: State) -> State {
    State::new(-s.u, 1.0 - s.v)
}

/// Parameters whose phase portrait is the point reflection of that of `p`:
/// `(a, b, c) -> (a, b, -a + b - c)`.
pub fn symmetry_conjugate(p: &Params) -> Params {
    Params {
        mirrored: !p.mirrored,
        ..*p
    }
}

/// Equilibrium residual `f(u) = u - (a - b) phi(u) - c`.
pub fn equilibrium_residual(p: &Params, u: f64) -> f64 {
    u - p.d() * sigmoid(u) - p.c()
}

/// `f'(u) = 1 - (a - b) phi'(u)`; equals the Jacobian determinant at an equilibrium.
pub fn equilibrium_residual_slope(p: &Params, u: f64) -> f64 {
    1.0 - p.d() * sigmoid_slope(u)
}

/// Jacobian trace `-2 + a phi'(u)` along the `v`-nullcline.
pub fn jacobian_trace(p: &Params, u: f64) -> f64 {
    -2.0 + p.a * sigmoid_slope(u)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumKind {
    StableNode,
    UnstableNode,
    StableFocus,
    UnstableFocus,
    Saddle,
    Degenerate,
}

impl EquilibriumKind {
    pub fn is_focus(self) -> bool {
        matches!(self, Self::StableFocus | Self::UnstableFocus)
    }

    pub fn is_stable(self) -> bool {
        matches!(self, Self::StableFocus | Self::StableNode)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub u0: f64,
    pub v0: f64,
    pub kind: EquilibriumKind,
    pub trace: f64,
    pub det: f64,
}

impl Equilibrium {
    pub fn state(&self) -> State {
        State::new(self.u0, self.v0)
    }

    /// `exp(4 u0)`.
    pub fn theta(&self) -> f64 {
        (4.0 * self.u0).exp()
    }
}

/// Linearisation at `(u0, phi(u0))` with the default degeneracy threshold.
pub fn classify_equilibrium(p: &Params, u0: f64) -> Equilibrium {
    classify_equilibrium_with(p, u0, DEFAULT_DEGENERATE_TOL)
}

pub fn classify_equilibrium_with(p: &Params, u0: f64, degenerate_tol: f64) -> Equilibrium {
    let trace = jacobian_trace(p, u0);
    let det = equilibrium_residual_slope(p, u0);
    let kind = if trace.abs() < degenerate_tol || det.abs() < degenerate_tol {
        EquilibriumKind::Degenerate
    } else if det < 0.0 {
        EquilibriumKind::Saddle
    } else {
        let focus = trace * trace < 4.0 * det;
        match (focus, trace < 0.0) {
            (true, true) => EquilibriumKind::StableFocus,
            (true, false) => EquilibriumKind::UnstableFocus,
            (false, true) => EquilibriumKind::StableNode,
            (false, false) => EquilibriumKind::UnstableNode,
        }
    };
    Equilibrium {
        u0,
        v0: sigmoid(u0),
        kind,
        trace,
        det,
    }
}

/// Critical points of `f` (where `f' = 0`), present only when `a - b > 1`.
/// Returned in increasing order: the local maximum of `f` first.
pub fn fold_points(d: f64) -> Option<(f64, f64)> {
    if d <= 1.0 {
        return None;
    }
    let root = (1.0 - 1.0 / d).sqrt();
    let logit = |phi: f64| 0.25 * (phi / (1.0 - phi)).ln();
    // phi < 1/2 branch sits left
    let lo = logit(0.5 * (1.0 - root));
    let hi = logit(0.5 * (1.0 + root));
    Some((lo, hi))
}

/// All equilibria, sorted by `u0`, each refined to `|f(u0)| < tol`.
/// A tangential (double) root is reported once with kind `Degenerate`.
pub fn equilibria(p: &Params, tol: f64) -> Vec<Equilibrium> {
    equilibria_with(p, tol, DEFAULT_DEGENERATE_TOL)
}

pub fn equilibria_with(p: &Params, tol: f64, degenerate_tol: f64) -> Vec<Equilibrium> {
    let d = p.d();
    let c = p.c();
    let f = |u: f64| equilibrium_residual(p, u);
    // every root satisfies u = c + d phi(u), so it lies between c + min(0, d) and c + max(0, d)
    let mut lo = c + d.min(0.0) - 1.0;
    let mut hi = c + d.max(0.0) + 1.0;

    let mut roots_found = Vec::with_capacity(3);
    match fold_points(d) {
        None => roots_found.push(refine(p, lo, hi, tol)),
        Some((umax, umin)) => {
            lo = lo.min(umax - 1.0);
            hi = hi.max(umin + 1.0);
            let fmax = f(umax);
            let fmin = f(umin);
            if fmax.abs() <= tol {
                roots_found.push(umax);
            } else if fmax > 0.0 {
                roots_found.push(refine(p, lo, umax, tol));
            }
            if fmax > tol && fmin < -tol {
                roots_found.push(refine(p, umax, umin, tol));
            }
            if fmin.abs() <= tol {
                roots_found.push(umin);
            } else if fmin < 0.0 {
                roots_found.push(refine(p, umin, hi, tol));
            }
        }
    }
    roots_found.sort_by(f64::total_cmp);
    roots_found.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * (1.0 + x.abs()));
    roots_found
        .into_iter()
        .map(|u0| classify_equilibrium_with(p, u0, degenerate_tol))
        .collect()
}

/// Bisection to a narrow bracket, then guarded Newton polishing.
fn refine(p: &Params, lo: f64, hi: f64, tol: f64) -> f64 {
    let f = |u: f64| equilibrium_residual(p, u);
    let (flo, fhi) = (f(lo), f(hi));
    let mut u = roots::illinois(f, lo, hi, flo, fhi, 1e-14 * (1.0 + lo.abs().max(hi.abs())), 0.0);
    for _ in 0..4 {
        let fu = f(u);
        if fu == 0.0 {
            break;
        }
        let slope = equilibrium_residual_slope(p, u);
        if slope == 0.0 {
            break;
        }
        let next = u - fu / slope;
        if !(next >= lo && next <= hi) || f(next).abs() >= fu.abs() {
            break;
        }
        u = next;
    }
    debug_assert!(f(u).abs() < tol.max(1e-12 * (1.0 + u.abs())));
    u
}

/// `(f(u0), f'(u0))`; both vanish on the saddle-node curves.
pub fn fold_residual(p: &Params, u0: f64) -> (f64, f64) {
    (equilibrium_residual(p, u0), equilibrium_residual_slope(p, u0))
}

/// `(f(u0), f'(u0), trace(u0))`; all three vanish at a Bogdanov-Takens point.
pub fn bt_condition(p: &Params, u0: f64) -> (f64, f64, f64) {
    let (f, df) = fold_residual(p, u0);
    (f, df, jacobian_trace(p, u0))
}
