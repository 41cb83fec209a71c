//! Return map on a half-line section through an equilibrium.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::State;
use crate::roots;

use super::integrator::{IntegratorConfig, Stepper};
use super::PlanarField;

/// The half-line `origin + r * direction`, `r > 0`, crossed by the flow in
/// the rotational sense given by `orientation` (+1 counter-clockwise).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionRay {
    pub origin: State,
    pub direction: [f64; 2],
    pub orientation: f64,
}

impl SectionRay {
    /// Ray at `angle` (radians, measured from the `+u` axis). The crossing
    /// orientation is read off the field just outside the origin.
    pub fn new<F: PlanarField + ?Sized>(field: &F, origin: State, angle: f64) -> Result<Self> {
        if !angle.is_finite() {
            return Err(Error::InvalidParameter {
                name: "angle",
                reason: "must be finite".into(),
            });
        }
        let direction = [angle.cos(), angle.sin()];
        let mut ray = Self {
            origin,
            direction,
            orientation: 1.0,
        };
        // a saturated sigmoid can make the flux round to zero very close in
        let scale = 1.0 + origin.u.abs().max(origin.v.abs());
        let n = ray.normal();
        for probe in [1e-6, 1e-4, 1e-2] {
            let f = field.eval(ray.point(probe * scale));
            let flux = n[0] * f[0] + n[1] * f[1];
            if flux != 0.0 && flux.is_finite() {
                ray.orientation = flux.signum();
                return Ok(ray);
            }
        }
        Err(Error::InvalidParameter {
            name: "angle",
            reason: "flow is tangent to the section near its origin".into(),
        })
    }

    /// Unit normal, the direction rotated by +90 degrees.
    pub fn normal(&self) -> [f64; 2] {
        [-self.direction[1], self.direction[0]]
    }

    pub fn point(&self, r: f64) -> [f64; 2] {
        [
            self.origin.u + r * self.direction[0],
            self.origin.v + r * self.direction[1],
        ]
    }

    /// `(along, across)` coordinates of `x` relative to the ray.
    pub fn coords(&self, x: [f64; 2]) -> (f64, f64) {
        let dx = [x[0] - self.origin.u, x[1] - self.origin.v];
        let n = self.normal();
        (
            dx[0] * self.direction[0] + dx[1] * self.direction[1],
            dx[0] * n[0] + dx[1] * n[1],
        )
    }

    pub fn angle(&self) -> f64 {
        self.direction[1].atan2(self.direction[0])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReturnConfig {
    pub integrator: IntegratorConfig,
    /// Give up after this much time without a return.
    pub t_max: f64,
    /// Treat `|f(x)| < rest_tol` as convergence to a rest point.
    pub rest_tol: f64,
    pub escape_radius: f64,
}

impl Default for ReturnConfig {
    fn default() -> Self {
        Self {
            integrator: IntegratorConfig {
                rtol: 1e-12,
                atol: 1e-14,
                ..IntegratorConfig::default()
            },
            t_max: 100.0,
            rest_tol: 1e-13,
            escape_radius: 1e6,
        }
    }
}

impl ReturnConfig {
    pub fn with_rtol(rtol: f64) -> Self {
        let mut cfg = Self::default();
        cfg.integrator.rtol = rtol;
        cfg.integrator.atol = rtol * 1e-2;
        cfg
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Return {
    pub r_next: f64,
    pub period: f64,
}

/// First return of the orbit through `ray.point(r)` to the section with the
/// ray's orientation. The departure itself is not counted.
pub fn poincare_return<F: PlanarField + ?Sized>(
    field: &F,
    ray: &SectionRay,
    r: f64,
    cfg: &ReturnConfig,
) -> Result<Return> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter {
            name: "r",
            reason: format!("must be positive and finite, got {r}"),
        });
    }
    let x0 = ray.point(r);
    let mut st = Stepper::new(field, 0.0, x0, cfg.integrator);
    let sigma = ray.orientation;
    let across = |x: [f64; 2]| sigma * ray.coords(x).1;
    let mut prev = 0.0;
    let mut departed = false;
    while st.t() < cfg.t_max {
        let step = st.step(cfg.t_max).map_err(|e| Error::NoReturn(e.to_string()))?;
        let cur = across(step.y1);
        if departed && prev < 0.0 && cur >= 0.0 {
            let t_hit = roots::illinois(
                |t| across(step.eval(t)),
                step.t0,
                step.t1,
                prev,
                cur,
                1e-15 * step.t1.max(1.0),
                0.0,
            );
            // polish with exact steps from the start of the bracketing step
            let mut tau = t_hit;
            let mut x = st.probe_from(step.y0, tau - step.t0);
            for _ in 0..3 {
                let eta = across(x);
                if eta.abs() < 1e-15 {
                    break;
                }
                let f = field.eval(x);
                let n = ray.normal();
                let rate = sigma * (n[0] * f[0] + n[1] * f[1]);
                if rate <= 0.0 {
                    break;
                }
                tau -= eta / rate;
                x = st.probe_from(step.y0, tau - step.t0);
            }
            let (along, _) = ray.coords(x);
            if along > 0.0 {
                return Ok(Return {
                    r_next: along,
                    period: tau,
                });
            }
        }
        if cur > 0.0 {
            departed = true;
        }
        prev = cur;
        let y = st.y();
        let f = st.dydt();
        if f[0].hypot(f[1]) < cfg.rest_tol {
            return Err(Error::NoReturn(format!(
                "converged to a rest point near ({}, {})",
                y[0], y[1]
            )));
        }
        if (y[0] - ray.origin.u).hypot(y[1] - ray.origin.v) > cfg.escape_radius {
            return Err(Error::NoReturn("escaped the search window".into()));
        }
    }
    Err(Error::NoReturn(format!("no return within t = {}", cfg.t_max)))
}
