//! Trajectories, Poincaré return maps and limit-cycle search.

mod cycles;
mod integrator;
mod poincare;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{sigmoid, Params, State};

pub use cycles::{
    big_cycle_scan, cycle_census, default_r_max, find_cycles, CycleCensus, CycleSearch, CycleSearchConfig, LimitCycle,
    Stability,
};
pub use integrator::{DenseStep, IntegratorConfig, Stepper};
pub use poincare::{poincare_return, Return, ReturnConfig, SectionRay};

/// An autonomous vector field on the plane.
pub trait PlanarField: Sync {
    fn eval(&self, x: [f64; 2]) -> [f64; 2];
}

impl PlanarField for Params {
    #[inline]
    fn eval(&self, x: [f64; 2]) -> [f64; 2] {
        let phi = sigmoid(x[0]);
        [-x[0] + self.a() * phi - self.b() * x[1] + self.c(), -x[1] + phi]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    TimeLimit,
    Converged,
    Escaped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub u: f64,
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub rtol: f64,
    pub atol: f64,
    pub termination: Termination,
}

impl Trajectory {
    pub fn last(&self) -> State {
        let s = self.samples.last().expect("trajectory has its initial sample");
        State::new(s.u, s.v)
    }

    /// Writes `t,u,v` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "u", "v"])?;
        for s in &self.samples {
            w.write_record([fmt17(s.t), fmt17(s.u), fmt17(s.v)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Round-trip formatting with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Options for [`integrate_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions {
    pub integrator: IntegratorConfig,
    /// Sample spacing; `None` records every accepted step.
    pub sample_dt: Option<f64>,
    /// Stop once `|f(x)|` drops below this value.
    pub rest_tol: Option<f64>,
    /// Stop once `|x|` exceeds this value.
    pub escape_radius: f64,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self {
            integrator: IntegratorConfig::default(),
            sample_dt: None,
            rest_tol: None,
            escape_radius: 1e8,
        }
    }
}

/// Integrates the reduced system from `s0` over `[0, t_end]`, recording
/// every accepted step.
pub fn integrate(p: &Params, s0: State, t_end: f64, rtol: f64, atol: f64) -> Result<Trajectory> {
    let opts = IntegrateOptions {
        integrator: IntegratorConfig::with_tolerances(rtol, atol),
        ..IntegrateOptions::default()
    };
    integrate_with(p, s0.to_array(), t_end, &opts)
}

pub fn integrate_with<F: PlanarField + ?Sized>(
    field: &F,
    x0: [f64; 2],
    t_end: f64,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t_end",
            reason: format!("must be positive and finite, got {t_end}"),
        });
    }
    let cfg = opts.integrator;
    if !(cfg.rtol > 0.0 && cfg.rtol <= 1e-3 && cfg.atol > 0.0 && cfg.atol <= 1e-3) {
        return Err(Error::InvalidParameter {
            name: "tolerance",
            reason: format!("rtol and atol must lie in (0, 1e-3], got {} and {}", cfg.rtol, cfg.atol),
        });
    }
    if let Some(dt) = opts.sample_dt {
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter {
                name: "sample_dt",
                reason: format!("must be positive, got {dt}"),
            });
        }
    }
    let mut st = Stepper::new(field, 0.0, x0, cfg);
    let mut samples = vec![Sample {
        t: 0.0,
        u: x0[0],
        v: x0[1],
    }];
    let mut next_sample = opts.sample_dt.unwrap_or(0.0);
    let mut termination = Termination::TimeLimit;
    while st.t() < t_end {
        let step = st.step(t_end)?;
        match opts.sample_dt {
            None => samples.push(Sample {
                t: step.t1,
                u: step.y1[0],
                v: step.y1[1],
            }),
            Some(dt) => {
                while next_sample <= step.t1 * (1.0 + 1e-14) && next_sample <= t_end * (1.0 + 1e-14) {
                    let y = step.eval(next_sample.min(step.t1));
                    samples.push(Sample {
                        t: next_sample,
                        u: y[0],
                        v: y[1],
                    });
                    next_sample = dt * (samples.len() as f64);
                }
            }
        }
        let y = st.y();
        if y[0].hypot(y[1]) > opts.escape_radius {
            termination = Termination::Escaped;
            break;
        }
        if let Some(rest) = opts.rest_tol {
            let f = st.dydt();
            if f[0].hypot(f[1]) < rest {
                termination = Termination::Converged;
                break;
            }
        }
    }
    Ok(Trajectory {
        samples,
        rtol: cfg.rtol,
        atol: cfg.atol,
        termination,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{equilibria, reflect_state, symmetry_conjugate};

    #[test]
    fn equilibrium_stays_put() {
        let p = Params::new(16.0, 130.0, 111.165).unwrap();
        let eq = equilibria(&p, 1e-13)[0];
        let atol = 1e-12;
        let tr = integrate(&p, eq.state(), 50.0, 1e-10, atol).unwrap();
        for s in &tr.samples {
            assert!((s.u - eq.u0).abs() < 10.0 * atol && (s.v - eq.v0).abs() < 10.0 * atol);
        }
        assert_eq!(tr.termination, Termination::TimeLimit);
    }

    #[test]
    fn reflected_flows_coincide() {
        let p = Params::new(6.0, 3.0, 0.4).unwrap();
        let q = symmetry_conjugate(&p);
        let opts = IntegrateOptions {
            integrator: IntegratorConfig::with_tolerances(1e-10, 1e-12),
            sample_dt: Some(0.5),
            ..Default::default()
        };
        let s0 = State::new(0.3, 0.1);
        let a = integrate_with(&p, s0.to_array(), 50.0, &opts).unwrap();
        let b = integrate_with(&q, reflect_state(s0).to_array(), 50.0, &opts).unwrap();
        assert_eq!(a.samples.len(), b.samples.len());
        for (x, y) in a.samples.iter().zip(&b.samples) {
            let r = reflect_state(State::new(y.u, y.v));
            assert!((x.u - r.u).abs() < 1e-6 && (x.v - r.v).abs() < 1e-6);
        }
    }

    #[test]
    fn uniform_sampling_covers_interval() {
        let p = Params::new(3.0, 2.0, 0.0).unwrap();
        let opts = IntegrateOptions {
            sample_dt: Some(0.25),
            ..Default::default()
        };
        let tr = integrate_with(&p, [1.0, 0.2], 10.0, &opts).unwrap();
        assert_eq!(tr.samples.len(), 41);
        assert!((tr.samples[40].t - 10.0).abs() < 1e-12);
    }

    #[test]
    fn rest_detection_stops_early() {
        let p = Params::new(1.0, 1.0, 0.0).unwrap();
        let opts = IntegrateOptions {
            rest_tol: Some(1e-8),
            ..Default::default()
        };
        let tr = integrate_with(&p, [1.0, 0.0], 1e4, &opts).unwrap();
        assert_eq!(tr.termination, Termination::Converged);
    }

    #[test]
    fn rejects_bad_tolerances() {
        let p = Params::new(1.0, 1.0, 0.0).unwrap();
        assert!(integrate(&p, State::new(0.0, 0.0), 1.0, 0.1, 1e-9).is_err());
        assert!(integrate(&p, State::new(0.0, 0.0), -1.0, 1e-9, 1e-9).is_err());
    }

    #[test]
    fn csv_has_header_and_full_precision() {
        let p = Params::new(3.0, 2.0, 0.0).unwrap();
        let tr = integrate(&p, State::new(0.1, 0.2), 1.0, 1e-8, 1e-10).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,u,v"));
        let first: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(first, vec![0.0, 0.1, 0.2]);
    }
}
