//! Dormand-Prince 5(4) with the 4th-order continuous extension.

use crate::error::{Error, Result};

use super::PlanarField;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Tolerances and step limits for [`Stepper`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h_max: 0.1,
            max_steps: 2_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }
}

/// One accepted step together with its interpolant.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep {
    pub t0: f64,
    pub t1: f64,
    pub y0: [f64; 2],
    pub y1: [f64; 2],
    rcont: [[f64; 2]; 5],
}

impl DenseStep {
    /// Interpolated state at `t` in `[t0, t1]`.
    pub fn eval(&self, t: f64) -> [f64; 2] {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let s1 = 1.0 - s;
        let r = &self.rcont;
        std::array::from_fn(|i| r[0][i] + s * (r[1][i] + s1 * (r[2][i] + s * (r[3][i] + s1 * r[4][i]))))
    }
}

/// Adaptive stepper holding the current state; FSAL reuses the last stage.
pub struct Stepper<'a, F: PlanarField + ?Sized> {
    field: &'a F,
    cfg: IntegratorConfig,
    t: f64,
    y: [f64; 2],
    k1: [f64; 2],
    h: f64,
    steps: usize,
}

#[inline]
fn axpy(y: [f64; 2], h: f64, terms: &[(f64, [f64; 2])]) -> [f64; 2] {
    let mut out = y;
    for &(c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

impl<'a, F: PlanarField + ?Sized> Stepper<'a, F> {
    pub fn new(field: &'a F, t0: f64, y0: [f64; 2], cfg: IntegratorConfig) -> Self {
        let k1 = field.eval(y0);
        let mut st = Self {
            field,
            cfg,
            t: t0,
            y: y0,
            k1,
            h: 0.0,
            steps: 0,
        };
        st.h = st.initial_step();
        st
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> [f64; 2] {
        self.y
    }

    /// Derivative at the current state.
    pub fn dydt(&self) -> [f64; 2] {
        self.k1
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    fn scale(&self, y: [f64; 2], i: usize) -> f64 {
        self.cfg.atol + self.cfg.rtol * y[i].abs()
    }

    // Hairer-Norsett-Wanner starting step heuristic.
    fn initial_step(&self) -> f64 {
        let norm = |v: [f64; 2], y: [f64; 2]| -> f64 {
            (((v[0] / self.scale(y, 0)).powi(2) + (v[1] / self.scale(y, 1)).powi(2)) / 2.0).sqrt()
        };
        let d0 = norm(self.y, self.y);
        let d1 = norm(self.k1, self.y);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(self.cfg.h_max);
        let y1 = axpy(self.y, h0, &[(1.0, self.k1)]);
        let f1 = self.field.eval(y1);
        let d2 = norm([f1[0] - self.k1[0], f1[1] - self.k1[1]], self.y) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(self.cfg.h_max)
    }

    /// Raw Dormand-Prince step of size `h` from `(t, y)` with `k1 = f(y)`.
    /// Returns the 5th-order solution, the error vector and the stages
    /// needed for dense output.
    fn attempt(&self, y: [f64; 2], k1: [f64; 2], h: f64) -> ([f64; 2], [f64; 2], [[f64; 2]; 7]) {
        let f = self.field;
        let k2 = f.eval(axpy(y, h, &[(A21, k1)]));
        let k3 = f.eval(axpy(y, h, &[(A31, k1), (A32, k2)]));
        let k4 = f.eval(axpy(y, h, &[(A41, k1), (A42, k2), (A43, k3)]));
        let k5 = f.eval(axpy(y, h, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]));
        let k6 = f.eval(axpy(y, h, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)]));
        let y5 = axpy(y, h, &[(A71, k1), (A73, k3), (A74, k4), (A75, k5), (A76, k6)]);
        let k7 = f.eval(y5);
        let err = axpy(
            [0.0, 0.0],
            h,
            &[(E1, k1), (E3, k3), (E4, k4), (E5, k5), (E6, k6), (E7, k7)],
        );
        (y5, err, [k1, k2, k3, k4, k5, k6, k7])
    }

    /// 5th-order solution of a single step of size `h` from `y`, without
    /// touching the stepper state. Used to polish event locations.
    pub fn probe_from(&self, y: [f64; 2], h: f64) -> [f64; 2] {
        self.attempt(y, self.field.eval(y), h).0
    }

    /// Advances by one accepted step, never beyond `t_stop`.
    pub fn step(&mut self, t_stop: f64) -> Result<DenseStep> {
        let mut h = self.h.min(self.cfg.h_max);
        let mut last = false;
        if self.t + h >= t_stop {
            h = t_stop - self.t;
            last = true;
        }
        loop {
            if self.steps >= self.cfg.max_steps {
                return Err(Error::StepBudgetExhausted(self.cfg.max_steps));
            }
            if h.abs() <= 1e-14 * self.t.abs().max(1.0) {
                return Err(Error::StepSizeUnderflow { t: self.t });
            }
            self.steps += 1;
            let (y5, e, k) = self.attempt(self.y, self.k1, h);
            let err = {
                let s0 = self.cfg.atol + self.cfg.rtol * self.y[0].abs().max(y5[0].abs());
                let s1 = self.cfg.atol + self.cfg.rtol * self.y[1].abs().max(y5[1].abs());
                (((e[0] / s0).powi(2) + (e[1] / s1).powi(2)) / 2.0).sqrt()
            };
            if err <= 1.0 && y5.iter().all(|v| v.is_finite()) {
                let fac = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                let t0 = self.t;
                let t1 = if last { t_stop } else { self.t + h };
                let [k1, _, k3, k4, k5, k6, k7] = k;
                let y0 = self.y;
                let mut rcont = [[0.0; 2]; 5];
                for i in 0..2 {
                    let dy = y5[i] - y0[i];
                    let bspl = h * k1[i] - dy;
                    rcont[0][i] = y0[i];
                    rcont[1][i] = dy;
                    rcont[2][i] = bspl;
                    rcont[3][i] = dy - h * k7[i] - bspl;
                    rcont[4][i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                }
                self.t = t1;
                self.y = y5;
                self.k1 = k7;
                if !last {
                    self.h = (h * fac).min(self.cfg.h_max);
                }
                return Ok(DenseStep {
                    t0,
                    t1,
                    y0,
                    y1: y5,
                    rcont,
                });
            }
            let fac = if err.is_finite() {
                (0.9 * err.powf(-0.2)).clamp(0.1, 0.9)
            } else {
                0.1
            };
            h *= fac;
            last = false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Rotation;
    impl PlanarField for Rotation {
        fn eval(&self, x: [f64; 2]) -> [f64; 2] {
            [-x[1], x[0]]
        }
    }

    struct Decay;
    impl PlanarField for Decay {
        fn eval(&self, x: [f64; 2]) -> [f64; 2] {
            [-x[0], -2.0 * x[1]]
        }
    }

    #[test]
    fn rotation_is_accurate_over_one_turn() {
        let cfg = IntegratorConfig::with_tolerances(1e-12, 1e-14);
        let mut st = Stepper::new(&Rotation, 0.0, [1.0, 0.0], cfg);
        let t_end = 2.0 * std::f64::consts::PI;
        while st.t() < t_end {
            st.step(t_end).unwrap();
        }
        assert!((st.y()[0] - 1.0).abs() < 1e-10);
        assert!(st.y()[1].abs() < 1e-10);
    }

    #[test]
    fn dense_output_interpolates() {
        let cfg = IntegratorConfig::with_tolerances(1e-10, 1e-12);
        let mut st = Stepper::new(&Decay, 0.0, [1.0, 1.0], cfg);
        let step = st.step(10.0).unwrap();
        let tm = 0.5 * (step.t0 + step.t1);
        let y = step.eval(tm);
        assert!((y[0] - (-tm).exp()).abs() < 1e-9);
        assert!((y[1] - (-2.0 * tm).exp()).abs() < 1e-9);
        assert_eq!(step.eval(step.t0), step.y0);
        let end = step.eval(step.t1);
        assert!((end[0] - step.y1[0]).abs() < 1e-15);
    }

    #[test]
    fn probe_does_not_advance() {
        let cfg = IntegratorConfig::default();
        let st = Stepper::new(&Decay, 0.0, [1.0, 1.0], cfg);
        let y = st.probe_from([1.0, 1.0], 0.01);
        assert!((y[0] - (-0.01f64).exp()).abs() < 1e-12);
        assert_eq!(st.t(), 0.0);
    }
}
