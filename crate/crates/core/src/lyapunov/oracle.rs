//! Numerical focal values from the Poincaré displacement near a weak focus.
//!
//! At a focus whose first `k - 1` focal values vanish the displacement along
//! a ray behaves like `g(r) = C r^(2k+1) + O(r^(2k+2))`. The oracle samples a
//! geometric ladder of radii, confirms the power law from the log-log slope
//! and reads the sign of `C` from a two-term least-squares fit.

use serde::{Deserialize, Serialize};

use crate::dynamics::{poincare_return, IntegratorConfig, PlanarField, ReturnConfig, SectionRay};
use crate::error::{Error, Result};
use crate::model::{sigmoid, Equilibrium, Params, State};

/// The reduced system written relative to an equilibrium `(u0, v0)`:
///
/// ```text
/// x' = -x + a D(x) - b y,   y' = -y + D(x)
/// D(x) = phi(u0 + x) - phi(u0) = s (1 - s) E / (1 + s E),  E = exp(4x) - 1
/// ```
///
/// Small displacements keep full relative precision this way.
struct EquilibriumFrame {
    a: f64,
    b: f64,
    s: f64,
}

impl PlanarField for EquilibriumFrame {
    fn eval(&self, x: [f64; 2]) -> [f64; 2] {
        let e = (4.0 * x[0]).exp_m1();
        let s = self.s;
        let dphi = s * (1.0 - s) * e / (1.0 + s * e);
        [-x[0] + self.a * dphi - self.b * x[1], -x[1] + dphi]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Radius ladders for `k = 1, 2, 3`.
    pub ladders: [(f64, f64); 3],
    pub rungs: usize,
    /// Multiplies every ladder.
    pub length_scale: f64,
    /// Accept when the log-log slope is within this of `2k + 1`.
    pub slope_tol: f64,
    /// Displacements below `noise * r` are treated as zero.
    pub noise: f64,
    /// Largest `|trace|` accepted as a weak focus.
    pub trace_tol: f64,
    pub ret: ReturnConfig,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            ladders: [(1e-3, 3e-2), (3e-3, 3e-2), (1e-2, 6e-2)],
            rungs: 8,
            length_scale: 1.0,
            slope_tol: 0.1,
            noise: 1e-12,
            trace_tol: 1e-8,
            ret: ReturnConfig {
                integrator: IntegratorConfig {
                    rtol: 1e-13,
                    atol: 1e-20,
                    h_max: 0.05,
                    ..IntegratorConfig::default()
                },
                ..ReturnConfig::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleFit {
    pub order: usize,
    /// -1, 0 or +1; positive means the focus repels.
    pub sign: i8,
    /// Fitted `C` in `g(r) ~ C r^(2k+1)`.
    pub coefficient: f64,
    /// Least-squares slope of `ln |g|` against `ln r`.
    pub slope: f64,
    /// RMS relative residual of the two-term fit.
    pub residual: f64,
    pub confident: bool,
    pub radii: Vec<f64>,
    pub displacements: Vec<f64>,
}

/// Oracle on the reduced system at the weak focus `eq`.
pub fn focal_oracle(p: &Params, eq: &Equilibrium, k: usize, cfg: &OracleConfig) -> Result<OracleFit> {
    if !(eq.det > 0.0) {
        return Err(Error::NotAFocus(format!("det = {} is not positive", eq.det)));
    }
    if eq.trace.abs() > cfg.trace_tol {
        return Err(Error::NotAFocus(format!("trace = {} is not zero", eq.trace)));
    }
    let frame = EquilibriumFrame {
        a: p.a(),
        b: p.b(),
        s: sigmoid(eq.u0),
    };
    focal_oracle_field(&frame, State::new(0.0, 0.0), k, cfg)
}

/// Oracle for an arbitrary planar field with a weak focus at `origin`,
/// sampled along the `+x` ray.
pub fn focal_oracle_field<F: PlanarField + ?Sized>(
    field: &F,
    origin: State,
    k: usize,
    cfg: &OracleConfig,
) -> Result<OracleFit> {
    if !(1..=3).contains(&k) {
        return Err(Error::OrderOutOfRange(k));
    }
    let ray = SectionRay::new(field, origin, 0.0)?;
    let (lo, hi) = cfg.ladders[k - 1];
    let (lo, hi) = (lo * cfg.length_scale, hi * cfg.length_scale);
    let n = cfg.rungs.max(3);
    let radii: Vec<f64> = (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect();
    let displacements = radii
        .iter()
        .map(|&r| poincare_return(field, &ray, r, &cfg.ret).map(|ret| ret.r_next - r))
        .collect::<Result<Vec<f64>>>()?;
    let power = (2 * k + 1) as i32;

    if radii.iter().zip(&displacements).all(|(r, g)| g.abs() < cfg.noise * r) {
        return Ok(OracleFit {
            order: k,
            sign: 0,
            coefficient: 0.0,
            slope: f64::NAN,
            residual: 0.0,
            confident: false,
            radii,
            displacements,
        });
    }

    let sign = displacements[0].signum();
    if displacements.iter().any(|g| g.signum() != sign) {
        return Err(Error::FitInconclusive(format!(
            "displacement changes sign along the ladder: {displacements:?}"
        )));
    }

    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = displacements.iter().map(|g| g.abs().ln()).collect();
    let (_, slope) = linear_fit(&xs, &ys);

    // g / r^(2k+1) = C + D r
    let scaled: Vec<f64> = radii
        .iter()
        .zip(&displacements)
        .map(|(r, g)| g / r.powi(power))
        .collect();
    let (coefficient, drift) = linear_fit(&radii, &scaled);
    let residual = (radii
        .iter()
        .zip(&scaled)
        .map(|(r, y)| ((y - coefficient - drift * r) / y).powi(2))
        .sum::<f64>()
        / n as f64)
        .sqrt();

    let confident = (slope - power as f64).abs() < cfg.slope_tol && coefficient.signum() == sign;
    let fit = OracleFit {
        order: k,
        sign: sign as i8,
        coefficient,
        slope,
        residual,
        confident,
        radii,
        displacements,
    };
    if !confident {
        return Err(Error::FitInconclusive(format!(
            "log-log slope {slope:.3} does not match order {power} (coefficient {coefficient:e})"
        )));
    }
    Ok(fit)
}

/// Ordinary least squares `y = a + b x`.
fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let b = sxy / sxx;
    (my - b * mx, b)
}
