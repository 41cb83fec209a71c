//! Limit-cycle detection from sign changes of the Poincaré displacement
//! `g(r) = P(r) - r` along a section ray.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Equilibrium, EquilibriumKind, Params, State};
use crate::roots;

use super::integrator::Stepper;
use super::poincare::{poincare_return, ReturnConfig, SectionRay};
use super::PlanarField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
    SemiStable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitCycle {
    /// Fixed point of the return map, measured along the section ray.
    pub section_radius: f64,
    pub period: f64,
    pub stability: Stability,
    /// `dP/dr` at the fixed point.
    pub floquet_slope: f64,
    /// Point where the cycle meets the section.
    pub crossing: State,
    /// Angle of the section ray.
    pub ray_angle: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleSearchConfig {
    /// Log-spaced radii in the initial displacement scan.
    pub grid_points: usize,
    /// Innermost radius as a fraction of `r_max`.
    pub r_min_ratio: f64,
    /// Times the grid may be doubled when sign changes crowd together.
    pub max_doublings: u32,
    /// `|floquet_slope - 1|` below which a tangential zero counts as a double cycle.
    pub semistable_slope_tol: f64,
    /// `|g| / r` below which a local minimum of `|g|` counts as a zero.
    pub tangency_tol: f64,
    /// Section angle; the ray of the left equilibrium of a three-equilibrium
    /// configuration is turned by an extra half turn.
    pub ray_angle: f64,
    pub ret: ReturnConfig,
}

impl Default for CycleSearchConfig {
    fn default() -> Self {
        Self {
            grid_points: 200,
            r_min_ratio: 1e-6,
            max_doublings: 2,
            semistable_slope_tol: 1e-5,
            tangency_tol: 1e-9,
            ray_angle: 0.0,
            ret: ReturnConfig::default(),
        }
    }
}

/// Distance from `origin` along the ray at `angle` to the edge of the
/// absorbing box `[c - b, c + a] x [0, 1]`, which contains every periodic orbit.
pub fn default_r_max(p: &Params, origin: State, angle: f64) -> f64 {
    let (dx, dy) = (angle.cos(), angle.sin());
    let bounds = [(origin.u, dx, p.c() - p.b(), p.c() + p.a()), (origin.v, dy, 0.0, 1.0)];
    bounds
        .iter()
        .filter(|(_, dir, _, _)| dir.abs() > 1e-12)
        .map(|&(x, dir, lo, hi)| if dir > 0.0 { (hi - x) / dir } else { (lo - x) / dir })
        .fold(f64::INFINITY, f64::min)
}

/// Displacement search on one ray.
#[derive(Debug, Clone, Copy, Default)]
pub struct CycleSearch {
    pub config: CycleSearchConfig,
}

struct Probe {
    r: f64,
    g: Option<f64>,
}

impl CycleSearch {
    pub fn new(config: CycleSearchConfig) -> Self {
        Self { config }
    }

    fn displacement<F: PlanarField + ?Sized>(&self, field: &F, ray: &SectionRay, r: f64) -> Option<(f64, f64)> {
        poincare_return(field, ray, r, &self.config.ret)
            .ok()
            .map(|ret| (ret.r_next - r, ret.period))
    }

    fn scan<F: PlanarField + ?Sized>(
        &self,
        field: &F,
        ray: &SectionRay,
        r_min: f64,
        r_max: f64,
        n: usize,
    ) -> Vec<Probe> {
        let ratio = (r_max / r_min).ln();
        (0..n)
            .into_par_iter()
            .map(|i| {
                let r = r_min * (ratio * i as f64 / (n - 1) as f64).exp();
                Probe {
                    r,
                    g: self.displacement(field, ray, r).map(|(g, _)| g),
                }
            })
            .collect()
    }

    /// All cycles crossing the ray at radii in `(r_max * r_min_ratio, r_max]`,
    /// inner to outer.
    pub fn on_ray<F: PlanarField + ?Sized>(&self, field: &F, ray: &SectionRay, r_max: f64) -> Result<Vec<LimitCycle>> {
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(Error::InvalidParameter {
                name: "r_max",
                reason: format!("must be positive and finite, got {r_max}"),
            });
        }
        let cfg = &self.config;
        let r_min = r_max * cfg.r_min_ratio;
        let mut n = cfg.grid_points.max(3);
        let mut grid = self.scan(field, ray, r_min, r_max, n);
        for _ in 0..cfg.max_doublings {
            let changes = sign_changes(&grid);
            if !changes.windows(2).any(|w| w[1] - w[0] < 3) {
                break;
            }
            n = 2 * n - 1;
            grid = self.scan(field, ray, r_min, r_max, n);
        }

        let mut brackets: Vec<(f64, f64, f64, f64)> = sign_changes(&grid)
            .into_iter()
            .map(|i| (grid[i].r, grid[i + 1].r, grid[i].g.unwrap(), grid[i + 1].g.unwrap()))
            .collect();
        let mut cycles = Vec::new();

        // local minima of |g| without a sign change: near-tangent or hidden pairs
        for i in 1..grid.len() - 1 {
            let (Some(g0), Some(g1), Some(g2)) = (grid[i - 1].g, grid[i].g, grid[i + 1].g) else {
                continue;
            };
            if g0.signum() != g1.signum() || g1.signum() != g2.signum() || g1 == 0.0 {
                continue;
            }
            if !(g1.abs() < g0.abs() && g1.abs() < g2.abs()) {
                continue;
            }
            let sign = g1.signum();
            let (lo, hi) = (grid[i - 1].r, grid[i + 1].r);
            let (rm, hm) = roots::golden_min(
                |r| {
                    self.displacement(field, ray, r)
                        .map_or(f64::INFINITY, |(g, _)| sign * g)
                },
                lo,
                hi,
                1e-9 * grid[i].r,
            );
            if !hm.is_finite() {
                continue;
            }
            if hm < 0.0 {
                brackets.push((lo, rm, g0, -sign * hm.abs()));
                brackets.push((rm, hi, -sign * hm.abs(), g2));
            } else if hm < cfg.tangency_tol * rm {
                if let Some(c) = self.tangent_cycle(field, ray, rm) {
                    cycles.push(c);
                }
            }
        }

        for (lo, hi, glo, ghi) in brackets {
            if let Some(c) = self.refine(field, ray, lo, hi, glo, ghi) {
                cycles.push(c);
            }
        }
        cycles.sort_by(|x, y| x.section_radius.total_cmp(&y.section_radius));
        Ok(cycles)
    }

    fn slope<F: PlanarField + ?Sized>(&self, field: &F, ray: &SectionRay, r: f64) -> Option<f64> {
        let h = 1e-6 * r;
        let (gp, _) = self.displacement(field, ray, r + h)?;
        let (gm, _) = self.displacement(field, ray, r - h)?;
        Some(1.0 + (gp - gm) / (2.0 * h))
    }

    fn tangent_cycle<F: PlanarField + ?Sized>(&self, field: &F, ray: &SectionRay, r: f64) -> Option<LimitCycle> {
        let (_, period) = self.displacement(field, ray, r)?;
        let slope = self.slope(field, ray, r)?;
        if (slope - 1.0).abs() >= self.config.semistable_slope_tol {
            return None;
        }
        let x = ray.point(r);
        Some(LimitCycle {
            section_radius: r,
            period,
            stability: Stability::SemiStable,
            floquet_slope: slope,
            crossing: State::new(x[0], x[1]),
            ray_angle: ray.angle(),
        })
    }

    fn refine<F: PlanarField + ?Sized>(
        &self,
        field: &F,
        ray: &SectionRay,
        lo: f64,
        hi: f64,
        glo: f64,
        ghi: f64,
    ) -> Option<LimitCycle> {
        let mut failed = false;
        let r = roots::illinois(
            |r| match self.displacement(field, ray, r) {
                Some((g, _)) => g,
                None => {
                    failed = true;
                    0.0
                }
            },
            lo,
            hi,
            glo,
            ghi,
            1e-13 * hi,
            1e-12 * lo,
        );
        if failed {
            return None;
        }
        let (_, period) = self.displacement(field, ray, r)?;
        let slope = self.slope(field, ray, r)?;
        let stability = if glo > 0.0 && ghi < 0.0 {
            Stability::Stable
        } else {
            Stability::Unstable
        };
        let x = ray.point(r);
        Some(LimitCycle {
            section_radius: r,
            period,
            stability,
            floquet_slope: slope,
            crossing: State::new(x[0], x[1]),
            ray_angle: ray.angle(),
        })
    }
}

fn sign_changes(grid: &[Probe]) -> Vec<usize> {
    (0..grid.len().saturating_sub(1))
        .filter(|&i| match (grid[i].g, grid[i + 1].g) {
            (Some(a), Some(b)) => (a > 0.0 && b < 0.0) || (a < 0.0 && b > 0.0),
            _ => false,
        })
        .collect()
}

/// Winding angle of the cycle around `point`, in radians.
pub(crate) fn winding_angle<F: PlanarField + ?Sized>(
    field: &F,
    cycle: &LimitCycle,
    point: State,
    cfg: &ReturnConfig,
) -> f64 {
    let mut st = Stepper::new(field, 0.0, cycle.crossing.to_array(), cfg.integrator);
    let angle_of = |x: [f64; 2]| (x[1] - point.v).atan2(x[0] - point.u);
    let mut last = angle_of(cycle.crossing.to_array());
    let mut total = 0.0;
    while st.t() < cycle.period {
        let Ok(step) = st.step(cycle.period) else {
            break;
        };
        for k in 1..=4 {
            let t = step.t0 + (step.t1 - step.t0) * k as f64 / 4.0;
            let a = angle_of(step.eval(t));
            let mut da = a - last;
            if da > std::f64::consts::PI {
                da -= 2.0 * std::f64::consts::PI;
            } else if da < -std::f64::consts::PI {
                da += 2.0 * std::f64::consts::PI;
            }
            total += da;
            last = a;
        }
    }
    total
}

/// Cycles around a single equilibrium on a horizontal ray (`+u` direction).
/// `r_max = None` uses [`default_r_max`].
pub fn find_cycles(p: &Params, eq: &Equilibrium, r_max: Option<f64>) -> Vec<LimitCycle> {
    let search = CycleSearch::default();
    cycles_around(&search, p, eq, search.config.ray_angle, r_max).unwrap_or_default()
}

fn cycles_around(
    search: &CycleSearch,
    p: &Params,
    eq: &Equilibrium,
    angle: f64,
    r_max: Option<f64>,
) -> Result<Vec<LimitCycle>> {
    // Near a saturated equilibrium v' vanishes in floating point along the
    // horizontal; the vertical ray, turned towards the inside of the box,
    // is transversal there.
    let (ray, angle) = match SectionRay::new(p, eq.state(), angle) {
        Ok(ray) => (ray, angle),
        Err(_) => {
            let turned = angle - std::f64::consts::FRAC_PI_2;
            (SectionRay::new(p, eq.state(), turned)?, turned)
        }
    };
    let r_max = r_max.unwrap_or_else(|| default_r_max(p, eq.state(), angle));
    search.on_ray(p, &ray, r_max)
}

/// Cycles enclosing every equilibrium. With a single equilibrium this is
/// [`find_cycles`].
pub fn big_cycle_scan(p: &Params, equilibria: &[Equilibrium], r_max: Option<f64>) -> Vec<LimitCycle> {
    match equilibria {
        [eq] => find_cycles(p, eq, r_max),
        _ => cycle_census_with(p, equilibria, &CycleSearchConfig::default(), r_max)
            .map(|c| c.enclosing)
            .unwrap_or_default(),
    }
}

/// Every limit cycle of a parameter point, grouped by what it surrounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleCensus {
    pub equilibria: Vec<Equilibrium>,
    /// Cycles surrounding exactly one non-saddle equilibrium, indexed like
    /// `equilibria` (saddles get an empty list).
    pub around: Vec<Vec<LimitCycle>>,
    /// Cycles surrounding all three equilibria.
    pub enclosing: Vec<LimitCycle>,
}

impl CycleCensus {
    pub fn total(&self) -> usize {
        self.around.iter().map(Vec::len).sum::<usize>() + self.enclosing.len()
    }

    pub fn all(&self) -> impl Iterator<Item = &LimitCycle> {
        self.around.iter().flatten().chain(self.enclosing.iter())
    }
}

pub fn cycle_census(p: &Params, equilibria: &[Equilibrium], cfg: &CycleSearchConfig) -> Result<CycleCensus> {
    cycle_census_with(p, equilibria, cfg, None)
}

fn cycle_census_with(
    p: &Params,
    equilibria: &[Equilibrium],
    cfg: &CycleSearchConfig,
    r_max: Option<f64>,
) -> Result<CycleCensus> {
    let search = CycleSearch::new(*cfg);
    match equilibria {
        [eq] => Ok(CycleCensus {
            equilibria: equilibria.to_vec(),
            around: vec![cycles_around(&search, p, eq, cfg.ray_angle, r_max)?],
            enclosing: Vec::new(),
        }),
        [left, saddle, right] => {
            if saddle.kind != EquilibriumKind::Saddle {
                return Err(Error::DegenerateParameters(format!(
                    "middle equilibrium at u0 = {} is {:?}, expected a saddle",
                    saddle.u0, saddle.kind
                )));
            }
            let encloses = |c: &LimitCycle| winding_angle(p, c, saddle.state(), &cfg.ret).abs() > std::f64::consts::PI;
            let left_all = cycles_around(&search, p, left, cfg.ray_angle + std::f64::consts::PI, r_max)?;
            let right_all = cycles_around(&search, p, right, cfg.ray_angle, r_max)?;
            let left_only: Vec<_> = left_all.into_iter().filter(|c| !encloses(c)).collect();
            let (enclosing, right_only): (Vec<_>, Vec<_>) = right_all.into_iter().partition(|c| encloses(c));
            Ok(CycleCensus {
                equilibria: equilibria.to_vec(),
                around: vec![left_only, Vec::new(), right_only],
                enclosing,
            })
        }
        _ => Err(Error::DegenerateParameters(format!(
            "{} equilibria (a fold of equilibria)",
            equilibria.len()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `r' = r (r^2 - 1)(r^2 - 4)(r^2 - 9) / 50`, `angle' = 1`: cycles at 1, 2, 3.
    struct ThreeCircles;

    impl PlanarField for ThreeCircles {
        fn eval(&self, x: [f64; 2]) -> [f64; 2] {
            let r2 = x[0] * x[0] + x[1] * x[1];
            let g = -(r2 - 1.0) * (r2 - 4.0) * (r2 - 9.0) / 50.0;
            [g * x[0] - x[1], g * x[1] + x[0]]
        }
    }

    #[test]
    fn finds_concentric_circles() {
        let ray = SectionRay::new(&ThreeCircles, State::new(0.0, 0.0), 0.0).unwrap();
        let search = CycleSearch::new(CycleSearchConfig {
            grid_points: 60,
            r_min_ratio: 1e-3,
            ..Default::default()
        });
        let cycles = search.on_ray(&ThreeCircles, &ray, 3.5).unwrap();
        let radii: Vec<f64> = cycles.iter().map(|c| c.section_radius).collect();
        assert_eq!(radii.len(), 3, "{radii:?}");
        for (r, expected) in radii.iter().zip([1.0, 2.0, 3.0]) {
            assert!((r - expected).abs() < 1e-9, "{r}");
        }
        let stab: Vec<_> = cycles.iter().map(|c| c.stability).collect();
        // g > 0 inside r = 1 is -(-1)(-4)(-9) > 0: unstable focus, stable first circle
        assert_eq!(stab, vec![Stability::Stable, Stability::Unstable, Stability::Stable]);
        assert!(cycles[0].floquet_slope < 1.0 && cycles[1].floquet_slope > 1.0);
        for c in &cycles {
            assert!((c.period - 2.0 * std::f64::consts::PI).abs() < 1e-8);
        }
    }

    #[test]
    fn detects_tangent_double_cycle() {
        // r' = -r (r^2 - 1)^2: a semistable circle at r = 1
        struct Double;
        impl PlanarField for Double {
            fn eval(&self, x: [f64; 2]) -> [f64; 2] {
                let r2 = x[0] * x[0] + x[1] * x[1];
                let g = -(r2 - 1.0) * (r2 - 1.0) / 4.0;
                [g * x[0] - x[1], g * x[1] + x[0]]
            }
        }
        let ray = SectionRay::new(&Double, State::new(0.0, 0.0), 0.0).unwrap();
        let search = CycleSearch::new(CycleSearchConfig {
            grid_points: 41,
            r_min_ratio: 1e-2,
            tangency_tol: 1e-7,
            ..Default::default()
        });
        let cycles = search.on_ray(&Double, &ray, 2.0).unwrap();
        assert_eq!(cycles.len(), 1, "{cycles:?}");
        assert_eq!(cycles[0].stability, Stability::SemiStable);
        assert!((cycles[0].section_radius - 1.0).abs() < 1e-3);
    }

    #[test]
    fn box_radius_reaches_edge() {
        let p = Params::new(16.0, 130.0, 111.165).unwrap();
        let o = State::new(0.85, 0.97);
        assert!((default_r_max(&p, o, 0.0) - (127.165 - 0.85)).abs() < 1e-12);
        assert!((default_r_max(&p, o, std::f64::consts::FRAC_PI_2) - 0.03).abs() < 1e-12);
        assert!((default_r_max(&p, o, std::f64::consts::PI) - (0.85 - (111.165 - 130.0))).abs() < 1e-9);
    }
}
