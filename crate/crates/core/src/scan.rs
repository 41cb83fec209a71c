//! Bifurcation curves in a slice of fixed `a` and numerical maps of the
//! `(b, c)` plane.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{cycle_census, fmt17, CycleSearchConfig, LimitCycle, Stability};
use crate::error::{Error, Result};
use crate::lienard::{hopf_branches, hopf_manifold};
use crate::lyapunov::{bautin_curve, eval_poly, l1_poly, l2bar, largest_monomial};
use crate::model::{
    equilibria, equilibrium_residual, equilibrium_residual_slope, jacobian_trace, sigmoid, sigmoid_variance, Params,
};
use crate::portrait::{classify_portrait, is_catalogued, PortraitCode, PortraitConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    SaddleNode,
    Hopf,
    BautinPoint,
    BogdanovTakens,
    DoubleCycle,
}

/// Which neighbouring pair of cycles coalesces at a double cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DoubleCycleSide {
    /// Inner cycle of the pair is stable.
    StableFromInside,
    /// Outer cycle of the pair is stable.
    StableFromOutside,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleCycleInfo {
    pub side: DoubleCycleSide,
    /// Parameter distance between the bracket ends.
    pub bracket_width: f64,
    /// Radius of the merging pair on the side where it still exists.
    pub section_radius: f64,
    pub cycles_before: usize,
    pub cycles_after: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub kind: CurveKind,
    pub params: Params,
    /// `u0` for saddle-node, Hopf and BT samples, `vartheta` for Bautin
    /// points, the segment fraction for double cycles.
    pub aux: Option<f64>,
    /// Defining equations evaluated at the sample.
    pub residuals: Vec<f64>,
    /// Hopf samples: whether the equilibrium is a focus (`p_1 < 0`).
    pub focus: Option<bool>,
    /// Bautin points: second coefficient restricted to the curve.
    pub l2bar: Option<f64>,
    pub double_cycle: Option<DoubleCycleInfo>,
}

impl CurveSample {
    fn analytic(kind: CurveKind, params: Params, aux: f64, residuals: Vec<f64>) -> Self {
        Self {
            kind,
            params,
            aux: Some(aux),
            residuals,
            focus: None,
            l2bar: None,
            double_cycle: None,
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = if n > 1 { (hi - lo) / (n - 1) as f64 } else { 0.0 };
    (0..n).map(move |i| if i + 1 == n && n > 1 { hi } else { lo + step * i as f64 })
}

/// Folds of equilibria at fixed `a`, parametrised by the double root `u0`:
/// `b = a - 1 / phi'(u0)`, `c = u0 - (a - b) phi(u0)`. Samples with `b <= 0`
/// are dropped. Residuals are `(f, f')`.
pub fn sn_curve(a: f64, u0_range: (f64, f64), samples: usize) -> Vec<CurveSample> {
    linspace(u0_range.0, u0_range.1, samples)
        .filter_map(|u0| {
            let d = 1.0 / (4.0 * sigmoid_variance(u0));
            let b = a - d;
            let c = u0 - d * sigmoid(u0);
            let p = Params::new(a, b, c).ok()?;
            let residuals = vec![equilibrium_residual(&p, u0), equilibrium_residual_slope(&p, u0)];
            Some(CurveSample::analytic(CurveKind::SaddleNode, p, u0, residuals))
        })
        .collect()
}

/// The Hopf lines at fixed `a >= 2`: both base points `u0 = ±acosh(a - 1) / 4`
/// with `b` swept over `b_range`. Residuals are `(f, trace)`.
pub fn hopf_curve(a: f64, b_range: (f64, f64), samples: usize) -> Result<Vec<CurveSample>> {
    let (left, right) = hopf_branches(a).ok_or(Error::NoHopf(a))?;
    let bases: &[f64] = if left == right { &[left] } else { &[left, right] };
    let mut out = Vec::new();
    for &u0 in bases {
        for b in linspace(b_range.0, b_range.1, samples) {
            let Ok(h) = hopf_manifold(u0, b) else { continue };
            // keep the requested a exactly; the manifold formula reproduces it to rounding
            let Ok(p) = Params::new(a, b, h.c) else { continue };
            let residuals = vec![equilibrium_residual(&p, u0), jacobian_trace(&p, u0)];
            let mut s = CurveSample::analytic(CurveKind::Hopf, p, u0, residuals);
            s.focus = Some(h.is_focus);
            out.push(s);
        }
    }
    Ok(out)
}

/// Intersections of the Bautin curve with the slice `a = a_fixed`, larger
/// `vartheta` first. Residuals are `(f, trace, l1 / largest monomial)`.
pub fn bautin_points(a: f64) -> Vec<CurveSample> {
    // (1 + t)^2 = 2 a t
    let disc = (a - 1.0) * (a - 1.0) - 1.0;
    if !(disc > 0.0) {
        return Vec::new();
    }
    let hi = (a - 1.0) + disc.sqrt();
    [hi, 1.0 / hi]
        .into_iter()
        .filter_map(|t| {
            let bp = bautin_curve(t).ok()?;
            let p = Params::new(a, bp.b, bp.c).ok()?;
            let l1 = l1_poly(p.d());
            let residuals = vec![
                equilibrium_residual(&p, bp.u0),
                jacobian_trace(&p, bp.u0),
                eval_poly(&l1, t) / largest_monomial(&l1, t),
            ];
            let mut s = CurveSample::analytic(CurveKind::BautinPoint, p, t, residuals);
            s.l2bar = Some(l2bar(t));
            Some(s)
        })
        .collect()
}

/// Bogdanov-Takens points at fixed `a > 2`: `trace = f = f' = 0`, which
/// forces `b = a / 2`. Residuals are `(f, f', trace)`.
pub fn bt_points(a: f64) -> Vec<CurveSample> {
    let Some((left, right)) = hopf_branches(a) else {
        return Vec::new();
    };
    let bases: &[f64] = if left == right { &[left] } else { &[left, right] };
    bases
        .iter()
        .filter_map(|&u0| {
            let d = 1.0 / (4.0 * sigmoid_variance(u0));
            let p = Params::new(a, a - d, u0 - d * sigmoid(u0)).ok()?;
            let residuals = vec![
                equilibrium_residual(&p, u0),
                equilibrium_residual_slope(&p, u0),
                jacobian_trace(&p, u0),
            ];
            Some(CurveSample::analytic(CurveKind::BogdanovTakens, p, u0, residuals))
        })
        .collect()
}

fn lerp(p: &Params, q: &Params, s: f64) -> Result<Params> {
    Params::new(
        p.a() + s * (q.a() - p.a()),
        p.b() + s * (q.b() - p.b()),
        p.c() + s * (q.c() - p.c()),
    )
}

fn distance(p: &Params, q: &Params) -> f64 {
    ((p.a() - q.a()).powi(2) + (p.b() - q.b()).powi(2) + (p.c() - q.c()).powi(2)).sqrt()
}

fn census_cycles(p: &Params, cfg: &CycleSearchConfig) -> Result<Vec<LimitCycle>> {
    let eqs = equilibria(p, 1e-13);
    Ok(cycle_census(p, &eqs, cfg)?.all().copied().collect())
}

/// Double cycle on the segment `[p_start, p_end]`, located by bisection on
/// the number of limit cycles. The endpoint counts must differ by two.
/// Bisection stops early once a midpoint shows a semi-stable cycle; the
/// reported `bracket_width` is then wider than `tol`.
pub fn snpo_locate(p_start: &Params, p_end: &Params, tol: f64) -> Result<CurveSample> {
    snpo_locate_with(p_start, p_end, tol, &CycleSearchConfig::default())
}

pub fn snpo_locate_with(p_start: &Params, p_end: &Params, tol: f64, cfg: &CycleSearchConfig) -> Result<CurveSample> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: format!("must be positive, got {tol}"),
        });
    }
    let start = census_cycles(p_start, cfg)?;
    let end = census_cycles(p_end, cfg)?;
    let (n0, n1) = (start.len(), end.len());
    if n0.abs_diff(n1) != 2 {
        return Err(Error::Precondition(format!(
            "cycle counts at the endpoints are {n0} and {n1}; a double cycle needs a difference of two"
        )));
    }
    let length = distance(p_start, p_end);
    let (mut lo, mut hi) = (0.0, 1.0);
    let (mut lo_cycles, mut hi_cycles) = (start, end);
    while (hi - lo) * length > tol {
        let mid = 0.5 * (lo + hi);
        let cycles = census_cycles(&lerp(p_start, p_end, mid)?, cfg)?;
        if cycles.len() == n0 {
            lo = mid;
            lo_cycles = cycles;
        } else if cycles.len() == n1 {
            hi = mid;
            hi_cycles = cycles;
        } else if cycles.iter().any(|c| c.stability == Stability::SemiStable) {
            // the merging pair is resolved as one tangency: the bracket is as
            // tight as the cycle search can make it
            break;
        } else {
            return Err(Error::CountNotMonotone {
                start: n0,
                end: n1,
                interior: cycles.len(),
            });
        }
    }
    let more = if n0 > n1 { &lo_cycles } else { &hi_cycles };
    let fewer = if n0 > n1 { &hi_cycles } else { &lo_cycles };
    let (side, radius) = merging_pair(more, fewer)?;
    let mid = 0.5 * (lo + hi);
    Ok(CurveSample {
        kind: CurveKind::DoubleCycle,
        params: lerp(p_start, p_end, mid)?,
        aux: Some(mid),
        residuals: vec![(hi - lo) * length],
        focus: None,
        l2bar: None,
        double_cycle: Some(DoubleCycleInfo {
            side,
            bracket_width: (hi - lo) * length,
            section_radius: radius,
            cycles_before: n0,
            cycles_after: n1,
        }),
    })
}

/// The adjacent pair in `more` that has no counterpart in `fewer`: the pair
/// whose removal leaves the stability sequence of `fewer` and, among those,
/// the closest in radius.
fn merging_pair(more: &[LimitCycle], fewer: &[LimitCycle]) -> Result<(DoubleCycleSide, f64)> {
    let target: Vec<Stability> = fewer.iter().map(|c| c.stability).collect();
    (0..more.len().saturating_sub(1))
        .filter(|&i| {
            let rest: Vec<Stability> = more
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i && j != i + 1)
                .map(|(_, c)| c.stability)
                .collect();
            rest == target
        })
        .min_by(|&i, &j| {
            let gap = |k: usize| (more[k + 1].section_radius - more[k].section_radius) / more[k + 1].section_radius;
            gap(i).total_cmp(&gap(j))
        })
        .map(|i| {
            let side = if more[i].stability == Stability::Stable {
                DoubleCycleSide::StableFromInside
            } else {
                DoubleCycleSide::StableFromOutside
            };
            (side, 0.5 * (more[i].section_radius + more[i + 1].section_radius))
        })
        .ok_or_else(|| Error::FitInconclusive("no adjacent pair of cycles accounts for the count change".into()))
}

/// Writes `kind,aux,a,b,c,residual,flag` rows. `flag` is the focus flag for
/// Hopf samples, the sign of `l2bar` for Bautin points and the side of a
/// double cycle.
pub fn write_curves_csv<W: Write>(samples: &[CurveSample], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["kind", "aux", "a", "b", "c", "residual", "flag"])?;
    for s in samples {
        let kind = serde_json::to_value(s.kind).expect("unit enum serializes");
        let flag = match (s.focus, s.l2bar, s.double_cycle) {
            (Some(f), _, _) => if f { "focus" } else { "saddle" }.to_string(),
            (_, Some(l), _) => if l > 0.0 { "l2_positive" } else { "l2_negative" }.to_string(),
            (_, _, Some(dc)) => serde_json::to_value(dc.side)
                .expect("unit enum serializes")
                .as_str()
                .unwrap_or_default()
                .to_string(),
            _ => String::new(),
        };
        w.write_record([
            kind.as_str().unwrap_or_default().to_string(),
            s.aux.map(fmt17).unwrap_or_default(),
            fmt17(s.params.a()),
            fmt17(s.params.b()),
            fmt17(s.params.c()),
            fmt17(s.max_residual()),
            flag,
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "detail", rename_all = "snake_case")]
pub enum Cell {
    Code(PortraitCode),
    /// Too close to a bifurcation to classify.
    Degenerate(String),
    /// Any other numerical failure.
    Failed(String),
}

impl Cell {
    pub fn code(&self) -> Option<&PortraitCode> {
        match self {
            Cell::Code(c) => Some(c),
            _ => None,
        }
    }
}

/// Portrait codes on a `(b, c)` grid at fixed `a`. Grid lines include both
/// ends of each range; cells are stored row by row in `c`, then `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionMap {
    pub a: f64,
    pub b_range: (f64, f64),
    pub c_range: (f64, f64),
    pub nb: usize,
    pub nc: usize,
    pub cells: Vec<Cell>,
}

impl RegionMap {
    pub fn b_at(&self, i: usize) -> f64 {
        linspace(self.b_range.0, self.b_range.1, self.nb)
            .nth(i)
            .expect("index in range")
    }

    pub fn c_at(&self, j: usize) -> f64 {
        linspace(self.c_range.0, self.c_range.1, self.nc)
            .nth(j)
            .expect("index in range")
    }

    pub fn cell(&self, i: usize, j: usize) -> &Cell {
        &self.cells[j * self.nb + i]
    }

    /// Distinct codes with their cell counts.
    pub fn codes(&self) -> BTreeMap<String, usize> {
        let mut m = BTreeMap::new();
        for c in self.cells.iter().filter_map(Cell::code) {
            *m.entry(c.to_string()).or_insert(0) += 1;
        }
        m
    }

    pub fn uncatalogued(&self) -> Vec<String> {
        let mut v: Vec<String> = self
            .cells
            .iter()
            .filter_map(Cell::code)
            .filter(|c| !is_catalogued(c))
            .map(|c| c.to_string())
            .collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn count_degenerate(&self) -> usize {
        self.cells.iter().filter(|c| matches!(c, Cell::Degenerate(_))).count()
    }

    pub fn count_failed(&self) -> usize {
        self.cells.iter().filter(|c| matches!(c, Cell::Failed(_))).count()
    }

    /// `i,j,b,c,code` rows; degenerate and failed cells carry the markers
    /// `degenerate` and `failed`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["i", "j", "b", "c", "code"])?;
        for j in 0..self.nc {
            for i in 0..self.nb {
                let code = match self.cell(i, j) {
                    Cell::Code(c) => c.to_string(),
                    Cell::Degenerate(_) => "degenerate".into(),
                    Cell::Failed(_) => "failed".into(),
                };
                w.write_record([
                    i.to_string(),
                    j.to_string(),
                    fmt17(self.b_at(i)),
                    fmt17(self.c_at(j)),
                    code,
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Summary of the codes found, suitable as a plot legend.
    pub fn legend(&self) -> serde_json::Value {
        let codes: serde_json::Map<String, serde_json::Value> = self
            .codes()
            .into_iter()
            .map(|(code, count)| {
                let catalogued = code.parse().map(|c| is_catalogued(&c)).unwrap_or(false);
                (code, serde_json::json!({ "cells": count, "catalogued": catalogued }))
            })
            .collect();
        serde_json::json!({
            "a": self.a,
            "b_range": [self.b_range.0, self.b_range.1],
            "c_range": [self.c_range.0, self.c_range.1],
            "resolution": [self.nb, self.nc],
            "codes": codes,
            "degenerate": self.count_degenerate(),
            "failed": self.count_failed(),
        })
    }
}

/// Classifies every grid point. Per-cell failures are recorded in the map.
pub fn region_scan(
    a: f64,
    b_range: (f64, f64),
    c_range: (f64, f64),
    resolution: (usize, usize),
    cfg: &PortraitConfig,
) -> Result<RegionMap> {
    let (nb, nc) = resolution;
    if nb == 0 || nc == 0 {
        return Err(Error::InvalidParameter {
            name: "resolution",
            reason: "must be positive in both directions".into(),
        });
    }
    if !(b_range.1 > b_range.0) || !(c_range.1 > c_range.0) {
        return Err(Error::InvalidParameter {
            name: "range",
            reason: format!("extents must be positive, got b {b_range:?} and c {c_range:?}"),
        });
    }
    let mut map = RegionMap {
        a,
        b_range,
        c_range,
        nb,
        nc,
        cells: Vec::new(),
    };
    let points: Vec<(f64, f64)> = (0..nc)
        .flat_map(|j| (0..nb).map(move |i| (i, j)))
        .map(|(i, j)| (map.b_at(i), map.c_at(j)))
        .collect();
    map.cells = points
        .into_par_iter()
        .map(
            |(b, c)| match Params::new(a, b, c).and_then(|p| classify_portrait(&p, cfg)) {
                Ok(code) => Cell::Code(code),
                Err(Error::DegenerateParameters(why)) => Cell::Degenerate(why),
                Err(e) => Cell::Failed(e.to_string()),
            },
        )
        .collect();
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::symmetry_conjugate;

    #[test]
    fn saddle_node_samples_are_double_roots() {
        let samples = sn_curve(16.0, (-2.0, 2.0), 101);
        assert!(!samples.is_empty());
        for s in &samples {
            assert!(s.max_residual() < 1e-10, "{s:?}");
            assert!(s.params.d() >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn saddle_node_curve_maps_to_itself_under_symmetry() {
        for s in sn_curve(16.0, (-1.0, 1.0), 21) {
            let q = symmetry_conjugate(&s.params);
            let u0 = -s.aux.unwrap();
            assert!(equilibrium_residual(&q, u0).abs() < 1e-10);
            assert!(equilibrium_residual_slope(&q, u0).abs() < 1e-10);
        }
    }

    #[test]
    fn hopf_samples_have_zero_trace() {
        let samples = hopf_curve(16.0, (1.0, 200.0), 50).unwrap();
        assert_eq!(samples.len(), 100);
        for s in &samples {
            assert!(s.residuals[1].abs() < 1e-12);
            assert!(s.max_residual() < 1e-10);
        }
        // the focus inequality holds once b exceeds a - 1 / phi'(u0) = a / 2
        assert!(samples
            .iter()
            .filter(|s| s.params.b() > 8.0)
            .all(|s| s.focus == Some(true)));
    }

    #[test]
    fn hopf_requires_a_at_least_two() {
        assert_eq!(hopf_curve(1.9, (1.0, 2.0), 3), Err(Error::NoHopf(1.9)));
        let single = hopf_curve(2.0, (1.0, 2.0), 3).unwrap();
        assert_eq!(single.len(), 3);
        assert!(single.iter().all(|s| s.aux == Some(0.0)));
    }

    #[test]
    fn bautin_points_at_the_codim_three_slice() {
        let (t1, _) = crate::lyapunov::l2bar_roots();
        let a1 = (1.0 + t1).powi(2) / (2.0 * t1);
        let pts = bautin_points(a1);
        assert_eq!(pts.len(), 2);
        for s in &pts {
            assert!(s.l2bar.unwrap().abs() < 1e-6 * l2bar(s.aux.unwrap()).abs().max(1e6));
        }
        assert!(bautin_points(1.99).is_empty());
    }

    #[test]
    fn dh_points_at_a16_have_positive_l2bar() {
        let pts = bautin_points(16.0);
        assert_eq!(pts.len(), 2);
        for s in &pts {
            assert!(s.max_residual() < 1e-10, "{s:?}");
            assert!(s.l2bar.unwrap() > 0.0);
        }
        assert!(pts[0].aux.unwrap() > crate::lyapunov::l2bar_roots().0);
        assert!((pts[0].params.b() - 120.0).abs() < 0.5);
    }

    #[test]
    fn bt_points_have_b_half_a() {
        let pts = bt_points(16.0);
        assert_eq!(pts.len(), 2);
        for s in &pts {
            assert!((s.params.b() - 8.0).abs() < 1e-12);
            assert!(s.max_residual() < 1e-10);
        }
    }

    #[test]
    fn snpo_needs_count_change_of_two() {
        let p = Params::new(16.0, 130.0, 111.165).unwrap();
        assert!(matches!(snpo_locate(&p, &p, 1e-6), Err(Error::Precondition(_))));
    }

    #[test]
    fn region_scan_rejects_empty_window() {
        let cfg = PortraitConfig::default();
        assert!(region_scan(16.0, (1.0, 1.0), (0.0, 1.0), (2, 2), &cfg).is_err());
        assert!(region_scan(16.0, (1.0, 2.0), (0.0, 1.0), (0, 2), &cfg).is_err());
    }

    #[test]
    fn curves_csv_has_header() {
        let mut buf = Vec::new();
        write_curves_csv(&bautin_points(16.0), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("kind,aux,a,b,c,residual,flag\n"));
        assert!(text.contains("bautin_point"));
        assert!(text.contains("l2_positive"));
    }
}
