//! Acceptance gate: one line per criterion, non-zero exit if any fails.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twoneuron::dynamics::{
    find_cycles, integrate_with, CycleSearch, CycleSearchConfig, IntegrateOptions, IntegratorConfig, ReturnConfig,
    SectionRay, Stability,
};
use twoneuron::lienard::hopf_manifold;
use twoneuron::lyapunov::{
    bautin_curve, cross_check, eval_poly, focal_oracle, generic_scale, l1_poly, l2_poly, l2bar, l2bar_roots,
    largest_monomial, lyapunov_closed, OracleConfig,
};
use twoneuron::model::{classify_equilibrium, reflect_state, symmetry_conjugate};
use twoneuron::portrait::{classify_portrait, is_catalogued, PortraitConfig};
use twoneuron::scan::{bautin_points, hopf_curve, region_scan, sn_curve, Cell};
use twoneuron::{equilibria, EquilibriumKind, Params, State};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn quartic_roots() -> Outcome {
    let (t1, t2) = l2bar_roots();
    let w = 7.0 + 3.0 * 5f64.sqrt();
    let ok = (t1 - 13.6349).abs() < 1e-4
        && (t2 - 0.0733414).abs() < 1e-4
        && (t1 * t2 - 1.0).abs() < 1e-12
        && (t1 + t2 - w).abs() < 1e-12;
    check(
        ok,
        format!(
            "theta1 = {t1:.10}, theta2 = {t2:.10}, product - 1 = {:.1e}, sum - (7+3 sqrt5) = {:.1e}",
            t1 * t2 - 1.0,
            t1 + t2 - w
        ),
    )
}

fn codim3_points() -> Outcome {
    let (t1, t2) = l2bar_roots();
    let p = bautin_curve(t1).map_err(|e| e.to_string())?;
    let q = bautin_curve(t2).map_err(|e| e.to_string())?;
    let side = |a: f64, b: f64, c: f64| a - b + 2.0 * c;
    let ok = (p.a - 7.8541).abs() < 1e-3
        && (p.b - 26.9164).abs() < 1e-3
        && (p.c - 18.4129).abs() < 1e-3
        && (q.c - 0.64937).abs() < 1e-4
        && (q.a - p.a).abs() < 1e-9
        && (q.b - p.b).abs() < 1e-9
        && side(p.a, p.b, p.c) > 0.0
        && side(q.a, q.b, q.c) < 0.0;
    check(
        ok,
        format!(
            "(a, b, c)1 = ({:.6}, {:.6}, {:.6}), c2 = {:.6}, a - b + 2c = {:+.4} / {:+.4}",
            p.a,
            p.b,
            p.c,
            q.c,
            side(p.a, p.b, p.c),
            side(q.a, q.b, q.c)
        ),
    )
}

fn bautin_theta_samples(n: usize) -> Vec<f64> {
    // log-uniform on [1e-3, 1e3], skipping vartheta = 1
    (0..n)
        .map(|i| 1e-3 * 1e6f64.powf((i as f64 + 0.5) / n as f64))
        .filter(|t| (t - 1.0).abs() > 1e-12)
        .collect()
}

fn l1_vanishes_on_curve() -> Outcome {
    let mut worst = 0.0f64;
    let samples = bautin_theta_samples(1000);
    for &t in &samples {
        let bp = bautin_curve(t).map_err(|e| e.to_string())?;
        let poly = l1_poly(bp.d());
        worst = worst.max(eval_poly(&poly, t).abs() / largest_monomial(&poly, t));
    }
    check(
        worst < 1e-9,
        format!("{} samples, max |l1| / largest monomial = {worst:.2e}", samples.len()),
    )
}

fn cross_source_agreement() -> Outcome {
    const FLOOR: f64 = 1e-8;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut compared, mut positive, mut mismatches) = (0, 0, Vec::new());
    while compared < 1000 {
        let u0: f64 = rng.gen_range(-1.5..1.5);
        let a = 1.0 + (4.0 * u0).cosh();
        // the focus side of the manifold is d < a / 2
        let d = rng.gen_range(-4.0 * a..0.499 * a);
        let theta = (4.0 * u0).exp();
        let x = cross_check(theta, d, FLOOR).map_err(|e| e.to_string())?;
        let scale = largest_monomial(&l1_poly(d), theta);
        if x.closed.l1.abs() <= FLOOR * scale {
            continue;
        }
        compared += 1;
        positive += usize::from(x.closed.l1 > 0.0);
        if x.generic.l1.signum() != x.closed.l1.signum() {
            mismatches.push((theta, d));
        }
    }
    // on the Bautin curve: l1 vanishes in both routes, l2 follows l2bar
    let mut curve_failures = Vec::new();
    let curve = bautin_theta_samples(200);
    for &t in &curve {
        let bp = bautin_curve(t).map_err(|e| e.to_string())?;
        let x = cross_check(t, bp.d(), FLOOR).map_err(|e| e.to_string())?;
        let k = generic_scale(t);
        let m1 = largest_monomial(&l1_poly(bp.d()), t);
        let m2 = largest_monomial(&l2_poly(bp.d()), t);
        let both_zero = x.closed.l1.abs() <= FLOOR * m1 && x.generic.l1.abs() <= FLOOR * k[0] * m1;
        let bar = l2bar(t);
        let sign_ok = bar.abs() <= FLOOR * m2 || x.generic.l2.signum() == bar.signum();
        if !(both_zero && sign_ok) {
            curve_failures.push(t);
        }
    }
    check(
        mismatches.is_empty() && curve_failures.is_empty() && positive > 0 && positive < compared,
        format!(
            "{compared} Hopf points ({positive} with l1 > 0): {} sign mismatches; {} Bautin points: {} failures",
            mismatches.len(),
            curve.len(),
            curve_failures.len()
        ),
    )
}

fn oracle_validation() -> Outcome {
    let cfg = OracleConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut hopf_ok, mut hopf_total, mut signs) = (0, 0, BTreeSet::new());
    let mut failures = Vec::new();
    while hopf_total < 12 {
        let u0: f64 = rng.gen_range(-1.0..1.0);
        let a = 1.0 + (4.0 * u0).cosh();
        let d = rng.gen_range(-3.0 * a..0.45 * a);
        let h = hopf_manifold(u0, a - d).map_err(|e| e.to_string())?;
        let l1 = lyapunov_closed(h.theta, d).map_err(|e| e.to_string())?.l1;
        // bounded away from zero
        if l1.abs() < 0.05 * largest_monomial(&l1_poly(d), h.theta) {
            continue;
        }
        hopf_total += 1;
        let p = h.params().map_err(|e| e.to_string())?;
        let eq = classify_equilibrium(&p, u0);
        match focal_oracle(&p, &eq, 1, &cfg) {
            Ok(fit) if fit.sign as f64 == l1.signum() => {
                hopf_ok += 1;
                signs.insert(fit.sign);
            }
            other => failures.push(format!("u0 = {u0:.3}, d = {d:.3}: {other:?}")),
        }
    }
    let mut bautin_ok = 0;
    let thetas = [20.0, 0.05, 3.0, 0.3, 5.0, 0.2];
    for t in thetas {
        let bp = bautin_curve(t).map_err(|e| e.to_string())?;
        let p = bp.params();
        let eq = classify_equilibrium(&p, bp.u0);
        match focal_oracle(&p, &eq, 2, &cfg) {
            Ok(fit) if fit.sign as f64 == l2bar(t).signum() => bautin_ok += 1,
            other => failures.push(format!("vartheta = {t}: {other:?}")),
        }
    }
    check(
        failures.is_empty() && hopf_ok >= 10 && bautin_ok >= 3 && signs.len() == 2,
        format!(
            "k = 1: {hopf_ok}/{hopf_total} Hopf points agree (signs seen {signs:?}); k = 2: {bautin_ok}/{} Bautin points agree{}",
            thetas.len(),
            if failures.is_empty() { String::new() } else { format!("; failures {failures:?}") }
        ),
    )
}

fn l3_negative() -> Outcome {
    let (t1, t2) = l2bar_roots();
    let l = |t: f64| -> Result<f64, String> {
        let bp = bautin_curve(t).map_err(|e| e.to_string())?;
        Ok(lyapunov_closed(t, bp.d()).map_err(|e| e.to_string())?.l3)
    };
    let (a, b) = (l(t1)?, l(t2)?);
    check(
        a < 0.0 && b < 0.0,
        format!("l3(theta1) = {a:.4e}, l3(theta2) = {b:.4e}"),
    )
}

fn stabilities(cycles: &[twoneuron::dynamics::LimitCycle]) -> String {
    cycles
        .iter()
        .map(|c| match c.stability {
            Stability::Stable => 'S',
            Stability::Unstable => 'U',
            Stability::SemiStable => 'D',
        })
        .collect()
}

fn nested_cycles_witness() -> Outcome {
    let start = Instant::now();
    let p = Params::new(16.0, 130.0, 111.165).map_err(|e| e.to_string())?;
    let eqs = equilibria(&p, 1e-13);
    if eqs.len() != 1 || eqs[0].kind != EquilibriumKind::UnstableFocus {
        return Err(format!("equilibria: {eqs:?}"));
    }
    let eq = eqs[0];
    let base = find_cycles(&p, &eq, None);
    let code = classify_portrait(&p, &PortraitConfig::default()).map_err(|e| e.to_string())?;
    let mut variants = Vec::new();
    for (angle, rtol) in [(0.0, 5e-13), (FRAC_PI_2, 1e-12), (FRAC_PI_2, 5e-13)] {
        let search = CycleSearch::new(CycleSearchConfig {
            ray_angle: angle,
            ret: ReturnConfig::with_rtol(rtol),
            ..CycleSearchConfig::default()
        });
        let ray = SectionRay::new(&p, eq.state(), angle).map_err(|e| e.to_string())?;
        let r_max = twoneuron::dynamics::default_r_max(&p, eq.state(), angle);
        variants.push(stabilities(&search.on_ray(&p, &ray, r_max).map_err(|e| e.to_string())?));
    }
    let elapsed = start.elapsed().as_secs_f64();
    let ok = stabilities(&base) == "SUS"
        && code.to_string() == "uSUS"
        && variants.iter().all(|v| v == "SUS")
        && elapsed < 60.0;
    check(
        ok,
        format!(
            "unstable focus at u0 = {:.6}; cycles {} at radii {:?}; code {code}; rotated / halved tolerance {variants:?}; {elapsed:.2} s",
            eq.u0,
            stabilities(&base),
            base.iter().map(|c| (c.section_radius * 1e4).round() / 1e4).collect::<Vec<_>>()
        ),
    )
}

fn symmetry_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let opts = IntegrateOptions {
        integrator: IntegratorConfig::with_tolerances(1e-10, 1e-12),
        sample_dt: Some(0.5),
        ..IntegrateOptions::default()
    };
    let mut flow_dev = 0.0f64;
    for _ in 0..20 {
        let p = Params::new(
            rng.gen_range(0.5..20.0),
            rng.gen_range(0.5..30.0),
            rng.gen_range(-10.0..30.0),
        )
        .map_err(|e| e.to_string())?;
        let s0 = State::new(rng.gen_range(-5.0..20.0), rng.gen_range(0.0..1.0));
        let x = integrate_with(&p, s0.to_array(), 50.0, &opts).map_err(|e| e.to_string())?;
        let q = symmetry_conjugate(&p);
        let y = integrate_with(&q, reflect_state(s0).to_array(), 50.0, &opts).map_err(|e| e.to_string())?;
        if x.samples.len() != y.samples.len() {
            return Err("sample grids differ".into());
        }
        for (a, b) in x.samples.iter().zip(&y.samples) {
            let r = reflect_state(State::new(b.u, b.v));
            flow_dev = flow_dev.max((a.u - r.u).abs()).max((a.v - r.v).abs());
        }
    }

    // one point per region found by random sampling, plus the bistable and
    // single-equilibrium regions around the witness
    let points = [
        (5.0, 1.0, -2.0),
        (16.0, 10.641444052592341, -1.02566902443116),
        (10.0, 8.419550588622542, -0.7580467395985293),
        (30.0, 28.074504688790036, -1.0676887959800827),
        (16.0, 13.837739540114853, -1.354969527296201),
        (16.0, 14.62246499990405, -0.6629344410887273),
        (16.0, 130.0, 111.165),
        (16.0, 130.0, 111.17),
        (16.0, 130.0, 111.16),
    ];
    let cfg = PortraitConfig::default();
    let mut codes = Vec::new();
    let mut broken = Vec::new();
    for (a, b, c) in points {
        let p = Params::new(a, b, c).map_err(|e| e.to_string())?;
        let code = classify_portrait(&p, &cfg).map_err(|e| format!("{p:?}: {e}"))?;
        let mirrored = classify_portrait(&symmetry_conjugate(&p), &cfg).map_err(|e| format!("{p:?}: {e}"))?;
        if mirrored != code.swap_subscripts() {
            broken.push(format!("{code} vs {mirrored}"));
        }
        codes.push(code.to_string());
    }

    let mut bautin_dev = 0.0f64;
    for t in bautin_theta_samples(100) {
        let p = bautin_curve(t).map_err(|e| e.to_string())?.params();
        let q = bautin_curve(1.0 / t).map_err(|e| e.to_string())?.params();
        let m = symmetry_conjugate(&p);
        let scale = 1.0 + p.a().abs() + p.b().abs();
        bautin_dev = bautin_dev
            .max((q.a() - m.a()).abs() / scale)
            .max((q.b() - m.b()).abs() / scale)
            .max((q.c() - m.c()).abs() / scale);
    }
    check(
        flow_dev < 1e-6 && broken.is_empty() && bautin_dev < 1e-9,
        format!(
            "flow deviation {flow_dev:.1e} over 20 cases; swap equivariance at {} points {codes:?}{}; Bautin reflection deviation {bautin_dev:.1e}",
            points.len(),
            if broken.is_empty() { String::new() } else { format!(" broken: {broken:?}") }
        ),
    )
}

fn curve_residuals() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for a in [2.0, 3.0, 7.854_101_966_249_685, 16.0, 50.0] {
        for s in sn_curve(a, (-4.0, 4.0), 400)
            .into_iter()
            .chain(hopf_curve(a, (0.1, 10.0 * a), 200).map_err(|e| e.to_string())?)
        {
            worst = worst.max(s.max_residual());
            count += 1;
        }
    }
    let (t1, _) = l2bar_roots();
    let dh = bautin_points(16.0);
    let dh1 = dh.iter().find(|s| s.aux.is_some_and(|t| t > t1));
    let dh_ok = dh.len() == 2 && dh.iter().all(|s| s.l2bar.is_some_and(|l| l > 0.0)) && dh1.is_some();
    check(
        worst < 1e-10 && dh_ok,
        format!(
            "{count} saddle-node and Hopf samples, max residual {worst:.1e}; dh points at a = 16: {:?}",
            dh.iter()
                .map(|s| (
                    s.aux.unwrap_or(f64::NAN),
                    s.params.b(),
                    s.params.c(),
                    s.l2bar.unwrap_or(f64::NAN)
                ))
                .collect::<Vec<_>>()
        ),
    )
}

fn catalogue_property() -> Outcome {
    let start = Instant::now();
    // 50 grid lines with (130, 111.165) on the grid
    let b_range = (129.95, 129.95 + 49.0 * 0.002);
    let c_range = (111.14, 111.14 + 49.0 * 0.001);
    let map = region_scan(16.0, b_range, c_range, (50, 50), &PortraitConfig::default()).map_err(|e| e.to_string())?;
    let codes = map.codes();
    let bad = map.uncatalogued();
    // adjacency between horizontally or vertically neighbouring cells, reported only
    let mut adjacent = BTreeSet::new();
    for j in 0..map.nc {
        for i in 0..map.nb {
            let here = map.cell(i, j).code().map(|c| c.to_string());
            for (di, dj) in [(1, 0), (0, 1)] {
                if i + di < map.nb && j + dj < map.nc {
                    let there = map.cell(i + di, j + dj).code().map(|c| c.to_string());
                    if let (Some(x), Some(y)) = (&here, &there) {
                        if x != y {
                            adjacent.insert(if x < y {
                                (x.clone(), y.clone())
                            } else {
                                (y.clone(), x.clone())
                            });
                        }
                    }
                }
            }
        }
    }
    let witness = map.cell(25, 25);
    check(
        bad.is_empty() && codes.contains_key("uSUS") && codes.keys().all(|c| is_catalogued(&c.parse().unwrap())),
        format!(
            "codes {codes:?}, degenerate {}, failed {}, uncatalogued {bad:?}; witness cell {:?}; adjacent pairs {adjacent:?}; {:.1} s",
            map.count_degenerate(),
            map.count_failed(),
            match witness {
                Cell::Code(c) => c.to_string(),
                other => format!("{other:?}"),
            },
            start.elapsed().as_secs_f64()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("quartic roots", quartic_roots),
        ("codim-3 parameter points", codim3_points),
        ("l1 vanishes on the Bautin curve", l1_vanishes_on_curve),
        ("generic / closed-form agreement", cross_source_agreement),
        ("oracle validation", oracle_validation),
        ("l3 negative at codim-3 points", l3_negative),
        ("three nested cycles", nested_cycles_witness),
        ("symmetry suite", symmetry_suite),
        ("analytic curve residuals", curve_residuals),
        ("catalogue property", catalogue_property),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({secs:.1} s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.1} s): {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
