//! Scalar root bracketing shared by the equilibrium and cycle solvers.

/// Finds a root of `g` in `[lo, hi]` given values of opposite sign at the
/// ends. Illinois-modified regula falsi with a bisection fallback; stops when
/// the bracket is narrower than `xtol` or `|g| <= ftol`.
pub(crate) fn illinois<G>(mut g: G, lo: f64, hi: f64, glo: f64, ghi: f64, xtol: f64, ftol: f64) -> f64
where
    G: FnMut(f64) -> f64,
{
    let (mut a, mut b, mut fa, mut fb) = (lo, hi, glo, ghi);
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    debug_assert!(fa.signum() != fb.signum());
    let mut side = 0i8;
    for iter in 0..200 {
        if (b - a).abs() <= xtol {
            break;
        }
        // every fourth step is a plain bisection so the bracket always shrinks
        let x = if iter % 4 == 3 {
            0.5 * (a + b)
        } else {
            let x = (a * fb - b * fa) / (fb - fa);
            if x.is_finite() && x > a.min(b) && x < a.max(b) {
                x
            } else {
                0.5 * (a + b)
            }
        };
        let fx = g(x);
        if fx.abs() <= ftol || fx == 0.0 {
            return x;
        }
        if fx.signum() == fb.signum() {
            b = x;
            fb = fx;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = x;
            fa = fx;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    if fa.abs() < fb.abs() {
        a
    } else {
        b
    }
}

/// Golden-section minimisation of `h` on `[lo, hi]`. Returns `(x, h(x))`.
pub(crate) fn golden_min<H>(mut h: H, lo: f64, hi: f64, xtol: f64) -> (f64, f64)
where
    H: FnMut(f64) -> f64,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = h(x1);
    let mut f2 = h(x2);
    for _ in 0..200 {
        if (b - a).abs() <= xtol {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = h(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = h(x2);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
