//! Maximisation of a scalar function over an interval: a uniform scan
//! followed by golden-section refinement around the best sample.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Maximises `f` on `[lo, hi]` using `points ≥ 2` uniform samples and then
/// golden-section search on the bracket around the best sample. The scan
/// does not assume unimodality; the refinement only ever improves on it.
pub fn scan_then_golden<E>(
    lo: f64,
    hi: f64,
    points: usize,
    mut f: impl FnMut(f64) -> Result<f64, E>,
) -> Result<(f64, f64), E> {
    let points = points.max(2);
    let step = (hi - lo) / (points - 1) as f64;
    let at = |i: usize| if i + 1 == points { hi } else { lo + step * i as f64 };
    let mut best = (lo, f64::NEG_INFINITY);
    let mut best_i = 0;
    for i in 0..points {
        let x = at(i);
        let v = f(x)?;
        if v > best.1 {
            best = (x, v);
            best_i = i;
        }
    }
    let mut a = at(best_i.saturating_sub(1));
    let mut b = at((best_i + 1).min(points - 1));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..60 {
        if b - a <= 1e-12 * (1.0 + libm::fabs(a)) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    for (x, v) in [(c, fc), (d, fd)] {
        if v > best.1 {
            best = (x, v);
        }
    }
    Ok(best)
}
