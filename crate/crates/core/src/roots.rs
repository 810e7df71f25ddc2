//! Sign-change scanning and bisection.

const MAX_BISECTIONS: usize = 400;

/// Bisect `f` on `[lo, hi]`, which must bracket a sign change, until the
/// bracket is no wider than `tol * (1 + |mid|)` or cannot shrink further.
///
/// Returns `None` when `f(lo)` and `f(hi)` have the same strict sign.
pub(crate) fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol * (1.0 + mid.abs()) || mid <= lo || mid >= hi {
            return Some(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Sample `f` on a uniform grid over `[lo, hi]` with at most `step` spacing and
/// return every cell whose endpoint values differ in sign.
///
/// Points where `f` returns `None` break the chain: no cell touching them is
/// reported. A value of exactly zero at a grid node yields the degenerate cell
/// `(x, x)`.
pub(crate) fn scan_sign_changes<F>(mut f: F, lo: f64, hi: f64, step: f64) -> Vec<(f64, f64)>
where
    F: FnMut(f64) -> Option<f64>,
{
    let cells = ((hi - lo) / step).ceil().max(1.0) as usize;
    let width = (hi - lo) / cells as f64;
    let node = |i: usize| if i == cells { hi } else { lo + width * i as f64 };

    let mut out = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=cells {
        let x = node(i);
        let cur = f(x).filter(|v| v.is_finite());
        match (prev, cur) {
            (_, Some(0.0)) => out.push((x, x)),
            (Some((px, pv)), Some(v)) if pv != 0.0 && pv.signum() != v.signum() => out.push((px, x)),
            _ => {}
        }
        prev = cur.map(|v| (x, v));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisects_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn no_bracket() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_none());
    }

    #[test]
    fn scan_finds_all_sine_zeros() {
        let cells = scan_sign_changes(|x| Some(x.sin()), 0.5, 10.0, 0.1);
        assert_eq!(cells.len(), 3);
        for (i, (a, b)) in cells.iter().enumerate() {
            let z = std::f64::consts::PI * (i + 1) as f64;
            assert!(*a <= z && z <= *b);
        }
    }

    #[test]
    fn scan_skips_undefined_points() {
        let cells = scan_sign_changes(|x| if (x - 1.0).abs() < 0.06 { None } else { Some(x - 1.0) }, 0.0, 2.0, 0.1);
        assert!(cells.is_empty());
    }

    #[test]
    fn exact_zero_on_node() {
        let cells = scan_sign_changes(|x| Some(x - 1.0), 0.0, 2.0, 0.5);
        assert_eq!(cells, vec![(1.0, 1.0)]);
    }
}
