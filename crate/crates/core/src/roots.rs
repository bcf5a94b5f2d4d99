//! Bracketed scalar root finding.

#[allow(unused_imports)]
use num_traits::Float;

/// Bisects `f` on `[a, b]` until the bracket is narrower than `width`.
///
/// `fa` and `fb` must have opposite signs (or one of them be zero).
pub fn bisect<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    width: f64,
) -> f64 {
    if fa == 0.0 {
        return a;
    }
    for _ in 0..200 {
        if (b - a).abs() <= width {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Safeguarded Newton iteration for a monotone function on a bracket.
///
/// `fdf` returns the value and derivative. Newton steps that leave the
/// current bracket fall back to bisection. Returns `None` when the bracket
/// does not straddle a root or the iteration does not settle.
pub fn safe_newton<F: FnMut(f64) -> (f64, f64)>(
    mut fdf: F,
    lo: f64,
    hi: f64,
    guess: f64,
    xtol: f64,
) -> Option<f64> {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let (fa, _) = fdf(a);
    let (fb, _) = fdf(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if (fa < 0.0) == (fb < 0.0) {
        return None;
    }
    let neg_at_a = fa < 0.0;
    let mut x = if guess > a && guess < b {
        guess
    } else {
        0.5 * (a + b)
    };
    for _ in 0..100 {
        let (fx, dfx) = fdf(x);
        if fx == 0.0 {
            return Some(x);
        }
        if (fx < 0.0) == neg_at_a {
            a = x;
        } else {
            b = x;
        }
        let mut next = x - fx / dfx;
        if !(next > a && next < b) || !next.is_finite() {
            next = 0.5 * (a + b);
        }
        let step = (next - x).abs();
        x = next;
        if step <= xtol || (b - a) <= xtol {
            return Some(x);
        }
    }
    None
}

/// Golden-section minimisation of a unimodal function on `[a, b]`.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, width: f64) -> (f64, f64) {
    let r = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= width {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, -2.0, 1e-12);
        assert!((r - 2.0f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn newton_falls_back_inside_bracket() {
        let r = safe_newton(|x| (x.atan(), 1.0 / (1.0 + x * x)), -1.0, 30.0, 29.0, 1e-14).unwrap();
        assert!(r.abs() < 1e-12);
    }

    #[test]
    fn newton_rejects_bad_bracket() {
        assert!(safe_newton(|x| (x * x + 1.0, 2.0 * x), -1.0, 1.0, 0.0, 1e-12).is_none());
    }

    #[test]
    fn golden_finds_minimum() {
        let (x, _) = golden_min(|x| (x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-8);
    }
}
