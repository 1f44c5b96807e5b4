//! Gauss–Legendre quadrature, nested over simplex and tree-shaped domains.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use once_cell::sync::Lazy;

type Rule = Arc<Vec<(f64, f64)>>;

static RULES: Lazy<Mutex<HashMap<usize, Rule>>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// Nodes and weights on `[-1, 1]`, computed once per order by Newton
/// iteration on the Legendre recurrence.
pub fn gauss_legendre(order: usize) -> Rule {
    assert!(order >= 2, "quadrature order must be at least 2");
    let mut cache = RULES.lock().expect("quadrature cache");
    if let Some(r) = cache.get(&order) {
        return Arc::clone(r);
    }
    let n = order;
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((x, w));
    }
    rule.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite nodes"));
    let arc = Arc::new(rule);
    cache.insert(order, Arc::clone(&arc));
    arc
}

/// Value and derivative of `P_n` at `x`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// `∫_a^b f` with a fixed-order rule.
pub fn integrate_1d(order: usize, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let rule = gauss_legendre(order);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for (x, w) in rule.iter() {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Complex-valued variant of [`integrate_1d`].
pub fn integrate_1d_complex(
    order: usize,
    a: f64,
    b: f64,
    f: &mut dyn FnMut(f64) -> Complex64,
) -> Complex64 {
    let rule = gauss_legendre(order);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in rule.iter() {
        acc += f(mid + half * x) * *w;
    }
    acc * half
}

/// Nested integral over the simplex `0 < t_0 < t_1 < … < t_{m-1} < upper`.
/// The integrand receives the times in ascending order. Accumulation order is
/// fixed, so results are bitwise reproducible for a given order.
pub fn integrate_simplex(
    order: usize,
    dims: usize,
    upper: f64,
    f: &mut dyn FnMut(&[f64]) -> Complex64,
) -> Complex64 {
    let mut times = vec![0.0; dims];
    rec_simplex(order, dims, upper, &mut times, f)
}

fn rec_simplex(
    order: usize,
    level: usize,
    upper: f64,
    times: &mut Vec<f64>,
    f: &mut dyn FnMut(&[f64]) -> Complex64,
) -> Complex64 {
    if level == 0 {
        return f(times);
    }
    let rule = gauss_legendre(order);
    let half = 0.5 * upper;
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in rule.iter() {
        let t = half * (x + 1.0);
        times[level - 1] = t;
        acc += rec_simplex(order, level - 1, t, times, f) * *w;
    }
    acc * half
}

/// Nested integral over a tree-shaped domain: variable `i` ranges over
/// `(0, t_{parent(i)})`, where `parent(i) = None` means the fixed outer time.
/// Parents must precede children in the index order.
pub fn integrate_tree(
    order: usize,
    parents: &[Option<usize>],
    upper: f64,
    f: &mut dyn FnMut(&[f64]) -> Complex64,
) -> Complex64 {
    for (i, p) in parents.iter().enumerate() {
        if let Some(p) = p {
            assert!(*p < i, "parents must come before children");
        }
    }
    let mut times = vec![0.0; parents.len()];
    rec_tree(order, parents, 0, upper, &mut times, f)
}

fn rec_tree(
    order: usize,
    parents: &[Option<usize>],
    level: usize,
    outer: f64,
    times: &mut Vec<f64>,
    f: &mut dyn FnMut(&[f64]) -> Complex64,
) -> Complex64 {
    if level == parents.len() {
        return f(times);
    }
    let upper = match parents[level] {
        None => outer,
        Some(p) => times[p],
    };
    let rule = gauss_legendre(order);
    let half = 0.5 * upper;
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in rule.iter() {
        times[level] = half * (x + 1.0);
        acc += rec_tree(order, parents, level + 1, outer, times, f) * *w;
    }
    acc * half
}

/// Adaptive bisection in the outermost variable: panels where the full- and
/// half-order estimates disagree by more than `tol` are split. The inner
/// nesting levels stay at the fixed order.
pub fn integrate_simplex_adaptive(
    order: usize,
    dims: usize,
    upper: f64,
    tol: f64,
    f: &mut dyn FnMut(&[f64]) -> Complex64,
) -> Complex64 {
    if dims == 0 {
        return f(&[]);
    }
    adaptive_outer(order, tol, 12, 0.0, upper, &mut |s| {
        let mut times = vec![0.0; dims];
        times[dims - 1] = s;
        rec_simplex(order, dims - 1, s, &mut times, f)
    })
}

/// Tree-domain variant of [`integrate_simplex_adaptive`]; the first variable
/// (whose range is the fixed outer time) is bisected.
pub fn integrate_tree_adaptive(
    order: usize,
    parents: &[Option<usize>],
    upper: f64,
    tol: f64,
    f: &mut dyn FnMut(&[f64]) -> Complex64,
) -> Complex64 {
    if parents.is_empty() {
        return f(&[]);
    }
    assert!(parents[0].is_none());
    adaptive_outer(order, tol, 12, 0.0, upper, &mut |s| {
        let mut times = vec![0.0; parents.len()];
        times[0] = s;
        rec_tree(order, parents, 1, upper, &mut times, f)
    })
}

fn adaptive_outer(
    order: usize,
    tol: f64,
    depth: usize,
    a: f64,
    b: f64,
    g: &mut dyn FnMut(f64) -> Complex64,
) -> Complex64 {
    let full = integrate_1d_complex(order, a, b, &mut *g);
    let half = integrate_1d_complex((order / 2).max(2), a, b, &mut *g);
    if (full - half).norm() <= tol || depth == 0 {
        return full;
    }
    let mid = 0.5 * (a + b);
    adaptive_outer(order, tol, depth - 1, a, mid, g) + adaptive_outer(order, tol, depth - 1, mid, b, g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate_1d(8, 0.0, 1.0, |x| x * x * x);
        assert!((v - 0.25).abs() < 1e-14);
    }

    #[test]
    fn oscillatory_1d() {
        // ∫_0^1 cos(10 x) dx = sin(10)/10
        let v = integrate_1d(32, 0.0, 1.0, |x| (10.0 * x).cos());
        assert!((v - (10.0f64).sin() / 10.0).abs() < 1e-12);
    }

    #[test]
    fn simplex_volume() {
        // vol{0 < t0 < t1 < t2 < 1} = 1/6
        let v = integrate_simplex(16, 3, 1.0, &mut |_| Complex64::new(1.0, 0.0));
        assert!((v.re - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn simplex_orders_times_ascending() {
        let v = integrate_simplex(16, 2, 1.0, &mut |t| {
            assert!(t[0] <= t[1]);
            Complex64::new(t[0] * t[1], 0.0)
        });
        // ∫_0^1 ∫_0^{t1} t0 t1 dt0 dt1 = ∫_0^1 t1^3/2 = 1/8
        assert!((v.re - 0.125).abs() < 1e-12);
    }

    #[test]
    fn tree_domain_factorizes_for_forests() {
        // two independent variables in (0,1): ∫∫ t0 t1 = 1/4
        let v = integrate_tree(16, &[None, None], 1.0, &mut |t| {
            Complex64::new(t[0] * t[1], 0.0)
        });
        assert!((v.re - 0.25).abs() < 1e-12);
    }

    #[test]
    fn adaptive_bisection_rescues_underresolved_oscillations() {
        // ∫_0^1 cos(120 x) dx: order 8 is far too coarse on one panel but
        // converges once the interval is subdivided.
        let exact = (120.0f64).sin() / 120.0;
        let fixed = integrate_1d(8, 0.0, 1.0, |x| (120.0 * x).cos());
        assert!((fixed - exact).abs() > 1e-3, "order 8 must fail outright");
        let adaptive = integrate_simplex_adaptive(8, 1, 1.0, 1e-12, &mut |t| {
            Complex64::new((120.0 * t[0]).cos(), 0.0)
        });
        assert!((adaptive.re - exact).abs() < 1e-9, "got {}", adaptive.re);
    }

    #[test]
    fn adaptive_matches_fixed_on_smooth_simplex() {
        let mut f = |t: &[f64]| Complex64::new((t[0] + 2.0 * t[1]).cos(), 0.0);
        let fixed = integrate_simplex(32, 2, 1.0, &mut f);
        let adaptive = integrate_simplex_adaptive(32, 2, 1.0, 1e-12, &mut f);
        assert!((fixed - adaptive).norm() < 1e-12);
    }

    #[test]
    fn tree_domain_nests_chains() {
        // 0 < t1 < t0 < 1 with integrand 1 → area 1/2
        let v = integrate_tree(16, &[None, Some(0)], 1.0, &mut |_| {
            Complex64::new(1.0, 0.0)
        });
        assert!((v.re - 0.5).abs() < 1e-12);
    }
}
