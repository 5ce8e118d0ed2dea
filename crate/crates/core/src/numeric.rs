//! Shared numerical kernels: adaptive Gauss-Kronrod quadrature and
//! bracketed root finding on monotone functions.

use crate::{Error, Result};

// Gauss-Kronrod 15-point rule (7-point Gauss embedded), positive half.
const XGK: [f64; 8] = [
    0.9914553711208126,
    0.9491079123427585,
    0.8648644233597691,
    0.7415311855993944,
    0.5860872354676911,
    0.4058451513773972,
    0.2077849550078985,
    0.0,
];

const WGK: [f64; 8] = [
    0.022935322010529224,
    0.06309209262997856,
    0.10479001032225018,
    0.14065325971552592,
    0.1690047266392679,
    0.1903505780647854,
    0.20443294007529889,
    0.20948214108472782,
];

const WG: [f64; 4] = [
    0.1294849661688697,
    0.27970539148927664,
    0.3818300505051189,
    0.4179591836734694,
];

/// One Gauss-Kronrod 15 panel. Returns (kronrod, |kronrod - gauss|).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];

    for j in 0..7 {
        let x = half * XGK[j];
        let fsum = f(center - x) + f(center + x);
        kronrod += fsum * WGK[j];
        if j % 2 == 1 {
            gauss += fsum * WG[j / 2];
        }
    }

    (kronrod * half, (kronrod - gauss).abs() * half.abs())
}

/// Adaptive quadrature of `f` over `[a, b]` to absolute tolerance `abs_tol`.
///
/// Bisects panels whose embedded error estimate exceeds their share of the
/// tolerance. Fails if the panel budget runs out before convergence.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut total = 0.0;
    // (lo, hi, tol, depth)
    let mut stack = vec![(a, b, abs_tol.max(1e-300), 0u32)];
    let mut panels = 0usize;
    let mut worst = 0.0f64;

    while let Some((lo, hi, tol, depth)) = stack.pop() {
        panels += 1;
        if panels > 200_000 {
            return Err(Error::QuadratureNonConvergence { tol: abs_tol, err: worst });
        }
        let (value, err) = gk15(f, lo, hi);
        // Accept at the requested tolerance or at the rounding floor of the
        // panel value itself; splitting further cannot beat either.
        let floor = tol.max(f64::EPSILON * value.abs());
        if err <= floor || depth >= 100 {
            if err > tol {
                worst = worst.max(err);
            }
            total += value;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, 0.5 * tol, depth + 1));
            stack.push((mid, hi, 0.5 * tol, depth + 1));
        }
    }

    if worst > abs_tol * 16.0 {
        return Err(Error::QuadratureNonConvergence { tol: abs_tol, err: worst });
    }
    Ok(total)
}

/// Bisection on a bracketed sign change; `f(lo)` and `f(hi)` must differ in
/// sign (either evaluated here or certified by the caller via `known_signs`).
pub fn bisect<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, x_tol: f64, max_iter: usize) -> Result<f64> {
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::BracketFailure(lo, hi));
    }
    bisect_known(f, lo, hi, flo < 0.0, x_tol, max_iter)
}

/// Bisection where the sign of `f(lo)` is already known (`lo_negative`),
/// so the endpoints themselves are never evaluated. Needed when the lower
/// endpoint is a singular limit whose sign is known analytically.
pub fn bisect_known<F: Fn(f64) -> f64>(
    f: &F,
    mut lo: f64,
    mut hi: f64,
    lo_negative: bool,
    x_tol: f64,
    max_iter: usize,
) -> Result<f64> {
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= x_tol || mid == lo || mid == hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Piecewise cubic Hermite evaluation on one interval.
pub fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
        + d0 * h * (t3 - 2.0 * t2 + t)
        + y1 * (-2.0 * t3 + 3.0 * t2)
        + d1 * h * (t3 - t2)
}

/// Index `i` with `nodes[i] <= x <= nodes[i+1]` for sorted nodes.
pub fn bracket_index(nodes: &[f64], x: f64) -> usize {
    match nodes.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
        Ok(i) => i.min(nodes.len() - 2),
        Err(i) => i.saturating_sub(1).min(nodes.len() - 2),
    }
}

/// Log-uniform grid of `n >= 2` nodes over `[a, b]`, `0 < a < b`.
pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && a > 0.0 && b > a);
    let (la, lb) = (a.ln(), b.ln());
    let mut g: Vec<f64> = (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect();
    g[0] = a;
    g[n - 1] = b;
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_smooth_function() {
        let v = integrate(&|x: f64| x.cos(), 0.0, 1.0, 1e-13).unwrap();
        assert!((v - 1.0f64.sin()).abs() < 1e-13);
    }

    #[test]
    fn integrates_sqrt_singularity() {
        // 1/(2 sqrt(x)) over [0,1] = 1
        let v = integrate(&|x: f64| 0.5 / x.max(1e-300).sqrt(), 1e-30, 1.0, 1e-11).unwrap();
        assert!((v - (1.0 - 1e-15)).abs() < 1e-9);
    }

    #[test]
    fn bisect_finds_root() {
        let r = bisect(&|x: f64| x * x - 2.0, 0.0, 2.0, 1e-14, 200).unwrap();
        assert!((r - 2.0f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn bisect_rejects_bad_bracket() {
        assert!(bisect(&|x: f64| x * x + 1.0, 0.0, 1.0, 1e-12, 100).is_err());
    }

    #[test]
    fn hermite_reproduces_cubic() {
        let f = |x: f64| x * x * x - 2.0 * x + 1.0;
        let d = |x: f64| 3.0 * x * x - 2.0;
        let v = hermite(0.3, 0.9, f(0.3), f(0.9), d(0.3), d(0.9), 0.55);
        assert!((v - f(0.55)).abs() < 1e-14);
    }

    #[test]
    fn log_grid_endpoints_exact() {
        let g = log_grid(0.25, 1.0, 9);
        assert_eq!(g[0], 0.25);
        assert_eq!(g[8], 1.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}
