//! The minimizing radial profile, its energy, the exact lower bound it
//! attains, and the weight pair driving the fixed-boundary estimates.

use crate::gauge::{Branch, GaugeFunction, PhiTable, DEFAULT_DELTA, DEFAULT_TABLE_NODES};
use crate::geometry::{AnnulusPair, Exponent, RadialProfile, SampledFunction};
use crate::modulus::{ModulusMap, Regime};
use crate::numeric::{bisect_known, integrate, log_grid};
use crate::{Error, Result};
use rand::Rng;
use serde::Serialize;
use std::sync::Arc;

/// Default node count for solved profiles.
pub const DEFAULT_PROFILE_NODES: usize = 2001;

/// Endpoint accuracy required of the solved profile at the inner radius.
pub const SOLVE_ENDPOINT_TOL: f64 = 1e-8;

/// A solved radial minimizer on a normalized instance.
#[derive(Debug, Clone)]
pub struct RadialMinimizer {
    pub p: Exponent,
    pub pair: AnnulusPair,
    pub regime: Regime,
    pub profile: RadialProfile,
    pub gauge: GaugeFunction,
    /// Plateau edge `R0`, present only in the collapsed regime.
    pub collapse_radius: Option<f64>,
    /// Energy of the sampled profile by quadrature (an upper bound on the
    /// true minimum that converges to it with the grid).
    pub energy: f64,
}

/// The weights `rho1`, `rho2` of the fixed-boundary estimates, sampled on
/// the minimizer grid.
#[derive(Debug, Clone, Serialize)]
pub struct WeightPair {
    pub rho1: SampledFunction,
    pub rho2: SampledFunction,
}

/// Closed-form identity energy `2^{p/2} pi (1 - r^2)` on `A(r, 1)`.
pub fn identity_energy(p: Exponent, r: f64) -> f64 {
    2f64.powf(p.value() / 2.0) * std::f64::consts::PI * (1.0 - r * r)
}

/// The boundary-condition integral of the gauge with constant `C`,
/// `int_r^1 sqrt(g)/(s sqrt(1-g)) ds`, computed in `u = log s + C` where the
/// integrand `sqrt(t/(1-t))`, `t = table.invert(u)`, is smooth (it vanishes
/// linearly at `u = 0` on the Below branch and tends to 1 for large `u`).
fn boundary_integral(table: &PhiTable, r: f64, c: f64) -> Result<f64> {
    let f = |u: f64| gauge_integrand(table, u);
    integrate(&f, c + r.ln(), c, 1e-11)
}

/// `sqrt(t/(1-t))` at `t` solving the branch equation at `u = log s + C`,
/// formed from the table's internal `x` coordinate (near the Above branch
/// endpoint, `1 - t = x^2` holds to full precision where `t` itself does
/// not).
fn gauge_integrand(table: &PhiTable, u: f64) -> f64 {
    if u <= 0.0 {
        return match table.branch() {
            Branch::Below => 0.0,
            // t -> 1: divergent limit; callers keep u > 0 except in
            // analytically handled limits.
            Branch::Above => f64::INFINITY,
        };
    }
    let x = table.invert_x(u).expect("u >= 0 inverts");
    match table.branch() {
        Branch::Below => x / (1.0 - x * x).sqrt(),
        Branch::Above => (1.0 - x * x).sqrt() / x,
    }
}

/// Solve the minimizing radial profile at the default resolution.
pub fn solve_profile(a: &AnnulusPair, p: Exponent) -> Result<RadialMinimizer> {
    solve_profile_n(a, p, DEFAULT_PROFILE_NODES)
}

/// Solve the minimizing radial profile on an `n`-node grid.
pub fn solve_profile_n(a: &AnnulusPair, p: Exponent, n: usize) -> Result<RadialMinimizer> {
    p.require_sub_quadratic()?;
    if !a.is_normalized() {
        return Err(Error::Invalid(
            "solve_profile expects a normalized instance (outer radii 1)".into(),
        ));
    }
    if n < 16 {
        return Err(Error::InvalidGrid);
    }
    let r = a.domain.inner;
    let r_star = a.target.inner;
    let map = ModulusMap::new(p)?;
    let report = map.classify(a)?;

    match report.regime {
        Regime::NoMinimizer => Err(Error::NoMinimizer),
        Regime::Homeomorphic => {
            if (r_star - r).abs() <= 1e-12 {
                return Ok(identity_minimizer(a, p, n));
            }
            if r_star > r {
                solve_case_thinner(a, p, n)
            } else {
                solve_case_fatter(a, p, n)
            }
        }
        Regime::Collapsed => {
            let r0 = report.collapse_radius_r0.expect("collapsed has R0");
            solve_collapsed(a, p, n, r0)
        }
    }
}

fn identity_minimizer(a: &AnnulusPair, p: Exponent, n: usize) -> RadialMinimizer {
    let r = a.domain.inner;
    let profile = RadialProfile::identity(r, 1.0, n);
    RadialMinimizer {
        p,
        pair: *a,
        regime: Regime::Homeomorphic,
        profile,
        gauge: GaugeFunction::constant((r, 1.0)),
        collapse_radius: None,
        energy: identity_energy(p, r),
    }
}

/// Case 1, `r* > r`: Below-branch gauge, root-solve `C >= -log r` so the
/// boundary integral equals `-log r*` (it increases with `C`).
fn solve_case_thinner(a: &AnnulusPair, p: Exponent, n: usize) -> Result<RadialMinimizer> {
    let r = a.domain.inner;
    let r_star = a.target.inner;
    let table = Arc::new(PhiTable::build(p, Branch::Below, DEFAULT_DELTA, DEFAULT_TABLE_NODES)?);
    let target = -r_star.ln();
    let c0 = -r.ln();
    let f = |c: f64| boundary_integral(&table, r, c).expect("boundary integral") - target;
    let mut hi = c0 + 1.0;
    for _ in 0..64 {
        if f(hi) >= 0.0 {
            break;
        }
        hi = c0 + 2.0 * (hi - c0);
    }
    let c = bisect_known(&f, c0, hi, true, 1e-11 * hi.max(1.0), 200)?;
    let gauge = GaugeFunction::from_table(table.clone(), c, (r, 1.0))?;
    build_minimizer(a, p, gauge, None, log_grid(r, 1.0, n), r_star)
}

/// Case 2, `r* < r`: Above-branch gauge; the boundary integral decreases
/// with `C`, starting from its supremum at `C = -log r` (infinite for
/// p > 1). `r* = 0` pins `C = -log r` exactly.
fn solve_case_fatter(a: &AnnulusPair, p: Exponent, n: usize) -> Result<RadialMinimizer> {
    let r = a.domain.inner;
    let r_star = a.target.inner;
    let table = Arc::new(PhiTable::build(p, Branch::Above, DEFAULT_DELTA, DEFAULT_TABLE_NODES)?);
    let c0 = -r.ln();
    let c = if r_star == 0.0 {
        c0
    } else {
        let target = -r_star.ln();
        let f = |c: f64| boundary_integral(&table, r, c).expect("boundary integral") - target;
        let mut hi = c0 + 1.0;
        for _ in 0..64 {
            if f(hi) <= 0.0 {
                break;
            }
            hi = c0 + 2.0 * (hi - c0);
        }
        // f decreases in C and is positive (possibly infinite) at c0.
        bisect_known(&|c: f64| -f(c), c0, hi, true, 1e-11 * hi.max(1.0), 200)?
    };
    let gauge = GaugeFunction::from_table(table.clone(), c, (r, 1.0))?;
    build_minimizer(a, p, gauge, None, log_grid(r, 1.0, n), r_star)
}

/// Below the critical interval: plateau `H = r*` on `[r, R0]`, Below-branch
/// gauge with `C = -log R0` on `[R0, 1]` (no root solve: `g(R0) = 0` by
/// the definition of `R0`).
fn solve_collapsed(a: &AnnulusPair, p: Exponent, n: usize, r0: f64) -> Result<RadialMinimizer> {
    let r = a.domain.inner;
    let r_star = a.target.inner;
    let table = Arc::new(PhiTable::build(p, Branch::Below, DEFAULT_DELTA, DEFAULT_TABLE_NODES)?);
    let c = -r0.ln();
    let gauge = GaugeFunction::from_table(table.clone(), c, (r0, 1.0))?;

    let n_plateau = (n / 4).max(2);
    let mut nodes: Vec<f64> = if r > 0.0 {
        log_grid(r, r0, n_plateau)
    } else {
        (0..n_plateau)
            .map(|i| r0 * i as f64 / (n_plateau - 1) as f64)
            .collect()
    };
    nodes.pop(); // R0 re-enters with the increasing part
    let plateau_len = nodes.len();
    nodes.extend(log_grid(r0, 1.0, n));
    let mut minimizer = build_minimizer(a, p, gauge, Some(plateau_len), nodes, r_star)?;
    minimizer.collapse_radius = Some(r0);
    Ok(minimizer)
}

/// Integrate `log H` over the grid (`H(1) = 1`, `d log H/du = sqrt(t/(1-t))`
/// in `u = log s + C`), check the inner endpoint, and assemble the result.
/// The first `plateau_len` nodes (if any) take the constant value `r*`.
fn build_minimizer(
    a: &AnnulusPair,
    p: Exponent,
    gauge: GaugeFunction,
    plateau_len: Option<usize>,
    nodes: Vec<f64>,
    inner_value: f64,
) -> Result<RadialMinimizer> {
    let plateau_len = plateau_len.unwrap_or(0);
    let rising = &nodes[plateau_len..];
    let c = gauge.c();
    let table = gauge
        .table()
        .expect("non-constant gauge has a table");
    let q = |u: f64| gauge_integrand(&table, u);

    // Cumulative integral from the outer edge down; H(1) = 1 exactly.
    let m = rising.len();
    let mut log_h = vec![0.0; m];
    let inner_pinned_zero = inner_value == 0.0;
    let lo_seg = usize::from(inner_pinned_zero); // skip the divergent segment
    for i in (lo_seg..m - 1).rev() {
        let (u0, u1) = (rising[i].ln() + c, rising[i + 1].ln() + c);
        log_h[i] = log_h[i + 1] - integrate(&q, u0, u1, 1e-11)?;
    }

    let mut values: Vec<f64> = Vec::with_capacity(nodes.len());
    values.extend(std::iter::repeat(inner_value).take(plateau_len));
    values.extend(log_h.iter().map(|&lh| lh.exp()));
    if inner_pinned_zero {
        values[plateau_len] = 0.0;
    } else {
        let got = values[plateau_len];
        if (got - inner_value).abs() > SOLVE_ENDPOINT_TOL {
            return Err(Error::EndpointMismatch {
                got,
                want: inner_value,
                tol: SOLVE_ENDPOINT_TOL,
            });
        }
        // Snap to the exact boundary value (verified above); keeps the
        // profile constructor's tighter tolerance satisfied.
        values[plateau_len] = inner_value;
    }
    *values.last_mut().unwrap() = 1.0;

    let samples = SampledFunction::new(nodes, values)?;
    let profile = RadialProfile::new(samples, inner_value, 1.0)?;
    let energy = energy_radial(&profile, p)?;
    let regime = if plateau_len > 0 {
        Regime::Collapsed
    } else {
        Regime::Homeomorphic
    };
    Ok(RadialMinimizer {
        p,
        pair: *a,
        regime,
        profile,
        gauge,
        collapse_radius: None,
        energy,
    })
}

/// `2 pi int (H'^2 + (H/s)^2)^{p/2} s ds` of a piecewise-linear profile,
/// segment by segment; zero-slope segments integrate in closed form (the
/// plateau integrand `H^p s^{1-p}` is singular but integrable at s = 0).
pub fn energy_radial(h: &RadialProfile, p: Exponent) -> Result<f64> {
    let pv = p.value();
    let nodes = h.samples().nodes();
    let values = h.samples().values();
    let mut total = 0.0;
    for i in 0..nodes.len() - 1 {
        let (s0, s1) = (nodes[i], nodes[i + 1]);
        let (h0, h1) = (values[i], values[i + 1]);
        let slope = (h1 - h0) / (s1 - s0);
        if slope == 0.0 {
            total += if pv == 2.0 {
                h0.powf(pv) * (s1 / s0).ln()
            } else {
                h0.powf(pv) * (s1.powf(2.0 - pv) - s0.powf(2.0 - pv)) / (2.0 - pv)
            };
            continue;
        }
        let f = |s: f64| {
            let hh = h0 + slope * (s - s0);
            (slope * slope + (hh / s) * (hh / s)).powf(pv / 2.0) * s
        };
        total += integrate(&f, s0, s1, 1e-13)?;
    }
    Ok(2.0 * std::f64::consts::PI * total)
}

/// Boundary flux `F(s) = s^{2-p} sqrt(g)/(1-g)^{(p-1)/2} H^p` whose
/// telescoping gives the exact minimum energy.
fn flux(p: Exponent, s: f64, g: f64, h: f64) -> f64 {
    let pv = p.value();
    if h == 0.0 {
        return 0.0;
    }
    s.powf(2.0 - pv) * g.sqrt() / (1.0 - g).powf((pv - 1.0) / 2.0) * h.powf(pv)
}

/// The exact lower bound `2 pi [F]_r^1` attained by the homeomorphic
/// minimizer; errors outside that regime.
pub fn lower_bound_exact(m: &RadialMinimizer) -> Result<f64> {
    if m.regime != Regime::Homeomorphic {
        return Err(Error::RegimeMismatch {
            want: Regime::Homeomorphic.as_str(),
            got: m.regime.as_str(),
        });
    }
    let r = m.pair.domain.inner;
    let r_star = m.pair.target.inner;
    let (outer, inner) = match m.gauge.table() {
        None => {
            let f = |s: f64| flux(m.p, s, 0.5, s);
            (f(1.0), f(r))
        }
        Some(_) => {
            let g_outer = m.gauge.eval(1.0)?;
            let g_inner = m.gauge.eval(r.max(f64::MIN_POSITIVE))?;
            (flux(m.p, 1.0, g_outer, 1.0), flux(m.p, r, g_inner, r_star))
        }
    };
    Ok(2.0 * std::f64::consts::PI * (outer - inner))
}

/// Exact energy of a collapsed minimizer: the outer boundary flux plus the
/// closed-form plateau term `2 pi r*^p int_r^{R0} s^{1-p} ds` (the inner
/// flux vanishes since `g(R0) = 0`).
pub fn collapsed_energy_exact(m: &RadialMinimizer) -> Result<f64> {
    if m.regime != Regime::Collapsed {
        return Err(Error::RegimeMismatch {
            want: Regime::Collapsed.as_str(),
            got: m.regime.as_str(),
        });
    }
    let pv = m.p.value();
    let r = m.pair.domain.inner;
    let r_star = m.pair.target.inner;
    let r0 = m.collapse_radius.expect("collapsed minimizer has R0");
    let g_outer = m.gauge.eval(1.0)?;
    let outer = flux(m.p, 1.0, g_outer, 1.0);
    let plateau = r_star.powf(pv) * (r0.powf(2.0 - pv) - r.powf(2.0 - pv)) / (2.0 - pv);
    Ok(2.0 * std::f64::consts::PI * (outer + plateau))
}

impl RadialMinimizer {
    /// Profile value at `s` by integrating the gauge ODE down from the
    /// nearest grid node above, accurate to quadrature tolerance (linear
    /// interpolation of the samples is only second order).
    pub fn h_exact(&self, s: f64) -> Result<f64> {
        let r0 = self.collapse_radius.unwrap_or(self.pair.domain.inner);
        if s <= r0 {
            if s < self.pair.domain.inner {
                return Err(Error::OutOfDomain(s, (self.pair.domain.inner, 1.0)));
            }
            return Ok(self.profile.inner_value());
        }
        let table = match self.gauge.table() {
            None => return Ok(s),
            Some(t) => t,
        };
        let nodes = self.profile.samples().nodes();
        let values = self.profile.samples().values();
        if s > 1.0 {
            return Err(Error::OutOfDomain(s, (self.pair.domain.inner, 1.0)));
        }
        let i = crate::numeric::bracket_index(nodes, s);
        let c = self.gauge.c();
        let q = |u: f64| gauge_integrand(&table, u);
        let tail = integrate(&q, s.ln() + c, nodes[i + 1].ln() + c, 1e-12)?;
        Ok(values[i + 1] * (-tail).exp())
    }

    /// `(rho1, rho2)` at `s`, from the gauge and the exact profile value.
    pub fn weights_at(&self, s: f64) -> Result<(f64, f64)> {
        let pv = self.p.value();
        let r0 = self.collapse_radius.unwrap_or(self.pair.domain.inner);
        if self.collapse_radius.is_some() && s < r0 {
            let h = self.profile.inner_value();
            return Ok((0.0, h.powf(pv - 1.0) * s.powf(1.0 - pv)));
        }
        let g = match self.gauge.table() {
            None => 0.5,
            Some(_) => self.gauge.eval(s)?,
        };
        let h = self.h_exact(s)?;
        let base = if h == 0.0 && pv > 1.0 {
            0.0
        } else {
            (h / s).powf(pv - 1.0) * (1.0 - g).powf(-(pv - 1.0) / 2.0)
        };
        Ok((s * g.sqrt() * base, (1.0 - g).sqrt() * base))
    }
}

/// The weights on the minimizer grid (excluding a puncture node at s = 0,
/// where `rho2` is singular). `(H'^2 + (H/s)^2)^{(p-1)/2}` is evaluated
/// through the gauge as `(H/s)^{p-1} (1-g)^{-(p-1)/2}`, exact on the solved
/// profile; on the plateau `g = 0` so `rho1 = 0` and `rho2 = r*^{p-1} s^{1-p}`.
pub fn weights(m: &RadialMinimizer) -> Result<WeightPair> {
    let pv = m.p.value();
    let r0 = m.collapse_radius.unwrap_or(m.pair.domain.inner);
    let nodes = m.profile.samples().nodes();
    let values = m.profile.samples().values();
    let mut s_out = Vec::new();
    let mut rho1 = Vec::new();
    let mut rho2 = Vec::new();
    for (&s, &h) in nodes.iter().zip(values) {
        if s == 0.0 {
            continue;
        }
        if s < r0 {
            s_out.push(s);
            rho1.push(0.0);
            rho2.push(h.powf(pv - 1.0) * s.powf(1.0 - pv));
            continue;
        }
        let g = match m.gauge.table() {
            None => 0.5,
            Some(_) => m.gauge.eval(s)?,
        };
        let base = if h == 0.0 && pv > 1.0 {
            0.0
        } else {
            (h / s).powf(pv - 1.0) * (1.0 - g).powf(-(pv - 1.0) / 2.0)
        };
        s_out.push(s);
        rho1.push(s * g.sqrt() * base);
        rho2.push((1.0 - g).sqrt() * base);
    }
    Ok(WeightPair {
        rho1: SampledFunction::new(s_out.clone(), rho1)?,
        rho2: SampledFunction::new(s_out, rho2)?,
    })
}

/// The p = 1 duality check: energies of the solved minimizers for the
/// instance and its swap, which must agree.
pub fn dual_energy_check(a: &AnnulusPair) -> Result<(f64, f64)> {
    let p = Exponent::new(1.0)?;
    let fwd = solve_profile(a, p)?;
    let bwd = solve_profile(&a.swapped(), p)?;
    if fwd.regime != Regime::Homeomorphic || bwd.regime != Regime::Homeomorphic {
        return Err(Error::RegimeMismatch {
            want: Regime::Homeomorphic.as_str(),
            got: "non-homeomorphic pair member",
        });
    }
    Ok((fwd.energy, bwd.energy))
}

/// Random monotone competitor profile with pinned endpoints: squared-uniform
/// increments, lightly smoothed, rescaled onto `[r*, R*]`.
pub fn random_competitor<G: Rng>(a: &AnnulusPair, n: usize, rng: &mut G) -> RadialProfile {
    let r = a.domain.inner;
    let nodes: Vec<f64> = if r > 0.0 {
        log_grid(r, a.domain.outer, n)
    } else {
        (0..n)
            .map(|i| a.domain.outer * i as f64 / (n - 1) as f64)
            .collect()
    };
    let mut inc: Vec<f64> = (0..n - 1)
        .map(|_| {
            let u: f64 = rng.gen();
            0.05 + u * u
        })
        .collect();
    for _ in 0..2 {
        let prev = inc.clone();
        for i in 0..inc.len() {
            let left = prev[i.saturating_sub(1)];
            let right = prev[(i + 1).min(prev.len() - 1)];
            inc[i] = 0.25 * left + 0.5 * prev[i] + 0.25 * right;
        }
    }
    let total: f64 = inc.iter().sum();
    let span = a.target.outer - a.target.inner;
    let mut values = Vec::with_capacity(n);
    let mut acc = 0.0;
    values.push(a.target.inner);
    for w in &inc {
        acc += w;
        values.push(a.target.inner + span * acc / total);
    }
    *values.last_mut().unwrap() = a.target.outer;
    RadialProfile::new(
        SampledFunction::new(nodes, values).unwrap(),
        a.target.inner,
        a.target.outer,
    )
    .unwrap()
}
