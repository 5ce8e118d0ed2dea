//! Brute-force verification devices: a dynamic-programming global minimizer
//! over discretized monotone radial profiles, and a 2D polar-grid energy with
//! perturbation and descent probes.

use crate::geometry::{Annulus, AnnulusPair, Exponent, RadialProfile, SampledFunction};
use crate::numeric::log_grid;
use crate::radial::RadialMinimizer;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Regularization added under the square root of the p = 1 integrand during
/// gradient descent; keeps the gradient defined where `|Dh| = 0`.
pub const DESCENT_REG: f64 = 1e-12;

/// Finite-difference step for the descent gradient.
pub const DESCENT_FD_STEP: f64 = 1e-6;

// ---------------------------------------------------------------------------
// Profile lattice and dynamic program
// ---------------------------------------------------------------------------

/// Discretization of the monotone radial profile class: log-uniform radii,
/// uniform value levels with the target radii included exactly.
#[derive(Debug, Clone)]
pub struct ProfileLattice {
    s_nodes: Vec<f64>,
    h_levels: Vec<f64>,
}

impl ProfileLattice {
    /// Lattice with `n` radii over the domain annulus and `m` levels over the
    /// target annulus. Requires a positive inner domain radius.
    pub fn new(a: &AnnulusPair, n: usize, m: usize) -> Result<ProfileLattice> {
        if n < 2 || m < 2 {
            return Err(Error::InvalidGrid);
        }
        if a.domain.inner <= 0.0 {
            return Err(Error::Invalid(
                "profile lattice needs a positive inner domain radius".into(),
            ));
        }
        let s_nodes = log_grid(a.domain.inner, a.domain.outer, n);
        let (lo, hi) = (a.target.inner, a.target.outer);
        let mut h_levels: Vec<f64> = (0..m)
            .map(|k| lo + (hi - lo) * k as f64 / (m - 1) as f64)
            .collect();
        h_levels[0] = lo;
        h_levels[m - 1] = hi;
        Ok(ProfileLattice { s_nodes, h_levels })
    }

    pub fn s_nodes(&self) -> &[f64] {
        &self.s_nodes
    }

    pub fn h_levels(&self) -> &[f64] {
        &self.h_levels
    }

    /// Energy of the linear segment from `(s_i, a)` to `(s_{i+1}, b)` by
    /// Simpson quadrature of `2 pi (Hdot^2 + (H/s)^2)^{p/2} s`.
    pub fn segment_cost(&self, p: Exponent, i: usize, a: f64, b: f64) -> f64 {
        let (s0, s1) = (self.s_nodes[i], self.s_nodes[i + 1]);
        let ds = s1 - s0;
        let slope2 = ((b - a) / ds) * ((b - a) / ds);
        let half = p.value() / 2.0;
        let f = |s: f64, h: f64| (slope2 + (h / s) * (h / s)).powf(half) * s;
        let mid = f(0.5 * (s0 + s1), 0.5 * (a + b));
        2.0 * PI * ds / 6.0 * (f(s0, a) + 4.0 * mid + f(s1, b))
    }
}

/// Exact global minimum of the lattice energy over monotone paths pinned to
/// the target radii at the ends, by forward DP over level transitions.
///
/// A transition from level `k` to `k' >= k` across segment `i` costs at least
/// `pi (s1^2 - s0^2) |dh|^p / ds^p` (dropping the angular term; Simpson is
/// exact on the linear factor `s`) and at least `w_i h_k^p` (dropping the
/// stretch term; `H >= h_k` on the segment). Both bounds hold for the
/// quadrature cost itself, so scanning candidate `k` downward with an
/// incumbent and breaking once `min_{j<=k} dp[j]` plus the vertical bound
/// exceeds it prunes without affecting exactness.
pub fn dp_minimize(lat: &ProfileLattice, p: Exponent) -> Result<(RadialProfile, f64)> {
    let n = lat.s_nodes.len();
    let m = lat.h_levels.len();
    let pv = p.value();
    let dh = (lat.h_levels[m - 1] - lat.h_levels[0]) / (m - 1) as f64;

    // Vertical jump magnitudes |b - a|^p and level powers h_k^p, reused
    // across every segment.
    let powdh: Vec<f64> = (0..m).map(|d| (d as f64 * dh).powf(pv)).collect();
    let pow_h: Vec<f64> = lat.h_levels.iter().map(|h| h.powf(pv)).collect();

    let mut dp = vec![f64::INFINITY; m];
    let mut next = vec![f64::INFINITY; m];
    let mut prefmin = vec![f64::INFINITY; m];
    let mut vlbs = vec![0.0; m];
    let mut hlbs = vec![0.0; m];
    let mut parent = vec![0u32; n * m];
    dp[0] = 0.0;

    for i in 0..n - 1 {
        let mut run = f64::INFINITY;
        for k in 0..m {
            run = run.min(dp[k]);
            prefmin[k] = run;
        }
        let (s0, s1) = (lat.s_nodes[i], lat.s_nodes[i + 1]);
        let ds = s1 - s0;
        // Per-jump and per-level transition-cost lower bounds.
        let bv = PI * (s1 * s1 - s0 * s0) / ds.powf(pv);
        let mid = 0.5 * (s0 + s1);
        let w = 2.0 * PI * ds / 6.0
            * (s0.powf(1.0 - pv) + 4.0 * mid.powf(1.0 - pv) + s1.powf(1.0 - pv));
        for d in 0..m {
            vlbs[d] = bv * powdh[d];
            hlbs[d] = w * pow_h[d];
        }

        for kp in 0..m {
            let mut best = f64::INFINITY;
            let mut arg = kp as u32;
            let scan = dp[..=kp]
                .iter()
                .rev()
                .zip(prefmin[..=kp].iter().rev())
                .zip(hlbs[..=kp].iter().rev())
                .zip(vlbs[..=kp].iter())
                .enumerate();
            for (d, (((&dpk, &pm), &hlb), &vlb)) in scan {
                if pm + vlb >= best {
                    break;
                }
                if dpk + vlb.max(hlb) >= best {
                    continue;
                }
                let k = kp - d;
                let c = lat.segment_cost(p, i, lat.h_levels[k], lat.h_levels[kp]);
                if dpk + c < best {
                    best = dpk + c;
                    arg = k as u32;
                }
            }
            next[kp] = best;
            parent[(i + 1) * m + kp] = arg;
        }
        std::mem::swap(&mut dp, &mut next);
    }

    let energy = dp[m - 1];
    let mut levels = vec![0usize; n];
    levels[n - 1] = m - 1;
    for i in (1..n).rev() {
        levels[i - 1] = parent[i * m + levels[i]] as usize;
    }
    let values: Vec<f64> = levels.iter().map(|&k| lat.h_levels[k]).collect();
    let samples = SampledFunction::new(lat.s_nodes.clone(), values)?;
    let profile = RadialProfile::new(samples, lat.h_levels[0], lat.h_levels[m - 1])?;
    Ok((profile, energy))
}

// ---------------------------------------------------------------------------
// 2D polar grid maps
// ---------------------------------------------------------------------------

/// A map from a polar grid on a domain annulus into a closed target annulus.
/// The outer ring is pinned to `(R*/R) x`; all other values are clamped in
/// radius to the closed target annulus.
#[derive(Debug, Clone)]
pub struct GridMap2D {
    s_nodes: Vec<f64>,
    n_theta: usize,
    target: Annulus,
    values: Vec<[f64; 2]>,
}

impl GridMap2D {
    /// Build from a pointwise rule `f(s, theta) -> (x, y)`. The outer ring is
    /// overwritten with the exact boundary condition.
    pub fn from_fn<F: Fn(f64, f64) -> [f64; 2]>(
        domain: Annulus,
        target: Annulus,
        n_s: usize,
        n_theta: usize,
        f: F,
    ) -> Result<GridMap2D> {
        if n_s < 3 || n_theta < 8 {
            return Err(Error::InvalidGrid);
        }
        if domain.inner <= 0.0 {
            return Err(Error::Invalid(
                "polar grid needs a positive inner domain radius".into(),
            ));
        }
        let s_nodes: Vec<f64> = (0..n_s)
            .map(|i| domain.inner + (domain.outer - domain.inner) * i as f64 / (n_s - 1) as f64)
            .collect();
        let dtheta = 2.0 * PI / n_theta as f64;
        let mut values = Vec::with_capacity(n_s * n_theta);
        for (i, &s) in s_nodes.iter().enumerate() {
            for j in 0..n_theta {
                let th = j as f64 * dtheta;
                let v = if i == n_s - 1 {
                    [target.outer * th.cos(), target.outer * th.sin()]
                } else {
                    project(target, f(s, th))
                };
                values.push(v);
            }
        }
        Ok(GridMap2D { s_nodes, n_theta, target, values })
    }

    /// The identity map of an annulus onto itself.
    pub fn identity(a: Annulus, n_s: usize, n_theta: usize) -> Result<GridMap2D> {
        GridMap2D::from_fn(a, a, n_s, n_theta, |s, th| [s * th.cos(), s * th.sin()])
    }

    /// Lift a radial profile to the grid: `h(s e^{i theta}) = H(s) e^{i theta}`.
    pub fn lift_profile(
        h: &RadialProfile,
        target: Annulus,
        n_s: usize,
        n_theta: usize,
    ) -> Result<GridMap2D> {
        let domain = Annulus::new(
            h.inner_radius().max(crate::geometry::PUNCTURE_CUTOFF),
            h.outer_radius(),
        )?;
        GridMap2D::from_fn(domain, target, n_s, n_theta, |s, th| {
            let v = h
                .eval(s.clamp(h.inner_radius(), h.outer_radius()))
                .expect("grid radii lie in the profile domain");
            [v * th.cos(), v * th.sin()]
        })
    }

    /// Lift a solved radial minimizer.
    pub fn lift_radial(m: &RadialMinimizer, n_s: usize, n_theta: usize) -> Result<GridMap2D> {
        GridMap2D::lift_profile(&m.profile, m.pair.target, n_s, n_theta)
    }

    pub fn s_nodes(&self) -> &[f64] {
        &self.s_nodes
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn target(&self) -> Annulus {
        self.target
    }

    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_theta as f64
    }

    pub fn value(&self, i: usize, j: usize) -> [f64; 2] {
        self.values[i * self.n_theta + j]
    }

    /// The domain annulus the grid covers.
    pub fn domain(&self) -> Annulus {
        Annulus::new(self.s_nodes[0], *self.s_nodes.last().unwrap()).unwrap()
    }

    /// Rotate by `shift` grid angles: values rotate by `alpha` and the
    /// parametrization shifts, `h'(s, theta) = e^{i alpha} h(s, theta - alpha)`.
    pub fn rotate(&self, shift: usize) -> GridMap2D {
        let nt = self.n_theta;
        let alpha = 2.0 * PI * shift as f64 / nt as f64;
        let (ca, sa) = (alpha.cos(), alpha.sin());
        let mut values = self.values.clone();
        for i in 0..self.s_nodes.len() {
            for j in 0..nt {
                let [x, y] = self.values[i * nt + (j + nt - shift % nt) % nt];
                values[i * nt + j] = [ca * x - sa * y, sa * x + ca * y];
            }
        }
        GridMap2D { s_nodes: self.s_nodes.clone(), n_theta: nt, target: self.target, values }
    }

    /// Add a perturbation field to every non-outer ring, reprojecting into
    /// the closed target annulus. The outer ring is left untouched.
    pub fn perturbed<F: Fn(f64, f64) -> [f64; 2]>(&self, d: F) -> GridMap2D {
        let mut out = self.clone();
        let nt = self.n_theta;
        for (i, &s) in self.s_nodes.iter().enumerate().take(self.s_nodes.len() - 1) {
            for j in 0..nt {
                let th = self.theta(j);
                let [x, y] = self.values[i * nt + j];
                let [dx, dy] = d(s, th);
                out.values[i * nt + j] = project(self.target, [x + dx, y + dy]);
            }
        }
        out
    }

    /// Largest distance of an outer-ring value from the target outer circle.
    pub fn outer_ring_offset(&self) -> f64 {
        let i = self.s_nodes.len() - 1;
        (0..self.n_theta)
            .map(|j| {
                let [x, y] = self.value(i, j);
                ((x * x + y * y).sqrt() - self.target.outer).abs()
            })
            .fold(0.0, f64::max)
    }
}

fn project(target: Annulus, v: [f64; 2]) -> [f64; 2] {
    let norm = (v[0] * v[0] + v[1] * v[1]).sqrt();
    if norm < 1e-300 {
        return [target.inner, 0.0];
    }
    let clamped = norm.clamp(target.inner, target.outer);
    if clamped == norm {
        v
    } else {
        [v[0] * clamped / norm, v[1] * clamped / norm]
    }
}

// ---------------------------------------------------------------------------
// Grid energy
// ---------------------------------------------------------------------------

/// Energy of one grid cell: the polar integrand at `(s_i, theta_j)` with
/// centered periodic differences in `theta`, centered radial differences in
/// the interior and one-sided ones at the edges, times the trapezoid cell
/// measure. `reg` is added under the root for the descent regularization.
fn cell_energy(map: &GridMap2D, pv: f64, reg: f64, i: usize, j: usize) -> f64 {
    let nt = map.n_theta;
    let ns = map.s_nodes.len();
    let s = map.s_nodes[i];
    let dtheta = 2.0 * PI / nt as f64;

    let v = |ii: usize, jj: usize| map.values[ii * nt + jj % nt];

    let (hs, ws) = if i == 0 {
        let a = v(0, j);
        let b = v(1, j);
        let ds = map.s_nodes[1] - map.s_nodes[0];
        ([(b[0] - a[0]) / ds, (b[1] - a[1]) / ds], 0.5 * ds)
    } else if i == ns - 1 {
        let a = v(ns - 2, j);
        let b = v(ns - 1, j);
        let ds = map.s_nodes[ns - 1] - map.s_nodes[ns - 2];
        ([(b[0] - a[0]) / ds, (b[1] - a[1]) / ds], 0.5 * ds)
    } else {
        let a = v(i - 1, j);
        let b = v(i + 1, j);
        let ds = map.s_nodes[i + 1] - map.s_nodes[i - 1];
        (
            [(b[0] - a[0]) / ds, (b[1] - a[1]) / ds],
            0.5 * (map.s_nodes[i + 1] - map.s_nodes[i - 1]),
        )
    };

    let a = v(i, (j + nt - 1) % nt);
    let b = v(i, j + 1);
    let ht = [(b[0] - a[0]) / (2.0 * dtheta), (b[1] - a[1]) / (2.0 * dtheta)];

    let q = hs[0] * hs[0] + hs[1] * hs[1] + (ht[0] * ht[0] + ht[1] * ht[1]) / (s * s) + reg;
    let density = if pv == 1.0 {
        q.sqrt()
    } else if pv == 2.0 {
        q
    } else {
        q.powf(pv / 2.0)
    };
    density * s * ws * dtheta
}

/// Discretized energy `int int (|h_s|^2 + |h_theta / s|^2)^{p/2} s ds dtheta`
/// with a regularization `reg` under the root.
pub fn grid_energy_reg(map: &GridMap2D, p: Exponent, reg: f64) -> f64 {
    let nt = map.n_theta;
    let pv = p.value();
    (0..map.s_nodes.len())
        .map(|i| (0..nt).map(|j| cell_energy(map, pv, reg, i, j)).sum::<f64>())
        .sum()
}

/// Discretized p-harmonic energy of a grid map.
pub fn grid_energy(map: &GridMap2D, p: Exponent) -> f64 {
    grid_energy_reg(map, p, 0.0)
}

// ---------------------------------------------------------------------------
// Perturbation probe
// ---------------------------------------------------------------------------

/// Outcome of the local-minimality probe around a lifted radial minimizer.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub instance: AnnulusPair,
    pub p: f64,
    pub grid: (usize, usize),
    pub base_energy: f64,
    pub energies: Vec<f64>,
    pub deltas: Vec<f64>,
    pub min_delta: f64,
    pub amplitude: f64,
    pub seed: u64,
}

/// Evaluate `trials` random smooth perturbations of `base` (vanishing on the
/// outer ring, projected into the target annulus) and report the energy
/// deltas against the unperturbed map.
pub fn perturbation_probe(
    base: &GridMap2D,
    p: Exponent,
    trials: usize,
    amplitude: f64,
    seed: u64,
) -> ProbeReport {
    let base_energy = grid_energy(base, p);
    let domain = base.domain();

    let energies: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial.wrapping_mul(0x9e3779b97f4a7c15)));
            let field = random_smooth_field(&mut rng, domain, amplitude);
            let perturbed = base.perturbed(|s, th| field(s, th));
            grid_energy(&perturbed, p)
        })
        .collect();

    let deltas: Vec<f64> = energies.iter().map(|e| e - base_energy).collect();
    let min_delta = deltas.iter().cloned().fold(f64::INFINITY, f64::min);
    ProbeReport {
        instance: AnnulusPair { domain, target: base.target() },
        p: p.value(),
        grid: (base.s_nodes().len(), base.n_theta()),
        base_energy,
        energies,
        deltas,
        min_delta,
        amplitude,
        seed,
    }
}

/// A random low-frequency field with sup norm `amplitude`, vanishing at the
/// outer radius through the `sin(k pi (R - s)/(R - r))` envelopes.
fn random_smooth_field<G: Rng>(
    rng: &mut G,
    domain: Annulus,
    amplitude: f64,
) -> impl Fn(f64, f64) -> [f64; 2] {
    const MODES: usize = 4; // angular frequencies 0..3
    const RADIAL: usize = 2;
    let mut coef = [[[0.0f64; 2]; MODES]; RADIAL];
    let mut phase = [[[0.0f64; 2]; MODES]; RADIAL];
    let mut total = 0.0;
    for k in 0..RADIAL {
        for m in 0..MODES {
            for c in 0..2 {
                coef[k][m][c] = rng.gen_range(-1.0..1.0);
                phase[k][m][c] = rng.gen_range(0.0..2.0 * PI);
                total += coef[k][m][c].abs();
            }
        }
    }
    let scale = if total > 0.0 { amplitude / total } else { 0.0 };
    let (r, big_r) = (domain.inner, domain.outer);
    move |s: f64, th: f64| {
        let u = (big_r - s) / (big_r - r);
        let mut out = [0.0f64; 2];
        for k in 0..RADIAL {
            let env = ((k + 1) as f64 * PI * u).sin();
            for m in 0..MODES {
                for c in 0..2 {
                    out[c] += scale * coef[k][m][c] * (m as f64 * th + phase[k][m][c]).cos() * env;
                }
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Free-outer-boundary descent
// ---------------------------------------------------------------------------

/// Trace of a projected-gradient run with a slipping outer boundary.
#[derive(Debug, Clone, Serialize)]
pub struct DescentReport {
    pub p: f64,
    pub grid: (usize, usize),
    pub energies: Vec<f64>,
    pub final_energy: f64,
    pub steps_taken: usize,
    /// Set when a full line-search sweep failed to decrease the energy.
    pub stalled: bool,
    pub max_outer_offset: f64,
}

/// Projected gradient descent of the regularized grid energy. Interior
/// values are clamped into the closed target annulus; outer-ring values are
/// constrained to the circle `|v| = R*` but slip freely in angle (gradient
/// projected tangentially, values renormalized after each step).
pub fn descend_free_outer(
    seed: &GridMap2D,
    p: Exponent,
    max_steps: usize,
) -> Result<(GridMap2D, DescentReport)> {
    let mut map = seed.clone();
    let nt = map.n_theta;
    let ns = map.s_nodes.len();
    let pv = p.value();
    let reg = DESCENT_REG;

    let mut energy = grid_energy_reg(&map, p, reg);
    let mut energies = vec![energy];
    let mut step = 0.05;
    let mut stalled = false;
    let mut steps_taken = 0;

    let mut grad = vec![[0.0f64; 2]; ns * nt];
    for _ in 0..max_steps {
        // Forward finite differences on each value component; a bump at
        // (i, j) only touches the cells whose stencil reads that value.
        for i in 0..ns {
            for j in 0..nt {
                let before = stencil_energy(&map, pv, reg, i, j);
                let idx = i * nt + j;
                for c in 0..2 {
                    let saved = map.values[idx][c];
                    map.values[idx][c] = saved + DESCENT_FD_STEP;
                    let after = stencil_energy(&map, pv, reg, i, j);
                    map.values[idx][c] = saved;
                    grad[idx][c] = (after - before) / DESCENT_FD_STEP;
                }
                if i == ns - 1 {
                    // Project onto the tangent of the slipping constraint.
                    let v = map.values[idx];
                    let n2 = v[0] * v[0] + v[1] * v[1];
                    let dot = (grad[idx][0] * v[0] + grad[idx][1] * v[1]) / n2;
                    grad[idx][0] -= dot * v[0];
                    grad[idx][1] -= dot * v[1];
                }
            }
        }

        let mut lambda = step;
        let mut accepted = false;
        for _ in 0..40 {
            let candidate = stepped(&map, &grad, lambda);
            let e = grid_energy_reg(&candidate, p, reg);
            if e < energy {
                map = candidate;
                energy = e;
                step = lambda * 1.5;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            stalled = true;
            break;
        }
        energies.push(energy);
        steps_taken += 1;
    }

    let max_outer_offset = map.outer_ring_offset();
    let final_energy = grid_energy(&map, p);
    let report = DescentReport {
        p: pv,
        grid: (ns, nt),
        energies,
        final_energy,
        steps_taken,
        stalled,
        max_outer_offset,
    };
    Ok((map, report))
}

/// Sum of the cell energies whose difference stencils read the value at
/// `(i, j)`: the cell itself and its four grid neighbours.
fn stencil_energy(map: &GridMap2D, pv: f64, reg: f64, i: usize, j: usize) -> f64 {
    let nt = map.n_theta;
    let ns = map.s_nodes.len();
    let mut e = cell_energy(map, pv, reg, i, j);
    if i > 0 {
        e += cell_energy(map, pv, reg, i - 1, j);
    }
    if i + 1 < ns {
        e += cell_energy(map, pv, reg, i + 1, j);
    }
    e += cell_energy(map, pv, reg, i, (j + 1) % nt);
    e += cell_energy(map, pv, reg, i, (j + nt - 1) % nt);
    e
}

/// One projected step `v - lambda g`: interior clamped into the target
/// annulus, outer ring renormalized back onto the outer circle.
fn stepped(map: &GridMap2D, grad: &[[f64; 2]], lambda: f64) -> GridMap2D {
    let mut out = map.clone();
    let nt = map.n_theta;
    let ns = map.s_nodes.len();
    for i in 0..ns {
        for j in 0..nt {
            let idx = i * nt + j;
            let v = [
                map.values[idx][0] - lambda * grad[idx][0],
                map.values[idx][1] - lambda * grad[idx][1],
            ];
            out.values[idx] = if i == ns - 1 {
                let norm = (v[0] * v[0] + v[1] * v[1]).sqrt();
                let r = map.target.outer;
                [v[0] * r / norm, v[1] * r / norm]
            } else {
                project(map.target, v)
            };
        }
    }
    out
}
