//! The free-boundary construction on the punctured disk: a circle
//! reparametrization composed with a radial redistribution whose simplified
//! energy `e[h] = int int s|h_s| + |h_theta|` approaches the infimum 2,
//! strictly below `e[Id] = 2 pi` and with `E_1[h] < sqrt(2) pi = E_1[Id]`.

use crate::{Error, Result};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Gauss-Legendre 4-point rule on [-1, 1].
const G4_X: [f64; 4] = [
    -0.8611363115940526,
    -0.3399810435848563,
    0.3399810435848563,
    0.8611363115940526,
];
const G4_W: [f64; 4] = [
    0.3478548451374538,
    0.6521451548625461,
    0.6521451548625461,
    0.3478548451374538,
];

/// Default subdivision count per smooth quadrature cell.
pub const DEFAULT_PANELS: usize = 64;

/// Wrap an angle into (-pi, pi].
fn wrap(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// The piecewise-linear circle reparametrization: the arc of length `eps`
/// around `pi` stretches onto the complement of the arc of length `eps`
/// around 0, anchored so `h1(pi) = pi`; the complement squeezes into that
/// arc. Slope `(2 pi - eps)/eps` on the stretch zone, reciprocal elsewhere.
pub fn h1_angle(eps: f64, theta: f64) -> f64 {
    let phi = wrap(theta - PI);
    let out = if phi.abs() <= eps / 2.0 {
        phi * (2.0 * PI - eps) / eps
    } else {
        phi.signum() * ((2.0 * PI - eps) / 2.0 + (phi.abs() - eps / 2.0) * eps / (2.0 * PI - eps))
    };
    (PI + out).rem_euclid(2.0 * PI)
}

/// Inverse of [`h1_angle`].
pub fn h1_angle_inv(eps: f64, alpha: f64) -> f64 {
    let psi = wrap(alpha - PI);
    let out = if psi.abs() <= (2.0 * PI - eps) / 2.0 {
        psi * eps / (2.0 * PI - eps)
    } else {
        psi.signum() * (eps / 2.0 + (psi.abs() - (2.0 * PI - eps) / 2.0) * (2.0 * PI - eps) / eps)
    };
    (PI + out).rem_euclid(2.0 * PI)
}

/// Slope of `h1_angle` at `theta` (away from the two kinks).
fn h1_slope(eps: f64, theta: f64) -> f64 {
    if wrap(theta - PI).abs() <= eps / 2.0 {
        (2.0 * PI - eps) / eps
    } else {
        eps / (2.0 * PI - eps)
    }
}

/// The two radial reparametrizations of `(0, 1)`.
///
/// `map1` squeezes all but a neighbourhood of the boundary outward: linear
/// from `(0, eps)` onto `(0, 1 - eps)`, then linear onto `(1 - eps, 1)`.
/// `map2` does the opposite, squeezing toward zero.
fn radial_maps(eps: f64, s: f64) -> (f64, f64) {
    let m1 = if s < eps {
        s * (1.0 - eps) / eps
    } else {
        1.0 - eps + (s - eps) * eps / (1.0 - eps)
    };
    let m2 = if s < 1.0 - eps {
        s * eps / (1.0 - eps)
    } else {
        eps + (s - (1.0 - eps)) * (1.0 - eps) / eps
    };
    (m1, m2)
}

fn radial_slopes(eps: f64, s: f64) -> (f64, f64) {
    let m1 = if s < eps { (1.0 - eps) / eps } else { eps / (1.0 - eps) };
    let m2 = if s < 1.0 - eps { eps / (1.0 - eps) } else { (1.0 - eps) / eps };
    (m1, m2)
}

/// Mixing weight of the second radial map at line angle `alpha`:
/// 0 on `S_eps(0)`, 1 outside `S_{2 eps}(0)`, linear in between.
fn zone_weight(eps: f64, alpha: f64) -> f64 {
    let a = wrap(alpha).abs();
    ((a - eps / 2.0) / (eps / 2.0)).clamp(0.0, 1.0)
}

/// The radial redistribution at line angle `theta` (measured in the target
/// of the first map).
pub fn h2_radial(eps: f64, theta: f64, s: f64) -> f64 {
    let (m1, m2) = radial_maps(eps, s);
    let w = zone_weight(eps, theta);
    (1.0 - w) * m1 + w * m2
}

/// Inverse of `s -> h2_radial(eps, theta, s)`; the map is piecewise linear
/// with breakpoints at `eps` and `1 - eps`.
pub fn h2_radial_inv(eps: f64, theta: f64, rho: f64) -> f64 {
    let breaks = [0.0, eps, 1.0 - eps, 1.0];
    let vals = [
        0.0,
        h2_radial(eps, theta, eps),
        h2_radial(eps, theta, 1.0 - eps),
        1.0,
    ];
    for i in 0..3 {
        if rho <= vals[i + 1] || i == 2 {
            return breaks[i] + (rho - vals[i]) / (vals[i + 1] - vals[i]) * (breaks[i + 1] - breaks[i]);
        }
    }
    unreachable!()
}

/// First partials of a map of the punctured disk written in target polar
/// coordinates `(rho, alpha)`.
#[derive(Debug, Clone, Copy)]
pub struct PolarJet {
    pub rho: f64,
    pub alpha: f64,
    pub rho_s: f64,
    pub rho_theta: f64,
    pub alpha_theta: f64,
}

impl PolarJet {
    /// `|h_s|` (radial lines map to radial lines, so `h_s` is radial).
    pub fn h_s(&self) -> f64 {
        self.rho_s.abs()
    }

    /// `|h_theta|`.
    pub fn h_theta(&self) -> f64 {
        (self.rho_theta * self.rho_theta + self.rho * self.rho * self.alpha_theta * self.alpha_theta)
            .sqrt()
    }
}

/// The composed construction `h = H2 . H1` at parameter `eps`.
#[derive(Debug, Clone, Copy)]
pub struct EpsMap {
    eps: f64,
}

impl EpsMap {
    pub fn new(eps: f64) -> Result<EpsMap> {
        if !(eps > 0.0 && eps < 0.25) {
            return Err(Error::Invalid(format!(
                "construction parameter eps = {eps} outside (0, 1/4)"
            )));
        }
        Ok(EpsMap { eps })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Image `(rho, alpha)` of the point `s e^{i theta}`.
    pub fn eval(&self, s: f64, theta: f64) -> (f64, f64) {
        let alpha = h1_angle(self.eps, theta);
        (h2_radial(self.eps, alpha, s), alpha)
    }

    /// Preimage `(s, theta)` of the point `rho e^{i alpha}`.
    pub fn inverse(&self, rho: f64, alpha: f64) -> (f64, f64) {
        (
            h2_radial_inv(self.eps, alpha, rho),
            h1_angle_inv(self.eps, alpha),
        )
    }

    /// First partials at `(s, theta)` (valid away from the zone breakpoints).
    pub fn jet(&self, s: f64, theta: f64) -> PolarJet {
        let eps = self.eps;
        let alpha = h1_angle(eps, theta);
        let alpha_theta = h1_slope(eps, theta);
        let (m1, m2) = radial_maps(eps, s);
        let (d1, d2) = radial_slopes(eps, s);
        let w = zone_weight(eps, alpha);
        let a = wrap(alpha);
        let dw_dalpha = if a.abs() > eps / 2.0 && a.abs() < eps {
            a.signum() * 2.0 / eps
        } else {
            0.0
        };
        PolarJet {
            rho: (1.0 - w) * m1 + w * m2,
            alpha,
            rho_s: (1.0 - w) * d1 + w * d2,
            rho_theta: dw_dalpha * (m2 - m1) * alpha_theta,
            alpha_theta,
        }
    }

    /// `int_0^1 s |h_s| ds` along the radial line through `theta`, in closed
    /// form (the integrand is piecewise linear in `s`).
    pub fn radial_line_integral(&self, theta: f64) -> f64 {
        let eps = self.eps;
        let w = zone_weight(eps, h1_angle(eps, theta));
        let mut total = 0.0;
        for (a, b) in [(0.0, eps), (eps, 1.0 - eps), (1.0 - eps, 1.0)] {
            let (d1, d2) = radial_slopes(eps, 0.5 * (a + b));
            total += ((1.0 - w) * d1 + w * d2) * (b * b - a * a) / 2.0;
        }
        total
    }

    /// Smooth-cell breakpoints in `s`.
    fn s_breaks(&self) -> Vec<f64> {
        vec![0.0, self.eps, 1.0 - self.eps, 1.0]
    }

    /// Smooth-cell breakpoints in `theta`: the two kinks of the circle
    /// reparametrization and the preimages of the zone edges `|alpha| = eps`.
    fn theta_breaks(&self) -> Vec<f64> {
        let eps = self.eps;
        let phi_eps = (PI - eps) * eps / (2.0 * PI - eps);
        let mut b = vec![
            0.0,
            PI - eps / 2.0,
            PI - phi_eps,
            PI + phi_eps,
            PI + eps / 2.0,
            2.0 * PI,
        ];
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b
    }
}

/// Tensor Gauss-4 quadrature of `f(s, theta)` over the breakpoint-aligned
/// cells, `panels` subdivisions per cell in each direction.
fn quad2<F: Fn(f64, f64) -> f64 + Sync>(
    s_breaks: &[f64],
    theta_breaks: &[f64],
    panels: usize,
    f: F,
) -> f64 {
    let mut cells = Vec::new();
    for sw in s_breaks.windows(2) {
        for tw in theta_breaks.windows(2) {
            for i in 0..panels {
                let s0 = sw[0] + (sw[1] - sw[0]) * i as f64 / panels as f64;
                let s1 = sw[0] + (sw[1] - sw[0]) * (i + 1) as f64 / panels as f64;
                cells.push((s0, s1, tw[0], tw[1]));
            }
        }
    }
    cells
        .par_iter()
        .map(|&(s0, s1, t0, t1)| {
            let hs = 0.5 * (s1 - s0);
            let cs = 0.5 * (s0 + s1);
            let mut cell = 0.0;
            for j in 0..panels {
                let u0 = t0 + (t1 - t0) * j as f64 / panels as f64;
                let u1 = t0 + (t1 - t0) * (j + 1) as f64 / panels as f64;
                let ht = 0.5 * (u1 - u0);
                let ct = 0.5 * (u0 + u1);
                for (xi, wi) in G4_X.iter().zip(G4_W) {
                    for (xj, wj) in G4_X.iter().zip(G4_W) {
                        cell += wi * wj * f(cs + hs * xi, ct + ht * xj) * hs * ht;
                    }
                }
            }
            cell
        })
        .sum()
}

/// The simplified energy `e[h] = int int s|h_s| + |h_theta| ds dtheta`.
pub fn e_energy(map: &EpsMap, panels: usize) -> f64 {
    quad2(&map.s_breaks(), &map.theta_breaks(), panels, |s, t| {
        let j = map.jet(s, t);
        s * j.h_s() + j.h_theta()
    })
}

/// The angular part of `e[h]` alone.
pub fn e_angular_part(map: &EpsMap, panels: usize) -> f64 {
    quad2(&map.s_breaks(), &map.theta_breaks(), panels, |s, t| {
        map.jet(s, t).h_theta()
    })
}

/// The full energy `E_1[h] = int int (|h_s|^2 + |h_theta / s|^2)^{1/2} s`.
pub fn e1_energy(map: &EpsMap, panels: usize) -> f64 {
    quad2(&map.s_breaks(), &map.theta_breaks(), panels, |s, t| {
        let j = map.jet(s, t);
        let hs = j.h_s();
        let ht = j.h_theta();
        (hs * hs + ht * ht / (s * s)).sqrt() * s
    })
}

/// `e[Id]` by the same quadrature (closed form `2 pi`; the identity has
/// `|h_s| = 1` and `|h_theta| = s`).
pub fn e_energy_identity(panels: usize) -> f64 {
    quad2(&[0.0, 1.0], &[0.0, 2.0 * PI], panels, |s, _| 2.0 * s)
}

/// `E_1[Id]` by the same quadrature (closed form `sqrt(2) pi`).
pub fn e1_energy_identity(panels: usize) -> f64 {
    quad2(&[0.0, 1.0], &[0.0, 2.0 * PI], panels, |s, _| {
        (1.0f64 + 1.0).sqrt() * s
    })
}
