//! The closed-curve functional `B(gamma) = int |e^{it} - gamma(t)| + |gamma'|`
//! on polygonal curves in the closed unit disk, with the three symmetrization
//! devices: convex combination, rotational averaging, convex-hull replacement.

use crate::{Error, Result};
use rand::Rng;
use serde::Serialize;
use std::f64::consts::PI;

/// Vertex-radius slack over the closed unit disk.
pub const DISK_TOL: f64 = 1e-12;

/// Sample count of the closest-point reparametrization in [`convexify`].
pub const CONVEXIFY_SAMPLES: usize = 4096;

/// A closed curve given by `K >= 1` vertices at uniform parameter spacing
/// `2 pi / K`, linearly interpolated, with an implicit closing edge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolygonalCurve {
    vertices: Vec<[f64; 2]>,
}

impl PolygonalCurve {
    pub fn new(vertices: Vec<[f64; 2]>) -> Result<PolygonalCurve> {
        if vertices.is_empty() {
            return Err(Error::InvalidGrid);
        }
        for v in &vertices {
            if (v[0] * v[0] + v[1] * v[1]).sqrt() > 1.0 + DISK_TOL {
                return Err(Error::OutOfDomain(
                    (v[0] * v[0] + v[1] * v[1]).sqrt(),
                    (0.0, 1.0),
                ));
            }
        }
        Ok(PolygonalCurve { vertices })
    }

    /// Constant curve at a single point.
    pub fn constant(point: [f64; 2]) -> Result<PolygonalCurve> {
        PolygonalCurve::new(vec![point])
    }

    /// Centered circle of radius `rho` sampled at `k` vertices.
    pub fn circle(rho: f64, k: usize) -> Result<PolygonalCurve> {
        let vertices = (0..k)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / k as f64;
                [rho * t.cos(), rho * t.sin()]
            })
            .collect();
        PolygonalCurve::new(vertices)
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.vertices.len() as f64
    }

    /// Point at parameter `t` (periodic).
    pub fn eval(&self, t: f64) -> [f64; 2] {
        let k = self.vertices.len();
        if k == 1 {
            return self.vertices[0];
        }
        let u = (t / self.spacing()).rem_euclid(k as f64);
        let i = (u as usize).min(k - 1);
        let frac = u - i as f64;
        let a = self.vertices[i];
        let b = self.vertices[(i + 1) % k];
        [
            a[0] * (1.0 - frac) + b[0] * frac,
            a[1] * (1.0 - frac) + b[1] * frac,
        ]
    }

    /// Exact polygonal length including the closing edge.
    pub fn length(&self) -> f64 {
        let k = self.vertices.len();
        if k == 1 {
            return 0.0;
        }
        (0..k)
            .map(|i| {
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % k];
                ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt()
            })
            .sum()
    }

    /// Resample at `k` uniform parameters. When the old vertex count divides
    /// `k` this is geometry-preserving (new vertices lie on the old edges and
    /// include every old vertex).
    pub fn resample(&self, k: usize) -> PolygonalCurve {
        let old = self.vertices.len();
        let vertices = if k % old == 0 {
            // Exact: interpolate along edge i with fraction j/step.
            let step = k / old;
            (0..k)
                .map(|idx| {
                    let i = idx / step;
                    let frac = (idx % step) as f64 / step as f64;
                    let a = self.vertices[i];
                    let b = self.vertices[(i + 1) % old];
                    [
                        a[0] * (1.0 - frac) + b[0] * frac,
                        a[1] * (1.0 - frac) + b[1] * frac,
                    ]
                })
                .collect()
        } else {
            (0..k)
                .map(|idx| self.eval(2.0 * PI * idx as f64 / k as f64))
                .collect()
        };
        PolygonalCurve { vertices }
    }

    /// Relative spread of the vertex radii, `(max - min) / max`.
    pub fn radial_spread(&self) -> f64 {
        let radii: Vec<f64> = self
            .vertices
            .iter()
            .map(|v| (v[0] * v[0] + v[1] * v[1]).sqrt())
            .collect();
        let max = radii.iter().cloned().fold(0.0f64, f64::max);
        let min = radii.iter().cloned().fold(f64::INFINITY, f64::min);
        if max == 0.0 {
            0.0
        } else {
            (max - min) / max
        }
    }
}

/// `B(gamma)`: trapezoid quadrature of `|e^{it} - gamma(t)|` at `quad_points`
/// uniform parameters plus the exact polygonal length.
pub fn b_energy(c: &PolygonalCurve, quad_points: usize) -> f64 {
    assert!(quad_points >= c.len(), "quad_points must be >= vertex count");
    let n = quad_points;
    let dt = 2.0 * PI / n as f64;
    let mut dist = 0.0;
    for j in 0..n {
        let t = j as f64 * dt;
        let g = c.eval(t);
        let dx = t.cos() - g[0];
        let dy = t.sin() - g[1];
        dist += (dx * dx + dy * dy).sqrt();
    }
    dist * dt + c.length()
}

/// `gamma_theta(t) = e^{i theta} gamma(t - theta)`: simultaneous rotation of
/// the image and shift of the parametrization. Exact cyclic vertex shift when
/// `theta` is a multiple of the parameter spacing, interpolated otherwise.
pub fn rotate_curve(c: &PolygonalCurve, theta: f64) -> PolygonalCurve {
    let k = c.len();
    let (ct, st) = (theta.cos(), theta.sin());
    let rot = |v: [f64; 2]| [ct * v[0] - st * v[1], st * v[0] + ct * v[1]];

    let steps = theta / c.spacing();
    let vertices: Vec<[f64; 2]> = if (steps - steps.round()).abs() < 1e-12 {
        let m = (steps.round() as i64).rem_euclid(k as i64) as usize;
        (0..k)
            .map(|i| rot(c.vertices[(i + k - m) % k]))
            .collect()
    } else {
        (0..k)
            .map(|i| rot(c.eval(i as f64 * c.spacing() - theta)))
            .collect()
    };
    PolygonalCurve { vertices }
}

/// `beta(t) = (1/N) sum_k gamma_{2 pi k / N}(t)`. The curve is first
/// resampled so the rotation angles are exact vertex shifts; the result has
/// N-fold symmetry by construction.
pub fn nfold_average(c: &PolygonalCurve, n_fold: usize) -> PolygonalCurve {
    assert!(n_fold >= 1);
    if n_fold == 1 {
        return c.clone();
    }
    let k = c.len();
    let kk = k * n_fold / gcd(k, n_fold);
    let base = c.resample(kk);
    let shift = kk / n_fold;
    let mut vertices = vec![[0.0f64; 2]; kk];
    for j in 0..n_fold {
        let theta = 2.0 * PI * j as f64 / n_fold as f64;
        let (ct, st) = (theta.cos(), theta.sin());
        for (i, v) in vertices.iter_mut().enumerate() {
            let w = base.vertices[(i + kk - (j * shift) % kk) % kk];
            v[0] += (ct * w[0] - st * w[1]) / n_fold as f64;
            v[1] += (st * w[0] + ct * w[1]) / n_fold as f64;
        }
    }
    // Convex combinations of disk points stay in the disk; clamp rounding.
    for v in &mut vertices {
        let norm = (v[0] * v[0] + v[1] * v[1]).sqrt();
        if norm > 1.0 {
            v[0] /= norm;
            v[1] /= norm;
        }
    }
    PolygonalCurve { vertices }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Boundary of the convex hull of the vertex set, reparametrized so `t` maps
/// to the hull point closest to `e^{it}` (the normal-cone construction for
/// convex curves coincides with closest-point projection).
pub fn convexify(c: &PolygonalCurve) -> PolygonalCurve {
    let hull = convex_hull(&c.vertices);
    let n = CONVEXIFY_SAMPLES;
    let vertices = (0..n)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / n as f64;
            closest_point(&hull, [t.cos(), t.sin()])
        })
        .collect();
    PolygonalCurve { vertices }
}

/// Monotone-chain convex hull, counter-clockwise, collinear points dropped
/// at threshold 1e-12. Degenerate cases yield a point or a segment.
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let build = |iter: &mut dyn Iterator<Item = [f64; 2]>| {
        let mut chain: Vec<[f64; 2]> = Vec::new();
        for p in iter {
            while chain.len() >= 2
                && cross(chain[chain.len() - 2], chain[chain.len() - 1], p) <= 1e-12
            {
                chain.pop();
            }
            chain.push(p);
        }
        chain
    };
    let mut lower = build(&mut pts.iter().cloned());
    let mut upper = build(&mut pts.iter().rev().cloned());
    lower.pop();
    upper.pop();
    lower.append(&mut upper);
    if lower.len() < 2 {
        // All points collinear after pruning: keep the extreme pair.
        return vec![pts[0], *pts.last().unwrap()];
    }
    lower
}

/// Closest point of the convex hull (as a closed region) to `p`: `p` itself
/// when inside, otherwise the nearest boundary point over all edges.
pub fn closest_point(hull: &[[f64; 2]], p: [f64; 2]) -> [f64; 2] {
    match hull.len() {
        0 => p,
        1 => hull[0],
        2 => project_segment(hull[0], hull[1], p),
        _ => {
            let inside = (0..hull.len()).all(|i| {
                let a = hull[i];
                let b = hull[(i + 1) % hull.len()];
                (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) >= 0.0
            });
            if inside {
                return p;
            }
            let mut best = hull[0];
            let mut best_d = f64::INFINITY;
            for i in 0..hull.len() {
                let q = project_segment(hull[i], hull[(i + 1) % hull.len()], p);
                let d = (q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2);
                if d < best_d {
                    best_d = d;
                    best = q;
                }
            }
            best
        }
    }
}

fn project_segment(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> [f64; 2] {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    if len2 == 0.0 {
        return a;
    }
    let t = (((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0);
    [a[0] + t * ab[0], a[1] + t * ab[1]]
}

/// Alternate `nfold_average` and `convexify` along the schedule, recording
/// each intermediate curve and its energy at a fixed quadrature resolution.
pub fn symmetrization_flow(
    c: &PolygonalCurve,
    schedule: &[usize],
    quad_points: usize,
) -> (Vec<PolygonalCurve>, Vec<f64>) {
    let mut curves = vec![c.clone()];
    let mut energies = vec![b_energy(c, quad_points.max(c.len()))];
    for &n in schedule {
        let averaged = nfold_average(curves.last().unwrap(), n);
        energies.push(b_energy(&averaged, quad_points.max(averaged.len())));
        curves.push(averaged);
        let hulled = convexify(curves.last().unwrap());
        energies.push(b_energy(&hulled, quad_points.max(hulled.len())));
        curves.push(hulled);
    }
    (curves, energies)
}

/// A uniformly random curve with `k` vertices drawn uniformly from the disk.
pub fn random_curve<G: Rng>(rng: &mut G, k: usize) -> PolygonalCurve {
    let vertices = (0..k)
        .map(|_| {
            let r = rng.gen_range(0.0f64..1.0).sqrt();
            let t = rng.gen_range(0.0..2.0 * PI);
            [r * t.cos(), r * t.sin()]
        })
        .collect();
    PolygonalCurve { vertices }
}
