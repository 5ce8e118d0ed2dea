//! Problem-instance types: the exponent, annulus pairs with their
//! normalization, and sampled monotone radial profiles.

use crate::numeric::bracket_index;
use crate::{Error, Result};
use serde::Serialize;

/// Absolute tolerance on profile endpoint values after normalization.
pub const ENDPOINT_TOL: f64 = 1e-9;

/// Grid cutoff used in place of an exact zero inner radius when a sampled
/// grid cannot start at the puncture itself.
pub const PUNCTURE_CUTOFF: f64 = 1e-6;

/// Energy exponent `p >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Exponent(f64);

impl Exponent {
    pub fn new(p: f64) -> Result<Exponent> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::InvalidExponent(p));
        }
        Ok(Exponent(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Minimizer construction and classification require `1 <= p < 2`.
    pub fn require_sub_quadratic(self) -> Result<Exponent> {
        if self.0 >= 2.0 {
            return Err(Error::ExponentOutOfRange(self.0));
        }
        Ok(self)
    }

    pub fn is_one(self) -> bool {
        self.0 == 1.0
    }
}

/// A concentric annulus `{ inner < |x| < outer }`; `inner = 0` is the
/// punctured disk, included by convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Annulus {
    pub inner: f64,
    pub outer: f64,
}

impl Annulus {
    pub fn new(inner: f64, outer: f64) -> Result<Annulus> {
        if !(inner >= 0.0) || !(outer > inner) || !outer.is_finite() {
            return Err(Error::InvalidAnnulus { inner, outer });
        }
        Ok(Annulus { inner, outer })
    }

    /// Ratio outer/inner as an extended real (infinite for the puncture).
    pub fn ratio(&self) -> crate::ExtReal {
        crate::ExtReal::ratio(self.outer, self.inner)
    }
}

/// Scale factors relating a normalized instance back to the original.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleFactors {
    /// Outer radius of the original domain annulus.
    pub domain: f64,
    /// Outer radius of the original target annulus.
    pub target: f64,
}

impl ScaleFactors {
    /// Factor by which the p-harmonic energy of the normalized instance must
    /// be multiplied to recover the original energy: the target dilation
    /// scales `|Dh|` by `target/domain` and the area element by `domain^2`.
    pub fn energy_factor(&self, p: Exponent) -> f64 {
        self.target.powf(p.value()) * self.domain.powf(2.0 - p.value())
    }
}

/// A domain annulus, a target annulus and nothing else: the problem instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnnulusPair {
    pub domain: Annulus,
    pub target: Annulus,
}

impl AnnulusPair {
    pub fn new(r: f64, big_r: f64, r_star: f64, big_r_star: f64) -> Result<AnnulusPair> {
        Ok(AnnulusPair {
            domain: Annulus::new(r, big_r)?,
            target: Annulus::new(r_star, big_r_star)?,
        })
    }

    /// Rescale both annuli so the outer radii become 1.
    pub fn normalized(&self) -> (AnnulusPair, ScaleFactors) {
        let factors = ScaleFactors {
            domain: self.domain.outer,
            target: self.target.outer,
        };
        let pair = AnnulusPair {
            domain: Annulus {
                inner: self.domain.inner / factors.domain,
                outer: 1.0,
            },
            target: Annulus {
                inner: self.target.inner / factors.target,
                outer: 1.0,
            },
        };
        (pair, factors)
    }

    pub fn is_normalized(&self) -> bool {
        self.domain.outer == 1.0 && self.target.outer == 1.0
    }

    /// The instance with domain and target swapped (the p = 1 dual problem).
    pub fn swapped(&self) -> AnnulusPair {
        AnnulusPair {
            domain: self.target,
            target: self.domain,
        }
    }
}

/// Piecewise-linear sampled scalar function on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledFunction {
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Result<SampledFunction> {
        if nodes.len() < 2 || nodes.len() != values.len() {
            return Err(Error::InvalidGrid);
        }
        if !nodes.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::InvalidGrid);
        }
        Ok(SampledFunction { nodes, values })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn first_node(&self) -> f64 {
        self.nodes[0]
    }

    pub fn last_node(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Linear interpolation inside the grid; outside is an error.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if x < self.first_node() || x > self.last_node() {
            return Err(Error::OutOfDomain(x, (self.first_node(), self.last_node())));
        }
        let i = bracket_index(&self.nodes, x);
        let (x0, x1) = (self.nodes[i], self.nodes[i + 1]);
        let t = (x - x0) / (x1 - x0);
        Ok(self.values[i] * (1.0 - t) + self.values[i + 1] * t)
    }

    /// Slope of segment `i`.
    pub fn slope(&self, i: usize) -> f64 {
        (self.values[i + 1] - self.values[i]) / (self.nodes[i + 1] - self.nodes[i])
    }
}

/// A monotone non-decreasing radial profile `H` over `[r, R]` with pinned
/// endpoint values (the monotone closure class of radial homeomorphisms).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialProfile {
    samples: SampledFunction,
}

impl RadialProfile {
    /// Build from samples, asserting monotonicity and endpoint values.
    pub fn new(samples: SampledFunction, inner_value: f64, outer_value: f64) -> Result<RadialProfile> {
        for (i, w) in samples.values().windows(2).enumerate() {
            if w[1] < w[0] {
                return Err(Error::NonMonotoneProfile(i + 1));
            }
        }
        for (got, want) in [
            (samples.values()[0], inner_value),
            (*samples.values().last().unwrap(), outer_value),
        ] {
            if (got - want).abs() > ENDPOINT_TOL {
                return Err(Error::EndpointMismatch { got, want, tol: ENDPOINT_TOL });
            }
        }
        Ok(RadialProfile { samples })
    }

    /// The identity profile on `[r, R]` sampled at `n` nodes.
    pub fn identity(r: f64, big_r: f64, n: usize) -> RadialProfile {
        let nodes: Vec<f64> = (0..n)
            .map(|i| r + (big_r - r) * i as f64 / (n - 1) as f64)
            .collect();
        let values = nodes.clone();
        RadialProfile {
            samples: SampledFunction::new(nodes, values).unwrap(),
        }
    }

    pub fn samples(&self) -> &SampledFunction {
        &self.samples
    }

    pub fn inner_radius(&self) -> f64 {
        self.samples.first_node()
    }

    pub fn outer_radius(&self) -> f64 {
        self.samples.last_node()
    }

    pub fn inner_value(&self) -> f64 {
        self.samples.values()[0]
    }

    pub fn outer_value(&self) -> f64 {
        *self.samples.values().last().unwrap()
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        self.samples.eval(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_already_normalized_is_identity() {
        let a = AnnulusPair::new(0.5, 1.0, 0.25, 1.0).unwrap();
        let (n, f) = a.normalized();
        assert_eq!(n, a);
        assert_eq!((f.domain, f.target), (1.0, 1.0));
    }

    #[test]
    fn normalize_divides_by_outer_radii() {
        let a = AnnulusPair::new(1.0, 2.0, 0.5, 2.0).unwrap();
        let (n, f) = a.normalized();
        assert_eq!(n, AnnulusPair::new(0.5, 1.0, 0.25, 1.0).unwrap());
        assert_eq!((f.domain, f.target), (2.0, 2.0));
    }

    #[test]
    fn normalize_is_idempotent() {
        let a = AnnulusPair::new(0.3, 1.7, 0.0, 4.0).unwrap();
        let (n1, _) = a.normalized();
        let (n2, _) = n1.normalized();
        assert_eq!(n1, n2);
    }

    #[test]
    fn identity_profile_evaluates() {
        let h = RadialProfile::identity(0.0, 1.0, 11);
        assert_eq!(h.eval(0.7).unwrap(), 0.7);
    }

    #[test]
    fn two_node_interpolation() {
        let f = SampledFunction::new(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        assert_eq!(f.eval(0.25).unwrap(), 0.25);
        assert!(f.eval(1.5).is_err());
        assert!(f.eval(-0.1).is_err());
    }

    #[test]
    fn collapsed_profile_plateau() {
        // H == r_star on [r, R0], then rises to 1.
        let f = SampledFunction::new(vec![0.1, 0.3, 0.6, 1.0], vec![0.4, 0.4, 0.7, 1.0]).unwrap();
        let h = RadialProfile::new(f, 0.4, 1.0).unwrap();
        assert_eq!(h.eval(0.2).unwrap(), 0.4);
    }

    #[test]
    fn non_monotone_profile_rejected() {
        let f = SampledFunction::new(vec![0.0, 0.5, 1.0], vec![0.0, 0.6, 0.5]).unwrap();
        assert!(matches!(
            RadialProfile::new(f, 0.0, 0.5),
            Err(Error::NonMonotoneProfile(2))
        ));
    }

    #[test]
    fn endpoint_mismatch_rejected() {
        let f = SampledFunction::new(vec![0.0, 1.0], vec![0.1, 1.0]).unwrap();
        assert!(RadialProfile::new(f, 0.0, 1.0).is_err());
    }

    #[test]
    fn exponent_bounds() {
        assert!(Exponent::new(0.5).is_err());
        assert!(Exponent::new(1.0).is_ok());
        assert!(Exponent::new(3.0).unwrap().require_sub_quadratic().is_err());
        assert!(Exponent::new(1.5).unwrap().require_sub_quadratic().is_ok());
    }

    #[test]
    fn energy_factor_matches_dilations() {
        let a = AnnulusPair::new(1.0, 2.0, 0.5, 3.0).unwrap();
        let (_, f) = a.normalized();
        let p = Exponent::new(1.5).unwrap();
        let expect = 3.0f64.powf(1.5) * 2.0f64.powf(0.5);
        assert!((f.energy_factor(p) - expect).abs() < 1e-14);
    }
}
