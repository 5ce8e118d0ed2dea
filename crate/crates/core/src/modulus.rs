//! The critical modulus function `m_p`, its inverse, and the phase
//! classification of annulus pairs into the three minimizer regimes.

use crate::gauge::{Branch, PhiTable, DEFAULT_DELTA, DEFAULT_TABLE_NODES};
use crate::geometry::{AnnulusPair, Exponent};
use crate::numeric::{bisect_known, integrate};
use crate::{Error, ExtReal, Result};
use serde::Serialize;
use std::sync::Arc;

/// Relative tolerance for phase-boundary comparisons; ties resolve toward
/// the homeomorphic regime (the boundary case still has a homeomorphic
/// minimizer).
pub const PHASE_REL_TOL: f64 = 1e-9;

/// Minimizer existence regime of an annulus pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// A homeomorphic radial minimizer exists.
    Homeomorphic,
    /// The minimizer collapses `[r, R0]` onto the inner target circle.
    Collapsed,
    /// No minimizer exists (p = 1 only, target too thick).
    NoMinimizer,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Homeomorphic => "Homeomorphic",
            Regime::Collapsed => "Collapsed",
            Regime::NoMinimizer => "NoMinimizer",
        }
    }
}

/// Classification of an instance with its certifying numbers.
#[derive(Debug, Clone, Serialize)]
pub struct PhaseReport {
    pub regime: Regime,
    /// `m_p(R/r)`.
    pub m_value: ExtReal,
    /// `m_1^{-1}(R/r)`, present only for p = 1.
    pub m_inverse_value: Option<ExtReal>,
    /// Collapse radius `R0 in (r, R)`, present only in the collapsed regime.
    pub collapse_radius_r0: Option<f64>,
}

/// The modulus function for one exponent, backed by a Below-branch table.
#[derive(Debug, Clone)]
pub struct ModulusMap {
    table: Arc<PhiTable>,
}

impl ModulusMap {
    pub fn new(p: Exponent) -> Result<ModulusMap> {
        let table = PhiTable::build(p, Branch::Below, DEFAULT_DELTA, DEFAULT_TABLE_NODES)?;
        Ok(ModulusMap { table: Arc::new(table) })
    }

    pub fn from_table(table: Arc<PhiTable>) -> Result<ModulusMap> {
        if table.branch() != Branch::Below {
            return Err(Error::Invalid("modulus map needs the Below branch table".into()));
        }
        Ok(ModulusMap { table })
    }

    pub fn p(&self) -> Exponent {
        self.table.p()
    }

    pub fn table(&self) -> Arc<PhiTable> {
        self.table.clone()
    }

    /// `log m_p(x)` as a function of `log x >= 0`, by quadrature in
    /// `u = log s`: the integrand is `sqrt(t)/sqrt(1-t)` at `t = Phi^{-1}(u)`,
    /// which vanishes linearly at `u = 0` and tends to 1 as `u -> infinity`.
    pub fn log_m(&self, log_x: f64) -> Result<f64> {
        if log_x < 0.0 {
            return Err(Error::OutOfDomain(log_x, (0.0, f64::INFINITY)));
        }
        if log_x == 0.0 {
            return Ok(0.0);
        }
        let f = |u: f64| {
            if u <= 0.0 {
                return 0.0;
            }
            let x = self.table.invert_x(u).expect("u >= 0 inverts");
            x / (1.0 - x * x).sqrt()
        };
        integrate(&f, 0.0, log_x, 1e-11)
    }

    /// `m_p(x)` for `x >= 1` (including `+infinity`).
    pub fn m(&self, x: ExtReal) -> Result<ExtReal> {
        match x {
            ExtReal::Infinite => Ok(ExtReal::Infinite),
            ExtReal::Finite(x) => {
                if x < 1.0 {
                    return Err(Error::OutOfDomain(x, (1.0, f64::INFINITY)));
                }
                Ok(ExtReal::Finite(self.log_m(x.ln())?.exp()))
            }
        }
    }

    /// Monotone inverse: `x` with `m_p(x) = y`, `y >= 1`. Infinite input
    /// (or a value beyond every bracketable finite one) maps to infinity.
    pub fn m_inverse(&self, y: ExtReal) -> Result<ExtReal> {
        let y = match y {
            ExtReal::Infinite => return Ok(ExtReal::Infinite),
            ExtReal::Finite(v) => v,
        };
        if y < 1.0 {
            return Err(Error::OutOfDomain(y, (1.0, f64::INFINITY)));
        }
        if y == 1.0 {
            return Ok(ExtReal::Finite(1.0));
        }
        // log m is increasing with log m(u) < u, so the root of
        // log m(u) - log y lies above log y; double until bracketed.
        let ly = y.ln();
        let mut hi = 2.0 * ly;
        let mut found = false;
        for _ in 0..64 {
            if self.log_m(hi)? >= ly {
                found = true;
                break;
            }
            hi *= 2.0;
            if !hi.is_finite() {
                break;
            }
        }
        if !found {
            return Ok(ExtReal::Infinite);
        }
        let f = |u: f64| self.log_m(u).expect("in-bracket evaluation") - ly;
        let u = bisect_known(&f, ly, hi, true, 1e-12 * hi.max(1.0), 200)?;
        Ok(ExtReal::Finite(u.exp()))
    }

    /// Phase classification of an annulus pair (the pair need not be
    /// normalized; only the two ratios enter).
    pub fn classify(&self, a: &AnnulusPair) -> Result<PhaseReport> {
        let p = self.p().require_sub_quadratic()?;
        let dom = a.domain.ratio();
        let tar = a.target.ratio();
        let m_value = self.m(dom)?;

        if p.is_one() {
            let m_inverse_value = self.m_inverse(dom)?;
            let regime = if le_rel(m_value, tar) {
                if le_rel(tar, m_inverse_value) {
                    Regime::Homeomorphic
                } else {
                    Regime::NoMinimizer
                }
            } else {
                Regime::Collapsed
            };
            let r0 = if regime == Regime::Collapsed {
                Some(self.collapse_radius_unchecked(a, tar)?)
            } else {
                None
            };
            return Ok(PhaseReport {
                regime,
                m_value,
                m_inverse_value: Some(m_inverse_value),
                collapse_radius_r0: r0,
            });
        }

        let regime = if le_rel(m_value, tar) {
            Regime::Homeomorphic
        } else {
            Regime::Collapsed
        };
        let r0 = if regime == Regime::Collapsed {
            Some(self.collapse_radius_unchecked(a, tar)?)
        } else {
            None
        };
        Ok(PhaseReport {
            regime,
            m_value,
            m_inverse_value: None,
            collapse_radius_r0: r0,
        })
    }

    /// Collapse radius `R0` for a pair already known to be collapsed:
    /// `m_p(R/R0) = R*/r*`, so `R0 = R / m_p^{-1}(R*/r*)`.
    fn collapse_radius_unchecked(&self, a: &AnnulusPair, tar: ExtReal) -> Result<f64> {
        let x = self.m_inverse(tar)?.unwrap_finite();
        Ok(a.domain.outer / x)
    }

    /// Collapse radius of a collapsed instance; an error in other regimes.
    pub fn collapse_radius(&self, a: &AnnulusPair) -> Result<f64> {
        let report = self.classify(a)?;
        match report.regime {
            Regime::Collapsed => Ok(report.collapse_radius_r0.unwrap()),
            other => Err(Error::RegimeMismatch {
                want: Regime::Collapsed.as_str(),
                got: other.as_str(),
            }),
        }
    }
}

/// `a <= b` up to the relative phase tolerance (ties count as `<=`).
fn le_rel(a: ExtReal, b: ExtReal) -> bool {
    match (a, b) {
        (_, ExtReal::Infinite) => true,
        (ExtReal::Infinite, ExtReal::Finite(_)) => false,
        (ExtReal::Finite(a), ExtReal::Finite(b)) => a <= b * (1.0 + PHASE_REL_TOL),
    }
}

/// One-shot `m_p(x)`; builds a table internally, so sweeps should prefer a
/// shared [`ModulusMap`].
pub fn modulus_mp(p: Exponent, x: ExtReal) -> Result<ExtReal> {
    ModulusMap::new(p)?.m(x)
}

/// One-shot `m_1^{-1}(y)`.
pub fn modulus_m1_inverse(y: ExtReal) -> Result<ExtReal> {
    ModulusMap::new(Exponent::new(1.0)?)?.m_inverse(y)
}

/// One-shot classification.
pub fn classify(a: &AnnulusPair, p: Exponent) -> Result<PhaseReport> {
    ModulusMap::new(p)?.classify(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::{Branch, PhiTable};

    fn p(v: f64) -> Exponent {
        Exponent::new(v).unwrap()
    }

    fn map(v: f64) -> ModulusMap {
        ModulusMap::new(p(v)).unwrap()
    }

    /// Independent oracle: re-integrate the defining integral against a
    /// doubled-resolution table with a tighter pole cutoff.
    fn oracle_m(pv: f64, x: f64) -> f64 {
        let table = PhiTable::build(p(pv), Branch::Below, 1e-9, 2 * DEFAULT_TABLE_NODES).unwrap();
        let f = |u: f64| {
            if u <= 0.0 {
                return 0.0;
            }
            let t = table.invert(u).unwrap();
            (t / (1.0 - t)).sqrt()
        };
        integrate(&f, 0.0, x.ln(), 1e-12).unwrap().exp()
    }

    #[test]
    fn matches_doubled_resolution_oracle() {
        for pv in [1.0, 1.3, 1.7] {
            let m = map(pv);
            for x in [1.5, 4.0, 16.0] {
                let got = m.m(ExtReal::Finite(x)).unwrap().unwrap_finite();
                let want = oracle_m(pv, x);
                assert!(
                    ((got - want) / want).abs() < 1e-8,
                    "p={pv} x={x}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn strictly_increasing_and_below_identity() {
        for pv in [1.0, 1.2, 1.5, 1.8] {
            let m = map(pv);
            let mut prev = 1.0;
            for x in [2.0, 4.0, 8.0, 16.0] {
                let v = m.m(ExtReal::Finite(x)).unwrap().unwrap_finite();
                assert!(v > prev, "p={pv}: m({x}) = {v} not above {prev}");
                assert!(v < x, "p={pv}: m({x}) = {v} not below x");
                prev = v;
            }
        }
    }

    #[test]
    fn infinite_argument_maps_to_infinity() {
        assert_eq!(map(1.5).m(ExtReal::Infinite).unwrap(), ExtReal::Infinite);
    }

    #[test]
    fn value_at_one_is_one() {
        assert_eq!(map(1.5).m(ExtReal::Finite(1.0)).unwrap(), ExtReal::Finite(1.0));
    }

    #[test]
    fn inverse_round_trip() {
        let m = map(1.0);
        for x in [1.5, 3.0, 10.0] {
            let y = m.m(ExtReal::Finite(x)).unwrap();
            let back = m.m_inverse(y).unwrap().unwrap_finite();
            assert!((back - x).abs() < 1e-6, "x={x}: round trip gave {back}");
        }
    }

    #[test]
    fn inverse_of_one_is_one() {
        assert_eq!(
            modulus_m1_inverse(ExtReal::Finite(1.0)).unwrap(),
            ExtReal::Finite(1.0)
        );
    }

    #[test]
    fn identity_pair_is_homeomorphic() {
        for pv in [1.0, 1.5] {
            let a = AnnulusPair::new(0.4, 1.0, 0.4, 1.0).unwrap();
            let rep = map(pv).classify(&a).unwrap();
            assert_eq!(rep.regime, Regime::Homeomorphic);
        }
    }

    #[test]
    fn punctured_disk_collapses_against_thick_target() {
        // r = 0, r* > 0: the punctured disk has infinite modulus, so any
        // target with positive inner radius is too thin for p > 1.
        let a = AnnulusPair::new(0.0, 1.0, 0.3, 1.0).unwrap();
        let rep = map(1.5).classify(&a).unwrap();
        assert_eq!(rep.regime, Regime::Collapsed);
        assert_eq!(rep.m_value, ExtReal::Infinite);
        let r0 = rep.collapse_radius_r0.unwrap();
        assert!(r0 > 0.0 && r0 < 1.0);
    }

    #[test]
    fn punctured_disk_to_punctured_disk_is_identity_regime() {
        let a = AnnulusPair::new(0.0, 1.0, 0.0, 1.0).unwrap();
        for pv in [1.0, 1.5] {
            let rep = map(pv).classify(&a).unwrap();
            assert_eq!(rep.regime, Regime::Homeomorphic);
        }
    }

    #[test]
    fn fatter_target_is_homeomorphic_for_p_above_one() {
        // r* < r keeps a homeomorphic minimizer for every p in (1, 2),
        // including r* = 0.
        let m = map(1.5);
        for r_star in [0.0, 0.1, 0.25] {
            let a = AnnulusPair::new(0.3, 1.0, r_star, 1.0).unwrap();
            assert_eq!(m.classify(&a).unwrap().regime, Regime::Homeomorphic);
        }
    }

    #[test]
    fn p_one_trichotomy_bands() {
        // Fixed domain annulus, sliding target inner radius: thick targets
        // (small r*) break existence, thin ones collapse.
        let m = map(1.0);
        let dom = (0.3f64, 1.0f64);
        let mval = m.m(ExtReal::Finite(1.0 / dom.0)).unwrap().unwrap_finite();
        let minv = m
            .m_inverse(ExtReal::Finite(1.0 / dom.0))
            .unwrap()
            .unwrap_finite();
        // Representative targets strictly inside each band.
        let thin = 1.0 / (0.5 * (1.0 + mval)); // 1 < ratio < m_1(R/r)
        let mid = 1.0 / (0.5 * (mval + minv)); // between the two bounds
        let thick = 1.0 / (2.0 * minv); // ratio > m_1^{-1}(R/r)
        let case = |r_star: f64| {
            let a = AnnulusPair::new(dom.0, dom.1, r_star, 1.0).unwrap();
            m.classify(&a).unwrap().regime
        };
        assert_eq!(case(thin), Regime::Collapsed);
        assert_eq!(case(mid), Regime::Homeomorphic);
        assert_eq!(case(thick), Regime::NoMinimizer);
    }

    #[test]
    fn p_one_no_minimizer_for_punctured_target() {
        let a = AnnulusPair::new(0.3, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(map(1.0).classify(&a).unwrap().regime, Regime::NoMinimizer);
    }

    #[test]
    fn p_one_duality_of_middle_regime() {
        let m = map(1.0);
        for (r, r_star) in [(0.3, 0.25), (0.3, 0.05), (0.5, 0.45), (0.2, 0.6)] {
            let a = AnnulusPair::new(r, 1.0, r_star, 1.0).unwrap();
            let fwd = m.classify(&a).unwrap().regime == Regime::Homeomorphic;
            let bwd = m.classify(&a.swapped()).unwrap().regime == Regime::Homeomorphic;
            assert_eq!(fwd, bwd, "duality broken at r={r}, r*={r_star}");
        }
    }

    #[test]
    fn collapse_radius_residual_small() {
        let m = map(1.4);
        for r_star in [0.5, 0.7, 0.9] {
            let a = AnnulusPair::new(0.1, 1.0, r_star, 1.0).unwrap();
            let rep = m.classify(&a).unwrap();
            assert_eq!(rep.regime, Regime::Collapsed, "r*={r_star}");
            let r0 = rep.collapse_radius_r0.unwrap();
            assert!(r0 > 0.1 && r0 < 1.0);
            let back = m.m(ExtReal::Finite(1.0 / r0)).unwrap().unwrap_finite();
            assert!(
                (back - 1.0 / r_star).abs() < 1e-8 * (1.0 / r_star),
                "r*={r_star}: residual {}",
                back - 1.0 / r_star
            );
        }
    }

    #[test]
    fn collapse_radius_limits() {
        let m = map(1.5);
        let mval = m.m(ExtReal::Finite(1.0 / 0.2)).unwrap().unwrap_finite();
        // Target ratio just inside the collapsed regime: R0 near r.
        let a = AnnulusPair::new(0.2, 1.0, 1.0 / (mval * 0.999), 1.0).unwrap();
        let r0 = m.collapse_radius(&a).unwrap();
        assert!((r0 - 0.2).abs() < 0.01, "R0 = {r0} not near r");
        // Target ratio near 1: R0 near R.
        let b = AnnulusPair::new(0.2, 1.0, 0.999, 1.0).unwrap();
        let r0 = m.collapse_radius(&b).unwrap();
        assert!(r0 > 0.9, "R0 = {r0} not near R");
    }

    #[test]
    fn collapse_radius_outside_regime_errors() {
        let m = map(1.5);
        let a = AnnulusPair::new(0.4, 1.0, 0.4, 1.0).unwrap();
        assert!(matches!(
            m.collapse_radius(&a),
            Err(Error::RegimeMismatch { .. })
        ));
    }

    #[test]
    fn boundary_tie_resolves_homeomorphic() {
        let m = map(1.5);
        let mval = m.m(ExtReal::Finite(4.0)).unwrap().unwrap_finite();
        let a = AnnulusPair::new(0.25, 1.0, 1.0 / mval, 1.0).unwrap();
        assert_eq!(m.classify(&a).unwrap().regime, Regime::Homeomorphic);
    }

    #[test]
    fn frozen_regression_values() {
        // Fixtures produced by the doubled-resolution oracle above.
        let cases = [
            (1.0, 2.0, 1.222_732_448_015_9),
            (1.0, 8.0, 3.734_863_743_230_0),
            (1.5, 2.0, 1.236_832_851_069_9),
            (1.5, 8.0, 3.921_078_268_316_9),
        ];
        for (pv, x, want) in cases {
            let got = map(pv).m(ExtReal::Finite(x)).unwrap().unwrap_finite();
            assert!(
                ((got - want) / want).abs() < 1e-7,
                "p={pv} x={x}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn rejects_p_two_and_above() {
        let m = ModulusMap::new(p(1.5)).unwrap();
        drop(m);
        assert!(ModulusMap::new(p(2.0)).is_err());
    }
}
