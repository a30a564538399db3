use std::f64::consts::{FRAC_2_PI, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkKind {
    /// `σ(u) = 1 / (1 + e^{-u/τ})`
    Logistic,
    /// `σ(u) = Φ(u / σ₀)`
    Probit,
    /// `σ(u) = ½ + arctan(u/τ) / π`
    Arctan,
}

/// Probabilistic link from a function gap to a preference probability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkFunction {
    pub kind: LinkKind,
    /// `τ` for logistic and arctan, `σ₀` for probit.
    pub scale: f64,
}

impl Default for LinkFunction {
    fn default() -> Self {
        Self { kind: LinkKind::Logistic, scale: 1.0 }
    }
}

/// Points in the grid certificate for `r`.
const CERT_GRID: usize = 1000;

impl LinkFunction {
    pub fn new(kind: LinkKind, scale: f64) -> Result<Self> {
        let link = Self { kind, scale };
        link.validate()?;
        Ok(link)
    }

    pub fn validate(&self) -> Result<()> {
        if self.scale > 0.0 && self.scale.is_finite() {
            Ok(())
        } else {
            Err(Error::config(format!("link scale must be finite and > 0, got {}", self.scale)))
        }
    }

    pub fn sigma(&self, u: f64) -> f64 {
        let s = self.scale;
        match self.kind {
            LinkKind::Logistic => 1.0 / (1.0 + (-u / s).exp()),
            LinkKind::Probit => 0.5 * libm::erfc(-u / (s * SQRT_2)),
            LinkKind::Arctan => 0.5 + (u / s).atan() / PI,
        }
    }

    /// `ρ(t) = 2σ(t) - 1` in closed form. Negative `t` is treated as 0.
    pub fn rho(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        let s = self.scale;
        match self.kind {
            LinkKind::Logistic => (t / (2.0 * s)).tanh(),
            LinkKind::Probit => libm::erf(t / (s * SQRT_2)),
            LinkKind::Arctan => FRAC_2_PI * (t / s).atan(),
        }
    }

    /// The deterministic confidence score `2σ(Δ) - 1 = sign(Δ) ρ(|Δ|)`.
    pub fn score(&self, delta: f64) -> f64 {
        if delta == 0.0 {
            0.0
        } else {
            delta.signum() * self.rho(delta.abs())
        }
    }

    /// `σ'(0)`.
    pub fn slope_at_zero(&self) -> f64 {
        let s = self.scale;
        match self.kind {
            LinkKind::Logistic => 1.0 / (4.0 * s),
            LinkKind::Probit => 1.0 / (s * (2.0 * PI).sqrt()),
            LinkKind::Arctan => 1.0 / (PI * s),
        }
    }

    /// `(c, r)` with `c = σ'(0)` and `r` the largest radius found by doubling
    /// such that `ρ(t) >= (c/2) t` on a 1000-point grid of `(0, r]`.
    pub fn local_linearity_constants(&self) -> (f64, f64) {
        let c = self.slope_at_zero();
        let mut r = 1e-3 * self.scale;
        let cap = 1e6 * self.scale;
        while 2.0 * r <= cap && self.certifies(c, 2.0 * r) {
            r *= 2.0;
        }
        (c, r)
    }

    /// Grid check of `ρ(t) >= (c/2) t` on `t = r/1000, 2r/1000, ..., r`.
    pub fn certifies(&self, c: f64, r: f64) -> bool {
        (1..=CERT_GRID).all(|i| {
            let t = r * i as f64 / CERT_GRID as f64;
            self.rho(t) >= 0.5 * c * t
        })
    }

    /// Smallest `t >= 0` with `ρ(t) = target`, by bisection. `target` in `[0, 1)`.
    pub fn gap_for_rho(&self, target: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&target) {
            return Err(Error::domain(format!("rho target must lie in [0, 1), got {target}")));
        }
        let mut hi = self.scale;
        while self.rho(hi) < target {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.rho(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL: [LinkKind; 3] = [LinkKind::Logistic, LinkKind::Probit, LinkKind::Arctan];

    #[test]
    fn rho_reference_values() {
        let logistic = LinkFunction::new(LinkKind::Logistic, 1.0).unwrap();
        assert!((logistic.rho(2.0) - 0.761_594_155_955_764_9).abs() < 1e-15);
        let arctan = LinkFunction::new(LinkKind::Arctan, 1.0).unwrap();
        assert!((arctan.rho(1.0) - 0.5).abs() < 1e-15);
        assert!((arctan.rho(1e12) - 1.0).abs() < 1e-9);
        for kind in ALL {
            assert_eq!(LinkFunction::new(kind, 0.7).unwrap().rho(0.0), 0.0);
        }
    }

    #[test]
    fn rho_matches_two_sigma_minus_one() {
        for kind in ALL {
            let l = LinkFunction::new(kind, 1.3).unwrap();
            for i in 0..200 {
                let t = i as f64 * 0.05;
                assert!((l.rho(t) - (2.0 * l.sigma(t) - 1.0)).abs() < 1e-12, "{kind:?} t={t}");
            }
        }
    }

    #[test]
    fn antisymmetry_and_half_at_zero() {
        for kind in ALL {
            let l = LinkFunction::new(kind, 2.0).unwrap();
            assert_eq!(l.sigma(0.0), 0.5);
            for i in -100..=100 {
                let u = i as f64 * 0.1;
                assert!((l.sigma(-u) - (1.0 - l.sigma(u))).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn slopes() {
        assert_eq!(LinkFunction::new(LinkKind::Logistic, 1.0).unwrap().slope_at_zero(), 0.25);
        let probit = LinkFunction::new(LinkKind::Probit, 1.0).unwrap().slope_at_zero();
        assert!((probit - 0.398_942_280_401_432_7).abs() < 1e-15);
        // slope against a central difference of σ
        for kind in ALL {
            let l = LinkFunction::new(kind, 0.8).unwrap();
            let h = 1e-6;
            let fd = (l.sigma(h) - l.sigma(-h)) / (2.0 * h);
            assert!((fd - l.slope_at_zero()).abs() < 1e-8);
        }
    }

    #[test]
    fn certified_radius_holds_on_dense_grid() {
        for kind in ALL {
            let l = LinkFunction::new(kind, 1.0).unwrap();
            let (c, r) = l.local_linearity_constants();
            assert!(r > 0.0);
            for i in 1..=100_000 {
                let t = r * i as f64 / 100_000.0;
                assert!(l.rho(t) >= 0.5 * c * t * (1.0 - 1e-12), "{kind:?} fails at t={t}");
            }
            // doubling stops because 2r fails (or hits the cap)
            assert!(!l.certifies(c, 2.0 * r) || 2.0 * r > 1e6);
        }
    }

    #[test]
    fn gap_inverts_rho() {
        for kind in ALL {
            let l = LinkFunction::new(kind, 1.0).unwrap();
            for target in [0.05, 0.2, 0.9] {
                let gap = l.gap_for_rho(target).unwrap();
                assert!((l.rho(gap) - target).abs() < 1e-12);
            }
        }
        let l = LinkFunction::default();
        assert!(l.gap_for_rho(1.0).is_err());
    }

    #[test]
    fn rejects_bad_scale() {
        assert!(LinkFunction::new(LinkKind::Probit, 0.0).is_err());
        assert!(LinkFunction::new(LinkKind::Logistic, f64::NAN).is_err());
    }
}
