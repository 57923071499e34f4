//! Rank-one space structure: multiplicities, derived constants, the radial
//! density in Cartan coordinates and the L^p concentration region.

use crate::error::{Error, Result};
use std::fmt;

/// A rank-one symmetric space of noncompact type given by its root multiplicities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankOneSpace {
    m_alpha: u32,
    m_2alpha: u32,
    rho: f64,
    dim_n: u32,
    dim_nu: u32,
}

impl RankOneSpace {
    pub fn new(m_alpha: u32, m_2alpha: u32) -> Result<Self> {
        if m_alpha == 0 {
            return Err(Error::Domain("m_alpha must be at least 1".into()));
        }
        Ok(Self {
            m_alpha,
            m_2alpha,
            rho: (m_alpha as f64 + 2.0 * m_2alpha as f64) / 2.0,
            dim_n: 1 + m_alpha + m_2alpha,
            dim_nu: 3,
        })
    }

    /// Parses a named preset: `H2`, `H3`, `Hn:k`, `CH2`, `CHn:k`, `HHn:k`.
    pub fn preset(name: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("unknown space preset '{name}'"));
        match name {
            "H2" => return Self::new(1, 0),
            "H3" => return Self::new(2, 0),
            "CH2" => return Self::new(2, 1),
            _ => {}
        }
        let (family, k) = name.split_once(':').ok_or_else(bad)?;
        let k: u32 = k.trim().parse().map_err(|_| bad())?;
        if k < 2 {
            return Err(Error::Domain(format!("space preset '{name}' needs dimension parameter k >= 2")));
        }
        match family {
            "Hn" => Self::new(k - 1, 0),
            "CHn" => Self::new(2 * k - 2, 1),
            "HHn" => Self::new(4 * k - 4, 3),
            _ => Err(bad()),
        }
    }

    pub fn m_alpha(&self) -> u32 {
        self.m_alpha
    }

    pub fn m_2alpha(&self) -> u32 {
        self.m_2alpha
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn dim_n(&self) -> u32 {
        self.dim_n
    }

    pub fn dim_nu(&self) -> u32 {
        self.dim_nu
    }

    /// Jacobi parameter α_J = (m_α + m_2α − 1)/2.
    pub fn alpha_j(&self) -> f64 {
        (self.m_alpha as f64 + self.m_2alpha as f64 - 1.0) / 2.0
    }

    /// Jacobi parameter β_J = (m_2α − 1)/2.
    pub fn beta_j(&self) -> f64 {
        (self.m_2alpha as f64 - 1.0) / 2.0
    }

    /// Natural log of the density J(r) for r > 0, stable for large r.
    pub fn ln_density(&self, r: f64) -> f64 {
        let ma = self.m_alpha as f64;
        let m2a = self.m_2alpha as f64;
        let mut v = ma * ln_two_sinh(r);
        if self.m_2alpha > 0 {
            v += m2a * ln_two_sinh(2.0 * r);
        }
        v
    }
}

impl fmt::Display for RankOneSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m_alpha={} m_2alpha={}", self.m_alpha, self.m_2alpha)
    }
}

/// ln(2 sinh r) for r > 0 without overflow.
pub fn ln_two_sinh(r: f64) -> f64 {
    if r > 1.0 {
        r + (-(-2.0 * r).exp()).ln_1p()
    } else {
        (2.0 * r.sinh()).ln()
    }
}

/// ln(2 cosh r) without overflow.
pub fn ln_two_cosh(r: f64) -> f64 {
    let a = r.abs();
    a + (-2.0 * a).exp().ln_1p()
}

/// A Lebesgue exponent p in [1, ∞] with its derived quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LebesgueExponent {
    p: f64,
}

impl LebesgueExponent {
    /// Accepts p ≥ 1, with `f64::INFINITY` standing for p = ∞.
    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::Domain(format!("p must satisfy p >= 1 (got {p})")));
        }
        Ok(Self { p })
    }

    pub fn infinity() -> Self {
        Self { p: f64::INFINITY }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn is_infinite(&self) -> bool {
        self.p.is_infinite()
    }

    /// γ_p = 2/p − 1, with γ_∞ = −1.
    pub fn gamma_p(&self) -> f64 {
        if self.is_infinite() {
            -1.0
        } else {
            2.0 / self.p - 1.0
        }
    }

    /// Conjugate exponent p′, with 1′ = ∞ and ∞′ = 1.
    pub fn p_conj(&self) -> f64 {
        if self.is_infinite() {
            1.0
        } else if self.p == 1.0 {
            f64::INFINITY
        } else {
            self.p / (self.p - 1.0)
        }
    }

    /// 1/p′ = 1 − 1/p, finite for every p.
    pub fn inv_p_conj(&self) -> f64 {
        if self.is_infinite() {
            1.0
        } else {
            1.0 - 1.0 / self.p
        }
    }
}

impl fmt::Display for LebesgueExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.p)
        }
    }
}

/// The radial density J(r) = (2 sinh r)^{m_α} (2 sinh 2r)^{m_2α}.
pub fn density(space: &RankOneSpace, r: f64) -> Result<f64> {
    if r.is_nan() || r < 0.0 {
        return Err(Error::Domain(format!("density needs r >= 0 (got {r})")));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    Ok(space.ln_density(r).exp())
}

/// The interval [2tγ_pρ − t^e, 2tγ_pρ + t^e] ∩ [0, ∞) where the L^p mass of h_t concentrates.
pub fn concentration_region(
    space: &RankOneSpace,
    p: LebesgueExponent,
    t: f64,
    radius_fn_exponent: f64,
) -> Result<(f64, f64)> {
    if !(p.p() > 1.0 && p.p() < 2.0) {
        return Err(Error::Domain(format!("concentration region needs p in (1, 2) (got {p})")));
    }
    if !(radius_fn_exponent > 0.5 && radius_fn_exponent < 1.0) {
        return Err(Error::Domain(format!("radius exponent must lie in (1/2, 1) (got {radius_fn_exponent})")));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t must be positive (got {t})")));
    }
    let center = 2.0 * t * p.gamma_p() * space.rho();
    let radius = t.powf(radius_fn_exponent);
    Ok(((center - radius).max(0.0), center + radius))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_match_multiplicities() {
        let h3 = RankOneSpace::preset("H3").unwrap();
        assert_eq!((h3.m_alpha(), h3.m_2alpha()), (2, 0));
        assert_eq!(h3.rho(), 1.0);
        assert_eq!(h3.dim_n(), 3);
        let ch2 = RankOneSpace::preset("CH2").unwrap();
        assert_eq!((ch2.m_alpha(), ch2.m_2alpha(), ch2.dim_n()), (2, 1, 4));
        assert_eq!(ch2.rho(), 2.0);
        assert_eq!(RankOneSpace::preset("Hn:5").unwrap(), RankOneSpace::new(4, 0).unwrap());
        assert_eq!(RankOneSpace::preset("CHn:3").unwrap(), RankOneSpace::new(4, 1).unwrap());
        assert_eq!(RankOneSpace::preset("HHn:2").unwrap(), RankOneSpace::new(4, 3).unwrap());
        assert!(RankOneSpace::preset("Hn:1").is_err());
        assert!(RankOneSpace::preset("S2").is_err());
        assert!(RankOneSpace::new(0, 1).is_err());
    }

    #[test]
    fn density_values() {
        let h3 = RankOneSpace::preset("H3").unwrap();
        assert_eq!(density(&h3, 0.0).unwrap(), 0.0);
        let j1 = density(&h3, 1.0).unwrap();
        assert!((j1 - (2.0 * 1f64.sinh()).powi(2)).abs() < 1e-13);
        assert!((j1 - 5.5244).abs() < 1e-4);
        let slope = h3.ln_density(30.0) / 30.0;
        assert!((slope - 2.0).abs() / 2.0 < 0.01);
        assert!(density(&h3, -1.0).is_err());
    }

    #[test]
    fn exponent_fields() {
        let p = LebesgueExponent::new(2.0).unwrap();
        assert_eq!(p.gamma_p(), 0.0);
        assert_eq!(LebesgueExponent::new(1.0).unwrap().gamma_p(), 1.0);
        assert_eq!(LebesgueExponent::infinity().gamma_p(), -1.0);
        assert_eq!(LebesgueExponent::infinity().p_conj(), 1.0);
        assert!(LebesgueExponent::new(1.0).unwrap().p_conj().is_infinite());
        assert!(LebesgueExponent::new(0.5).is_err());
    }

    #[test]
    fn concentration_region_values() {
        let h3 = RankOneSpace::preset("H3").unwrap();
        let p = LebesgueExponent::new(4.0 / 3.0).unwrap();
        let (lo, hi) = concentration_region(&h3, p, 10.0, 0.75).unwrap();
        let radius = 10f64.powf(0.75);
        assert!((0.5 * (lo + hi) - 10.0).abs() < 1e-12);
        assert!((0.5 * (hi - lo) - radius).abs() < 1e-12);
        assert!((radius - 5.623).abs() < 1e-3);
        let two = LebesgueExponent::new(2.0).unwrap();
        assert!(concentration_region(&h3, two, 10.0, 0.75).is_err());
        assert!(concentration_region(&h3, p, 10.0, 0.5).is_err());
    }
}
