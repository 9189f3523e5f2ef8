//! Deformation potential family: the odd profile f_T on [-2,2], its periodic
//! extension p_T on a circle of length 8, and the even profile q_T on [-2,2].
//!
//! All three are piecewise closed forms, so values and first/second
//! derivatives are analytic, not finite differences. The profile is
//! T/2-plateaued on [1,2], quadratic on the approach, and joined to the
//! origin by a monotone quintic blend; a smoothstep mollifier of width
//! max(exp(-T^2), floor) rounds the corner at s = 1.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Which member of the deformation family a profile represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    /// Odd profile f_T on [-2, 2].
    IntervalOdd,
    /// Periodic profile p_T on the circle of length 8 (f_T on [-2,2],
    /// f_T(4-s) on [2,6]).
    CirclePeriodic,
    /// Even profile q_T on [-2, 2] (f_T(s+2) on [-2,0], reflected).
    IntervalEven,
}

/// Constants realized by the concrete blend/mollifier, computed by dense
/// sampling at construction (not assumed).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProfileConstants {
    /// Lower slope bound on the blend: c1*T <= f' there. Chosen c1 = 1/4.
    pub c1: f64,
    /// max |f''| / T over the domain.
    pub c2: f64,
    /// max |f'| / (T * ||s|-1|) over the mollified collar.
    pub c3: f64,
    /// max |f'| / T over the domain.
    pub c4: f64,
}

/// Serialization mirror: the JSON experiment-config shape.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileConfig {
    #[serde(rename = "T")]
    t: f64,
    kind: ProfileKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cutoff_width: Option<f64>,
}

/// Default floor for the mollifier width (exp(-T^2) underflows long before
/// this matters; the floor keeps the collar representable for T >~ 26).
pub const DEFAULT_CUTOFF_WIDTH: f64 = 1e-6;

/// An immutable, analytically evaluable deformation profile.
#[derive(Debug, Clone, Serialize)]
#[serde(into = "ProfileConfig")]
pub struct DeformationProfile {
    /// Deformation strength T >= 0.
    pub t: f64,
    pub kind: ProfileKind,
    /// Configured floor for the collar mollification width.
    pub cutoff_width: f64,
    /// Effective mollifier width actually used: clamp(exp(-T^2), floor, 1/4).
    pub width: f64,
    pub constants: ProfileConstants,
}

impl From<DeformationProfile> for ProfileConfig {
    fn from(p: DeformationProfile) -> Self {
        ProfileConfig {
            t: p.t,
            kind: p.kind,
            cutoff_width: Some(p.cutoff_width),
        }
    }
}

impl TryFrom<ProfileConfig> for DeformationProfile {
    type Error = Error;
    fn try_from(c: ProfileConfig) -> Result<Self> {
        DeformationProfile::new(c.t, c.kind, c.cutoff_width.unwrap_or(DEFAULT_CUTOFF_WIDTH))
    }
}

impl<'de> Deserialize<'de> for DeformationProfile {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let cfg = ProfileConfig::deserialize(d)?;
        Self::try_from(cfg).map_err(serde::de::Error::custom)
    }
}

/// Quintic smoothstep mollifier: 0 for x <= 1/2, 1 for x >= 3/4,
/// 6v^5-15v^4+10v^3 with v = 4x-2 in between. Returns (rho, rho', rho'')
/// with derivatives taken in x.
fn smoothstep(x: f64) -> (f64, f64, f64) {
    if x <= 0.5 {
        (0.0, 0.0, 0.0)
    } else if x >= 0.75 {
        (1.0, 0.0, 0.0)
    } else {
        let v = 4.0 * x - 2.0;
        let rho = ((6.0 * v - 15.0) * v + 10.0) * v * v * v;
        let d1 = 30.0 * v * v * (v - 1.0) * (v - 1.0); // d rho / dv
        let d2 = (120.0 * v * v - 180.0 * v + 60.0) * v; // d^2 rho / dv^2
        (rho, 4.0 * d1, 16.0 * d2)
    }
}

impl DeformationProfile {
    /// Construct a profile. `cutoff_width` is the floor for the mollifier
    /// width near s = +-1 and must lie in (0, 1/4].
    pub fn new(t: f64, kind: ProfileKind, cutoff_width: f64) -> Result<Self> {
        if !(t >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "deformation strength must be >= 0, got {t}"
            )));
        }
        if !(cutoff_width > 0.0 && cutoff_width <= 0.25) {
            return Err(Error::InvalidInput(format!(
                "cutoff_width must lie in (0, 1/4], got {cutoff_width}"
            )));
        }
        let width = (-t * t).exp().max(cutoff_width).min(0.25);
        let mut profile = DeformationProfile {
            t,
            kind,
            cutoff_width,
            width,
            constants: ProfileConstants {
                c1: 0.25,
                c2: 0.0,
                c3: 0.0,
                c4: 0.0,
            },
        };
        profile.constants = profile.measure_constants();
        Ok(profile)
    }

    /// Convenience constructor with the default mollifier floor.
    pub fn with_default_width(t: f64, kind: ProfileKind) -> Result<Self> {
        Self::new(t, kind, DEFAULT_CUTOFF_WIDTH)
    }

    /// Domain endpoints: [-2,2] for interval kinds, [-2,6] (periodic) for
    /// the circle.
    pub fn domain(&self) -> (f64, f64) {
        match self.kind {
            ProfileKind::CirclePeriodic => (-2.0, 6.0),
            _ => (-2.0, 2.0),
        }
    }

    pub fn is_periodic(&self) -> bool {
        self.kind == ProfileKind::CirclePeriodic
    }

    /// Sorted positions where the profile switches pieces (plateau edges,
    /// blend joins, mollifier-window edges). Integrators must place nodes
    /// on these: the window near |s| = 1 is only `width/4` wide and carries
    /// second-derivative swings of order T/width^0 that a step-size chosen
    /// from the global scale will alias.
    pub fn breakpoints(&self) -> Vec<f64> {
        let w = self.width;
        // Joins of the odd base f on [-2, 2].
        let base = [
            -2.0,
            -1.0,
            -1.0 + 0.5 * w,
            -1.0 + 0.75 * w,
            -0.5,
            0.0,
            0.5,
            1.0 - 0.75 * w,
            1.0 - 0.5 * w,
            1.0,
            2.0,
        ];
        let mut pts: Vec<f64> = match self.kind {
            ProfileKind::IntervalOdd => base.to_vec(),
            ProfileKind::IntervalEven => {
                // q(s) = f(s+2) for s <= 0 and f(2-s) for s >= 0.
                let mut v: Vec<f64> = base
                    .iter()
                    .filter(|&&x| x >= 0.0)
                    .flat_map(|&x| [x - 2.0, 2.0 - x])
                    .collect();
                v.push(0.0);
                v
            }
            ProfileKind::CirclePeriodic => {
                // p(s) = f(s) on [-2,2] and f(4-s) on [2,6].
                let mut v = base.to_vec();
                v.extend(base.iter().map(|&x| 4.0 - x));
                v
            }
        };
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        pts
    }

    fn measure_constants(&self) -> ProfileConstants {
        if self.t == 0.0 {
            return ProfileConstants {
                c1: 0.25,
                c2: 0.0,
                c3: 0.0,
                c4: 0.0,
            };
        }
        let t = self.t;
        let n = 4001;
        let mut c2: f64 = 0.0;
        let mut c4: f64 = 0.0;
        for i in 0..n {
            let s = 2.0 * i as f64 / (n - 1) as f64;
            let (_, fp, fpp) = self.base_odd(s);
            c2 = c2.max(fpp.abs() / t);
            c4 = c4.max(fp.abs() / t);
        }
        // Collar ratio |f'| / (T * (1-s)) = rho(x) + x rho'(x)/2, sampled in x.
        let mut c3: f64 = 0.0;
        for i in 1..=n {
            let x = i as f64 / n as f64;
            let (rho, rho1, _) = smoothstep(x);
            c3 = c3.max(rho + 0.5 * x * rho1);
        }
        ProfileConstants {
            c1: 0.25,
            c2,
            c3,
            c4,
        }
    }

    /// The odd base profile on [-2, 2]: returns (f, f', f'').
    fn base_odd(&self, s: f64) -> (f64, f64, f64) {
        if s < 0.0 {
            let (f, fp, fpp) = self.base_odd(-s);
            return (-f, fp, -fpp);
        }
        let t = self.t;
        if t == 0.0 {
            return (0.0, 0.0, 0.0);
        }
        if s >= 1.0 {
            (0.5 * t, 0.0, 0.0)
        } else if s >= 0.5 {
            let u = 1.0 - s;
            let x = u / self.width;
            let (rho, rho1, rho2) = smoothstep(x);
            let f = 0.5 * t - 0.5 * t * rho * u * u;
            let fp = t * rho * u + 0.5 * t / self.width * rho1 * u * u;
            let fpp = -t * (0.5 * rho2 * x * x + 2.0 * rho1 * x + rho);
            (f, fp, fpp)
        } else {
            // Monotone quintic blend: f(0)=0, f'(0)=3T/4, f''(0)=0,
            // f(1/2)=3T/8, f'(1/2)=T/2, f''(1/2)=-T.
            let u = 2.0 * s;
            let f = t / 8.0 * (((2.0 * u - 5.0) * u + 3.0) * u * u * u + 3.0 * u);
            let fp = t / 4.0 * (((10.0 * u - 20.0) * u + 9.0) * u * u + 3.0);
            let fpp = t * ((20.0 * u - 30.0) * u + 9.0) * u;
            (f, fp, fpp)
        }
    }

    /// Evaluate (f, f', f'') at a position inside the profile's domain.
    /// Circle profiles accept any real position (period 8).
    pub fn eval(&self, s: f64) -> Result<(f64, f64, f64)> {
        match self.kind {
            ProfileKind::IntervalOdd => {
                self.check_domain(s)?;
                Ok(self.base_odd(s))
            }
            ProfileKind::IntervalEven => {
                self.check_domain(s)?;
                if s <= 0.0 {
                    Ok(self.base_odd(s + 2.0))
                } else {
                    let (f, fp, fpp) = self.base_odd(2.0 - s);
                    Ok((f, -fp, fpp))
                }
            }
            ProfileKind::CirclePeriodic => {
                let mut x = (s + 2.0).rem_euclid(8.0) - 2.0; // into [-2, 6)
                if x > 6.0 {
                    x = 6.0;
                }
                if x <= 2.0 {
                    Ok(self.base_odd(x))
                } else {
                    let (f, fp, fpp) = self.base_odd(4.0 - x);
                    Ok((f, -fp, fpp))
                }
            }
        }
    }

    fn check_domain(&self, s: f64) -> Result<()> {
        let (lo, hi) = self.domain();
        if s < lo - 1e-12 || s > hi + 1e-12 {
            return Err(Error::OutOfDomain {
                position: s,
                lo,
                hi,
            });
        }
        Ok(())
    }

    /// Sample the Witten potentials V_{T,-} = |f'|^2 - f'' and
    /// V_{T,+} = |f'|^2 + f'' on a grid.
    pub fn witten_potentials(&self, grid: &[f64]) -> Result<WittenPotentialPair> {
        if grid.is_empty() {
            return Err(Error::InvalidInput("empty grid".into()));
        }
        let mut v_minus = Vec::with_capacity(grid.len());
        let mut v_plus = Vec::with_capacity(grid.len());
        for &s in grid {
            let (_, fp, fpp) = self.eval(s)?;
            let vm = fp * fp - fpp;
            v_minus.push(vm);
            v_plus.push(vm + 2.0 * fpp); // exact identity v_plus - v_minus = 2 f''
        }
        Ok(WittenPotentialPair {
            v_minus,
            v_plus,
            grid: grid.to_vec(),
        })
    }
}

/// Sampled Witten potential pair on a grid.
#[derive(Debug, Clone)]
pub struct WittenPotentialPair {
    pub v_minus: Vec<f64>,
    pub v_plus: Vec<f64>,
    pub grid: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn profile(t: f64, kind: ProfileKind) -> DeformationProfile {
        DeformationProfile::with_default_width(t, kind).unwrap()
    }

    #[test]
    fn zero_strength_is_identically_zero() {
        let p = profile(0.0, ProfileKind::IntervalOdd);
        for i in 0..=100 {
            let s = -2.0 + 4.0 * i as f64 / 100.0;
            let (f, fp, fpp) = p.eval(s).unwrap();
            assert_eq!((f, fp, fpp), (0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn plateau_value_matches_half_strength() {
        let p = profile(4.0, ProfileKind::IntervalOdd);
        assert_eq!(p.eval(2.0).unwrap().0, 2.0);
        assert_eq!(p.eval(1.5).unwrap(), (2.0, 0.0, 0.0));
        assert_eq!(p.eval(-1.5).unwrap(), (-2.0, 0.0, 0.0));
    }

    #[test]
    fn quadratic_zone_closed_form() {
        // At T=4, s=3/4 the mollifier is identically 1:
        // f = -T(s-1)^2/2 + T/2 = 15/8, f' = T(1-s) = 1, f'' = -T.
        let p = profile(4.0, ProfileKind::IntervalOdd);
        let (f, fp, fpp) = p.eval(0.75).unwrap();
        assert_abs_diff_eq!(f, 15.0 / 8.0, epsilon = 1e-14);
        assert_abs_diff_eq!(fp, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(fpp, -4.0, epsilon = 1e-14);
        let (fm, _, fppm) = p.eval(-0.75).unwrap();
        assert_abs_diff_eq!(fm, -15.0 / 8.0, epsilon = 1e-14);
        assert_abs_diff_eq!(fppm, 4.0, epsilon = 1e-14);
    }

    #[test]
    fn oddness_on_symmetric_grid() {
        for &t in &[0.5, 1.0, 4.0, 16.0, 64.0] {
            let p = profile(t, ProfileKind::IntervalOdd);
            for i in 0..=400 {
                let s = -2.0 + 4.0 * i as f64 / 400.0;
                let f = p.eval(s).unwrap().0;
                let g = p.eval(-s).unwrap().0;
                assert!((f + g).abs() <= 1e-12 * (1.0 + t), "T={t} s={s}");
            }
        }
    }

    #[test]
    fn continuity_across_piece_boundaries() {
        for &t in &[1.0, 4.0, 16.0, 40.0] {
            let p = profile(t, ProfileKind::IntervalOdd);
            let eps = 1e-9;
            for &s0 in &[-1.0, -0.5, 0.0, 0.5, 1.0] {
                let a = p.eval(s0 - eps).unwrap();
                let b = p.eval(s0 + eps).unwrap();
                // Junction continuity: the only allowed drift over 2*eps is
                // from the (bounded) next derivative, plus roundoff.
                let base = 1e-10 * (1.0 + t);
                assert!((a.0 - b.0).abs() <= base + 4.0 * eps * t, "f jump at {s0}, T={t}");
                assert!(
                    (a.1 - b.1).abs() <= base + 50.0 * eps * t,
                    "f' jump at {s0}, T={t}"
                );
                assert!(
                    (a.2 - b.2).abs() <= base + 1e3 * eps * t,
                    "f'' jump at {s0}, T={t}"
                );
            }
        }
    }

    #[test]
    fn blend_slope_bounds_realize_quarter() {
        for &t in &[1.0, 4.0, 32.0] {
            let p = profile(t, ProfileKind::IntervalOdd);
            for i in 0..=1000 {
                let s = 0.5 * i as f64 / 1000.0;
                let fp = p.eval(s).unwrap().1;
                assert!(fp >= t / 4.0 - 1e-12 * t, "lower bound at s={s}");
                assert!(fp <= t + 1e-12 * t, "upper bound at s={s}");
            }
        }
    }

    #[test]
    fn collar_slope_bound_with_reported_constant() {
        for &t in &[4.0, 16.0] {
            let p = profile(t, ProfileKind::IntervalOdd);
            let c3 = p.constants.c3;
            assert!(c3 > 0.9 && c3 < 5.0, "c3 = {c3}");
            let w = p.width;
            for i in 1..=200 {
                let u = w * i as f64 / 200.0;
                let s = 1.0 - u;
                let fp = p.eval(s).unwrap().1.abs();
                assert!(fp <= c3 * t * u * (1.0 + 1e-12), "s={s}");
            }
        }
    }

    #[test]
    fn witten_pair_identity_and_plateau() {
        let p = profile(4.0, ProfileKind::IntervalOdd);
        let grid: Vec<f64> = (0..=800).map(|i| -2.0 + 4.0 * i as f64 / 800.0).collect();
        let pair = p.witten_potentials(&grid).unwrap();
        for (i, &s) in grid.iter().enumerate() {
            let (_, _, fpp) = p.eval(s).unwrap();
            let scale = 1.0 + pair.v_minus[i].abs();
            assert!((pair.v_plus[i] - pair.v_minus[i] - 2.0 * fpp).abs() <= 1e-13 * scale);
            if !(-1.0..=1.0).contains(&s) {
                assert_eq!(pair.v_plus[i], 0.0);
                assert_eq!(pair.v_minus[i], 0.0);
            }
        }
        // V_-(3/4) = |f'|^2 - f'' = 1 + 4 = 5 at T = 4.
        let j = grid.iter().position(|&s| (s - 0.75).abs() < 1e-12).unwrap();
        assert_abs_diff_eq!(pair.v_minus[j], 5.0, epsilon = 1e-12);
    }

    #[test]
    fn periodic_profile_period_and_reflection() {
        let p = profile(4.0, ProfileKind::CirclePeriodic);
        for i in 0..=100 {
            let s = -2.0 + 8.0 * i as f64 / 100.0;
            let a = p.eval(s).unwrap();
            let b = p.eval(s + 8.0).unwrap();
            assert_abs_diff_eq!(a.0, b.0, epsilon = 1e-12);
            if (2.0..=6.0).contains(&s) {
                let c = p.eval(4.0 - s).unwrap();
                assert_abs_diff_eq!(a.0, c.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn even_profile_reflection_and_plateau() {
        let p = profile(4.0, ProfileKind::IntervalEven);
        for i in 0..=200 {
            let s = -2.0 + 4.0 * i as f64 / 200.0;
            let a = p.eval(s).unwrap().0;
            let b = p.eval(-s).unwrap().0;
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        // Plateau T/2 on [-1,1], zero at the ends.
        assert_eq!(p.eval(0.0).unwrap(), (2.0, 0.0, 0.0));
        assert_eq!(p.eval(0.9).unwrap(), (2.0, 0.0, 0.0));
        assert_eq!(p.eval(-2.0).unwrap().0, 0.0);
        assert_eq!(p.eval(2.0).unwrap().0, 0.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(DeformationProfile::new(-1.0, ProfileKind::IntervalOdd, 1e-6).is_err());
        assert!(DeformationProfile::new(4.0, ProfileKind::IntervalOdd, 0.0).is_err());
        assert!(DeformationProfile::new(4.0, ProfileKind::IntervalOdd, 0.3).is_err());
        let p = profile(4.0, ProfileKind::IntervalOdd);
        assert!(p.eval(2.5).is_err());
    }

    #[test]
    fn config_round_trip() {
        let json = r#"{"T": 4.0, "kind": "interval_odd", "cutoff_width": 1e-6}"#;
        let p: DeformationProfile = serde_json::from_str(json).unwrap();
        assert_eq!(p.t, 4.0);
        assert_eq!(p.kind, ProfileKind::IntervalOdd);
        let back = serde_json::to_string(&p).unwrap();
        let p2: DeformationProfile = serde_json::from_str(&back).unwrap();
        assert_eq!(p2.t, p.t);
        let bad = r#"{"T": 4.0, "kind": "interval_odd", "Tlist": []}"#;
        assert!(serde_json::from_str::<DeformationProfile>(bad).is_err());
    }
}
