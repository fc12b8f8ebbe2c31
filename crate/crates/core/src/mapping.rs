//! Algebraic map `r(x) = L (1 + x) / (1 - x + alpha_m)` from `[-1, 1]`
//! onto `[0, r_max]`, with `alpha_m = 2 L / r_max`.
//!
//! Small `alpha_m` clusters the nodes toward the origin. The naming
//! `alpha_m` keeps the map parameter apart from the singularity exponent
//! of the potential.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapParams {
    length: f64,
    alpha_m: f64,
    r_max: f64,
}

impl MapParams {
    /// Map reaching `r_max` at `x = 1`; the length scale is `alpha_m * r_max / 2`.
    pub fn new(r_max: f64, alpha_m: f64) -> Result<Self> {
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "r_max must be positive and finite, got {r_max}"
            )));
        }
        if !(alpha_m.is_finite() && alpha_m > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha_m must be positive and finite, got {alpha_m}"
            )));
        }
        Ok(Self {
            length: alpha_m * r_max / 2.0,
            alpha_m,
            r_max,
        })
    }

    /// The length scale `L`.
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn alpha_m(&self) -> f64 {
        self.alpha_m
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn r_of_x(&self, x: f64) -> f64 {
        r_of_x(self, x)
    }

    pub fn rprime_of_x(&self, x: f64) -> f64 {
        rprime_of_x(self, x)
    }

    pub fn x_of_r(&self, r: f64) -> Result<f64> {
        x_of_r(self, r)
    }
}

pub fn r_of_x(p: &MapParams, x: f64) -> f64 {
    if x == 1.0 {
        return p.r_max;
    }
    p.length * (1.0 + x) / (1.0 - x + p.alpha_m)
}

/// `r'(x) = L (2 + alpha_m) / (1 - x + alpha_m)^2`.
pub fn rprime_of_x(p: &MapParams, x: f64) -> f64 {
    let den = 1.0 - x + p.alpha_m;
    p.length * (2.0 + p.alpha_m) / (den * den)
}

pub fn x_of_r(p: &MapParams, r: f64) -> Result<f64> {
    if !(0.0..=p.r_max).contains(&r) {
        return Err(Error::Domain {
            what: "r",
            value: r,
            lo: 0.0,
            hi: p.r_max,
        });
    }
    if r == p.r_max {
        return Ok(1.0);
    }
    Ok((r * (1.0 + p.alpha_m) - p.length) / (r + p.length))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::legendre::build_grid;
    use proptest::prelude::*;

    fn wide_map() -> MapParams {
        MapParams::new(200.0, 25.0).unwrap()
    }

    #[test]
    fn endpoints() {
        for (r_max, a) in [(200.0, 25.0), (200.0, 0.05), (37.5, 1.3)] {
            let p = MapParams::new(r_max, a).unwrap();
            assert_eq!(p.r_of_x(-1.0), 0.0);
            assert_eq!(p.r_of_x(1.0), r_max);
            assert!((p.length() * 2.0 / a - r_max).abs() <= 1e-12 * r_max);
            assert_eq!(p.x_of_r(0.0).unwrap(), -1.0);
            assert_eq!(p.x_of_r(r_max).unwrap(), 1.0);
        }
    }

    #[test]
    fn midpoint_value() {
        let p = wide_map();
        assert_eq!(p.length(), 2500.0);
        assert!((p.r_of_x(0.0) - 2500.0 / 26.0).abs() < 1e-12);
    }

    #[test]
    fn derivative_at_origin_end() {
        let p = wide_map();
        let expect = 2500.0 / 27.0;
        assert!((p.rprime_of_x(-1.0) - expect).abs() < 1e-12);
        let h = 1e-6;
        let fd = (p.r_of_x(-1.0 + 2.0 * h) - p.r_of_x(-1.0)) / (2.0 * h);
        // forward difference of width 2h centred at -1 + h
        assert!((fd - p.rprime_of_x(-1.0 + h)).abs() < 1e-6);
        let at_one = p.rprime_of_x(1.0);
        assert!(at_one > 0.0);
        assert!((at_one - 2500.0 * 27.0 / 625.0).abs() < 1e-12);
    }

    #[test]
    fn derivative_matches_finite_differences_on_scan() {
        for p in [wide_map(), MapParams::new(200.0, 0.05).unwrap()] {
            let h = 1e-6;
            for i in 0..10_000 {
                let x = -1.0 + h + (2.0 - 2.0 * h) * i as f64 / 9_999.0;
                let fd = (p.r_of_x(x + h) - p.r_of_x(x - h)) / (2.0 * h);
                let exact = p.rprime_of_x(x);
                assert!((fd - exact).abs() <= 1e-8 * exact, "x={x}: {fd} vs {exact}");
            }
        }
    }

    #[test]
    fn out_of_range_radius_rejected() {
        let p = wide_map();
        assert!(p.x_of_r(-1e-9).is_err());
        assert!(p.x_of_r(200.0 + 1e-9).is_err());
        assert!(MapParams::new(0.0, 1.0).is_err());
        assert!(MapParams::new(10.0, -1.0).is_err());
    }

    #[test]
    fn nonuniform_node_density() {
        let g = build_grid(300).unwrap();
        for p in [wide_map(), MapParams::new(200.0, 0.05).unwrap()] {
            assert!(p.r_of_x(g.nodes()[1]) < 0.1);
            assert!(p.r_of_x(g.nodes()[299]) > 190.0);
        }
    }

    proptest! {
        #[test]
        fn round_trip(r in 0.0f64..200.0, a in 0.01f64..50.0) {
            let p = MapParams::new(200.0, a).unwrap();
            let back = p.r_of_x(p.x_of_r(r).unwrap());
            prop_assert!((back - r).abs() <= 1e-12 * r.max(1.0));
        }

        #[test]
        fn monotone(x1 in -1.0f64..1.0, dx in 1e-9f64..1.0, a in 0.01f64..50.0) {
            let p = MapParams::new(200.0, a).unwrap();
            let x2 = (x1 + dx).min(1.0);
            prop_assume!(x2 > x1);
            prop_assert!(p.r_of_x(x1) < p.r_of_x(x2));
            prop_assert!(p.rprime_of_x(x1) > 0.0);
        }
    }
}
