//! Persistence images.
//!
//! Each finite point `(b, d)` moves to birth-persistence coordinates
//! `(b, d - b)`, carries weight `d - b`, and spreads an isotropic Gaussian of
//! standard deviation `sigma`. A pixel holds the exact integral of the summed
//! weighted densities over its cell.
//!
//! The image is an `R x R` array indexed `[row, col]` where `row` walks the
//! persistence axis upward from `persistence_range.0` and `col` walks the
//! birth axis from `birth_range.0`. Flattening is row-major.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::io::Write;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::persistence::PersistenceDiagram;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EssentialPolicy {
    Drop,
    /// Essential classes die at `max(c_max, birth)`.
    Cap(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PIConfig {
    pub resolution: usize,
    pub birth_range: (f64, f64),
    pub persistence_range: (f64, f64),
    pub sigma: f64,
    pub essential: EssentialPolicy,
}

impl PIConfig {
    pub const DEFAULT_RESOLUTION: usize = 10;
    pub const DEFAULT_SIGMA: f64 = 1.0;

    /// Defaults scaled to a graph of the given diameter: both axes span
    /// `[0, diameter]` and essential classes are capped at `diameter + 1`.
    pub fn for_diameter(diameter: f64) -> Self {
        let hi = if diameter > 0.0 { diameter } else { 1.0 };
        PIConfig {
            resolution: Self::DEFAULT_RESOLUTION,
            birth_range: (0.0, hi),
            persistence_range: (0.0, hi),
            sigma: Self::DEFAULT_SIGMA,
            essential: EssentialPolicy::Cap(diameter + 1.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution == 0 {
            return Err(Error::argument("resolution must be at least 1"));
        }
        for (name, (lo, hi)) in [("birth", self.birth_range), ("persistence", self.persistence_range)]
        {
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                return Err(Error::argument(format!("degenerate {name} range [{lo}, {hi}]")));
            }
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::argument(format!("sigma must be positive, got {}", self.sigma)));
        }
        if let EssentialPolicy::Cap(c) = self.essential {
            if !c.is_finite() {
                return Err(Error::argument("essential cap must be finite"));
            }
        }
        Ok(())
    }

    /// Pixel edges along one axis.
    fn edges(range: (f64, f64), resolution: usize) -> Vec<f64> {
        let step = (range.1 - range.0) / resolution as f64;
        (0..=resolution).map(|i| range.0 + step * i as f64).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PersistenceImage {
    pub pixels: Array2<f64>,
    pub config: PIConfig,
}

impl PersistenceImage {
    /// Row-major flattening.
    pub fn flatten(&self) -> Vec<f64> {
        self.pixels.iter().copied().collect()
    }

    /// Largest absolute pixel difference.
    pub fn linf_distance(&self, other: &PersistenceImage) -> Result<f64> {
        if self.pixels.dim() != other.pixels.dim() {
            return Err(Error::argument("images have different resolutions"));
        }
        Ok(self
            .pixels
            .iter()
            .zip(other.pixels.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// `R` lines of `R` comma-separated values.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for row in self.pixels.rows() {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// Standard normal upper tail.
fn upper_tail(z: f64) -> f64 {
    0.5 * libm::erfc(z * FRAC_1_SQRT_2)
}

/// Probability that `N(mean, sigma^2)` lands in `[lo, hi]`, arranged so that
/// far tails do not cancel catastrophically.
fn interval_mass(lo: f64, hi: f64, mean: f64, sigma: f64) -> f64 {
    let (zl, zh) = ((lo - mean) / sigma, (hi - mean) / sigma);
    if zl >= 0.0 {
        upper_tail(zl) - upper_tail(zh)
    } else if zh <= 0.0 {
        upper_tail(-zh) - upper_tail(-zl)
    } else {
        1.0 - upper_tail(-zl) - upper_tail(zh)
    }
}

pub fn persistence_image(
    d: &PersistenceDiagram,
    cfg: &PIConfig,
    dimension: usize,
) -> Result<PersistenceImage> {
    cfg.validate()?;
    let r = cfg.resolution;
    let birth_edges = PIConfig::edges(cfg.birth_range, r);
    let pers_edges = PIConfig::edges(cfg.persistence_range, r);

    let points: Vec<(f64, f64)> = d
        .dimension(dimension)
        .filter_map(|p| {
            if !p.is_essential() {
                return Some((p.birth, p.death));
            }
            match cfg.essential {
                EssentialPolicy::Drop => None,
                EssentialPolicy::Cap(c) => (c > p.birth).then_some((p.birth, c)),
            }
        })
        .collect();

    let mut pixels = Array2::zeros((r, r));
    let mut col_mass = vec![0.0; r];
    let mut row_mass = vec![0.0; r];
    for (birth, death) in points {
        let pers = death - birth;
        for (c, m) in col_mass.iter_mut().enumerate() {
            *m = interval_mass(birth_edges[c], birth_edges[c + 1], birth, cfg.sigma);
        }
        for (k, m) in row_mass.iter_mut().enumerate() {
            *m = interval_mass(pers_edges[k], pers_edges[k + 1], pers, cfg.sigma);
        }
        for (k, &rm) in row_mass.iter().enumerate() {
            for (c, &cm) in col_mass.iter().enumerate() {
                pixels[[k, c]] += pers * rm * cm;
            }
        }
    }
    Ok(PersistenceImage {
        pixels,
        config: *cfg,
    })
}

/// Lipschitz constant of the Gaussian persistence image with respect to the
/// 1-Wasserstein distance: `sqrt(5) + sqrt(10 / pi) / sigma`.
pub fn c_sigma(sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::argument(format!("sigma must be positive, got {sigma}")));
    }
    Ok(5f64.sqrt() + (10.0 / PI).sqrt() / sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persistence::DiagramPoint;
    use proptest::prelude::*;

    fn unit_config(resolution: usize, sigma: f64) -> PIConfig {
        PIConfig {
            resolution,
            birth_range: (0.0, 2.0),
            persistence_range: (0.0, 2.0),
            sigma,
            essential: EssentialPolicy::Drop,
        }
    }

    fn diagram(points: &[(f64, f64)]) -> PersistenceDiagram {
        PersistenceDiagram::new(points.iter().map(|&(b, d)| DiagramPoint::finite(b, d, 0))).unwrap()
    }

    #[test]
    fn empty_and_essential_only_give_zero_image() {
        let cfg = unit_config(3, 1.0);
        let img = persistence_image(&diagram(&[]), &cfg, 0).unwrap();
        assert!(img.pixels.iter().all(|&v| v == 0.0));
        let ess = PersistenceDiagram::new([DiagramPoint::essential(0.0, 0)]).unwrap();
        let img = persistence_image(&ess, &cfg, 0).unwrap();
        assert!(img.pixels.iter().all(|&v| v == 0.0));
        let capped = PIConfig {
            essential: EssentialPolicy::Cap(1.5),
            ..cfg
        };
        let img = persistence_image(&ess, &capped, 0).unwrap();
        assert!(img.pixels.iter().any(|&v| v > 0.0));
    }

    /// Midpoint rule on a fine sub-grid of each pixel.
    fn oversampled(point: (f64, f64), cfg: &PIConfig, factor: usize) -> Array2<f64> {
        let r = cfg.resolution;
        let (b0, b1) = cfg.birth_range;
        let (p0, p1) = cfg.persistence_range;
        let (hb, hp) = ((b1 - b0) / (r * factor) as f64, (p1 - p0) / (r * factor) as f64);
        let (pb, pp) = (point.0, point.1 - point.0);
        let s2 = cfg.sigma * cfg.sigma;
        let norm = 1.0 / (2.0 * PI * s2);
        let mut out = Array2::zeros((r, r));
        for k in 0..r * factor {
            let y = p0 + (k as f64 + 0.5) * hp;
            for c in 0..r * factor {
                let x = b0 + (c as f64 + 0.5) * hb;
                let dens = norm * (-((x - pb).powi(2) + (y - pp).powi(2)) / (2.0 * s2)).exp();
                out[[k / factor, c / factor]] += pp * dens * hb * hp;
            }
        }
        out
    }

    #[test]
    fn single_point_matches_quadrature() {
        let cfg = unit_config(2, 1.0);
        let img = persistence_image(&diagram(&[(0.0, 2.0)]), &cfg, 0).unwrap();
        let oracle = oversampled((0.0, 2.0), &cfg, 200);
        for (a, b) in img.pixels.iter().zip(oracle.iter()) {
            assert!((a - b).abs() < 1e-5, "{a} vs {b}");
        }
    }

    #[test]
    fn tail_masses_stay_accurate() {
        let m = interval_mass(10.0, 11.0, 0.0, 1.0);
        assert!(m > 0.0 && m < 1e-20);
        assert!((interval_mass(-1.0, 1.0, 0.0, 1.0) - 0.682_689_492_137_085_9).abs() < 1e-15);
    }

    #[test]
    fn c_sigma_values() {
        assert!((c_sigma(1.0).unwrap() - 4.020_192_1).abs() < 1e-6);
        assert!((c_sigma(0.5).unwrap() - 5.804_316_1).abs() < 1e-6);
        assert!((c_sigma(1e12).unwrap() - 5f64.sqrt()).abs() < 1e-11);
        assert!(c_sigma(0.0).is_err());
        assert!(c_sigma(-1.0).is_err());
    }

    #[test]
    fn rejects_bad_config() {
        let mut cfg = unit_config(2, 1.0);
        cfg.birth_range = (1.0, 1.0);
        assert!(persistence_image(&diagram(&[]), &cfg, 0).is_err());
        let cfg = unit_config(0, 1.0);
        assert!(persistence_image(&diagram(&[]), &cfg, 0).is_err());
        let cfg = unit_config(2, 0.0);
        assert!(persistence_image(&diagram(&[]), &cfg, 0).is_err());
    }

    fn arb_points() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((0.0..2.0f64, 0.01..2.0f64), 0..8)
            .prop_map(|v| v.into_iter().map(|(b, p)| (b, b + p)).collect())
    }

    proptest! {
        #[test]
        fn shuffling_points_is_bit_identical(points in arb_points(), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let cfg = unit_config(5, 0.7);
            let a = persistence_image(&diagram(&points), &cfg, 0).unwrap();
            let mut shuffled = points.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let b = persistence_image(&diagram(&shuffled), &cfg, 0).unwrap();
            prop_assert_eq!(a.pixels, b.pixels);
        }

        #[test]
        fn duplicating_a_point_doubles_the_image(b in 0.0..2.0f64, p in 0.01..2.0f64) {
            let cfg = unit_config(4, 0.5);
            let one = persistence_image(&diagram(&[(b, b + p)]), &cfg, 0).unwrap();
            let two = persistence_image(&diagram(&[(b, b + p), (b, b + p)]), &cfg, 0).unwrap();
            for (x, y) in one.pixels.iter().zip(two.pixels.iter()) {
                prop_assert!((2.0 * x - y).abs() <= 1e-15 * y.abs().max(1.0));
            }
        }
    }
}
