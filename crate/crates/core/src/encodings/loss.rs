//! Topological loss over finite diagram points:
//! `sum_i (d_i - b_i)^p * ((d_i + b_i) / 2)^q`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::persistence::PersistenceDiagram;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopoLossConfig {
    pub p: f64,
    pub q: f64,
}

impl Default for TopoLossConfig {
    fn default() -> Self {
        TopoLossConfig { p: 2.0, q: 0.0 }
    }
}

impl TopoLossConfig {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p >= 0.0 && q >= 0.0 && p.is_finite() && q.is_finite()) || p + q <= 0.0 {
            return Err(Error::argument(format!(
                "loss exponents need p, q >= 0 and p + q > 0 (p = {p}, q = {q})"
            )));
        }
        Ok(TopoLossConfig { p, q })
    }

    /// `max(p, q)`.
    pub fn k(&self) -> f64 {
        self.p.max(self.q)
    }
}

/// `base^exp`, with a zero exponent contributing exactly 1.
fn pow(base: f64, exp: f64) -> f64 {
    if exp == 0.0 {
        1.0
    } else {
        base.powf(exp)
    }
}

pub fn topo_loss(d: &PersistenceDiagram, cfg: &TopoLossConfig, dimension: usize) -> f64 {
    d.finite(dimension)
        .into_iter()
        .map(|(b, de)| pow(de - b, cfg.p) * pow((de + b) / 2.0, cfg.q))
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointGradient {
    pub d_birth: f64,
    pub d_death: f64,
}

/// Partial derivatives of [`topo_loss`] for each finite point of
/// `dimension`, in the order of [`PersistenceDiagram::finite`].
pub fn topo_loss_grad(
    d: &PersistenceDiagram,
    cfg: &TopoLossConfig,
    dimension: usize,
) -> Vec<PointGradient> {
    let (p, q) = (cfg.p, cfg.q);
    d.finite(dimension)
        .into_iter()
        .map(|(b, de)| {
            let (pers, mid) = (de - b, (de + b) / 2.0);
            // d/d(pers) and d/d(mid) of pers^p * mid^q
            let by_pers = if p == 0.0 { 0.0 } else { p * pow(pers, p - 1.0) * pow(mid, q) };
            let by_mid = if q == 0.0 { 0.0 } else { pow(pers, p) * q * pow(mid, q - 1.0) };
            PointGradient {
                d_birth: -by_pers + 0.5 * by_mid,
                d_death: by_pers + 0.5 * by_mid,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persistence::DiagramPoint;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn diagram(points: &[(f64, f64)]) -> PersistenceDiagram {
        PersistenceDiagram::new(points.iter().map(|&(b, d)| DiagramPoint::finite(b, d, 0))).unwrap()
    }

    #[test]
    fn closed_form_values() {
        let sq = TopoLossConfig::default();
        assert_eq!(topo_loss(&diagram(&[]), &sq, 0), 0.0);
        assert_eq!(topo_loss(&diagram(&[(0.0, 2.0)]), &sq, 0), 4.0);
        let mixed = TopoLossConfig::new(1.0, 1.0).unwrap();
        assert_eq!(topo_loss(&diagram(&[(1.0, 3.0), (0.0, 1.0)]), &mixed, 0), 4.5);
        assert_eq!(sq.k(), 2.0);
    }

    #[test]
    fn essential_points_are_ignored() {
        let d = PersistenceDiagram::new([
            DiagramPoint::finite(0.0, 2.0, 0),
            DiagramPoint::essential(0.0, 0),
        ])
        .unwrap();
        assert_eq!(topo_loss(&d, &TopoLossConfig::default(), 0), 4.0);
        assert_eq!(topo_loss_grad(&d, &TopoLossConfig::default(), 0).len(), 1);
    }

    #[test]
    fn closed_form_gradients() {
        let g = topo_loss_grad(&diagram(&[(0.0, 2.0)]), &TopoLossConfig::default(), 0);
        assert_eq!(g, vec![PointGradient { d_birth: -4.0, d_death: 4.0 }]);
        let g = topo_loss_grad(&diagram(&[(1.0, 3.0)]), &TopoLossConfig::new(1.0, 1.0).unwrap(), 0);
        assert_eq!(g, vec![PointGradient { d_birth: -1.0, d_death: 3.0 }]);
    }

    #[test]
    fn invalid_exponents() {
        assert!(TopoLossConfig::new(0.0, 0.0).is_err());
        assert!(TopoLossConfig::new(-1.0, 1.0).is_err());
        assert!(TopoLossConfig::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn loss_grows_with_death() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let cfg = TopoLossConfig::new(rng.gen_range(1.0..3.0), rng.gen_range(0.0..2.0)).unwrap();
            let pts: Vec<(f64, f64)> = (0..5)
                .map(|_| {
                    let b = rng.gen_range(0.0..3.0);
                    (b, b + rng.gen_range(0.1..2.0))
                })
                .collect();
            let base = topo_loss(&diagram(&pts), &cfg, 0);
            for i in 0..pts.len() {
                let mut bumped = pts.clone();
                bumped[i].1 += rng.gen_range(0.0..1.0);
                assert!(topo_loss(&diagram(&bumped), &cfg, 0) >= base);
            }
        }
    }
}
