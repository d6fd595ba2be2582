//! Edge-flip perturbations and a sweep that measures how far the encodings
//! drift as the flip budget grows.

use std::collections::BTreeSet;
use std::io::Write;

use rand::seq::index::sample;
use serde::Serialize;

use crate::encodings::{local_diagrams_with, topo_loss, witness_diagram, EncodingConfig, TopoLossConfig};
use crate::error::{Error, Result};
use crate::graph::{adjacency_l1_distance, Graph};
use crate::landmarks::{select_landmarks, LandmarkSet};
use crate::persistence::{diagram_distance_with, DistanceMode, EssentialMatching, PersistenceDiagram};
use crate::synth::{rng, unrank_pair};
use crate::vectorize::{persistence_image, EssentialPolicy};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PerturbMode {
    /// Uniform over all node pairs.
    Random,
    /// Uniform over pairs touching a landmark of the input graph.
    LandmarkTargeted { fraction: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbSpec {
    /// Number of distinct undirected pairs to flip.
    pub budget: usize,
    pub mode: PerturbMode,
    pub seed: u64,
}

/// Weight given to edges created by a flip.
pub const ADDED_EDGE_WEIGHT: f64 = 1.0;

/// Flip budget for a relative rate: `round(rate * |E|)`.
pub fn budget_from_rate(g: &Graph, rate: f64) -> Result<usize> {
    if !(rate >= 0.0 && rate.is_finite()) {
        return Err(Error::argument(format!("perturbation rate must be >= 0, got {rate}")));
    }
    Ok((rate * g.num_edges() as f64).round() as usize)
}

/// Flips exactly `spec.budget` distinct pairs, sampled without replacement.
pub fn perturb(g: &Graph, spec: &PerturbSpec) -> Result<Graph> {
    let n = g.num_nodes();
    let mut rng = rng(spec.seed);
    let pairs: Vec<(usize, usize)> = match spec.mode {
        PerturbMode::Random => {
            let total = n * n.saturating_sub(1) / 2;
            if spec.budget > total {
                return Err(Error::argument(format!(
                    "budget {} exceeds the {total} available pairs",
                    spec.budget
                )));
            }
            let mut picks = sample(&mut rng, total, spec.budget).into_vec();
            picks.sort_unstable();
            picks.into_iter().map(|k| unrank_pair(n, k)).collect()
        }
        PerturbMode::LandmarkTargeted { fraction } => {
            let ls = select_landmarks(g, fraction)?;
            let mut candidates = BTreeSet::new();
            for &l in &ls.landmarks {
                for v in (0..n).filter(|&v| v != l) {
                    candidates.insert((l.min(v), l.max(v)));
                }
            }
            let candidates: Vec<_> = candidates.into_iter().collect();
            if spec.budget > candidates.len() {
                return Err(Error::argument(format!(
                    "budget {} exceeds the {} landmark pairs",
                    spec.budget,
                    candidates.len()
                )));
            }
            let mut picks = sample(&mut rng, candidates.len(), spec.budget).into_vec();
            picks.sort_unstable();
            picks.into_iter().map(|k| candidates[k]).collect()
        }
    };
    g.with_flipped(&pairs, ADDED_EDGE_WEIGHT)
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    /// Ascending flip budgets.
    pub budgets: Vec<usize>,
    pub trials: usize,
    pub encoding: EncodingConfig,
    pub loss: TopoLossConfig,
    pub mode: PerturbMode,
    /// Trial `t` uses seed `base_seed + t`.
    pub base_seed: u64,
    /// Exponent of the Wasserstein distance between local diagrams.
    pub wasserstein_p: f64,
    /// Keep the clean graph's landmarks instead of re-selecting on each
    /// perturbed graph.
    pub freeze_landmarks: bool,
}

impl SweepConfig {
    pub fn new(budgets: Vec<usize>, trials: usize, encoding: EncodingConfig) -> Self {
        SweepConfig {
            budgets,
            trials,
            encoding,
            loss: TopoLossConfig::default(),
            mode: PerturbMode::Random,
            base_seed: 0,
            wasserstein_p: 1.0,
            freeze_landmarks: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityRow {
    pub budget: usize,
    pub trial: usize,
    pub l1_distance: usize,
    pub local_wasserstein_p: f64,
    pub global_pi_linf_drift: f64,
    pub topo_loss_drift: f64,
    pub cover_radius: f64,
    pub c_epsilon: usize,
    pub bound_ratio_local: f64,
    pub bound_ratio_global: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct StabilityReport {
    pub rows: Vec<StabilityRow>,
}

impl StabilityReport {
    pub const COLUMNS: [&'static str; 10] = [
        "budget",
        "trial",
        "l1_distance",
        "local_wasserstein_p",
        "global_pi_linf_drift",
        "topo_loss_drift",
        "cover_radius",
        "c_epsilon",
        "bound_ratio_local",
        "bound_ratio_global",
    ];

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", Self::COLUMNS.join(","))?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.budget,
                r.trial,
                r.l1_distance,
                r.local_wasserstein_p,
                r.global_pi_linf_drift,
                r.topo_loss_drift,
                r.cover_radius,
                r.c_epsilon,
                r.bound_ratio_local,
                r.bound_ratio_global
            )?;
        }
        Ok(())
    }

    /// Rows for one budget.
    pub fn at_budget(&self, budget: usize) -> impl Iterator<Item = &StabilityRow> {
        self.rows.iter().filter(move |r| r.budget == budget)
    }
}

/// Everything the sweep compares, computed once per graph.
struct Snapshot {
    local: std::collections::BTreeMap<usize, PersistenceDiagram>,
    global: PersistenceDiagram,
    cover_radius: f64,
    c_epsilon: usize,
}

fn snapshot(g: &Graph, ls: &LandmarkSet, cfg: &EncodingConfig) -> Result<Snapshot> {
    let local = local_diagrams_with(g, ls, cfg)?;
    let global = witness_diagram(g, &ls.landmarks, cfg)?;
    Ok(Snapshot {
        cover_radius: local.cover.cover_radius,
        c_epsilon: local.cover.c_epsilon,
        local: local.diagrams,
        global,
    })
}

/// Applies the image's essential policy so that diagrams compare finitely.
fn comparable(d: &PersistenceDiagram, policy: EssentialPolicy) -> PersistenceDiagram {
    match policy {
        EssentialPolicy::Drop => d.without_essential(),
        EssentialPolicy::Cap(c) => d.capped(c),
    }
}

fn ratio(drift: f64, scale: f64) -> f64 {
    if drift == 0.0 {
        0.0
    } else {
        drift / scale
    }
}

/// Aggregated W_p between local diagrams matched by cell owner; an owner
/// missing on one side is compared against the empty diagram.
fn local_drift(clean: &Snapshot, noisy: &Snapshot, cfg: &SweepConfig) -> Result<f64> {
    let policy = cfg.encoding.image.essential;
    let dim = cfg.encoding.homology_dim;
    let p = cfg.wasserstein_p;
    let empty = PersistenceDiagram::default();
    let owners: BTreeSet<usize> = clean.local.keys().chain(noisy.local.keys()).copied().collect();
    let mut total = 0.0;
    for owner in owners {
        let a = comparable(clean.local.get(&owner).unwrap_or(&empty), policy);
        let b = comparable(noisy.local.get(&owner).unwrap_or(&empty), policy);
        let w = diagram_distance_with(&a, &b, DistanceMode::Wasserstein(p), dim, EssentialMatching::Drop)?;
        total += w.powf(p);
    }
    Ok(total.powf(1.0 / p))
}

pub fn stability_sweep(g: &Graph, cfg: &SweepConfig) -> Result<StabilityReport> {
    if cfg.trials == 0 {
        return Err(Error::argument("trials must be at least 1"));
    }
    if cfg.budgets.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::argument("budgets must be sorted ascending"));
    }
    if !(cfg.wasserstein_p >= 1.0) {
        return Err(Error::argument("wasserstein_p must be >= 1"));
    }
    let enc = &cfg.encoding;
    let clean_ls = select_landmarks(g, enc.fraction)?;
    let clean = snapshot(g, &clean_ls, enc)?;
    let clean_image = persistence_image(&clean.global, &enc.image, enc.homology_dim)?;
    let clean_loss = topo_loss(&clean.global, &cfg.loss, enc.homology_dim);

    let mut rows = Vec::with_capacity(cfg.budgets.len() * cfg.trials);
    for &budget in &cfg.budgets {
        for trial in 0..cfg.trials {
            let spec = PerturbSpec {
                budget,
                mode: cfg.mode,
                seed: cfg.base_seed.wrapping_add(trial as u64),
            };
            let noisy_graph = perturb(g, &spec)?;
            let ls = if cfg.freeze_landmarks {
                clean_ls.clone()
            } else {
                select_landmarks(&noisy_graph, enc.fraction)?
            };
            let noisy = snapshot(&noisy_graph, &ls, enc)?;
            let image = persistence_image(&noisy.global, &enc.image, enc.homology_dim)?;

            let local = local_drift(&clean, &noisy, cfg)?;
            let global = clean_image.linf_distance(&image)?;
            let loss = (clean_loss - topo_loss(&noisy.global, &cfg.loss, enc.homology_dim)).abs();
            let cover_radius = clean.cover_radius.max(noisy.cover_radius);
            let c_epsilon = clean.c_epsilon.max(noisy.c_epsilon);
            let slack = budget as f64 + cover_radius;
            rows.push(StabilityRow {
                budget,
                trial,
                l1_distance: adjacency_l1_distance(g, &noisy_graph)?,
                local_wasserstein_p: local,
                global_pi_linf_drift: global,
                topo_loss_drift: loss,
                cover_radius,
                c_epsilon,
                bound_ratio_local: ratio(local, c_epsilon as f64 * slack),
                bound_ratio_global: ratio(global, slack),
            });
        }
    }
    Ok(StabilityReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::random_connected_graph;
    use crate::vectorize::PIConfig;

    fn spec(budget: usize, seed: u64) -> PerturbSpec {
        PerturbSpec {
            budget,
            mode: PerturbMode::Random,
            seed,
        }
    }

    #[test]
    fn zero_budget_is_identity() {
        let g = random_connected_graph(20, 10, 1).unwrap();
        assert_eq!(perturb(&g, &spec(0, 4)).unwrap(), g);
    }

    #[test]
    fn flips_exactly_the_budget_and_is_deterministic() {
        let g = random_connected_graph(20, 10, 1).unwrap();
        for budget in [1, 7, 30] {
            let a = perturb(&g, &spec(budget, 9)).unwrap();
            assert_eq!(adjacency_l1_distance(&g, &a).unwrap(), budget);
            assert_eq!(a, perturb(&g, &spec(budget, 9)).unwrap());
        }
        assert!(perturb(&g, &spec(191, 0)).is_err());
        assert!(perturb(&g, &spec(190, 0)).is_ok());
    }

    #[test]
    fn targeted_flips_touch_landmarks() {
        let g = random_connected_graph(30, 15, 2).unwrap();
        let ls = select_landmarks(&g, 0.1).unwrap();
        let s = PerturbSpec {
            budget: 12,
            mode: PerturbMode::LandmarkTargeted { fraction: 0.1 },
            seed: 3,
        };
        let h = perturb(&g, &s).unwrap();
        assert_eq!(adjacency_l1_distance(&g, &h).unwrap(), 12);
        let changed = g
            .edges()
            .map(|(u, v, _)| (u, v))
            .filter(|&(u, v)| !h.has_edge(u, v))
            .chain(h.edges().map(|(u, v, _)| (u, v)).filter(|&(u, v)| !g.has_edge(u, v)));
        for (u, v) in changed {
            assert!(ls.contains(u) || ls.contains(v));
        }
    }

    #[test]
    fn rate_conversion() {
        let g = random_connected_graph(20, 10, 1).unwrap();
        assert_eq!(budget_from_rate(&g, 0.1).unwrap(), 3);
        assert!(budget_from_rate(&g, -0.1).is_err());
    }

    fn sweep_config(budgets: Vec<usize>, trials: usize) -> SweepConfig {
        SweepConfig::new(budgets, trials, EncodingConfig::new(0.2, PIConfig::for_diameter(6.0)))
    }

    #[test]
    fn zero_budget_sweep_has_no_drift() {
        let g = random_connected_graph(25, 12, 5).unwrap();
        let report = stability_sweep(&g, &sweep_config(vec![0], 3)).unwrap();
        assert_eq!(report.rows.len(), 3);
        for r in &report.rows {
            assert_eq!(r.l1_distance, 0);
            assert_eq!(r.local_wasserstein_p, 0.0);
            assert_eq!(r.global_pi_linf_drift, 0.0);
            assert_eq!(r.topo_loss_drift, 0.0);
            assert_eq!(r.bound_ratio_local, 0.0);
            assert_eq!(r.bound_ratio_global, 0.0);
        }
    }

    #[test]
    fn sweep_cardinality_and_csv_header() {
        let g = random_connected_graph(30, 15, 6).unwrap();
        let report = stability_sweep(&g, &sweep_config(vec![1, 2, 4], 3)).unwrap();
        assert_eq!(report.rows.len(), 9);
        for r in &report.rows {
            assert_eq!(r.l1_distance, r.budget);
            assert!(r.bound_ratio_local.is_finite() && r.bound_ratio_global.is_finite());
        }
        let mut out = Vec::new();
        report.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "budget,trial,l1_distance,local_wasserstein_p,global_pi_linf_drift,topo_loss_drift,cover_radius,c_epsilon,bound_ratio_local,bound_ratio_global"
        );
        assert_eq!(text.lines().count(), 10);
    }

    #[test]
    fn sweep_rejects_bad_arguments() {
        let g = random_connected_graph(10, 5, 6).unwrap();
        assert!(stability_sweep(&g, &sweep_config(vec![2, 1], 1)).is_err());
        assert!(stability_sweep(&g, &sweep_config(vec![1], 0)).is_err());
    }
}
