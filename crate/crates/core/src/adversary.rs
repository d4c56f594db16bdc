//! Monotone adversaries: changes that only add intra-community edges or
//! remove inter-community edges relative to a ground truth.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{Graph, PartitionLabels};
use crate::model::PlantedPartitionParams;
use crate::rng::{choose_k, derive_seed, purpose, seeded, PairStream};
use crate::thresholds::domination_violation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeOp {
    Add,
    Remove,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeChange {
    pub op: EdgeOp,
    pub u: usize,
    pub v: usize,
}

/// Catalog of monotone adversaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum AdversarySpec {
    None,
    /// Add each missing intra pair w.p. `delta_add`; remove each inter edge w.p. `delta_rem`.
    RandomMonotone { delta_add: f64, delta_rem: f64 },
    /// Pick `size` random vertices of `community` and add each missing pair among them w.p. `density`.
    SubcommunityPlant {
        community: usize,
        size: usize,
        #[serde(default = "one")]
        density: f64,
    },
    /// Pick `hubs` random vertices and connect each to up to `degree` more members of its own community.
    HubPlant { hubs: usize, degree: usize },
    /// Thin/superpose towards a dominating block model with rates `q_tilde_prime`.
    SbmDominate {
        q_tilde_prime: Vec<Vec<f64>>,
        base: PlantedPartitionParams,
    },
    /// Explicit list of changes; each must be monotone.
    Scripted { changes: Vec<EdgeChange> },
}

fn one() -> f64 {
    1.0
}

/// Spec plus seed, as stored in adversary JSON files: `{kind, params, seed}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversaryConfig {
    #[serde(flatten)]
    pub spec: AdversarySpec,
    #[serde(default)]
    pub seed: u64,
}

/// Output graph with the list of changes that were applied.
#[derive(Debug, Clone)]
pub struct AdversaryOutcome {
    pub graph: Graph,
    pub added: Vec<(usize, usize)>,
    pub removed: Vec<(usize, usize)>,
}

impl AdversaryOutcome {
    fn unchanged(g: &Graph) -> Self {
        Self {
            graph: g.clone(),
            added: Vec::new(),
            removed: Vec::new(),
        }
    }

    fn add(&mut self, u: usize, v: usize) {
        if self.graph.add_edge(u, v) {
            self.added.push((u.min(v), u.max(v)));
        }
    }

    fn remove(&mut self, u: usize, v: usize) {
        if self.graph.remove_edge(u, v) {
            self.removed.push((u.min(v), u.max(v)));
        }
    }

    pub fn change_count(&self) -> usize {
        self.added.len() + self.removed.len()
    }
}

fn check_prob(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(invalid(format!("{name} = {x} outside [0, 1]")))
    }
}

/// Reject a change that is not monotone with respect to `truth`.
pub fn check_monotone(change: &EdgeChange, truth: &PartitionLabels) -> Result<()> {
    let n = truth.n();
    let EdgeChange { op, u, v } = *change;
    if u >= n || v >= n || u == v {
        return Err(invalid(format!("invalid vertex pair ({u}, {v})")));
    }
    let same = truth.same_community(u, v);
    match op {
        EdgeOp::Add if !same => Err(Error::NonMonotone {
            op: "add",
            u,
            v,
            reason: "crosses communities",
        }),
        EdgeOp::Remove if same => Err(Error::NonMonotone {
            op: "remove",
            u,
            v,
            reason: "lies inside a community",
        }),
        _ => Ok(()),
    }
}

/// Apply a monotone adversary to `g`. The result differs from `g` only by
/// intra-community additions and inter-community removals.
pub fn apply_adversary(
    g: &Graph,
    truth: &PartitionLabels,
    spec: &AdversarySpec,
    seed: u64,
) -> Result<AdversaryOutcome> {
    if g.n() != truth.n() {
        return Err(Error::Dimension(format!(
            "graph has {} vertices, labels {}",
            g.n(),
            truth.n()
        )));
    }
    let seed = derive_seed(seed, &[purpose::ADVERSARY]);
    let n = g.n();
    let mut out = AdversaryOutcome::unchanged(g);
    match spec {
        AdversarySpec::None => {}
        AdversarySpec::RandomMonotone {
            delta_add,
            delta_rem,
        } => {
            check_prob("delta_add", *delta_add)?;
            check_prob("delta_rem", *delta_rem)?;
            let mut stream = PairStream::new(seed, n);
            for u in 0..n {
                for v in u + 1..n {
                    let same = truth.same_community(u, v);
                    let present = g.has_edge(u, v);
                    if same && !present && stream.bernoulli(u, v, *delta_add) {
                        out.add(u, v);
                    } else if !same && present && stream.bernoulli(u, v, *delta_rem) {
                        out.remove(u, v);
                    }
                }
            }
        }
        AdversarySpec::SubcommunityPlant {
            community,
            size,
            density,
        } => {
            check_prob("density", *density)?;
            if *community >= truth.r() {
                return Err(invalid(format!("community {community} out of range")));
            }
            let members = truth.members(*community);
            if *size > members.len() {
                return Err(invalid(format!(
                    "sub-community of size {size} exceeds community size {}",
                    members.len()
                )));
            }
            let chosen = choose_k(&mut seeded(seed), &members, *size);
            let mut stream = PairStream::new(derive_seed(seed, &[1]), n);
            for (a, &u) in chosen.iter().enumerate() {
                for &v in &chosen[a + 1..] {
                    if stream.bernoulli(u, v, *density) {
                        out.add(u, v);
                    }
                }
            }
        }
        AdversarySpec::HubPlant { hubs, degree } => {
            if *hubs > n {
                return Err(invalid(format!("{hubs} hubs requested on {n} vertices")));
            }
            let mut rng = seeded(seed);
            let all: Vec<usize> = (0..n).collect();
            for hub in choose_k(&mut rng, &all, *hubs) {
                let candidates: Vec<usize> = truth
                    .members(truth.label(hub))
                    .into_iter()
                    .filter(|&v| v != hub && !out.graph.has_edge(hub, v))
                    .collect();
                for v in choose_k(&mut rng, &candidates, *degree) {
                    out.add(hub, v);
                }
            }
        }
        AdversarySpec::SbmDominate {
            q_tilde_prime,
            base,
        } => {
            return simulate_dominating_sbm(g, truth, q_tilde_prime, base, seed);
        }
        AdversarySpec::Scripted { changes } => {
            for c in changes {
                check_monotone(c, truth)?;
            }
            for c in changes {
                match c.op {
                    EdgeOp::Add => out.add(c.u, c.v),
                    EdgeOp::Remove => out.remove(c.u, c.v),
                }
            }
        }
    }
    Ok(out)
}

/// Per-block change probabilities turning `PPM(base)` into `SBM(q_tilde_prime)`:
/// intra blocks gain each missing edge w.p. `(Q'_ii - p) / (1 - p)`, inter
/// blocks lose each edge w.p. `(q - Q'_ij) / q`.
pub fn domination_probabilities(
    q_tilde_prime: &[Vec<f64>],
    base: &PlantedPartitionParams,
) -> Result<Vec<Vec<f64>>> {
    let r = base.r();
    if q_tilde_prime.len() != r || q_tilde_prime.iter().any(|row| row.len() != r) {
        return Err(Error::Dimension(format!("target rate matrix must be {r} x {r}")));
    }
    if let Some((i, j)) = domination_violation(q_tilde_prime, &base.rate_matrix()) {
        return Err(invalid(format!(
            "target rates do not dominate the base model at entry ({i}, {j})"
        )));
    }
    let scale = base.scale();
    let (p, q) = (base.p(), base.q());
    let mut probs = vec![vec![0.0; r]; r];
    for i in 0..r {
        for j in 0..r {
            if (q_tilde_prime[i][j] - q_tilde_prime[j][i]).abs() > 1e-12 {
                return Err(invalid("target rate matrix must be symmetric"));
            }
            let target = q_tilde_prime[i][j] * scale;
            probs[i][j] = if i == j {
                if target > 1.0 {
                    return Err(invalid(format!("target probability {target} exceeds 1")));
                }
                (target - p) / (1.0 - p)
            } else {
                if target < 0.0 {
                    return Err(invalid("target rates must be nonnegative"));
                }
                (q - target) / q
            };
        }
    }
    Ok(probs)
}

/// Resample `g ~ PPM(base)` into a draw from `SBM(q_tilde_prime)` on the same
/// labels using only monotone changes.
pub fn simulate_dominating_sbm(
    g: &Graph,
    truth: &PartitionLabels,
    q_tilde_prime: &[Vec<f64>],
    base: &PlantedPartitionParams,
    seed: u64,
) -> Result<AdversaryOutcome> {
    if truth.r() != base.r() || g.n() != truth.n() {
        return Err(Error::Dimension("graph, labels and base model disagree".into()));
    }
    let probs = domination_probabilities(q_tilde_prime, base)?;
    let n = g.n();
    let mut stream = PairStream::new(derive_seed(seed, &[purpose::DOMINATE]), n);
    let mut out = AdversaryOutcome::unchanged(g);
    for u in 0..n {
        for v in u + 1..n {
            let (i, j) = (truth.label(u), truth.label(v));
            let prob = probs[i][j];
            if prob <= 0.0 {
                continue;
            }
            let present = g.has_edge(u, v);
            if i == j && !present && stream.bernoulli(u, v, prob) {
                out.add(u, v);
            } else if i != j && present && stream.bernoulli(u, v, prob) {
                out.remove(u, v);
            }
        }
    }
    Ok(out)
}

/// Every added edge intra-community and every removed edge inter-community,
/// judged by comparing the two graphs directly.
pub fn is_monotone_modification(before: &Graph, after: &Graph, truth: &PartitionLabels) -> bool {
    let n = before.n();
    if after.n() != n {
        return false;
    }
    for u in 0..n {
        for v in u + 1..n {
            match (before.has_edge(u, v), after.has_edge(u, v)) {
                (false, true) if !truth.same_community(u, v) => return false,
                (true, false) if truth.same_community(u, v) => return false,
                _ => {}
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::sample_ppm;

    fn instance() -> (Graph, PartitionLabels, PlantedPartitionParams) {
        let params = PlantedPartitionParams::new(90, vec![0.4, 0.3, 0.3], 12.0, 3.0).unwrap();
        let (g, truth) = sample_ppm(&params, 4).unwrap();
        (g, truth, params)
    }

    #[test]
    fn none_is_identity() {
        let (g, truth, _) = instance();
        let out = apply_adversary(&g, &truth, &AdversarySpec::None, 1).unwrap();
        assert_eq!(out.graph, g);
        assert_eq!(out.change_count(), 0);
    }

    #[test]
    fn full_random_monotone_gives_cliques() {
        let (g, truth, _) = instance();
        let spec = AdversarySpec::RandomMonotone {
            delta_add: 1.0,
            delta_rem: 1.0,
        };
        let out = apply_adversary(&g, &truth, &spec, 1).unwrap();
        for u in 0..g.n() {
            for v in u + 1..g.n() {
                assert_eq!(out.graph.has_edge(u, v), truth.same_community(u, v));
            }
        }
    }

    #[test]
    fn scripted_rejects_non_monotone_with_pair() {
        let (g, truth, _) = instance();
        let (a, b) = (truth.members(0)[0], truth.members(1)[0]);
        let spec = AdversarySpec::Scripted {
            changes: vec![EdgeChange {
                op: EdgeOp::Add,
                u: a,
                v: b,
            }],
        };
        match apply_adversary(&g, &truth, &spec, 0) {
            Err(Error::NonMonotone { u, v, .. }) => assert_eq!((u, v), (a, b)),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn scripted_logs_effective_changes() {
        let (g, truth, _) = instance();
        let m0 = truth.members(0);
        let (u, v) = m0
            .iter()
            .flat_map(|&u| m0.iter().map(move |&v| (u, v)))
            .find(|&(u, v)| u < v && !g.has_edge(u, v))
            .unwrap();
        let (x, y) = g
            .edges()
            .find(|&(x, y)| !truth.same_community(x, y))
            .unwrap();
        let spec = AdversarySpec::Scripted {
            changes: vec![
                EdgeChange { op: EdgeOp::Add, u, v },
                EdgeChange { op: EdgeOp::Remove, u: x, v: y },
            ],
        };
        let out = apply_adversary(&g, &truth, &spec, 0).unwrap();
        assert_eq!(out.added, vec![(u, v)]);
        assert_eq!(out.removed, vec![(x, y)]);
        assert!(is_monotone_modification(&g, &out.graph, &truth));
    }

    #[test]
    fn hub_plant_is_monotone() {
        let (g, truth, _) = instance();
        let spec = AdversarySpec::HubPlant { hubs: 5, degree: 10 };
        let out = apply_adversary(&g, &truth, &spec, 3).unwrap();
        assert!(!out.added.is_empty());
        assert!(out.removed.is_empty());
        assert!(is_monotone_modification(&g, &out.graph, &truth));
    }

    #[test]
    fn domination_rejects_bad_targets() {
        let (g, truth, params) = instance();
        let mut q = params.rate_matrix();
        q[0][1] = 4.0;
        q[1][0] = 4.0;
        assert!(simulate_dominating_sbm(&g, &truth, &q, &params, 0).is_err());
    }

    #[test]
    fn identity_domination_changes_nothing() {
        let (g, truth, params) = instance();
        let out = simulate_dominating_sbm(&g, &truth, &params.rate_matrix(), &params, 0).unwrap();
        assert_eq!(out.graph, g);
    }

    #[test]
    fn config_json_shape() {
        let json = r#"{"kind": "random_monotone", "params": {"delta_add": 0.3, "delta_rem": 0.3}, "seed": 9}"#;
        let cfg: AdversaryConfig = serde_json::from_str(json).unwrap();
        assert_eq!(cfg.seed, 9);
        assert!(matches!(cfg.spec, AdversarySpec::RandomMonotone { .. }));
        let none: AdversaryConfig = serde_json::from_str(r#"{"kind": "none"}"#).unwrap();
        assert_eq!(none.spec, AdversarySpec::None);
        let back: AdversaryConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }
}
