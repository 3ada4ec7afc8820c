//! Seeded random generation of fully-connected test networks.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use super::{analyze, DelayNetwork, NetError};

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub relays: usize,
    pub edges: usize,
    pub delay_min: u32,
    pub delay_max: u32,
    /// Reject draws whose per-pair path count exceeds this, when set.
    pub max_paths: Option<u64>,
    /// Reject draws whose delay span d_max falls outside this range.
    pub d_max_range: Option<(u64, u64)>,
    /// Arrange relays in two layers with forward hops only, keeping
    /// paths short; needed when the block length must stay small.
    pub layered: bool,
    pub retry_budget: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            relays: 8,
            edges: 20,
            delay_min: 1,
            delay_max: 3,
            max_paths: None,
            d_max_range: None,
            layered: false,
            retry_budget: 400,
        }
    }
}

impl GenConfig {
    /// Shallow unit-delay networks (hop counts 2 or 3, so d_max = 1):
    /// usable with block lengths as small as 3.
    pub fn layered_shallow() -> Self {
        GenConfig {
            relays: 8,
            edges: 22,
            delay_min: 1,
            delay_max: 1,
            max_paths: None,
            d_max_range: Some((1, 2)),
            layered: true,
            retry_budget: 400,
        }
    }
}

/// Draws random DAGs until one is acyclic by construction, has every
/// source-destination pair connected, and passes the configured
/// filters. Deterministic for a fixed seed.
pub fn generate(cfg: &GenConfig, seed: u64) -> Result<DelayNetwork, NetError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cfg.retry_budget.max(1) {
        if let Some(net) = attempt(cfg, &mut rng) {
            return Ok(net);
        }
    }
    Err(NetError::GenerationFailed(cfg.retry_budget.max(1)))
}

fn attempt(cfg: &GenConfig, rng: &mut ChaCha8Rng) -> Option<DelayNetwork> {
    let r = cfg.relays;
    // rank order: sources, relays, destinations; edges only go forward
    let mut nodes: Vec<String> = vec!["S1".into(), "S2".into(), "S3".into()];
    nodes.extend((0..r).map(|i| format!("r{i}")));
    nodes.extend(["T1".into(), "T2".into(), "T3".into()]);
    let source = |i: usize| i;
    let relay = |i: usize| 3 + i;
    let dest = |j: usize| 3 + r + j;

    let mut pairs = std::collections::HashSet::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let push = |edges: &mut Vec<(usize, usize)>,
                pairs: &mut std::collections::HashSet<(usize, usize)>,
                t: usize,
                h: usize| {
        if pairs.insert((t, h)) {
            edges.push((t, h));
        }
    };
    // spine: every source into a relay, every destination out of one
    for i in 0..3 {
        push(&mut edges, &mut pairs, source(i), relay(rng.random_range(0..r.max(1))));
    }
    for j in 0..3 {
        push(&mut edges, &mut pairs, relay(rng.random_range(0..r.max(1))), dest(j));
    }
    // random forward fill
    let mut guard = 0;
    while edges.len() < cfg.edges && guard < cfg.edges * 20 {
        guard += 1;
        let t = rng.random_range(0..3 + r);
        let h = rng.random_range(3..3 + r + 3);
        if t == h {
            continue;
        }
        let allowed = if cfg.layered {
            // relays split into an early and a late layer
            let layer = |v: usize| {
                if v < 3 {
                    0 // source
                } else if v < 3 + r / 2 {
                    1
                } else if v < 3 + r {
                    2
                } else {
                    3 // destination
                }
            };
            let (lt, lh) = (layer(t), layer(h));
            lt < lh && !(lt == 0 && lh == 3)
        } else {
            match (t < 3, h >= 3 + r) {
                (true, true) => true,    // source -> destination
                (true, false) => true,   // source -> relay
                (false, true) => true,   // relay -> destination
                (false, false) => h > t, // relay -> later relay only
            }
        };
        if allowed {
            push(&mut edges, &mut pairs, t, h);
        }
    }

    let named: Vec<(String, String, String, u32)> = edges
        .iter()
        .enumerate()
        .map(|(idx, &(t, h))| {
            let delay = rng.random_range(cfg.delay_min..=cfg.delay_max);
            (format!("e{idx}"), nodes[t].clone(), nodes[h].clone(), delay)
        })
        .collect();
    let net = DelayNetwork::from_parts(
        nodes.clone(),
        named,
        ["S1".into(), "S2".into(), "S3".into()],
        ["T1".into(), "T2".into(), "T3".into()],
    )
    .ok()?;
    let analysis = analyze(&net).ok()?;
    if !analysis.conn.all_connected() {
        return None;
    }
    if let Some((lo, hi)) = cfg.d_max_range {
        if analysis.d_max < lo || analysis.d_max > hi {
            return None;
        }
    }
    if let Some(cap) = cfg.max_paths {
        if max_pair_path_count(&net, &analysis) > cap {
            return None;
        }
    }
    Some(net)
}

/// Largest per-pair path count, by counting DP over the topological order.
pub fn max_pair_path_count(net: &DelayNetwork, analysis: &super::NetAnalysis) -> u64 {
    let mut worst = 0u64;
    for &s in net.sources().iter() {
        let mut count = vec![0u64; net.node_count()];
        count[s] = 1;
        for &v in &analysis.topo_nodes {
            if count[v] == 0 {
                continue;
            }
            for &e in &analysis.out_edges[v] {
                let h = net.edges()[e].head;
                count[h] = count[h].saturating_add(count[v]);
            }
        }
        for &t in net.destinations().iter() {
            worst = worst.max(count[t]);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgraph::{network_to_json, validate};

    #[test]
    fn deterministic_for_seed() {
        let cfg = GenConfig::default();
        let a = generate(&cfg, 0).unwrap();
        let b = generate(&cfg, 0).unwrap();
        assert_eq!(network_to_json(&a), network_to_json(&b));
        assert!(validate(&a).unwrap().all_connected());
    }

    #[test]
    fn distinct_seeds_differ() {
        let cfg = GenConfig::default();
        let a = generate(&cfg, 1).unwrap();
        let b = generate(&cfg, 2).unwrap();
        assert_ne!(network_to_json(&a), network_to_json(&b));
    }

    #[test]
    fn zero_retry_budget_fails() {
        // relays: 0 cannot satisfy the spine, so every attempt fails
        let cfg = GenConfig { relays: 0, edges: 4, retry_budget: 3, ..GenConfig::default() };
        assert_eq!(generate(&cfg, 0).unwrap_err(), NetError::GenerationFailed(3));
    }

    #[test]
    fn path_budget_respected() {
        let cfg = GenConfig { relays: 4, edges: 12, max_paths: Some(100), ..GenConfig::default() };
        let net = generate(&cfg, 7).unwrap();
        let analysis = crate::netgraph::analyze(&net).unwrap();
        assert!(max_pair_path_count(&net, &analysis) <= 100);
    }

    #[test]
    fn layered_networks_stay_shallow() {
        let cfg = GenConfig::layered_shallow();
        for seed in 0..12u64 {
            let net = generate(&cfg, seed).unwrap();
            let analysis = crate::netgraph::analyze(&net).unwrap();
            assert!(analysis.d_max >= 1 && analysis.d_max <= 2, "seed {seed}");
            assert!(analysis.conn.all_connected());
        }
    }
}
