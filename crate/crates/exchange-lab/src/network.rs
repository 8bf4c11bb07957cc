//! Random networks with uniformly distributed degrees.
//!
//! Assigned degrees are sampled i.i.d. from `{1, ..., k_max}`. Wiring is
//! stub matching with a small retry budget: agents are processed in index
//! order, and every unfilled stub draws a bounded number of uniform
//! candidates; an agent whose stub runs out of draws stops looking for
//! partners. Realized degrees therefore fall slightly short of assigned
//! degrees — that shortfall is part of the model, and the realized mean
//! degree is reported alongside the adjacency lists.

use std::collections::BTreeMap;
use std::io::{self, Write};

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetworkError {
    #[error("population needs at least 2 agents, got {0}")]
    TooFewAgents(usize),
    #[error("degree bound must satisfy 1 <= k_max <= n - 1, got k_max = {k_max} for n = {n}")]
    DegreeBoundOutOfRange { k_max: u32, n: usize },
}

/// Agent adjacency. The all-to-all variant stores no lists; degree and
/// link-count queries are answered arithmetically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Topology {
    FullyConnected { n: usize },
    Sparse { neighbors: Vec<Vec<u32>> },
}

impl Topology {
    pub fn n(&self) -> usize {
        match self {
            Topology::FullyConnected { n } => *n,
            Topology::Sparse { neighbors } => neighbors.len(),
        }
    }

    pub fn degree(&self, i: usize) -> usize {
        match self {
            Topology::FullyConnected { n } => n - 1,
            Topology::Sparse { neighbors } => neighbors[i].len(),
        }
    }

    pub fn link_count(&self) -> u64 {
        match self {
            Topology::FullyConnected { n } => (*n as u64) * (*n as u64 - 1) / 2,
            Topology::Sparse { neighbors } => {
                let stubs: u64 = neighbors.iter().map(|v| v.len() as u64).sum();
                stubs / 2
            }
        }
    }

    pub fn mean_degree(&self) -> f64 {
        2.0 * self.link_count() as f64 / self.n() as f64
    }

    /// All links as `(i, j)` with `i < j`, lexicographically sorted.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        match self {
            Topology::FullyConnected { n } => {
                let mut out = Vec::with_capacity(n * (n - 1) / 2);
                for i in 0..*n as u32 {
                    for j in (i + 1)..*n as u32 {
                        out.push((i, j));
                    }
                }
                out
            }
            Topology::Sparse { neighbors } => {
                let mut out = Vec::new();
                for (i, nb) in neighbors.iter().enumerate() {
                    for &j in nb {
                        if (i as u32) < j {
                            out.push((i as u32, j));
                        }
                    }
                }
                out.sort_unstable();
                out
            }
        }
    }
}

pub fn fully_connected(n: usize) -> Result<Topology, NetworkError> {
    if n < 2 {
        return Err(NetworkError::TooFewAgents(n));
    }
    Ok(Topology::FullyConnected { n })
}

/// Draw assigned degrees i.i.d. uniform on `{1, ..., k_max}`.
pub fn sample_degrees(n: usize, k_max: u32, rng: &mut impl Rng) -> Result<Vec<u32>, NetworkError> {
    if n < 2 {
        return Err(NetworkError::TooFewAgents(n));
    }
    if k_max < 1 || k_max as usize > n - 1 {
        return Err(NetworkError::DegreeBoundOutOfRange { k_max, n });
    }
    Ok((0..n).map(|_| rng.gen_range(1..=k_max)).collect())
}

/// A wired draw: adjacency plus bookkeeping on how complete the stub
/// matching was.
#[derive(Debug, Clone)]
pub struct Wiring {
    pub topology: Topology,
    pub assigned: Vec<u32>,
    pub abandoned_stubs: u64,
}

impl Wiring {
    pub fn realized_mean_degree(&self) -> f64 {
        self.topology.mean_degree()
    }
}

/// Draws each unfilled stub gets before its agent gives up wiring.
const STUB_DRAWS: usize = 15;

/// Wire agents toward their assigned degrees.
///
/// Agents are processed in index order; links formed while wiring earlier
/// agents count toward both endpoints' quotas. Each still-unfilled stub of
/// agent `i` draws up to [`STUB_DRAWS`] uniform candidates; candidate `j`
/// is accepted when it is not `i`, not already a neighbor of `i`, and
/// still below its own assigned degree. When a stub exhausts its draws the
/// agent stops looking for partners and its remaining quota is dropped,
/// though later agents may still wire into it; `abandoned_stubs` counts
/// the stubs left unfilled at the end. Links are undirected and stored on
/// both endpoints, sorted.
pub fn wire(assigned: &[u32], rng: &mut impl Rng) -> Wiring {
    let n = assigned.len();
    debug_assert!(assigned.iter().all(|&k| (k as usize) < n.max(1)));
    let mut neighbors: Vec<Vec<u32>> = vec![Vec::new(); n];
    for i in 0..n {
        'stubs: while neighbors[i].len() < assigned[i] as usize {
            for _ in 0..STUB_DRAWS {
                let j = rng.gen_range(0..n);
                if j == i || neighbors[i].contains(&(j as u32)) {
                    continue;
                }
                if neighbors[j].len() < assigned[j] as usize {
                    neighbors[i].push(j as u32);
                    neighbors[j].push(i as u32);
                    continue 'stubs;
                }
            }
            break; // this stub found no partner: the agent gives up
        }
    }
    let abandoned = assigned
        .iter()
        .zip(&neighbors)
        .map(|(&quota, list)| quota as u64 - list.len() as u64)
        .sum();
    for list in &mut neighbors {
        list.sort_unstable();
    }
    Wiring {
        topology: Topology::Sparse { neighbors },
        assigned: assigned.to_vec(),
        abandoned_stubs: abandoned,
    }
}

/// Connected-component sizes, largest first.
pub fn component_sizes(top: &Topology) -> Vec<usize> {
    match top {
        Topology::FullyConnected { n } => vec![*n],
        Topology::Sparse { neighbors } => {
            let n = neighbors.len();
            let mut seen = vec![false; n];
            let mut sizes = Vec::new();
            let mut stack = Vec::new();
            for start in 0..n {
                if seen[start] {
                    continue;
                }
                seen[start] = true;
                stack.push(start);
                let mut size = 0usize;
                while let Some(v) = stack.pop() {
                    size += 1;
                    for &u in &neighbors[v] {
                        if !seen[u as usize] {
                            seen[u as usize] = true;
                            stack.push(u as usize);
                        }
                    }
                }
                sizes.push(size);
            }
            sizes.sort_unstable_by(|a, b| b.cmp(a));
            sizes
        }
    }
}

/// Count components by size.
pub fn size_counts(sizes: &[usize]) -> BTreeMap<usize, u64> {
    let mut counts = BTreeMap::new();
    for &s in sizes {
        *counts.entry(s).or_insert(0) += 1;
    }
    counts
}

/// Empirical component-size distribution over non-isolated components:
/// the fraction of components of each size `s >= 2`. Sums to 1 whenever any
/// component with at least two agents exists.
pub fn size_frequency(counts: &BTreeMap<usize, u64>) -> BTreeMap<usize, f64> {
    let total: u64 = counts.iter().filter(|(&s, _)| s >= 2).map(|(_, &c)| c).sum();
    let mut freq = BTreeMap::new();
    if total == 0 {
        return freq;
    }
    for (&s, &c) in counts.iter().filter(|(&s, _)| s >= 2) {
        freq.insert(s, c as f64 / total as f64);
    }
    freq
}

/// Write one `i j` pair per line, 0-based, `i < j`, sorted.
pub fn write_edge_list(top: &Topology, out: &mut impl Write) -> io::Result<()> {
    for (i, j) in top.edges() {
        writeln!(out, "{i} {j}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn rejects_degenerate_inputs() {
        let mut rng = stream_rng(0, 0);
        assert_eq!(
            sample_degrees(1, 1, &mut rng).unwrap_err(),
            NetworkError::TooFewAgents(1)
        );
        assert_eq!(
            sample_degrees(10, 0, &mut rng).unwrap_err(),
            NetworkError::DegreeBoundOutOfRange { k_max: 0, n: 10 }
        );
        assert_eq!(
            sample_degrees(10, 10, &mut rng).unwrap_err(),
            NetworkError::DegreeBoundOutOfRange { k_max: 10, n: 10 }
        );
        assert_eq!(fully_connected(1).unwrap_err(), NetworkError::TooFewAgents(1));
    }

    #[test]
    fn degrees_stay_in_bounds() {
        let mut rng = stream_rng(1, 0);
        let ks = sample_degrees(10_000, 20, &mut rng).unwrap();
        assert!(ks.iter().all(|&k| (1..=20).contains(&k)));
    }

    #[test]
    fn degree_sample_moments_match_uniform_law() {
        // Exact moments of the uniform law on {1..k_max}, by direct sum.
        let k_max = 20u32;
        let vals: Vec<f64> = (1..=k_max).map(f64::from).collect();
        let mean_exact: f64 = vals.iter().sum::<f64>() / vals.len() as f64;
        let var_exact: f64 =
            vals.iter().map(|v| (v - mean_exact).powi(2)).sum::<f64>() / vals.len() as f64;
        assert!((mean_exact - 10.5).abs() < 1e-12);
        assert!((var_exact - (20f64 * 20.0 - 1.0) / 12.0).abs() < 1e-12);

        let n = 500usize;
        let mut rng = stream_rng(7, 0);
        let ks = sample_degrees(n, k_max, &mut rng).unwrap();
        let mean = ks.iter().map(|&k| k as f64).sum::<f64>() / n as f64;
        let three_sigma = 3.0 * (var_exact / n as f64).sqrt();
        assert!(
            (mean - mean_exact).abs() < three_sigma,
            "sample mean {mean} outside {three_sigma} of {mean_exact}"
        );
    }

    #[test]
    fn two_agents_one_stub_each_wire_together() {
        let mut rng = stream_rng(3, 0);
        let w = wire(&[1, 1], &mut rng);
        assert_eq!(w.topology.edges(), vec![(0, 1)]);
        assert_eq!(w.abandoned_stubs, 0);
        assert_eq!(w.realized_mean_degree(), 1.0);
    }

    #[test]
    fn wiring_respects_quotas_and_symmetry() {
        for seed in 0..20 {
            let mut rng = stream_rng(seed, 0);
            let assigned = sample_degrees(200, 4, &mut rng).unwrap();
            let w = wire(&assigned, &mut rng);
            let Topology::Sparse { neighbors } = &w.topology else {
                panic!("wire must produce explicit lists")
            };
            for (i, nb) in neighbors.iter().enumerate() {
                assert!(nb.len() <= assigned[i] as usize, "agent {i} over quota");
                let mut sorted = nb.clone();
                sorted.dedup();
                assert_eq!(sorted.len(), nb.len(), "duplicate link at agent {i}");
                assert!(!nb.contains(&(i as u32)), "self-link at agent {i}");
                for &j in nb {
                    assert!(
                        neighbors[j as usize].contains(&(i as u32)),
                        "asymmetric link {i}-{j}"
                    );
                }
            }
            // Stub accounting, cross-checked through the edge extraction:
            // every assigned stub is either half of a link or left over.
            let realized = 2 * w.topology.edges().len() as u64;
            let assigned_total: u64 = assigned.iter().map(|&k| k as u64).sum();
            assert_eq!(realized + w.abandoned_stubs, assigned_total);
        }
    }

    #[test]
    fn realized_mean_degree_tracks_assigned_mean_loosely() {
        // With k_max = 2 the assigned mean is 1.5; abandonment trims a few
        // percent. The tight ensemble values are pinned in the acceptance
        // suite; this is a cheap smoke band.
        let mut mean = 0.0;
        let wirings = 20;
        for s in 0..wirings {
            let mut rng = stream_rng(11, s);
            let assigned = sample_degrees(500, 2, &mut rng).unwrap();
            mean += wire(&assigned, &mut rng).realized_mean_degree();
        }
        mean /= wirings as f64;
        assert!((1.3..1.55).contains(&mean), "mean degree {mean}");
    }

    #[test]
    fn component_sizes_sum_to_n() {
        let mut rng = stream_rng(5, 0);
        let assigned = sample_degrees(300, 3, &mut rng).unwrap();
        let w = wire(&assigned, &mut rng);
        let sizes = component_sizes(&w.topology);
        assert_eq!(sizes.iter().sum::<usize>(), 300);
        assert!(sizes.windows(2).all(|p| p[0] >= p[1]), "sizes sorted desc");
    }

    #[test]
    fn components_of_known_graphs() {
        assert_eq!(component_sizes(&fully_connected(500).unwrap()), vec![500]);
        // Path 0-1-2 plus isolated 3 plus pair 4-5.
        let top = Topology::Sparse {
            neighbors: vec![vec![1], vec![0, 2], vec![1], vec![], vec![5], vec![4]],
        };
        assert_eq!(component_sizes(&top), vec![3, 2, 1]);
        let counts = size_counts(&component_sizes(&top));
        assert_eq!(counts.get(&1), Some(&1));
        assert_eq!(counts.get(&2), Some(&1));
        assert_eq!(counts.get(&3), Some(&1));
        let freq = size_frequency(&counts);
        assert_eq!(freq.get(&1), None, "isolated agents excluded");
        assert!((freq[&2] - 0.5).abs() < 1e-15);
        assert!((freq[&3] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn edge_list_is_sorted_half_open() {
        let top = Topology::Sparse {
            neighbors: vec![vec![2, 1], vec![0], vec![0]],
        };
        let mut buf = Vec::new();
        write_edge_list(&top, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0 1\n0 2\n");
    }
}
