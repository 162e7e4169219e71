use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from;

/// Undirected scale-free graph grown by preferential attachment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SocialNetwork {
    pub n: usize,
    pub m0: usize,
    pub m: usize,
    pub seed: u64,
    adjacency: Vec<Vec<u32>>,
    edge_count: usize,
}

impl SocialNetwork {
    /// Graph from an explicit undirected edge list; `m0` and `m` are left 0.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(Error::param(format!("invalid edge ({a}, {b}) for {n} nodes")));
            }
            if adjacency[a].contains(&(b as u32)) {
                return Err(Error::param(format!("duplicate edge ({a}, {b})")));
            }
            adjacency[a].push(b as u32);
            adjacency[b].push(a as u32);
        }
        Ok(SocialNetwork {
            n,
            m0: 0,
            m: 0,
            seed: 0,
            adjacency,
            edge_count: edges.len(),
        })
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Breadth-first reachability from node 0.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut queue = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop() {
            for &u in &self.adjacency[v] {
                let u = u as usize;
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    queue.push(u);
                }
            }
        }
        count == self.n
    }
}

/// Expected edge count: a complete seed graph plus `m` edges per later node.
pub fn ba_edge_count(n: usize, m0: usize, m: usize) -> usize {
    m0 * (m0 - 1) / 2 + m * (n - m0)
}

/// Barabási–Albert graph: start from the complete graph on `m0` nodes, then
/// attach each new node to `m` distinct existing nodes chosen with
/// probability proportional to their degree.
pub fn generate_ba_network(n: usize, m0: usize, m: usize, seed: u64) -> Result<SocialNetwork> {
    if m == 0 {
        return Err(Error::param("BA attachment count m must be >= 1"));
    }
    if m > m0 {
        return Err(Error::param(format!("BA requires m <= m0, got m={m}, m0={m0}")));
    }
    if n < m0 {
        return Err(Error::param(format!("BA requires N >= m0, got N={n}, m0={m0}")));
    }
    if n > u32::MAX as usize {
        return Err(Error::param("agent count exceeds u32 range"));
    }
    let mut rng = rng_from(&[seed, 0xBA]);
    let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); n];
    // Every edge endpoint appears once here, so a uniform draw from it is a
    // degree-proportional draw over nodes.
    let mut endpoints: Vec<u32> = Vec::with_capacity(2 * ba_edge_count(n, m0, m));
    let mut edge_count = 0;

    for a in 0..m0 {
        for b in (a + 1)..m0 {
            adjacency[a].push(b as u32);
            adjacency[b].push(a as u32);
            endpoints.push(a as u32);
            endpoints.push(b as u32);
            edge_count += 1;
        }
    }

    let mut targets: Vec<u32> = Vec::with_capacity(m);
    for v in m0..n {
        targets.clear();
        while targets.len() < m {
            let t = if endpoints.is_empty() {
                // Single-node seed has no edges yet.
                rng.random_range(0..v) as u32
            } else {
                endpoints[rng.random_range(0..endpoints.len())]
            };
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            adjacency[v].push(t);
            adjacency[t as usize].push(v as u32);
            endpoints.push(t);
            endpoints.push(v as u32);
            edge_count += 1;
        }
    }

    Ok(SocialNetwork {
        n,
        m0,
        m,
        seed,
        adjacency,
        edge_count,
    })
}

/// Least-squares slope of log CCDF against log degree, over degrees >= `k_min`.
pub fn ccdf_loglog_slope(degrees: &[usize], k_min: usize) -> Option<f64> {
    let n = degrees.len() as f64;
    let mut sorted: Vec<usize> = degrees.iter().copied().filter(|&d| d >= k_min.max(1)).collect();
    sorted.sort_unstable();
    sorted.dedup();
    let points: Vec<(f64, f64)> = sorted
        .iter()
        .map(|&k| {
            let tail = degrees.iter().filter(|&&d| d >= k).count() as f64;
            ((k as f64).ln(), (tail / n).ln())
        })
        .collect();
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / points.len() as f64;
    let my = points.iter().map(|p| p.1).sum::<f64>() / points.len() as f64;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_seed_only() {
        let g = generate_ba_network(5, 5, 3, 1).unwrap();
        assert_eq!(g.edge_count(), 10);
        assert!(g.degrees().iter().all(|&d| d == 4));
    }

    #[test]
    fn edge_count_identity() {
        let g = generate_ba_network(100, 5, 3, 9).unwrap();
        assert_eq!(g.edge_count(), 295);
        assert_eq!(g.degrees().iter().sum::<usize>(), 2 * 295);
        assert!(g.is_connected());
    }

    #[test]
    fn no_self_loops_or_duplicates() {
        let g = generate_ba_network(300, 4, 4, 3).unwrap();
        for v in 0..g.len() {
            let mut nb: Vec<u32> = g.neighbors(v).to_vec();
            assert!(!nb.contains(&(v as u32)));
            nb.sort_unstable();
            let before = nb.len();
            nb.dedup();
            assert_eq!(before, nb.len());
        }
    }

    #[test]
    fn invalid_parameters() {
        assert!(generate_ba_network(10, 3, 4, 0).is_err());
        assert!(generate_ba_network(2, 3, 2, 0).is_err());
        assert!(generate_ba_network(10, 3, 0, 0).is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let a = generate_ba_network(200, 5, 3, 42).unwrap();
        let b = generate_ba_network(200, 5, 3, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_node_seed_grows() {
        let g = generate_ba_network(20, 1, 1, 5).unwrap();
        assert_eq!(g.edge_count(), 19);
        assert!(g.is_connected());
    }
}
