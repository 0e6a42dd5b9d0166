//! Unweighted MaxCut: graphs, the diagonal cost Hamiltonian and a brute-force oracle.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::hamiltonian::{Hamiltonian, MeasuredTerm, MeasurementFrame};
use crate::scalar::Real;

/// Largest node count the brute-force oracle enumerates.
pub const MAX_BRUTE_FORCE_NODES: usize = 26;

/// Simple undirected graph. Edges are stored as `(u, v)` with `u < v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    num_nodes: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(num_nodes: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut list = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(invalid(format!("self-loop on node {a}")));
            }
            let e = (a.min(b), a.max(b));
            if e.1 >= num_nodes {
                return Err(Error::Index {
                    what: "graph nodes",
                    index: e.1,
                    size: num_nodes,
                });
            }
            if !seen.insert(e) {
                return Err(invalid(format!("duplicate edge {e:?}")));
            }
            list.push(e);
        }
        Ok(Self {
            num_nodes,
            edges: list,
        })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Self::new(n, edges).expect("complete graph is simple")
    }

    pub fn cycle(n: usize) -> Self {
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle of length >= 3")
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Subgraph induced on nodes `0..k`.
    pub fn prefix(&self, k: usize) -> Self {
        Self {
            num_nodes: k,
            edges: self.edges.iter().copied().filter(|&(_, v)| v < k).collect(),
        }
    }

    /// Number of edges cut by the assignment (bit `v` of `z` is node `v`'s side).
    pub fn cut(&self, z: u64) -> usize {
        self.edges
            .iter()
            .filter(|&&(u, v)| (z >> u ^ z >> v) & 1 == 1)
            .count()
    }

    /// Edge-list text: a `# nodes N` header, then one `u v` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("# nodes {}\n", self.num_nodes);
        for (u, v) in &self.edges {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }

    /// Parses [`Graph::to_edge_list`] output. Without a `# nodes` header the
    /// node count is one more than the largest endpoint.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut declared = None;
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if let Some(rest) = line.strip_prefix('#') {
                let mut words = rest.split_whitespace();
                if words.next() == Some("nodes") {
                    let n = words
                        .next()
                        .and_then(|w| w.parse().ok())
                        .ok_or_else(|| invalid(format!("line {}: bad node header", lineno + 1)))?;
                    declared = Some(n);
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let nums: Vec<usize> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| invalid(format!("line {}: {e}", lineno + 1)))?;
            match nums.as_slice() {
                [u, v] => edges.push((*u, *v)),
                _ => return Err(invalid(format!("line {}: expected `u v`", lineno + 1))),
            }
        }
        let inferred = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
        Self::new(declared.unwrap_or(inferred), edges)
    }
}

/// G(n, p): each of the `n(n-1)/2` pairs, visited in lexicographic order,
/// is an edge with probability `p`. Node labels are generation order.
pub fn erdos_renyi<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("edge probability {p} outside [0, 1]")));
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges)
}

/// `H_C = 1/2 sum_{(u,v)} (Z_u Z_v - 1)` in one Z-basis frame; node `v` sits on
/// qubit `var_to_qubit[v]`. Its diagonal entry at read-out `z` is `-cut(z)`.
pub fn maxcut_hamiltonian_mapped<T: Real>(
    g: &Graph,
    num_qubits: usize,
    var_to_qubit: &[usize],
) -> Result<Hamiltonian<T>> {
    if var_to_qubit.len() < g.num_nodes() {
        return Err(invalid("qubit map shorter than node count"));
    }
    let half = T::lit(0.5);
    let terms = g
        .edges()
        .iter()
        .map(|&(u, v)| MeasuredTerm::sign(half, (1 << var_to_qubit[u]) | (1 << var_to_qubit[v])))
        .collect();
    let offset = -half * T::from_usize(g.edges().len()).expect("edge count fits");
    Hamiltonian::new(
        num_qubits,
        vec![MeasurementFrame::diagonal(num_qubits, terms)?],
        offset,
    )
}

/// [`maxcut_hamiltonian_mapped`] with node `v` on qubit `v`.
pub fn maxcut_hamiltonian<T: Real>(g: &Graph) -> Result<Hamiltonian<T>> {
    let id: Vec<usize> = (0..g.num_nodes()).collect();
    maxcut_hamiltonian_mapped(g, g.num_nodes().max(1), &id)
}

/// Exact MaxCut by enumeration with node 0 pinned to side 0. Returns the
/// optimum and the numerically smallest optimal assignment.
pub fn maxcut_bruteforce(g: &Graph) -> Result<(usize, u64)> {
    let n = g.num_nodes();
    if n > MAX_BRUTE_FORCE_NODES {
        return Err(Error::Capacity {
            what: "brute-force MaxCut nodes",
            value: n,
            min: 0,
            max: MAX_BRUTE_FORCE_NODES,
        });
    }
    if n <= 1 {
        return Ok((0, 0));
    }
    let mut best = (0usize, 0u64);
    for half in 0..1u64 << (n - 1) {
        let z = half << 1;
        let c = g.cut(z);
        if c > best.0 {
            best = (c, z);
        }
    }
    Ok(best)
}
