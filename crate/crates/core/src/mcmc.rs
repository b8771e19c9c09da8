//! Glauber dynamics for the finite-`n` edge-triangle model
//! `P(G) ~ exp(n^2 (beta1 t(K2, G) + beta2 t(K3, G)^gamma))`.
//!
//! Each step picks a uniform vertex pair and sets it to "flipped" with
//! probability `sigma(Delta H)`. Adjacency rows are bitsets, so the change in
//! the triangle count is one popcount over the AND of two rows.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Exec};

/// Steps between debug-build consistency checks of the triangle count.
const RECOUNT_EVERY: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n: usize,
    pub gamma: f64,
    pub beta2: f64,
    pub a: f64,
    pub b: f64,
    pub sweeps: u64,
    pub burnin: u64,
    pub seed: u64,
    pub record_trace: bool,
}

impl SimConfig {
    pub fn beta1(&self) -> f64 {
        self.a * self.beta2 + self.b
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::Config(format!("n = {} must be >= 3", self.n)));
        }
        if !(self.gamma > 0.0) {
            return Err(Error::Config(format!("gamma = {} must be > 0", self.gamma)));
        }
        if self.sweeps <= self.burnin {
            return Err(Error::Config(format!("sweeps = {} must exceed burnin = {}", self.sweeps, self.burnin)));
        }
        if ![self.beta2, self.a, self.b].iter().all(|v| v.is_finite()) {
            return Err(Error::Config("beta2, a and b must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub sweep: u64,
    pub edge_density: f64,
    pub triangle_density: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimSummary {
    pub n: usize,
    pub mean_edge_density: f64,
    pub mean_triangle_density: f64,
    pub acceptance_rate: f64,
    pub sweeps: u64,
    pub burnin: u64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TracePoint>>,
}

/// `beta1 * 2 edges / n^2 + beta2 * (6 triangles / n^3)^gamma`.
pub fn hamiltonian(edges: u64, triangles: u64, n: usize, gamma: f64, beta1: f64, beta2: f64) -> f64 {
    let nf = n as f64;
    let e = 2.0 * edges as f64 / (nf * nf);
    let t = 6.0 * triangles as f64 / (nf * nf * nf);
    let tg = if triangles == 0 { 0.0 } else { t.powf(gamma) };
    beta1 * e + beta2 * tg
}

/// Logistic `1/(1 + exp(-d))`, evaluated without overflow.
pub fn sigmoid(d: f64) -> f64 {
    if d >= 0.0 {
        1.0 / (1.0 + (-d).exp())
    } else {
        let z = d.exp();
        z / (1.0 + z)
    }
}

/// Simple graph on `n` vertices with bitset rows and running counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    edges: u64,
    triangles: u64,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64);
        Graph { n, words, rows: vec![0; n * words], edges: 0, triangles: 0 }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> u64 {
        self.edges
    }

    pub fn triangles(&self) -> u64 {
        self.triangles
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.rows[i * self.words..(i + 1) * self.words]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.row(i)[j / 64] >> (j % 64) & 1 == 1
    }

    pub fn common_neighbours(&self, i: usize, j: usize) -> u64 {
        self.row(i).iter().zip(self.row(j)).map(|(x, y)| (x & y).count_ones() as u64).sum()
    }

    fn toggle_bits(&mut self, i: usize, j: usize) {
        self.rows[i * self.words + j / 64] ^= 1 << (j % 64);
        self.rows[j * self.words + i / 64] ^= 1 << (i % 64);
    }

    /// Flips pair `(i, j)` and updates both counts.
    pub fn flip(&mut self, i: usize, j: usize) {
        let c = self.common_neighbours(i, j);
        if self.has_edge(i, j) {
            self.edges -= 1;
            self.triangles -= c;
        } else {
            self.edges += 1;
            self.triangles += c;
        }
        self.toggle_bits(i, j);
    }

    /// Triangle count from scratch.
    pub fn recount_triangles(&self) -> u64 {
        let mut total = 0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.has_edge(i, j) {
                    total += self.common_neighbours(i, j);
                }
            }
        }
        total / 3
    }

    /// Edge set as a bitmask over pairs in lexicographic order; `n <= 11`.
    pub fn pair_mask(&self) -> u64 {
        let mut mask = 0u64;
        let mut bit = 0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.has_edge(i, j) {
                    mask |= 1 << bit;
                }
                bit += 1;
            }
        }
        mask
    }

    /// Graph whose edge set is `mask` (lexicographic pair order).
    pub fn from_pair_mask(n: usize, mask: u64) -> Self {
        let mut g = Graph::empty(n);
        let mut bit = 0;
        for i in 0..n {
            for j in i + 1..n {
                if mask >> bit & 1 == 1 {
                    g.flip(i, j);
                }
                bit += 1;
            }
        }
        g
    }
}

/// One Glauber chain; owns its graph and RNG.
#[derive(Clone, Debug)]
pub struct Chain {
    graph: Graph,
    n2: f64,
    gamma: f64,
    beta1: f64,
    beta2: f64,
    rng: ChaCha8Rng,
    steps: u64,
    flips: u64,
}

impl Chain {
    /// Chain started from a uniform random graph drawn with `seed`.
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut graph = Graph::empty(cfg.n);
        for i in 0..cfg.n {
            for j in i + 1..cfg.n {
                if rng.random_bool(0.5) {
                    graph.flip(i, j);
                }
            }
        }
        let nf = cfg.n as f64;
        Ok(Chain {
            graph,
            n2: nf * nf,
            gamma: cfg.gamma,
            beta1: cfg.beta1(),
            beta2: cfg.beta2,
            rng,
            steps: 0,
            flips: 0,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Replaces the current state; `g` must have the chain's vertex count.
    pub fn set_graph(&mut self, g: Graph) -> Result<()> {
        if g.n != self.graph.n {
            return Err(Error::Config(format!("graph has {} vertices, chain has {}", g.n, self.graph.n)));
        }
        self.graph = g;
        Ok(())
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn flips(&self) -> u64 {
        self.flips
    }

    fn energy(&self, edges: u64, triangles: u64) -> f64 {
        self.n2 * hamiltonian(edges, triangles, self.graph.n, self.gamma, self.beta1, self.beta2)
    }

    /// Probability that the chain moves from the current graph to the one with
    /// pair `(i, j)` flipped, given that pair was proposed.
    pub fn flip_probability(&self, i: usize, j: usize) -> f64 {
        let g = &self.graph;
        let c = g.common_neighbours(i, j);
        let (e2, t2) = if g.has_edge(i, j) { (g.edges - 1, g.triangles - c) } else { (g.edges + 1, g.triangles + c) };
        sigmoid(self.energy(e2, t2) - self.energy(g.edges, g.triangles))
    }

    pub fn step(&mut self) {
        let n = self.graph.n;
        let i = self.rng.random_range(0..n);
        let mut j = self.rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let p = self.flip_probability(i, j);
        if self.rng.random::<f64>() < p {
            self.graph.flip(i, j);
            self.flips += 1;
        }
        self.steps += 1;
        #[cfg(debug_assertions)]
        if self.steps.is_multiple_of(RECOUNT_EVERY) {
            assert_eq!(self.graph.triangles, self.graph.recount_triangles(), "incremental triangle count drifted");
        }
    }

    /// `n(n-1)/2` steps.
    pub fn sweep(&mut self) {
        let n = self.graph.n;
        for _ in 0..n * (n - 1) / 2 {
            self.step();
        }
    }

    pub fn edge_density(&self) -> f64 {
        2.0 * self.graph.edges as f64 / self.n2
    }

    pub fn triangle_density(&self) -> f64 {
        6.0 * self.graph.triangles as f64 / (self.n2 * self.graph.n as f64)
    }
}

/// Runs one chain for `cfg.sweeps` sweeps and averages the densities observed
/// at the end of each post-burn-in sweep.
pub fn run(cfg: &SimConfig) -> Result<SimSummary> {
    let mut chain = Chain::new(cfg)?;
    let mut trace = cfg.record_trace.then(Vec::new);
    let (mut sum_e, mut sum_t) = (0.0, 0.0);
    for sweep in 1..=cfg.sweeps {
        chain.sweep();
        let (e, t) = (chain.edge_density(), chain.triangle_density());
        if sweep > cfg.burnin {
            sum_e += e;
            sum_t += t;
        }
        if let Some(tr) = trace.as_mut() {
            tr.push(TracePoint { sweep, edge_density: e, triangle_density: t });
        }
    }
    let kept = (cfg.sweeps - cfg.burnin) as f64;
    Ok(SimSummary {
        n: cfg.n,
        mean_edge_density: sum_e / kept,
        mean_triangle_density: sum_t / kept,
        acceptance_rate: chain.flips as f64 / chain.steps.max(1) as f64,
        sweeps: cfg.sweeps,
        burnin: cfg.burnin,
        seed: cfg.seed,
        trace,
    })
}

/// Independent chains, one per config, in input order.
pub fn run_many(cfgs: &[SimConfig], exec: Exec) -> Vec<Result<SimSummary>> {
    par::map_slice(exec, cfgs, run)
}

/// Writes a trace as CSV with header `sweep,edge_density,triangle_density`.
pub fn write_trace_csv<W: Write>(trace: &[TracePoint], mut out: W) -> std::io::Result<()> {
    writeln!(out, "sweep,edge_density,triangle_density")?;
    for p in trace {
        writeln!(out, "{},{},{}", p.sweep, p.edge_density, p.triangle_density)?;
    }
    Ok(())
}

/// Exact stationary law over all labelled graphs on `n <= 6` vertices,
/// indexed by [`Graph::pair_mask`].
pub fn exact_distribution(n: usize, gamma: f64, beta1: f64, beta2: f64) -> Result<Vec<f64>> {
    if !(3..=6).contains(&n) {
        return Err(Error::Config(format!("exact enumeration supports 3 <= n <= 6, got {n}")));
    }
    let pairs = n * (n - 1) / 2;
    let nf = n as f64;
    let energies: Vec<f64> = (0..1u64 << pairs)
        .map(|mask| {
            let g = Graph::from_pair_mask(n, mask);
            nf * nf * hamiltonian(g.edges(), g.triangles(), n, gamma, beta1, beta2)
        })
        .collect();
    let top = energies.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = energies.iter().map(|h| (h - top).exp()).collect();
    let z: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / z).collect())
}
