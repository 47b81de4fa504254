//! Instance generators: the two hardness constructions (independent set
//! and two-constraint cardinality knapsack) plus a seeded random family.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::Instance;

/// Simple undirected graph given as an edge list over `0..num_vertices`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Endpoints are normalized to `u < v`; self-loops and duplicate
    /// edges are rejected.
    pub fn new(num_vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut normalized = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u == v {
                return Err(Error::InvalidArgument(format!("self-loop at vertex {u}")));
            }
            if u >= num_vertices || v >= num_vertices {
                return Err(Error::IndexOutOfRange(format!(
                    "edge ({u}, {v}) outside {num_vertices} vertices"
                )));
            }
            let e = (u.min(v), u.max(v));
            if normalized.contains(&e) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate edge ({}, {})",
                    e.0, e.1
                )));
            }
            normalized.push(e);
        }
        Ok(Self {
            num_vertices,
            edges: normalized,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Parse edge-list text: first line `n m`, then `m` lines `u v`,
    /// 1-indexed.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty graph file".into()))?;
        let mut it = header.split_whitespace();
        let n: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse("graph header: expected vertex count".into()))?;
        let m: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse("graph header: expected edge count".into()))?;
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("expected {m} edge lines")))?;
            let mut it = line.split_whitespace();
            let mut endpoint = || -> Result<usize> {
                let v: usize = it
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::Parse(format!("bad edge line: {line:?}")))?;
                if v == 0 {
                    return Err(Error::Parse("vertices are 1-indexed".into()));
                }
                Ok(v - 1)
            };
            edges.push((endpoint()?, endpoint()?));
        }
        Graph::new(n, edges)
    }
}

/// A two-constraint cardinality knapsack question: how many objects can
/// satisfy both weight budgets at once?
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoKpInstance {
    pub w1: Vec<u64>,
    pub w2: Vec<u64>,
    pub c1: u64,
    pub c2: u64,
}

impl TwoKpInstance {
    pub fn new(w1: Vec<u64>, w2: Vec<u64>, c1: u64, c2: u64) -> Result<Self> {
        if w1.len() != w2.len() {
            return Err(Error::Dimension(format!(
                "weight vectors differ in length: {} vs {}",
                w1.len(),
                w2.len()
            )));
        }
        Ok(Self { w1, w2, c1, c2 })
    }

    pub fn num_objects(&self) -> usize {
        self.w1.len()
    }

    /// Parse text: line `n`, a line of `n` first weights, a line of `n`
    /// second weights, then a line `C1 C2`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let mut next = |what: &str| -> Result<&str> {
            lines
                .next()
                .ok_or_else(|| Error::Parse(format!("expected {what}")))
        };
        let n: usize = next("object count")?
            .parse()
            .map_err(|_| Error::Parse("bad object count".into()))?;
        let row = |line: &str| -> Result<Vec<u64>> {
            let v: Vec<u64> = line
                .split_whitespace()
                .map(|s| s.parse().map_err(|_| Error::Parse(format!("bad weight {s:?}"))))
                .collect::<Result<_>>()?;
            if v.len() != n {
                return Err(Error::Parse(format!(
                    "expected {n} weights, got {}",
                    v.len()
                )));
            }
            Ok(v)
        };
        let w1 = row(next("first weight row")?)?;
        let w2 = row(next("second weight row")?)?;
        let caps = next("capacity line")?;
        let mut it = caps.split_whitespace();
        let mut cap = || -> Result<u64> {
            it.next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad capacity line: {caps:?}")))
        };
        TwoKpInstance::new(w1, w2, cap()?, cap()?)
    }
}

/// One time step per edge; the edge's endpoints get weight 1 there and
/// the capacity is 1, so a selection kept constant over time is exactly
/// an independent set. Profits are all 1 and the uniform bonus `2nm`
/// makes any decision change unaffordable. The optimal value is
/// `n(m-1) * 2nm + m * alpha(G)`.
pub fn reduce_independent_set(g: &Graph) -> Result<Instance> {
    let n = g.num_vertices();
    let m = g.edges().len();
    if m == 0 {
        return Err(Error::InvalidArgument(
            "graph has no edges; the construction needs at least one time step".into(),
        ));
    }
    let bonus = 2 * (n as u64) * (m as u64);
    let mut weights = vec![vec![0u64; n]; m];
    for (t, &(u, v)) in g.edges().iter().enumerate() {
        weights[t][u] = 1;
        weights[t][v] = 1;
    }
    Instance::new(
        vec![vec![1; n]; m],
        weights,
        vec![vec![bonus; n]; m - 1],
        vec![1; m],
    )
}

/// Two steps with the given weight vectors, unit profits, and bonus 2
/// everywhere; the optimum is `2 K* + 2n` where `K*` is the largest
/// object count satisfying both budgets simultaneously.
pub fn reduce_two_kp(kp: &TwoKpInstance) -> Result<Instance> {
    let n = kp.num_objects();
    Instance::new(
        vec![vec![1; n]; 2],
        vec![kp.w1.clone(), kp.w2.clone()],
        vec![vec![2; n]],
        vec![kp.c1, kp.c2],
    )
}

/// How per-step capacities of a random instance are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapacityRule {
    Fixed(u64),
    /// `floor(numer / denom * total step weight)`.
    Fraction { numer: u64, denom: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenParams {
    pub seed: u64,
    pub n: usize,
    pub t: usize,
    pub weight_max: u64,
    pub profit_max: u64,
    pub bonus_max: u64,
    pub capacity_rule: CapacityRule,
}

/// Reproducible random instance. The generator is ChaCha8 seeded with
/// `seed`; entries are drawn uniformly in `0..=max`, profits row by row,
/// then weights, then bonuses. The same parameters always produce the
/// same instance.
pub fn gen_random(params: &GenParams) -> Result<Instance> {
    if params.t == 0 {
        return Err(Error::InvalidArgument("t must be at least 1".into()));
    }
    if let CapacityRule::Fraction { denom: 0, .. } = params.capacity_rule {
        return Err(Error::InvalidArgument("fraction denominator is zero".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut matrix = |rows: usize, hi: u64| -> Vec<Vec<u64>> {
        (0..rows)
            .map(|_| (0..params.n).map(|_| rng.gen_range(0..=hi)).collect())
            .collect()
    };
    let profits = matrix(params.t, params.profit_max);
    let weights = matrix(params.t, params.weight_max);
    let bonuses = matrix(params.t - 1, params.bonus_max);
    let capacities = (0..params.t)
        .map(|t| match params.capacity_rule {
            CapacityRule::Fixed(c) => Ok(c),
            CapacityRule::Fraction { numer, denom } => {
                let total: u128 = weights[t].iter().map(|&w| w as u128).sum();
                u64::try_from(total * numer as u128 / denom as u128)
                    .map_err(|_| Error::Overflow("scaling capacity"))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Instance::new(profits, weights, bonuses, capacities)
}
