//! The sequence space `Ω = {1,…,N}^ℕ` restricted to eventually periodic
//! sequences, its ultrametric, splicing, and Bernoulli sampling.

use std::fmt;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, usage, Result};

/// Tolerance on `Σ pᵢ = 1`.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// An eventually periodic sequence `prefix ⊕ cycle^∞` of 1-based symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OmegaSeq {
    prefix: Vec<u16>,
    cycle: Vec<u16>,
}

impl OmegaSeq {
    pub fn new(prefix: Vec<u16>, cycle: Vec<u16>) -> Result<Self> {
        if cycle.is_empty() {
            return usage("cycle must be non-empty");
        }
        if prefix.iter().chain(&cycle).any(|&s| s == 0) {
            return domain("symbols are 1-based; 0 is not a symbol");
        }
        Ok(OmegaSeq { prefix, cycle })
    }

    /// The constant sequence `(s, s, s, …)`.
    pub fn constant(symbol: u16) -> Result<Self> {
        OmegaSeq::new(Vec::new(), vec![symbol])
    }

    /// Purely periodic `cycle^∞`.
    pub fn periodic(cycle: Vec<u16>) -> Result<Self> {
        OmegaSeq::new(Vec::new(), cycle)
    }

    pub fn prefix(&self) -> &[u16] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[u16] {
        &self.cycle
    }

    /// Symbol at 0-based position `k`, i.e. `ω_{k+1}`.
    #[inline]
    pub fn symbol_at(&self, k: usize) -> u16 {
        if k < self.prefix.len() {
            self.prefix[k]
        } else {
            self.cycle[(k - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// First `n` symbols.
    pub fn unfold(&self, n: usize) -> Vec<u16> {
        (0..n).map(|k| self.symbol_at(k)).collect()
    }

    pub fn max_symbol(&self) -> u16 {
        self.prefix
            .iter()
            .chain(&self.cycle)
            .copied()
            .max()
            .expect("cycle is non-empty")
    }

    /// The shifted sequence `(ω_{k+1}, ω_{k+2}, …)`.
    pub fn shift(&self, k: usize) -> OmegaSeq {
        if k <= self.prefix.len() {
            return OmegaSeq {
                prefix: self.prefix[k..].to_vec(),
                cycle: self.cycle.clone(),
            };
        }
        let r = (k - self.prefix.len()) % self.cycle.len();
        let mut cycle = self.cycle[r..].to_vec();
        cycle.extend_from_slice(&self.cycle[..r]);
        OmegaSeq {
            prefix: Vec::new(),
            cycle,
        }
    }

    /// Number of symbols after which two sequences that still agree must
    /// agree forever.
    fn horizon(&self, other: &OmegaSeq) -> usize {
        self.prefix.len() + other.prefix.len() + lcm(self.cycle.len(), other.cycle.len())
    }

    /// 1-based index of the first disagreement, or `None` for equal sequences.
    pub fn first_difference(&self, other: &OmegaSeq) -> Option<usize> {
        (0..self.horizon(other))
            .find(|&k| self.symbol_at(k) != other.symbol_at(k))
            .map(|k| k + 1)
    }

    /// Relative symbol frequencies over one period of the cycle, indexed by
    /// `symbol - 1` up to `n_symbols`.
    pub fn cycle_frequencies(&self, n_symbols: usize) -> Vec<f64> {
        let mut f = vec![0.0; n_symbols];
        for &s in &self.cycle {
            if let Some(slot) = f.get_mut(s as usize - 1) {
                *slot += 1.0;
            }
        }
        let len = self.cycle.len() as f64;
        f.iter_mut().for_each(|x| *x /= len);
        f
    }
}

impl fmt::Display for OmegaSeq {
    /// `1.2.1(2)` for prefix `(1,2,1)` followed by `2` repeated.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |s: &[u16]| s.iter().map(u16::to_string).collect::<Vec<_>>().join(".");
        write!(f, "{}({})", join(&self.prefix), join(&self.cycle))
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// `d_Ω(u, v) = 2^{-k}` where `k` is the first (1-based) index at which the
/// sequences differ; zero for equal sequences.
pub fn omega_distance(u: &OmegaSeq, v: &OmegaSeq) -> f64 {
    match u.first_difference(v) {
        None => 0.0,
        Some(k) => 0.5f64.powi(k as i32),
    }
}

/// `(ω₁,…,ω_k, u₁, u₂, …)`.
pub fn splice(omega: &OmegaSeq, k: usize, tail: &OmegaSeq) -> OmegaSeq {
    let mut prefix = omega.unfold(k);
    prefix.extend_from_slice(&tail.prefix);
    OmegaSeq {
        prefix,
        cycle: tail.cycle.clone(),
    }
}

/// A probability vector over the `N` systems.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights(Vec<f64>);

impl Weights {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return usage("probability vector is empty");
        }
        if p.iter().any(|&x| !(x.is_finite() && x >= 0.0)) {
            return domain(format!("weights must be non-negative, got {p:?}"));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return domain(format!("weights sum {sum}"));
        }
        Ok(Weights(p))
    }

    /// Unit vector `e_i` of length `n`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut p = vec![0.0; n];
        p[i] = 1.0;
        Weights(p)
    }

    /// `(p, 1 - p)`.
    pub fn pair(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return domain(format!("p must lie in [0,1], got {p}"));
        }
        Ok(Weights(vec![p, 1.0 - p]))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// i.i.d. symbol draws from a probability vector with a fixed seed.
#[derive(Debug, Clone)]
pub struct BernoulliSampler {
    weights: Weights,
    seed: u64,
}

impl BernoulliSampler {
    pub fn new(weights: Weights, seed: u64) -> Self {
        BernoulliSampler { weights, seed }
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    /// `horizon` random symbols; the last one repeats forever.
    pub fn sample_omega(&self, horizon: usize) -> Result<OmegaSeq> {
        if horizon == 0 {
            return usage("sampling horizon must be at least 1");
        }
        let dist = WeightedIndex::new(self.weights.as_slice())
            .map_err(|e| crate::Error::Domain(format!("invalid weights: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let prefix: Vec<u16> = (0..horizon)
            .map(|_| dist.sample(&mut rng) as u16 + 1)
            .collect();
        let last = *prefix.last().expect("horizon >= 1");
        OmegaSeq::new(prefix, vec![last])
    }
}
