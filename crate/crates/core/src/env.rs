//! The 4-symbol classical Markov-chain environment.
//!
//! The transition matrix is column-stochastic, `T[i][j]` being the
//! probability of moving from symbol `j` to symbol `i`:
//!
//! ```text
//!     | p0   p0   p0   p0 |
//! T = | p    p+D  p-D  p  |        D = delta
//!     | p    p-D  p+D  p  |
//!     | r    r    r    r  |
//! ```
//!
//! with stationary vector `(p0, p, p, r)`. A window of sites carries the
//! chain-rule probability `p(i_1) T[i_2][i_1] ... T[i_n][i_{n-1}]`.

use crate::{Error, Real, Result};

/// Number of chain symbols.
pub const SYMBOLS: usize = 4;

/// Parameters of the transition matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainParams<T> {
    pub p0: T,
    pub p: T,
    pub r: T,
    pub delta: T,
}

impl<T: Real> ChainParams<T> {
    /// Validates `0 <= delta <= p <= 1/2`, non-negativity and
    /// `p0 + 2p + r = 1`, naming the first violated constraint.
    pub fn new(p0: T, p: T, r: T, delta: T) -> Result<Self> {
        let tol = T::tol_validate();
        if p0 < -tol {
            return Err(Error::Constraint(format!("p0 >= 0 violated: p0 = {p0}")));
        }
        if r < -tol {
            return Err(Error::Constraint(format!("r >= 0 violated: r = {r}")));
        }
        if delta < -tol {
            return Err(Error::Constraint(format!(
                "delta >= 0 violated: delta = {delta}"
            )));
        }
        if delta > p + tol {
            return Err(Error::Constraint(format!(
                "delta <= p violated: delta = {delta}, p = {p}"
            )));
        }
        if p > T::of(0.5) + tol {
            return Err(Error::Constraint(format!("p <= 1/2 violated: p = {p}")));
        }
        let sum = p0 + p + p + r;
        if (sum - T::one()).abs() > tol {
            return Err(Error::Constraint(format!(
                "p0 + 2p + r = 1 violated: sum = {sum}"
            )));
        }
        Ok(Self { p0, p, r, delta })
    }

    /// Fills in `p0 = 1 - 2p - r`.
    pub fn closed(p: T, r: T, delta: T) -> Result<Self> {
        Self::new(T::one() - p - p - r, p, r, delta)
    }

    /// Correlation ratio `Q = delta / p`.
    pub fn q(&self) -> T {
        self.delta / self.p
    }

    /// `alpha = 1 - 2(p + r)`.
    pub fn alpha(&self) -> T {
        T::one() - T::of(2.0) * (self.p + self.r)
    }

    /// `beta = sqrt(alpha^2 + 16 p delta)`.
    pub fn beta(&self) -> T {
        (self.alpha().powi(2) + T::of(16.0) * self.p * self.delta).sqrt()
    }
}

/// The chain: transition matrix plus stationary vector.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovChainEnv<T> {
    params: ChainParams<T>,
    transition: [[T; 4]; 4],
    stationary: [T; 4],
}

/// Assembles the chain from validated parameters and verifies stationarity.
pub fn build_chain<T: Real>(params: ChainParams<T>) -> Result<MarkovChainEnv<T>> {
    MarkovChainEnv::new(params)
}

impl<T: Real> MarkovChainEnv<T> {
    pub fn new(params: ChainParams<T>) -> Result<Self> {
        let ChainParams { p0, p, r, delta } = params;
        let transition = [
            [p0, p0, p0, p0],
            [p, p + delta, p - delta, p],
            [p, p - delta, p + delta, p],
            [r, r, r, r],
        ];
        let stationary = [p0, p, p, r];
        let env = Self {
            params,
            transition,
            stationary,
        };
        env.check_residuals()?;
        Ok(env)
    }

    fn check_residuals(&self) -> Result<()> {
        let tol = T::tol_validate();
        for j in 0..SYMBOLS {
            let col: T = (0..SYMBOLS).map(|i| self.transition[i][j]).sum();
            if (col - T::one()).abs() > tol {
                return Err(Error::NotStochastic(format!("column {j} sums to {col}")));
            }
        }
        for i in 0..SYMBOLS {
            let row: T = (0..SYMBOLS)
                .map(|j| self.transition[i][j] * self.stationary[j])
                .sum();
            if (row - self.stationary[i]).abs() > tol {
                return Err(Error::Constraint(format!(
                    "stationarity residual {} at component {i}",
                    row - self.stationary[i]
                )));
            }
        }
        Ok(())
    }

    pub fn params(&self) -> ChainParams<T> {
        self.params
    }

    /// `T[to][from]`.
    pub fn transition(&self, to: usize, from: usize) -> T {
        self.transition[to][from]
    }

    pub fn stationary(&self) -> [T; 4] {
        self.stationary
    }

    /// Chain-rule probability of a symbol window, first symbol weighted by
    /// the stationary law.
    pub fn path_probability(&self, symbols: &[u8]) -> Result<T> {
        let Some((&first, rest)) = symbols.split_first() else {
            return Err(Error::Constraint("empty symbol sequence".into()));
        };
        let mut prob = self.stationary[check_symbol(first)?];
        let mut prev = first as usize;
        for &s in rest {
            let next = check_symbol(s)?;
            prob = prob * self.transition[next][prev];
            prev = next;
        }
        Ok(prob)
    }

    /// Enumerates all length-`n` windows with probability above
    /// `prune_below`, depth-first in lexicographic symbol order.
    ///
    /// The discarded mass is reported so downstream sums can bound their
    /// error. Without pruning the horizon is capped at `n = 12`.
    pub fn enumerate_paths(&self, n: usize, prune_below: T) -> Result<PathEnumeration<T>> {
        if n == 0 {
            return Err(Error::Constraint("empty symbol sequence".into()));
        }
        if prune_below <= T::zero() && n > 12 {
            return Err(Error::PathBlowup {
                paths: (SYMBOLS as u128).pow(n as u32),
            });
        }
        let mut out = PathEnumeration {
            paths: Vec::new(),
            pruned_mass: T::zero(),
        };
        let mut stack = Vec::with_capacity(n);
        for s in 0..SYMBOLS {
            self.descend(s, self.stationary[s], n, prune_below, &mut stack, &mut out);
        }
        Ok(out)
    }

    fn descend(
        &self,
        symbol: usize,
        prob: T,
        n: usize,
        prune_below: T,
        stack: &mut Vec<u8>,
        out: &mut PathEnumeration<T>,
    ) {
        if prob <= prune_below {
            if prob > T::zero() {
                out.pruned_mass = out.pruned_mass + prob;
            }
            return;
        }
        stack.push(symbol as u8);
        if stack.len() == n {
            out.paths.push(Path {
                symbols: stack.clone(),
                probability: prob,
            });
        } else {
            for next in 0..SYMBOLS {
                self.descend(
                    next,
                    prob * self.transition[next][symbol],
                    n,
                    prune_below,
                    stack,
                    out,
                );
            }
        }
        stack.pop();
    }
}

fn check_symbol(s: u8) -> Result<usize> {
    if (s as usize) < SYMBOLS {
        Ok(s as usize)
    } else {
        Err(Error::SymbolOutOfRange(s))
    }
}

/// A symbol window together with its chain probability.
#[derive(Clone, Debug, PartialEq)]
pub struct Path<T> {
    pub symbols: Vec<u8>,
    pub probability: T,
}

/// Result of a window enumeration.
#[derive(Clone, Debug)]
pub struct PathEnumeration<T> {
    pub paths: Vec<Path<T>>,
    /// Total probability of the discarded branches.
    pub pruned_mass: T,
}

impl<T: Real> PathEnumeration<T> {
    pub fn total_mass(&self) -> T {
        self.paths.iter().map(|p| p.probability).sum()
    }
}

/// Mutual information between two successive chain sites, natural-log units:
/// `4 p^2 (log 2 - h((1 + Q)/2))` with `h` the binary entropy and `Q = delta/p`.
pub fn neighbor_mutual_information<T: Real>(params: &ChainParams<T>) -> Result<T> {
    if params.p <= T::zero() {
        return Err(Error::Constraint("p > 0 required".into()));
    }
    let q = params.q();
    if q > T::one() + T::tol_validate() {
        return Err(Error::Constraint(format!("Q = {q} exceeds 1")));
    }
    let four = T::of(4.0);
    let half = T::of(0.5);
    let x = (T::one() + q.min(T::one())) * half;
    Ok(four * params.p * params.p * (T::of(2.0).ln() - binary_entropy(x)))
}

/// `h(x) = -x log x - (1-x) log(1-x)` with `0 log 0 := 0`.
pub fn binary_entropy<T: Real>(x: T) -> T {
    let mut h = T::zero();
    if x > T::zero() {
        h = h - x * x.ln();
    }
    let y = T::one() - x;
    if y > T::zero() {
        h = h - y * y.ln();
    }
    h
}
