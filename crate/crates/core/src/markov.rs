//! Stationary Markov measures on a subshift: equilibrium chains from Perron
//! data, entropy rates, expectations of locally constant potentials, chain
//! reversal, and seeded random chains for property suites.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::Error;
use crate::numeric::Kahan;
use crate::potential::Potential;
use crate::pressure::transfer_matrix;
use crate::real::Real;
use crate::shift::{Reversal, ReversalKind, ShiftSpace, Symbol, Word};
use crate::Result;

/// A stationary Markov chain on the admissible `order`-windows of a shift
/// space. States are ordered lexicographically; `transition` is row-stochastic
/// and vanishes wherever the underlying matrix forbids the move.
#[derive(Debug, Clone)]
pub struct MarkovMeasure<R: Real> {
    order: usize,
    states: Vec<Word>,
    index: BTreeMap<Word, usize>,
    transition: Vec<R>,
    stationary: Vec<R>,
}

impl<R: Real> MarkovMeasure<R> {
    /// Builds a chain from a row-stochastic matrix on the admissible
    /// `order`-windows, computing the stationary vector by repeated squaring.
    pub fn from_transition(
        space: &ShiftSpace,
        order: usize,
        transition: Vec<R>,
    ) -> Result<Self> {
        let states = space.admissible_words(order)?;
        let dim = states.len();
        if transition.len() != dim * dim {
            return Err(Error::InvalidMarkov {
                reason: format!(
                    "transition matrix has {} entries, expected {}",
                    transition.len(),
                    dim * dim
                ),
            });
        }
        let stationary = stationary_by_squaring(&transition, dim);
        Self::assemble(space, order, states, transition, stationary)
    }

    /// Builds a chain from explicit parts and validates all invariants.
    pub fn from_parts(
        space: &ShiftSpace,
        order: usize,
        transition: Vec<R>,
        stationary: Vec<R>,
    ) -> Result<Self> {
        let states = space.admissible_words(order)?;
        Self::assemble(space, order, states, transition, stationary)
    }

    fn assemble(
        space: &ShiftSpace,
        order: usize,
        states: Vec<Word>,
        transition: Vec<R>,
        stationary: Vec<R>,
    ) -> Result<Self> {
        let index: BTreeMap<Word, usize> = states
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, w)| (w, i))
            .collect();
        let m = Self {
            order,
            states,
            index,
            transition,
            stationary,
        };
        m.validate(space)?;
        Ok(m)
    }

    fn validate(&self, space: &ShiftSpace) -> Result<()> {
        let dim = self.states.len();
        let tol = R::STOCH_TOL;
        for u in 0..dim {
            let mut row = Kahan::new();
            for v in 0..dim {
                let p = self.transition[u * dim + v];
                if p < R::zero() {
                    return Err(Error::InvalidMarkov {
                        reason: format!("negative transition at ({u},{v})"),
                    });
                }
                if p > R::zero() && !self.step_allowed(space, u, v) {
                    return Err(Error::InvalidMarkov {
                        reason: format!(
                            "transition {:?} -> {:?} is forbidden by the shift space",
                            self.states[u], self.states[v]
                        ),
                    });
                }
                row.add(p);
            }
            if (row.total() - R::one()).abs() > tol {
                return Err(Error::InvalidMarkov {
                    reason: format!("row {u} sums to {}", row.total()),
                });
            }
        }
        let mut total = Kahan::new();
        for &p in &self.stationary {
            if p < R::zero() {
                return Err(Error::InvalidMarkov {
                    reason: "negative stationary mass".into(),
                });
            }
            total.add(p);
        }
        if (total.total() - R::one()).abs() > tol {
            return Err(Error::InvalidMarkov {
                reason: format!("stationary vector sums to {}", total.total()),
            });
        }
        for v in 0..dim {
            let mut acc = Kahan::new();
            for u in 0..dim {
                acc.add(self.stationary[u] * self.transition[u * dim + v]);
            }
            if (acc.total() - self.stationary[v]).abs() > tol {
                return Err(Error::InvalidMarkov {
                    reason: format!("stationary vector is not invariant at state {v}"),
                });
            }
        }
        Ok(())
    }

    fn step_allowed(&self, space: &ShiftSpace, u: usize, v: usize) -> bool {
        let uw = &self.states[u];
        let vw = &self.states[v];
        if self.order == 1 {
            return space.allowed(uw[0], vw[0]);
        }
        uw[1..] == vw[..self.order - 1] && space.allowed(uw[self.order - 1], vw[self.order - 1])
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn states(&self) -> &[Word] {
        &self.states
    }

    pub fn stationary(&self) -> &[R] {
        &self.stationary
    }

    pub fn transition(&self, u: usize, v: usize) -> R {
        self.transition[u * self.states.len() + v]
    }

    /// Kolmogorov–Sinai entropy rate `−Σ_u π_u Σ_v P_uv log P_uv`
    /// with the convention `0·log 0 = 0`.
    pub fn entropy_rate(&self) -> R {
        let dim = self.states.len();
        let mut acc = Kahan::new();
        for u in 0..dim {
            let pu = self.stationary[u];
            if pu == R::zero() {
                continue;
            }
            for v in 0..dim {
                let p = self.transition[u * dim + v];
                if p > R::zero() {
                    acc.add(-(pu * p * p.ln()));
                }
            }
        }
        acc.total()
    }

    /// Probability of the cylinder `[w]` (word anchored anywhere, by
    /// stationarity): marginal sums for short words, exact path products for
    /// long ones.
    pub fn word_prob(&self, w: &[Symbol]) -> R {
        let m = self.order;
        let dim = self.states.len();
        if w.len() <= m {
            let mut acc = Kahan::new();
            for (i, s) in self.states.iter().enumerate() {
                if &s[..w.len()] == w {
                    acc.add(self.stationary[i]);
                }
            }
            return acc.total();
        }
        let first = match self.index.get(&w[..m].to_vec()) {
            Some(&i) => i,
            None => return R::zero(),
        };
        let mut prob = self.stationary[first];
        let mut cur = first;
        for t in 1..=(w.len() - m) {
            let next = match self.index.get(&w[t..t + m].to_vec()) {
                Some(&i) => i,
                None => return R::zero(),
            };
            prob = prob * self.transition[cur * dim + next];
            cur = next;
        }
        prob
    }

    /// Expectation of a locally constant potential under the chain:
    /// `Σ over admissible r-words of word-probability × g(word)`. Exact at
    /// any order because cylinder probabilities of a Markov chain are path
    /// products.
    pub fn mean_potential(&self, space: &ShiftSpace, g: &Potential<R>) -> Result<R> {
        let table = g.as_table().ok_or(Error::RequiresAdditive {
            got: g.variant_name(),
        })?;
        let mut acc = Kahan::new();
        for (w, val) in table.entries() {
            let p = self.word_prob(&w);
            if p > R::zero() {
                acc.add(p * val);
            }
        }
        let _ = space;
        Ok(acc.total())
    }

    /// Exact marginal-consistent lifting of the chain to a higher order:
    /// the path measure of the same process viewed on longer windows.
    pub fn refine_to_order(&self, space: &ShiftSpace, order: usize) -> Result<MarkovMeasure<R>> {
        assert!(order >= self.order, "refinement cannot lower the order");
        if order == self.order {
            return Ok(self.clone());
        }
        let states = space.admissible_words(order)?;
        let dim = states.len();
        let mut transition = vec![R::zero(); dim * dim];
        let mut stationary = vec![R::zero(); dim];
        let old_dim = self.states.len();
        for (i, s) in states.iter().enumerate() {
            stationary[i] = self.word_prob(s);
            // next-letter distribution depends on the trailing old-order window
            let tail = &s[order - self.order..];
            let tail_idx = self.index[&tail.to_vec()];
            for a in 0..space.alphabet() as Symbol {
                let mut t = s[1..].to_vec();
                t.push(a);
                if let Some(j) = states.iter().position(|x| x == &t) {
                    let mut nxt = tail[1..].to_vec();
                    nxt.push(a);
                    if let Some(&nxt_idx) = self.index.get(&nxt) {
                        transition[i * dim + j] = self.transition[tail_idx * old_dim + nxt_idx];
                    }
                }
            }
        }
        // states with zero mass may have empty rows; give them a valid
        // conditional so the matrix stays stochastic
        for i in 0..dim {
            let mut row = Kahan::new();
            for j in 0..dim {
                row.add(transition[i * dim + j]);
            }
            if row.total() == R::zero() {
                let succ: Vec<usize> = (0..dim)
                    .filter(|&j| {
                        states[i][1..] == states[j][..order - 1]
                            && space.allowed(states[i][order - 1], states[j][order - 1])
                    })
                    .collect();
                let share = R::one() / R::of_usize(succ.len());
                for j in succ {
                    transition[i * dim + j] = share;
                }
            }
        }
        MarkovMeasure::from_parts(space, order, transition, stationary)
    }

    /// The chain of `ℚ∘θ`. Time reversal reverses trajectories and permutes
    /// symbols (states map to their reversed, permuted words); commutation
    /// permutes symbols in place. An involution that preserves the entropy
    /// rate.
    pub fn reverse(&self, space: &ShiftSpace, theta: &Reversal) -> Result<MarkovMeasure<R>> {
        theta.validate(space)?;
        let dim = self.states.len();
        let conj: Vec<usize> = self
            .states
            .iter()
            .map(|s| {
                let mapped: Word = match theta.kind() {
                    ReversalKind::TimeReversal => {
                        s.iter().rev().map(|&a| theta.apply_symbol(a)).collect()
                    }
                    ReversalKind::Commutation => {
                        s.iter().map(|&a| theta.apply_symbol(a)).collect()
                    }
                };
                self.index[&mapped]
            })
            .collect();
        let mut transition = vec![R::zero(); dim * dim];
        let mut stationary = vec![R::zero(); dim];
        for u in 0..dim {
            stationary[u] = self.stationary[conj[u]];
        }
        match theta.kind() {
            ReversalKind::Commutation => {
                for u in 0..dim {
                    for v in 0..dim {
                        transition[u * dim + v] = self.transition[conj[u] * dim + conj[v]];
                    }
                }
            }
            ReversalKind::TimeReversal => {
                for u in 0..dim {
                    let pu = self.stationary[conj[u]];
                    for v in 0..dim {
                        if pu == R::zero() {
                            continue;
                        }
                        transition[u * dim + v] = self.stationary[conj[v]]
                            * self.transition[conj[v] * dim + conj[u]]
                            / pu;
                    }
                }
            }
        }
        MarkovMeasure::from_parts(space, self.order, transition, stationary)
    }

    /// JSON form: states, transition rows, stationary vector, order.
    pub fn to_json(&self) -> serde_json::Value {
        let dim = self.states.len();
        let states: Vec<String> = self
            .states
            .iter()
            .map(|w| {
                w.iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        let rows: Vec<Vec<f64>> = (0..dim)
            .map(|u| {
                (0..dim)
                    .map(|v| self.transition[u * dim + v].to_f64().unwrap_or(f64::NAN))
                    .collect()
            })
            .collect();
        let pi: Vec<f64> = self
            .stationary
            .iter()
            .map(|p| p.to_f64().unwrap_or(f64::NAN))
            .collect();
        serde_json::json!({
            "order": self.order,
            "states": states,
            "transition": rows,
            "stationary": pi,
        })
    }
}

fn stationary_by_squaring<R: Real>(transition: &[R], dim: usize) -> Vec<R> {
    // For primitive chains the rows of P^(2^k) all converge to the stationary
    // vector; 60 squarings take the spectral gap far below machine precision.
    let mut cur = transition.to_vec();
    let mut buf = vec![R::zero(); dim * dim];
    for _ in 0..60 {
        for v in buf.iter_mut() {
            *v = R::zero();
        }
        for i in 0..dim {
            for k in 0..dim {
                let c = cur[i * dim + k];
                if c == R::zero() {
                    continue;
                }
                for j in 0..dim {
                    buf[i * dim + j] += c * cur[k * dim + j];
                }
            }
        }
        // renormalize rows to damp rounding drift
        for i in 0..dim {
            let mut row = Kahan::new();
            for j in 0..dim {
                row.add(buf[i * dim + j]);
            }
            let r = row.total();
            for j in 0..dim {
                buf[i * dim + j] = buf[i * dim + j] / r;
            }
        }
        std::mem::swap(&mut cur, &mut buf);
    }
    // average the rows (they agree to machine precision for primitive chains)
    let mut pi = vec![R::zero(); dim];
    for (j, p) in pi.iter_mut().enumerate() {
        let mut acc = Kahan::new();
        for i in 0..dim {
            acc.add(cur[i * dim + j]);
        }
        *p = acc.total() / R::of_usize(dim);
    }
    let mut total = Kahan::new();
    for &p in &pi {
        total.add(p);
    }
    let t = total.total();
    for p in pi.iter_mut() {
        *p = *p / t;
    }
    pi
}

/// The unique equilibrium chain of a locally constant potential, built from
/// the Perron data of its transfer matrix: `P_uv = L_uv·r_v/(λ·r_u)` and
/// `π_u ∝ l_u·r_u`.
pub fn equilibrium_markov<R: Real>(
    space: &ShiftSpace,
    g: &Potential<R>,
) -> Result<MarkovMeasure<R>> {
    let l = transfer_matrix(space, g)?;
    let (lambda, right, left) = l.perron()?;
    let dim = l.dim;
    let mut transition = vec![R::zero(); dim * dim];
    for u in 0..dim {
        for v in 0..dim {
            transition[u * dim + v] = l.entry(u, v) * right[v] / (lambda * right[u]);
        }
    }
    let mut stationary = vec![R::zero(); dim];
    let mut total = Kahan::new();
    for i in 0..dim {
        stationary[i] = left[i] * right[i];
        total.add(stationary[i]);
    }
    let t = total.total();
    for p in stationary.iter_mut() {
        *p = *p / t;
    }
    let order = l.states[0].len();
    MarkovMeasure::from_parts(space, order, transition, stationary)
}

/// A seeded random chain: i.i.d. uniform(0.1, 1) weights on the admissible
/// transitions of the `order`-window graph, rows normalized. Weights are
/// bounded away from zero so the chain has full support.
pub fn random_markov<R: Real, G: Rng>(
    space: &ShiftSpace,
    order: usize,
    rng: &mut G,
) -> Result<MarkovMeasure<R>> {
    let states = space.admissible_words(order)?;
    let dim = states.len();
    let mut transition = vec![R::zero(); dim * dim];
    for u in 0..dim {
        let mut row = Kahan::new();
        for v in 0..dim {
            let allowed = if order == 1 {
                space.allowed(states[u][0], states[v][0])
            } else {
                states[u][1..] == states[v][..order - 1]
                    && space.allowed(states[u][order - 1], states[v][order - 1])
            };
            if allowed {
                let w = R::of(rng.gen_range(0.1..1.0));
                transition[u * dim + v] = w;
                row.add(w);
            }
        }
        let r = row.total();
        for v in 0..dim {
            transition[u * dim + v] = transition[u * dim + v] / r;
        }
    }
    MarkovMeasure::from_transition(space, order, transition)
}
