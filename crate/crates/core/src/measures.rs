//! Periodic-orbit Gibbs measures, block empirical measures, the level-2 rate
//! function and weak Gibbs diagnostics.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::markov::MarkovMeasure;
use crate::numeric::{Kahan, StreamLse};
use crate::potential::Potential;
use crate::real::Real;
use crate::shift::{PeriodicWord, Reversal, ShiftSpace, Symbol, Word};
use crate::Result;

/// The measure `ℙₙ`: point masses on Mₙ with weights proportional to
/// `exp(Gₙ)`. Atoms are stored in lexicographic (enumeration) order together
/// with their log-weights relative to `log_z`.
#[derive(Debug, Clone)]
pub struct PofpMeasure<R: Real> {
    pub n: usize,
    /// `(word, normalized weight, log of unnormalized weight)` per atom.
    atoms: Vec<(PeriodicWord, R, R)>,
    pub log_z: R,
}

impl<R: Real> PofpMeasure<R> {
    pub fn atoms(&self) -> impl Iterator<Item = (&PeriodicWord, R)> {
        self.atoms.iter().map(|(w, p, _)| (w, *p))
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn weight_of(&self, w: &PeriodicWord) -> Option<R> {
        self.atoms
            .binary_search_by(|(a, _, _)| a.cmp(w))
            .ok()
            .map(|i| self.atoms[i].1)
    }

    pub fn total_weight(&self) -> R {
        let mut acc = Kahan::new();
        for (_, p, _) in &self.atoms {
            acc.add(*p);
        }
        acc.total()
    }
}

/// Builds `ℙₙ` for a potential. Weights are normalized against the streaming
/// log-sum-exp of the Birkhoff values.
pub fn pofp_measure<R: Real>(
    space: &ShiftSpace,
    g: &Potential<R>,
    n: usize,
) -> Result<PofpMeasure<R>> {
    let mut raw: Vec<(PeriodicWord, R)> = Vec::new();
    let mut lse = StreamLse::new();
    let mut err: Option<Error> = None;
    space.for_each_periodic(n, |letters| {
        if err.is_some() {
            return;
        }
        let w = PeriodicWord::new(letters.to_vec());
        match g.birkhoff(&w) {
            Ok(v) => {
                lse.push(v);
                raw.push((w, v));
            }
            Err(e) => err = Some(e),
        }
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    if raw.is_empty() {
        return Err(Error::EmptyPeriodicSet { n });
    }
    let log_z = lse.value();
    let atoms = raw
        .into_iter()
        .map(|(w, v)| (w, (v - log_z).exp(), v))
        .collect();
    Ok(PofpMeasure { n, atoms, log_z })
}

/// Empirical measure of a periodic orbit projected to k-blocks: each of the
/// n rotations contributes mass 1/n to its leading k-window. Counts are kept
/// as integers so that equal empirical measures compare exactly.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BlockEmpirical {
    pub block_length: usize,
    pub orbit_period: usize,
    counts: Vec<(Word, usize)>,
}

impl BlockEmpirical {
    pub fn counts(&self) -> &[(Word, usize)] {
        &self.counts
    }

    pub fn frequency<R: Real>(&self, w: &[Symbol]) -> R {
        for (word, c) in &self.counts {
            if word.as_slice() == w {
                return R::of_usize(*c) / R::of_usize(self.orbit_period);
            }
        }
        R::zero()
    }

    /// Left and right (k−1)-marginals; they agree for empirical measures of
    /// periodic words (shift consistency), exactly as integer counts.
    pub fn marginals(&self) -> (BTreeMap<Word, usize>, BTreeMap<Word, usize>) {
        let mut left: BTreeMap<Word, usize> = BTreeMap::new();
        let mut right: BTreeMap<Word, usize> = BTreeMap::new();
        for (w, c) in &self.counts {
            if !w.is_empty() {
                *left.entry(w[..w.len() - 1].to_vec()).or_insert(0) += c;
                *right.entry(w[1..].to_vec()).or_insert(0) += c;
            }
        }
        (left, right)
    }
}

/// The empirical measure of `w` on cyclic k-windows.
pub fn block_empirical(w: &PeriodicWord, k: usize) -> BlockEmpirical {
    assert!(k >= 1);
    let n = w.period();
    let mut counts: BTreeMap<Word, usize> = BTreeMap::new();
    for start in 0..n {
        let mut window = Vec::with_capacity(k);
        for j in 0..k {
            window.push(w.letters()[(start + j) % n]);
        }
        *counts.entry(window).or_insert(0) += 1;
    }
    BlockEmpirical {
        block_length: k,
        orbit_period: n,
        counts: counts.into_iter().collect(),
    }
}

/// The law of the k-block empirical measure when the orbit is drawn from
/// `ℙₙ`: classes of equal empirical measure with their log-masses.
#[derive(Debug, Clone)]
pub struct EmpiricalLaw<R: Real> {
    pub n: usize,
    pub block_length: usize,
    classes: Vec<(BlockEmpirical, R)>, // (class, log of unnormalized mass)
}

impl<R: Real> EmpiricalLaw<R> {
    pub fn classes(&self) -> &[(BlockEmpirical, R)] {
        &self.classes
    }

    /// `(1/n)·log ℙₙ{μₙ ∈ Γ}` for `Γ` given by a predicate on the k-block
    /// projection. The selected and total masses run through the identical
    /// summation pipeline, so `Γ = everything` yields exactly zero.
    pub fn log_prob_rate<F: Fn(&BlockEmpirical) -> bool>(&self, gamma: F) -> R {
        let mut sel = StreamLse::new();
        let mut all = StreamLse::new();
        for (class, lw) in &self.classes {
            all.push(*lw);
            if gamma(class) {
                sel.push(*lw);
            }
        }
        if sel.is_empty() {
            return R::neg_infinity();
        }
        (sel.value() - all.value()) / R::of_usize(self.n)
    }
}

/// Pushes `ℙₙ` forward to the law of the k-block empirical measure.
pub fn pushforward_empirical<R: Real>(p: &PofpMeasure<R>, k: usize) -> EmpiricalLaw<R> {
    let mut groups: BTreeMap<BlockEmpirical, StreamLse<R>> = BTreeMap::new();
    for (w, _, logw) in &p.atoms {
        let class = block_empirical(w, k);
        groups.entry(class).or_default().push(*logw);
    }
    EmpiricalLaw {
        n: p.n,
        block_length: k,
        classes: groups
            .into_iter()
            .map(|(class, lse)| (class, lse.value()))
            .collect(),
    }
}

/// Level-2 rate function `𝕀(ℚ) = −⟨g,ℚ⟩ − h(ℚ) + p`; nonnegative for locally
/// constant potentials, zero exactly at the equilibrium chain.
pub fn rate_level2<R: Real>(
    q: &MarkovMeasure<R>,
    space: &ShiftSpace,
    g: &Potential<R>,
    p_g: R,
) -> Result<R> {
    Ok(-q.mean_potential(space, g)? - q.entropy_rate() + p_g)
}

/// Mean entropy production `ep(ℚ) = ⟨g,ℚ⟩ − ⟨g,ℚ∘θ⟩`.
pub fn mean_entropy_production<R: Real>(
    q: &MarkovMeasure<R>,
    space: &ShiftSpace,
    g: &Potential<R>,
    theta: &Reversal,
) -> Result<R> {
    let reversed = q.reverse(space, theta)?;
    Ok(q.mean_potential(space, g)? - reversed.mean_potential(space, g)?)
}

/// Weak Gibbs diagnostic `(1/n)·log Kₙ` at block level: the worst log-ratio
/// between cylinder masses `ℚ([u])` and `exp(Gₙ(u) − n·p)` over admissible
/// n-words, with `Gₙ` evaluated non-cyclically over the n−r+1 complete
/// windows. The pressure contribution is folded into every path factor so
/// the uniform-measure/zero-potential case comes out exactly zero.
pub fn weak_gibbs_log_constant<R: Real>(
    space: &ShiftSpace,
    q: &MarkovMeasure<R>,
    g: &Potential<R>,
    p_g: R,
    n: usize,
) -> Result<R> {
    assert!(n >= 1);
    let m = q.order();
    let mut worst = R::zero();
    let mut failure: Option<Error> = None;
    space.for_each_admissible(n, |u| {
        if failure.is_some() {
            return;
        }
        let gn = match g.eval_linear(u) {
            Ok(v) => v,
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        let log_rho = if n <= m {
            let mass = q.word_prob(u);
            if mass <= R::zero() {
                failure = Some(Error::ZeroCylinder { word: u.to_vec() });
                return;
            }
            mass.ln() - gn + R::of_usize(n) * p_g
        } else {
            // ln ρ = (ln π + m·p) + Σ_steps (ln P + p) − Gₙ, pairing each
            // probability factor with its share of the pressure
            let pi = q.word_prob(&u[..m]);
            if pi <= R::zero() {
                failure = Some(Error::ZeroCylinder { word: u.to_vec() });
                return;
            }
            let mut acc = Kahan::new();
            acc.add(pi.ln() + R::of_usize(m) * p_g);
            for t in 1..=(n - m) {
                let prev = q.word_prob(&u[t - 1..t - 1 + m]);
                let whole = q.word_prob(&u[t - 1..t + m]);
                if whole <= R::zero() || prev <= R::zero() {
                    failure = Some(Error::ZeroCylinder { word: u.to_vec() });
                    return;
                }
                let step = whole / prev;
                acc.add(step.ln() + p_g);
            }
            acc.total() - gn
        };
        worst = worst.max(log_rho.abs());
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(worst / R::of_usize(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::{equilibrium_markov, random_markov, MarkovMeasure};
    use crate::potential::Potential;
    use crate::pressure::pressure_spectral;
    use crate::shift::{full_shift, golden_mean, ReversalKind};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn log3() -> f64 {
        3f64.ln()
    }

    fn range1_log3(space: &ShiftSpace) -> Potential<f64> {
        Potential::additive(space, 1, &[(vec![0], 0.0), (vec![1], log3())]).unwrap()
    }

    #[test]
    fn zero_potential_gives_uniform_orbit_measure() {
        let s = full_shift(2);
        let p = pofp_measure(&s, &Potential::<f64>::zero(&s), 4).unwrap();
        assert_eq!(p.len(), 16);
        for (_, w) in p.atoms() {
            assert_relative_eq!(w, 1.0 / 16.0, epsilon = 1e-14);
        }
        assert!((p.total_weight() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fixed_point_weights_for_log3_potential() {
        // Z₁ = 1 + 3: weights (1/4, 3/4) on the fixed points 0 and 1
        let s = full_shift(2);
        let p = pofp_measure(&s, &range1_log3(&s), 1).unwrap();
        let w0 = p.weight_of(&PeriodicWord::new(vec![0])).unwrap();
        let w1 = p.weight_of(&PeriodicWord::new(vec![1])).unwrap();
        assert_relative_eq!(w0, 0.25, epsilon = 1e-14);
        assert_relative_eq!(w1, 0.75, epsilon = 1e-14);
    }

    #[test]
    fn all_fixtures_have_unit_mass() {
        let gm = golden_mean();
        for n in [1usize, 3, 6, 9] {
            let p = pofp_measure(&gm, &range1_log3(&gm), n).unwrap();
            assert!((p.total_weight() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn radon_nikodym_weights_under_reversal() {
        // weight(w)/weight(θₙw) = exp(σₙ(w)) atom by atom
        let s = full_shift(2);
        let g = Potential::<f64>::additive(
            &s,
            2,
            &[
                (vec![0, 0], 0.5),
                (vec![0, 1], 1.0),
                (vec![1, 0], 0.0),
                (vec![1, 1], -0.3),
            ],
        )
        .unwrap();
        let theta = Reversal::new(ReversalKind::TimeReversal, vec![1, 0]).unwrap();
        for n in 1..=10 {
            let p = pofp_measure(&s, &g, n).unwrap();
            for (w, mass) in p.atoms() {
                let rev = s.apply_reversal(&theta, w).unwrap();
                let mass_rev = p.weight_of(&rev).unwrap();
                let sigma = g.entropy_production(&s, &theta, w).unwrap();
                assert!(
                    (mass_rev * sigma.exp() - mass).abs() <= 1e-12,
                    "n={n} w={:?}",
                    w.letters()
                );
            }
        }
    }

    #[test]
    fn block_empirical_examples() {
        let w = PeriodicWord::new(vec![0, 1]);
        let e = block_empirical(&w, 1);
        assert_relative_eq!(e.frequency::<f64>(&[0]), 0.5);
        assert_relative_eq!(e.frequency::<f64>(&[1]), 0.5);

        let w = PeriodicWord::new(vec![0, 0, 1, 1]);
        let e = block_empirical(&w, 2);
        for win in [[0, 0], [0, 1], [1, 1], [1, 0]] {
            assert_relative_eq!(e.frequency::<f64>(&win), 0.25);
        }

        let w = PeriodicWord::new(vec![0, 0, 0]);
        for k in 1..=4 {
            let e = block_empirical(&w, k);
            assert_eq!(e.counts().len(), 1);
            assert_relative_eq!(e.frequency::<f64>(&vec![0; k]), 1.0);
        }
    }

    #[test]
    fn block_empirical_marginals_are_shift_consistent() {
        let gm = golden_mean();
        for w in gm.periodic_points(7).unwrap() {
            let e = block_empirical(&w, 3);
            let (left, right) = e.marginals();
            assert_eq!(left, right);
        }
    }

    #[test]
    fn pushforward_matches_binomial_tail() {
        // Γ = {freq(1) ≥ 0.9} at n = 12 on the uniform full shift:
        // (1/12)·log(Σ_{j≥11} C(12,j)/2¹²)
        let s = full_shift(2);
        let p = pofp_measure(&s, &Potential::<f64>::zero(&s), 12).unwrap();
        let law = pushforward_empirical(&p, 1);
        let rate = law.log_prob_rate(|e| e.frequency::<f64>(&[1]) >= 0.9);
        let oracle = ((12.0 + 1.0) / 4096.0f64).ln() / 12.0; // C(12,11)+C(12,12) = 13
        assert_relative_eq!(rate, oracle, epsilon = 1e-12);
    }

    #[test]
    fn pushforward_whole_space_is_exactly_zero() {
        let s = full_shift(2);
        let p = pofp_measure(&s, &range1_log3(&s), 8).unwrap();
        let law = pushforward_empirical(&p, 2);
        assert_eq!(law.log_prob_rate(|_| true), 0.0);
    }

    #[test]
    fn pushforward_threshold_is_monotone() {
        let s = full_shift(2);
        let p = pofp_measure(&s, &Potential::<f64>::zero(&s), 10).unwrap();
        let law = pushforward_empirical(&p, 1);
        let mut last = f64::INFINITY;
        for t in [0.0, 0.2, 0.4, 0.6, 0.8, 1.0] {
            let rate = law.log_prob_rate(|e| e.frequency::<f64>(&[1]) >= t);
            assert!(rate <= last + 1e-15);
            last = rate;
        }
    }

    #[test]
    fn level2_rate_vanishes_at_equilibrium_and_is_nonnegative() {
        let s = full_shift(2);
        let g = range1_log3(&s);
        let p = pressure_spectral(&s, &g).unwrap();
        let q_star = equilibrium_markov(&s, &g).unwrap();
        assert!(rate_level2(&q_star, &s, &g, p).unwrap().abs() < 1e-10);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..500 {
            let q = random_markov::<f64, _>(&s, 1, &mut rng).unwrap();
            assert!(rate_level2(&q, &s, &g, p).unwrap() >= -1e-10);
        }
    }

    #[test]
    fn level2_rate_closed_form_for_bernoulli_chains() {
        // G ≡ 0: 𝕀(Bernoulli(q)) = log 2 − H(q)
        let s = full_shift(2);
        let zero = Potential::<f64>::zero(&s);
        let p = pressure_spectral(&s, &zero).unwrap();
        for q in [0.1f64, 0.3, 0.5, 0.8] {
            let chain =
                MarkovMeasure::from_transition(&s, 1, vec![1.0 - q, q, 1.0 - q, q]).unwrap();
            let h = -(q * q.ln() + (1.0 - q) * (1.0 - q).ln());
            let rate = rate_level2(&chain, &s, &zero, p).unwrap();
            assert_relative_eq!(rate, 2f64.ln() - h, epsilon = 1e-10);
        }
    }

    #[test]
    fn mean_entropy_production_antisymmetry() {
        let s = full_shift(2);
        let g = range1_log3(&s);
        let theta = Reversal::new(ReversalKind::TimeReversal, vec![1, 0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let q = random_markov::<f64, _>(&s, 1, &mut rng).unwrap();
            let qh = q.reverse(&s, &theta).unwrap();
            let ep = mean_entropy_production(&q, &s, &g, &theta).unwrap();
            let ep_rev = mean_entropy_production(&qh, &s, &g, &theta).unwrap();
            assert!((ep + ep_rev).abs() <= 1e-12);
        }
        // a chain fixed by reversal produces nothing
        let sym = MarkovMeasure::from_transition(&s, 1, vec![0.5, 0.5, 0.5, 0.5]).unwrap();
        let ep = mean_entropy_production(&sym, &s, &g, &theta).unwrap();
        assert!(ep.abs() <= 1e-13);
    }

    #[test]
    fn level2_fluctuation_relation_for_random_chains() {
        // 𝕀(ℚ∘θ) = 𝕀(ℚ) + ep(ℚ), exactly for Markov measures
        let s = full_shift(2);
        let g = range1_log3(&s);
        let p = pressure_spectral(&s, &g).unwrap();
        let theta = Reversal::new(ReversalKind::TimeReversal, vec![1, 0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for order in [1usize, 2] {
            for _ in 0..250 {
                let q = random_markov::<f64, _>(&s, order, &mut rng).unwrap();
                let qh = q.reverse(&s, &theta).unwrap();
                let lhs = rate_level2(&qh, &s, &g, p).unwrap();
                let rhs = rate_level2(&q, &s, &g, p).unwrap()
                    + mean_entropy_production(&q, &s, &g, &theta).unwrap();
                assert!((lhs - rhs).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn weak_gibbs_constant_is_exactly_zero_for_uniform_measure() {
        let s = full_shift(2);
        let zero = Potential::<f64>::zero(&s);
        let q = equilibrium_markov(&s, &zero).unwrap();
        let p = pressure_spectral(&s, &zero).unwrap();
        for n in [2usize, 5, 9, 14] {
            assert_eq!(weak_gibbs_log_constant(&s, &q, &zero, p, n).unwrap(), 0.0);
        }
    }

    #[test]
    fn weak_gibbs_constant_decays_for_equilibrium_chain() {
        let s = full_shift(2);
        let g = Potential::additive(
            &s,
            2,
            &[
                (vec![0, 0], 0.0),
                (vec![0, 1], 1.0),
                (vec![1, 0], 0.0),
                (vec![1, 1], 0.0),
            ],
        )
        .unwrap();
        let q = equilibrium_markov(&s, &g).unwrap();
        let p = pressure_spectral(&s, &g).unwrap();
        let mut last = f64::INFINITY;
        for n in 4..=14 {
            let kn = weak_gibbs_log_constant(&s, &q, &g, p, n).unwrap();
            // boundary-term bound from the Perron vectors
            assert!(kn <= 1.0 / n as f64, "n={n}: {kn}");
            assert!(kn < last, "n={n}: {kn} !< {last}");
            last = kn;
        }
    }

    #[test]
    fn weak_gibbs_detects_mismatched_measure() {
        // non-equilibrium chain against the same potential stays bounded away
        // from zero at the relative-entropy rate
        let s = full_shift(2);
        let g = Potential::additive(
            &s,
            2,
            &[
                (vec![0, 0], 0.0),
                (vec![0, 1], 1.0),
                (vec![1, 0], 0.0),
                (vec![1, 1], 0.0),
            ],
        )
        .unwrap();
        let p = pressure_spectral(&s, &g).unwrap();
        let q = MarkovMeasure::from_transition(&s, 1, vec![0.7, 0.3, 0.7, 0.3]).unwrap();
        let rate = rate_level2(&q, &s, &g, p).unwrap();
        assert!(rate > 0.05, "oracle rate should be positive: {rate}");
        for n in [8usize, 12, 16] {
            let kn = weak_gibbs_log_constant(&s, &q, &g, p, n).unwrap();
            // the sup ratio dominates the mean log-ratio up to O(1/n) terms
            assert!(kn >= rate - 2.0 / n as f64, "n={n}: {kn} vs oracle {rate}");
        }
    }

    #[test]
    fn weak_gibbs_requires_full_support() {
        let s = full_shift(2);
        let zero = Potential::<f64>::zero(&s);
        let p = 2f64.ln();
        // chain supported on the alternating orbit only
        let q =
            MarkovMeasure::from_parts(&s, 1, vec![0.0, 1.0, 1.0, 0.0], vec![0.5, 0.5]).unwrap();
        let err = weak_gibbs_log_constant(&s, &q, &zero, p, 4);
        assert!(matches!(err, Err(Error::ZeroCylinder { .. })));
    }
}
