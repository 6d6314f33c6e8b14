//! Laws of entropy production, the exact transient fluctuation relations,
//! entropic pressure, Legendre rate functions and hypothesis-testing error
//! exponents.

use crate::error::Error;
use crate::markov::equilibrium_markov;
use crate::measures::{mean_entropy_production, rate_level2};
use crate::numeric::{Kahan, StreamLse};
use crate::potential::{Potential, TiltedPotential};
use crate::pressure::pressure_spectral;
use crate::real::Real;
use crate::shift::{PeriodicWord, Reversal, ShiftSpace};
use crate::Result;

/// A finite weighted point-mass law on the real line. Atoms are sorted by
/// value, merged when closer than the merge tolerance, and carry both plain
/// and log weights; weights sum to one.
#[derive(Debug, Clone)]
pub struct AtomicLaw<R: Real> {
    atoms: Vec<Atom<R>>,
}

#[derive(Debug, Clone, Copy)]
pub struct Atom<R: Real> {
    pub value: R,
    pub weight: R,
    pub log_weight: R,
}

impl<R: Real> AtomicLaw<R> {
    /// Builds a law from `(value, log of unnormalized weight)` pairs.
    pub fn from_log_weights(mut pairs: Vec<(R, R)>) -> Self {
        assert!(!pairs.is_empty(), "a law needs at least one atom");
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("values must be ordered"));
        let mut log_z = StreamLse::new();
        for &(_, lw) in &pairs {
            log_z.push(lw);
        }
        let log_z = log_z.value();
        // merge runs of values with adjacent gaps within the tolerance
        let mut atoms: Vec<Atom<R>> = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let mut j = i + 1;
            while j < pairs.len() && pairs[j].0 - pairs[j - 1].0 <= R::MERGE_TOL {
                j += 1;
            }
            let mut group = StreamLse::new();
            for p in &pairs[i..j] {
                group.push(p.1);
            }
            let lw = group.value() - log_z;
            atoms.push(Atom {
                value: pairs[i].0,
                weight: lw.exp(),
                log_weight: lw,
            });
            i = j;
        }
        AtomicLaw { atoms }
    }

    /// Builds a law directly from `(value, probability)` pairs.
    pub fn from_probabilities(pairs: &[(R, R)]) -> Self {
        let logs: Vec<(R, R)> = pairs.iter().map(|&(v, p)| (v, p.ln())).collect();
        Self::from_log_weights(logs)
    }

    pub fn atoms(&self) -> &[Atom<R>] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_weight(&self) -> R {
        let mut acc = Kahan::new();
        for a in &self.atoms {
            acc.add(a.weight);
        }
        acc.total()
    }

    /// The pushforward under s ↦ −s.
    pub fn reflected(&self) -> Self {
        let mut atoms: Vec<Atom<R>> = self
            .atoms
            .iter()
            .map(|a| Atom {
                value: -a.value,
                weight: a.weight,
                log_weight: a.log_weight,
            })
            .collect();
        atoms.reverse();
        AtomicLaw { atoms }
    }

    /// Finds the atom whose value is closest to `v`, accepting it within
    /// twice the merge tolerance (merge groups can shift representatives by
    /// at most one tolerance).
    pub fn atom_near(&self, v: R) -> Option<&Atom<R>> {
        if self.atoms.is_empty() {
            return None;
        }
        let idx = self
            .atoms
            .partition_point(|a| a.value < v)
            .min(self.atoms.len() - 1);
        let mut best = idx;
        if idx > 0 && (self.atoms[idx - 1].value - v).abs() < (self.atoms[best].value - v).abs() {
            best = idx - 1;
        }
        let two = R::of(2.0);
        if (self.atoms[best].value - v).abs() <= two * R::MERGE_TOL {
            Some(&self.atoms[best])
        } else {
            None
        }
    }

    pub fn min_value(&self) -> R {
        self.atoms.first().map(|a| a.value).unwrap_or_else(R::nan)
    }

    pub fn max_value(&self) -> R {
        self.atoms.last().map(|a| a.value).unwrap_or_else(R::nan)
    }

    /// CSV with columns `s, weight`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("# thermoforge-csv v1\ns,weight\n");
        for a in &self.atoms {
            s.push_str(&format!(
                "{},{}\n",
                crate::pressure::format_float(a.value),
                crate::pressure::format_float(a.weight)
            ));
        }
        s
    }
}

/// The law `Pₙ` of `σₙ = Gₙ − Gₙ∘θₙ` under `ℙₙ`.
pub fn sigma_law<R: Real>(
    space: &ShiftSpace,
    g: &Potential<R>,
    theta: &Reversal,
    n: usize,
) -> Result<AtomicLaw<R>> {
    theta.validate(space)?;
    let mut pairs: Vec<(R, R)> = Vec::new();
    let mut err: Option<Error> = None;
    space.for_each_periodic(n, |letters| {
        if err.is_some() {
            return;
        }
        let w = PeriodicWord::new(letters.to_vec());
        let gval = match g.birkhoff(&w) {
            Ok(v) => v,
            Err(e) => {
                err = Some(e);
                return;
            }
        };
        let rev = match space.apply_reversal(theta, &w) {
            Ok(r) => r,
            Err(e) => {
                err = Some(e);
                return;
            }
        };
        let grev = match g.birkhoff(&rev) {
            Ok(v) => v,
            Err(e) => {
                err = Some(e);
                return;
            }
        };
        pairs.push((gval - grev, gval));
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    if pairs.is_empty() {
        return Err(Error::EmptyPeriodicSet { n });
    }
    Ok(AtomicLaw::from_log_weights(pairs))
}

/// `∫ e^{−s} dPₙ`, equal to one for every σₙ law (Jarzynski identity).
pub fn jarzynski<R: Real>(law: &AtomicLaw<R>) -> R {
    let mut lse = StreamLse::new();
    for a in law.atoms() {
        lse.push(a.log_weight - a.value);
    }
    lse.value().exp()
}

/// `eₙ(α) = log ∫ e^{−αs} dPₙ` (Rényi relative entropy of the reversal pair).
pub fn renyi<R: Real>(law: &AtomicLaw<R>, alpha: R) -> R {
    let mut lse = StreamLse::new();
    for a in law.atoms() {
        lse.push(a.log_weight - alpha * a.value);
    }
    lse.value()
}

/// `Ent(ℙₙ|ℙ̂ₙ) = ∫ s dPₙ`; nonnegative for σₙ laws.
pub fn relative_entropy<R: Real>(law: &AtomicLaw<R>) -> R {
    let mut acc = Kahan::new();
    for a in law.atoms() {
        acc.add(a.weight * a.value);
    }
    acc.total()
}

/// A scalar function sampled on a grid.
#[derive(Debug, Clone)]
pub struct GridFn<R: Real> {
    pub xs: Vec<R>,
    pub ys: Vec<R>,
}

impl<R: Real> GridFn<R> {
    pub fn new(xs: Vec<R>, ys: Vec<R>) -> Self {
        assert_eq!(xs.len(), ys.len());
        assert!(!xs.is_empty());
        Self { xs, ys }
    }

    /// Value at a grid point (exact lookup within a few ulps).
    pub fn value_at(&self, x: R) -> Option<R> {
        let idx = self.xs.partition_point(|&a| a < x);
        for i in [idx.saturating_sub(1), idx, idx + 1] {
            if i < self.xs.len() && (self.xs[i] - x).abs() <= R::of(1e-12) {
                return Some(self.ys[i]);
            }
        }
        None
    }

    /// CSV with columns named by the caller.
    pub fn to_csv(&self, x_name: &str, y_name: &str) -> String {
        let mut s = format!("# thermoforge-csv v1\n{x_name},{y_name}\n");
        for (x, y) in self.xs.iter().zip(&self.ys) {
            s.push_str(&format!(
                "{},{}\n",
                crate::pressure::format_float(*x),
                crate::pressure::format_float(*y)
            ));
        }
        s
    }
}

/// How `e(α)` is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PressureRoute {
    /// Transfer-operator spectral radius of the tilted table (locally
    /// constant potentials; exact up to the eigensolver tolerance).
    Spectral,
    /// Finite-n periodic-orbit route `eₙ(α)/n` at the given n (any potential).
    PeriodicAtN(usize),
}

/// Entropic pressure `e(α) = p((1−α)𝒢 + α𝒢∘θ) − p(𝒢)` on a grid.
///
/// The subtraction normalizes `e(0) = e(1) = 0`; both the normalized value
/// and the unnormalized pressure of the tilt are recoverable since `p(𝒢)` is
/// returned alongside.
pub fn entropic_pressure<R: Real>(
    space: &ShiftSpace,
    g: &Potential<R>,
    theta: &Reversal,
    alphas: &[R],
    route: PressureRoute,
) -> Result<(GridFn<R>, R)> {
    theta.validate(space)?;
    match route {
        PressureRoute::Spectral => {
            let p_base = pressure_spectral(space, g)?;
            let table = g.as_table().ok_or(Error::RequiresAdditive {
                got: g.variant_name(),
            })?;
            let pulled = g.pull_back(space, theta)?;
            let pulled_table = pulled.as_table().expect("pull_back is additive");
            let base_entries = table.entries();
            let mut ys = Vec::with_capacity(alphas.len());
            for &alpha in alphas {
                let one_minus = R::one() - alpha;
                let pairs: Vec<_> = base_entries
                    .iter()
                    .map(|(w, v)| {
                        let vp = pulled_table.value(w).expect("same admissible domain");
                        (w.clone(), one_minus * *v + alpha * vp)
                    })
                    .collect();
                let tilted = Potential::additive(space, table.range(), &pairs)?;
                ys.push(pressure_spectral(space, &tilted)? - p_base);
            }
            Ok((GridFn::new(alphas.to_vec(), ys), p_base))
        }
        PressureRoute::PeriodicAtN(n) => {
            let law = sigma_law(space, g, theta, n)?;
            let scale = R::of_usize(n);
            let ys: Vec<R> = alphas.iter().map(|&a| renyi(&law, a) / scale).collect();
            let p_base = crate::pressure::log_partition(space, g, n)? / scale;
            Ok((GridFn::new(alphas.to_vec(), ys), p_base))
        }
    }
}

/// Single-point evaluation of the entropic pressure (spectral route).
pub fn entropic_pressure_at<R: Real>(
    space: &ShiftSpace,
    g: &Potential<R>,
    theta: &Reversal,
    alpha: R,
) -> Result<R> {
    let tilt = TiltedPotential::new(g, theta, alpha);
    let tilted = tilt.as_additive(space)?;
    Ok(pressure_spectral(space, &tilted)? - pressure_spectral(space, g)?)
}

/// Where a rate function came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateProvenance {
    LegendreOfEntropicPressure,
    ContractionParametric,
}

/// A grid-sampled convex rate function. Boundary-flagged entries mean the
/// defining supremum was attained at the edge of the α-grid, so the stored
/// value is only a lower bound there.
#[derive(Debug, Clone)]
pub struct RateFunction<R: Real> {
    pub grid: Vec<R>,
    pub values: Vec<R>,
    pub boundary: Vec<bool>,
    pub provenance: RateProvenance,
}

impl<R: Real> RateFunction<R> {
    /// Checks discrete convexity (slopes nondecreasing within 1e−9) and that
    /// the minimum over unflagged points vanishes within 1e−8.
    pub fn validate(&self) -> Result<()> {
        let mut last_slope: Option<R> = None;
        for i in 1..self.grid.len() {
            let dx = self.grid[i] - self.grid[i - 1];
            if dx <= R::zero() {
                return Err(Error::ContractViolation {
                    quantity: "rate function grid monotonicity".into(),
                    residual: 0.0,
                    tolerance: 0.0,
                });
            }
            let slope = (self.values[i] - self.values[i - 1]) / dx;
            if let Some(prev) = last_slope {
                if slope < prev - R::of(1e-9) {
                    return Err(Error::ContractViolation {
                        quantity: "rate function convexity".into(),
                        residual: (prev - slope).to_f64().unwrap_or(f64::NAN),
                        tolerance: 1e-9,
                    });
                }
            }
            last_slope = Some(slope);
        }
        let mut min = R::infinity();
        for (i, v) in self.values.iter().enumerate() {
            if !self.boundary[i] {
                min = min.min(*v);
            }
        }
        if min.abs() > R::of(1e-8) {
            return Err(Error::ContractViolation {
                quantity: "rate function minimum".into(),
                residual: min.to_f64().unwrap_or(f64::NAN),
                tolerance: 1e-8,
            });
        }
        Ok(())
    }

    /// CSV with columns `s, I_s, flag_boundary`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("# thermoforge-csv v1\ns,I_s,flag_boundary\n");
        for i in 0..self.grid.len() {
            s.push_str(&format!(
                "{},{},{}\n",
                crate::pressure::format_float(self.grid[i]),
                crate::pressure::format_float(self.values[i]),
                self.boundary[i] as u8
            ));
        }
        s
    }
}

/// The Legendre machinery around a sampled `e(α)`: evaluates
/// `I(s) = sup_α (sα − e(−α)) = max over grid β of (−sβ − e(β))`
/// at arbitrary `s`, flagging boundary-attained maxima.
#[derive(Debug, Clone)]
pub struct LegendreTransform<R: Real> {
    alphas: Vec<R>,
    evals: Vec<R>,
}

impl<R: Real> LegendreTransform<R> {
    pub fn new(e: &GridFn<R>) -> Self {
        Self {
            alphas: e.xs.clone(),
            evals: e.ys.clone(),
        }
    }

    pub fn eval(&self, s: R) -> (R, bool) {
        let mut best = R::neg_infinity();
        for (&b, &eb) in self.alphas.iter().zip(&self.evals) {
            let t = -s * b - eb;
            if t > best {
                best = t;
            }
        }
        // flagged only when the supremum is attained solely at the grid edge,
        // in which case the value is merely a lower bound
        let mut interior = false;
        for (j, (&b, &eb)) in self.alphas.iter().zip(&self.evals).enumerate() {
            if j == 0 || j + 1 == self.alphas.len() {
                continue;
            }
            if -s * b - eb == best {
                interior = true;
                break;
            }
        }
        (best, !interior)
    }

    /// Slope range of e, which bounds the s-interval where I is finite.
    pub fn slope_range(&self) -> (R, R) {
        let mut lo = R::infinity();
        let mut hi = R::neg_infinity();
        for i in 1..self.alphas.len() {
            let dx = self.alphas[i] - self.alphas[i - 1];
            if dx > R::zero() {
                let m = (self.evals[i] - self.evals[i - 1]) / dx;
                lo = lo.min(m);
                hi = hi.max(m);
            }
        }
        (lo, hi)
    }
}

/// Legendre transform of a grid function onto an s-grid.
pub fn legendre<R: Real>(e: &GridFn<R>, s_grid: &[R]) -> RateFunction<R> {
    let lt = LegendreTransform::new(e);
    let mut values = Vec::with_capacity(s_grid.len());
    let mut boundary = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        let (v, flag) = lt.eval(s);
        values.push(v);
        boundary.push(flag);
    }
    RateFunction {
        grid: s_grid.to_vec(),
        values,
        boundary,
        provenance: RateProvenance::LegendreOfEntropicPressure,
    }
}

/// Default α-grid: dyadic steps of 1/128 over [−5, 6], with geometric
/// refinement 10^{−j} around both 0 and 1 (used by the Hoeffding curve and
/// the one-sided derivative estimates). Dyadic steps keep the grid closed
/// under the reflection α ↦ 1−α exactly in floating point, which is what
/// makes the Legendre fluctuation-relation residuals collapse to rounding
/// noise.
pub fn default_alpha_grid<R: Real>() -> Vec<R> {
    let step = R::of(1.0 / 128.0);
    let mut grid: Vec<R> = Vec::new();
    for i in -640i32..=768 {
        grid.push(R::of(i as f64) * step);
    }
    for j in 2..=6 {
        let h = R::of(10f64.powi(-j));
        grid.push(h);
        grid.push(-h);
        grid.push(R::one() - h);
        grid.push(R::one() + h);
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup_by(|a, b| a == b);
    grid
}

/// Symmetric s-grid adapted to the slope range of e, always containing 0 and
/// the ± pair of every point (exact negations), plus the LLN point estimate.
pub fn default_s_grid<R: Real>(e: &GridFn<R>) -> Vec<R> {
    let lt = LegendreTransform::new(e);
    let (lo, hi) = lt.slope_range();
    let bound = lo.abs().max(hi.abs()) * R::of(1.05) + R::of(1e-9);
    let steps = 512usize;
    let delta = bound / R::of_usize(steps);
    let mut grid = Vec::with_capacity(2 * steps + 3);
    grid.push(R::zero());
    for i in 1..=steps {
        let x = R::of_usize(i) * delta;
        grid.push(x);
        grid.push(-x);
    }
    let sbar = sbar_estimate(e);
    if sbar.is_finite() {
        grid.push(sbar);
        grid.push(-sbar);
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup_by(|a, b| a == b);
    grid
}

/// Left-derivative estimate `s̄ = ∂⁻e(1)` from the grid points nearest 1.
pub fn sbar_estimate<R: Real>(e: &GridFn<R>) -> R {
    let one = R::one();
    let mut best_h = R::infinity();
    let mut slope = R::nan();
    for i in 0..e.xs.len() {
        let x = e.xs[i];
        if x < one {
            let h = one - x;
            if h > R::zero() && h < best_h {
                if let Some(e1) = exact_at(e, one) {
                    best_h = h;
                    slope = (e1 - e.ys[i]) / h;
                }
            }
        }
    }
    slope
}

fn exact_at<R: Real>(e: &GridFn<R>, x: R) -> Option<R> {
    e.value_at(x)
}

/// `(1/n)·log Pₙ([na, nb])` from the atomic law; `−∞` when the window misses
/// the support. Selected and total masses share one summation pipeline, so
/// a window covering everything gives exactly zero.
pub fn ft_empirical_check<R: Real>(law: &AtomicLaw<R>, n: usize, a: R, b: R) -> R {
    let lo = R::of_usize(n) * a;
    let hi = R::of_usize(n) * b;
    let mut sel = StreamLse::new();
    let mut all = StreamLse::new();
    for atom in law.atoms() {
        all.push(atom.log_weight);
        if atom.value >= lo && atom.value <= hi {
            sel.push(atom.log_weight);
        }
    }
    if sel.is_empty() {
        return R::neg_infinity();
    }
    (sel.value() - all.value()) / R::of_usize(n)
}

/// Finite-n Chernoff exponent `(1/n)·log Σ min(w(s), w(−s))`; converges to
/// `e(1/2) = −I(0)`.
pub fn chernoff_exponent<R: Real>(law: &AtomicLaw<R>, n: usize) -> R {
    let mut lse = StreamLse::new();
    for atom in law.atoms() {
        match law.atom_near(-atom.value) {
            Some(mirror) => lse.push(atom.log_weight.min(mirror.log_weight)),
            None => {} // unmatched atom contributes min(w, 0) = 0
        }
    }
    lse.value() / R::of_usize(n)
}

/// Finite-n Stein exponent `(1/n)·Ent(ℙₙ|ℙ̂ₙ)`; converges to `−e′(0)`.
pub fn stein_exponent<R: Real>(law: &AtomicLaw<R>, n: usize) -> R {
    relative_entropy(law) / R::of_usize(n)
}

/// Central finite-difference reference for `−e′(0)` (step 1e−4, spectral
/// route).
pub fn stein_reference<R: Real>(
    space: &ShiftSpace,
    g: &Potential<R>,
    theta: &Reversal,
) -> Result<R> {
    let h = R::of(1e-4);
    let plus = entropic_pressure_at(space, g, theta, h)?;
    let minus = entropic_pressure_at(space, g, theta, -h)?;
    Ok(-(plus - minus) / (R::of(2.0) * h))
}

/// Hoeffding exponent curve `f(r) = −inf_{α∈[0,1−10⁻⁶]} (αr + e(α))/(1−α)`,
/// evaluated over the grid points of e inside that interval.
pub fn hoeffding_eval<R: Real>(e: &GridFn<R>, r: R) -> R {
    let cutoff = R::one() - R::of(1e-6);
    let mut best = R::infinity();
    for (&a, &ea) in e.xs.iter().zip(&e.ys) {
        if a >= R::zero() && a <= cutoff {
            let t = (a * r + ea) / (R::one() - a);
            if t < best {
                best = t;
            }
        }
    }
    -best
}

pub fn hoeffding_curve<R: Real>(e: &GridFn<R>, r_grid: &[R]) -> GridFn<R> {
    let ys: Vec<R> = r_grid.iter().map(|&r| hoeffding_eval(e, r)).collect();
    GridFn::new(r_grid.to_vec(), ys)
}

/// Level-1 rate function by contraction through tilted equilibria: for each
/// tilt α the equilibrium chain of `(1−α)g + α·g∘θ` contributes the point
/// `(ep(Q_α), 𝕀(Q_α))`. Coincides with the Legendre transform of e wherever
/// both are defined.
pub fn contraction_parametric<R: Real>(
    space: &ShiftSpace,
    g: &Potential<R>,
    theta: &Reversal,
    alphas: &[R],
) -> Result<RateFunction<R>> {
    let p_g = pressure_spectral(space, g)?;
    let mut points: Vec<(R, R)> = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let tilt = TiltedPotential::new(g, theta, alpha);
        let tilted = tilt.as_additive(space)?;
        let q = equilibrium_markov(space, &tilted)?;
        let s = mean_entropy_production(&q, space, g, theta)?;
        let i = rate_level2(&q, space, g, p_g)?;
        points.push((s, i));
    }
    points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    points.dedup_by(|a, b| (a.0 - b.0).abs() <= R::MERGE_TOL);
    let (grid, values): (Vec<R>, Vec<R>) = points.into_iter().unzip();
    let boundary = vec![false; grid.len()];
    Ok(RateFunction {
        grid,
        values,
        boundary,
        provenance: RateProvenance::ContractionParametric,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift::{full_shift, golden_mean, Reversal, ReversalKind};
    use approx::assert_relative_eq;

    fn log3() -> f64 {
        3f64.ln()
    }

    /// The closed-form Bernoulli fixture: full 2-shift, g = (0, γ), time
    /// reversal with the symbol swap. σₙ(w) = (g0 − g1)(#0 − #1).
    fn bernoulli_fixture(gamma: f64) -> (ShiftSpace, Potential<f64>, Reversal) {
        let s = full_shift(2);
        let g = Potential::additive(&s, 1, &[(vec![0], 0.0), (vec![1], gamma)]).unwrap();
        let theta = Reversal::new(ReversalKind::TimeReversal, vec![1, 0]).unwrap();
        (s, g, theta)
    }

    fn bernoulli_e(gamma: f64, alpha: f64) -> f64 {
        // e(α) = ln(e^{αγ} + e^{(1−α)γ}) − ln(1 + e^γ), closed form from the
        // 2×2 transfer matrix
        let t = (alpha * gamma).exp() + ((1.0 - alpha) * gamma).exp();
        t.ln() - (1.0 + gamma.exp()).ln()
    }

    fn binom(n: usize, k: usize) -> f64 {
        let mut v = 1f64;
        for i in 0..k {
            v = v * (n - i) as f64 / (i + 1) as f64;
        }
        v
    }

    #[test]
    fn sigma_law_is_point_mass_when_reversal_fixes_potential() {
        // range-1 table with identity time reversal: Gₙ∘θₙ = Gₙ on Mₙ
        let s = full_shift(2);
        let g = Potential::additive(&s, 1, &[(vec![0], 0.0), (vec![1], log3())]).unwrap();
        let id = Reversal::identity(ReversalKind::TimeReversal, 2);
        let law = sigma_law(&s, &g, &id, 6).unwrap();
        assert_eq!(law.len(), 1);
        assert_eq!(law.atoms()[0].value, 0.0);
        assert!((law.atoms()[0].weight - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sigma_law_matches_transformed_binomial() {
        let (s, g, theta) = bernoulli_fixture(log3());
        for n in [3usize, 6, 9] {
            let law = sigma_law(&s, &g, &theta, n).unwrap();
            assert_eq!(law.len(), n + 1);
            let z = 4f64.powi(n as i32);
            for (j, atom) in law.atoms().iter().enumerate() {
                // atoms ordered by σ = γ(2j − n): j ones give weight C(n,j)3^j/4ⁿ
                let expected_value = log3() * (2.0 * j as f64 - n as f64);
                let expected_weight = binom(n, j) * 3f64.powi(j as i32) / z;
                assert_relative_eq!(atom.value, expected_value, epsilon = 1e-12);
                assert_relative_eq!(atom.weight, expected_weight, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn detailed_atom_symmetry() {
        // each atom (s, w) pairs with one at −s of weight w·e^{−s}
        let (s, g, theta) = bernoulli_fixture(log3());
        let law = sigma_law(&s, &g, &theta, 8).unwrap();
        for atom in law.atoms() {
            let mirror = law.atom_near(-atom.value).expect("mirror atom exists");
            assert!((mirror.weight - atom.weight * (-atom.value).exp()).abs() <= 1e-12);
        }
    }

    #[test]
    fn jarzynski_identity_on_fixtures() {
        let (s, g, theta) = bernoulli_fixture(log3());
        for n in 1..=12 {
            let law = sigma_law(&s, &g, &theta, n).unwrap();
            assert!((jarzynski(&law) - 1.0).abs() <= 1e-12, "n={n}");
        }
        // point mass at zero: exactly one
        let point = AtomicLaw::from_probabilities(&[(0.0, 1.0)]);
        assert_eq!(jarzynski(&point), 1.0);
    }

    #[test]
    fn jarzynski_detects_non_sigma_laws() {
        // two symmetric atoms without the exponential tilt: ∫e^{−s} = cosh(a)
        let a = 0.8f64;
        let law = AtomicLaw::from_probabilities(&[(-a, 0.5), (a, 0.5)]);
        assert_relative_eq!(jarzynski(&law), a.cosh(), epsilon = 1e-12);
        assert!((jarzynski(&law) - 1.0).abs() > 0.3);
    }

    #[test]
    fn renyi_symmetry_and_endpoints() {
        let (s, g, theta) = bernoulli_fixture(log3());
        for n in [4usize, 8, 12] {
            let law = sigma_law(&s, &g, &theta, n).unwrap();
            assert!(renyi(&law, 0.0).abs() <= 2e-12);
            assert!(renyi(&law, 1.0).abs() <= 2e-12);
            assert!(renyi(&law, 0.5) <= 1e-15);
            // 25-point dyadic grid on [−1, 2]: 1−α lands exactly on the grid
            for i in 0..25 {
                let alpha = -1.0 + i as f64 * 0.125;
                let d = renyi(&law, alpha) - renyi(&law, 1.0 - alpha);
                assert!(d.abs() <= 1e-10, "n={n} α={alpha}: {d}");
            }
        }
    }

    #[test]
    fn relative_entropy_examples() {
        let point = AtomicLaw::<f64>::from_probabilities(&[(0.0, 1.0)]);
        assert_eq!(relative_entropy(&point), 0.0);
        let (s, g, theta) = bernoulli_fixture(log3());
        for n in [2usize, 5, 10] {
            let law = sigma_law(&s, &g, &theta, n).unwrap();
            let ent = relative_entropy(&law);
            assert!(ent >= -1e-12);
            // binomial mean oracle: E σ = γ·n·(2q̄ − 1) with q̄ = 3/4
            let oracle = log3() * n as f64 * 0.5;
            assert_relative_eq!(ent, oracle, max_relative = 1e-11);
        }
    }

    #[test]
    fn entropic_pressure_closed_form() {
        let (s, g, theta) = bernoulli_fixture(log3());
        let alphas: Vec<f64> = (-16..=24).map(|i| i as f64 / 8.0).collect();
        let (e, _) = entropic_pressure(&s, &g, &theta, &alphas, PressureRoute::Spectral).unwrap();
        for (&a, &ea) in e.xs.iter().zip(&e.ys) {
            assert_relative_eq!(ea, bernoulli_e(log3(), a), epsilon = 1e-12);
        }
        // e(1/2) = log 2 + (log 3)/2 − log 4
        let e_half = e.value_at(0.5).unwrap();
        assert_relative_eq!(
            e_half,
            2f64.ln() + log3() / 2.0 - 4f64.ln(),
            epsilon = 1e-12
        );
        // endpoints vanish
        assert!(e.value_at(0.0).unwrap().abs() <= 1e-12);
        assert!(e.value_at(1.0).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn entropic_pressure_properties_on_grid() {
        let (s, g, theta) = bernoulli_fixture(log3());
        let alphas = default_alpha_grid::<f64>();
        let (e, _) = entropic_pressure(&s, &g, &theta, &alphas, PressureRoute::Spectral).unwrap();
        // symmetric: e(α) = e(1−α); dyadic grid makes 1−α exact
        for (i, &a) in e.xs.iter().enumerate() {
            if let Some(other) = e.value_at(1.0 - a) {
                assert!((e.ys[i] - other).abs() <= 1e-10, "α={a}");
            }
        }
        // convex along the grid and nonpositive on [0,1]
        for i in 1..e.xs.len() - 1 {
            let l = (e.ys[i] - e.ys[i - 1]) / (e.xs[i] - e.xs[i - 1]);
            let r = (e.ys[i + 1] - e.ys[i]) / (e.xs[i + 1] - e.xs[i]);
            assert!(r >= l - 1e-9);
            if e.xs[i] >= 0.0 && e.xs[i] <= 1.0 {
                assert!(e.ys[i] <= 1e-12);
            }
        }
        // global minimum within one grid step of 1/2
        let (mut arg, mut best) = (0usize, f64::INFINITY);
        for (i, &y) in e.ys.iter().enumerate() {
            if y < best {
                best = y;
                arg = i;
            }
        }
        assert!((e.xs[arg] - 0.5).abs() <= 1.0 / 128.0 + 1e-12);
    }

    #[test]
    fn route_agreement_with_o_one_over_n_gap() {
        let (s, g, theta) = bernoulli_fixture(log3());
        let alphas: Vec<f64> = vec![-0.5, 0.25, 0.5, 0.75, 1.5];
        let (e_spec, _) =
            entropic_pressure(&s, &g, &theta, &alphas, PressureRoute::Spectral).unwrap();
        let mut scaled_gaps: Vec<f64> = Vec::new();
        for n in [4usize, 8, 12, 16] {
            let (e_n, _) =
                entropic_pressure(&s, &g, &theta, &alphas, PressureRoute::PeriodicAtN(n)).unwrap();
            let gap = e_spec
                .ys
                .iter()
                .zip(&e_n.ys)
                .map(|(a, b)| (a - b).abs())
                .fold(0f64, f64::max);
            scaled_gaps.push(gap * n as f64);
        }
        // n·gap stays bounded by a stable constant
        let c = scaled_gaps[0].max(1e-9);
        for (i, &sg) in scaled_gaps.iter().enumerate() {
            assert!(sg <= 2.0 * c, "n-index {i}: scaled gap {sg} vs {c}");
        }
    }

    #[test]
    fn legendre_of_zero_function() {
        let alphas: Vec<f64> = (-8..=8).map(|i| i as f64 / 4.0).collect();
        let e = GridFn::new(alphas.clone(), vec![0.0; alphas.len()]);
        let lt = LegendreTransform::new(&e);
        let (v0, flag0) = lt.eval(0.0);
        assert_eq!(v0, 0.0);
        assert!(!flag0);
        // away from zero the sup runs off the grid edge and is flagged
        let (v, flag) = lt.eval(1.0);
        assert!(flag);
        assert!(v > 0.0);
    }

    #[test]
    fn legendre_of_quadratic_is_quadratic() {
        let alphas: Vec<f64> = (-400..=400).map(|i| i as f64 / 50.0).collect();
        let ys: Vec<f64> = alphas.iter().map(|a| a * a / 2.0).collect();
        let e = GridFn::new(alphas, ys);
        let lt = LegendreTransform::new(&e);
        for s in [-2.0, -0.5, 0.0, 0.7, 1.9] {
            let (v, flag) = lt.eval(s);
            assert!(!flag);
            // conjugate of α²/2 is s²/2, up to grid resolution
            assert!((v - s * s / 2.0).abs() <= 1e-3, "s={s}: {v}");
        }
    }

    #[test]
    fn fluctuation_relation_for_legendre_rate() {
        let (s, g, theta) = bernoulli_fixture(log3());
        let alphas = default_alpha_grid::<f64>();
        let (e, _) = entropic_pressure(&s, &g, &theta, &alphas, PressureRoute::Spectral).unwrap();
        let s_grid = default_s_grid(&e);
        let rate = legendre(&e, &s_grid);
        rate.validate().unwrap();
        let lt = LegendreTransform::new(&e);
        for (i, &sv) in rate.grid.iter().enumerate() {
            if rate.boundary[i] {
                continue;
            }
            let (at_minus, flag) = lt.eval(-sv);
            if flag {
                continue;
            }
            let residual = at_minus - rate.values[i] - sv;
            assert!(residual.abs() <= 1e-6, "s={sv}: {residual}");
        }
    }

    #[test]
    fn ft_empirical_window_checks() {
        let (s, g, theta) = bernoulli_fixture(log3());
        let law = sigma_law(&s, &g, &theta, 10).unwrap();
        // whole line: exactly zero through the shared pipeline
        assert_eq!(
            ft_empirical_check(&law, 10, f64::NEG_INFINITY, f64::INFINITY),
            0.0
        );
        // empty window: −∞ marker
        assert!(ft_empirical_check(&law, 10, 100.0, 200.0).is_infinite());
        // LLN window shrinks toward rate zero as n grows
        let sbar = log3() / 2.0;
        let r10 = ft_empirical_check(&law, 10, sbar - 0.25, sbar + 0.25);
        let law20 = sigma_law(&s, &g, &theta, 14).unwrap();
        let r14 = ft_empirical_check(&law20, 14, sbar - 0.25, sbar + 0.25);
        assert!(r14 > r10, "LLN window mass rate should increase toward 0");
        assert!(r14 < 0.0);
    }

    #[test]
    fn evans_searles_tail_ratio() {
        // (1/n)[log Pₙ(−Γ) − log Pₙ(Γ)] lies in −[max Γ, min Γ] exactly,
        // atomwise from the detailed symmetry
        let (s, g, theta) = bernoulli_fixture(log3());
        let n = 12;
        let law = sigma_law(&s, &g, &theta, n).unwrap();
        let (a, b) = (0.3, 0.9);
        let plus = ft_empirical_check(&law, n, a, b);
        let minus = ft_empirical_check(&law, n, -b, -a);
        let diff = minus - plus;
        assert!(diff <= -a + 1e-12 && diff >= -b - 1e-12, "diff={diff}");
    }

    #[test]
    fn chernoff_exponent_behaviour() {
        // symmetric σ ≡ 0 law: total variation distance 0, exponent 0
        let point = AtomicLaw::<f64>::from_probabilities(&[(0.0, 1.0)]);
        assert!(chernoff_exponent(&point, 10).abs() <= 1e-14);

        let gamma = 2f64.ln();
        let (s, g, theta) = bernoulli_fixture(gamma);
        let e_half = bernoulli_e(gamma, 0.5);
        let mut last = f64::INFINITY;
        for n in [8usize, 12, 16, 20] {
            let law = sigma_law(&s, &g, &theta, n).unwrap();
            let err = (chernoff_exponent(&law, n) - e_half).abs();
            assert!(err < last, "n={n}: {err} !< {last}");
            last = err;
        }
        assert!(last <= 0.05);
    }

    #[test]
    fn stein_exponent_matches_derivative_reference() {
        let (s, g, theta) = bernoulli_fixture(2f64.ln());
        let reference = stein_reference(&s, &g, &theta).unwrap();
        // closed form: −e′(0) = γ(e^γ − 1)/(e^γ + 1) = ln2/3
        assert_relative_eq!(reference, 2f64.ln() / 3.0, epsilon = 1e-7);
        let law = sigma_law(&s, &g, &theta, 20).unwrap();
        let stein = stein_exponent(&law, 20);
        assert!(stein >= 0.0);
        assert!((stein - reference).abs() <= 0.02);
        // σ ≡ 0: both sides vanish
        let sid = full_shift(2);
        let zero = Potential::<f64>::zero(&sid);
        let id = Reversal::identity(ReversalKind::TimeReversal, 2);
        let law0 = sigma_law(&sid, &zero, &id, 8).unwrap();
        assert_eq!(stein_exponent(&law0, 8), 0.0);
        assert!(stein_reference(&sid, &zero, &id).unwrap().abs() <= 1e-9);
    }

    #[test]
    fn hoeffding_curve_properties() {
        // e ≡ 0 on [0,1): f(r) = 0 for r ≥ 0 (infimum at α = 0)
        let alphas: Vec<f64> = (0..=99).map(|i| i as f64 / 100.0).collect();
        let e0 = GridFn::new(alphas.clone(), vec![0.0; alphas.len()]);
        for r in [0.0, 0.3, 2.0] {
            assert_eq!(hoeffding_eval(&e0, r), 0.0);
        }

        let gamma = 2f64.ln();
        let (s, g, theta) = bernoulli_fixture(gamma);
        let grid = default_alpha_grid::<f64>();
        let (e, _) = entropic_pressure(&s, &g, &theta, &grid, PressureRoute::Spectral).unwrap();
        let sbar = gamma / 3.0; // γ(e^γ−1)/(e^γ+1)
        // f(0) = s̄
        assert!((hoeffding_eval(&e, 0.0) - sbar).abs() <= 1e-4);
        // f(r) = 0 for r ≥ s̄
        for r in [sbar + 1e-3, 0.5, 1.0] {
            assert_eq!(hoeffding_eval(&e, r), 0.0);
        }
        // fixed point f(I(0)) = I(0) with I(0) = −e(1/2)
        let i0 = -e.value_at(0.5).unwrap();
        assert!((hoeffding_eval(&e, i0) - i0).abs() <= 1e-4);
        // bounds 2I(0) − r ≤ f(r) ≤ s̄ − r on [0, s̄]
        for i in 0..=20 {
            let r = sbar * i as f64 / 20.0;
            let f = hoeffding_eval(&e, r);
            assert!(f >= 2.0 * i0 - r - 1e-4, "r={r}");
            assert!(f <= sbar - r + 1e-4, "r={r}");
        }
    }

    #[test]
    fn contraction_curve_agrees_with_legendre() {
        let (s, g, theta) = bernoulli_fixture(log3());
        let alphas = default_alpha_grid::<f64>();
        let (e, _) = entropic_pressure(&s, &g, &theta, &alphas, PressureRoute::Spectral).unwrap();
        let lt = LegendreTransform::new(&e);
        // tilt grid inside [−4, 4] so negations stay on the e-grid
        let tilts: Vec<f64> = (-32..=32).map(|i| i as f64 / 8.0).collect();
        let curve = contraction_parametric(&s, &g, &theta, &tilts).unwrap();
        curve.validate().unwrap();
        for (i, &sv) in curve.grid.iter().enumerate() {
            let (leg, flag) = lt.eval(sv);
            assert!(!flag, "tilt grid should stay interior");
            assert!(
                (curve.values[i] - leg).abs() <= 1e-6,
                "s={sv}: {} vs {leg}",
                curve.values[i]
            );
        }
        // equilibrium of the untilted potential sits at rate zero
        let (zero_idx, _) = curve
            .values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        assert!(curve.values[zero_idx].abs() <= 1e-10);
    }

    #[test]
    fn contraction_curve_satisfies_fr_pairwise() {
        let (s, g, theta) = bernoulli_fixture(log3());
        let p_g = pressure_spectral(&s, &g).unwrap();
        for alpha in [-0.5, 0.125, 0.25, 0.75] {
            let tilt_a = TiltedPotential::new(&g, &theta, alpha).as_additive(&s).unwrap();
            let tilt_b = TiltedPotential::new(&g, &theta, 1.0 - alpha)
                .as_additive(&s)
                .unwrap();
            let qa = equilibrium_markov(&s, &tilt_a).unwrap();
            let qb = equilibrium_markov(&s, &tilt_b).unwrap();
            let sa = mean_entropy_production(&qa, &s, &g, &theta).unwrap();
            let sb = mean_entropy_production(&qb, &s, &g, &theta).unwrap();
            let ia = rate_level2(&qa, &s, &g, p_g).unwrap();
            let ib = rate_level2(&qb, &s, &g, p_g).unwrap();
            // tilts α and 1−α give (s, I) and (−s, I+s)
            assert!((sb + sa).abs() <= 1e-8);
            assert!((ib - ia - sa).abs() <= 1e-8);
        }
    }

    #[test]
    fn sigma_law_works_on_matrix_product_potentials() {
        // transient relations are structural: they hold for any potential
        let s = full_shift(2);
        let mp = Potential::<f64>::matrix_product(
            &s,
            2,
            vec![vec![2.0, 1.0, 1.0, 1.0], vec![1.0, 1.0, 1.0, 2.0]],
            crate::potential::MatrixNorm::OpInfinity,
        )
        .unwrap();
        let id = Reversal::identity(ReversalKind::TimeReversal, 2);
        for n in [3usize, 6, 9] {
            let law = sigma_law(&s, &mp, &id, n).unwrap();
            assert!((jarzynski(&law) - 1.0).abs() <= 1e-12);
            for i in 0..25 {
                let alpha = -1.0 + i as f64 * 0.125;
                assert!((renyi(&law, alpha) - renyi(&law, 1.0 - alpha)).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn law_csv_has_header_and_atoms() {
        let law = AtomicLaw::<f64>::from_probabilities(&[(-1.0, 0.25), (1.0, 0.75)]);
        let csv = law.to_csv();
        assert!(csv.starts_with("# thermoforge-csv v1\ns,weight\n"));
        assert_eq!(csv.lines().count(), 4);
    }
}
