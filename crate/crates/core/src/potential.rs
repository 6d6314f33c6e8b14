//! Potential sequences over a shift space and their Birkhoff sums.
//!
//! Three variants are supported: locally constant tables of finite range
//! (additive), matrix products with strictly positive per-symbol matrices
//! (almost additive), and explicit evaluators with a stated horizon.
//! Potentials are evaluated only on periodic words; every downstream quantity
//! is built from periodic orbits or Markov measures, which keeps the whole
//! pipeline exact and enumerable.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::Error;
use crate::numeric::Kahan;
use crate::real::Real;
use crate::shift::{PeriodicWord, Reversal, ReversalKind, ShiftSpace, Symbol, Word};
use crate::Result;

/// Matrix norm used when evaluating matrix-product potentials. Pressure does
/// not depend on the choice (norms differ by bounded factors), so this is a
/// configuration knob.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatrixNorm {
    /// Operator norm induced by the sup norm: maximal row sum of absolute values.
    #[default]
    OpInfinity,
    Frobenius,
    MaxAbs,
}

/// Locally constant potential of range `r`: a table on admissible r-words.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTable<R: Real> {
    alphabet: usize,
    range: usize,
    /// Dense radix-indexed storage; `None` marks inadmissible windows.
    values: Vec<Option<R>>,
}

impl<R: Real> LocalTable<R> {
    fn index(&self, w: &[Symbol]) -> usize {
        let mut idx = 0usize;
        for &a in w {
            idx = idx * self.alphabet + a as usize;
        }
        idx
    }

    pub fn range(&self) -> usize {
        self.range
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn value(&self, w: &[Symbol]) -> Option<R> {
        debug_assert_eq!(w.len(), self.range);
        self.values[self.index(w)]
    }

    /// Iterates `(word, value)` pairs in lexicographic word order.
    pub fn entries(&self) -> Vec<(Word, R)> {
        let mut out = Vec::new();
        let mut w = vec![0 as Symbol; self.range];
        loop {
            if let Some(v) = self.value(&w) {
                out.push((w.clone(), v));
            }
            // increment radix counter
            let mut i = self.range;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if (w[i] as usize) + 1 < self.alphabet {
                    w[i] += 1;
                    for x in w.iter_mut().skip(i + 1) {
                        *x = 0;
                    }
                    break;
                }
            }
        }
    }

    pub fn max_abs(&self) -> R {
        self.values
            .iter()
            .flatten()
            .fold(R::zero(), |m, v| m.max(v.abs()))
    }
}

/// A potential sequence.
#[derive(Clone)]
pub enum Potential<R: Real> {
    /// Additive locally constant potential given by a range-r table.
    AdditiveLocal(LocalTable<R>),
    /// `Gₙ(x) = log‖M_{x₀}⋯M_{x_{n−1}}‖` with strictly positive matrices.
    MatrixProduct {
        dim: usize,
        /// One dim×dim row-major matrix per symbol.
        mats: Vec<Vec<R>>,
        norm: MatrixNorm,
    },
    /// Arbitrary evaluator `(n, word) -> value`, usable for n up to `horizon`.
    Explicit {
        horizon: usize,
        eval: Arc<dyn Fn(usize, &PeriodicWord) -> R + Send + Sync>,
    },
}

impl<R: Real> std::fmt::Debug for Potential<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Potential::AdditiveLocal(t) => f
                .debug_struct("AdditiveLocal")
                .field("range", &t.range)
                .finish(),
            Potential::MatrixProduct { dim, norm, .. } => f
                .debug_struct("MatrixProduct")
                .field("dim", dim)
                .field("norm", norm)
                .finish(),
            Potential::Explicit { horizon, .. } => f
                .debug_struct("Explicit")
                .field("horizon", horizon)
                .finish(),
        }
    }
}

impl<R: Real> Potential<R> {
    pub fn variant_name(&self) -> &'static str {
        match self {
            Potential::AdditiveLocal(_) => "additive",
            Potential::MatrixProduct { .. } => "matrix-product",
            Potential::Explicit { .. } => "explicit",
        }
    }

    /// Builds an additive potential from `(word, value)` pairs.
    ///
    /// The table must cover exactly the admissible r-words of `space`:
    /// missing or spurious entries are rejected.
    pub fn additive(space: &ShiftSpace, range: usize, pairs: &[(Word, R)]) -> Result<Self> {
        assert!(range >= 1, "range must be >= 1");
        let l = space.alphabet();
        let size = l
            .checked_pow(range as u32)
            .filter(|&s| s as u128 <= crate::shift::DEFAULT_ENUM_CAP)
            .ok_or(Error::EnumerationCap {
                what: format!("potential table of range {range}"),
                requested: u128::MAX,
                cap: crate::shift::DEFAULT_ENUM_CAP,
            })?;
        let mut table = LocalTable {
            alphabet: l,
            range,
            values: vec![None; size],
        };
        for (w, v) in pairs {
            if w.len() != range || !admissible_window(space, w) {
                return Err(Error::SpuriousTableEntry { word: w.clone() });
            }
            let idx = table.index(w);
            table.values[idx] = Some(*v);
        }
        // completeness: every admissible r-word must be present
        let mut missing: Option<Word> = None;
        for_each_window(space, range, |w| {
            if missing.is_none() && table.value(w).is_none() {
                missing = Some(w.to_vec());
            }
        });
        if let Some(word) = missing {
            return Err(Error::MissingTableEntry { word });
        }
        Ok(Potential::AdditiveLocal(table))
    }

    /// The zero potential (range 1).
    pub fn zero(space: &ShiftSpace) -> Self {
        let pairs: Vec<(Word, R)> = (0..space.alphabet() as Symbol)
            .map(|a| (vec![a], R::zero()))
            .collect();
        Self::additive(space, 1, &pairs).expect("zero table is always valid")
    }

    /// A matrix-product potential; all entries must be strictly positive,
    /// which guarantees almost additivity.
    pub fn matrix_product(
        space: &ShiftSpace,
        dim: usize,
        mats: Vec<Vec<R>>,
        norm: MatrixNorm,
    ) -> Result<Self> {
        assert!(dim >= 1);
        if mats.len() != space.alphabet() {
            return Err(Error::IncompatibleReversal {
                reason: format!(
                    "matrix-product potential has {} matrices for {} symbols",
                    mats.len(),
                    space.alphabet()
                ),
            });
        }
        for (symbol, m) in mats.iter().enumerate() {
            assert_eq!(m.len(), dim * dim, "matrix for symbol {symbol} has wrong size");
            for &v in m {
                if v <= R::zero() {
                    return Err(Error::NonPositiveMatrixEntry {
                        symbol,
                        value: v.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }
        Ok(Potential::MatrixProduct { dim, mats, norm })
    }

    pub fn explicit<F>(horizon: usize, f: F) -> Self
    where
        F: Fn(usize, &PeriodicWord) -> R + Send + Sync + 'static,
    {
        Potential::Explicit {
            horizon,
            eval: Arc::new(f),
        }
    }

    pub fn as_table(&self) -> Option<&LocalTable<R>> {
        match self {
            Potential::AdditiveLocal(t) => Some(t),
            _ => None,
        }
    }

    /// Effective range used to size coordinate windows (1 for non-additive
    /// variants, whose Gₙ depends only on coordinates 0..n−1).
    pub fn effective_range(&self) -> usize {
        match self {
            Potential::AdditiveLocal(t) => t.range,
            _ => 1,
        }
    }

    /// `Gₙ` evaluated at the point `φ^offset(x)` where `x` is the periodic
    /// point of `w`: cyclic window sums (additive), a rescaled matrix product
    /// over `n` letters (matrix product), or the evaluator (explicit, offset 0
    /// only meaningful there for n = period).
    pub fn eval_n_at(&self, w: &PeriodicWord, offset: usize, n: usize) -> Result<R> {
        let period = w.period();
        match self {
            Potential::AdditiveLocal(t) => {
                let mut acc = Kahan::new();
                let mut window = vec![0 as Symbol; t.range];
                for i in 0..n {
                    for (j, slot) in window.iter_mut().enumerate() {
                        *slot = w.letters()[(offset + i + j) % period];
                    }
                    let v = t.value(&window).ok_or_else(|| Error::MissingTableEntry {
                        word: window.clone(),
                    })?;
                    acc.add(v);
                }
                Ok(acc.total())
            }
            Potential::MatrixProduct { dim, mats, norm } => {
                let d = *dim;
                let mut cur = mats[w.letters()[offset % period] as usize].clone();
                let mut log_scale = R::zero();
                let nrm = matrix_norm(&cur, d, *norm);
                log_scale += nrm.ln();
                rescale(&mut cur, nrm);
                let mut buf = vec![R::zero(); d * d];
                for i in 1..n {
                    let m = &mats[w.letters()[(offset + i) % period] as usize];
                    mat_mul(&cur, m, &mut buf, d);
                    std::mem::swap(&mut cur, &mut buf);
                    let nrm = matrix_norm(&cur, d, *norm);
                    log_scale += nrm.ln();
                    rescale(&mut cur, nrm);
                }
                Ok(log_scale)
            }
            Potential::Explicit { horizon, eval } => {
                if n > *horizon {
                    return Err(Error::HorizonExceeded {
                        n,
                        horizon: *horizon,
                    });
                }
                let shifted = if offset % period == 0 {
                    w.clone()
                } else {
                    w.rotate(offset % period)
                };
                Ok(eval(n, &shifted))
            }
        }
    }

    /// Birkhoff value `Gₙ(w)` with n = period of w.
    pub fn birkhoff(&self, w: &PeriodicWord) -> Result<R> {
        self.eval_n_at(w, 0, w.period())
    }

    /// `Gₙ` evaluated non-cyclically on a linear word: the sum over the
    /// `n−r+1` complete windows for additive potentials, the plain matrix
    /// product for matrix products. Used by cylinder-level diagnostics.
    pub fn eval_linear(&self, u: &[Symbol]) -> Result<R> {
        match self {
            Potential::AdditiveLocal(t) => {
                if u.len() + 1 < t.range {
                    return Ok(R::zero());
                }
                let mut acc = Kahan::new();
                for win in u.windows(t.range) {
                    let v = t
                        .value(win)
                        .ok_or_else(|| Error::MissingTableEntry { word: win.to_vec() })?;
                    acc.add(v);
                }
                Ok(acc.total())
            }
            Potential::MatrixProduct { .. } => {
                let w = PeriodicWord::new(u.to_vec());
                // matrix product over exactly the letters of u; periodicity
                // is irrelevant because only coordinates 0..n-1 are touched
                self.eval_n_at(&w, 0, u.len())
            }
            Potential::Explicit { .. } => Err(Error::RequiresAdditive { got: "explicit" }),
        }
    }

    /// Pulls the table back through a reversal: time reversal reverses the
    /// r-word and permutes symbols, commutation permutes them in place. On
    /// periodic words, Birkhoff sums of the pulled-back table agree exactly
    /// with `Gₙ∘θₙ`.
    pub fn pull_back(&self, space: &ShiftSpace, theta: &Reversal) -> Result<Potential<R>> {
        theta.validate(space)?;
        let table = match self {
            Potential::AdditiveLocal(t) => t,
            other => {
                return Err(Error::RequiresAdditive {
                    got: other.variant_name(),
                })
            }
        };
        let mut pairs = Vec::new();
        for (w, _) in table.entries() {
            // the pulled-back table at w is the base table at the transformed
            // word: g'(u) = g(p(u_{r-1}),...,p(u_0)) for time reversal
            let src: Word = match theta.kind() {
                ReversalKind::TimeReversal => {
                    w.iter().rev().map(|&a| theta.apply_symbol(a)).collect()
                }
                ReversalKind::Commutation => w.iter().map(|&a| theta.apply_symbol(a)).collect(),
            };
            let v = table
                .value(&src)
                .ok_or(Error::SpuriousTableEntry { word: src.clone() })?;
            pairs.push((w, v));
        }
        Potential::additive(space, table.range, &pairs)
    }

    /// `σₙ(w) = Gₙ(w) − Gₙ(θₙ w)`.
    pub fn entropy_production(
        &self,
        space: &ShiftSpace,
        theta: &Reversal,
        w: &PeriodicWord,
    ) -> Result<R> {
        let reversed = space.apply_reversal(theta, w)?;
        Ok(self.birkhoff(w)? - self.birkhoff(&reversed)?)
    }

    /// Two-sided almost-additivity constant for matrix products with positive
    /// entries: C = log τ where τ bounds the row ratios of every generator,
    /// plus a norm-change allowance for non-operator norms.
    pub fn almost_additivity_constant(&self) -> Result<R> {
        match self {
            Potential::MatrixProduct { dim, mats, norm } => {
                let d = *dim;
                let mut tau = R::one();
                for m in mats {
                    for k in 0..d {
                        for i in 0..d {
                            for ip in 0..d {
                                let ratio = m[i * d + k] / m[ip * d + k];
                                if ratio > tau {
                                    tau = ratio;
                                }
                            }
                        }
                    }
                }
                let base = tau.ln();
                let adjust = match norm {
                    MatrixNorm::OpInfinity => R::zero(),
                    _ => R::of(3.0) * R::of_usize(d).ln(),
                };
                Ok(base + adjust)
            }
            other => Err(Error::RequiresAdditive {
                got: other.variant_name(),
            }),
        }
    }
}

/// `(1−α)·𝒢 + α·𝒢∘θ`. At α = 0 this is the base potential.
#[derive(Debug, Clone)]
pub struct TiltedPotential<'a, R: Real> {
    pub base: &'a Potential<R>,
    pub reversal: &'a Reversal,
    pub alpha: R,
}

impl<'a, R: Real> TiltedPotential<'a, R> {
    pub fn new(base: &'a Potential<R>, reversal: &'a Reversal, alpha: R) -> Self {
        Self {
            base,
            reversal,
            alpha,
        }
    }

    /// Birkhoff value of the tilted sequence on a periodic word.
    pub fn birkhoff(&self, space: &ShiftSpace, w: &PeriodicWord) -> Result<R> {
        let g = self.base.birkhoff(w)?;
        if self.alpha == R::zero() {
            return Ok(g);
        }
        let reversed = space.apply_reversal(self.reversal, w)?;
        let g_rev = self.base.birkhoff(&reversed)?;
        Ok((R::one() - self.alpha) * g + self.alpha * g_rev)
    }

    /// For additive bases, the tilt is again a locally constant table:
    /// `(1−α)g + α·g∘θ` with the pulled-back table. Exact on periodic words.
    pub fn as_additive(&self, space: &ShiftSpace) -> Result<Potential<R>> {
        let table = self.base.as_table().ok_or(Error::RequiresAdditive {
            got: self.base.variant_name(),
        })?;
        let pulled = self.base.pull_back(space, self.reversal)?;
        let pulled_table = pulled.as_table().expect("pull_back returns additive");
        let one_minus = R::one() - self.alpha;
        let pairs: Vec<(Word, R)> = table
            .entries()
            .into_iter()
            .map(|(w, v)| {
                let vp = pulled_table.value(&w).expect("same admissible domain");
                (w, one_minus * v + self.alpha * vp)
            })
            .collect();
        Potential::additive(space, table.range, &pairs)
    }
}

/// Finite-scale variation over Bowen balls: the Bowen ball `B_n(x, 2^{−k})`
/// on a two-sided shift pins the coordinates `−k..n−1+k`, realized here as a
/// cyclic window of that length inside m-periodic representatives. Returns
/// `max (1/n)|Gₙ(y) − Gₙ(z)|` over pairs agreeing on the window, maximizing
/// over `m`-periodic words (`m > n + 2k`, default `n + 2k + 4`).
pub fn variation<R: Real>(
    space: &ShiftSpace,
    g: &Potential<R>,
    n: usize,
    k: usize,
    m: Option<usize>,
) -> Result<R> {
    assert!(n >= 1);
    let m = m.unwrap_or(n + 2 * k + 4);
    assert!(m > n + 2 * k, "representative period must exceed n + 2k");
    let window = n + 2 * k;
    let mut groups: BTreeMap<Word, (R, R)> = BTreeMap::new();
    let mut err: Option<Error> = None;
    space.for_each_periodic(m, |letters| {
        if err.is_some() {
            return;
        }
        let w = PeriodicWord::new(letters.to_vec());
        // window anchored at coordinate −k
        let mut key = Vec::with_capacity(window);
        for i in 0..window {
            key.push(w.letter_at(i as isize - k as isize));
        }
        match g.eval_n_at(&w, 0, n) {
            Ok(v) => {
                groups
                    .entry(key)
                    .and_modify(|(lo, hi)| {
                        *lo = lo.min(v);
                        *hi = hi.max(v);
                    })
                    .or_insert((v, v));
            }
            Err(e) => err = Some(e),
        }
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    let mut worst = R::zero();
    for (lo, hi) in groups.values() {
        worst = worst.max(*hi - *lo);
    }
    Ok(worst / R::of_usize(n))
}

/// Asymptotic-additivity defect `max over Mₙ of (1/n)|Gₙ − k⁻¹ SₙG_k|`, with
/// the inner Birkhoff sum of `G_k` taken cyclically over all n start positions.
///
/// For additive tables the cyclic sum telescopes, `SₙG_k = k·Gₙ`, so the
/// defect is identically zero; the telescoped form is used there to keep the
/// result free of rounding noise. Matrix products and explicit sequences go
/// through the literal two-scale evaluation; for positive matrix products
/// the defect decays in k.
pub fn aa_defect<R: Real>(space: &ShiftSpace, g: &Potential<R>, k: usize, n: usize) -> Result<R> {
    assert!(k >= 1 && n >= 1);
    let additive = matches!(g, Potential::AdditiveLocal(_));
    let mut worst = R::zero();
    let mut err: Option<Error> = None;
    space.for_each_periodic(n, |letters| {
        if err.is_some() {
            return;
        }
        let w = PeriodicWord::new(letters.to_vec());
        let direct = match g.birkhoff(&w) {
            Ok(v) => v,
            Err(e) => {
                err = Some(e);
                return;
            }
        };
        if additive {
            return; // defect is exactly zero by telescoping
        }
        let mut acc = Kahan::new();
        for start in 0..n {
            match g.eval_n_at(&w, start, k) {
                Ok(v) => acc.add(v),
                Err(e) => {
                    err = Some(e);
                    return;
                }
            }
        }
        let approx = acc.total() / R::of_usize(k);
        worst = worst.max((direct - approx).abs());
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(worst / R::of_usize(n))
}

/// Finite-n proxy for the seminorm `limsup n⁻¹‖Gₙ‖∞` restricted to periodic
/// points: `max over Mₙ of |Gₙ(w)|/n`.
pub fn seminorm_estimate<R: Real>(space: &ShiftSpace, g: &Potential<R>, n: usize) -> Result<R> {
    let mut worst = R::zero();
    let mut err: Option<Error> = None;
    space.for_each_periodic(n, |letters| {
        if err.is_some() {
            return;
        }
        let w = PeriodicWord::new(letters.to_vec());
        match g.birkhoff(&w) {
            Ok(v) => worst = worst.max(v.abs()),
            Err(e) => err = Some(e),
        }
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(worst / R::of_usize(n))
}

fn admissible_window(space: &ShiftSpace, w: &[Symbol]) -> bool {
    if w.len() == 1 {
        return (w[0] as usize) < space.alphabet();
    }
    space.word_admissible_linear(w)
}

/// Visits every admissible window of length r (linear admissibility; single
/// letters are always admissible because no symbol is stranded).
fn for_each_window<F: FnMut(&[Symbol])>(space: &ShiftSpace, r: usize, mut f: F) {
    let mut buf: Word = Vec::with_capacity(r);
    fn rec<F: FnMut(&[Symbol])>(space: &ShiftSpace, r: usize, buf: &mut Word, f: &mut F) {
        if buf.len() == r {
            f(buf);
            return;
        }
        for a in 0..space.alphabet() as Symbol {
            if let Some(&last) = buf.last() {
                if !space.allowed(last, a) {
                    continue;
                }
            }
            buf.push(a);
            rec(space, r, buf, f);
            buf.pop();
        }
    }
    rec(space, r, &mut buf, &mut f);
}

fn matrix_norm<R: Real>(m: &[R], d: usize, norm: MatrixNorm) -> R {
    match norm {
        MatrixNorm::OpInfinity => {
            let mut best = R::zero();
            for i in 0..d {
                let mut row = Kahan::new();
                for j in 0..d {
                    row.add(m[i * d + j].abs());
                }
                best = best.max(row.total());
            }
            best
        }
        MatrixNorm::Frobenius => {
            let mut acc = Kahan::new();
            for v in m {
                acc.add(*v * *v);
            }
            acc.total().sqrt()
        }
        MatrixNorm::MaxAbs => m.iter().fold(R::zero(), |b, v| b.max(v.abs())),
    }
}

fn rescale<R: Real>(m: &mut [R], s: R) {
    for v in m.iter_mut() {
        *v = *v / s;
    }
}

fn mat_mul<R: Real>(a: &[R], b: &[R], out: &mut [R], d: usize) {
    for v in out.iter_mut() {
        *v = R::zero();
    }
    for i in 0..d {
        for k in 0..d {
            let aik = a[i * d + k];
            for j in 0..d {
                out[i * d + j] += aik * b[k * d + j];
            }
        }
    }
}

/// Parses a potential definition file: either `range` followed by one
/// `word value` line per admissible word, or `matrices N` followed by
/// `symbol s` blocks of N rows (with an optional `norm` line).
pub fn parse_potential<R: Real>(space: &ShiftSpace, text: &str) -> Result<Potential<R>> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let (first_no, first) = *lines.first().ok_or(Error::Parse {
        line: 0,
        msg: "empty potential file".into(),
    })?;
    let mut head = first.split_whitespace();
    match head.next() {
        Some("range") => {
            let range: usize = head
                .next()
                .ok_or(Error::Parse {
                    line: first_no,
                    msg: "range line needs a value".into(),
                })?
                .parse()
                .map_err(|e| Error::Parse {
                    line: first_no,
                    msg: format!("bad range: {e}"),
                })?;
            let mut pairs = Vec::new();
            for &(no, line) in &lines[1..] {
                let mut toks = line.split_whitespace();
                let word_tok = toks.next().ok_or(Error::Parse {
                    line: no,
                    msg: "expected `word value`".into(),
                })?;
                let val_tok = toks.next().ok_or(Error::Parse {
                    line: no,
                    msg: "missing value".into(),
                })?;
                let word = parse_word(word_tok).map_err(|msg| Error::Parse { line: no, msg })?;
                let value: f64 = val_tok.parse().map_err(|e| Error::Parse {
                    line: no,
                    msg: format!("bad value: {e}"),
                })?;
                pairs.push((word, R::of(value)));
            }
            Potential::additive(space, range, &pairs)
        }
        Some("matrices") => {
            let dim: usize = head
                .next()
                .ok_or(Error::Parse {
                    line: first_no,
                    msg: "matrices line needs a dimension".into(),
                })?
                .parse()
                .map_err(|e| Error::Parse {
                    line: first_no,
                    msg: format!("bad dimension: {e}"),
                })?;
            let mut mats: Vec<Vec<R>> = vec![Vec::new(); space.alphabet()];
            let mut norm = MatrixNorm::OpInfinity;
            let mut current: Option<usize> = None;
            for &(no, line) in &lines[1..] {
                if let Some(rest) = line.strip_prefix("symbol") {
                    let s: usize = rest.trim().parse().map_err(|e| Error::Parse {
                        line: no,
                        msg: format!("bad symbol index: {e}"),
                    })?;
                    if s >= space.alphabet() {
                        return Err(Error::Parse {
                            line: no,
                            msg: format!("symbol {s} outside the alphabet"),
                        });
                    }
                    current = Some(s);
                } else if let Some(rest) = line.strip_prefix("norm") {
                    norm = match rest.trim() {
                        "op_inf" => MatrixNorm::OpInfinity,
                        "frobenius" => MatrixNorm::Frobenius,
                        "max" => MatrixNorm::MaxAbs,
                        other => {
                            return Err(Error::Parse {
                                line: no,
                                msg: format!("unknown norm `{other}`"),
                            })
                        }
                    };
                } else {
                    let s = current.ok_or(Error::Parse {
                        line: no,
                        msg: "matrix row before any `symbol` line".into(),
                    })?;
                    for tok in line.split_whitespace() {
                        let v: f64 = tok.parse().map_err(|e| Error::Parse {
                            line: no,
                            msg: format!("bad matrix entry: {e}"),
                        })?;
                        mats[s].push(R::of(v));
                    }
                }
            }
            for (s, m) in mats.iter().enumerate() {
                if m.len() != dim * dim {
                    return Err(Error::Parse {
                        line: 0,
                        msg: format!(
                            "matrix for symbol {s} has {} entries, expected {}",
                            m.len(),
                            dim * dim
                        ),
                    });
                }
            }
            Potential::matrix_product(space, dim, mats, norm)
        }
        _ => Err(Error::Parse {
            line: first_no,
            msg: "potential file must start with `range` or `matrices`".into(),
        }),
    }
}

fn parse_word(tok: &str) -> std::result::Result<Word, String> {
    if tok.contains(',') {
        tok.split(',')
            .map(|t| t.parse::<Symbol>().map_err(|e| format!("bad symbol: {e}")))
            .collect()
    } else {
        tok.chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as Symbol)
                    .ok_or_else(|| format!("bad symbol char `{c}`"))
            })
            .collect()
    }
}
