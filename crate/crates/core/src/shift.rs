//! Two-sided subshifts of finite type, their periodic orbits and reversal maps.
//!
//! A two-sided sequence of period `n` is determined by its period word, so all
//! evaluation in this crate is cyclic in the word; this is exact, not an
//! approximation.

use crate::error::Error;
use crate::Result;

/// Alphabet symbol. Product systems square the alphabet, so this is wider
/// than `u8`.
pub type Symbol = u16;
/// A finite word over the alphabet.
pub type Word = Vec<Symbol>;

/// Default cap on `ℓⁿ` when enumerating words of length `n`.
pub const DEFAULT_ENUM_CAP: u128 = 1 << 24;

/// A subshift of finite type: a finite alphabet together with a 0/1 transition
/// matrix. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftSpace {
    alphabet: usize,
    transitions: Vec<bool>, // row-major alphabet × alphabet
    primitivity_power: Option<usize>,
    enum_cap: u128,
}

/// An n-periodic point, represented by its period word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PeriodicWord {
    letters: Word,
}

impl PeriodicWord {
    pub fn new(letters: Word) -> Self {
        assert!(!letters.is_empty(), "periodic word needs period >= 1");
        Self { letters }
    }

    pub fn period(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Symbol] {
        &self.letters
    }

    /// Letter at absolute coordinate `i` of the bi-infinite sequence
    /// (cyclic index, negative coordinates allowed).
    pub fn letter_at(&self, i: isize) -> Symbol {
        let n = self.letters.len() as isize;
        let idx = i.rem_euclid(n) as usize;
        self.letters[idx]
    }

    /// The periodic point advanced by `k` shifts: letters rotated left.
    pub fn rotate(&self, k: usize) -> PeriodicWord {
        let n = self.letters.len();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.letters[(i + k) % n]);
        }
        PeriodicWord::new(out)
    }
}

/// Which involution the reversal implements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReversalKind {
    /// θ conjugates the shift to its inverse: θ(x)_j = p(x_{-j}).
    TimeReversal,
    /// θ commutes with the shift: θ(x)_j = p(x_j).
    Commutation,
}

impl ReversalKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ReversalKind::TimeReversal => "reversal",
            ReversalKind::Commutation => "commutation",
        }
    }
}

/// An involutive reversal map built from a symbol permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reversal {
    kind: ReversalKind,
    perm: Vec<Symbol>,
}

impl Reversal {
    /// Builds a reversal and checks that `perm` is an involution. Compatibility
    /// with a particular space is checked by [`Reversal::validate`].
    pub fn new(kind: ReversalKind, perm: Vec<Symbol>) -> Result<Self> {
        for (a, &pa) in perm.iter().enumerate() {
            let pa = pa as usize;
            if pa >= perm.len() {
                return Err(Error::IncompatibleReversal {
                    reason: format!("permutation maps {a} to {pa}, outside the alphabet"),
                });
            }
            if perm[pa] as usize != a {
                return Err(Error::IncompatibleReversal {
                    reason: format!("permutation is not involutive at symbol {a}"),
                });
            }
        }
        Ok(Self { kind, perm })
    }

    pub fn identity(kind: ReversalKind, alphabet: usize) -> Self {
        Self {
            kind,
            perm: (0..alphabet as Symbol).collect(),
        }
    }

    pub fn kind(&self) -> ReversalKind {
        self.kind
    }

    pub fn perm(&self) -> &[Symbol] {
        &self.perm
    }

    pub fn apply_symbol(&self, a: Symbol) -> Symbol {
        self.perm[a as usize]
    }

    /// Checks the admissibility-preservation condition on `space`:
    /// time reversal needs `A[p(b)][p(a)] = A[a][b]`, commutation needs
    /// `A[p(a)][p(b)] = A[a][b]`.
    pub fn validate(&self, space: &ShiftSpace) -> Result<()> {
        if self.perm.len() != space.alphabet() {
            return Err(Error::IncompatibleReversal {
                reason: format!(
                    "permutation is on {} symbols, space has {}",
                    self.perm.len(),
                    space.alphabet()
                ),
            });
        }
        for a in 0..space.alphabet() {
            for b in 0..space.alphabet() {
                let pa = self.perm[a] as usize;
                let pb = self.perm[b] as usize;
                let ok = match self.kind {
                    ReversalKind::TimeReversal => {
                        space.allowed_idx(pb, pa) == space.allowed_idx(a, b)
                    }
                    ReversalKind::Commutation => {
                        space.allowed_idx(pa, pb) == space.allowed_idx(a, b)
                    }
                };
                if !ok {
                    return Err(Error::IncompatibleReversal {
                        reason: format!(
                            "admissibility check fails at pair ({a},{b}) under kind {}",
                            self.kind.as_str()
                        ),
                    });
                }
            }
        }
        Ok(())
    }

    /// Serializes to the two-line text form.
    pub fn to_text(&self) -> String {
        let perm: Vec<String> = self.perm.iter().map(|p| p.to_string()).collect();
        format!("p: {}\nkind: {}\n", perm.join(" "), self.kind.as_str())
    }

    /// Parses the two-line text form: `p: 1 0` then `kind: reversal|commutation`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut perm: Option<Vec<Symbol>> = None;
        let mut kind: Option<ReversalKind> = None;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("p:") {
                let parsed: std::result::Result<Vec<Symbol>, _> =
                    rest.split_whitespace().map(str::parse).collect();
                perm = Some(parsed.map_err(|e| Error::Parse {
                    line: i + 1,
                    msg: format!("bad permutation entry: {e}"),
                })?);
            } else if let Some(rest) = line.strip_prefix("kind:") {
                kind = Some(match rest.trim() {
                    "reversal" => ReversalKind::TimeReversal,
                    "commutation" => ReversalKind::Commutation,
                    other => {
                        return Err(Error::Parse {
                            line: i + 1,
                            msg: format!("unknown reversal kind `{other}`"),
                        })
                    }
                });
            } else {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("unexpected line `{line}` in reversal file"),
                });
            }
        }
        let perm = perm.ok_or(Error::Parse {
            line: 0,
            msg: "missing `p:` line".into(),
        })?;
        let kind = kind.ok_or(Error::Parse {
            line: 0,
            msg: "missing `kind:` line".into(),
        })?;
        Reversal::new(kind, perm)
    }
}

impl ShiftSpace {
    /// Builds a validated shift space from a 0/1 matrix given as rows.
    ///
    /// Rejects matrices with an all-zero row or column (stranded symbols).
    /// Non-primitive matrices are accepted; [`ShiftSpace::primitivity_power`]
    /// is then `None` and callers may treat pressure limits as subsequence
    /// statements only.
    pub fn new_sft(alphabet_size: usize, transitions: &[Vec<u8>]) -> Result<Self> {
        if transitions.len() != alphabet_size {
            return Err(Error::NonSquareMatrix {
                rows: transitions.len(),
                expected: alphabet_size,
            });
        }
        let mut flat = vec![false; alphabet_size * alphabet_size];
        for (i, row) in transitions.iter().enumerate() {
            if row.len() != alphabet_size {
                return Err(Error::NonSquareMatrix {
                    rows: row.len(),
                    expected: alphabet_size,
                });
            }
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => flat[i * alphabet_size + j] = true,
                    other => {
                        return Err(Error::NonBinaryEntry {
                            row: i,
                            col: j,
                            value: other as i64,
                        })
                    }
                }
            }
        }
        for i in 0..alphabet_size {
            if !(0..alphabet_size).any(|j| flat[i * alphabet_size + j]) {
                return Err(Error::StrandedSymbol {
                    kind: "row",
                    index: i,
                });
            }
            if !(0..alphabet_size).any(|j| flat[j * alphabet_size + i]) {
                return Err(Error::StrandedSymbol {
                    kind: "column",
                    index: i,
                });
            }
        }
        let mut space = Self {
            alphabet: alphabet_size,
            transitions: flat,
            primitivity_power: None,
            enum_cap: DEFAULT_ENUM_CAP,
        };
        space.primitivity_power = space.compute_primitivity(2 * alphabet_size * alphabet_size);
        Ok(space)
    }

    /// Smallest m with all entries of Aᵐ positive, searched up to `cap`.
    /// The primitivity index of an ℓ×ℓ primitive matrix is ≤ (ℓ−1)²+1, so the
    /// default cap 2ℓ² is conclusive.
    fn compute_primitivity(&self, cap: usize) -> Option<usize> {
        let l = self.alphabet;
        let mut power = self.transitions.clone();
        for m in 1..=cap.max(1) {
            if power.iter().all(|&x| x) {
                return Some(m);
            }
            // boolean multiply power <- power * A
            let mut next = vec![false; l * l];
            for i in 0..l {
                for k in 0..l {
                    if power[i * l + k] {
                        for j in 0..l {
                            if self.transitions[k * l + j] {
                                next[i * l + j] = true;
                            }
                        }
                    }
                }
            }
            power = next;
        }
        None
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    /// `Some(m)` with m minimal such that Aᵐ > 0; `None` when not primitive.
    pub fn primitivity_power(&self) -> Option<usize> {
        self.primitivity_power
    }

    /// True when the matrix failed the primitivity search.
    pub fn non_primitive_warning(&self) -> bool {
        self.primitivity_power.is_none()
    }

    pub fn enum_cap(&self) -> u128 {
        self.enum_cap
    }

    /// Returns a copy with a different enumeration cap.
    pub fn with_enum_cap(mut self, cap: u128) -> Self {
        self.enum_cap = cap;
        self
    }

    #[inline]
    fn allowed_idx(&self, a: usize, b: usize) -> bool {
        self.transitions[a * self.alphabet + b]
    }

    #[inline]
    pub fn allowed(&self, a: Symbol, b: Symbol) -> bool {
        self.allowed_idx(a as usize, b as usize)
    }

    /// Number of allowed transitions (nonzero entries of A).
    pub fn transition_count(&self) -> usize {
        self.transitions.iter().filter(|&&x| x).count()
    }

    pub fn word_admissible_linear(&self, w: &[Symbol]) -> bool {
        w.iter().all(|&a| (a as usize) < self.alphabet)
            && w.windows(2).all(|p| self.allowed(p[0], p[1]))
    }

    pub fn word_admissible_cyclic(&self, w: &[Symbol]) -> bool {
        if w.is_empty() || !self.word_admissible_linear(w) {
            return false;
        }
        self.allowed(w[w.len() - 1], w[0])
    }

    fn check_cap(&self, n: usize, what: &str) -> Result<()> {
        let requested = (self.alphabet as u128)
            .checked_pow(n as u32)
            .unwrap_or(u128::MAX);
        if requested > self.enum_cap {
            return Err(Error::EnumerationCap {
                what: format!("{what} of length {n}"),
                requested,
                cap: self.enum_cap,
            });
        }
        Ok(())
    }

    /// Visits every cyclically admissible word of length `n` in lexicographic
    /// order without materializing the list.
    pub fn for_each_periodic<F: FnMut(&[Symbol])>(&self, n: usize, mut f: F) -> Result<()> {
        assert!(n >= 1, "period must be >= 1");
        self.check_cap(n, "periodic points")?;
        let mut buf: Word = Vec::with_capacity(n);
        self.dfs_periodic(n, &mut buf, &mut f);
        Ok(())
    }

    fn dfs_periodic<F: FnMut(&[Symbol])>(&self, n: usize, buf: &mut Word, f: &mut F) {
        if buf.len() == n {
            if self.allowed(buf[n - 1], buf[0]) {
                f(buf);
            }
            return;
        }
        for a in 0..self.alphabet as Symbol {
            if let Some(&last) = buf.last() {
                if !self.allowed(last, a) {
                    continue;
                }
            }
            buf.push(a);
            self.dfs_periodic(n, buf, f);
            buf.pop();
        }
    }

    /// All cyclically admissible words of length n, lexicographically ordered.
    /// The count equals `trace(Aⁿ)`.
    pub fn periodic_points(&self, n: usize) -> Result<Vec<PeriodicWord>> {
        let mut out = Vec::new();
        self.for_each_periodic(n, |w| out.push(PeriodicWord::new(w.to_vec())))?;
        Ok(out)
    }

    /// Visits every (linearly) admissible word of length `n` in lexicographic
    /// order.
    pub fn for_each_admissible<F: FnMut(&[Symbol])>(&self, n: usize, mut f: F) -> Result<()> {
        assert!(n >= 1);
        self.check_cap(n, "admissible words")?;
        let mut buf: Word = Vec::with_capacity(n);
        self.dfs_linear(n, &mut buf, &mut f);
        Ok(())
    }

    fn dfs_linear<F: FnMut(&[Symbol])>(&self, n: usize, buf: &mut Word, f: &mut F) {
        if buf.len() == n {
            f(buf);
            return;
        }
        for a in 0..self.alphabet as Symbol {
            if let Some(&last) = buf.last() {
                if !self.allowed(last, a) {
                    continue;
                }
            }
            buf.push(a);
            self.dfs_linear(n, buf, f);
            buf.pop();
        }
    }

    /// Admissible linear words of length n, lexicographically ordered.
    pub fn admissible_words(&self, n: usize) -> Result<Vec<Word>> {
        let mut out = Vec::new();
        self.for_each_admissible(n, |w| out.push(w.to_vec()))?;
        Ok(out)
    }

    /// `trace(Aⁿ)` by exact integer matrix powers with 128-bit accumulation.
    pub fn count_periodic(&self, n: usize) -> Result<u128> {
        assert!(n >= 1);
        let l = self.alphabet;
        let base: Vec<u128> = self
            .transitions
            .iter()
            .map(|&b| if b { 1 } else { 0 })
            .collect();
        // binary exponentiation with checked arithmetic
        let mul = |x: &[u128], y: &[u128]| -> Result<Vec<u128>> {
            let mut out = vec![0u128; l * l];
            for i in 0..l {
                for k in 0..l {
                    let xik = x[i * l + k];
                    if xik == 0 {
                        continue;
                    }
                    for j in 0..l {
                        let prod = xik
                            .checked_mul(y[k * l + j])
                            .ok_or(Error::CountOverflow { n })?;
                        out[i * l + j] = out[i * l + j]
                            .checked_add(prod)
                            .ok_or(Error::CountOverflow { n })?;
                    }
                }
            }
            Ok(out)
        };
        let mut result: Option<Vec<u128>> = None;
        let mut sq = base;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = Some(match result {
                    None => sq.clone(),
                    Some(r) => mul(&r, &sq)?,
                });
            }
            e >>= 1;
            if e > 0 {
                sq = mul(&sq, &sq)?;
            }
        }
        let m = result.expect("n >= 1");
        let mut tr: u128 = 0;
        for i in 0..l {
            tr = tr
                .checked_add(m[i * l + i])
                .ok_or(Error::CountOverflow { n })?;
        }
        Ok(tr)
    }

    /// Applies a reversal to a periodic word.
    ///
    /// Time reversal returns θₙ⁻(w) with letters `p(w[(n-1-j) mod n])`
    /// (reverse, then permute); commutation returns θₙ⁺(w) = letterwise
    /// permutation. Both are involutions mapping Mₙ onto itself.
    pub fn apply_reversal(&self, theta: &Reversal, w: &PeriodicWord) -> Result<PeriodicWord> {
        theta.validate(self)?;
        if !self.word_admissible_cyclic(w.letters()) {
            return Err(Error::InadmissibleWord {
                word: w.letters().to_vec(),
            });
        }
        let n = w.period();
        let mut out = Vec::with_capacity(n);
        match theta.kind() {
            ReversalKind::TimeReversal => {
                for j in 0..n {
                    out.push(theta.apply_symbol(w.letters()[(n - 1 - j) % n]));
                }
            }
            ReversalKind::Commutation => {
                for j in 0..n {
                    out.push(theta.apply_symbol(w.letters()[j]));
                }
            }
        }
        let result = PeriodicWord::new(out);
        debug_assert!(self.word_admissible_cyclic(result.letters()));
        Ok(result)
    }

    /// The product of a space with itself, with the pair-swap commutation map.
    ///
    /// Pair (a,b) becomes symbol `a·ℓ + b`; the product matrix is
    /// `A'[(a,b)][(a',b')] = A[a][a']·A[b][b']` and the swap permutation
    /// exchanges pair components.
    pub fn product_system(&self, other: &ShiftSpace) -> Result<(ShiftSpace, Reversal)> {
        if self.alphabet != other.alphabet || self.transitions != other.transitions {
            return Err(Error::MismatchedFactors);
        }
        let l = self.alphabet;
        let l2 = l * l;
        let mut rows = vec![vec![0u8; l2]; l2];
        for a in 0..l {
            for b in 0..l {
                for ap in 0..l {
                    for bp in 0..l {
                        if self.allowed_idx(a, ap) && self.allowed_idx(b, bp) {
                            rows[a * l + b][ap * l + bp] = 1;
                        }
                    }
                }
            }
        }
        let product = ShiftSpace::new_sft(l2, &rows)?.with_enum_cap(self.enum_cap);
        let mut perm = Vec::with_capacity(l2);
        for a in 0..l {
            for b in 0..l {
                perm.push((b * l + a) as Symbol);
            }
        }
        let swap = Reversal::new(ReversalKind::Commutation, perm)?;
        swap.validate(&product)?;
        Ok((product, swap))
    }

    /// Serializes to the text format: first line ℓ, then ℓ rows of 0/1.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.alphabet);
        for i in 0..self.alphabet {
            let row: Vec<&str> = (0..self.alphabet)
                .map(|j| if self.allowed_idx(i, j) { "1" } else { "0" })
                .collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    /// Parses the text format produced by [`ShiftSpace::to_text`].
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line_no, first) = lines.next().ok_or(Error::Parse {
            line: 0,
            msg: "empty shift-space file".into(),
        })?;
        let l: usize = first.parse().map_err(|e| Error::Parse {
            line: line_no,
            msg: format!("bad alphabet size: {e}"),
        })?;
        let mut rows = Vec::with_capacity(l);
        for _ in 0..l {
            let (line_no, row_text) = lines.next().ok_or(Error::Parse {
                line: 0,
                msg: format!("expected {l} matrix rows"),
            })?;
            let row: std::result::Result<Vec<u8>, _> =
                row_text.split_whitespace().map(str::parse).collect();
            rows.push(row.map_err(|e| Error::Parse {
                line: line_no,
                msg: format!("bad matrix entry: {e}"),
            })?);
        }
        ShiftSpace::new_sft(l, &rows)
    }
}

/// The full shift on `l` symbols.
pub fn full_shift(l: usize) -> ShiftSpace {
    let rows = vec![vec![1u8; l]; l];
    ShiftSpace::new_sft(l, &rows).expect("full shift is always valid")
}

/// The golden-mean shift: words over {0,1} with no factor 11.
pub fn golden_mean() -> ShiftSpace {
    ShiftSpace::new_sft(2, &[vec![1, 1], vec![1, 0]]).expect("golden mean shift is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force oracle: filter all ℓⁿ letter tuples by cyclic admissibility.
    fn brute_periodic(space: &ShiftSpace, n: usize) -> Vec<Word> {
        let l = space.alphabet();
        let total = (l as u64).pow(n as u32);
        let mut out = Vec::new();
        for code in 0..total {
            let mut w = Vec::with_capacity(n);
            let mut c = code;
            for _ in 0..n {
                w.push((c % l as u64) as Symbol);
                c /= l as u64;
            }
            w.reverse(); // most-significant digit first => lexicographic order
            if space.word_admissible_cyclic(&w) {
                out.push(w);
            }
        }
        out
    }

    #[test]
    fn full_shift_is_primitive_at_one() {
        let s = full_shift(2);
        assert_eq!(s.primitivity_power(), Some(1));
        assert!(!s.non_primitive_warning());
    }

    #[test]
    fn golden_mean_primitivity_is_two() {
        // A² = [[2,1],[1,1]] by hand: all entries positive, A itself is not.
        let s = golden_mean();
        assert_eq!(s.primitivity_power(), Some(2));
    }

    #[test]
    fn identity_matrix_is_non_primitive_but_accepted() {
        let s = ShiftSpace::new_sft(2, &[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(s.primitivity_power(), None);
        assert!(s.non_primitive_warning());
    }

    #[test]
    fn stranded_symbols_are_rejected() {
        let zero_row = ShiftSpace::new_sft(2, &[vec![0, 0], vec![1, 1]]);
        assert!(matches!(
            zero_row,
            Err(Error::StrandedSymbol { kind: "row", .. })
        ));
        let zero_col = ShiftSpace::new_sft(2, &[vec![1, 0], vec![1, 0]]);
        assert!(matches!(
            zero_col,
            Err(Error::StrandedSymbol { kind: "column", .. })
        ));
        let non_binary = ShiftSpace::new_sft(2, &[vec![1, 2], vec![1, 1]]);
        assert!(matches!(non_binary, Err(Error::NonBinaryEntry { .. })));
    }

    #[test]
    fn full_shift_period_three_has_all_words() {
        let s = full_shift(2);
        let pts = s.periodic_points(3).unwrap();
        assert_eq!(pts.len(), 8);
        let brute = brute_periodic(&s, 3);
        let got: Vec<Word> = pts.iter().map(|w| w.letters().to_vec()).collect();
        assert_eq!(got, brute);
    }

    #[test]
    fn golden_mean_counts_match_brute_force() {
        let s = golden_mean();
        // trace(Aⁿ) are the Lucas numbers 1, 3, 4, 7, ...
        let expected = [1usize, 3, 4, 7];
        for (i, &cnt) in expected.iter().enumerate() {
            let n = i + 1;
            let brute = brute_periodic(&s, n);
            assert_eq!(brute.len(), cnt, "n={n}");
            let pts = s.periodic_points(n).unwrap();
            let got: Vec<Word> = pts.iter().map(|w| w.letters().to_vec()).collect();
            assert_eq!(got, brute);
            assert_eq!(s.count_periodic(n).unwrap(), cnt as u128);
        }
    }

    #[test]
    fn golden_mean_period_two_excludes_11() {
        let s = golden_mean();
        let pts = s.periodic_points(2).unwrap();
        let got: Vec<Word> = pts.iter().map(|w| w.letters().to_vec()).collect();
        assert_eq!(got, vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn count_periodic_examples() {
        assert_eq!(full_shift(2).count_periodic(10).unwrap(), 1024);
        assert_eq!(golden_mean().count_periodic(4).unwrap(), 7);
        // fixed points are self-loops
        let s = ShiftSpace::new_sft(2, &[vec![1, 1], vec![1, 0]]).unwrap();
        assert_eq!(s.count_periodic(1).unwrap(), 1);
    }

    #[test]
    fn count_periodic_overflows_cleanly() {
        let s = full_shift(2);
        assert!(matches!(
            s.count_periodic(200),
            Err(Error::CountOverflow { .. })
        ));
    }

    #[test]
    fn enumeration_cap_error_names_the_cap() {
        let s = full_shift(2).with_enum_cap(1 << 10);
        let err = s.periodic_points(11).unwrap_err();
        match err {
            Error::EnumerationCap { cap, requested, .. } => {
                assert_eq!(cap, 1 << 10);
                assert_eq!(requested, 1 << 11);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn time_reversal_reverses_and_permutes() {
        let s = full_shift(2);
        let id = Reversal::identity(ReversalKind::TimeReversal, 2);
        let w = PeriodicWord::new(vec![0, 1, 1]);
        // y_j = x_{n-1-j}: direct evaluation of θ∘φ² on the periodic sequence
        let y = s.apply_reversal(&id, &w).unwrap();
        assert_eq!(y.letters(), &[1, 1, 0]);
    }

    #[test]
    fn commutation_permutes_letterwise() {
        let s = full_shift(2);
        let swap = Reversal::new(ReversalKind::Commutation, vec![1, 0]).unwrap();
        let w = PeriodicWord::new(vec![0, 1, 0]);
        let y = s.apply_reversal(&swap, &w).unwrap();
        assert_eq!(y.letters(), &[1, 0, 1]);
    }

    #[test]
    fn reversal_is_involution_and_bijection_on_periodic_points() {
        let s = golden_mean();
        let id = Reversal::identity(ReversalKind::TimeReversal, 2);
        for n in 1..=6 {
            let pts = s.periodic_points(n).unwrap();
            let mut image: Vec<Word> = Vec::new();
            for w in &pts {
                let y = s.apply_reversal(&id, w).unwrap();
                let back = s.apply_reversal(&id, &y).unwrap();
                assert_eq!(&back, w);
                image.push(y.letters().to_vec());
            }
            image.sort();
            let orig: Vec<Word> = pts.iter().map(|w| w.letters().to_vec()).collect();
            assert_eq!(image, orig, "θₙ must map Mₙ onto itself");
        }
    }

    #[test]
    fn rotation_closure_of_periodic_points() {
        let s = golden_mean();
        let pts = s.periodic_points(5).unwrap();
        let all: std::collections::HashSet<Word> =
            pts.iter().map(|w| w.letters().to_vec()).collect();
        for w in &pts {
            for k in 0..w.period() {
                assert!(all.contains(w.rotate(k).letters()));
            }
        }
    }

    #[test]
    fn primitive_spaces_have_periodic_points_beyond_the_power() {
        let s = golden_mean();
        let m = s.primitivity_power().unwrap();
        for n in m..=12 {
            assert!(s.count_periodic(n).unwrap() >= 1);
        }
    }

    #[test]
    fn incompatible_reversal_is_rejected() {
        // golden mean: swap permutation maps the forbidden word 11 onto 00
        let s = golden_mean();
        let swap_tr = Reversal::new(ReversalKind::TimeReversal, vec![1, 0]).unwrap();
        assert!(swap_tr.validate(&s).is_err());
        let swap_com = Reversal::new(ReversalKind::Commutation, vec![1, 0]).unwrap();
        assert!(swap_com.validate(&s).is_err());
    }

    #[test]
    fn non_involutive_permutation_is_rejected() {
        assert!(Reversal::new(ReversalKind::Commutation, vec![1, 2, 0]).is_err());
    }

    #[test]
    fn product_of_full_shifts_is_full_on_pairs() {
        let s = full_shift(2);
        let (p, swap) = s.product_system(&s).unwrap();
        assert_eq!(p.alphabet(), 4);
        assert_eq!(p.transition_count(), 16);
        // swap fixes the diagonal pairs (0,0) and (1,1)
        assert_eq!(swap.apply_symbol(0), 0);
        assert_eq!(swap.apply_symbol(3), 3);
        assert_eq!(swap.apply_symbol(1), 2);
        assert_eq!(swap.apply_symbol(2), 1);
    }

    #[test]
    fn product_of_golden_mean_has_nine_transitions() {
        let s = golden_mean();
        let (p, swap) = s.product_system(&s).unwrap();
        assert_eq!(p.alphabet(), 4);
        // nnz(A ⊗ A) = (nnz A)² = 9
        assert_eq!(p.transition_count(), 9);
        // swap is an involution on admissible words
        for w in p.periodic_points(4).unwrap() {
            let y = p.apply_reversal(&swap, &w).unwrap();
            assert_eq!(p.apply_reversal(&swap, &y).unwrap(), w);
        }
    }

    #[test]
    fn product_requires_identical_factors() {
        let err = full_shift(2).product_system(&golden_mean());
        assert!(matches!(err, Err(Error::MismatchedFactors)));
    }

    #[test]
    fn shift_space_text_round_trip() {
        let s = golden_mean();
        let parsed = ShiftSpace::parse(&s.to_text()).unwrap();
        assert_eq!(parsed, s);
        let r = Reversal::new(ReversalKind::TimeReversal, vec![0, 1]).unwrap();
        let parsed_r = Reversal::parse(&r.to_text()).unwrap();
        assert_eq!(parsed_r, r);
    }
}
