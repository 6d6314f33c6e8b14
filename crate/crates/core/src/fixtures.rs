//! Bundled test systems: small shift spaces with potentials and reversals
//! that exercise both reversal kinds, ranges 1–3 and all potential variants.
//! The verify suite, the acceptance tests and the CLI negative controls all
//! draw from here.

use crate::potential::{MatrixNorm, Potential};
use crate::real::Real;
use crate::shift::{full_shift, golden_mean, Reversal, ReversalKind, ShiftSpace, Symbol, Word};

/// A named system under test.
#[derive(Debug, Clone)]
pub struct Fixture<R: Real> {
    pub name: &'static str,
    pub space: ShiftSpace,
    pub potential: Potential<R>,
    pub reversal: Option<Reversal>,
    /// Largest period the identity suites should enumerate for this fixture.
    pub n_cap: usize,
}

impl<R: Real> Fixture<R> {
    pub fn with_potential(mut self, g: Potential<R>) -> Self {
        self.potential = g;
        self
    }
}

fn log3<R: Real>() -> R {
    R::of(3.0).ln()
}

fn log2<R: Real>() -> R {
    R::of(2.0).ln()
}

fn range1<R: Real>(space: &ShiftSpace, g0: R, g1: R) -> Potential<R> {
    Potential::additive(space, 1, &[(vec![0], g0), (vec![1], g1)]).expect("valid range-1 table")
}

fn full2_range2<R: Real>(space: &ShiftSpace, vals: [f64; 4]) -> Potential<R> {
    Potential::additive(
        space,
        2,
        &[
            (vec![0, 0], R::of(vals[0])),
            (vec![0, 1], R::of(vals[1])),
            (vec![1, 0], R::of(vals[2])),
            (vec![1, 1], R::of(vals[3])),
        ],
    )
    .expect("valid range-2 table")
}

fn tr(perm: Vec<Symbol>) -> Reversal {
    Reversal::new(ReversalKind::TimeReversal, perm).expect("involutive permutation")
}

fn com(perm: Vec<Symbol>) -> Reversal {
    Reversal::new(ReversalKind::Commutation, perm).expect("involutive permutation")
}

/// The Bernoulli closed-form fixture used by the acceptance suite: full
/// 2-shift, `g = (0, log 2)`, time reversal with the symbol swap. Its σₙ law
/// is a transformed binomial with every quantity available in closed form.
pub fn bernoulli_acceptance<R: Real>() -> Fixture<R> {
    let space = full_shift(2);
    let potential = range1(&space, R::zero(), log2());
    Fixture {
        name: "full2-r1-log2-tr-swap",
        space,
        potential,
        reversal: Some(tr(vec![1, 0])),
        n_cap: 20,
    }
}

/// Same system with `g = (0, log 3)`, matching the closed-form unit examples.
pub fn bernoulli_log3<R: Real>() -> Fixture<R> {
    let space = full_shift(2);
    let potential = range1(&space, R::zero(), log3());
    Fixture {
        name: "full2-r1-log3-tr-swap",
        space,
        potential,
        reversal: Some(tr(vec![1, 0])),
        n_cap: 16,
    }
}

/// Range-2 asymmetric table `g(01) = 1`, the weak-Gibbs workhorse.
pub fn asym_range2<R: Real>() -> Fixture<R> {
    let space = full_shift(2);
    let potential = full2_range2(&space, [0.0, 1.0, 0.0, 0.0]);
    Fixture {
        name: "full2-r2-asym-tr-id",
        space,
        potential,
        reversal: Some(tr(vec![0, 1])),
        n_cap: 16,
    }
}

/// Strictly positive 2×2 matrix-product potential on the full 2-shift.
pub fn matrix_product<R: Real>() -> Fixture<R> {
    let space = full_shift(2);
    let potential = Potential::matrix_product(
        &space,
        2,
        vec![
            vec![R::of(2.0), R::of(1.0), R::of(1.0), R::of(1.0)],
            vec![R::of(1.0), R::of(1.0), R::of(1.0), R::of(2.0)],
        ],
        MatrixNorm::OpInfinity,
    )
    .expect("positive matrices");
    Fixture {
        name: "full2-mp-pos-tr-id",
        space,
        potential,
        reversal: Some(tr(vec![0, 1])),
        n_cap: 16,
    }
}

/// The product of the golden-mean shift with itself and the component-swap
/// commutation; the potential reads the first component only.
pub fn golden_product<R: Real>() -> Fixture<R> {
    let gm = golden_mean();
    let (space, swap) = gm.product_system(&gm).expect("identical factors");
    let l = gm.alphabet() as Symbol;
    let pairs: Vec<(Word, R)> = space
        .admissible_words(1)
        .expect("alphabet words")
        .into_iter()
        .map(|w| {
            let first = w[0] / l;
            let v = if first == 1 { log3() } else { R::zero() };
            (w, v)
        })
        .collect();
    let potential = Potential::additive(&space, 1, &pairs).expect("valid pair table");
    Fixture {
        name: "golden-sq-r1-com-swap",
        space,
        potential,
        reversal: Some(swap),
        n_cap: 8,
    }
}

/// Every bundled fixture, in a fixed order.
pub fn bundled<R: Real>() -> Vec<Fixture<R>> {
    let full = full_shift(2);
    let gm = golden_mean();
    let mut out = Vec::new();

    out.push(Fixture {
        name: "full2-r1-log3-tr-id",
        space: full.clone(),
        potential: range1(&full, R::zero(), log3()),
        reversal: Some(tr(vec![0, 1])),
        n_cap: 16,
    });
    out.push(bernoulli_log3());
    out.push(bernoulli_acceptance());
    out.push(Fixture {
        name: "full2-r1-log3-com-swap",
        space: full.clone(),
        potential: range1(&full, R::zero(), log3()),
        reversal: Some(com(vec![1, 0])),
        n_cap: 16,
    });
    out.push(asym_range2());
    out.push(Fixture {
        name: "full2-r2-mixed-tr-swap",
        space: full.clone(),
        potential: full2_range2(&full, [0.5, 1.0, 0.0, -0.3]),
        reversal: Some(tr(vec![1, 0])),
        n_cap: 16,
    });
    out.push(Fixture {
        name: "full2-r2-mixed-com-swap",
        space: full.clone(),
        potential: full2_range2(&full, [0.5, 1.0, 0.0, -0.3]),
        reversal: Some(com(vec![1, 0])),
        n_cap: 16,
    });
    out.push(Fixture {
        name: "golden-r1-log3-tr-id",
        space: gm.clone(),
        potential: range1(&gm, R::zero(), log3()),
        reversal: Some(tr(vec![0, 1])),
        n_cap: 16,
    });
    out.push(Fixture {
        name: "golden-r2-mixed-tr-id",
        space: gm.clone(),
        potential: Potential::additive(
            &gm,
            2,
            &[
                (vec![0, 0], R::of(0.3)),
                (vec![0, 1], R::of(-0.7)),
                (vec![1, 0], R::of(1.1)),
            ],
        )
        .expect("valid golden-mean table"),
        reversal: Some(tr(vec![0, 1])),
        n_cap: 16,
    });
    out.push(Fixture {
        name: "golden-r1-log3-com-id",
        space: gm.clone(),
        potential: range1(&gm, R::zero(), log3()),
        reversal: Some(com(vec![0, 1])),
        n_cap: 16,
    });
    out.push(Fixture {
        name: "golden-r3-mixed-tr-id",
        space: gm.clone(),
        potential: Potential::additive(
            &gm,
            3,
            &[
                (vec![0, 0, 0], R::of(0.2)),
                (vec![0, 0, 1], R::of(-0.4)),
                (vec![0, 1, 0], R::of(0.9)),
                (vec![1, 0, 0], R::of(-0.1)),
                (vec![1, 0, 1], R::of(0.6)),
            ],
        )
        .expect("valid range-3 table"),
        reversal: Some(tr(vec![0, 1])),
        n_cap: 16,
    });
    out.push(matrix_product());
    out.push(golden_product());
    out
}
