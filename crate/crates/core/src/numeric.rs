//! Small numerical kernels: compensated summation and stable log-sum-exp.

use crate::real::Real;

/// Kahan compensated accumulator.
#[derive(Debug, Clone, Copy)]
pub struct Kahan<R: Real> {
    sum: R,
    carry: R,
}

impl<R: Real> Default for Kahan<R> {
    fn default() -> Self {
        Self {
            sum: R::zero(),
            carry: R::zero(),
        }
    }
}

impl<R: Real> Kahan<R> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: R) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn total(&self) -> R {
        self.sum
    }
}

/// Streaming log-sum-exp: tracks the running maximum and a compensated sum of
/// rescaled exponentials, so `ln Σ exp(vᵢ)` never overflows.
#[derive(Debug, Clone, Copy)]
pub struct StreamLse<R: Real> {
    max: R,
    sum: Kahan<R>,
    count: usize,
}

impl<R: Real> Default for StreamLse<R> {
    fn default() -> Self {
        Self {
            max: R::neg_infinity(),
            sum: Kahan::new(),
            count: 0,
        }
    }
}

impl<R: Real> StreamLse<R> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, v: R) {
        self.count += 1;
        if v.is_infinite() && v < R::zero() {
            return;
        }
        if v > self.max {
            if self.max.is_finite() {
                let scale = (self.max - v).exp();
                let mut rescaled = Kahan::new();
                rescaled.add(self.sum.total() * scale);
                self.sum = rescaled;
            }
            self.max = v;
            self.sum.add(R::one());
        } else {
            self.sum.add((v - self.max).exp());
        }
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// `ln Σ exp(vᵢ)`; `-inf` when nothing was pushed.
    pub fn value(&self) -> R {
        if self.max.is_infinite() && self.max < R::zero() {
            return R::neg_infinity();
        }
        self.max + self.sum.total().ln()
    }
}

/// Two-pass log-sum-exp over a slice.
pub fn log_sum_exp<R: Real>(vals: &[R]) -> R {
    let mut lse = StreamLse::new();
    for &v in vals {
        lse.push(v);
    }
    lse.value()
}

/// `ln(exp(a) + exp(b))` without overflow.
pub fn logaddexp<R: Real>(a: R, b: R) -> R {
    if a == R::neg_infinity() && b == R::neg_infinity() {
        return R::neg_infinity();
    }
    if a > b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}
