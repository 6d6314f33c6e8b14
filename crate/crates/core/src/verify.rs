//! The exact-identity suite: every identity here holds at finite n by
//! construction, so any violation beyond tolerance indicates a broken build
//! or corrupted inputs. The CLI `verify` subcommand is a thin wrapper.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::fixtures::{bundled, Fixture};
use crate::fluctuation::{jarzynski, renyi, sigma_law};
use crate::markov::random_markov;
use crate::measures::{mean_entropy_production, rate_level2};
use crate::pressure::{log_partition, pressure_spectral, transfer_matrix};
use crate::Result;

/// Outcome of one identity check on one fixture.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub check: &'static str,
    pub fixture: &'static str,
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    fn new(check: &'static str, fixture: &'static str, worst: f64, tolerance: f64) -> Self {
        CheckResult {
            check,
            fixture,
            worst,
            tolerance,
            passed: worst.is_finite() && worst <= tolerance,
        }
    }
}

/// Number of random chains in the level-2 fluctuation-relation check.
pub const LEVEL2_CHAINS: usize = 500;

/// Runs the suite on the bundled fixtures.
pub fn run_suite(seed: u64, n_max: usize) -> Result<Vec<CheckResult>> {
    run_suite_on(&bundled::<f64>(), seed, n_max, false)
}

/// Runs the suite on the given fixtures.
///
/// The transient identities are structural: they hold for any potential
/// sequence, so changing table values alone can never trip them. The
/// `inject_fault` negative control therefore perturbs one law weight after
/// construction, simulating a numerical fault inside the pipeline, and must
/// make the suite fail.
pub fn run_suite_on(
    fixtures: &[Fixture<f64>],
    seed: u64,
    n_max: usize,
    inject_fault: bool,
) -> Result<Vec<CheckResult>> {
    let mut results = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for fixture in fixtures {
        let n_hi = n_max.min(fixture.n_cap);
        if let Some(theta) = &fixture.reversal {
            // exact transient fluctuation relations
            let mut worst_j = 0f64;
            let mut worst_renyi = 0f64;
            let mut worst_rn = 0f64;
            let mut worst_inv = 0f64;
            for n in 1..=n_hi {
                let mut law = match sigma_law(&fixture.space, &fixture.potential, theta, n) {
                    Ok(l) => l,
                    Err(crate::Error::EmptyPeriodicSet { .. }) => continue,
                    Err(e) => return Err(e),
                };
                if inject_fault {
                    let mut atoms: Vec<(f64, f64)> = law
                        .atoms()
                        .iter()
                        .map(|a| (a.value, a.weight))
                        .collect();
                    atoms[0].0 += 1e-6;
                    law = crate::fluctuation::AtomicLaw::from_probabilities(&atoms);
                }
                worst_j = worst_j.max((jarzynski(&law) - 1.0).abs());
                for i in 0..25 {
                    let alpha = -1.0 + i as f64 * 0.125;
                    worst_renyi =
                        worst_renyi.max((renyi(&law, alpha) - renyi(&law, 1.0 - alpha)).abs());
                }
                for atom in law.atoms() {
                    match law.atom_near(-atom.value) {
                        Some(mirror) => {
                            worst_rn = worst_rn
                                .max((mirror.weight - atom.weight * (-atom.value).exp()).abs());
                        }
                        None => worst_rn = f64::INFINITY,
                    }
                }
                if n <= 8 {
                    let mut mismatch = false;
                    fixture.space.for_each_periodic(n, |letters| {
                        let w = crate::PeriodicWord::new(letters.to_vec());
                        let y = fixture.space.apply_reversal(theta, &w).unwrap();
                        let back = fixture.space.apply_reversal(theta, &y).unwrap();
                        if back != w {
                            mismatch = true;
                        }
                    })?;
                    if mismatch {
                        worst_inv = 1.0;
                    }
                }
            }
            results.push(CheckResult::new("jarzynski", fixture.name, worst_j, 1e-12));
            results.push(CheckResult::new(
                "renyi-symmetry",
                fixture.name,
                worst_renyi,
                1e-10,
            ));
            results.push(CheckResult::new(
                "atomwise-radon-nikodym",
                fixture.name,
                worst_rn,
                1e-12,
            ));
            results.push(CheckResult::new(
                "reversal-involution",
                fixture.name,
                worst_inv,
                0.5,
            ));
        }

        if fixture.potential.as_table().is_some() {
            // trace identity against the transfer matrix
            let l = transfer_matrix(&fixture.space, &fixture.potential)?;
            let r = fixture.potential.effective_range();
            let mut worst = 0f64;
            for n in r.saturating_sub(1).max(1)..=n_hi {
                let lhs = match log_partition(&fixture.space, &fixture.potential, n) {
                    Ok(v) => v,
                    Err(crate::Error::EmptyPeriodicSet { .. }) => continue,
                    Err(e) => return Err(e),
                };
                let rhs = l.log_trace_power(n);
                worst = worst.max((lhs - rhs).abs() / lhs.abs().max(1.0));
            }
            results.push(CheckResult::new(
                "trace-identity",
                fixture.name,
                worst,
                1e-9,
            ));
        }

        if let (Some(theta), Some(_)) = (&fixture.reversal, fixture.potential.as_table()) {
            // level-2 fluctuation relation over seeded random chains
            let p = pressure_spectral(&fixture.space, &fixture.potential)?;
            let order = fixture.potential.effective_range().saturating_sub(1).max(1);
            let mut worst_fr = 0f64;
            let mut worst_inv = 0f64;
            let mut worst_h = 0f64;
            for _ in 0..LEVEL2_CHAINS {
                let q = random_markov::<f64, _>(&fixture.space, order, &mut rng)?;
                let qh = q.reverse(&fixture.space, theta)?;
                let lhs = rate_level2(&qh, &fixture.space, &fixture.potential, p)?;
                let rhs = rate_level2(&q, &fixture.space, &fixture.potential, p)?
                    + mean_entropy_production(&q, &fixture.space, &fixture.potential, theta)?;
                worst_fr = worst_fr.max((lhs - rhs).abs());
                worst_h = worst_h.max((q.entropy_rate() - qh.entropy_rate()).abs());
                let back = qh.reverse(&fixture.space, theta)?;
                let dim = q.states().len();
                for u in 0..dim {
                    worst_inv = worst_inv.max((back.stationary()[u] - q.stationary()[u]).abs());
                    for v in 0..dim {
                        worst_inv =
                            worst_inv.max((back.transition(u, v) - q.transition(u, v)).abs());
                    }
                }
            }
            results.push(CheckResult::new(
                "level2-fluctuation-relation",
                fixture.name,
                worst_fr,
                1e-10,
            ));
            results.push(CheckResult::new(
                "markov-reversal-involution",
                fixture.name,
                worst_inv,
                1e-12,
            ));
            results.push(CheckResult::new(
                "markov-entropy-preserved",
                fixture.name,
                worst_h,
                1e-12,
            ));
        }
    }
    Ok(results)
}

/// Formats results as an aligned pass/fail table.
pub fn format_table(results: &[CheckResult]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<30} {:<26} {:>12} {:>9} {:>6}\n",
        "check", "fixture", "worst", "tol", "status"
    ));
    for r in results {
        out.push_str(&format!(
            "{:<30} {:<26} {:>12.3e} {:>9.0e} {:>6}\n",
            r.check,
            r.fixture,
            r.worst,
            r.tolerance,
            if r.passed { "pass" } else { "FAIL" }
        ));
    }
    out
}

/// CSV form of the results (stable row order).
pub fn to_csv(results: &[CheckResult]) -> String {
    let mut s = String::from("# thermoforge-csv v1\ncheck,fixture,worst,tolerance,passed\n");
    for r in results {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            r.check,
            r.fixture,
            crate::pressure::format_float(r.worst),
            crate::pressure::format_float(r.tolerance),
            r.passed
        ));
    }
    s
}
