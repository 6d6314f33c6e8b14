//! Scenario implementations. Each scenario produces a deterministic list of
//! `(file name, contents)` pairs; the caller writes them and the manifest.

use thermoforge_core::fluctuation::{
    chernoff_exponent, contraction_parametric, default_s_grid, entropic_pressure,
    ft_empirical_check, hoeffding_curve, jarzynski, legendre, renyi, sbar_estimate, sigma_law,
    LegendreTransform, PressureRoute,
};
use thermoforge_core::markov::{equilibrium_markov, random_markov};
use thermoforge_core::measures::{
    mean_entropy_production, pofp_measure, pushforward_empirical, rate_level2,
};
use thermoforge_core::potential::{aa_defect, seminorm_estimate, variation};
use thermoforge_core::pressure::{
    format_float, log_partition, pressure_bounds_spanning_separated, pressure_periodic,
    pressure_spectral, pressure_spectral_estimate, transfer_matrix, Extrapolation,
};
use thermoforge_core::shift::Reversal;
use thermoforge_core::Error as CoreError;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{CliError, ErrorKind, Experiment, Scenario};

const CSV_HEADER: &str = "# thermoforge-csv v1\n";

pub type Artifacts = Vec<(String, String)>;

pub fn run(exp: &Experiment) -> Result<Artifacts, CliError> {
    match exp.scenario {
        Scenario::Pressure => pressure_scenario(exp),
        Scenario::Fluctuation => fluctuation_scenario(exp),
        Scenario::Ldp => ldp_scenario(exp),
        Scenario::Exponents => exponents_scenario(exp),
        Scenario::Level2 => level2_scenario(exp),
        Scenario::AaDiagnostics => aa_scenario(exp),
    }
}

fn require_reversal<'a>(exp: &'a Experiment) -> Result<&'a Reversal, CliError> {
    exp.reversal.as_ref().ok_or_else(|| {
        CliError::config(format!(
            "scenario `{}` requires a [reversal] section",
            exp.scenario.as_str()
        ))
    })
}

fn contract_violation(quantity: &str, residual: f64, tolerance: f64) -> CliError {
    CliError {
        kind: ErrorKind::Numerical,
        message: CoreError::ContractViolation {
            quantity: quantity.into(),
            residual,
            tolerance,
        }
        .to_string(),
    }
}

fn pressure_scenario(exp: &Experiment) -> Result<Artifacts, CliError> {
    let mut files = Artifacts::new();
    let periodic = pressure_periodic(&exp.space, &exp.potential, exp.n_max, Extrapolation::LastValue)?;
    files.push(("pressure_periodic.csv".into(), periodic.to_csv()));

    if exp.potential.as_table().is_some() {
        let spectral = pressure_spectral_estimate(&exp.space, &exp.potential)?;
        files.push(("pressure_spectral.csv".into(), spectral.to_csv()));

        let mut bounds = format!("{CSV_HEADER}n,lower,upper\n");
        for n in 1..=exp.n_max {
            let (lo, hi) = pressure_bounds_spanning_separated(&exp.space, &exp.potential, n, exp.k)?;
            bounds.push_str(&format!("{n},{},{}\n", format_float(lo), format_float(hi)));
        }
        files.push(("pressure_bounds.csv".into(), bounds));

        // trace identity report doubles as an in-run contract check
        let l = transfer_matrix(&exp.space, &exp.potential)?;
        let r = exp.potential.effective_range();
        let mut trace = format!("{CSV_HEADER}n,log_partition,log_trace,rel_err\n");
        for n in r.saturating_sub(1).max(1)..=exp.n_max {
            let lhs = match log_partition(&exp.space, &exp.potential, n) {
                Ok(v) => v,
                Err(CoreError::EmptyPeriodicSet { .. }) => continue,
                Err(e) => return Err(e.into()),
            };
            let rhs = l.log_trace_power(n);
            let rel = (lhs - rhs).abs() / lhs.abs().max(1.0);
            if rel > 1e-9 {
                return Err(contract_violation("trace identity log Zn = log tr(L^n)", rel, 1e-9));
            }
            trace.push_str(&format!(
                "{n},{},{},{}\n",
                format_float(lhs),
                format_float(rhs),
                format_float(rel)
            ));
        }
        files.push(("trace_identity.csv".into(), trace));
    }
    Ok(files)
}

fn fluctuation_scenario(exp: &Experiment) -> Result<Artifacts, CliError> {
    let theta = require_reversal(exp)?;
    let mut files = Artifacts::new();

    let mut report = format!("{CSV_HEADER}n,jarzynski_err,renyi_sym_err\n");
    for n in 1..=exp.n_max {
        let law = match sigma_law(&exp.space, &exp.potential, theta, n) {
            Ok(l) => l,
            Err(CoreError::EmptyPeriodicSet { .. }) => continue,
            Err(e) => return Err(e.into()),
        };
        let j_err = (jarzynski(&law) - 1.0).abs();
        if j_err > 1e-12 {
            return Err(contract_violation("Jarzynski identity", j_err, 1e-12));
        }
        let mut sym_err = 0f64;
        for i in 0..25 {
            let alpha = -1.0 + i as f64 * 0.125;
            sym_err = sym_err.max((renyi(&law, alpha) - renyi(&law, 1.0 - alpha)).abs());
        }
        if sym_err > 1e-10 {
            return Err(contract_violation("Renyi symmetry e_n(a) = e_n(1-a)", sym_err, 1e-10));
        }
        report.push_str(&format!(
            "{n},{},{}\n",
            format_float(j_err),
            format_float(sym_err)
        ));
        if n == exp.n_max {
            files.push((format!("sigma_law_n{n}.csv"), law.to_csv()));
        }
    }
    files.push(("transient_fr.csv".into(), report));

    let route = if exp.potential.as_table().is_some() {
        PressureRoute::Spectral
    } else {
        PressureRoute::PeriodicAtN(exp.n_max)
    };
    let (e, p_base) = entropic_pressure(&exp.space, &exp.potential, theta, &exp.alphas, route)?;
    let mut e_csv = format!("{CSV_HEADER}alpha,e_alpha\n");
    for (x, y) in e.xs.iter().zip(&e.ys) {
        e_csv.push_str(&format!("{},{}\n", format_float(*x), format_float(*y)));
    }
    files.push(("e_alpha.csv".into(), e_csv));
    files.push((
        "pressure_base.csv".into(),
        format!("{CSV_HEADER}p_g\n{}\n", format_float(p_base)),
    ));

    let s_grid = default_s_grid(&e);
    let rate = legendre(&e, &s_grid);
    files.push(("rate.csv".into(), rate.to_csv()));

    let lt = LegendreTransform::new(&e);
    let mut fr = format!("{CSV_HEADER}s,fr_residual\n");
    for (i, &s) in rate.grid.iter().enumerate() {
        if rate.boundary[i] {
            continue;
        }
        let (at_minus, flag) = lt.eval(-s);
        if flag {
            continue;
        }
        fr.push_str(&format!(
            "{},{}\n",
            format_float(s),
            format_float(at_minus - rate.values[i] - s)
        ));
    }
    files.push(("fr_residuals.csv".into(), fr));
    Ok(files)
}

fn ldp_scenario(exp: &Experiment) -> Result<Artifacts, CliError> {
    let theta = require_reversal(exp)?;
    let mut files = Artifacts::new();

    // window table across n: eight bins spanning the σ/n support at n_max
    let law_hi = sigma_law(&exp.space, &exp.potential, theta, exp.n_max)?;
    let lo = law_hi.min_value() / exp.n_max as f64;
    let hi = law_hi.max_value() / exp.n_max as f64;
    let bins = 8usize;
    let width = ((hi - lo) / bins as f64).max(1e-12);
    let mut ft = format!("{CSV_HEADER}n,a,b,log_prob_rate\n");
    for n in 1..=exp.n_max {
        let law = match sigma_law(&exp.space, &exp.potential, theta, n) {
            Ok(l) => l,
            Err(CoreError::EmptyPeriodicSet { .. }) => continue,
            Err(e) => return Err(e.into()),
        };
        for b in 0..bins {
            let a = lo + width * b as f64;
            let c = a + width;
            let rate = ft_empirical_check(&law, n, a, c);
            ft.push_str(&format!(
                "{n},{},{},{}\n",
                format_float(a),
                format_float(c),
                format_float(rate)
            ));
        }
    }
    files.push(("ft_empirical.csv".into(), ft));

    // level-2 pushforward tables at block length k
    let p = pofp_measure(&exp.space, &exp.potential, exp.n_max)?;
    let law = pushforward_empirical(&p, exp.k.max(1));
    let words = exp.space.admissible_words(exp.k.max(1))?;
    let mut push = format!("{CSV_HEADER}n,k,word,threshold,log_prob_rate\n");
    for w in &words {
        let word_txt = w
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join("");
        for t10 in 1..=9 {
            let t = t10 as f64 / 10.0;
            let rate = law.log_prob_rate(|e| e.frequency::<f64>(w) >= t);
            push.push_str(&format!(
                "{},{},{word_txt},{},{}\n",
                exp.n_max,
                exp.k.max(1),
                format_float(t),
                format_float(rate)
            ));
        }
    }
    files.push(("level2_pushforward.csv".into(), push));
    Ok(files)
}

fn exponents_scenario(exp: &Experiment) -> Result<Artifacts, CliError> {
    let theta = require_reversal(exp)?;
    let mut files = Artifacts::new();
    let route = if exp.potential.as_table().is_some() {
        PressureRoute::Spectral
    } else {
        PressureRoute::PeriodicAtN(exp.n_max)
    };
    let (e, _) = entropic_pressure(&exp.space, &exp.potential, theta, &exp.alphas, route)?;

    let mut table = format!("{CSV_HEADER}n,jarzynski_err,renyi_sym_err,chernoff,stein\n");
    for n in 1..=exp.n_max {
        let law = match sigma_law(&exp.space, &exp.potential, theta, n) {
            Ok(l) => l,
            Err(CoreError::EmptyPeriodicSet { .. }) => continue,
            Err(e) => return Err(e.into()),
        };
        let j_err = (jarzynski(&law) - 1.0).abs();
        let mut sym_err = 0f64;
        for i in 0..25 {
            let alpha = -1.0 + i as f64 * 0.125;
            sym_err = sym_err.max((renyi(&law, alpha) - renyi(&law, 1.0 - alpha)).abs());
        }
        table.push_str(&format!(
            "{n},{},{},{},{}\n",
            format_float(j_err),
            format_float(sym_err),
            format_float(chernoff_exponent(&law, n)),
            format_float(thermoforge_core::fluctuation::stein_exponent(&law, n)),
        ));
    }
    files.push(("exponents.csv".into(), table));

    let sbar = sbar_estimate(&e);
    let r_max = if sbar.is_finite() && sbar > 0.0 {
        1.5 * sbar
    } else {
        1.0
    };
    let r_grid: Vec<f64> = (0..=200).map(|i| r_max * i as f64 / 200.0).collect();
    let f = hoeffding_curve(&e, &r_grid);
    files.push(("hoeffding.csv".into(), f.to_csv("r", "f_r")));
    files.push(("e_alpha.csv".into(), e.to_csv("alpha", "e_alpha")));
    Ok(files)
}

fn level2_scenario(exp: &Experiment) -> Result<Artifacts, CliError> {
    let theta = require_reversal(exp)?;
    let table = exp.potential.as_table().ok_or_else(|| {
        CliError::config("scenario `level2` needs a locally constant potential")
    })?;
    let p = pressure_spectral(&exp.space, &exp.potential)?;
    let order = table.range().saturating_sub(1).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(exp.seed);
    let mut csv = format!("{CSV_HEADER}chain,rate_q,rate_q_reversed,ep_q,fr_residual\n");
    for i in 0..500 {
        let q = random_markov::<f64, _>(&exp.space, order, &mut rng)?;
        let qh = q.reverse(&exp.space, theta)?;
        let iq = rate_level2(&q, &exp.space, &exp.potential, p)?;
        let iqh = rate_level2(&qh, &exp.space, &exp.potential, p)?;
        let ep = mean_entropy_production(&q, &exp.space, &exp.potential, theta)?;
        let residual = iqh - iq - ep;
        if residual.abs() > 1e-10 {
            return Err(contract_violation(
                "level-2 fluctuation relation I(Q∘θ) = I(Q) + ep(Q)",
                residual.abs(),
                1e-10,
            ));
        }
        csv.push_str(&format!(
            "{i},{},{},{},{}\n",
            format_float(iq),
            format_float(iqh),
            format_float(ep),
            format_float(residual)
        ));
    }
    files_with_equilibrium(exp, csv)
}

fn files_with_equilibrium(exp: &Experiment, level2_csv: String) -> Result<Artifacts, CliError> {
    let mut files = vec![("level2_fr.csv".to_string(), level2_csv)];
    let q = equilibrium_markov(&exp.space, &exp.potential)?;
    files.push((
        "equilibrium_markov.json".into(),
        format!("{:#}\n", q.to_json()),
    ));
    Ok(files)
}

fn aa_scenario(exp: &Experiment) -> Result<Artifacts, CliError> {
    let mut files = Artifacts::new();
    let mut defect = format!("{CSV_HEADER}k,n,aa_defect\n");
    let mut ks: Vec<usize> = vec![1, 2, 4, 8];
    ks.retain(|&k| k <= exp.n_max);
    for &k in &ks {
        let mut n = 4usize;
        while n <= exp.n_max {
            let d = aa_defect(&exp.space, &exp.potential, k, n)?;
            defect.push_str(&format!("{k},{n},{}\n", format_float(d)));
            n += 4;
        }
    }
    files.push(("aa_defect.csv".into(), defect));

    let mut var = format!("{CSV_HEADER}n,k,variation\n");
    for n in [2usize, 4, 6] {
        for k in 0..=exp.k {
            if n + 2 * k + 4 <= exp.n_max.max(10) {
                let v = variation(&exp.space, &exp.potential, n, k, None)?;
                var.push_str(&format!("{n},{k},{}\n", format_float(v)));
            }
        }
    }
    files.push(("variation.csv".into(), var));

    let mut semi = format!("{CSV_HEADER}n,seminorm\n");
    for n in 1..=exp.n_max {
        match seminorm_estimate(&exp.space, &exp.potential, n) {
            Ok(v) => semi.push_str(&format!("{n},{}\n", format_float(v))),
            Err(CoreError::EmptyPeriodicSet { .. }) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    files.push(("seminorm.csv".into(), semi));
    Ok(files)
}

/// Runs the exact-identity suite and renders the report.
pub fn verify(
    seed: u64,
    n_max: usize,
    inject_fault: bool,
) -> Result<(String, Artifacts, bool), CliError> {
    let fixtures = thermoforge_core::fixtures::bundled::<f64>();
    let results = thermoforge_core::verify::run_suite_on(&fixtures, seed, n_max, inject_fault)?;
    let table = thermoforge_core::verify::format_table(&results);
    let all_passed = results.iter().all(|r| r.passed);
    let files = vec![(
        "verify_report.csv".to_string(),
        thermoforge_core::verify::to_csv(&results),
    )];
    Ok((table, files, all_passed))
}
