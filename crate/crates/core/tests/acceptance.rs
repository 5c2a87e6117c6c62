//! Acceptance suite: one PASS/FAIL line per criterion.

use std::time::Instant;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;

use sparse_toeplitz::concentration::{
    functional_norm_bounds, norm_bounds, selector_risk_bound, LagLocation,
};
use sparse_toeplitz::estimator::{lag_functionals, scan_statistic};
use sparse_toeplitz::harness::config::default_horizon;
use sparse_toeplitz::harness::{run_scenario, ExperimentConfig, ResultTable, Scenario};
use sparse_toeplitz::model::{FunctionalMatrix, Placement, SparseAlternative};
use sparse_toeplitz::procedures::{AggregateCalibration, TestKind};
use sparse_toeplitz::sampler::{ma_autocovariance, MaSpec, RngStream};
use sparse_toeplitz::{DiagonalStats, SampleSet};

type Outcome = Result<(bool, String), Box<dyn std::error::Error>>;
type Criterion = (&'static str, fn() -> Outcome);

const SEED: u64 = 20_240_601;

fn config(scenario: Scenario) -> ExperimentConfig {
    ExperimentConfig { master_seed: Some(SEED), ..ExperimentConfig::new(scenario) }
}

fn dense(m: &[Vec<f64>]) -> DMatrix<f64> {
    let p = m.len();
    DMatrix::from_fn(p, p, |i, j| m[i][j])
}

fn combined(a: f64, b: f64) -> f64 {
    (a * a + b * b).sqrt()
}

fn oracle_equivalence() -> Outcome {
    let mut rng = RngStream::new(SEED, 1).rng();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let p = rng.random_range(3..=20usize);
        let n = rng.random_range(1..=10usize);
        let data: Vec<f64> = (0..n * p).map(|_| rng.random_range(-3.0..3.0)).collect();
        let x = SampleSet::new(p, data)?;
        let horizon = (p - 1) / 2;
        let stats = lag_functionals(&x, horizon)?;
        let mut cov = DMatrix::<f64>::zeros(p, p);
        for row in x.rows() {
            let v = nalgebra::DVector::from_column_slice(row);
            cov += &v * v.transpose();
        }
        cov /= n as f64;
        for j in 1..=horizon {
            let a = dense(&FunctionalMatrix::singleton(p, j)?.to_dense());
            worst = worst.max((stats.xi[j - 1] - (&a * &cov).trace()).abs());
        }
    }
    let mut scan_mismatches = 0;
    for horizon in 1..=12usize {
        let xi: Vec<f64> = (0..horizon).map(|_| rng.random_range(-1.0..1.0)).collect();
        let stats = DiagonalStats::new(xi.clone(), 1.0);
        for s in 1..=horizon {
            for absolute in [false, true] {
                let vals: Vec<f64> = xi.iter().map(|v| if absolute { v.abs() } else { *v }).collect();
                let mut best = f64::NEG_INFINITY;
                for mask in 0u32..(1 << horizon) {
                    if mask.count_ones() as usize == s {
                        let t: f64 = (0..horizon).filter(|j| mask >> j & 1 == 1).map(|j| vals[j]).sum();
                        best = best.max(t);
                    }
                }
                if scan_statistic(&stats, s, absolute)? != best {
                    scan_mismatches += 1;
                }
            }
        }
    }
    Ok((
        worst <= 1e-12 && scan_mismatches == 0,
        format!("max |ξ − Tr(A_j Σ_n)| = {worst:.2e}, scan mismatches = {scan_mismatches}"),
    ))
}

fn norm_domination() -> Outcome {
    let mut rng = RngStream::new(SEED, 2).rng();
    let mut checked = 0;
    let mut violations = 0;
    let mut worst_ratio: f64 = 0.0;
    while checked < 200 {
        let horizon = rng.random_range(1..=8usize);
        let p = rng.random_range(2 * horizon + 1..=40);
        let s = rng.random_range(1..=horizon);
        let sigma = rng.random_range(0.01..0.5 / s as f64);
        let Ok(alt) = SparseAlternative::generate(p, s, horizon, sigma, Placement::Random, true, &mut rng)
        else {
            continue;
        };
        let w = rng.random_range(1..=horizon);
        let mut lags: Vec<usize> = (1..=horizon).collect();
        lags.shuffle(&mut rng);
        lags.truncate(w);
        let a = dense(&FunctionalMatrix::new(p, lags.clone())?.to_dense());
        let prod = &a * dense(&alt.spec().densify());
        let plain = functional_norm_bounds(w, horizon, p)?;
        let loc = LagLocation::of(&lags, p).ok_or("lags straddle p/2")?;
        let full = norm_bounds(w, s, horizon, p, 1.0, w == 1, loc)?;
        let pairs = [
            (a.singular_values().max(), plain.op_bound),
            (a.norm_squared(), plain.frob2_bound),
            (prod.singular_values().max(), full.op_bound),
            (prod.norm_squared(), full.frob2_bound),
        ];
        for (exact, bound) in pairs {
            worst_ratio = worst_ratio.max(exact / bound);
            if exact > bound + 1e-12 {
                violations += 1;
            }
        }
        checked += 1;
    }
    let (p, horizon) = (40, 12);
    let last = dense(&FunctionalMatrix::singleton(p, horizon)?.to_dense()).norm_squared();
    let bound = functional_norm_bounds(1, horizon, p)?.frob2_bound;
    let equal = (last - bound).abs() < 1e-15;
    Ok((
        violations == 0 && equal,
        format!(
            "200 cases, violations = {violations}, max exact/bound = {worst_ratio:.4}, \
             ‖A_S‖_F² = {last:.6} vs bound {bound:.6}"
        ),
    ))
}

fn concentration_bound() -> Outcome {
    let cfg = ExperimentConfig { replications: 20_000, ..config(Scenario::VerifyConcentration) };
    let table = run_scenario(&cfg)?;
    let pass_col = table.column_index("pass").unwrap();
    let failed = table.rows().iter().filter(|r| r[pass_col].to_string() != "true").count();
    let emp = table.column("empirical");
    let bound = table.column("bound");
    let margin = emp.iter().zip(&bound).map(|(e, b)| e - b).fold(f64::NEG_INFINITY, f64::max);
    Ok((
        failed == 0 && table.len() == 12,
        format!("{} grid points, failing = {failed}, max (empirical − bound) = {margin:.4}", table.len()),
    ))
}

fn type1_calibration() -> Outcome {
    let cfg = ExperimentConfig {
        n: 100,
        p: 100,
        horizon: Some(10),
        sparsity: Some(4),
        kinds: TestKind::ALL.to_vec(),
        replications: 5000,
        ..config(Scenario::Type1)
    };
    let table = run_scenario(&cfg)?;
    let rates = table.column("rejection_rate");
    let ok = rates.iter().all(|r| (r - 0.1).abs() <= 0.015);
    let text: Vec<String> = TestKind::ALL.iter().zip(&rates).map(|(k, r)| format!("{k}={r:.4}")).collect();
    Ok((ok, format!("fresh-run rejection rates {}", text.join(", "))))
}

fn monotone_within(power: &[f64], se: &[f64], k: f64) -> bool {
    (1..power.len()).all(|i| power[i] >= power[i - 1] - k * combined(se[i], se[i - 1]))
}

fn power_curve_shape() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    let mut tables: Vec<(usize, ResultTable)> = Vec::new();
    for p in [10, 100, 1000] {
        let cfg = ExperimentConfig { p, replications: 1000, ..config(Scenario::PowerCurve) };
        let table = run_scenario(&cfg)?;
        let power = table.column("power");
        let se = table.column("se");
        let mono = monotone_within(&power, &se, 2.0);
        let first = power[0];
        let last = *power.last().unwrap();
        ok &= mono && first <= 0.2 && last >= 0.9;
        details.push(format!("p={p}: start {first:.3}, end {last:.3}, monotone {mono}"));
        tables.push((p, table));
    }
    let small = &tables[0].1;
    let sep = small.column("separation");
    let power10 = small.column("power");
    let se10 = small.column("se");
    let i = power10.iter().position(|&q| q >= 0.5).ok_or("p = 10 curve never reaches 0.5")?;
    let d_star = sep[i];
    let s_big = sparse_toeplitz::harness::config::default_sparsity(default_horizon(1000));
    let cfg = ExperimentConfig {
        p: 1000,
        replications: 1000,
        sigma_grid: Some(vec![d_star / s_big as f64]),
        ..config(Scenario::PowerCurve)
    };
    let big = run_scenario(&cfg)?;
    let (pb, sb) = (big.column("power")[0], big.column("se")[0]);
    let shifted = pb >= power10[i] - 2.0 * combined(sb, se10[i]);
    ok &= shifted;
    details.push(format!(
        "at separation {d_star:.4}: power p=1000 {pb:.3} vs p=10 {:.3}",
        power10[i]
    ));
    Ok((ok, details.join("; ")))
}

fn guaranteed_risk() -> Outcome {
    let cfg = ExperimentConfig {
        n: 100,
        p: 100,
        horizon: Some(10),
        sparsity: Some(2),
        kinds: TestKind::ALL.to_vec(),
        replications: 5000,
        threshold_source: sparse_toeplitz::ThresholdSource::Theoretical,
        ..config(Scenario::RiskCheck)
    };
    let table = run_scenario(&cfg)?;
    let mut ok = true;
    let mut details = Vec::new();
    let col = |name: &str| table.column_index(name).unwrap();
    for row in table.rows() {
        let num = |name: &str| row[col(name)].as_f64().unwrap();
        let pass = num("risk") <= num("bound") + 3.0 * num("se");
        ok &= pass;
        let feasible = row[col("feasible")].to_string() == "true";
        details.push(format!(
            "{} u={} σ={:.4}: type1 {:.4} + type2 {:.4} vs bound {:.4}{}",
            row[col("kind")],
            num("u"),
            num("sigma"),
            num("type1"),
            num("type2"),
            num("bound"),
            if feasible { "" } else { " (no positive-definite member at this σ; type II vacuous)" }
        ));
    }
    Ok((ok, details.join("; ")))
}

fn support_insensitivity() -> Outcome {
    let base = ExperimentConfig {
        n: 100,
        p: 10,
        kinds: vec![TestKind::MsPlus],
        replications: 2000,
        ..config(Scenario::PowerCurve)
    };
    let first = run_scenario(&ExperimentConfig { placement: Placement::Random, ..base.clone() })?;
    let grid = first.column("sigma");
    let mut curves = vec![(Placement::Random, first)];
    for placement in [Placement::NearDiagonal, Placement::Far] {
        let cfg = ExperimentConfig { placement, sigma_grid: Some(grid.clone()), ..base.clone() };
        curves.push((placement, run_scenario(&cfg)?));
    }
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for a in 0..3 {
        for b in a + 1..3 {
            let (pa, sa) = (curves[a].1.column("power"), curves[a].1.column("se"));
            let (pb, sb) = (curves[b].1.column("power"), curves[b].1.column("se"));
            for i in 0..grid.len() {
                let se = combined(sa[i], sb[i]);
                let z = if se > 0.0 { (pa[i] - pb[i]).abs() / se } else { 0.0 };
                worst = worst.max(z);
                ok &= (pa[i] - pb[i]).abs() <= 3.0 * se;
            }
        }
    }
    Ok((ok, format!("{} grid points x 3 pairs, max |Δpower|/SE = {worst:.2}", grid.len())))
}

fn hs_versus_ms() -> Outcome {
    let cfg = ExperimentConfig {
        n: 100,
        p: 100,
        horizon: Some(10),
        s_grid: Some(vec![1, 2]),
        replications: 5000,
        aggregate_calibration: AggregateCalibration::Joint,
        ..config(Scenario::MsVsHs)
    };
    let table = run_scenario(&cfg)?;
    let mut ok = true;
    let mut strictly = false;
    let mut details = Vec::new();
    for s in ["1", "2"] {
        let rows = table.filter("s", s);
        let ms = rows.filter("kind", "ms");
        let hs = rows.filter("kind", "hs");
        let (pm, sm) = (ms.column("power")[0], ms.column("se")[0]);
        let (ph, sh) = (hs.column("power")[0], hs.column("se")[0]);
        let se = combined(sm, sh);
        ok &= ph >= pm - 2.0 * se;
        strictly |= ph - pm >= 3.0 * se;
        details.push(format!("s={s}: HS {ph:.3} vs MS {pm:.3} (SE {se:.4})"));
    }
    let sigma = table.column("sigma")[0];
    details.push(format!("σ = {sigma:.5}"));
    Ok((ok && strictly, details.join("; ")))
}

fn selection_risk() -> Outcome {
    let p = 36;
    let horizon = default_horizon(p);
    let mut ok = true;
    let mut details = Vec::new();
    for s in [horizon - 1, (horizon - 1) / 2] {
        let cfg = ExperimentConfig {
            p,
            sparsity: Some(s),
            replications: 1000,
            u: Some(2.0),
            ..config(Scenario::SelectionRisk)
        };
        let table = run_scenario(&cfg)?;
        let loss = table.column("avg_hamming");
        let se = table.column("se");
        let bound = selector_risk_bound(horizon, s, 2.0, false)?;
        let below = loss.iter().zip(&se).all(|(l, e)| *l <= bound + 3.0 * e);
        let mono = (1..loss.len()).all(|i| loss[i] <= loss[i - 1] + 2.0 * combined(se[i], se[i - 1]));
        ok &= below && mono;
        let text: Vec<String> = loss.iter().map(|l| format!("{l:.4}")).collect();
        details.push(format!("s={s}: losses [{}] bound {bound:.3}", text.join(", ")));
    }
    Ok((ok, format!("p={p}, S={horizon}; {}", details.join("; "))))
}

fn ma_example() -> Outcome {
    let mut worst: f64 = 0.0;
    for &phi in &[0.9, -0.9, 0.6, 0.5, -0.5, 0.1] {
        for p in 8..=64 {
            let ma = MaSpec::new(phi, p)?;
            let coef = ma.coefficients();
            for h in 0..=p {
                let mut brute = 0.0;
                for (i, a) in coef.iter().enumerate() {
                    for (k, b) in coef.iter().enumerate() {
                        if 2 * k == 2 * i + h {
                            brute += a * b;
                        }
                    }
                }
                worst = worst.max((ma_autocovariance(&ma, h) - brute).abs());
            }
        }
    }
    let cfg = ExperimentConfig {
        n: 50,
        p_grid: Some(vec![8, 16, 32, 64]),
        phi_grid: Some(vec![0.0, 0.6]),
        replications: 2000,
        ..config(Scenario::MaPower)
    };
    let table = run_scenario(&cfg)?;
    let at = |phi: &str| table.filter("phi", phi);
    let strong = at("0.6");
    let mono = monotone_within(&strong.column("power"), &strong.column("se"), 2.0);
    let null = at("0").column("power");
    let band = 3.0 * (0.1f64 * 0.9 / 2000.0).sqrt();
    let level = null.iter().all(|q| (q - 0.1).abs() <= band);
    let powers: Vec<String> = strong.column("power").iter().map(|q| format!("{q:.3}")).collect();
    let nulls: Vec<String> = null.iter().map(|q| format!("{q:.3}")).collect();
    Ok((
        worst <= 1e-12 && mono && level,
        format!(
            "closed form vs brute force max error {worst:.1e}; φ=0.6 power over p=8,16,32,64 [{}]; φ=0 [{}]",
            powers.join(", "),
            nulls.join(", ")
        ),
    ))
}

fn determinism() -> Outcome {
    let small = |scenario: Scenario| ExperimentConfig {
        n: 20,
        p: 30,
        replications: 300,
        grid_points: 4,
        kinds: TestKind::ALL.to_vec(),
        ..config(scenario)
    };
    let configs = vec![
        small(Scenario::PowerCurve),
        small(Scenario::Type1),
        ExperimentConfig { n_grid: Some(vec![200, 400]), ..small(Scenario::SelectionRisk) },
        ExperimentConfig { p_grid: Some(vec![8, 16]), phi_grid: Some(vec![0.0, 0.5]), ..small(Scenario::MaPower) },
        ExperimentConfig { n_grid: Some(vec![10]), p_grid: Some(vec![20]), ..small(Scenario::VerifyConcentration) },
        small(Scenario::MsVsHs),
        ExperimentConfig { sparsity: Some(1), ..small(Scenario::RiskCheck) },
    ];
    let mut mismatched = Vec::new();
    for cfg in &configs {
        let one = run_scenario(&ExperimentConfig { threads: Some(1), ..cfg.clone() })?.to_csv_string();
        let again = run_scenario(&ExperimentConfig { threads: Some(1), ..cfg.clone() })?.to_csv_string();
        let four = run_scenario(&ExperimentConfig { threads: Some(4), ..cfg.clone() })?.to_csv_string();
        if one != again || one != four {
            mismatched.push(format!("{:?}", cfg.scenario));
        }
    }
    Ok((
        mismatched.is_empty(),
        format!("{} scenarios at 1 and 4 threads, mismatches: [{}]", configs.len(), mismatched.join(", ")),
    ))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("oracle equivalence", oracle_equivalence),
        ("norm-bound domination", norm_domination),
        ("concentration bound", concentration_bound),
        ("type-I calibration", type1_calibration),
        ("power-curve shape", power_curve_shape),
        ("guaranteed error bound", guaranteed_risk),
        ("support insensitivity", support_insensitivity),
        ("HS vs MS at high sparsity", hs_versus_ms),
        ("lag-selection risk", selection_risk),
        ("MA example", ma_example),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "{} criterion {:>2} ({name}): {detail} [{:.1}s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
