//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::Parser;
use liouville_ep::dynamics::{self, CorrelatorMethod, MomentVector};
use liouville_ep::eigen::{multiset_distance, overlap};
use liouville_ep::ep::{self, EpQuery};
use liouville_ep::liouvillian::{self, build_liouvillian, DensityVector};
use liouville_ep::model::{default_tau_grid, linspace, logspace};
use liouville_ep::spectrum;
use liouville_ep::AtomParams;
use liouville_ep_cli::{run, Cli, SweepConfig, Table};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

/// `1 / (6 sqrt 3)` to 17 digits, from a 50-digit evaluation.
const CRITICAL_DELTA: f64 = 0.096_225_044_864_937_63;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn cli_table(args: &[&str]) -> Result<Table, String> {
    let cli = Cli::try_parse_from(std::iter::once("liouville-ep").chain(args.iter().copied()))
        .map_err(|e| e.to_string())?;
    let config = SweepConfig::from_cli(&cli).map_err(|e| e.to_string())?;
    run(&config).map_err(|e| e.to_string())
}

fn atom(delta: f64, omega: f64) -> AtomParams {
    AtomParams::new(delta, omega, 1.0, 0.0).unwrap()
}

fn sup(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn within(elapsed: Duration, limit: f64) -> Result<(), String> {
    ensure(
        elapsed.as_secs_f64() < limit,
        format!("runtime {:.2}s exceeds {limit}s", elapsed.as_secs_f64()),
    )
}

/// The 20 x 20 detuning/drive grid, containing Delta = 0 and Delta = gamma/20.
fn grid_20x20() -> Vec<(f64, f64)> {
    let deltas: Vec<f64> = (0..20).map(|k| k as f64 / 40.0).collect();
    let omegas = logspace(1e-3, 10.0, 20);
    deltas
        .iter()
        .flat_map(|&d| omegas.iter().map(move |&w| (d, w)))
        .collect()
}

fn ep_location() -> Check {
    let start = Instant::now();
    let t = cli_table(&["ep-locate", "--gamma", "1", "--delta-grid", "0:0:1"])?;
    let elapsed = start.elapsed();
    let omega = t.values("omega_ep_1");
    let gap = t.values("numeric_gap_1");
    ensure(omega == vec![0.125], format!("omega_ep = {omega:?}"))?;
    ensure(
        gap.len() == 1 && gap[0] < 1e-6,
        format!("numeric gap {gap:?}"),
    )?;
    let s = liouvillian::eigenvalues_numeric(&build_liouvillian(&atom(0.0, 0.125)))
        .map_err(|e| e.to_string())?;
    ensure(
        s.is_coalesced(1, 2),
        "numeric oracle did not flag coalescence",
    )?;
    within(elapsed, 1.0)?;
    Ok(format!(
        "omega_ep = 0.125, numeric gap {:.1e}, {:.3}s",
        gap[0],
        elapsed.as_secs_f64()
    ))
}

fn critical_detuning() -> Check {
    let dc = ep::critical_detuning(1.0);
    ensure(
        (dc - CRITICAL_DELTA).abs() < 1e-12,
        format!("delta_c = {dc}"),
    )?;
    let start = Instant::now();
    let t = cli_table(&["ep-locate", "--gamma", "1", "--delta-grid", "0:0.12:121"])?;
    let elapsed = start.elapsed();
    ensure(t.rows.len() == 121, "expected 121 rows")?;
    let deltas = t.values("delta");
    let counts = t.values("n_eps");
    let (mut below, mut above) = (0, 0);
    for (&d, &n) in deltas.iter().zip(&counts) {
        if (d - dc).abs() <= ep::MERGE_BAND {
            continue;
        }
        // At Delta = 0 the lower branch sits at Omega = 0 and only Omega_EP = gamma/8 remains.
        let want = if d == 0.0 {
            1.0
        } else if d < dc {
            2.0
        } else {
            0.0
        };
        ensure(n == want, format!("{n} roots at delta = {d}"))?;
        if d < dc {
            below += 1
        } else {
            above += 1
        }
    }
    within(elapsed, 5.0)?;
    Ok(format!(
        "delta_c = {dc:.12}, {below} points with roots below, {above} with none above, {:.3}s",
        elapsed.as_secs_f64()
    ))
}

fn spectral_cross_validation() -> Check {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (d, w) in grid_20x20() {
        let p = atom(d, w);
        let a = liouvillian::eigenvalues_analytic(&p);
        let n =
            liouvillian::eigenvalues_numeric(&build_liouvillian(&p)).map_err(|e| e.to_string())?;
        let dist = multiset_distance(&a.lambdas, &n.lambdas);
        ensure(
            dist < 1e-9,
            format!("distance {dist:e} at delta = {d}, omega = {w}"),
        )?;
        worst = worst.max(dist);
    }
    within(start.elapsed(), 5.0)?;
    Ok(format!(
        "max multiset distance {worst:.1e} over 400 points, {:.3}s",
        start.elapsed().as_secs_f64()
    ))
}

fn defectiveness() -> Check {
    let p = atom(0.0, 0.125);
    let m = build_liouvillian(&p);
    let s = liouvillian::eigenvalues_numeric(&m).map_err(|e| e.to_string())?;
    let lambda2 = Complex64::new(-0.75, 0.0);
    ensure(
        (s.lambdas[1] - lambda2).norm() < 1e-6,
        format!("lambda_2 = {}", s.lambdas[1]),
    )?;
    let rank = m.shifted_rank(lambda2, liouvillian::RANK_TOL);
    ensure(rank == 3, format!("rank(L - lambda_2) = {rank}"))?;
    let ov = overlap(&s.eigenvectors[1], &s.eigenvectors[2]);
    ensure(ov > 1.0 - 1e-6, format!("overlap {ov}"))?;
    Ok(format!("rank 3, overlap 1 - {:.1e}", 1.0 - ov))
}

fn steady_state() -> Check {
    let mut worst = 0.0f64;
    let mut highest = 0.0f64;
    for (d, w) in grid_20x20() {
        let closed = w * w / (2.0 * w * w + d * d + 0.25);
        let numeric = liouvillian::null_steady_state(&build_liouvillian(&atom(d, w))).rho11;
        let err = (numeric - Complex64::new(closed, 0.0)).norm();
        ensure(
            err < 1e-10,
            format!("rho11 error {err:e} at delta = {d}, omega = {w}"),
        )?;
        ensure(
            numeric.re < 0.5,
            format!("inversion at delta = {d}, omega = {w}"),
        )?;
        worst = worst.max(err);
        highest = highest.max(numeric.re);
    }
    Ok(format!(
        "max rho11 error {worst:.1e}, max rho11 {highest:.6}"
    ))
}

const DRIVES: [f64; 4] = [0.05, 0.125, 0.5, 1.0];

fn population_dynamics() -> Check {
    let start = Instant::now();
    let ts = linspace(0.0, 20.0, 2001);
    let mut worst = 0.0f64;
    for w in DRIVES {
        let p = atom(0.0, w);
        let a = dynamics::population(&p, &ts, CorrelatorMethod::AnalyticPiecewise)
            .map_err(|e| e.to_string())?;
        let n = dynamics::population(&p, &ts, CorrelatorMethod::NumericOde)
            .map_err(|e| e.to_string())?;
        let diff = a.max_abs_diff(&n);
        ensure(diff < 1e-8, format!("sup-norm {diff:e} at omega = {w}"))?;
        worst = worst.max(diff);
    }
    let decay: Vec<f64> = ts.iter().map(|t| (-t).exp()).collect();
    for m in [
        CorrelatorMethod::AnalyticPiecewise,
        CorrelatorMethod::NumericOde,
    ] {
        let free = dynamics::population(&atom(0.0, 0.0), &ts, m).map_err(|e| e.to_string())?;
        let err = sup(&free.real(), &decay);
        ensure(err < 1e-10, format!("undriven decay error {err:e} ({m:?})"))?;
    }
    within(start.elapsed(), 10.0)?;
    Ok(format!(
        "max sup-norm {worst:.1e}, {:.3}s",
        start.elapsed().as_secs_f64()
    ))
}

fn coherences() -> Check {
    let taus = default_tau_grid(1.0);
    let late = [100.0];
    let (mut w1, mut w2) = (0.0f64, 0.0f64);
    for w in DRIVES {
        let p = atom(0.0, w);
        let run = |f: fn(
            &AtomParams,
            &[f64],
            CorrelatorMethod,
        ) -> liouville_ep::Result<dynamics::CorrelatorTrace>,
                   grid: &[f64],
                   m| { f(&p, grid, m).map_err(|e| e.to_string()) };
        let g1a = run(dynamics::g1, &taus, CorrelatorMethod::AnalyticPiecewise)?;
        let g1n = run(dynamics::g1, &taus, CorrelatorMethod::NumericOde)?;
        let g2a = run(dynamics::g2, &taus, CorrelatorMethod::AnalyticPiecewise)?;
        let g2n = run(dynamics::g2, &taus, CorrelatorMethod::NumericOde)?;
        let d1 = g1a.max_abs_diff(&g1n);
        let d2 = g2a.max_abs_diff(&g2n);
        ensure(d1 < 1e-8, format!("g1 sup-norm {d1:e} at omega = {w}"))?;
        ensure(d2 < 1e-8, format!("g2 sup-norm {d2:e} at omega = {w}"))?;
        w1 = w1.max(d1);
        w2 = w2.max(d2);
        for g2 in [&g2a, &g2n] {
            let v = g2.real();
            ensure(
                v[0].abs() < 1e-9,
                format!("g2(0) = {:e} at omega = {w}", v[0]),
            )?;
            let tail = v[v.len() - 1];
            ensure(
                (tail - 1.0).abs() < 1e-3,
                format!("g2(20) = {tail} at omega = {w}"),
            )?;
        }
        for g1 in [&g1a, &g1n] {
            ensure(
                (g1.moduli()[0] - 1.0).abs() < 1e-12,
                format!("|g1(0)| != 1 at omega = {w}"),
            )?;
        }
        let want = 0.25 / (2.0 * w * w + 0.25);
        for m in [
            CorrelatorMethod::AnalyticPiecewise,
            CorrelatorMethod::NumericOde,
        ] {
            let got = run(dynamics::g1, &late, m)?.moduli()[0];
            ensure(
                (got - want).abs() < 1e-6,
                format!("|g1(inf)| = {got}, want {want} ({m:?})"),
            )?;
        }
    }
    Ok(format!("g1 sup-norm {w1:.1e}, g2 sup-norm {w2:.1e}"))
}

fn spectrum_checks() -> Check {
    let start = Instant::now();
    for w in [0.05, 0.125, 0.5, 1.0, 4.0] {
        let total = spectrum::total_weight(&atom(0.0, w)).map_err(|e| e.to_string())?;
        ensure(
            (total - 1.0).abs() < 1e-6,
            format!("normalization {total} at omega = {w}"),
        )?;
    }
    let grid = linspace(-10.0, 10.0, 4001);
    for (w, want) in [(1.0, 3), (0.125, 1), (0.1, 1), (0.05, 1), (0.01, 1)] {
        let s = spectrum::spectrum_analytic(&atom(0.0, w), &grid).map_err(|e| e.to_string())?;
        let n = spectrum::local_maxima(&s.inelastic).len();
        ensure(n == want, format!("{n} maxima at omega = {w}, want {want}"))?;
    }
    let el = spectrum::elastic_weight(&atom(0.0, 0.125)).map_err(|e| e.to_string())?;
    ensure(
        (el - 8.0 / 9.0).abs() < 1e-12,
        format!("elastic weight at the EP {el}"),
    )?;
    let p = atom(0.0, 1.0);
    let a = spectrum::spectrum_analytic(&p, &grid).map_err(|e| e.to_string())?;
    let n = spectrum::spectrum_numeric(&p, &grid).map_err(|e| e.to_string())?;
    let diff = a.max_abs_diff(&n);
    ensure(diff < 2e-4, format!("numeric Fourier sup-norm {diff:e}"))?;
    within(start.elapsed(), 30.0)?;
    Ok(format!(
        "Fourier sup-norm {diff:.1e}, {:.3}s",
        start.elapsed().as_secs_f64()
    ))
}

fn observables(p: &AtomParams) -> Result<Vec<f64>, String> {
    let e = |e: liouville_ep::Error| e.to_string();
    let taus = linspace(0.0, 10.0, 51);
    let mut out = Vec::new();
    let s = liouvillian::eigenvalues_analytic(p);
    let sn = liouvillian::eigenvalues_numeric(&build_liouvillian(p)).map_err(e)?;
    let mut numeric: Vec<Complex64> = sn.lambdas.to_vec();
    // A Jordan pair splits by ~sqrt(eps) under rounding; its sum and product are well-conditioned.
    for &(i, j) in &sn.coalescence {
        let (a, b) = (sn.lambdas[i], sn.lambdas[j]);
        numeric[i] = a + b;
        numeric[j] = a * b;
    }
    for z in s.lambdas.iter().chain(&numeric) {
        out.extend([z.re, z.im]);
    }
    let rho = liouvillian::null_steady_state(&build_liouvillian(p));
    out.extend([
        rho.rho11.re,
        rho.rho10.norm(),
        liouvillian::steady_state(p).rho10.norm(),
    ]);
    let mut methods = vec![CorrelatorMethod::NumericOde];
    if p.is_resonant() {
        methods.push(CorrelatorMethod::AnalyticPiecewise);
    }
    for m in methods {
        out.extend(dynamics::population(p, &taus, m).map_err(e)?.real());
        out.extend(dynamics::g1(p, &taus, m).map_err(e)?.moduli());
        out.extend(dynamics::g2(p, &taus, m).map_err(e)?.real());
    }
    if p.is_resonant() {
        out.extend(
            spectrum::spectrum_analytic(p, &linspace(-4.0, 4.0, 41))
                .map_err(e)?
                .inelastic,
        );
    }
    Ok(out)
}

fn properties() -> Check {
    let mut rng = StdRng::seed_from_u64(20);
    let mut worst = 0.0f64;
    for (d, w) in [
        (0.0, 0.05),
        (0.0, 0.125),
        (0.0, 1.0),
        (0.05, 0.3),
        (-0.2, 0.7),
    ] {
        let base = observables(&atom(d, w))?;
        for _ in 0..20 {
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            let other = observables(&AtomParams::new(d, w, 1.0, theta).unwrap())?;
            let dev = sup(&base, &other);
            ensure(
                dev < 1e-10,
                format!("theta = {theta}: deviation {dev:e} at delta = {d}, omega = {w}"),
            )?;
            worst = worst.max(dev);
        }
    }

    for d in linspace(0.0, 0.12, 121) {
        let plus = ep::solve_ep_sextic(&EpQuery::new(d, 1.0).unwrap()).omegas;
        let minus = ep::solve_ep_sextic(&EpQuery::new(-d, 1.0).unwrap()).omegas;
        ensure(
            plus == minus,
            format!("EP asymmetry at delta = {d}: {plus:?} vs {minus:?}"),
        )?;
    }

    for s in [0.5, 3.0, 40.0] {
        for d in [0.0, 0.03, 0.09] {
            let unit = ep::solve_ep_sextic(&EpQuery::new(d, 1.0).unwrap()).omegas;
            let scaled = ep::solve_ep_sextic(&EpQuery::new(s * d, s).unwrap()).omegas;
            ensure(
                unit.len() == scaled.len(),
                format!("branch count changes under gamma -> {s} gamma"),
            )?;
            for (u, v) in unit.iter().zip(&scaled) {
                ensure(
                    (v / s - u).abs() < 1e-12 * u,
                    format!("EP {v} vs {s} x {u}"),
                )?;
            }
        }
        for (d, w) in [(0.0, 0.3), (0.05, 1.0)] {
            let a = liouvillian::eigenvalues_analytic(&atom(d, w));
            let b =
                liouvillian::eigenvalues_analytic(&AtomParams::new(s * d, s * w, s, 0.0).unwrap());
            let scaled: Vec<Complex64> = a.lambdas.iter().map(|z| z * s).collect();
            let dist = multiset_distance(&scaled, &b.lambdas);
            ensure(
                dist < 1e-12 * s,
                format!("eigenvalues do not scale with gamma (s = {s}, {dist:e})"),
            )?;
            let r1 = liouvillian::steady_state(&atom(d, w)).rho11.re;
            let r2 = liouvillian::steady_state(&AtomParams::new(s * d, s * w, s, 0.0).unwrap())
                .rho11
                .re;
            ensure((r1 - r2).abs() < 1e-14, "steady state not scale invariant")?;
        }
    }

    let ts = linspace(0.0, 20.0, 401);
    let mut drift = 0.0f64;
    for (d, w) in [
        (0.0, 0.05),
        (0.0, 0.125),
        (0.0, 1.0),
        (0.05, 0.3),
        (-0.4, 2.0),
        (0.0, 10.0),
    ] {
        let p = atom(d, w);
        for init in [DensityVector::excited(), DensityVector::ground()] {
            for rho in liouvillian::evolve_density(&p, &init, &ts).map_err(|e| e.to_string())? {
                drift = drift.max(rho.defects().max());
            }
            let moments = dynamics::moment_trajectory(&p, &MomentVector::from_density(&init), &ts)
                .map_err(|e| e.to_string())?;
            for m in moments {
                drift = drift.max(m.to_density().defects().max());
            }
        }
    }
    ensure(drift < 1e-9, format!("trajectory defect {drift:e}"))?;
    Ok(format!(
        "theta deviation {worst:.1e}, trajectory defect {drift:.1e}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("resonant EP location", ep_location),
        ("critical detuning and branch counts", critical_detuning),
        (
            "analytic vs numeric Liouvillian spectra",
            spectral_cross_validation,
        ),
        ("defectiveness at the EP", defectiveness),
        ("steady state", steady_state),
        ("population dynamics", population_dynamics),
        ("first- and second-order coherence", coherences),
        ("fluorescence spectrum", spectrum_checks),
        ("property suite", properties),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail})", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name} ({why})", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
