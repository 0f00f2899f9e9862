use liouville_ep::dynamics::{self, CorrelatorMethod, CorrelatorTrace, TraceValues};
use liouville_ep::eigen::multiset_distance;
use liouville_ep::ep::{self, EpQuery};
use liouville_ep::liouvillian::{self, build_liouvillian, DensityVector, LiouvillianSpectrum};
use liouville_ep::spectrum::{self, SpectrumResult};
use liouville_ep::{AtomParams, ComplexFrequency};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::{Method, Subcommand, SweepConfig};
use crate::error::CliError;
use crate::table::{Cell, Table};

type Res<T> = Result<T, CliError>;

/// Evaluate a sweep into its table.
pub fn run(config: &SweepConfig) -> Res<Table> {
    config.validate()?;
    let xs = config.points();
    match config.subcommand {
        Subcommand::EpLocate => ep_locate(config, &xs),
        Subcommand::Eigenvalues => eigenvalues(config, &xs),
        Subcommand::SteadyState => steady_state(config, &xs),
        Subcommand::Dynamics => correlator(config, &xs, "rho11", dynamics::population),
        Subcommand::G1 => g1(config, &xs),
        Subcommand::G2 => correlator(config, &xs, "g2", dynamics::g2),
        Subcommand::Spectrum => spectrum(config, &xs),
    }
}

fn prefixes(method: Method) -> Vec<(&'static str, bool)> {
    match method {
        Method::Analytic => vec![("", true)],
        Method::Numeric => vec![("", false)],
        Method::Both => vec![("analytic_", true), ("numeric_", false)],
    }
}

fn columns(axis: &str, method: Method, per_method: &[&str]) -> Vec<String> {
    let mut cols = vec![axis.to_string()];
    for (prefix, _) in prefixes(method) {
        cols.extend(per_method.iter().map(|c| format!("{prefix}{c}")));
    }
    cols
}

fn finish(config: &SweepConfig, cols: Vec<String>, rows: Vec<Vec<Cell>>) -> Table {
    let mut t = Table::new(config.subcommand.name(), config.describe(), cols);
    t.rows = rows;
    t
}

fn at_omega(p: &AtomParams, omega: f64) -> Res<AtomParams> {
    Ok(p.with_omega(omega)?)
}

fn ep_locate(config: &SweepConfig, deltas: &[f64]) -> Res<Table> {
    let gamma = config.params.gamma();
    let rows = deltas
        .par_iter()
        .map(|&d| -> Res<Vec<Cell>> {
            let found = ep::solve_ep_sextic(&EpQuery::new(d, gamma)?);
            let mut row = vec![Cell::Num(d), Cell::Count(found.omegas.len() as u64)];
            let gaps = found
                .omegas
                .iter()
                .map(|&w| {
                    let p = AtomParams::new(d, w, gamma, 0.0)?;
                    Ok(liouvillian::eigenvalues_numeric(&build_liouvillian(&p))?.min_gap())
                })
                .collect::<Res<Vec<f64>>>()?;
            for k in 0..2 {
                row.push(found.omegas.get(k).copied().into());
            }
            for k in 0..2 {
                row.push(gaps.get(k).copied().into());
            }
            row.push(Cell::Num(found.discriminant));
            Ok(row)
        })
        .collect::<Res<Vec<_>>>()?;
    let cols = [
        "delta",
        "n_eps",
        "omega_ep_1",
        "omega_ep_2",
        "numeric_gap_1",
        "numeric_gap_2",
        "discriminant",
    ];
    let mut t = finish(config, cols.iter().map(|s| s.to_string()).collect(), rows);
    t.summary
        .insert("critical_delta".into(), ep::critical_detuning(gamma));
    Ok(t)
}

fn eigen_at(p: &AtomParams, analytic: bool) -> Res<LiouvillianSpectrum> {
    if analytic {
        Ok(liouvillian::eigenvalues_analytic(p))
    } else {
        Ok(liouvillian::eigenvalues_numeric(&build_liouvillian(p))?)
    }
}

fn eigenvalues(config: &SweepConfig, omegas: &[f64]) -> Res<Table> {
    let name = if config.raw_lambda {
        "lambda"
    } else {
        "ilambda"
    };
    let per: Vec<String> = (1..=3)
        .flat_map(|k| [format!("{name}{k}_re"), format!("{name}{k}_im")])
        .chain(["n_coalesced".to_string()])
        .collect();
    let per: Vec<&str> = per.iter().map(String::as_str).collect();
    let shown = |z: ComplexFrequency| {
        if config.raw_lambda {
            z
        } else {
            Complex64::i() * z
        }
    };
    let results = omegas
        .par_iter()
        .map(|&w| -> Res<(Vec<Cell>, f64)> {
            let p = at_omega(&config.params, w)?;
            let mut row = vec![Cell::Num(w)];
            let mut spectra = Vec::new();
            for (_, analytic) in prefixes(config.method) {
                let s = eigen_at(&p, analytic)?;
                for z in s.nontrivial() {
                    let z = shown(z);
                    row.extend([Cell::Num(z.re), Cell::Num(z.im)]);
                }
                row.push(Cell::Count(s.coalescence.len() as u64));
                spectra.push(s.nontrivial());
            }
            let diff = match spectra.as_slice() {
                [a, b] => multiset_distance(a, b),
                _ => 0.0,
            };
            Ok((row, diff))
        })
        .collect::<Res<Vec<_>>>()?;
    with_diff(config, columns("omega", config.method, &per), results)
}

fn with_diff(
    config: &SweepConfig,
    cols: Vec<String>,
    results: Vec<(Vec<Cell>, f64)>,
) -> Res<Table> {
    let diff = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let mut t = finish(config, cols, results.into_iter().map(|r| r.0).collect());
    if config.method == Method::Both {
        t.summary.insert("max_abs_diff".into(), diff);
    }
    Ok(t)
}

fn density_cells(rho: &DensityVector) -> [Cell; 4] {
    [
        rho.rho00.re.into(),
        rho.rho11.re.into(),
        rho.rho10.re.into(),
        rho.rho10.im.into(),
    ]
}

fn steady_state(config: &SweepConfig, omegas: &[f64]) -> Res<Table> {
    let per = ["rho00", "rho11", "rho10_re", "rho10_im"];
    let results = omegas
        .par_iter()
        .map(|&w| -> Res<(Vec<Cell>, f64)> {
            let p = at_omega(&config.params, w)?;
            let mut row = vec![Cell::Num(w)];
            let mut states = Vec::new();
            for (_, analytic) in prefixes(config.method) {
                let rho = if analytic {
                    liouvillian::steady_state(&p)
                } else {
                    liouvillian::null_steady_state(&build_liouvillian(&p))
                };
                row.extend(density_cells(&rho));
                states.push(rho.to_array());
            }
            let diff = match states.as_slice() {
                [a, b] => a
                    .iter()
                    .zip(b)
                    .map(|(x, y)| (x - y).norm())
                    .fold(0.0, f64::max),
                _ => 0.0,
            };
            Ok((row, diff))
        })
        .collect::<Res<Vec<_>>>()?;
    with_diff(config, columns("omega", config.method, &per), results)
}

fn correlator_method(analytic: bool) -> CorrelatorMethod {
    if analytic {
        CorrelatorMethod::AnalyticPiecewise
    } else {
        CorrelatorMethod::NumericOde
    }
}

/// Evaluate every requested method, concurrently for `both`.
fn traces<T: Send>(
    method: Method,
    eval: impl Fn(bool) -> liouville_ep::Result<T> + Sync,
) -> Res<Vec<T>> {
    match method {
        Method::Both => {
            let (a, n) = rayon::join(|| eval(true), || eval(false));
            Ok(vec![a?, n?])
        }
        m => Ok(vec![eval(m == Method::Analytic)?]),
    }
}

fn correlator(
    config: &SweepConfig,
    xs: &[f64],
    name: &str,
    f: fn(&AtomParams, &[f64], CorrelatorMethod) -> liouville_ep::Result<CorrelatorTrace>,
) -> Res<Table> {
    let ts = traces(config.method, |a| {
        f(&config.params, xs, correlator_method(a))
    })?;
    let values: Vec<Vec<f64>> = ts.iter().map(CorrelatorTrace::real).collect();
    let rows = xs
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            std::iter::once(Cell::Num(x))
                .chain(values.iter().map(|v| Cell::Num(v[k])))
                .collect()
        })
        .collect();
    let mut t = finish(
        config,
        columns(&config.grid.variable, config.method, &[name]),
        rows,
    );
    if let [a, b] = ts.as_slice() {
        t.summary.insert("max_abs_diff".into(), a.max_abs_diff(b));
    }
    Ok(t)
}

fn complex_values(trace: &CorrelatorTrace) -> Vec<Complex64> {
    match &trace.values {
        TraceValues::Real(v) => v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        TraceValues::Complex(v) => v.clone(),
    }
}

fn g1(config: &SweepConfig, xs: &[f64]) -> Res<Table> {
    let ts = traces(config.method, |a| {
        dynamics::g1(&config.params, xs, correlator_method(a))
    })?;
    let values: Vec<Vec<Complex64>> = ts.iter().map(complex_values).collect();
    let rows = xs
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let mut row = vec![Cell::Num(x)];
            for v in &values {
                row.extend([
                    Cell::Num(v[k].re),
                    Cell::Num(v[k].im),
                    Cell::Num(v[k].norm()),
                ]);
            }
            row
        })
        .collect();
    let mut t = finish(
        config,
        columns("tau", config.method, &["g1_re", "g1_im", "g1_abs"]),
        rows,
    );
    if let [a, b] = values.as_slice() {
        let diff = a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        t.summary.insert("max_abs_diff".into(), diff);
    }
    Ok(t)
}

fn spectrum(config: &SweepConfig, xs: &[f64]) -> Res<Table> {
    let p = &config.params;
    let results: Vec<SpectrumResult> = traces(config.method, |a| {
        if a {
            spectrum::spectrum_analytic(p, xs)
        } else {
            spectrum::spectrum_numeric(p, xs)
        }
    })?;
    let rows = xs
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            std::iter::once(Cell::Num(x))
                .chain(results.iter().map(|r| Cell::Num(r.inelastic[k])))
                .collect()
        })
        .collect();
    let mut t = finish(config, columns("freq", config.method, &["inelastic"]), rows);
    for ((prefix, analytic), r) in prefixes(config.method).into_iter().zip(&results) {
        t.summary
            .insert(format!("{prefix}elastic_weight"), r.elastic_weight);
        t.summary.insert(
            format!("{prefix}sampled_inelastic_weight"),
            r.sampled_inelastic_weight(),
        );
        if analytic {
            t.summary
                .insert(format!("{prefix}total_weight"), spectrum::total_weight(p)?);
        }
    }
    if let [a, b] = results.as_slice() {
        t.summary.insert("max_abs_diff".into(), a.max_abs_diff(b));
    }
    Ok(t)
}
