use anyhow::{bail, Result};
use gsfluct::bath::{alpha_grid, ohmic_trajectory};
use gsfluct::numerics::FiniteDifferenceScheme;
use gsfluct::oracle::purity_via_quadrature;
use gsfluct::oscillator::{
    cumulants_closed_form, cumulants_finite_difference, fock_probabilities, fock_probabilities_for_moments,
    moments_to_shape, shape_to_moments, GaussianMoments, OscillatorParams, ShapeParams,
};
use gsfluct::qubit::{
    bloch_purity, crossover_temperature, energy_distribution, mean_energy, weak_coupling_p_up, BlochVector,
    QubitParams, ThermalCrossoverQuery,
};
use gsfluct::verify::{run_verification, VerifyOptions};

use crate::output::{Cell, Table};
use crate::params::Settings;

/// Checks run by `oracle-verify`.
pub const ORACLE_CHECKS: &[&str] = &[
    "generating-quadrature",
    "fock-quadrature",
    "purity-quadrature",
    "ed-separable",
    "ed-p-up-trend",
    "ed-first-order-slope",
    "ed-first-order-linear",
    "ed-truncation",
];

pub struct Outcome {
    pub table: Table,
    /// Names of failed checks, for exit status 2.
    pub failed: Vec<String>,
    pub warnings: Vec<String>,
}

impl From<Table> for Outcome {
    fn from(table: Table) -> Self {
        Self {
            table,
            failed: Vec::new(),
            warnings: Vec::new(),
        }
    }
}

pub fn run(command: &str, s: &Settings) -> Result<Outcome> {
    match command {
        "qubit-dist" => qubit_dist(s).map(Into::into),
        "qubit-crossover" => qubit_crossover(s),
        "osc-cumulants" => osc_cumulants(s).map(Into::into),
        "osc-probs" => osc_probs(s).map(Into::into),
        "osc-purity" => osc_purity(s).map(Into::into),
        "ohmic-trajectory" => trajectory(s).map(Into::into),
        "oracle-verify" => verify(s, Some(ORACLE_CHECKS)),
        "verify-all" => verify(s, None),
        other => bail!("unknown command '{other}'"),
    }
}

fn qubit_dist(s: &Settings) -> Result<Table> {
    let p = QubitParams::with_hbar(
        s.require_float("epsilon")?,
        s.require_float("delta")?,
        s.require_float("hbar")?,
    )?;
    let b = BlochVector::new(s.require_float("sx")?, s.require_float("sy")?, s.require_float("sz")?)?;
    let e = mean_energy(&p, &b);
    let d = energy_distribution(&p, e)?;
    let mut t = Table::new(&[
        "epsilon",
        "delta",
        "mean_energy",
        "energy_minus",
        "energy_plus",
        "p_down",
        "p_up",
        "purity",
    ]);
    t.push(vec![
        Cell::Num(p.epsilon()),
        Cell::Num(p.delta()),
        Cell::Num(e),
        Cell::Num(d.energy_minus),
        Cell::Num(d.energy_plus),
        Cell::Num(d.p_down),
        Cell::Num(d.p_up),
        Cell::Num(bloch_purity(&b)?),
    ]);
    Ok(t)
}

fn qubit_crossover(s: &Settings) -> Result<Outcome> {
    let gap = s.require_float("gap")?;
    let cutoff = s.require_float("cutoff")?;
    let k = s.require_float("k")?;
    let alphas: Vec<f64> = match (s.float("alpha")?, s.float("alpha-max")?) {
        (Some(a), None) => vec![a],
        (None, Some(max)) => {
            let steps = s.count("steps")?;
            if steps == 0 {
                bail!("'steps' must be at least 1");
            }
            (1..=steps).map(|i| max * i as f64 / steps as f64).collect()
        }
        (Some(_), Some(_)) => bail!("give either 'alpha' or 'alpha-max', not both"),
        (None, None) => bail!("missing required parameter 'alpha' (or 'alpha-max' for a sweep)"),
    };
    let mut t = Table::new(&["alpha", "p_up", "crossover_temperature"]);
    let mut warnings = Vec::new();
    for alpha in alphas {
        let p = weak_coupling_p_up(alpha, 1.0, cutoff)?;
        if let Some(w) = p.warning {
            warnings.push(format!("alpha = {alpha}: {w}"));
        }
        let mut q = ThermalCrossoverQuery::new(gap, alpha, cutoff);
        q.boltzmann_k = k;
        t.push(vec![
            Cell::Num(alpha),
            Cell::Num(p.value),
            Cell::Num(crossover_temperature(&q)?),
        ]);
    }
    Ok(Outcome {
        table: t,
        failed: Vec::new(),
        warnings,
    })
}

fn shape(s: &Settings) -> Result<ShapeParams<f64>> {
    Ok(ShapeParams::from_xy(
        s.require_float("x")?,
        s.require_float("y")?,
        s.require_float("quantum")?,
    )?)
}

fn osc_cumulants(s: &Settings) -> Result<Table> {
    let shape = shape(s)?;
    let scheme = FiniteDifferenceScheme::new(s.require_float("step")?, 4)?.with_levels(s.count("levels")?);
    let closed = cumulants_closed_form(&shape).to_array();
    let fd = cumulants_finite_difference(&shape, &scheme)?;
    let spectral = fock_probabilities_for_moments(&shape, 4, 1e-10)?
        .cumulants(1e-10)?
        .to_array();
    let mut t = Table::new(&[
        "order",
        "closed_form",
        "finite_difference",
        "finite_difference_error",
        "spectral",
    ]);
    for n in 0..4 {
        t.push(vec![
            Cell::Int(n as i64 + 1),
            Cell::Num(closed[n]),
            Cell::Num(fd[n].value),
            Cell::Num(fd[n].error),
            Cell::Num(spectral[n]),
        ]);
    }
    Ok(t)
}

fn osc_probs(s: &Settings) -> Result<Table> {
    let f = fock_probabilities(&shape(s)?, s.count("nmax")?)?;
    let mut t = Table::new(&["n", "energy", "probability"]);
    for (n, p) in f.probs.iter().enumerate() {
        t.push(vec![Cell::Int(n as i64), Cell::Num(f.level_energy(n)), Cell::Num(*p)]);
    }
    Ok(t)
}

fn osc_purity(s: &Settings) -> Result<Table> {
    let p = OscillatorParams::with_hbar(
        s.require_float("mass")?,
        s.require_float("omega")?,
        s.require_float("hbar")?,
    )?;
    let (x, y, q2, p2) = (s.float("x")?, s.float("y")?, s.float("q2")?, s.float("p2")?);
    let (shape, g) = match (x, y, q2, p2) {
        (Some(x), Some(y), None, None) => {
            let sh = ShapeParams::from_xy(x, y, p.quantum())?;
            (sh, shape_to_moments(&p, &sh)?)
        }
        (None, None, Some(q2), Some(p2)) => {
            let g = GaussianMoments::with_hbar(q2, p2, p.hbar())?;
            (moments_to_shape(&p, &g)?, g)
        }
        _ => bail!("give either 'x' and 'y', or 'q2' and 'p2'"),
    };
    let mut t = Table::new(&["x", "y", "area", "purity", "purity_quadrature"]);
    t.push(vec![
        Cell::Num(shape.x),
        Cell::Num(shape.y),
        Cell::Num(shape.area),
        Cell::Num(shape.purity()),
        Cell::Num(purity_via_quadrature(&g)?),
    ]);
    Ok(t)
}

fn trajectory(s: &Settings) -> Result<Table> {
    let nmax = s.count("nmax")?;
    let grid = alpha_grid(
        s.require_float("alpha-max")?,
        s.count("steps")?,
        s.require_float("cutoff")?,
    )?;
    let rows = ohmic_trajectory(&grid, nmax)?;
    let mut columns = vec!["alpha".to_string(), "x".into(), "y".into(), "purity".into()];
    columns.extend((0..=nmax).map(|n| format!("rho_{n}{n}")));
    let mut t = Table::with_columns(columns);
    for r in rows {
        let mut row = vec![Cell::Num(r.alpha), Cell::Num(r.x), Cell::Num(r.y), Cell::Num(r.purity)];
        row.extend(r.probs.iter().map(|p| Cell::Num(*p)));
        t.push(row);
    }
    Ok(t)
}

fn verify(s: &Settings, restrict: Option<&[&str]>) -> Result<Outcome> {
    let mut only = s.list("only");
    if let Some(allowed) = restrict {
        for name in &only {
            if !allowed.contains(&name.as_str()) {
                bail!("'{name}' is not an oracle check; valid checks: {}", allowed.join(", "));
            }
        }
        if only.is_empty() {
            only = allowed.iter().map(|c| c.to_string()).collect();
        }
    }
    let opts = VerifyOptions {
        seed: s.count("seed")? as u64,
        samples: s.count("samples")?,
        tolerance_overrides: s.tolerances()?,
        only,
    };
    let report = run_verification(&opts)?;
    let mut t = Table::new(&["suite", "check", "measured", "tolerance", "passed"]);
    let mut warnings = Vec::new();
    for r in &report.records {
        t.push(vec![
            Cell::Text(r.suite.clone()),
            Cell::Text(r.name.clone()),
            Cell::Num(r.measured),
            Cell::Num(r.tolerance),
            Cell::Bool(r.passed),
        ]);
        if let Some(note) = &r.note {
            warnings.push(format!("{}: {note}", r.name));
        }
    }
    Ok(Outcome {
        table: t,
        failed: report.failures().map(|r| r.name.clone()).collect(),
        warnings,
    })
}
