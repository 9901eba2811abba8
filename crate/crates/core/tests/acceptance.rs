//! Acceptance gate. Prints one PASS/FAIL line per criterion followed by the
//! individual checks, and exits non-zero on any unexpected result.
//!
//! Two checks under criterion 6 are known to fail. They are asserted to fail
//! in the documented way, so a change in either direction is caught.

use std::f64::consts::PI;
use std::process::ExitCode;

use gsfluct::bath::{alpha_grid, ohmic_trajectory, ohmic_x, ohmic_y, OhmicBathParams};
use gsfluct::numerics::{nth_derivative, FiniteDifferenceScheme};
use gsfluct::oracle::{
    first_order_structure_check, ground_state, purity_via_quadrature, reduced_density, rho_nn_via_quadrature,
    spin_coupling_sweep, spin_energy_populations, truncation_change, z_via_quadrature, SystemKind, TruncatedModel,
};
use gsfluct::oscillator::{
    cumulants_closed_form, cumulants_finite_difference, fock_probabilities, fock_probabilities_for_moments,
    fock_probabilities_to_tolerance, fock_ratios, generating_function, generating_function_free, moments_to_shape,
    purity, shape_to_moments, GaussianMoments, OscillatorParams, ShapeParams, MAX_FOCK_TRUNCATION,
};
use gsfluct::qubit::{
    bloch_purity, crossover_temperature, energy_distribution, mean_energy, spectrum_from_characteristic,
    thermal_occupation, weak_coupling_p_up, BlochVector, QubitParams, ThermalCrossoverQuery,
};
use gsfluct::verify::default_tolerance;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Res<T> = Result<T, Box<dyn std::error::Error>>;

struct Check {
    name: String,
    measured: f64,
    tolerance: f64,
    passed: bool,
    /// Expected to fail; the closure decides whether the failure is the documented one.
    known_red: Option<(&'static str, bool)>,
}

impl Check {
    fn within(name: &str, measured: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            tolerance,
            passed: measured <= tolerance,
            known_red: None,
        }
    }

    fn flag(name: &str, measured: f64, passed: bool) -> Self {
        Self {
            name: name.into(),
            measured,
            tolerance: 0.0,
            passed,
            known_red: None,
        }
    }

    fn known_red(mut self, reason: &'static str, as_documented: bool) -> Self {
        self.known_red = Some((reason, as_documented));
        self
    }

    /// Result agrees with expectations: passes, or fails exactly as documented.
    fn as_expected(&self) -> bool {
        match self.known_red {
            None => self.passed,
            Some((_, documented)) => !self.passed && documented,
        }
    }
}

fn run(name: &str, body: impl FnOnce() -> Res<f64>, tolerance: f64) -> Check {
    match body() {
        Ok(v) => Check::within(name, v, tolerance),
        Err(e) => {
            let mut c = Check::within(name, f64::INFINITY, tolerance);
            c.name = format!("{name} (error: {e})");
            c
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// x, y log-uniform on [1/4, 8] with xy >= 1.
fn random_shape(rng: &mut ChaCha8Rng, quantum: f64) -> ShapeParams<f64> {
    loop {
        let x = rng.gen_range(0.25f64.ln()..8f64.ln()).exp();
        let y = rng.gen_range(0.25f64.ln()..8f64.ln()).exp();
        if x * y >= 1.0 {
            return ShapeParams::from_xy(x, y, quantum).expect("physical shape");
        }
    }
}

fn random_bloch(rng: &mut ChaCha8Rng) -> BlochVector<f64> {
    loop {
        let v = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        if v[0] * v[0] + v[1] * v[1] + v[2] * v[2] <= 1.0 {
            return BlochVector::new(v[0], v[1], v[2]).expect("inside the ball");
        }
    }
}

fn criterion_1(rng: &mut ChaCha8Rng) -> Vec<Check> {
    let shapes: Vec<_> = (0..40)
        .map(|_| {
            let quantum = rng.gen_range(0.5..2.0);
            random_shape(rng, quantum)
        })
        .collect();
    vec![
        run(
            "finite differences vs closed form, 40 shapes (relative)",
            || {
                let mut worst = 0.0f64;
                for s in &shapes {
                    let cf = cumulants_closed_form(s).to_array();
                    let fd = cumulants_finite_difference(s, &FiniteDifferenceScheme::default())?;
                    for n in 1..4 {
                        worst = worst.max(rel(fd[n].value, cf[n]));
                    }
                }
                Ok(worst)
            },
            1e-6,
        ),
        run(
            "spectral sums vs closed form, 40 shapes (relative)",
            || {
                let mut worst = 0.0f64;
                for s in &shapes {
                    let cf = cumulants_closed_form(s).to_array();
                    let sp = fock_probabilities_for_moments(s, 4, 1e-8)?.cumulants(1e-8)?.to_array();
                    for n in 1..4 {
                        worst = worst.max(rel(sp[n], cf[n]));
                    }
                }
                Ok(worst)
            },
            1e-8,
        ),
        run(
            "isolated state has zero kappa_2..4",
            || {
                let mut worst = 0.0f64;
                for quantum in [0.5f64, 1.0, 3.0] {
                    let s = ShapeParams::isolated(quantum);
                    let cf = cumulants_closed_form(&s).to_array();
                    let sp = fock_probabilities(&s, 8)?.cumulants(1e-14)?.to_array();
                    // kappa_1 is the zero-point energy.
                    worst = worst.max((cf[0] - quantum / 2.0).abs());
                    for n in 1..4 {
                        worst = worst.max(cf[n].abs()).max(sp[n].abs());
                    }
                }
                Ok(worst)
            },
            1e-12,
        ),
    ]
}

fn criterion_2(rng: &mut ChaCha8Rng) -> Vec<Check> {
    let shapes: Vec<_> = (0..24).map(|_| random_shape(rng, 1.0)).collect();
    let chis: Vec<f64> = (0..24).map(|_| rng.gen_range(0.1..2.0)).collect();
    vec![
        run(
            "energy transform vs closed form, |t| < 1",
            || {
                let mut worst = 0.0f64;
                for s in &shapes {
                    let f = fock_probabilities(s, MAX_FOCK_TRUNCATION)?;
                    // Negative chi a quarter of the way to where the envelope ratio reaches 1.
                    let reach = -(s.b + s.a.abs()).ln() / s.quantum;
                    for chi in [-0.25 * reach, 0.0, 0.1, 0.5, 1.0, 2.0] {
                        let z = f.spectral_generating_function(chi, 1e-12)?;
                        worst = worst.max((z - generating_function(s, chi)).abs());
                    }
                }
                Ok(worst)
            },
            1e-10,
        ),
        run(
            "position-space quadrature vs closed form, 24 states",
            || {
                let p = OscillatorParams::unit();
                let mut worst = 0.0f64;
                for (s, &chi) in shapes.iter().zip(&chis) {
                    let g = shape_to_moments(&p, s)?;
                    worst = worst.max((z_via_quadrature(&p, &g, chi)? - generating_function(s, chi)).abs());
                }
                Ok(worst)
            },
            1e-6,
        ),
        run(
            "isolated ground state gives exp(-chi hbar omega / 2)",
            || {
                let s = ShapeParams::isolated(1.0);
                Ok([0.3, 1.0, 2.5]
                    .iter()
                    .map(|&chi: &f64| (generating_function(&s, chi) - (-chi / 2.0).exp()).abs())
                    .fold(0.0, f64::max))
            },
            1e-15,
        ),
    ]
}

/// The printed table of `rho_nn / rho_00`.
fn printed_ratios(a: f64, b: f64) -> [f64; 8] {
    let (a2, a4, a6) = (a * a, a.powi(4), a.powi(6));
    [
        1.0,
        b,
        a2 / 2.0 + b * b,
        1.5 * a2 * b + b.powi(3),
        3.0 * a4 / 8.0 + 3.0 * a2 * b * b + b.powi(4),
        15.0 * a4 * b / 8.0 + 5.0 * a2 * b.powi(3) + b.powi(5),
        5.0 * a6 / 16.0 + 45.0 * a4 * b * b / 8.0 + 7.5 * a2 * b.powi(4) + b.powi(6),
        35.0 * a6 * b / 16.0 + 105.0 * a4 * b.powi(3) / 8.0 + 10.5 * a2 * b.powi(5) + b.powi(7),
    ]
}

fn criterion_3(rng: &mut ChaCha8Rng) -> Vec<Check> {
    let mut ab = Vec::new();
    for _ in 0..100 {
        let s = random_shape(rng, 1.0);
        ab.push((s.a, s.b));
    }
    let quad_shapes: Vec<_> = (0..4).map(|_| random_shape(rng, 1.0)).collect();
    vec![
        run(
            "eight printed polynomials vs recurrence, 100 (a, b)",
            || {
                let mut worst = 0.0f64;
                for &(a, b) in &ab {
                    for (q, p) in fock_ratios(a, b, 7).iter().zip(printed_ratios(a, b)) {
                        worst = worst.max((q - p).abs());
                    }
                }
                Ok(worst)
            },
            1e-12,
        ),
        run(
            "normalization on a 10 x 10 grid of (x, y) in [1, 10]",
            || {
                let mut worst = 0.0f64;
                for i in 1..=10 {
                    for j in 1..=10 {
                        let s = ShapeParams::from_xy(i as f64, j as f64, 1.0)?;
                        let f = fock_probabilities_to_tolerance(&s, 1e-11)?;
                        let total: f64 = f.probs.iter().sum();
                        worst = worst.max((total - 1.0).abs());
                    }
                }
                Ok(worst)
            },
            1e-10,
        ),
        run(
            "wavefunction quadrature vs Legendre form, n <= 10",
            || {
                let p = OscillatorParams::unit();
                let mut worst = 0.0f64;
                for s in &quad_shapes {
                    let g = shape_to_moments(&p, s)?;
                    let f = fock_probabilities(s, 10)?;
                    for n in 0..=10 {
                        worst = worst.max((rho_nn_via_quadrature(&p, &g, n)? - f.probs[n]).abs());
                    }
                }
                Ok(worst)
            },
            1e-8,
        ),
    ]
}

fn criterion_4(rng: &mut ChaCha8Rng) -> Vec<Check> {
    let shapes: Vec<_> = (0..20).map(|_| random_shape(rng, 1.0)).collect();
    let blochs: Vec<_> = (0..200).map(|_| random_bloch(rng)).collect();
    vec![
        run(
            "Gaussian purity closed form vs 2D quadrature, 20 states",
            || {
                let p = OscillatorParams::unit();
                let mut worst = 0.0f64;
                for s in &shapes {
                    let g = shape_to_moments(&p, s)?;
                    worst = worst.max((purity_via_quadrature(&g)? - purity(&g)?).abs());
                }
                Ok(worst)
            },
            1e-6,
        ),
        run(
            "qubit purity vs explicit Tr rho^2, 200 Bloch vectors",
            || {
                let mut worst = 0.0f64;
                for b in &blochs {
                    // rho = (1 + r . sigma) / 2 as a complex 2 x 2 matrix.
                    let rho = [
                        [
                            Complex64::new((1.0 + b.z) / 2.0, 0.0),
                            Complex64::new(b.x / 2.0, -b.y / 2.0),
                        ],
                        [
                            Complex64::new(b.x / 2.0, b.y / 2.0),
                            Complex64::new((1.0 - b.z) / 2.0, 0.0),
                        ],
                    ];
                    let tr =
                        rho[0][0] * rho[0][0] + rho[0][1] * rho[1][0] + rho[1][0] * rho[0][1] + rho[1][1] * rho[1][1];
                    worst = worst.max((bloch_purity(b)? - tr.re).abs());
                }
                Ok(worst)
            },
            1e-15,
        ),
        run(
            "oscillator purity equals 1 / (2 sqrt A)",
            || {
                let p = OscillatorParams::with_hbar(0.7, 1.9, 1.3)?;
                let mut worst = 0.0f64;
                for s in &shapes {
                    let s = ShapeParams::from_xy(s.x, s.y, p.quantum())?;
                    let g = shape_to_moments(&p, &s)?;
                    let area = g.q2() * g.p2() / (p.hbar() * p.hbar());
                    worst = worst.max((purity(&g)? - 0.5 / area.sqrt()).abs());
                }
                Ok(worst)
            },
            1e-12,
        ),
    ]
}

fn criterion_5(rng: &mut ChaCha8Rng) -> Vec<Check> {
    let cases: Vec<_> = (0..200)
        .map(|_| {
            let p = QubitParams::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.1..2.0)).expect("delta > 0");
            (p, random_bloch(rng))
        })
        .collect();
    let mut sum_exact = true;
    let mut worst_mean = 0.0f64;
    let mut worst_projector = 0.0f64;
    for (p, b) in &cases {
        let e = mean_energy(p, b);
        let Ok(d) = energy_distribution(p, e) else {
            worst_mean = f64::INFINITY;
            continue;
        };
        sum_exact &= d.p_down + d.p_up == 1.0;
        worst_mean = worst_mean.max((d.mean() - e).abs());
        // Projector onto the upper eigenstate: (1 + n . sigma) / 2 with n along the field.
        let omega = p.epsilon().hypot(p.delta());
        let p_up = 0.5 * (1.0 + (p.delta() * b.x + p.epsilon() * b.z) / omega);
        worst_projector = worst_projector.max((d.p_up - p_up).abs());
    }
    vec![
        Check::flag(
            "weights sum to 1 exactly, 200 states",
            if sum_exact { 0.0 } else { 1.0 },
            sum_exact,
        ),
        Check::within("mean energy reproduced", worst_mean, 1e-12),
        Check::within("p_up matches the eigenprojector expectation", worst_projector, 1e-12),
        run(
            "isolated ground state has p_up = 0 (to rounding)",
            || {
                let mut worst = 0.0f64;
                for (p, _) in &cases {
                    let b = BlochVector::isolated_ground_state(p);
                    worst = worst.max(energy_distribution(p, mean_energy(p, &b))?.p_up.abs());
                }
                Ok(worst)
            },
            1e-15,
        ),
        run(
            "Fourier inversion localizes weight at +-hbar Omega / 2",
            || {
                let mut worst = 0.0f64;
                for (p, b) in cases.iter().take(20) {
                    let d = energy_distribution(p, mean_energy(p, b))?;
                    let half = p.level_spacing() / 2.0;
                    for (e, w) in spectrum_from_characteristic(p, b, 2, 16) {
                        let expected = if (e - half).abs() < 1e-12 * half {
                            d.p_up
                        } else if (e + half).abs() < 1e-12 * half {
                            d.p_down
                        } else {
                            0.0
                        };
                        worst = worst.max((w - expected).abs());
                    }
                }
                Ok(worst)
            },
            1e-6,
        ),
    ]
}

/// Inverse tangent by its Taylor series, valid for |z| < 1.
fn atan_series(z: f64) -> f64 {
    let mut term = z;
    let mut acc = 0.0;
    for k in 0..400 {
        acc += term / (2 * k + 1) as f64;
        term *= -z * z;
    }
    acc
}

fn criterion_6() -> Vec<Check> {
    const STATED_Y_HALF: f64 = 1.85073;
    // y(1/2) at cutoff 10 by hand: x(1/2) = 4 / (3 sqrt 3), so
    // y = (1 - 1/2) x + (2 / pi) ln 10.
    let x_half = 4.0 / (3.0 * 3f64.sqrt());
    let y_half = 0.5 * x_half + 2.0 / PI * 10f64.ln();
    // Independent series evaluation of x(alpha) for alpha < 1/sqrt 2.
    let x_series = |a: f64| {
        let s = (1.0 - a * a).sqrt();
        (1.0 - 2.0 / PI * atan_series(a / s)) / s
    };

    let boundary = (|| -> Res<f64> {
        let x0 = ohmic_x(0.0f64)?;
        let y0 = ohmic_y(&OhmicBathParams::new(0.0f64, 10.0)?)?;
        let row = &ohmic_trajectory(&[OhmicBathParams::new(0.0f64, 10.0)?], 3)?[0];
        Ok((x0 - 1.0)
            .abs()
            .max((y0 - 1.0).abs())
            .max((row.purity - 1.0).abs())
            .max((row.probs[0] - 1.0).abs()))
    })();
    let y_computed = OhmicBathParams::new(0.5, 10.0).and_then(|p| ohmic_y(&p));
    let y_gap = y_computed
        .as_ref()
        .map(|y| (y - STATED_Y_HALF).abs())
        .unwrap_or(f64::INFINITY);

    let purities: Vec<f64> = alpha_grid(0.9, 91, 10.0)
        .and_then(|g| ohmic_trajectory(&g, 0))
        .map(|rows| rows.iter().map(|r| r.purity).collect())
        .unwrap_or_default();
    let rise = purities
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    let (argmin, _) = purities.iter().enumerate().fold(
        (0, f64::INFINITY),
        |(i0, m), (i, &p)| if p < m { (i, p) } else { (i0, m) },
    );
    let alpha_min = 0.01 * argmin as f64;
    let total_rise = purities.last().copied().unwrap_or(f64::NAN) - purities.get(argmin).copied().unwrap_or(f64::NAN);

    vec![
        Check::within(
            "x(0) = y(0) = 1 and the alpha = 0 row is isolated",
            boundary.unwrap_or(f64::INFINITY),
            0.0,
        ),
        run("x(0.5) = 4 / (3 sqrt 3)", || Ok((ohmic_x(0.5)? - x_half).abs()), 1e-12),
        run(
            "x(alpha) vs arctan series, alpha <= 0.6",
            || {
                let mut worst = 0.0f64;
                for i in 0..=12 {
                    let a = 0.05 * i as f64;
                    worst = worst.max((ohmic_x(a)? - x_series(a)).abs());
                }
                Ok(worst)
            },
            1e-12,
        ),
        Check::within(
            "y(0.5), cutoff 10, vs hand evaluation of the formula",
            y_computed.as_ref().map(|y| (y - y_half).abs()).unwrap_or(f64::INFINITY),
            1e-12,
        ),
        Check::within("y(0.5), cutoff 10, vs stated 1.85073", y_gap, 1e-5).known_red(
            "the stated value drops the x-term's third digit; the formula gives 1.8507714",
            (y_gap - (y_half - STATED_Y_HALF).abs()).abs() < 1e-12 && y_gap > 4e-5,
        ),
        Check::within("purity non-increasing on [0, 0.9], cutoff 10 (largest rise)", rise, 0.0).known_red(
            "1/sqrt(xy) has a minimum near alpha = 0.82 and rises by about 5.5e-4 up to 0.9",
            rise > 0.0 && (5e-4..6e-4).contains(&total_rise) && (0.80..=0.85).contains(&alpha_min),
        ),
    ]
}

fn criterion_7() -> Vec<Check> {
    vec![run(
        "thermal occupation at T* equals alpha ln(omega_c / delta)",
        || {
            let mut worst = 0.0f64;
            for gap in [0.05, 0.5, 1.0, 7.0, 40.0] {
                for alpha in [1e-5, 1e-4, 1e-3, 1e-2, 3e-2] {
                    for cutoff in [2.0, 10.0, 100.0, 1e4] {
                        for k in [1.0, 8.617e-5] {
                            let mut q = ThermalCrossoverQuery::new(gap, alpha, cutoff);
                            q.boltzmann_k = k;
                            let t = crossover_temperature(&q)?;
                            let target = weak_coupling_p_up(alpha, 1.0, cutoff)?.value;
                            worst = worst.max(rel(thermal_occupation(gap, t, k)?, target));
                        }
                    }
                }
            }
            Ok(worst)
        },
        1e-9,
    )]
}

fn criterion_8() -> Vec<Check> {
    let bath = vec![0.6, 1.1, 1.7];
    let separable = run(
        "zero coupling reproduces the separable ground state",
        || {
            let mut worst = 0.0f64;
            let zero_point: f64 = bath.iter().sum::<f64>() / 2.0;
            let spin = QubitParams::new(0.3, 0.8)?;
            let m = TruncatedModel::new(SystemKind::Spin(spin), bath.clone(), vec![0.0; 3], 6)?;
            let gs = ground_state(&m)?;
            let rho = reduced_density(&gs.vector, &m)?;
            let omega = 0.3f64.hypot(0.8);
            worst = worst
                .max((gs.energy - (zero_point - omega / 2.0)).abs())
                .max(spin_energy_populations(&spin, &rho)?.1.abs())
                .max((rho.purity() - 1.0).abs());
            let osc = OscillatorParams::new(1.0, 1.5)?;
            let m = TruncatedModel::new(SystemKind::Oscillator(osc), bath.clone(), vec![0.0; 3], 6)?;
            let gs = ground_state(&m)?;
            let rho = reduced_density(&gs.vector, &m)?;
            worst = worst
                .max((gs.energy - (zero_point + 0.75)).abs())
                .max((rho.diagonal()[0] - 1.0).abs());
            Ok(worst)
        },
        1e-10,
    );
    let perturbative = run(
        "weak coupling energy shift vs -sum g^2 / (Delta + omega_k)",
        || {
            let g = [0.01, 0.015, 0.02];
            let m = TruncatedModel::new(
                SystemKind::Spin(QubitParams::new(0.0, 1.0)?),
                bath.clone(),
                g.to_vec(),
                6,
            )?;
            let shift = ground_state(&m)?.energy - m.separable_ground_energy();
            let expected: f64 = g.iter().zip(&bath).map(|(g, w)| -g * g / (1.0 + w)).sum();
            Ok(rel(shift, expected))
        },
        1e-3,
    );
    let surrogate = TruncatedModel::new(
        SystemKind::Spin(QubitParams::new(0.0, 1.0).expect("valid")),
        vec![0.5, 1.0, 2.0],
        vec![0.2, 0.2, 0.2],
        10,
    )
    .expect("valid model");
    let trend = match spin_coupling_sweep(&surrogate, &[0.0, 0.25, 0.5, 1.0, 2.0, 4.0]) {
        Ok(sweep) => {
            let worst = sweep
                .windows(2)
                .map(|w| w[0].p_up - w[1].p_up)
                .fold(f64::NEG_INFINITY, f64::max);
            Check::flag(
                "p_up strictly increasing with coupling, 3-mode surrogate (largest step down)",
                worst,
                worst < 0.0,
            )
        }
        Err(e) => Check::flag(&format!("p_up trend (error: {e})"), f64::INFINITY, false),
    };
    let first_order = TruncatedModel::new(
        SystemKind::Spin(QubitParams::new(0.5, 1.0).expect("valid")),
        vec![0.8, 1.5],
        vec![0.3, 0.3],
        10,
    )
    .expect("valid model");
    let converged = run(
        "doubling the Fock cutoff moves reduced diagonals by",
        || {
            Ok(truncation_change(&first_order.with_coupling_strength(0.08)?)?
                .max(truncation_change(&surrogate.with_coupling_strength(4.0)?)?))
        },
        1e-6,
    );
    let slope = run(
        "eigenvalue minus diagonal: |log-log slope - 2|",
        || {
            let r = first_order_structure_check(&first_order, &[0.01, 0.02, 0.04, 0.08])?;
            Ok((r.loglog_slope.ok_or("slope fit failed")? - 2.0).abs())
        },
        0.2,
    );
    vec![separable, perturbative, trend, converged, slope]
}

fn criterion_9(rng: &mut ChaCha8Rng) -> Vec<Check> {
    let moments: Vec<(f64, f64)> = (0..20)
        .map(|_| (rng.gen_range(0.5..5.0), rng.gen_range(0.5..5.0)))
        .collect();
    vec![
        run(
            "generating function at omega = 1e-4 vs free-particle form",
            || {
                let p = OscillatorParams::new(1.0, 1e-4)?;
                let mut worst = 0.0f64;
                for &(q2, p2) in &moments {
                    let s = moments_to_shape(&p, &GaussianMoments::new(q2, p2)?)?;
                    for chi in [0.1, 0.5, 1.0, 2.0] {
                        worst =
                            worst.max((generating_function(&s, chi) - generating_function_free(p2, 1.0, chi)).abs());
                    }
                }
                Ok(worst)
            },
            1e-6,
        ),
        run(
            "even momentum moments follow 1, 3, 15 (relative)",
            || {
                let mut worst = 0.0f64;
                for &(p2, m) in &moments {
                    let unit = 0.25 * m / p2;
                    for (n, df) in [(1, 1.0), (2, 3.0), (3, 15.0)] {
                        let d = nth_derivative(
                            |u| generating_function_free(p2, m, u * unit),
                            n,
                            &FiniteDifferenceScheme::default(),
                        )?;
                        // <p^{2n}> = (2m)^n <(p^2/2m)^n> = (2m)^n (-1)^n Z^(n)(0)
                        let moment = (-1f64).powi(n as i32) * d.value / unit.powi(n as i32) * (2.0 * m).powi(n as i32);
                        worst = worst.max(rel(moment, df * p2.powi(n as i32)));
                    }
                }
                Ok(worst)
            },
            1e-6,
        ),
    ]
}

/// Tolerances as stated by the acceptance criteria, keyed by verification check.
const STATED_TOLERANCES: &[(&str, f64)] = &[
    ("cumulant-finite-difference", 1e-6),
    ("cumulant-spectral", 1e-8),
    ("cumulant-isolated", 1e-12),
    ("generating-spectral", 1e-10),
    ("generating-quadrature", 1e-6),
    ("fock-polynomials", 1e-12),
    ("fock-normalization", 1e-10),
    ("fock-quadrature", 1e-8),
    ("purity-quadrature", 1e-6),
    ("oscillator-purity-area", 1e-12),
    ("qubit-mean-energy", 1e-12),
    ("qubit-fourier", 1e-6),
    ("ohmic-x-half", 1e-12),
    ("crossover-roundtrip", 1e-9),
    ("ed-first-order-slope", 0.2),
    ("free-particle-limit", 1e-6),
    ("wick-moments", 1e-6),
];

fn main() -> ExitCode {
    let mut rng = ChaCha8Rng::seed_from_u64(20_091_110);
    let criteria: Vec<(&str, Vec<Check>)> = vec![
        ("cumulant triple consistency", criterion_1(&mut rng)),
        ("generating-function equivalence", criterion_2(&mut rng)),
        ("Fock-probability table", criterion_3(&mut rng)),
        ("purity identities", criterion_4(&mut rng)),
        ("qubit distribution", criterion_5(&mut rng)),
        ("ohmic trajectory", criterion_6()),
        ("crossover round trip", criterion_7()),
        ("exact-diagonalization oracle", criterion_8()),
        ("free-particle limit", criterion_9(&mut rng)),
    ];

    let mut unexpected = 0;
    for (i, (title, checks)) in criteria.iter().enumerate() {
        let passed = checks.iter().all(|c| c.passed);
        println!("{} criterion {}: {title}", if passed { "PASS" } else { "FAIL" }, i + 1);
        for c in checks {
            let status = match (c.passed, c.known_red) {
                (true, _) => "ok  ",
                (false, None) => "FAIL",
                (false, Some(_)) => "red ",
            };
            println!(
                "    {status} {}: {:.3e} (tolerance {:.0e})",
                c.name, c.measured, c.tolerance
            );
            if let Some((reason, documented)) = c.known_red {
                println!("         known conflict: {reason}");
                if !documented {
                    println!("         but the measured behaviour no longer matches that analysis");
                }
            }
            if !c.as_expected() {
                unexpected += 1;
            }
        }
    }

    let mut drift = Vec::new();
    for &(check, stated) in STATED_TOLERANCES {
        if default_tolerance(check) != Some(stated) {
            drift.push(format!(
                "{check}: default {:?}, stated {stated:e}",
                default_tolerance(check)
            ));
        }
    }
    println!(
        "{} default verification tolerances match the criteria",
        if drift.is_empty() { "PASS" } else { "FAIL" }
    );
    for d in &drift {
        println!("    FAIL {d}");
    }
    unexpected += drift.len();

    if unexpected == 0 {
        println!("acceptance: all criteria as expected (criterion 6 carries two known conflicts)");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {unexpected} unexpected result(s)");
        ExitCode::FAILURE
    }
}
