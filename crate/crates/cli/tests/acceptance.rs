//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::f64::consts::PI;
use std::panic;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use testrig_core::fem::recovery::element_end_curvatures;
use testrig_core::fem::system::nodal_deflections;
use testrig_core::fem::{
    clamped_rod, frequency_grid, harmonic_response, solve_modal, solve_static, RayleighDamping, SpatialLoad,
};
use testrig_core::grasp::{
    defuzzify_centroid, fuzzy_desired_force, grasp_simulate, infer, ContactPlant, Feedback, FuzzySystem, GraspInputs,
    PidGains, SetpointSource, SimOptions,
};
use testrig_core::motion::{displacement_to_steps, plan_trapezoid, steps_to_displacement, AxisSpec, ProfileShape};
use testrig_core::statics::{
    analyse, max_deflection, BeamSpec, ComponentMassList, UdlLoad, UdlMode, REFERENCE_SECOND_MOMENT, REFERENCE_SPAN,
};
use testrig_core::testmatrix::{run_pick_place, Controller, Outcome, RunOptions, Scenario, SensorSuite};

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn clamped_roots(n: usize) -> Vec<f64> {
    let g = |x: f64| x.cos() * x.cosh() - 1.0;
    (1..=n)
        .map(|k| {
            let centre = (k as f64 + 0.5) * PI;
            let (mut a, mut b) = (centre - 0.5, centre + 0.5);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if g(a) * g(m) <= 0.0 {
                    b = m;
                } else {
                    a = m;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

fn statics_vector() -> Result<String, String> {
    let w = ComponentMassList::actuator().total_mass() * 9.81;
    check(rel(w, 19.62) < 1e-12, || format!("total weight {w}"))?;
    let load = UdlLoad::new(w, UdlMode::PaperCompat).map_err(|e| e.to_string())?;
    let beam = BeamSpec::guide_rod();
    let r = analyse(&beam, &load, REFERENCE_SPAN, Some(REFERENCE_SECOND_MOMENT)).map_err(|e| e.to_string())?;
    let pairs = [
        ("R", r.reaction, 6.494),
        ("M_end", r.end_moment, 0.7165),
        ("M_centre", r.centre_moment, 0.3582),
        ("deflection", r.max_deflection, 2.28e-11),
    ];
    let mut worst: f64 = 0.0;
    for (name, got, want) in pairs {
        check(rel(got, want) <= 1e-3, || format!("{name}: {got} vs {want}"))?;
        worst = worst.max(rel(got, want));
    }
    Ok(format!("worst relative error {worst:.2e}"))
}

fn modal_table() -> Result<String, String> {
    let start = Instant::now();
    let sys = clamped_rod(&BeamSpec::guide_rod(), 64).map_err(|e| e.to_string())?;
    let modal = solve_modal(&sys, 5, true).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let table = [144.34, 144.42, 396.1, 396.31, 771.74];
    let mut worst: f64 = 0.0;
    for (f, t) in modal.frequencies.iter().zip(table) {
        check(rel(*f, t) <= 0.02, || format!("{f} vs {t}"))?;
        worst = worst.max(rel(*f, t));
    }
    check(modal.frequencies.len() == 5, || "five frequencies".into())?;
    check(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "worst relative error {worst:.2e} in {:.0} ms",
        elapsed.as_secs_f64() * 1e3
    ))
}

fn analytic_oracle() -> Result<String, String> {
    let beam = BeamSpec::guide_rod();
    let l = beam.length();
    let c = (beam.flexural_rigidity() / beam.linear_density()).sqrt();
    let exact: Vec<f64> = clamped_roots(3)
        .iter()
        .map(|lam| lam * lam / (2.0 * PI * l * l) * c)
        .collect();
    let mut previous: Option<Vec<f64>> = None;
    let mut worst64: f64 = 0.0;
    for n in [8, 16, 32, 64] {
        let f = solve_modal(&clamped_rod(&beam, n).map_err(|e| e.to_string())?, 3, false)
            .map_err(|e| e.to_string())?
            .frequencies;
        for (fi, ai) in f.iter().zip(&exact) {
            check(*fi >= *ai * (1.0 - 1e-12), || format!("n={n}: {fi} below exact {ai}"))?;
            if n == 64 {
                check(rel(*fi, *ai) < 1e-3, || format!("n=64: {fi} vs {ai}"))?;
                worst64 = worst64.max(rel(*fi, *ai));
            }
        }
        if let Some(p) = &previous {
            for (fi, pi) in f.iter().zip(p) {
                check(fi <= pi, || format!("n={n}: {fi} above coarser {pi}"))?;
            }
        }
        previous = Some(f);
    }
    Ok(format!("64-element error {worst64:.2e}, monotone over 8/16/32/64"))
}

fn static_consistency() -> Result<String, String> {
    let beam = BeamSpec::guide_rod();
    let w = 14.0;
    let l = beam.length();
    let ei = beam.flexural_rigidity();
    let delta = w * l.powi(4) / (384.0 * ei);
    let i = ei / beam.material().youngs_modulus();
    let delta_closed = max_deflection(w, l, beam.material().youngs_modulus(), i).map_err(|e| e.to_string())?;
    check(rel(delta_closed, delta) < 1e-12, || {
        "closed form disagrees with oracle".into()
    })?;
    let m_end = w * l * l / 12.0;
    let load = SpatialLoad::Uniform { intensity: w };
    let mut report = String::new();
    for n in [8, 40, 64] {
        let sys = clamped_rod(&beam, n).map_err(|e| e.to_string())?;
        let u = solve_static(&sys, &load).map_err(|e| e.to_string())?;
        let mid = nodal_deflections(&u)[n / 2].abs();
        check(rel(mid, delta) < 5e-3, || format!("n={n}: midspan {mid} vs {delta}"))?;
        if n >= 40 {
            let kappa = element_end_curvatures(&u, sys.mesh());
            let m = ei * kappa[0].0.abs();
            check(rel(m, m_end) < 1e-2, || format!("n={n}: end moment {m} vs {m_end}"))?;
            if n == 40 {
                report = format!("end moment error {:.2e} at 40 elements", rel(m, m_end));
            }
        }
    }
    Ok(report)
}

fn harmonic_consistency() -> Result<String, String> {
    let beam = BeamSpec::guide_rod();
    let sys = clamped_rod(&beam, 32).map_err(|e| e.to_string())?;
    let modal = solve_modal(&sys, 3, false).map_err(|e| e.to_string())?.frequencies;
    let step = 1.0;
    let grid = frequency_grid(50.0, 900.0, step).map_err(|e| e.to_string())?;
    let load = SpatialLoad::Point {
        position: 0.2,
        magnitude: 1.0,
    };
    let damping = RayleighDamping::ModalRatio {
        ratio: 0.002,
        anchors_hz: Some([modal[0], modal[2]]),
    };
    let h = harmonic_response(&sys, &damping, &load, &grid).map_err(|e| e.to_string())?;
    let peaks = h.resonance_peaks();
    check(peaks.len() == modal.len(), || {
        format!("peaks {peaks:?} vs modes {modal:?}")
    })?;
    for (p, f) in peaks.iter().zip(&modal) {
        check((p - f).abs() <= step, || format!("peak {p} vs mode {f}"))?;
    }
    let e = beam.material().youngs_modulus();
    for (s, eps) in h.peak_stress.iter().zip(&h.peak_strain) {
        check(rel(*eps, s / e) < 1e-9, || format!("strain {eps} vs {}", s / e))?;
    }
    let u = solve_static(&sys, &load).map_err(|e| e.to_string())?;
    let static_peak = nodal_deflections(&u).iter().fold(0.0_f64, |m, d| m.max(d.abs()));
    let low = harmonic_response(&sys, &RayleighDamping::default(), &load, &[0.01]).map_err(|e| e.to_string())?;
    let err = rel(low.peak_displacement[0], static_peak);
    check(err < 1e-3, || {
        format!("quasi-static {} vs {static_peak}", low.peak_displacement[0])
    })?;
    Ok(format!("peaks {peaks:?}, quasi-static error {err:.2e}"))
}

fn motion_quantization() -> Result<String, String> {
    let axis = AxisSpec::rig_default();
    let half = 0.5 * axis.microstep_distance();
    check((half - 1.25e-6).abs() < 1e-15, || format!("half microstep {half}"))?;
    let (lo, hi) = axis.travel();
    let mut rng = StdRng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let x = rng.random_range(lo..=hi);
        let steps = displacement_to_steps(x, &axis).map_err(|e| e.to_string())?;
        let err = (steps_to_displacement(steps, &axis) - x).abs();
        check(err <= half + 1e-15, || format!("{x}: error {err}"))?;
        worst = worst.max(err);
    }
    let (v, a) = (axis.v_max(), axis.a_max());
    let p = plan_trapezoid(v * v / a, v, a).map_err(|e| e.to_string())?;
    check(p.shape == ProfileShape::Triangle, || {
        "boundary case should be a triangle".into()
    })?;
    check((p.t_total - 2.0 * v / a).abs() < 1e-9, || {
        format!("t_total {} vs {}", p.t_total, 2.0 * v / a)
    })?;
    Ok(format!("worst round-trip error {:.3} um", worst * 1e6))
}

// Centroid by composite Simpson integration of the exact aggregated membership.
fn simpson_centroid(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let n = if n % 2 == 1 { n + 1 } else { n };
    let h = (hi - lo) / n as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for k in 0..=n {
        let x = lo + h * k as f64;
        let w = if k == 0 || k == n {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let mu = f(x);
        num += w * x * mu;
        den += w * mu;
    }
    num / den
}

fn fuzzy_oracle() -> Result<String, String> {
    let sys = FuzzySystem::default();
    let [lo, hi] = sys.output().universe();
    let span = hi - lo;
    let mut rng = StdRng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let inputs: Vec<f64> = sys
            .inputs()
            .iter()
            .map(|v| {
                let [a, b] = v.universe();
                rng.random_range(a..=b)
            })
            .collect();
        let set = infer(&sys, &inputs).map_err(|e| e.to_string())?;
        let got = defuzzify_centroid(&set.x, &set.mu).map_err(|e| e.to_string())?;
        let oracle = simpson_centroid(|x| set.eval(x), lo, hi, 10 * sys.resolution());
        let err = (got - oracle).abs() / span;
        check(err <= 5e-3, || format!("{inputs:?}: {got} vs {oracle}"))?;
        worst = worst.max(err);
    }
    let centre = GraspInputs {
        target_position: sys.inputs()[0].centre(),
        relative_depth: sys.inputs()[1].centre(),
        speed: sys.inputs()[2].centre(),
    };
    let f = fuzzy_desired_force(&centre, &sys).map_err(|e| e.to_string())?;
    check((f - sys.output().centre()).abs() < 1e-12, || {
        format!("centre output {f}")
    })?;
    Ok(format!("worst error {:.2e} of span over 100 sets", worst))
}

fn control_loop() -> Result<String, String> {
    let plant = ContactPlant::default();
    let fuzzy = FuzzySystem::default();
    let force = 10.0;
    let setpoint = SetpointSource::Constant { force };
    let direct = SimOptions {
        duration: 2.0,
        feedback: Feedback::Direct,
        ..SimOptions::default()
    };

    let pi = grasp_simulate(&plant, &fuzzy, &PidGains::default(), &setpoint, &direct).map_err(|e| e.to_string())?;
    let e_pi = pi.last().unwrap().error.abs();
    check(e_pi < 1e-3 * force, || format!("PI steady-state error {e_pi}"))?;

    let kp = 0.5;
    let p = grasp_simulate(
        &plant,
        &fuzzy,
        &PidGains::new(kp, 0.0, 0.0).unwrap(),
        &setpoint,
        &direct,
    )
    .map_err(|e| e.to_string())?;
    let e_p = p.last().unwrap().error;
    let expected = force / (1.0 + kp * plant.actuator_gain());
    check(rel(e_p, expected) < 1e-2, || {
        format!("kp-only error {e_p} vs {expected}")
    })?;

    let noisy = SimOptions {
        feedback: Feedback::Fsr {
            spec: SensorSuite::default().fsr,
        },
        noise_std: 0.05,
        seed: 42,
        ..SimOptions::default()
    };
    let a = grasp_simulate(&plant, &fuzzy, &PidGains::default(), &setpoint, &noisy).map_err(|e| e.to_string())?;
    let b = grasp_simulate(&plant, &fuzzy, &PidGains::default(), &setpoint, &noisy).map_err(|e| e.to_string())?;
    let identical = a.len() == b.len()
        && a.iter().zip(&b).all(|(x, y)| {
            [x.t, x.desired, x.applied, x.contact, x.error]
                .iter()
                .zip([y.t, y.desired, y.applied, y.contact, y.error])
                .all(|(u, v)| u.to_bits() == v.to_bits())
        });
    check(identical, || "seeded traces differ".into())?;
    Ok(format!("PI error {e_pi:.2e} N, kp-only {e_p:.4} N vs {expected:.4} N"))
}

fn pick_and_place() -> Result<String, String> {
    let axes = [AxisSpec::rig_default(); 3];
    let controller = Controller::default();
    let sensors = SensorSuite::default();
    let options = RunOptions::default();

    let still = Scenario::stationary([0.3, 0.2, 0.25]);
    let run = run_pick_place(&still, &axes, &controller, &sensors, &options).map_err(|e| e.to_string())?;
    check(run.outcome == Outcome::Success, || {
        format!("stationary outcome {:?}", run.outcome)
    })?;
    check((run.report.positioning_efficiency - 1.0).abs() < 1e-9, || {
        format!("stationary efficiency {}", run.report.positioning_efficiency)
    })?;

    let fast = Scenario {
        conveyor_speed: 0.2,
        ..Scenario::default()
    };
    let missed = run_pick_place(&fast, &axes, &controller, &sensors, &options).map_err(|e| e.to_string())?;
    check(matches!(missed.outcome, Outcome::MissedPick(_)), || {
        format!("over-speed outcome {:?}", missed.outcome)
    })?;

    let start = Instant::now();
    let full =
        run_pick_place(&Scenario::default(), &axes, &controller, &sensors, &options).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check(full.outcome == Outcome::Success, || {
        format!("default scenario outcome {:?}", full.outcome)
    })?;
    check(elapsed < Duration::from_secs(10), || {
        format!("full run took {elapsed:?}")
    })?;
    Ok(format!("full run {:.0} ms", elapsed.as_secs_f64() * 1e3))
}

fn reference_check_command() -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_testrig"))
        .args([
            "--config",
            concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/default.toml"),
            "paper-check",
        ])
        .output()
        .map_err(|e| e.to_string())?;
    let stdout = String::from_utf8_lossy(&out.stdout);
    check(out.status.code() == Some(0), || {
        format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr))
    })?;
    let passes = stdout.lines().filter(|l| l.starts_with("PASS")).count();
    check(passes == 9 && !stdout.contains("FAIL"), || format!("output:\n{stdout}"))?;
    Ok(format!("{passes} values reproduced"))
}

type Criterion = fn() -> Result<String, String>;

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 10] = [
        ("reference statics vector", statics_vector),
        ("modal table reproduction", modal_table),
        ("analytical frequency oracle", analytic_oracle),
        ("static FE consistency", static_consistency),
        ("harmonic consistency", harmonic_consistency),
        ("motion quantization", motion_quantization),
        ("fuzzy centroid oracle", fuzzy_oracle),
        ("force control loop", control_loop),
        ("pick and place", pick_and_place),
        ("paper-check command", reference_check_command),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let result = panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
