use std::fmt::Write as _;

use testrig_core::config::RigConfig;
use testrig_core::fem::{clamped_rod, harmonic_response, solve_modal, SpatialLoad};
use testrig_core::grasp::{grasp_simulate, TRACE_HEADER};
use testrig_core::motion::Gantry;
use testrig_core::statics::{self, UdlMode, REFERENCE_SECOND_MOMENT, REFERENCE_SPAN};
use testrig_core::testmatrix::{run_pick_place, Outcome, PickPlaceRun, RunOptions, Verbosity};

use crate::output::{Format, Report, Sink};
use crate::{CliError, Command, Global};

pub const MODAL_HEADER: &str = "mode,frequency_hz";
pub const HARMONIC_HEADER: &str = "frequency_hz,displacement_m,stress_pa,strain";
pub const MOVE_HEADER: &str = "t_s,axis,position_m,velocity_mps";
pub const SENSOR_HEADER: &str = "t_s,sensor,value,unit";

/// Reference statics values checked by `paper-check`: (key, expected).
const STATICS_VECTOR: [(&str, f64); 4] = [
    ("reaction_n", 6.494),
    ("end_moment_nm", 0.7165),
    ("centre_moment_nm", 0.3582),
    ("max_deflection_m", 2.28e-11),
];
const STATICS_TOL: f64 = 1e-3;

/// Reference frequencies (Hz) of the first five modes, pairs expanded.
const MODAL_VECTOR: [f64; 5] = [144.34, 144.42, 396.1, 396.31, 771.74];
const MODAL_TOL: f64 = 0.02;
const MODAL_ELEMENTS: usize = 64;

pub fn run(global: &Global, command: &Command) -> Result<(), CliError> {
    let cfg = match &global.config {
        Some(path) => RigConfig::load(path)?,
        None => RigConfig::default(),
    };
    let mut sink = Sink::new(&global.out);
    let mut status = Ok(());
    match command {
        Command::Statics => statics_cmd(&cfg, global.format, &mut sink)?,
        Command::Modal {
            modes,
            elements,
            no_expand,
        } => {
            let sys = clamped_rod(&cfg.beam.rod, elements.unwrap_or(cfg.fem.n_elements))?;
            let expand = cfg.fem.expand_degenerate && !no_expand;
            let modal = solve_modal(&sys, modes.unwrap_or(cfg.fem.n_modes), expand)?;
            let mut csv = format!("{MODAL_HEADER}\n");
            for (i, f) in modal.frequencies.iter().enumerate() {
                let _ = writeln!(csv, "{},{}", i + 1, num(*f));
            }
            sink.add("modal.csv", csv);
        }
        Command::Harmonic { elements } => {
            let sys = clamped_rod(&cfg.beam.rod, elements.unwrap_or(cfg.fem.n_elements))?;
            let load = match cfg.fem.excitation {
                Some(load) => load,
                None => SpatialLoad::from(cfg.beam.load()?),
            };
            let h = harmonic_response(&sys, &cfg.fem.damping, &load, &cfg.fem.grid()?)?;
            let mut csv = format!("{HARMONIC_HEADER}\n");
            for i in 0..h.frequencies.len() {
                let _ = writeln!(
                    csv,
                    "{},{},{},{}",
                    num(h.frequencies[i]),
                    num(h.peak_displacement[i]),
                    num(h.peak_stress[i]),
                    num(h.peak_strain[i])
                );
            }
            sink.add("harmonic.csv", csv);
        }
        Command::Move { to } => {
            let target = match to {
                Some(v) if v.len() == 3 => [v[0], v[1], v[2]],
                Some(_) => {
                    return Err(CliError {
                        code: 1,
                        msg: "--to takes three comma-separated coordinates".into(),
                    })
                }
                None => cfg.motion.target,
            };
            let mut gantry = Gantry::new(cfg.axes());
            gantry.home_all();
            let rows = gantry.move_to(target, cfg.motion.dt)?;
            let mut csv = format!("{MOVE_HEADER}\n");
            for r in &rows {
                let _ = writeln!(
                    csv,
                    "{},{},{},{}",
                    num(r.t),
                    r.axis.label(),
                    num(r.position),
                    num(r.velocity)
                );
            }
            sink.add("trace.csv", csv);
        }
        Command::Grasp => {
            let c = &cfg.controller;
            let trace = grasp_simulate(
                &c.plant,
                cfg.fuzzy_system(),
                &c.gains,
                &c.setpoint,
                &cfg.sim_options(global.seed),
            )?;
            let mut csv = format!("{TRACE_HEADER}\n");
            for s in &trace {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{}",
                    num(s.t),
                    num(s.desired),
                    num(s.applied),
                    num(s.contact),
                    num(s.error)
                );
            }
            let mut report = Report::default();
            if let Some(last) = trace.last() {
                let peak = trace.iter().map(|s| s.contact).fold(f64::NEG_INFINITY, f64::max);
                report
                    .push("samples", trace.len())
                    .push("final_time_s", num(last.t))
                    .push("final_desired_n", num(last.desired))
                    .push("final_contact_n", num(last.contact))
                    .push("final_error_n", num(last.error))
                    .push("peak_contact_n", num(peak));
            }
            sink.add("trace.csv", csv);
            sink.add(Report::file_name(global.format), report.render(global.format));
        }
        Command::Testmatrix => {
            let run = pick_place(&cfg, global.seed, Verbosity::Summary)?;
            sink.add(Report::file_name(global.format), run_report(&run).render(global.format));
            status = fail_status(&run);
        }
        Command::Pickplace { verbose } => {
            let verbosity = if *verbose {
                Verbosity::Detailed
            } else {
                Verbosity::Summary
            };
            let run = pick_place(&cfg, global.seed, verbosity)?;
            let mut csv = format!("{SENSOR_HEADER}\n");
            for s in &run.sensor_trace {
                let _ = writeln!(csv, "{},{},{},{}", num(s.t), s.sensor, num(s.value), s.unit);
            }
            sink.add(Report::file_name(global.format), run_report(&run).render(global.format));
            sink.add("trace.csv", csv);
            sink.add("events.log", run.event_log());
            status = fail_status(&run);
        }
        Command::PaperCheck => {
            let (text, ok) = reference_check(&cfg)?;
            sink.add("check.txt", text);
            if !ok {
                status = Err(CliError {
                    code: 2,
                    msg: "reference values not reproduced".into(),
                });
            }
        }
        Command::Config => sink.add("config.toml", cfg.effective().to_toml()),
    }
    sink.finish()?;
    status
}

fn statics_cmd(cfg: &RigConfig, format: Format, sink: &mut Sink) -> Result<(), CliError> {
    let load = cfg.beam.load()?;
    let r = statics::analyse(&cfg.beam.rod, &load, cfg.beam.span(), cfg.beam.second_moment_override)?;
    let mut report = Report::default();
    report
        .push("udl_mode", udl_mode_name(load.mode()))
        .push("intensity_n_per_m", num(r.intensity))
        .push("span_m", num(r.span))
        .push("second_moment_m4", num(r.second_moment))
        .push("reaction_n", num(r.reaction))
        .push("end_moment_nm", num(r.end_moment))
        .push("centre_moment_nm", num(r.centre_moment))
        .push("max_deflection_m", num(r.max_deflection))
        .push("max_stress_pa", num(r.max_stress));
    if let Some(safe) = r.safe {
        report.push("safe", safe);
    }
    sink.add(Report::file_name(format), report.render(format));
    Ok(())
}

fn udl_mode_name(mode: UdlMode) -> &'static str {
    match mode {
        UdlMode::PaperCompat => "paper_compat",
        UdlMode::Physical => "physical",
    }
}

fn pick_place(cfg: &RigConfig, seed: u64, verbosity: Verbosity) -> Result<PickPlaceRun, CliError> {
    let mut controller = cfg.controller();
    controller.sim.seed = seed;
    let options = RunOptions {
        seed,
        verbosity,
        bandwidth: cfg.bandwidth,
        motion_dt: cfg.motion.dt,
    };
    Ok(run_pick_place(
        &cfg.scenario,
        &cfg.axes(),
        &controller,
        &cfg.sensors,
        &options,
    )?)
}

fn run_report(run: &PickPlaceRun) -> Report {
    let outcome = match run.outcome {
        Outcome::Success => "success",
        Outcome::MissedPick(_) => "missed_pick",
        Outcome::GraspTimeout { .. } => "grasp_timeout",
    };
    let mut report = Report::default();
    report.push("outcome", outcome);
    report.extend(run.report.kv_lines());
    report.push("passed", run.report.passed());
    report
}

fn fail_status(run: &PickPlaceRun) -> Result<(), CliError> {
    match run.failure() {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

/// Shortest round-trip representation; exponent form for very small or large magnitudes.
fn num(v: f64) -> String {
    format!("{v:?}")
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Statics with the total weight taken as intensity on the reference span and
/// second moment, then the expanded modal spectrum at 64 elements.
fn reference_check(cfg: &RigConfig) -> Result<(String, bool), CliError> {
    let mut out = String::new();
    let mut ok = true;
    let mut line = |out: &mut String, name: &str, got: f64, want: f64, tol: f64| {
        let pass = rel(got, want) <= tol;
        ok &= pass;
        let _ = writeln!(
            out,
            "{} {name} got={got:.6e} expected={want:.6e} rel_err={:.3e} tol={tol}",
            if pass { "PASS" } else { "FAIL" },
            rel(got, want)
        );
    };

    let load = statics::udl_from_masses(
        &cfg.beam.masses,
        &cfg.beam.rod,
        cfg.beam.rods_sharing,
        UdlMode::PaperCompat,
    )?;
    let r = statics::analyse(&cfg.beam.rod, &load, REFERENCE_SPAN, Some(REFERENCE_SECOND_MOMENT))?;
    for (name, want) in STATICS_VECTOR {
        let got = match name {
            "reaction_n" => r.reaction,
            "end_moment_nm" => r.end_moment,
            "centre_moment_nm" => r.centre_moment,
            _ => r.max_deflection,
        };
        line(&mut out, name, got, want, STATICS_TOL);
    }

    let sys = clamped_rod(&cfg.beam.rod, MODAL_ELEMENTS)?;
    let modal = solve_modal(&sys, MODAL_VECTOR.len(), true)?;
    for (i, (&got, &want)) in modal.frequencies.iter().zip(&MODAL_VECTOR).enumerate() {
        line(&mut out, &format!("mode_{}_hz", i + 1), got, want, MODAL_TOL);
    }
    Ok((out, ok))
}
