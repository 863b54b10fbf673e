use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use num_complex::Complex64;
use serde_json::{json, Value};

use super::config::platform_name;
use super::CliError;
use crate::basis::BasisFamily;
use crate::dynamics::{bloch_coordinates, extract_theta_kappa, Trajectory};
use crate::metrics::DriveMetrics;
use crate::protocols::{Design, TargetState};
use crate::table::Table;

pub const PULSE_HEADER: [&str; 5] = ["t", "omega_p", "omega_s", "omega_a", "t_over_T"];

fn t_over_t(design: &Design, t: f64) -> f64 {
    (t - design.t0) / design.duration()
}

pub fn pulses_table(design: &Design, points: usize) -> Table {
    let s = design.pulses.sample(points);
    let mut table = Table::new(PULSE_HEADER);
    for i in 0..s.times.len() {
        table.push(vec![
            s.times[i],
            s.omega_p[i],
            s.omega_s[i],
            s.omega_a[i],
            t_over_t(design, s.times[i]),
        ]);
    }
    table
}

fn trajectory_header(dimension: usize, phased: bool) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend((1..=dimension).map(|n| format!("P{n}")));
    for n in 1..=dimension {
        h.push(format!("re_a{n}"));
        h.push(format!("im_a{n}"));
    }
    h.push("norm".into());
    if phased {
        h.extend(
            [
                "theta_prime",
                "kappa_prime",
                "bloch_x",
                "bloch_y",
                "bloch_z",
            ]
            .map(String::from),
        );
    }
    h.push("t_over_T".into());
    h
}

/// Populations, amplitudes and norm per step. Phased designs add the
/// read-back angles and Bloch coordinates; undefined phases are `NaN`.
pub fn trajectory_table(design: &Design, traj: &Trajectory) -> Result<Table, CliError> {
    let phased = design.family == BasisFamily::ThreePhased;
    let extra = if phased {
        Some((
            extract_theta_kappa(traj).map_err(CliError::from)?,
            bloch_coordinates(traj).map_err(CliError::from)?,
        ))
    } else {
        None
    };
    let mut table = Table::new(trajectory_header(traj.dimension(), phased));
    for (i, (t, psi)) in traj.times.iter().zip(&traj.states).enumerate() {
        let mut row = vec![*t];
        row.extend(psi.iter().map(|a| a.norm_sqr()));
        row.extend(psi.iter().flat_map(|a| [a.re, a.im]));
        row.push(traj.norms[i]);
        if let Some((angles, bloch)) = &extra {
            row.push(angles.theta_prime[i]);
            row.push(angles.kappa_prime[i].unwrap_or(f64::NAN));
            row.extend(bloch[i]);
        }
        row.push(t_over_t(design, *t));
        table.push(row);
    }
    Ok(table)
}

fn complex_list(v: &DVector<Complex64>) -> Value {
    Value::Array(v.iter().map(|z| json!([z.re, z.im])).collect())
}

fn target_json(t: &TargetState) -> Value {
    json!({ "mu": t.mu, "eta": t.eta, "nu": t.nu, "gamma": t.gamma, "kappa": t.kappa })
}

pub fn design_json(design: &Design, target: &TargetState) -> Value {
    let b = &design.boundary;
    json!({
        "protocol": design.protocol.name(),
        "platform": platform_name(design.platform),
        "T": design.duration(),
        "t0": design.t0,
        "tf": design.tf,
        "target": target_json(target),
        "boundary": {
            "theta0": b.theta0,
            "theta_f": b.theta_f,
            "phi0": b.phi0,
            "phi_f": b.phi_f,
            "zeta": b.zeta,
            "chi": b.chi,
            "branch": b.branch.map(|x| x.name()),
            "lambda": b.lambda_rate,
        },
        "uses_microwave": design.pulses.uses_microwave(),
        "initial_state": complex_list(&design.initial_state),
        "target_state": complex_list(&design.target_state),
    })
}

pub fn summary_json(design: &Design, target: &TargetState, traj: &Trajectory) -> Value {
    json!({
        "protocol": design.protocol.name(),
        "platform": platform_name(design.platform),
        "T": design.duration(),
        "target": target_json(target),
        "steps": traj.len() - 1,
        "final_populations": traj.final_populations(),
        "final_amplitudes": complex_list(traj.final_state()),
        "final_fidelity": traj.final_fidelity(&design.target_state),
        "max_norm_drift": traj.max_norm_drift(),
    })
}

pub fn metrics_json(m: &DriveMetrics) -> Value {
    json!({
        "omega_bar": m.omega_bar,
        "energy_bar": m.energy_bar,
        "T": m.duration,
        "peak": m.peak,
        "quad_points": m.quad_points,
        "quad_error": m.quad_error,
    })
}

/// Writes `contents` to `dir/name`, creating `dir` if needed.
pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

pub fn write_json(dir: &Path, name: &str, value: &Value) -> Result<PathBuf, CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    text.push('\n');
    write_file(dir, name, &text)
}
