use std::f64::consts::FRAC_1_SQRT_2;
use std::path::PathBuf;

use super::config::RunConfig;
use super::output::{pulses_table, trajectory_table, write_file};
use super::{run_sweep, CliError};
use crate::dynamics::{bloch_coordinates, extract_theta_kappa};
use crate::protocols::{
    design, preset_targets, Branch, Design, Preset, Protocol, ProtocolRequest, TargetState,
};
use crate::table::Table;

pub const FIGURES: std::ops::RangeInclusive<u32> = 1..=13;

fn request(
    protocol: Protocol,
    mu: f64,
    eta: f64,
    nu: f64,
    cfg: &RunConfig,
) -> Result<ProtocolRequest, CliError> {
    let target = TargetState::normalized(mu, eta, nu)?;
    Ok(ProtocolRequest::new(protocol, target, cfg.duration))
}

fn build(req: &ProtocolRequest) -> Result<Design, CliError> {
    Ok(design(req)?)
}

fn pulses(d: &Design, name: &str, cfg: &RunConfig) -> Result<PathBuf, CliError> {
    write_file(&cfg.out, name, &pulses_table(d, cfg.steps + 1).to_csv())
}

fn trajectory(d: &Design, name: &str, cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let traj = d.evolve(cfg.steps)?;
    write_file(&cfg.out, name, &trajectory_table(d, &traj)?.to_csv())
}

/// Emits the data set behind figure `figure` with its canonical parameters.
/// Duration and step count come from `cfg`.
pub fn run_figure(figure: u32, cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let h = FRAC_1_SQRT_2;
    let third = 1.0 / 3f64.sqrt();
    let sixth = 1.0 / 6f64.sqrt();
    let mut files = Vec::new();
    match figure {
        1 => {
            let d = build(&request(Protocol::SingleModeI, h, 0.0, h, cfg)?)?;
            files.push(pulses(&d, "fig01_pulses.csv", cfg)?);
            files.push(trajectory(&d, "fig01_trajectory.csv", cfg)?);
        }
        2 => {
            let d = build(&request(Protocol::SingleModeI, 0.0, 0.0, 1.0, cfg)?)?;
            files.push(pulses(&d, "fig02_pulses.csv", cfg)?);
            files.push(trajectory(&d, "fig02_trajectory.csv", cfg)?);
        }
        3 => {
            let branches = [
                Branch::LeastEnergy,
                Branch::ArccosMinus,
                Branch::ArccosPlus,
                Branch::ArcsinMinus,
            ];
            for (panel, branch) in ['a', 'b', 'c', 'd'].into_iter().zip(branches) {
                let d =
                    build(&request(Protocol::SingleModeI, h, 0.0, h, cfg)?.with_branch(branch))?;
                files.push(trajectory(
                    &d,
                    &format!("fig03{panel}_trajectory.csv"),
                    cfg,
                )?);
            }
        }
        4 | 5 => {
            for (panel, (mu, eta, nu)) in [('a', (0.0, h, h)), ('b', (third, third, third))] {
                let d = build(&request(Protocol::SingleModeII, mu, eta, nu, cfg)?)?;
                files.push(if figure == 4 {
                    pulses(&d, &format!("fig04{panel}_pulses.csv"), cfg)?
                } else {
                    trajectory(&d, &format!("fig05{panel}_trajectory.csv"), cfg)?
                });
            }
        }
        6 | 7 => {
            for (panel, (mu, eta, nu)) in [('a', (h, 0.0, h)), ('b', (sixth, third, h))] {
                let d = build(&request(
                    Protocol::SingleModeIINoMicrowave,
                    mu,
                    eta,
                    nu,
                    cfg,
                )?)?;
                files.push(if figure == 6 {
                    pulses(&d, &format!("fig06{panel}_pulses.csv"), cfg)?
                } else {
                    trajectory(&d, &format!("fig07{panel}_trajectory.csv"), cfg)?
                });
            }
        }
        8 => {
            let d = build(&request(Protocol::MultiMode, third, third, third, cfg)?)?;
            files.push(pulses(&d, "fig08_pulses.csv", cfg)?);
            files.push(trajectory(&d, "fig08_trajectory.csv", cfg)?);
        }
        9 => {
            let targets = [(0.0, 0.0, 1.0), (0.0, h, h), (h, 0.5, 0.5), (h, 0.0, h)];
            for (panel, (mu, eta, nu)) in ['a', 'b', 'c', 'd'].into_iter().zip(targets) {
                let d = build(&request(Protocol::MultiMode, mu, eta, nu, cfg)?)?;
                files.push(trajectory(
                    &d,
                    &format!("fig09{panel}_trajectory.csv"),
                    cfg,
                )?);
            }
        }
        10 => files.extend(run_sweep(cfg)?),
        11 | 12 => {
            let lambda = 0.5 / cfg.duration;
            let d = build(&request(Protocol::Phased, h, 0.0, h, cfg)?.with_lambda(lambda))?;
            let traj = d.evolve(cfg.steps)?;
            let (table, name) = if figure == 11 {
                let mut t = Table::new(["t", "bloch_x", "bloch_y", "bloch_z", "t_over_T"]);
                for (time, b) in traj.times.iter().zip(bloch_coordinates(&traj)?) {
                    t.push(vec![*time, b[0], b[1], b[2], time / cfg.duration]);
                }
                (t, "fig11_bloch.csv")
            } else {
                let mut t = Table::new([
                    "t",
                    "theta",
                    "kappa",
                    "theta_prime",
                    "kappa_prime",
                    "t_over_T",
                ]);
                let e = extract_theta_kappa(&traj)?;
                for (i, time) in traj.times.iter().enumerate() {
                    let s = d.schedule.at(*time);
                    let kappa_prime = e.kappa_prime[i].unwrap_or(f64::NAN);
                    t.push(vec![
                        *time,
                        s.theta,
                        s.kappa,
                        e.theta_prime[i],
                        kappa_prime,
                        time / cfg.duration,
                    ]);
                }
                (t, "fig12_angles.csv")
            };
            files.push(write_file(&cfg.out, name, &table.to_csv())?);
        }
        13 => {
            let mut req = preset_targets(Preset::CavityBell);
            req.tf = req.t0 + cfg.duration;
            let d = build(&req)?;
            files.push(pulses(&d, "fig13_pulses.csv", cfg)?);
            files.push(trajectory(&d, "fig13_trajectory.csv", cfg)?);
        }
        other => {
            return Err(CliError::Usage(format!(
                "no figure {other}; choose {}..={}",
                FIGURES.start(),
                FIGURES.end()
            )))
        }
    }
    Ok(files)
}
