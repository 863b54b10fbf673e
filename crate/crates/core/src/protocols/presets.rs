use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Platform, Protocol, ProtocolRequest, TargetState};
use crate::error::{Error, Result};

/// Ready-made requests on the unit interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Preset {
    /// `|2> -> (|1> + |3>)/sqrt 2` without the microwave.
    BeamSplit12,
    /// `|2> -> (|1> + |2> + |3>)/sqrt 3` without the microwave.
    BeamSplit13,
    /// `|1> -> (|1> + |3>)/sqrt 2` on the cavity, a two-atom Bell state.
    CavityBell,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::BeamSplit12, Preset::BeamSplit13, Preset::CavityBell];

    pub fn name(self) -> &'static str {
        match self {
            Preset::BeamSplit12 => "beam-split-12",
            Preset::BeamSplit13 => "beam-split-13",
            Preset::CavityBell => "cavity-bell",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

pub fn preset_targets(preset: Preset) -> ProtocolRequest {
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let third = 1.0 / 3f64.sqrt();
    let (protocol, target, platform) = match preset {
        Preset::BeamSplit12 => (
            Protocol::SingleModeIINoMicrowave,
            (half, 0.0, half),
            Platform::LambdaAtom,
        ),
        Preset::BeamSplit13 => (
            Protocol::SingleModeIINoMicrowave,
            (third, third, third),
            Platform::LambdaAtom,
        ),
        Preset::CavityBell => (Protocol::MultiMode, (half, 0.0, half), Platform::CavityQed),
    };
    let target = TargetState::normalized(target.0, target.1, target.2)
        .expect("preset amplitudes are nonzero");
    ProtocolRequest {
        platform,
        ..ProtocolRequest::new(protocol, target, 1.0)
    }
}
