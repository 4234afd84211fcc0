//! File loading for the shared JSON descriptors. Malformed or unknown
//! input maps to exit code 2; downstream computational failures to 1.

use std::path::Path;

use walshlab::descriptors::{ActionDesc, MapDesc, SystemDesc};
use walshlab::dynamics::{ActionAssignment, Observable};
use walshlab::error::Error;
use walshlab::polymap::{PolyMap, Target};
use walshlab::systems::System;

use crate::CmdError;

fn schema_err(msg: impl Into<String>) -> CmdError {
    CmdError { code: 2, msg: msg.into() }
}

fn build_err(e: Error) -> CmdError {
    let code = match e {
        Error::Parse(_) | Error::Precondition(_) | Error::DimensionMismatch(_) => 2,
        _ => 1,
    };
    CmdError { code, msg: e.to_string() }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CmdError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| schema_err(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| schema_err(format!("{}: {e}", path.display())))
}

pub fn is_ut(map: &PolyMap) -> bool {
    matches!(map.target, Target::Ut(_))
}

pub fn load_map(path: &Path) -> Result<(MapDesc, PolyMap), CmdError> {
    let desc: MapDesc = read_json(path)?;
    let map = desc.build().map_err(build_err)?;
    Ok((desc, map))
}

pub fn load_system(path: &Path) -> Result<System, CmdError> {
    let desc: SystemDesc = read_json(path)?;
    desc.build().map_err(build_err)
}

pub fn load_action(path: &Path) -> Result<(ActionAssignment, Vec<Observable>), CmdError> {
    let desc: ActionDesc = read_json(path)?;
    desc.build().map_err(build_err)
}
