//! Inspect WFC1 / WFM1 files.

use std::io::Read;
use std::path::Path;

use wfc_core::io::{read_mask, read_state};

use crate::RunError;

pub fn run(path: &Path) -> Result<String, RunError> {
    let mut magic = [0u8; 4];
    std::fs::File::open(path)?.read_exact(&mut magic)?;
    match &magic {
        b"WFC1" => {
            let (state, boundary) = read_state(path)?;
            Ok(format!(
                "WFC1 state: N={} d={} boundary={:?} amplitudes={} norm={:.12}",
                state.num_sites(),
                state.local_dim(),
                boundary,
                state.dim(),
                state.norm(),
            ))
        }
        b"WFM1" => {
            let mask = read_mask(path)?;
            let mass: f64 = mask.values().iter().map(|v| v.norm_sqr()).sum();
            Ok(format!(
                "WFM1 mask: total={} sampled={} rate={} seed={} sampled_mass={:.12}",
                mask.total(),
                mask.len(),
                mask.rate(),
                mask.seed(),
                mass,
            ))
        }
        other => Err(RunError::Config(format!(
            "unrecognized magic bytes {:?} in {}",
            other,
            path.display()
        ))),
    }
}
