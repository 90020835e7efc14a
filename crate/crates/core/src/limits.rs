//! Desk-scale bounds. Exceeding one is a configuration error rather than a
//! silent slowdown.

use crate::error::{Error, Result};

pub const MAX_CHARACTERISTIC: u32 = 1 << 16;
pub const MAX_EXTENSION_DEGREE: usize = 8;
pub const DEFAULT_MAX_DEGREE: usize = 4096;

pub const MAX_SET_SIZE: usize = 64;
pub const MAX_SET_ELEMENT: u64 = 512;
pub const MAX_MODULUS: u64 = 4096;

/// Environment variable overriding [`DEFAULT_MAX_DEGREE`].
pub const MAX_DEGREE_ENV: &str = "FFLAB_MAX_DEGREE";

pub fn max_degree() -> usize {
    std::env::var(MAX_DEGREE_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_DEGREE)
}

pub fn check_degree(deg: usize, what: &str) -> Result<()> {
    let cap = max_degree();
    if deg > cap {
        return Err(Error::Limit(format!(
            "{what} has degree {deg} > {cap} (set {MAX_DEGREE_ENV} to raise)"
        )));
    }
    Ok(())
}
