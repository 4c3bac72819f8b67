//! Size guards for the exponential desk-scale routines.
//!
//! Every guarded routine has a default limit. Setting the environment
//! variable `PERFECTMAP_GUARD_OVERRIDE` to anything other than `""` or `"0"`
//! lifts the soft limits; the bit-mask kernels still stop at
//! [`MASK_VERTICES`] vertices.

use crate::error::{Error, Result};

pub const GUARD_ENV: &str = "PERFECTMAP_GUARD_OVERRIDE";

/// Hard ceiling of the `u128` vertex-mask kernels.
pub const MASK_VERTICES: usize = 128;

pub const HOLE_SEARCH_VERTICES: usize = 25;
pub const CLIQUE_VERTICES: usize = 64;
pub const MWSS_VERTICES: usize = 30;
pub const MATCHING_EDGES: usize = 30;
pub const MAP_STATES: u64 = 1 << 24;

pub fn override_enabled() -> bool {
    match std::env::var(GUARD_ENV) {
        Ok(v) => !v.is_empty() && v != "0",
        Err(_) => false,
    }
}

/// Check `size` against `limit`, honouring the override variable.
pub fn check(what: &'static str, size: usize, limit: usize) -> Result<()> {
    if size > limit && !override_enabled() {
        return Err(Error::Guard { what, size, limit });
    }
    Ok(())
}

/// Check against the mask ceiling, which the override cannot lift.
pub fn check_mask(what: &'static str, size: usize) -> Result<()> {
    if size > MASK_VERTICES {
        return Err(Error::Guard {
            what,
            size,
            limit: MASK_VERTICES,
        });
    }
    Ok(())
}
