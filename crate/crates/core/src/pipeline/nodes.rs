use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `cos(i * pi / n)` for `i = 0..n`, sorted ascending. Includes the right
/// end point `1` but not `-1`.
pub fn chebyshev_nodes_second_kind(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidCount(format!(
            "need at least 2 second-kind nodes, got {n}"
        )));
    }
    Ok((0..n)
        .rev()
        .map(|i| (i as f64 * PI / n as f64).cos())
        .collect())
}

/// `cos((2j + 1) * pi / (2k))` for `j = 0..k`, sorted ascending.
pub fn chebyshev_nodes_first_kind(k: usize) -> Result<Vec<f64>> {
    if k < 1 {
        return Err(Error::InvalidCount(
            "need at least 1 first-kind node".into(),
        ));
    }
    Ok((0..k)
        .rev()
        .map(|j| ((2 * j + 1) as f64 * PI / (2 * k) as f64).cos())
        .collect())
}
