//! Where two sweep curves intersect.

use serde::{Deserialize, Serialize};

use crate::tables::SweepRow;
use crate::SimError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Crossings {
    /// The curves coincide at every grid point.
    IdenticalCurves,
    Found { values: Vec<f64>, brackets: Vec<(f64, f64)> },
}

impl Crossings {
    pub fn values(&self) -> &[f64] {
        match self {
            Crossings::IdenticalCurves => &[],
            Crossings::Found { values, .. } => values,
        }
    }
}

/// Linear-interpolated intersections of `a` and `b` sampled on `grid`.
pub fn crossing_finder(grid: &[f64], a: &[f64], b: &[f64]) -> Result<Crossings, SimError> {
    if a.len() != grid.len() || b.len() != grid.len() {
        return Err(SimError::Config(format!(
            "mismatched grids: {} grid points, curves of length {} and {}",
            grid.len(),
            a.len(),
            b.len()
        )));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    if d.iter().all(|v| *v == 0.0) {
        return Ok(Crossings::IdenticalCurves);
    }
    let mut values = Vec::new();
    let mut brackets = Vec::new();
    for i in 0..d.len() {
        if d[i] == 0.0 {
            values.push(grid[i]);
            brackets.push((grid[i], grid[i]));
            continue;
        }
        if i + 1 < d.len() && d[i + 1] != 0.0 && (d[i] < 0.0) != (d[i + 1] < 0.0) {
            let f = d[i] / (d[i] - d[i + 1]);
            values.push(grid[i] + f * (grid[i + 1] - grid[i]));
            brackets.push((grid[i], grid[i + 1]));
        }
    }
    Ok(Crossings::Found { values, brackets })
}

/// Value of `column` for a row: `eta`, `phi_T` or `phi_<group>`.
pub fn column_value(row: &SweepRow, column: &str, groups: &[String]) -> Result<Option<f64>, SimError> {
    let Ok(p) = &row.outcome else { return Ok(None) };
    let v = match column {
        "eta" => p.quantum_yield,
        "phi_T" => p.phi_total,
        other => {
            let name = other.strip_prefix("phi_").unwrap_or(other);
            let k = groups
                .iter()
                .position(|g| g == name)
                .ok_or_else(|| SimError::Config(format!("unknown column {column:?}")))?;
            p.phi_groups[k]
        }
    };
    Ok(Some(v))
}

/// Splits a table with exactly two initial sites into a common grid and
/// the two curves for `column`. Failed points are an error.
pub fn curves(rows: &[SweepRow], column: &str, groups: &[String]) -> Result<(Vec<f64>, [usize; 2], [Vec<f64>; 2]), SimError> {
    let mut sites: Vec<usize> = rows.iter().map(|r| r.initial_site).collect();
    sites.sort_unstable();
    sites.dedup();
    if sites.len() != 2 {
        return Err(SimError::Config(format!("crossings need exactly two initial sites, table has {sites:?}")));
    }
    let mut grids: [Vec<f64>; 2] = Default::default();
    let mut values: [Vec<f64>; 2] = Default::default();
    for row in rows {
        let k = usize::from(row.initial_site == sites[1]);
        let v = column_value(row, column, groups)?
            .ok_or_else(|| SimError::Config(format!("point {} for site {} failed", row.value, row.initial_site)))?;
        grids[k].push(row.value);
        values[k].push(v);
    }
    if grids[0] != grids[1] {
        return Err(SimError::Config("mismatched grids for the two initial sites".into()));
    }
    let [g, _] = grids;
    Ok((g, [sites[0], sites[1]], values))
}

/// Bisects a bracket [lo, hi] on which `diff` changes sign, in log space when
/// both ends are positive, then interpolates linearly inside the final bracket.
pub fn refine<F>(lo: f64, hi: f64, iterations: usize, mut diff: F) -> Result<f64, SimError>
where
    F: FnMut(f64) -> Result<f64, SimError>,
{
    let (mut lo, mut hi) = (lo, hi);
    let mut d_lo = diff(lo)?;
    let mut d_hi = diff(hi)?;
    if d_lo == 0.0 {
        return Ok(lo);
    }
    if d_hi == 0.0 {
        return Ok(hi);
    }
    if (d_lo < 0.0) == (d_hi < 0.0) {
        return Err(SimError::Config(format!("no sign change on [{lo}, {hi}]")));
    }
    for _ in 0..iterations {
        let mid = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        let d_mid = diff(mid)?;
        if d_mid == 0.0 {
            return Ok(mid);
        }
        if (d_mid < 0.0) == (d_lo < 0.0) {
            lo = mid;
            d_lo = d_mid;
        } else {
            hi = mid;
            d_hi = d_mid;
        }
    }
    Ok(lo + d_lo / (d_lo - d_hi) * (hi - lo))
}
