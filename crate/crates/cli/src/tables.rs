//! Tabulation of the connection and curvature over a 2-D grid of the chart.

use std::collections::BTreeMap;
use std::sync::Arc;

use berryphase::{berry_connection_fd, berry_curvature_fd_with, family_by_id, FdSteps, ParameterChart, StateFamily};
use rayon::prelude::*;

use crate::error::CliError;
use crate::output::Table;

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub family: String,
    /// The two coordinates spanning the grid.
    pub axes: (String, String),
    /// Values for every other coordinate (missing ones default to 0).
    pub fixed: BTreeMap<String, f64>,
    /// Points per axis: periodic axes exclude the repeated endpoint,
    /// bounded axes include both ends.
    pub points: usize,
    pub steps: FdSteps,
}

impl GridSpec {
    pub fn new(family: &str, points: usize) -> Result<Self, CliError> {
        let f = family_by_id(family).map_err(|e| CliError::Config(e.to_string()))?;
        let names: Vec<String> = f.chart().names().map(str::to_string).collect();
        Ok(Self {
            family: family.to_string(),
            axes: (names[0].clone(), names[1].clone()),
            fixed: BTreeMap::new(),
            points,
            steps: FdSteps::default(),
        })
    }
}

fn axis_values(chart: &ParameterChart, idx: usize, n: usize) -> Vec<f64> {
    let c = chart.coordinate(idx);
    match c.period() {
        Some(p) => (0..n).map(|i| c.lower + p * i as f64 / n as f64).collect(),
        None if n == 1 => vec![c.lower],
        None => (0..n).map(|i| c.lower + (c.upper - c.lower) * i as f64 / (n - 1) as f64).collect(),
    }
}

type GridPoints = (Arc<dyn StateFamily>, Vec<Vec<f64>>);

fn grid_points(spec: &GridSpec) -> Result<GridPoints, CliError> {
    let family = family_by_id(&spec.family).map_err(|e| CliError::Config(e.to_string()))?;
    let chart = family.chart().clone();
    let index = |name: &str| chart.index_of(name).map_err(|_| CliError::Config(format!("unknown coordinate `{name}`")));
    let (a, b) = (index(&spec.axes.0)?, index(&spec.axes.1)?);
    if a == b {
        return Err(CliError::Config("grid axes must differ".into()));
    }
    if spec.points == 0 {
        return Err(CliError::Config("grid needs at least one point per axis".into()));
    }
    let mut base = vec![0.0; chart.dim()];
    for (name, &v) in &spec.fixed {
        let i = index(name)?;
        if i == a || i == b {
            return Err(CliError::Config(format!("`{name}` is a grid axis and cannot be fixed")));
        }
        base[i] = v;
    }
    let mut points = Vec::with_capacity(spec.points * spec.points);
    for &u in &axis_values(&chart, a, spec.points) {
        for &v in &axis_values(&chart, b, spec.points) {
            let mut p = base.clone();
            p[a] = u;
            p[b] = v;
            points.push(p);
        }
    }
    Ok((family, points))
}

/// Columns: coordinates, `A_<k>` (finite differences), `A_<k>_exact`
/// (closed form), `imag_residue` (largest |Im i<φ|∂φ>|).
pub fn connection_table(spec: &GridSpec) -> Result<Table, CliError> {
    let (family, points) = grid_points(spec)?;
    let names: Vec<String> = family.chart().names().map(str::to_string).collect();
    let mut columns = names.clone();
    columns.extend(names.iter().map(|n| format!("A_{n}")));
    columns.extend(names.iter().map(|n| format!("A_{n}_exact")));
    columns.push("imag_residue".into());
    let rows = points
        .par_iter()
        .map(|p| {
            let fd = berry_connection_fd(family.as_ref(), p, spec.steps.connection)
                .map_err(|e| CliError::from_core("connection", e))?;
            let exact = family.analytic_connection(p).unwrap_or_else(|| vec![f64::NAN; p.len()]);
            let mut row = p.clone();
            row.extend_from_slice(fd.components());
            row.extend(exact);
            row.push(fd.reality_defect());
            Ok(row)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Table { columns, rows })
}

/// Columns: coordinates, then `F_<k>_<l>` and `F_<k>_<l>_exact` for k < l.
pub fn curvature_table(spec: &GridSpec) -> Result<Table, CliError> {
    let (family, points) = grid_points(spec)?;
    let names: Vec<String> = family.chart().names().map(str::to_string).collect();
    let m = names.len();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|k| (k + 1..m).map(move |l| (k, l))).collect();
    let mut columns = names.clone();
    for &(k, l) in &pairs {
        columns.push(format!("F_{}_{}", names[k], names[l]));
        columns.push(format!("F_{}_{}_exact", names[k], names[l]));
    }
    let rows = points
        .par_iter()
        .map(|p| {
            let f = berry_curvature_fd_with(family.as_ref(), p, spec.steps)
                .map_err(|e| CliError::from_core("curvature", e))?;
            let mut row = p.clone();
            for &(k, l) in &pairs {
                row.push(f.get(k, l));
                row.push(family.analytic_curvature(p, k, l).unwrap_or(f64::NAN));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Table { columns, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spin_half_connection_grid() {
        let spec = GridSpec::new("su2-spin-half", 5).unwrap();
        let t = connection_table(&spec).unwrap();
        assert_eq!(t.columns, ["theta", "phi", "A_theta", "A_phi", "A_theta_exact", "A_phi_exact", "imag_residue"]);
        assert_eq!(t.rows.len(), 25);
        // theta includes both ends; phi excludes 2pi
        assert_eq!(t.rows[24][0], std::f64::consts::PI);
        assert!(t.rows[24][1] < 2.0 * std::f64::consts::PI);
        for r in &t.rows {
            assert!((r[3] - r[5]).abs() < 5e-9);
            assert!(r[6] < 1e-9);
        }
    }

    #[test]
    fn su3_curvature_grid_with_fixed_coordinates() {
        let mut spec = GridSpec::new("su3-spin-1", 3).unwrap();
        spec.axes = ("g".into(), "gamma".into());
        spec.fixed.insert("theta".into(), 1.0);
        let t = curvature_table(&spec).unwrap();
        assert_eq!(t.columns.len(), 4 + 2 * 6);
        for r in &t.rows {
            assert_eq!(r[0], 1.0);
            for pair in r[4..].chunks(2) {
                assert!((pair[0] - pair[1]).abs() < 1e-6, "{r:?}");
            }
        }
    }

    #[test]
    fn bad_grid_specs() {
        assert!(GridSpec::new("su5", 3).is_err());
        let mut spec = GridSpec::new("su2-spin-1", 3).unwrap();
        spec.fixed.insert("theta".into(), 1.0);
        assert!(connection_table(&spec).is_err());
        spec.fixed.clear();
        spec.axes.1 = "theta".into();
        assert!(connection_table(&spec).is_err());
    }
}
