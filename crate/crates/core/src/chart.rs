//! Coordinate charts on parameter space.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;

/// One named coordinate with its nominal range in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct Coordinate {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    /// Periodic coordinates identify `lower` with `upper`.
    pub periodic: bool,
}

impl Coordinate {
    pub fn interval(name: &str, lower: f64, upper: f64) -> Self {
        Self { name: name.to_string(), lower, upper, periodic: false }
    }

    pub fn angle(name: &str) -> Self {
        Self { name: name.to_string(), lower: 0.0, upper: TWO_PI, periodic: true }
    }

    pub fn period(&self) -> Option<f64> {
        self.periodic.then_some(self.upper - self.lower)
    }
}

/// A coordinate that lies outside its nominal range. Built-in formulas are
/// entire, so this is reported rather than rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsWarning {
    pub coordinate: String,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

impl std::fmt::Display for BoundsWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} = {} lies outside [{}, {}]", self.coordinate, self.value, self.lower, self.upper)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterChart {
    coords: Vec<Coordinate>,
}

impl ParameterChart {
    pub fn new(coords: Vec<Coordinate>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidChart("a chart needs at least one coordinate".into()));
        }
        for (i, c) in coords.iter().enumerate() {
            if c.name.is_empty() {
                return Err(Error::InvalidChart(format!("coordinate {i} has an empty name")));
            }
            if coords[..i].iter().any(|d| d.name == c.name) {
                return Err(Error::InvalidChart(format!("duplicate coordinate `{}`", c.name)));
            }
            if !c.lower.is_finite() || !c.upper.is_finite() || c.lower >= c.upper {
                return Err(Error::InvalidChart(format!(
                    "coordinate `{}` has invalid bounds [{}, {}]",
                    c.name, c.lower, c.upper
                )));
            }
        }
        Ok(Self { coords })
    }

    /// `theta in [0, pi]`, `phi` periodic on `[0, 2pi)`.
    pub fn sphere() -> Self {
        Self::new(vec![Coordinate::interval("theta", 0.0, PI), Coordinate::angle("phi")])
            .expect("sphere chart is valid")
    }

    /// `(theta, phi, g, gamma)` with `g in [0, pi/2]` and `gamma` periodic.
    pub fn su3() -> Self {
        Self::new(vec![
            Coordinate::interval("theta", 0.0, PI),
            Coordinate::angle("phi"),
            Coordinate::interval("g", 0.0, FRAC_PI_2),
            Coordinate::angle("gamma"),
        ])
        .expect("su3 chart is valid")
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coordinates(&self) -> &[Coordinate] {
        &self.coords
    }

    pub fn coordinate(&self, i: usize) -> &Coordinate {
        &self.coords[i]
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.coords.iter().map(|c| c.name.as_str())
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.coords.iter().position(|c| c.name == name).ok_or_else(|| Error::UnknownCoordinate(name.to_string()))
    }

    pub fn check_dim(&self, coords: &[f64]) -> Result<()> {
        if coords.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), actual: coords.len() });
        }
        Ok(())
    }

    /// Soft bounds check: returns one warning per out-of-range coordinate.
    pub fn check_point(&self, coords: &[f64]) -> Result<Vec<BoundsWarning>> {
        self.check_dim(coords)?;
        Ok(self
            .coords
            .iter()
            .zip(coords)
            .filter(|(c, &v)| v < c.lower || v > c.upper)
            .map(|(c, &v)| BoundsWarning { coordinate: c.name.clone(), value: v, lower: c.lower, upper: c.upper })
            .collect())
    }

    /// Displacement `to - from` along coordinate `i`; periodic coordinates
    /// take the representative in `(-P/2, P/2]`.
    pub fn displacement(&self, i: usize, from: f64, to: f64) -> f64 {
        let d = to - from;
        match self.coords[i].period() {
            Some(p) => wrap_half_period(d, p),
            None => d,
        }
    }

    /// Largest coordinate displacement between two points.
    pub fn distance_max(&self, a: &[f64], b: &[f64]) -> f64 {
        (0..self.dim()).map(|i| self.displacement(i, a[i], b[i]).abs()).fold(0.0, f64::max)
    }
}

fn wrap_half_period(d: f64, p: f64) -> f64 {
    let r = d - p * (d / p).round();
    if r <= -p / 2.0 {
        r + p
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_bad_bounds() {
        let dup = ParameterChart::new(vec![Coordinate::angle("a"), Coordinate::angle("a")]);
        assert!(matches!(dup, Err(Error::InvalidChart(_))));
        let bad = ParameterChart::new(vec![Coordinate::interval("x", 1.0, f64::INFINITY)]);
        assert!(matches!(bad, Err(Error::InvalidChart(_))));
        assert!(matches!(ParameterChart::new(vec![]), Err(Error::InvalidChart(_))));
    }

    #[test]
    fn periodic_displacement_wraps() {
        let chart = ParameterChart::sphere();
        assert!((chart.displacement(1, 0.1, TWO_PI - 0.1) + 0.2).abs() < 1e-12);
        assert!((chart.displacement(1, TWO_PI, 0.0)).abs() < 1e-15);
        assert_eq!(chart.displacement(0, 0.0, 3.0), 3.0);
        assert!((chart.displacement(1, 0.0, PI) - PI).abs() < 1e-15);
    }

    #[test]
    fn soft_bounds_warning() {
        let chart = ParameterChart::su3();
        let w = chart.check_point(&[4.0, 0.0, 0.1, 0.0]).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].coordinate, "theta");
        assert!(chart.check_point(&[0.0]).is_err());
        assert_eq!(chart.index_of("gamma").unwrap(), 3);
        assert!(chart.index_of("psi").is_err());
    }
}
