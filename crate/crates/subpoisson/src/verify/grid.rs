//! Grid axis description for sweep checks.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

/// One sweep axis: `count` points from `min` to `max`, linearly or
/// geometrically spaced. Endpoints are always hit exactly.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn new(min: f64, max: f64, count: usize, spacing: Spacing) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::Domain(format!(
                "grid requires finite min < max, got [{min}, {max}]"
            )));
        }
        if count < 2 {
            return Err(Error::Domain(format!(
                "grid requires count >= 2, got {count}"
            )));
        }
        if spacing == Spacing::Log && min <= 0.0 {
            return Err(Error::Domain(format!(
                "log grid requires min > 0, got {min}"
            )));
        }
        Ok(GridSpec {
            min,
            max,
            count,
            spacing,
        })
    }

    pub fn linear(min: f64, max: f64, count: usize) -> Result<Self> {
        Self::new(min, max, count, Spacing::Linear)
    }

    pub fn log(min: f64, max: f64, count: usize) -> Result<Self> {
        Self::new(min, max, count, Spacing::Log)
    }

    /// Parse `"min:max:count:lin"` or `"min:max:count:log"`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(Error::Domain(format!(
                "grid spec '{s}' must be min:max:count:lin|log"
            )));
        }
        let min: f64 = parts[0]
            .parse()
            .map_err(|_| Error::Domain(format!("bad grid min '{}'", parts[0])))?;
        let max: f64 = parts[1]
            .parse()
            .map_err(|_| Error::Domain(format!("bad grid max '{}'", parts[1])))?;
        let count: usize = parts[2]
            .parse()
            .map_err(|_| Error::Domain(format!("bad grid count '{}'", parts[2])))?;
        let spacing = match parts[3] {
            "lin" | "linear" => Spacing::Linear,
            "log" => Spacing::Log,
            other => {
                return Err(Error::Domain(format!(
                    "bad grid spacing '{other}' (expected lin or log)"
                )))
            }
        };
        Self::new(min, max, count, spacing)
    }

    /// Deterministic point list; first and last are exactly `min` and `max`.
    pub fn points(&self) -> Vec<f64> {
        let n = self.count;
        let mut pts = Vec::with_capacity(n);
        match self.spacing {
            Spacing::Linear => {
                let step = (self.max - self.min) / (n - 1) as f64;
                for i in 0..n {
                    pts.push(self.min + step * i as f64);
                }
            }
            Spacing::Log => {
                let lmin = self.min.ln();
                let step = (self.max.ln() - lmin) / (n - 1) as f64;
                for i in 0..n {
                    pts.push((lmin + step * i as f64).exp());
                }
            }
        }
        pts[0] = self.min;
        pts[n - 1] = self.max;
        pts
    }

    pub fn describe(&self) -> String {
        let spacing = match self.spacing {
            Spacing::Linear => "lin",
            Spacing::Log => "log",
        };
        format!(
            "[{:e}, {:e}] x {} ({spacing})",
            self.min, self.max, self.count
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_points_hit_endpoints() {
        let g = GridSpec::linear(1.0, 3.0, 5).unwrap();
        assert_eq!(g.points(), vec![1.0, 1.5, 2.0, 2.5, 3.0]);
    }

    #[test]
    fn log_points_are_geometric() {
        let g = GridSpec::log(1e-2, 1e2, 5).unwrap();
        let pts = g.points();
        assert_eq!(pts[0], 1e-2);
        assert_eq!(pts[4], 1e2);
        assert!((pts[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn validation() {
        assert!(GridSpec::linear(2.0, 1.0, 5).is_err());
        assert!(GridSpec::linear(1.0, 2.0, 1).is_err());
        assert!(GridSpec::log(0.0, 1.0, 3).is_err());
        assert!(GridSpec::parse("1e-6:1e6:100:log").is_ok());
        assert!(GridSpec::parse("1:2:10:lin").is_ok());
        assert!(GridSpec::parse("1:2:10").is_err());
        assert!(GridSpec::parse("1:2:10:cubic").is_err());
    }

    #[test]
    fn determinism() {
        let g = GridSpec::log(1e-9, 1e9, 1000).unwrap();
        assert_eq!(g.points(), g.points());
    }
}
