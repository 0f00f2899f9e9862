use std::fmt;
use std::str::FromStr;

use liouville_ep::model::{linspace, logspace};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Lin,
    Log,
}

/// A sweep axis written `min:max:count`, `lin:min:max:count` or `log:min:max:count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub spacing: Spacing,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("bad grid '{spec}': {reason}")]
pub struct GridParseError {
    pub spec: String,
    pub reason: String,
}

impl GridSpec {
    pub fn new(spacing: Spacing, min: f64, max: f64, count: usize) -> Result<Self, String> {
        if !min.is_finite() || !max.is_finite() {
            return Err("bounds must be finite".into());
        }
        if count < 1 {
            return Err("count must be >= 1".into());
        }
        if min > max {
            return Err(format!("min {min} exceeds max {max}"));
        }
        if spacing == Spacing::Log && min <= 0.0 {
            return Err("log spacing needs min > 0".into());
        }
        Ok(Self {
            spacing,
            min,
            max,
            count,
        })
    }

    pub fn points(&self) -> Vec<f64> {
        match self.spacing {
            Spacing::Lin => linspace(self.min, self.max, self.count),
            Spacing::Log => logspace(self.min, self.max, self.count),
        }
    }
}

impl FromStr for GridSpec {
    type Err = GridParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let fail = |reason: String| GridParseError {
            spec: s.to_string(),
            reason,
        };
        let parts: Vec<&str> = s.trim().split(':').collect();
        let (spacing, rest) = match parts.as_slice() {
            ["lin", rest @ ..] => (Spacing::Lin, rest),
            ["log", rest @ ..] => (Spacing::Log, rest),
            rest => (Spacing::Lin, rest),
        };
        let [min, max, count] = rest else {
            return Err(fail("expected [lin:|log:]min:max:count".into()));
        };
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| fail(format!("'{t}': {e}")))
        };
        let count = count
            .trim()
            .parse::<usize>()
            .map_err(|e| fail(format!("count '{count}': {e}")))?;
        GridSpec::new(spacing, num(min)?, num(max)?, count).map_err(fail)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.spacing {
            Spacing::Lin => "lin",
            Spacing::Log => "log",
        };
        write!(f, "{tag}:{}:{}:{}", self.min, self.max, self.count)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        let g: GridSpec = "0:0.12:121".parse().unwrap();
        assert_eq!(
            g,
            GridSpec {
                spacing: Spacing::Lin,
                min: 0.0,
                max: 0.12,
                count: 121
            }
        );
        let g: GridSpec = "log:1e-3:20:400".parse().unwrap();
        assert_eq!(g.spacing, Spacing::Log);
        assert_eq!(g.points().len(), 400);
        assert_eq!(g.points()[399], 20.0);
        let g: GridSpec = "lin:-10:10:5".parse().unwrap();
        assert_eq!(g.points(), vec![-10.0, -5.0, 0.0, 5.0, 10.0]);
    }

    #[test]
    fn rejects_bad_specs() {
        for bad in [
            "1:0:3",
            "0:1:0",
            "log:0:1:3",
            "0:1",
            "a:1:2",
            "lin:0:1:2.5",
            "0:nan:3",
            "log:1:2:3:4",
        ] {
            assert!(bad.parse::<GridSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn display_round_trips() {
        for s in ["0:0.12:121", "log:0.001:20:400", "-10:10:4001"] {
            let g: GridSpec = s.parse().unwrap();
            assert_eq!(g.to_string().parse::<GridSpec>().unwrap(), g);
        }
    }

    #[test]
    fn single_point() {
        let g: GridSpec = "0.5:0.5:1".parse().unwrap();
        assert_eq!(g.points(), vec![0.5]);
    }
}
