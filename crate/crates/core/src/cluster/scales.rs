use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer timescales between a global minimum and maximum, with the number
/// of scale `i-1` units making up one unit of scale `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleSystem {
    min_scale: i32,
    max_scale: i32,
    /// Explicit factors; scales not listed use `default_branching`.
    branching: BTreeMap<i32, u64>,
    default_branching: Option<u64>,
}

/// Names of the naive scales, slowest last.
pub const NAIVE_SCALE_NAMES: [(i32, &str); 7] = [
    (-1, "instant"),
    (0, "heartbeat"),
    (1, "quarter-hour"),
    (2, "day"),
    (3, "season"),
    (4, "generation"),
    (5, "aeon"),
];

impl ScaleSystem {
    pub fn new(
        min_scale: i32,
        max_scale: i32,
        branching: BTreeMap<i32, u64>,
        default_branching: Option<u64>,
        max_factor: u64,
    ) -> Result<Self> {
        if min_scale >= max_scale {
            return Err(Error::Scale(format!(
                "min scale {min_scale} must lie below max scale {max_scale}"
            )));
        }
        let s = Self {
            min_scale,
            max_scale,
            branching,
            default_branching,
        };
        for i in (min_scale + 1)..=max_scale {
            let f = s.factor(i)?;
            if f < 2 || f > max_factor {
                return Err(Error::Scale(format!(
                    "branching factor {f} at scale {i} outside [2, {max_factor}]"
                )));
            }
        }
        if let Some((&i, _)) = s
            .branching
            .iter()
            .find(|(&i, _)| i <= min_scale || i > max_scale)
        {
            return Err(Error::Scale(format!("branching given for scale {i} outside the range")));
        }
        Ok(s)
    }

    /// Powers of ten from `10^-18` to `10^18` seconds, 10 units per step.
    pub fn modern() -> Self {
        Self::new(-18, 18, BTreeMap::new(), Some(10), 10_000).expect("valid preset")
    }

    /// Instant, heartbeat, quarter-hour, day, season, generation, aeon at
    /// scales -1..=5. Factors above the day are defaults and may be
    /// replaced with [`ScaleSystem::with_factor`].
    pub fn naive() -> Self {
        let branching = BTreeMap::from([(0, 100), (1, 900), (2, 96), (3, 96), (4, 120), (5, 100)]);
        Self::new(-1, 5, branching, None, 10_000).expect("valid preset")
    }

    /// Every scale from `min + 1` to `max` has the same factor.
    pub fn uniform(min_scale: i32, max_scale: i32, factor: u64) -> Result<Self> {
        Self::new(min_scale, max_scale, BTreeMap::new(), Some(factor), 10_000)
    }

    pub fn with_factor(mut self, scale: i32, factor: u64) -> Result<Self> {
        self.branching.insert(scale, factor);
        Self::new(
            self.min_scale,
            self.max_scale,
            self.branching,
            self.default_branching,
            10_000,
        )
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "modern" => Ok(Self::modern()),
            "naive" => Ok(Self::naive()),
            _ => Err(Error::Scale(format!("unknown scale preset `{name}`"))),
        }
    }

    pub fn min_scale(&self) -> i32 {
        self.min_scale
    }

    pub fn max_scale(&self) -> i32 {
        self.max_scale
    }

    pub fn contains_scale(&self, i: i32) -> bool {
        (self.min_scale..=self.max_scale).contains(&i)
    }

    pub fn check_scale(&self, i: i32) -> Result<()> {
        if self.contains_scale(i) {
            Ok(())
        } else {
            Err(Error::Scale(format!(
                "scale {i} outside [{}, {}]",
                self.min_scale, self.max_scale
            )))
        }
    }

    /// Units of scale `i - 1` in one unit of scale `i`.
    pub fn factor(&self, i: i32) -> Result<u64> {
        if i <= self.min_scale || i > self.max_scale {
            return Err(Error::Scale(format!("no branching factor at scale {i}")));
        }
        self.branching
            .get(&i)
            .copied()
            .or(self.default_branching)
            .ok_or_else(|| Error::Scale(format!("no branching factor at scale {i}")))
    }

    /// Units of scale `lower` in one unit of scale `upper`.
    pub fn units_between(&self, lower: i32, upper: i32) -> Result<u128> {
        self.check_scale(lower)?;
        self.check_scale(upper)?;
        if lower > upper {
            return Err(Error::Scale(format!("scale {lower} is above {upper}")));
        }
        let mut total: u128 = 1;
        for i in (lower + 1)..=upper {
            total = total
                .checked_mul(self.factor(i)? as u128)
                .ok_or_else(|| Error::Scale("window size overflows".into()))?;
        }
        Ok(total)
    }
}

impl Default for ScaleSystem {
    fn default() -> Self {
        Self::modern()
    }
}
