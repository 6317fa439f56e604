use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cluster::ScaleSystem;
use crate::error::{Error, Result};
use crate::fluents::TimePoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Past,
    Future,
}

/// Tense labels mapped to the timescale they count on and the direction
/// they count in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TenseMap {
    pub name: String,
    pub tenses: BTreeMap<String, (i32, Direction)>,
}

impl TenseMap {
    pub fn new<'a>(name: &str, dir: Direction, entries: impl IntoIterator<Item = (&'a str, i32)>) -> Self {
        Self {
            name: name.into(),
            tenses: entries
                .into_iter()
                .map(|(l, i)| (l.to_string(), (i, dir)))
                .collect(),
        }
    }

    /// Heartbeat, quarter-hour, day and generation pasts.
    pub fn tamil_past() -> Self {
        Self::new(
            "tamil-past",
            Direction::Past,
            [("immediate", 0), ("recent", 1), ("remote", 2), ("historical", 4)],
        )
    }

    pub fn future() -> Self {
        Self::new(
            "future",
            Direction::Future,
            [("immediate", 0), ("near", 1), ("distant", 2), ("hypothetical", 4)],
        )
    }

    /// Five pasts. Only the labels are attested; the scales are a guess
    /// that spreads them over the naive scales with the mythological past
    /// on the aeon.
    pub fn tagalog_past() -> Self {
        Self::new(
            "tagalog-past",
            Direction::Past,
            [
                ("immediate", 0),
                ("recent", 1),
                ("distant", 2),
                ("remote", 3),
                ("mythological", 5),
            ],
        )
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "tamil" | "tamil-past" => Ok(Self::tamil_past()),
            "future" => Ok(Self::future()),
            "tagalog" | "tagalog-past" => Ok(Self::tagalog_past()),
            _ => Err(Error::UnknownTense(format!("no preset `{name}`"))),
        }
    }

    pub fn check(&self, s: &ScaleSystem) -> Result<()> {
        self.tenses.values().try_for_each(|(i, _)| s.check_scale(*i))
    }
}

/// The instant a tense points at: `(i.-k)` for pasts and `(i.k)` for futures.
pub fn tense_locate(label: &str, map: &TenseMap, k: u32) -> Result<TimePoint> {
    if k == 0 {
        return Err(Error::Invalid("a tense counts at least one unit away".into()));
    }
    let &(scale, dir) = map
        .tenses
        .get(label)
        .ok_or_else(|| Error::UnknownTense(label.to_string()))?;
    let k = k as i64;
    Ok(TimePoint::new(scale, if dir == Direction::Past { -k } else { k }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tamil_remote_past() {
        let t = tense_locate("remote", &TenseMap::tamil_past(), 3).unwrap();
        assert_eq!(t, TimePoint::new(2, -3));
        let h = tense_locate("historical", &TenseMap::tamil_past(), 1).unwrap();
        assert_eq!(h.scale, 4);
    }

    #[test]
    fn immediate_future() {
        assert_eq!(
            tense_locate("immediate", &TenseMap::future(), 1).unwrap(),
            TimePoint::new(0, 1)
        );
    }

    #[test]
    fn unknown_labels() {
        assert!(matches!(
            tense_locate("mythological", &TenseMap::tamil_past(), 1),
            Err(Error::UnknownTense(_))
        ));
        assert!(tense_locate("mythological", &TenseMap::tagalog_past(), 1).is_ok());
        assert!(tense_locate("remote", &TenseMap::tamil_past(), 0).is_err());
    }

    #[test]
    fn presets_fit_the_naive_scales() {
        for p in ["tamil", "future", "tagalog"] {
            TenseMap::preset(p).unwrap().check(&ScaleSystem::naive()).unwrap();
        }
    }
}
