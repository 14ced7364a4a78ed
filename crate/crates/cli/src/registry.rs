//! Built-in systems from the worked examples, each with a `-concrete` instantiation.

use crate::dsl::{parse_system, SystemFile};
use crate::CliError;

macro_rules! systems {
    ($($name:literal),* $(,)?) => {
        const SYSTEMS: &[(&str, &str)] = &[
            $(
                ($name, include_str!(concat!("../systems/", $name, ".sys"))),
                (concat!($name, "-concrete"), include_str!(concat!("../systems/", $name, "-concrete.sys"))),
            )*
        ];
    };
}

systems!(
    "ptd3-darboux",
    "finite-helicity",
    "zero-helicity",
    "decay",
    "cartan-hilbert-n1",
    "rigid-rotation-euler",
    "viscous-mode",
);

pub fn names() -> impl Iterator<Item = &'static str> {
    SYSTEMS.iter().map(|(n, _)| *n)
}

pub fn source(name: &str) -> Option<&'static str> {
    SYSTEMS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Registered names close to `name`, best first.
pub fn suggestions(name: &str) -> Vec<String> {
    let mut scored: Vec<(f64, &str)> = names()
        .map(|n| (strsim::normalized_levenshtein(name, n), n))
        .filter(|(s, n)| *s >= 0.5 || n.starts_with(name) || name.starts_with(n))
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(b.1)));
    scored.into_iter().take(3).map(|(_, n)| n.to_string()).collect()
}

pub fn load_example(name: &str) -> Result<SystemFile, CliError> {
    let text = source(name)
        .ok_or_else(|| CliError::UnknownExample { name: name.to_string(), suggestions: suggestions(name) })?;
    parse_system(text).map_err(|error| CliError::Parse { origin: name.to_string(), error })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_parses() {
        for n in names() {
            load_example(n).unwrap_or_else(|e| panic!("{n}: {e}"));
        }
        assert_eq!(names().count(), 14);
    }

    #[test]
    fn darboux_form() {
        let s = load_example("ptd3-darboux").unwrap();
        assert_eq!(s.form("A").unwrap().to_string(), "x*dy + dz");
    }

    #[test]
    fn suggests_near_misses() {
        assert_eq!(suggestions("decy")[0], "decay");
        assert!(matches!(load_example("nope"), Err(CliError::UnknownExample { .. })));
    }
}
