//! Registered examples against checked-in JSON reports. `UPDATE_GOLDEN=1` rewrites them.

use std::path::PathBuf;

use pfaff_cli::{analyze, registry, Command, Options};

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

#[test]
fn reports_match_goldens() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut stale = Vec::new();
    for name in registry::names() {
        let sys = registry::load_example(name).unwrap();
        let json = analyze(Command::Example, name, &sys, &Options::default()).unwrap().to_json();
        let path = golden_dir().join(format!("{name}.json"));
        if update {
            std::fs::create_dir_all(golden_dir()).unwrap();
            std::fs::write(&path, &json).unwrap();
            continue;
        }
        let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        if want != json {
            stale.push(name);
        }
    }
    assert!(stale.is_empty(), "reports differ from goldens: {stale:?}");
}
