//! Regenerates the bundled JSON fixtures from the in-code builders.
//!
//! cargo run -p sectorium --example gen_fixtures

use std::path::Path;

use sectorium::fixtures::{build, BUILTIN_NAMES};
use sectorium::IrrepSet;

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    std::fs::create_dir_all(&dir).unwrap();
    for name in BUILTIN_NAMES {
        let (group, irreps) = build(name).unwrap();
        let set = IrrepSet::validate(&group, irreps).unwrap_or_else(|e| panic!("{name}: {e}"));
        let g = serde_json::to_string_pretty(&group.to_spec()).unwrap();
        let i = serde_json::to_string(&set.to_file()).unwrap();
        std::fs::write(dir.join(format!("{name}.group.json")), g + "\n").unwrap();
        std::fs::write(dir.join(format!("{name}.irreps.json")), i + "\n").unwrap();
    }
    println!("wrote {} fixtures to {}", BUILTIN_NAMES.len(), dir.display());
}
