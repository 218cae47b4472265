//! Writes the built-in scenarios as TOML files into the given directory.

use std::path::PathBuf;

use pipeflow::scenario::{smooth_section_study, standard_suite};

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "configs".into()));
    std::fs::create_dir_all(&dir)?;
    for sc in standard_suite().into_iter().chain([smooth_section_study()]) {
        let path = dir.join(format!("{}.toml", sc.name));
        std::fs::write(&path, sc.to_toml())?;
        println!("{}", path.display());
    }
    Ok(())
}
