//! Fixtures shared by the benchmarks: the corpus sources held in memory.

use std::path::{Path, PathBuf};

use agv_core::corpus::corpus_dir;

/// Every `.agv` file of the main flight-control model, as (name, text).
pub fn qfcs_sources() -> Vec<(String, String)> {
    read_dir(&corpus_dir().join("qfcs"))
}

fn read_dir(dir: &Path) -> Vec<(String, String)> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .expect("corpus directory exists")
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "agv"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let text = std::fs::read_to_string(&p).expect("corpus file is readable");
            (p.display().to_string(), text)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sources_load() {
        let sources = qfcs_sources();
        assert_eq!(sources.len(), 6);
        assert!(agv_core::load_sources(&sources).is_ok());
    }
}
