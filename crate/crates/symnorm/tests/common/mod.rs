#![allow(dead_code)]

pub mod oracle;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use symnorm::config::RunConfig;
use symnorm::formats::obj::write_obj;
use symnorm_core::shapes::{cuboid, regular_prism};

/// Category used by the toy corpus.
pub const TOY_CATEGORY: &str = "table";

/// Writes four symmetric models under `<root>/table/`.
pub fn write_toy_corpus(root: &Path) {
    let dir = root.join(TOY_CATEGORY);
    std::fs::create_dir_all(&dir).unwrap();
    let meshes = [
        ("m_a", cuboid(2.0, 1.0, 1.5).unwrap()),
        ("m_b", cuboid(1.0, 0.6, 2.4).unwrap()),
        ("m_c", regular_prism(6, 1.0, 0.7).unwrap()),
        ("m_d", cuboid(3.0, 0.8, 1.0).unwrap()),
    ];
    for (id, mesh) in meshes {
        std::fs::write(dir.join(format!("{id}.obj")), write_obj(&mesh)).unwrap();
    }
}

/// Small, fast configuration for corpus tests.
pub fn toy_config(views: usize) -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.camera.width = 64;
    cfg.camera.height = 64;
    cfg.per_model_views = views;
    cfg
}

/// Every file under `dir` keyed by its relative path.
pub fn read_tree(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(base: &Path, dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(base, &path, out);
            } else {
                out.insert(path.strip_prefix(base).unwrap().to_path_buf(), std::fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}
