mod common;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

use common::oracle::brute_force_ap;
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symnorm::commands::{cmd_eval_sym, format_predictions, SplitFilter};
use symnorm::dataset::{record_symmetry_orientations, MANIFEST_FILE};
use symnorm::formats::obj::write_obj;
use symnorm::formats::pnm::{write_pfm, FloatImage};
use symnorm::manifest::Manifest;
use symnorm_core::eval::SymmetryPrediction;
use symnorm_core::shapes::cuboid;
use symnorm_core::{TriangleMesh, Vec3};
use tempfile::TempDir;

const VIEWS: usize = 2;

fn symnorm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symnorm")).args(args).output().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

struct Corpus {
    corpus: TempDir,
    config: PathBuf,
    out: TempDir,
}

impl Corpus {
    fn manifest(&self) -> PathBuf {
        self.out.path().join(MANIFEST_FILE)
    }
}

fn build_with_binary(corpus: &Path, config: &Path, out: &Path) -> Output {
    symnorm(&["build", p(corpus), "--out", p(out), "--views", &VIEWS.to_string(), "--config", p(config)])
}

fn corpus() -> &'static Corpus {
    static CORPUS: OnceLock<Corpus> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let corpus = TempDir::new().unwrap();
        write_toy_corpus(corpus.path());
        let config = corpus.path().join("run.cfg");
        std::fs::write(&config, "width = 64\nheight = 64\n").unwrap();
        let out = TempDir::new().unwrap();
        let o = build_with_binary(corpus.path(), &config, out.path());
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        Corpus { corpus, config, out }
    })
}

fn gt_by_image() -> (Manifest, Vec<(String, Vec<Vec3>)>) {
    let (m, base) = Manifest::load(&corpus().manifest()).unwrap();
    let gt = m
        .records
        .iter()
        .map(|r| (r.image_id(), record_symmetry_orientations(r, &base, m.symmetry_codebook.0).unwrap()))
        .collect();
    (m, gt)
}

fn tsv_rows(text: &str) -> BTreeMap<String, Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| {
            let mut cols = l.split('\t').map(str::to_string);
            (cols.next().unwrap(), cols.collect())
        })
        .collect()
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(symnorm(&[]).status.code(), Some(2));
    assert_eq!(symnorm(&["detect", "/nonexistent/x.obj"]).status.code(), Some(2));

    let bad = dir.path().join("bad.obj");
    std::fs::write(&bad, "v 0 0 0\nv 1 0 0\nf 1 2 7\n").unwrap();
    let o = symnorm(&["detect", p(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.obj:3"));

    let empty = dir.path().join("empty.obj");
    std::fs::write(&empty, "v 0 0 0\nv 1 0 0\n").unwrap();
    assert_eq!(symnorm(&["detect", p(&empty)]).status.code(), Some(3));

    let flat = dir.path().join("flat.obj");
    let line = TriangleMesh::new(
        vec![Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0), Vec3::new(2.0, 0.0, 0.0)],
        vec![[0, 1, 2]],
    )
    .unwrap();
    std::fs::write(&flat, write_obj(&line)).unwrap();
    assert_eq!(symnorm(&["detect", p(&flat)]).status.code(), Some(3));

    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "colour = red\n").unwrap();
    assert_eq!(symnorm(&["detect", p(&flat), "--config", p(&cfg)]).status.code(), Some(2));
}

#[test]
fn detect_and_render_write_outputs() {
    let dir = TempDir::new().unwrap();
    let obj = dir.path().join("box.obj");
    std::fs::write(&obj, write_obj(&cuboid(2.0, 3.0, 5.0).unwrap())).unwrap();
    let sym = dir.path().join("box.sym");
    let o = symnorm(&["detect", p(&obj), "--out", p(&sym)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&sym).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 3);

    let prefix = dir.path().join("view");
    let o = symnorm(&["render", p(&obj), "--out", p(&prefix), "--az", "-30", "--el", "20", "--width", "40", "--height", "30"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let normals = std::fs::read(dir.path().join("view.normals.pfm")).unwrap();
    assert!(normals.starts_with(b"PF\n40 30\n-1.0\n"));
    assert!(dir.path().join("view.depth.pfm").is_file());
    assert!(dir.path().join("view.labels.pgm").is_file());
}

#[test]
fn build_is_bitwise_reproducible() {
    let c = corpus();
    let again = TempDir::new().unwrap();
    let o = build_with_binary(c.corpus.path(), &c.config, again.path());
    assert_eq!(o.status.code(), Some(0));
    let (a, b) = (read_tree(c.out.path()), read_tree(again.path()));
    assert_eq!(a.len(), 2 + 4 + 4 * VIEWS * 3);
    assert_eq!(a.keys().collect::<Vec<_>>(), b.keys().collect::<Vec<_>>());
    for (k, v) in &a {
        assert!(b[k] == *v, "{} differs", k.display());
    }
}

#[test]
fn eval_sym_perfect_and_empty_predictions() {
    let (_, gt) = gt_by_image();
    let dir = TempDir::new().unwrap();
    let total: usize = gt.iter().map(|(_, g)| g.len()).sum();

    let perfect: Vec<(String, SymmetryPrediction)> = gt
        .iter()
        .flat_map(|(id, g)| g.iter().map(move |&d| (id.clone(), SymmetryPrediction::new(d, 0.9).unwrap())))
        .collect();
    let preds = dir.path().join("perfect.tsv");
    std::fs::write(&preds, format_predictions(&perfect)).unwrap();
    let out = dir.path().join("perfect");
    let o = symnorm(&["eval-sym", p(&corpus().manifest()), p(&preds), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = tsv_rows(&std::fs::read_to_string(out.join("sym_report.tsv")).unwrap());
    assert_eq!(rows["macro"], ["1", &total.to_string()]);
    assert_eq!(rows[TOY_CATEGORY][0], "1");
    assert!(out.join(format!("pr/{TOY_CATEGORY}.csv")).is_file());

    let empty = dir.path().join("empty.tsv");
    std::fs::write(&empty, "").unwrap();
    let out = dir.path().join("empty");
    let o = symnorm(&["eval-sym", p(&corpus().manifest()), p(&empty), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let rows = tsv_rows(&std::fs::read_to_string(out.join("sym_report.tsv")).unwrap());
    assert_eq!(rows["macro"], ["0", &total.to_string()]);

    let unknown = dir.path().join("unknown.tsv");
    std::fs::write(&unknown, "nope/x/000\t1\t0\t0\t0.5\n").unwrap();
    assert_eq!(symnorm(&["eval-sym", p(&corpus().manifest()), p(&unknown), "--out", p(&out)]).status.code(), Some(2));
}

#[test]
fn eval_sym_matches_brute_force_oracle() {
    let (_, gt) = gt_by_image();
    let dir = TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..20 {
        let mut raw: Vec<Vec<(Vec3, f64)>> = Vec::new();
        for (_, g) in &gt {
            let mut preds = Vec::new();
            for &d in g {
                if rng.random_bool(0.7) {
                    let jitter = Vec3::new(rng.random_range(-0.2..0.2), rng.random_range(-0.2..0.2), rng.random_range(-0.2..0.2));
                    preds.push(((d + jitter).try_normalize().unwrap(), f64::from(rng.random_range(0..10u8)) / 10.0));
                }
            }
            if rng.random_bool(0.5) {
                let v = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                if let Some(v) = v.try_normalize() {
                    preds.push((v, f64::from(rng.random_range(0..10u8)) / 10.0));
                }
            }
            raw.push(preds);
        }
        let flat: Vec<(String, SymmetryPrediction)> = gt
            .iter()
            .zip(&raw)
            .flat_map(|((id, _), ps)| ps.iter().map(move |&(d, c)| (id.clone(), SymmetryPrediction::new(d, c).unwrap())))
            .collect();
        let preds = dir.path().join(format!("p{trial}.tsv"));
        std::fs::write(&preds, format_predictions(&flat)).unwrap();
        let report = cmd_eval_sym(&corpus().manifest(), &preds, 10.0, SplitFilter::All, dir.path()).unwrap();
        // the file round trip is exact for f64 Display
        let gts: Vec<Vec<Vec3>> = gt.iter().map(|(_, g)| g.clone()).collect();
        let oracle = brute_force_ap(&gts, &raw, 10.0);
        let ap = report.ap.macro_ap.unwrap();
        assert!((ap - oracle.ap).abs() < 1e-12, "trial {trial}: {ap} vs {}", oracle.ap);
    }
}

#[test]
fn eval_normals_on_ground_truth_copies_and_mismatch() {
    let (m, _) = gt_by_image();
    let base = corpus().out.path();
    let dir = TempDir::new().unwrap();
    let preds = dir.path().join("preds");
    for r in &m.records {
        let dst = preds.join(format!("{}.pfm", r.image_id()));
        std::fs::create_dir_all(dst.parent().unwrap()).unwrap();
        std::fs::copy(base.join(&r.normal_map_path), dst).unwrap();
    }
    let out = dir.path().join("ok");
    let o = symnorm(&["eval-normals", p(&corpus().manifest()), p(&preds), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = tsv_rows(&std::fs::read_to_string(out.join("normals_report.tsv")).unwrap());
    assert_eq!(&rows["macro"][1..6], ["0", "0", "1", "1", "1"]);
    assert!(out.join("gp_curve.csv").is_file());

    let victim = m.records[0].image_id();
    let small = FloatImage { width: 8, height: 8, channels: 3, data: vec![0.0; 8 * 8 * 3] };
    std::fs::write(preds.join(format!("{victim}.pfm")), write_pfm(&small)).unwrap();
    let out = dir.path().join("bad");
    let o = symnorm(&["eval-normals", p(&corpus().manifest()), p(&preds), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    let text = std::fs::read_to_string(out.join("normals_report.txt")).unwrap();
    assert!(text.contains(&format!("skipped {victim}")), "{text}");
}

#[test]
fn baseline_lists_every_codebook_direction() {
    let (m, _) = gt_by_image();
    let run = |seed: &str| symnorm(&["baseline", p(&corpus().manifest()), "--codebook-k", "10", "--seed", seed]);
    let a = run("3");
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let text = String::from_utf8(a.stdout.clone()).unwrap();
    let mut per_image: BTreeMap<&str, usize> = BTreeMap::new();
    for line in text.lines() {
        *per_image.entry(line.split('\t').next().unwrap()).or_default() += 1;
    }
    assert_eq!(per_image.len(), m.records.len());
    assert!(per_image.values().all(|&n| n == 10));
    assert_eq!(run("3").stdout, a.stdout);
    assert_ne!(run("4").stdout, a.stdout);
}
