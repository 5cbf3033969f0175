use std::path::Path;

use proptest::prelude::*;
use symnorm::formats::obj::{parse_obj, write_obj};
use symnorm::formats::pnm::{
    label_map_from_pgm, normal_map_from_images, normal_map_to_images, read_pfm, read_pgm, write_pfm, write_pgm16,
    FloatImage,
};
use symnorm::formats::symfile::{read_planes, write_planes};
use symnorm::Error;
use symnorm_core::orientation::{fibonacci_codebook, CodebookSupport, ViewPose};
use symnorm_core::render::{discretize_normal_map, rasterize, CameraIntrinsics};
use symnorm_core::shapes::{cuboid, icosphere};
use symnorm_core::{SymmetryPlane, TriangleMesh, Vec3};

fn coord() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6f64..1e6, -1e-6f64..1e-6, Just(0.0), Just(-0.0)]
}

fn mesh_strategy() -> impl Strategy<Value = TriangleMesh> {
    (3usize..20).prop_flat_map(|n| {
        let verts = prop::collection::vec((coord(), coord(), coord()), n);
        let faces = prop::collection::vec((0..n, 0..n, 0..n), 1..30);
        (verts, faces).prop_map(|(v, f)| {
            TriangleMesh::new(
                v.into_iter().map(|(x, y, z)| Vec3::new(x, y, z)).collect(),
                f.into_iter().map(|(a, b, c)| [a, b, c]).collect(),
            )
            .unwrap()
        })
    })
}

proptest! {
    #[test]
    fn obj_round_trip_is_bitwise(mesh in mesh_strategy()) {
        let text = write_obj(&mesh);
        let back = parse_obj(text.as_bytes(), Path::new("m.obj")).unwrap();
        prop_assert_eq!(back.faces(), mesh.faces());
        for (a, b) in back.vertices().iter().zip(mesh.vertices()) {
            prop_assert_eq!([a.x.to_bits(), a.y.to_bits(), a.z.to_bits()], [b.x.to_bits(), b.y.to_bits(), b.z.to_bits()]);
        }
    }

    #[test]
    fn pfm_round_trip_is_bitwise(w in 1usize..9, h in 1usize..9, three in any::<bool>(), seed in any::<u32>()) {
        let channels = if three { 3 } else { 1 };
        let data: Vec<f32> = (0..w * h * channels)
            .map(|i| f32::from_bits(seed.wrapping_mul(2_654_435_761).wrapping_add(i as u32 * 40503) & 0x7f7f_ffff))
            .collect();
        let img = FloatImage { width: w, height: h, channels, data };
        let back = read_pfm(&write_pfm(&img), Path::new("x.pfm")).unwrap();
        prop_assert_eq!(back.data.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), img.data.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
        prop_assert_eq!((back.width, back.height, back.channels), (w, h, channels));
    }

    #[test]
    fn pgm_round_trip(w in 1usize..9, h in 1usize..9, labels in prop::collection::vec(any::<u16>(), 64)) {
        let labels = &labels[..w * h];
        let (bw, bh, back) = read_pgm(&write_pgm16(w, h, labels), Path::new("x.pgm")).unwrap();
        prop_assert_eq!((bw, bh), (w, h));
        prop_assert_eq!(back.as_slice(), labels);
    }
}

#[test]
fn pfm_is_stored_bottom_row_first() {
    let img = FloatImage { width: 1, height: 2, channels: 1, data: vec![1.0, 2.0] };
    let bytes = write_pfm(&img);
    assert!(bytes.starts_with(b"Pf\n1 2\n-1.0\n"));
    let body = &bytes[bytes.len() - 8..];
    assert_eq!(f32::from_le_bytes(body[..4].try_into().unwrap()), 2.0);
}

#[test]
fn rendered_maps_survive_image_round_trip() {
    let mesh = icosphere(2).unwrap();
    let nm = rasterize(&mesh, &ViewPose::new(20.0, 10.0, 0.0).unwrap(), &CameraIntrinsics::with_size(32, 24)).unwrap();
    let (normals, depth) = normal_map_to_images(&nm);
    let normals = read_pfm(&write_pfm(&normals), Path::new("n.pfm")).unwrap();
    let depth = read_pfm(&write_pfm(&depth), Path::new("d.pfm")).unwrap();
    let back = normal_map_from_images(&normals, Some(&depth), Path::new("n.pfm")).unwrap();
    assert_eq!(back.mask(), nm.mask());
    for (a, b) in back.normals().iter().zip(nm.normals()) {
        assert!((*a - *b).norm() < 1e-6);
    }

    let cb = fibonacci_codebook(60, CodebookSupport::Hemisphere).unwrap();
    let lm = discretize_normal_map(&nm, &cb).unwrap();
    let back = label_map_from_pgm(&write_pgm16(32, 24, lm.labels()), 60, Path::new("l.pgm")).unwrap();
    assert_eq!(back.labels(), lm.labels());
    assert!(label_map_from_pgm(&write_pgm16(32, 24, lm.labels()), 10, Path::new("l.pgm")).is_err());
}

#[test]
fn obj_errors_carry_line_numbers() {
    let bad = b"v 0 0 0\nv 1 0 0\nf 1 2 9\n";
    match parse_obj(bad, Path::new("bad.obj")) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(parse_obj(b"v 0 0 x\n", Path::new("b.obj")), Err(Error::Parse { line: 1, .. })));
    assert!(matches!(
        parse_obj(b"v 0 0 0\n", Path::new("e.obj")),
        Err(Error::Core(symnorm_core::Error::EmptyMesh(_)))
    ));
}

#[test]
fn obj_accepts_common_face_forms() {
    let text = b"# quad\r\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvt 0 0\nvn 0 0 1\nf 1/1/1 2//1 3/1 -1\n";
    let mesh = parse_obj(text, Path::new("q.obj")).unwrap();
    assert_eq!(mesh.faces(), &[[0, 1, 2], [0, 2, 3]]);
    let cube = cuboid(2.0, 3.0, 5.0).unwrap();
    assert_eq!(parse_obj(write_obj(&cube).as_bytes(), Path::new("c.obj")).unwrap(), cube);
}

#[test]
fn symmetry_files_round_trip() {
    let planes = vec![
        SymmetryPlane::new(Vec3::new(1.0, 0.0, 0.0), 0.25).unwrap().with_residual(1e-4),
        SymmetryPlane::new(Vec3::new(0.0, 1.0, 1.0), -0.5).unwrap().with_residual(0.0),
    ];
    let text = write_planes(&planes, &["seed 0".to_string()]);
    assert!(text.starts_with("# seed 0\n"));
    let back = read_planes(&text, Path::new("p.sym")).unwrap();
    assert_eq!(back.len(), 2);
    for (a, b) in back.iter().zip(&planes) {
        assert!((a.normal - b.normal).norm() < 1e-10);
        assert!((a.offset - b.offset).abs() < 1e-10 && (a.residual - b.residual).abs() < 1e-14);
    }
    assert!(read_planes("1 0 0 0 -1\n", Path::new("p.sym")).is_err());
}
