use std::fs;

use hydromission::config::MapConfig;
use hydromission::map::{load_terrain, read_pgm, write_pgm};
use hydromission::Error;
use hydromission_core::env::{synthetic_archipelago, CellClass};
use hydromission_core::rng;
use tempfile::TempDir;

#[test]
fn raw_grid_with_sidecar_matches_the_graymap() {
    let tmp = TempDir::new().unwrap();
    let chart = synthetic_archipelago(120, 90, 3, &mut rng::seeded(5));
    let pgm = tmp.path().join("chart.pgm");
    write_pgm(&pgm, &chart.image).unwrap();
    assert_eq!(read_pgm(&pgm).unwrap(), chart.image);

    let raw = tmp.path().join("chart.raw");
    fs::write(&raw, &chart.image.pixels).unwrap();
    fs::write(tmp.path().join("chart.raw.json"), r#"{"width": 120, "height": 90, "cell_size": 25.0}"#).unwrap();

    let from_pgm = load_terrain(&MapConfig {
        file: Some(pgm),
        cell_size: 25.0,
        ..MapConfig::default()
    })
    .unwrap();
    let from_raw = load_terrain(&MapConfig {
        file: Some(raw),
        ..MapConfig::default()
    })
    .unwrap();
    assert_eq!(from_pgm, from_raw);
    assert_eq!((from_raw.width(), from_raw.height(), from_raw.cell_size()), (120, 90, 25.0));
    // Painted coast comes back as coast.
    let coast = chart.coast_mask.iter().zip(from_raw.classes()).filter(|(m, c)| **m && **c == CellClass::Coast).count();
    let painted = chart.coast_mask.iter().filter(|m| **m).count();
    assert!(coast as f64 >= 0.95 * painted as f64, "{coast} of {painted}");
}

#[test]
fn short_raw_grid_is_an_error() {
    let tmp = TempDir::new().unwrap();
    let raw = tmp.path().join("short.raw");
    fs::write(&raw, [0u8; 10]).unwrap();
    fs::write(tmp.path().join("short.raw.json"), r#"{"width": 4, "height": 4, "cell_size": 1.0}"#).unwrap();
    let err = load_terrain(&MapConfig {
        file: Some(raw),
        ..MapConfig::default()
    })
    .unwrap_err();
    assert!(matches!(err, Error::Map { .. }), "{err}");
}

#[test]
fn bundled_chart_clusters_into_three_classes() {
    let cfg = MapConfig {
        file: Some(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/archipelago.pgm").into()),
        cell_size: 20.0,
        ..MapConfig::default()
    };
    let t = load_terrain(&cfg).unwrap();
    assert_eq!((t.width(), t.height()), (500, 500));
    for class in [CellClass::Coast, CellClass::Uncertain, CellClass::Water] {
        assert!(t.count(class) > 0, "{class:?}");
    }
    assert_eq!(
        t.count(CellClass::Coast) + t.count(CellClass::Uncertain) + t.count(CellClass::Water),
        500 * 500
    );
}
