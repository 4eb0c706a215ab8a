use std::fs::File;
use std::io::BufReader;

use qmstat::scenario::{run_scenario, ScenarioConfig};
use qmstat::*;
use tempfile::TempDir;

#[test]
fn kernel_csv_round_trip_through_a_file() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("kernel.csv");
    let grid = Grid::centered(0.0, 6.0, 96).unwrap();
    let k = gaussian_kernel(grid, 0.7, KernelKind::Current).unwrap();
    k.write_csv(File::create(&path).unwrap()).unwrap();
    let back = Kernel::read_csv(BufReader::new(File::open(&path).unwrap()), grid).unwrap();
    assert_eq!(back.kind(), KernelKind::Current);
    assert_eq!(back.width(), 0.7);
    for (a, b) in k.to_dense().iter().zip(back.to_dense()) {
        assert!((a - b).abs() <= 1e-15 * a.abs().max(1e-300));
    }
    // A kernel file cannot be loaded onto a different grid.
    let other = Grid::centered(0.0, 6.0, 97).unwrap();
    let err = Kernel::read_csv(BufReader::new(File::open(&path).unwrap()), other).unwrap_err();
    assert!(matches!(err, Error::GridMismatch(..)));
}

#[test]
fn scenario_fields_csv_matches_the_readings() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("fields.csv");
    let config = ScenarioConfig::packet(
        GaussianPacketParams::new(0.3, 1.0, 2.0).unwrap(),
        DeviceParams::new(0.5, 0.4).unwrap(),
    );
    let run = run_scenario(&config).unwrap();
    run.write_fields_csv(File::create(&path).unwrap()).unwrap();

    let mut rdr = csv::Reader::from_path(&path).unwrap();
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["x [length]", "rho_I [1/length]", "J_I [1/time]", "rho_R [1/length]", "J_R [1/time]"]
    );
    let rows: Vec<Vec<f64>> = rdr
        .records()
        .map(|r| r.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), run.grid.len());
    let i = rows.len() / 3;
    assert_eq!(rows[i][0], run.grid.point(i));
    assert_eq!(rows[i][3], run.recorded.rho().values()[i]);
    assert_eq!(rows[i][4], run.recorded.current().values()[i]);
}

#[test]
fn sample_csv_carries_metadata() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("samples.csv");
    let grid = Grid::centered(0.0, 8.0, 1024).unwrap();
    let psi = gaussian_packet(GaussianPacketParams::new(0.0, 1.0, 0.0).unwrap(), grid, UnitSystem::default()).unwrap();
    let reading = reading_of(&psi, UnitSystem::default()).unwrap();
    let set = sample_positions(&reading, 100, 9).unwrap();
    set.write_csv(File::create(&path).unwrap(), "demo").unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[..5].iter().all(|l| l.starts_with('#')));
    assert!(lines.contains(&"# seed=9"));
    assert!(lines.contains(&"# rng=ChaCha8"));
    assert_eq!(lines[5], "x [length]");
    assert_eq!(lines.len(), 106);
    let first: f64 = lines[6].parse().unwrap();
    assert_eq!(first, set.draws[0]);
}
