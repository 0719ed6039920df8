use std::path::Path;
use std::process::{Command, Output};

use operb::io::read_csv;
use operb::{Algorithm, FitConfig};

fn operb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_operb"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_compress_verify_compare() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("grid.csv");
    let segs = dir.path().join("segs.csv");
    let report = dir.path().join("report.json");

    let out = operb(&[
        "gen",
        "--kind",
        "grid-route",
        "--n",
        "400",
        "--count",
        "4",
        "--seed",
        "9",
        "--step",
        "10",
        "--output",
        path_str(&input),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = operb(&[
        "compress",
        "--input",
        path_str(&input),
        "--epsilon",
        "5",
        "--output",
        path_str(&segs),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&segs).unwrap();
    assert!(text.starts_with("traj_id,seg_index,sx,sy,st,ex,ey,et,covered,patched_start\n"));

    let out = operb(&["verify", "--input", path_str(&input), "--epsilon", "5"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), Algorithm::ALL.len());

    let out = operb(&[
        "compare",
        "--input",
        path_str(&input),
        "--algo",
        "dp,operb-a",
        "--epsilon-list",
        "20",
        "--output",
        path_str(&report),
    ]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let blocks = json["results"].as_array().unwrap();
    assert_eq!(blocks.len(), 2);
    assert_eq!(blocks[0]["algo"], "dp");
    assert_eq!(blocks[1]["algo"], "operb-a");
    assert_eq!(blocks[1]["stats"]["input_points"], 1600);
}

#[test]
fn segment_rows_match_the_library_to_nine_digits() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("walk.csv");
    let segs = dir.path().join("segs.csv");
    assert!(operb(&[
        "gen",
        "--kind",
        "random-walk",
        "--n",
        "300",
        "--seed",
        "3",
        "--step",
        "7.3",
        "--output",
        path_str(&input)
    ])
    .status
    .success());
    assert!(operb(&[
        "compress",
        "--input",
        path_str(&input),
        "--algo",
        "operb",
        "--epsilon",
        "11",
        "--output",
        path_str(&segs)
    ])
    .status
    .success());

    let trajs = operb::io::ingest_csv(&input, false).unwrap();
    let rep = Algorithm::Operb
        .run(&trajs[0].points, &FitConfig::new(11.0).unwrap())
        .unwrap();

    let mut rdr = csv::Reader::from_path(&segs).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), rep.len());
    let close = |field: &str, v: f64| {
        let parsed: f64 = field.parse().unwrap();
        assert!((parsed - v).abs() <= 5e-9 * v.abs().max(1e-300), "{field} vs {v}");
    };
    for (row, seg) in rows.iter().zip(&rep.segments) {
        close(&row[2], seg.start.x);
        close(&row[3], seg.start.y);
        close(&row[5], seg.end.x);
        close(&row[6], seg.end.y);
        assert_eq!(row[8].parse::<usize>().unwrap(), seg.covered);
    }
}

#[test]
fn figure_fixture_round_trips() {
    let out = operb(&["gen", "--kind", "fig1"]);
    assert!(out.status.success());
    let trajs = read_csv(out.stdout.as_slice(), Path::new("stdout"), false).unwrap();
    assert_eq!(trajs.len(), 1);
    assert_eq!(trajs[0].points.len(), 15);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.csv");
    std::fs::write(&good, "traj_id,t,x,y\na,0,0,0\na,1,1,0\n").unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "traj_id,t,x,y\na,5,0,0\na,3,1,1\n").unwrap();

    let code = |args: &[&str]| operb(args).status.code();
    assert_eq!(
        code(&[
            "compress",
            "--input",
            path_str(&good),
            "--epsilon",
            "5",
            "--algo",
            "nope"
        ]),
        Some(1)
    );
    assert_eq!(
        code(&["compress", "--input", path_str(&good), "--epsilon", "-1"]),
        Some(1)
    );
    assert_eq!(code(&["compress", "--no-such-flag"]), Some(1));
    assert_eq!(
        code(&["compress", "--input", path_str(&bad), "--epsilon", "5"]),
        Some(2)
    );
    let missing = dir.path().join("missing.csv");
    assert_eq!(
        code(&["compress", "--input", path_str(&missing), "--epsilon", "5"]),
        Some(2)
    );
    assert_eq!(
        code(&["compress", "--input", path_str(&good), "--epsilon", "5"]),
        Some(0)
    );
    assert_eq!(code(&["--help"]), Some(0));
}
