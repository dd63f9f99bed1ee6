use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::time::{Duration, Instant};

use ges_core::demo;
use ges_core::engine::FootprintResult;
use ges_core::inventory::Inventory;

fn ges() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ges"))
}

fn run(args: &[&str]) -> Output {
    ges().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn full_inventory_file(dir: &Path) -> PathBuf {
    write(dir, "full.json", &demo::full_inventory().to_json())
}

const HEADER: &str = "n° mission\tdate de départ\tville de départ\tpays de départ\tville de destination\tpays de destination\tmode de déplacement\tnb de personnes dans la voiture\taller / retour\tmotif du déplacement\tstatut de l'agent\n";

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.json", demo::BASE_INVENTORY_JSON);
    let o = run(&["validate", s(&good)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    let mut broken = demo::base_inventory();
    broken.lab.members.clear();
    broken.buildings[0].electricity_kwh = -1.0;
    let bad = write(dir.path(), "bad.json", &broken.to_json());
    let o = run(&["validate", s(&bad)]);
    assert_eq!(code(&o), 1);
    let err = stderr(&o);
    assert!(err.contains("lab.members:"), "{err}");
    assert!(err.contains("buildings[0].electricity_kwh:"), "{err}");

    let o = run(&["validate", s(&dir.path().join("missing.json"))]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&run(&["validate"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn validate_reads_stdin() {
    let mut child = ges().args(["validate", "-"]).stdin(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(demo::BASE_INVENTORY_JSON.as_bytes()).unwrap();
    assert_eq!(child.wait_with_output().unwrap().status.code(), Some(0));
}

#[test]
fn import_travel_contract() {
    let dir = tempfile::tempdir().unwrap();
    let inv = write(dir.path(), "inv.json", demo::BASE_INVENTORY_JSON);
    let rows = [
        "1\t12/03/2019\tToulouse\tFrance\tParis\tFrance\tTrain\t\tOUI\tColloque-Congrès\tChercheur.e-EC",
        "2\t02/05/2019\tToulouse\tFR\tBerlin\tAllemagne\tAvion\t\tOUI\tSéminaire\tITA",
        "3\t20/09/2019\tToulouse\tFR\tPau\tFR\tVoiture\t2\tNON\tEtude terrain\tDoc-Post doc",
    ];
    let tsv = write(dir.path(), "ok.tsv", &format!("{HEADER}{}\n", rows.join("\n")));
    let o = run(&["import-travel", s(&inv), s(&tsv)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let updated = Inventory::from_json(&std::fs::read(&inv).unwrap()).unwrap();
    assert_eq!(updated.trips.iter().map(|t| t.legs.len()).sum::<usize>(), 3);

    let partial = write(dir.path(), "partial.tsv", &format!("{HEADER}{}\n{}\n", rows[0], rows[1].replace("02/05/2019", "2019-05-02")));
    let out = dir.path().join("out.json");
    let o = run(&["import-travel", s(&inv), s(&partial), "-o", s(&out)]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("error: line 3:"), "{}", stderr(&o));
    assert_eq!(Inventory::from_json(&std::fs::read(&out).unwrap()).unwrap().trips.len(), 1);

    let before = std::fs::read(&inv).unwrap();
    let none = write(dir.path(), "none.tsv", &format!("{HEADER}{}\n", rows[0].replace("12/03/2019", "2019-03-12")));
    let o = run(&["import-travel", s(&inv), s(&none)]);
    assert_eq!(code(&o), 1);
    assert_eq!(std::fs::read(&inv).unwrap(), before, "inventory untouched on failure");

    assert_eq!(code(&run(&["import-travel", "-", "-"])), 2);
}

#[test]
fn import_travel_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let inv = write(dir.path(), "inv.json", demo::BASE_INVENTORY_JSON);
    let tsv = write(dir.path(), "travel.tsv", demo::TRAVEL_TSV);
    let o = run(&["import-travel", s(&inv), s(&tsv), "-o", "-"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let imported = Inventory::from_json(&o.stdout).unwrap();
    assert_eq!(imported.trips, demo::full_inventory().trips);
}

#[test]
fn import_commutes_contract() {
    let dir = tempfile::tempdir().unwrap();
    let inv = write(dir.path(), "inv.json", demo::BASE_INVENTORY_JSON);
    let csv = write(dir.path(), "c.csv", "ITA,Bus,5,,,,,4,44\nDoc-Post doc,Voiture,10,,,,,9,44\n");
    let o = run(&["import-commutes", s(&inv), s(&csv)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stderr(&o).contains("error: line 2:"));
    assert_eq!(Inventory::from_json(&std::fs::read(&inv).unwrap()).unwrap().commute_responses.len(), 1);

    let csv = write(dir.path(), "bad.csv", "nobody,Bus,5,,,,,4,44\n");
    assert_eq!(code(&run(&["import-commutes", s(&inv), s(&csv)])), 1);
    assert_eq!(code(&run(&["import-commutes", s(&inv), s(&dir.path().join("nope.csv"))])), 2);
}

#[test]
fn compute_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let inv = full_inventory_file(dir.path());
    let out = dir.path().join("out");
    let o = run(&["compute", s(&inv), "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mut names: Vec<String> =
        std::fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(
        names,
        [
            "Cogitamus_2019_pie.svg",
            "Cogitamus_2019_regulatory.csv",
            "Cogitamus_2019_result.json",
            "Cogitamus_2019_synthetic.json",
            "Cogitamus_2019_synthetic.txt",
            "Cogitamus_2019_travel_purpose.svg",
            "Cogitamus_2019_travel_status.svg",
        ]
    );
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("Professional travel"), "{stdout}");
    let csv = std::fs::read_to_string(out.join("Cogitamus_2019_regulatory.csv")).unwrap();
    assert_eq!(csv.lines().count(), 27);
    let result = FootprintResult::from_json(&std::fs::read(out.join("Cogitamus_2019_result.json")).unwrap()).unwrap();
    assert_eq!(result.sources().len(), 5);
}

#[test]
fn compute_french_labels() {
    let dir = tempfile::tempdir().unwrap();
    let inv = full_inventory_file(dir.path());
    let out = dir.path().join("fr");
    let o = run(&["compute", s(&inv), "--out", s(&out), "--locale", "fr"]);
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(out.join("Cogitamus_2019_regulatory.csv")).unwrap();
    assert!(csv.contains("13,Déplacements professionnels,"), "{csv}");
    assert!(String::from_utf8(o.stdout).unwrap().contains("Empreinte carbone des déplacements"));
    assert_eq!(code(&run(&["compute", s(&inv), "--locale", "de"])), 2);
}

#[test]
fn compute_to_stdout_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let inv = full_inventory_file(dir.path());
    let o = run(&["compute", s(&inv)]);
    assert_eq!(code(&o), 0);
    let expected = ges_core::engine::compute_inventory(
        &demo::full_inventory(),
        &ges_core::factors::FactorSet::bundled(),
        &Default::default(),
    )
    .unwrap();
    assert_eq!(o.stdout, expected.to_json_bytes());

    let mut h2 = demo::base_inventory();
    h2.vehicles[0].fuel = ges_core::factors::Fuel::Hydrogen;
    let p = write(dir.path(), "h2.json", &h2.to_json());
    let o = run(&["compute", s(&p)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("fuel=hydrogen, kind=car"), "{}", stderr(&o));

    let mut invalid = demo::base_inventory();
    invalid.buildings[0].occupied_share = 2.0;
    let p = write(dir.path(), "invalid.json", &invalid.to_json());
    let o = run(&["compute", s(&p)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("buildings[0].occupied_share:"));
}

#[test]
fn startup_paths_must_resolve() {
    let dir = tempfile::tempdir().unwrap();
    let inv = full_inventory_file(dir.path());
    let missing = dir.path().join("nope.json");
    assert_eq!(code(&run(&["compute", s(&inv), "--factors", s(&missing)])), 2);
    assert_eq!(code(&run(&["compute", s(&inv), "--gazetteer", s(&missing)])), 2);
    let garbage = write(dir.path(), "garbage.json", "{\"factors\": 3}");
    assert_eq!(code(&run(&["compute", s(&inv), "--factors", s(&garbage)])), 2);
    let rc = write(dir.path(), "rc.json", r#"{"short_max_km": 5000, "medium_max_km": 3500}"#);
    assert_eq!(code(&run(&["compute", s(&inv), "--route-correction", s(&rc)])), 2);
}

#[test]
fn custom_factors_and_route_correction() {
    let dir = tempfile::tempdir().unwrap();
    let inv = full_inventory_file(dir.path());
    let factors = write(dir.path(), "f.json", &ges_core::factors::FactorSet::bundled().to_document());
    let o = run(&["compute", s(&inv), "--factors", s(&factors)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let baseline = run(&["compute", s(&inv)]);
    assert_eq!(o.stdout, baseline.stdout);

    let rc = write(dir.path(), "rc.json", r#"{"short_max_km": 500, "medium_max_km": 1500}"#);
    let o = run(&["compute", s(&inv), "--route-correction", s(&rc)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = FootprintResult::from_json(&o.stdout).unwrap();
    assert_eq!(r.methodology.route_correction.short_max_km, 500.0);
}

#[test]
fn extra_gazetteer_cities() {
    let dir = tempfile::tempdir().unwrap();
    let inv = write(dir.path(), "inv.json", demo::BASE_INVENTORY_JSON);
    let tsv = write(
        dir.path(),
        "t.tsv",
        &format!("{HEADER}1\t12/03/2019\tToulouse\tFR\tNulleville\tFR\tTrain\t\tNON\tVisite\tITA\n"),
    );
    assert_eq!(code(&run(&["import-travel", s(&inv), s(&tsv)])), 1);
    let gaz = write(dir.path(), "g.tsv", "Nulleville\tNulleville\tFR\t45.0\t3.0\t10\n");
    let o = run(&["import-travel", s(&inv), s(&tsv), "--gazetteer", s(&gaz)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

fn free_port() -> u16 {
    TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port()
}

fn health(port: u16) -> Option<String> {
    let mut stream = TcpStream::connect(("127.0.0.1", port)).ok()?;
    stream.set_read_timeout(Some(Duration::from_secs(5))).ok()?;
    stream.write_all(b"GET /api/health HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n").ok()?;
    let mut response = String::new();
    stream.read_to_string(&mut response).ok()?;
    Some(response)
}

#[test]
fn serve_answers_health() {
    let dir = tempfile::tempdir().unwrap();
    let port = free_port();
    let cfg = write(
        dir.path(),
        "cfg.json",
        &format!(r#"{{"port": {port}, "data_dir": {:?}}}"#, s(&dir.path().join("data"))),
    );
    let mut child = ges().args(["serve", "--config", s(&cfg)]).stderr(Stdio::null()).spawn().unwrap();
    let deadline = Instant::now() + Duration::from_secs(20);
    let response = loop {
        if let Some(r) = health(port) {
            break r;
        }
        assert!(Instant::now() < deadline, "service did not start");
        assert!(child.try_wait().unwrap().is_none(), "service exited early");
        std::thread::sleep(Duration::from_millis(50));
    };
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(response.starts_with("HTTP/1.1 200"), "{response}");
    assert!(response.contains("\"status\":\"ok\""));
}

#[test]
fn serve_environment_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"port": "eighty"}"#);
    let o = run(&["serve", "--config", s(&bad)]);
    assert_eq!(code(&o), 2);

    let taken = TcpListener::bind("127.0.0.1:0").unwrap();
    let port = taken.local_addr().unwrap().port();
    let cfg = write(
        dir.path(),
        "cfg.json",
        &format!(r#"{{"port": {port}, "data_dir": {:?}}}"#, s(&dir.path().join("data"))),
    );
    let o = run(&["serve", "--config", s(&cfg)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("cannot listen on"), "{}", stderr(&o));
}
