use polyform::catalog::{matrix_of, parse_name};
use polyform::cli::{run, to_file_text};
use polyform::schema::SchemaId;
use polyform::transform_engine::random_scramble;

fn run_args(args: &[&str]) -> (i32, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("polyform").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap() + &String::from_utf8(err).unwrap())
}

struct TempDir(std::path::PathBuf);

impl TempDir {
    fn new(tag: &str) -> Self {
        let p = std::env::temp_dir().join(format!("polyform-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&p).unwrap();
        TempDir(p)
    }

    fn write(&self, name: &str, text: &str) -> String {
        let p = self.0.join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    }
}

impl Drop for TempDir {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

#[test]
fn scrambled_copy_is_isomorphic() {
    let dir = TempDir::new("iso");
    let m = matrix_of(&parse_name("X(eta 3 eta)^1_2", SchemaId::APRIME).unwrap()).unwrap();
    let m = m.direct_sum(&matrix_of(&parse_name("X(7)", SchemaId::APRIME).unwrap()).unwrap()).unwrap();
    let (s, _) = random_scramble(&m, 17, 40);
    let a = dir.write("a.json", &to_file_text(&m));
    let b = dir.write("b.json", &to_file_text(&s));
    let (code, out) = run_args(&["isomorphic", &a, &b]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("isomorphic: true"), "{out}");
}

#[test]
fn decompose_writes_a_replayable_certificate() {
    let dir = TempDir::new("cert");
    let m = matrix_of(&parse_name("X(5)", SchemaId::APRIME).unwrap()).unwrap();
    let (s, _) = random_scramble(&m, 4, 20);
    let file = dir.write("x.json", &to_file_text(&s));
    let cert = dir.0.join("x.log");
    let (code, out) = run_args(&["decompose", &file, "--certificate", cert.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("schema Aprime caps r=0 s=0\nX(5)\n"), "{out}");
    let log: polyform::transform_engine::MoveLog = std::fs::read_to_string(&cert).unwrap().parse().unwrap();
    assert_eq!(polyform::transform_engine::apply_log(&s, &log).unwrap(), m);
}

#[test]
fn strict_mode_rejects_unreduced_entries() {
    let dir = TempDir::new("strict");
    let text = r#"{"schema":"Aprime","rows":[["S_n",1]],"cols":[["S_n3",1]],"blocks":{"S_n/S_n3":[[-19]]}}"#;
    let f = dir.write("m.json", text);
    let (code, out) = run_args(&["decompose", &f]);
    assert_eq!(code, 0);
    assert!(out.contains("warning") && out.contains("X(5)"), "{out}");
    assert_eq!(run_args(&["--strict", "decompose", &f]).0, 1);
}

#[test]
fn crt_reports_both_parts() {
    let dir = TempDir::new("crt");
    let m = matrix_of(&parse_name("X(5)", SchemaId::APRIME).unwrap()).unwrap();
    let f = dir.write("m.json", &to_file_text(&m));
    let (code, out) = run_args(&["crt", &f]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("2-part (Aprime2+)") && out.contains("3-part (Aprime3+)") && out.contains("merged: X(5)"), "{out}");
}

#[test]
fn cw_and_homology_render() {
    let (code, out) = run_args(&["cw", "X(eta 3 eta)^1_1", "--n", "6"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("∪_{") && out.contains("e^{n+4}") && out.contains("i_{1}"), "{out}");
    let (code, out) = run_args(&["homology", "X(1)", "--n", "6"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("H_6 = Z") && out.contains("H_10 = Z"), "{out}");
}

#[test]
fn catalog_listing_is_self_describing() {
    let (code, out) = run_args(&["catalog", "--schema", "Aprime3", "--plus", "--rcap", "1", "--scap", "1"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("schema Aprime3+ caps r=1 s=1\nentries "), "{out}");
    assert_eq!(out, run_args(&["catalog", "--schema", "Aprime3", "--plus", "--rcap", "1", "--scap", "1"]).1);
}

#[test]
fn bad_profile_is_a_usage_error() {
    assert_eq!(run_args(&["orbit-check", "--profile", "nonsense", "--schema", "Aprime"]).0, 2);
    assert_eq!(run_args(&["orbit-check", "--profile", "S_n:3 x S_n3:3", "--schema", "Aprime", "--bound", "1000"]).0, 1);
}
