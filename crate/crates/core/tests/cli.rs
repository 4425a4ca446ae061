use std::path::Path;
use std::process::Command;

use gomsfem::cli::read_history;

fn gomsfem(out: &Path, args: &[&str]) -> (Option<i32>, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_gomsfem"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap();
    (o.status.code(), String::from_utf8_lossy(&o.stderr).into_owned())
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let small = ["--gen", "ex3-lo", "--coarse", "4", "--refine", "16"];

    let (code, _) = gomsfem(&dir.path().join("tol"), &[&small[..], &["--tol", "1e30"]].concat());
    assert_eq!(code, Some(0));
    let rows = read_history(&dir.path().join("tol/history.csv")).unwrap();
    assert_eq!(rows.len(), 1);

    let (code, _) = gomsfem(
        &dir.path().join("cap"),
        &[&small[..], &["--tol", "1e-30", "--max-iter", "2"]].concat(),
    );
    assert_eq!(code, Some(2));
    assert_eq!(read_history(&dir.path().join("cap/history.csv")).unwrap().len(), 3);

    let (code, err) = gomsfem(&dir.path().join("bad"), &[&small[..], &["--li", "0"]].concat());
    assert_eq!(code, Some(1));
    assert!(err.starts_with("error:"), "{err}");
}

#[test]
fn field_file_input_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let field = dir.path().join("k.txt");
    let mut text = String::from("16 16\n");
    for cy in 0..16 {
        let row: Vec<&str> = (0..16).map(|cx| if cy == 7 && cx > 1 { "1000" } else { "1" }).collect();
        text += &row.join(" ");
        text.push('\n');
    }
    std::fs::write(&field, text).unwrap();
    let out = dir.path().join("run");
    let (code, err) = gomsfem(
        &out,
        &[
            "--field",
            field.to_str().unwrap(),
            "--coarse",
            "4",
            "--refine",
            "4",
            "--strategy",
            "product",
            "--max-iter",
            "3",
        ],
    );
    assert!(matches!(code, Some(0 | 2)), "{err}");
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["contrast"], 1000.0);
    assert_eq!(summary["fine_free_dofs"], 225);
    assert_eq!(
        std::fs::read_to_string(out.join("permeability.txt"))
            .unwrap()
            .lines()
            .count(),
        17
    );
}
