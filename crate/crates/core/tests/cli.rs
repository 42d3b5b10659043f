use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pillai-fib"))
}

#[test]
fn small_window_is_a_config_error() {
    let out = bin().args(["prove", "--nmax", "300"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn short_m_range_is_a_config_error() {
    let out = bin().args(["prove", "--mmax", "100"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bad_precision_env_is_a_config_error() {
    let out = bin()
        .args(["cf", "--depth", "5"])
        .env("PILLAI_PREC", "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn search_prints_the_triple() {
    let out = bin()
        .args(["search", "--nmax", "30", "--mmax", "20"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("-3 = F_2 - 2^2 = F_5 - 2^3 = F_7 - 2^4"), "{s}");
}

#[test]
fn cf_prints_quotients() {
    let out = bin().args(["cf", "--depth", "9"]).output().unwrap();
    assert!(out.status.success());
    let s = String::from_utf8(out.stdout).unwrap();
    let a: Vec<&str> = s
        .lines()
        .take(9)
        .map(|l| l.split('\t').nth(1).unwrap())
        .collect();
    assert_eq!(a, ["0", "1", "2", "3", "1", "2", "3", "2", "4"]);
}

#[test]
fn verify_missing_file_fails() {
    let out = bin()
        .args(["verify", "/nonexistent/report.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
