//! Behavior of the `priced-sort` binary: formats, determinism, exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_priced-sort"))
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("priced-sort-test-{}-{name}", std::process::id()));
    p
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn generate_is_deterministic_and_summarized() {
    let a = tmp("gen-a.txt");
    let b = tmp("gen-b.txt");
    for path in [&a, &b] {
        let out = bin()
            .args(["generate", "--pattern", "alternating", "--n", "8", "--m", "8"])
            .args(["--alpha", "10", "--beta", "10", "--seed", "1", "-o"])
            .arg(path)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", stderr(&out));
        let line = stdout(&out);
        assert!(line.contains("N=16") && line.contains("stripes=16") && line.contains("hamiltonian=15"));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    std::fs::remove_file(a).ok();
    std::fs::remove_file(b).ok();
}

#[test]
fn generate_rejects_inconsistent_stripes_with_exit_2() {
    let out = bin()
        .args(["generate", "--pattern", "stripes", "--n", "4", "--m", "4"])
        .args(["--alpha", "2", "--beta", "2", "--red-lens", "3", "--blue-lens", "4"])
        .args(["-o", "/dev/null"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn run_emits_exact_row_for_a_two_key_inversion() {
    let path = tmp("two.txt");
    std::fs::write(&path, "2 5 7\nR 1\nB 0\n").unwrap();
    let out = bin()
        .args(["run", "--instance"])
        .arg(&path)
        .args(["--algo", "inversion_sort", "--seed", "0", "--header"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "algo,N,n,m,alpha,beta,pattern,seed,total,pivot,search,cert,stripe,hamiltonian,ratio,rounds,height"
    );
    assert_eq!(lines.next().unwrap(), "inversion_sort,2,1,1,5,7,file,0,1,0,1,0,0,1,1.000000,1,1");
    std::fs::remove_file(path).ok();
}

#[test]
fn run_rejects_wrong_regime_with_exit_3() {
    let path = tmp("regime.txt");
    std::fs::write(&path, "2 0.5 7\nR 1\nB 0\n").unwrap();
    let out = bin()
        .args(["run", "--instance"])
        .arg(&path)
        .args(["--algo", "inversion_sort"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    // ... and the cheap-price variant accepts the mirrored regime
    let out = bin()
        .args(["run", "--instance"])
        .arg(&path)
        .args(["--algo", "sort_middle_regime"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    std::fs::remove_file(path).ok();
}

#[test]
fn run_writes_the_round_trace() {
    let gen_path = tmp("trace-inst.txt");
    let trace_path = tmp("trace.log");
    let out = bin()
        .args(["generate", "--pattern", "uniform", "--n", "12", "--m", "12"])
        .args(["--alpha", "3", "--beta", "3", "--seed", "5", "-o"])
        .arg(&gen_path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let out = bin()
        .args(["run", "--instance"])
        .arg(&gen_path)
        .args(["--seed", "9", "--trace"])
        .arg(&trace_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let trace = std::fs::read_to_string(&trace_path).unwrap();
    let rounds: u64 = stdout(&out).trim().split(',').nth(15).unwrap().parse().unwrap();
    assert_eq!(trace.lines().count() as u64, rounds);
    for (i, line) in trace.lines().enumerate() {
        let fields: Vec<u64> = line.split(' ').map(|t| t.parse().unwrap()).collect();
        assert_eq!(fields.len(), 5);
        assert_eq!(fields[0], i as u64 + 1);
        assert!(fields[2] <= fields[1], "unaffected <= active");
    }
    std::fs::remove_file(gen_path).ok();
    std::fs::remove_file(trace_path).ok();
}

#[test]
fn sweep_is_byte_deterministic() {
    let a = tmp("sweep-a.csv");
    let b = tmp("sweep-b.csv");
    for path in [&a, &b] {
        let out = bin()
            .args(["sweep", "--sizes", "16,32", "--prices", "2:2,10:3"])
            .args(["--patterns", "uniform,alternating", "--seeds", "4", "-o"])
            .arg(path)
            .env("PRICED_SORT_THREADS", "3")
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let bytes_a = std::fs::read(&a).unwrap();
    assert_eq!(bytes_a, std::fs::read(&b).unwrap());
    let text = String::from_utf8(bytes_a).unwrap();
    assert!(text.ends_with('\n'));
    assert!(text.lines().last().unwrap().starts_with("# c_hat = "));
    // header + (8 cells x 4 seeds) rows + 8 cell lines + c_hat
    assert_eq!(text.lines().count(), 1 + 32 + 8 + 1);
    std::fs::remove_file(a).ok();
    std::fs::remove_file(b).ok();
}

#[test]
fn sweep_rejects_wrong_regime_cells_with_exit_3() {
    let out = bin()
        .args(["sweep", "--algo", "sort_both_then_merge", "--sizes", "16"])
        .args(["--prices", "2:2", "--seeds", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn sweep_rejects_empty_config_with_exit_2() {
    let out = bin().args(["sweep", "--sizes", "16", "--prices", "2:2", "--seeds", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    let out = bin().args(["sweep", "--prices", "2:2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "missing --sizes is a usage error");
}

#[test]
fn multichromatic_run_and_format_detection() {
    let path = tmp("multi.txt");
    std::fs::write(&path, "5 3 2 3 4\n1 0\n2 1\n3 2\n1 3\n2 4\n").unwrap();
    let out = bin()
        .args(["run", "--instance"])
        .arg(&path)
        .args(["--algo", "multichromatic", "--seed", "3"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("multichromatic,5,0,0,-,-,file,3,"));
    // the bichromatic algorithms refuse the multichromatic format
    let out = bin()
        .args(["run", "--instance"])
        .arg(&path)
        .args(["--algo", "inversion_sort"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    std::fs::remove_file(path).ok();
}

#[test]
fn verify_subsets_and_fault_injection() {
    let out = bin()
        .args(["verify", "--max-n", "4", "--checks", "ledger,backbone"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("runs passed"));

    let out = bin()
        .args(["verify", "--max-n", "5", "--seeds", "4", "--inject-fault"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4), "the injected fault must be caught");
    assert!(stderr(&out).contains("unsound"), "{}", stderr(&out));
}
