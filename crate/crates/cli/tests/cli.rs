use std::path::PathBuf;
use std::process::{Command, Output};

use mwss_cli::{cmd_gen, parse, render};
use mwss_core::oracle::{gen_instance, Model};

fn temp(name: &str, text: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("mwss-cli-{}-{name}", std::process::id()));
    std::fs::write(&p, text).unwrap();
    p
}

fn mwss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mwss")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const C5: &str = "c five-cycle\np mwss 5 5\ne 1 2\ne 2 3\ne 3 4\ne 4 5\ne 1 5\n";
const NET: &str = "p mwss 6 6\nv 4 5\nv 5 5\nv 6 5\ne 1 2\ne 2 3\ne 1 3\ne 1 4\ne 2 5\ne 3 6\n";

#[test]
fn solves_c5_and_net() {
    let p = temp("c5", C5);
    let o = mwss(&["solve", "--certify", p.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("weight 2\n"));
    assert!(stdout(&o).contains("oracle: match"));
    let p = temp("net", NET);
    let o = mwss(&["solve", p.to_str().unwrap()]);
    assert!(stdout(&o).starts_with("weight 15\nset 4 5 6\n"));
}

#[test]
fn claw_exits_with_two_and_witness() {
    let p = temp("claw", "p mwss 4 3\ne 1 2\ne 1 3\ne 1 4\n");
    let o = mwss(&["solve", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("center 1, leaves 2 3 4"));
}

#[test]
fn parse_errors_name_the_line() {
    let p = temp("neg", "p mwss 1 0\nv 1 -3\n");
    let o = mwss(&["solve", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn oracle_on_c5() {
    let p = temp("c5o", C5);
    assert_eq!(stdout(&mwss(&["oracle", p.to_str().unwrap()])), "2\n");
}

#[test]
fn gen_is_deterministic() {
    let a = mwss(&["gen", "--model", "line", "--n", "30", "--seed", "7"]);
    let b = mwss(&["gen", "--model", "line", "--n", "30", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn corpus_instances_certify() {
    for model in Model::ALL {
        for seed in 0..4 {
            let p = temp(&format!("corp-{}-{seed}", model.name()), &cmd_gen(model, 22, seed, 100));
            let o = mwss(&["solve", "--certify", p.to_str().unwrap()]);
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
            assert!(stdout(&o).contains("oracle: match"));
        }
    }
}

#[test]
fn bench_prints_three_rows() {
    let o = mwss(&["bench", "--sizes", "200,400,800", "--model", "line"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "model,n,seed,ms,node_growth,phase_lifts_soft,phase_lifts_free,phase_lifts_s");
    assert_eq!(lines.len(), 4);
    assert!(lines[3].starts_with("line,800,0,"));
}

#[test]
fn decompose_writes_dot() {
    let p = temp("dec", &cmd_gen(Model::Line, 20, 7, 100));
    let text = stdout(&mwss(&["decompose", "--dot", p.to_str().unwrap()]));
    assert!(text.starts_with("graph basic {"));
    assert!(text.contains("label=\"strip\"") && text.contains("style=bold"));
}

#[test]
fn ledger_dump_lists_liftings() {
    let p = temp("led", &cmd_gen(Model::Line, 20, 7, 100));
    let text = stdout(&mwss(&["solve", "--ledger", p.to_str().unwrap()]));
    assert!(text.contains("ledger component 0\nlift 0 Soft w="));
    assert!(text.contains("\n  qbar soft1 "));
}

#[test]
fn round_trip_on_corpus() {
    for model in Model::ALL {
        for seed in 0..20 {
            let g = gen_instance(model, 30, seed, 100);
            let text = render(&g);
            assert_eq!(render(&parse(&text).unwrap()), text);
        }
    }
}
