//! Compiles and runs a C program against the generated header and the
//! static library.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "fpga_defrag.h"

int main(void) {
    FdLayout *layout = NULL;
    if (fd_layout_parse("device 10\nmodule M1 1 ll\nmodule M2 5 ll\n", &layout) != FD_STATUS_OK) return 10;
    FdReport *report = NULL;
    if (fd_defrag(layout, FD_STRATEGY_TABU, 0, &report) != FD_STATUS_OK) return 11;
    FdReportSummary s;
    if (fd_report_summary(report, &s) != FD_STATUS_OK) return 12;
    FdLayout *bad = NULL;
    if (fd_layout_parse("device x", &bad) != FD_STATUS_PARSE_ERROR) return 13;
    if (strlen(fd_last_error_message()) == 0) return 14;
    printf("%zu %.2f\n", s.best_max_free, s.best_fitness);
    fd_report_free(report);
    fd_layout_free(layout);
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping");
        return;
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // Integration tests run from target/<profile>/deps.
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libfpga_defrag_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());

    let dir = tempfile::tempdir().unwrap();
    let source = dir.path().join("main.c");
    std::fs::write(&source, PROGRAM).unwrap();
    let exe = dir.path().join("main");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&source)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "6 1.00\n");
}
