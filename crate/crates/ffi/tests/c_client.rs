//! Compiles a small C program against the generated header and links it
//! with the static library.

use std::path::{Path, PathBuf};
use std::process::Command;

const CLIENT: &str = r#"
#include <math.h>
#include <stdio.h>
#include "itfs.h"

int main(void) {
    const uint32_t rows[] = {0,0,0, 0,1,1, 1,0,0, 1,1,1, 0,0,0, 1,1,1};
    ItfsDataset *ds = NULL;
    ItfsSelection *sel = NULL;
    if (itfs_dataset_from_dense(rows, 6, 3, 2, &ds) != ITFS_STATUS_OK) return 10;
    if (itfs_select(ds, ITFS_CRITERION_JMI, 2, 0, 1, NAN, &sel) != ITFS_STATUS_OK) return 11;
    for (size_t r = 0; r < itfs_selection_len(sel); r++) {
        uint32_t f;
        double s;
        itfs_selection_get(sel, r, &f, &s);
        printf("%zu %u %.6f\n", r, f, s);
    }
    if (itfs_select(NULL, ITFS_CRITERION_MIM, 1, 0, 1, NAN, &sel) != ITFS_STATUS_NULL_POINTER) return 12;
    printf("%s\n", itfs_last_error_message());
    itfs_selection_free(sel);
    itfs_dataset_free(ds);
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // .../target/<profile>/deps/c_client-<hash>
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("client.c");
    let bin = dir.path().join("client");
    std::fs::write(&src, CLIENT).unwrap();
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let lib = target_dir().join("libitfs_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());

    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler available");
    assert!(status.success(), "C client failed to build");

    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], format!("0 1 {:.6}", std::f64::consts::LN_2));
    assert!(lines[1].starts_with("1 0 "));
    assert_eq!(lines[2], "dataset is null");
}
