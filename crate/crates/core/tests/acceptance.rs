//! One line per acceptance criterion; fails at the end if any criterion failed.

use zgap_core::verify::run_all;

#[test]
fn acceptance() {
    let results = run_all(|r| println!("{}", r.line()));
    let failed: Vec<u32> = results.iter().filter(|r| !r.pass).map(|r| r.id).collect();
    println!("{} of {} criteria passed", results.len() - failed.len(), results.len());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
