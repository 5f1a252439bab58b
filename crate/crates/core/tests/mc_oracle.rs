mod common;

use common::{levelt_grid, mc_check, rank_one_grid};
use rigid_core::Location;

#[test]
fn rank_one_grid_agrees() {
    let locs = [Location::int(0), Location::int(1)];
    let failures: Vec<String> = rank_one_grid().iter().filter_map(|(t, k)| mc_check(t, *k, &locs).err()).collect();
    assert!(failures.is_empty(), "{} failures, first:\n{}", failures.len(), failures[0]);
}

#[test]
fn rank_two_levelt_grid() {
    let locs = [Location::int(0), Location::int(1)];
    let grid = levelt_grid();
    let failures: Vec<String> = grid.iter().filter_map(|(t, k)| mc_check(t, *k, &locs).err()).collect();
    assert!(failures.is_empty(), "{} of {} failures, first:\n{}", failures.len(), grid.len(), failures[0]);
}
