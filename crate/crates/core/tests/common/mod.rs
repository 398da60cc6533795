#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use linked_ideals::ideal::{IdealFile, SpanOneIdeal};
use linked_ideals::multisum::{shift_beta, Beta, MultisumProfile};
use linked_ideals::prover::SystemSpec;
use linked_ideals::series::Monomial;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn read(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn ideal(name: &str) -> SpanOneIdeal {
    serde_json::from_str::<IdealFile>(&read(name)).unwrap().into_ideal().unwrap()
}

pub fn profile(name: &str) -> MultisumProfile {
    serde_json::from_str(&read(name)).unwrap()
}

pub fn system(name: &str) -> SystemSpec {
    serde_json::from_str(&read(name)).unwrap()
}

pub const SYSTEMS: [&str; 3] = ["ex1_system.json", "kr_system.json", "ex3_system.json"];

/// Per shifted-β group, the sorted list of `(V_j, column j of U)`. Two
/// systems with equal keys differ only by permuting columns within groups.
pub fn group_key(
    p: &MultisumProfile,
    shift: u32,
    betas: &[Beta],
    u: &[Vec<u8>],
    v: &[Monomial],
) -> BTreeMap<Beta, Vec<(Monomial, Vec<u8>)>> {
    let mut key: BTreeMap<Beta, Vec<(Monomial, Vec<u8>)>> = BTreeMap::new();
    for (j, b) in betas.iter().enumerate() {
        let column = u.iter().map(|row| row[j]).collect();
        key.entry(shift_beta(p, b, shift).unwrap()).or_default().push((v[j], column));
    }
    for cols in key.values_mut() {
        cols.sort();
    }
    key
}
