#![allow(dead_code)]

pub mod minimal;
pub mod periodic;

use conway_core::{parse_pd, LinkDiagram};

pub struct KnotRecord {
    pub name: String,
    pub crossings: usize,
    pub determinant: u64,
    pub conway: String,
    pub pd: String,
}

pub fn knots() -> Vec<KnotRecord> {
    include_str!("../data/knots.tsv")
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            KnotRecord {
                name: f[0].to_string(),
                crossings: f[1].parse().unwrap(),
                determinant: f[2].parse().unwrap(),
                conway: f[3].to_string(),
                pd: f[4].to_string(),
            }
        })
        .collect()
}

pub fn knot(name: &str) -> LinkDiagram {
    let r = knots()
        .into_iter()
        .find(|k| k.name == name)
        .unwrap_or_else(|| panic!("{name} not in corpus"));
    parse_pd(&r.pd).unwrap()
}

/// Alternating corpus diagrams with at most `max` crossings.
pub fn corpus(max: usize) -> Vec<(String, LinkDiagram)> {
    knots()
        .into_iter()
        .filter(|k| k.crossings <= max)
        .map(|k| (k.name.clone(), parse_pd(&k.pd).unwrap()))
        .collect()
}
