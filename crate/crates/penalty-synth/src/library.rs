//! A cache of synthesized penalty models keyed by a canonical constraint
//! signature, with a text persistence format so models survive across runs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use ising_core::{parse_ising, write_ising, ParameterBounds, SimpleGraph, Tuple};

use crate::{
    synthesize_faulty_penalty, synthesize_penalty, Placement, PenaltyError, PenaltyModel,
};

/// FNV-1a 64-bit hash (stable across platforms and releases).
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Canonical text form of a synthesis request: subgraph certificate (vertex
/// count + sorted edge list + variable placement) plus the level structure
/// and bounds. Equal requests produce byte-equal keys.
pub fn signature_key(
    placement: &Placement,
    levels: &BTreeMap<Tuple, f64>,
    fault_e: Option<f64>,
    bounds: &ParameterBounds,
) -> String {
    let mut s = String::new();
    let g = placement.graph();
    write!(s, "m={};", g.num_vertices()).unwrap();
    write!(s, "edges=").unwrap();
    for (i, (u, v)) in g.edges().enumerate() {
        if i > 0 {
            s.push(',');
        }
        write!(s, "{u}-{v}").unwrap();
    }
    write!(s, ";vars=").unwrap();
    for (i, &v) in placement.var_map().iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        write!(s, "{v}").unwrap();
    }
    write!(s, ";levels=").unwrap();
    for (i, (&t, &l)) in levels.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        write!(s, "{t}:{l}").unwrap();
    }
    match fault_e {
        Some(e) => write!(s, ";e={e}").unwrap(),
        None => write!(s, ";e=-").unwrap(),
    }
    write!(
        s,
        ";bounds={},{},{},{}",
        bounds.h_min, bounds.h_max, bounds.j_min, bounds.j_max
    )
    .unwrap();
    s
}

/// In-memory penalty-model cache with text save/load. Lookups use the FNV
/// signature for speed but always verify the full canonical key, so hash
/// collisions cannot cross-contaminate entries.
#[derive(Debug, Default)]
pub struct PenaltyLibrary {
    entries: BTreeMap<u64, Vec<(String, PenaltyModel)>>,
}

impl PenaltyLibrary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(|v| v.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<&PenaltyModel> {
        let sig = fnv1a(key.as_bytes());
        self.entries
            .get(&sig)?
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, pm)| pm)
    }

    pub fn insert(&mut self, key: String, pm: PenaltyModel) {
        let sig = fnv1a(key.as_bytes());
        let bucket = self.entries.entry(sig).or_default();
        match bucket.iter_mut().find(|(k, _)| *k == key) {
            Some(slot) => slot.1 = pm,
            None => bucket.push((key, pm)),
        }
    }

    /// Cached two-level synthesis.
    pub fn get_or_synthesize(
        &mut self,
        placement: &Placement,
        feasible: &BTreeSet<Tuple>,
        bounds: &ParameterBounds,
    ) -> Result<&PenaltyModel, PenaltyError> {
        let levels: BTreeMap<Tuple, f64> = feasible.iter().map(|&t| (t, 0.0)).collect();
        let key = signature_key(placement, &levels, None, bounds);
        if self.get(&key).is_none() {
            let pm = synthesize_penalty(placement, feasible, bounds)?;
            self.insert(key.clone(), pm);
        }
        Ok(self.get(&key).expect("just inserted"))
    }

    /// Cached three-level synthesis.
    pub fn get_or_synthesize_faulty(
        &mut self,
        placement: &Placement,
        f1: &BTreeSet<Tuple>,
        f2: &BTreeSet<Tuple>,
        e: f64,
        bounds: &ParameterBounds,
    ) -> Result<&PenaltyModel, PenaltyError> {
        let mut levels: BTreeMap<Tuple, f64> = f1.iter().map(|&t| (t, 0.0)).collect();
        for &t in f2 {
            levels.insert(t, e);
        }
        let fault = if f2.is_empty() { None } else { Some(e) };
        let key = signature_key(placement, &levels, fault, bounds);
        if self.get(&key).is_none() {
            let pm = synthesize_faulty_penalty(placement, f1, f2, e, bounds)?;
            self.insert(key.clone(), pm);
        }
        Ok(self.get(&key).expect("just inserted"))
    }

    /// Serialize all entries to a text file (deterministic order).
    pub fn save(&self, path: &Path) -> Result<(), PenaltyError> {
        let mut out = String::new();
        for bucket in self.entries.values() {
            for (key, pm) in bucket {
                writeln!(out, "entry {:016x}", fnv1a(key.as_bytes())).unwrap();
                writeln!(out, "key {key}").unwrap();
                let g = pm.placement.graph();
                write!(out, "graph {}", g.num_vertices()).unwrap();
                for (u, v) in g.edges() {
                    write!(out, " {u}-{v}").unwrap();
                }
                out.push('\n');
                write!(out, "varmap").unwrap();
                for &v in pm.placement.var_map() {
                    write!(out, " {v}").unwrap();
                }
                out.push('\n');
                if let Some(sites) = pm.placement.site_map() {
                    write!(out, "sites").unwrap();
                    for &v in sites {
                        write!(out, " {v}").unwrap();
                    }
                    out.push('\n');
                }
                write!(out, "levels").unwrap();
                for (&s, &lvl) in &pm.levels {
                    write!(out, " {s}:{lvl}").unwrap();
                }
                out.push('\n');
                match pm.fault_level {
                    Some(e) => writeln!(out, "fault {e}").unwrap(),
                    None => writeln!(out, "fault -").unwrap(),
                }
                writeln!(out, "lowratio {}", u8::from(pm.low_ratio)).unwrap();
                writeln!(out, "model").unwrap();
                out.push_str(&write_ising(&pm.model));
                writeln!(out, "endentry").unwrap();
            }
        }
        std::fs::write(path, out).map_err(|source| PenaltyError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    /// Load a library saved by [`PenaltyLibrary::save`]. Every entry is
    /// re-verified exhaustively on load; corrupt or non-certifying entries
    /// are rejected.
    pub fn load(path: &Path) -> Result<Self, PenaltyError> {
        let text = std::fs::read_to_string(path).map_err(|source| PenaltyError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut lib = PenaltyLibrary::new();
        let mut lines = text.lines().peekable();
        let bad = |msg: &str| PenaltyError::Library(msg.to_string());
        while let Some(line) = lines.next() {
            if line.trim().is_empty() {
                continue;
            }
            if !line.starts_with("entry ") {
                return Err(bad(&format!("expected 'entry', got '{line}'")));
            }
            let key = lines
                .next()
                .and_then(|l| l.strip_prefix("key "))
                .ok_or_else(|| bad("missing 'key' line"))?
                .to_string();
            let graph_line = lines
                .next()
                .and_then(|l| l.strip_prefix("graph "))
                .ok_or_else(|| bad("missing 'graph' line"))?;
            let mut parts = graph_line.split_whitespace();
            let m: usize = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| bad("bad vertex count"))?;
            let mut graph = SimpleGraph::new(m);
            for tok in parts {
                let (u, v) = tok
                    .split_once('-')
                    .ok_or_else(|| bad("bad edge token"))?;
                let u: u32 = u.parse().map_err(|_| bad("bad edge endpoint"))?;
                let v: u32 = v.parse().map_err(|_| bad("bad edge endpoint"))?;
                graph.add_edge(u, v)?;
            }
            let varmap_line = lines
                .next()
                .and_then(|l| l.strip_prefix("varmap"))
                .ok_or_else(|| bad("missing 'varmap' line"))?;
            let var_map: Vec<u32> = varmap_line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| bad("bad varmap entry")))
                .collect::<Result<_, _>>()?;
            let mut sites: Option<Vec<u32>> = None;
            if let Some(l) = lines.peek() {
                if let Some(rest) = l.strip_prefix("sites") {
                    sites = Some(
                        rest.split_whitespace()
                            .map(|t| t.parse().map_err(|_| bad("bad site entry")))
                            .collect::<Result<_, _>>()?,
                    );
                    lines.next();
                }
            }
            let levels_line = lines
                .next()
                .and_then(|l| l.strip_prefix("levels"))
                .ok_or_else(|| bad("missing 'levels' line"))?;
            let mut levels: BTreeMap<Tuple, f64> = BTreeMap::new();
            for tok in levels_line.split_whitespace() {
                let (t, l) = tok
                    .split_once(':')
                    .ok_or_else(|| bad("bad level token"))?;
                levels.insert(
                    t.parse().map_err(|_| bad("bad level state"))?,
                    l.parse().map_err(|_| bad("bad level value"))?,
                );
            }
            let fault_line = lines
                .next()
                .and_then(|l| l.strip_prefix("fault "))
                .ok_or_else(|| bad("missing 'fault' line"))?;
            let fault_level: Option<f64> = if fault_line == "-" {
                None
            } else {
                Some(fault_line.parse().map_err(|_| bad("bad fault level"))?)
            };
            let low_ratio = lines
                .next()
                .and_then(|l| l.strip_prefix("lowratio "))
                .and_then(|t| t.parse::<u8>().ok())
                .ok_or_else(|| bad("missing 'lowratio' line"))?
                != 0;
            if lines.next() != Some("model") {
                return Err(bad("missing 'model' line"));
            }
            let mut model_text = String::new();
            loop {
                match lines.next() {
                    Some("endentry") => break,
                    Some(l) => {
                        model_text.push_str(l);
                        model_text.push('\n');
                    }
                    None => return Err(bad("unterminated entry")),
                }
            }
            let model = parse_ising::<f64>(&model_text, "penalty-library")?;
            let mut placement = Placement::new(graph, var_map)?;
            placement.set_site_map(sites)?;
            let feasible: BTreeSet<Tuple> = levels
                .iter()
                .filter(|(_, &l)| l == 0.0)
                .map(|(&t, _)| t)
                .collect();
            let faulty: BTreeSet<Tuple> = levels
                .iter()
                .filter(|(_, &l)| l != 0.0)
                .map(|(&t, _)| t)
                .collect();
            let mut pm =
                PenaltyModel::verified(placement, model, &feasible, &faulty, fault_level)?;
            pm.low_ratio = low_ratio;
            lib.insert(key, pm);
        }
        Ok(lib)
    }
}

