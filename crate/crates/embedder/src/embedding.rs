//! Embedding container, structural validation, and text interchange.

use std::collections::{BTreeMap, BTreeSet};

use ising_core::SimpleGraph;

use crate::error::EmbedError;

/// Where one constraint lives: its occupied vertex set and which vertex
/// carries each of its variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintPlacement {
    pub location: BTreeSet<u32>,
    pub assignment: BTreeMap<u32, u32>,
}

impl ConstraintPlacement {
    /// Occupied vertices that carry no variable.
    pub fn ancillas(&self) -> BTreeSet<u32> {
        let assigned: BTreeSet<u32> = self.assignment.values().copied().collect();
        self.location.difference(&assigned).copied().collect()
    }
}

/// A complete embedding: a chain per variable and a placement per
/// constraint.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Embedding {
    pub chains: BTreeMap<u32, BTreeSet<u32>>,
    pub placements: Vec<ConstraintPlacement>,
}

impl Embedding {
    /// Total hardware vertices used: chain vertices plus ancillas.
    pub fn qubit_total(&self) -> usize {
        let chain: usize = self.chains.values().map(|c| c.len()).sum();
        let anc: usize = self.placements.iter().map(|p| p.ancillas().len()).sum();
        chain + anc
    }

    pub fn max_chain(&self) -> usize {
        self.chains.values().map(|c| c.len()).max().unwrap_or(0)
    }

    pub fn mean_chain(&self) -> f64 {
        if self.chains.is_empty() {
            return 0.0;
        }
        let total: usize = self.chains.values().map(|c| c.len()).sum();
        total as f64 / self.chains.len() as f64
    }

    /// Serialize as text: one `chain` line per variable and one `place`
    /// line per constraint.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (x, chain) in &self.chains {
            let qs: Vec<String> = chain.iter().map(|q| q.to_string()).collect();
            out.push_str(&format!("chain {}: {}\n", x, qs.join(" ")));
        }
        for (c, p) in self.placements.iter().enumerate() {
            let ls: Vec<String> = p.location.iter().map(|q| q.to_string()).collect();
            let pairs: Vec<String> = p
                .assignment
                .iter()
                .map(|(x, q)| format!("{x}->{q}"))
                .collect();
            out.push_str(&format!("place {}: {} | {}\n", c, ls.join(" "), pairs.join(" ")));
        }
        out
    }

    /// Parse the [`to_text`](Self::to_text) format. Placements must appear
    /// in constraint order; blank lines and `#` comments are skipped.
    pub fn from_text(s: &str) -> Result<Self, EmbedError> {
        let mut emb = Embedding::default();
        let bad = |line_no: usize, msg: &str| EmbedError::BadFormat {
            line_no,
            msg: msg.into(),
        };
        for (idx, raw) in s.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("chain ") {
                let (head, tail) = rest
                    .split_once(':')
                    .ok_or_else(|| bad(line_no, "missing ':'"))?;
                let var: u32 = head
                    .trim()
                    .parse()
                    .map_err(|_| bad(line_no, "bad variable id"))?;
                let mut chain = BTreeSet::new();
                for tok in tail.split_whitespace() {
                    chain.insert(tok.parse().map_err(|_| bad(line_no, "bad vertex id"))?);
                }
                if emb.chains.insert(var, chain).is_some() {
                    return Err(bad(line_no, "duplicate chain line"));
                }
            } else if let Some(rest) = line.strip_prefix("place ") {
                let (head, tail) = rest
                    .split_once(':')
                    .ok_or_else(|| bad(line_no, "missing ':'"))?;
                let c: usize = head
                    .trim()
                    .parse()
                    .map_err(|_| bad(line_no, "bad constraint id"))?;
                if c != emb.placements.len() {
                    return Err(bad(line_no, "placements out of order"));
                }
                let (lpart, vpart) = tail
                    .split_once('|')
                    .ok_or_else(|| bad(line_no, "missing '|'"))?;
                let mut location = BTreeSet::new();
                for tok in lpart.split_whitespace() {
                    location.insert(tok.parse().map_err(|_| bad(line_no, "bad vertex id"))?);
                }
                let mut assignment = BTreeMap::new();
                for tok in vpart.split_whitespace() {
                    let (x, q) = tok
                        .split_once("->")
                        .ok_or_else(|| bad(line_no, "assignment must be var->vertex"))?;
                    assignment.insert(
                        x.parse().map_err(|_| bad(line_no, "bad variable id"))?,
                        q.parse().map_err(|_| bad(line_no, "bad vertex id"))?,
                    );
                }
                emb.placements.push(ConstraintPlacement {
                    location,
                    assignment,
                });
            } else {
                return Err(bad(line_no, "expected 'chain' or 'place'"));
            }
        }
        Ok(emb)
    }
}

/// Structural validation report.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    pub max_chain: usize,
    pub mean_chain: f64,
    pub qubit_total: usize,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check an embedding against the hardware graph and the constraint
/// scopes: chains pairwise disjoint and connected, every constraint's
/// variable carried inside that variable's chain, ancilla blocks disjoint
/// from everything else.
pub fn validate_embedding(
    g: &SimpleGraph,
    scopes: &[Vec<u32>],
    emb: &Embedding,
) -> ValidationReport {
    let mut report = ValidationReport {
        max_chain: emb.max_chain(),
        mean_chain: emb.mean_chain(),
        qubit_total: emb.qubit_total(),
        ..Default::default()
    };
    let n = g.num_vertices();
    let mut seen: BTreeMap<u32, String> = BTreeMap::new();
    for (&x, chain) in &emb.chains {
        if chain.is_empty() {
            report.violations.push(format!("chain {x} is empty"));
            continue;
        }
        for &q in chain {
            if q as usize >= n {
                report
                    .violations
                    .push(format!("chain {x} uses unknown vertex {q}"));
            } else if let Some(owner) = seen.insert(q, format!("chain {x}")) {
                report
                    .violations
                    .push(format!("vertex {q} used by both {owner} and chain {x}"));
            }
        }
        if chain.iter().all(|&q| (q as usize) < n) && !g.is_connected_subset(chain) {
            report
                .violations
                .push(format!("chain {x} does not induce a connected subgraph"));
        }
    }
    if scopes.len() != emb.placements.len() {
        report.violations.push(format!(
            "{} constraint scopes but {} placements",
            scopes.len(),
            emb.placements.len()
        ));
    }
    for (c, p) in emb.placements.iter().enumerate() {
        if let Some(scope) = scopes.get(c) {
            let want: BTreeSet<u32> = scope.iter().copied().collect();
            let got: BTreeSet<u32> = p.assignment.keys().copied().collect();
            if want != got {
                report.violations.push(format!(
                    "constraint {c} assigns variables {got:?}, scope is {want:?}"
                ));
            }
        }
        for (&x, &q) in &p.assignment {
            if !p.location.contains(&q) {
                report.violations.push(format!(
                    "constraint {c} assigns variable {x} to {q}, outside its location"
                ));
            }
            match emb.chains.get(&x) {
                Some(chain) if chain.contains(&q) => {}
                _ => report.violations.push(format!(
                    "constraint {c}: vertex {q} of variable {x} is not in that variable's chain"
                )),
            }
        }
        for q in p.ancillas() {
            if q as usize >= n {
                report
                    .violations
                    .push(format!("constraint {c} uses unknown vertex {q}"));
            } else if let Some(owner) = seen.insert(q, format!("constraint {c}")) {
                report.violations.push(format!(
                    "vertex {q} used by both {owner} and constraint {c}"
                ));
            }
        }
    }
    report
}
