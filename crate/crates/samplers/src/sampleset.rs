//! Aggregated sample collections with provenance metadata and a plain-text
//! interchange format.

use std::collections::BTreeMap;

use ising_core::{IsingModel, SpinConfig};

use crate::error::SamplerError;

/// One distinct configuration with its energy and how often it was drawn.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRow {
    pub config: SpinConfig,
    pub energy: f64,
    pub multiplicity: u64,
}

/// Provenance of a sample set.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SampleMeta {
    pub seed: u64,
    /// Human-readable schedule description (single line).
    pub schedule: String,
    /// Spin-reversal mask the model was sampled under, if any (true = the
    /// variable was flipped during sampling; configs are already unflipped).
    pub gauge: Option<Vec<bool>>,
}

/// Samples aggregated by configuration, sorted by (energy, config).
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub rows: Vec<SampleRow>,
    pub meta: SampleMeta,
}

impl SampleSet {
    /// Aggregate raw configurations, computing each distinct one's energy
    /// under `model`. Rows come out sorted by energy, then configuration.
    pub fn from_configs<I>(
        model: &IsingModel<f64>,
        configs: I,
        meta: SampleMeta,
    ) -> Result<Self, SamplerError>
    where
        I: IntoIterator<Item = SpinConfig>,
    {
        Self::from_weighted_configs(model, configs.into_iter().map(|c| (c, 1)), meta)
    }

    /// As [`SampleSet::from_configs`] but with per-configuration counts.
    pub fn from_weighted_configs<I>(
        model: &IsingModel<f64>,
        configs: I,
        meta: SampleMeta,
    ) -> Result<Self, SamplerError>
    where
        I: IntoIterator<Item = (SpinConfig, u64)>,
    {
        let mut counts: BTreeMap<SpinConfig, u64> = BTreeMap::new();
        for (c, mult) in configs {
            if mult == 0 {
                return Err(SamplerError::InvalidParam(
                    "sample multiplicity must be at least 1".into(),
                ));
            }
            if let Some(&s) = c.iter().find(|&&s| s != 1 && s != -1) {
                return Err(SamplerError::InvalidParam(format!(
                    "spin value {s} is not ±1"
                )));
            }
            *counts.entry(c).or_insert(0) += mult;
        }
        let mut rows: Vec<SampleRow> = counts
            .into_iter()
            .map(|(config, multiplicity)| {
                let energy = model.energy(&config)?;
                Ok(SampleRow { config, energy, multiplicity })
            })
            .collect::<Result<_, SamplerError>>()?;
        rows.sort_by(|a, b| {
            a.energy
                .total_cmp(&b.energy)
                .then_with(|| a.config.cmp(&b.config))
        });
        Ok(SampleSet { rows, meta })
    }

    /// Total number of reads represented (sum of multiplicities).
    pub fn total_reads(&self) -> u64 {
        self.rows.iter().map(|r| r.multiplicity).sum()
    }

    /// Lowest energy present, if any samples exist.
    pub fn min_energy(&self) -> Option<f64> {
        self.rows
            .iter()
            .map(|r| r.energy)
            .min_by(f64::total_cmp)
    }

    /// Fraction of reads with energy within `tol` of `target`.
    pub fn fraction_at(&self, target: f64, tol: f64) -> f64 {
        let total = self.total_reads();
        if total == 0 {
            return 0.0;
        }
        let hits: u64 = self
            .rows
            .iter()
            .filter(|r| (r.energy - target).abs() <= tol)
            .map(|r| r.multiplicity)
            .sum();
        hits as f64 / total as f64
    }

    /// Check the stored invariants against a model: every energy equals the
    /// recomputed one bit-for-bit and every multiplicity is positive.
    pub fn validate(&self, model: &IsingModel<f64>) -> Result<(), SamplerError> {
        for (k, r) in self.rows.iter().enumerate() {
            if r.multiplicity == 0 {
                return Err(SamplerError::InvalidParam(format!(
                    "row {k}: multiplicity 0"
                )));
            }
            let e = model.energy(&r.config)?;
            if e.to_bits() != r.energy.to_bits() {
                return Err(SamplerError::InvalidParam(format!(
                    "row {k}: stored energy {} but model gives {e}",
                    r.energy
                )));
            }
        }
        Ok(())
    }

    /// Render as text: `seed`, `schedule`, optional `gauge` header lines,
    /// then one `energy multiplicity spins` line per row ('+' = +1).
    /// Energies use the shortest round-trip float form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("seed {}\n", self.meta.seed));
        out.push_str(&format!("schedule {}\n", self.meta.schedule));
        if let Some(g) = &self.meta.gauge {
            let bits: String = g.iter().map(|&b| if b { '1' } else { '0' }).collect();
            out.push_str(&format!("gauge {bits}\n"));
        }
        for r in &self.rows {
            let spins: String = r
                .config
                .iter()
                .map(|&s| if s == 1 { '+' } else { '-' })
                .collect();
            out.push_str(&format!("{:?} {} {}\n", r.energy, r.multiplicity, spins));
        }
        out
    }

    /// Parse the [`SampleSet::to_text`] format. Energies are taken as
    /// written; run [`SampleSet::validate`] to check them against a model.
    pub fn from_text(s: &str) -> Result<Self, SamplerError> {
        let bad = |line: usize, msg: &str| SamplerError::BadFormat {
            line,
            msg: msg.to_string(),
        };
        let mut lines = s.lines().enumerate();
        let (ln, first) = lines
            .next()
            .ok_or_else(|| bad(1, "empty input"))?;
        let seed: u64 = first
            .strip_prefix("seed ")
            .ok_or_else(|| bad(ln + 1, "expected `seed <n>`"))?
            .trim()
            .parse()
            .map_err(|_| bad(ln + 1, "unparsable seed"))?;
        let (ln, second) = lines
            .next()
            .ok_or_else(|| bad(2, "missing schedule line"))?;
        let schedule = second
            .strip_prefix("schedule")
            .ok_or_else(|| bad(ln + 1, "expected `schedule <text>`"))?
            .trim()
            .to_string();

        let mut gauge = None;
        let mut rows = Vec::new();
        for (idx, line) in lines {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            if let Some(bits) = line.strip_prefix("gauge ") {
                if !rows.is_empty() || gauge.is_some() {
                    return Err(bad(line_no, "gauge line out of place"));
                }
                let mask: Option<Vec<bool>> = bits
                    .trim()
                    .chars()
                    .map(|c| match c {
                        '0' => Some(false),
                        '1' => Some(true),
                        _ => None,
                    })
                    .collect();
                gauge = Some(mask.ok_or_else(|| bad(line_no, "gauge bits must be 0/1"))?);
                continue;
            }
            let mut parts = line.split_whitespace();
            let energy: f64 = parts
                .next()
                .ok_or_else(|| bad(line_no, "missing energy"))?
                .parse()
                .map_err(|_| bad(line_no, "unparsable energy"))?;
            let multiplicity: u64 = parts
                .next()
                .ok_or_else(|| bad(line_no, "missing multiplicity"))?
                .parse()
                .map_err(|_| bad(line_no, "unparsable multiplicity"))?;
            if multiplicity == 0 {
                return Err(bad(line_no, "multiplicity must be at least 1"));
            }
            let spins = parts.next().ok_or_else(|| bad(line_no, "missing spins"))?;
            if parts.next().is_some() {
                return Err(bad(line_no, "trailing fields"));
            }
            let config: Option<SpinConfig> = spins
                .chars()
                .map(|c| match c {
                    '+' => Some(1),
                    '-' => Some(-1),
                    _ => None,
                })
                .collect();
            let config = config.ok_or_else(|| bad(line_no, "spins must be +/-"))?;
            rows.push(SampleRow { config, energy, multiplicity });
        }
        Ok(SampleSet {
            rows,
            meta: SampleMeta { seed, schedule, gauge },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair_model() -> IsingModel<f64> {
        let mut m = IsingModel::new(2);
        m.set_j(0, 1, -1.0).unwrap();
        m
    }

    #[test]
    fn aggregation_counts_and_sorts() {
        let m = pair_model();
        let configs = vec![vec![1, 1], vec![1, -1], vec![1, 1], vec![-1, -1]];
        let s = SampleSet::from_configs(&m, configs, SampleMeta::default()).unwrap();
        assert_eq!(s.rows.len(), 3);
        assert_eq!(s.total_reads(), 4);
        // Ground states first, sorted by config within equal energy.
        assert_eq!(s.rows[0].config, vec![-1, -1]);
        assert_eq!(s.rows[1].config, vec![1, 1]);
        assert_eq!(s.rows[1].multiplicity, 2);
        assert_eq!(s.rows[2].energy, 1.0);
        assert_eq!(s.min_energy(), Some(-1.0));
        assert_eq!(s.fraction_at(-1.0, 0.0), 0.75);
        s.validate(&m).unwrap();
    }

    #[test]
    fn text_round_trip_is_exact() {
        let m = pair_model();
        let meta = SampleMeta {
            seed: 99,
            schedule: "geometric beta 0.1 10 sweeps 1000".into(),
            gauge: Some(vec![true, false]),
        };
        let s = SampleSet::from_configs(&m, vec![vec![1, 1], vec![1, -1]], meta).unwrap();
        let text = s.to_text();
        let back = SampleSet::from_text(&text).unwrap();
        assert_eq!(s, back);
        back.validate(&m).unwrap();
    }

    #[test]
    fn malformed_text_reports_line_numbers() {
        assert!(SampleSet::from_text("").is_err());
        assert!(SampleSet::from_text("seed 1\n").is_err());
        let bad_row = "seed 1\nschedule none\n-1.0 0 ++\n";
        match SampleSet::from_text(bad_row) {
            Err(SamplerError::BadFormat { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected format error, got {other:?}"),
        }
        assert!(SampleSet::from_text("seed 1\nschedule s\n-1 1 +x\n").is_err());
    }

    #[test]
    fn rejects_bad_spins_and_zero_multiplicity() {
        let m = pair_model();
        assert!(
            SampleSet::from_configs(&m, vec![vec![1, 2]], SampleMeta::default()).is_err()
        );
        assert!(SampleSet::from_weighted_configs(
            &m,
            vec![(vec![1, 1], 0)],
            SampleMeta::default()
        )
        .is_err());
    }
}
