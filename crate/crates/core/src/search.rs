//! Sweeps over family parameters `(p1, p2, q1, q2, q3)`, running the full
//! obstruction on each candidate.
//!
//! Progress can be recorded in an append-only checkpoint file, one JSON
//! object per completed candidate. A resumed sweep skips recorded candidates
//! and recomputes reports only for the verified ones, so the final list is
//! the same as for an uninterrupted run.

use std::collections::HashMap;
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{is_odd_prime, odd_primes_between};
use crate::error::{Error, Result};
use crate::knots::{build_family, FamilyParams};
use crate::obstruction::{genus_lower_bound, ObstructionReport};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankingKey {
    /// `p1·p2`, then the tuple lexicographically.
    Product,
    /// Largest of the five primes, then the tuple lexicographically.
    MaxPrime,
}

impl fmt::Display for RankingKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RankingKey::Product => "product",
            RankingKey::MaxPrime => "max_prime",
        })
    }
}

impl FromStr for RankingKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "product" | "n" => Ok(RankingKey::Product),
            "max_prime" | "max" => Ok(RankingKey::MaxPrime),
            other => Err(Error::Config(format!("unknown ranking key `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Inclusive range for the cable primes `p1 < p2`.
    pub p_range: (u64, u64),
    /// Inclusive range for the companion primes.
    pub q_range: (u64, u64),
    /// Explicit cable primes; overrides `p_range`.
    #[serde(default)]
    pub p_primes: Option<Vec<u64>>,
    /// Explicit companion primes; overrides `q_range`.
    #[serde(default)]
    pub q_primes: Option<Vec<u64>>,
    /// Demand `p > 4q` for every cable so every piece is algebraic.
    pub require_algebraic: bool,
    pub genus: u64,
    pub ranking: RankingKey,
    /// Stop after this many verified candidates.
    pub limit: Option<usize>,
    /// Candidates processed per batch between checkpoint writes.
    pub batch_size: usize,
    pub max_witnesses: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            p_range: (3, 110),
            q_range: (3, 30),
            p_primes: None,
            q_primes: None,
            require_algebraic: true,
            genus: 1,
            ranking: RankingKey::Product,
            limit: None,
            batch_size: 16,
            max_witnesses: 1,
        }
    }
}

fn parse_prime_list(value: &str) -> Result<Vec<u64>> {
    let list = value
        .split(',')
        .map(|v| v.trim().parse::<u64>().map_err(|_| Error::Config(format!("`{v}` is not an integer"))))
        .collect::<Result<Vec<u64>>>()?;
    if let Some(bad) = list.iter().find(|&&v| !is_odd_prime(v)) {
        return Err(Error::Config(format!("{bad} is not an odd prime")));
    }
    Ok(list)
}

fn parse_range(value: &str) -> Result<(u64, u64)> {
    let bad = || Error::Config(format!("range `{value}` must look like `lo..hi`"));
    let (lo, hi) = value.split_once("..").ok_or_else(bad)?;
    let lo = lo.trim().parse().map_err(|_| bad())?;
    let hi = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
    Ok((lo, hi))
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.p_range.0 > self.p_range.1 || self.q_range.0 > self.q_range.1 {
            return Err(Error::Config("ranges must be nonempty".into()));
        }
        if self.genus < 1 {
            return Err(Error::Config("genus hypothesis must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be positive".into()));
        }
        Ok(())
    }

    /// Applies `key = value` lines on top of `self`. `#` starts a comment.
    ///
    /// Keys: `p_range`, `q_range` (`lo..hi`, inclusive), `p_primes`,
    /// `q_primes` (comma lists overriding the ranges), `require_algebraic`
    /// (`true`/`false`), `genus`, `ranking` (`product`/`max_prime`),
    /// `limit`, `batch_size`, `witnesses`.
    pub fn apply_key_values(mut self, text: &str) -> Result<Self> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let value = value.trim();
            let int = |v: &str| -> Result<u64> {
                v.parse().map_err(|_| Error::Config(format!("line {}: `{v}` is not an integer", lineno + 1)))
            };
            match key.trim() {
                "p_range" => self.p_range = parse_range(value)?,
                "q_range" => self.q_range = parse_range(value)?,
                "p_primes" => self.p_primes = Some(parse_prime_list(value)?),
                "q_primes" => self.q_primes = Some(parse_prime_list(value)?),
                "require_algebraic" => {
                    self.require_algebraic = value
                        .parse()
                        .map_err(|_| Error::Config(format!("line {}: expected true or false", lineno + 1)))?
                }
                "genus" => self.genus = int(value)?,
                "ranking" => self.ranking = value.parse()?,
                "limit" => self.limit = Some(int(value)? as usize),
                "batch_size" => self.batch_size = int(value)? as usize,
                "witnesses" => self.max_witnesses = int(value)? as usize,
                other => return Err(Error::Config(format!("line {}: unknown key `{other}`", lineno + 1))),
            }
        }
        Ok(self)
    }
}

fn rank(key: RankingKey, t: &FamilyParams) -> (u64, FamilyParams) {
    let primary = match key {
        RankingKey::Product => t.0 * t.1,
        RankingKey::MaxPrime => [t.0, t.1, t.2, t.3, t.4].into_iter().max().unwrap(),
    };
    (primary, *t)
}

/// All admissible tuples in ranking order. For each `(p1, p2)` and each set
/// of three companions, each companion takes the `q1` slot once; `q2 < q3`
/// because swapping them only permutes the pieces.
pub fn enumerate_candidates(cfg: &SearchConfig) -> Vec<FamilyParams> {
    let sorted_set = |list: &[u64]| {
        let mut v = list.to_vec();
        v.sort_unstable();
        v.dedup();
        v
    };
    let ps = match &cfg.p_primes {
        Some(list) => sorted_set(list),
        None => odd_primes_between(cfg.p_range.0, cfg.p_range.1),
    };
    let qs = match &cfg.q_primes {
        Some(list) => sorted_set(list),
        None => odd_primes_between(cfg.q_range.0, cfg.q_range.1),
    };
    let mut out = Vec::new();
    for (i, &p1) in ps.iter().enumerate() {
        for &p2 in &ps[i + 1..] {
            let pool: Vec<u64> = qs.iter().copied().filter(|&q| q != p1 && q != p2).collect();
            for a in 0..pool.len() {
                for b in a + 1..pool.len() {
                    for c in b + 1..pool.len() {
                        let set = [pool[a], pool[b], pool[c]];
                        if cfg.require_algebraic && p1 <= 4 * set[2] {
                            continue;
                        }
                        for lead in 0..3 {
                            let rest: Vec<u64> = (0..3).filter(|&j| j != lead).map(|j| set[j]).collect();
                            out.push((p1, p2, set[lead], rest[0], rest[1]));
                        }
                    }
                }
            }
        }
    }
    out.sort_by_key(|t| rank(cfg.ranking, t));
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Verified,
    NotVerified,
    Error,
}

/// One checkpoint line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckpointRecord {
    pub tuple: [u64; 5],
    pub verdict: Verdict,
    /// Smallest per-prime margin at the configured genus hypothesis.
    pub margin: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

fn to_array(t: FamilyParams) -> [u64; 5] {
    [t.0, t.1, t.2, t.3, t.4]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchHit {
    pub tuple: [u64; 5],
    pub report: ObstructionReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub ranking: RankingKey,
    pub candidates: usize,
    pub examined: usize,
    pub hits: Vec<SearchHit>,
    pub failures: Vec<([u64; 5], String)>,
}

fn evaluate(t: FamilyParams, cfg: &SearchConfig) -> (CheckpointRecord, Option<ObstructionReport>) {
    let run = || -> Result<ObstructionReport> {
        let knot = build_family(t.0, t.1, t.2, t.3, t.4)?;
        genus_lower_bound(&knot, cfg.genus, cfg.max_witnesses)
    };
    match run() {
        Ok(report) => {
            let margin = report
                .primes
                .iter()
                .filter(|v| v.genus_hypothesis == cfg.genus)
                .filter_map(|v| v.margin.clone())
                .min();
            let verified = report.certifies_above(cfg.genus);
            let verdict = if verified { Verdict::Verified } else { Verdict::NotVerified };
            let record = CheckpointRecord { tuple: to_array(t), verdict, margin, error: None };
            (record, verified.then_some(report))
        }
        Err(e) => {
            let record = CheckpointRecord { tuple: to_array(t), verdict: Verdict::Error, margin: None, error: Some(e.to_string()) };
            (record, None)
        }
    }
}

/// Reads a checkpoint; a torn final line is ignored.
pub fn read_checkpoint(path: &Path) -> Result<Vec<CheckpointRecord>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let file = File::open(path).map_err(|e| Error::Checkpoint(e.to_string()))?;
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::Checkpoint(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(&line) {
            Ok(rec) => out.push(rec),
            Err(_) => break,
        }
    }
    Ok(out)
}

pub fn search(cfg: &SearchConfig, checkpoint: Option<&Path>) -> Result<SearchOutcome> {
    cfg.validate()?;
    let candidates = enumerate_candidates(cfg);
    let done: HashMap<[u64; 5], CheckpointRecord> = match checkpoint {
        Some(path) => read_checkpoint(path)?.into_iter().map(|r| (r.tuple, r)).collect(),
        None => HashMap::new(),
    };
    let mut writer = match checkpoint {
        Some(path) => Some(
            OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(|e| Error::Checkpoint(e.to_string()))?,
        ),
        None => None,
    };

    let mut outcome = SearchOutcome {
        ranking: cfg.ranking,
        candidates: candidates.len(),
        examined: 0,
        hits: Vec::new(),
        failures: Vec::new(),
    };
    let limit = cfg.limit.unwrap_or(usize::MAX);
    for batch in candidates.chunks(cfg.batch_size) {
        if outcome.hits.len() >= limit {
            break;
        }
        let results: Vec<(FamilyParams, CheckpointRecord, Option<ObstructionReport>, bool)> = batch
            .par_iter()
            .map(|&t| match done.get(&to_array(t)) {
                Some(rec) if rec.verdict == Verdict::Verified => {
                    let (_, report) = evaluate(t, cfg);
                    (t, rec.clone(), report, true)
                }
                Some(rec) => (t, rec.clone(), None, true),
                None => {
                    let (rec, report) = evaluate(t, cfg);
                    (t, rec, report, false)
                }
            })
            .collect();
        for (t, record, report, resumed) in results {
            if outcome.hits.len() >= limit {
                break;
            }
            if let (Some(w), false) = (writer.as_mut(), resumed) {
                let line = serde_json::to_string(&record).expect("record serializes");
                writeln!(w, "{line}").map_err(|e| Error::Checkpoint(e.to_string()))?;
            }
            outcome.examined += 1;
            if let Some(err) = record.error {
                outcome.failures.push((to_array(t), err));
            }
            if let Some(report) = report {
                outcome.hits.push(SearchHit { tuple: to_array(t), report });
            }
        }
        if let Some(w) = writer.as_mut() {
            w.flush().map_err(|e| Error::Checkpoint(e.to_string()))?;
        }
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn narrow(p: (u64, u64), q: (u64, u64)) -> SearchConfig {
        SearchConfig { p_range: p, q_range: q, ..SearchConfig::default() }
    }

    #[test]
    fn reference_tuples_are_candidates() {
        let c = enumerate_candidates(&narrow((83, 103), (11, 17)));
        // {83, 89, 97, 101, 103} gives 10 pairs, one companion set, 3 slot choices.
        assert_eq!(c.len(), 30);
        assert!(c.contains(&(83, 103, 17, 11, 13)));
        assert!(c.contains(&(83, 103, 11, 13, 17)));
        assert!(c.contains(&(83, 103, 13, 11, 17)));
        assert!(c.windows(2).all(|w| w[0].0 * w[0].1 <= w[1].0 * w[1].1));
    }

    #[test]
    fn algebraicity_filter() {
        let cfg = narrow((67, 71), (11, 17));
        assert!(enumerate_candidates(&cfg).is_empty());
        let loose = SearchConfig { require_algebraic: false, ..cfg };
        assert!(!enumerate_candidates(&loose).is_empty());
        assert!(enumerate_candidates(&narrow((83, 103), (20, 22))).is_empty());
    }

    #[test]
    fn key_value_config() {
        let cfg = SearchConfig::default()
            .apply_key_values("p_range = 80..110 # cables\nq_range=3..20\nrequire_algebraic = false\nranking = max_prime\nlimit = 4\n")
            .unwrap();
        assert_eq!(cfg.p_range, (80, 110));
        assert_eq!(cfg.q_range, (3, 20));
        assert!(!cfg.require_algebraic);
        assert_eq!(cfg.ranking, RankingKey::MaxPrime);
        assert_eq!(cfg.limit, Some(4));
        assert!(SearchConfig::default().apply_key_values("bogus = 1").is_err());
        assert!(SearchConfig::default().apply_key_values("genus = 0").unwrap().validate().is_err());
    }

    #[test]
    fn genus_two_never_certified_for_family() {
        let cfg = SearchConfig { genus: 2, ..narrow((83, 103), (11, 17)) };
        let out = search(&cfg, None).unwrap();
        assert_eq!(out.examined, 30);
        assert!(out.hits.is_empty());
    }
}
