//! Four-genus lower bounds from Casson-Gordon invariants.
//!
//! If `K` bounds a locally flat surface of genus `g` in the four-ball, the
//! linking form splits as `β₁ ⊕ β₂` where `β₁` has a presentation of rank
//! `2g` and `β₂` has a metabolizer `L` on which every nonzero `x` satisfies
//!
//! ```text
//! |σ(K, χ_x) + σ_K(-1)| ≤ η(K, χ_x) + 4g + 1.
//! ```
//!
//! When a `p`-primary part has rank `r_p ≥ 2g + 2`, `β₁` cannot absorb all of
//! it, so `L` has a nonzero element there. Every element of `L` is isotropic,
//! so if each nonzero isotropic `x` of the part has a multiple `kx` that breaks
//! the inequality, genus `g` is impossible. The check is invariant under
//! `x ↦ cx`, so one representative per projective class suffices.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::casson_gordon::{build_sigma_tables, SigmaTable};
use crate::error::Result;
use crate::knots::{family_parameters, fox_milnor_check, FoxMilnorWitness, GAKnot};
use crate::linking_form::{primary_parts, Chunk, PrimaryPart, PrimaryVector, ProjectiveIsotropic};
use crate::rational::Rational;
use crate::signatures::{signature_at_minus_one, signature_function_samples};

pub const SCHEMA_VERSION: u32 = 1;

/// Upper bound recorded for knots of the eight-piece family: a genus-two
/// cobordism to the unlink built from ribbon moves. Not computed here.
pub const FAMILY_UPPER_BOUND: u64 = 2;
pub const FAMILY_UPPER_BOUND_SOURCE: &str = "cited: ribbon-move genus-two surface for the family";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub prime: u64,
    pub x: PrimaryVector,
    pub k: u64,
    /// `σ(K, χ_{kx})`.
    pub sigma: Rational,
    pub eta: u64,
    /// `4g + 1`.
    pub threshold: u64,
}

impl Witness {
    /// `|σ + σ_K(-1)| > threshold + η`, exactly.
    pub fn holds(&self, sigma_minus_one: i64) -> bool {
        let lhs = (&self.sigma + &Rational::integer(sigma_minus_one)).abs();
        lhs > Rational::integer((self.threshold + self.eta) as i64)
    }
}

/// `Σ` and `η` of the character `k·x`, with `Σ = p·σ`.
fn scaled_sigma_eta(x: &[u64], k: u64, table: &SigmaTable) -> (i64, u64) {
    let p = table.prime;
    let mut sigma = 0i64;
    let mut eta = 0u64;
    let mut support = 0u64;
    for (col, &xi) in table.columns.iter().zip(x) {
        let a = (k * xi % p) as usize;
        if a != 0 {
            support += 1;
            sigma += col.scaled_sigma[a];
            eta += col.eta[a];
        }
    }
    (sigma, eta + support.saturating_sub(1))
}

/// First `k` in `1..p` for which `k·x` violates the genus-`g` inequality.
pub fn check_point(
    x: &PrimaryVector,
    part: &PrimaryPart,
    table: &SigmaTable,
    g: u64,
    sigma_minus_one: i64,
) -> Option<Witness> {
    assert_eq!(part.prime(), table.prime);
    assert!(!x.is_zero(), "check_point needs a nonzero vector");
    let p = part.prime();
    let threshold = 4 * g + 1;
    for k in 1..p {
        let (s, eta) = scaled_sigma_eta(x.coords(), k, table);
        let lhs = (s + sigma_minus_one * p as i64).unsigned_abs();
        if lhs > p * (threshold + eta) {
            return Some(Witness {
                prime: p,
                x: x.clone(),
                k,
                sigma: Rational::new(s as i128, p as i128),
                eta,
                threshold,
            });
        }
    }
    None
}

/// `max_k (|σ(K,χ_{kx}) + σ_K(-1)| - η(K,χ_{kx}))`, scaled by `p`.
fn scaled_point_margin(x: &[u64], table: &SigmaTable, sigma_minus_one: i64) -> i64 {
    let p = table.prime;
    (1..p)
        .map(|k| {
            let (s, eta) = scaled_sigma_eta(x, k, table);
            (s + sigma_minus_one * p as i64).abs() - (p * eta) as i64
        })
        .max()
        .unwrap_or(i64::MIN)
}

pub fn point_margin(x: &PrimaryVector, table: &SigmaTable, sigma_minus_one: i64) -> Rational {
    Rational::new(scaled_point_margin(x.coords(), table, sigma_minus_one) as i128, table.prime as i128)
}

/// Outcome of the exhaustive check of one primary part at one genus hypothesis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeVerification {
    pub p: u64,
    pub rank: usize,
    pub genus_hypothesis: u64,
    /// Projective isotropic representatives checked.
    pub points: u64,
    pub verified: bool,
    /// Representatives with no violating multiple.
    pub unwitnessed: u64,
    pub first_unwitnessed: Option<PrimaryVector>,
    pub witnesses: Vec<Witness>,
    /// Minimum over points of the best `|σ + σ_K(-1)| - η`; `None` without points.
    pub margin: Option<Rational>,
}

#[derive(Default)]
struct ChunkResult {
    points: u64,
    unwitnessed: u64,
    first_unwitnessed: Option<PrimaryVector>,
    witnesses: Vec<Witness>,
    margin: Option<i64>,
}

fn scan_chunk(
    enumerator: &ProjectiveIsotropic,
    chunk: Chunk,
    table: &SigmaTable,
    g: u64,
    sigma_minus_one: i64,
    max_witnesses: usize,
) -> ChunkResult {
    let part = enumerator.part();
    let mut out = ChunkResult::default();
    for x in enumerator.chunk_vectors(chunk) {
        out.points += 1;
        let margin = scaled_point_margin(x.coords(), table, sigma_minus_one);
        out.margin = Some(out.margin.map_or(margin, |m: i64| m.min(margin)));
        match check_point(&x, part, table, g, sigma_minus_one) {
            Some(w) => {
                if out.witnesses.len() < max_witnesses {
                    out.witnesses.push(w);
                }
            }
            None => {
                out.unwitnessed += 1;
                if out.first_unwitnessed.is_none() {
                    out.first_unwitnessed = Some(x);
                }
            }
        }
    }
    out
}

/// Checks every projective isotropic representative of `part`. Chunks run in
/// parallel and are merged in enumeration order, so the result does not
/// depend on the thread count.
pub fn verify_primary_part_with_table(
    part: &PrimaryPart,
    table: &SigmaTable,
    g: u64,
    sigma_minus_one: i64,
    max_witnesses: usize,
) -> PrimeVerification {
    let enumerator = ProjectiveIsotropic::new(part);
    let results: Vec<ChunkResult> = enumerator
        .chunks()
        .into_par_iter()
        .map(|chunk| scan_chunk(&enumerator, chunk, table, g, sigma_minus_one, max_witnesses))
        .collect();
    let mut merged = ChunkResult::default();
    for r in results {
        merged.points += r.points;
        merged.unwitnessed += r.unwitnessed;
        if merged.first_unwitnessed.is_none() {
            merged.first_unwitnessed = r.first_unwitnessed;
        }
        let room = max_witnesses - merged.witnesses.len();
        merged.witnesses.extend(r.witnesses.into_iter().take(room));
        merged.margin = match (merged.margin, r.margin) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
    }
    let p = part.prime();
    PrimeVerification {
        p,
        rank: part.rank(),
        genus_hypothesis: g,
        points: merged.points,
        verified: merged.points > 0 && merged.unwitnessed == 0,
        unwitnessed: merged.unwitnessed,
        first_unwitnessed: merged.first_unwitnessed,
        witnesses: merged.witnesses,
        margin: merged.margin.map(|m| Rational::new(m as i128, p as i128)),
    }
}

pub fn verify_primary_part(part: &PrimaryPart, knot: &GAKnot, g: u64, max_witnesses: usize) -> Result<PrimeVerification> {
    let table = build_sigma_tables(knot, part.prime())?;
    let s = signature_at_minus_one(knot)?;
    Ok(verify_primary_part_with_table(part, &table, g, s, max_witnesses))
}

/// Parts whose rank leaves at least a 2-dimensional remainder after `β₁`
/// absorbs `2g` generators.
pub fn is_eligible(rank: usize, g: u64) -> bool {
    rank as u64 >= 2 * g + 2
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisResult {
    pub g: u64,
    pub eligible_primes: Vec<u64>,
    pub refuted: bool,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusConclusion {
    pub hypotheses_refuted: Vec<u64>,
    pub lower_bound: u64,
    pub upper_bound: Option<u64>,
    pub upper_bound_source: Option<String>,
    pub statement: String,
}

/// Necessary conditions for algebraic sliceness. A metabolizer of the
/// Seifert form is never constructed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceDiagnostics {
    pub sigma_minus_one: i64,
    pub signature_resolution: u64,
    pub signature_samples: u64,
    pub signature_function_vanishes: bool,
    pub nonzero_samples: Vec<(String, i64)>,
    pub fox_milnor: FoxMilnorWitness,
    pub seifert_metabolizer_checked: bool,
}

pub fn slice_diagnostics(knot: &GAKnot, resolution: u64) -> Result<SliceDiagnostics> {
    let samples = signature_function_samples(knot, resolution)?;
    let nonzero: Vec<(String, i64)> = samples
        .iter()
        .filter(|s| s.signature != 0)
        .take(5)
        .map(|s| (s.omega.to_string(), s.signature))
        .collect();
    Ok(SliceDiagnostics {
        sigma_minus_one: signature_at_minus_one(knot)?,
        signature_resolution: resolution,
        signature_samples: samples.len() as u64,
        signature_function_vanishes: samples.iter().all(|s| s.signature == 0),
        nonzero_samples: nonzero,
        fox_milnor: fox_milnor_check(knot),
        seifert_metabolizer_checked: false,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub schema_version: u32,
    pub knot: String,
    pub sigma_minus_one: i64,
    pub primes: Vec<PrimeVerification>,
    pub hypotheses: Vec<HypothesisResult>,
    pub genus: GenusConclusion,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub diagnostics: Option<SliceDiagnostics>,
}

impl ObstructionReport {
    /// Whether `g₄^top > g` is certified.
    pub fn certifies_above(&self, g: u64) -> bool {
        self.genus.lower_bound > g
    }
}

pub fn genus_lower_bound(knot: &GAKnot, g_max: u64, max_witnesses: usize) -> Result<ObstructionReport> {
    let sigma_minus_one = signature_at_minus_one(knot)?;
    let parts = primary_parts(knot);
    let tables: Vec<SigmaTable> = parts
        .iter()
        .map(|part| build_sigma_tables(knot, part.prime()))
        .collect::<Result<_>>()?;

    let mut primes = Vec::new();
    let mut hypotheses = Vec::new();
    for g in 1..=g_max {
        let eligible: Vec<usize> = (0..parts.len()).filter(|&i| is_eligible(parts[i].rank(), g)).collect();
        let mut all_verified = true;
        for &i in &eligible {
            let v = verify_primary_part_with_table(&parts[i], &tables[i], g, sigma_minus_one, max_witnesses);
            all_verified &= v.verified;
            primes.push(v);
        }
        let eligible_primes: Vec<u64> = eligible.iter().map(|&i| parts[i].prime()).collect();
        let refuted = !eligible.is_empty() && all_verified;
        let reason = if eligible.is_empty() {
            format!("no primary part has rank >= {}; genus {g} is not refutable this way", 2 * g + 2)
        } else if refuted {
            format!(
                "every projective isotropic point of each part of rank >= {} has a multiple with |sigma + sigma(-1)| > {} + eta",
                2 * g + 2,
                4 * g + 1
            )
        } else {
            "some isotropic point has no violating multiple".to_string()
        };
        hypotheses.push(HypothesisResult { g, eligible_primes, refuted, reason });
    }

    let refuted: Vec<u64> = hypotheses.iter().filter(|h| h.refuted).map(|h| h.g).collect();
    let lower_bound = refuted.iter().max().map_or(0, |g| g + 1);
    let (upper_bound, upper_bound_source) = match family_parameters(knot) {
        Some(_) => (Some(FAMILY_UPPER_BOUND), Some(FAMILY_UPPER_BOUND_SOURCE.to_string())),
        None => (None, None),
    };
    let statement = match upper_bound {
        Some(u) if u == lower_bound => format!("g₄^top = g₄ = {u}"),
        Some(u) => format!("{lower_bound} <= g₄^top <= g₄ <= {u}"),
        None => format!("g₄^top >= {lower_bound}"),
    };
    Ok(ObstructionReport {
        schema_version: SCHEMA_VERSION,
        knot: knot.to_string(),
        sigma_minus_one,
        primes,
        hypotheses,
        genus: GenusConclusion { hypotheses_refuted: refuted, lower_bound, upper_bound, upper_bound_source, statement },
        diagnostics: None,
    })
}
