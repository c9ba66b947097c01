//! Casson-Gordon σ-invariants and nullities of cabled torus knots and their
//! connected sums, in exact arithmetic.
//!
//! For an odd prime `p` and a companion `T(2,q)` with `gcd(p, 2q) = 1`:
//!
//! ```text
//! σ(T(2,q;2,p), χ_a) = -p + 2a(p-a)/p + 2·σ_{T(2,q)}(ξ_p^a)      (a ≠ 0)
//! η(T(2,q;2,p), χ_a) = 2·η_{T(2,q)}(ξ_p^a)
//! ```
//!
//! and both vanish on the trivial character. A mirrored piece contributes the
//! negated σ of its positive counterpart at the same residue; this is the
//! single sign convention of the crate. σ adds over connected sums; η adds
//! with an extra `+1` for every additional nontrivial summand.

use serde::{Deserialize, Serialize};

use crate::arith::{gcd, is_odd_prime};
use crate::error::{Error, Result};
use crate::knots::{GAKnot, Sign};
use crate::rational::Rational;
use crate::signatures::{lt_nullity, lt_signature, RootOfUnity};

/// A character on `H₁(Σ(K))`, one residue per piece (`a_j mod p_j`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Character {
    residues: Vec<u64>,
}

impl Character {
    /// Reduces each residue modulo the cable prime of its piece.
    pub fn new(knot: &GAKnot, residues: &[i64]) -> Result<Self> {
        if residues.len() != knot.len() {
            return Err(Error::CharacterLength { expected: knot.len(), got: residues.len() });
        }
        let residues = knot
            .pieces()
            .iter()
            .zip(residues)
            .map(|(piece, &a)| a.rem_euclid(piece.cable_p() as i64) as u64)
            .collect();
        Ok(Character { residues })
    }

    pub fn trivial(knot: &GAKnot) -> Self {
        Character { residues: vec![0; knot.len()] }
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn is_trivial(&self) -> bool {
        self.residues.iter().all(|&a| a == 0)
    }

    /// Number of pieces on which the character is nontrivial.
    pub fn support_size(&self) -> usize {
        self.residues.iter().filter(|&&a| a != 0).count()
    }

    /// `-χ`.
    pub fn negated(&self, knot: &GAKnot) -> Self {
        let residues = knot
            .pieces()
            .iter()
            .zip(&self.residues)
            .map(|(piece, &a)| (piece.cable_p() - a) % piece.cable_p())
            .collect();
        Character { residues }
    }

    /// `χ₁ ⊕ χ₂` on the connected sum of the two knots.
    pub fn direct_sum(&self, other: &Character) -> Self {
        let mut residues = self.residues.clone();
        residues.extend_from_slice(&other.residues);
        Character { residues }
    }

    fn check(&self, knot: &GAKnot) -> Result<()> {
        if self.residues.len() != knot.len() {
            return Err(Error::CharacterLength { expected: knot.len(), got: self.residues.len() });
        }
        Ok(())
    }
}

fn check_residue(a: u64, p: u64) -> Result<()> {
    if a >= p {
        return Err(Error::ResidueOutOfRange { residue: a, modulus: p });
    }
    Ok(())
}

fn check_cable(qc: u64, p: u64, a: u64) -> Result<()> {
    if !is_odd_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    if qc == 0 || qc.is_multiple_of(2) {
        return Err(Error::CompanionNotOdd(qc));
    }
    check_residue(a, p)?;
    if gcd(p, 2 * qc) != 1 {
        return Err(Error::GcdViolation { q: qc, order: p });
    }
    Ok(())
}

/// `σ(T(2,q), χ_a) = -q + 2a(q-a)/q`, and `0` at `a = 0`.
pub fn sigma_torus(q: u64, a: u64) -> Result<Rational> {
    if !is_odd_prime(q) {
        return Err(Error::NotOddPrime(q));
    }
    check_residue(a, q)?;
    if a == 0 {
        return Ok(Rational::ZERO);
    }
    let (q, a) = (q as i128, a as i128);
    Ok(Rational::new(-q * q + 2 * a * (q - a), q))
}

/// σ of the (2,p)-cable of `T(2,qc)` at `χ_a`.
pub fn sigma_cable(qc: u64, p: u64, a: u64) -> Result<Rational> {
    check_cable(qc, p, a)?;
    if a == 0 {
        return Ok(Rational::ZERO);
    }
    let (pp, aa) = (p as i128, a as i128);
    let torus_part = Rational::new(-pp * pp + 2 * aa * (pp - aa), pp);
    let correction = 2 * lt_signature(qc, RootOfUnity::new(a as i64, p))?;
    Ok(&torus_part + &Rational::integer(correction))
}

/// η of the (2,p)-cable of `T(2,qc)` at `χ_a`.
pub fn eta_cable(qc: u64, p: u64, a: u64) -> Result<u64> {
    check_cable(qc, p, a)?;
    if a == 0 {
        return Ok(0);
    }
    Ok(2 * lt_nullity(qc, RootOfUnity::new(a as i64, p))?)
}

pub fn sigma_knot(knot: &GAKnot, chi: &Character) -> Result<Rational> {
    chi.check(knot)?;
    let mut total = Rational::ZERO;
    for (piece, &a) in knot.pieces().iter().zip(chi.residues()) {
        let s = sigma_cable(piece.companion_q(), piece.cable_p(), a)?;
        total = match piece.sign() {
            Sign::Plus => &total + &s,
            Sign::Minus => &total - &s,
        };
    }
    Ok(total)
}

/// Counts one extra for every nontrivial summand past the first, per piece.
///
/// For a character supported on several primes this per-piece count can
/// differ from a count over cyclic `Z_N` coordinates, which pair pieces of
/// different primes; the two agree on characters supported in one primary part.
pub fn eta_knot(knot: &GAKnot, chi: &Character) -> Result<u64> {
    chi.check(knot)?;
    let support = chi.support_size() as u64;
    if support == 0 {
        return Ok(0);
    }
    let mut total = support - 1;
    for (piece, &a) in knot.pieces().iter().zip(chi.residues()) {
        total += eta_cable(piece.companion_q(), piece.cable_p(), a)?;
    }
    Ok(total)
}

/// Signed σ and η contributions of one piece, indexed by residue.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaColumn {
    pub piece_index: usize,
    pub sign: Sign,
    pub companion_q: u64,
    pub sigma: Vec<Rational>,
    /// `p · sigma[a]`, an integer because every denominator divides `p`.
    pub scaled_sigma: Vec<i64>,
    pub eta: Vec<u64>,
}

/// Per-prime lookup tables for every piece cabled with that prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaTable {
    pub prime: u64,
    pub columns: Vec<SigmaColumn>,
}

impl SigmaTable {
    pub fn column(&self, piece_index: usize) -> Option<&SigmaColumn> {
        self.columns.iter().find(|c| c.piece_index == piece_index)
    }
}

pub fn build_sigma_tables(knot: &GAKnot, p: u64) -> Result<SigmaTable> {
    if !knot.pieces().iter().any(|piece| piece.cable_p() == p) {
        return Err(Error::PrimeNotPresent(p));
    }
    let mut columns = Vec::new();
    for (index, piece) in knot.pieces().iter().enumerate() {
        if piece.cable_p() != p {
            continue;
        }
        let len = p as usize;
        let mut sigma = vec![Rational::ZERO; len];
        let mut eta = vec![0u64; len];
        // Conjugation symmetry: entry a equals entry p-a.
        for a in 1..=len / 2 {
            let mut s = sigma_cable(piece.companion_q(), p, a as u64)?;
            if piece.sign() == Sign::Minus {
                s = -s;
            }
            let e = eta_cable(piece.companion_q(), p, a as u64)?;
            sigma[len - a] = s.clone();
            sigma[a] = s;
            eta[a] = e;
            eta[len - a] = e;
        }
        let scaled_sigma = sigma
            .iter()
            .map(|s| {
                let scaled = s.scale(p as i64);
                match scaled {
                    Rational::Small { num, den: 1 } => num,
                    _ => unreachable!("σ denominators divide p"),
                }
            })
            .collect();
        columns.push(SigmaColumn {
            piece_index: index,
            sign: piece.sign(),
            companion_q: piece.companion_q(),
            sigma,
            scaled_sigma,
            eta,
        });
    }
    Ok(SigmaTable { prime: p, columns })
}
