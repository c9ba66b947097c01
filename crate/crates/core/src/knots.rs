//! Generalized algebraic knots: formal connected sums of signed pieces, each
//! piece a (2,p)-cable of a (2,q) torus knot.
//!
//! A piece with companion parameter 1 is the cable of the unknot, which is the
//! torus knot `T(2,p)` itself. Every formula downstream handles both cases by
//! the same code path.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::{gcd, is_odd_prime};
use crate::error::{Error, Result};
use crate::poly::LaurentPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    /// The reverse mirror image.
    Minus,
}

impl Sign {
    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flipped(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// The (2, `cable_p`)-cable of `T(2, companion_q)`, possibly mirrored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Piece {
    companion_q: u64,
    cable_p: u64,
    sign: Sign,
}

impl Piece {
    pub fn new(companion_q: u64, cable_p: u64, sign: Sign) -> Result<Self> {
        if companion_q == 0 || companion_q.is_multiple_of(2) {
            return Err(Error::CompanionNotOdd(companion_q));
        }
        if !is_odd_prime(cable_p) {
            return Err(Error::CableNotOddPrime(cable_p));
        }
        if gcd(cable_p, 2 * companion_q) != 1 {
            return Err(Error::CableDividesCompanion { p: cable_p, q: companion_q });
        }
        Ok(Piece { companion_q, cable_p, sign })
    }

    /// The torus knot `T(2,p)`, encoded as the cable of the unknot.
    pub fn torus(p: u64, sign: Sign) -> Result<Self> {
        Piece::new(1, p, sign)
    }

    pub fn companion_q(&self) -> u64 {
        self.companion_q
    }

    pub fn cable_p(&self) -> u64 {
        self.cable_p
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn mirror(&self) -> Piece {
        Piece { sign: self.sign.flipped(), ..*self }
    }

    /// Whether the underlying positive knot is algebraic: `T(2,p)` always is,
    /// and the cable `T(2,q;2,p)` is once `p > 2·2·q`.
    pub fn is_algebraic(&self) -> bool {
        self.companion_q == 1 || self.cable_p > 4 * self.companion_q
    }
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign == Sign::Minus {
            write!(f, "-")?;
        }
        if self.companion_q == 1 {
            write!(f, "T(2,{})", self.cable_p)
        } else {
            write!(f, "T(2,{};2,{})", self.companion_q, self.cable_p)
        }
    }
}

pub fn is_algebraic_piece(piece: &Piece) -> bool {
    piece.is_algebraic()
}

/// A connected sum of pieces, in a fixed order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GAKnot {
    pieces: Vec<Piece>,
}

impl GAKnot {
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::EmptyKnot);
        }
        Ok(GAKnot { pieces })
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Distinct cable primes in order of first appearance.
    pub fn primes(&self) -> Vec<u64> {
        let mut seen = Vec::new();
        for piece in &self.pieces {
            if !seen.contains(&piece.cable_p) {
                seen.push(piece.cable_p);
            }
        }
        seen
    }

    /// Multiplicity of `p` among the cable parameters.
    pub fn rank_at(&self, p: u64) -> usize {
        self.pieces.iter().filter(|piece| piece.cable_p == p).count()
    }

    pub fn mirror(&self) -> GAKnot {
        GAKnot { pieces: self.pieces.iter().map(Piece::mirror).collect() }
    }

    /// Connected sum: the piece lists are concatenated.
    pub fn connect(&self, other: &GAKnot) -> GAKnot {
        let mut pieces = self.pieces.clone();
        pieces.extend_from_slice(&other.pieces);
        GAKnot { pieces }
    }
}

impl fmt::Display for GAKnot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, piece) in self.pieces.iter().enumerate() {
            if i > 0 {
                write!(f, " # ")?;
            }
            write!(f, "{piece}")?;
        }
        Ok(())
    }
}

/// Parameters `(p1, p2, q1, q2, q3)` of the eight-piece family.
pub type FamilyParams = (u64, u64, u64, u64, u64);

/// The eight-piece knot
/// `T(2,q1;2,p1) # -T(2,q2;2,p1) # T(2,p1) # -T(2,q3;2,p1) #
///  T(2,q2;2,p2) # -T(2,p2) # T(2,q3;2,p2) # -T(2,q1;2,p2)`.
pub fn build_family(p1: u64, p2: u64, q1: u64, q2: u64, q3: u64) -> Result<GAKnot> {
    let params = [p1, p2, q1, q2, q3];
    for (i, &x) in params.iter().enumerate() {
        if !is_odd_prime(x) {
            return Err(Error::FamilyNotOddPrime(x));
        }
        if params[..i].contains(&x) {
            return Err(Error::RepeatedPrime(x));
        }
    }
    use Sign::{Minus, Plus};
    let pieces = vec![
        Piece::new(q1, p1, Plus)?,
        Piece::new(q2, p1, Minus)?,
        Piece::torus(p1, Plus)?,
        Piece::new(q3, p1, Minus)?,
        Piece::new(q2, p2, Plus)?,
        Piece::torus(p2, Minus)?,
        Piece::new(q3, p2, Plus)?,
        Piece::new(q1, p2, Minus)?,
    ];
    GAKnot::new(pieces)
}

/// Recovers the family parameters when `knot` is exactly a `build_family` output.
pub fn family_parameters(knot: &GAKnot) -> Option<FamilyParams> {
    let pieces = knot.pieces();
    if pieces.len() != 8 {
        return None;
    }
    let params = (
        pieces[0].cable_p,
        pieces[4].cable_p,
        pieces[0].companion_q,
        pieces[1].companion_q,
        pieces[3].companion_q,
    );
    let rebuilt = build_family(params.0, params.1, params.2, params.3, params.4).ok()?;
    (&rebuilt == knot).then_some(params)
}

/// `Δ_{T(2,m)}(t) = (t^m + 1)/(t + 1)` for odd `m`, and `1` for `m = 1`.
pub fn torus_alexander(m: u64) -> LaurentPoly {
    assert!(m % 2 == 1, "T(2,m) needs odd m");
    LaurentPoly::from_terms((0..m as i64).map(|e| (e, if e % 2 == 0 { 1 } else { -1 })))
}

/// The structured Alexander factors of one piece: `Δ_{T(2,q)}(t²)` (omitted
/// when trivial) and `Δ_{T(2,p)}(t)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AlexanderFactor {
    /// `Δ_{T(2,q)}(t²)`
    Companion(u64),
    /// `Δ_{T(2,p)}(t)`
    Torus(u64),
}

impl AlexanderFactor {
    pub fn polynomial(&self) -> LaurentPoly {
        match *self {
            AlexanderFactor::Companion(q) => torus_alexander(q).substitute_power(2),
            AlexanderFactor::Torus(p) => torus_alexander(p),
        }
    }
}

impl fmt::Display for AlexanderFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlexanderFactor::Companion(q) => write!(f, "D_T(2,{q})(t^2)"),
            AlexanderFactor::Torus(p) => write!(f, "D_T(2,{p})(t)"),
        }
    }
}

pub fn piece_factors(piece: &Piece) -> Vec<AlexanderFactor> {
    let mut out = Vec::with_capacity(2);
    if piece.companion_q > 1 {
        out.push(AlexanderFactor::Companion(piece.companion_q));
    }
    out.push(AlexanderFactor::Torus(piece.cable_p));
    out
}

pub fn alexander_polynomial(knot: &GAKnot) -> LaurentPoly {
    let mut cache: BTreeMap<AlexanderFactor, LaurentPoly> = BTreeMap::new();
    let mut acc = LaurentPoly::one();
    for piece in knot.pieces() {
        for factor in piece_factors(piece) {
            let poly = cache.entry(factor).or_insert_with(|| factor.polynomial());
            acc = acc.mul(poly);
        }
    }
    acc.normalized()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorPair {
    pub factor: AlexanderFactor,
    /// Piece indices contributing the two copies.
    pub pieces: (usize, usize),
}

/// Outcome of the structured Fox-Milnor test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoxMilnorWitness {
    pub holds: bool,
    pub pairs: Vec<FactorPair>,
    pub unpaired: Vec<(AlexanderFactor, usize)>,
}

/// Pairs identical structured factors of `Δ_K`. A complete pairing exhibits
/// `Δ_K ≐ f(t)·f(t⁻¹)`, since every factor is symmetric.
pub fn fox_milnor_check(knot: &GAKnot) -> FoxMilnorWitness {
    let mut open: BTreeMap<AlexanderFactor, Vec<usize>> = BTreeMap::new();
    let mut pairs = Vec::new();
    for (i, piece) in knot.pieces().iter().enumerate() {
        for factor in piece_factors(piece) {
            let waiting = open.entry(factor).or_default();
            match waiting.pop() {
                Some(j) => pairs.push(FactorPair { factor, pieces: (j, i) }),
                None => waiting.push(i),
            }
        }
    }
    let unpaired: Vec<(AlexanderFactor, usize)> = open
        .into_iter()
        .flat_map(|(factor, idx)| idx.into_iter().map(move |i| (factor, i)))
        .collect();
    FoxMilnorWitness { holds: unpaired.is_empty(), pairs, unpaired }
}

fn parse_error(term: &str, reason: impl Into<String>) -> Error {
    Error::Parse { term: term.to_string(), reason: reason.into() }
}

fn parse_u64(term: &str, s: &str) -> Result<u64> {
    s.parse::<u64>().map_err(|_| parse_error(term, format!("`{s}` is not a positive integer")))
}

fn parse_piece(term: &str) -> Result<Piece> {
    let (sign, body) = match term.strip_prefix('-') {
        Some(rest) => (Sign::Minus, rest),
        None => (Sign::Plus, term.strip_prefix('+').unwrap_or(term)),
    };
    let inner = body
        .strip_prefix("T(")
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| parse_error(term, "expected T(2,p) or T(2,q;2,p)"))?;
    let parts: Vec<&str> = inner.split(';').collect();
    let pair = |s: &str| -> Result<(u64, u64)> {
        let (a, b) = s.split_once(',').ok_or_else(|| parse_error(term, "expected a pair `a,b`"))?;
        Ok((parse_u64(term, a)?, parse_u64(term, b)?))
    };
    match parts.as_slice() {
        [torus] => {
            let (two, p) = pair(torus)?;
            if two != 2 {
                return Err(parse_error(term, "only T(2,p) torus knots are supported"));
            }
            Piece::torus(p, sign)
        }
        [torus, cable] => {
            let (two, q) = pair(torus)?;
            let (r, p) = pair(cable)?;
            if two != 2 {
                return Err(parse_error(term, "only T(2,q) companions are supported"));
            }
            if r != 2 {
                return Err(parse_error(term, "only (2,p)-cables are supported"));
            }
            Piece::new(q, p, sign)
        }
        _ => Err(parse_error(term, "too many `;`")),
    }
}

/// Parses `T(2,q;2,p) # -T(2,p) # ...` or `family(p1,p2,q1,q2,q3)`; whitespace is ignored.
impl FromStr for GAKnot {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(args) = compact.strip_prefix("family(").and_then(|r| r.strip_suffix(')')) {
            let nums = args
                .split(',')
                .map(|a| parse_u64(&compact, a))
                .collect::<Result<Vec<_>>>()?;
            let [p1, p2, q1, q2, q3] = nums[..] else {
                return Err(parse_error(&compact, "family needs exactly five parameters"));
            };
            return build_family(p1, p2, q1, q2, q3);
        }
        if compact.is_empty() {
            return Err(Error::EmptyKnot);
        }
        let pieces = compact.split('#').map(parse_piece).collect::<Result<Vec<_>>>()?;
        GAKnot::new(pieces)
    }
}
