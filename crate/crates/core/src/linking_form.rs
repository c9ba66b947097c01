//! The linking form of the double branched cover, restricted to one primary part.
//!
//! Each piece cabled with the prime `p` contributes a `Z_p` summand on which
//! the form is `±1/p`, the sign being the piece's sign. The `p`-primary part
//! is therefore `F_p^r` with the diagonal quadratic form `Q(x) = Σ εᵢ xᵢ²`.

use serde::{Deserialize, Serialize};

use crate::casson_gordon::Character;
use crate::error::{Error, Result};
use crate::knots::GAKnot;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimaryPart {
    prime: u64,
    piece_indices: Vec<usize>,
    signs: Vec<i64>,
}

impl PrimaryPart {
    /// A part with explicit signs, not tied to any knot. Piece indices are `0..r`.
    pub fn with_signs(prime: u64, signs: &[i64]) -> Self {
        assert!(signs.iter().all(|s| s.abs() == 1));
        PrimaryPart { prime, piece_indices: (0..signs.len()).collect(), signs: signs.to_vec() }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn rank(&self) -> usize {
        self.signs.len()
    }

    pub fn piece_indices(&self) -> &[usize] {
        &self.piece_indices
    }

    pub fn signs(&self) -> &[i64] {
        &self.signs
    }

    /// `Q(x) = Σ εᵢ xᵢ² mod p`.
    pub fn quadratic_form(&self, x: &[u64]) -> u64 {
        let p = self.prime as i128;
        let sum: i128 = self
            .signs
            .iter()
            .zip(x)
            .map(|(&e, &xi)| e as i128 * (xi as i128 * xi as i128 % p))
            .sum();
        sum.rem_euclid(p) as u64
    }

    /// Places `x` on this part's pieces, zero elsewhere.
    pub fn character(&self, knot: &GAKnot, x: &PrimaryVector) -> Result<Character> {
        let mut residues = vec![0i64; knot.len()];
        for (&piece, &xi) in self.piece_indices.iter().zip(x.coords()) {
            residues[piece] = xi as i64;
        }
        Character::new(knot, &residues)
    }
}

/// A vector of `F_p^r`, coordinates reduced mod `p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PrimaryVector(Vec<u64>);

impl PrimaryVector {
    pub fn new(coords: &[i64], p: u64) -> Self {
        PrimaryVector(coords.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect())
    }

    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn scaled(&self, k: u64, p: u64) -> Self {
        PrimaryVector(self.0.iter().map(|&c| c * k % p).collect())
    }
}

/// One part per distinct cable prime, in order of first appearance.
pub fn primary_parts(knot: &GAKnot) -> Vec<PrimaryPart> {
    knot.primes()
        .into_iter()
        .map(|p| {
            let (piece_indices, signs) = knot
                .pieces()
                .iter()
                .enumerate()
                .filter(|(_, piece)| piece.cable_p() == p)
                .map(|(i, piece)| (i, piece.sign().as_i64()))
                .unzip();
            PrimaryPart { prime: p, piece_indices, signs }
        })
        .collect()
}

pub fn is_isotropic(x: &PrimaryVector, part: &PrimaryPart) -> Result<bool> {
    if x.coords().len() != part.rank() {
        return Err(Error::DimensionMismatch { expected: part.rank(), got: x.coords().len() });
    }
    Ok(part.quadratic_form(x.coords()) == 0)
}

/// Square roots mod `p`: `roots[v]` lists the `x < p` with `x² ≡ v`, ascending.
fn square_root_table(p: u64) -> Vec<Vec<u64>> {
    let mut roots = vec![Vec::new(); p as usize];
    for x in 0..p {
        roots[(x * x % p) as usize].push(x);
    }
    roots
}

/// A slice of the projective enumeration: all normalized representatives
/// whose leading `1` sits at `lead` and, when there is one, whose first free
/// coordinate equals `first_free`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Chunk {
    pub lead: usize,
    pub first_free: Option<u64>,
}

/// Enumerates one representative per projective class of nonzero isotropic
/// vectors, with the first nonzero coordinate normalized to `1`.
///
/// The free coordinates are iterated and the last one is solved from a table
/// of square roots, so a part of rank `r` costs `O(p^(r-2))` per leading
/// position. Output is lexicographic.
#[derive(Clone, Debug)]
pub struct ProjectiveIsotropic {
    part: PrimaryPart,
    roots: Vec<Vec<u64>>,
}

impl ProjectiveIsotropic {
    pub fn new(part: &PrimaryPart) -> Self {
        ProjectiveIsotropic { part: part.clone(), roots: square_root_table(part.prime) }
    }

    pub fn part(&self) -> &PrimaryPart {
        &self.part
    }

    /// Chunks in lexicographic order of their contents.
    pub fn chunks(&self) -> Vec<Chunk> {
        let r = self.part.rank();
        if r < 2 {
            return Vec::new();
        }
        let mut out = Vec::new();
        // A larger `lead` means more leading zeros, hence lexicographically first.
        // `lead = r-1` would leave Q(x) = ε ≠ 0.
        for lead in (0..r - 1).rev() {
            if lead + 1 < r - 1 {
                out.extend((0..self.part.prime).map(|v| Chunk { lead, first_free: Some(v) }));
            } else {
                out.push(Chunk { lead, first_free: None });
            }
        }
        out
    }

    pub fn chunk_vectors(&self, chunk: Chunk) -> Vec<PrimaryVector> {
        let p = self.part.prime;
        let r = self.part.rank();
        let signs = self.part.signs();
        let last = r - 1;
        let free_start = chunk.lead + 1;
        let mut coords = vec![0u64; r];
        coords[chunk.lead] = 1;
        // Odometer over coordinates free_start..last, the first of them pinned by the chunk.
        let pinned = chunk.first_free.map(|_| free_start);
        if let (Some(i), Some(v)) = (pinned, chunk.first_free) {
            coords[i] = v;
        }
        let odometer_start = if pinned.is_some() { free_start + 1 } else { free_start };
        let mut out = Vec::new();
        loop {
            // Solve ε_last · x_last² ≡ -Σ_{i<last} εᵢ xᵢ².
            let partial = self.part.quadratic_form(&coords[..last]) as i64;
            let target = (-partial * signs[last]).rem_euclid(p as i64) as usize;
            for &root in &self.roots[target] {
                coords[last] = root;
                out.push(PrimaryVector(coords.clone()));
            }
            coords[last] = 0;
            let mut i = last;
            loop {
                if i == odometer_start {
                    return out;
                }
                i -= 1;
                coords[i] += 1;
                if coords[i] < p {
                    break;
                }
                coords[i] = 0;
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = PrimaryVector> + '_ {
        self.chunks().into_iter().flat_map(move |c| self.chunk_vectors(c))
    }
}

pub fn enumerate_projective_isotropic(part: &PrimaryPart) -> Vec<PrimaryVector> {
    ProjectiveIsotropic::new(part).iter().collect()
}
