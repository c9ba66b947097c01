//! Levine-Tristram signatures and nullities of `T(2,q)` at roots of unity.
//!
//! The form `H(ω) = (1-ω)V + (1-ω̄)Vᵀ` built from the bidiagonal Seifert
//! matrix is hermitian tridiagonal. Signatures are counted from its
//! eigenvalues in double precision; an eigenvalue too close to zero sends the
//! evaluation down an exact route based on the signs of the leading principal
//! minors, which have a closed form for this matrix family.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::atomic::{AtomicI32, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::gcd;
use crate::error::{Error, Result};
use crate::knots::{GAKnot, Piece};

static TOLERANCE_EXPONENT: AtomicI32 = AtomicI32::new(8);

/// Eigenvalues smaller than `10^-e · max(1, ‖H‖∞)` are not sign-counted.
pub fn tolerance_exponent() -> i32 {
    TOLERANCE_EXPONENT.load(Ordering::Relaxed)
}

pub fn set_tolerance_exponent(e: i32) {
    TOLERANCE_EXPONENT.store(e, Ordering::Relaxed);
}

/// `exp(2πi · num/den)`, stored as a reduced fraction in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RootOfUnity {
    num: u64,
    den: u64,
}

impl RootOfUnity {
    /// `ξ_m^a`. Panics when `m == 0`.
    pub fn new(a: i64, m: u64) -> Self {
        assert!(m > 0, "root of unity of order 0");
        let num = a.rem_euclid(m as i64) as u64;
        let g = gcd(num, m);
        if num == 0 {
            return RootOfUnity { num: 0, den: 1 };
        }
        RootOfUnity { num: num / g, den: m / g }
    }

    pub fn minus_one() -> Self {
        RootOfUnity { num: 1, den: 2 }
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    /// Multiplicative order.
    pub fn order(&self) -> u64 {
        self.den
    }

    pub fn is_one(&self) -> bool {
        self.num == 0
    }

    pub fn squared(&self) -> Self {
        RootOfUnity::new(2 * self.num as i64, self.den)
    }

    pub fn conj(&self) -> Self {
        RootOfUnity::new(-(self.num as i64), self.den)
    }

    /// Argument in `[0, 2π)`.
    pub fn angle(&self) -> f64 {
        2.0 * PI * self.num as f64 / self.den as f64
    }

    /// Whether this is a root of `Δ_{T(2,m)}(t) = (t^m+1)/(t+1)`, i.e. `ω^m = -1` and `ω ≠ -1`.
    pub fn is_torus_alexander_root(&self, m: u64) -> bool {
        let minus_one = 2 * ((self.num as u128 * m as u128) % self.den as u128) == self.den as u128;
        minus_one && *self != RootOfUnity::minus_one()
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "xi_{}^{}", self.den, self.num)
    }
}

/// The `(q-1)×(q-1)` Seifert matrix of `T(2,q)`: `-1` on the diagonal, `1` just above it.
pub fn seifert_matrix_t2(q: u64) -> Result<Vec<Vec<i64>>> {
    if q < 3 || q.is_multiple_of(2) {
        return Err(Error::BadTorusParameter(q));
    }
    let n = (q - 1) as usize;
    let mut v = vec![vec![0i64; n]; n];
    for i in 0..n {
        v[i][i] = -1;
        if i + 1 < n {
            v[i][i + 1] = 1;
        }
    }
    Ok(v)
}

/// Hermitian tridiagonal matrix with real diagonal and complex superdiagonal
/// (the subdiagonal is its conjugate).
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianTridiagonal {
    diagonal: Vec<f64>,
    /// `(re, im)` of entry `(i, i+1)`.
    superdiagonal: Vec<(f64, f64)>,
}

impl HermitianTridiagonal {
    /// `(1-ω)V + (1-ω̄)Vᵀ` for the Seifert matrix of `T(2,q)`.
    pub fn torus_form(q: u64, omega: RootOfUnity) -> Self {
        let n = q.saturating_sub(1) as usize;
        let theta = omega.angle();
        let (c, s) = (theta.cos(), theta.sin());
        // V contributes -1 twice on the diagonal, (1-ω) above it.
        let diagonal = vec![-2.0 * (1.0 - c); n];
        let superdiagonal = vec![(1.0 - c, -s); n.saturating_sub(1)];
        HermitianTridiagonal { diagonal, superdiagonal }
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn superdiagonal(&self) -> &[(f64, f64)] {
        &self.superdiagonal
    }

    pub fn inf_norm(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut row = self.diagonal[i].abs();
                if i > 0 {
                    row += self.superdiagonal[i - 1].0.hypot(self.superdiagonal[i - 1].1);
                }
                if i + 1 < n {
                    row += self.superdiagonal[i].0.hypot(self.superdiagonal[i].1);
                }
                row
            })
            .fold(0.0, f64::max)
    }

    /// Eigenvalues, via the unitarily similar real symmetric matrix whose
    /// off-diagonal entries are the moduli. `None` if QL iteration stalls.
    pub fn eigenvalues(&self) -> Option<Vec<f64>> {
        let mut d = self.diagonal.clone();
        let mut e: Vec<f64> = self.superdiagonal.iter().map(|(re, im)| re.hypot(*im)).collect();
        e.push(0.0);
        symmetric_tridiagonal_eigenvalues(&mut d, &mut e).then_some(d)
    }
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.
/// `d` holds the diagonal and is overwritten with the eigenvalues; `e[i]`
/// couples rows `i` and `i+1` and `e[n-1]` is scratch.
fn symmetric_tridiagonal_eigenvalues(d: &mut [f64], e: &mut [f64]) -> bool {
    let n = d.len();
    if n == 0 {
        return true;
    }
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 60 {
                return false;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    true
}

/// Counts of positive, negative and zero eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Inertia {
    pub fn signature(&self) -> i64 {
        self.positive as i64 - self.negative as i64
    }
}

/// Exact inertia of `H(ω)` for `T(2,q)`, `ω ≠ 1`.
///
/// With `c = |1-ω|²` the leading minors obey `D_k = -c·D_{k-1} - c·D_{k-2}`,
/// which solves to `D_k = (-1)^k (2 sin(θ/2))^k · sin((k+1)φ)/sin φ` with
/// `φ = (π-θ)/2`. For `θ = 2π·a/m` the sign of `sin((k+1)φ)` is decided by the
/// rational `(k+1)(m-2a)/(2m)`. Minor signs then give the inertia through the
/// Sturm sign-change count; the matrix is irreducible so zeros are isolated.
fn exact_inertia(q: u64, omega: RootOfUnity) -> Inertia {
    assert!(!omega.is_one());
    let n = q.saturating_sub(1) as usize;
    // Conjugation leaves the inertia unchanged; work with θ ∈ (0, π].
    let omega = if 2 * omega.num > omega.den { omega.conj() } else { omega };
    let (a, m) = (omega.num as u128, omega.den as u128);
    let minor_sign = |k: usize| -> i8 {
        let chebyshev = if 2 * a == m {
            1
        } else {
            let num = (k as u128 + 1) * (m - 2 * a);
            let den = 2 * m;
            if num.is_multiple_of(den) {
                0
            } else if (num / den).is_multiple_of(2) {
                1
            } else {
                -1
            }
        };
        if k % 2 == 1 { -chebyshev } else { chebyshev }
    };
    let signs: Vec<i8> = (0..=n).map(|k| if k == 0 { 1 } else { minor_sign(k) }).collect();
    let zero = usize::from(n > 0 && signs[n] == 0);
    let last = if zero == 1 { n - 1 } else { n };
    // An interior zero sits between minors of opposite sign and contributes one change.
    let mut negative = 0;
    let mut prev = signs[0];
    for &s in &signs[1..=last] {
        if s == 0 {
            negative += 1;
            prev = 0;
            continue;
        }
        if prev != 0 && s != prev {
            negative += 1;
        }
        prev = s;
    }
    Inertia { positive: n - zero - negative, negative, zero }
}

fn numeric_inertia(q: u64, omega: RootOfUnity) -> Option<(Inertia, usize)> {
    let h = HermitianTridiagonal::torus_form(q, omega);
    let tau = 10f64.powi(-tolerance_exponent()) * h.inf_norm().max(1.0);
    let eig = h.eigenvalues()?;
    let positive = eig.iter().filter(|&&x| x > tau).count();
    let negative = eig.iter().filter(|&&x| x < -tau).count();
    let uncertain = eig.len() - positive - negative;
    Some((Inertia { positive, negative, zero: 0 }, uncertain))
}

fn inertia(q: u64, omega: RootOfUnity) -> Result<Inertia> {
    match numeric_inertia(q, omega) {
        Some((certified, 0)) => Ok(certified),
        partial => {
            let exact = exact_inertia(q, omega);
            if let Some((certified, _)) = partial {
                if certified.positive > exact.positive || certified.negative > exact.negative {
                    return Err(Error::Precision { q, num: omega.num, den: omega.den });
                }
            }
            Ok(exact)
        }
    }
}

fn check_torus_parameter(q: u64) -> Result<()> {
    if q == 0 || q.is_multiple_of(2) {
        return Err(Error::BadTorusParameter(q));
    }
    Ok(())
}

/// Levine-Tristram signature of `T(2,q)` at `omega`; `0` for the unknot and at `ω = 1`.
pub fn lt_signature(q: u64, omega: RootOfUnity) -> Result<i64> {
    check_torus_parameter(q)?;
    if q == 1 || omega.is_one() {
        return Ok(0);
    }
    Ok(inertia(q, omega)?.signature())
}

/// Nullity of `T(2,q)` at `omega`; `0` for the unknot and at `ω = 1`.
pub fn lt_nullity(q: u64, omega: RootOfUnity) -> Result<u64> {
    check_torus_parameter(q)?;
    if q == 1 || omega.is_one() {
        return Ok(0);
    }
    // Roots of Δ_{T(2,q)} are primitive 2q-th roots of unity.
    if gcd(omega.order(), 2 * q) == 1 {
        return Ok(0);
    }
    match numeric_inertia(q, omega) {
        Some((_, 0)) => Ok(0),
        _ => Ok(inertia(q, omega)?.zero as u64),
    }
}

/// Signature function of one piece: `σ_{T(2,p)}(ω) + σ_{T(2,q)}(ω²)`, negated for mirrors.
pub fn piece_signature(piece: &Piece, omega: RootOfUnity) -> Result<i64> {
    let value = lt_signature(piece.cable_p(), omega)? + lt_signature(piece.companion_q(), omega.squared())?;
    Ok(piece.sign().as_i64() * value)
}

fn piece_is_singular(piece: &Piece, omega: RootOfUnity) -> bool {
    omega.is_torus_alexander_root(piece.cable_p())
        || (piece.companion_q() > 1 && omega.squared().is_torus_alexander_root(piece.companion_q()))
}

pub fn signature_at(knot: &GAKnot, omega: RootOfUnity) -> Result<i64> {
    let mut cache: HashMap<(u64, RootOfUnity), i64> = HashMap::new();
    let mut eval = |q: u64, w: RootOfUnity| -> Result<i64> {
        if let Some(&v) = cache.get(&(q, w)) {
            return Ok(v);
        }
        let v = lt_signature(q, w)?;
        cache.insert((q, w), v);
        Ok(v)
    };
    let mut total = 0;
    for piece in knot.pieces() {
        let v = eval(piece.cable_p(), omega)? + eval(piece.companion_q(), omega.squared())?;
        total += piece.sign().as_i64() * v;
    }
    Ok(total)
}

/// `σ_K(-1)`.
pub fn signature_at_minus_one(knot: &GAKnot) -> Result<i64> {
    signature_at(knot, RootOfUnity::minus_one())
}

/// One sample of the signature function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignatureSample {
    pub omega: RootOfUnity,
    /// In radians.
    pub angle: f64,
    pub signature: i64,
}

/// `σ_K` at `exp(iπ·j/resolution)` for `j = 1..resolution-1`. A sample that
/// lands on an Alexander root of some piece is moved half a step forward.
pub fn signature_function_samples(knot: &GAKnot, resolution: u64) -> Result<Vec<SignatureSample>> {
    if resolution == 0 {
        return Err(Error::Config("resolution must be positive".into()));
    }
    (1..resolution)
        .into_par_iter()
        .map(|j| {
            let mut omega = RootOfUnity::new(j as i64, 2 * resolution);
            let mut step = 4 * resolution;
            let mut at = 2 * j as i64 + 1;
            while knot.pieces().iter().any(|p| piece_is_singular(p, omega)) {
                omega = RootOfUnity::new(at, step);
                step *= 2;
                at = 2 * at + 1;
            }
            let signature = signature_at(knot, omega)?;
            Ok(SignatureSample { omega, angle: omega.angle(), signature })
        })
        .collect()
}
