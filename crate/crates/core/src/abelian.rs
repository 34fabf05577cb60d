//! Cyclic actions on finitely generated abelian groups as integer matrices.
//!
//! Vectors are rows and act on the right, written additively:
//! `[a, g] = a(M - I)` and `[a,_n g] = a(M - I)^n`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vector domains larger than this are sampled instead of enumerated.
pub const EXHAUSTIVE_CAP: u64 = 100_000;
pub const DEFAULT_SAMPLES: usize = 20_000;
pub const DEFAULT_SEED: u64 = 0x5eed;

/// Square integer matrix, optionally over `Z/m` (`modulus == 0` means `Z`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    dim: usize,
    entries: Vec<i128>,
    modulus: u64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixFile {
    Bare(Vec<Vec<i64>>),
    Tagged(TaggedMatrix),
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct TaggedMatrix {
    entries: Vec<Vec<i64>>,
    #[serde(rename = "mod", default, skip_serializing_if = "is_zero")]
    modulus: u64,
}

fn is_zero(m: &u64) -> bool {
    *m == 0
}

impl IntMatrix {
    pub fn new(rows: Vec<Vec<i64>>, modulus: u64) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::BadMatrix("empty matrix".into()));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::BadMatrix(format!(
                "row of length {} in a {dim}x{dim} matrix",
                r.len()
            )));
        }
        if modulus == 1 {
            return Err(Error::BadMatrix("modulus 1".into()));
        }
        let mut m = IntMatrix {
            dim,
            entries: rows.into_iter().flatten().map(i128::from).collect(),
            modulus,
        };
        m.reduce();
        Ok(m)
    }

    pub fn identity(dim: usize, modulus: u64) -> Self {
        let mut entries = vec![0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1;
        }
        IntMatrix {
            dim,
            entries,
            modulus,
        }
    }

    /// Bare array of rows, or `{"entries": rows, "mod": m}`.
    pub fn from_json(text: &str) -> Result<Self> {
        match serde_json::from_str::<MatrixFile>(text) {
            Ok(MatrixFile::Bare(rows)) => IntMatrix::new(rows, 0),
            Ok(MatrixFile::Tagged(t)) => IntMatrix::new(t.entries, t.modulus),
            Err(e) => Err(Error::BadMatrix(e.to_string())),
        }
    }

    pub fn to_json(&self) -> String {
        let t = TaggedMatrix {
            entries: self
                .rows()
                .into_iter()
                .map(|r| r.into_iter().map(|x| x as i64).collect())
                .collect(),
            modulus: self.modulus,
        };
        serde_json::to_string(&t).expect("matrix serializes")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.entries[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<i128>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == IntMatrix::identity(self.dim, self.modulus)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    fn reduce(&mut self) {
        if self.modulus > 0 {
            let m = self.modulus as i128;
            for x in &mut self.entries {
                *x = x.rem_euclid(m);
            }
        }
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        let k = self.dim;
        let mut entries = vec![0i128; k * k];
        for i in 0..k {
            for j in 0..k {
                let mut acc: i128 = 0;
                for l in 0..k {
                    let t = self
                        .get(i, l)
                        .checked_mul(other.get(l, j))
                        .ok_or(Error::Overflow)?;
                    acc = acc.checked_add(t).ok_or(Error::Overflow)?;
                }
                entries[i * k + j] = acc;
            }
        }
        let mut out = IntMatrix {
            dim: k,
            entries,
            modulus: self.modulus,
        };
        out.reduce();
        Ok(out)
    }

    pub fn sub(&self, other: &IntMatrix) -> Result<IntMatrix> {
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.checked_sub(*b).ok_or(Error::Overflow))
            .collect::<Result<Vec<_>>>()?;
        let mut out = IntMatrix {
            dim: self.dim,
            entries,
            modulus: self.modulus,
        };
        out.reduce();
        Ok(out)
    }

    /// `M - I`
    pub fn commutator_map(&self) -> IntMatrix {
        self.sub(&IntMatrix::identity(self.dim, self.modulus))
            .expect("subtracting 1 from a diagonal entry")
    }

    pub fn pow(&self, e: u64) -> Result<IntMatrix> {
        let mut result = IntMatrix::identity(self.dim, self.modulus);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// Row vector times matrix, reduced by the modulus.
    pub fn apply(&self, v: &[i128]) -> Result<Vec<i128>> {
        let k = self.dim;
        let mut out = vec![0i128; k];
        for (j, o) in out.iter_mut().enumerate() {
            let mut acc: i128 = 0;
            for (i, x) in v.iter().enumerate() {
                let t = x.checked_mul(self.get(i, j)).ok_or(Error::Overflow)?;
                acc = acc.checked_add(t).ok_or(Error::Overflow)?;
            }
            *o = if self.modulus > 0 {
                acc.rem_euclid(self.modulus as i128)
            } else {
                acc
            };
        }
        Ok(out)
    }
}

impl std::fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| {
                let xs: Vec<String> = r.iter().map(|x| x.to_string()).collect();
                format!("[{}]", xs.join(","))
            })
            .collect();
        write!(f, "[{}]", rows.join(","))?;
        if self.modulus > 0 {
            write!(f, " mod {}", self.modulus)?;
        }
        Ok(())
    }
}

/// Least `n` with `(M - I)^n = 0`, if any. Over `Z/m` the search stops at
/// `dim * log2(m)`, past which a nilpotent matrix has already vanished.
pub fn nilpotency_index(m: &IntMatrix) -> Result<Option<u32>> {
    let n = m.commutator_map();
    let bound = if m.modulus == 0 {
        m.dim as u32
    } else {
        m.dim as u32 * (64 - m.modulus.leading_zeros())
    };
    let mut power = IntMatrix::identity(m.dim, m.modulus);
    for k in 0..=bound {
        if power.is_zero() {
            return Ok(Some(k));
        }
        power = power.mul(&n)?;
    }
    Ok(None)
}

/// `(M - I)^k = 0` over the integers.
pub fn is_unipotent(m: &IntMatrix) -> Result<bool> {
    if m.modulus != 0 {
        return Err(Error::ModulusUnsupported);
    }
    Ok(nilpotency_index(m)?.is_some())
}

/// `(M - I)` nilpotent over `Z/m`.
pub fn is_unipotent_mod(m: &IntMatrix) -> Result<bool> {
    if m.modulus == 0 {
        return Err(Error::ModulusRequired);
    }
    Ok(nilpotency_index(m)?.is_some())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum MatrixOrder {
    Finite(u64),
    /// No power up to this one is the identity.
    LowerBound(u64),
}

/// Least `e ≤ cap` with `M^e = I`. Over the integers, entry overflow ends
/// the search early and the bound reached is reported.
pub fn order_of_matrix(m: &IntMatrix, cap: u64) -> MatrixOrder {
    let id = IntMatrix::identity(m.dim, m.modulus);
    let mut power = m.clone();
    for e in 1..=cap {
        if power == id {
            return MatrixOrder::Finite(e);
        }
        match power.mul(m) {
            Ok(next) => power = next,
            Err(_) => return MatrixOrder::LowerBound(e),
        }
    }
    MatrixOrder::LowerBound(cap)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum ActionClassification {
    /// Over `Z`: finite order and unipotent, hence the identity.
    TrivialForced,
    /// Over `Z/m`: the matrix is the identity.
    TrivialAction,
    /// Over `Z/m`: a nontrivial Engel action of finite order.
    EngelNontrivialTorsion {
        order: u64,
        nilpotency: u32,
    },
    NotEngel {
        order: u64,
    },
    OrderUnbounded {
        cap: u64,
    },
}

pub fn classify_engel_action(m: &IntMatrix, cap: u64) -> Result<ActionClassification> {
    let order = match order_of_matrix(m, cap) {
        MatrixOrder::Finite(e) => e,
        MatrixOrder::LowerBound(_) => return Ok(ActionClassification::OrderUnbounded { cap }),
    };
    let nil = nilpotency_index(m)?;
    Ok(match (m.modulus, nil) {
        (_, None) => ActionClassification::NotEngel { order },
        (0, Some(_)) => {
            assert!(
                m.is_identity(),
                "unipotent integer matrix of finite order {order} is not the identity: {m}"
            );
            ActionClassification::TrivialForced
        }
        (_, Some(_)) if m.is_identity() => ActionClassification::TrivialAction,
        (_, Some(k)) => ActionClassification::EngelNontrivialTorsion {
            order,
            nilpotency: k,
        },
    })
}

/// Rank over the rationals by fraction-free elimination.
pub fn rank(m: &IntMatrix) -> Result<usize> {
    let k = m.dim;
    let mut a = m.rows();
    let mut rank = 0;
    let mut prev: i128 = 1;
    for col in 0..k {
        let Some(pivot) = (rank..k).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(rank, pivot);
        for r in rank + 1..k {
            for c in col + 1..k {
                let x = a[rank][col]
                    .checked_mul(a[r][c])
                    .and_then(|x| x.checked_sub(a[r][col].checked_mul(a[rank][c])?))
                    .ok_or(Error::Overflow)?;
                a[r][c] = x / prev;
            }
            a[r][col] = 0;
        }
        prev = a[rank][col];
        rank += 1;
    }
    Ok(rank)
}

/// Rank of the image lattice of `M - I`, and whether that lattice is finite.
pub fn commutator_lattice(m: &IntMatrix) -> Result<(usize, bool)> {
    if m.modulus != 0 {
        return Err(Error::ModulusUnsupported);
    }
    let r = rank(&m.commutator_map())?;
    Ok((r, r == 0))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VectorCheck {
    pub holds: bool,
    pub exhaustive: bool,
    pub vectors: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Vec<i128>>,
}

/// Every vector of `(Z/m)^k` when there are at most [`EXHAUSTIVE_CAP`],
/// otherwise `samples` seeded uniform draws.
fn for_vectors(
    dim: usize,
    modulus: u64,
    samples: usize,
    seed: u64,
    mut f: impl FnMut(&[i128]) -> Result<bool>,
) -> Result<VectorCheck> {
    let total = (modulus as u128).checked_pow(dim as u32);
    if let Some(total) = total.filter(|&t| t <= EXHAUSTIVE_CAP as u128) {
        let mut v = vec![0i128; dim];
        for _ in 0..total {
            if !f(&v)? {
                return Ok(VectorCheck {
                    holds: false,
                    exhaustive: true,
                    vectors: total as u64,
                    seed: None,
                    counterexample: Some(v),
                });
            }
            for x in v.iter_mut() {
                *x += 1;
                if *x < modulus as i128 {
                    break;
                }
                *x = 0;
            }
        }
        return Ok(VectorCheck {
            holds: true,
            exhaustive: true,
            vectors: total as u64,
            seed: None,
            counterexample: None,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let v: Vec<i128> = (0..dim)
            .map(|_| rng.gen_range(0..modulus) as i128)
            .collect();
        if !f(&v)? {
            return Ok(VectorCheck {
                holds: false,
                exhaustive: false,
                vectors: samples as u64,
                seed: Some(seed),
                counterexample: Some(v),
            });
        }
    }
    Ok(VectorCheck {
        holds: true,
        exhaustive: false,
        vectors: samples as u64,
        seed: Some(seed),
        counterexample: None,
    })
}

fn scale(v: &[i128], k: i128, modulus: u64) -> Vec<i128> {
    let m = modulus as i128;
    v.iter()
        .map(|x| (x.rem_euclid(m) * k.rem_euclid(m)).rem_euclid(m))
        .collect()
}

/// For every `a`: `a(M - I)^n = 0` implies `ℓ^(n-1) · a(M - I) = 0`.
pub fn engel_exponent_check(
    m: &IntMatrix,
    ell: u64,
    n: u32,
    samples: usize,
    seed: u64,
) -> Result<VectorCheck> {
    if m.modulus == 0 {
        return Err(Error::ModulusRequired);
    }
    if n == 0 || ell == 0 {
        return Err(Error::BadParams("ℓ and n must be positive".into()));
    }
    if !m.pow(ell)?.is_identity() {
        return Err(Error::OrderMismatch(ell));
    }
    let c = m.commutator_map();
    let cn = c.pow(n as u64)?;
    let mm = m.modulus as i128;
    let factor = (0..n - 1).fold(1i128, |acc, _| (acc * (ell as i128 % mm)) % mm);
    for_vectors(m.dim, m.modulus, samples, seed, |a| {
        if cn.apply(a)?.iter().any(|&x| x != 0) {
            return Ok(true);
        }
        Ok(scale(&c.apply(a)?, factor, m.modulus)
            .iter()
            .all(|&x| x == 0))
    })
}

/// Under `(M - I)^2 = 0`: `s(M^k - I) = k · s(M - I)` for every `s`.
/// Negative `k` uses `M^-1 = 2I - M`.
pub fn power_commutator_check(
    m: &IntMatrix,
    k: i64,
    samples: usize,
    seed: u64,
) -> Result<VectorCheck> {
    if m.modulus == 0 {
        return Err(Error::ModulusRequired);
    }
    let c = m.commutator_map();
    if !c.mul(&c)?.is_zero() {
        return Err(Error::HypothesisViolated);
    }
    let base = if k >= 0 {
        m.clone()
    } else {
        IntMatrix::identity(m.dim, m.modulus).sub(&c)?
    };
    let mk = base.pow(k.unsigned_abs())?;
    let lhs_map = mk.commutator_map();
    for_vectors(m.dim, m.modulus, samples, seed, |s| {
        Ok(lhs_map.apply(s)? == scale(&c.apply(s)?, k as i128, m.modulus))
    })
}

/// All `dim × dim` matrices with entries in `lo..=hi`, in lexicographic
/// order of their entries.
pub fn all_matrices(dim: usize, lo: i64, hi: i64, modulus: u64) -> Vec<IntMatrix> {
    let cells = dim * dim;
    let span = (hi - lo + 1) as usize;
    let total = span.pow(cells as u32);
    (0..total)
        .map(|mut idx| {
            let mut flat = vec![0i64; cells];
            for x in flat.iter_mut().rev() {
                *x = lo + (idx % span) as i64;
                idx /= span;
            }
            IntMatrix::new(flat.chunks(dim).map(|r| r.to_vec()).collect(), modulus)
                .expect("square by construction")
        })
        .collect()
}
