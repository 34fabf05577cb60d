//! Sections, root permutations and the action on vertices.
//!
//! Products act left factor first: `(uv)(t) = v(u(t))`. With this
//! convention `(uv)_x = u_x · v_{σ_u(x)}`, `(g^-1)_x = (g_{σ_g^-1(x)})^-1` and
//! `w(x·t) = σ_w(x) · w_x(t)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::decision::{Budget, Stats};
use crate::error::{Error, Result};
use crate::mealy;
use crate::perm::Perm;
use crate::presentation::Presentation;
use crate::word::Word;

/// A vertex of the tree, as the path of coordinates from the root.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Vertex(pub Vec<usize>);

impl Vertex {
    pub fn root() -> Self {
        Vertex(Vec::new())
    }

    pub fn level(&self) -> usize {
        self.0.len()
    }

    pub fn child(&self, x: usize) -> Vertex {
        let mut v = self.0.clone();
        v.push(x);
        Vertex(v)
    }

    pub fn check(&self, degree: usize) -> Result<()> {
        if self.0.iter().all(|&x| x < degree) {
            Ok(())
        } else {
            Err(Error::InvalidVertex(self.to_string()))
        }
    }

    /// Position among the level vertices in lexicographic order.
    pub fn index(&self, degree: usize) -> usize {
        self.0.iter().fold(0, |acc, &x| acc * degree + x)
    }

    pub fn from_index(mut index: usize, level: usize, degree: usize) -> Vertex {
        let mut path = vec![0; level];
        for slot in path.iter_mut().rev() {
            *slot = index % degree;
            index /= degree;
        }
        Vertex(path)
    }
}

/// Digit strings such as `011`; coordinates of ten or more are written
/// dot-separated (`3.10.0`).
impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        if self.0.iter().all(|&x| x < 10) {
            for x in &self.0 {
                write!(f, "{x}")?;
            }
        } else {
            let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
            write!(f, "{}", parts.join("."))?;
        }
        Ok(())
    }
}

impl FromStr for Vertex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "ε" || s == "root" {
            return Ok(Vertex::root());
        }
        let bad = || Error::InvalidVertex(s.to_string());
        let path = if s.contains('.') {
            s.split('.')
                .map(|t| t.parse().map_err(|_| bad()))
                .collect::<Result<Vec<usize>>>()?
        } else {
            s.chars()
                .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
                .collect::<Result<Vec<usize>>>()?
        };
        Ok(Vertex(path))
    }
}

/// Image of `w` in `S_d`.
pub fn root_perm(p: &Presentation, w: &Word) -> Perm {
    let mut images: Vec<usize> = (0..p.degree()).collect();
    for x in images.iter_mut() {
        *x = root_apply(p, w, *x);
    }
    Perm::from_images(images).expect("product of permutations")
}

/// `σ_w(x)` without materializing the permutation.
#[inline]
pub fn root_apply(p: &Presentation, w: &Word, x: usize) -> usize {
    w.letters()
        .iter()
        .fold(x, |y, &l| p.letter_root(l).apply(y))
}

pub fn is_root_trivial(p: &Presentation, w: &Word) -> bool {
    (0..p.degree()).all(|x| root_apply(p, w, x) == x)
}

/// The section `w_x`, reduced.
pub fn section(p: &Presentation, w: &Word, x: usize) -> Word {
    section_with_target(p, w, x).0
}

/// `(w_x, σ_w(x))` in one pass.
pub fn section_with_target(p: &Presentation, w: &Word, x: usize) -> (Word, usize) {
    let mut r = p.reducer();
    let mut y = x;
    for &l in w.letters() {
        r.extend(p.letter_section(l, y));
        y = p.letter_root(l).apply(y);
    }
    (r.finish(), y)
}

pub fn section_at_vertex(p: &Presentation, w: &Word, v: &Vertex) -> Word {
    let mut cur = p.normalize(w);
    for &x in &v.0 {
        cur = section(p, &cur, x);
    }
    cur
}

/// Image of `v` under `w`.
pub fn act(p: &Presentation, w: &Word, v: &Vertex) -> Vertex {
    let mut cur = w.clone();
    let mut out = Vec::with_capacity(v.level());
    for (i, &x) in v.0.iter().enumerate() {
        if cur.is_empty() {
            out.extend_from_slice(&v.0[i..]);
            break;
        }
        let (next, y) = section_with_target(p, &cur, x);
        out.push(y);
        cur = next;
    }
    Vertex(out)
}

/// Root permutations of all sections at levels below `depth`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Portrait {
    pub depth: usize,
    pub labels: BTreeMap<Vertex, Perm>,
}

impl Portrait {
    pub fn label(&self, v: &Vertex) -> Option<&Perm> {
        self.labels.get(v)
    }

    /// Vertices with a nontrivial label, in breadth-first order.
    pub fn support(&self) -> Vec<&Vertex> {
        let mut v: Vec<&Vertex> = self
            .labels
            .iter()
            .filter(|(_, p)| !p.is_identity())
            .map(|(v, _)| v)
            .collect();
        v.sort_by(|a, b| a.level().cmp(&b.level()).then(a.cmp(b)));
        v
    }
}

pub fn portrait(p: &Presentation, w: &Word, depth: usize, budget: &Budget) -> Result<Portrait> {
    let mut labels = BTreeMap::new();
    let mut frontier = vec![(Vertex::root(), p.normalize(w))];
    let mut total = 0usize;
    let mut longest = 0usize;
    for _ in 0..depth {
        let mut next = Vec::with_capacity(frontier.len() * p.degree());
        for (v, s) in frontier {
            total += s.len();
            longest = longest.max(s.len());
            if total > budget.max_word_length.saturating_mul(16) || s.len() > budget.max_word_length
            {
                return Err(Error::BudgetExceeded(Stats {
                    states: labels.len(),
                    max_word_length: longest,
                    max_level: v.level(),
                }));
            }
            labels.insert(v.clone(), root_perm(p, &s));
            for x in 0..p.degree() {
                next.push((v.child(x), section(p, &s, x)));
            }
        }
        frontier = next;
    }
    Ok(Portrait { depth, labels })
}

/// Membership of the presentation in the Sylow pro-p subgroup induced by the
/// cycle `(0 1 … p-1)`: every root permutation of every state of the
/// saturated automaton must be a power of that cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GammaVerdict {
    Member,
    /// The named state (a generator name or a section word) has a bad root.
    NotMember {
        offender: String,
        root: Perm,
    },
    Unknown,
}

pub fn is_in_gamma(p: &Presentation, max_states: usize) -> Result<GammaVerdict> {
    if !is_prime(p.degree()) {
        return Err(Error::DegreeNotPrime(p.degree()));
    }
    for g in p.generators() {
        if !g.root.is_power_of_cycle() {
            return Ok(GammaVerdict::NotMember {
                offender: g.name.clone(),
                root: g.root.clone(),
            });
        }
    }
    match mealy::saturate(p, max_states) {
        Ok(m) => {
            for s in 0..m.len() {
                let root = m.root(s);
                if !root.is_power_of_cycle() {
                    return Ok(GammaVerdict::NotMember {
                        offender: m.label(s).to_string(),
                        root: root.clone(),
                    });
                }
            }
            Ok(GammaVerdict::Member)
        }
        Err(Error::SaturationExceeded(_)) => Ok(GammaVerdict::Unknown),
        Err(e) => Err(e),
    }
}

fn is_prime(n: usize) -> bool {
    n >= 2
        && (2..)
            .take_while(|k| k * k <= n)
            .all(|k| !n.is_multiple_of(k))
}
