//! Triviality and equality of words, level permutations, orders, and the
//! first-level stabilizer.
//!
//! [`is_trivial`] closes `{w}` under taking sections. If a word with
//! nontrivial root permutation turns up, the path leading to it is a
//! witness. Otherwise the closure is a finite set that lies in `St(1)` and is
//! mapped into its own `d`-fold product by the sections, which forces every
//! member, `w` included, to be the identity.

use std::collections::HashMap;
use std::fmt;

use indexmap::IndexSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::presentation::Presentation;
use crate::tree::{is_root_trivial, root_apply, root_perm, section, section_with_target, Vertex};
use crate::word::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub max_closure_states: usize,
    pub max_word_length: usize,
    pub max_level: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_closure_states: 1_000_000,
            max_word_length: 100_000,
            max_level: 12,
        }
    }
}

impl Budget {
    pub fn small() -> Self {
        Budget {
            max_closure_states: 2_000,
            max_word_length: 2_000,
            max_level: 8,
        }
    }
}

/// Work done by one decision call.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub states: usize,
    pub max_word_length: usize,
    pub max_level: usize,
}

impl Stats {
    pub fn merge(&mut self, other: &Stats) {
        self.states += other.states;
        self.max_word_length = self.max_word_length.max(other.max_word_length);
        self.max_level = self.max_level.max(other.max_level);
    }
}

impl fmt::Display for Stats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "states={} max_word_length={} max_level={}",
            self.states, self.max_word_length, self.max_level
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// `closure` is section-closed and every member is root-trivial.
    Trivial {
        closure: Vec<Word>,
        stats: Stats,
    },
    /// The section of the input at `witness` has nontrivial root permutation.
    Nontrivial {
        witness: Vertex,
        stats: Stats,
    },
    BudgetExceeded {
        stats: Stats,
    },
}

impl Outcome {
    pub fn is_trivial(&self) -> bool {
        matches!(self, Outcome::Trivial { .. })
    }

    pub fn is_nontrivial(&self) -> bool {
        matches!(self, Outcome::Nontrivial { .. })
    }

    pub fn stats(&self) -> &Stats {
        match self {
            Outcome::Trivial { stats, .. }
            | Outcome::Nontrivial { stats, .. }
            | Outcome::BudgetExceeded { stats } => stats,
        }
    }

    pub fn witness(&self) -> Option<&Vertex> {
        match self {
            Outcome::Nontrivial { witness, .. } => Some(witness),
            _ => None,
        }
    }
}

/// Decides whether `w` acts trivially on the tree.
///
/// Breadth-first over the section closure, so a reported witness is the
/// shortlex-least vertex among those reached.
pub fn is_trivial(p: &Presentation, w: &Word, budget: &Budget) -> Outcome {
    let seed = p.normalize(w);
    let mut stats = Stats {
        states: 1,
        max_word_length: seed.len(),
        max_level: 0,
    };
    if seed.len() > budget.max_word_length {
        return Outcome::BudgetExceeded { stats };
    }
    if !is_root_trivial(p, &seed) {
        return Outcome::Nontrivial {
            witness: Vertex::root(),
            stats,
        };
    }
    let mut seen: IndexSet<Word> = IndexSet::new();
    // parent index and coordinate, for witness reconstruction
    let mut parent: Vec<(usize, usize)> = vec![(usize::MAX, 0)];
    let mut level: Vec<usize> = vec![0];
    seen.insert(seed);
    let mut cursor = 0;
    while cursor < seen.len() {
        for x in 0..p.degree() {
            let s = section(p, &seen[cursor], x);
            stats.max_word_length = stats.max_word_length.max(s.len());
            if s.len() > budget.max_word_length {
                stats.states = seen.len();
                return Outcome::BudgetExceeded { stats };
            }
            if seen.contains(&s) {
                continue;
            }
            let nontrivial_root = !is_root_trivial(p, &s);
            seen.insert(s);
            parent.push((cursor, x));
            level.push(level[cursor] + 1);
            stats.max_level = stats.max_level.max(level[cursor] + 1);
            stats.states = seen.len();
            if nontrivial_root {
                return Outcome::Nontrivial {
                    witness: path_to(&parent, seen.len() - 1),
                    stats,
                };
            }
            if seen.len() > budget.max_closure_states {
                return Outcome::BudgetExceeded { stats };
            }
        }
        cursor += 1;
    }
    stats.states = seen.len();
    Outcome::Trivial {
        closure: seen.into_iter().collect(),
        stats,
    }
}

fn path_to(parent: &[(usize, usize)], mut i: usize) -> Vertex {
    let mut path = Vec::new();
    while parent[i].0 != usize::MAX {
        path.push(parent[i].1);
        i = parent[i].0;
    }
    path.reverse();
    Vertex(path)
}

/// Decides `u = v` as tree automorphisms via `u v^-1`.
pub fn are_equal(p: &Presentation, u: &Word, v: &Word, budget: &Budget) -> Outcome {
    is_trivial(p, &p.multiply(u, &v.inverse()), budget)
}

/// Checks that `closure` is section-closed and root-trivial, which is all
/// that is needed for its members to be trivial.
pub fn verify_closure(p: &Presentation, closure: &[Word]) -> bool {
    let set: std::collections::HashSet<&Word> = closure.iter().collect();
    closure.iter().all(|w| {
        is_root_trivial(p, w)
            && (0..p.degree()).all(|x| {
                let s = section(p, w, x);
                s.is_empty() || set.contains(&s)
            })
    })
}

/// One reduced word per line.
pub fn format_closure(p: &Presentation, closure: &[Word]) -> String {
    let mut out = String::new();
    for w in closure {
        out.push_str(&p.format_word(w));
        out.push('\n');
    }
    out
}

/// The permutation a word induces on the `d^n` vertices of level `n`,
/// enumerated lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelPermutation {
    pub level: usize,
    pub degree: usize,
    pub images: Vec<u32>,
}

impl LevelPermutation {
    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    pub fn cycle_lengths(&self) -> Vec<usize> {
        let mut seen = vec![false; self.images.len()];
        let mut lengths = Vec::new();
        for start in 0..self.images.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.images[x] as usize;
                len += 1;
            }
            lengths.push(len);
        }
        lengths
    }

    /// Least common multiple of the cycle lengths, `None` on overflow.
    pub fn order(&self) -> Option<u64> {
        let mut acc: u64 = 1;
        for len in self.cycle_lengths() {
            let g = num_integer::gcd(acc, len as u64);
            acc = acc.checked_mul(len as u64 / g)?;
        }
        Some(acc)
    }

    pub fn to_perm(&self) -> Perm {
        Perm::from_images(self.images.iter().map(|&x| x as usize).collect())
            .expect("level action is a bijection")
    }
}

pub fn perm_on_level(
    p: &Presentation,
    w: &Word,
    n: usize,
    budget: &Budget,
) -> Result<LevelPermutation> {
    let mut stats = Stats {
        max_level: n,
        ..Stats::default()
    };
    if n > budget.max_level {
        return Err(Error::BudgetExceeded(stats));
    }
    let mut memo: HashMap<(Word, usize), std::rc::Rc<Vec<u32>>> = HashMap::new();
    let images = level_images(p, &p.normalize(w), n, budget, &mut memo, &mut stats)?;
    Ok(LevelPermutation {
        level: n,
        degree: p.degree(),
        images: images.to_vec(),
    })
}

fn level_images(
    p: &Presentation,
    w: &Word,
    n: usize,
    budget: &Budget,
    memo: &mut HashMap<(Word, usize), std::rc::Rc<Vec<u32>>>,
    stats: &mut Stats,
) -> Result<std::rc::Rc<Vec<u32>>> {
    let block = p.degree().pow(n.saturating_sub(1) as u32);
    if n == 0 {
        return Ok(std::rc::Rc::new(vec![0]));
    }
    if w.is_empty() {
        return Ok(std::rc::Rc::new((0..(block * p.degree()) as u32).collect()));
    }
    if let Some(hit) = memo.get(&(w.clone(), n)) {
        return Ok(hit.clone());
    }
    stats.states += 1;
    stats.max_word_length = stats.max_word_length.max(w.len());
    if w.len() > budget.max_word_length || stats.states > budget.max_closure_states {
        return Err(Error::BudgetExceeded(*stats));
    }
    let mut images = vec![0u32; block * p.degree()];
    for x in 0..p.degree() {
        let (s, y) = section_with_target(p, w, x);
        let sub = level_images(p, &s, n - 1, budget, memo, stats)?;
        for (i, &t) in sub.iter().enumerate() {
            images[x * block + i] = (y * block) as u32 + t;
        }
    }
    let images = std::rc::Rc::new(images);
    memo.insert((w.clone(), n), images.clone());
    Ok(images)
}

pub fn order_in_level_quotient(
    p: &Presentation,
    w: &Word,
    n: usize,
    budget: &Budget,
) -> Result<u64> {
    let lp = perm_on_level(p, w, n, budget)?;
    lp.order().ok_or(Error::BudgetExceeded(Stats {
        max_level: n,
        ..Stats::default()
    }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderResult {
    /// Certified exact order.
    Finite(u64),
    /// The order exceeds this value or is infinite.
    LowerBound(u64),
    BudgetExceeded(Stats),
}

/// Orders of the level quotients `q_1, q_2, …`; whenever two consecutive
/// ones agree, `w^q` is tested for triviality.
pub fn try_order(p: &Presentation, w: &Word, max_level: usize, budget: &Budget) -> OrderResult {
    let mut prev: Option<u64> = None;
    let mut tested: Vec<u64> = Vec::new();
    for n in 1..=max_level {
        let q = match order_in_level_quotient(p, w, n, budget) {
            Ok(q) => q,
            Err(Error::BudgetExceeded(s)) => return OrderResult::BudgetExceeded(s),
            Err(_) => return OrderResult::BudgetExceeded(Stats::default()),
        };
        if prev == Some(q) && !tested.contains(&q) {
            tested.push(q);
            let Ok(k) = i64::try_from(q) else {
                return OrderResult::LowerBound(q);
            };
            match is_trivial(p, &p.power(w, k), budget) {
                Outcome::Trivial { .. } => return OrderResult::Finite(q),
                Outcome::Nontrivial { .. } => {}
                Outcome::BudgetExceeded { stats } => return OrderResult::BudgetExceeded(stats),
            }
        }
        prev = Some(q);
    }
    OrderResult::LowerBound(prev.unwrap_or(1))
}

/// Image of the group in `S_d` under the root permutation, with a
/// breadth-first transversal.
#[derive(Clone, Debug)]
pub struct RootImage {
    pub elements: Vec<Perm>,
    /// `transversal[i]` is a word with root permutation `elements[i]`.
    pub transversal: Vec<Word>,
}

impl RootImage {
    /// `|G : St_G(1)|`.
    pub fn index(&self) -> usize {
        self.elements.len()
    }

    fn position(&self, q: &Perm) -> usize {
        self.elements
            .iter()
            .position(|e| e == q)
            .expect("closed under generators")
    }
}

pub fn root_image_group(p: &Presentation) -> RootImage {
    let id = Perm::identity(p.degree());
    let mut elements = vec![id];
    let mut transversal = vec![Word::empty()];
    let mut cursor = 0;
    while cursor < elements.len() {
        for (g, def) in p.generators().iter().enumerate() {
            let next = elements[cursor].then(&def.root);
            if !elements.contains(&next) {
                elements.push(next);
                transversal.push(p.multiply(&transversal[cursor], &Word::generator(g as u32)));
            }
        }
        cursor += 1;
    }
    RootImage {
        elements,
        transversal,
    }
}

/// Schreier generators `t·g·rep(t·g)^-1` of the kernel of the root map.
pub fn st1_schreier_generators(p: &Presentation) -> Vec<Word> {
    let image = root_image_group(p);
    let mut out: Vec<Word> = Vec::new();
    for (t, rep) in image.transversal.iter().enumerate() {
        for (g, def) in p.generators().iter().enumerate() {
            let target = image.position(&image.elements[t].then(&def.root));
            let mut r = p.reducer();
            r.extend(rep);
            r.push(crate::word::Letter::new(g as u32, false));
            r.extend(&image.transversal[target].inverse());
            let w = r.finish();
            if !w.is_empty() && !out.contains(&w) {
                debug_assert!(root_perm(p, &w).is_identity());
                out.push(w);
            }
        }
    }
    out
}

/// `w` moves `v`'s first coordinate, used by cross-checks.
pub fn moves_at(p: &Presentation, w: &Word, v: &Vertex) -> bool {
    let s = crate::tree::section_at_vertex(p, w, v);
    (0..p.degree()).any(|x| root_apply(p, &s, x) != x)
}
