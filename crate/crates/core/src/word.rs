//! Words over a symmetric generator alphabet and their reduction.

use std::fmt;

/// A generator or its inverse, packed as `generator << 1 | inverse`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u32);

impl Letter {
    #[inline]
    pub fn new(generator: u32, inverse: bool) -> Self {
        Letter(generator << 1 | inverse as u32)
    }

    #[inline]
    pub fn generator(self) -> u32 {
        self.0 >> 1
    }

    #[inline]
    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }

    /// Dense index in `0..2 * generator_count`.
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn sign(self) -> i64 {
        if self.is_inverse() {
            -1
        } else {
            1
        }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}", self.generator())?;
        if self.is_inverse() {
            write!(f, "^-1")?;
        }
        Ok(())
    }
}

/// A finite product of letters. The empty word is the identity.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    pub fn generator(g: u32) -> Self {
        Word(vec![Letter::new(g, false)])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Letters reversed with signs flipped.
    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Concatenation without reduction.
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

/// Returns the unique freely reduced form of `w`.
pub fn free_reduce(w: &Word) -> Word {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in w.letters() {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Word(out)
}

/// Incremental normal form in a free product of cyclic groups.
///
/// Generators without a known order are free; a generator `g` of order `m`
/// has every maximal run `g^e` replaced by the representative of `e mod m`
/// in `(-m/2, m/2]`. Without orders this is plain free reduction.
pub struct Reducer<'a> {
    orders: &'a [Option<u32>],
    runs: Vec<(u32, i64)>,
}

impl<'a> Reducer<'a> {
    pub fn new(orders: &'a [Option<u32>]) -> Self {
        Reducer {
            orders,
            runs: Vec::new(),
        }
    }

    pub fn push(&mut self, l: Letter) {
        self.push_power(l.generator(), l.sign());
    }

    pub fn push_power(&mut self, generator: u32, exponent: i64) {
        if exponent == 0 {
            return;
        }
        let order = self.orders.get(generator as usize).copied().flatten();
        let merged = match self.runs.last() {
            Some(&(g, e)) if g == generator => {
                self.runs.pop();
                e + exponent
            }
            _ => exponent,
        };
        let e = match order {
            Some(m) => balanced_residue(merged, m as i64),
            None => merged,
        };
        if e != 0 {
            self.runs.push((generator, e));
        }
    }

    pub fn extend(&mut self, w: &Word) {
        for &l in w.letters() {
            self.push(l);
        }
    }

    /// Total letter count of the current normal form.
    pub fn len(&self) -> usize {
        self.runs
            .iter()
            .map(|&(_, e)| e.unsigned_abs() as usize)
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn finish(self) -> Word {
        let mut out = Vec::with_capacity(self.len());
        for (g, e) in self.runs {
            let l = Letter::new(g, e < 0);
            out.extend(std::iter::repeat_n(l, e.unsigned_abs() as usize));
        }
        Word(out)
    }
}

fn balanced_residue(e: i64, m: i64) -> i64 {
    let r = e.rem_euclid(m);
    if 2 * r > m {
        r - m
    } else {
        r
    }
}
