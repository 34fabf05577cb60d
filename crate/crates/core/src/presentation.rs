//! Wreath-recursion presentations and the JSON group-file format.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::decision::{self, Budget, Outcome};
use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::word::{Letter, Reducer, Word};

/// The Unicode name of the standard rooted generator and its ASCII alias.
pub const SIGMA: &str = "σ";
pub const SIGMA_ASCII: &str = "s1";

/// One generator of a self-similar presentation: `g = (s_0, …, s_{d-1}) · root`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorDef {
    pub name: String,
    pub root: Perm,
    pub sections: Vec<Word>,
    /// Optional claimed order, checked by [`Presentation::new`] before it is
    /// used to shorten words.
    pub order: Option<u32>,
}

impl GeneratorDef {
    pub fn is_rooted(&self) -> bool {
        self.sections.iter().all(Word::is_empty)
    }
}

/// Degree plus an ordered list of generators, with per-letter tables for
/// roots and sections precomputed.
#[derive(Clone, Debug)]
pub struct Presentation {
    degree: usize,
    generators: Vec<GeneratorDef>,
    letter_root: Vec<Perm>,
    letter_sections: Vec<Vec<Word>>,
    orders: Vec<Option<u32>>,
}

impl PartialEq for Presentation {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.generators == other.generators
    }
}

impl Presentation {
    /// Builds a presentation and verifies every order annotation by deciding
    /// `g^m = 1` with the default budget.
    pub fn new(degree: usize, generators: Vec<GeneratorDef>) -> Result<Self> {
        let raw = Self::unchecked(degree, generators)?;
        let mut orders = vec![None; raw.generators.len()];
        for (i, g) in raw.generators.iter().enumerate() {
            let Some(m) = g.order else { continue };
            if m == 0 {
                return Err(Error::InvalidOrderAnnotation {
                    name: g.name.clone(),
                    order: m,
                    verdict: "meaningless".into(),
                });
            }
            let power = Word::from_letters(vec![Letter::new(i as u32, false); m as usize]);
            match decision::is_trivial(&raw, &power, &Budget::default()) {
                Outcome::Trivial { .. } => orders[i] = Some(m),
                Outcome::Nontrivial { .. } => {
                    return Err(Error::InvalidOrderAnnotation {
                        name: g.name.clone(),
                        order: m,
                        verdict: "nontrivial".into(),
                    })
                }
                Outcome::BudgetExceeded { .. } => {
                    return Err(Error::InvalidOrderAnnotation {
                        name: g.name.clone(),
                        order: m,
                        verdict: "undecided within budget".into(),
                    })
                }
            }
        }
        let mut p = raw;
        p.orders = orders;
        p.rebuild_tables();
        Ok(p)
    }

    fn unchecked(degree: usize, generators: Vec<GeneratorDef>) -> Result<Self> {
        if degree < 2 {
            return Err(Error::BadDegree(degree));
        }
        let mut names = HashMap::new();
        for (i, g) in generators.iter().enumerate() {
            if g.root.degree() != degree || g.sections.len() != degree {
                return Err(Error::DegreeMismatch {
                    name: g.name.clone(),
                    degree,
                });
            }
            if !is_valid_name(&g.name) {
                return Err(Error::MalformedToken(g.name.clone()));
            }
            if names.insert(g.name.clone(), i).is_some() {
                return Err(Error::DuplicateGenerator(g.name.clone()));
            }
        }
        let n = generators.len() as u32;
        for g in &generators {
            for s in &g.sections {
                if let Some(l) = s.letters().iter().find(|l| l.generator() >= n) {
                    return Err(Error::ForeignWord(l.generator()));
                }
            }
        }
        let mut p = Presentation {
            degree,
            orders: vec![None; generators.len()],
            generators,
            letter_root: Vec::new(),
            letter_sections: Vec::new(),
        };
        p.rebuild_tables();
        Ok(p)
    }

    fn rebuild_tables(&mut self) {
        let d = self.degree;
        let mut roots = Vec::with_capacity(2 * self.generators.len());
        let mut sections = Vec::with_capacity(2 * self.generators.len());
        for g in &self.generators {
            roots.push(g.root.clone());
            sections.push(g.sections.iter().map(|s| self.normalize(s)).collect());
            // (g^-1)_x = (g_{root^-1(x)})^-1
            let inv = g.root.inverse();
            roots.push(inv.clone());
            sections.push(
                (0..d)
                    .map(|x| self.normalize(&g.sections[inv.apply(x)].inverse()))
                    .collect(),
            );
        }
        self.letter_root = roots;
        self.letter_sections = sections;
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[GeneratorDef] {
        &self.generators
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    /// Verified orders, indexed by generator.
    pub fn orders(&self) -> &[Option<u32>] {
        &self.orders
    }

    /// Looks up a generator by name, treating `σ` and `s1` as the same name.
    pub fn find(&self, name: &str) -> Option<u32> {
        let exact = self.generators.iter().position(|g| g.name == name);
        let found = exact.or_else(|| {
            let alias = match name {
                SIGMA => SIGMA_ASCII,
                SIGMA_ASCII => SIGMA,
                _ => return None,
            };
            self.generators.iter().position(|g| g.name == alias)
        });
        found.map(|i| i as u32)
    }

    pub fn generator_word(&self, name: &str) -> Result<Word> {
        self.find(name)
            .map(Word::generator)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    #[inline]
    pub fn letter_root(&self, l: Letter) -> &Perm {
        &self.letter_root[l.index()]
    }

    #[inline]
    pub fn letter_section(&self, l: Letter, x: usize) -> &Word {
        &self.letter_sections[l.index()][x]
    }

    /// Rejects words that mention generators this presentation does not have.
    pub fn check_word(&self, w: &Word) -> Result<()> {
        let n = self.generators.len() as u32;
        match w.letters().iter().find(|l| l.generator() >= n) {
            Some(l) => Err(Error::ForeignWord(l.generator())),
            None => Ok(()),
        }
    }

    /// Free reduction plus the verified finite-order rewrites.
    pub fn normalize(&self, w: &Word) -> Word {
        let mut r = self.reducer();
        r.extend(w);
        r.finish()
    }

    pub fn reducer(&self) -> Reducer<'_> {
        Reducer::new(&self.orders)
    }

    /// Concatenation followed by reduction.
    pub fn multiply(&self, u: &Word, v: &Word) -> Word {
        let mut r = self.reducer();
        r.extend(u);
        r.extend(v);
        r.finish()
    }

    pub fn invert(&self, w: &Word) -> Word {
        self.normalize(&w.inverse())
    }

    /// `g^-1 h g`.
    pub fn conjugate(&self, h: &Word, g: &Word) -> Word {
        let mut r = self.reducer();
        r.extend(&g.inverse());
        r.extend(h);
        r.extend(g);
        r.finish()
    }

    /// `h^-1 g^-1 h g`.
    pub fn commutator(&self, h: &Word, g: &Word) -> Word {
        let mut r = self.reducer();
        r.extend(&h.inverse());
        r.extend(&g.inverse());
        r.extend(h);
        r.extend(g);
        r.finish()
    }

    /// `w^k` by repeated squaring, reducing after every product.
    pub fn power(&self, w: &Word, k: i64) -> Word {
        let mut base = if k < 0 {
            self.invert(w)
        } else {
            self.normalize(w)
        };
        let mut e = k.unsigned_abs();
        let mut acc = Word::empty();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.multiply(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.multiply(&base, &base);
            }
        }
        acc
    }

    /// Parses whitespace-separated tokens `name`, `name^-1` or `name^k`.
    /// The token `1` denotes the identity.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        parse_tokens(text, |name| self.find(name))
    }

    pub fn format_word(&self, w: &Word) -> String {
        format_with(w, |g| self.generators[g as usize].name.as_str())
    }

    /// Like [`format_word`](Self::format_word) but with `σ` spelled `s1`.
    pub fn format_word_ascii(&self, w: &Word) -> String {
        format_with(w, |g| ascii_name(&self.generators[g as usize].name))
    }

    /// Returns a new presentation with `def` appended.
    pub fn with_generator(&self, def: GeneratorDef) -> Result<Presentation> {
        let mut gens = self.generators.clone();
        gens.push(def);
        Presentation::new(self.degree, gens)
    }

    /// Builds a generator from the notation `(s_1, …, s_d) · rooted`, where
    /// position `i` of `sections` becomes internal coordinate `i - 1`. The
    /// section texts may mention `name` itself.
    pub fn from_paper_form(
        &self,
        sections: &[&str],
        rooted: Perm,
        name: &str,
    ) -> Result<GeneratorDef> {
        if self.find(name).is_some() {
            return Err(Error::DuplicateGenerator(name.to_string()));
        }
        if sections.len() != self.degree || rooted.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                name: name.to_string(),
                degree: self.degree,
            });
        }
        let own = self.generators.len() as u32;
        let words = sections
            .iter()
            .map(|s| parse_tokens(s, |n| if n == name { Some(own) } else { self.find(n) }))
            .collect::<Result<Vec<_>>>()?;
        Ok(GeneratorDef {
            name: name.to_string(),
            root: rooted,
            sections: words,
            order: None,
        })
    }

    pub fn to_file(&self) -> GroupFile {
        GroupFile {
            degree: self.degree,
            generators: self
                .generators
                .iter()
                .map(|g| GeneratorFile {
                    name: ascii_name(&g.name).to_string(),
                    order: g.order,
                    root: g.root.images().to_vec(),
                    sections: g
                        .sections
                        .iter()
                        .map(|s| self.format_word_ascii(s))
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn from_file(file: &GroupFile) -> Result<Presentation> {
        let names: Vec<&str> = file.generators.iter().map(|g| g.name.as_str()).collect();
        let lookup = |n: &str| {
            names
                .iter()
                .position(|&m| m == n || (n == SIGMA && m == SIGMA_ASCII))
                .map(|i| i as u32)
        };
        let mut gens = Vec::with_capacity(file.generators.len());
        for g in &file.generators {
            let sections = g
                .sections
                .iter()
                .map(|s| parse_tokens(s, lookup))
                .collect::<Result<Vec<_>>>()?;
            gens.push(GeneratorDef {
                name: g.name.clone(),
                root: Perm::from_images(g.root.clone())?,
                sections,
                order: g.order,
            });
        }
        Presentation::new(file.degree, gens)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_file()).expect("group file serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Presentation> {
        let file: GroupFile = serde_json::from_str(text)?;
        Presentation::from_file(&file)
    }
}

/// On-disk group definition. Field order is alphabetical so serialization is
/// canonical.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupFile {
    pub degree: usize,
    pub generators: Vec<GeneratorFile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
    pub root: Vec<usize>,
    pub sections: Vec<String>,
}

pub fn ascii_name(name: &str) -> &str {
    if name == SIGMA {
        SIGMA_ASCII
    } else {
        name
    }
}

fn is_valid_name(name: &str) -> bool {
    !name.is_empty()
        && !name.contains(|c: char| c.is_whitespace() || c == '^' || c == '"')
        && name.parse::<i64>().is_err()
}

fn parse_tokens(text: &str, lookup: impl Fn(&str) -> Option<u32>) -> Result<Word> {
    let mut letters = Vec::new();
    for token in text.split_whitespace() {
        if token == "1" {
            continue;
        }
        let (name, exponent) = match token.split_once('^') {
            Some((n, e)) => {
                let e: i64 = e
                    .parse()
                    .map_err(|_| Error::MalformedToken(token.to_string()))?;
                (n, e)
            }
            None => (token, 1),
        };
        if name.is_empty() || exponent == 0 || exponent.unsigned_abs() > 1 << 20 {
            return Err(Error::MalformedToken(token.to_string()));
        }
        let g = lookup(name).ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
        let l = Letter::new(g, exponent < 0);
        letters.extend(std::iter::repeat_n(l, exponent.unsigned_abs() as usize));
    }
    Ok(Word::from_letters(letters))
}

fn format_with<'a>(w: &Word, name: impl Fn(u32) -> &'a str) -> String {
    if w.is_empty() {
        return "1".to_string();
    }
    let mut out = String::new();
    for (i, l) in w.letters().iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(name(l.generator()));
        if l.is_inverse() {
            out.push_str("^-1");
        }
    }
    out
}
