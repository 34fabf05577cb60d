//! Finite invertible Mealy automata obtained by saturating a presentation,
//! and their minimization by partition refinement.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::presentation::{GeneratorDef, Presentation};
use crate::tree::{root_perm, section};
use crate::word::{Letter, Word};

pub type StateId = usize;

/// States are tree automorphisms whose sections are again states.
#[derive(Clone, Debug)]
pub struct MealyAutomaton {
    degree: usize,
    roots: Vec<Perm>,
    sections: Vec<Vec<StateId>>,
    inverse: Vec<StateId>,
    identity: StateId,
    labels: Vec<String>,
    generators: Vec<(String, StateId)>,
}

impl MealyAutomaton {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn root(&self, s: StateId) -> &Perm {
        &self.roots[s]
    }

    pub fn sections(&self, s: StateId) -> &[StateId] {
        &self.sections[s]
    }

    pub fn inverse(&self, s: StateId) -> StateId {
        self.inverse[s]
    }

    pub fn identity(&self) -> StateId {
        self.identity
    }

    pub fn label(&self, s: StateId) -> &str {
        &self.labels[s]
    }

    /// Original generator names and the states they became.
    pub fn generator_states(&self) -> &[(String, StateId)] {
        &self.generators
    }

    pub fn state_of(&self, name: &str) -> Option<StateId> {
        self.generators
            .iter()
            .find(|(n, _)| n == name)
            .map(|&(_, s)| s)
    }

    /// Image of a vertex path under a state.
    pub fn act(&self, mut s: StateId, path: &[usize]) -> Vec<usize> {
        path.iter()
            .map(|&x| {
                let y = self.roots[s].apply(x);
                s = self.sections[s][x];
                y
            })
            .collect()
    }

    fn push_state(&mut self, label: String, root: Perm, sections: Vec<StateId>) -> StateId {
        self.roots.push(root);
        self.sections.push(sections);
        self.labels.push(label);
        self.inverse.push(usize::MAX);
        self.roots.len() - 1
    }

    /// Adds a state with the given root and sections, together with its
    /// inverse. Returns the new state.
    pub fn adjoin(&mut self, label: &str, root: Perm, sections: Vec<StateId>) -> StateId {
        let s = self.push_state(label.to_string(), root.clone(), sections.clone());
        let inv_root = root.inverse();
        let inv_sections = (0..self.degree)
            .map(|x| self.inverse[sections[inv_root.apply(x)]])
            .collect();
        let t = self.push_state(format!("({label})^-1"), inv_root, inv_sections);
        self.inverse[s] = t;
        self.inverse[t] = s;
        s
    }

    /// Adds states for the product `s·t` and every pair it reaches.
    pub fn product(&mut self, s: StateId, t: StateId) -> StateId {
        let mut pairs: HashMap<(StateId, StateId), StateId> = HashMap::new();
        self.product_rec(s, t, &mut pairs)
    }

    fn product_rec(
        &mut self,
        s: StateId,
        t: StateId,
        pairs: &mut HashMap<(StateId, StateId), StateId>,
    ) -> StateId {
        if t == self.identity {
            return s;
        }
        if s == self.identity {
            return t;
        }
        if let Some(&id) = pairs.get(&(s, t)) {
            return id;
        }
        let root = self.roots[s].then(&self.roots[t]);
        let label = format!("{}·{}", self.labels[s], self.labels[t]);
        let id = self.push_state(label, root, vec![usize::MAX; self.degree]);
        pairs.insert((s, t), id);
        for x in 0..self.degree {
            let sx = self.sections[s][x];
            let ty = self.sections[t][self.roots[s].apply(x)];
            let child = self.product_rec(sx, ty, pairs);
            self.sections[id][x] = child;
        }
        let (is, it) = (self.inverse[s], self.inverse[t]);
        let inv = self.product_rec(it, is, pairs);
        self.inverse[id] = inv;
        self.inverse[inv] = id;
        id
    }

    /// Coarsest partition compatible with roots and sections; two states
    /// share a class iff they are the same automorphism.
    pub fn partition(&self) -> Vec<usize> {
        let mut class = Vec::with_capacity(self.len());
        let mut by_root: HashMap<&Perm, usize> = HashMap::new();
        for r in &self.roots {
            let n = by_root.len();
            class.push(*by_root.entry(r).or_insert(n));
        }
        let mut count = by_root.len();
        loop {
            let mut sig: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let next: Vec<usize> = (0..self.len())
                .map(|s| {
                    let key = (
                        class[s],
                        self.sections[s].iter().map(|&t| class[t]).collect(),
                    );
                    let n = sig.len();
                    *sig.entry(key).or_insert(n)
                })
                .collect();
            let n = sig.len();
            class = next;
            if n == count {
                return class;
            }
            count = n;
        }
    }

    pub fn state_is_trivial(&self, s: StateId) -> bool {
        let class = self.partition();
        class[s] == class[self.identity]
    }

    pub fn states_equal(&self, s: StateId, t: StateId) -> bool {
        let class = self.partition();
        class[s] == class[t]
    }

    /// Quotient by [`partition`](Self::partition). The map sends old states
    /// to new ones; classes are numbered by first occurrence.
    pub fn minimize(&self) -> (MealyAutomaton, Vec<StateId>) {
        let class = self.partition();
        let n = class.iter().max().map_or(0, |m| m + 1);
        let mut rep = vec![usize::MAX; n];
        for (s, &c) in class.iter().enumerate() {
            if rep[c] == usize::MAX {
                rep[c] = s;
            }
        }
        let m = MealyAutomaton {
            degree: self.degree,
            roots: rep.iter().map(|&s| self.roots[s].clone()).collect(),
            sections: rep
                .iter()
                .map(|&s| self.sections[s].iter().map(|&t| class[t]).collect())
                .collect(),
            inverse: rep.iter().map(|&s| class[self.inverse[s]]).collect(),
            identity: class[self.identity],
            labels: rep.iter().map(|&s| self.labels[s].clone()).collect(),
            generators: self
                .generators
                .iter()
                .map(|(name, s)| (name.clone(), class[*s]))
                .collect(),
        };
        (m, class)
    }

    /// One line per state: `id label: root (sections) inverse`.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} states, degree {}\n", self.len(), self.degree);
        for r in self.records() {
            let secs: Vec<String> = r.sections.iter().map(|t| t.to_string()).collect();
            out.push_str(&format!(
                "{}\t{}\troot {}\tsections ({})\tinverse {}{}\n",
                r.id,
                r.label,
                r.root,
                secs.join(", "),
                r.inverse,
                if r.id == self.identity {
                    "\tidentity"
                } else {
                    ""
                }
            ));
        }
        out
    }

    pub fn records(&self) -> Vec<StateRecord> {
        (0..self.len())
            .map(|s| StateRecord {
                id: s,
                label: self.labels[s].clone(),
                root: self.roots[s].clone(),
                sections: self.sections[s].clone(),
                inverse: self.inverse[s],
            })
            .collect()
    }

    /// The automaton as a presentation whose sections are single letters.
    /// A state and its inverse share one generator; the identity state is
    /// the empty word.
    pub fn to_presentation(&self) -> Result<Presentation> {
        let (gens, _) = self.export_letters();
        Presentation::new(self.degree, gens)
    }

    /// Generators of the exported presentation and, for each state, the word
    /// (empty or one letter) that denotes it.
    fn export_letters(&self) -> (Vec<GeneratorDef>, Vec<Word>) {
        let n = self.len();
        let mut letter: Vec<Option<Letter>> = vec![None; n];
        let mut owners: Vec<StateId> = Vec::new();
        let mut names: Vec<String> = Vec::new();
        for s in 0..n {
            if s == self.identity || letter[s].is_some() {
                continue;
            }
            let g = owners.len() as u32;
            owners.push(s);
            let name = self
                .generators
                .iter()
                .find(|(_, t)| *t == s)
                .map(|(name, _)| name.clone())
                .unwrap_or_else(|| format!("q{s}"));
            names.push(name);
            letter[s] = Some(Letter::new(g, false));
            let inv = self.inverse[s];
            if inv != s && inv != self.identity && self.inverse[inv] == s && letter[inv].is_none() {
                letter[inv] = Some(Letter::new(g, true));
            }
        }
        // keep names unique when an original generator shares a state
        let mut seen: HashMap<String, usize> = HashMap::new();
        for (i, name) in names.iter_mut().enumerate() {
            if seen.insert(name.clone(), i).is_some() {
                *name = format!("q{}", owners[i]);
            }
        }
        let words: Vec<Word> = letter
            .iter()
            .map(|l| l.map_or_else(Word::empty, Word::letter))
            .collect();
        let gens = owners
            .iter()
            .zip(names)
            .map(|(&s, name)| GeneratorDef {
                name,
                root: self.roots[s].clone(),
                sections: self.sections[s].iter().map(|&t| words[t].clone()).collect(),
                order: (self.inverse[s] == s && s != self.identity).then_some(2),
            })
            .collect();
        (gens, words)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StateRecord {
    pub id: StateId,
    pub label: String,
    pub root: Perm,
    pub sections: Vec<StateId>,
    pub inverse: StateId,
}

/// State key: rooted prefix absorbed into a permutation, then the rest.
type Key = (Perm, Word);

fn key_of(p: &Presentation, w: &Word) -> (Key, Word) {
    let w = p.normalize(w);
    let mut root = Perm::identity(p.degree());
    let mut cut = 0;
    for &l in w.letters() {
        if !p.generators()[l.generator() as usize].is_rooted() {
            break;
        }
        root = root.then(p.letter_root(l));
        cut += 1;
    }
    let rest = Word::from_letters(w.letters()[cut..].to_vec());
    ((root, rest), w)
}

/// Closes the generators under sections and inverses, one state per
/// distinct key.
pub fn saturate(p: &Presentation, max_states: usize) -> Result<MealyAutomaton> {
    let d = p.degree();
    let mut index: HashMap<Key, StateId> = HashMap::new();
    let mut words: Vec<Word> = Vec::new();
    let mut keys: Vec<Key> = Vec::new();
    let intern = |w: &Word,
                  index: &mut HashMap<Key, StateId>,
                  keys: &mut Vec<Key>,
                  words: &mut Vec<Word>|
     -> Result<StateId> {
        let (key, norm) = key_of(p, w);
        if let Some(&s) = index.get(&key) {
            return Ok(s);
        }
        if keys.len() >= max_states {
            return Err(Error::SaturationExceeded(max_states));
        }
        let s = keys.len();
        index.insert(key.clone(), s);
        keys.push(key);
        words.push(norm);
        Ok(s)
    };

    let identity = intern(&Word::empty(), &mut index, &mut keys, &mut words)?;
    let mut generators = Vec::new();
    for (g, def) in p.generators().iter().enumerate() {
        let s = intern(
            &Word::generator(g as u32),
            &mut index,
            &mut keys,
            &mut words,
        )?;
        generators.push((def.name.clone(), s));
    }
    let mut roots = Vec::new();
    let mut sections: Vec<Vec<StateId>> = Vec::new();
    let mut inverse = Vec::new();
    let mut cursor = 0;
    while cursor < keys.len() {
        let (prefix, rest) = keys[cursor].clone();
        roots.push(prefix.then(&root_perm(p, &rest)));
        let mut row = Vec::with_capacity(d);
        for x in 0..d {
            let s = section(p, &rest, prefix.apply(x));
            row.push(intern(&s, &mut index, &mut keys, &mut words)?);
        }
        sections.push(row);
        let inv = words[cursor].inverse();
        inverse.push(intern(&inv, &mut index, &mut keys, &mut words)?);
        cursor += 1;
    }
    let labels = words.iter().map(|w| p.format_word(w)).collect();
    Ok(MealyAutomaton {
        degree: d,
        roots,
        sections,
        inverse,
        identity,
        labels,
        generators,
    })
}

/// A presentation rewritten over the states of its minimized saturation.
/// Words over the state alphabet have non-increasing section length, and
/// equal states share a letter.
#[derive(Clone, Debug)]
pub struct Canonical {
    pub automaton: MealyAutomaton,
    pub presentation: Presentation,
    letter_words: Vec<Word>,
}

impl Canonical {
    pub fn new(p: &Presentation, max_states: usize) -> Result<Self> {
        let (m, _) = saturate(p, max_states)?.minimize();
        let (gens, state_words) = m.export_letters();
        let presentation = Presentation::new(m.degree, gens)?;
        let mut letter_words = Vec::with_capacity(2 * p.generator_count());
        for (_, s) in m.generator_states() {
            let w = &state_words[*s];
            letter_words.push(w.clone());
            letter_words.push(w.inverse());
        }
        Ok(Canonical {
            automaton: m,
            presentation,
            letter_words,
        })
    }

    /// Rewrites a word over the original generators.
    pub fn translate(&self, w: &Word) -> Word {
        let mut r = self.presentation.reducer();
        for &l in w.letters() {
            r.extend(&self.letter_words[l.index()]);
        }
        r.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decision::{is_trivial, Budget};
    use crate::tree::{act, Vertex};
    use crate::zoo;

    #[test]
    fn lamplighter_saturates() {
        let p = zoo::lamplighter();
        let m = saturate(&p, 100).unwrap();
        let a = m.state_of("a").unwrap();
        let s0 = m.sections(a)[0];
        let s1 = m.sections(a)[1];
        assert_eq!(s0, a);
        assert_eq!(m.label(s1), "a σ");
        assert!(m.root(a).is_identity());
    }

    #[test]
    fn basilica_has_three_states_up_to_equality() {
        let p = zoo::basilica();
        let (m, _) = saturate(&p, 100).unwrap().minimize();
        // id, a, b and their inverses
        assert_eq!(m.len(), 5);
        let (a, b) = (m.state_of("a").unwrap(), m.state_of("b").unwrap());
        assert_eq!(m.sections(a), &[m.identity(), b]);
        assert_eq!(m.sections(b), &[m.identity(), a]);
    }

    #[test]
    fn ggs_conjugator_saturates() {
        let (p, _) = zoo::ggs_kh(3).unwrap();
        let m = saturate(&p, 100).unwrap();
        let h = m.state_of("h").unwrap();
        assert!(m.root(h).is_identity());
        let labels: Vec<&str> = m.sections(h).iter().map(|&s| m.label(s)).collect();
        assert_eq!(labels, vec!["a h", "a^-1 h", "h"]);
        assert!(m.len() <= 4 * 3 * 2 + 1);
    }

    #[test]
    fn duplicate_identity_merges() {
        let p = zoo::basilica();
        let mut m = saturate(&p, 100).unwrap();
        let id = m.identity();
        let copy = m.adjoin("e2", Perm::identity(2), vec![id, id]);
        assert!(m.state_is_trivial(copy));
        let (min, map) = m.minimize();
        assert_eq!(map[copy], min.identity());
        let (again, _) = min.minimize();
        assert_eq!(again.len(), min.len());
    }

    #[test]
    fn odometer_and_inverse_differ() {
        let p = zoo::adding_machine();
        let (m, _) = saturate(&p, 100).unwrap().minimize();
        let x = m.state_of("x").unwrap();
        assert_ne!(x, m.inverse(x));
        // level-2 truncation tells them apart
        assert_ne!(m.act(x, &[0, 0]), m.act(m.inverse(x), &[0, 0]));
    }

    #[test]
    fn lamplighter_c_as_a_state() {
        let p = zoo::lamplighter();
        let mut m = saturate(&p, 100).unwrap();
        let s = m.state_of("σ").unwrap();
        assert!(!m.state_is_trivial(s));
        let c = m.adjoin("c", Perm::identity(2), vec![s, s]);
        assert!(!m.state_is_trivial(c));
        let cc = m.product(c, c);
        assert!(m.state_is_trivial(cc));
        assert!(m.state_is_trivial(m.identity()));
    }

    #[test]
    fn saturation_budget() {
        // a = (a, a a) is not finite-state
        let p = Presentation::new(
            2,
            vec![GeneratorDef {
                name: "a".into(),
                root: Perm::transposition(2, 0, 1),
                sections: vec![
                    Word::generator(0),
                    Word::from_letters(vec![Letter::new(0, false); 2]),
                ],
                order: None,
            }],
        )
        .unwrap();
        assert_eq!(saturate(&p, 50).unwrap_err(), Error::SaturationExceeded(50));
    }

    #[test]
    fn oracle_agreement_and_action_preserved() {
        for (name, p) in zoo::all_presets() {
            let Ok(m) = saturate(&p, 2000) else { continue };
            let (min, map) = m.minimize();
            // recompute words for states via labels of the saturated automaton
            for (s, &class) in map.iter().enumerate() {
                let w = p.parse_word(m.label(s)).unwrap();
                let direct = is_trivial(&p, &w, &Budget::default());
                assert_eq!(
                    m.state_is_trivial(s),
                    direct.is_trivial(),
                    "{name}: state {}",
                    m.label(s)
                );
                for i in 0..p.degree().pow(4) {
                    let v = Vertex::from_index(i, 4, p.degree());
                    let before = m.act(s, &v.0);
                    assert_eq!(before, min.act(class, &v.0), "{name}");
                    assert_eq!(before, act(&p, &w, &v).0, "{name}");
                }
            }
        }
    }

    #[test]
    fn canonical_translation_preserves_elements() {
        let p = zoo::lamplighter();
        let c = Canonical::new(&p, 1000).unwrap();
        let w = p.parse_word("a σ a^-1 a σ σ a").unwrap();
        let t = c.translate(&w);
        for i in 0..64 {
            let v = Vertex::from_index(i, 6, 2);
            assert_eq!(act(&p, &w, &v), act(&c.presentation, &t, &v));
        }
        let json = c.automaton.to_presentation().unwrap().to_json();
        let back = Presentation::from_json(&json).unwrap();
        assert_eq!(back.to_json(), json);
    }
}
