//! Iterated commutators, left Engel tests, ball surveys and fractality
//! certificates.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::decision::{are_equal, is_trivial, perm_on_level, Budget, Outcome, Stats};
use crate::error::{Error, Result};
use crate::mealy::Canonical;
use crate::perm::Perm;
use crate::presentation::Presentation;
use crate::tree::{is_root_trivial, root_perm, section};
use crate::word::{Letter, Word};

/// `[h,_n g]`: `c_0 = h`, `c_{k+1} = c_k^-1 g^-1 c_k g`.
pub fn iterated_commutator(
    p: &Presentation,
    h: &Word,
    g: &Word,
    n: usize,
    max_word_length: usize,
) -> Result<Word> {
    let mut c = p.normalize(h);
    for k in 0..n {
        if c.is_empty() {
            break;
        }
        c = p.commutator(&c, g);
        if c.len() > max_word_length {
            return Err(Error::BudgetExceeded(Stats {
                states: 0,
                max_word_length: c.len(),
                max_level: k + 1,
            }));
        }
    }
    Ok(c)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum EngelResult {
    /// `[h,_n g] = 1` and `n` is the least such index.
    EngelAt(usize),
    /// `[h,_k g] ≠ 1` for every `k ≤ n`.
    NotEngelUpTo(usize),
    /// Undecided at index `at`.
    BudgetExceeded { at: usize, stats: Stats },
}

/// Decision engine for one presentation. When the presentation saturates
/// to a finite automaton, words are rewritten over the minimized states
/// before any commutator is formed; the answers are the same, the words are
/// shorter.
pub struct Engine<'a> {
    p: &'a Presentation,
    canonical: Option<Canonical>,
}

const CANONICAL_STATE_CAP: usize = 5_000;

impl<'a> Engine<'a> {
    pub fn new(p: &'a Presentation) -> Self {
        Engine {
            p,
            canonical: Canonical::new(p, CANONICAL_STATE_CAP).ok(),
        }
    }

    /// No automaton rewriting.
    pub fn plain(p: &'a Presentation) -> Self {
        Engine { p, canonical: None }
    }

    pub fn presentation(&self) -> &Presentation {
        self.p
    }

    pub fn is_accelerated(&self) -> bool {
        self.canonical.is_some()
    }

    fn working(&self) -> &Presentation {
        self.canonical.as_ref().map_or(self.p, |c| &c.presentation)
    }

    fn translate(&self, w: &Word) -> Word {
        match &self.canonical {
            Some(c) => c.translate(w),
            None => self.p.normalize(w),
        }
    }

    pub fn is_trivial(&self, w: &Word, budget: &Budget) -> Outcome {
        match &self.canonical {
            Some(c) => strip_closure(is_trivial(&c.presentation, &c.translate(w), budget)),
            None => is_trivial(self.p, w, budget),
        }
    }

    pub fn are_equal(&self, u: &Word, v: &Word, budget: &Budget) -> Outcome {
        let w = self.p.multiply(u, &v.inverse());
        self.is_trivial(&w, budget)
    }

    /// Least `n ≤ n_max` with `[h,_n g] = 1`.
    pub fn left_engel_test(
        &self,
        g: &Word,
        h: &Word,
        n_max: usize,
        budget: &Budget,
    ) -> EngelResult {
        self.left_engel_test_with_stats(g, h, n_max, budget).0
    }

    /// As [`left_engel_test`](Self::left_engel_test), with the work done
    /// summed over all decisions.
    pub fn left_engel_test_with_stats(
        &self,
        g: &Word,
        h: &Word,
        n_max: usize,
        budget: &Budget,
    ) -> (EngelResult, Stats) {
        let q = self.working();
        let g = self.translate(g);
        let mut c = self.translate(h);
        let mut total = Stats::default();
        for n in 0..=n_max {
            if n > 0 {
                c = q.commutator(&c, &g);
            }
            total.max_word_length = total.max_word_length.max(c.len());
            if c.len() > budget.max_word_length {
                return (
                    EngelResult::BudgetExceeded {
                        at: n,
                        stats: total,
                    },
                    total,
                );
            }
            let outcome = is_trivial(q, &c, budget);
            total.merge(outcome.stats());
            match outcome {
                Outcome::Trivial { .. } => return (EngelResult::EngelAt(n), total),
                Outcome::Nontrivial { .. } => {}
                Outcome::BudgetExceeded { .. } => {
                    return (
                        EngelResult::BudgetExceeded {
                            at: n,
                            stats: total,
                        },
                        total,
                    );
                }
            }
        }
        (EngelResult::NotEngelUpTo(n_max), total)
    }
}

fn strip_closure(o: Outcome) -> Outcome {
    match o {
        Outcome::Trivial { stats, .. } => Outcome::Trivial {
            closure: Vec::new(),
            stats,
        },
        other => other,
    }
}

/// [`Engine::left_engel_test`] with automaton rewriting when available.
pub fn left_engel_test(
    p: &Presentation,
    g: &Word,
    h: &Word,
    n_max: usize,
    budget: &Budget,
) -> EngelResult {
    Engine::new(p).left_engel_test(g, h, n_max, budget)
}

/// Checks `([h,_n g])_x = [h_x,_n g_x]` for every coordinate; both `h` and
/// `g` must fix the first level.
pub fn componentwise_commutator_check(
    p: &Presentation,
    h: &Word,
    g: &Word,
    n: usize,
    budget: &Budget,
) -> Result<bool> {
    if !is_root_trivial(p, h) || !is_root_trivial(p, g) {
        return Err(Error::StabilizerRequired);
    }
    let whole = iterated_commutator(p, h, g, n, budget.max_word_length)?;
    for x in 0..p.degree() {
        let lhs = section(p, &whole, x);
        let rhs = iterated_commutator(
            p,
            &section(p, h, x),
            &section(p, g, x),
            n,
            budget.max_word_length,
        )?;
        if !are_equal(p, &lhs, &rhs, budget).is_trivial() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Distinct elements of a ball, in shortlex order of the generating words.
#[derive(Clone, Debug)]
pub struct Ball {
    /// `(spelling over the generators, reduced word in the presentation)`
    pub elements: Vec<(Vec<Letter>, Word)>,
    /// Pairs whose equality could not be decided; both were kept.
    pub undecided: usize,
}

/// Enumerates reduced products of `generators` up to `radius`, dropping
/// elements equal to an earlier one. Letters of the spelling refer to
/// positions in `generators`.
pub fn ball(engine: &Engine, generators: &[Word], radius: usize, budget: &Budget) -> Ball {
    let p = engine.presentation();
    let k = generators.len() as u32;
    let mut spellings: Vec<Vec<Letter>> = vec![Vec::new()];
    let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..radius {
        let mut next = Vec::new();
        for s in &layer {
            for g in 0..k {
                for inv in [false, true] {
                    let l = Letter::new(g, inv);
                    if s.last() == Some(&l.inverse()) {
                        continue;
                    }
                    let mut t = s.clone();
                    t.push(l);
                    next.push(t);
                }
            }
        }
        spellings.extend(next.iter().cloned());
        layer = next;
    }
    let fingerprint_level = fingerprint_level(p);
    let mut elements: Vec<(Vec<Letter>, Word)> = Vec::new();
    let mut fingerprints: Vec<Option<Vec<u32>>> = Vec::new();
    let mut undecided = 0;
    for s in spellings {
        let mut r = p.reducer();
        for l in &s {
            let g = &generators[l.generator() as usize];
            if l.is_inverse() {
                r.extend(&g.inverse());
            } else {
                r.extend(g);
            }
        }
        let w = r.finish();
        let fp = perm_on_level(p, &w, fingerprint_level, &Budget::small())
            .ok()
            .map(|lp| lp.images);
        let mut duplicate = false;
        for (i, (_, u)) in elements.iter().enumerate() {
            if *u == w {
                duplicate = true;
                break;
            }
            if let (Some(a), Some(b)) = (&fp, &fingerprints[i]) {
                if a != b {
                    continue;
                }
            }
            match engine.are_equal(u, &w, budget) {
                Outcome::Trivial { .. } => {
                    duplicate = true;
                    break;
                }
                Outcome::Nontrivial { .. } => {}
                Outcome::BudgetExceeded { .. } => undecided += 1,
            }
        }
        if !duplicate {
            elements.push((s, w));
            fingerprints.push(fp);
        }
    }
    Ball {
        elements,
        undecided,
    }
}

fn fingerprint_level(p: &Presentation) -> usize {
    let mut n = 1;
    while p.degree().pow(n as u32 + 1) <= 256 {
        n += 1;
    }
    n
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ElementStatus {
    NonEngel { witness: String, checked: usize },
    PossiblyEngel { checked: usize },
    Budget { stats: Stats },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ElementRecord {
    pub element: String,
    #[serde(flatten)]
    pub status: ElementStatus,
    #[serde(skip)]
    pub word: Word,
    #[serde(skip)]
    pub witness_word: Option<Word>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SurveyParams {
    pub r_g: usize,
    pub r_h: usize,
    pub n_max: usize,
    pub budget: Budget,
    #[serde(skip)]
    pub threads: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurveyReport {
    pub group: String,
    pub generators: Vec<String>,
    pub params: SurveyParams,
    pub records: Vec<ElementRecord>,
    pub undecided_equalities: usize,
    pub stats: Stats,
}

impl SurveyReport {
    pub fn all_non_engel(&self) -> bool {
        self.records
            .iter()
            .all(|r| matches!(r.status, ElementStatus::NonEngel { .. }))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "survey {} over [{}] r_g={} r_h={} n_max={}\n",
            self.group,
            self.generators.join(", "),
            self.params.r_g,
            self.params.r_h,
            self.params.n_max
        );
        for r in &self.records {
            let line = match &r.status {
                ElementStatus::NonEngel { witness, checked } => {
                    format!(
                        "{}\tnon-Engel\twitness {}\tn<={}",
                        r.element, witness, checked
                    )
                }
                ElementStatus::PossiblyEngel { checked } => {
                    format!("{}\tpossibly-Engel\tn<={}", r.element, checked)
                }
                ElementStatus::Budget { stats } => format!("{}\tbudget\t{}", r.element, stats),
            };
            out.push_str(&line);
            out.push('\n');
        }
        out.push_str(&format!(
            "undecided equalities: {}\nstats: {}\n",
            self.undecided_equalities, self.stats
        ));
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// For every nontrivial element `g` of the radius-`r_g` ball, looks for `h`
/// in the radius-`r_h` ball with `[h,_n g] ≠ 1` for all `n ≤ n_max`.
pub fn engel_survey(
    p: &Presentation,
    group: &str,
    generators: Option<&[Word]>,
    params: &SurveyParams,
) -> SurveyReport {
    let engine = Engine::new(p);
    let gens: Vec<Word> = match generators {
        Some(g) => g.to_vec(),
        None => (0..p.generator_count() as u32)
            .map(Word::generator)
            .collect(),
    };
    let budget = params.budget;
    let dedup_budget = Budget {
        max_closure_states: budget.max_closure_states.min(20_000),
        ..budget
    };
    let g_ball = ball(&engine, &gens, params.r_g, &dedup_budget);
    let h_ball = ball(&engine, &gens, params.r_h, &dedup_budget);
    let candidates: Vec<&Word> = g_ball
        .elements
        .iter()
        .map(|(_, w)| w)
        .filter(|w| !engine.is_trivial(w, &budget).is_trivial())
        .collect();
    let hs: Vec<&Word> = h_ball
        .elements
        .iter()
        .map(|(_, w)| w)
        .filter(|w| !w.is_empty())
        .collect();

    let survey_one = |g: &Word| -> (ElementRecord, Stats) {
        let mut stats = Stats::default();
        let mut budget_hit: Option<Stats> = None;
        for h in &hs {
            let (result, s) = engine.left_engel_test_with_stats(g, h, params.n_max, &budget);
            stats.merge(&s);
            match result {
                EngelResult::NotEngelUpTo(n) => {
                    return (
                        ElementRecord {
                            element: p.format_word(g),
                            status: ElementStatus::NonEngel {
                                witness: p.format_word(h),
                                checked: n,
                            },
                            word: g.clone(),
                            witness_word: Some((*h).clone()),
                        },
                        stats,
                    );
                }
                EngelResult::EngelAt(_) => {}
                EngelResult::BudgetExceeded { stats: s, .. } => {
                    budget_hit.get_or_insert(s);
                }
            }
        }
        let status = match budget_hit {
            Some(s) => ElementStatus::Budget { stats: s },
            None => ElementStatus::PossiblyEngel {
                checked: params.n_max,
            },
        };
        (
            ElementRecord {
                element: p.format_word(g),
                status,
                word: g.clone(),
                witness_word: None,
            },
            stats,
        )
    };

    let results: Vec<(ElementRecord, Stats)> = if params.threads > 1 {
        match rayon::ThreadPoolBuilder::new()
            .num_threads(params.threads)
            .build()
        {
            Ok(pool) => pool.install(|| candidates.par_iter().map(|g| survey_one(g)).collect()),
            Err(_) => candidates.iter().map(|g| survey_one(g)).collect(),
        }
    } else {
        candidates.iter().map(|g| survey_one(g)).collect()
    };
    let mut stats = Stats::default();
    let records = results
        .into_iter()
        .map(|(r, s)| {
            stats.merge(&s);
            r
        })
        .collect();
    SurveyReport {
        group: group.to_string(),
        generators: gens.iter().map(|g| p.format_word(g)).collect(),
        params: *params,
        records,
        undecided_equalities: g_ball.undecided + h_ball.undecided,
        stats,
    }
}

/// Witness words `w(g, x)` in the first level stabilizer with `w_x = g`,
/// keyed by generator label and coordinate.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FractalCertificate {
    pub witnesses: BTreeMap<(String, usize), Word>,
}

impl FractalCertificate {
    /// JSON object mapping `"generator,coordinate"` to word text.
    pub fn to_json(&self, p: &Presentation) -> String {
        let map: BTreeMap<String, String> = self
            .witnesses
            .iter()
            .map(|((g, x), w)| (format!("{g},{x}"), p.format_word_ascii(w)))
            .collect();
        let mut s = serde_json::to_string_pretty(&map).expect("certificate serializes");
        s.push('\n');
        s
    }

    pub fn from_json(p: &Presentation, text: &str) -> Result<Self> {
        let map: BTreeMap<String, String> = serde_json::from_str(text)?;
        let mut witnesses = BTreeMap::new();
        for (key, word) in map {
            let (g, x) = key
                .rsplit_once(',')
                .ok_or_else(|| Error::Format(format!("bad certificate key {key:?}")))?;
            let x: usize = x
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("bad coordinate in {key:?}")))?;
            witnesses.insert((g.trim().to_string(), x), p.parse_word(&word)?);
        }
        Ok(FractalCertificate { witnesses })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum PairVerdict {
    Ok,
    Missing,
    NotInStabilizer,
    OutsideSubgroup,
    SectionDiffers { detail: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairCheck {
    pub generator: String,
    pub coordinate: usize,
    #[serde(flatten)]
    pub verdict: PairVerdict,
}

/// Generators of a (sub)group with display labels.
pub fn labelled(p: &Presentation, generators: Option<&[Word]>) -> Vec<(String, Word)> {
    match generators {
        Some(gs) => gs
            .iter()
            .map(|g| (p.format_word_ascii(g), g.clone()))
            .collect(),
        None => (0..p.generator_count() as u32)
            .map(|g| {
                let w = Word::generator(g);
                (p.format_word_ascii(&w), w)
            })
            .collect(),
    }
}

/// One verdict per `(generator, coordinate)` pair.
pub fn verify_fractal_certificate(
    p: &Presentation,
    generators: &[(String, Word)],
    cert: &FractalCertificate,
    budget: &Budget,
) -> Vec<PairCheck> {
    // words over single-letter subgroup generators must stay in the subgroup
    let allowed: Option<Vec<u32>> = generators
        .iter()
        .map(|(_, w)| (w.len() == 1).then(|| w.letters()[0].generator()))
        .collect();
    let mut out = Vec::new();
    for (label, g) in generators {
        for x in 0..p.degree() {
            let key = (label.clone(), x);
            let alt = (label.replace("s1", "σ"), x);
            let verdict = match cert
                .witnesses
                .get(&key)
                .or_else(|| cert.witnesses.get(&alt))
            {
                None => PairVerdict::Missing,
                Some(w) if !is_root_trivial(p, w) => PairVerdict::NotInStabilizer,
                Some(w)
                    if allowed.as_ref().is_some_and(|a| {
                        w.letters().iter().any(|l| !a.contains(&l.generator()))
                    }) =>
                {
                    PairVerdict::OutsideSubgroup
                }
                Some(w) => match are_equal(p, &section(p, w, x), g, budget) {
                    Outcome::Trivial { .. } => PairVerdict::Ok,
                    other => PairVerdict::SectionDiffers {
                        detail: match other {
                            Outcome::Nontrivial { witness, .. } => {
                                format!("differs at vertex {witness}")
                            }
                            _ => "undecided within budget".into(),
                        },
                    },
                },
            };
            out.push(PairCheck {
                generator: label.clone(),
                coordinate: x,
                verdict,
            });
        }
    }
    out
}

pub fn certificate_holds(checks: &[PairCheck]) -> bool {
    checks.iter().all(|c| c.verdict == PairVerdict::Ok)
}

/// Schreier generators of the first level stabilizer of `⟨generators⟩`.
pub fn stabilizer_generators(p: &Presentation, generators: &[Word]) -> Vec<Word> {
    let roots: Vec<Perm> = generators.iter().map(|g| root_perm(p, g)).collect();
    let mut elements = vec![Perm::identity(p.degree())];
    let mut reps = vec![Word::empty()];
    let mut cursor = 0;
    while cursor < elements.len() {
        for (i, r) in roots.iter().enumerate() {
            let next = elements[cursor].then(r);
            if !elements.contains(&next) {
                elements.push(next);
                reps.push(p.multiply(&reps[cursor], &generators[i]));
            }
        }
        cursor += 1;
    }
    let mut out: Vec<Word> = Vec::new();
    for (t, rep) in reps.iter().enumerate() {
        for (i, r) in roots.iter().enumerate() {
            let target = elements
                .iter()
                .position(|e| *e == elements[t].then(r))
                .expect("closed");
            let w = p.multiply(&p.multiply(rep, &generators[i]), &reps[target].inverse());
            if !w.is_empty() && !out.contains(&w) {
                out.push(w);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FractalSearch {
    Found(FractalCertificate),
    NotFound {
        partial: FractalCertificate,
        missing: Vec<(String, usize)>,
    },
}

/// Breadth-first search over products of stabilizer generators of length at
/// most `radius` for section witnesses.
pub fn search_fractal_witnesses(
    p: &Presentation,
    generators: &[(String, Word)],
    radius: usize,
    budget: &Budget,
) -> FractalSearch {
    let gen_words: Vec<Word> = generators.iter().map(|(_, w)| w.clone()).collect();
    let stab = stabilizer_generators(p, &gen_words);
    let engine = Engine::new(p);
    let small = Budget {
        max_closure_states: budget.max_closure_states.min(20_000),
        ..*budget
    };
    let products = ball(&engine, &stab, radius, &small);
    let mut cert = FractalCertificate::default();
    let level = fingerprint_level(p);
    let target_fp: Vec<Option<Vec<u32>>> = gen_words
        .iter()
        .map(|g| {
            perm_on_level(p, g, level, &Budget::small())
                .ok()
                .map(|l| l.images)
        })
        .collect();
    'outer: for (_, w) in &products.elements {
        for x in 0..p.degree() {
            let s = section(p, w, x);
            let fp = perm_on_level(p, &s, level, &Budget::small())
                .ok()
                .map(|l| l.images);
            for (i, (label, g)) in generators.iter().enumerate() {
                let key = (label.clone(), x);
                if cert.witnesses.contains_key(&key) {
                    continue;
                }
                if let (Some(a), Some(b)) = (&fp, &target_fp[i]) {
                    if a != b {
                        continue;
                    }
                }
                if engine.are_equal(&s, g, &small).is_trivial() {
                    cert.witnesses.insert(key, w.clone());
                }
            }
            if cert.witnesses.len() == generators.len() * p.degree() {
                break 'outer;
            }
        }
    }
    let missing: Vec<(String, usize)> = generators
        .iter()
        .flat_map(|(l, _)| (0..p.degree()).map(move |x| (l.clone(), x)))
        .filter(|k| !cert.witnesses.contains_key(k))
        .collect();
    if missing.is_empty() {
        FractalSearch::Found(cert)
    } else {
        FractalSearch::NotFound {
            partial: cert,
            missing,
        }
    }
}

/// `z^p` for each generator `z`, at every coordinate.
pub fn power_certificate(p: &Presentation, generators: &[(String, Word)]) -> FractalCertificate {
    let d = p.degree() as i64;
    let mut cert = FractalCertificate::default();
    for (label, g) in generators {
        let w = p.power(g, d);
        for x in 0..p.degree() {
            cert.witnesses.insert((label.clone(), x), w.clone());
        }
    }
    cert
}
