//! Preset groups.
//!
//! The Grigorchuk and Gupta–Sidki recursions are the standard ones from the
//! literature and are included as imported definitions for spot checks.

use serde::Serialize;

use crate::decision::{are_equal, is_trivial, Budget, Outcome};
use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::presentation::{GeneratorDef, Presentation, SIGMA};
use crate::tree::is_root_trivial;
use crate::word::Word;

/// Generators of a subgroup, as words in an ambient presentation.
#[derive(Clone, Debug)]
pub struct SubgroupSpec {
    pub label: String,
    pub generators: Vec<Word>,
}

#[derive(Clone, Debug)]
pub struct Preset {
    pub name: String,
    pub group: Presentation,
    pub subgroups: Vec<SubgroupSpec>,
}

impl Preset {
    pub fn subgroup(&self, label: &str) -> Option<&SubgroupSpec> {
        self.subgroups.iter().find(|s| s.label == label)
    }
}

pub const PRESET_NAMES: &[&str] = &[
    "lamplighter",
    "adding-machine-H",
    "basilica",
    "bsv",
    "grigorchuk",
    "gupta-sidki:<p>",
    "ggs:<p>:<e1,…,e_{p-1}>",
    "ggs-K:<p>",
    "ggs-Kh:<p>",
    "rooted:<d>:<images>",
];

fn gen(name: &str, root: Perm, sections: Vec<Word>, order: Option<u32>) -> GeneratorDef {
    GeneratorDef {
        name: name.to_string(),
        root,
        sections,
        order,
    }
}

fn letters(g: u32, exponent: i64) -> Word {
    let l = crate::word::Letter::new(g, exponent < 0);
    Word::from_letters(vec![l; exponent.unsigned_abs() as usize])
}

fn swap() -> Perm {
    Perm::transposition(2, 0, 1)
}

/// `⟨a, σ⟩` with `a = (a, aσ)`.
pub fn lamplighter() -> Presentation {
    let a_sigma = Word::generator(0).concat(&Word::generator(1));
    Presentation::new(
        2,
        vec![
            gen(
                "a",
                Perm::identity(2),
                vec![Word::generator(0), a_sigma],
                None,
            ),
            gen(SIGMA, swap(), vec![Word::empty(); 2], Some(2)),
        ],
    )
    .expect("lamplighter")
}

/// `H = ⟨σ, x⟩` with the adding machine `x = (1, x)σ`.
pub fn adding_machine() -> Presentation {
    Presentation::new(
        2,
        vec![
            gen(SIGMA, swap(), vec![Word::empty(); 2], Some(2)),
            gen("x", swap(), vec![Word::empty(), Word::generator(1)], None),
        ],
    )
    .expect("adding machine")
}

/// `a = (1, b)`, `b = (1, a)σ`.
pub fn basilica() -> Presentation {
    Presentation::new(
        2,
        vec![
            gen(
                "a",
                Perm::identity(2),
                vec![Word::empty(), Word::generator(1)],
                None,
            ),
            gen("b", swap(), vec![Word::empty(), Word::generator(0)], None),
        ],
    )
    .expect("basilica")
}

/// Brunner–Sidki–Vieira: `c = (1, c^-1)σ`, `d = (1, d)σ`.
pub fn bsv() -> Presentation {
    Presentation::new(
        2,
        vec![
            gen("bsv_c", swap(), vec![Word::empty(), letters(0, -1)], None),
            gen(
                "bsv_d",
                swap(),
                vec![Word::empty(), Word::generator(1)],
                None,
            ),
        ],
    )
    .expect("bsv")
}

/// `a = σ`, `b = (a, c)`, `c = (a, d)`, `d = (1, b)`.
pub fn grigorchuk() -> Presentation {
    let id = Perm::identity(2);
    Presentation::new(
        2,
        vec![
            gen("a", swap(), vec![Word::empty(); 2], Some(2)),
            gen(
                "b",
                id.clone(),
                vec![Word::generator(0), Word::generator(2)],
                Some(2),
            ),
            gen(
                "c",
                id.clone(),
                vec![Word::generator(0), Word::generator(3)],
                Some(2),
            ),
            gen("d", id, vec![Word::empty(), Word::generator(1)], Some(2)),
        ],
    )
    .expect("grigorchuk")
}

/// `a` the rooted `p`-cycle, `t = (a, a^-1, 1, …, 1, t)`.
pub fn gupta_sidki(p: usize) -> Result<Presentation> {
    check_odd_prime(p)?;
    let mut sections = vec![Word::empty(); p];
    sections[0] = Word::generator(0);
    sections[1] = letters(0, -1);
    sections[p - 1] = Word::generator(1);
    Presentation::new(
        p,
        vec![
            gen("a", Perm::cycle(p), vec![Word::empty(); p], Some(p as u32)),
            gen("t", Perm::identity(p), sections, Some(p as u32)),
        ],
    )
}

/// GGS group with defining vector `e`: `a` the rooted `p`-cycle and
/// `b = (a^{e_1}, …, a^{e_{p-1}}, b)`.
pub fn ggs(p: usize, e: &[u32]) -> Result<Presentation> {
    check_odd_prime(p)?;
    if e.len() != p - 1 {
        return Err(Error::BadParams(format!(
            "defining vector needs {} entries, got {}",
            p - 1,
            e.len()
        )));
    }
    if e.iter().any(|&x| x as usize >= p) {
        return Err(Error::BadParams(format!("entries must lie in [0, {p})")));
    }
    if e.iter().all(|&x| x == 0) {
        return Err(Error::BadParams("defining vector must not be zero".into()));
    }
    let mut sections: Vec<Word> = e.iter().map(|&k| letters(0, k as i64)).collect();
    sections.push(Word::generator(1));
    Presentation::new(
        p,
        vec![
            gen("a", Perm::cycle(p), vec![Word::empty(); p], Some(p as u32)),
            gen("b", Perm::identity(p), sections, Some(p as u32)),
        ],
    )
}

/// `y_0 = b a^-1` and `y_i = y_0^{a^i}` in the constant-vector GGS group.
pub fn ggs_k_generators(g: &Presentation, p: usize) -> Vec<Word> {
    let a = g.generator_word("a").expect("a");
    let b = g.generator_word("b").expect("b");
    let y0 = g.multiply(&b, &g.invert(&a));
    (0..p as i64)
        .map(|i| g.conjugate(&y0, &g.power(&a, i)))
        .collect()
}

pub fn ggs_k(p: usize) -> Result<Preset> {
    let g = ggs(p, &vec![1; p - 1])?;
    let ys = ggs_k_generators(&g, p);
    Ok(Preset {
        name: format!("ggs-K:{p}"),
        group: g,
        subgroups: vec![SubgroupSpec {
            label: "K".into(),
            generators: ys,
        }],
    })
}

/// The constant-vector GGS group extended by the conjugator
/// `h = (a h, a^2 h, …, a^{p-1} h, h)` and the states
/// `z_i = (1, …, z_i, …, 1) a^-1` with `z_i` at coordinate `i - 1`.
///
/// Returns the presentation and the subgroup `⟨z_1, …, z_p⟩`.
pub fn ggs_kh(p: usize) -> Result<(Presentation, SubgroupSpec)> {
    let base = ggs(p, &vec![1; p - 1])?;
    let mut gens = base.generators().to_vec();
    let h = gens.len() as u32;
    let h_sections = (0..p)
        .map(|x| {
            let j = (x + 1) % p;
            letters(0, j as i64).concat(&Word::generator(h))
        })
        .collect();
    gens.push(gen("h", Perm::identity(p), h_sections, None));
    let inv_cycle = Perm::cycle(p).inverse();
    for i in 1..=p {
        let z = gens.len() as u32;
        let mut sections = vec![Word::empty(); p];
        sections[i - 1] = Word::generator(z);
        gens.push(gen(&format!("z{i}"), inv_cycle.clone(), sections, None));
    }
    let pres = Presentation::new(p, gens)?;
    let zs = (1..=p)
        .map(|i| pres.generator_word(&format!("z{i}")).expect("z"))
        .collect();
    Ok((
        pres,
        SubgroupSpec {
            label: "Kh".into(),
            generators: zs,
        },
    ))
}

/// A single rooted generator `σ` acting by `perm`.
pub fn rooted(d: usize, perm: Perm) -> Result<Presentation> {
    if perm.degree() != d {
        return Err(Error::BadParams(format!(
            "permutation must have degree {d}"
        )));
    }
    let order = perm.order() as u32;
    Presentation::new(
        d,
        vec![gen(SIGMA, perm, vec![Word::empty(); d], Some(order))],
    )
}

fn check_odd_prime(p: usize) -> Result<()> {
    let prime = p >= 2
        && (2..)
            .take_while(|k| k * k <= p)
            .all(|k| !p.is_multiple_of(k));
    if prime && p != 2 {
        Ok(())
    } else {
        Err(Error::BadParams(format!("{p} is not an odd prime")))
    }
}

fn parse_usize(s: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| Error::BadParams(format!("{s:?} is not a number")))
}

fn parse_list(s: &str) -> Result<Vec<usize>> {
    s.split(',').map(|t| parse_usize(t.trim())).collect()
}

/// Resolves names such as `basilica`, `ggs:3:1,1` or `ggs-Kh:3`.
pub fn preset(spec: &str) -> Result<Preset> {
    let mut parts = spec.split(':');
    let name = parts.next().unwrap_or_default();
    let params: Vec<&str> = parts.collect();
    let want = |n: usize| {
        if params.len() == n {
            Ok(())
        } else {
            Err(Error::BadParams(format!(
                "{name} takes {n} parameter(s), got {}",
                params.len()
            )))
        }
    };
    let simple = |group: Presentation| Preset {
        name: spec.to_string(),
        group,
        subgroups: Vec::new(),
    };
    match name {
        "lamplighter" => want(0).map(|_| simple(lamplighter())),
        "adding-machine-H" | "adding-machine" | "H" => want(0).map(|_| simple(adding_machine())),
        "basilica" => want(0).map(|_| simple(basilica())),
        "bsv" => want(0).map(|_| simple(bsv())),
        "grigorchuk" => want(0).map(|_| simple(grigorchuk())),
        "gupta-sidki" => {
            want(1)?;
            Ok(simple(gupta_sidki(parse_usize(params[0])?)?))
        }
        "ggs" => {
            want(2)?;
            let p = parse_usize(params[0])?;
            let e: Vec<u32> = parse_list(params[1])?
                .into_iter()
                .map(|x| x as u32)
                .collect();
            Ok(simple(ggs(p, &e)?))
        }
        "ggs-K" => {
            want(1)?;
            let mut k = ggs_k(parse_usize(params[0])?)?;
            k.name = spec.to_string();
            Ok(k)
        }
        "ggs-Kh" => {
            want(1)?;
            let p = parse_usize(params[0])?;
            let (group, kh) = ggs_kh(p)?;
            let ys = ggs_k_generators(&group, p);
            Ok(Preset {
                name: spec.to_string(),
                group,
                subgroups: vec![
                    kh,
                    SubgroupSpec {
                        label: "K".into(),
                        generators: ys,
                    },
                ],
            })
        }
        "rooted" => {
            want(2)?;
            let d = parse_usize(params[0])?;
            let perm = Perm::from_images(parse_list(params[1])?)?;
            Ok(simple(rooted(d, perm)?))
        }
        _ => Err(Error::UnknownPreset(spec.to_string())),
    }
}

/// Every preset family at a representative parameter.
pub fn all_presets() -> Vec<(String, Presentation)> {
    [
        "lamplighter",
        "adding-machine-H",
        "basilica",
        "bsv",
        "grigorchuk",
        "gupta-sidki:3",
        "ggs:3:1,1",
        "ggs:5:1,2,0,4",
        "ggs-Kh:3",
        "rooted:3:1,2,0",
    ]
    .iter()
    .map(|&n| (n.to_string(), preset(n).expect("preset").group))
    .collect()
}

/// The same presentation with order annotations removed, so identities
/// like `a^2 = 1` are decided rather than assumed.
pub fn without_orders(p: &Presentation) -> Presentation {
    let gens = p
        .generators()
        .iter()
        .cloned()
        .map(|mut g| {
            g.order = None;
            g
        })
        .collect();
    Presentation::new(p.degree(), gens).expect("valid without orders")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    /// Informational checks are reported but do not affect the verdict.
    pub informational: bool,
    pub detail: String,
}

fn outcome_text(o: &Outcome) -> String {
    match o {
        Outcome::Trivial { stats, .. } => format!("trivial ({stats})"),
        Outcome::Nontrivial { witness, stats } => format!("nontrivial at {witness} ({stats})"),
        Outcome::BudgetExceeded { stats } => format!("budget exceeded ({stats})"),
    }
}

struct Checker<'a> {
    p: &'a Presentation,
    budget: &'a Budget,
    checks: Vec<Check>,
}

impl<'a> Checker<'a> {
    fn equal(&mut self, label: &str, u: &Word, v: &Word) -> bool {
        let o = are_equal(self.p, u, v, self.budget);
        let passed = o.is_trivial();
        self.checks.push(Check {
            label: label.to_string(),
            passed,
            informational: false,
            detail: outcome_text(&o),
        });
        passed
    }

    fn trivial(&mut self, label: &str, w: &Word) -> bool {
        self.equal(label, w, &Word::empty())
    }

    fn nontrivial(&mut self, label: &str, w: &Word) {
        let o = is_trivial(self.p, w, self.budget);
        self.checks.push(Check {
            label: label.to_string(),
            passed: o.is_nontrivial(),
            informational: false,
            detail: outcome_text(&o),
        });
    }

    fn fact(&mut self, label: &str, passed: bool, detail: String) {
        self.checks.push(Check {
            label: label.to_string(),
            passed,
            informational: false,
            detail,
        });
    }
}

/// Builds the element `(s_1, …, s_d)` from section texts by adjoining it as
/// a new generator `name`.
fn tuple(p: &Presentation, sections: &[&str], name: &str) -> Result<(Presentation, Word)> {
    let def = p.from_paper_form(sections, Perm::identity(p.degree()), name)?;
    let q = p.with_generator(def)?;
    let w = q.generator_word(name)?;
    Ok((q, w))
}

/// Runs the identity checklist for a preset.
pub fn verify_identities(spec: &str, budget: &Budget) -> Result<Vec<Check>> {
    let preset = preset(spec)?;
    let name = spec.split(':').next().unwrap_or_default();
    let mut out: Vec<Check>;
    match name {
        "lamplighter" => {
            let (p, t) = tuple(&preset.group, &[SIGMA, SIGMA], "t")?;
            let mut ck = Checker {
                p: &p,
                budget,
                checks: Vec::new(),
            };
            let a = p.generator_word("a")?;
            let s = p.generator_word(SIGMA)?;
            let c = p.commutator(&a, &s);
            ck.equal(
                "c = [a,σ] equals a^-1 a^σ",
                &c,
                &p.multiply(&p.invert(&a), &p.conjugate(&a, &s)),
            );
            ck.equal("c = [a,σ] equals (σ,σ)", &c, &t);
            ck.trivial("c^2 = 1", &p.multiply(&c, &c));
            ck.nontrivial("c ≠ 1", &c);
            ck.fact(
                "c lies in St(1)",
                is_root_trivial(&p, &c),
                "root permutation".into(),
            );
            out = ck.checks;
        }
        "adding-machine-H" | "adding-machine" | "H" => {
            let base = &preset.group;
            let (p, one_x) = tuple(base, &["1", "x"], "t1")?;
            let (p, x_x) = tuple(&p, &["x", "x"], "t2")?;
            let mut ck = Checker {
                p: &p,
                budget,
                checks: Vec::new(),
            };
            let s = p.generator_word(SIGMA)?;
            let b = p.parse_word("x σ")?;
            ck.fact(
                "b = xσ lies in St(1)",
                is_root_trivial(&p, &b),
                "root permutation".into(),
            );
            let bb = p.multiply(&b, &b);
            let first = are_equal(&p, &b, &one_x, budget);
            let second = are_equal(&p, &bb, &x_x, budget);
            ck.checks.push(Check {
                label: "b = (1, x)".into(),
                passed: first.is_trivial(),
                informational: true,
                detail: outcome_text(&first),
            });
            ck.checks.push(Check {
                label: "b^2 = (x, x)".into(),
                passed: second.is_trivial(),
                informational: true,
                detail: outcome_text(&second),
            });
            let holds = match (first.is_trivial(), second.is_trivial()) {
                (true, false) => "b = (1, x) holds, b^2 = (x, x) fails (b^2 = (1, x^2))",
                (false, true) => "b^2 = (x, x) holds, b = (1, x) fails",
                (true, true) => "both hold",
                (false, false) => "neither holds",
            };
            ck.fact(
                "exactly one of b = (1, x) and b^2 = (x, x) holds",
                first.is_trivial() != second.is_trivial(),
                holds.into(),
            );
            let bs = p.conjugate(&b, &s);
            let (q, x1) = tuple(&p, &["x", "1"], "t3")?;
            ck.checks.extend({
                let mut inner = Checker {
                    p: &q,
                    budget,
                    checks: Vec::new(),
                };
                inner.equal("b^σ = (x, 1)", &bs, &x1);
                inner.checks
            });
            ck.trivial("[b, b^σ] = 1", &p.commutator(&b, &bs));
            out = ck.checks;
            // [σ, b]^n and its σ-conjugate against (x^∓n, x^±n)
            let comm = p.commutator(&s, &b);
            for n in 1..=3i64 {
                let neg = format!("x^{}", -n);
                let pos = format!("x^{n}");
                let (q, minus_plus) = tuple(&p, &[&neg, &pos], "u")?;
                let (q, plus_minus) = tuple(&q, &[&pos, &neg], "v")?;
                let mut ck = Checker {
                    p: &q,
                    budget,
                    checks: Vec::new(),
                };
                let e = q.power(&comm, n);
                ck.equal(&format!("[σ,b]^{n} = (x^-{n}, x^{n})"), &e, &minus_plus);
                ck.equal(
                    &format!("([σ,b]^{n})^σ = (x^{n}, x^-{n})"),
                    &q.conjugate(&e, &s),
                    &plus_minus,
                );
                ck.equal(
                    &format!("([σ,b]^{n})^x = (x^{n}, x^-{n})"),
                    &q.conjugate(&e, &q.generator_word("x")?),
                    &plus_minus,
                );
                out.extend(ck.checks);
            }
        }
        "basilica" => {
            let (p, one_b) = tuple(&preset.group, &["1", "b"], "t1")?;
            let (p, a_a) = tuple(&p, &["a", "a"], "t2")?;
            let mut ck = Checker {
                p: &p,
                budget,
                checks: Vec::new(),
            };
            let a = p.generator_word("a")?;
            let b = p.generator_word("b")?;
            ck.equal("a = (1, b)", &a, &one_b);
            ck.equal("b^2 = (a, a)", &p.multiply(&b, &b), &a_a);
            ck.nontrivial("a ≠ 1", &a);
            ck.nontrivial("b ≠ 1", &b);
            out = ck.checks;
        }
        "bsv" => {
            let p = &preset.group;
            let mut ck = Checker {
                p,
                budget,
                checks: Vec::new(),
            };
            ck.fact(
                "generators load",
                p.generator_count() == 2,
                "2 generators".into(),
            );
            ck.nontrivial("bsv_c ≠ 1", &p.generator_word("bsv_c")?);
            ck.nontrivial("bsv_d ≠ 1", &p.generator_word("bsv_d")?);
            let c = p.generator_word("bsv_c")?;
            let cc = p.multiply(&c, &c);
            let (q, t) = tuple(p, &["bsv_c^-1", "bsv_c^-1"], "t")?;
            out = ck.checks;
            let mut inner = Checker {
                p: &q,
                budget,
                checks: Vec::new(),
            };
            inner.equal("bsv_c^2 = (bsv_c^-1, bsv_c^-1)", &cc, &t);
            out.extend(inner.checks);
        }
        "ggs" | "ggs-K" | "ggs-Kh" => {
            let p: usize = spec
                .split(':')
                .nth(1)
                .and_then(|s| s.parse().ok())
                .unwrap_or(3);
            let constant = match name {
                "ggs" => {
                    let g = &preset.group;
                    let b = g.generators()[1].sections[..p - 1].to_vec();
                    b.iter().all(|s| *s == b[0])
                }
                _ => true,
            };
            let g = &preset.group;
            let mut ck = Checker {
                p: g,
                budget,
                checks: Vec::new(),
            };
            ck.nontrivial("a ≠ 1", &g.generator_word("a")?);
            ck.nontrivial("b ≠ 1", &g.generator_word("b")?);
            out = ck.checks;
            if constant {
                out.extend(verify_conjugated_k(p, budget)?);
            }
        }
        "grigorchuk" => {
            let p = without_orders(&preset.group);
            let mut ck = Checker {
                p: &p,
                budget,
                checks: Vec::new(),
            };
            for g in ["a", "b", "c", "d"] {
                let w = p.parse_word(&format!("{g} {g}"))?;
                ck.trivial(&format!("{g}^2 = 1 (imported)"), &w);
            }
            ck.trivial("b c d = 1 (imported)", &p.parse_word("b c d")?);
            out = ck.checks;
        }
        "gupta-sidki" => {
            let g = without_orders(&preset.group);
            let p = g.degree() as i64;
            let mut ck = Checker {
                p: &g,
                budget,
                checks: Vec::new(),
            };
            ck.trivial(
                &format!("a^{p} = 1 (imported)"),
                &g.power(&g.generator_word("a")?, p),
            );
            ck.trivial(
                &format!("t^{p} = 1 (imported)"),
                &g.power(&g.generator_word("t")?, p),
            );
            out = ck.checks;
        }
        "rooted" => {
            let g = &preset.group;
            let s = g.generator_word(SIGMA)?;
            let order = g.generators()[0].root.order() as i64;
            let mut ck = Checker {
                p: g,
                budget,
                checks: Vec::new(),
            };
            ck.trivial(&format!("σ^{order} = 1"), &g.power(&s, order));
            out = ck.checks;
        }
        _ => return Err(Error::UnknownPreset(spec.to_string())),
    }
    Ok(out)
}

/// `y_i^h = z_i` (indices mod p, so `y_0^h = z_p`) and `z_i^p = (z_i, …, z_i)`.
fn verify_conjugated_k(p: usize, budget: &Budget) -> Result<Vec<Check>> {
    let (pres, _) = ggs_kh(p)?;
    let ys = ggs_k_generators(&pres, p);
    let h = pres.generator_word("h")?;
    let mut out = Vec::new();
    for (i, y) in ys.iter().enumerate() {
        let zi = if i == 0 { p } else { i };
        let z = pres.generator_word(&format!("z{zi}"))?;
        let mut ck = Checker {
            p: &pres,
            budget,
            checks: Vec::new(),
        };
        ck.equal(&format!("y_{i}^h = z_{zi}"), &pres.conjugate(y, &h), &z);
        out.extend(ck.checks);
    }
    for i in 1..=p {
        let name = format!("z{i}");
        let sections: Vec<&str> = vec![name.as_str(); p];
        let (q, diag) = tuple(&pres, &sections, "t")?;
        let z = q.generator_word(&name)?;
        let mut ck = Checker {
            p: &q,
            budget,
            checks: Vec::new(),
        };
        ck.equal(
            &format!("z_{i}^{p} = (z_{i}, …, z_{i})"),
            &q.power(&z, p as i64),
            &diag,
        );
        out.extend(ck.checks);
    }
    Ok(out)
}

pub fn checks_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.informational || c.passed)
}
