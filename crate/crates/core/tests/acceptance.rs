//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line.
//!
//! Equalities and nontriviality claims are cross-checked with `Oracle`, which
//! acts on finite levels of the tree using only the raw generator
//! definitions.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use engelscope::abelian::{self, IntMatrix, MatrixOrder};
use engelscope::decision::{is_trivial, st1_schreier_generators};
use engelscope::engel::{
    self, ElementStatus, EngelResult, FractalSearch, PairVerdict, SurveyParams,
};
use engelscope::mealy;
use engelscope::presentation::SIGMA;
use engelscope::tree::{is_root_trivial, root_perm, section};
use engelscope::zoo;
use engelscope::{Budget, Letter, Outcome, Perm, Presentation, Word};

const SEED: u64 = 20_240_601;

/// Images of every letter on every level up to `depth`. Vertex `x·t` at
/// level `k` has index `x·d^(k-1) + index(t)`.
struct Oracle {
    d: usize,
    depth: usize,
    /// `table[letter][k][v]`
    table: Vec<Vec<Vec<u32>>>,
}

impl Oracle {
    fn new(p: &Presentation, depth: usize) -> Self {
        let d = p.degree();
        let n_letters = 2 * p.generator_count();
        let mut table: Vec<Vec<Vec<u32>>> = vec![vec![vec![0]]; n_letters];
        for k in 1..=depth {
            let block = d.pow(k as u32 - 1);
            for li in 0..n_letters {
                let gen = &p.generators()[li / 2];
                let inverse = li % 2 == 1;
                let mut level = vec![0u32; d * block];
                for x in 0..d {
                    // g(x·t) = π(x)·g_x(t);  g^-1(x·t) = π^-1(x)·(g_{π^-1(x)})^-1(t)
                    let (y, sec): (usize, Vec<usize>) = if inverse {
                        let y = gen.root.inverse().apply(x);
                        let s = &gen.sections[y];
                        (
                            y,
                            s.letters()
                                .iter()
                                .rev()
                                .map(|l| l.inverse().index())
                                .collect(),
                        )
                    } else {
                        let s = &gen.sections[x];
                        (
                            gen.root.apply(x),
                            s.letters().iter().map(|l| l.index()).collect(),
                        )
                    };
                    for t in 0..block {
                        let mut u = t as u32;
                        for &l in &sec {
                            u = table[l][k - 1][u as usize];
                        }
                        level[x * block + t] = (y * block) as u32 + u;
                    }
                }
                table[li].push(level);
            }
        }
        Oracle { d, depth, table }
    }

    fn level(&self, w: &Word, k: usize) -> Vec<u32> {
        assert!(k <= self.depth);
        let mut images: Vec<u32> = (0..self.d.pow(k as u32) as u32).collect();
        for l in w.letters() {
            let t = &self.table[l.index()][k];
            for v in images.iter_mut() {
                *v = t[*v as usize];
            }
        }
        images
    }

    fn is_identity(&self, w: &Word, k: usize) -> bool {
        self.level(w, k)
            .iter()
            .enumerate()
            .all(|(i, &v)| i as u32 == v)
    }

    /// Action on the subtree below first-level vertex `x`, which `w` must fix.
    fn block(&self, w: &Word, k: usize, x: usize) -> Option<Vec<u32>> {
        let size = self.d.pow(k as u32 - 1);
        let all = self.level(w, k);
        let lo = (x * size) as u32;
        let part = &all[x * size..(x + 1) * size];
        part.iter()
            .all(|&v| v >= lo && v < lo + size as u32)
            .then(|| part.iter().map(|&v| v - lo).collect())
    }

    fn same(&self, u: &Word, v: &Word, k: usize) -> bool {
        self.level(u, k) == self.level(v, k)
    }
}

fn oracle_depth(p: &Presentation) -> usize {
    let mut k = 1;
    while p.degree().pow(k as u32 + 1) <= 1 << 14 {
        k += 1;
    }
    k
}

fn random_word(p: &Presentation, rng: &mut ChaCha8Rng, min: usize, max: usize) -> Word {
    let len = rng.gen_range(min..=max);
    let k = p.generator_count() as u32;
    (0..len)
        .map(|_| Letter::new(rng.gen_range(0..k), rng.gen_bool(0.5)))
        .collect()
}

fn word(p: &Presentation, s: &str) -> Word {
    p.parse_word(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

/// `(s_1, …, s_d)` adjoined as generator `name`.
fn tuple(p: &Presentation, sections: &[&str], name: &str) -> (Presentation, Word) {
    let def = p
        .from_paper_form(sections, Perm::identity(p.degree()), name)
        .unwrap();
    let q = p.with_generator(def).unwrap();
    let w = q.generator_word(name).unwrap();
    (q, w)
}

struct Verdict {
    passed: bool,
    detail: String,
}

impl Verdict {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Verdict {
            passed,
            detail: detail.into(),
        }
    }
}

/// Collects failures of individual claims within a criterion.
#[derive(Default)]
struct Tally {
    checked: usize,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn verdict(self, summary: &str) -> Verdict {
        if self.failures.is_empty() {
            Verdict::new(true, format!("{summary}; {} checks", self.checked))
        } else {
            let shown: Vec<&str> = self.failures.iter().take(4).map(|s| s.as_str()).collect();
            Verdict::new(
                false,
                format!(
                    "{summary}; {} of {} checks failed: {}",
                    self.failures.len(),
                    self.checked,
                    shown.join("; ")
                ),
            )
        }
    }
}

/// Equality by the decision procedure and by the oracle on the deepest
/// level it holds.
fn identity(t: &mut Tally, p: &Presentation, label: &str, lhs: &Word, rhs: &Word) {
    let o = Oracle::new(p, oracle_depth(p));
    let decided = engelscope::decision::are_equal(p, lhs, rhs, &Budget::default());
    t.check(decided.is_trivial(), || {
        format!("{label}: decision says {decided:?}")
    });
    t.check(o.same(lhs, rhs, o.depth), || {
        format!("{label}: oracle disagrees at level {}", o.depth)
    });
}

fn nontrivial(t: &mut Tally, p: &Presentation, label: &str, w: &Word) {
    let o = Oracle::new(p, oracle_depth(p));
    t.check(is_trivial(p, w, &Budget::default()).is_nontrivial(), || {
        format!("{label}: not decided nontrivial")
    });
    t.check(!o.is_identity(w, o.depth), || {
        format!("{label}: oracle sees identity")
    });
}

fn criterion_1() -> Verdict {
    let mut t = Tally::default();

    let l = zoo::lamplighter();
    let (l, ss) = tuple(&l, &[SIGMA, SIGMA], "t");
    let c = l.commutator(&word(&l, "a"), &word(&l, SIGMA));
    identity(&mut t, &l, "lamplighter c = (σ,σ)", &c, &ss);
    identity(
        &mut t,
        &l,
        "lamplighter c^2 = 1",
        &l.multiply(&c, &c),
        &Word::empty(),
    );
    nontrivial(&mut t, &l, "lamplighter c", &c);

    let b = zoo::basilica();
    let (b, one_b) = tuple(&b, &["1", "b"], "t1");
    let (b, a_a) = tuple(&b, &["a", "a"], "t2");
    identity(&mut t, &b, "basilica a = (1,b)", &word(&b, "a"), &one_b);
    identity(&mut t, &b, "basilica b^2 = (a,a)", &word(&b, "b b"), &a_a);

    let bsv = zoo::bsv();
    t.check(bsv.generator_count() == 2, || {
        "bsv does not have 2 generators".into()
    });
    nontrivial(&mut t, &bsv, "bsv c", &word(&bsv, "bsv_c"));
    nontrivial(&mut t, &bsv, "bsv d", &word(&bsv, "bsv_d"));

    let (kh, _) = zoo::ggs_kh(3).unwrap();
    let ys = zoo::ggs_k_generators(&kh, 3);
    let h = word(&kh, "h");
    for (i, y) in ys.iter().enumerate() {
        // indices are read mod 3, so y_0 pairs with z_3
        let z = word(&kh, &format!("z{}", if i == 0 { 3 } else { i }));
        identity(
            &mut t,
            &kh,
            &format!("y_{i}^h = z_{i}"),
            &kh.conjugate(y, &h),
            &z,
        );
    }
    for i in 1..=3 {
        let name = format!("z{i}");
        let (q, diag) = tuple(&kh, &[&name, &name, &name], "t");
        let z = word(&q, &name);
        identity(
            &mut t,
            &q,
            &format!("z_{i}^3 = (z_{i},z_{i},z_{i})"),
            &q.power(&z, 3),
            &diag,
        );
    }

    let hgrp = zoo::adding_machine();
    let (hg, one_x) = tuple(&hgrp, &["1", "x"], "t1");
    let bw = word(&hg, "x σ");
    t.check(is_root_trivial(&hg, &bw), || "b not in St(1)".into());
    identity(&mut t, &hg, "b = (1,x)", &bw, &one_x);
    let bs = hg.conjugate(&bw, &word(&hg, SIGMA));
    identity(
        &mut t,
        &hg,
        "[b, b^σ] = 1",
        &hg.commutator(&bw, &bs),
        &Word::empty(),
    );
    let comm = hg.commutator(&word(&hg, SIGMA), &bw);
    for n in 1..=3i64 {
        let (q, mp) = tuple(&hg, &[&format!("x^{}", -n), &format!("x^{n}")], "u");
        let (q, pm) = tuple(&q, &[&format!("x^{n}"), &format!("x^{}", -n)], "v");
        let e = q.power(&comm, n);
        identity(&mut t, &q, &format!("[σ,b]^{n} = (x^-{n}, x^{n})"), &e, &mp);
        identity(
            &mut t,
            &q,
            &format!("([σ,b]^{n})^σ = (x^{n}, x^-{n})"),
            &q.conjugate(&e, &word(&q, SIGMA)),
            &pm,
        );
    }
    t.verdict("lamplighter, basilica, bsv, ggs-Kh:3, adding machine")
}

fn criterion_2() -> Verdict {
    let mut t = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let budget = Budget::default();
    let mut counts = (0, 0, 0);
    for (name, p) in zoo::all_presets() {
        let o = Oracle::new(&p, oracle_depth(&p).max(8));
        for _ in 0..200 {
            let w = random_word(&p, &mut rng, 0, 8);
            match is_trivial(&p, &w, &budget) {
                Outcome::Nontrivial { witness, .. } => {
                    counts.1 += 1;
                    let k = witness.level() + 1;
                    t.check(!o.is_identity(&w, k), || {
                        format!(
                            "{name}: {} nontrivial at {witness} but level {k} is identity",
                            p.format_word(&w)
                        )
                    });
                }
                Outcome::Trivial { .. } => {
                    counts.0 += 1;
                    t.check(o.is_identity(&w, 8), || {
                        format!("{name}: {} trivial but level 8 moves", p.format_word(&w))
                    });
                }
                Outcome::BudgetExceeded { .. } => counts.2 += 1,
            }
        }
    }
    t.verdict(&format!(
        "{} presets x 200 words: {} trivial, {} nontrivial, {} over budget",
        zoo::all_presets().len(),
        counts.0,
        counts.1,
        counts.2
    ))
}

/// `[h,_n g]` is trivial exactly from the reported index on, per the oracle.
fn check_engel_at(
    t: &mut Tally,
    p: &Presentation,
    o: &Oracle,
    g: &Word,
    h: &Word,
    n: usize,
    label: &str,
) {
    let c = engel::iterated_commutator(p, h, g, n, usize::MAX).unwrap();
    t.check(o.is_identity(&c, o.depth), || {
        format!("{label}: [h,_{n} g] moves level {}", o.depth)
    });
    if n > 0 {
        let prev = engel::iterated_commutator(p, h, g, n - 1, usize::MAX).unwrap();
        t.check(!o.is_identity(&prev, o.depth), || {
            format!("{label}: EngelAt({n}) not minimal")
        });
    }
}

fn criterion_3() -> Verdict {
    let mut t = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let budget = Budget::default();
    let l = zoo::lamplighter();
    let c = l.commutator(&word(&l, "a"), &word(&l, SIGMA));
    let lg = vec![
        ("σ", word(&l, SIGMA)),
        ("c", c.clone()),
        ("c^a", l.conjugate(&c, &word(&l, "a"))),
    ];
    let h = zoo::adding_machine();
    let b = word(&h, "x σ");
    let bs = h.conjugate(&b, &word(&h, SIGMA));
    let hg = vec![
        ("b", b.clone()),
        ("b^σ", bs.clone()),
        ("b b^σ", h.multiply(&b, &bs)),
    ];
    for (p, gs, name) in [(&l, lg, "lamplighter"), (&h, hg, "H")] {
        let o = Oracle::new(p, oracle_depth(p));
        for (gname, g) in gs {
            for _ in 0..50 {
                let hw = random_word(p, &mut rng, 0, 8);
                let label = format!("{name} g={gname} h={}", p.format_word(&hw));
                match engel::left_engel_test(p, &g, &hw, 2, &budget) {
                    EngelResult::EngelAt(n) => check_engel_at(&mut t, p, &o, &g, &hw, n, &label),
                    other => t.check(false, || format!("{label}: {other:?}")),
                }
            }
        }
    }
    t.verdict("lamplighter {σ, c, c^a} and H {b, b^σ, b b^σ}, 50 words each")
}

/// Every `[h,_n g]` with `n ≤ n_max` moves some level within the oracle.
fn check_not_engel(
    t: &mut Tally,
    p: &Presentation,
    o: &Oracle,
    g: &Word,
    h: &Word,
    n_max: usize,
    label: &str,
) {
    let mut c = p.normalize(h);
    for n in 0..=n_max {
        if n > 0 {
            c = p.commutator(&c, g);
        }
        t.check(!o.is_identity(&c, o.depth), || {
            format!("{label}: oracle sees [h,_{n} g] = 1 on level {}", o.depth)
        });
    }
}

fn survey_criterion(
    t: &mut Tally,
    p: &Presentation,
    name: &str,
    gens: Option<&[Word]>,
    r_g: usize,
    r_h: usize,
    n_max: usize,
) -> Vec<String> {
    let params = SurveyParams {
        r_g,
        r_h,
        n_max,
        budget: Budget::default(),
        threads: 4,
    };
    let report = engel::engel_survey(p, name, gens, &params);
    let o = Oracle::new(p, oracle_depth(p));
    let mut open = Vec::new();
    t.check(!report.records.is_empty(), || {
        format!("{name}: empty survey")
    });
    for r in &report.records {
        match (&r.status, &r.witness_word) {
            (ElementStatus::NonEngel { .. }, Some(h)) => {
                let again = engel::left_engel_test(p, &r.word, h, n_max, &params.budget);
                t.check(again == EngelResult::NotEngelUpTo(n_max), || {
                    format!("{name}: witness for {} does not reproduce", r.element)
                });
                check_not_engel(
                    t,
                    p,
                    &o,
                    &r.word,
                    h,
                    n_max,
                    &format!("{name} {}", r.element),
                );
            }
            (status, _) => {
                t.check(false, || format!("{name}: {} is {status:?}", r.element));
                open.push(r.element.clone());
            }
        }
    }
    open
}

/// `a^±2` in the Basilica group: every `h` of length at most 3 gives
/// `[h,_n a^2] = 1` for some `n ≤ 6`; `b^4` is a witness.
fn basilica_square_analysis(p: &Presentation) -> String {
    let o = Oracle::new(p, oracle_depth(p));
    let engine = engel::Engine::new(p);
    let gens: Vec<Word> = vec![word(p, "a"), word(p, "b")];
    let ball = engel::ball(&engine, &gens, 3, &Budget::default());
    let g = word(p, "a a");
    let mut worst = 0;
    let mut confirmed = 0;
    for (_, h) in &ball.elements {
        if let EngelResult::EngelAt(n) = engel::left_engel_test(p, &g, h, 6, &Budget::default()) {
            let c = engel::iterated_commutator(p, h, &g, n, usize::MAX).unwrap();
            if o.is_identity(&c, o.depth) {
                confirmed += 1;
            }
            worst = worst.max(n);
        }
    }
    let b4 = word(p, "b^4");
    let witness = engel::left_engel_test(p, &g, &b4, 6, &Budget::default());
    let mut t = Tally::default();
    check_not_engel(&mut t, p, &o, &g, &b4, 6, "b^4");
    format!(
        "a^2: all {} elements of the radius-3 ball are Engel for it by n = {worst} ({confirmed} oracle-confirmed); b^4 gives {witness:?}, oracle {}",
        ball.elements.len(),
        if t.failures.is_empty() { "agrees" } else { "disagrees" }
    )
}

fn criterion_4() -> Verdict {
    let mut t = Tally::default();
    let mut notes = Vec::new();
    let bas = zoo::basilica();
    let open = survey_criterion(&mut t, &bas, "basilica", None, 2, 3, 6);
    if !open.is_empty() {
        notes.push(format!(
            "basilica without radius-3 witness: {}",
            open.join(", ")
        ));
        notes.push(basilica_square_analysis(&bas));
    }
    let bsv = zoo::bsv();
    survey_criterion(&mut t, &bsv, "bsv", None, 2, 3, 6);
    let kh = zoo::preset("ggs-Kh:3").unwrap();
    let zs = kh.subgroup("Kh").unwrap().generators.clone();
    survey_criterion(&mut t, &kh.group, "ggs-Kh:3/Kh", Some(&zs), 2, 2, 5);

    let h = zoo::adding_machine();
    let o = Oracle::new(&h, oracle_depth(&h));
    let engine = engel::Engine::new(&h);
    let gens: Vec<Word> = (0..h.generator_count() as u32)
        .map(Word::generator)
        .collect();
    let ball = engel::ball(&engine, &gens, 3, &Budget::default());
    for g in [SIGMA, "x"] {
        let gw = word(&h, g);
        let found = ball.elements.iter().map(|(_, w)| w).find(|hw| {
            engine.left_engel_test(&gw, hw, 8, &Budget::default()) == EngelResult::NotEngelUpTo(8)
        });
        match found {
            Some(hw) => check_not_engel(&mut t, &h, &o, &gw, hw, 8, &format!("H {g}")),
            None => t.check(false, || format!("H: no witness for {g}")),
        }
    }
    let mut v = t.verdict(
        "basilica and bsv (r_g 2, r_h 3, n 6), ggs-Kh:3 over z_i (r 2, n 5), H σ and x (n 8)",
    );
    if !notes.is_empty() {
        v.detail = format!("{}. {}", v.detail, notes.join(". "));
    }
    v
}

/// Each witness fixes the first level and its subtree action at `x` equals
/// the generator's, per the oracle.
fn oracle_certificate(
    t: &mut Tally,
    p: &Presentation,
    gens: &[(String, Word)],
    cert: &engel::FractalCertificate,
    name: &str,
) {
    let o = Oracle::new(p, oracle_depth(p));
    for ((label, x), w) in &cert.witnesses {
        let g = &gens.iter().find(|(l, _)| l == label).unwrap().1;
        let block = o.block(w, o.depth, *x);
        t.check(
            block.as_deref() == Some(&o.level(g, o.depth - 1)[..]),
            || format!("{name}: witness for ({label},{x}) fails the oracle"),
        );
    }
}

fn criterion_5() -> Verdict {
    let mut t = Tally::default();
    let b = Budget::default();
    for (name, radius) in [("lamplighter", 3), ("basilica", 2)] {
        let p = zoo::preset(name).unwrap().group;
        let gens = engel::labelled(&p, None);
        match engel::search_fractal_witnesses(&p, &gens, radius, &b) {
            FractalSearch::Found(cert) => {
                let checks = engel::verify_fractal_certificate(&p, &gens, &cert, &b);
                t.check(engel::certificate_holds(&checks), || {
                    format!("{name}: certificate does not verify")
                });
                oracle_certificate(&mut t, &p, &gens, &cert, name);
            }
            FractalSearch::NotFound { missing, .. } => {
                t.check(false, || format!("{name}: missing {missing:?}"))
            }
        }
    }
    let kh = zoo::preset("ggs-Kh:3").unwrap();
    let gens = engel::labelled(&kh.group, Some(&kh.subgroup("Kh").unwrap().generators));
    let cert = engel::power_certificate(&kh.group, &gens);
    let checks = engel::verify_fractal_certificate(&kh.group, &gens, &cert, &b);
    t.check(engel::certificate_holds(&checks), || {
        "K^h: z_i^3 certificate fails".into()
    });
    oracle_certificate(&mut t, &kh.group, &gens, &cert, "K^h");

    let h = zoo::adding_machine();
    let gens = engel::labelled(&h, None);
    let mut reported = String::new();
    match engel::search_fractal_witnesses(&h, &gens, 3, &b) {
        FractalSearch::Found(_) => t.check(false, || "H: a certificate was found".into()),
        FractalSearch::NotFound { partial, missing } => {
            let sigma_pairs = vec![("s1".to_string(), 0), ("s1".to_string(), 1)];
            t.check(missing == sigma_pairs, || format!("H: missing {missing:?}"));
            let checks = engel::verify_fractal_certificate(&h, &gens, &partial, &b);
            t.check(!engel::certificate_holds(&checks), || {
                "H: partial certificate verifies".into()
            });
            for c in &checks {
                let expect_missing = c.generator == "s1";
                let ok = if expect_missing {
                    c.verdict == PairVerdict::Missing
                } else {
                    c.verdict == PairVerdict::Ok
                };
                t.check(ok, || {
                    format!("H: ({},{}) is {:?}", c.generator, c.coordinate, c.verdict)
                });
            }
            oracle_certificate(&mut t, &h, &gens, &partial, "H");
            let found: Vec<String> = partial
                .witnesses
                .iter()
                .map(|((g, x), w)| format!("{g},{x} <- {}", h.format_word(w)))
                .collect();
            reported = format!(
                "H missing {}; x is covered by {}",
                missing
                    .iter()
                    .map(|(g, x)| format!("{g},{x}"))
                    .collect::<Vec<_>>()
                    .join(" "),
                found.join(", ")
            );
        }
    }
    let mut v = t.verdict("lamplighter r3, basilica r2, K^h via z_i^3");
    v.detail = format!("{}; {reported}", v.detail);
    v
}

fn naive_pow(m: &[[i64; 2]; 2], e: u64, modulus: i64) -> [[i64; 2]; 2] {
    let mut r = [[1, 0], [0, 1]];
    for _ in 0..e {
        let mut n = [[0i64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                n[i][j] = r[i][0] * m[0][j] + r[i][1] * m[1][j];
                if modulus > 0 {
                    n[i][j] = n[i][j].rem_euclid(modulus);
                }
            }
        }
        r = n;
    }
    r
}

fn to_array(m: &IntMatrix) -> [[i64; 2]; 2] {
    [
        [m.get(0, 0) as i64, m.get(0, 1) as i64],
        [m.get(1, 0) as i64, m.get(1, 1) as i64],
    ]
}

fn criterion_6() -> Verdict {
    let mut t = Tally::default();
    let id = [[1, 0], [0, 1]];
    let mut finite_unipotent = 0;
    for m in abelian::all_matrices(2, -2, 2, 0) {
        let a = to_array(&m);
        // 2x2 N is nilpotent iff tr N = det N = 0
        let n = [[a[0][0] - 1, a[0][1]], [a[1][0], a[1][1] - 1]];
        let nil = n[0][0] + n[1][1] == 0 && n[0][0] * n[1][1] - n[0][1] * n[1][0] == 0;
        let order = (1..=12).find(|&e| naive_pow(&a, e, 0) == id);
        t.check(abelian::is_unipotent(&m).unwrap() == nil, || {
            format!("{m}: unipotent disagrees")
        });
        let lib_order = match abelian::order_of_matrix(&m, 12) {
            MatrixOrder::Finite(e) => Some(e),
            MatrixOrder::LowerBound(_) => None,
        };
        t.check(lib_order == order, || format!("{m}: order disagrees"));
        if order.is_some() && nil {
            finite_unipotent += 1;
            t.check(a == id, || {
                format!("{m}: finite order and unipotent but not I")
            });
            t.check(
                abelian::classify_engel_action(&m, 12).unwrap()
                    == abelian::ActionClassification::TrivialForced,
                || format!("{m}: not classified TrivialForced"),
            );
        }
    }
    let mut torsion = 0;
    for modulus in [2i64, 3, 4, 8, 9] {
        for m in abelian::all_matrices(2, 0, modulus - 1, modulus as u64) {
            let a = to_array(&m);
            let n = [
                [(a[0][0] - 1).rem_euclid(modulus), a[0][1]],
                [a[1][0], (a[1][1] - 1).rem_euclid(modulus)],
            ];
            let nil_index =
                (1..=8u32).find(|&k| naive_pow(&n, k as u64, modulus) == [[0, 0], [0, 0]]);
            let Some(k) = nil_index else { continue };
            let Some(ell) = (1..=12u64).find(|&e| naive_pow(&a, e, modulus) == id) else {
                continue;
            };
            torsion += 1;
            t.check(abelian::is_unipotent_mod(&m).unwrap(), || {
                format!("{m}: not unipotent")
            });
            for nn in 1..=k + 1 {
                let c = abelian::engel_exponent_check(&m, ell, nn, 0, SEED).unwrap();
                t.check(c.holds && c.exhaustive, || {
                    format!("{m}: exponent check n={nn} {c:?}")
                });
                // the same statement by hand
                let cn = naive_pow(&n, nn as u64, modulus);
                let factor = (ell as i64).pow(nn - 1);
                for v0 in 0..modulus {
                    for v1 in 0..modulus {
                        let premise = (0..2)
                            .all(|j| (v0 * cn[0][j] + v1 * cn[1][j]).rem_euclid(modulus) == 0);
                        let conclusion = (0..2).all(|j| {
                            (factor * (v0 * n[0][j] + v1 * n[1][j])).rem_euclid(modulus) == 0
                        });
                        t.check(!premise || conclusion, || {
                            format!("{m}: hand check fails at ({v0},{v1})")
                        });
                    }
                }
            }
            if naive_pow(&n, 2, modulus) == [[0, 0], [0, 0]] {
                for kk in -(2 * ell as i64)..=(2 * ell as i64) {
                    let c = abelian::power_commutator_check(&m, kk, 0, SEED).unwrap();
                    t.check(c.holds && c.exhaustive, || {
                        format!("{m}: power check k={kk}")
                    });
                }
            } else {
                t.check(
                    abelian::power_commutator_check(&m, 2, 0, SEED)
                        == Err(engelscope::Error::HypothesisViolated),
                    || format!("{m}: hypothesis not enforced"),
                );
            }
        }
    }
    t.verdict(&format!(
        "625 integer matrices ({finite_unipotent} finite-order unipotent), {torsion} unipotent matrices mod 2,3,4,8,9"
    ))
}

fn random_stabilizer(p: &Presentation, st1: &[Word], rng: &mut ChaCha8Rng) -> Word {
    let len = rng.gen_range(1..=3);
    let mut w = Word::empty();
    for _ in 0..len {
        let s = &st1[rng.gen_range(0..st1.len())];
        w = if rng.gen_bool(0.5) {
            p.multiply(&w, s)
        } else {
            p.multiply(&w, &s.inverse())
        };
    }
    w
}

fn criterion_7() -> Verdict {
    let mut t = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let b = Budget::default();
    let groups = [
        "lamplighter",
        "adding-machine-H",
        "basilica",
        "bsv",
        "grigorchuk",
        "gupta-sidki:3",
        "ggs-Kh:3",
    ];
    for name in groups {
        let p = zoo::preset(name).unwrap().group;
        let st1 = st1_schreier_generators(&p);
        let depth = oracle_depth(&p).min(7);
        let o = Oracle::new(&p, depth);
        for _ in 0..25 {
            let h = random_stabilizer(&p, &st1, &mut rng);
            let g = random_stabilizer(&p, &st1, &mut rng);
            for n in 1..=3 {
                let label = format!(
                    "{name} h={} g={} n={n}",
                    p.format_word(&h),
                    p.format_word(&g)
                );
                match engel::componentwise_commutator_check(&p, &h, &g, n, &b) {
                    Ok(holds) => t.check(holds, || format!("{label}: identity fails")),
                    Err(e) => t.check(false, || format!("{label}: {e}")),
                }
                let whole = engel::iterated_commutator(&p, &h, &g, n, usize::MAX).unwrap();
                for x in 0..p.degree() {
                    let part = engel::iterated_commutator(
                        &p,
                        &section(&p, &h, x),
                        &section(&p, &g, x),
                        n,
                        usize::MAX,
                    )
                    .unwrap();
                    t.check(
                        o.block(&whole, depth, x) == Some(o.level(&part, depth - 1)),
                        || format!("{label}: oracle disagrees at {x}"),
                    );
                }
            }
        }
    }
    // conjugation by a rooted automorphism permutes sections
    for _ in 0..25 {
        let name = groups[rng.gen_range(0..groups.len())];
        let p = zoo::preset(name).unwrap().group;
        let d = p.degree();
        let mut images: Vec<usize> = (0..d).collect();
        for i in (1..d).rev() {
            images.swap(i, rng.gen_range(0..=i));
        }
        let sigma = Perm::from_images(images).unwrap();
        let def = p
            .from_paper_form(&vec!["1"; d], sigma.clone(), "rho")
            .unwrap();
        let q = p.with_generator(def).unwrap();
        let st1 = st1_schreier_generators(&q);
        let g = random_stabilizer(&q, &st1, &mut rng);
        let gs = q.conjugate(&g, &word(&q, "rho"));
        let o = Oracle::new(&q, oracle_depth(&q).min(7));
        t.check(root_perm(&q, &gs).is_identity(), || {
            format!("{name}: g^ρ leaves St(1)")
        });
        for x in 0..d {
            let lhs = section(&q, &gs, x);
            let rhs = section(&q, &g, sigma.inverse().apply(x));
            let label = format!("{name} ρ={sigma} g={} x={x}", q.format_word(&g));
            t.check(
                engelscope::decision::are_equal(&q, &lhs, &rhs, &b).is_trivial(),
                || format!("{label}: sections differ"),
            );
            t.check(o.same(&lhs, &rhs, o.depth), || {
                format!("{label}: oracle disagrees")
            });
        }
    }
    // minimization and saturation
    let mut saturating = Vec::new();
    for (name, p) in zoo::all_presets() {
        let Ok(m) = mealy::saturate(&p, 5000) else {
            continue;
        };
        saturating.push(name.clone());
        let (min, _) = m.minimize();
        let (again, _) = min.minimize();
        t.check(again.len() == min.len(), || {
            format!("{name}: minimize not idempotent")
        });
        for s in 0..m.len() {
            let w = p.parse_word(m.label(s)).unwrap();
            let direct = is_trivial(&p, &w, &b);
            t.check(direct.is_trivial() == m.state_is_trivial(s), || {
                format!(
                    "{name}: state {} disagrees with the decision procedure",
                    m.label(s)
                )
            });
        }
    }
    t.verdict(&format!(
        "{} groups x 25 stabilizer pairs, 25 conjugations, saturating: {}",
        groups.len(),
        saturating.join(" ")
    ))
}

fn criterion_8() -> Verdict {
    let p = zoo::grigorchuk();
    let o = Oracle::new(&p, oracle_depth(&p));
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let budget = Budget::default();
    let mut t = Tally::default();
    let (mut conclusive, mut total, mut worst) = (0, 0, 0);
    for g in ["a", "b", "c", "d", "a d a"] {
        let gw = word(&p, g);
        t.check(
            p.multiply(&gw, &gw).is_empty()
                || is_trivial(&p, &p.multiply(&gw, &gw), &budget).is_trivial(),
            || format!("{g} is not an involution"),
        );
        for _ in 0..10 {
            let h = random_word(&p, &mut rng, 1, 5);
            total += 1;
            if let EngelResult::EngelAt(n) = engel::left_engel_test(&p, &gw, &h, 30, &budget) {
                conclusive += 1;
                worst = worst.max(n);
                check_engel_at(
                    &mut t,
                    &p,
                    &o,
                    &gw,
                    &h,
                    n,
                    &format!("g={g} h={}", p.format_word(&h)),
                );
            }
        }
    }
    t.check(conclusive * 5 >= total * 4, || {
        format!("only {conclusive}/{total} conclusive")
    });
    t.verdict(&format!(
        "{conclusive}/{total} conclusive, largest n = {worst}"
    ))
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Verdict,
}

/// Criteria expected to fail, with the reason recorded alongside the
/// result. The run fails if the set of failures differs from this list.
const KNOWN_RED: &[(u32, &str)] = &[(
    4,
    "a^2 and a^-2 in the Basilica group have no witness of length 3; the shortest is b^4",
)];

fn main() {
    let criteria = [
        Criterion {
            id: 1,
            name: "identity suite",
            limit: Some(Duration::from_secs(60)),
            run: criterion_1,
        },
        Criterion {
            id: 2,
            name: "decision cross-validation",
            limit: Some(Duration::from_secs(300)),
            run: criterion_2,
        },
        Criterion {
            id: 3,
            name: "Engel positives",
            limit: Some(Duration::from_secs(120)),
            run: criterion_3,
        },
        Criterion {
            id: 4,
            name: "Engel negatives",
            limit: Some(Duration::from_secs(900)),
            run: criterion_4,
        },
        Criterion {
            id: 5,
            name: "fractality",
            limit: Some(Duration::from_secs(120)),
            run: criterion_5,
        },
        Criterion {
            id: 6,
            name: "matrix sweeps",
            limit: Some(Duration::from_secs(120)),
            run: criterion_6,
        },
        Criterion {
            id: 7,
            name: "structural properties",
            limit: Some(Duration::from_secs(300)),
            run: criterion_7,
        },
        Criterion {
            id: 8,
            name: "Grigorchuk spot check",
            limit: None,
            run: criterion_8,
        },
    ];
    let filter: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut red = Vec::new();
    for c in &criteria {
        if !filter.is_empty() && !filter.contains(&c.id) {
            continue;
        }
        let start = Instant::now();
        let v = (c.run)();
        let elapsed = start.elapsed();
        let in_time = c.limit.is_none_or(|l| elapsed <= l);
        let passed = v.passed && in_time;
        let limit = c.limit.map_or("no limit".to_string(), |l| {
            format!("limit {}s", l.as_secs())
        });
        println!(
            "criterion {} {} [{}] {:.1}s ({limit}): {}",
            c.id,
            c.name,
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            v.detail
        );
        if !passed {
            red.push(c.id);
        }
    }
    let expected: Vec<u32> = KNOWN_RED
        .iter()
        .map(|(id, _)| *id)
        .filter(|id| filter.is_empty() || filter.contains(id))
        .collect();
    for (id, why) in KNOWN_RED {
        if red.contains(id) {
            println!("criterion {id} is a known failure: {why}");
        }
    }
    if red != expected {
        println!("unexpected result: failing {red:?}, known failures {expected:?}");
        std::process::exit(1);
    }
}
