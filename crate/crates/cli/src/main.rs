use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use engelscope::abelian::{self, IntMatrix, MatrixOrder};
use engelscope::decision::{self, OrderResult};
use engelscope::engel::{self, EngelResult, FractalCertificate, FractalSearch, SurveyParams};
use engelscope::mealy;
use engelscope::tree;
use engelscope::zoo;
use engelscope::{Budget, Error, Outcome, Presentation, Stats, Vertex, Word};

const OK: u8 = 0;
const FAILS: u8 = 1;
const BUDGET: u8 = 2;
const INPUT: u8 = 3;
const INCONCLUSIVE: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "engelscope",
    version,
    about = "Automaton groups: word problem, Mealy automata, Engel elements"
)]
struct Cli {
    /// Built-in group, e.g. `basilica` or `ggs-Kh:3`
    #[arg(long, global = true, conflicts_with = "group")]
    preset: Option<String>,
    /// Group file (JSON)
    #[arg(long, global = true)]
    group: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Closure states per decision
    #[arg(long, global = true)]
    max_states: Option<usize>,
    #[arg(long, global = true)]
    max_word_length: Option<usize>,
    /// Deepest tree level examined
    #[arg(long, global = true)]
    max_level: Option<usize>,
    #[arg(long, global = true, default_value_t = abelian::DEFAULT_SEED)]
    seed: u64,
    /// Worker threads for `survey`
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Free-product normal form
    Reduce {
        word: String,
    },
    /// Decide whether a word is the identity
    Istrivial {
        word: String,
    },
    Equal {
        w1: String,
        w2: String,
    },
    /// Section at a vertex (digit string)
    Section {
        word: String,
        vertex: String,
    },
    /// Image of a vertex
    Act {
        word: String,
        vertex: String,
    },
    /// Root permutations of all sections above `depth`
    Portrait {
        word: String,
        depth: usize,
    },
    Order {
        word: String,
    },
    /// Permutation induced on level `n`
    LevelPerm {
        word: String,
        n: usize,
    },
    /// First level stabilizer
    St1 {
        #[command(subcommand)]
        what: St1Command,
    },
    /// Saturate into a Mealy automaton
    Saturate {
        #[arg(long, default_value_t = 10_000)]
        max_automaton_states: usize,
    },
    /// Saturate and minimize
    Minimize {
        #[arg(long, default_value_t = 10_000)]
        max_automaton_states: usize,
    },
    /// Left Engel test of `h` against `g`
    Engel {
        g: String,
        h: String,
        #[arg(long, default_value_t = 8)]
        nmax: usize,
    },
    /// Engel survey over balls
    Survey {
        #[arg(long, default_value_t = 2)]
        rg: usize,
        #[arg(long, default_value_t = 3)]
        rh: usize,
        #[arg(long, default_value_t = 6)]
        nmax: usize,
        #[arg(long)]
        subgroup: Option<String>,
    },
    Fractal {
        #[command(subcommand)]
        what: FractalCommand,
    },
    /// Integer matrix actions
    Matrix(MatrixArgs),
    Zoo {
        #[command(subcommand)]
        what: ZooCommand,
    },
}

#[derive(Subcommand, Debug)]
enum St1Command {
    Index,
    Gens,
}

#[derive(Subcommand, Debug)]
enum FractalCommand {
    Verify {
        cert: PathBuf,
        #[arg(long)]
        subgroup: Option<String>,
    },
    Search {
        #[arg(long, default_value_t = 3)]
        radius: usize,
        #[arg(long)]
        subgroup: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum ZooCommand {
    List,
    Dump { name: Option<String> },
    Verify { name: Option<String> },
}

#[derive(Args, Debug)]
struct MatrixArgs {
    /// JSON file, or inline JSON such as `[[1,1],[0,1]]`
    matrix: String,
    #[arg(long)]
    classify: bool,
    #[arg(long)]
    unipotent: bool,
    /// Compute the order up to this cap (also the cap for `--classify`)
    #[arg(long)]
    order_cap: Option<u64>,
    #[arg(long)]
    exponent_check: bool,
    /// Order ℓ for `--exponent-check` (default: computed)
    #[arg(long)]
    ell: Option<u64>,
    /// Engel index n for `--exponent-check` (default: nilpotency index)
    #[arg(long)]
    n: Option<u32>,
    /// Check `[s, g^k] = [s, g]^k`
    #[arg(long, allow_hyphen_values = true)]
    power_check: Option<i64>,
    /// Rank of the image of `M - I`
    #[arg(long)]
    lattice: bool,
}

struct Report {
    text: String,
    json: Value,
    code: u8,
}

impl Report {
    fn new(text: impl Into<String>, json: Value, code: u8) -> Self {
        Report {
            text: text.into(),
            json,
            code,
        }
    }
}

#[derive(Debug)]
struct Failure {
    message: String,
    code: u8,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded(_) | Error::SaturationExceeded(_) => BUDGET,
            _ => INPUT,
        };
        Failure {
            message: e.to_string(),
            code,
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        message: message.into(),
        code: INPUT,
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { INPUT } else { OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(report) => {
            match cli.format {
                Format::Text => print!("{}", report.text),
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&report.json).expect("report serializes")
                ),
            }
            ExitCode::from(report.code)
        }
        Err(f) => {
            eprintln!("engelscope: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn budget(cli: &Cli) -> CliResult<Budget> {
    let mut b = Budget::default();
    for (flag, value, slot) in [
        ("--max-states", cli.max_states, &mut b.max_closure_states),
        (
            "--max-word-length",
            cli.max_word_length,
            &mut b.max_word_length,
        ),
        ("--max-level", cli.max_level, &mut b.max_level),
    ] {
        if let Some(v) = value {
            if v == 0 {
                return Err(input_error(format!("{flag} must be positive")));
            }
            *slot = v;
        }
    }
    Ok(b)
}

struct Group {
    name: String,
    presentation: Presentation,
    preset: Option<zoo::Preset>,
}

fn load_group(cli: &Cli) -> CliResult<Group> {
    match (&cli.preset, &cli.group) {
        (Some(name), None) => {
            let preset = zoo::preset(name)?;
            Ok(Group {
                name: name.clone(),
                presentation: preset.group.clone(),
                preset: Some(preset),
            })
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| input_error(format!("{}: {e}", path.display())))?;
            Ok(Group {
                name: path.display().to_string(),
                presentation: Presentation::from_json(&text)?,
                preset: None,
            })
        }
        (None, None) => Err(input_error(
            "no group given: use --preset NAME or --group FILE",
        )),
        (Some(_), Some(_)) => Err(input_error("give only one of --preset and --group")),
    }
}

fn subgroup_generators(group: &Group, label: Option<&str>) -> CliResult<Option<Vec<Word>>> {
    let Some(label) = label else {
        return Ok(None);
    };
    group
        .preset
        .as_ref()
        .and_then(|p| p.subgroup(label))
        .map(|s| Some(s.generators.clone()))
        .ok_or_else(|| input_error(format!("{} has no subgroup {label:?}", group.name)))
}

fn stats_json(s: &Stats) -> Value {
    json!({
        "closure_states": s.states,
        "max_word_length": s.max_word_length,
        "max_level": s.max_level,
    })
}

fn budget_json(b: &Budget) -> Value {
    json!({
        "max_closure_states": b.max_closure_states,
        "max_word_length": b.max_word_length,
        "max_level": b.max_level,
    })
}

fn parse_vertex(p: &Presentation, s: &str) -> CliResult<Vertex> {
    let v: Vertex = s.parse()?;
    v.check(p.degree())?;
    Ok(v)
}

fn run(cli: &Cli) -> CliResult<Report> {
    match &cli.command {
        Command::Zoo { what } => return zoo_command(cli, what),
        Command::Matrix(args) => return matrix_command(cli, args),
        _ => {}
    }
    let b = budget(cli)?;
    let group = load_group(cli)?;
    let p = &group.presentation;
    let word = |s: &str| -> CliResult<Word> { Ok(p.parse_word(s)?) };
    let report = match &cli.command {
        Command::Reduce { word: w } => {
            let r = p.normalize(&word(w)?);
            Report::new(
                format!("{}\n", p.format_word(&r)),
                json!({"input": w, "normal_form": p.format_word_ascii(&r), "length": r.len()}),
                OK,
            )
        }
        Command::Istrivial { word: w } => {
            let w = word(w)?;
            decision_report(
                p,
                &w,
                decision::is_trivial(p, &w, &b),
                &b,
                "trivial",
                "nontrivial",
            )
        }
        Command::Equal { w1, w2 } => {
            let (u, v) = (word(w1)?, word(w2)?);
            let quotient = p.multiply(&u, &v.inverse());
            decision_report(
                p,
                &quotient,
                decision::are_equal(p, &u, &v, &b),
                &b,
                "equal",
                "not equal",
            )
        }
        Command::Section { word: w, vertex } => {
            let w = word(w)?;
            let v = parse_vertex(p, vertex)?;
            let s = tree::section_at_vertex(p, &w, &v);
            let image = tree::act(p, &w, &v);
            Report::new(
                format!("{}\n", p.format_word(&s)),
                json!({"vertex": v.to_string(), "image": image.to_string(), "section": p.format_word_ascii(&s)}),
                OK,
            )
        }
        Command::Act { word: w, vertex } => {
            let w = word(w)?;
            let v = parse_vertex(p, vertex)?;
            let image = tree::act(p, &w, &v);
            Report::new(
                format!("{image}\n"),
                json!({"vertex": v.to_string(), "image": image.to_string()}),
                OK,
            )
        }
        Command::Portrait { word: w, depth } => {
            let w = word(w)?;
            let portrait = tree::portrait(p, &w, *depth, &b)?;
            let support = portrait.support();
            let mut text = format!("portrait of {} to depth {depth}\n", p.format_word(&w));
            if support.is_empty() {
                text.push_str("trivial above this depth\n");
            }
            let mut labels = serde_json::Map::new();
            for v in support {
                let perm = portrait.label(v).expect("support vertex has a label");
                text.push_str(&format!("{v}\t{perm}\n"));
                labels.insert(v.to_string(), json!(perm.to_string()));
            }
            Report::new(text, json!({"depth": depth, "labels": labels}), OK)
        }
        Command::Order { word: w } => {
            let w = word(w)?;
            match decision::try_order(p, &w, b.max_level, &b) {
                OrderResult::Finite(q) => Report::new(
                    format!("order {q}\n"),
                    json!({"order": q, "exact": true, "budget": budget_json(&b)}),
                    OK,
                ),
                OrderResult::LowerBound(q) => Report::new(
                    format!(
                        "order at least {q} (exact order not certified up to level {})\n",
                        b.max_level
                    ),
                    json!({"order": q, "exact": false, "budget": budget_json(&b)}),
                    INCONCLUSIVE,
                ),
                OrderResult::BudgetExceeded(s) => Report::new(
                    format!("budget exceeded ({s})\n"),
                    json!({"budget_exceeded": true, "stats": stats_json(&s), "budget": budget_json(&b)}),
                    BUDGET,
                ),
            }
        }
        Command::LevelPerm { word: w, n } => {
            let w = word(w)?;
            let lp = decision::perm_on_level(p, &w, *n, &b)?;
            let perm = lp.to_perm();
            let mut cycle_type = lp.cycle_lengths();
            cycle_type.retain(|&l| l > 1);
            let order = lp.order();
            let mut text = String::new();
            if lp.images.len() <= 256 {
                text.push_str(&format!("{perm}\n"));
            }
            text.push_str(&format!(
                "level {n}: cycle type {:?}, order {}\n",
                cycle_type,
                order.map_or("overflow".into(), |o| o.to_string())
            ));
            Report::new(
                text,
                json!({"level": n, "images": lp.images, "cycle_type": cycle_type, "order": order, "identity": lp.is_identity()}),
                OK,
            )
        }
        Command::St1 { what } => match what {
            St1Command::Index => {
                let image = decision::root_image_group(p);
                Report::new(
                    format!("{}\n", image.index()),
                    json!({"index": image.index(), "root_image": image.elements.iter().map(|e| e.to_string()).collect::<Vec<_>>()}),
                    OK,
                )
            }
            St1Command::Gens => {
                let gens = decision::st1_schreier_generators(p);
                let words: Vec<String> = gens.iter().map(|g| p.format_word(g)).collect();
                let ascii: Vec<String> = gens.iter().map(|g| p.format_word_ascii(g)).collect();
                let mut text = words.join("\n");
                text.push('\n');
                Report::new(text, json!({"generators": ascii}), OK)
            }
        },
        Command::Saturate {
            max_automaton_states,
        } => {
            let m = mealy::saturate(p, *max_automaton_states)?;
            Report::new(m.to_text(), automaton_json(&m)?, OK)
        }
        Command::Minimize {
            max_automaton_states,
        } => {
            let m = mealy::saturate(p, *max_automaton_states)?;
            let (min, _) = m.minimize();
            Report::new(
                format!(
                    "{} states minimize to {}\n{}",
                    m.len(),
                    min.len(),
                    min.to_text()
                ),
                automaton_json(&min)?,
                OK,
            )
        }
        Command::Engel { g, h, nmax } => {
            let (g, h) = (word(g)?, word(h)?);
            engel_report(p, &g, &h, *nmax, &b)
        }
        Command::Survey {
            rg,
            rh,
            nmax,
            subgroup,
        } => {
            let gens = subgroup_generators(&group, subgroup.as_deref())?;
            let params = SurveyParams {
                r_g: *rg,
                r_h: *rh,
                n_max: *nmax,
                budget: b,
                threads: cli.threads.max(1),
            };
            let label = match subgroup {
                Some(s) => format!("{}/{s}", group.name),
                None => group.name.clone(),
            };
            let report = engel::engel_survey(p, &label, gens.as_deref(), &params);
            let possibly = report
                .records
                .iter()
                .any(|r| matches!(r.status, engel::ElementStatus::PossiblyEngel { .. }));
            let code = if report.all_non_engel() {
                OK
            } else if possibly {
                INCONCLUSIVE
            } else {
                BUDGET
            };
            let json = serde_json::to_value(&report).expect("report serializes");
            Report::new(report.to_text(), json, code)
        }
        Command::Fractal { what } => fractal_command(p, &group, what, &b)?,
        Command::Matrix(_) | Command::Zoo { .. } => unreachable!("handled above"),
    };
    Ok(report)
}

fn decision_report(
    p: &Presentation,
    w: &Word,
    outcome: Outcome,
    b: &Budget,
    yes: &str,
    no: &str,
) -> Report {
    match outcome {
        Outcome::Trivial { closure, stats } => Report::new(
            format!("{yes}\nclosure of {} words ({stats})\n", closure.len()),
            json!({
                "verdict": yes,
                "word": p.format_word_ascii(w),
                "closure": closure.iter().map(|c| p.format_word_ascii(c)).collect::<Vec<_>>(),
                "stats": stats_json(&stats),
                "budget": budget_json(b),
            }),
            OK,
        ),
        Outcome::Nontrivial { witness, stats } => Report::new(
            format!("{no}\nwitness: section at {witness} moves its first level ({stats})\n"),
            json!({
                "verdict": no,
                "word": p.format_word_ascii(w),
                "witness": witness.to_string(),
                "stats": stats_json(&stats),
                "budget": budget_json(b),
            }),
            FAILS,
        ),
        Outcome::BudgetExceeded { stats } => Report::new(
            format!("budget exceeded ({stats})\n"),
            json!({"verdict": "budget exceeded", "stats": stats_json(&stats), "budget": budget_json(b)}),
            BUDGET,
        ),
    }
}

/// Group-file JSON of the automaton, loadable with `--group`.
fn automaton_json(m: &mealy::MealyAutomaton) -> CliResult<Value> {
    let text = m.to_presentation()?.to_json();
    Ok(serde_json::from_str(&text).expect("presentation JSON parses"))
}

fn engel_report(p: &Presentation, g: &Word, h: &Word, nmax: usize, b: &Budget) -> Report {
    let head = json!({"g": p.format_word_ascii(g), "h": p.format_word_ascii(h), "nmax": nmax, "budget": budget_json(b)});
    let with = |mut v: Value, extra: Value| {
        if let (Value::Object(a), Value::Object(e)) = (&mut v, extra) {
            a.extend(e);
        }
        v
    };
    match engel::left_engel_test(p, g, h, nmax, b) {
        EngelResult::EngelAt(n) => Report::new(
            format!("Engel at n = {n}\n"),
            with(head, json!({"result": "engel", "n": n})),
            OK,
        ),
        EngelResult::NotEngelUpTo(n) => Report::new(
            format!("not Engel up to {n}\n"),
            with(head, json!({"result": "not-engel", "n": n})),
            FAILS,
        ),
        EngelResult::BudgetExceeded { at, stats } => Report::new(
            format!("budget exceeded at n = {at} ({stats})\n"),
            with(
                head,
                json!({"result": "budget", "n": at, "stats": stats_json(&stats)}),
            ),
            BUDGET,
        ),
    }
}

fn fractal_command(
    p: &Presentation,
    group: &Group,
    what: &FractalCommand,
    b: &Budget,
) -> CliResult<Report> {
    match what {
        FractalCommand::Verify { cert, subgroup } => {
            let gens = subgroup_generators(group, subgroup.as_deref())?;
            let labelled = engel::labelled(p, gens.as_deref());
            let text = std::fs::read_to_string(cert)
                .map_err(|e| input_error(format!("{}: {e}", cert.display())))?;
            let cert = FractalCertificate::from_json(p, &text)?;
            let checks = engel::verify_fractal_certificate(p, &labelled, &cert, b);
            let holds = engel::certificate_holds(&checks);
            let mut text = String::new();
            for c in &checks {
                text.push_str(&format!(
                    "{},{}\t{:?}\n",
                    c.generator, c.coordinate, c.verdict
                ));
            }
            text.push_str(if holds {
                "certificate holds\n"
            } else {
                "certificate fails\n"
            });
            Ok(Report::new(
                text,
                json!({"holds": holds, "checks": checks}),
                if holds { OK } else { FAILS },
            ))
        }
        FractalCommand::Search { radius, subgroup } => {
            if *radius == 0 {
                return Err(input_error("--radius must be at least 1"));
            }
            let gens = subgroup_generators(group, subgroup.as_deref())?;
            let labelled = engel::labelled(p, gens.as_deref());
            match engel::search_fractal_witnesses(p, &labelled, *radius, b) {
                FractalSearch::Found(cert) => {
                    let json: Value = serde_json::from_str(&cert.to_json(p)).expect("valid json");
                    Ok(Report::new(
                        cert.to_json(p),
                        json!({"found": true, "certificate": json}),
                        OK,
                    ))
                }
                FractalSearch::NotFound { partial, missing } => {
                    let mut text = String::from("no certificate within radius\n");
                    for (g, x) in &missing {
                        text.push_str(&format!("missing {g},{x}\n"));
                    }
                    let json: Value =
                        serde_json::from_str(&partial.to_json(p)).expect("valid json");
                    let missing: Vec<String> =
                        missing.iter().map(|(g, x)| format!("{g},{x}")).collect();
                    Ok(Report::new(
                        text,
                        json!({"found": false, "missing": missing, "partial": json}),
                        FAILS,
                    ))
                }
            }
        }
    }
}

fn zoo_command(cli: &Cli, what: &ZooCommand) -> CliResult<Report> {
    let name = |given: &Option<String>| -> CliResult<String> {
        given
            .clone()
            .or_else(|| cli.preset.clone())
            .ok_or_else(|| input_error("name a preset, e.g. `zoo verify basilica`"))
    };
    match what {
        ZooCommand::List => {
            let mut text = zoo::PRESET_NAMES.join("\n");
            text.push('\n');
            Ok(Report::new(text, json!({"presets": zoo::PRESET_NAMES}), OK))
        }
        ZooCommand::Dump { name: n } => {
            let preset = zoo::preset(&name(n)?)?;
            let text = preset.group.to_json();
            let json: Value = serde_json::from_str(&text).expect("valid json");
            Ok(Report::new(text, json, OK))
        }
        ZooCommand::Verify { name: n } => {
            let n = name(n)?;
            let b = budget(cli)?;
            let checks = zoo::verify_identities(&n, &b)?;
            let pass = zoo::checks_pass(&checks);
            let mut text = format!("{n}\n");
            for c in &checks {
                let mark = match (c.passed, c.informational) {
                    (true, _) => "ok  ",
                    (false, true) => "info",
                    (false, false) => "FAIL",
                };
                text.push_str(&format!("[{mark}] {}: {}\n", c.label, c.detail));
            }
            Ok(Report::new(
                text,
                json!({"preset": n, "passed": pass, "checks": checks, "budget": budget_json(&b)}),
                if pass { OK } else { FAILS },
            ))
        }
    }
}

fn matrix_command(cli: &Cli, args: &MatrixArgs) -> CliResult<Report> {
    let source = args.matrix.trim_start();
    let text = if source.starts_with('[') || source.starts_with('{') {
        args.matrix.clone()
    } else {
        std::fs::read_to_string(&args.matrix)
            .map_err(|e| input_error(format!("{}: {e}", args.matrix)))?
    };
    let m = IntMatrix::from_json(&text)?;
    let cap = args.order_cap.unwrap_or(1000);
    let mut out = String::new();
    let mut json = serde_json::Map::new();
    json.insert(
        "matrix".into(),
        serde_json::from_str(&m.to_json()).expect("valid json"),
    );
    let mut code = OK;
    let any = args.classify
        || args.unipotent
        || args.order_cap.is_some()
        || args.exponent_check
        || args.power_check.is_some()
        || args.lattice;
    if !any {
        return Err(input_error(
            "choose --classify, --unipotent, --order-cap, --exponent-check, --power-check or --lattice",
        ));
    }
    if args.unipotent {
        let u = if m.modulus() == 0 {
            abelian::is_unipotent(&m)?
        } else {
            abelian::is_unipotent_mod(&m)?
        };
        out.push_str(&format!("unipotent: {u}\n"));
        json.insert("unipotent".into(), json!(u));
        if !u {
            code = code.max(FAILS);
        }
    }
    if args.order_cap.is_some() {
        let o = abelian::order_of_matrix(&m, cap);
        match o {
            MatrixOrder::Finite(e) => out.push_str(&format!("order {e}\n")),
            MatrixOrder::LowerBound(e) => out.push_str(&format!("order > {e}\n")),
        }
        json.insert("order".into(), serde_json::to_value(o).expect("serializes"));
    }
    if args.classify {
        let c = abelian::classify_engel_action(&m, cap)?;
        out.push_str(&format!("classification: {c:?}\n"));
        json.insert(
            "classification".into(),
            serde_json::to_value(c).expect("serializes"),
        );
    }
    if args.lattice {
        let (rank, finite) = abelian::commutator_lattice(&m)?;
        out.push_str(&format!("[A, g] has rank {rank}; finite: {finite}\n"));
        json.insert("lattice".into(), json!({"rank": rank, "finite": finite}));
    }
    if args.exponent_check {
        let ell = match args.ell {
            Some(l) => l,
            None => match abelian::order_of_matrix(&m, cap) {
                MatrixOrder::Finite(e) => e,
                MatrixOrder::LowerBound(_) => {
                    return Err(input_error(format!(
                        "no finite order up to {cap}; pass --ell"
                    )))
                }
            },
        };
        let n = match args.n {
            Some(n) => n,
            None => abelian::nilpotency_index(&m)?
                .ok_or_else(|| input_error("M - I is not nilpotent; pass --n"))?
                .max(1),
        };
        let c = abelian::engel_exponent_check(&m, ell, n, abelian::DEFAULT_SAMPLES, cli.seed)?;
        out.push_str(&format!(
            "exponent check (ℓ={ell}, n={n}): {} over {} {} vectors\n",
            if c.holds { "holds" } else { "fails" },
            if c.exhaustive { "all" } else { "sampled" },
            c.vectors
        ));
        if let Some(v) = &c.counterexample {
            out.push_str(&format!("counterexample {v:?}\n"));
        }
        if !c.holds {
            code = code.max(FAILS);
        }
        json.insert(
            "exponent_check".into(),
            json!({"ell": ell, "n": n, "result": c}),
        );
    }
    if let Some(k) = args.power_check {
        let c = abelian::power_commutator_check(&m, k, abelian::DEFAULT_SAMPLES, cli.seed)?;
        out.push_str(&format!(
            "power check (k={k}): {} over {} {} vectors\n",
            if c.holds { "holds" } else { "fails" },
            if c.exhaustive { "all" } else { "sampled" },
            c.vectors
        ));
        if !c.holds {
            code = code.max(FAILS);
        }
        json.insert("power_check".into(), json!({"k": k, "result": c}));
    }
    Ok(Report::new(out, Value::Object(json), code))
}
