//! Browser bindings: tree portraits, level permutations and left Engel
//! tests for the built-in groups.

use serde_json::json;
use wasm_bindgen::prelude::*;

use engelscope::decision::perm_on_level;
use engelscope::engel::{left_engel_test, EngelResult};
use engelscope::tree::portrait;
use engelscope::{zoo, Budget, Presentation, Vertex};

/// Portraits deeper than this get unreadably small.
pub const MAX_PORTRAIT_DEPTH: usize = 7;
pub const MAX_LEVEL: usize = 10;
pub const MAX_NMAX: usize = 12;

fn group(preset: &str) -> Result<Presentation, String> {
    zoo::preset(preset)
        .map(|p| p.group)
        .map_err(|e| e.to_string())
}

/// SVG drawing of the portrait of `word` down to `depth`. Vertices with a
/// nontrivial label are filled and annotated with the permutation.
pub fn portrait_svg_string(preset: &str, word: &str, depth: usize) -> Result<String, String> {
    if depth == 0 || depth > MAX_PORTRAIT_DEPTH {
        return Err(format!("depth must be between 1 and {MAX_PORTRAIT_DEPTH}"));
    }
    let p = group(preset)?;
    let w = p.parse_word(word).map_err(|e| e.to_string())?;
    let d = p.degree();
    if d.pow(depth as u32 - 1) > 729 {
        return Err("too many vertices to draw; lower the depth".into());
    }
    let pt = portrait(&p, &w, depth, &Budget::default()).map_err(|e| e.to_string())?;
    let width = 960.0_f64;
    let row = 70.0_f64;
    let height = row * depth as f64 + 20.0;
    let pos = |v: &Vertex| {
        let k = v.level();
        let n = d.pow(k as u32) as f64;
        let i = v.index(d) as f64;
        (width * (i + 0.5) / n, 20.0 + row * k as f64)
    };
    let mut edges = String::new();
    let mut nodes = String::new();
    for (v, perm) in &pt.labels {
        let (x, y) = pos(v);
        if v.level() + 1 < depth {
            for c in 0..d {
                let (cx, cy) = pos(&v.child(c));
                edges.push_str(&format!(
                    "<line x1=\"{x:.1}\" y1=\"{y:.1}\" x2=\"{cx:.1}\" y2=\"{cy:.1}\" stroke=\"#999\"/>"
                ));
            }
        }
        let active = !perm.is_identity();
        nodes.push_str(&format!(
            "<circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"6\" fill=\"{}\" stroke=\"#333\"><title>{} {}</title></circle>",
            if active { "#c0392b" } else { "#fff" },
            v,
            perm
        ));
        if active && d.pow(v.level() as u32) <= 32 {
            nodes.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
                x,
                y - 9.0,
                perm
            ));
        }
    }
    Ok(format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">{edges}{nodes}</svg>"
    ))
}

/// JSON with the cycle type, order and (for small levels) cycle notation.
pub fn level_permutation_json(preset: &str, word: &str, n: usize) -> Result<String, String> {
    if n == 0 || n > MAX_LEVEL {
        return Err(format!("level must be between 1 and {MAX_LEVEL}"));
    }
    let p = group(preset)?;
    let w = p.parse_word(word).map_err(|e| e.to_string())?;
    let lp = perm_on_level(&p, &w, n, &Budget::default()).map_err(|e| e.to_string())?;
    let mut cycle_type = lp.cycle_lengths();
    cycle_type.retain(|&l| l > 1);
    let cycles = (lp.images.len() <= 256).then(|| lp.to_perm().to_string());
    Ok(json!({
        "level": n,
        "cycle_type": cycle_type,
        "order": lp.order(),
        "identity": lp.is_identity(),
        "cycles": cycles,
    })
    .to_string())
}

/// JSON with the outcome of the left Engel test of `h` against `g`.
pub fn engel_test_json(preset: &str, g: &str, h: &str, nmax: usize) -> Result<String, String> {
    if nmax > MAX_NMAX {
        return Err(format!("n_max must be at most {MAX_NMAX}"));
    }
    let p = group(preset)?;
    let g = p.parse_word(g).map_err(|e| e.to_string())?;
    let h = p.parse_word(h).map_err(|e| e.to_string())?;
    let v = match left_engel_test(&p, &g, &h, nmax, &Budget::default()) {
        EngelResult::EngelAt(n) => json!({"result": "engel", "n": n}),
        EngelResult::NotEngelUpTo(n) => json!({"result": "not-engel", "n": n}),
        EngelResult::BudgetExceeded { at, stats } => {
            json!({"result": "budget", "n": at, "stats": stats.to_string()})
        }
    };
    Ok(v.to_string())
}

pub fn presets() -> Vec<&'static str> {
    zoo::PRESET_NAMES.to_vec()
}

#[wasm_bindgen]
pub fn portrait_svg(preset: &str, word: &str, depth: usize) -> Result<String, JsError> {
    portrait_svg_string(preset, word, depth).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn level_permutation(preset: &str, word: &str, n: usize) -> Result<String, JsError> {
    level_permutation_json(preset, word, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn engel_test(preset: &str, g: &str, h: &str, nmax: usize) -> Result<String, JsError> {
    engel_test_json(preset, g, h, nmax).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn preset_names() -> String {
    presets().join("\n")
}
