//! Browser demo bindings: a thin JSON facade over the core library, meant
//! to be called from the static page in `www/`. All heavy lifting stays in
//! the core crate; every function takes the game in its text format and
//! returns a JSON string.

use std::collections::BTreeMap;

use wasm_bindgen::prelude::*;

use winpoly::analysis::{compute_repairs, report};
use winpoly::fixpoint::{GfpMode, SolveOptions};
use winpoly::semiring::MinMax;
use winpoly::{pi_strat, solve_win0, BuchiGame, Player, RepairSpec, TrackingSpec, Var};

fn err(message: impl std::fmt::Display) -> String {
    message.to_string()
}

fn parse_game(text: &str) -> Result<BuchiGame, String> {
    BuchiGame::parse(text).map_err(err)
}

/// The demo always runs the accelerated fixed-point mode; it converges in
/// a handful of steps on anything a browser session would build.
fn options() -> SolveOptions {
    SolveOptions {
        gfp_mode: GfpMode::Accelerated,
        max_monomials: 20_000,
        ..SolveOptions::default()
    }
}

/// Game structure for rendering: positions with owner/target flags, edges
/// with labels.
#[wasm_bindgen]
pub fn game_info(text: &str) -> Result<String, JsValue> {
    game_info_impl(text).map_err(|e| JsValue::from_str(&e))
}

fn game_info_impl(text: &str) -> Result<String, String> {
    let game = parse_game(text)?;
    let positions: Vec<_> = game
        .positions()
        .map(|v| {
            serde_json::json!({
                "name": game.name(v),
                "owner": if game.owner(v) == Player::One { 1 } else { 0 },
                "target": game.is_target(v),
            })
        })
        .collect();
    let edges: Vec<_> = game
        .edges()
        .map(|e| {
            let edge = game.edge(e);
            serde_json::json!({
                "label": edge.label,
                "from": game.name(edge.from),
                "to": game.name(edge.to),
            })
        })
        .collect();
    Ok(serde_json::json!({ "positions": positions, "edges": edges }).to_string())
}

/// Solves the winning-region polynomial at every position and decodes the
/// strategy report. `track` is a comma-separated list of edge labels;
/// empty means track everything.
#[wasm_bindgen]
pub fn solve(text: &str, track: &str) -> Result<String, JsValue> {
    solve_impl(text, track).map_err(|e| JsValue::from_str(&e))
}

fn solve_impl(text: &str, track: &str) -> Result<String, String> {
    let game = parse_game(text)?;
    let tracking = if track.trim().is_empty() {
        TrackingSpec::all(&game)
    } else {
        let labels: Vec<&str> = track
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .collect();
        TrackingSpec::from_labels(&game, &labels).map_err(err)?
    };
    let interp = pi_strat(&game, &tracking);
    let solution = solve_win0(&game, &interp, &options()).map_err(err)?;
    let per_position: Vec<_> = game
        .positions()
        .map(|v| {
            let rep = report(solution.value(v), &game, v);
            serde_json::json!({
                "position": rep.position,
                "winner": rep.winner,
                "polynomial": solution.value(v).to_string(),
                "value": solution.value(v),
                "monomials": rep.monomials,
                "counts": rep.counts,
            })
        })
        .collect();
    Ok(serde_json::json!({ "positions": per_position }).to_string())
}

/// Computes all repairs within the given bounds that make Player 0 win
/// from `position`. `add` holds comma-separated `from:to` pairs, `remove`
/// comma-separated edge labels.
#[wasm_bindgen]
pub fn repair(text: &str, position: &str, add: &str, remove: &str) -> Result<String, JsValue> {
    repair_impl(text, position, add, remove).map_err(|e| JsValue::from_str(&e))
}

fn repair_impl(text: &str, position: &str, add: &str, remove: &str) -> Result<String, String> {
    let game = parse_game(text)?;
    let v = game.position_by_name(position).map_err(err)?;
    let add_pairs: Vec<(String, String)> = add
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.split_once(':')
                .map(|(f, t)| (f.trim().to_string(), t.trim().to_string()))
                .ok_or_else(|| err(format!("additions are from:to pairs, got `{s}`")))
        })
        .collect::<Result<_, _>>()?;
    let remove_labels: Vec<String> = remove
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect();
    let spec = RepairSpec::from_names(&game, &add_pairs, &remove_labels).map_err(err)?;
    let result = compute_repairs(&game, &spec, v, false, &options()).map_err(err)?;
    Ok(serde_json::json!({
        "position": game.name(v),
        "winner": !result.value.is_zero(),
        "polynomial": result.value.to_string(),
        "repairs": result.entries(&game),
    })
    .to_string())
}

/// Evaluates the winning-region polynomial at `position` under a builtin
/// semiring. `assign` holds comma-separated `label=value` pairs; for the
/// min-max semiring, `levels` orders the levels as `low<mid<high`.
#[wasm_bindgen]
pub fn eval(
    text: &str,
    position: &str,
    semiring: &str,
    assign: &str,
    levels: &str,
) -> Result<String, JsValue> {
    eval_impl(text, position, semiring, assign, levels).map_err(|e| JsValue::from_str(&e))
}

fn eval_impl(
    text: &str,
    position: &str,
    semiring: &str,
    assign: &str,
    levels: &str,
) -> Result<String, String> {
    let game = parse_game(text)?;
    let v = game.position_by_name(position).map_err(err)?;
    let interp = pi_strat(&game, &TrackingSpec::all(&game));
    let solution = solve_win0(&game, &interp, &options()).map_err(err)?;
    let poly = solution.value(v);

    let pairs: Vec<(String, String)> = assign
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.split_once('=')
                .map(|(k, val)| (k.trim().to_string(), val.trim().to_string()))
                .ok_or_else(|| err(format!("assignments are label=value pairs, got `{s}`")))
        })
        .collect::<Result<_, _>>()?;

    let value = match semiring {
        "boolean" => {
            let mut h = BTreeMap::new();
            for (label, raw) in &pairs {
                let b = matches!(raw.as_str(), "1" | "true");
                h.insert(Var::new(label.as_str()), b);
            }
            serde_json::json!(poly.eval(&h, &winpoly::Boolean).map_err(err)?)
        }
        "viterbi" => {
            let ring = winpoly::Viterbi;
            let mut h = BTreeMap::new();
            for (label, raw) in &pairs {
                let x: f64 = raw
                    .parse()
                    .map_err(|_| err(format!("not a number: {raw}")))?;
                h.insert(Var::new(label.as_str()), ring.check(x).map_err(err)?);
            }
            serde_json::json!(poly.eval(&h, &ring).map_err(err)?)
        }
        "tropical" => {
            let ring = winpoly::Tropical;
            let mut h = BTreeMap::new();
            for (label, raw) in &pairs {
                let x = if raw == "inf" {
                    f64::INFINITY
                } else {
                    let parsed: f64 = raw
                        .parse()
                        .map_err(|_| err(format!("not a number: {raw}")))?;
                    ring.check(parsed).map_err(err)?
                };
                h.insert(Var::new(label.as_str()), x);
            }
            let out = poly.eval(&h, &ring).map_err(err)?;
            if out.is_infinite() {
                serde_json::json!("inf")
            } else {
                serde_json::json!(out)
            }
        }
        "minmax" => {
            let ring = MinMax::new(levels.split('<').map(|s| s.trim().to_string()).collect())
                .map_err(err)?;
            let mut h = BTreeMap::new();
            for (label, raw) in &pairs {
                h.insert(
                    Var::new(label.as_str()),
                    ring.level_index(raw).map_err(err)?,
                );
            }
            let out = poly.eval(&h, &ring).map_err(err)?;
            serde_json::json!(ring.level_name(out))
        }
        other => return Err(err(format!("unknown semiring `{other}`"))),
    };
    Ok(serde_json::json!({
        "position": game.name(v),
        "polynomial": poly.to_string(),
        "semiring": semiring,
        "value": value,
    })
    .to_string())
}
