//! WebAssembly bindings for the static demo page in `www/`. Each exported
//! function takes a table (a bundled fixture name or CTBL text) and returns
//! a JSON string; the plain Rust versions are what the tests exercise.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use sct_core::enumerate::{enumerate_theories, Mode};
use sct_core::{filtration, fixtures, is_good, parse_ctbl, CharacterTable, IndexSet, IrrPartition};

/// A bundled fixture by name, or else the text parsed as a CTBL document.
pub fn load(source: &str) -> Result<CharacterTable, String> {
    let source = source.trim();
    if let Some(text) = fixtures::text(source) {
        return parse_ctbl(text).map_err(|e| e.to_string());
    }
    parse_ctbl(source).map_err(|e| e.to_string())
}

fn parse_set(text: &str, k: usize) -> Result<IndexSet, String> {
    let indices = text
        .split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| format!("not an index: {:?}", s.trim())))
        .collect::<Result<Vec<_>, _>>()?;
    IndexSet::from_indices(&indices, k).map_err(|e| e.to_string())
}

fn render(v: Value) -> String {
    serde_json::to_string(&v).expect("json renders")
}

fn table_summary(t: &CharacterTable) -> Value {
    json!({
        "name": t.name(),
        "order": t.order(),
        "classes": t.k(),
        "degrees": t.degrees(),
    })
}

pub fn fixture_list() -> String {
    let list: Vec<Value> = fixtures::names()
        .map(|n| {
            let t = fixtures::load(n);
            json!({ "id": n, "name": t.name(), "classes": t.k() })
        })
        .collect();
    render(Value::Array(list))
}

pub fn describe(source: &str) -> Result<String, String> {
    Ok(render(table_summary(&load(source)?)))
}

pub fn good(source: &str, set: &str) -> Result<String, String> {
    let t = load(source)?;
    let x = parse_set(set, t.k())?;
    let verdict = is_good(&t, x).map_err(|e| e.to_string())?;
    Ok(render(json!({
        "set": x,
        "good": verdict.is_good(),
        "text": verdict.to_string(),
    })))
}

pub fn filter(source: &str, blocks: &str) -> Result<String, String> {
    let t = load(source)?;
    let blocks = blocks.split('|').map(|b| parse_set(b, t.k())).collect::<Result<Vec<_>, _>>()?;
    let p = IrrPartition::new(t.k(), blocks).map_err(|e| e.to_string())?;
    let f = filtration(&t, &p).map_err(|e| e.to_string())?;
    let kept: Vec<bool> = p.blocks().iter().map(|&b| f.contains_block(b)).collect();
    Ok(render(json!({ "input": p, "filtration": f, "kept": kept })))
}

pub fn theories(source: &str) -> Result<String, String> {
    let t = load(source)?;
    let list = enumerate_theories(&t, Mode::Pruned).map_err(|e| e.to_string())?;
    Ok(render(serde_json::to_value(&list).expect("theories serialize")))
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = fixtureList)]
pub fn fixture_list_js() -> String {
    fixture_list()
}

#[wasm_bindgen(js_name = describeTable)]
pub fn describe_js(source: &str) -> Result<String, JsValue> {
    js(describe(source))
}

#[wasm_bindgen(js_name = isGood)]
pub fn good_js(source: &str, set: &str) -> Result<String, JsValue> {
    js(good(source, set))
}

#[wasm_bindgen(js_name = filtration)]
pub fn filter_js(source: &str, blocks: &str) -> Result<String, JsValue> {
    js(filter(source, blocks))
}

#[wasm_bindgen(js_name = theories)]
pub fn theories_js(source: &str) -> Result<String, JsValue> {
    js(theories(source))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn fixtures_are_listed() {
        let v = parse(&fixture_list());
        let ids: Vec<&str> = v.as_array().unwrap().iter().map(|f| f["id"].as_str().unwrap()).collect();
        assert!(ids.contains(&"sp6_2") && ids.contains(&"z3"));
        assert_eq!(parse(&describe("s3").unwrap())["degrees"], json!([1, 1, 2]));
    }

    #[test]
    fn good_sets() {
        let v = parse(&good("z5", "1,4").unwrap());
        assert_eq!(v["good"], true);
        let v = parse(&good("sp6_2", "1,2").unwrap());
        assert_eq!(v["good"], false);
        assert!(v["text"].as_str().unwrap().starts_with("bad (witness: chars 1,2"));
        assert!(good("s3", "9").is_err());
        assert!(good("s3", "a").is_err());
    }

    #[test]
    fn pasted_tables() {
        let text = fixtures::text("s3").unwrap();
        assert_eq!(parse(&theories(text).unwrap())["count"], 2);
        let broken = text.replace("[1, 3, 2]", "[1, 2, 3]");
        assert!(theories(&broken).unwrap_err().contains("orthogonality"));
    }

    #[test]
    fn filtration_and_theories() {
        let v = parse(&filter("z5", "1,4").unwrap());
        assert_eq!(v["kept"], json!([true]));
        assert_eq!(parse(&theories("z4").unwrap())["count"], 3);
        assert!(filter("z5", "1,2|2").is_err());
    }
}
