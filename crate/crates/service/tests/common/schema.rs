//! Structural checks of the API's JSON bodies.

use serde_json::Value;

type Check = Result<(), String>;

fn field<'a>(v: &'a Value, key: &str, at: &str) -> Result<&'a Value, String> {
    v.get(key).ok_or_else(|| format!("{at}: missing `{key}`"))
}

fn number(v: &Value, key: &str, at: &str) -> Result<f64, String> {
    field(v, key, at)?.as_f64().ok_or_else(|| format!("{at}.{key}: not a number"))
}

fn uint(v: &Value, key: &str, at: &str) -> Result<u64, String> {
    field(v, key, at)?.as_u64().ok_or_else(|| format!("{at}.{key}: not a non-negative integer"))
}

fn string<'a>(v: &'a Value, key: &str, at: &str) -> Result<&'a str, String> {
    field(v, key, at)?.as_str().ok_or_else(|| format!("{at}.{key}: not a string"))
}

fn array<'a>(v: &'a Value, key: &str, at: &str) -> Result<&'a Vec<Value>, String> {
    field(v, key, at)?.as_array().ok_or_else(|| format!("{at}.{key}: not an array"))
}

fn day(s: &str, at: &str) -> Check {
    chrono::NaiveDate::parse_from_str(s, "%Y-%m-%d").map(|_| ()).map_err(|_| format!("{at}: bad day {s:?}"))
}

fn timestamp(s: &str, at: &str) -> Check {
    chrono::NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%SZ").map(|_| ()).map_err(|_| format!("{at}: bad timestamp {s:?}"))
}

fn sentiment(s: &str, at: &str) -> Check {
    match s {
        "negative" | "neutral" | "positive" => Ok(()),
        _ => Err(format!("{at}: bad sentiment label {s:?}")),
    }
}

pub fn region_counts(v: &Value) -> Check {
    let obj = v.as_object().ok_or("regions: not an object")?;
    for (k, n) in obj {
        n.as_u64().ok_or_else(|| format!("regions.{k}: not a count"))?;
    }
    Ok(())
}

pub fn day_counts(v: &Value, at: &str) -> Check {
    for (i, p) in v.as_array().ok_or_else(|| format!("{at}: not an array"))?.iter().enumerate() {
        let here = format!("{at}[{i}]");
        day(string(p, "day", &here)?, &here)?;
        uint(p, "count", &here)?;
    }
    Ok(())
}

pub fn topic_series(v: &Value) -> Check {
    for (i, s) in v.as_array().ok_or("series: not an array")?.iter().enumerate() {
        let at = format!("series[{i}]");
        string(s, "topic", &at)?;
        day_counts(field(s, "points", &at)?, &format!("{at}.points"))?;
        let kw = field(s, "keywords_by_day", &at)?.as_object().ok_or_else(|| format!("{at}.keywords_by_day: not an object"))?;
        for (d, list) in kw {
            day(d, &at)?;
            if !list.as_array().is_some_and(|l| l.iter().all(Value::is_string)) {
                return Err(format!("{at}.keywords_by_day.{d}: not a list of strings"));
            }
        }
    }
    Ok(())
}

pub fn cases(v: &Value) -> Check {
    string(v, "fingerprint", "cases")?;
    for (i, c) in array(v, "cases", "cases")?.iter().enumerate() {
        let at = format!("cases[{i}]");
        string(c, "case_id", &at)?;
        string(c, "region", &at)?;
        timestamp(string(c, "created_at", &at)?, &at)?;
        string(c, "topic", &at)?;
        uint(c, "influence", &at)?;
        let s = number(c, "sentiment", &at)?;
        if !(-1.0..=1.0).contains(&s) {
            return Err(format!("{at}.sentiment out of range"));
        }
        for axis in ["x", "y"] {
            let x = number(c, axis, &at)?;
            if !(0.0..=1.0).contains(&x) {
                return Err(format!("{at}.{axis} = {x} outside [0, 1]"));
            }
        }
        let g = field(c, "glyph", &at)?;
        number(g, "inner_radius", &at)?;
        uint(g, "topic_color_index", &at)?;
        let arcs = array(g, "arcs", &at)?;
        if arcs.len() != 4 {
            return Err(format!("{at}: {} arcs", arcs.len()));
        }
        for a in arcs {
            string(a, "metric", &at)?;
            for k in ["fraction", "start", "extent"] {
                number(a, k, &at)?;
            }
        }
    }
    Ok(())
}

pub fn propagation(v: &Value) -> Check {
    string(v, "case_id", "layout")?;
    let center = field(v, "center", "layout")?;
    number(center, "r", "center")?;
    uint(center, "influence", "center")?;
    for (i, ring) in array(v, "rings", "layout")?.iter().enumerate() {
        let at = format!("rings[{i}]");
        uint(ring, "depth", &at)?;
        number(ring, "r0", &at)?;
        number(ring, "r1", &at)?;
        for (j, s) in array(ring, "sectors", &at)?.iter().enumerate() {
            let at = format!("{at}.sectors[{j}]");
            day(string(s, "day", &at)?, &at)?;
            number(s, "t0", &at)?;
            number(s, "dt", &at)?;
            for (k, c) in array(s, "cells", &at)?.iter().enumerate() {
                let at = format!("{at}.cells[{k}]");
                string(c, "post_id", &at)?;
                for key in ["t0", "t1", "r0", "r1"] {
                    number(c, key, &at)?;
                }
                uint(c, "words", &at)?;
                sentiment(string(c, "sentiment", &at)?, &at)?;
                if let Some(k) = c.get("keyword") {
                    k.as_str().ok_or_else(|| format!("{at}.keyword: not a string"))?;
                }
            }
        }
    }
    day_counts(field(v, "histogram", "layout")?, "layout.histogram")
}

pub fn cells(v: &Value) -> Check {
    string(v, "case_id", "cells")?;
    day(string(v, "day", "cells")?, "cells")?;
    if !array(v, "post_ids", "cells")?.iter().all(Value::is_string) {
        return Err("cells.post_ids: not all strings".into());
    }
    Ok(())
}

pub fn posts(v: &Value) -> Check {
    for (i, p) in v.as_array().ok_or("posts: not an array")?.iter().enumerate() {
        let at = format!("posts[{i}]");
        for key in ["id", "user_id", "case_id", "text", "region", "kind"] {
            string(p, key, &at)?;
        }
        timestamp(string(p, "created_at", &at)?, &at)?;
        uint(p, "depth", &at)?;
        uint(p, "word_count", &at)?;
        let s = field(p, "sentiment", &at)?;
        number(s, "score", &at)?;
        sentiment(string(s, "label", &at)?, &at)?;
        let user = field(p, "user", &at)?;
        if !user.is_null() {
            string(user, "screen_name", &at)?;
            uint(user, "fans", &at)?;
        }
    }
    Ok(())
}

pub fn error(v: &Value) -> Check {
    string(v, "error", "error body").map(|_| ())
}

pub fn config(v: &Value) -> Check {
    array(v, "taxonomy", "config")?;
    array(v, "regions", "config")?;
    let colors = field(v, "colors", "config")?;
    for k in ["negative", "neutral", "positive"] {
        string(colors, k, "colors")?;
    }
    number(v, "sentiment_tau", "config")?;
    Ok(())
}

pub fn report(v: &Value) -> Check {
    for k in ["posts_read", "cases", "descendants", "users_read", "feature_vector_len", "posts_dropped"] {
        uint(v, k, "report")?;
    }
    array(v, "diagnostics", "report")?;
    number(field(v, "timings", "report")?, "total_ms", "timings")?;
    Ok(())
}

pub fn verdict(v: &Value) -> Check {
    string(v, "case_id", "verdict")?;
    string(v, "label", "verdict")?;
    string(v, "note", "verdict")?;
    timestamp(string(v, "recorded_at", "verdict")?, "verdict")
}
