//! Deterministic text formatting: floats at 17 significant digits so
//! identical invocations produce byte-identical files and JSON.

/// `{:.16e}` carries 17 significant digits, enough to round-trip f64.
pub fn f(x: f64) -> String {
    if x.is_nan() {
        "null".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "1e999".into() } else { "-1e999".into() }
    } else {
        format!("{x:.16e}")
    }
}

pub fn float_array(values: &[f64]) -> String {
    let inner: Vec<String> = values.iter().map(|&v| f(v)).collect();
    format!("[{}]", inner.join(","))
}

pub fn json_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Builds a JSON object with the insertion order preserved.
pub struct JsonObject {
    fields: Vec<(String, String)>,
}

impl JsonObject {
    pub fn new() -> Self {
        Self { fields: Vec::new() }
    }

    pub fn push_raw(&mut self, key: &str, raw: impl Into<String>) -> &mut Self {
        self.fields.push((key.to_string(), raw.into()));
        self
    }

    pub fn push_f64(&mut self, key: &str, value: f64) -> &mut Self {
        self.push_raw(key, f(value))
    }

    pub fn push_usize(&mut self, key: &str, value: usize) -> &mut Self {
        self.push_raw(key, value.to_string())
    }

    pub fn push_str(&mut self, key: &str, value: &str) -> &mut Self {
        self.push_raw(key, json_str(value))
    }

    pub fn push_bool(&mut self, key: &str, value: bool) -> &mut Self {
        self.push_raw(key, if value { "true" } else { "false" })
    }

    pub fn finish(&self) -> String {
        let inner: Vec<String> = self
            .fields
            .iter()
            .map(|(k, v)| format!("{}:{}", json_str(k), v))
            .collect();
        format!("{{{}}}", inner.join(","))
    }
}

pub fn json_array(items: impl IntoIterator<Item = String>) -> String {
    let inner: Vec<String> = items.into_iter().collect();
    format!("[{}]", inner.join(","))
}
