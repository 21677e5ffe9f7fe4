//! Output formatting: significant-digit reals, a small deterministic JSON
//! writer, and CSV with a provenance header line.
//!
//! Identical invocations must produce byte-identical output, so nothing
//! here depends on time, environment or hash ordering.

/// Schema tag carried by every JSON document.
pub const SCHEMA: &str = "oscirad/1";

/// A real with `digits` significant digits in scientific notation.
pub fn sig(x: f64, digits: usize) -> String {
    let prec = digits.clamp(1, 17) - 1;
    format!("{:.*e}", prec, x)
}

/// Minimal JSON writer with explicit structure calls. Keys are emitted in
/// call order; numbers are written exactly as formatted by the caller.
pub struct Json {
    buf: String,
    first: Vec<bool>,
}

impl Json {
    pub fn object() -> Self {
        Json {
            buf: "{".to_string(),
            first: vec![true],
        }
    }

    fn pre_key(&mut self, key: &str) {
        if !self.first.last().copied().unwrap_or(true) {
            self.buf.push(',');
        }
        if let Some(f) = self.first.last_mut() {
            *f = false;
        }
        self.buf.push('"');
        self.buf.push_str(key);
        self.buf.push_str("\":");
    }

    fn pre_item(&mut self) {
        if !self.first.last().copied().unwrap_or(true) {
            self.buf.push(',');
        }
        if let Some(f) = self.first.last_mut() {
            *f = false;
        }
    }

    pub fn field_str(&mut self, key: &str, value: &str) -> &mut Self {
        self.pre_key(key);
        self.buf.push('"');
        for c in value.chars() {
            match c {
                '"' => self.buf.push_str("\\\""),
                '\\' => self.buf.push_str("\\\\"),
                '\n' => self.buf.push_str("\\n"),
                c => self.buf.push(c),
            }
        }
        self.buf.push('"');
        self
    }

    pub fn field_raw(&mut self, key: &str, raw: &str) -> &mut Self {
        self.pre_key(key);
        self.buf.push_str(raw);
        self
    }

    pub fn field_num(&mut self, key: &str, value: f64, digits: usize) -> &mut Self {
        self.field_raw(key, &sig(value, digits))
    }

    pub fn field_int(&mut self, key: &str, value: i64) -> &mut Self {
        self.field_raw(key, &value.to_string())
    }

    pub fn begin_array(&mut self, key: &str) -> &mut Self {
        self.pre_key(key);
        self.buf.push('[');
        self.first.push(true);
        self
    }

    pub fn end_array(&mut self) -> &mut Self {
        self.first.pop();
        self.buf.push(']');
        self
    }

    pub fn begin_item_object(&mut self) -> &mut Self {
        self.pre_item();
        self.buf.push('{');
        self.first.push(true);
        self
    }

    pub fn end_item_object(&mut self) -> &mut Self {
        self.first.pop();
        self.buf.push('}');
        self
    }

    pub fn item_raw(&mut self, raw: &str) -> &mut Self {
        self.pre_item();
        self.buf.push_str(raw);
        self
    }

    pub fn finish(mut self) -> String {
        self.buf.push('}');
        self.buf.push('\n');
        self.buf
    }
}

/// CSV with '.' decimals, ',' separators, a mandatory header row and a
/// leading provenance comment.
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(provenance: &str, header: &[&str]) -> Self {
        let mut buf = String::new();
        buf.push_str("# ");
        buf.push_str(SCHEMA);
        buf.push(' ');
        buf.push_str(provenance);
        buf.push('\n');
        buf.push_str(&header.join(","));
        buf.push('\n');
        Csv { buf }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.buf.push_str(&fields.join(","));
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}
