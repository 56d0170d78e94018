//! Tiny deterministic JSON emitter. Keys keep insertion order and floats are
//! written with 17 significant digits so outputs are byte-identical across
//! runs and round-trip exactly.

use std::fmt::Write;

/// 17-significant-digit scientific form; non-finite values become null.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".into()
    }
}

pub struct JsonObj {
    buf: String,
    any: bool,
}

impl JsonObj {
    pub fn new() -> Self {
        JsonObj { buf: String::from("{"), any: false }
    }

    fn key(&mut self, k: &str) {
        if self.any {
            self.buf.push(',');
        }
        self.any = true;
        write!(self.buf, "\"{k}\":").unwrap();
    }

    pub fn num(&mut self, k: &str, v: f64) -> &mut Self {
        self.key(k);
        self.buf.push_str(&fmt_f64(v));
        self
    }

    pub fn int(&mut self, k: &str, v: i64) -> &mut Self {
        self.key(k);
        write!(self.buf, "{v}").unwrap();
        self
    }

    pub fn bool(&mut self, k: &str, v: bool) -> &mut Self {
        self.key(k);
        write!(self.buf, "{v}").unwrap();
        self
    }

    pub fn str(&mut self, k: &str, v: &str) -> &mut Self {
        self.key(k);
        self.buf.push('"');
        for c in v.chars() {
            match c {
                '"' => self.buf.push_str("\\\""),
                '\\' => self.buf.push_str("\\\\"),
                '\n' => self.buf.push_str("\\n"),
                c if (c as u32) < 0x20 => write!(self.buf, "\\u{:04x}", c as u32).unwrap(),
                c => self.buf.push(c),
            }
        }
        self.buf.push('"');
        self
    }

    /// Insert a pre-serialized JSON fragment.
    pub fn raw(&mut self, k: &str, v: &str) -> &mut Self {
        self.key(k);
        self.buf.push_str(v);
        self
    }

    pub fn finish(mut self) -> String {
        self.buf.push('}');
        self.buf
    }
}
