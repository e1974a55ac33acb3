//! Plain-text report documents: `key: value` lines with two-space
//! indented sections. Diffable, greppable, deterministic.

use crate::math::fmt_sig;
use std::fmt::Write as _;

/// Significant digits for numbers in reports and CSV trajectories.
pub const REPORT_DIGITS: usize = 9;

#[derive(Debug, Clone, Default)]
pub struct Doc {
    text: String,
    indent: usize,
}

impl Doc {
    pub fn new() -> Self {
        Doc::default()
    }

    pub fn kv(&mut self, key: &str, value: impl AsRef<str>) -> &mut Self {
        let pad = "  ".repeat(self.indent);
        writeln!(self.text, "{pad}{key}: {}", value.as_ref()).unwrap();
        self
    }

    pub fn num(&mut self, key: &str, value: f64) -> &mut Self {
        self.kv(key, fmt_sig(value, REPORT_DIGITS))
    }

    pub fn list(&mut self, key: &str, values: impl IntoIterator<Item = f64>) -> &mut Self {
        let rendered: Vec<String> = values
            .into_iter()
            .map(|v| fmt_sig(v, REPORT_DIGITS))
            .collect();
        self.kv(key, rendered.join(" "))
    }

    /// Open a named section; contents indent until the closure returns.
    pub fn section(&mut self, key: &str, fill: impl FnOnce(&mut Self)) -> &mut Self {
        let pad = "  ".repeat(self.indent);
        writeln!(self.text, "{pad}{key}:").unwrap();
        self.indent += 1;
        fill(self);
        self.indent -= 1;
        self
    }

    pub fn finish(&self) -> String {
        self.text.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_indent() {
        let mut doc = Doc::new();
        doc.kv("report", "demo").section("stats", |d| {
            d.num("mean", 12.0);
            d.num("sigma", 1.6329931618554518);
        });
        let text = doc.finish();
        assert_eq!(text, "report: demo\nstats:\n  mean: 12\n  sigma: 1.63299316\n");
    }
}
