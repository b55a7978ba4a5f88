//! Serialization helpers shared by the MDP format and the experiment runner.
//!
//! Floats are rendered with 17 significant digits (`{:.16e}`) in both JSON
//! and CSV output so that parsing the text back yields the identical f64.

use serde::Serialize;
use std::io::Write;

/// `serde_json` formatter that renders every f64 with 17 significant digits.
pub struct SigFig17 {
    pretty_depth: usize,
    pretty: bool,
}

impl SigFig17 {
    pub fn new(pretty: bool) -> Self {
        SigFig17 {
            pretty_depth: 0,
            pretty,
        }
    }

    fn newline<W: ?Sized + Write>(&self, w: &mut W) -> std::io::Result<()> {
        if self.pretty {
            w.write_all(b"\n")?;
            for _ in 0..self.pretty_depth {
                w.write_all(b"  ")?;
            }
        }
        Ok(())
    }
}

impl serde_json::ser::Formatter for SigFig17 {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{}", format_f64(value))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> std::io::Result<()> {
        self.pretty_depth += 1;
        writer.write_all(b"[")
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> std::io::Result<()> {
        self.pretty_depth -= 1;
        writer.write_all(b"]")
    }

    fn begin_array_value<W: ?Sized + Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> std::io::Result<()> {
        if !first {
            writer.write_all(b",")?;
            if self.pretty {
                writer.write_all(b" ")?;
            }
        }
        Ok(())
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> std::io::Result<()> {
        self.pretty_depth += 1;
        writer.write_all(b"{")
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> std::io::Result<()> {
        self.pretty_depth -= 1;
        self.newline(writer)?;
        writer.write_all(b"}")
    }

    fn begin_object_key<W: ?Sized + Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> std::io::Result<()> {
        if !first {
            writer.write_all(b",")?;
        }
        self.newline(writer)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> std::io::Result<()> {
        writer.write_all(b": ")
    }
}

/// Render one f64 with 17 significant digits.
pub fn format_f64(value: f64) -> String {
    format!("{value:.16e}")
}

/// Serialize to a JSON string with 17-significant-digit floats.
pub fn to_json_string<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigFig17::new(false));
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json emits utf8"))
}

/// Serialize to a human-readable JSON string with 17-significant-digit floats.
pub fn to_json_string_pretty<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigFig17::new(true));
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json emits utf8"))
}

/// Write one CSV row of f64 cells after any leading integer cells.
pub fn csv_row(ints: &[usize], floats: &[f64]) -> String {
    let mut cells: Vec<String> = ints.iter().map(|i| i.to_string()).collect();
    cells.extend(floats.iter().map(|x| format_f64(*x)));
    cells.join(",")
}
