//! JSON output helpers shared by the reports.
//!
//! Numbers are written in the shortest form that parses back to the same
//! double, and integral values below 2^53 drop the trailing `.0`, so `3.0`
//! prints as `3`. Output is therefore both diff-stable and round-trip exact.

use std::io;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use serde_json::ser::{CompactFormatter, Formatter, PrettyFormatter};

use crate::numerics::C64;

/// Writes `[re, im]` pairs.
pub fn serialize_complex3<S: Serializer>(v: &[C64; 3], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(3))?;
    for z in v {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

const EXACT_INT_LIMIT: f64 = 9_007_199_254_740_992.0;

fn write_number<W: ?Sized + io::Write>(w: &mut W, x: f64) -> io::Result<()> {
    if !x.is_finite() {
        return w.write_all(b"null");
    }
    if x.fract() == 0.0 && x.abs() < EXACT_INT_LIMIT {
        if x == 0.0 && x.is_sign_negative() {
            return w.write_all(b"-0");
        }
        return write!(w, "{}", x as i64);
    }
    let mut buf = ryu_like(x);
    if buf.ends_with(".0") {
        buf.truncate(buf.len() - 2);
    }
    w.write_all(buf.as_bytes())
}

/// Shortest round-trip representation (Rust's `Display` for `f64` has the
/// round-trip guarantee but never uses exponents, so use `{:e}` for extremes).
fn ryu_like(x: f64) -> String {
    let a = x.abs();
    if (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

macro_rules! number_formatter {
    ($name:ident $(<$lt:lifetime>)?, $inner:ty) => {
        pub struct $name$(<$lt>)?(pub $inner);

        impl$(<$lt>)? Formatter for $name$(<$lt>)? {
            fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, x: f64) -> io::Result<()> {
                write_number(w, x)
            }
            fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, x: f32) -> io::Result<()> {
                write_number(w, x as f64)
            }
            fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
                self.0.begin_array(w)
            }
            fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
                self.0.end_array(w)
            }
            fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
                self.0.begin_array_value(w, first)
            }
            fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
                self.0.end_array_value(w)
            }
            fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
                self.0.begin_object(w)
            }
            fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
                self.0.end_object(w)
            }
            fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
                self.0.begin_object_key(w, first)
            }
            fn end_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
                self.0.end_object_key(w)
            }
            fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
                self.0.begin_object_value(w)
            }
            fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
                self.0.end_object_value(w)
            }
        }
    };
}

number_formatter!(CompactNumbers, CompactFormatter);
number_formatter!(PrettyNumbers<'a>, PrettyFormatter<'a>);

/// Single-line JSON.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, CompactNumbers(CompactFormatter));
    value
        .serialize(&mut ser)
        .expect("serializing plain data to memory cannot fail");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

/// Indented JSON.
pub fn to_json_pretty<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, PrettyNumbers(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .expect("serializing plain data to memory cannot fail");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}
