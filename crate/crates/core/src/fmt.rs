//! Number formatting shared by the CSV and JSON writers.

use serde_json::value::RawValue;

pub use diqkd_sdp::numfmt::format_g17;

/// JSON number with 17 significant digits; non-finite values become `null`.
pub fn json_number(v: f64) -> Box<RawValue> {
    let text = if v.is_finite() { format_g17(v) } else { "null".to_string() };
    RawValue::from_string(text).expect("formatted number is valid JSON")
}

/// Compact JSON formatter that writes every float with 17 significant digits.
struct G17;

impl serde_json::ser::Formatter for G17 {
    fn write_f64<W: ?Sized + std::io::Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        writer.write_all(format_g17(value).as_bytes())
    }
}

/// Serializes `value` as compact JSON with 17-significant-digit floats.
/// Non-finite floats become `null`.
pub fn to_json<T: serde::Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, G17);
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    String::from_utf8(out).expect("JSON is UTF-8")
}
