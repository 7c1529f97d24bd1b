use std::path::Path;

use serde::Serialize;

use crate::commands::write_text;
use crate::error::CliError;

/// 17 significant digits, enough to round-trip any double.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_line(values: &[f64]) -> String {
    let mut s = values.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(",");
    s.push('\n');
    s
}

/// Pretty JSON with a trailing newline, to stdout or `path`.
pub fn emit_json<T: Serialize + ?Sized>(value: &T, path: Option<&Path>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Numeric(format!("cannot serialize output: {e}")))?;
    text.push('\n');
    write_text(path, &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubles_round_trip_through_csv() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 123456789.12345679, std::f64::consts::PI] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(csv_line(&[1.0, -0.5]), "1.0000000000000000e0,-5.0000000000000000e-1\n");
    }
}
