//! Number formatting and CSV assembly.

use sha2::{Digest, Sha256};

/// Significant digits printed for every float.
pub const SIG_DIGITS: usize = 12;

/// `%.12g`-style formatting: shortest of fixed or scientific notation,
/// trailing zeros removed, negative zero printed as `0`.
pub fn fmt_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= SIG_DIGITS as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Hex SHA-256 of the canonical config text.
pub fn config_hash(canonical: &str) -> String {
    Sha256::digest(canonical.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Output buffer: metadata comment lines, a column header, then rows.
#[derive(Debug, Clone)]
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(mode: &str, canonical: &str, columns: &[&str]) -> Self {
        let mut text =
            format!("# nlberry {} mode={mode} config-sha256={}\n", env!("CARGO_PKG_VERSION"), config_hash(canonical));
        text.push_str(&columns.join(","));
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, cells: impl IntoIterator<Item = String>) {
        let cells: Vec<String> = cells.into_iter().collect();
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn comment(&mut self, line: &str) {
        self.text.push_str("# ");
        self.text.push_str(line);
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_format() {
        assert_eq!(fmt_g(0.0), "0");
        assert_eq!(fmt_g(-0.0), "0");
        assert_eq!(fmt_g(1.0), "1");
        assert_eq!(fmt_g(-0.5), "-0.5");
        assert_eq!(fmt_g(std::f64::consts::PI), "3.14159265359");
        assert_eq!(fmt_g(0.1 + 0.2), "0.3");
        assert_eq!(fmt_g(1e-7), "1e-07");
        assert_eq!(fmt_g(1.5e12), "1.5e+12");
        assert_eq!(fmt_g(123456789012.0), "123456789012");
        assert_eq!(fmt_g(0.000123), "0.000123");
        assert_eq!(fmt_g(1.0 - 3f64.sqrt() / 2.0), "0.133974596216");
        assert_eq!(fmt_g(f64::INFINITY), "inf");
    }

    #[test]
    fn header_and_rows() {
        let mut csv = Csv::new("spectrum", "c=1\n", &["R", "E1"]);
        csv.row(["0".to_string(), String::new()]);
        let text = csv.into_string();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# nlberry ") && lines[0].contains(&config_hash("c=1\n")));
        assert_eq!(&lines[1..], ["R,E1", "0,"]);
        assert!(!text.contains('\r'));
    }
}
