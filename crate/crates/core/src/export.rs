//! Plain-text output: CSV tables with a header row and deterministic float
//! formatting, plus JSON helpers.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sg::SpectrumMultiset;
use crate::sl::SpectrumLadder;
use crate::zeta::ZetaValue;

/// Shortest round-trip decimal form; scientific notation outside `[1e-5, 1e16)`.
pub fn fmt_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Row-oriented CSV builder. Cells are numbers or bare identifiers, so no quoting.
#[derive(Debug, Clone)]
pub struct Csv {
    columns: usize,
    out: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut out = header.join(",");
        out.push('\n');
        Csv { columns: header.len(), out }
    }

    pub fn row(&mut self, cells: &[String]) {
        debug_assert_eq!(cells.len(), self.columns);
        self.out.push_str(&cells.join(","));
        self.out.push('\n');
    }

    pub fn finish(self) -> String {
        self.out
    }
}

pub fn spectrum_csv(s: &SpectrumMultiset) -> String {
    let mut csv = Csv::new(&["eigenvalue", "multiplicity"]);
    for &(v, m) in &s.entries {
        csv.row(&[fmt_float(v), m.to_string()]);
    }
    csv.finish()
}

pub fn ladder_csv(l: &SpectrumLadder) -> String {
    let mut csv = Csv::new(&["value", "k", "p"]);
    for e in &l.entries {
        csv.row(&[fmt_float(e.value), e.k.to_string(), e.p.to_string()]);
    }
    csv.finish()
}

pub fn zeta_csv(values: &[ZetaValue]) -> String {
    let mut csv = Csv::new(&["s_re", "s_im", "value_re", "value_im", "error_estimate"]);
    for z in values {
        csv.row(&[fmt_float(z.s.re), fmt_float(z.s.im), fmt_float(z.value.re), fmt_float(z.value.im), fmt_float(z.error)]);
    }
    csv.finish()
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Two-column listing used by the text dumps of vertex functions.
pub fn indexed_values_csv(name: &str, values: &[f64]) -> String {
    let mut out = format!("index,{name}\n");
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(out, "{i},{}", fmt_float(*v));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::C64;
    use proptest::prelude::*;

    #[test]
    fn float_forms() {
        assert_eq!(fmt_float(0.75), "0.75");
        assert_eq!(fmt_float(3.0), "3");
        assert_eq!(fmt_float(1.5e-7), "1.5e-7");
        assert_eq!(fmt_float(2e20), "2e20");
        assert_eq!(fmt_float(0.1 + 0.2), "0.30000000000000004");
    }

    #[test]
    fn tables() {
        let s = SpectrumMultiset { entries: vec![(0.0, 1), (0.75, 2)] };
        assert_eq!(spectrum_csv(&s), "eigenvalue,multiplicity\n0,1\n0.75,2\n");
        let z = ZetaValue { s: C64::new(4.0, 0.0), value: C64::new(0.5, -1.0), error: 1e-9, count: 3 };
        assert_eq!(zeta_csv(&[z]), "s_re,s_im,value_re,value_im,error_estimate\n4,0,0.5,-1,1e-9\n");
    }

    proptest! {
        #[test]
        fn round_trip(x in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO) {
            let s = fmt_float(x);
            prop_assert_eq!(s.parse::<f64>().unwrap(), x);
            let digits = s.trim_start_matches('-').split('e').next().unwrap().chars().filter(|c| c.is_ascii_digit()).collect::<String>();
            prop_assert!(digits.trim_start_matches('0').trim_end_matches('0').len() <= 17);
        }
    }
}
