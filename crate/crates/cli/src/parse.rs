//! Value parsers for the flag grammar.

use fractal_spectra::C64;

fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("not a number: {s:?}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("not finite: {s:?}"))
    }
}

fn numbers(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(number).collect()
}

/// `RE` or `RE,IM`.
pub fn complex(s: &str) -> Result<C64, String> {
    match numbers(s)?.as_slice() {
        [re] => Ok(C64::new(*re, 0.0)),
        [re, im] => Ok(C64::new(*re, *im)),
        _ => Err(format!("expected RE or RE,IM, got {s:?}")),
    }
}

pub fn triple(s: &str) -> Result<[f64; 3], String> {
    match numbers(s)?.as_slice() {
        &[a, b, c] => Ok([a, b, c]),
        _ => Err(format!("expected A,B,C, got {s:?}")),
    }
}

pub fn pair(s: &str) -> Result<(f64, f64), String> {
    match numbers(s)?.as_slice() {
        &[a, b] => Ok((a, b)),
        _ => Err(format!("expected two comma-separated numbers, got {s:?}")),
    }
}

/// `RE_MIN,RE_MAX,IM_MIN,IM_MAX`.
pub fn window(s: &str) -> Result<[f64; 4], String> {
    match numbers(s)?.as_slice() {
        &[a, b, c, d] => Ok([a, b, c, d]),
        _ => Err(format!("expected RE_MIN,RE_MAX,IM_MIN,IM_MAX, got {s:?}")),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaGrid(pub Vec<f64>);

/// Comma-separated values, or `default` for the standard 20-point grid.
pub fn lambda_grid(s: &str) -> Result<LambdaGrid, String> {
    if s == "default" {
        return Ok(LambdaGrid(fractal_spectra::sl::default_lambda_grid()));
    }
    let v = numbers(s)?;
    if v.iter().all(|&x| x > 0.0) {
        Ok(LambdaGrid(v))
    } else {
        Err("λ values must be positive".into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlowupArg {
    Finite(u32),
    Infinite,
}

pub fn blowup(s: &str) -> Result<BlowupArg, String> {
    if s == "inf" {
        Ok(BlowupArg::Infinite)
    } else {
        s.parse().map(BlowupArg::Finite).map_err(|_| format!("expected a level or \"inf\", got {s:?}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(complex("2").unwrap(), C64::new(2.0, 0.0));
        assert_eq!(complex("-1.5,3e-2").unwrap(), C64::new(-1.5, 0.03));
        assert!(complex("1,2,3").is_err());
        assert!(complex("nan").is_err());
    }

    #[test]
    fn other_forms() {
        assert_eq!(triple("0,1,0.5").unwrap(), [0.0, 1.0, 0.5]);
        assert_eq!(blowup("inf").unwrap(), BlowupArg::Infinite);
        assert_eq!(blowup("3").unwrap(), BlowupArg::Finite(3));
        assert!(blowup("-1").is_err());
        assert_eq!(lambda_grid("default").unwrap().0.len(), 20);
        assert!(lambda_grid("1,0").is_err());
        assert_eq!(window("-1,1,-2,2").unwrap(), [-1.0, 1.0, -2.0, 2.0]);
    }
}
