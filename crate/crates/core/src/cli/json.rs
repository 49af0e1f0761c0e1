use num_rational::Rational64;
use serde_json::{json, Map, Value};

use crate::diffop::Matrix;
use crate::error::{Error, Result};
use crate::orepoly::OrePoly;
use crate::scalars::{Backend, Scalar};
use crate::series::PuiseuxSeries;

use super::parse::{parse_fraction, parse_scalar};

pub const SCHEMA: &str = "hlt/1";

pub fn fraction(r: Rational64) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `{b, terms: {exponent: coefficient}, precision, expr}` with exponents in
/// `t` as fractions in lowest terms and `precision` null for exact series.
pub fn series(s: &PuiseuxSeries) -> Value {
    let b = s.ramification();
    let mut terms = Map::new();
    for (e, c) in s.terms() {
        terms.insert(fraction(Rational64::new(e, b as i64)), Value::String(c.to_string()));
    }
    json!({
        "b": b,
        "terms": terms,
        "precision": s.precision_t().map(fraction),
        "expr": s.to_expr_string(),
    })
}

fn bad(message: impl Into<String>) -> Error {
    Error::Parse {
        line: 1,
        column: 1,
        message: message.into(),
    }
}

pub fn series_from_json(v: &Value, backend: Backend) -> Result<PuiseuxSeries> {
    let b = v
        .get("b")
        .and_then(Value::as_u64)
        .filter(|&b| b >= 1)
        .ok_or_else(|| bad("series needs `b` >= 1"))? as u32;
    let terms = v
        .get("terms")
        .and_then(Value::as_object)
        .ok_or_else(|| bad("series needs a `terms` map"))?;
    let to_s = |r: Rational64| -> Result<i64> {
        let e = r * Rational64::from(b as i64);
        if !e.is_integer() {
            return Err(bad(format!("exponent {} is not a multiple of 1/{b}", fraction(r))));
        }
        Ok(e.to_integer())
    };
    let mut pairs = Vec::with_capacity(terms.len());
    for (k, c) in terms {
        let r = parse_fraction(k).ok_or_else(|| bad(format!("bad exponent `{k}`")))?;
        let c = c.as_str().ok_or_else(|| bad("coefficients are strings"))?;
        pairs.push((to_s(r)?, parse_scalar(c)?.to_backend(backend)));
    }
    let prec = match v.get("precision") {
        None | Some(Value::Null) => None,
        Some(Value::String(p)) => Some(to_s(
            parse_fraction(p).ok_or_else(|| bad(format!("bad precision `{p}`")))?,
        )?),
        Some(_) => return Err(bad("precision is a string or null")),
    };
    let start = pairs.iter().map(|p| p.0).min().unwrap_or(0);
    let end = pairs.iter().map(|p| p.0).max().map_or(0, |e| e + 1);
    let mut coeffs = vec![Scalar::zero().to_backend(backend); (end - start).max(0) as usize];
    for (e, c) in pairs {
        coeffs[(e - start) as usize] = c;
    }
    Ok(PuiseuxSeries::new(b, start, coeffs, prec))
}

pub fn poly(p: &OrePoly) -> Value {
    json!({
        "b": p.ramification(),
        "degree": p.degree(),
        "coefficients": p.coeffs().iter().map(series).collect::<Vec<_>>(),
        "precision": p.precision_t().map(fraction),
        "expr": p.to_expr_string(),
    })
}

pub fn matrix(m: &Matrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(series).collect()))
            .collect(),
    )
}

pub fn scalar_rows(rows: &[Vec<Scalar>]) -> Value {
    json!(rows
        .iter()
        .map(|r| r.iter().map(|c| c.to_string()).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

/// Every object in `v` that looks like a serialised series.
pub fn collect_series(v: &Value, out: &mut Vec<Value>) {
    match v {
        Value::Object(m) => {
            if m.contains_key("terms") && m.contains_key("b") {
                out.push(v.clone());
                return;
            }
            m.values().for_each(|x| collect_series(x, out));
        }
        Value::Array(a) => a.iter().for_each(|x| collect_series(x, out)),
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::{parse_series, Session};

    #[test]
    fn series_round_trip() {
        let s = Session::default();
        for text in ["0", "3/2*t^-2 + t^(1/2) - i*t", "(1/3-2*i)*t^(-5/6) + 7", "t^3"] {
            let a = parse_series(text, &s).unwrap();
            let v = series(&a);
            let back = series_from_json(&v, Backend::Exact).unwrap();
            assert_eq!(back, a, "{text}");
            assert_eq!(series(&back), v);
        }
    }

    #[test]
    fn precision_round_trip() {
        let a = PuiseuxSeries::new(
            2,
            -1,
            vec![Scalar::one(), Scalar::zero(), Scalar::from_ratio(-1, 4)],
            Some(5),
        );
        let v = series(&a);
        assert_eq!(v["precision"], "5/2");
        assert_eq!(v["terms"]["-1/2"], "1");
        let back = series_from_json(&v, Backend::Exact).unwrap();
        assert!(back.eq_to_precision(&a));
        assert_eq!(back.precision(), Some(5));
    }

    #[test]
    fn float_round_trip() {
        let a = PuiseuxSeries::new(1, 0, vec![Scalar::float(1.0 / 3.0, -0.1)], Some(4));
        let back = series_from_json(&series(&a), Backend::Float).unwrap();
        assert!(back.eq_to_precision(&a));
    }

    #[test]
    fn rejects_malformed() {
        assert!(series_from_json(&json!({"b": 2, "terms": {"1/3": "1"}}), Backend::Exact).is_err());
        assert!(series_from_json(&json!({"terms": {}}), Backend::Exact).is_err());
    }
}
