//! JSON forms of [`PearsonParams`]: the coefficient form
//! `{theta, m, b0, b1, b2, support_l, support_u}` and the class form tagged by
//! `"class"`.

use num_traits::One;
use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Classification, PearsonParams, Support};
use crate::error::{Error, Result};
use crate::rational::{fmt_rational, serde_rational::from_value, Rational};

fn bound_to_value(x: f64) -> Value {
    if x == f64::INFINITY {
        Value::from("inf")
    } else if x == f64::NEG_INFINITY {
        Value::from("-inf")
    } else {
        Value::from(x)
    }
}

fn bound_from_value(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| Error::Parse(format!("bad bound {n}"))),
        Value::String(s) => match s.trim() {
            "inf" | "+inf" | "Infinity" => Ok(f64::INFINITY),
            "-inf" | "-Infinity" => Ok(f64::NEG_INFINITY),
            other => other.parse().map_err(|_| Error::Parse(format!("bad bound {other:?}"))),
        },
        other => Err(Error::Parse(format!("expected a support bound, got {other}"))),
    }
}

impl Serialize for PearsonParams {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("PearsonParams", 7)?;
        st.serialize_field("theta", &fmt_rational(&self.theta))?;
        st.serialize_field("m", &fmt_rational(&self.m))?;
        st.serialize_field("b0", &fmt_rational(&self.b0))?;
        st.serialize_field("b1", &fmt_rational(&self.b1))?;
        st.serialize_field("b2", &fmt_rational(&self.b2))?;
        st.serialize_field("support_l", &bound_to_value(self.support.lower))?;
        st.serialize_field("support_u", &bound_to_value(self.support.upper))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for PearsonParams {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        PearsonParams::from_json_value(&v).map_err(de::Error::custom)
    }
}

/// Either accepted input form, before validation.
#[derive(Clone, Debug)]
pub enum ParamsSpec {
    Coefficients(Value),
    Class { classification: Classification, theta: Rational },
}

impl ParamsSpec {
    pub fn from_value(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Parse("parameters must be a JSON object".into()))?;
        if obj.contains_key("class") {
            let theta = match obj.get("theta") {
                Some(t) => from_value(t)?,
                None => Rational::one(),
            };
            let mut rest = obj.clone();
            rest.remove("theta");
            let classification: Classification = serde_json::from_value(Value::Object(rest))?;
            Ok(ParamsSpec::Class { classification, theta })
        } else {
            Ok(ParamsSpec::Coefficients(v.clone()))
        }
    }

    pub fn resolve(&self) -> Result<PearsonParams> {
        match self {
            ParamsSpec::Class { classification, theta } => classification.to_params(theta.clone()),
            ParamsSpec::Coefficients(v) => {
                let field = |name: &str| -> Result<Rational> {
                    let x = v.get(name).ok_or_else(|| Error::Parse(format!("missing field {name:?}")))?;
                    from_value(x)
                };
                let theta = match v.get("theta") {
                    Some(t) => from_value(t)?,
                    None => Rational::one(),
                };
                let (m, b0, b1, b2) = (field("m")?, field("b0")?, field("b1")?, field("b2")?);
                match (v.get("support_l"), v.get("support_u")) {
                    (None, None) => PearsonParams::new(theta, m, b0, b1, b2),
                    (l, u) => {
                        let lower = l.map(bound_from_value).transpose()?.unwrap_or(f64::NEG_INFINITY);
                        let upper = u.map(bound_from_value).transpose()?.unwrap_or(f64::INFINITY);
                        PearsonParams::with_support(theta, m, b0, b1, b2, Support::new(lower, upper)?)
                    }
                }
            }
        }
    }
}

impl PearsonParams {
    pub fn from_json_value(v: &Value) -> Result<Self> {
        ParamsSpec::from_value(v)?.resolve()
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("params serialize")
    }
}

/// Parses parameters from a JSON string in either form.
pub fn read_params(json: &str) -> Result<PearsonParams> {
    let v: Value = serde_json::from_str(json)?;
    PearsonParams::from_json_value(&v)
}
