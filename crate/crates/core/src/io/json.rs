use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::scalar::Probability;
use crate::sysmodel::{Coalgebra, FValue, FunctorExpr};

use super::IoError;

#[derive(Serialize)]
struct Document<'a> {
    functor: String,
    states: usize,
    c: &'a [Value],
}

fn encode<P: Probability>(f: &FunctorExpr, v: &FValue<P>) -> Value {
    match (f, v) {
        (_, FValue::State(s)) => json!({ "x": s }),
        (_, FValue::Label(l)) => Value::String(l.clone()),
        (FunctorExpr::Product(fs), FValue::Tuple(vs)) => Value::Array(fs.iter().zip(vs).map(|(f, v)| encode(f, v)).collect()),
        (FunctorExpr::Coproduct(fs), FValue::Inj(k, v)) => json!({ "inj": k, "val": encode(&fs[*k], v) }),
        (FunctorExpr::Exponent { base, index }, FValue::Fun(vs)) => {
            let map: Map<String, Value> = index.labels().iter().cloned().zip(vs.iter().map(|v| encode(base, v))).collect();
            json!({ "fun": map })
        }
        (FunctorExpr::Powerset(inner), FValue::Set(vs)) => json!({ "set": vs.iter().map(|v| encode(inner, v)).collect::<Vec<_>>() }),
        (FunctorExpr::Distribution(inner), FValue::Dist(es)) => {
            let entries: Vec<Value> = es.iter().map(|(v, p)| json!([encode(inner, v), p.to_fraction_string()])).collect();
            json!({ "dist": entries })
        }
        _ => unreachable!("coalgebra values match their functor"),
    }
}

pub fn coalgebra_to_json<P: Probability>(coalg: &Coalgebra<P>) -> Value {
    let f = coalg.functor();
    let c: Vec<Value> = coalg.values().iter().map(|v| encode(f, v)).collect();
    serde_json::to_value(Document { functor: f.to_string(), states: coalg.n_states(), c: &c }).expect("documents serialize")
}

/// Compact JSON with keys `functor`, `states`, `c` in that order.
pub fn write_coalgebra_json<P: Probability>(coalg: &Coalgebra<P>) -> String {
    let f = coalg.functor();
    let c: Vec<Value> = coalg.values().iter().map(|v| encode(f, v)).collect();
    serde_json::to_string(&Document { functor: f.to_string(), states: coalg.n_states(), c: &c }).expect("documents serialize")
}

struct Decoder<'a> {
    state: usize,
    path: &'a mut Vec<String>,
}

impl Decoder<'_> {
    fn fail<T>(&self, message: impl Into<String>) -> Result<T, IoError> {
        Err(IoError::Json(format!("c[{}]{}: {}", self.state, self.path.concat(), message.into())))
    }

    fn nested<T>(&mut self, step: String, run: impl FnOnce(&mut Self) -> Result<T, IoError>) -> Result<T, IoError> {
        self.path.push(step);
        let out = run(self);
        self.path.pop();
        out
    }

    fn decode<P: Probability>(&mut self, f: &FunctorExpr, v: &Value) -> Result<FValue<P>, IoError> {
        match f {
            FunctorExpr::Identity => match v.get("x").and_then(Value::as_u64) {
                Some(s) if v.as_object().is_some_and(|o| o.len() == 1) => Ok(FValue::State(s as usize)),
                _ => self.fail("expected a state reference {\"x\": i}"),
            },
            FunctorExpr::Const(_) => match v.as_str() {
                Some(l) => Ok(FValue::label(l)),
                None => self.fail("expected a label string"),
            },
            FunctorExpr::Product(fs) => {
                let Some(items) = v.as_array().filter(|a| a.len() == fs.len()) else {
                    return self.fail(format!("expected an array of {} components", fs.len()));
                };
                let vs = fs
                    .iter()
                    .zip(items)
                    .enumerate()
                    .map(|(i, (f, v))| self.nested(format!("[{i}]"), |d| d.decode(f, v)))
                    .collect::<Result<_, _>>()?;
                Ok(FValue::Tuple(vs))
            }
            FunctorExpr::Coproduct(fs) => {
                let k = v.get("inj").and_then(Value::as_u64).map(|k| k as usize);
                match (k, v.get("val")) {
                    (Some(k), Some(inner)) if k < fs.len() => {
                        let val = self.nested(".val".into(), |d| d.decode(&fs[k], inner))?;
                        Ok(FValue::inj(k, val))
                    }
                    _ => self.fail(format!("expected {{\"inj\": k, \"val\": v}} with k < {}", fs.len())),
                }
            }
            FunctorExpr::Exponent { base, index } => {
                let Some(map) = v.get("fun").and_then(Value::as_object) else {
                    return self.fail("expected {\"fun\": {...}}");
                };
                if map.len() != index.len() {
                    return self.fail(format!("expected {} entries in fun", index.len()));
                }
                let vs = index
                    .labels()
                    .iter()
                    .map(|l| match map.get(l) {
                        Some(inner) => self.nested(format!(".fun.{l}"), |d| d.decode(base, inner)),
                        None => self.fail(format!("missing label {l:?} in fun")),
                    })
                    .collect::<Result<_, _>>()?;
                Ok(FValue::Fun(vs))
            }
            FunctorExpr::Powerset(inner) => {
                let Some(items) = v.get("set").and_then(Value::as_array) else {
                    return self.fail("expected {\"set\": [...]}");
                };
                let vs = items
                    .iter()
                    .enumerate()
                    .map(|(i, v)| self.nested(format!(".set[{i}]"), |d| d.decode(inner, v)))
                    .collect::<Result<_, _>>()?;
                Ok(FValue::set(vs))
            }
            FunctorExpr::Distribution(inner) => {
                let Some(items) = v.get("dist").and_then(Value::as_array) else {
                    return self.fail("expected {\"dist\": [[v, \"num/den\"], ...]}");
                };
                let mut entries = Vec::with_capacity(items.len());
                for (i, e) in items.iter().enumerate() {
                    let pair = e.as_array().filter(|a| a.len() == 2);
                    let Some(pair) = pair else { return self.fail(format!("dist entry {i} is not a pair")) };
                    let value = self.nested(format!(".dist[{i}]"), |d| d.decode(inner, &pair[0]))?;
                    let prob = match &pair[1] {
                        Value::String(s) => P::parse(s),
                        Value::Number(n) => n.as_u64().and_then(|n| P::from_parts(n, 1)),
                        _ => None,
                    };
                    match prob {
                        Some(p) => entries.push((value, p)),
                        None => return self.fail(format!("dist entry {i} has an invalid probability")),
                    }
                }
                FValue::dist(entries).or_else(|e| self.fail(e.to_string()))
            }
        }
    }
}

pub fn coalgebra_from_json<P: Probability>(doc: &Value) -> Result<Coalgebra<P>, IoError> {
    let functor = doc.get("functor").and_then(Value::as_str).ok_or_else(|| IoError::Json("missing string field `functor`".into()))?;
    let functor = FunctorExpr::parse(functor).map_err(|e| IoError::Json(format!("functor: {e}")))?;
    let states = doc.get("states").and_then(Value::as_u64).ok_or_else(|| IoError::Json("missing integer field `states`".into()))?;
    let c = doc.get("c").and_then(Value::as_array).ok_or_else(|| IoError::Json("missing array field `c`".into()))?;
    if c.len() as u64 != states {
        return Err(IoError::Json(format!("`states` is {states} but `c` has {} entries", c.len())));
    }
    let mut path = Vec::new();
    let values = c
        .iter()
        .enumerate()
        .map(|(state, v)| Decoder { state, path: &mut path }.decode(&functor, v))
        .collect::<Result<_, _>>()?;
    Coalgebra::new(functor, values).map_err(|e| IoError::Invalid(e.to_string()))
}

pub fn parse_coalgebra_json<P: Probability>(text: &str) -> Result<Coalgebra<P>, IoError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| IoError::Json(e.to_string()))?;
    coalgebra_from_json(&doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{generate, Family, GenSpec};
    use crate::Prob;

    #[test]
    fn round_trip_generated() {
        for family in [Family::Dfa, Family::Nfa, Family::Lts, Family::Mc, Family::Mdp, Family::Chain] {
            let c: Coalgebra<Prob> = generate(&GenSpec::new(family, 12, 3)).unwrap();
            let text = write_coalgebra_json(&c);
            let back: Coalgebra<Prob> = parse_coalgebra_json(&text).unwrap();
            assert_eq!(back, c);
            assert_eq!(write_coalgebra_json(&back), text);
        }
    }

    #[test]
    fn coproduct_and_key_order() {
        let text = r#"{"functor":"{stop} + X","states":2,"c":[{"inj":1,"val":{"x":1}},{"inj":0,"val":"stop"}]}"#;
        let c: Coalgebra<Prob> = parse_coalgebra_json(text).unwrap();
        assert_eq!(c.value(0), &FValue::inj(1, FValue::State(1)));
        assert_eq!(write_coalgebra_json(&c), text);
    }

    #[test]
    fn errors_name_the_location() {
        let text = r#"{"functor":"{0,1} * X ^ {a,b}","states":1,"c":[["0",{"fun":{"a":{"x":0},"b":{"y":0}}}]]}"#;
        let err = parse_coalgebra_json::<Prob>(text).unwrap_err().to_string();
        assert!(err.contains("c[0][1].fun.b"), "{err}");

        let bad_sum = r#"{"functor":"D X","states":1,"c":[{"dist":[[{"x":0},"1/2"]]}]}"#;
        assert!(matches!(parse_coalgebra_json::<Prob>(bad_sum), Err(IoError::Invalid(_))));

        let count = r#"{"functor":"P X","states":2,"c":[{"set":[]}]}"#;
        assert!(parse_coalgebra_json::<Prob>(count).is_err());
    }
}
