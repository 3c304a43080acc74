//! JSON encodings: an element is its coordinate array (constant coordinate
//! first); a polynomial is an array of element encodings, constant term first.
//! Bare integers are accepted on input as prime-subfield elements.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::gf::{Elem, Field, Poly};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElemRepr {
    Int(i64),
    Coords(Vec<u64>),
}

pub fn elem_to_json(field: &Field, a: Elem) -> Value {
    Value::from(field.coeffs(a))
}

pub fn elem_from_repr(field: &Field, repr: &ElemRepr) -> Result<Elem> {
    match repr {
        ElemRepr::Int(n) => Ok(field.from_int(*n)),
        ElemRepr::Coords(c) => field.from_coeffs(c),
    }
}

pub fn elem_from_json(field: &Field, value: &Value) -> Result<Elem> {
    let repr: ElemRepr = serde_json::from_value(value.clone())
        .map_err(|e| Error::Parse(format!("field element: {e}")))?;
    elem_from_repr(field, &repr)
}

pub fn poly_to_json(poly: &Poly) -> Value {
    Value::from(
        poly.coeffs()
            .iter()
            .map(|&c| elem_to_json(poly.field(), c))
            .collect::<Vec<_>>(),
    )
}

pub fn poly_from_json(field: &Field, value: &Value) -> Result<Poly> {
    let items = value
        .as_array()
        .ok_or_else(|| Error::Parse("polynomial must be an array".into()))?;
    let coeffs = items
        .iter()
        .map(|v| elem_from_json(field, v))
        .collect::<Result<Vec<_>>>()?;
    Ok(Poly::new(field, coeffs))
}
