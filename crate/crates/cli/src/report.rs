//! JSON encodings of library values.

use serde::Serialize;
use serde_json::{json, Value};
use shintani::arith::CycloValue;
use shintani::lseries::TruncationReport;
use shintani::padic::Padic;

/// `(p, valuation, digits, precision)`; digits are the unit part, least significant first.
pub fn padic(x: &Padic) -> Value {
    json!({
        "p": x.prime(),
        "valuation": x.valuation(),
        "digits": if x.is_zero() { Vec::new() } else { x.unit_digits() },
        "precision": x.abs_precision(),
    })
}

/// `(m, coefficients)` in the power basis of `Q(ζ_m)`.
pub fn cyclo(x: &CycloValue) -> Value {
    json!({
        "m": x.order(),
        "coeffs": x.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
    })
}

#[derive(Serialize)]
pub struct Truncation {
    pub instance: String,
    pub level: u32,
    pub value: Option<Value>,
    pub exact: Option<Value>,
    pub distance_to_previous: Option<i64>,
    pub terms: u64,
    /// Omitted in verify reports, which keep wall-clock data under `timings`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u128>,
}

impl Truncation {
    pub fn new(instance: &str, r: &TruncationReport) -> Self {
        Truncation {
            instance: instance.to_string(),
            level: r.level,
            value: r.value.as_ref().map(padic),
            exact: r.exact.as_ref().map(cyclo),
            distance_to_previous: r.distance,
            terms: r.terms,
            runtime_ms: Some(r.elapsed.as_millis()),
        }
    }

    pub fn untimed(instance: &str, r: &TruncationReport) -> Self {
        Truncation { runtime_ms: None, ..Truncation::new(instance, r) }
    }
}
