pub mod estimate;
pub mod report;
pub mod riskcurves;
pub mod select;
pub mod simulate;

use serde::Serialize;
use serde_json::Value;

pub(crate) fn echo<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).unwrap_or(Value::Null)
}
