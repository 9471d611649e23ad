//! Pairwise belonging functions: how two nodes' membership coefficients in a
//! community combine into a weight for the (potential) edge between them.

/// Default steepness of the logistic belonging function.
pub const DEFAULT_LOGISTIC_P: f64 = 30.0;

/// Combines two membership coefficients from `[0, 1]` into one weight in
/// `[0, 1]`.
///
/// `Average` and `Product` are the node-pair functions used by the
/// coefficient-based quality metrics; `Logistic { p }` is the steep
/// two-dimensional sigmoid used by the edge-based metric, which saturates
/// towards 1 when both coefficients are 1 and towards 0 when either is 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BelongingFunction {
    Average,
    Product,
    Logistic { p: f64 },
}

impl BelongingFunction {
    pub fn combine(self, a: f64, b: f64) -> f64 {
        match self {
            BelongingFunction::Average => 0.5 * (a + b),
            BelongingFunction::Product => a * b,
            BelongingFunction::Logistic { p } => logistic_node(a, p) * logistic_node(b, p),
        }
    }

    /// Short lowercase name, matching what the CLI and config files accept.
    pub fn name(self) -> &'static str {
        match self {
            BelongingFunction::Average => "average",
            BelongingFunction::Product => "product",
            BelongingFunction::Logistic { .. } => "logistic",
        }
    }

    /// Parses a function name; `logistic` gets steepness `p`, the others
    /// ignore it.
    pub fn parse(name: &str, p: f64) -> Result<Self, UnknownFunction> {
        match name {
            "average" => Ok(BelongingFunction::Average),
            "product" => Ok(BelongingFunction::Product),
            "logistic" => Ok(BelongingFunction::Logistic { p }),
            other => Err(UnknownFunction(other.to_string())),
        }
    }
}

/// Error for belonging function names that do not parse.
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("unknown belonging function {0:?} (expected average, product, or logistic)")]
pub struct UnknownFunction(pub String);

/// One-dimensional factor of the logistic belonging function:
/// `1 / (1 + exp(-(2p*x - p)))`. The two-dimensional form is the product of
/// the factors for the two coefficients.
pub(crate) fn logistic_node(x: f64, p: f64) -> f64 {
    1.0 / (1.0 + (-(2.0 * p * x - p)).exp())
}
