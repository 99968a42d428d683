use std::fmt;
use std::sync::Arc;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::pipeline::encoding::Share;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A scalar function applied entrywise by the workers, optionally with its
/// analytic fourth derivative.
#[derive(Clone)]
pub struct TargetFunction {
    name: String,
    map: ScalarFn,
    fourth: Option<ScalarFn>,
}

impl fmt::Debug for TargetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TargetFunction")
            .field("name", &self.name)
            .field("fourth_derivative", &self.fourth.is_some())
            .finish()
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl TargetFunction {
    pub fn new(name: impl Into<String>, map: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            map: Arc::new(map),
            fourth: None,
        }
    }

    pub fn with_fourth_derivative(
        mut self,
        d4: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.fourth = Some(Arc::new(d4));
        self
    }

    pub fn identity() -> Self {
        Self::new("identity", |x| x).with_fourth_derivative(|_| 0.0)
    }

    /// `x sin x`
    pub fn xsinx() -> Self {
        Self::new("xsinx", |x| x * x.sin()).with_fourth_derivative(|x| x * x.sin() - 4.0 * x.cos())
    }

    pub fn sigmoid() -> Self {
        Self::new("sigmoid", sigmoid).with_fourth_derivative(|x| {
            let s = sigmoid(x);
            s * (1.0 - s) * (1.0 - 14.0 * s + 36.0 * s * s - 24.0 * s * s * s)
        })
    }

    pub fn sin() -> Self {
        Self::new("sin", f64::sin).with_fourth_derivative(f64::sin)
    }

    pub fn exp() -> Self {
        Self::new("exp", f64::exp).with_fourth_derivative(f64::exp)
    }

    pub fn constant(c: f64) -> Self {
        Self::new("constant", move |_| c).with_fourth_derivative(|_| 0.0)
    }

    /// Built-in functions by name: `identity`, `xsinx`, `sigmoid`, `sin`, `exp`.
    pub fn from_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "identity" => Ok(Self::identity()),
            "xsinx" => Ok(Self::xsinx()),
            "sigmoid" => Ok(Self::sigmoid()),
            "sin" => Ok(Self::sin()),
            "exp" => Ok(Self::exp()),
            other => Err(Error::InvalidInput(format!("unknown function '{other}'"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.map)(x)
    }

    pub fn fourth_derivative(&self, x: f64) -> Option<f64> {
        self.fourth.as_ref().map(|d| d(x))
    }

    pub fn has_fourth_derivative(&self) -> bool {
        self.fourth.is_some()
    }

    pub fn apply(&self, x: &Array2<f64>) -> Array2<f64> {
        x.mapv(|v| self.eval(v))
    }
}

/// `f(Y_i)` returned by worker `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkerResult {
    pub worker_index: usize,
    pub value: Array2<f64>,
}

pub fn worker_eval(share: &Share, f: &TargetFunction) -> Result<WorkerResult> {
    let value = f.apply(&share.value);
    if value.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalOverflow(format!(
            "{} on worker {}",
            f.name(),
            share.worker_index
        )));
    }
    Ok(WorkerResult {
        worker_index: share.worker_index,
        value,
    })
}
