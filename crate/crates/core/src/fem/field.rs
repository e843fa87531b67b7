use std::fmt;
use std::sync::Arc;

use crate::mesh::Point;

type ScalarFn = Arc<dyn Fn(Point, u8) -> f64 + Send + Sync>;
type VectorFn = Arc<dyn Fn(Point, u8) -> [f64; 2] + Send + Sync>;

/// Real-valued coefficient evaluated at a point of an element with a given
/// subdomain tag.
#[derive(Clone)]
pub enum ScalarField {
    Constant(f64),
    /// Piecewise constant: value `[tag 0, tag 1]`.
    Subdomain([f64; 2]),
    /// General smooth evaluator.
    Function(ScalarFn),
}

impl ScalarField {
    pub fn constant(c: f64) -> Self {
        ScalarField::Constant(c)
    }

    pub fn from_fn(f: impl Fn(Point) -> f64 + Send + Sync + 'static) -> Self {
        ScalarField::Function(Arc::new(move |p, _| f(p)))
    }

    /// Evaluator of the first coordinate only.
    pub fn from_fn_1d(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ScalarField::Function(Arc::new(move |p, _| f(p[0])))
    }

    pub fn from_tagged_fn(f: impl Fn(Point, u8) -> f64 + Send + Sync + 'static) -> Self {
        ScalarField::Function(Arc::new(f))
    }

    #[inline]
    pub fn eval(&self, p: Point, tag: u8) -> f64 {
        match self {
            ScalarField::Constant(c) => *c,
            ScalarField::Subdomain(v) => v[usize::from(tag.min(1))],
            ScalarField::Function(f) => f(p, tag),
        }
    }

    /// `true` when the value is constant per subdomain.
    pub fn is_piecewise_constant(&self) -> bool {
        !matches!(self, ScalarField::Function(_))
    }

    /// Pointwise `self - other`, kept in closed form where possible.
    pub fn minus(&self, other: &ScalarField) -> ScalarField {
        use ScalarField::*;
        match (self, other) {
            (Constant(a), Constant(b)) => Constant(a - b),
            (Subdomain(a), Subdomain(b)) => Subdomain([a[0] - b[0], a[1] - b[1]]),
            (Subdomain(a), Constant(b)) => Subdomain([a[0] - b, a[1] - b]),
            (Constant(a), Subdomain(b)) => Subdomain([a - b[0], a - b[1]]),
            _ => {
                let (a, b) = (self.clone(), other.clone());
                ScalarField::from_tagged_fn(move |p, t| a.eval(p, t) - b.eval(p, t))
            }
        }
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarField::Constant(c) => write!(f, "Constant({c})"),
            ScalarField::Subdomain(v) => write!(f, "Subdomain({v:?})"),
            ScalarField::Function(_) => f.write_str("Function(..)"),
        }
    }
}

/// Vector-valued coefficient; 1-D code reads the first component only.
#[derive(Clone)]
pub enum VectorField {
    Constant([f64; 2]),
    Function(VectorFn),
}

impl VectorField {
    pub fn from_fn(f: impl Fn(Point) -> [f64; 2] + Send + Sync + 'static) -> Self {
        VectorField::Function(Arc::new(move |p, _| f(p)))
    }

    /// 1-D velocity or gradient given by a scalar field.
    pub fn along_x(s: ScalarField) -> Self {
        match s {
            ScalarField::Constant(c) => VectorField::Constant([c, 0.0]),
            other => VectorField::Function(Arc::new(move |p, t| [other.eval(p, t), 0.0])),
        }
    }

    #[inline]
    pub fn eval(&self, p: Point, tag: u8) -> [f64; 2] {
        match self {
            VectorField::Constant(c) => *c,
            VectorField::Function(f) => f(p, tag),
        }
    }

    /// Pointwise `self - other`.
    pub fn minus(&self, other: &VectorField) -> VectorField {
        match (self, other) {
            (VectorField::Constant(a), VectorField::Constant(b)) => VectorField::Constant([a[0] - b[0], a[1] - b[1]]),
            _ => {
                let (a, b) = (self.clone(), other.clone());
                VectorField::Function(Arc::new(move |p, t| {
                    let (u, v) = (a.eval(p, t), b.eval(p, t));
                    [u[0] - v[0], u[1] - v[1]]
                }))
            }
        }
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VectorField::Constant(c) => write!(f, "Constant({c:?})"),
            VectorField::Function(_) => f.write_str("Function(..)"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_and_difference() {
        let a = ScalarField::from_fn_1d(|x| 1.0 + x);
        let b = ScalarField::constant(0.5);
        assert_eq!(a.minus(&b).eval([2.0, 0.0], 0), 2.5);
        let s = ScalarField::Subdomain([1.0, 4.0]);
        assert_eq!(s.eval([0.0, 0.0], 1), 4.0);
        assert_eq!(s.minus(&b).eval([0.0, 0.0], 0), 0.5);
        assert!(s.is_piecewise_constant() && !a.is_piecewise_constant());
        let v = VectorField::along_x(ScalarField::constant(3.0));
        assert_eq!(v.eval([0.2, 0.3], 0), [3.0, 0.0]);
        let w = VectorField::from_fn(|p| [p[1], -p[0]]);
        assert_eq!(w.minus(&v).eval([1.0, 2.0], 0), [-1.0, -1.0]);
    }
}
