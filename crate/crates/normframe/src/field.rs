//! Chart-level data model: points, domain boxes, scalar/vector/matrix
//! fields, connection coefficient tables, frame specifications and
//! derivations along a vector field.
//!
//! Everything lives in one fixed chart of dimension `n`. Matrix-valued
//! component objects follow one index convention throughout the crate:
//! the row is the upper index, the column the first lower index, and for
//! connection coefficients the matrix label is the differentiation
//! direction, `(Γ_k)^i_j = Γ^i_{jk}`.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::tolerances::SINGULAR_DET;

/// Square real matrix of chart dimension.
pub type Matrix = DMatrix<f64>;

/// A point of the chart, held as its coordinate vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Point {
        Point { coords }
    }

    pub fn from_slice(coords: &[f64]) -> Point {
        Point {
            coords: coords.to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Copy of the point shifted by `delta` along coordinate axis `axis`.
    pub fn offset(&self, axis: usize, delta: f64) -> Point {
        let mut coords = self.coords.clone();
        coords[axis] += delta;
        Point { coords }
    }
}

/// Axis-aligned coordinate box on which a scenario's fields are declared.
#[derive(Clone, Debug)]
pub struct DomainBox {
    min: Vec<f64>,
    max: Vec<f64>,
}

impl DomainBox {
    pub fn new(min: Vec<f64>, max: Vec<f64>) -> Result<DomainBox> {
        if min.len() != max.len() {
            return Err(Error::Dimension {
                context: "domain box".into(),
                expected: min.len(),
                got: max.len(),
            });
        }
        for (axis, (a, b)) in min.iter().zip(&max).enumerate() {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::Config(format!(
                    "domain box axis {}: need finite min < max, got [{a}, {b}]",
                    axis + 1
                )));
            }
        }
        Ok(DomainBox { min, max })
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn min(&self) -> &[f64] {
        &self.min
    }

    pub fn max(&self) -> &[f64] {
        &self.max
    }

    pub fn contains(&self, coords: &[f64]) -> bool {
        coords.len() == self.min.len()
            && coords
                .iter()
                .zip(self.min.iter().zip(&self.max))
                .all(|(v, (a, b))| *v >= *a && *v <= *b)
    }

    /// Errors with the first offending axis when `coords` is outside.
    pub fn check(&self, coords: &[f64]) -> Result<()> {
        if coords.len() != self.min.len() {
            return Err(Error::Dimension {
                context: "domain check".into(),
                expected: self.min.len(),
                got: coords.len(),
            });
        }
        for (axis, v) in coords.iter().enumerate() {
            if *v < self.min[axis] || *v > self.max[axis] {
                return Err(Error::DomainBoundary {
                    axis: axis + 1,
                    value: *v,
                    min: self.min[axis],
                    max: self.max[axis],
                });
            }
        }
        Ok(())
    }

    /// Both points of a central-difference stencil must stay inside.
    pub fn check_stencil(&self, x: &Point, axis: usize, h: f64) -> Result<()> {
        self.check(&x.offset(axis, h).coords)?;
        self.check(&x.offset(axis, -h).coords)
    }

    /// Euclidean diagonal of the box.
    pub fn diameter(&self) -> f64 {
        self.min
            .iter()
            .zip(&self.max)
            .map(|(a, b)| (b - a) * (b - a))
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Clone)]
enum ScalarRepr {
    Const(f64),
    Expr(Expr),
    Builtin {
        tag: String,
        f: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    },
}

/// An evaluable real-valued function of `arity` coordinates, either a
/// parsed expression or a tagged built-in closure. Evaluation is pure.
#[derive(Clone)]
pub struct ScalarField {
    arity: usize,
    repr: ScalarRepr,
}

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ScalarField({})", self.descriptor())
    }
}

impl ScalarField {
    pub fn constant(arity: usize, value: f64) -> ScalarField {
        ScalarField {
            arity,
            repr: ScalarRepr::Const(value),
        }
    }

    pub fn from_expr_text(text: &str, variables: &[String]) -> Result<ScalarField> {
        let expr = Expr::parse(text, variables)?;
        Ok(ScalarField {
            arity: variables.len(),
            repr: ScalarRepr::Expr(expr),
        })
    }

    pub fn builtin<F>(arity: usize, tag: &str, f: F) -> ScalarField
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        ScalarField {
            arity,
            repr: ScalarRepr::Builtin {
                tag: tag.to_string(),
                f: Arc::new(f),
            },
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Built-in tag or the original expression text.
    pub fn descriptor(&self) -> String {
        match &self.repr {
            ScalarRepr::Const(v) => format!("{v}"),
            ScalarRepr::Expr(e) => e.text.clone(),
            ScalarRepr::Builtin { tag, .. } => tag.clone(),
        }
    }

    pub fn eval(&self, coords: &[f64]) -> Result<f64> {
        if coords.len() != self.arity {
            return Err(Error::Dimension {
                context: format!("scalar field '{}'", self.descriptor()),
                expected: self.arity,
                got: coords.len(),
            });
        }
        let value = match &self.repr {
            ScalarRepr::Const(v) => *v,
            ScalarRepr::Expr(e) => e.eval(coords)?,
            ScalarRepr::Builtin { f, .. } => f(coords),
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::NonFinite {
                context: format!("scalar field '{}' at {:?}", self.descriptor(), coords),
            })
        }
    }
}

/// A vector field given by its `n` component scalar fields `X^i`.
#[derive(Clone, Debug)]
pub struct VectorField {
    components: Vec<ScalarField>,
}

impl VectorField {
    pub fn new(components: Vec<ScalarField>) -> Result<VectorField> {
        if components.is_empty() {
            return Err(Error::Config("vector field needs at least one component".into()));
        }
        let arity = components[0].arity();
        for c in &components {
            if c.arity() != arity {
                return Err(Error::Dimension {
                    context: "vector field component arity".into(),
                    expected: arity,
                    got: c.arity(),
                });
            }
        }
        Ok(VectorField { components })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize) -> &ScalarField {
        &self.components[i]
    }

    pub fn eval(&self, x: &Point) -> Result<Vec<f64>> {
        self.components.iter().map(|c| c.eval(&x.coords)).collect()
    }
}

#[derive(Clone)]
enum MatrixRepr {
    Entries(Vec<ScalarField>),
    Fn {
        tag: String,
        f: Arc<dyn Fn(&Point) -> Result<Matrix> + Send + Sync>,
    },
}

/// A square-matrix-valued field over chart points.
#[derive(Clone)]
pub struct MatrixField {
    size: usize,
    repr: MatrixRepr,
}

impl std::fmt::Debug for MatrixField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.repr {
            MatrixRepr::Entries(_) => write!(f, "MatrixField({}x{} entries)", self.size, self.size),
            MatrixRepr::Fn { tag, .. } => write!(f, "MatrixField({tag})"),
        }
    }
}

impl MatrixField {
    /// Row-major entry fields, `size * size` of them.
    pub fn from_entries(size: usize, entries: Vec<ScalarField>) -> Result<MatrixField> {
        if entries.len() != size * size {
            return Err(Error::Dimension {
                context: "matrix field entries".into(),
                expected: size * size,
                got: entries.len(),
            });
        }
        Ok(MatrixField {
            size,
            repr: MatrixRepr::Entries(entries),
        })
    }

    pub fn from_fn<F>(size: usize, tag: &str, f: F) -> MatrixField
    where
        F: Fn(&Point) -> Result<Matrix> + Send + Sync + 'static,
    {
        MatrixField {
            size,
            repr: MatrixRepr::Fn {
                tag: tag.to_string(),
                f: Arc::new(f),
            },
        }
    }

    pub fn zero(size: usize, arity: usize) -> MatrixField {
        let entries = (0..size * size)
            .map(|_| ScalarField::constant(arity, 0.0))
            .collect();
        MatrixField::from_entries(size, entries).expect("sized")
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn eval(&self, x: &Point) -> Result<Matrix> {
        match &self.repr {
            MatrixRepr::Entries(entries) => {
                let mut m = Matrix::zeros(self.size, self.size);
                for i in 0..self.size {
                    for j in 0..self.size {
                        m[(i, j)] = entries[i * self.size + j].eval(&x.coords)?;
                    }
                }
                Ok(m)
            }
            MatrixRepr::Fn { tag, f } => {
                let m = f(x)?;
                if m.nrows() != self.size || m.ncols() != self.size {
                    return Err(Error::Dimension {
                        context: format!("matrix field '{tag}'"),
                        expected: self.size,
                        got: m.nrows(),
                    });
                }
                if m.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFinite {
                        context: format!("matrix field '{tag}' at {:?}", x.coords),
                    });
                }
                Ok(m)
            }
        }
    }
}

/// Connection coefficients `Γ^i_{jk}` as `n³` scalar fields. Index
/// convention: `(Γ_k)^i_j = Γ^i_{jk}`, the last lower index `k` is the
/// differentiation direction, so contracting the `k` slot with `X^k`
/// yields the components of the covariant derivative along `X`.
#[derive(Clone, Debug)]
pub struct ConnectionField {
    dim: usize,
    gamma: Vec<ScalarField>,
}

impl ConnectionField {
    pub fn zero(dim: usize) -> ConnectionField {
        let gamma = (0..dim * dim * dim)
            .map(|_| ScalarField::constant(dim, 0.0))
            .collect();
        ConnectionField { dim, gamma }
    }

    /// `gamma` indexed by `(i, j, k) -> gamma[(i*n + j)*n + k]`.
    pub fn from_entries(dim: usize, gamma: Vec<ScalarField>) -> Result<ConnectionField> {
        if gamma.len() != dim * dim * dim {
            return Err(Error::Dimension {
                context: "connection coefficient table".into(),
                expected: dim * dim * dim,
                got: gamma.len(),
            });
        }
        for g in &gamma {
            if g.arity() != dim {
                return Err(Error::Dimension {
                    context: format!("connection entry '{}' arity", g.descriptor()),
                    expected: dim,
                    got: g.arity(),
                });
            }
        }
        Ok(ConnectionField { dim, gamma })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize, k: usize) -> &ScalarField {
        &self.gamma[(i * self.dim + j) * self.dim + k]
    }

    /// `Γ_k(x)` with `(Γ_k)^i_j = Γ^i_{jk}`.
    pub fn gamma_matrix(&self, k: usize, x: &Point) -> Result<Matrix> {
        let n = self.dim;
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.entry(i, j, k).eval(&x.coords)?;
            }
        }
        Ok(m)
    }

    /// All `Γ_k(x)`, `k = 1..n`.
    pub fn gamma_matrices(&self, x: &Point) -> Result<Vec<Matrix>> {
        (0..self.dim).map(|k| self.gamma_matrix(k, x)).collect()
    }
}

/// Invert with the singularity threshold applied.
pub fn checked_inverse(m: &Matrix, context: &str) -> Result<Matrix> {
    let det = m.determinant();
    if !det.is_finite() || det.abs() <= SINGULAR_DET {
        return Err(Error::SingularFrame {
            det,
            context: context.to_string(),
        });
    }
    m.clone().try_inverse().ok_or(Error::SingularFrame {
        det,
        context: context.to_string(),
    })
}

/// A frame presented by its matrix `A(x)` relative to the chart
/// coordinate frame: column `i'` holds the components of the frame
/// vector `E_{i'} = A^i_{i'} E_i`.
#[derive(Clone, Debug)]
pub struct FrameSpec {
    a: MatrixField,
    domain: DomainBox,
}

impl FrameSpec {
    pub fn new(a: MatrixField, domain: DomainBox) -> Result<FrameSpec> {
        if a.size() != domain.dim() {
            return Err(Error::Dimension {
                context: "frame spec".into(),
                expected: domain.dim(),
                got: a.size(),
            });
        }
        Ok(FrameSpec { a, domain })
    }

    pub fn dim(&self) -> usize {
        self.a.size()
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    /// `A(x)`, rejecting singular values (`|det A| <= 1e-12`).
    pub fn eval(&self, x: &Point) -> Result<Matrix> {
        let a = self.a.eval(x)?;
        let det = a.determinant();
        if !det.is_finite() || det.abs() <= SINGULAR_DET {
            return Err(Error::SingularFrame {
                det,
                context: format!("frame at {:?}", x.coords),
            });
        }
        Ok(a)
    }

    /// `(A, A⁻¹)` at `x`.
    pub fn eval_with_inverse(&self, x: &Point) -> Result<(Matrix, Matrix)> {
        let a = self.eval(x)?;
        let inv = checked_inverse(&a, "frame inverse")?;
        Ok((a, inv))
    }
}

/// How the matrix part of a derivation along `X` is supplied.
#[derive(Clone, Debug)]
pub enum DerivationForm {
    /// The (1,1) tensor `S_X` as a matrix field in the coordinate frame.
    STensor(MatrixField),
    /// The component matrix `W_X` directly, in the coordinate frame.
    DirectW(MatrixField),
}

/// A derivation `D_X = L_X + S_X` along a fixed vector field `X`,
/// carried either by its `S_X` tensor or directly by its component
/// matrix `W_X`.
#[derive(Clone, Debug)]
pub struct SDerivation {
    pub x_field: VectorField,
    pub form: DerivationForm,
}

impl SDerivation {
    /// The Lie derivative along `X` (the `S = 0` case).
    pub fn lie(x_field: VectorField) -> SDerivation {
        let n = x_field.dim();
        SDerivation {
            x_field,
            form: DerivationForm::STensor(MatrixField::zero(n, n)),
        }
    }

    pub fn from_s_tensor(x_field: VectorField, s: MatrixField) -> Result<SDerivation> {
        if s.size() != x_field.dim() {
            return Err(Error::Dimension {
                context: "derivation S tensor".into(),
                expected: x_field.dim(),
                got: s.size(),
            });
        }
        Ok(SDerivation {
            x_field,
            form: DerivationForm::STensor(s),
        })
    }

    pub fn from_w_matrix(x_field: VectorField, w: MatrixField) -> Result<SDerivation> {
        if w.size() != x_field.dim() {
            return Err(Error::Dimension {
                context: "derivation W matrix".into(),
                expected: x_field.dim(),
                got: w.size(),
            });
        }
        Ok(SDerivation {
            x_field,
            form: DerivationForm::DirectW(w),
        })
    }

    /// The covariant differentiation along fixed `X` induced by a linear
    /// connection: `W_X(x) = Γ_k(x) X^k(x)`.
    pub fn from_connection(conn: &ConnectionField, x_field: VectorField) -> Result<SDerivation> {
        if conn.dim() != x_field.dim() {
            return Err(Error::Dimension {
                context: "derivation from connection".into(),
                expected: conn.dim(),
                got: x_field.dim(),
            });
        }
        let conn = conn.clone();
        let xf = x_field.clone();
        let n = x_field.dim();
        let w = MatrixField::from_fn(n, "Gamma_k X^k", move |x| {
            crate::model::connection_wx(&conn, &xf, x)
        });
        Ok(SDerivation {
            x_field,
            form: DerivationForm::DirectW(w),
        })
    }

    pub fn dim(&self) -> usize {
        self.x_field.dim()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_field_checks_arity_and_finiteness() {
        let f = ScalarField::builtin(2, "1/x1", |x| 1.0 / x[0]);
        assert_eq!(f.eval(&[2.0, 0.0]).unwrap(), 0.5);
        assert!(matches!(f.eval(&[1.0]), Err(Error::Dimension { .. })));
        assert!(matches!(f.eval(&[0.0, 1.0]), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn domain_box_reports_offending_axis() {
        let b = DomainBox::new(vec![0.0, -1.0], vec![1.0, 1.0]).unwrap();
        assert!(b.contains(&[0.5, 0.0]));
        match b.check(&[0.5, 2.0]) {
            Err(Error::DomainBoundary { axis, value, .. }) => {
                assert_eq!(axis, 2);
                assert_eq!(value, 2.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn connection_indexing_follows_the_convention() {
        // Γ^1_{21} = 5 and nothing else, so Γ_1 = [[0, 5], [0, 0]].
        let n = 2;
        let mut entries: Vec<ScalarField> = (0..8).map(|_| ScalarField::constant(n, 0.0)).collect();
        entries[(0 * n + 1) * n + 0] = ScalarField::constant(n, 5.0);
        let conn = ConnectionField::from_entries(n, entries).unwrap();
        let g0 = conn.gamma_matrix(0, &Point::new(vec![0.3, 0.7])).unwrap();
        assert_eq!(g0[(0, 1)], 5.0);
        assert_eq!(g0.iter().filter(|v| **v != 0.0).count(), 1);
    }

    #[test]
    fn singular_frame_is_rejected() {
        let domain = DomainBox::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let a = MatrixField::from_fn(2, "rank-1", |_x| {
            Ok(Matrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]))
        });
        let frame = FrameSpec::new(a, domain).unwrap();
        match frame.eval(&Point::new(vec![0.0, 0.0])) {
            Err(Error::SingularFrame { .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }
}
