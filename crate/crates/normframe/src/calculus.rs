//! Numerical kernels: central finite differences, the linear matrix
//! transport problems `dY/ds = Z(s) Y` (single parameter) and
//! `∂Y/∂s^α = Z_α(s) Y` (several parameters, swept axis by axis), and
//! integral curves of vector fields.
//!
//! All integrators are the classical fixed-step 4th-order Runge-Kutta
//! scheme; there is no adaptivity, so every run is deterministic and
//! step-halving studies are meaningful.

use crate::error::{Error, Result};
use crate::field::{DomainBox, Matrix, Point, ScalarField, VectorField};
use crate::grid::{flat_index, GridAxis, MultiIndexIter};
use crate::tolerances::{DEFAULT_ODE_STEP, SINGULAR_DET};

/// Fixed-step integrator settings.
#[derive(Clone, Debug)]
pub struct OdeSettings {
    pub step: f64,
    pub max_steps: usize,
    pub method: OdeMethod,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OdeMethod {
    Rk4Classic,
}

impl Default for OdeSettings {
    fn default() -> OdeSettings {
        OdeSettings {
            step: DEFAULT_ODE_STEP,
            max_steps: 20_000_000,
            method: OdeMethod::Rk4Classic,
        }
    }
}

impl OdeSettings {
    pub fn with_step(step: f64) -> OdeSettings {
        OdeSettings {
            step,
            ..OdeSettings::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::Config(format!("ode step must be positive, got {}", self.step)));
        }
        if self.max_steps == 0 {
            return Err(Error::Config("max_steps must be at least 1".into()));
        }
        Ok(())
    }
}

/// Number of fixed steps covering `span`, snapping near-integer ratios so
/// that `span/step = k` does not round up to `k + 1` steps.
pub(crate) fn step_count(span: f64, step: f64, max_steps: usize) -> Result<usize> {
    let ratio = span.abs() / step;
    let snapped = if (ratio - ratio.round()).abs() <= 1e-9 * ratio.max(1.0) {
        ratio.round()
    } else {
        ratio.ceil()
    };
    let n = (snapped as usize).max(1);
    if n > max_steps {
        return Err(Error::Config(format!(
            "span {span} at step {step} needs {n} steps, above the limit {max_steps}"
        )));
    }
    Ok(n)
}

/// Central difference `(f(x + h e_k) - f(x - h e_k)) / 2h` of a scalar
/// field, with the stencil checked against the domain.
pub fn partial_scalar(
    field: &ScalarField,
    x: &Point,
    axis: usize,
    h: f64,
    domain: &DomainBox,
) -> Result<f64> {
    domain.check_stencil(x, axis, h)?;
    let plus = field.eval(&x.offset(axis, h).coords)?;
    let minus = field.eval(&x.offset(axis, -h).coords)?;
    Ok((plus - minus) / (2.0 * h))
}

/// Central difference of a matrix-valued function of chart points.
pub fn partial_matrix<F>(f: F, x: &Point, axis: usize, h: f64, domain: &DomainBox) -> Result<Matrix>
where
    F: Fn(&Point) -> Result<Matrix>,
{
    domain.check_stencil(x, axis, h)?;
    let plus = f(&x.offset(axis, h))?;
    let minus = f(&x.offset(axis, -h))?;
    Ok((plus - minus) / (2.0 * h))
}

/// Jacobian `(J)^i_j = ∂_j X^i` by central differences.
pub fn jacobian(xf: &VectorField, x: &Point, h: f64, domain: &DomainBox) -> Result<Matrix> {
    let n = xf.dim();
    let mut j = Matrix::zeros(n, n);
    for col in 0..n {
        domain.check_stencil(x, col, h)?;
        let plus = xf.eval(&x.offset(col, h))?;
        let minus = xf.eval(&x.offset(col, -h))?;
        for row in 0..n {
            j[(row, col)] = (plus[row] - minus[row]) / (2.0 * h);
        }
    }
    Ok(j)
}

/// One classical RK4 step of `Y' = Z(s) Y`. The midpoint coefficient is
/// evaluated once and shared by the two inner stages.
fn rk4_linear_step<Z>(z: &Z, s: f64, h: f64, y: &Matrix) -> Result<Matrix>
where
    Z: Fn(f64) -> Result<Matrix>,
{
    let z1 = z(s)?;
    let zm = z(s + 0.5 * h)?;
    let z4 = z(s + h)?;
    let k1 = &z1 * y;
    let k2 = &zm * &(y + &k1 * (0.5 * h));
    let k3 = &zm * &(y + &k2 * (0.5 * h));
    let k4 = &z4 * &(y + &k3 * h);
    Ok(y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
}

/// Advance `Y' = Z Y` from `sa` to `sb`, splitting into RK4 substeps of
/// at most `settings.step`.
pub(crate) fn integrate_linear_segment<Z>(
    z: &Z,
    sa: f64,
    sb: f64,
    y: &Matrix,
    settings: &OdeSettings,
) -> Result<Matrix>
where
    Z: Fn(f64) -> Result<Matrix>,
{
    if sa == sb {
        return Ok(y.clone());
    }
    let n = step_count(sb - sa, settings.step, settings.max_steps)?;
    let h = (sb - sa) / n as f64;
    let mut current = y.clone();
    for i in 0..n {
        let s = sa + i as f64 * h;
        current = rk4_linear_step(z, s, h, &current)?;
    }
    Ok(current)
}

/// Transported matrices `Y(s)` sampled at every integrator step, together
/// with their determinants and the cumulative trace integral
/// `∫ tr Z ds` (composite Simpson on the same nodes) for conditioning and
/// determinant checks.
#[derive(Clone, Debug)]
pub struct TransportResult {
    pub params: Vec<f64>,
    pub matrices: Vec<Matrix>,
    pub determinants: Vec<f64>,
    pub trace_integrals: Vec<f64>,
}

impl TransportResult {
    pub fn final_matrix(&self) -> &Matrix {
        self.matrices.last().expect("at least the initial sample")
    }

    /// Largest gap `|det Y - exp(∫ tr Z)|` over all samples.
    pub fn liouville_max_residual(&self) -> f64 {
        self.determinants
            .iter()
            .zip(&self.trace_integrals)
            .map(|(d, t)| (d - t.exp()).abs())
            .fold(0.0, f64::max)
    }
}

/// Solve `dY/ds = Z(s) Y`, `Y(s0) = I` up to `s1` (either direction).
/// The initial sample is the identity bit-exactly; every transported
/// matrix must stay invertible.
pub fn solve_linear_transport<Z>(
    z: Z,
    s0: f64,
    s1: f64,
    settings: &OdeSettings,
) -> Result<TransportResult>
where
    Z: Fn(f64) -> Result<Matrix>,
{
    settings.validate()?;
    let m = z(s0)?.nrows();
    let mut params = vec![s0];
    let mut matrices = vec![Matrix::identity(m, m)];
    let mut determinants = vec![1.0];
    let mut trace_integrals = vec![0.0];
    if s1 != s0 {
        let n = step_count(s1 - s0, settings.step, settings.max_steps)?;
        let h = (s1 - s0) / n as f64;
        for i in 0..n {
            let s = s0 + i as f64 * h;
            let y = rk4_linear_step(&z, s, h, matrices.last().expect("nonempty"))?;
            let det = y.determinant();
            if !det.is_finite() || det.abs() <= SINGULAR_DET {
                return Err(Error::SingularFrame {
                    det,
                    context: format!("transport at s = {}", s + h),
                });
            }
            // Simpson increment on (s, s + h/2, s + h), same nodes RK4 used.
            let tr = |m: &Matrix| m.trace();
            let inc = (h / 6.0) * (tr(&z(s)?) + 4.0 * tr(&z(s + 0.5 * h)?) + tr(&z(s + h)?));
            params.push(s0 + (i + 1) as f64 * h);
            trace_integrals.push(trace_integrals.last().expect("nonempty") + inc);
            determinants.push(det);
            matrices.push(y);
        }
    }
    Ok(TransportResult {
        params,
        matrices,
        determinants,
        trace_integrals,
    })
}

/// Transport tables over a rectangular parameter grid, computed with
/// both axis sweep orders. Their largest pointwise gap is the practical
/// face of the integrability condition: it vanishes (to integrator
/// accuracy) exactly when the mixed-derivative obstruction does.
#[derive(Clone, Debug)]
pub struct MultiTransportResult {
    pub axes: Vec<GridAxis>,
    pub base_index: Vec<usize>,
    pub forward: Vec<Matrix>,
    pub reverse: Vec<Matrix>,
    pub max_discrepancy: f64,
}

impl MultiTransportResult {
    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.count).collect()
    }

    pub fn at(&self, index: &[usize]) -> &Matrix {
        &self.forward[flat_index(&self.shape(), index)]
    }

    /// Componentwise multilinear interpolation of the forward table.
    /// Reporting convenience only; it is first-order accurate between
    /// nodes and is not used to build or verify frames.
    pub fn interpolate(&self, s: &[f64]) -> Result<Matrix> {
        let p = self.axes.len();
        if s.len() != p {
            return Err(Error::Dimension {
                context: "transport interpolation".into(),
                expected: p,
                got: s.len(),
            });
        }
        let shape = self.shape();
        let mut cell = Vec::with_capacity(p);
        let mut frac = Vec::with_capacity(p);
        for (axis, v) in self.axes.iter().zip(s) {
            let t = (v - axis.min) / axis.spacing();
            let i = (t.floor() as isize).clamp(0, axis.count as isize - 2) as usize;
            cell.push(i);
            frac.push(t - i as f64);
        }
        let m = self.forward[0].nrows();
        let mut out = Matrix::zeros(m, m);
        for corner in MultiIndexIter::new(vec![2; p]) {
            let mut weight = 1.0;
            let mut index = Vec::with_capacity(p);
            for (a, bit) in corner.iter().enumerate() {
                weight *= if *bit == 1 { frac[a] } else { 1.0 - frac[a] };
                index.push(cell[a] + bit);
            }
            out += &self.forward[flat_index(&shape, &index)] * weight;
        }
        Ok(out)
    }
}

/// Solve `∂Y/∂s^α = Z_α(s) Y`, `Y(s0) = I` over the whole grid.
///
/// The sweep fills the grid one axis at a time starting from the base
/// node: axis order ascending for the `forward` table and descending for
/// `reverse`. Between adjacent nodes the segment is integrated with RK4
/// substeps no longer than `settings.step`. `z(alpha, s)` must evaluate
/// the coefficient of axis `alpha` at any parameter vector `s`.
pub fn multiparam_transport<Z>(
    z: Z,
    s0: &[f64],
    axes: &[GridAxis],
    settings: &OdeSettings,
) -> Result<MultiTransportResult>
where
    Z: Fn(usize, &[f64]) -> Result<Matrix>,
{
    settings.validate()?;
    let p = axes.len();
    if p == 0 {
        return Err(Error::Grid("multi-parameter transport needs p >= 1".into()));
    }
    if s0.len() != p {
        return Err(Error::Dimension {
            context: "transport base point".into(),
            expected: p,
            got: s0.len(),
        });
    }
    let mut base_index = Vec::with_capacity(p);
    for (axis, v) in axes.iter().zip(s0) {
        let i = axis.nearest_index(*v);
        if (axis.value(i) - v).abs() > 1e-9 * (1.0 + v.abs()) {
            return Err(Error::Grid(format!(
                "base value {v} is not a node of [{}, {}] with {} samples",
                axis.min, axis.max, axis.count
            )));
        }
        base_index.push(i);
    }
    let m = z(0, s0)?.nrows();

    let ascending: Vec<usize> = (0..p).collect();
    let descending: Vec<usize> = (0..p).rev().collect();
    let forward = sweep(&z, axes, &base_index, &ascending, settings, m)?;
    let reverse = sweep(&z, axes, &base_index, &descending, settings, m)?;
    let max_discrepancy = forward
        .iter()
        .zip(&reverse)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(MultiTransportResult {
        axes: axes.to_vec(),
        base_index,
        forward,
        reverse,
        max_discrepancy,
    })
}

/// Fill the table along `order`: after the k-th pass the subgrid spanned
/// by the first k axes of `order` (remaining axes pinned at the base
/// node) is complete.
fn sweep<Z>(
    z: &Z,
    axes: &[GridAxis],
    base: &[usize],
    order: &[usize],
    settings: &OdeSettings,
    m: usize,
) -> Result<Vec<Matrix>>
where
    Z: Fn(usize, &[f64]) -> Result<Matrix>,
{
    let p = axes.len();
    let shape: Vec<usize> = axes.iter().map(|a| a.count).collect();
    let total: usize = shape.iter().product();
    let mut table: Vec<Option<Matrix>> = vec![None; total];
    table[flat_index(&shape, base)] = Some(Matrix::identity(m, m));

    let mut processed: Vec<usize> = Vec::new();
    for &axis in order {
        // Start nodes: processed axes run over their full range, all
        // other axes (including `axis`) sit at the base node.
        let sub_shape: Vec<usize> = processed.iter().map(|&a| shape[a]).collect();
        for sub in MultiIndexIter::new(if sub_shape.is_empty() {
            vec![1]
        } else {
            sub_shape
        }) {
            let mut start = base.to_vec();
            if !processed.is_empty() {
                for (k, &a) in processed.iter().enumerate() {
                    start[a] = sub[k];
                }
            }
            integrate_line(z, axes, &shape, &mut table, &start, axis, settings)?;
        }
        processed.push(axis);
    }
    Ok(table
        .into_iter()
        .map(|y| y.expect("sweep fills every node"))
        .collect())
}

/// Integrate along `axis` from the already-filled `start` node towards
/// both ends of the axis, writing every node passed.
fn integrate_line<Z>(
    z: &Z,
    axes: &[GridAxis],
    shape: &[usize],
    table: &mut [Option<Matrix>],
    start: &[usize],
    axis: usize,
    settings: &OdeSettings,
) -> Result<()>
where
    Z: Fn(usize, &[f64]) -> Result<Matrix>,
{
    let line_z = |index: &[usize], s_axis: f64| -> Result<Matrix> {
        let mut s: Vec<f64> = index
            .iter()
            .zip(axes)
            .map(|(i, a)| a.value(*i))
            .collect();
        s[axis] = s_axis;
        z(axis, &s)
    };
    let start_flat = flat_index(shape, start);
    let start_y = table[start_flat]
        .clone()
        .expect("line start filled by a previous pass");

    let mut index = start.to_vec();
    let mut y = start_y.clone();
    for j in start[axis]..shape[axis] - 1 {
        let sa = axes[axis].value(j);
        let sb = axes[axis].value(j + 1);
        y = integrate_linear_segment(&|s| line_z(&index, s), sa, sb, &y, settings)?;
        index[axis] = j + 1;
        table[flat_index(shape, &index)] = Some(y.clone());
    }

    let mut index = start.to_vec();
    let mut y = start_y;
    for j in (1..=start[axis]).rev() {
        let sa = axes[axis].value(j);
        let sb = axes[axis].value(j - 1);
        y = integrate_linear_segment(&|s| line_z(&index, s), sa, sb, &y, settings)?;
        index[axis] = j - 1;
        table[flat_index(shape, &index)] = Some(y.clone());
    }
    Ok(())
}

/// A sampled integral curve `γ̇(s) = X(γ(s))`, `γ(0) = x0`.
#[derive(Clone, Debug)]
pub struct CurvePath {
    pub params: Vec<f64>,
    pub points: Vec<Point>,
    /// Set when the trajectory left the domain (or a coefficient failed)
    /// before reaching the requested span.
    pub truncated: bool,
    pub step: f64,
}

/// Integrate the flow of `X` from `x0` over `[0, span]` with fixed RK4
/// steps. Leaving the domain truncates the result instead of failing.
pub fn integral_curve(
    xf: &VectorField,
    x0: &Point,
    span: f64,
    settings: &OdeSettings,
    domain: &DomainBox,
) -> Result<CurvePath> {
    settings.validate()?;
    if !(span.is_finite() && span > 0.0) {
        return Err(Error::Config(format!("curve span must be positive, got {span}")));
    }
    let n = step_count(span, settings.step, settings.max_steps)?;
    integral_curve_n(xf, x0, span, n, domain)
}

/// Same as [`integral_curve`] with the step count fixed by the caller.
pub fn integral_curve_n(
    xf: &VectorField,
    x0: &Point,
    span: f64,
    n_steps: usize,
    domain: &DomainBox,
) -> Result<CurvePath> {
    domain.check(&x0.coords)?;
    let h = span / n_steps as f64;
    let dim = xf.dim();
    let mut params = vec![0.0];
    let mut points = vec![x0.clone()];
    let mut truncated = false;

    let stage = |p: &Point| -> Result<Vec<f64>> {
        domain.check(&p.coords)?;
        xf.eval(p)
    };
    let advance = |p: &Point, k: &[f64], factor: f64| -> Point {
        let coords = p
            .coords
            .iter()
            .zip(k)
            .map(|(x, v)| x + factor * v)
            .collect();
        Point::new(coords)
    };

    'steps: for i in 0..n_steps {
        let x = points.last().expect("nonempty").clone();
        let stages: [f64; 3] = [0.5 * h, 0.5 * h, h];
        let mut ks: Vec<Vec<f64>> = Vec::with_capacity(4);
        match stage(&x) {
            Ok(k1) => ks.push(k1),
            Err(_) => {
                truncated = true;
                break 'steps;
            }
        }
        for factor in stages {
            let probe = advance(&x, ks.last().expect("nonempty"), factor);
            match stage(&probe) {
                Ok(k) => ks.push(k),
                Err(_) => {
                    truncated = true;
                    break 'steps;
                }
            }
        }
        let mut next = Vec::with_capacity(dim);
        for c in 0..dim {
            next.push(
                x.coords[c] + (h / 6.0) * (ks[0][c] + 2.0 * ks[1][c] + 2.0 * ks[2][c] + ks[3][c]),
            );
        }
        if !domain.contains(&next) || next.iter().any(|v| !v.is_finite()) {
            truncated = true;
            break 'steps;
        }
        params.push((i + 1) as f64 * h);
        points.push(Point::new(next));
    }
    Ok(CurvePath {
        params,
        points,
        truncated,
        step: h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    fn wide_domain(n: usize) -> DomainBox {
        DomainBox::new(vec![-100.0; n], vec![100.0; n]).unwrap()
    }

    #[test]
    fn central_difference_examples() {
        let domain = wide_domain(1);
        let sq = ScalarField::builtin(1, "x^2", |x| x[0] * x[0]);
        let d = partial_scalar(&sq, &Point::new(vec![1.0]), 0, 1e-3, &domain).unwrap();
        assert!((d - 2.0).abs() < 1e-6);

        let c = ScalarField::constant(1, 3.0);
        let d = partial_scalar(&c, &Point::new(vec![0.2]), 0, 1e-3, &domain).unwrap();
        assert_eq!(d, 0.0);

        let sin = ScalarField::builtin(1, "sin", |x| x[0].sin());
        let d = partial_scalar(&sin, &Point::new(vec![0.0]), 0, 1e-4, &domain).unwrap();
        assert!((d - 1.0).abs() < 1e-8);
    }

    #[test]
    fn stencil_respects_domain() {
        let domain = DomainBox::new(vec![0.0], vec![1.0]).unwrap();
        let f = ScalarField::constant(1, 1.0);
        let err = partial_scalar(&f, &Point::new(vec![0.0]), 0, 1e-3, &domain);
        assert!(matches!(err, Err(Error::DomainBoundary { .. })));
    }

    #[test]
    fn transport_of_zero_coefficient_is_identity() {
        let z = |_s: f64| Ok(Matrix::zeros(2, 2));
        let r = solve_linear_transport(z, 0.0, 1.0, &OdeSettings::default()).unwrap();
        assert_eq!(r.matrices[0], Matrix::identity(2, 2));
        assert_eq!(*r.final_matrix(), Matrix::identity(2, 2));
    }

    #[test]
    fn transport_of_constant_scalar_coefficient_is_exponential() {
        let z = |_s: f64| Ok(Matrix::identity(2, 2));
        let r = solve_linear_transport(z, 0.0, 1.0, &OdeSettings::default()).unwrap();
        let e = std::f64::consts::E;
        assert!((r.final_matrix()[(0, 0)] - e).abs() < 1e-8);
        assert!((r.final_matrix()[(0, 1)]).abs() < 1e-12);
        assert!(r.liouville_max_residual() < 1e-6);
    }

    #[test]
    fn rotation_transport_matches_matrix_exponential() {
        let z = |_s: f64| Ok(dmatrix![0.0, 1.0; -1.0, 0.0]);
        let r = solve_linear_transport(z, 0.0, std::f64::consts::FRAC_PI_2, &OdeSettings::default())
            .unwrap();
        let expected = dmatrix![0.0, 1.0; -1.0, 0.0];
        assert!((r.final_matrix() - expected).norm() < 1e-8);
        assert!(r.liouville_max_residual() < 1e-6);
    }

    #[test]
    fn halving_the_step_is_fourth_order() {
        let z = |_s: f64| Ok(dmatrix![0.0, 1.0; -1.0, 0.0]);
        let s1 = std::f64::consts::FRAC_PI_2;
        let expected = dmatrix![0.0, 1.0; -1.0, 0.0];
        let coarse = solve_linear_transport(z, 0.0, s1, &OdeSettings::with_step(0.05)).unwrap();
        let fine = solve_linear_transport(z, 0.0, s1, &OdeSettings::with_step(0.025)).unwrap();
        let e_coarse = (coarse.final_matrix() - &expected).norm();
        let e_fine = (fine.final_matrix() - &expected).norm();
        assert!(e_coarse / e_fine >= 8.0, "ratio {}", e_coarse / e_fine);
    }

    #[test]
    fn multiparam_zero_coefficients() {
        let axes = vec![
            GridAxis::new(0.0, 1.0, 5).unwrap(),
            GridAxis::new(0.0, 1.0, 5).unwrap(),
        ];
        let z = |_a: usize, _s: &[f64]| Ok(Matrix::zeros(2, 2));
        let r = multiparam_transport(z, &[0.0, 0.0], &axes, &OdeSettings::default()).unwrap();
        assert_eq!(r.max_discrepancy, 0.0);
        for y in &r.forward {
            assert_eq!(*y, Matrix::identity(2, 2));
        }
    }

    #[test]
    fn multiparam_commuting_constant_coefficients() {
        let axes = vec![
            GridAxis::new(0.0, 1.0, 3).unwrap(),
            GridAxis::new(0.0, 1.0, 3).unwrap(),
        ];
        let c = 0.7;
        let z = move |_a: usize, _s: &[f64]| Ok(Matrix::identity(2, 2) * c);
        let r = multiparam_transport(z, &[0.0, 0.0], &axes, &OdeSettings::default()).unwrap();
        assert!(r.max_discrepancy <= 1e-8);
        let y = r.at(&[2, 2]);
        let expected = (c * 2.0f64).exp();
        assert!((y[(0, 0)] - expected).abs() < 1e-8);

        // interpolation at a node reproduces the node, and mid-cell sits
        // between the neighbors
        let at_node = r.interpolate(&[0.5, 0.5]).unwrap();
        assert!((at_node - r.at(&[1, 1])).norm() < 1e-14);
        let mid = r.interpolate(&[0.25, 0.0]).unwrap();
        assert!(mid[(0, 0)] > r.at(&[0, 0])[(0, 0)] && mid[(0, 0)] < r.at(&[1, 0])[(0, 0)]);
    }

    #[test]
    fn multiparam_requires_base_on_grid() {
        let axes = vec![GridAxis::new(0.0, 1.0, 5).unwrap()];
        let z = |_a: usize, _s: &[f64]| Ok(Matrix::zeros(1, 1));
        let err = multiparam_transport(z, &[0.3], &axes, &OdeSettings::default());
        assert!(matches!(err, Err(Error::Grid(_))));
    }

    #[test]
    fn integral_curve_examples() {
        let domain = wide_domain(2);
        let settings = OdeSettings::default();

        let constant = VectorField::new(vec![
            ScalarField::constant(2, 1.0),
            ScalarField::constant(2, 0.0),
        ])
        .unwrap();
        let c = integral_curve(&constant, &Point::new(vec![0.0, 0.0]), 1.0, &settings, &domain)
            .unwrap();
        assert!(!c.truncated);
        let end = c.points.last().unwrap();
        assert!((end.coords[0] - 1.0).abs() < 1e-12);

        let rotation = VectorField::new(vec![
            ScalarField::builtin(2, "-x2", |x| -x[1]),
            ScalarField::builtin(2, "x1", |x| x[0]),
        ])
        .unwrap();
        let c = integral_curve(
            &rotation,
            &Point::new(vec![1.0, 0.0]),
            std::f64::consts::FRAC_PI_2,
            &settings,
            &domain,
        )
        .unwrap();
        let end = c.points.last().unwrap();
        assert!((end.coords[0]).abs() < 1e-8);
        assert!((end.coords[1] - 1.0).abs() < 1e-8);

        let zero = VectorField::new(vec![
            ScalarField::constant(2, 0.0),
            ScalarField::constant(2, 0.0),
        ])
        .unwrap();
        let c = integral_curve(&zero, &Point::new(vec![0.3, 0.4]), 2.0, &settings, &domain).unwrap();
        for p in &c.points {
            assert_eq!(p.coords, vec![0.3, 0.4]);
        }
    }

    #[test]
    fn curve_leaving_the_domain_is_truncated() {
        let domain = DomainBox::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let constant = VectorField::new(vec![
            ScalarField::constant(2, 1.0),
            ScalarField::constant(2, 0.0),
        ])
        .unwrap();
        let c = integral_curve(
            &constant,
            &Point::new(vec![0.0, 0.0]),
            5.0,
            &OdeSettings::with_step(0.1),
            &domain,
        )
        .unwrap();
        assert!(c.truncated);
        let end = c.points.last().unwrap();
        assert!(end.coords[0] <= 1.0);
        assert!(c.params.len() < 51);
    }
}
