//! Parameter grids over `Jᵖ`, axis-role assignments splitting the chart
//! into tangential and transverse directions, and parametrized maps
//! `γ: Jᵖ → M`.

use crate::error::{Error, Result};
use crate::field::{Point, ScalarField};
use crate::tolerances::ADAPTED_EMBED_TOL;

/// Uniformly sampled closed interval.
#[derive(Clone, Debug, PartialEq)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridAxis {
    pub fn new(min: f64, max: f64, count: usize) -> Result<GridAxis> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::Grid(format!(
                "axis needs finite min < max, got [{min}, {max}]"
            )));
        }
        if count < 2 {
            return Err(Error::Grid(format!("axis needs at least 2 samples, got {count}")));
        }
        Ok(GridAxis { min, max, count })
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }

    pub fn value(&self, index: usize) -> f64 {
        self.min + index as f64 * self.spacing()
    }

    /// Index of the sample nearest to `v`, clamped to the axis.
    pub fn nearest_index(&self, v: f64) -> usize {
        let raw = ((v - self.min) / self.spacing()).round();
        if raw <= 0.0 {
            0
        } else {
            (raw as usize).min(self.count - 1)
        }
    }
}

/// One transverse chart axis with its frozen base value `t₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransverseAxis {
    pub axis: usize,
    pub base: f64,
}

/// Sample grid over the map parameters together with the chart axis
/// roles: tangential slot `α` corresponds to chart axis
/// `tangential_axes[α]`, the remaining axes are transverse and pinned at
/// their base values. The roles must select every chart axis exactly
/// once.
#[derive(Clone, Debug)]
pub struct Grid {
    pub axes: Vec<GridAxis>,
    pub tangential_axes: Vec<usize>,
    pub transverse: Vec<TransverseAxis>,
}

impl Grid {
    pub fn new(
        axes: Vec<GridAxis>,
        tangential_axes: Vec<usize>,
        transverse: Vec<TransverseAxis>,
    ) -> Result<Grid> {
        let p = axes.len();
        let n = p + transverse.len();
        if tangential_axes.len() != p {
            return Err(Error::Grid(format!(
                "{} parameter axes but {} tangential role assignments",
                p,
                tangential_axes.len()
            )));
        }
        if p == 0 || p > n {
            return Err(Error::Grid(format!("need 1 <= p <= n, got p = {p}, n = {n}")));
        }
        let mut seen = vec![false; n];
        for &a in tangential_axes.iter().chain(transverse.iter().map(|t| &t.axis)) {
            if a >= n {
                return Err(Error::Grid(format!(
                    "chart axis index {} out of range for dimension {n}",
                    a + 1
                )));
            }
            if seen[a] {
                return Err(Error::Grid(format!("chart axis {} assigned twice", a + 1)));
            }
            seen[a] = true;
        }
        Ok(Grid {
            axes,
            tangential_axes,
            transverse,
        })
    }

    /// Parameter count `p`.
    pub fn p(&self) -> usize {
        self.axes.len()
    }

    /// Chart dimension `n`.
    pub fn dim(&self) -> usize {
        self.axes.len() + self.transverse.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.count).collect()
    }

    pub fn node_count(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    /// Parameter values of the node at `index`.
    pub fn node_values(&self, index: &[usize]) -> Vec<f64> {
        index
            .iter()
            .zip(&self.axes)
            .map(|(i, a)| a.value(*i))
            .collect()
    }

    /// Grid node index whose values equal `s` within a small tolerance.
    pub fn locate_node(&self, s: &[f64]) -> Result<Vec<usize>> {
        if s.len() != self.p() {
            return Err(Error::Dimension {
                context: "grid node lookup".into(),
                expected: self.p(),
                got: s.len(),
            });
        }
        let mut index = Vec::with_capacity(self.p());
        for (axis, v) in self.axes.iter().zip(s) {
            let i = axis.nearest_index(*v);
            if (axis.value(i) - v).abs() > 1e-9 * (1.0 + v.abs()) {
                return Err(Error::Grid(format!(
                    "value {v} is not a grid node of [{}, {}] with {} samples",
                    axis.min, axis.max, axis.count
                )));
            }
            index.push(i);
        }
        Ok(index)
    }

    /// Node nearest to the center of the parameter box.
    pub fn center_node(&self) -> Vec<usize> {
        self.axes
            .iter()
            .map(|a| a.nearest_index(0.5 * (a.min + a.max)))
            .collect()
    }

    /// Row-major iteration over all node multi-indices (last axis fastest).
    pub fn indices(&self) -> MultiIndexIter {
        MultiIndexIter::new(self.shape())
    }
}

/// Row-major multi-index iterator over a rectangular shape.
pub struct MultiIndexIter {
    shape: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl MultiIndexIter {
    pub fn new(shape: Vec<usize>) -> MultiIndexIter {
        let next = if shape.iter().any(|&c| c == 0) {
            None
        } else {
            Some(vec![0; shape.len()])
        };
        MultiIndexIter { shape, next }
    }
}

impl Iterator for MultiIndexIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.clone()?;
        let mut bump = current.clone();
        let mut axis = self.shape.len();
        loop {
            if axis == 0 {
                self.next = None;
                break;
            }
            axis -= 1;
            bump[axis] += 1;
            if bump[axis] < self.shape[axis] {
                self.next = Some(bump);
                break;
            }
            bump[axis] = 0;
        }
        Some(current)
    }
}

/// Row-major flat offset of `index` in `shape`.
pub fn flat_index(shape: &[usize], index: &[usize]) -> usize {
    let mut flat = 0;
    for (i, c) in index.iter().zip(shape) {
        debug_assert!(i < c);
        flat = flat * c + i;
    }
    flat
}

/// The C¹ map `γ: Jᵖ → M` with its sample grid and axis roles. A map is
/// adapted when `γ(s) = (s, t₀)` up to the axis permutation declared in
/// the grid; that property is established at construction time.
#[derive(Clone, Debug)]
pub struct ParamMap {
    dim: usize,
    components: Vec<ScalarField>,
    pub grid: Grid,
    adapted: bool,
}

impl ParamMap {
    /// The identity-plus-constant embedding for the given roles:
    /// `γ^i(s) = s^α` on tangential axes, `t₀` on transverse axes.
    pub fn adapted_embedding(grid: Grid) -> ParamMap {
        let n = grid.dim();
        let p = grid.p();
        let mut components = vec![ScalarField::constant(p, 0.0); n];
        for (slot, &axis) in grid.tangential_axes.iter().enumerate() {
            components[axis] = ScalarField::builtin(p, &format!("s{}", slot + 1), move |s| s[slot]);
        }
        for t in &grid.transverse {
            components[t.axis] = ScalarField::constant(p, t.base);
        }
        ParamMap {
            dim: n,
            components,
            grid,
            adapted: true,
        }
    }

    /// A general map from component fields of arity `p`. Adaptedness is
    /// detected by evaluating the components on every grid node.
    pub fn from_components(components: Vec<ScalarField>, grid: Grid) -> Result<ParamMap> {
        let n = grid.dim();
        let p = grid.p();
        if components.len() != n {
            return Err(Error::Dimension {
                context: "map components".into(),
                expected: n,
                got: components.len(),
            });
        }
        for c in &components {
            if c.arity() != p {
                return Err(Error::Dimension {
                    context: format!("map component '{}' arity", c.descriptor()),
                    expected: p,
                    got: c.arity(),
                });
            }
        }
        let mut map = ParamMap {
            dim: n,
            components,
            grid,
            adapted: false,
        };
        map.adapted = map.embedding_holds_on_grid()?;
        Ok(map)
    }

    fn embedding_holds_on_grid(&self) -> Result<bool> {
        for index in self.grid.indices() {
            let s = self.grid.node_values(&index);
            let x = self.eval(&s)?;
            for (slot, &axis) in self.grid.tangential_axes.iter().enumerate() {
                if (x.coords[axis] - s[slot]).abs() > ADAPTED_EMBED_TOL {
                    return Ok(false);
                }
            }
            for t in &self.grid.transverse {
                if (x.coords[t.axis] - t.base).abs() > ADAPTED_EMBED_TOL {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn p(&self) -> usize {
        self.grid.p()
    }

    pub fn is_adapted(&self) -> bool {
        self.adapted
    }

    pub fn component(&self, i: usize) -> &ScalarField {
        &self.components[i]
    }

    /// `γ(s)` for any parameter vector, on or off the grid.
    pub fn eval(&self, s: &[f64]) -> Result<Point> {
        if s.len() != self.p() {
            return Err(Error::Dimension {
                context: "map parameter".into(),
                expected: self.p(),
                got: s.len(),
            });
        }
        let coords = self
            .components
            .iter()
            .map(|c| c.eval(s))
            .collect::<Result<Vec<f64>>>()?;
        Ok(Point::new(coords))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_values_and_lookup() {
        let axis = GridAxis::new(0.0, 1.0, 11).unwrap();
        assert!((axis.spacing() - 0.1).abs() < 1e-15);
        assert!((axis.value(10) - 1.0).abs() < 1e-15);
        assert_eq!(axis.nearest_index(0.94), 9);
        assert_eq!(axis.nearest_index(-3.0), 0);
        assert_eq!(axis.nearest_index(7.0), 10);
    }

    #[test]
    fn roles_must_partition_the_chart_axes() {
        let axes = vec![GridAxis::new(0.0, 1.0, 3).unwrap()];
        assert!(Grid::new(axes.clone(), vec![0], vec![TransverseAxis { axis: 0, base: 1.0 }]).is_err());
        assert!(Grid::new(axes.clone(), vec![2], vec![TransverseAxis { axis: 0, base: 1.0 }]).is_err());
        let grid = Grid::new(axes, vec![1], vec![TransverseAxis { axis: 0, base: 2.0 }]).unwrap();
        assert_eq!(grid.dim(), 2);
        assert_eq!(grid.p(), 1);
    }

    #[test]
    fn adapted_embedding_evaluates_to_identity_plus_constant() {
        let grid = Grid::new(
            vec![GridAxis::new(0.0, 2.0, 5).unwrap()],
            vec![1],
            vec![TransverseAxis { axis: 0, base: 2.0 }],
        )
        .unwrap();
        let map = ParamMap::adapted_embedding(grid);
        assert!(map.is_adapted());
        let x = map.eval(&[0.75]).unwrap();
        assert_eq!(x.coords, vec![2.0, 0.75]);
    }

    #[test]
    fn general_components_detected_as_adapted_or_not() {
        let grid = Grid::new(
            vec![GridAxis::new(0.0, 1.0, 4).unwrap()],
            vec![0],
            vec![TransverseAxis { axis: 1, base: 0.5 }],
        )
        .unwrap();
        let vars = vec!["s1".to_string()];
        let adapted = ParamMap::from_components(
            vec![
                ScalarField::from_expr_text("s1", &vars).unwrap(),
                ScalarField::constant(1, 0.5),
            ],
            grid.clone(),
        )
        .unwrap();
        assert!(adapted.is_adapted());

        let crooked = ParamMap::from_components(
            vec![
                ScalarField::from_expr_text("s1 + 0.25", &vars).unwrap(),
                ScalarField::constant(1, 0.5),
            ],
            grid,
        )
        .unwrap();
        assert!(!crooked.is_adapted());
    }

    #[test]
    fn multi_index_iteration_is_row_major() {
        let order: Vec<Vec<usize>> = MultiIndexIter::new(vec![2, 3]).collect();
        assert_eq!(order.len(), 6);
        assert_eq!(order[0], vec![0, 0]);
        assert_eq!(order[1], vec![0, 1]);
        assert_eq!(order[3], vec![1, 0]);
        assert_eq!(flat_index(&[2, 3], &[1, 2]), 5);
    }
}
