//! Equal-measure box partitions of the domain.
//!
//! Cells are indexed row-major with the first axis fastest: in 2D, cell
//! `(ix, iy)` has index `iy * nx + ix`. Every other module relies on this
//! order being deterministic.

use crate::error::{Error, Result};

/// Closed interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Axis-aligned box in one or two dimensions. Unused axes are left at `[0, 0]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellBox {
    pub dim: usize,
    pub axes: [Interval; 2],
}

impl CellBox {
    pub fn measure(&self) -> f64 {
        self.axes[..self.dim].iter().map(Interval::len).product()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    dim: usize,
    bounds: Vec<Interval>,
    cells_per_axis: Vec<usize>,
    cell_measure: f64,
    centers: Vec<[f64; 2]>,
    boundary_adjacent: Vec<bool>,
}

impl Grid {
    /// Builds a uniform grid of `cells_per_axis[d]` cells along each axis `d`.
    pub fn new(dim: usize, bounds: &[(f64, f64)], cells_per_axis: &[usize]) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!("dim must be 1 or 2, got {dim}")));
        }
        if bounds.len() != dim || cells_per_axis.len() != dim {
            return Err(Error::InvalidGrid(format!(
                "expected {dim} bounds and {dim} cell counts, got {} and {}",
                bounds.len(),
                cells_per_axis.len()
            )));
        }
        for (axis, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
                return Err(Error::InvalidGrid(format!(
                    "axis {axis}: bounds [{lo}, {hi}] are empty or inverted"
                )));
            }
        }
        for (axis, &n) in cells_per_axis.iter().enumerate() {
            if n < 2 {
                return Err(Error::InvalidGrid(format!(
                    "axis {axis}: need at least 2 cells, got {n}"
                )));
            }
        }

        let bounds: Vec<Interval> = bounds.iter().map(|&(lo, hi)| Interval::new(lo, hi)).collect();
        let cell_measure = bounds
            .iter()
            .zip(cells_per_axis)
            .map(|(b, &n)| b.len() / n as f64)
            .product();

        let mut grid = Grid {
            dim,
            bounds,
            cells_per_axis: cells_per_axis.to_vec(),
            cell_measure,
            centers: Vec::new(),
            boundary_adjacent: Vec::new(),
        };
        let n = grid.len();
        grid.centers = (0..n)
            .map(|i| {
                let b = grid.cell_box(i);
                let mut c = [0.0; 2];
                for d in 0..dim {
                    c[d] = 0.5 * (b.axes[d].lo + b.axes[d].hi);
                }
                c
            })
            .collect();
        grid.boundary_adjacent = (0..n)
            .map(|i| {
                let idx = grid.multi_index(i);
                (0..dim).any(|d| idx[d] == 0 || idx[d] + 1 == grid.cells_per_axis[d])
            })
            .collect();
        Ok(grid)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bounds(&self) -> &[Interval] {
        &self.bounds
    }

    pub fn cells_per_axis(&self) -> &[usize] {
        &self.cells_per_axis
    }

    /// Total number of cells.
    pub fn len(&self) -> usize {
        self.cells_per_axis.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_measure(&self) -> f64 {
        self.cell_measure
    }

    /// Lebesgue measure of the domain.
    pub fn domain_measure(&self) -> f64 {
        self.bounds.iter().map(Interval::len).product()
    }

    /// Diameter of the domain box.
    pub fn diameter(&self) -> f64 {
        self.bounds.iter().map(|b| b.len() * b.len()).sum::<f64>().sqrt()
    }

    pub fn center(&self, i: usize) -> &[f64] {
        &self.centers[i][..self.dim]
    }

    pub fn boundary_adjacent(&self) -> &[bool] {
        &self.boundary_adjacent
    }

    /// Per-axis cell indices of cell `i`.
    pub fn multi_index(&self, i: usize) -> [usize; 2] {
        let nx = self.cells_per_axis[0];
        if self.dim == 1 {
            [i, 0]
        } else {
            [i % nx, i / nx]
        }
    }

    pub fn linear_index(&self, ix: usize, iy: usize) -> usize {
        if self.dim == 1 {
            ix
        } else {
            iy * self.cells_per_axis[0] + ix
        }
    }

    /// Box covered by cell `i`. Shared faces of neighbouring cells are bit-identical
    /// and outer faces coincide exactly with the domain bounds.
    pub fn cell_box(&self, i: usize) -> CellBox {
        let idx = self.multi_index(i);
        let mut axes = [Interval::new(0.0, 0.0); 2];
        for d in 0..self.dim {
            axes[d] = self.axis_interval(d, idx[d]);
        }
        CellBox { dim: self.dim, axes }
    }

    fn axis_interval(&self, axis: usize, k: usize) -> Interval {
        let b = self.bounds[axis];
        let n = self.cells_per_axis[axis];
        let node = |j: usize| {
            if j == 0 {
                b.lo
            } else if j == n {
                b.hi
            } else {
                b.lo + (b.hi - b.lo) * (j as f64 / n as f64)
            }
        };
        Interval::new(node(k), node(k + 1))
    }

    /// Box of the whole domain.
    pub fn domain_box(&self) -> CellBox {
        let mut axes = [Interval::new(0.0, 0.0); 2];
        axes[..self.dim].copy_from_slice(&self.bounds);
        CellBox { dim: self.dim, axes }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_partition_1d() {
        let g = Grid::new(1, &[(0.0, 1.0)], &[4]).unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g.cell_measure(), 0.25);
        let centers: Vec<f64> = (0..4).map(|i| g.center(i)[0]).collect();
        assert_eq!(centers, vec![0.125, 0.375, 0.625, 0.875]);
        assert_eq!(g.boundary_adjacent(), &[true, false, false, true]);
        let b = g.cell_box(1);
        assert_eq!((b.axes[0].lo, b.axes[0].hi), (0.25, 0.5));
    }

    #[test]
    fn square_3x3_center_cell() {
        let g = Grid::new(2, &[(0.0, 1.0), (0.0, 1.0)], &[3, 3]).unwrap();
        assert_eq!(g.len(), 9);
        assert!((g.cell_measure() - 1.0 / 9.0).abs() < 1e-15);
        assert_eq!(g.center(4), &[0.5, 0.5]);
        assert!(!g.boundary_adjacent()[4]);
        assert_eq!(g.boundary_adjacent().iter().filter(|&&b| b).count(), 8);
    }

    #[test]
    fn measures_sum_to_domain() {
        let g = Grid::new(2, &[(-1.0, 2.0), (0.5, 1.25)], &[7, 5]).unwrap();
        let total: f64 = (0..g.len()).map(|i| g.cell_box(i).measure()).sum();
        assert!((total - g.domain_measure()).abs() <= 1e-12 * g.domain_measure());
        for i in 0..g.len() {
            let c = g.center(i);
            assert!(c[0] > -1.0 && c[0] < 2.0 && c[1] > 0.5 && c[1] < 1.25);
        }
    }

    #[test]
    fn row_major_order() {
        let g = Grid::new(2, &[(0.0, 2.0), (0.0, 1.0)], &[4, 2]).unwrap();
        assert_eq!(g.multi_index(5), [1, 1]);
        assert_eq!(g.linear_index(1, 1), 5);
        assert!(g.center(1)[0] > g.center(0)[0]);
        assert_eq!(g.center(1)[1], g.center(0)[1]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(Grid::new(3, &[(0.0, 1.0); 3], &[2; 3]), Err(Error::InvalidGrid(_))));
        assert!(Grid::new(1, &[(1.0, 1.0)], &[4]).is_err());
        assert!(Grid::new(1, &[(1.0, 0.0)], &[4]).is_err());
        assert!(Grid::new(1, &[(0.0, 1.0)], &[1]).is_err());
    }

    #[test]
    fn rebuild_is_identical() {
        let a = Grid::new(2, &[(0.0, 1.0), (0.0, 3.0)], &[5, 6]).unwrap();
        let b = Grid::new(2, &[(0.0, 1.0), (0.0, 3.0)], &[5, 6]).unwrap();
        assert_eq!(a, b);
    }
}
