//! Euclidean reference simplices realized from edge lengths.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model_space::ModelPoint;

/// Relative tolerance on Gram pivots, in units of `L²`.
pub const GRAM_TOLERANCE: f64 = 1e-12;

/// Symmetric matrix of pairwise lengths between `n + 1` vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeLengthMatrix {
    lengths: DMatrix<f64>,
}

impl EdgeLengthMatrix {
    pub fn new(lengths: DMatrix<f64>) -> Result<Self> {
        let k = lengths.nrows();
        if k < 2 || lengths.ncols() != k {
            return Err(Error::Domain(format!(
                "edge-length matrix must be square with at least 2 rows, got {}×{}",
                lengths.nrows(),
                lengths.ncols()
            )));
        }
        for i in 0..k {
            if lengths[(i, i)] != 0.0 {
                return Err(Error::Domain(format!("diagonal entry {i} is nonzero")));
            }
            for j in 0..i {
                let (a, b) = (lengths[(i, j)], lengths[(j, i)]);
                if a != b {
                    return Err(Error::Domain(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
                if !(a > 0.0 && a.is_finite()) {
                    return Err(Error::Domain(format!("edge ({i},{j}) has length {a}")));
                }
            }
        }
        Ok(Self { lengths })
    }

    /// Lengths from the upper triangle in row order: `d01, d02, …, d12, …`.
    pub fn from_upper(n: usize, upper: &[f64]) -> Result<Self> {
        let k = n + 1;
        if upper.len() != k * (k - 1) / 2 {
            return Err(Error::Domain(format!(
                "{} upper-triangle entries given, expected {}",
                upper.len(),
                k * (k - 1) / 2
            )));
        }
        let mut m = DMatrix::zeros(k, k);
        let mut it = upper.iter();
        for i in 0..k {
            for j in i + 1..k {
                let d = *it.next().unwrap();
                m[(i, j)] = d;
                m[(j, i)] = d;
            }
        }
        Self::new(m)
    }

    /// Geodesic distances between points of one model space.
    pub fn from_points(points: &[ModelPoint]) -> Result<Self> {
        let k = points.len();
        let mut m = DMatrix::zeros(k, k);
        for i in 0..k {
            for j in i + 1..k {
                let d = points[i].distance(&points[j])?;
                m[(i, j)] = d;
                m[(j, i)] = d;
            }
        }
        Self::new(m)
    }

    /// Simplex dimension `n`.
    pub fn n(&self) -> usize {
        self.lengths.nrows() - 1
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.lengths[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.lengths
    }

    pub fn max_length(&self) -> f64 {
        self.lengths.max()
    }
}

/// A nondegenerate simplex in `Eⁿ` with its size and quality measures.
#[derive(Debug, Clone, PartialEq)]
pub struct EuclideanSimplex {
    vertices: Vec<DVector<f64>>,
    edge_bound: f64,
    altitudes: Vec<f64>,
    thickness: f64,
    // Inverse of [v₀ … vₙ; 1 … 1].
    inverse: DMatrix<f64>,
}

impl EuclideanSimplex {
    pub fn from_vertices(vertices: Vec<DVector<f64>>) -> Result<Self> {
        let k = vertices.len();
        if k < 2 {
            return Err(Error::DegenerateSimplex);
        }
        let n = k - 1;
        if vertices.iter().any(|v| v.len() != n) {
            return Err(Error::Domain(format!("vertices of an {n}-simplex must lie in E^{n}")));
        }
        let mut edge_bound: f64 = 0.0;
        for i in 0..k {
            for j in i + 1..k {
                edge_bound = edge_bound.max((&vertices[i] - &vertices[j]).norm());
            }
        }
        let altitudes: Vec<f64> = (0..k).map(|i| altitude(&vertices, i)).collect();
        let min_altitude = altitudes.iter().copied().fold(f64::INFINITY, f64::min);
        if !(min_altitude > GRAM_TOLERANCE.sqrt() * edge_bound) {
            return Err(Error::DegenerateSimplex);
        }
        let mut system = DMatrix::from_element(k, k, 1.0);
        for (j, v) in vertices.iter().enumerate() {
            system.view_mut((0, j), (n, 1)).copy_from(v);
        }
        let inverse = system.try_inverse().ok_or(Error::DegenerateSimplex)?;
        let thickness = min_altitude / (n as f64 * edge_bound);
        Ok(Self { vertices, edge_bound, altitudes, thickness, inverse })
    }

    pub fn n(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[DVector<f64>] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &DVector<f64> {
        &self.vertices[i]
    }

    /// `L`, the longest edge.
    pub fn edge_bound(&self) -> f64 {
        self.edge_bound
    }

    /// Altitude from each vertex onto the opposite facet.
    pub fn altitudes(&self) -> &[f64] {
        &self.altitudes
    }

    /// `a`, the smallest altitude.
    pub fn min_altitude(&self) -> f64 {
        self.altitudes.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `t = a / (n L)`.
    pub fn thickness(&self) -> f64 {
        self.thickness
    }

    pub fn edge_lengths(&self) -> EdgeLengthMatrix {
        let k = self.vertices.len();
        let m = DMatrix::from_fn(k, k, |i, j| (&self.vertices[i] - &self.vertices[j]).norm());
        EdgeLengthMatrix::new(m).expect("a nondegenerate simplex has positive edges")
    }

    pub fn centroid(&self) -> DVector<f64> {
        let sum = self.vertices.iter().fold(DVector::zeros(self.n()), |acc, v| acc + v);
        sum / self.vertices.len() as f64
    }

    /// Affine barycentric coordinates; the last one is `1 − Σ others` so the
    /// sum is exactly 1.
    pub fn barycentric_coords(&self, u: &DVector<f64>) -> Result<DVector<f64>> {
        let n = self.n();
        if u.len() != n {
            return Err(Error::AmbientLength { expected: n, found: u.len() });
        }
        let mut rhs = DVector::from_element(n + 1, 1.0);
        rhs.rows_mut(0, n).copy_from(u);
        let mut lambda = &self.inverse * rhs;
        lambda[n] = 1.0 - lambda.rows(0, n).sum();
        Ok(lambda)
    }

    /// The point with barycentric coordinates `lambda`.
    pub fn point_at(&self, lambda: &[f64]) -> DVector<f64> {
        self.vertices.iter().zip(lambda).fold(DVector::zeros(self.n()), |acc, (v, l)| acc + v * *l)
    }

    /// Constant gradient of the barycentric coordinate function `λᵢ`.
    pub fn coordinate_gradient(&self, i: usize) -> DVector<f64> {
        self.inverse.row(i).columns(0, self.n()).transpose()
    }
}

// Distance from vertex `i` to the affine hull of the others, by least squares.
fn altitude(vertices: &[DVector<f64>], i: usize) -> f64 {
    let others: Vec<&DVector<f64>> = vertices.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| v).collect();
    let base = others[0];
    let offset = &vertices[i] - base;
    if others.len() == 1 {
        return offset.norm();
    }
    let n = base.len();
    let basis = DMatrix::from_fn(n, others.len() - 1, |r, c| others[c + 1][r] - base[r]);
    let coeffs = basis
        .clone()
        .svd(true, true)
        .solve(&offset, f64::EPSILON)
        .expect("SVD with both factors computed");
    (offset - basis * coeffs).norm()
}

/// Realizes `d` in `Eⁿ` with vertex 0 at the origin and vertex `i` in the
/// span of the first `i` axes, from the Cholesky factor of the Gram matrix
/// `Gᵢⱼ = ½(d₀ᵢ² + d₀ⱼ² − dᵢⱼ²)`. The result is positively oriented.
pub fn realize_from_edge_lengths(d: &EdgeLengthMatrix) -> Result<EuclideanSimplex> {
    let n = d.n();
    let scale = d.max_length();
    let gram = DMatrix::from_fn(n, n, |i, j| {
        let (a, b, c) = (d.get(0, i + 1), d.get(0, j + 1), d.get(i + 1, j + 1));
        0.5 * (a * a + b * b - c * c)
    });
    let mut factor = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let pivot = gram[(j, j)] - factor.row(j).columns(0, j).norm_squared();
        if !(pivot > GRAM_TOLERANCE * scale * scale) {
            return Err(Error::NotRealizable(format!(
                "Gram pivot {j} is {pivot:e}; the Cayley–Menger determinant is not positive"
            )));
        }
        let diag = pivot.sqrt();
        factor[(j, j)] = diag;
        for i in j + 1..n {
            let dot = factor.row(i).columns(0, j).dot(&factor.row(j).columns(0, j));
            factor[(i, j)] = (gram[(i, j)] - dot) / diag;
        }
    }
    let mut vertices = vec![DVector::zeros(n)];
    vertices.extend((0..n).map(|i| factor.row(i).transpose()));
    EuclideanSimplex::from_vertices(vertices).map_err(|e| match e {
        Error::DegenerateSimplex => Error::NotRealizable("simplex is numerically flat".into()),
        other => other,
    })
}

pub fn thickness(s: &EuclideanSimplex) -> f64 {
    s.thickness()
}

pub fn barycentric_coords_euclidean(s: &EuclideanSimplex, u: &DVector<f64>) -> Result<DVector<f64>> {
    s.barycentric_coords(u)
}

/// Sum of the negative coordinates, `λ₋ ≤ 0`.
pub fn lambda_minus(lambda: &[f64]) -> f64 {
    lambda.iter().filter(|l| **l < 0.0).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn triangle(a: f64, b: f64, c: f64) -> Result<EuclideanSimplex> {
        realize_from_edge_lengths(&EdgeLengthMatrix::from_upper(2, &[a, b, c])?)
    }

    #[test]
    fn equilateral_triangle() {
        let s = triangle(1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(s.min_altitude(), 3f64.sqrt() / 2.0, epsilon = 1e-15);
        assert_relative_eq!(thickness(&s), 3f64.sqrt() / 4.0, epsilon = 1e-15);
        assert_eq!(s.edge_bound(), 1.0);
    }

    #[test]
    fn collinear_lengths_are_not_realizable() {
        assert!(matches!(triangle(1.0, 1.0, 2.0), Err(Error::NotRealizable(_))));
        assert!(matches!(triangle(1.0, 1.0, 2.5), Err(Error::NotRealizable(_))));
    }

    #[test]
    fn right_triangle() {
        // d01 = 3, d02 = 4, d12 = 5: right angle at vertex 0.
        let s = triangle(3.0, 4.0, 5.0).unwrap();
        let alt = s.altitudes();
        assert_relative_eq!(alt[0], 2.4, epsilon = 1e-14);
        assert_relative_eq!(alt[1], 3.0, epsilon = 1e-14);
        assert_relative_eq!(alt[2], 4.0, epsilon = 1e-14);
        assert_relative_eq!(s.thickness(), 0.24, epsilon = 1e-15);
    }

    #[test]
    fn regular_tetrahedron() {
        let d = EdgeLengthMatrix::from_upper(3, &[1.0; 6]).unwrap();
        let s = realize_from_edge_lengths(&d).unwrap();
        // Direct construction: vertices (±1,±1,±1) with an even number of minus
        // signs have edge 2√2; the altitude is 4/√3, i.e. √(2/3) at unit edge.
        let corners = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
        let direct = EuclideanSimplex::from_vertices(corners.iter().map(|c| DVector::from_row_slice(c)).collect()).unwrap();
        assert_relative_eq!(direct.edge_bound(), 2.0 * 2f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(s.thickness(), direct.thickness(), epsilon = 1e-14);
        assert_relative_eq!(s.thickness(), (2.0f64 / 3.0).sqrt() / 3.0, epsilon = 1e-14);
        assert!((s.thickness() - 0.27217).abs() < 5e-6);
    }

    #[test]
    fn realization_reproduces_lengths() {
        let d = EdgeLengthMatrix::from_upper(3, &[1.0, 1.2, 0.9, 1.1, 1.3, 1.05]).unwrap();
        let s = realize_from_edge_lengths(&d).unwrap();
        let back = s.edge_lengths();
        for i in 0..4 {
            for j in 0..4 {
                let target = d.get(i, j);
                assert!((back.get(i, j) - target).abs() <= 1e-10 * target.max(1.0));
            }
        }
        assert_eq!(s.vertex(0).norm(), 0.0);
    }

    #[test]
    fn barycentric_examples() {
        let s = triangle(1.0, 1.0, 1.0).unwrap();
        for i in 0..3 {
            let l = s.barycentric_coords(s.vertex(i)).unwrap();
            for j in 0..3 {
                assert!((l[j] - if i == j { 1.0 } else { 0.0 }).abs() < 1e-15);
            }
        }
        let l = s.barycentric_coords(&s.centroid()).unwrap();
        for j in 0..3 {
            assert_relative_eq!(l[j], 1.0 / 3.0, epsilon = 1e-15);
        }
        assert_eq!(l.sum(), 1.0);

        let segment = EuclideanSimplex::from_vertices(vec![DVector::from_element(1, 0.0), DVector::from_element(1, 1.0)]).unwrap();
        let l = segment.barycentric_coords(&DVector::from_element(1, -0.5)).unwrap();
        assert_eq!(l.as_slice(), &[1.5, -0.5]);
        assert_eq!(lambda_minus(l.as_slice()), -0.5);
        assert_eq!(lambda_minus(&[0.2, 0.3, 0.5]), 0.0);
    }

    #[test]
    fn gradient_norms_are_inverse_altitudes() {
        let s = triangle(3.0, 4.0, 5.0).unwrap();
        for i in 0..3 {
            assert_relative_eq!(s.coordinate_gradient(i).norm(), 1.0 / s.altitudes()[i], epsilon = 1e-14);
        }
    }

    #[test]
    fn matrix_validation() {
        assert!(EdgeLengthMatrix::new(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 2.0, 0.0])).is_err());
        assert!(EdgeLengthMatrix::new(DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 0.0])).is_err());
        assert!(EdgeLengthMatrix::from_upper(2, &[1.0, 1.0]).is_err());
    }
}
