//! Dense exact matrices, echelon-normalized subspaces and Lie closure.

use std::fmt;

use crate::exec::Execution;
use crate::poly::Poly;
use crate::scalar::Scalar;

pub type Vector = Vec<Scalar>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Scalar>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has the wrong length");
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix::new(r, c, rows.into_iter().flatten().collect())
    }

    /// Columns given as vectors.
    pub fn from_cols(cols: &[Vector]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for i in 0..r {
            for col in cols {
                data.push(col[i].clone());
            }
        }
        Matrix::new(r, c, data)
    }

    pub fn from_ints(rows: usize, cols: usize, entries: &[i64]) -> Self {
        Matrix::new(rows, cols, entries.iter().map(|&e| Scalar::int(e)).collect())
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix::new(rows, cols, vec![Scalar::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        Matrix::diag(&vec![Scalar::one(); n])
    }

    pub fn diag(d: &[Scalar]) -> Self {
        let n = d.len();
        let mut m = Matrix::zero(n, n);
        for (i, x) in d.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }

    /// Matrix unit E_{ij} (zero-based) of size n.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        m.set(i, j, Scalar::one());
        m
    }

    /// 4×4 matrix assembled from 2×2 blocks [[a, b], [c, d]].
    pub fn from_blocks(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix) -> Self {
        let mut m = Matrix::zero(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                m.set(i, j, a.get(i, j).clone());
                m.set(i, j + 2, b.get(i, j).clone());
                m.set(i + 2, j, c.get(i, j).clone());
                m.set(i + 2, j + 2, d.get(i, j).clone());
            }
        }
        m
    }

    /// The 2×2 block at block position (bi, bj) of a 4×4 matrix.
    pub fn block(&self, bi: usize, bj: usize) -> Matrix {
        let mut m = Matrix::zero(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                m.set(i, j, self.get(2 * bi + i, 2 * bj + j).clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vector {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    /// Row-major flattening to a vector of length rows·cols.
    pub fn flatten(&self) -> Vector {
        self.data.clone()
    }

    pub fn unflatten(n: usize, v: &[Scalar]) -> Self {
        Matrix::new(n, n, v.to_vec())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::new(self.rows, self.cols, self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::new(self.rows, self.cols, self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix::new(self.rows, self.cols, self.data.iter().map(|a| a * c).collect())
    }

    pub fn neg(&self) -> Matrix {
        self.scale(&Scalar::int(-1))
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Scalar::zero();
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        acc = acc + a * b;
                    }
                }
                out.push(acc);
            }
        }
        Matrix::new(self.rows, other.cols, out)
    }

    pub fn apply(&self, v: &[Scalar]) -> Vector {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .filter(|&k| !self.get(i, k).is_zero() && !v[k].is_zero())
                    .map(|k| self.get(i, k) * &v[k])
                    .sum()
            })
            .collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut m = Matrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn trace(&self) -> Scalar {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn pow(&self, e: u32) -> Matrix {
        (0..e).fold(Matrix::identity(self.rows), |acc, _| acc.mul(self))
    }

    /// `Some(λ)` when the matrix equals λ·I.
    pub fn scalar_value(&self) -> Option<Scalar> {
        if !self.is_square() {
            return None;
        }
        let lam = self.get(0, 0).clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let want = if i == j { &lam } else { &Scalar::zero() };
                if self.get(i, j) != want {
                    return None;
                }
            }
        }
        Some(lam)
    }

    pub fn det(&self) -> Scalar {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Scalar::one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !a.get(r, col).is_zero()) else {
                return Scalar::zero();
            };
            if piv != col {
                a.swap_rows(piv, col);
                det = -det;
            }
            let pv = a.get(col, col).clone();
            det = det * &pv;
            let inv = pv.inv().unwrap();
            for r in col + 1..n {
                let f = a.get(r, col) * &inv;
                if f.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = a.get(r, c) - &(&f * a.get(col, c));
                    a.set(r, c, v);
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Gauss–Jordan inverse; `None` for singular input.
    pub fn inverse(&self) -> Option<Matrix> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let piv = (col..n).find(|&r| !a.get(r, col).is_zero())?;
            a.swap_rows(piv, col);
            inv.swap_rows(piv, col);
            let pinv = a.get(col, col).inv().unwrap();
            for c in 0..n {
                a.set(col, c, a.get(col, c) * &pinv);
                inv.set(col, c, inv.get(col, c) * &pinv);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.get(r, col).clone();
                if f.is_zero() {
                    continue;
                }
                for c in 0..n {
                    a.set(r, c, a.get(r, c) - &(&f * a.get(col, c)));
                    inv.set(r, c, inv.get(r, c) - &(&f * inv.get(col, c)));
                }
            }
        }
        Some(inv)
    }

    /// φ ↦ Q⁻¹ φ Q.
    pub fn conjugate_by(&self, q: &Matrix) -> Option<Matrix> {
        Some(q.inverse()?.mul(self).mul(q))
    }

    pub fn rank(&self) -> usize {
        SubspaceBasis::span(self.cols, &(0..self.rows).map(|i| self.row(i)).collect::<Vec<_>>()).dim()
    }

    /// Basis of {v : Mv = 0}.
    pub fn kernel(&self) -> SubspaceBasis {
        let rows: Vec<Vector> = (0..self.rows).map(|i| self.row(i)).collect();
        let ech = SubspaceBasis::span(self.cols, &rows);
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|c| !ech.pivots.contains(c)) {
            let mut v = vec![Scalar::zero(); self.cols];
            v[free] = Scalar::one();
            for (row, &piv) in ech.vectors.iter().zip(&ech.pivots) {
                v[piv] = -&row[free];
            }
            out.push(v);
        }
        SubspaceBasis::span(self.cols, &out)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|s| s.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// A subspace of K^n stored in reduced row-echelon form, so equal
/// subspaces have identical representations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceBasis {
    ambient: usize,
    vectors: Vec<Vector>,
    pivots: Vec<usize>,
}

impl SubspaceBasis {
    pub fn empty(ambient: usize) -> Self {
        SubspaceBasis { ambient, vectors: Vec::new(), pivots: Vec::new() }
    }

    pub fn span(ambient: usize, vectors: &[Vector]) -> Self {
        let mut s = SubspaceBasis::empty(ambient);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    pub fn full(ambient: usize) -> Self {
        let id = Matrix::identity(ambient);
        SubspaceBasis::span(ambient, &(0..ambient).map(|i| id.row(i)).collect::<Vec<_>>())
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Residual of `v` after eliminating every pivot coordinate.
    pub fn reduce(&self, v: &[Scalar]) -> Vector {
        assert_eq!(v.len(), self.ambient, "vector length differs from ambient dimension");
        let mut r = v.to_vec();
        for (row, &piv) in self.vectors.iter().zip(&self.pivots) {
            if r[piv].is_zero() {
                continue;
            }
            let f = r[piv].clone();
            for (x, y) in r.iter_mut().zip(row).skip(piv) {
                if !y.is_zero() {
                    *x = &*x - &(&f * y);
                }
            }
        }
        r
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.reduce(v).iter().all(Scalar::is_zero)
    }

    /// Coordinates with respect to the echelon basis, if `v` lies in the span.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vector> {
        self.contains(v).then(|| self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    /// Adds `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: &[Scalar]) -> bool {
        let mut r = self.reduce(v);
        let Some(piv) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[piv].inv().unwrap();
        for x in r.iter_mut().skip(piv) {
            *x = &*x * &inv;
        }
        for row in self.vectors.iter_mut() {
            if row[piv].is_zero() {
                continue;
            }
            let f = row[piv].clone();
            for (x, y) in row.iter_mut().zip(&r).skip(piv) {
                if !y.is_zero() {
                    *x = &*x - &(&f * y);
                }
            }
        }
        let at = self.pivots.iter().position(|&p| p > piv).unwrap_or(self.pivots.len());
        self.pivots.insert(at, piv);
        self.vectors.insert(at, r);
        true
    }

    pub fn join(&self, other: &SubspaceBasis) -> SubspaceBasis {
        let mut s = self.clone();
        for v in &other.vectors {
            s.insert(v);
        }
        s
    }

    pub fn intersection_dim(&self, other: &SubspaceBasis) -> usize {
        self.dim() + other.dim() - self.join(other).dim()
    }

    pub fn contains_subspace(&self, other: &SubspaceBasis) -> bool {
        other.vectors.iter().all(|v| self.contains(v))
    }

    /// Image under a linear map.
    pub fn image(&self, m: &Matrix) -> SubspaceBasis {
        SubspaceBasis::span(m.rows(), &self.vectors.iter().map(|v| m.apply(v)).collect::<Vec<_>>())
    }
}

pub fn row_reduce(ambient: usize, vectors: &[Vector]) -> SubspaceBasis {
    SubspaceBasis::span(ambient, vectors)
}

pub fn rank(ambient: usize, vectors: &[Vector]) -> usize {
    SubspaceBasis::span(ambient, vectors).dim()
}

/// Characteristic polynomial det(X·I − M) by the Faddeev–LeVerrier recursion.
pub fn char_poly(m: &Matrix) -> Poly {
    assert!(m.is_square());
    let n = m.rows();
    let mut coeffs = vec![Scalar::zero(); n + 1];
    coeffs[n] = Scalar::one();
    let mut mk = Matrix::zero(n, n);
    for k in 1..=n {
        mk = m.mul(&mk).add(&Matrix::identity(n).scale(&coeffs[n - k + 1]));
        let t = m.mul(&mk).trace();
        coeffs[n - k] = -(t / Scalar::int(k as i64));
    }
    Poly::new(coeffs)
}

pub fn bracket(a: &Matrix, b: &Matrix) -> Matrix {
    a.mul(b).sub(&b.mul(a))
}

/// A matrix Lie algebra with an echelon-normalized basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebraBasis {
    n: usize,
    span: SubspaceBasis,
}

impl LieAlgebraBasis {
    pub fn zero(n: usize) -> Self {
        LieAlgebraBasis { n, span: SubspaceBasis::empty(n * n) }
    }

    /// Linear span of matrices (no closure taken).
    pub fn linear_span(n: usize, mats: &[Matrix]) -> Self {
        LieAlgebraBasis { n, span: SubspaceBasis::span(n * n, &mats.iter().map(Matrix::flatten).collect::<Vec<_>>()) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.span.dim()
    }

    pub fn basis(&self) -> Vec<Matrix> {
        self.span.vectors().iter().map(|v| Matrix::unflatten(self.n, v)).collect()
    }

    pub fn span(&self) -> &SubspaceBasis {
        &self.span
    }

    pub fn contains(&self, m: &Matrix) -> bool {
        self.span.contains(&m.flatten())
    }

    pub fn is_closed(&self) -> bool {
        let b = self.basis();
        b.iter().enumerate().all(|(i, x)| b[i + 1..].iter().all(|y| self.contains(&bracket(x, y))))
    }

    pub fn is_abelian(&self) -> bool {
        let b = self.basis();
        b.iter().enumerate().all(|(i, x)| b[i + 1..].iter().all(|y| bracket(x, y).is_zero()))
    }
}

/// Smallest bracket-closed subspace containing the generators.
pub fn lie_closure(generators: &[Matrix]) -> LieAlgebraBasis {
    lie_closure_with(generators, Execution::default())
}

/// Semi-naive saturation: each round brackets the newly added elements
/// against everything found so far, then merges into the echelon span.
pub fn lie_closure_with(generators: &[Matrix], exec: Execution) -> LieAlgebraBasis {
    let Some(first) = generators.first() else {
        return LieAlgebraBasis::zero(0);
    };
    let n = first.rows();
    let mut span = SubspaceBasis::empty(n * n);
    let mut elems: Vec<Matrix> = Vec::new();
    for g in generators {
        if span.insert(&g.flatten()) {
            elems.push(g.clone());
        }
    }
    let mut frontier_start = 0;
    while frontier_start < elems.len() {
        let pairs: Vec<(usize, usize)> = (frontier_start..elems.len())
            .flat_map(|i| (0..i).map(move |j| (i, j)))
            .collect();
        let products = exec.map(&pairs, |&(i, j)| bracket(&elems[i], &elems[j]));
        let next = elems.len();
        for b in products {
            if span.insert(&b.flatten()) {
                elems.push(b);
            }
        }
        frontier_start = next;
    }
    LieAlgebraBasis { n, span }
}

/// [L, L].
pub fn derived_algebra(l: &LieAlgebraBasis) -> LieAlgebraBasis {
    let b = l.basis();
    let mut mats = Vec::new();
    for i in 0..b.len() {
        for j in i + 1..b.len() {
            mats.push(bracket(&b[i], &b[j]));
        }
    }
    LieAlgebraBasis::linear_span(l.n(), &mats)
}

/// Whether the derived series reaches zero, with the number of steps taken
/// (until zero, or until it stabilises for non-solvable algebras).
pub fn is_solvable(l: &LieAlgebraBasis) -> (bool, usize) {
    let mut cur = l.clone();
    let mut steps = 0;
    while cur.dim() > 0 {
        let next = derived_algebra(&cur);
        steps += 1;
        if next.dim() == cur.dim() {
            return (false, steps);
        }
        cur = next;
    }
    (true, steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, i: usize, j: usize) -> Matrix {
        Matrix::unit(n, i, j)
    }

    #[test]
    fn char_poly_examples() {
        let id = Matrix::identity(4);
        assert_eq!(char_poly(&id), Poly::from_ints(&[-1, 1]).pow(4));
        let comp = Matrix::from_ints(4, 4, &[0, 0, 0, -49, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0]);
        assert_eq!(char_poly(&comp), Poly::from_ints(&[49, 0, 0, 0, 1]));
    }

    #[test]
    fn row_reduce_examples() {
        let v = |xs: &[i64]| xs.iter().map(|&x| Scalar::int(x)).collect::<Vector>();
        let s = row_reduce(4, &[v(&[1, 0, 0, 0]), v(&[2, 0, 0, 0])]);
        assert_eq!(s.dim(), 1);
        assert_eq!(s.vectors()[0], v(&[1, 0, 0, 0]));
        let s = row_reduce(4, &[v(&[1, 1, 0, 0]), v(&[0, 1, 0, 0])]);
        assert_eq!(s.vectors(), &[v(&[1, 0, 0, 0]), v(&[0, 1, 0, 0])]);
        assert_eq!(Matrix::zero(4, 4).kernel().dim(), 4);
        assert_eq!(Matrix::zero(4, 4).rank(), 0);
    }

    #[test]
    fn kernel_is_annihilated() {
        let m = Matrix::from_ints(3, 4, &[1, 2, 3, 4, 2, 4, 6, 8, 0, 1, 1, 0]);
        let k = m.kernel();
        assert_eq!(k.dim(), 2);
        for v in k.vectors() {
            assert!(m.apply(v).iter().all(Scalar::is_zero));
        }
    }

    #[test]
    fn inverse_and_det() {
        let m = Matrix::from_ints(3, 3, &[2, 1, 0, 1, 3, 1, 0, 1, 4]);
        assert_eq!(m.det(), Scalar::int(18));
        assert_eq!(m.mul(&m.inverse().unwrap()), Matrix::identity(3));
        assert!(Matrix::from_ints(2, 2, &[1, 2, 2, 4]).inverse().is_none());
    }

    #[test]
    fn bracket_examples() {
        let d = Matrix::diag(&[1, 1, 0, 0].map(Scalar::int));
        let d2 = Matrix::diag(&[3, -1, 5, 2].map(Scalar::int));
        assert!(bracket(&d, &d2).is_zero());
        assert_eq!(bracket(&e(2, 0, 1), &e(2, 1, 0)), Matrix::diag(&[1, -1].map(Scalar::int)));
    }

    #[test]
    fn closure_examples() {
        assert_eq!(lie_closure(&[Matrix::zero(2, 2)]).dim(), 0);
        assert_eq!(lie_closure(&[e(2, 0, 1), e(2, 1, 0)]).dim(), 3);
        let a = Matrix::diag(&[1, 1, 0, 0].map(Scalar::int));
        let b = Matrix::diag(&[0, 0, 1, 1].map(Scalar::int));
        assert_eq!(lie_closure(&[a, b]).dim(), 2);
    }

    #[test]
    fn closure_strategies_agree() {
        let gens = [e(4, 0, 1), e(4, 1, 2), e(4, 2, 3), e(4, 3, 0)];
        let a = lie_closure_with(&gens, Execution::Sequential);
        let b = lie_closure_with(&gens, Execution::Parallel);
        assert_eq!(a, b);
        assert!(a.is_closed());
    }

    #[test]
    fn solvability_examples() {
        let diag = lie_closure(&[Matrix::diag(&[1, 0].map(Scalar::int)), Matrix::diag(&[0, 1].map(Scalar::int))]);
        assert_eq!(is_solvable(&diag), (true, 1));
        let sl2 = lie_closure(&[e(2, 0, 1), e(2, 1, 0)]);
        assert!(!is_solvable(&sl2).0);
        let upper = LieAlgebraBasis::linear_span(2, &[e(2, 0, 0), e(2, 0, 1), e(2, 1, 1)]);
        assert_eq!(is_solvable(&upper), (true, 2));
    }

    #[test]
    fn liegene_first_identity() {
        let k = |xs: [i64; 4]| Matrix::from_ints(2, 2, &xs);
        let (a, b, c, d) = (k([1, 2, 3, 4]), k([0, 1, 5, 2]), k([2, 0, 1, 1]), k([3, 3, 0, 1]));
        let z = Matrix::zero(2, 2);
        let proj = Matrix::from_blocks(&Matrix::identity(2), &z, &z, &z);
        let x = Matrix::from_blocks(&a, &b, &c, &d);
        assert_eq!(bracket(&proj, &x), Matrix::from_blocks(&z, &b, &c.neg(), &z));
    }
}
