//! Dense matrices over a [`Field`].

use crate::field::Field;
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Copy + Eq> Matrix<E> {
    pub fn zeros<F: Field<Elem = E>>(f: &F, rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![f.zero(); rows * cols] }
    }

    pub fn identity<F: Field<Elem = E>>(f: &F, n: usize) -> Self {
        let mut m = Self::zeros(f, n, n);
        for i in 0..n {
            m.set(i, i, f.one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<E>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> E {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: E) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero<F: Field<Elem = E>>(&self, f: &F) -> bool {
        self.data.iter().all(|&x| f.is_zero(x))
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let data = rows
            .iter()
            .flat_map(|&i| cols.iter().map(move |&j| self.get(i, j)))
            .collect();
        Matrix { rows: rows.len(), cols: cols.len(), data }
    }

    pub fn mul<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !f.is_zero(b) {
                        let idx = i * out.cols + j;
                        out.data[idx] = f.add(out.data[idx], f.mul(a, b));
                    }
                }
            }
        }
        out
    }

    pub fn add<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale<F: Field<Elem = E>>(&self, f: &F, s: E) -> Self {
        let data = self.data.iter().map(|&a| f.mul(a, s)).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn rank<F: Field<Elem = E>>(&self, f: &F) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for c in 0..m.cols {
            let Some(p) = (rank..m.rows).find(|&r| !f.is_zero(m.get(r, c))) else {
                continue;
            };
            for j in 0..m.cols {
                m.data.swap(p * m.cols + j, rank * m.cols + j);
            }
            let inv = f.inv(m.get(rank, c)).unwrap();
            for r in rank + 1..m.rows {
                let u = f.mul(m.get(r, c), inv);
                if f.is_zero(u) {
                    continue;
                }
                for j in c..m.cols {
                    let v = f.sub(m.get(r, j), f.mul(u, m.get(rank, j)));
                    m.set(r, j, v);
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        rank
    }

    /// `det(x I - self)`, via reduction to Hessenberg form.
    pub fn charpoly<F: Field<Elem = E>>(&self, f: &F) -> Poly<E> {
        assert_eq!(self.rows, self.cols, "charpoly of a non-square matrix");
        let n = self.rows;
        let mut h = self.clone();
        for m in 1..n {
            let Some(i) = (m..n).find(|&i| !f.is_zero(h.get(i, m - 1))) else {
                continue;
            };
            if i != m {
                for j in 0..n {
                    h.data.swap(i * n + j, m * n + j);
                }
                for r in 0..n {
                    h.data.swap(r * n + i, r * n + m);
                }
            }
            let t_inv = f.inv(h.get(m, m - 1)).unwrap();
            for j in m + 1..n {
                let u = f.mul(h.get(j, m - 1), t_inv);
                if f.is_zero(u) {
                    continue;
                }
                for c in 0..n {
                    let v = f.sub(h.get(j, c), f.mul(u, h.get(m, c)));
                    h.set(j, c, v);
                }
                for r in 0..n {
                    let v = f.add(h.get(r, m), f.mul(u, h.get(r, j)));
                    h.set(r, m, v);
                }
            }
        }
        // p_k is the characteristic polynomial of the leading k x k block
        let mut p: Vec<Poly<E>> = vec![Poly::one(f)];
        for m in 1..=n {
            let mut next = Poly::linear_root(f, h.get(m - 1, m - 1)).mul(f, &p[m - 1]);
            let mut prod = f.one();
            for i in 1..m {
                prod = f.mul(prod, h.get(m - i, m - i - 1));
                let c = f.mul(h.get(m - i - 1, m - 1), prod);
                if !f.is_zero(c) {
                    next = next.sub(f, &p[m - i - 1].scale(f, c));
                }
            }
            p.push(next);
        }
        p.pop().unwrap()
    }

    /// `poly(self)` by Horner's rule.
    pub fn eval_poly<F: Field<Elem = E>>(&self, f: &F, poly: &Poly<E>) -> Self {
        let n = self.rows;
        let mut acc = Self::zeros(f, n, n);
        for &c in poly.coeffs().iter().rev() {
            acc = acc.mul(f, self).add(f, &Self::identity(f, n).scale(f, c));
        }
        acc
    }
}
