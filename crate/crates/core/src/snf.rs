//! Smith normal form over `ℤ` with transformation matrices.

use num::{BigInt, Integer, One, Signed, Zero};

/// Dense integer matrix, row-major.
pub type IntMatrix = Vec<Vec<BigInt>>;

/// `U · M · V = D` with `U`, `V` unimodular and `D` diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    /// `d₁ | d₂ | …`, non-negative, length `min(rows, cols)`.
    pub diagonal: Vec<BigInt>,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    /// `D` as a full `rows × cols` matrix.
    pub fn d_matrix(&self) -> IntMatrix {
        let rows = self.u.len();
        let cols = self.v.len();
        let mut d = vec![vec![BigInt::zero(); cols]; rows];
        for (k, x) in self.diagonal.iter().enumerate() {
            d[k][k] = x.clone();
        }
        d
    }

    /// Entries of `D` greater than one.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.diagonal.iter().filter(|d| !d.is_one() && !d.is_zero()).cloned().collect()
    }

    /// Number of zero entries of `D`.
    pub fn zero_count(&self) -> usize {
        self.diagonal.iter().filter(|d| d.is_zero()).count()
    }
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| BigInt::from(u8::from(i == j))).collect()).collect()
}

pub fn from_i64(m: &[Vec<i64>]) -> IntMatrix {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn matmul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(b).fold(BigInt::zero(), |s, (x, brow)| s + x * &brow[j]))
                .collect()
        })
        .collect()
}

pub fn transpose(m: &IntMatrix) -> IntMatrix {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant(m: &IntMatrix) -> BigInt {
    let n = m.len();
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        return BigInt::one();
    }
    sign * &a[n - 1][n - 1]
}

fn row_axpy(m: &mut IntMatrix, target: usize, source: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let src = m[source].clone();
    for (t, s) in m[target].iter_mut().zip(&src) {
        *t -= q * s;
    }
}

fn col_axpy(m: &mut IntMatrix, target: usize, source: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for row in m.iter_mut() {
        let s = row[source].clone();
        row[target] -= q * s;
    }
}

fn swap_cols(m: &mut IntMatrix, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// Smith normal form, pivoting on the entry of least absolute value.
pub fn smith_normal_form(m: &IntMatrix) -> SmithDecomposition {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut a = m.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let n = rows.min(cols);
    for t in 0..n {
        loop {
            // least nonzero |a_ij| in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            a.swap(t, pi);
            u.swap(t, pi);
            swap_cols(&mut a, t, pj);
            swap_cols(&mut v, t, pj);

            let mut clean = true;
            for i in t + 1..rows {
                let q = a[i][t].div_floor(&a[t][t]);
                row_axpy(&mut a, i, t, &q);
                row_axpy(&mut u, i, t, &q);
                clean &= a[i][t].is_zero();
            }
            for j in t + 1..cols {
                let q = a[t][j].div_floor(&a[t][t]);
                col_axpy(&mut a, j, t, &q);
                col_axpy(&mut v, j, t, &q);
                clean &= a[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            // enforce d_t | every trailing entry
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
            match bad {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    row_axpy(&mut a, t, i, &minus_one);
                    row_axpy(&mut u, t, i, &minus_one);
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
    }
    let diagonal = (0..n).map(|k| a[k][k].clone()).collect();
    SmithDecomposition { diagonal, u, v }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// `d₁ ⋯ d_k` equals the gcd of the `k × k` minors.
    fn minor_gcd(m: &IntMatrix, k: usize) -> BigInt {
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            if n < k {
                return vec![];
            }
            let mut out = subsets(n - 1, k);
            for mut s in subsets(n - 1, k - 1) {
                s.push(n - 1);
                out.push(s);
            }
            out
        }
        let mut g = BigInt::zero();
        for r in subsets(m.len(), k) {
            for c in subsets(m[0].len(), k) {
                let sub: IntMatrix = r.iter().map(|&i| c.iter().map(|&j| m[i][j].clone()).collect()).collect();
                g = g.gcd(&determinant(&sub));
            }
        }
        g
    }

    #[test]
    fn identity_is_fixed() {
        let s = smith_normal_form(&identity(3));
        assert_eq!(s.diagonal, vec![BigInt::one(); 3]);
    }

    #[test]
    fn diag_two_three() {
        let s = smith_normal_form(&from_i64(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(s.diagonal, vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn minors_oracle_on_examples() {
        let m = from_i64(&[vec![4, 6, 2], vec![2, 8, -4], vec![6, 2, 10]]);
        let s = smith_normal_form(&m);
        let mut prod = BigInt::one();
        for k in 1..=3 {
            prod *= &s.diagonal[k - 1];
            assert_eq!(prod, minor_gcd(&m, k));
        }
    }

    #[test]
    fn rectangular_and_zero() {
        let s = smith_normal_form(&from_i64(&[vec![0, 0, 0], vec![0, 0, 0]]));
        assert_eq!(s.diagonal, vec![BigInt::zero(), BigInt::zero()]);
        let m = from_i64(&[vec![2, 4, 4], vec![-6, 6, 12]]);
        let s = smith_normal_form(&m);
        assert_eq!(s.diagonal, vec![BigInt::from(2), BigInt::from(6)]);
        assert_eq!(matmul(&matmul(&s.u, &m), &s.v), s.d_matrix());
    }

    proptest! {
        #[test]
        fn decomposition_is_valid(
            rows in 1usize..6,
            cols in 1usize..6,
            entries in prop::collection::vec(-5i64..=5, 36),
        ) {
            let m: IntMatrix = (0..rows).map(|i| (0..cols).map(|j| BigInt::from(entries[i * 6 + j])).collect()).collect();
            let s = smith_normal_form(&m);
            prop_assert_eq!(matmul(&matmul(&s.u, &m), &s.v), s.d_matrix());
            prop_assert!(determinant(&s.u).abs().is_one());
            prop_assert!(determinant(&s.v).abs().is_one());
            for w in s.diagonal.windows(2) {
                prop_assert!(!w[0].is_negative());
                prop_assert!(w[1].is_multiple_of(&w[0]) || w[0].is_zero() && w[1].is_zero());
            }
            let mut prod = BigInt::one();
            for k in 1..=rows.min(cols).min(3) {
                prod *= &s.diagonal[k - 1];
                prop_assert_eq!(&prod, &minor_gcd(&m, k));
            }
            prop_assert_eq!(smith_normal_form(&transpose(&m)).diagonal, s.diagonal);
        }
    }
}
