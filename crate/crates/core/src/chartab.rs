//! Exact character tables (modular Dixon method) and the twisted inner
//! products `⟨χ_k, χ_l^x⟩_{H(x)}`.

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::cyclotomic::CyclotomicNumber;
use crate::error::{Error, Result};
use crate::group::{coset_stabilizer, ConjugacyClasses, FiniteGroup, SubgroupEmbedding};

/// Irreducible characters of a finite group on its conjugacy classes.
///
/// Rows are sorted by degree, then by descending value vector, so the
/// trivial character is always row 0.
#[derive(Clone, Debug, PartialEq)]
pub struct CharacterTable {
    classes: ConjugacyClasses,
    chars: Vec<Vec<CyclotomicNumber>>,
    degrees: Vec<usize>,
    conductor: usize,
    group_order: usize,
}

impl CharacterTable {
    /// Computes the table of `g` exactly.
    pub fn compute(g: &FiniteGroup) -> Result<Self> {
        let classes = ConjugacyClasses::compute(g);
        let rows = dixon::irreducible_characters(g, &classes)?;
        Self::assemble(g, classes, rows)
    }

    /// Accepts a caller-supplied table whose columns follow the class order
    /// of [`ConjugacyClasses::compute`]. Both orthogonality relations must
    /// hold exactly.
    pub fn from_rows(g: &FiniteGroup, rows: Vec<Vec<CyclotomicNumber>>) -> Result<Self> {
        let classes = ConjugacyClasses::compute(g);
        if rows.len() != classes.len() {
            return Err(Error::CharacterTable(format!(
                "{} rows supplied but the group has {} classes",
                rows.len(),
                classes.len()
            )));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != classes.len()) {
            return Err(Error::CharacterTable(format!("row of length {} for {} classes", bad.len(), classes.len())));
        }
        Self::assemble(g, classes, rows)
    }

    fn assemble(g: &FiniteGroup, classes: ConjugacyClasses, rows: Vec<Vec<CyclotomicNumber>>) -> Result<Self> {
        let conductor = rows.iter().flatten().map(CyclotomicNumber::conductor).fold(1, num::integer::lcm);
        let mut rows: Vec<Vec<CyclotomicNumber>> =
            rows.into_iter().map(|r| r.into_iter().map(|v| v.promote(conductor)).collect()).collect();
        let mut degrees = Vec::with_capacity(rows.len());
        for row in &rows {
            let d = row[0]
                .to_integer()
                .filter(|d| d.is_positive())
                .and_then(|d| usize::try_from(d).ok())
                .ok_or_else(|| Error::CharacterTable(format!("χ(e) = {} is not a positive integer", row[0])))?;
            degrees.push(d);
        }
        let mut order: Vec<usize> = (0..rows.len()).collect();
        order.sort_by(|&a, &b| degrees[a].cmp(&degrees[b]).then_with(|| rows[b].cmp(&rows[a])));
        let mut sorted_rows = Vec::with_capacity(rows.len());
        for &k in &order {
            sorted_rows.push(std::mem::take(&mut rows[k]));
        }
        let degrees = order.iter().map(|&k| degrees[k]).collect();
        let table = Self { classes, chars: sorted_rows, degrees, conductor, group_order: g.order() };
        table.verify()?;
        Ok(table)
    }

    /// Both orthogonality relations, checked exactly.
    pub fn verify(&self) -> Result<()> {
        match self.integer_terms() {
            Some(terms) => self.verify_integral(&terms)?,
            None => self.verify_rational()?,
        }
        if self.degrees.iter().map(|d| d * d).sum::<usize>() != self.group_order {
            return Err(Error::CharacterTable("sum of squared degrees differs from the group order".into()));
        }
        Ok(())
    }

    fn integer_terms(&self) -> Option<Vec<Vec<Vec<(usize, i128)>>>> {
        self.chars.iter().map(|row| row.iter().map(CyclotomicNumber::integer_terms).collect()).collect()
    }

    /// Orthogonality on integer coefficient vectors, reduced once per sum.
    fn verify_integral(&self, terms: &[Vec<Vec<(usize, i128)>>]) -> Result<()> {
        let r = terms.len();
        let m = self.conductor;
        let sizes = self.classes.sizes();
        let n = self.group_order as i128;
        let sum_is = |pairs: &mut dyn Iterator<Item = (i128, &[(usize, i128)], &[(usize, i128)])>, expected: i128| {
            let mut counts = vec![0i128; m];
            for (weight, a, b) in pairs {
                for &(i, x) in a {
                    for &(j, y) in b {
                        counts[(i + m - j) % m] += weight * x * y;
                    }
                }
            }
            let coeffs = CyclotomicNumber::reduce_integer_counts(m, &counts);
            coeffs[0] == expected && coeffs[1..].iter().all(|&c| c == 0)
        };
        for k in 0..r {
            for l in 0..r {
                let mut pairs = (0..r).map(|c| (sizes[c] as i128, &terms[k][c][..], &terms[l][c][..]));
                if !sum_is(&mut pairs, if k == l { n } else { 0 }) {
                    return Err(Error::CharacterTable(format!("rows {k} and {l} violate row orthogonality")));
                }
            }
        }
        for c in 0..r {
            for d in 0..r {
                let expected = if c == d {
                    if self.group_order % sizes[c] != 0 {
                        return Err(Error::CharacterTable(format!("class {c} size does not divide the order")));
                    }
                    n / sizes[c] as i128
                } else {
                    0
                };
                let mut pairs = terms.iter().map(|row| (1, &row[c][..], &row[d][..]));
                if !sum_is(&mut pairs, expected) {
                    return Err(Error::CharacterTable(format!("columns {c} and {d} violate column orthogonality")));
                }
            }
        }
        Ok(())
    }

    fn verify_rational(&self) -> Result<()> {
        let r = self.chars.len();
        let sizes = self.classes.sizes();
        let n = BigRational::from_integer(BigInt::from(self.group_order));
        for k in 0..r {
            for l in 0..r {
                let mut s = CyclotomicNumber::zero(self.conductor);
                for (c, &size) in sizes.iter().enumerate() {
                    let term = &self.chars[k][c] * &self.chars[l][c].conj();
                    s = &s + &term.scale(&BigRational::from_integer(size.into()));
                }
                let expected = if k == l { n.clone() } else { BigRational::zero() };
                if s.to_rational() != Some(expected) {
                    return Err(Error::CharacterTable(format!("rows {k} and {l} violate row orthogonality")));
                }
            }
        }
        for c in 0..r {
            for d in 0..r {
                let mut s = CyclotomicNumber::zero(self.conductor);
                for row in &self.chars {
                    s = &s + &(&row[c] * &row[d].conj());
                }
                let expected = if c == d {
                    BigRational::new(n.to_integer(), BigInt::from(sizes[c]))
                } else {
                    BigRational::zero()
                };
                if s.to_rational() != Some(expected) {
                    return Err(Error::CharacterTable(format!("columns {c} and {d} violate column orthogonality")));
                }
            }
        }
        Ok(())
    }

    pub fn classes(&self) -> &ConjugacyClasses {
        &self.classes
    }

    /// Number of irreducible characters.
    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn conductor(&self) -> usize {
        self.conductor
    }

    pub fn row(&self, k: usize) -> &[CyclotomicNumber] {
        &self.chars[k]
    }

    pub fn rows(&self) -> &[Vec<CyclotomicNumber>] {
        &self.chars
    }

    /// `χ_k(h)` for an element index of the group.
    pub fn value(&self, k: usize, h: usize) -> &CyclotomicNumber {
        &self.chars[k][self.classes.class_of(h)]
    }
}

/// `h ↦ χ_l(x⁻¹ h x)` on `stabilizer ⊆ H`, where `x ∈ G` and `H ↪ G`.
pub fn twisted_character(
    table: &CharacterTable,
    l: usize,
    g: &FiniteGroup,
    emb: &SubgroupEmbedding,
    x: usize,
    stabilizer: &[usize],
) -> Result<Vec<CyclotomicNumber>> {
    stabilizer
        .iter()
        .map(|&h| {
            let y = g.conjugate(emb.image(h), x);
            let back = emb.preimage(y).ok_or_else(|| {
                Error::CharacterTable(format!("{}⁻¹·h·{} leaves the subgroup; stabilizer is wrong", g.label(x), g.label(x)))
            })?;
            Ok(table.value(l, back).clone())
        })
        .collect()
}

/// `⟨χ_k, χ_l^x⟩_{H(x)} = |H(x)|⁻¹ Σ_{h ∈ H(x)} conj(χ_k(h)) χ_l(x⁻¹hx)`,
/// which must be an exact non-negative integer.
pub fn twisted_inner_product(
    table: &CharacterTable,
    k: usize,
    l: usize,
    g: &FiniteGroup,
    emb: &SubgroupEmbedding,
    x: usize,
) -> Result<u64> {
    let stabilizer = coset_stabilizer(g, emb, x);
    let twisted = twisted_character(table, l, g, emb, x, &stabilizer)?;
    let mut sum = CyclotomicNumber::zero(table.conductor());
    for (&h, tw) in stabilizer.iter().zip(&twisted) {
        sum = &sum + &(&table.value(k, h).conj() * tw);
    }
    let value = sum.scale(&BigRational::new(BigInt::one(), BigInt::from(stabilizer.len())));
    value
        .to_integer()
        .filter(|v| !v.is_negative())
        .and_then(|v| u64::try_from(v).ok())
        .ok_or_else(|| Error::NonIntegral(value.to_string()))
}

pub fn character_table(g: &FiniteGroup) -> Result<CharacterTable> {
    CharacterTable::compute(g)
}

/// Modular computation of the irreducible characters.
mod dixon {
    use super::*;

    type Vector = Vec<u64>;

    struct Field {
        p: u64,
    }

    impl Field {
        fn add(&self, a: u64, b: u64) -> u64 {
            (a + b) % self.p
        }
        fn sub(&self, a: u64, b: u64) -> u64 {
            (a + self.p - b) % self.p
        }
        fn mul(&self, a: u64, b: u64) -> u64 {
            ((a as u128 * b as u128) % self.p as u128) as u64
        }
        fn pow(&self, mut a: u64, mut e: u64) -> u64 {
            let mut r = 1;
            while e > 0 {
                if e & 1 == 1 {
                    r = self.mul(r, a);
                }
                a = self.mul(a, a);
                e >>= 1;
            }
            r
        }
        fn inv(&self, a: u64) -> u64 {
            assert!(a % self.p != 0, "inverting zero mod {}", self.p);
            self.pow(a, self.p - 2)
        }
        fn from_usize(&self, a: usize) -> u64 {
            a as u64 % self.p
        }
    }

    fn is_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    /// `p ≡ 1 mod exponent`, above `2√order` and above the class count.
    fn choose_prime(exponent: u64, order: u64, classes: u64) -> u64 {
        let bound = 2.0 * (order as f64).sqrt();
        let mut p = exponent + 1;
        loop {
            if p as f64 > bound && p > classes && p > 2 && is_prime(p) {
                return p;
            }
            p += exponent;
        }
    }

    fn primitive_root(f: &Field) -> u64 {
        let p = f.p;
        let mut factors = Vec::new();
        let mut m = p - 1;
        let mut d = 2;
        while d * d <= m {
            if m % d == 0 {
                factors.push(d);
                while m % d == 0 {
                    m /= d;
                }
            }
            d += 1;
        }
        if m > 1 {
            factors.push(m);
        }
        (2..p).find(|&g| factors.iter().all(|&q| f.pow(g, (p - 1) / q) != 1)).expect("prime has a primitive root")
    }

    /// Reduced row echelon form in place; returns pivot columns.
    fn rref(f: &Field, rows: &mut Vec<Vector>, cols: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            let Some(sel) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
            rows.swap(r, sel);
            let inv = f.inv(rows[r][c]);
            for v in rows[r].iter_mut() {
                *v = f.mul(*v, inv);
            }
            for i in 0..rows.len() {
                if i != r && rows[i][c] != 0 {
                    let factor = rows[i][c];
                    for j in 0..cols {
                        let t = f.mul(factor, rows[r][j]);
                        rows[i][j] = f.sub(rows[i][j], t);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        rows.truncate(r);
        pivots
    }

    /// Basis of the kernel of a square matrix given by rows.
    fn kernel(f: &Field, mut rows: Vec<Vector>, n: usize) -> Vec<Vector> {
        let pivots = rref(f, &mut rows, n);
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![0; n];
                v[fc] = 1;
                for (row, &pc) in rows.iter().zip(&pivots) {
                    v[pc] = f.sub(0, row[fc]);
                }
                v
            })
            .collect()
    }

    /// Characteristic polynomial by Faddeev–LeVerrier, `p > n` required.
    /// Coefficients constant term first, monic.
    fn char_poly(f: &Field, a: &[Vector]) -> Vec<u64> {
        let n = a.len();
        let mut coeffs = vec![0u64; n + 1];
        coeffs[n] = 1;
        let mut m: Vec<Vector> = vec![vec![0; n]; n];
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I ; c_{n-k} = -tr(A M_k)/k
            let mut next = matmul(f, a, &m);
            for i in 0..n {
                next[i][i] = f.add(next[i][i], coeffs[n - k + 1]);
            }
            m = next;
            let am = matmul(f, a, &m);
            let trace = (0..n).fold(0, |t, i| f.add(t, am[i][i]));
            coeffs[n - k] = f.sub(0, f.mul(trace, f.inv(f.from_usize(k))));
        }
        coeffs
    }

    fn matmul(f: &Field, a: &[Vector], b: &[Vector]) -> Vec<Vector> {
        let n = a.len();
        let m = b.first().map_or(0, Vec::len);
        let mut out = vec![vec![0; m]; n];
        for i in 0..n {
            for (k, &aik) in a[i].iter().enumerate() {
                if aik == 0 {
                    continue;
                }
                for j in 0..m {
                    out[i][j] = f.add(out[i][j], f.mul(aik, b[k][j]));
                }
            }
        }
        out
    }

    /// A subspace of `F_p^r` in reduced echelon form.
    struct Subspace {
        basis: Vec<Vector>,
        pivots: Vec<usize>,
    }

    impl Subspace {
        fn new(f: &Field, mut basis: Vec<Vector>, r: usize) -> Self {
            let pivots = rref(f, &mut basis, r);
            Self { basis, pivots }
        }

        fn dim(&self) -> usize {
            self.basis.len()
        }

        /// Splits into eigenspaces of `m`, which must leave it invariant.
        fn split(self, f: &Field, m: &[Vector], r: usize) -> Vec<Subspace> {
            let d = self.dim();
            // restricted[i][j] = coordinate i of m·basis_j
            let images: Vec<Vector> = self
                .basis
                .iter()
                .map(|b| (0..r).map(|i| m[i].iter().zip(b).fold(0, |s, (&x, &y)| f.add(s, f.mul(x, y)))).collect())
                .collect();
            let restricted: Vec<Vector> =
                (0..d).map(|i| (0..d).map(|j| images[j][self.pivots[i]]).collect()).collect();
            let poly = char_poly(f, &restricted);
            let eval = |x: u64| poly.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c));
            let mut pieces = Vec::new();
            for lambda in 0..f.p {
                if eval(lambda) != 0 {
                    continue;
                }
                let shifted: Vec<Vector> = (0..d)
                    .map(|i| {
                        let mut row = restricted[i].clone();
                        row[i] = f.sub(row[i], lambda);
                        row
                    })
                    .collect();
                let coords = kernel(f, shifted, d);
                let vectors: Vec<Vector> = coords
                    .iter()
                    .map(|c| {
                        (0..r)
                            .map(|i| self.basis.iter().zip(c).fold(0, |s, (b, &ci)| f.add(s, f.mul(b[i], ci))))
                            .collect()
                    })
                    .collect();
                pieces.push(Subspace::new(f, vectors, r));
                if pieces.iter().map(Subspace::dim).sum::<usize>() == d {
                    break;
                }
            }
            pieces
        }
    }

    pub(super) fn irreducible_characters(
        g: &FiniteGroup,
        classes: &ConjugacyClasses,
    ) -> Result<Vec<Vec<CyclotomicNumber>>> {
        let r = classes.len();
        let order = g.order();
        let exponent = g.exponent();
        let f = Field { p: choose_prime(exponent as u64, order as u64, r as u64) };
        let sizes = classes.sizes();

        // class multiplication coefficients: mats[j][k][l] = #{x ∈ C_j : x⁻¹ z_l ∈ C_k}
        let mut mats = vec![vec![vec![0u64; r]; r]; r];
        for l in 0..r {
            let z = classes.representative(l);
            for x in 0..order {
                let j = classes.class_of(x);
                let k = classes.class_of(g.mul(g.inv(x), z));
                mats[j][k][l] += 1;
            }
        }
        for m in mats.iter_mut().flatten().flatten() {
            *m %= f.p;
        }

        let identity_basis: Vec<Vector> = (0..r).map(|i| (0..r).map(|j| u64::from(i == j)).collect()).collect();
        let mut spaces = vec![Subspace::new(&f, identity_basis, r)];
        for m in &mats {
            if spaces.iter().all(|s| s.dim() == 1) {
                break;
            }
            spaces = spaces
                .into_iter()
                .flat_map(|s| if s.dim() == 1 { vec![s] } else { s.split(&f, m, r) })
                .collect();
        }
        if spaces.len() != r || spaces.iter().any(|s| s.dim() != 1) {
            return Err(Error::CharacterTable("class algebra did not split into one-dimensional eigenspaces".into()));
        }

        let inverse_class: Vec<usize> = (0..r).map(|k| classes.class_of(g.inv(classes.representative(k)))).collect();
        let zeta = f.pow(primitive_root(&f), (f.p - 1) / exponent as u64);
        // power maps: class of rep^t for t in 0..exponent
        let power_classes: Vec<Vec<usize>> = (0..r)
            .map(|k| {
                let x = classes.representative(k);
                let mut y = g.identity();
                (0..exponent)
                    .map(|_| {
                        let c = classes.class_of(y);
                        y = g.mul(y, x);
                        c
                    })
                    .collect()
            })
            .collect();
        let max_degree = (order as f64).sqrt().floor() as u64;
        let exp_inv = f.inv(f.from_usize(exponent));

        let mut rows = Vec::with_capacity(r);
        for space in spaces {
            let v = &space.basis[0];
            let scale = f.inv(v[0]);
            let omega: Vec<u64> = v.iter().map(|&x| f.mul(x, scale)).collect();
            let norm = (0..r).fold(0, |s, k| {
                let t = f.mul(f.mul(omega[k], omega[inverse_class[k]]), f.inv(f.from_usize(sizes[k])));
                f.add(s, t)
            });
            let degree_sq = f.mul(f.from_usize(order), f.inv(norm));
            let degree = (1..=max_degree)
                .find(|&d| f.mul(d, d) == degree_sq)
                .ok_or_else(|| Error::CharacterTable("no admissible character degree".into()))?;
            let values_mod: Vec<u64> =
                (0..r).map(|k| f.mul(f.mul(degree, omega[k]), f.inv(f.from_usize(sizes[k])))).collect();
            let mut row = Vec::with_capacity(r);
            for k in 0..r {
                // multiplicity of the eigenvalue ζ^s of ρ(x) is the discrete
                // Fourier coefficient of t ↦ χ(x^t)
                let mut counts = vec![BigRational::zero(); exponent];
                for (s, count) in counts.iter_mut().enumerate() {
                    let mut acc = 0;
                    for (t, &c) in power_classes[k].iter().enumerate() {
                        let w = f.pow(zeta, ((exponent - (s * t) % exponent) % exponent) as u64);
                        acc = f.add(acc, f.mul(values_mod[c], w));
                    }
                    let mult = f.mul(acc, exp_inv);
                    if mult > degree {
                        return Err(Error::CharacterTable("eigenvalue multiplicity exceeds the degree".into()));
                    }
                    *count = BigRational::from_integer(BigInt::from(mult));
                }
                row.push(CyclotomicNumber::from_power_counts(exponent, &counts));
            }
            rows.push(row);
        }
        Ok(rows)
    }
}
