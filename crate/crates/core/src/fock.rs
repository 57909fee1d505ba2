//! Truncated Fock model: the creation operators `T_g` and the unitaries
//! `V_h` compressed to the span of reduced words of length at most `L`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Range;

use num::{BigInt, BigRational, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::amalgam::{free_group_2, AmalgamSpec, Factor, Letter, NormalFormWord, Syllable};
use crate::chartab::character_table;
use crate::error::{Error, Result};
use crate::snf::smith_normal_form;

/// Square integer matrix stored by columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseOperator {
    dim: usize,
    cols: Vec<BTreeMap<usize, i64>>,
}

impl SparseOperator {
    pub fn zero(dim: usize) -> Self {
        Self { dim, cols: vec![BTreeMap::new(); dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(dim, 0..dim)
    }

    /// 0/1 diagonal projection onto the given basis vectors.
    pub fn diagonal(dim: usize, support: impl IntoIterator<Item = usize>) -> Self {
        let mut op = Self::zero(dim);
        for k in support {
            op.set(k, k, 1);
        }
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn set(&mut self, row: usize, col: usize, value: i64) {
        if value == 0 {
            self.cols[col].remove(&row);
        } else {
            self.cols[col].insert(row, value);
        }
    }

    pub fn get(&self, row: usize, col: usize) -> i64 {
        self.cols[col].get(&row).copied().unwrap_or(0)
    }

    pub fn column(&self, col: usize) -> &BTreeMap<usize, i64> {
        &self.cols[col]
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for (c, col) in self.cols.iter().enumerate() {
            for (&r, &v) in col {
                out.set(c, r, v);
            }
        }
        out
    }

    /// `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.dim);
        for (j, col) in other.cols.iter().enumerate() {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for (&k, &b) in col {
                for (&i, &a) in &self.cols[k] {
                    *acc.entry(i).or_insert(0) += a * b;
                }
            }
            acc.retain(|_, v| *v != 0);
            out.cols[j] = acc;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, -1)
    }

    fn combine(&self, other: &Self, sign: i64) -> Self {
        let mut out = self.clone();
        for (j, col) in other.cols.iter().enumerate() {
            for (&i, &v) in col {
                let x = out.get(i, j) + sign * v;
                out.set(i, j, x);
            }
        }
        out
    }

    /// Largest `|entry|` in the given columns.
    pub fn max_abs_on(&self, cols: Range<usize>) -> i64 {
        self.cols[cols].iter().flat_map(|c| c.values()).map(|v| v.abs()).max().unwrap_or(0)
    }

    /// Exact rank over `ℚ`.
    pub fn rank(&self) -> usize {
        let mut rows: Vec<usize> = self.cols.iter().flat_map(|c| c.keys().copied()).collect();
        rows.sort_unstable();
        rows.dedup();
        let cols: Vec<usize> = (0..self.dim).filter(|&j| !self.cols[j].is_empty()).collect();
        if cols.is_empty() {
            return 0;
        }
        let m: Vec<Vec<BigInt>> =
            rows.iter().map(|&i| cols.iter().map(|&j| BigInt::from(self.get(i, j))).collect()).collect();
        smith_normal_form(&m).diagonal.iter().filter(|d| !d.is_zero()).count()
    }

    pub fn is_diagonal_projection(&self) -> bool {
        self.cols.iter().enumerate().all(|(j, c)| c.iter().all(|(&i, &v)| i == j && v == 1))
    }

    /// `(row, col, value)` triples in column order.
    pub fn triplets(&self) -> Vec<(usize, usize, i64)> {
        self.cols.iter().enumerate().flat_map(|(j, c)| c.iter().map(move |(&i, &v)| (i, j, v))).collect()
    }
}

impl fmt::Display for SparseOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, j, v) in self.triplets() {
            writeln!(f, "{i} {j} {v}")?;
        }
        Ok(())
    }
}

/// Basis of reduced words of length at most `L`.
#[derive(Clone, Debug)]
pub struct TruncatedFock {
    length: usize,
    basis: Vec<NormalFormWord>,
    index: HashMap<NormalFormWord, usize>,
    shells: Vec<Range<usize>>,
}

impl TruncatedFock {
    pub fn new(spec: &AmalgamSpec, length: usize, budget: usize) -> Result<Self> {
        let basis = spec.ball(length, budget)?;
        let index = basis.iter().enumerate().map(|(k, w)| (w.clone(), k)).collect();
        let mut shells = Vec::with_capacity(length + 1);
        let mut start = 0;
        for n in 0..=length {
            let end = start + basis[start..].iter().take_while(|w| w.length() == n).count();
            shells.push(start..end);
            start = end;
        }
        Ok(Self { length, basis, index, shells })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[NormalFormWord] {
        &self.basis
    }

    pub fn position(&self, w: &NormalFormWord) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// Index range of `Γ_n`.
    pub fn shell(&self, n: usize) -> Range<usize> {
        self.shells[n].clone()
    }

    /// Words of length at most `L − 1`.
    pub fn interior(&self) -> Range<usize> {
        match self.length {
            0 => 0..0,
            l => 0..self.shells[l - 1].end,
        }
    }
}

/// A length-one generator `g`: a letter of `G_i ∖ H` or `a_i^{±1}h`.
#[derive(Clone, Debug)]
pub struct Generator {
    pub letter: Letter,
    pub label: String,
    /// The coset syllable `gH` (or `a_i^{±1}`).
    pub class: Syllable,
    word: NormalFormWord,
}

/// All `T_g` and `V_h` on one truncation.
#[derive(Clone, Debug)]
pub struct FockOperators {
    pub fock: TruncatedFock,
    pub generators: Vec<Generator>,
    pub t: Vec<SparseOperator>,
    /// `V_h`, indexed by the element of `H`.
    pub v: Vec<SparseOperator>,
}

fn generators(spec: &AmalgamSpec) -> Vec<Generator> {
    let h = spec.subgroup();
    let mut out = Vec::new();
    for (i, f) in spec.factors().iter().enumerate() {
        let letters: Vec<(Letter, String)> = match f {
            Factor::Finite(f) => (0..f.group.order())
                .filter(|&x| f.embedding.preimage(x).is_none())
                .map(|x| (Letter::Finite { factor: i, element: x }, format!("{}:{}", f.label, f.group.label(x))))
                .collect(),
            Factor::Symbolic { generator, .. } => [1, -1]
                .into_iter()
                .flat_map(|e| {
                    (0..h.order()).map(move |t| {
                        let sign = if e == 1 { "" } else { "^-1" };
                        let tail = if t == 0 { String::new() } else { format!("·{}", h.label(t)) };
                        (Letter::Symbolic { factor: i, exponent: e, h: t }, format!("{generator}{sign}{tail}"))
                    })
                })
                .collect(),
        };
        for (letter, label) in letters {
            let word = spec.letter_word(letter);
            out.push(Generator { letter, label, class: word.syllables()[0], word });
        }
    }
    out
}

/// `T_g w = gw` when `|gw| = |w| + 1 ≤ L`, else `0`; `V_h w = hw`.
pub fn build_operators(spec: &AmalgamSpec, length: usize, budget: usize) -> Result<FockOperators> {
    let fock = TruncatedFock::new(spec, length, budget)?;
    let generators = generators(spec);
    let dim = fock.dim();
    let t = generators
        .par_iter()
        .map(|g| -> Result<SparseOperator> {
            let mut op = SparseOperator::zero(dim);
            for (k, w) in fock.basis.iter().enumerate() {
                let u = spec.multiply(&g.word, w)?;
                if u.length() == w.length() + 1 {
                    if let Some(r) = fock.position(&u) {
                        op.set(r, k, 1);
                    }
                }
            }
            Ok(op)
        })
        .collect::<Result<Vec<_>>>()?;
    let v = (0..spec.subgroup().order())
        .map(|h| -> Result<SparseOperator> {
            let hw = spec.from_subgroup(h);
            let mut op = SparseOperator::zero(dim);
            for (k, w) in fock.basis.iter().enumerate() {
                let r = fock.position(&spec.multiply(&hw, w)?).ok_or_else(|| Error::UnknownElement("word outside the truncation".into()))?;
                op.set(r, k, 1);
            }
            Ok(op)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FockOperators { fock, generators, t, v })
}

impl FockOperators {
    /// `P_g = T_g T_g*`.
    pub fn range_projection(&self, g: usize) -> SparseOperator {
        self.t[g].compose(&self.t[g].adjoint())
    }

    /// `Q_g = T_g* T_g`.
    pub fn initial_projection(&self, g: usize) -> SparseOperator {
        self.t[g].adjoint().compose(&self.t[g])
    }

    /// Generator whose normal form is exactly the syllable `class`.
    fn class_representative(&self, class: Syllable) -> usize {
        self.generators
            .iter()
            .position(|g| g.class == class && g.word.tail() == 0)
            .expect("every class has a tail-free representative")
    }

    fn classes(&self) -> Vec<Syllable> {
        let mut c: Vec<Syllable> = self.generators.iter().map(|g| g.class).collect();
        c.sort_unstable();
        c.dedup();
        c
    }

    fn generator_of(&self, w: &NormalFormWord) -> Option<usize> {
        self.generators.iter().position(|g| &g.word == w)
    }
}

/// Whether a reduced word starting with `next` stays reduced after
/// prepending a generator of class `first`.
fn follows(first: Syllable, next: Syllable) -> bool {
    match (first, next) {
        (Syllable::Power { factor: i, exponent: a }, Syllable::Power { factor: j, exponent: b }) => {
            i != j || a.signum() == b.signum()
        }
        _ => first.factor() != next.factor(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Full,
    Interior,
}

/// One family of operator identities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationCheck {
    pub name: String,
    pub scope: Scope,
    pub instances: usize,
    /// Largest entry of `lhs − rhs` on the scope.
    pub max_residual: i64,
    /// Rank of `lhs − rhs` on the full truncation.
    pub defect_rank: usize,
}

impl RelationCheck {
    pub fn exact(&self) -> bool {
        self.max_residual == 0
    }
}

/// Multiplicities of the irreducibles of `H` in the compression of `V_h`
/// to the range of `P_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultiplicityDiagnostic {
    pub factor: usize,
    pub range_dimension: usize,
    pub multiplicities: Vec<u64>,
    pub all_present: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub length: usize,
    pub dimension: usize,
    pub interior_dimension: usize,
    pub checks: Vec<RelationCheck>,
    /// Rank of `1 − Σ P` on the full truncation.
    pub unit_defect_rank: usize,
    /// Not asserted.
    pub multiplicity_diagnostic: Vec<MultiplicityDiagnostic>,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(RelationCheck::exact)
    }

    pub fn check(&self, name: &str) -> Option<&RelationCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn check(name: &str, scope: Scope, ops: &FockOperators, pairs: Vec<(SparseOperator, SparseOperator)>) -> RelationCheck {
    let cols = match scope {
        Scope::Full => 0..ops.fock.dim(),
        Scope::Interior => ops.fock.interior(),
    };
    let diffs: Vec<(i64, usize)> = pairs
        .par_iter()
        .map(|(l, r)| {
            let d = l.sub(r);
            (d.max_abs_on(cols.clone()), d.rank())
        })
        .collect();
    RelationCheck {
        name: name.to_string(),
        scope,
        instances: diffs.len(),
        max_residual: diffs.iter().map(|d| d.0).max().unwrap_or(0),
        defect_rank: diffs.iter().map(|d| d.1).max().unwrap_or(0),
    }
}

/// Residuals of the defining relations on the truncation.
///
/// `(1)`, `(2)` and the shell grading are checked on the full space;
/// `(3)` and `(4)` on words of length at most `L − 1`, each up to the
/// projection `p₀` onto `Γ₀`. The rank of `1 − Σ P` is reported separately.
pub fn verify_relations(spec: &AmalgamSpec, length: usize, budget: usize) -> Result<RelationReport> {
    let ops = build_operators(spec, length, budget)?;
    verify_operators(spec, &ops)
}

pub fn verify_operators(spec: &AmalgamSpec, ops: &FockOperators) -> Result<RelationReport> {
    let dim = ops.fock.dim();
    let h = spec.subgroup();
    let n = ops.generators.len();
    let mut checks = Vec::new();

    let mut one = Vec::new();
    for g in 0..n {
        for x in 0..h.order() {
            let hw = spec.from_subgroup(x);
            let right = ops.generator_of(&spec.multiply(&ops.generators[g].word, &hw)?).ok_or_else(|| Error::UnknownElement("word outside the truncation".into()))?;
            let left = ops.generator_of(&spec.multiply(&hw, &ops.generators[g].word)?).ok_or_else(|| Error::UnknownElement("word outside the truncation".into()))?;
            one.push((ops.t[right].clone(), ops.t[g].compose(&ops.v[x])));
            one.push((ops.t[left].clone(), ops.v[x].compose(&ops.t[g])));
        }
    }
    checks.push(check("(1) T_gh = T_g V_h, T_hg = V_h T_g", Scope::Full, ops, one));

    let p: Vec<SparseOperator> = (0..n).into_par_iter().map(|g| ops.range_projection(g)).collect();
    let mut two = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let rhs = if ops.generators[a].class == ops.generators[b].class {
                p[a].clone()
            } else {
                SparseOperator::zero(dim)
            };
            two.push((p[a].compose(&p[b]), rhs));
        }
    }
    checks.push(check("(2) P_g P_g'", Scope::Full, ops, two));

    let classes = ops.classes();
    let class_p: Vec<(Syllable, &SparseOperator)> =
        classes.iter().map(|&c| (c, &p[ops.class_representative(c)])).collect();
    let p0 = SparseOperator::diagonal(dim, ops.fock.shell(0));
    let three = (0..n)
        .map(|g| {
            let first = ops.generators[g].class;
            let sum = class_p
                .iter()
                .filter(|(c, _)| follows(first, *c))
                .fold(p0.clone(), |acc, (_, q)| acc.add(q));
            (ops.initial_projection(g), sum)
        })
        .collect();
    checks.push(check("(3) Q_g = sum of following P + p_0", Scope::Interior, ops, three));

    let sum_p = class_p.iter().fold(SparseOperator::zero(dim), |acc, (_, q)| acc.add(q));
    checks.push(check(
        "(4) 1 = sum P + p_0",
        Scope::Interior,
        ops,
        vec![(SparseOperator::identity(dim), sum_p.add(&p0))],
    ));
    let unit_defect_rank = SparseOperator::identity(dim).sub(&sum_p).rank();

    let q_projections = (0..n).filter(|&g| !ops.initial_projection(g).is_diagonal_projection()).count();
    checks.push(RelationCheck {
        name: "Q_g diagonal projection".into(),
        scope: Scope::Full,
        instances: n,
        max_residual: q_projections as i64,
        defect_rank: 0,
    });
    let mut off_grade = 0;
    for t in &ops.t {
        for (j, w) in ops.fock.basis.iter().enumerate() {
            off_grade += t.column(j).keys().filter(|&&i| ops.fock.basis[i].length() != w.length() + 1).count();
        }
    }
    checks.push(RelationCheck {
        name: "T_g raises the shell by one".into(),
        scope: Scope::Full,
        instances: n,
        max_residual: off_grade as i64,
        defect_rank: 0,
    });

    Ok(RelationReport {
        length: ops.fock.length(),
        dimension: dim,
        interior_dimension: ops.fock.interior().len(),
        unit_defect_rank,
        multiplicity_diagnostic: multiplicity_diagnostic(spec, ops, &class_p)?,
        checks,
    })
}

fn multiplicity_diagnostic(
    spec: &AmalgamSpec,
    ops: &FockOperators,
    class_p: &[(Syllable, &SparseOperator)],
) -> Result<Vec<MultiplicityDiagnostic>> {
    let h = spec.subgroup();
    let table = character_table(h)?;
    let mut out = Vec::new();
    for i in 0..spec.num_factors() {
        let range: Vec<usize> = (0..ops.fock.dim())
            .filter(|&k| class_p.iter().any(|(c, q)| c.factor() == i && q.get(k, k) == 1))
            .collect();
        let traces: Vec<i64> =
            (0..h.order()).map(|x| range.iter().map(|&k| ops.v[x].get(k, k)).sum()).collect();
        let mut multiplicities = Vec::with_capacity(table.len());
        for k in 0..table.len() {
            let mut acc = crate::CyclotomicNumber::zero(table.conductor());
            for (x, &tr) in traces.iter().enumerate() {
                let term = table.value(k, x).conj().scale(&BigRational::from_integer(tr.into()));
                acc = &acc + &term;
            }
            let m = acc
                .scale(&BigRational::new(1.into(), (h.order() as i64).into()))
                .to_integer()
                .and_then(|m| u64::try_from(m).ok())
                .ok_or_else(|| Error::NonIntegral("character multiplicity".into()))?;
            multiplicities.push(m);
        }
        out.push(MultiplicityDiagnostic {
            factor: i,
            range_dimension: range.len(),
            all_present: multiplicities.iter().all(|&m| m >= 1),
            multiplicities,
        });
    }
    Ok(out)
}

/// The free group on `a, b` as a Cuntz–Krieger example.
#[derive(Clone, Debug, Serialize)]
pub struct FreeGroupExample {
    /// `a, a⁻¹, b, b⁻¹`.
    pub labels: Vec<String>,
    /// `A(x, y) = 1` iff `xy` is reduced of length two.
    pub matrix: Vec<Vec<u8>>,
    /// Largest entry of `T_x* T_x − Σ_{A(x,y)=1} T_y T_y* − p₀` on the interior.
    pub ck_residual: i64,
    pub shell_sizes: Vec<usize>,
    /// `|Γ_n| = 4 · 3^{n−1}`.
    pub shells_match: bool,
    pub report: RelationReport,
}

pub fn f2_example(length: usize, budget: usize) -> Result<FreeGroupExample> {
    let spec = free_group_2();
    let ops = build_operators(&spec, length, budget)?;
    let order = [(0, 1), (0, -1), (1, 1), (1, -1)];
    let gens: Vec<usize> = order
        .iter()
        .map(|&(factor, exponent)| {
            ops.generators
                .iter()
                .position(|g| g.letter == Letter::Symbolic { factor, exponent, h: 0 })
                .expect("free generators")
        })
        .collect();
    let matrix: Vec<Vec<u8>> = gens
        .iter()
        .map(|&x| gens.iter().map(|&y| u8::from(spec.multiply(&ops.generators[x].word, &ops.generators[y].word).map_or(0, |w| w.length()) == 2)).collect())
        .collect();
    let mut ck_residual = 0;
    for (r, &x) in gens.iter().enumerate() {
        let rhs = gens
            .iter()
            .enumerate()
            .filter(|&(c, _)| matrix[r][c] == 1)
            .fold(SparseOperator::diagonal(ops.fock.dim(), ops.fock.shell(0)), |acc, (_, &y)| {
                acc.add(&ops.range_projection(y))
            });
        ck_residual = ck_residual.max(ops.initial_projection(x).sub(&rhs).max_abs_on(ops.fock.interior()));
    }
    let shell_sizes: Vec<usize> = (0..=length).map(|n| ops.fock.shell(n).len()).collect();
    let shells_match = shell_sizes.iter().enumerate().all(|(n, &s)| s == if n == 0 { 1 } else { 4 * 3usize.pow(n as u32 - 1) });
    let report = verify_operators(&spec, &ops)?;
    Ok(FreeGroupExample {
        labels: gens.iter().map(|&g| ops.generators[g].label.clone()).collect(),
        matrix,
        ck_residual,
        shell_sizes,
        shells_match,
        report,
    })
}
