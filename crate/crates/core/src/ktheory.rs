//! The matrix `A_Γ`, K-groups of the associated Cuntz–Krieger type algebra,
//! irreducibility, the ideal lattice and the normal-core simplicity test.

use std::fmt;

use num::{BigInt, One, Signed, Zero};
use serde::Serialize;

use crate::amalgam::AmalgamSpec;
use crate::chartab::{twisted_inner_product, CharacterTable};
use crate::error::{Error, Result};
use crate::group::normal_core;
use crate::snf::{smith_normal_form, IntMatrix, SmithDecomposition};

/// Default cap on the number of hereditary subsets enumerated.
pub const DEFAULT_HEREDITARY_BOUND: usize = 4096;

/// `A_Γ` indexed by `(factor, character)`, factor-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AGammaMatrix {
    pub factors: usize,
    pub characters: usize,
    pub entries: Vec<Vec<u64>>,
}

impl AGammaMatrix {
    pub fn from_entries(factors: usize, characters: usize, entries: Vec<Vec<u64>>) -> Result<Self> {
        let n = factors * characters;
        if entries.len() != n || entries.iter().any(|r| r.len() != n) {
            return Err(Error::Degenerate(format!("A_Γ must be {n} × {n}")));
        }
        Ok(Self { factors, characters, entries })
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn index(&self, factor: usize, character: usize) -> usize {
        factor * self.characters + character
    }

    pub fn entry(&self, row: usize, col: usize) -> u64 {
        self.entries[row][col]
    }

    /// `1 − A_Γ`.
    pub fn one_minus(&self) -> IntMatrix {
        let n = self.size();
        (0..n)
            .map(|i| (0..n).map(|j| BigInt::from(u8::from(i == j)) - BigInt::from(self.entries[i][j])).collect())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.size();
        let entries = (0..n).map(|i| (0..n).map(|j| self.entries[j][i]).collect()).collect();
        Self { factors: self.factors, characters: self.characters, entries }
    }

    /// Whether the zero pattern is not symmetric, so transposing reverses
    /// some edges of the reachability digraph.
    pub fn transpose_changes_digraph(&self) -> bool {
        let n = self.size();
        (0..n).any(|i| (0..n).any(|j| (self.entries[i][j] == 0) != (self.entries[j][i] == 0)))
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.entries.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect()
    }
}

impl fmt::Display for AGammaMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.entries.iter().flatten().map(|x| x.to_string().len()).max().unwrap_or(1);
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:>width$}")).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// `A_Γ((i,k),(j,l)) = Σ_{x ∈ X_i∖{e}} ⟨χ_k, χ_l^x⟩_{H(x)}` for `j ≠ i`, zero
/// on diagonal blocks. `table` must be a character table of `H`.
pub fn build_a_gamma(spec: &AmalgamSpec, table: &CharacterTable) -> Result<AGammaMatrix> {
    let factors = spec.finite_factors("build_a_gamma")?;
    let r = table.len();
    let n = factors.len();
    let mut blocks = Vec::with_capacity(n);
    for f in &factors {
        let mut block = vec![vec![0u64; r]; r];
        for &x in &f.doubles.representatives()[1..] {
            for (k, row) in block.iter_mut().enumerate() {
                for (l, cell) in row.iter_mut().enumerate() {
                    *cell += twisted_inner_product(table, k, l, &f.group, &f.embedding, x)?;
                }
            }
        }
        blocks.push(block);
    }
    let mut entries = vec![vec![0u64; n * r]; n * r];
    for (i, block) in blocks.iter().enumerate() {
        for j in (0..n).filter(|&j| j != i) {
            for k in 0..r {
                for l in 0..r {
                    entries[i * r + k][j * r + l] = block[k][l];
                }
            }
        }
    }
    AGammaMatrix::from_entries(n, r, entries)
}

/// `K₀ = ℤ^a ⊕ ℤ/d₁ ⊕ …` and `K₁ = ℤ^b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KGroups {
    pub k0_free_rank: usize,
    pub k0_torsion: Vec<String>,
    pub k1_free_rank: usize,
}

impl KGroups {
    pub fn k0_string(&self) -> String {
        abelian_group(self.k0_free_rank, &self.k0_torsion)
    }

    pub fn k1_string(&self) -> String {
        abelian_group(self.k1_free_rank, &[])
    }
}

fn abelian_group(rank: usize, torsion: &[String]) -> String {
    let mut parts = Vec::new();
    match rank {
        0 => {}
        1 => parts.push("Z".to_string()),
        r => parts.push(format!("Z^{r}")),
    }
    parts.extend(torsion.iter().map(|d| format!("Z/{d}")));
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" ⊕ ")
    }
}

/// Cokernel and kernel of `1 − A` read off its Smith normal form.
pub fn k_groups(a: &AGammaMatrix) -> (KGroups, SmithDecomposition) {
    let snf = smith_normal_form(&a.one_minus());
    let zeros = snf.zero_count();
    let groups = KGroups {
        k0_free_rank: zeros,
        k0_torsion: snf.invariant_factors().iter().map(BigInt::to_string).collect(),
        k1_free_rank: zeros,
    };
    (groups, snf)
}

/// `reach[x][y]`: a path of at least one step along nonzero entries.
fn reachability(a: &AGammaMatrix) -> Vec<Vec<bool>> {
    let n = a.size();
    let mut reach: Vec<Vec<bool>> = a.entries.iter().map(|r| r.iter().map(|&x| x != 0).collect()).collect();
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    reach
}

/// Strong connectivity of the digraph of nonzero entries, every vertex on a
/// cycle.
pub fn irreducible(a: &AGammaMatrix) -> bool {
    let reach = reachability(a);
    a.size() > 0 && reach.iter().all(|r| r.iter().all(|&x| x))
}

/// Equivalence classes of cyclic vertices, their order and hereditary sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdealPoset {
    /// Vertex positions in each class, classes sorted by least vertex.
    pub classes: Vec<Vec<usize>>,
    /// `(a, b)`: class `a` covers class `b` (`a > b`, nothing between).
    pub hasse: Vec<(usize, usize)>,
    /// Hereditary subsets as sorted class lists, sorted by size then content.
    pub hereditary: Vec<Vec<usize>>,
    /// Set when `A_Γᵗ` would reverse some edges of the digraph.
    pub transpose_sensitive: bool,
}

impl IdealPoset {
    /// Number of closed ideals, including `0` and the whole algebra.
    pub fn ideal_count(&self) -> usize {
        self.hereditary.len()
    }
}

pub fn ideal_lattice(a: &AGammaMatrix, bound: usize) -> Result<IdealPoset> {
    let n = a.size();
    let reach = reachability(a);
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for x in (0..n).filter(|&x| reach[x][x]) {
        if class_of[x] != usize::MAX {
            continue;
        }
        let members: Vec<usize> = (x..n).filter(|&y| y == x || (reach[x][y] && reach[y][x])).collect();
        for &y in &members {
            class_of[y] = classes.len();
        }
        classes.push(members);
    }
    let c = classes.len();
    let above = |p: usize, q: usize| p != q && reach[classes[p][0]][classes[q][0]];
    let mut hasse = Vec::new();
    for p in 0..c {
        for q in 0..c {
            if above(p, q) && !(0..c).any(|m| above(p, m) && above(m, q)) {
                hasse.push((p, q));
            }
        }
    }
    // top-down linear extension: classes with more classes below come first
    let mut order: Vec<usize> = (0..c).collect();
    order.sort_by_key(|&p| std::cmp::Reverse((0..c).filter(|&q| above(p, q)).count()));
    let mut hereditary = Vec::new();
    let mut chosen = vec![false; c];
    fn search(
        pos: usize,
        order: &[usize],
        chosen: &mut [bool],
        above: &dyn Fn(usize, usize) -> bool,
        out: &mut Vec<Vec<usize>>,
        bound: usize,
    ) -> Result<()> {
        if pos == order.len() {
            if out.len() >= bound {
                return Err(Error::BudgetExceeded { what: "hereditary subset count", limit: bound });
            }
            out.push((0..chosen.len()).filter(|&p| chosen[p]).collect());
            return Ok(());
        }
        let q = order[pos];
        let forced = (0..chosen.len()).any(|p| chosen[p] && above(p, q));
        chosen[q] = true;
        search(pos + 1, order, chosen, above, out, bound)?;
        chosen[q] = false;
        if !forced {
            search(pos + 1, order, chosen, above, out, bound)?;
        }
        Ok(())
    }
    search(0, &order, &mut chosen, &above, &mut hereditary, bound)?;
    hereditary.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    Ok(IdealPoset { classes, hasse, hereditary, transpose_sensitive: a.transpose_changes_digraph() })
}

/// Outcome of the normal-core test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimplicityReport {
    /// Some `j` with `⋂_{i ≠ j} N_i = {e}`.
    pub witness: Option<usize>,
    /// `N_i` as subgroup element indices.
    pub cores: Vec<Vec<usize>>,
}

impl SimplicityReport {
    /// True when the sufficient condition holds; false is inconclusive.
    pub fn simple(&self) -> bool {
        self.witness.is_some()
    }
}

pub fn simplicity_check(spec: &AmalgamSpec) -> Result<SimplicityReport> {
    let factors = spec.finite_factors("simplicity_check")?;
    let cores: Vec<Vec<usize>> = factors.iter().map(|f| normal_core(&f.group, &f.embedding)).collect();
    let witness = (0..cores.len()).find(|&j| {
        let mut common: Vec<usize> = (0..spec.subgroup().order()).collect();
        for (i, core) in cores.iter().enumerate() {
            if i != j {
                common.retain(|h| core.contains(h));
            }
        }
        common == [0]
    });
    Ok(SimplicityReport { witness, cores })
}

/// `|det|` of a square integer matrix is one.
pub fn is_unimodular(m: &IntMatrix) -> bool {
    crate::snf::determinant(m).abs().is_one()
}

/// `true` when every diagonal entry divides the next.
pub fn divisibility_chain(d: &[BigInt]) -> bool {
    d.windows(2).all(|w| if w[0].is_zero() { w[1].is_zero() } else { (&w[1] % &w[0]).is_zero() })
}
