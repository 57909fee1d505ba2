//! Normal forms in `Γ = *_H G_i`, the length function, balls, the Gromov
//! product and the Bass–Serre tree.
//!
//! A word is stored as its syllables `g₁ ⋯ g_n` (coset representatives, or
//! signed powers of `a_i` for a `ℤ × H` factor) followed by a tail `h ∈ H`.
//! Right multiplication by a single letter touches only the last syllable,
//! so reducing a sequence of letters is linear in its length.

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};

use num::rational::Ratio;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{CosetSpace, DoubleCosetDecomposition, FiniteGroup, SubgroupEmbedding};

/// Default cap on the number of words produced by [`AmalgamSpec::ball`].
pub const DEFAULT_BALL_BUDGET: usize = 2_000_000;

static NEXT_SPEC_ID: AtomicU64 = AtomicU64::new(1);

/// A finite factor `H ↪ G_i` with its chosen representatives.
#[derive(Clone, Debug)]
pub struct FiniteFactor {
    pub label: String,
    pub group: FiniteGroup,
    pub embedding: SubgroupEmbedding,
    pub omega: CosetSpace,
    pub doubles: DoubleCosetDecomposition,
}

impl FiniteFactor {
    /// Uses least-index representatives for `Ω_i` and `X_i`.
    pub fn new(label: impl Into<String>, group: FiniteGroup, embedding: SubgroupEmbedding) -> Self {
        let omega = CosetSpace::left_cosets(&group, &embedding);
        let doubles = DoubleCosetDecomposition::compute(&group, &embedding, &omega);
        Self { label: label.into(), group, embedding, omega, doubles }
    }

    /// `[G_i : H]`.
    pub fn index(&self) -> usize {
        self.omega.len()
    }
}

/// One factor of the amalgam.
#[derive(Clone, Debug)]
pub enum Factor {
    Finite(FiniteFactor),
    /// `ℤ × H` with `H` embedded as `{0} × H`; `generator` names `a_i`.
    Symbolic { label: String, generator: String },
}

impl Factor {
    pub fn label(&self) -> &str {
        match self {
            Factor::Finite(f) => &f.label,
            Factor::Symbolic { label, .. } => label,
        }
    }

    pub fn as_finite(&self) -> Option<&FiniteFactor> {
        match self {
            Factor::Finite(f) => Some(f),
            Factor::Symbolic { .. } => None,
        }
    }
}

/// The data `(H, (G_i, Ω_i, X_i)_{i ∈ I})` of an amalgamated free product.
#[derive(Clone, Debug)]
pub struct AmalgamSpec {
    id: u64,
    subgroup: FiniteGroup,
    factors: Vec<Factor>,
}

/// A syllable of a normal form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Syllable {
    /// Non-identity representative, as a position in `Ω_factor`.
    Coset { factor: usize, coset: usize },
    /// `a_factor^exponent` with a non-zero exponent.
    Power { factor: usize, exponent: i64 },
}

impl Syllable {
    pub fn factor(&self) -> usize {
        match *self {
            Syllable::Coset { factor, .. } | Syllable::Power { factor, .. } => factor,
        }
    }

    pub fn length(&self) -> usize {
        match *self {
            Syllable::Coset { .. } => 1,
            Syllable::Power { exponent, .. } => exponent.unsigned_abs() as usize,
        }
    }
}

/// A generator-level element fed to [`AmalgamSpec::reduce`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Letter {
    /// Element index of the finite group `G_factor`.
    Finite { factor: usize, element: usize },
    /// `(a_factor^exponent, h)` in a `ℤ × H` factor.
    Symbolic { factor: usize, exponent: i64, h: usize },
    /// Element index of `H`.
    Sub(usize),
}

/// The unique factorization `g₁ ⋯ g_n h`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormalFormWord {
    spec_id: u64,
    syllables: Vec<Syllable>,
    tail: usize,
}

impl PartialOrd for NormalFormWord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Length first, then syllables, then tail.
impl Ord for NormalFormWord {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.length()
            .cmp(&other.length())
            .then_with(|| self.syllables.cmp(&other.syllables))
            .then_with(|| self.tail.cmp(&other.tail))
    }
}

impl NormalFormWord {
    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn tail(&self) -> usize {
        self.tail
    }

    /// `|γ| = Σ_k |g_k|`.
    pub fn length(&self) -> usize {
        self.syllables.iter().map(Syllable::length).sum()
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty() && self.tail == 0
    }

    /// Whether the word lies in `H`.
    pub fn in_subgroup(&self) -> bool {
        self.syllables.is_empty()
    }

    /// The same element with the tail replaced by `e`.
    pub fn without_tail(&self) -> Self {
        Self { spec_id: self.spec_id, syllables: self.syllables.clone(), tail: 0 }
    }
}

impl AmalgamSpec {
    pub fn new(subgroup: FiniteGroup, factors: Vec<Factor>) -> Result<Self> {
        if factors.len() < 2 {
            return Err(Error::InvalidAmalgam(format!("{} factor(s); at least two are required", factors.len())));
        }
        let mut points = 0usize;
        for (i, f) in factors.iter().enumerate() {
            match f {
                Factor::Finite(f) => {
                    if f.embedding.subgroup_order() != subgroup.order() {
                        return Err(Error::InvalidAmalgam(format!(
                            "factor {i} embeds a group of order {} but H has order {}",
                            f.embedding.subgroup_order(),
                            subgroup.order()
                        )));
                    }
                    if f.index() == 1 {
                        return Err(Error::InvalidAmalgam(format!("factor {i} coincides with H")));
                    }
                    points = points.saturating_add(f.index() - 1);
                }
                Factor::Symbolic { .. } => points = usize::MAX,
            }
        }
        if points <= 2 {
            return Err(Error::InvalidAmalgam(
                "the nontrivial coset representatives must have at least three points".into(),
            ));
        }
        let id = NEXT_SPEC_ID.fetch_add(1, Ordering::Relaxed);
        Ok(Self { id, subgroup, factors })
    }

    pub fn subgroup(&self) -> &FiniteGroup {
        &self.subgroup
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn factor(&self, i: usize) -> &Factor {
        &self.factors[i]
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    /// Whether every factor is finite.
    pub fn is_finite(&self) -> bool {
        self.factors.iter().all(|f| matches!(f, Factor::Finite(_)))
    }

    /// The finite factors, or an error naming the calling operation.
    pub fn finite_factors(&self, operation: &'static str) -> Result<Vec<&FiniteFactor>> {
        self.factors
            .iter()
            .map(|f| f.as_finite().ok_or(Error::SymbolicFactor(operation)))
            .collect()
    }

    fn finite(&self, i: usize) -> &FiniteFactor {
        match &self.factors[i] {
            Factor::Finite(f) => f,
            Factor::Symbolic { .. } => panic!("factor {i} is symbolic"),
        }
    }

    pub fn identity(&self) -> NormalFormWord {
        self.from_subgroup(0)
    }

    pub fn from_subgroup(&self, h: usize) -> NormalFormWord {
        NormalFormWord { spec_id: self.id, syllables: Vec::new(), tail: h }
    }

    fn check(&self, w: &NormalFormWord) -> Result<()> {
        if w.spec_id == self.id {
            Ok(())
        } else {
            Err(Error::MixedSpecs)
        }
    }

    /// Right multiplication by a letter, in place.
    pub fn push(&self, w: &mut NormalFormWord, letter: Letter) {
        match letter {
            Letter::Sub(h) => w.tail = self.subgroup.mul(w.tail, h),
            Letter::Finite { factor, element } => {
                let f = self.finite(factor);
                let g = &f.group;
                let mut y = g.mul(f.embedding.image(w.tail), element);
                if let Some(&Syllable::Coset { factor: last, coset }) = w.syllables.last() {
                    if last == factor {
                        y = g.mul(f.omega.representatives()[coset], y);
                        w.syllables.pop();
                    }
                }
                let (coset, h) = f.omega.split(y);
                if coset != 0 {
                    w.syllables.push(Syllable::Coset { factor, coset });
                }
                w.tail = h;
            }
            Letter::Symbolic { factor, exponent, h } => {
                let mut exponent = exponent;
                if let Some(&Syllable::Power { factor: last, exponent: e }) = w.syllables.last() {
                    if last == factor {
                        exponent += e;
                        w.syllables.pop();
                    }
                }
                if exponent != 0 {
                    w.syllables.push(Syllable::Power { factor, exponent });
                }
                w.tail = self.subgroup.mul(w.tail, h);
            }
        }
    }

    /// Normal form of a product of letters.
    pub fn reduce(&self, letters: &[Letter]) -> NormalFormWord {
        let mut w = self.identity();
        for &l in letters {
            self.push(&mut w, l);
        }
        w
    }

    /// The letters `g₁, …, g_n, h` spelling `w`.
    pub fn letters(&self, w: &NormalFormWord) -> Vec<Letter> {
        let mut out: Vec<Letter> = w.syllables.iter().map(|&s| self.syllable_letter(s)).collect();
        if w.tail != 0 {
            out.push(Letter::Sub(w.tail));
        }
        out
    }

    fn syllable_letter(&self, s: Syllable) -> Letter {
        match s {
            Syllable::Coset { factor, coset } => {
                Letter::Finite { factor, element: self.finite(factor).omega.representatives()[coset] }
            }
            Syllable::Power { factor, exponent } => Letter::Symbolic { factor, exponent, h: 0 },
        }
    }

    fn inverse_letter(&self, l: Letter) -> Letter {
        match l {
            Letter::Finite { factor, element } => {
                Letter::Finite { factor, element: self.finite(factor).group.inv(element) }
            }
            Letter::Symbolic { factor, exponent, h } => {
                Letter::Symbolic { factor, exponent: -exponent, h: self.subgroup.inv(h) }
            }
            Letter::Sub(h) => Letter::Sub(self.subgroup.inv(h)),
        }
    }

    pub fn multiply(&self, u: &NormalFormWord, v: &NormalFormWord) -> Result<NormalFormWord> {
        self.check(u)?;
        self.check(v)?;
        let mut w = u.clone();
        for l in self.letters(v) {
            self.push(&mut w, l);
        }
        Ok(w)
    }

    pub fn inverse(&self, u: &NormalFormWord) -> Result<NormalFormWord> {
        self.check(u)?;
        let mut w = self.identity();
        for l in self.letters(u).into_iter().rev() {
            self.push(&mut w, self.inverse_letter(l));
        }
        Ok(w)
    }

    /// `u⁻¹ v`.
    pub fn quotient(&self, u: &NormalFormWord, v: &NormalFormWord) -> Result<NormalFormWord> {
        self.multiply(&self.inverse(u)?, v)
    }

    /// The element of `G_i` (as a one-letter word).
    pub fn letter_word(&self, l: Letter) -> NormalFormWord {
        self.reduce(&[l])
    }

    /// Nontrivial syllables that may follow a syllable of factor `prev`
    /// with total length at most `budget`.
    fn next_syllables(&self, prev: Option<usize>, budget: usize) -> Vec<Syllable> {
        let mut out = Vec::new();
        for (i, f) in self.factors.iter().enumerate() {
            if Some(i) == prev {
                continue;
            }
            match f {
                Factor::Finite(f) => {
                    if budget >= 1 {
                        out.extend((1..f.index()).map(|coset| Syllable::Coset { factor: i, coset }));
                    }
                }
                Factor::Symbolic { .. } => {
                    for n in 1..=budget as i64 {
                        out.push(Syllable::Power { factor: i, exponent: n });
                        out.push(Syllable::Power { factor: i, exponent: -n });
                    }
                }
            }
        }
        out
    }

    /// Number of words of length exactly `n`, ignoring the budget.
    pub fn sphere_size(&self, n: usize) -> u128 {
        // counts[l][i]: syllable sequences of length l whose last syllable lies in factor i
        let k = self.factors.len();
        let mut counts = vec![vec![0u128; k]; n + 1];
        let mut total = vec![0u128; n + 1];
        total[0] = 1;
        for l in 1..=n {
            for i in 0..k {
                let mut c = 0u128;
                match &self.factors[i] {
                    Factor::Finite(f) => {
                        let prev = total[l - 1] - counts[l - 1][i];
                        c += prev * (f.index() as u128 - 1);
                    }
                    Factor::Symbolic { .. } => {
                        for m in 1..=l {
                            c += 2 * (total[l - m] - counts[l - m][i]);
                        }
                    }
                }
                counts[l][i] = c;
            }
            total[l] = counts[l].iter().sum();
        }
        total[n] * self.subgroup.order() as u128
    }

    /// Every word of length at most `radius`, ordered by length, syllables
    /// and tail.
    pub fn ball(&self, radius: usize, budget: usize) -> Result<Vec<NormalFormWord>> {
        let size: u128 = (0..=radius).map(|n| self.sphere_size(n)).sum();
        if size > budget as u128 {
            return Err(Error::BudgetExceeded { what: "ball size", limit: budget });
        }
        let mut sequences: Vec<Vec<Syllable>> = vec![Vec::new()];
        let mut frontier: Vec<(Vec<Syllable>, usize)> = vec![(Vec::new(), 0)];
        while let Some((seq, len)) = frontier.pop() {
            let prev = seq.last().map(Syllable::factor);
            for s in self.next_syllables(prev, radius - len) {
                let mut next = seq.clone();
                next.push(s);
                let l = len + s.length();
                sequences.push(next.clone());
                if l < radius {
                    frontier.push((next, l));
                }
            }
        }
        sequences.sort_by(|a, b| {
            let la: usize = a.iter().map(Syllable::length).sum();
            let lb: usize = b.iter().map(Syllable::length).sum();
            la.cmp(&lb).then_with(|| a.cmp(b))
        });
        let h = self.subgroup.order();
        Ok(sequences
            .into_iter()
            .flat_map(|syllables| {
                (0..h).map(move |tail| NormalFormWord { spec_id: self.id, syllables: syllables.clone(), tail })
            })
            .collect())
    }

    /// `⟨x|y⟩_e = ½(|x| + |y| − |x⁻¹y|)`.
    ///
    /// This is the length of the common prefix of coset syllables, plus `½`
    /// when the first differing syllables are distinct cosets of the same
    /// finite factor (or, for a `ℤ × H` factor, the overlap of same-signed
    /// powers).
    pub fn gromov_product(&self, x: &NormalFormWord, y: &NormalFormWord) -> Result<Ratio<i64>> {
        let d = self.quotient(x, y)?.length();
        Ok(Ratio::new((x.length() + y.length()) as i64 - d as i64, 2))
    }

    /// `max_{x,y,z} min(⟨x|z⟩, ⟨y|z⟩) − ⟨x|y⟩` over the ball of `radius`.
    pub fn hyperbolicity_delta(&self, radius: usize, budget: usize) -> Result<Ratio<i64>> {
        let words = self.ball(radius, budget)?;
        let n = words.len();
        if n.saturating_mul(n) > budget.saturating_mul(64) {
            return Err(Error::BudgetExceeded { what: "pairwise Gromov products", limit: budget });
        }
        let lengths: Vec<i64> = words.iter().map(|w| w.length() as i64).collect();
        let inverses: Vec<NormalFormWord> =
            words.iter().map(|w| self.inverse(w)).collect::<Result<_>>()?;
        // twice the Gromov product, row-major
        let products: Vec<i64> = (0..n)
            .into_par_iter()
            .flat_map_iter(|a| {
                let inv = &inverses[a];
                let lengths = &lengths;
                words.iter().enumerate().map(move |(b, w)| {
                    let d = self.multiply(inv, w).expect("same spec").length() as i64;
                    lengths[a] + lengths[b] - d
                })
            })
            .collect();
        let worst = (0..n)
            .into_par_iter()
            .map(|x| {
                let row_x = &products[x * n..(x + 1) * n];
                let mut worst = i64::MIN;
                for y in 0..n {
                    let row_y = &products[y * n..(y + 1) * n];
                    let xy = row_x[y];
                    for z in 0..n {
                        worst = worst.max(row_x[z].min(row_y[z]) - xy);
                    }
                }
                worst
            })
            .max()
            .unwrap_or(0);
        Ok(Ratio::new(worst, 2))
    }

    /// Truncation of the Bass–Serre tree to cosets of words in `ball(radius)`.
    pub fn serre_tree(&self, radius: usize, budget: usize) -> Result<SerreTree> {
        let words = self.ball(radius, budget)?;
        let mut tree = SerreTree::default();
        let two_finite = self.factors.len() == 2 && self.is_finite();
        if two_finite {
            // V = Γ/G₁ ⊔ Γ/G₂, E = Γ/H
            for w in words.iter().filter(|w| w.tail == 0) {
                let a = tree.vertex(self.coset_vertex(w, Some(0)));
                let b = tree.vertex(self.coset_vertex(w, Some(1)));
                tree.edges.push((a, b));
            }
        } else {
            for w in words.iter().filter(|w| w.tail == 0) {
                let center = tree.vertex(self.coset_vertex(w, None));
                for (i, f) in self.factors.iter().enumerate() {
                    match f {
                        Factor::Finite(_) => {
                            let v = tree.vertex(self.coset_vertex(w, Some(i)));
                            tree.edges.push((center, v));
                        }
                        Factor::Symbolic { .. } => {
                            let mut next = w.clone();
                            self.push(&mut next, Letter::Symbolic { factor: i, exponent: 1, h: 0 });
                            if next.length() <= radius {
                                let v = tree.vertex(self.coset_vertex(&next, None));
                                tree.edges.push((center, v));
                            }
                        }
                    }
                }
            }
        }
        Ok(tree)
    }

    /// `γG_i` (or `γH` when `factor` is `None`) as a canonical vertex.
    fn coset_vertex(&self, w: &NormalFormWord, factor: Option<usize>) -> TreeVertex {
        let mut syllables = w.syllables.clone();
        if let (Some(i), Some(last)) = (factor, syllables.last()) {
            if last.factor() == i {
                syllables.pop();
            }
        }
        TreeVertex { factor, syllables }
    }
}

/// A vertex `γG_i` of the Bass–Serre tree, keyed by the shortest normal
/// form in the coset; `factor = None` denotes `γH`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TreeVertex {
    pub factor: Option<usize>,
    pub syllables: Vec<Syllable>,
}

/// A finite subgraph of the Bass–Serre tree.
#[derive(Clone, Debug, Default)]
pub struct SerreTree {
    pub vertices: Vec<TreeVertex>,
    /// `(origin, terminus)` pairs of vertex positions.
    pub edges: Vec<(usize, usize)>,
    index: HashMap<TreeVertex, usize>,
}

impl SerreTree {
    fn vertex(&mut self, v: TreeVertex) -> usize {
        if let Some(&k) = self.index.get(&v) {
            return k;
        }
        self.vertices.push(v.clone());
        self.index.insert(v, self.vertices.len() - 1);
        self.vertices.len() - 1
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertices.len()];
        for &(a, b) in &self.edges {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    /// Connected with no cycles (and no repeated edges).
    pub fn is_tree(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 || self.edges.len() + 1 != n {
            return false;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(a, b) in &self.edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return false;
            }
            parent[ra] = rb;
        }
        true
    }

    /// Adjacency list, one line per vertex.
    pub fn adjacency(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut adj: BTreeMap<usize, Vec<usize>> = (0..self.vertices.len()).map(|v| (v, Vec::new())).collect();
        for &(a, b) in &self.edges {
            adj.get_mut(&a).unwrap().push(b);
            adj.get_mut(&b).unwrap().push(a);
        }
        adj
    }
}

/// `ℤ₄ *_{ℤ₂} ℤ₆`, the amalgam decomposition of `SL(2, ℤ)`.
pub fn sl2z() -> AmalgamSpec {
    let h = FiniteGroup::cyclic(2).expect("small order");
    let z4 = FiniteGroup::cyclic(4).expect("small order");
    let z6 = FiniteGroup::cyclic(6).expect("small order");
    let e4 = SubgroupEmbedding::from_map(&h, &z4, vec![0, 2]).expect("2ℤ₄");
    let e6 = SubgroupEmbedding::from_map(&h, &z6, vec![0, 3]).expect("3ℤ₆");
    AmalgamSpec::new(
        h,
        vec![Factor::Finite(FiniteFactor::new("Z4", z4, e4)), Factor::Finite(FiniteFactor::new("Z6", z6, e6))],
    )
    .expect("valid amalgam")
}

/// `S₄ *_{S₃} S₄` with `S₃` the stabilizer of the point 4 in both factors.
pub fn s4_s4() -> AmalgamSpec {
    let s3 = FiniteGroup::symmetric(3).expect("small order");
    let s4 = FiniteGroup::symmetric(4).expect("small order");
    let gens = [s3.find("(1 2)").expect("label"), s3.find("(1 2 3)").expect("label")];
    let images = [s4.find("(1 2)").expect("label"), s4.find("(1 2 3)").expect("label")];
    let emb = SubgroupEmbedding::from_generator_images(&s3, &s4, &gens, &images).expect("point stabilizer");
    let factor = |label: &str| Factor::Finite(FiniteFactor::new(label, s4.clone(), emb.clone()));
    AmalgamSpec::new(s3.clone(), vec![factor("S4a"), factor("S4b")]).expect("valid amalgam")
}

/// `𝔽₂ = ℤ * ℤ` with trivial amalgamated subgroup.
pub fn free_group_2() -> AmalgamSpec {
    AmalgamSpec::new(
        FiniteGroup::trivial(),
        vec![
            Factor::Symbolic { label: "Za".into(), generator: "a".into() },
            Factor::Symbolic { label: "Zb".into(), generator: "b".into() },
        ],
    )
    .expect("valid amalgam")
}
