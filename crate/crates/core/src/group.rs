//! Finite groups stored as dense Cayley tables, together with subgroup
//! embeddings, left cosets, double cosets and the small amount of
//! subgroup arithmetic needed downstream.
//!
//! Elements are indices `0..order`; index `0` is always the identity.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};

/// Default bound on the order of any constructed group.
pub const DEFAULT_MAX_ORDER: usize = 5040;

/// A finite group given by its full multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
    labels: Vec<String>,
}

impl FiniteGroup {
    /// Builds a group from a Cayley table, validating every group axiom.
    ///
    /// The identity is moved to index 0 if necessary; `labels`, when given,
    /// follow the same permutation.
    pub fn from_table(
        table: &[Vec<usize>],
        labels: Option<Vec<String>>,
        max_order: usize,
    ) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::NotAGroup("empty table".into()));
        }
        if n > max_order {
            return Err(Error::OrderTooLarge { limit: max_order });
        }
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(Error::NotAGroup(format!(
                    "{} labels for a table of order {n}",
                    l.len()
                )));
            }
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotAGroup(format!("row {i} has length {}", row.len())));
            }
            if let Some(&bad) = row.iter().find(|&&x| x >= n) {
                return Err(Error::NotAGroup(format!("entry {bad} out of range in row {i}")));
            }
            if !is_permutation(row.iter().copied(), n) {
                return Err(Error::NotAGroup(format!("row {i} is not a permutation")));
            }
        }
        for j in 0..n {
            if !is_permutation(table.iter().map(|row| row[j]), n) {
                return Err(Error::NotAGroup(format!("column {j} is not a permutation")));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::NotAGroup("no two-sided identity".into()))?;

        // relabel so that the identity sits at index 0
        let perm: Vec<usize> = (0..n)
            .map(|x| match x {
                x if x == identity => 0,
                0 => identity,
                x => x,
            })
            .collect();
        let mut mul = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                mul[perm[a] * n + perm[b]] = perm[table[a][b]] as u32;
            }
        }
        let labels = match labels {
            Some(l) => {
                let mut out = vec![String::new(); n];
                for (x, s) in l.into_iter().enumerate() {
                    out[perm[x]] = s;
                }
                out
            }
            None => (0..n).map(|x| x.to_string()).collect(),
        };
        let group = Self::assemble(n, mul, labels);
        group.check_associative()?;
        Ok(group)
    }

    /// Finishes construction from a Latin-square table whose identity is 0.
    fn assemble(order: usize, mul: Vec<u32>, labels: Vec<String>) -> Self {
        let mut inv = vec![0u32; order];
        for a in 0..order {
            let row = &mul[a * order..(a + 1) * order];
            inv[a] = row.iter().position(|&x| x == 0).expect("latin square") as u32;
        }
        Self { order, mul, inv, labels }
    }

    /// The cyclic group of order `n`, written additively with labels `0..n`.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Descriptor("cyclic(0)".into()));
        }
        if n > DEFAULT_MAX_ORDER {
            return Err(Error::OrderTooLarge { limit: DEFAULT_MAX_ORDER });
        }
        let mul = (0..n * n).map(|k| ((k / n + k % n) % n) as u32).collect();
        Ok(Self::assemble(n, mul, (0..n).map(|x| x.to_string()).collect()))
    }

    /// The symmetric group on `{1, …, n}` with cycle-notation labels.
    pub fn symmetric(n: usize) -> Result<Self> {
        Self::symmetric_bounded(n, DEFAULT_MAX_ORDER)
    }

    pub fn symmetric_bounded(n: usize, max_order: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Descriptor("symmetric(0)".into()));
        }
        if n == 1 {
            return Self::from_permutations(&[], 1, max_order);
        }
        let transposition: Vec<usize> = (0..n).map(|i| [1, 0].get(i).copied().unwrap_or(i)).collect();
        let long_cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        Self::from_permutations(&[transposition, long_cycle], n, max_order)
    }

    /// The dihedral group of order `2n`, elements `r^k` and `r^k s`.
    pub fn dihedral(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Descriptor("dihedral(0)".into()));
        }
        let order = 2 * n;
        if order > DEFAULT_MAX_ORDER {
            return Err(Error::OrderTooLarge { limit: DEFAULT_MAX_ORDER });
        }
        // index k + n*f  <->  r^k s^f ;  s r = r^{-1} s
        let mut mul = vec![0u32; order * order];
        for a in 0..order {
            let (ka, fa) = (a % n, a / n);
            for b in 0..order {
                let (kb, fb) = (b % n, b / n);
                let k = if fa == 0 { (ka + kb) % n } else { (ka + n - kb) % n };
                mul[a * order + b] = (k + n * ((fa + fb) % 2)) as u32;
            }
        }
        let labels = (0..order)
            .map(|x| {
                let (k, f) = (x % n, x / n);
                let rot = match k {
                    0 => String::new(),
                    1 => "r".to_string(),
                    k => format!("r^{k}"),
                };
                match (rot.is_empty(), f) {
                    (true, 0) => "e".to_string(),
                    (true, _) => "s".to_string(),
                    (false, 0) => rot,
                    (false, _) => format!("{rot} s"),
                }
            })
            .collect();
        Ok(Self::assemble(order, mul, labels))
    }

    /// The quaternion group `{±1, ±i, ±j, ±k}`.
    pub fn quaternion8() -> Self {
        // index 2u + s  <->  (-1)^s * unit[u]
        const UNITS: [&str; 4] = ["1", "i", "j", "k"];
        // unit product table: (unit, sign)
        const PROD: [[(usize, usize); 4]; 4] = [
            [(0, 0), (1, 0), (2, 0), (3, 0)],
            [(1, 0), (0, 1), (3, 0), (2, 1)],
            [(2, 0), (3, 1), (0, 1), (1, 0)],
            [(3, 0), (2, 0), (1, 1), (0, 1)],
        ];
        let mut mul = vec![0u32; 64];
        for a in 0..8 {
            for b in 0..8 {
                let (u, s) = PROD[a / 2][b / 2];
                mul[a * 8 + b] = (2 * u + (s + a % 2 + b % 2) % 2) as u32;
            }
        }
        let labels = (0..8)
            .map(|x| {
                let sign = if x % 2 == 1 { "-" } else { "" };
                format!("{sign}{}", UNITS[x / 2])
            })
            .collect();
        Self::assemble(8, mul, labels)
    }

    /// The direct product `a × b`; the pair `(x, y)` has index `x*|b| + y`.
    pub fn direct_product(a: &Self, b: &Self) -> Result<Self> {
        let n = a.order * b.order;
        if n > DEFAULT_MAX_ORDER {
            return Err(Error::OrderTooLarge { limit: DEFAULT_MAX_ORDER });
        }
        let mut mul = vec![0u32; n * n];
        for x in 0..n {
            let (x1, x2) = (x / b.order, x % b.order);
            for y in 0..n {
                let (y1, y2) = (y / b.order, y % b.order);
                mul[x * n + y] = (a.mul(x1, y1) * b.order + b.mul(x2, y2)) as u32;
            }
        }
        let labels = (0..n)
            .map(|x| format!("({},{})", a.label(x / b.order), b.label(x % b.order)))
            .collect();
        Ok(Self::assemble(n, mul, labels))
    }

    /// Closes a set of permutations of `{0, …, degree-1}` under composition.
    ///
    /// Composition acts right to left: `(p·q)(i) = p(q(i))`. Elements are
    /// numbered in breadth-first order from the identity.
    pub fn from_permutations(gens: &[Vec<usize>], degree: usize, max_order: usize) -> Result<Self> {
        for g in gens {
            if g.len() != degree || !is_permutation(g.iter().copied(), degree) {
                return Err(Error::Descriptor(format!(
                    "{g:?} is not a permutation of degree {degree}"
                )));
            }
        }
        let identity: Vec<usize> = (0..degree).collect();
        let mut elements = vec![identity.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(identity, 0)]);
        // right Cayley graph: right[s][x] = x·gens[s]; parent links rebuild rows
        let mut right = vec![Vec::new(); gens.len()];
        let mut parent: Vec<(usize, usize)> = vec![(0, 0)];
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for (s, g) in gens.iter().enumerate() {
                let prod: Vec<usize> = (0..degree).map(|i| elements[x][g[i]]).collect();
                let next = match index.get(&prod) {
                    Some(&y) => y,
                    None => {
                        let y = elements.len();
                        if y >= max_order {
                            return Err(Error::OrderTooLarge { limit: max_order });
                        }
                        index.insert(prod.clone(), y);
                        elements.push(prod);
                        parent.push((x, s));
                        queue.push_back(y);
                        y
                    }
                };
                if right[s].len() <= x {
                    right[s].resize(x + 1, usize::MAX);
                }
                right[s][x] = next;
            }
        }
        let n = elements.len();
        let mut mul = vec![0u32; n * n];
        for a in 0..n {
            let row = &mut mul[a * n..(a + 1) * n];
            row[0] = a as u32;
            for y in 1..n {
                let (p, s) = parent[y];
                row[y] = right[s][row[p] as usize] as u32;
            }
        }
        let labels = elements.iter().map(|p| cycle_notation(p)).collect();
        Ok(Self::assemble(n, mul, labels))
    }

    /// Trivial group of order one.
    pub fn trivial() -> Self {
        Self::assemble(1, vec![0], vec!["e".into()])
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    /// `b⁻¹ a b`
    #[inline]
    pub fn conjugate(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(self.inv(b), a), b)
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Looks an element up by label. Cycle notation is matched up to
    /// rewriting (`(2 1)` finds `(1 2)`).
    pub fn find(&self, label: &str) -> Option<usize> {
        let wanted = label.trim();
        if let Some(i) = self.labels.iter().position(|l| l == wanted) {
            return Some(i);
        }
        let squashed: String = wanted.split_whitespace().collect::<Vec<_>>().join(" ");
        if let Some(i) = self.labels.iter().position(|l| *l == squashed) {
            return Some(i);
        }
        let canonical = parse_cycles(wanted).map(|p| cycle_notation(&p))?;
        self.labels.iter().position(|l| *l == canonical)
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Least common multiple of the element orders.
    pub fn exponent(&self) -> usize {
        (0..self.order).fold(1, |acc, a| num::integer::lcm(acc, self.element_order(a)))
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Light's associativity test: `(x a) y = x (a y)` for `a` in a set that
    /// generates the table under its own product. Linear in the size of the
    /// generating set instead of cubic in the order.
    fn check_associative(&self) -> Result<()> {
        let n = self.order;
        for a in self.magma_generators() {
            for x in 0..n {
                let xa = self.mul(x, a);
                for y in 0..n {
                    if self.mul(xa, y) != self.mul(x, self.mul(a, y)) {
                        return Err(Error::NotAssociative(x, a, y));
                    }
                }
            }
        }
        Ok(())
    }

    fn magma_generators(&self) -> Vec<usize> {
        let n = self.order;
        let mut closed = vec![false; n];
        let mut members: Vec<usize> = Vec::new();
        let mut gens = Vec::new();
        for candidate in 0..n {
            if closed[candidate] {
                continue;
            }
            gens.push(candidate);
            let mut frontier = vec![candidate];
            closed[candidate] = true;
            while let Some(y) = frontier.pop() {
                members.push(y);
                for &z in &members {
                    for p in [self.mul(y, z), self.mul(z, y)] {
                        if !closed[p] {
                            closed[p] = true;
                            frontier.push(p);
                        }
                    }
                }
            }
        }
        gens
    }

    /// Checks every group axiom by brute force over all triples.
    pub fn verify_axioms_exhaustive(&self) -> bool {
        let n = self.order;
        let assoc = (0..n).all(|a| {
            (0..n).all(|b| {
                let ab = self.mul(a, b);
                (0..n).all(|c| self.mul(ab, c) == self.mul(a, self.mul(b, c)))
            })
        });
        let unit = (0..n).all(|a| self.mul(0, a) == a && self.mul(a, 0) == a);
        let inverse = (0..n).all(|a| self.mul(self.inv(a), a) == 0 && self.mul(a, self.inv(a)) == 0);
        assoc && unit && inverse
    }
}

fn is_permutation(values: impl Iterator<Item = usize>, n: usize) -> bool {
    let mut seen = vec![false; n];
    let mut count = 0;
    for v in values {
        if v >= n || seen[v] {
            return false;
        }
        seen[v] = true;
        count += 1;
    }
    count == n
}

/// Cycle notation on points `1..=degree`, fixed points omitted, `()` for the
/// identity. Each cycle starts at its least point; cycles are ordered by it.
pub fn cycle_notation(perm: &[usize]) -> String {
    let mut seen = vec![false; perm.len()];
    let mut out = String::new();
    for start in 0..perm.len() {
        if seen[start] || perm[start] == start {
            continue;
        }
        let mut cycle = vec![start + 1];
        seen[start] = true;
        let mut x = perm[start];
        while x != start {
            seen[x] = true;
            cycle.push(x + 1);
            x = perm[x];
        }
        let body: Vec<String> = cycle.iter().map(|c| c.to_string()).collect();
        out.push_str(&format!("({})", body.join(" ")));
    }
    if out.is_empty() {
        "()".into()
    } else {
        out
    }
}

/// Parses cycle notation such as `(1 2)(3 4)` or `(1,2,3)` into a 0-based
/// permutation of the smallest degree that contains every point.
pub fn parse_cycles(text: &str) -> Option<Vec<usize>> {
    let text = text.trim();
    if !text.starts_with('(') {
        return None;
    }
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for chunk in text.split(')') {
        let chunk = chunk.trim();
        if chunk.is_empty() {
            continue;
        }
        let body = chunk.strip_prefix('(')?;
        let points: Option<Vec<usize>> = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<usize>().ok().filter(|&p| p >= 1))
            .collect();
        cycles.push(points?);
    }
    let degree = cycles.iter().flatten().copied().max().unwrap_or(0);
    let mut perm: Vec<usize> = (0..degree).collect();
    let mut touched = vec![false; degree];
    for cycle in &cycles {
        for (k, &p) in cycle.iter().enumerate() {
            if touched[p - 1] {
                return None;
            }
            touched[p - 1] = true;
            perm[p - 1] = cycle[(k + 1) % cycle.len()] - 1;
        }
    }
    Some(perm)
}

/// An injective homomorphism `H → G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupEmbedding {
    image: Vec<usize>,
    preimage: Vec<Option<usize>>,
}

impl SubgroupEmbedding {
    /// Validates an explicit element map.
    pub fn from_map(h: &FiniteGroup, g: &FiniteGroup, image: Vec<usize>) -> Result<Self> {
        if image.len() != h.order() {
            return Err(Error::BadEmbedding("map does not cover the subgroup".into()));
        }
        if image.iter().any(|&x| x >= g.order()) {
            return Err(Error::BadEmbedding("image outside the ambient group".into()));
        }
        if image[0] != g.identity() {
            return Err(Error::BadEmbedding("identity is not mapped to identity".into()));
        }
        for a in 0..h.order() {
            for b in 0..h.order() {
                if image[h.mul(a, b)] != g.mul(image[a], image[b]) {
                    return Err(Error::BadEmbedding(format!(
                        "image({}·{}) != image({})·image({})",
                        h.label(a),
                        h.label(b),
                        h.label(a),
                        h.label(b)
                    )));
                }
            }
        }
        let mut preimage = vec![None; g.order()];
        for (a, &x) in image.iter().enumerate() {
            if preimage[x].replace(a).is_some() {
                return Err(Error::BadEmbedding("map is not injective".into()));
            }
        }
        Ok(Self { image, preimage })
    }

    /// Extends generator images to the whole of `H`.
    pub fn from_generator_images(
        h: &FiniteGroup,
        g: &FiniteGroup,
        gens: &[usize],
        images: &[usize],
    ) -> Result<Self> {
        if gens.len() != images.len() {
            return Err(Error::BadEmbedding(format!(
                "{} generators but {} images",
                gens.len(),
                images.len()
            )));
        }
        let mut image = vec![usize::MAX; h.order()];
        image[0] = g.identity();
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for (&s, &t) in gens.iter().zip(images) {
                let y = h.mul(x, s);
                let target = g.mul(image[x], t);
                if image[y] == usize::MAX {
                    image[y] = target;
                    queue.push_back(y);
                } else if image[y] != target {
                    return Err(Error::BadEmbedding(format!(
                        "generator images are inconsistent at {}",
                        h.label(y)
                    )));
                }
            }
        }
        if image.contains(&usize::MAX) {
            return Err(Error::BadEmbedding("listed generators do not generate the subgroup".into()));
        }
        Self::from_map(h, g, image)
    }

    /// `G ⊆ G`.
    pub fn full(g: &FiniteGroup) -> Self {
        Self {
            image: (0..g.order()).collect(),
            preimage: (0..g.order()).map(Some).collect(),
        }
    }

    #[inline]
    pub fn image(&self, h: usize) -> usize {
        self.image[h]
    }

    pub fn images(&self) -> &[usize] {
        &self.image
    }

    /// The subgroup element mapping to `x`, if `x` lies in the image.
    #[inline]
    pub fn preimage(&self, x: usize) -> Option<usize> {
        self.preimage[x]
    }

    pub fn subgroup_order(&self) -> usize {
        self.image.len()
    }
}

/// Left coset representatives `Ω` of `G/H` with identity first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetSpace {
    reps: Vec<usize>,
    coset_of: Vec<usize>,
    tail: Vec<usize>,
}

impl CosetSpace {
    /// Representatives are the least element index of each coset.
    pub fn left_cosets(g: &FiniteGroup, emb: &SubgroupEmbedding) -> Self {
        let mut chosen = Vec::new();
        let mut taken = vec![false; g.order()];
        for x in 0..g.order() {
            if !taken[x] {
                chosen.push(x);
                for &y in emb.images() {
                    taken[g.mul(x, y)] = true;
                }
            }
        }
        Self::build(g, emb, chosen).expect("least elements are valid representatives")
    }

    /// Uses caller-chosen representatives; the identity must come first.
    pub fn with_representatives(
        g: &FiniteGroup,
        emb: &SubgroupEmbedding,
        reps: Vec<usize>,
    ) -> Result<Self> {
        if reps.first() != Some(&g.identity()) {
            return Err(Error::BadRepresentatives("identity must be the first representative".into()));
        }
        Self::build(g, emb, reps)
    }

    fn build(g: &FiniteGroup, emb: &SubgroupEmbedding, reps: Vec<usize>) -> Result<Self> {
        let n = g.order();
        if reps.len() * emb.subgroup_order() != n {
            return Err(Error::BadRepresentatives(format!(
                "{} representatives for index {}",
                reps.len(),
                n / emb.subgroup_order()
            )));
        }
        let mut coset_of = vec![usize::MAX; n];
        let mut tail = vec![usize::MAX; n];
        for (c, &r) in reps.iter().enumerate() {
            if r >= n {
                return Err(Error::BadRepresentatives(format!("{r} is not an element")));
            }
            for (h, &y) in emb.images().iter().enumerate() {
                let x = g.mul(r, y);
                if coset_of[x] != usize::MAX {
                    return Err(Error::BadRepresentatives(format!(
                        "{} and another representative share a coset",
                        g.label(r)
                    )));
                }
                coset_of[x] = c;
                tail[x] = h;
            }
        }
        Ok(Self { reps, coset_of, tail })
    }

    pub fn representatives(&self) -> &[usize] {
        &self.reps
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Position in `representatives()` of the coset containing `x`.
    #[inline]
    pub fn coset_of(&self, x: usize) -> usize {
        self.coset_of[x]
    }

    /// Splits `x = rep · image(h)`, returning `(coset position, h)`.
    #[inline]
    pub fn split(&self, x: usize) -> (usize, usize) {
        (self.coset_of[x], self.tail[x])
    }
}

/// Representatives of `H\G/H`, each also a left-coset representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleCosetDecomposition {
    reps: Vec<usize>,
    class_of_coset: Vec<usize>,
    class_of: Vec<usize>,
}

impl DoubleCosetDecomposition {
    /// Orbits of `H` on the left cosets; each orbit is represented by the
    /// least-index element of `omega` lying in it, identity first.
    pub fn compute(g: &FiniteGroup, emb: &SubgroupEmbedding, omega: &CosetSpace) -> Self {
        let orbits = Self::orbits(g, emb, omega);
        let mut reps: Vec<usize> = orbits
            .iter()
            .map(|orbit| orbit.iter().map(|&c| omega.representatives()[c]).min().unwrap())
            .collect();
        // the identity's orbit is {identity coset}; it sorts first already
        reps.sort_unstable();
        Self::build(g, emb, omega, reps).expect("orbit minima are valid")
    }

    pub fn with_representatives(
        g: &FiniteGroup,
        emb: &SubgroupEmbedding,
        omega: &CosetSpace,
        reps: Vec<usize>,
    ) -> Result<Self> {
        if reps.first() != Some(&g.identity()) {
            return Err(Error::BadRepresentatives("identity must be the first double-coset representative".into()));
        }
        Self::build(g, emb, omega, reps)
    }

    fn orbits(g: &FiniteGroup, emb: &SubgroupEmbedding, omega: &CosetSpace) -> Vec<Vec<usize>> {
        let mut seen = vec![false; omega.len()];
        let mut orbits = Vec::new();
        for c in 0..omega.len() {
            if seen[c] {
                continue;
            }
            let rep = omega.representatives()[c];
            let mut orbit: Vec<usize> = emb
                .images()
                .iter()
                .map(|&h| omega.coset_of(g.mul(h, rep)))
                .collect();
            orbit.sort_unstable();
            orbit.dedup();
            for &d in &orbit {
                seen[d] = true;
            }
            orbits.push(orbit);
        }
        orbits
    }

    fn build(
        g: &FiniteGroup,
        emb: &SubgroupEmbedding,
        omega: &CosetSpace,
        reps: Vec<usize>,
    ) -> Result<Self> {
        let mut class_of_coset = vec![usize::MAX; omega.len()];
        for (k, &x) in reps.iter().enumerate() {
            if x >= g.order() || omega.representatives()[omega.coset_of(x)] != x {
                return Err(Error::BadRepresentatives(format!(
                    "{} is not a left-coset representative",
                    g.label(x.min(g.order() - 1))
                )));
            }
            for &h in emb.images() {
                let c = omega.coset_of(g.mul(h, x));
                if class_of_coset[c] != usize::MAX && class_of_coset[c] != k {
                    return Err(Error::BadRepresentatives(format!(
                        "{} shares a double coset with another representative",
                        g.label(x)
                    )));
                }
                class_of_coset[c] = k;
            }
        }
        if class_of_coset.contains(&usize::MAX) {
            return Err(Error::BadRepresentatives("some double coset has no representative".into()));
        }
        let class_of = (0..g.order()).map(|x| class_of_coset[omega.coset_of(x)]).collect();
        Ok(Self { reps, class_of_coset, class_of })
    }

    pub fn representatives(&self) -> &[usize] {
        &self.reps
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Double coset index of an element.
    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x]
    }

    /// Double coset index of a left coset (by position in `Ω`).
    pub fn class_of_coset(&self, c: usize) -> usize {
        self.class_of_coset[c]
    }

    /// Number of group elements in each double coset.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.reps.len()];
        for &k in &self.class_of {
            sizes[k] += 1;
        }
        sizes
    }
}

/// `H(x) = {h ∈ H : h x H = x H} = H ∩ xHx⁻¹`, as sorted subgroup indices.
pub fn coset_stabilizer(g: &FiniteGroup, emb: &SubgroupEmbedding, x: usize) -> Vec<usize> {
    (0..emb.subgroup_order())
        .filter(|&h| emb.preimage(g.conjugate(emb.image(h), x)).is_some())
        .collect()
}

/// The largest subgroup of `H` normal in `G`: `⋂_g gHg⁻¹`.
pub fn normal_core(g: &FiniteGroup, emb: &SubgroupEmbedding) -> Vec<usize> {
    (0..emb.subgroup_order())
        .filter(|&h| (0..g.order()).all(|y| emb.preimage(g.conjugate(emb.image(h), y)).is_some()))
        .collect()
}

/// Conjugacy classes ordered by least element; the identity class is first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugacyClasses {
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
}

impl ConjugacyClasses {
    pub fn compute(g: &FiniteGroup) -> Self {
        let mut class_of = vec![usize::MAX; g.order()];
        let mut classes = Vec::new();
        for x in 0..g.order() {
            if class_of[x] != usize::MAX {
                continue;
            }
            let mut class: Vec<usize> = (0..g.order()).map(|y| g.conjugate(x, y)).collect();
            class.sort_unstable();
            class.dedup();
            for &y in &class {
                class_of[y] = classes.len();
            }
            classes.push(class);
        }
        Self { classes, class_of }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class(&self, k: usize) -> &[usize] {
        &self.classes[k]
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x]
    }

    pub fn representative(&self, k: usize) -> usize {
        self.classes[k][0]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }
}

pub fn conjugacy_classes(g: &FiniteGroup) -> ConjugacyClasses {
    ConjugacyClasses::compute(g)
}

pub fn left_cosets(g: &FiniteGroup, emb: &SubgroupEmbedding) -> CosetSpace {
    CosetSpace::left_cosets(g, emb)
}

pub fn double_cosets(g: &FiniteGroup, emb: &SubgroupEmbedding, omega: &CosetSpace) -> DoubleCosetDecomposition {
    DoubleCosetDecomposition::compute(g, emb, omega)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3_in_s4() -> (FiniteGroup, FiniteGroup, SubgroupEmbedding) {
        let s4 = FiniteGroup::symmetric(4).unwrap();
        let s3 = FiniteGroup::symmetric(3).unwrap();
        let gens: Vec<usize> = ["(1 2)", "(1 2 3)"].iter().map(|l| s3.find(l).unwrap()).collect();
        let imgs: Vec<usize> = ["(1 2)", "(1 2 3)"].iter().map(|l| s4.find(l).unwrap()).collect();
        let emb = SubgroupEmbedding::from_generator_images(&s3, &s4, &gens, &imgs).unwrap();
        (s4, s3, emb)
    }

    fn index_embedding(small: &FiniteGroup, big: &FiniteGroup, gen: &str, image: &str) -> SubgroupEmbedding {
        SubgroupEmbedding::from_generator_images(
            small,
            big,
            &[small.find(gen).unwrap()],
            &[big.find(image).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn trivial_group() {
        let g = FiniteGroup::cyclic(1).unwrap();
        assert_eq!(g.order(), 1);
        assert!(g.verify_axioms_exhaustive());
        assert_eq!(conjugacy_classes(&g).len(), 1);
    }

    #[test]
    fn symmetric_four_matches_closure_of_transpositions() {
        // oracle: close all transpositions of {0..3} by brute force
        let mut set: Vec<Vec<usize>> = vec![(0..4).collect()];
        loop {
            let mut grew = false;
            for p in set.clone() {
                for i in 0..4 {
                    for j in i + 1..4 {
                        let mut q = p.clone();
                        q.swap(i, j);
                        if !set.contains(&q) {
                            set.push(q);
                            grew = true;
                        }
                    }
                }
            }
            if !grew {
                break;
            }
        }
        assert_eq!(set.len(), 24);
        let s4 = FiniteGroup::symmetric(4).unwrap();
        assert_eq!(s4.order(), 24);
        assert!(s4.verify_axioms_exhaustive());
    }

    #[test]
    fn product_of_c2_c3_is_cyclic_six() {
        let p = FiniteGroup::direct_product(&FiniteGroup::cyclic(2).unwrap(), &FiniteGroup::cyclic(3).unwrap()).unwrap();
        let c6 = FiniteGroup::cyclic(6).unwrap();
        let orders = |g: &FiniteGroup| {
            let mut v: Vec<usize> = (0..g.order()).map(|x| g.element_order(x)).collect();
            v.sort_unstable();
            v
        };
        assert_eq!(orders(&p), orders(&c6));
        assert_eq!(orders(&p), vec![1, 2, 3, 3, 6, 6]);
    }

    #[test]
    fn table_validation_rejects_non_associative_latin_square() {
        // a loop of order 5 that is not a group
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let err = FiniteGroup::from_table(&t, None, DEFAULT_MAX_ORDER).unwrap_err();
        assert!(matches!(err, Error::NotAssociative(..)));
    }

    #[test]
    fn table_identity_is_moved_to_front() {
        // Z3 with identity stored at index 2
        let t = vec![vec![1, 2, 0], vec![2, 0, 1], vec![0, 1, 2]];
        let g = FiniteGroup::from_table(&t, Some(vec!["a".into(), "b".into(), "e".into()]), 10).unwrap();
        assert_eq!(g.label(0), "e");
        assert!(g.verify_axioms_exhaustive());
    }

    #[test]
    fn order_bound_enforced() {
        assert_eq!(
            FiniteGroup::symmetric_bounded(5, 100).unwrap_err(),
            Error::OrderTooLarge { limit: 100 }
        );
    }

    #[test]
    fn families_are_groups() {
        for g in [
            FiniteGroup::dihedral(4).unwrap(),
            FiniteGroup::dihedral(1).unwrap(),
            FiniteGroup::quaternion8(),
            FiniteGroup::symmetric(3).unwrap(),
            FiniteGroup::cyclic(12).unwrap(),
        ] {
            assert!(g.verify_axioms_exhaustive());
        }
        let q = FiniteGroup::quaternion8();
        let i = q.find("i").unwrap();
        let j = q.find("j").unwrap();
        assert_eq!(q.label(q.mul(i, j)), "k");
        assert_eq!(q.label(q.mul(j, i)), "-k");
        assert_eq!(q.exponent(), 4);
    }

    #[test]
    fn cycle_labels_round_trip() {
        let s4 = FiniteGroup::symmetric(4).unwrap();
        assert!(s4.find("(2 1)").is_some());
        assert_eq!(s4.find("(3 4)(1 2)"), s4.find("(1 2)(3 4)"));
        assert_eq!(s4.find("()"), Some(0));
        assert_eq!(parse_cycles("(1 2)(2 3)"), None);
    }

    #[test]
    fn cosets_of_z2_in_z4() {
        let z4 = FiniteGroup::cyclic(4).unwrap();
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let emb = index_embedding(&z2, &z4, "1", "2");
        let omega = left_cosets(&z4, &emb);
        assert_eq!(omega.representatives(), &[0, 1]);
        for x in 0..4 {
            for &h in emb.images() {
                assert_eq!(omega.coset_of(z4.mul(x, h)), omega.coset_of(x));
            }
        }
    }

    #[test]
    fn full_embedding_has_single_coset() {
        let g = FiniteGroup::dihedral(3).unwrap();
        let emb = SubgroupEmbedding::full(&g);
        let omega = left_cosets(&g, &emb);
        assert_eq!(omega.representatives(), &[0]);
        assert_eq!(double_cosets(&g, &emb, &omega).len(), 1);
        assert_eq!(normal_core(&g, &emb).len(), g.order());
    }

    #[test]
    fn s3_in_s4_cosets_and_double_cosets() {
        let (s4, s3, emb) = s3_in_s4();
        let omega = left_cosets(&s4, &emb);
        assert_eq!(omega.len(), 4);
        let dc = double_cosets(&s4, &emb, &omega);
        assert_eq!(dc.len(), 2);
        assert_eq!(dc.representatives()[0], 0);
        let x = s4.find("(1 2)(3 4)").unwrap();
        assert_eq!(dc.class_of(x), 1);
        assert_eq!(dc.sizes().iter().sum::<usize>(), 24);
        assert_eq!(dc.sizes(), vec![6, 18]);

        let stab = coset_stabilizer(&s4, &emb, x);
        assert_eq!(stab.len(), 2);
        assert!(stab.contains(&s3.find("(1 2)").unwrap()));
        assert_eq!(normal_core(&s4, &emb), vec![0]);
    }

    #[test]
    fn central_subgroup_double_cosets_are_cosets() {
        let z6 = FiniteGroup::cyclic(6).unwrap();
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let emb = index_embedding(&z2, &z6, "1", "3");
        let omega = left_cosets(&z6, &emb);
        let dc = double_cosets(&z6, &emb, &omega);
        assert_eq!(dc.len(), 3);
        for x in 0..6 {
            assert_eq!(coset_stabilizer(&z6, &emb, x), vec![0, 1]);
        }
        assert_eq!(normal_core(&z6, &emb), vec![0, 1]);
    }

    #[test]
    fn custom_representatives_are_validated() {
        let (s4, _, emb) = s3_in_s4();
        let omega = left_cosets(&s4, &emb);
        let mut reps = omega.representatives().to_vec();
        reps[1] = reps[2];
        assert!(CosetSpace::with_representatives(&s4, &emb, reps).is_err());
        let x = s4.find("(1 2)(3 4)").unwrap();
        let (c, _) = omega.split(x);
        let mut reps = omega.representatives().to_vec();
        reps[c] = x;
        let omega2 = CosetSpace::with_representatives(&s4, &emb, reps).unwrap();
        let dc = DoubleCosetDecomposition::with_representatives(&s4, &emb, &omega2, vec![0, x]).unwrap();
        assert_eq!(dc.len(), 2);
        assert!(DoubleCosetDecomposition::with_representatives(&s4, &emb, &omega, vec![0, x]).is_err());
    }

    #[test]
    fn bad_generator_images_rejected() {
        let z4 = FiniteGroup::cyclic(4).unwrap();
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let r = SubgroupEmbedding::from_generator_images(&z2, &z4, &[1], &[1]);
        assert!(matches!(r, Err(Error::BadEmbedding(_))));
    }

    #[test]
    fn s3_classes() {
        let s3 = FiniteGroup::symmetric(3).unwrap();
        let mut sizes = conjugacy_classes(&s3).sizes();
        assert_eq!(sizes[0], 1);
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 2, 3]);
        assert_eq!(conjugacy_classes(&FiniteGroup::cyclic(7).unwrap()).len(), 7);
    }
}
