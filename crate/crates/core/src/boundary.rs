//! Cylinder sets of the boundary `Ω` and the action of `Γ` on them.

use std::fmt;

use crate::amalgam::{AmalgamSpec, FiniteFactor, Letter, NormalFormWord, Syllable};
use crate::error::{Error, Result};

/// `Ω(x₁ ⋯ x_m)`: boundary points whose first `m` letters are the prefix.
/// Letters are `(factor, coset position in Ω_factor)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Cylinder {
    prefix: Vec<(usize, usize)>,
}

impl Cylinder {
    /// All of `Ω`.
    pub fn whole() -> Self {
        Self::default()
    }

    /// Checks admissibility against the spec.
    pub fn new(spec: &AmalgamSpec, prefix: Vec<(usize, usize)>) -> Result<Self> {
        let factors = spec.finite_factors("boundary cylinders")?;
        for (k, &(i, x)) in prefix.iter().enumerate() {
            let f = factors
                .get(i)
                .ok_or_else(|| Error::Degenerate(format!("factor {i} does not exist")))?;
            if x == 0 || x >= f.index() {
                return Err(Error::Degenerate(format!("letter {k} is not a nontrivial coset of factor {i}")));
            }
            if k > 0 && prefix[k - 1].0 == i {
                return Err(Error::Degenerate(format!("letters {} and {k} lie in the same factor", k - 1)));
            }
        }
        Ok(Self { prefix })
    }

    pub fn prefix(&self) -> &[(usize, usize)] {
        &self.prefix
    }

    pub fn depth(&self) -> usize {
        self.prefix.len()
    }

    /// The factor of the last letter, if any.
    pub fn last_factor(&self) -> Option<usize> {
        self.prefix.last().map(|&(i, _)| i)
    }

    /// Whether `self ⊆ other`.
    pub fn is_within(&self, other: &Cylinder) -> bool {
        self.prefix.starts_with(&other.prefix)
    }

    /// Cylinders are nested or disjoint.
    pub fn is_disjoint(&self, other: &Cylinder) -> bool {
        !self.is_within(other) && !other.is_within(self)
    }

    fn push(&self, letter: (usize, usize)) -> Self {
        let mut prefix = self.prefix.clone();
        prefix.push(letter);
        Self { prefix }
    }

    /// The element `x₁ ⋯ x_m` of `Γ`.
    pub fn word(&self, spec: &AmalgamSpec) -> NormalFormWord {
        let letters: Vec<Letter> = self.prefix.iter().map(|&(i, x)| rep_letter(spec, i, x)).collect();
        spec.reduce(&letters)
    }

    /// The cylinder of a word's syllables, ignoring its tail.
    pub fn of_word(w: &NormalFormWord) -> Result<Self> {
        let prefix = w
            .syllables()
            .iter()
            .map(|s| match *s {
                Syllable::Coset { factor, coset } => Ok((factor, coset)),
                Syllable::Power { .. } => Err(Error::SymbolicFactor("boundary cylinders")),
            })
            .collect::<Result<_>>()?;
        Ok(Self { prefix })
    }

    /// Text form `[[i, "label"], ...]` with element labels from the factors.
    pub fn display(&self, spec: &AmalgamSpec) -> String {
        let parts: Vec<String> = self
            .prefix
            .iter()
            .map(|&(i, x)| {
                let f = spec.factor(i).as_finite().expect("finite factor");
                format!("[{i}, \"{}\"]", f.group.label(f.omega.representatives()[x]))
            })
            .collect();
        format!("[{}]", parts.join(", "))
    }
}

impl fmt::Display for Cylinder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.prefix.is_empty() {
            return write!(f, "Ω");
        }
        write!(f, "Ω(")?;
        for (k, (i, x)) in self.prefix.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{i}:{x}")?;
        }
        write!(f, ")")
    }
}

fn rep_letter(spec: &AmalgamSpec, i: usize, x: usize) -> Letter {
    let f = spec.factor(i).as_finite().expect("finite factor");
    Letter::Finite { factor: i, element: f.omega.representatives()[x] }
}

fn finite(spec: &AmalgamSpec, i: usize) -> &FiniteFactor {
    spec.factor(i).as_finite().expect("finite factor")
}

/// Letters that may follow a prefix ending in factor `last`.
fn extensions(spec: &AmalgamSpec, last: Option<usize>) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..spec.num_factors())
        .filter(move |&i| Some(i) != last)
        .flat_map(move |i| (1..finite(spec, i).index()).map(move |x| (i, x)))
}

/// All admissible extensions of `c` to depth `depth`, in lexicographic order.
pub fn refine(spec: &AmalgamSpec, c: &Cylinder, depth: usize) -> Result<Vec<Cylinder>> {
    spec.finite_factors("refine")?;
    let mut layer = vec![c.clone()];
    for _ in c.depth()..depth {
        layer = layer
            .iter()
            .flat_map(|p| extensions(spec, p.last_factor()).map(move |l| p.push(l)))
            .collect();
    }
    Ok(layer)
}

/// Every cylinder of depth exactly `depth`.
pub fn cylinders(spec: &AmalgamSpec, depth: usize) -> Result<Vec<Cylinder>> {
    refine(spec, &Cylinder::whole(), depth)
}

/// `γ · c` as a disjoint union of cylinders, sorted.
///
/// `c` is refined only where `γ` cancels into it: once the reduced word
/// `γ x₁ ⋯ x_d` ends in the factor of `x_d`, later letters are merely
/// permuted by the tail in `H`, so the image is the cylinder of that word.
pub fn act(spec: &AmalgamSpec, gamma: &NormalFormWord, c: &Cylinder) -> Result<Vec<Cylinder>> {
    spec.finite_factors("act")?;
    if c.depth() == 0 {
        return Ok(vec![Cylinder::whole()]);
    }
    let mut out = Vec::new();
    let mut stack = vec![(spec.multiply(gamma, &c.word(spec))?, c.clone())];
    while let Some((w, cyl)) = stack.pop() {
        let last = cyl.last_factor();
        if w.syllables().last().map(Syllable::factor) == last {
            out.push(Cylinder::of_word(&w)?);
            continue;
        }
        for l in extensions(spec, last) {
            let mut next = w.clone();
            spec.push(&mut next, rep_letter(spec, l.0, l.1));
            stack.push((next, cyl.push(l)));
        }
    }
    out.sort();
    Ok(out)
}

/// A `γ` with `γ · (Ω ∖ inside_u) ⊆ v`, where `inside_u = Ω(γ₁ ⋯ γ_m)` is a
/// cylinder contained in `U` and `v = Ω(g₁ ⋯ g_k)`.
///
/// `γ = g₁ ⋯ g_k y γ_m⁻¹ ⋯ γ₁⁻¹`, where the connector `y` is omitted when
/// `g_k` and `γ_m` lie in different factors and otherwise is a nontrivial
/// representative from another factor.
pub fn strong_boundary_witness(spec: &AmalgamSpec, inside_u: &Cylinder, v: &Cylinder) -> Result<NormalFormWord> {
    spec.finite_factors("strong_boundary_witness")?;
    let (Some(m), Some(k)) = (inside_u.last_factor(), v.last_factor()) else {
        // U = Ω leaves nothing to move; V = Ω accepts everything
        return Ok(spec.identity());
    };
    let mut letters: Vec<Letter> = v.prefix.iter().map(|&(i, x)| rep_letter(spec, i, x)).collect();
    if m == k {
        let j = (0..spec.num_factors())
            .find(|&j| j != m)
            .ok_or_else(|| Error::Degenerate("no second factor for a connector".into()))?;
        letters.push(rep_letter(spec, j, 1));
    }
    let g_inverse = spec.inverse(&inside_u.word(spec))?;
    letters.extend(spec.letters(&g_inverse));
    Ok(spec.reduce(&letters))
}

/// Exhaustive check of `γ (Ω ∖ inside_u) ⊆ v` on all cylinders of `depth`.
pub fn verify_witness(
    spec: &AmalgamSpec,
    gamma: &NormalFormWord,
    inside_u: &Cylinder,
    v: &Cylinder,
    depth: usize,
) -> Result<bool> {
    let depth = depth.max(inside_u.depth());
    for d in cylinders(spec, depth)? {
        if d.is_within(inside_u) {
            continue;
        }
        if !act(spec, gamma, &d)?.iter().all(|p| p.is_within(v)) {
            return Ok(false);
        }
    }
    Ok(true)
}
