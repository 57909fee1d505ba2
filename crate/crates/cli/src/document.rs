//! Spec documents: TOML describing `H`, the factors `G_i`, the embeddings
//! and optional overrides.
//!
//! ```toml
//! name = "SL(2,Z)"
//! subgroup = "cyclic(2)"
//!
//! [[factor]]
//! label = "Z4"
//! group = "cyclic(4)"
//! generators = ["1"]
//! images = ["2"]
//! ```

use std::path::Path;

use amalgam_core::{
    AmalgamSpec, CharacterTable, CosetSpace, CyclotomicNumber, DoubleCosetDecomposition, Error, Factor, FiniteFactor,
    FiniteGroup, SubgroupEmbedding,
};
use serde::Deserialize;

use crate::CliError;

/// A group descriptor: a constructor expression or an explicit table.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum GroupDescriptor {
    Expression(String),
    Table { cayley_table: Vec<Vec<usize>>, labels: Option<Vec<String>> },
    Permutations { permutations: Vec<String>, degree: Option<usize> },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorDocument {
    pub label: Option<String>,
    pub group: GroupDescriptor,
    /// Generators of `H`, by label.
    #[serde(default)]
    pub generators: Vec<String>,
    /// Their images in the factor.
    #[serde(default)]
    pub images: Vec<String>,
    /// Name of the generator `a` of a `ℤ × H` factor.
    pub generator: Option<String>,
    /// Left coset representatives, identity first.
    pub representatives: Option<Vec<String>>,
    /// Double coset representatives, identity first.
    pub double_representatives: Option<Vec<String>>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    pub omega: Option<Vec<f64>>,
    pub depth: Option<usize>,
    pub trials: Option<usize>,
    pub horizon: Option<usize>,
    pub length: Option<usize>,
    pub radius: Option<usize>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    pub name: Option<String>,
    pub subgroup: GroupDescriptor,
    #[serde(default)]
    pub factor: Vec<FactorDocument>,
    /// Rows of `χ_k` on the conjugacy classes of `H`, in class order.
    pub character_table: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub parameters: Parameters,
}

/// A validated document.
#[derive(Clone, Debug)]
pub struct LoadedSpec {
    pub name: String,
    pub spec: AmalgamSpec,
    pub table_override: Option<CharacterTable>,
    pub parameters: Parameters,
}

impl LoadedSpec {
    pub fn character_table(&self) -> amalgam_core::Result<CharacterTable> {
        match &self.table_override {
            Some(t) => Ok(t.clone()),
            None => amalgam_core::character_table(self.spec.subgroup()),
        }
    }
}

fn field_error(field: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Parse(format!("{field}: {e}"))
}

fn core_error(field: &str, e: Error) -> CliError {
    match e {
        Error::OrderTooLarge { .. } | Error::BudgetExceeded { .. } => CliError::Budget(format!("{field}: {e}")),
        e => field_error(field, e),
    }
}

/// Splits `name(arg, arg)` at top-level commas.
fn call(text: &str) -> Option<(&str, Vec<&str>)> {
    let text = text.trim();
    let Some(open) = text.find('(') else { return Some((text, Vec::new())) };
    let inner = text[open + 1..].strip_suffix(')')?;
    let mut args = Vec::new();
    let mut depth = 0;
    let mut start = 0;
    for (k, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                args.push(inner[start..k].trim());
                start = k + 1;
            }
            _ => {}
        }
    }
    if !inner.trim().is_empty() {
        args.push(inner[start..].trim());
    }
    Some((text[..open].trim(), args))
}

fn build_expression(text: &str, max_order: usize) -> amalgam_core::Result<FiniteGroup> {
    let bad = || Error::Descriptor(format!("unknown group `{text}`"));
    let (name, args) = call(text).ok_or_else(bad)?;
    let number = |k: usize| -> amalgam_core::Result<usize> {
        args.get(k).and_then(|a| a.parse().ok()).ok_or_else(bad)
    };
    let group = match (name, args.len()) {
        ("trivial", 0) => FiniteGroup::trivial(),
        ("quaternion8", 0) => FiniteGroup::quaternion8(),
        ("cyclic", 1) => {
            let n = number(0)?;
            if n > max_order {
                return Err(Error::OrderTooLarge { limit: max_order });
            }
            FiniteGroup::cyclic(n)?
        }
        ("dihedral", 1) => {
            let n = number(0)?;
            if 2 * n > max_order {
                return Err(Error::OrderTooLarge { limit: max_order });
            }
            FiniteGroup::dihedral(n)?
        }
        ("symmetric", 1) => FiniteGroup::symmetric_bounded(number(0)?, max_order)?,
        ("product", 2) => {
            let a = build_expression(args[0], max_order)?;
            let b = build_expression(args[1], max_order)?;
            if a.order() * b.order() > max_order {
                return Err(Error::OrderTooLarge { limit: max_order });
            }
            FiniteGroup::direct_product(&a, &b)?
        }
        _ => return Err(bad()),
    };
    if group.order() > max_order {
        return Err(Error::OrderTooLarge { limit: max_order });
    }
    Ok(group)
}

pub fn build_group(d: &GroupDescriptor, max_order: usize) -> amalgam_core::Result<FiniteGroup> {
    match d {
        GroupDescriptor::Expression(text) => build_expression(text, max_order),
        GroupDescriptor::Table { cayley_table, labels } => {
            FiniteGroup::from_table(cayley_table, labels.clone(), max_order)
        }
        GroupDescriptor::Permutations { permutations, degree } => {
            let mut perms = permutations
                .iter()
                .map(|p| {
                    amalgam_core::group::parse_cycles(p)
                        .ok_or_else(|| Error::Descriptor(format!("`{p}` is not in cycle notation")))
                })
                .collect::<amalgam_core::Result<Vec<_>>>()?;
            let n = degree.unwrap_or_else(|| perms.iter().map(Vec::len).max().unwrap_or(1)).max(1);
            for p in &mut perms {
                if p.len() > n {
                    return Err(Error::Descriptor(format!("permutation moves a point above degree {n}")));
                }
                p.extend(p.len()..n);
            }
            FiniteGroup::from_permutations(&perms, n, max_order)
        }
    }
}

fn lookup(g: &FiniteGroup, labels: &[String], field: &str) -> Result<Vec<usize>, CliError> {
    labels
        .iter()
        .enumerate()
        .map(|(k, l)| g.find(l).ok_or_else(|| field_error(&format!("{field}[{k}]"), format!("unknown element `{l}`"))))
        .collect()
}

impl SpecDocument {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string().trim_end().to_string()))
    }

    pub fn load(&self, max_order: usize) -> Result<LoadedSpec, CliError> {
        let h = build_group(&self.subgroup, max_order).map_err(|e| core_error("subgroup", e))?;
        if self.factor.is_empty() {
            return Err(CliError::Parse("factor: at least two factors are required, found none".into()));
        }
        let mut factors = Vec::with_capacity(self.factor.len());
        for (i, f) in self.factor.iter().enumerate() {
            let at = |field: &str| format!("factor[{i}].{field}");
            let label = f.label.clone().unwrap_or_else(|| format!("G{}", i + 1));
            if let GroupDescriptor::Expression(e) = &f.group {
                if e.trim() == "integers" {
                    factors.push(Factor::Symbolic { label, generator: f.generator.clone().unwrap_or_else(|| "a".into()) });
                    continue;
                }
            }
            let g = build_group(&f.group, max_order).map_err(|e| core_error(&at("group"), e))?;
            let gens = lookup(&h, &f.generators, &at("generators"))?;
            let images = lookup(&g, &f.images, &at("images"))?;
            let embedding = SubgroupEmbedding::from_generator_images(&h, &g, &gens, &images)
                .map_err(|e| field_error(&at("images"), e))?;
            let mut factor = FiniteFactor::new(label, g, embedding);
            if let Some(reps) = &f.representatives {
                let reps = lookup(&factor.group, reps, &at("representatives"))?;
                factor.omega = CosetSpace::with_representatives(&factor.group, &factor.embedding, reps)
                    .map_err(|e| field_error(&at("representatives"), e))?;
                factor.doubles = DoubleCosetDecomposition::compute(&factor.group, &factor.embedding, &factor.omega);
            }
            if let Some(reps) = &f.double_representatives {
                let reps = lookup(&factor.group, reps, &at("double_representatives"))?;
                factor.doubles =
                    DoubleCosetDecomposition::with_representatives(&factor.group, &factor.embedding, &factor.omega, reps)
                        .map_err(|e| field_error(&at("double_representatives"), e))?;
            }
            factors.push(Factor::Finite(factor));
        }
        let spec = AmalgamSpec::new(h, factors).map_err(|e| field_error("factor", e))?;
        let table_override = match &self.character_table {
            None => None,
            Some(rows) => {
                let rows = rows
                    .iter()
                    .enumerate()
                    .map(|(r, row)| {
                        row.iter()
                            .enumerate()
                            .map(|(c, v)| {
                                CyclotomicNumber::parse(v)
                                    .map_err(|e| field_error(&format!("character_table[{r}][{c}]"), e))
                            })
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Some(CharacterTable::from_rows(spec.subgroup(), rows).map_err(|e| field_error("character_table", e))?)
            }
        };
        if let Some(omega) = &self.parameters.omega {
            if omega.len() != spec.num_factors() {
                return Err(field_error(
                    "parameters.omega",
                    format!("{} weights for {} factors", omega.len(), spec.num_factors()),
                ));
            }
        }
        Ok(LoadedSpec {
            name: self.name.clone().unwrap_or_else(|| "unnamed".into()),
            spec,
            table_override,
            parameters: self.parameters.clone(),
        })
    }
}

pub fn load_path(path: &Path, max_order: usize) -> Result<LoadedSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    SpecDocument::parse(&text)
        .map_err(|e| CliError::Parse(format!("{}: {}", path.display(), e.message())))?
        .load(max_order)
}
