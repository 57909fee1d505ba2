//! The five subcommands.

use amalgam_core::fock::Scope;
use amalgam_core::kms::{self, BETA_TOLERANCE};
use amalgam_core::snf::matmul;
use amalgam_core::{
    build_a_gamma, cylinders, f2_example, factor_type, ideal_lattice, irreducible, k_groups, martin_kernel_crosscheck,
    perron_check, random_walk, simplicity_check, verify_relations, verify_stationarity, AmalgamSpec, Factor,
    GaugeWeights, Syllable, DEFAULT_HEREDITARY_BOUND,
};
use serde_json::json;

use crate::document::LoadedSpec;
use crate::report::{to_value, Check, Report};
use crate::CliError;

pub const DEFAULT_DEPTH: usize = 3;
pub const DEFAULT_TRIALS: usize = 100_000;
pub const DEFAULT_HORIZON: usize = 256;
pub const DEFAULT_LENGTH: usize = 5;
pub const DEFAULT_RADIUS: usize = 3;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Invariants,
    Kms,
    Simulate,
    Verify,
    Tree,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Invariants => "invariants",
            Command::Kms => "kms",
            Command::Simulate => "simulate",
            Command::Verify => "verify",
            Command::Tree => "tree",
        }
    }
}

/// Command-line overrides; `None` falls back to the document, then to the
/// defaults above.
#[derive(Clone, Debug, Default)]
pub struct Options {
    pub ball_budget: Option<usize>,
    pub omega: Option<Vec<f64>>,
    pub max_depth: Option<usize>,
    pub trials: Option<usize>,
    pub horizon: Option<usize>,
    pub seed: Option<u64>,
    pub length: Option<usize>,
    pub radius: Option<usize>,
    pub tolerance: Option<f64>,
    pub force_perron: bool,
    pub martin: bool,
    pub free_group_example: bool,
}

struct Resolved {
    budget: usize,
    omega: Vec<f64>,
    depth: usize,
    trials: usize,
    horizon: usize,
    seed: u64,
    length: usize,
    radius: usize,
    tolerance: f64,
}

impl Options {
    fn resolve(&self, doc: &LoadedSpec) -> Resolved {
        let p = &doc.parameters;
        Resolved {
            budget: self.ball_budget.unwrap_or(amalgam_core::DEFAULT_BALL_BUDGET),
            omega: self
                .omega
                .clone()
                .or_else(|| p.omega.clone())
                .unwrap_or_else(|| vec![1.0; doc.spec.num_factors()]),
            depth: self.max_depth.or(p.depth).unwrap_or(DEFAULT_DEPTH),
            trials: self.trials.or(p.trials).unwrap_or(DEFAULT_TRIALS),
            horizon: self.horizon.or(p.horizon).unwrap_or(DEFAULT_HORIZON),
            seed: self.seed.or(p.seed).unwrap_or(DEFAULT_SEED),
            length: self.length.or(p.length).unwrap_or(DEFAULT_LENGTH),
            radius: self.radius.or(p.radius).unwrap_or(DEFAULT_RADIUS),
            tolerance: self.tolerance.or(p.tolerance).unwrap_or(DEFAULT_TOLERANCE),
        }
    }
}

/// A report and its human-readable rendering.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub text: String,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.report.passed {
            crate::EXIT_PASS
        } else {
            crate::EXIT_CHECK_FAILED
        }
    }
}

pub fn run(command: Command, doc: &LoadedSpec, options: &Options) -> Result<Outcome, CliError> {
    let r = options.resolve(doc);
    let (checks, notices, data, body) = match command {
        Command::Invariants => invariants(doc)?,
        Command::Kms => kms_command(doc, &r, options)?,
        Command::Simulate => simulate(doc, &r, options)?,
        Command::Verify => verify(doc, &r, options)?,
        Command::Tree => tree(doc, &r)?,
    };
    let report = Report::new(command.name(), &doc.name, checks, notices, data);
    let text = format!("{} — {}\n{body}{}", command.name(), doc.name, report.text_footer());
    Ok(Outcome { report, text })
}

type Parts = (Vec<Check>, Vec<String>, serde_json::Value, String);

fn syllable_label(spec: &AmalgamSpec, s: Syllable) -> String {
    match (s, spec.factor(s.factor())) {
        (Syllable::Coset { factor, coset }, Factor::Finite(f)) => {
            format!("{factor}:{}", f.group.label(f.omega.representatives()[coset]))
        }
        (Syllable::Power { exponent, .. }, Factor::Symbolic { generator, .. }) => format!("{generator}^{exponent}"),
        _ => "?".into(),
    }
}

fn matrix_text(rows: &[Vec<u64>]) -> String {
    rows.iter()
        .map(|r| format!("  {}\n", r.iter().map(|x| format!("{x:>3}")).collect::<String>()))
        .collect()
}

fn invariants(doc: &LoadedSpec) -> Result<Parts, CliError> {
    let spec = &doc.spec;
    let table = doc.character_table()?;
    let h = spec.subgroup();
    let a = build_a_gamma(spec, &table)?;
    let (k, snf) = k_groups(&a);
    let irr = irreducible(&a);
    let poset = ideal_lattice(&a, DEFAULT_HEREDITARY_BOUND)?;
    let simple = simplicity_check(spec)?;

    let classes: Vec<&str> =
        (0..table.classes().len()).map(|c| h.label(table.classes().representative(c))).collect();
    let rows: Vec<Vec<String>> = table.rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
    let labels: Vec<String> = (0..a.size()).map(|p| format!("({},{})", p / a.characters + 1, p % a.characters + 1)).collect();
    let diagonal: Vec<String> = snf.diagonal.iter().map(|d| d.to_string()).collect();
    let snf_ok = matmul(&matmul(&snf.u, &a.one_minus()), &snf.v) == snf.d_matrix();
    let checks = vec![
        Check::exact("character table orthogonality", table.verify().is_ok(), table.len()),
        Check::exact("U (1 - A) V = D", snf_ok, &diagonal),
    ];
    let data = json!({
        "character_table": { "classes": classes, "degrees": table.degrees(), "rows": rows },
        "a_gamma": { "labels": labels, "entries": a.entries },
        "k0": k.k0_string(),
        "k1": k.k1_string(),
        "snf_diagonal": diagonal,
        "irreducible": irr,
        "ideals": {
            "classes": poset.classes,
            "hasse": poset.hasse,
            "hereditary": poset.hereditary,
            "count": poset.ideal_count(),
            "transpose_sensitive": poset.transpose_sensitive,
        },
        "simple": simple.simple(),
        "simplicity_witness": simple.witness.map(|j| spec.factor(j).label().to_string()),
    });

    let mut body = String::new();
    body.push_str(&format!("character table of H (classes {}):\n", classes.join(", ")));
    for (k, r) in rows.iter().enumerate() {
        body.push_str(&format!("  χ{}: {}\n", k + 1, r.join("  ")));
    }
    body.push_str(&format!("A_Γ (rows {}):\n{}", labels.join(" "), matrix_text(&a.entries)));
    body.push_str(&format!("K0 = {}\nK1 = {}\n", k.k0_string(), k.k1_string()));
    body.push_str(&format!("Smith diagonal of 1 - A_Γ: [{}]\n", diagonal.join(", ")));
    body.push_str(&format!("A_Γ irreducible: {irr}\n"));
    body.push_str(&format!(
        "ideals: {} classes, {} hereditary subsets{}\n",
        poset.classes.len(),
        poset.ideal_count(),
        if poset.transpose_sensitive { " (digraph orientation matters)" } else { "" }
    ));
    match simple.witness {
        Some(j) => body.push_str(&format!("simple: yes (normal cores trivial away from {})\n", spec.factor(j).label())),
        None => body.push_str("simple: condition fails\n"),
    }
    Ok((checks, Vec::new(), data, body))
}

fn solve_for(doc: &LoadedSpec, r: &Resolved) -> Result<kms::KmsSolution, CliError> {
    let omega = GaugeWeights::new(r.omega.clone())?;
    Ok(amalgam_core::solve(&doc.spec, &omega)?)
}

fn kms_command(doc: &LoadedSpec, r: &Resolved, o: &Options) -> Result<Parts, CliError> {
    let spec = &doc.spec;
    let sol = solve_for(doc, r)?;
    let omega = GaugeWeights::new(r.omega.clone())?;
    let stationarity = verify_stationarity(spec, &sol, r.depth, r.tolerance)?;
    let table = doc.character_table()?;
    let a = build_a_gamma(spec, &table)?;
    let mut checks = vec![
        Check::within("beta equation residual", sol.residual, BETA_TOLERANCE),
        Check::within("mu against the linear system", sol.mu_linear_defect, r.tolerance),
        Check::within("total step mass - 1", sol.total_mass() - 1.0, r.tolerance),
        Check::within(format!("stationarity residual (depth {})", r.depth), stationarity.max_residual, r.tolerance),
    ];
    let mut notices = Vec::new();
    let (a_root, _) = kms::perron_root(&a.to_f64())?;
    let perron = if irreducible(&a) || o.force_perron {
        let report = perron_check(&sol, &a, table.degrees())?;
        if report.irreducible {
            checks.push(Check::within("spectral radius of B - 1", report.radius - 1.0, 1e-9));
            checks.push(Check::exact("Perron vector positive", report.positive, report.positive));
        } else {
            notices.push("A_Γ is reducible; Perron data reported without a check".into());
        }
        Some(report)
    } else {
        notices.push("Perron check skipped: A_Γ is reducible (use --force-perron)".into());
        None
    };
    let lambda = factor_type(spec, &omega);

    let nu: Vec<serde_json::Value> = cylinders(spec, 1)?
        .iter()
        .map(|c| json!({ "cylinder": c.display(spec), "nu": sol.nu(c) }))
        .collect();
    let nu_factor: Vec<f64> = (0..spec.num_factors()).map(|i| sol.nu_factor(i)).collect();
    let data = json!({
        "omega": r.omega,
        "beta": sol.beta,
        "decay": sol.decay,
        "lambda": sol.lambda,
        "mu": sol.mu,
        "nu_factor": nu_factor,
        "nu_depth1": nu,
        "stationarity": stationarity,
        "a_gamma_perron_root": a_root,
        "perron": perron,
        "factor_type": lambda.map(|l| l.to_string()),
    });

    let mut body = String::new();
    body.push_str(&format!("ω = {:?}\nβ = {}\n", r.omega, sol.beta));
    for i in 0..spec.num_factors() {
        body.push_str(&format!(
            "  {}: e^(-βω) = {}, λ = {}, μ = {}, ν(Y) = {}\n",
            spec.factor(i).label(),
            sol.decay[i],
            sol.lambda[i],
            sol.mu[i],
            sol.nu_factor(i)
        ));
    }
    body.push_str("ν on depth-1 cylinders:\n");
    for c in cylinders(spec, 1)? {
        body.push_str(&format!("  {} {}\n", c.display(spec), sol.nu(&c)));
    }
    body.push_str(&format!(
        "stationarity: {} cylinders, max residual {:e} at {}\n",
        stationarity.cylinders_checked, stationarity.max_residual, stationarity.worst_cylinder
    ));
    body.push_str(&format!("Perron root of A_Γ: {a_root}\n"));
    if let Some(p) = &data["perron"].as_object() {
        body.push_str(&format!("spectral radius of B: {}\n", p["radius"]));
    }
    match lambda {
        Some(l) => body.push_str(&format!("factor type: III_{l}\n")),
        None => body.push_str("factor type: not classified\n"),
    }
    Ok((checks, notices, data, body))
}

fn simulate(doc: &LoadedSpec, r: &Resolved, o: &Options) -> Result<Parts, CliError> {
    let spec = &doc.spec;
    let sol = solve_for(doc, r)?;
    let walk = random_walk(spec, &sol, r.trials, r.horizon, r.seed)?;
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    let mut body = format!("{} walks, horizon {}, seed {}, {} stable\n", r.trials, r.horizon, r.seed, walk.stable);
    for c in cylinders(spec, 1)? {
        let (i, x) = c.prefix()[0];
        let (p, se) = walk.frequency(i, x);
        let nu = sol.nu(&c);
        let z = if se > 0.0 { (p - nu) / se } else if p == nu { 0.0 } else { f64::INFINITY };
        worst = worst.max(z.abs());
        body.push_str(&format!("  {} frequency {p:.5} ± {se:.5}, ν = {nu:.5}, z = {z:.2}\n", c.display(spec)));
        rows.push(json!({ "cylinder": c.display(spec), "frequency": p, "standard_error": se, "nu": nu, "z": z }));
    }
    let mut checks = vec![Check {
        name: "largest |frequency - ν| in standard errors".into(),
        passed: worst <= 3.0,
        value: to_value(worst),
        tolerance: Some(3.0),
    }];
    let mut notices = Vec::new();
    if walk.unstable_warning {
        notices.push(format!("{} of {} walks did not stabilize", walk.trials - walk.stable, walk.trials));
    }
    let mut martin = Vec::new();
    if o.martin {
        for (i, f) in spec.finite_factors("simulate")?.iter().enumerate() {
            for x in (0..f.group.order()).filter(|&x| f.embedding.preimage(x).is_none()) {
                let m = martin_kernel_crosscheck(spec, &sol, (i, x), r.trials, r.horizon.max(1) * 16, r.seed)?;
                body.push_str(&format!(
                    "  Martin {}:{} estimate {:.5} ± {:.5}, exact {:.5}\n",
                    f.label, m.element, m.estimate, m.standard_error, m.exact
                ));
                if m.non_transient_warning {
                    notices.push(format!("{}:{}: more than 5% of walks undecided", f.label, m.element));
                }
                martin.push(m);
            }
        }
        checks.push(Check::exact(
            "Martin kernel within 3σ + truncation bias",
            martin.iter().all(|m| m.passed),
            martin.iter().filter(|m| m.passed).count(),
        ));
    }
    let data = json!({
        "trials": r.trials,
        "horizon": r.horizon,
        "seed": r.seed,
        "stable": walk.stable,
        "cylinders": rows,
        "martin": martin,
    });
    Ok((checks, notices, data, body))
}

fn verify(doc: &LoadedSpec, r: &Resolved, o: &Options) -> Result<Parts, CliError> {
    let spec = &doc.spec;
    let relations = verify_relations(spec, r.length, r.budget)?;
    let mut checks: Vec<Check> = relations
        .checks
        .iter()
        .map(|c| {
            let scope = match c.scope {
                Scope::Full => "full",
                Scope::Interior => "interior",
            };
            Check::exact(format!("{} [{scope}]", c.name), c.exact(), c.max_residual)
        })
        .collect();
    checks.push(Check::exact(
        "rank of 1 - sum P equals |H|",
        relations.unit_defect_rank == spec.subgroup().order(),
        relations.unit_defect_rank,
    ));
    let delta = spec.hyperbolicity_delta(r.radius, r.budget)?;
    checks.push(Check::exact(format!("hyperbolicity delta (radius {})", r.radius), delta == 0.into(), delta.to_string()));

    let mut body = format!(
        "truncation L = {}: dimension {}, interior {}\n",
        relations.length, relations.dimension, relations.interior_dimension
    );
    for c in &relations.checks {
        body.push_str(&format!("  {}: {} instances, residual {}, defect rank {}\n", c.name, c.instances, c.max_residual, c.defect_rank));
    }
    body.push_str(&format!("  rank(1 - ΣP) = {}\n", relations.unit_defect_rank));
    for d in &relations.multiplicity_diagnostic {
        body.push_str(&format!(
            "  H-multiplicities on range of P_{}: {:?}{}\n",
            d.factor + 1,
            d.multiplicities,
            if d.all_present { "" } else { " (some irreducible missing)" }
        ));
    }
    body.push_str(&format!("δ over the ball of radius {} = {delta}\n", r.radius));
    let mut example = None;
    if o.free_group_example {
        let ex = f2_example(r.length, r.budget)?;
        body.push_str(&format!("free group matrix ({}):\n", ex.labels.join(", ")));
        for row in &ex.matrix {
            body.push_str(&format!("  {}\n", row.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")));
        }
        checks.push(Check::exact("free group Cuntz–Krieger relation", ex.ck_residual == 0, ex.ck_residual));
        checks.push(Check::exact("free group shell sizes 4·3^(n-1)", ex.shells_match, &ex.shell_sizes));
        example = Some(ex);
    }
    let data = json!({ "relations": relations, "delta": delta.to_string(), "free_group_example": example });
    Ok((checks, Vec::new(), data, body))
}

fn tree(doc: &LoadedSpec, r: &Resolved) -> Result<Parts, CliError> {
    let spec = &doc.spec;
    let t = spec.serre_tree(r.radius, r.budget)?;
    let names: Vec<String> = t
        .vertices
        .iter()
        .map(|v| {
            let word: Vec<String> = v.syllables.iter().map(|&s| syllable_label(spec, s)).collect();
            let word = if word.is_empty() { "e".to_string() } else { word.join(" ") };
            match v.factor {
                Some(i) => format!("{word}·{}", spec.factor(i).label()),
                None => format!("{word}·H"),
            }
        })
        .collect();
    let checks = vec![Check::exact("acyclic and connected", t.is_tree(), t.vertices.len())];
    let mut body = format!("{} vertices, {} edges\n", t.vertices.len(), t.edges.len());
    for &(a, b) in &t.edges {
        body.push_str(&format!("  {} -- {}\n", names[a], names[b]));
    }
    let data = json!({ "radius": r.radius, "vertices": names, "edges": t.edges, "degrees": t.degrees() });
    Ok((checks, Vec::new(), data, body))
}
