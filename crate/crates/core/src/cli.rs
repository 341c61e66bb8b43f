//! Command-line front end. Every command emits one deterministic report.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::c1span::{
    c1_closedform, c2_subspace, complement_basis, expected_q_dim, GeneratorLabel, LatticeVoa,
};
use crate::error::{Error, Result};
use crate::fock::GradedVector;
use crate::lattice::{named_lattice, Lattice, LatticeVector};
use crate::liealg::{killing_radical, lie_table};
use crate::linalg::Q;
use crate::pbw::{minimality_check, order_basis, sample_commutators, spanning_check, CommutatorSampling};

#[derive(Debug, Parser)]
#[command(name = "latvoa", version, about = "Exact computations in lattice vertex operator algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Lattice document: {"name","scale"} or {"rank","gram"}, plus optional n_max and seed.
    #[arg(long, global = true, conflicts_with = "name")]
    pub input: Option<PathBuf>,
    /// Root lattice name (A1, A2, ..., D4, ..., E6, E7, E8).
    #[arg(long, global = true)]
    pub name: Option<String>,
    /// Multiplier for the Gram matrix of a named lattice.
    #[arg(long, global = true)]
    pub scale: Option<i64>,
    /// Highest weight examined.
    #[arg(long = "n-max", global = true)]
    pub n_max: Option<u64>,
    /// Seed for randomized identity checks.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Include wall-clock timings (makes output nondeterministic).
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Φ(L), its norm histogram and structural checks.
    Phi,
    /// dim V_(n), dim C1(V)_(n) and dim Q(V)_n.
    Qdims,
    /// The generating space U and its minimality.
    Genspace,
    /// The full invariant suite, one verdict per claim.
    Verify,
    /// Bracket table on U, Killing form and its kernel.
    Lie,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Phi => "phi",
            Command::Qdims => "qdims",
            Command::Genspace => "genspace",
            Command::Verify => "verify",
            Command::Lie => "lie",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub name: Option<String>,
    pub scale: Option<i64>,
    pub rank: Option<usize>,
    pub gram: Option<Vec<Vec<i64>>>,
    pub n_max: Option<u64>,
    pub seed: Option<u64>,
}

impl LatticeSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn lattice(&self) -> Result<Lattice> {
        match (&self.name, &self.gram) {
            (Some(name), None) => {
                if self.rank.is_some() {
                    return Err(Error::InvalidInput("rank is only allowed with gram".into()));
                }
                let scale = self.scale.unwrap_or(1);
                if scale < 1 {
                    return Err(Error::InvalidInput(format!("scale must be positive, got {scale}")));
                }
                named_lattice(name, scale)
            }
            (None, Some(gram)) => {
                if self.scale.is_some() {
                    return Err(Error::InvalidInput("scale is only allowed with name".into()));
                }
                if let Some(rank) = self.rank {
                    if rank != gram.len() {
                        return Err(Error::DimensionMismatch {
                            expected: rank,
                            got: gram.len(),
                        });
                    }
                }
                Lattice::new(gram.clone())
            }
            (Some(_), Some(_)) => Err(Error::InvalidInput("give either name or gram, not both".into())),
            (None, None) => Err(Error::InvalidInput("a lattice needs a name or a gram matrix".into())),
        }
    }
}

/// Weight cutoff used when none is given.
pub fn default_n_max(rank: usize) -> u64 {
    match rank {
        1 => 5,
        2 => 4,
        _ => 3,
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub lattice: Value,
    pub options: Value,
    pub passed: bool,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Value>,
}

/// Rationals as JSON: integers within 64 bits as numbers, everything else
/// as a decimal string (`"-3/2"`, `"123456789012345678901"`).
pub fn rational_json(x: &Q) -> Value {
    if x.is_integer() {
        big_json(x.numer())
    } else {
        Value::String(x.to_string())
    }
}

fn big_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => Value::String(x.to_string()),
    }
}

fn vector_json(v: &[Q]) -> Value {
    Value::Array(v.iter().map(rational_json).collect())
}

/// A sparse coordinate vector keyed by generator label.
fn labelled_json(labels: &[String], v: &[Q]) -> Value {
    let mut m = Map::new();
    for (l, x) in labels.iter().zip(v) {
        if !x.is_zero() {
            m.insert(l.clone(), rational_json(x));
        }
    }
    Value::Object(m)
}

fn check(claim: &str, passed: bool, detail: Value) -> Value {
    json!({"claim": claim, "passed": passed, "detail": detail})
}

struct Context {
    spec: LatticeSpec,
    voa: LatticeVoa,
    n_max: u64,
    seed: u64,
}

impl Context {
    fn lattice_echo(&self) -> Value {
        let mut m = Map::new();
        if let Some(name) = &self.spec.name {
            m.insert("name".into(), json!(name));
            m.insert("scale".into(), json!(self.spec.scale.unwrap_or(1)));
        }
        m.insert("rank".into(), json!(self.voa.rank()));
        m.insert("gram".into(), json!(self.voa.lattice().gram()));
        Value::Object(m)
    }

    fn points(v: &[LatticeVector]) -> Value {
        json!(v.iter().map(|p| p.coords().to_vec()).collect::<Vec<_>>())
    }
}

fn cmd_phi(ctx: &Context) -> Result<(Value, bool)> {
    let lat = ctx.voa.lattice();
    let phi = ctx.voa.phi();
    let checks = lat.phi_checks(phi)?;
    let mut results = json!({
        "count": phi.phi.len(),
        "phi": Context::points(&phi.phi),
        "norm_histogram": phi.norm_histogram.iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<Map<_, _>>(),
        "enumeration_bound": phi.enumeration_bound,
        "checks": checks,
    });
    let mut passed = checks.all();
    if ctx.spec.name.is_some() {
        // For a scaled root lattice Φ is exactly the minimal shell.
        let shell = lat.shell(2 * ctx.spec.scale.unwrap_or(1))?;
        let same = shell == phi.phi;
        results["root_lattice_identity"] = json!(same);
        passed &= same;
    }
    Ok((results, passed))
}

fn cmd_qdims(ctx: &Context) -> Result<(Value, bool)> {
    let mut rows = Vec::new();
    let mut q = Vec::new();
    let mut passed = true;
    for n in 1..=ctx.n_max {
        let dim_v = ctx.voa.piece(n).dim();
        let dim_c1 = ctx.voa.c1(n)?.rank();
        let expected = expected_q_dim(&ctx.voa, n);
        passed &= dim_v - dim_c1 == expected;
        q.push(dim_v - dim_c1);
        rows.push(json!({"n": n, "dim_v": dim_v, "dim_c1": dim_c1, "dim_q": dim_v - dim_c1, "expected_q": expected}));
    }
    Ok((json!({"q_dims": q, "table": rows}), passed))
}

fn generator_json(index: usize, g: &crate::c1span::Generator) -> Value {
    let mut v = json!({"index": index, "label": g.to_string(), "weight": g.weight});
    match &g.label {
        GeneratorLabel::Heisenberg { color } => {
            v["kind"] = json!("heisenberg");
            v["color"] = json!(color);
        }
        GeneratorLabel::Lattice { point } => {
            v["kind"] = json!("lattice");
            v["point"] = json!(point.coords());
        }
    }
    v
}

fn cmd_genspace(ctx: &Context) -> Result<(Value, bool)> {
    let space = order_basis(&complement_basis(&ctx.voa, ctx.n_max)?);
    let minimality = minimality_check(&ctx.voa, &space)?;
    let minimal = minimality.iter().all(|e| e.needed);
    let gens: Vec<Value> = space
        .generators()
        .iter()
        .enumerate()
        .map(|(i, g)| generator_json(i, g))
        .collect();
    Ok((
        json!({"dim": space.len(), "generators": gens, "minimality": minimality, "minimal": minimal}),
        minimal,
    ))
}

fn lie_space(ctx: &Context) -> Result<crate::pbw::GeneratingSpace> {
    let top = ctx.voa.top_phi_weight().max(1);
    Ok(order_basis(&complement_basis(&ctx.voa, top)?))
}

fn cmd_lie(ctx: &Context) -> Result<(Value, bool)> {
    let space = lie_space(ctx)?;
    let table = lie_table(&ctx.voa, &space)?;
    let killing = killing_radical(&table);
    let antisymmetric = table.is_antisymmetric();
    let jacobi = table.jacobi_holds();
    let mut brackets = Vec::new();
    for i in 0..table.dim {
        for j in 0..table.dim {
            if table.brackets[i][j].iter().any(|x| !x.is_zero()) {
                brackets.push(json!({
                    "left": table.basis_labels[i],
                    "right": table.basis_labels[j],
                    "value": labelled_json(&table.basis_labels, &table.brackets[i][j]),
                }));
            }
        }
    }
    let results = json!({
        "dim": table.dim,
        "basis": table.basis_labels,
        "brackets": brackets,
        "closed_form_match": true,
        "antisymmetric": antisymmetric,
        "jacobi": jacobi,
        "killing_matrix": killing.matrix.iter().map(|r| vector_json(r)).collect::<Vec<_>>(),
        "killing_kernel": killing.kernel.iter().map(|r| labelled_json(&table.basis_labels, r)).collect::<Vec<_>>(),
        "nondegenerate": killing.nondegenerate(),
    });
    Ok((results, antisymmetric && jacobi))
}

/// Sampling sizes for the commutator check, scaled down with rank so the
/// suite stays at desk scale.
fn commutator_sampling(rank: usize, n_max: u64) -> CommutatorSampling {
    let (samples, target) = match rank {
        1 => (25, 4),
        2 => (15, 3),
        _ => (8, 2),
    };
    CommutatorSampling {
        samples,
        operand_weight: 2,
        max_mode: 3,
        target_weight: target.min(n_max),
    }
}

fn verify_checks(ctx: &Context) -> Vec<Value> {
    let voa = &ctx.voa;
    let n_max = ctx.n_max;
    let mut checks = Vec::new();
    let mut run = |claim: &str, f: &mut dyn FnMut() -> Result<(bool, Value)>| match f() {
        Ok((passed, detail)) => checks.push(check(claim, passed, detail)),
        Err(e) => checks.push(check(claim, false, json!({"error": e.kind(), "message": e.to_string()}))),
    };

    run("phi_structure", &mut || {
        let c = voa.lattice().phi_checks(voa.phi())?;
        Ok((c.all(), json!(c)))
    });
    run("c1_closed_form", &mut || {
        let mut ok = true;
        let mut ranks = Vec::new();
        for n in 1..=n_max {
            let brute = voa.c1(n)?;
            let closed = c1_closedform(voa, n);
            ok &= *brute == closed;
            ranks.push(json!({"n": n, "bruteforce": brute.rank(), "closed_form": closed.rank()}));
        }
        Ok((ok, json!(ranks)))
    });
    run("c2_in_c1", &mut || {
        let mut ok = true;
        let mut ranks = Vec::new();
        for n in 1..=n_max {
            let c2 = c2_subspace(voa, n)?;
            ok &= voa.c1(n)?.contains(&c2);
            ranks.push(json!({"n": n, "c2": c2.rank()}));
        }
        Ok((ok, json!(ranks)))
    });
    run("q_dims", &mut || {
        let (v, ok) = cmd_qdims(ctx)?;
        Ok((ok, v["q_dims"].clone()))
    });
    run("complement", &mut || {
        let u = complement_basis(voa, n_max)?;
        let sizes: Map<String, Value> = u.iter().map(|(k, g)| (k.to_string(), json!(g.len()))).collect();
        Ok((true, Value::Object(sizes)))
    });
    run("spanning", &mut || {
        let space = order_basis(&complement_basis(voa, n_max)?);
        let mut ok = true;
        let mut rows = Vec::new();
        for n in 1..=n_max {
            let r = spanning_check(voa, &space, n)?;
            ok &= r.spans;
            rows.push(json!(r));
        }
        Ok((ok, json!(rows)))
    });
    run("minimality", &mut || {
        let (v, ok) = cmd_genspace(ctx)?;
        Ok((ok, v["minimality"].clone()))
    });
    run("commutator_formula", &mut || {
        let cfg = commutator_sampling(voa.rank(), n_max);
        let r = sample_commutators(voa, ctx.seed, cfg)?;
        Ok((r.failures.is_empty(), json!({"config": cfg, "report": r})))
    });
    run("virasoro", &mut || {
        let e = voa.engine();
        let mut count = 0usize;
        let mut ok = true;
        for n in 0..=n_max.min(3) {
            for m in voa.piece(n).basis() {
                let v = GradedVector::basis(m.clone());
                ok &= e.general_mode(e.omega(), 1, &v)? == e.virasoro_l0(&v);
                ok &= e.general_mode(e.omega(), 0, &v)? == e.virasoro_lm1(&v);
                count += 1;
            }
        }
        Ok((ok, json!({"vectors": count})))
    });
    run("lattice_trichotomy", &mut || {
        let lat = voa.lattice();
        let points: Vec<LatticeVector> = lat.enumerate_up_to_norm(4);
        let e = voa.engine();
        let mut ok = true;
        let mut pairs = 0usize;
        for a in &points {
            for b in &points {
                let s = lat.inner(a, b)?;
                for n in (-s - 3)..=(-s + 1) {
                    ok &= e.lattice_trichotomy_holds(a, b, n)?;
                }
                pairs += 1;
            }
        }
        Ok((ok, json!({"pairs": pairs})))
    });
    run("lie_structure", &mut || {
        let (v, ok) = cmd_lie(ctx)?;
        Ok((
            ok,
            json!({"dim": v["dim"], "antisymmetric": v["antisymmetric"], "jacobi": v["jacobi"], "nondegenerate": v["nondegenerate"]}),
        ))
    });
    checks
}

fn cmd_verify(ctx: &Context) -> Result<(Value, bool)> {
    let checks = verify_checks(ctx);
    let passed = checks.iter().all(|c| c["passed"] == json!(true));
    Ok((json!({ "checks": checks }), passed))
}

fn load_spec(cli: &Cli) -> Result<LatticeSpec> {
    let mut spec = match (&cli.input, &cli.name) {
        (Some(path), _) => LatticeSpec::from_json(&std::fs::read_to_string(path)?)?,
        (None, Some(name)) => LatticeSpec {
            name: Some(name.clone()),
            scale: Some(cli.scale.unwrap_or(1)),
            ..LatticeSpec::default()
        },
        (None, None) => return Err(Error::InvalidInput("pass --input FILE or --name NAME".into())),
    };
    if cli.input.is_some() && cli.scale.is_some() {
        return Err(Error::InvalidInput("--scale goes with --name".into()));
    }
    if cli.n_max.is_some() {
        spec.n_max = cli.n_max;
    }
    if cli.seed.is_some() {
        spec.seed = cli.seed;
    }
    Ok(spec)
}

/// Runs one command; returns the report and the process exit code
/// (0 all claims hold, 1 a claim failed, 2 bad input).
pub fn execute(cli: &Cli) -> (Value, i32) {
    let started = Instant::now();
    let outcome = load_spec(cli).and_then(|spec| {
        let lattice = spec.lattice()?;
        let n_max = spec.n_max.unwrap_or_else(|| default_n_max(lattice.rank()));
        if n_max == 0 {
            return Err(Error::InvalidInput("n_max must be at least 1".into()));
        }
        let ctx = Context {
            seed: spec.seed.unwrap_or(0),
            voa: LatticeVoa::new(&lattice),
            spec,
            n_max,
        };
        let (results, passed) = match cli.command {
            Command::Phi => cmd_phi(&ctx)?,
            Command::Qdims => cmd_qdims(&ctx)?,
            Command::Genspace => cmd_genspace(&ctx)?,
            Command::Verify => cmd_verify(&ctx)?,
            Command::Lie => cmd_lie(&ctx)?,
        };
        Ok(Report {
            command: cli.command.name().into(),
            lattice: ctx.lattice_echo(),
            options: json!({"n_max": ctx.n_max, "seed": ctx.seed}),
            passed,
            results,
            timings: cli
                .timings
                .then(|| json!({"total_ms": started.elapsed().as_millis() as u64})),
        })
    });
    match outcome {
        Ok(report) => {
            let code = if report.passed { 0 } else { 1 };
            (serde_json::to_value(report).expect("report serializes"), code)
        }
        Err(e) => {
            let code = if e.is_claim_failure() { 1 } else { 2 };
            (
                json!({"command": cli.command.name(), "error": {"kind": e.kind(), "message": e.to_string()}}),
                code,
            )
        }
    }
}

/// `path<TAB>value` lines for every leaf of the report.
pub fn to_tsv(v: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    walk(&join(prefix, k), x, out);
                }
            }
            Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
                for (i, x) in a.iter().enumerate() {
                    walk(&join(prefix, &i.to_string()), x, out);
                }
            }
            Value::Array(a) => {
                let cells: Vec<String> = a.iter().map(scalar).collect();
                out.push_str(&format!("{prefix}\t{}\n", cells.join(",")));
            }
            _ => out.push_str(&format!("{prefix}\t{}\n", scalar(v))),
        }
    }
    fn join(prefix: &str, k: &str) -> String {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    }
    fn scalar(v: &Value) -> String {
        match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }
    }
    let mut out = String::new();
    walk("", v, &mut out);
    out
}

pub fn render(cli: &Cli, report: &Value) -> String {
    match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Tsv => to_tsv(report),
    }
}
