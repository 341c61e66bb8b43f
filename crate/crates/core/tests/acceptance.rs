//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use latvoa::c1span::{
    c1_bruteforce, c1_closedform, c2_subspace, complement_basis, expected_q_dim, q_dims,
    GeneratorLabel, LatticeVoa,
};
use latvoa::fock::graded_basis;
use latvoa::liealg::{killing_radical, lie_table};
use latvoa::linalg::Rref;
use latvoa::pbw::{minimality_check, order_basis, sample_commutators, spanning_check, CommutatorSampling};
use latvoa::{named_lattice, GradedVector, Lattice};
use num_traits::{One, Zero};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn gram(g: &[&[i64]]) -> Lattice {
    Lattice::new(g.iter().map(|r| r.to_vec()).collect()).unwrap()
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, format!("{what} took {t:?}, limit {limit:?}"))
}

/// Number of lattice vectors of each norm up to `bound`, by the plain box search.
fn norm_counts(l: &Lattice, bound: i64) -> BTreeMap<i64, usize> {
    let mut m = BTreeMap::new();
    for v in l.enumerate_box(bound) {
        *m.entry(l.norm(&v)).or_insert(0) += 1;
    }
    m
}

/// Number of `colors`-colored partitions of each integer up to `n`.
fn colored_partition_counts(colors: usize, n: usize) -> Vec<u64> {
    let mut p = vec![0u64; n + 1];
    p[0] = 1;
    for _ in 0..colors {
        for part in 1..=n {
            for total in part..=n {
                p[total] += p[total - part];
            }
        }
    }
    p
}

/// `dim V_(n)` from the theta series times the Heisenberg partition series.
fn graded_dim_oracle(l: &Lattice, n: u64) -> usize {
    let p = colored_partition_counts(l.rank(), n as usize);
    norm_counts(l, 2 * n as i64)
        .iter()
        .map(|(&norm, &c)| c * p[(n - (norm / 2) as u64) as usize] as usize)
        .sum()
}

fn phi_identity() -> Outcome {
    let mut notes = Vec::new();
    for (name, k, count) in [("A1", 1, 2), ("A1", 2, 2), ("A2", 1, 6), ("A3", 1, 12), ("D4", 1, 24)] {
        let start = Instant::now();
        let l = named_lattice(name, k).unwrap();
        let phi: BTreeSet<_> = l.phi_set().phi.into_iter().collect();
        let shell: BTreeSet<_> = l.shell(2 * k).unwrap().into_iter().collect();
        ensure(phi == shell, format!("{name} scale {k}: Φ differs from the norm-{} shell", 2 * k))?;
        let oracle = norm_counts(&l, 2 * k)[&(2 * k)];
        ensure(oracle == count && phi.len() == count, format!("{name} scale {k}: {} vectors, expected {count}", phi.len()))?;
        within(start, Duration::from_secs(5), name)?;
        notes.push(format!("{name}x{k}:{count}"));
    }
    let start = Instant::now();
    let e8 = named_lattice("E8", 1).unwrap();
    let phi = e8.phi_set();
    ensure(phi.phi.len() == 240, format!("E8: {} vectors", phi.phi.len()))?;
    ensure(phi.phi.iter().all(|a| e8.norm(a) == 2), "E8: Φ contains a non-root")?;
    within(start, Duration::from_secs(120), "E8")?;
    notes.push(format!("E8:240 in {:.1?}", start.elapsed()));
    Ok(notes.join(" "))
}

fn test_lattices() -> Vec<(&'static str, Lattice)> {
    vec![
        ("A1", named_lattice("A1", 1).unwrap()),
        ("[[4]]", gram(&[&[4]])),
        ("[[6]]", gram(&[&[6]])),
        ("A2", named_lattice("A2", 1).unwrap()),
        ("A1xA1", gram(&[&[2, 0], &[0, 2]])),
        ("[[2,1],[1,4]]", gram(&[&[2, 1], &[1, 4]])),
        ("[[4,1],[1,6]]", gram(&[&[4, 1], &[1, 6]])),
        ("A3", named_lattice("A3", 1).unwrap()),
        ("A2 scale 2", named_lattice("A2", 2).unwrap()),
        ("D4", named_lattice("D4", 1).unwrap()),
    ]
}

fn phi_structure() -> Outcome {
    let start = Instant::now();
    for (name, l) in test_lattices() {
        let r = l.phi_set();
        let c = l.phi_checks(&r).unwrap();
        ensure(c.all(), format!("{name}: {c:?}"))?;
    }
    within(start, Duration::from_secs(5), "suite")?;
    Ok(format!("{} lattices", test_lattices().len()))
}

fn c1_equality() -> Outcome {
    let start = Instant::now();
    for (name, l) in [("A1", gram(&[&[2]])), ("[[4]]", gram(&[&[4]])), ("A2", named_lattice("A2", 1).unwrap())] {
        let voa = LatticeVoa::new(&l);
        for n in 1..=4 {
            let brute = c1_bruteforce(&voa, n).unwrap();
            let closed = c1_closedform(&voa, n);
            ensure(brute == closed, format!("{name} n={n}: ranks {} vs {}", brute.rank(), closed.rank()))?;
        }
    }
    within(start, Duration::from_secs(120), "equality")?;
    Ok("A1, [[4]], A2 at n=1..4".into())
}

fn c2_containment() -> Outcome {
    let start = Instant::now();
    for (name, l) in [("A1", gram(&[&[2]])), ("[[4]]", gram(&[&[4]]))] {
        let voa = LatticeVoa::new(&l);
        for n in 1..=5 {
            let c2 = c2_subspace(&voa, n).unwrap();
            ensure(voa.c1(n).unwrap().contains(&c2), format!("{name} n={n}"))?;
        }
    }
    within(start, Duration::from_secs(60), "containment")?;
    Ok("A1, [[4]] at n=1..5".into())
}

fn q_dimensions() -> Outcome {
    let start = Instant::now();
    for (name, l, want) in [
        ("A1", gram(&[&[2]]), vec![3, 0, 0, 0, 0]),
        ("[[4]]", gram(&[&[4]]), vec![1, 2, 0, 0, 0]),
        ("A2", named_lattice("A2", 1).unwrap(), vec![8, 0, 0, 0]),
    ] {
        let voa = LatticeVoa::new(&l);
        let got = q_dims(&voa, want.len() as u64).unwrap();
        ensure(got == want, format!("{name}: {got:?}, expected {want:?}"))?;
        let hist: Vec<usize> = (1..=want.len() as u64).map(|n| expected_q_dim(&voa, n)).collect();
        ensure(hist == want, format!("{name}: histogram gives {hist:?}"))?;
    }
    within(start, Duration::from_secs(120), "q_dims")?;
    Ok("A1 [3,0,0,0,0]; [[4]] [1,2,0,0,0]; A2 [8,0,0,0]".into())
}

fn spanning() -> Outcome {
    let start = Instant::now();
    for (name, l, n_max, dims) in [
        ("A1", gram(&[&[2]]), 5, Some(vec![3, 4, 7, 13, 19])),
        ("[[4]]", gram(&[&[4]]), 4, None),
        ("A2", named_lattice("A2", 1).unwrap(), 4, None),
    ] {
        let voa = LatticeVoa::new(&l);
        let space = order_basis(&complement_basis(&voa, n_max).unwrap());
        for n in 1..=n_max {
            let r = spanning_check(&voa, &space, n).unwrap();
            let oracle = graded_dim_oracle(&l, n);
            ensure(r.dim == oracle, format!("{name} n={n}: dim {} vs oracle {oracle}", r.dim))?;
            if let Some(d) = &dims {
                ensure(r.dim == d[n as usize - 1], format!("{name} n={n}: dim {}", r.dim))?;
            }
            ensure(r.spans, format!("{name} n={n}: rank {} of {}", r.rank, r.dim))?;
        }
    }
    within(start, Duration::from_secs(300), "spanning")?;
    Ok("A1 n<=5 dims 3,4,7,13,19; [[4]], A2 n<=4".into())
}

fn minimality() -> Outcome {
    let start = Instant::now();
    let mut total = 0;
    for (name, l) in [("A1", gram(&[&[2]])), ("[[4]]", gram(&[&[4]]))] {
        let voa = LatticeVoa::new(&l);
        let top = voa.top_phi_weight().max(1);
        let space = order_basis(&complement_basis(&voa, top).unwrap());
        for e in minimality_check(&voa, &space).unwrap() {
            ensure(e.needed, format!("{name}: dropping {} still spans weight {}", e.generator, e.weight))?;
            total += 1;
        }
    }
    within(start, Duration::from_secs(120), "minimality")?;
    Ok(format!("{total} generators each needed"))
}

fn mode_identities() -> Outcome {
    let start = Instant::now();
    let mut samples = 0;
    for (l, count, seed) in [
        (gram(&[&[2]]), 50, 1),
        (gram(&[&[4]]), 40, 2),
        (named_lattice("A2", 1).unwrap(), 12, 3),
    ] {
        let voa = LatticeVoa::new(&l);
        let cfg = CommutatorSampling {
            samples: count,
            operand_weight: 3,
            max_mode: 4,
            target_weight: 4,
        };
        let r = sample_commutators(&voa, seed, cfg).unwrap();
        ensure(r.failures.is_empty(), format!("commutator: {:?}", r.failures.first()))?;
        samples += r.samples;
    }
    ensure(samples >= 100, "too few samples")?;

    for l in [gram(&[&[2]]), gram(&[&[4]]), named_lattice("A2", 1).unwrap()] {
        let voa = LatticeVoa::new(&l);
        let e = voa.engine();
        for n in 0..=4 {
            for m in graded_basis(&l, n) {
                let v = GradedVector::basis(m.clone());
                ensure(e.general_mode(e.omega(), 1, &v).unwrap() == e.virasoro_l0(&v), format!("L(0) on {m}"))?;
                ensure(e.general_mode(e.omega(), 0, &v).unwrap() == e.virasoro_lm1(&v), format!("L(-1) on {m}"))?;
            }
        }
    }

    let mut pairs = 0;
    for l in [gram(&[&[2]]), gram(&[&[4]]), named_lattice("A2", 1).unwrap(), gram(&[&[2, 0], &[0, 2]])] {
        let voa = LatticeVoa::new(&l);
        let points = l.enumerate_up_to_norm(4);
        for a in &points {
            for b in &points {
                let s = l.inner(a, b).unwrap();
                for n in (-s - 4)..=(-s + 2) {
                    ensure(voa.engine().lattice_trichotomy_holds(a, b, n).unwrap(), format!("e{a}_{n} e{b}"))?;
                }
                pairs += 1;
            }
        }
    }
    within(start, Duration::from_secs(180), "mode identities")?;
    Ok(format!("{samples} commutator samples, Virasoro to weight 4, {pairs} lattice pairs"))
}

fn lie_structure() -> Outcome {
    let start = Instant::now();
    for (name, l) in [("A1", gram(&[&[2]])), ("[[4]]", gram(&[&[4]])), ("A1xA1", gram(&[&[2, 0], &[0, 2]]))] {
        let voa = LatticeVoa::new(&l);
        let top = voa.top_phi_weight().max(1);
        let space = order_basis(&complement_basis(&voa, top).unwrap());
        let t = lie_table(&voa, &space).map_err(|e| format!("{name}: {e}"))?;
        ensure(t.is_antisymmetric(), format!("{name}: not antisymmetric"))?;
        ensure(t.jacobi_holds(), format!("{name}: Jacobi fails"))?;
        let k = killing_radical(&t);
        match name {
            "A1" | "A1xA1" => ensure(k.nondegenerate(), format!("{name}: degenerate Killing form"))?,
            _ => {
                let kernel = Rref::from_rows(t.dim, &k.kernel);
                for (i, g) in space.generators().iter().enumerate() {
                    if let GeneratorLabel::Lattice { .. } = g.label {
                        let mut e = vec![Zero::zero(); t.dim];
                        e[i] = One::one();
                        ensure(kernel.contains(&e), format!("{name}: {g} not in the radical"))?;
                    }
                }
            }
        }
    }
    within(start, Duration::from_secs(60), "Lie")?;
    Ok("A1, [[4]], A1xA1".into())
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("latvoa-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let input = dir.join("four.json");
    std::fs::write(&input, r#"{"rank":1,"gram":[[4]],"n_max":4}"#).map_err(|e| e.to_string())?;
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_latvoa"))
            .args(["verify", "--seed", "0", "--input"])
            .arg(&input)
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    std::fs::remove_dir_all(&dir).ok();
    ensure(a.status.success(), format!("verify exited with {}", a.status))?;
    ensure(a.stdout == b.stdout, "reports differ")?;
    Ok(format!("{} identical bytes", a.stdout.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("phi equals the minimal shell on root lattices", phi_identity),
        ("phi structure: negation, multiples, pairing, span", phi_structure),
        ("C1 brute force equals closed form", c1_equality),
        ("C2 contained in C1", c2_containment),
        ("dimensions of V/C1", q_dimensions),
        ("standard monomials span", spanning),
        ("generating space is minimal", minimality),
        ("commutator, Virasoro and lattice product identities", mode_identities),
        ("Lie bracket, Killing form, Jacobi", lie_structure),
        ("verify reports are deterministic", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(note) => println!("PASS {:>2} {name} [{secs:.2}s] {note}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{secs:.2}s] {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
