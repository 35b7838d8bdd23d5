//! One line per acceptance criterion. Exits nonzero if any fails.

mod common;

use std::time::{Duration, Instant};

use circldpc::circuit::{parse_circuit, Circuit, GateSet};
use circldpc::codewords::{build_ec_structure, relevant_measurements, sigma_in, sigma_out, CodeSpaces, CodewordClass, PauliOperator};
use circldpc::css::{assemble_physical, derive_logicals, mini_block, repeated_measurement_layer, CssCode};
use circldpc::distance::{circuit_distance, css_distance, DistanceValue};
use circldpc::gf2::{BitMatrix, BitVector};
use circldpc::pauli_sim::verify_codeword_equation;
use circldpc::splitting::{check_distance_bound, random_plan, symmetric_split};
use circldpc::synthesis::{boundary_b_l, roundtrip_check, trivial_partition};
use circldpc::tanner::{bit_split, build_plain, random_symmetric_graph, symmetrize, verify_symmetry, TannerGraph};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn p(s: &str) -> PauliOperator {
    s.parse().expect("pauli literal")
}

fn kernel_words(g: &TannerGraph) -> Vec<BitVector> {
    let k = g.check_matrix().kernel_basis();
    (0u64..1 << k.n_rows())
        .map(|mask| {
            let mut c = BitVector::zeros(k.n_cols());
            for (i, r) in k.rows().iter().enumerate() {
                if mask >> i & 1 == 1 {
                    c.xor_assign(r);
                }
            }
            c
        })
        .collect()
}

fn cnot_propagation() -> Outcome {
    let g = build_plain(&parse_circuit("qubits 2\ncnot 1 2").map_err(|e| e.to_string())?);
    let c = BitVector::from_bits(&[1, 0, 0, 0, 1, 1, 0, 0]);
    ensure(g.check_matrix().mul_vec(&c).is_zero(), || "not in kernel".into())?;
    let (i, o) = (sigma_in(&g, &c), sigma_out(&g, &c));
    ensure(i == p("XI") && o == p("XX"), || format!("{i} -> {o}"))?;
    Ok(format!("{i} -> {o}"))
}

fn zz_classification() -> Outcome {
    let g = build_plain(&parse_circuit(common::ZZ).map_err(|e| e.to_string())?);
    let sp = CodeSpaces::new(&g);
    let words = kernel_words(&g);
    let find = |what: &str, f: &dyn Fn(&BitVector) -> bool| words.iter().find(|c| f(c)).cloned().ok_or_else(|| format!("no {what}"));
    let class = |c: &BitVector| sp.classify(c).map_err(|e| e.to_string());
    let (xx, zz, z1, id) = (p("XXI"), p("ZZI"), p("ZII"), p("III"));
    let with = |i: &PauliOperator, o: &PauliOperator, meas: &[usize]| {
        let (i, o, meas) = (i.clone(), o.clone(), meas.to_vec());
        let g = &g;
        move |c: &BitVector| sigma_in(g, c) == i && sigma_out(g, c) == o && relevant_measurements(g, c) == meas
    };
    let gen_xx = find("X1X2 propagator", &|c| sigma_in(&g, c) == xx && sigma_out(&g, c) == xx)?;
    let gen_z1 = find("Z1 propagator", &|c| sigma_in(&g, c) == z1 && sigma_out(&g, c) == z1)?;
    let pseudo = find("Z1Z2 propagator", &|c| sigma_in(&g, c) == zz && sigma_out(&g, c) == zz)?;
    let det1 = find("first detector", &with(&zz, &id, &[0]))?;
    let det2 = find("second detector", &with(&zz, &id, &[1]))?;
    let em1 = find("first emitter", &with(&id, &zz, &[0]))?;
    let em2 = find("second emitter", &with(&id, &zz, &[1]))?;
    let checker = det1.xor(&det2);
    let expect = [
        (&gen_xx, CodewordClass::GenuinePropagator),
        (&gen_z1, CodewordClass::GenuinePropagator),
        (&pseudo, CodewordClass::PseudoPropagator),
        (&det1, CodewordClass::Detector),
        (&det2, CodewordClass::Detector),
        (&em1, CodewordClass::Emitter),
        (&em2, CodewordClass::Emitter),
        (&checker, CodewordClass::Checker),
    ];
    for (c, want) in expect {
        let got = class(c)?;
        ensure(got == want, || format!("{c} is {got:?}, expected {want:?}"))?;
    }
    ensure(relevant_measurements(&g, &checker) == [0, 1], || "checker measurements".into())?;
    Ok("8 classes as expected".into())
}

fn fuzz_corpus() -> Vec<Circuit> {
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    (0..500).map(|_| common::circuit(&mut rng, 5, 10, GateSet::Full)).collect()
}

fn codeword_fuzz(max_error_weight: usize) -> Outcome {
    let corpus = fuzz_corpus();
    let checks: usize = corpus
        .par_iter()
        .enumerate()
        .map(|(i, c)| -> Result<usize, String> {
            let mut rng = ChaCha8Rng::seed_from_u64(i as u64 ^ (max_error_weight as u64) << 32);
            let g = build_plain(c);
            let k = g.check_matrix().kernel_basis();
            let mut n = 0;
            for cw in k.rows() {
                for _ in 0..8 {
                    let e = (max_error_weight > 0).then(|| {
                        let w = rng.gen_range(0..=max_error_weight.min(g.n_bits()));
                        let mut e = BitVector::zeros(g.n_bits());
                        for b in rand::seq::index::sample(&mut rng, g.n_bits(), w) {
                            e.set(b, true);
                        }
                        e
                    });
                    verify_codeword_equation(c, &g, cw, e.as_ref(), &mut rng).map_err(|err| format!("circuit {i}: {err}\n{c}"))?;
                    n += 1;
                }
            }
            Ok(n)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(format!("{checks} runs"))
}

fn bit_splitting() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    let mut applied = 0;
    let mut i = 0;
    while applied < 200 {
        i += 1;
        let c = common::circuit(&mut rng, 5, 10, GateSet::Full);
        let g = build_plain(&c);
        let nbrs = g.bit_checks();
        let candidates: Vec<usize> = (0..g.n_bits()).filter(|&v| nbrs[v].len() >= 2).collect();
        let Some(&v) = candidates.choose(&mut rng) else { continue };
        let mut checks = nbrs[v].clone();
        checks.shuffle(&mut rng);
        let cut = rng.gen_range(1..checks.len());
        let (g2, map, _, _) = bit_split(&g, v, &checks[..cut], &checks[cut..]).map_err(|e| e.to_string())?;
        let (a, a2) = (g.check_matrix(), g2.check_matrix());
        ensure(a.kernel_basis().n_rows() == a2.kernel_basis().n_rows(), || format!("circuit {i}: dim ker changed"))?;
        let ec = build_ec_structure(&g, &[], &[]).map_err(|e| e.to_string())?;
        let d = circuit_distance(&ec.b, &ec.l, 5).map_err(|e| e.to_string())?.value;
        let d2 = circuit_distance(&map.map_rows(&ec.b), &map.map_rows(&ec.l), 5).map_err(|e| e.to_string())?.value;
        ensure(d == d2, || format!("circuit {i}: distance {d} became {d2}\n{c}"))?;
        applied += 1;
    }
    Ok(format!("{applied} splits over {i} circuits"))
}

fn symmetric_splitting() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let mut graphs = Vec::new();
    while graphs.len() < 50 {
        let pairs = rng.gen_range(2..=17);
        let (g, w) = random_symmetric_graph(&mut rng, pairs, 4, 3, 0.2);
        if g.n_bits() <= 40 && g.max_degree() <= 6 {
            let plan = random_plan(&g, &w, 3, &mut rng);
            graphs.push((g, w, plan));
        }
    }
    let bounds: Vec<String> = graphs
        .par_iter()
        .enumerate()
        .map(|(i, (g, w, plan))| -> Result<String, String> {
            let out = symmetric_split(g, w, plan).map_err(|e| format!("graph {i}: {e}"))?;
            verify_symmetry(&out.graph, &out.witness).map_err(|e| format!("graph {i}: {e}"))?;
            out.maps.verify(&g.check_matrix(), &out.graph.check_matrix()).map_err(|e| format!("graph {i}: {e}"))?;
            let (b, l) = boundary_b_l(g, w);
            let r = check_distance_bound(g, &out.maps, &b, &l, 5).map_err(|e| e.to_string())?;
            ensure(r.holds, || format!("graph {i}: {r:?}"))?;
            Ok(format!("{}/{}", r.d, r.d_split))
        })
        .collect::<Result<_, _>>()?;
    let exact = bounds.iter().filter(|s| !s.contains('>') && !s.contains("none")).count();
    Ok(format!("50 graphs, {exact} with exact distances"))
}

fn synthesis_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut done = 0;
    while done < 20 {
        let c = common::circuit(&mut rng, 4, 6, GateSet::Full);
        let s = symmetrize(&build_plain(&c), &c).map_err(|e| e.to_string())?;
        let part = trivial_partition(&s.graph, &s.witness).map_err(|e| e.to_string())?;
        let r = roundtrip_check(&s.graph, &s.witness, &part, 4).map_err(|e| e.to_string())?;
        ensure(r.ok(), || format!("graph {done}: {r:?}\n{c}"))?;
        done += 1;
    }
    Ok("20 graphs".into())
}

fn steane() -> Outcome {
    let code = CssCode::steane();
    let phys = assemble_physical(&code, &repeated_measurement_layer(2).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure(phys.a.mul_transpose(&phys.b).is_zero() && phys.a.mul_transpose(&phys.l).is_zero(), || "A Bᵀ or A Lᵀ nonzero".into())?;
    ensure(phys.a_x.mul(&phys.d_x) == phys.a_z.mul(&phys.d_z).transpose(), || "A_X D_X differs from (A_Z D_Z)ᵀ".into())?;
    ensure(phys.x_cols() == 27 && phys.a.n_cols() == 54, || format!("{} columns", phys.a.n_cols()))?;
    let r = circuit_distance(&phys.b, &phys.l, 3).map_err(|e| e.to_string())?;
    let d_css = css_distance(&code.gx, &code.gz, 3).map_err(|e| e.to_string())?.d_css;
    ensure(r.value == DistanceValue::Exact(3) && d_css == DistanceValue::Exact(3), || format!("d={} d_css={d_css}", r.value))?;
    let w = r.witness.ok_or("no witness")?;
    ensure(phys.b.mul_vec(&w).is_zero() && !phys.l.mul_vec(&w).is_zero(), || "witness not logical".into())?;
    let cols: Vec<usize> = w.ones().collect();
    let block = mini_block(&phys, cols[0]);
    ensure(block.is_some() && cols.iter().all(|&c| mini_block(&phys, c) == block), || format!("witness {cols:?} spans blocks"))?;
    Ok(format!("d=3 witness {cols:?} in block {block:?}"))
}

fn two_qubit_code() -> Outcome {
    let gx = BitMatrix::empty(2);
    let gz = BitMatrix::from_strs(&["11"]);
    let d_css = css_distance(&gx, &gz, 2).map_err(|e| e.to_string())?.d_css;
    ensure(d_css == DistanceValue::Exact(1), || format!("d_css={d_css}"))?;
    let code = derive_logicals(&gx, &gz).map_err(|e| e.to_string())?;
    let phys = assemble_physical(&code, &repeated_measurement_layer(2).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let g = build_plain(&parse_circuit(common::ZZ).map_err(|e| e.to_string())?);
    let s = [p("ZZI")];
    let ec = build_ec_structure(&g, &s, &s).map_err(|e| e.to_string())?;
    for (name, b, l) in [("closed form", &phys.b, &phys.l), ("circuit", &ec.b, &ec.l)] {
        let r = circuit_distance(b, l, 2).map_err(|e| e.to_string())?;
        ensure(r.value == DistanceValue::Exact(1), || format!("{name}: d={}", r.value))?;
        let w = r.witness.ok_or_else(|| format!("{name}: no witness"))?;
        ensure(w.weight() == 1 && b.mul_vec(&w).is_zero() && !l.mul_vec(&w).is_zero(), || format!("{name}: bad witness"))?;
    }
    Ok("d_css=1, d=1 for both constructions".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 CNOT propagation", Duration::from_secs(1), cnot_propagation),
        ("2 ZZ classification", Duration::from_secs(1), zz_classification),
        ("3 codeword equation fuzz", Duration::from_secs(120), || codeword_fuzz(0)),
        ("4 equation fuzz with errors", Duration::from_secs(300), || codeword_fuzz(4)),
        ("5 bit splitting", Duration::from_secs(300), bit_splitting),
        ("6 symmetric splitting", Duration::from_secs(600), symmetric_splitting),
        ("7 synthesis round trip", Duration::from_secs(600), synthesis_round_trip),
        ("8 Steane closed forms", Duration::from_secs(60), steane),
        ("9 [[2,1,1]] distances", Duration::from_secs(1), two_qubit_code),
    ];
    let mut failed = 0;
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = outcome.and_then(|m| if took <= limit { Ok(m) } else { Err(format!("took longer than {limit:?}")) });
        match outcome {
            Ok(m) => println!("PASS {name} ({took:.2?}): {m}"),
            Err(e) => {
                failed += 1;
                println!("FAIL {name} ({took:.2?}): {e}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
