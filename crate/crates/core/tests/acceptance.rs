//! Acceptance suite: one PASS/FAIL line per criterion, exact matching throughout.
//!
//! Runs without the libtest harness so the lines always print; the process
//! exits nonzero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cosetmap::affine_ct::{
    block_cycle_type, closed_form_cycle_type, gamma_dpl, gamma_of_poly, BlockCase, ClosedForm, UnitClass,
};
use cosetmap::cgl::cgl_power_set;
use cosetmap::cwaffine::{
    construct_main, construct_sylow_type, cycles_by_least, one_cycle_map, one_cycle_polynomial, sylow_cycle_types,
    ConstructMode, CosetData, CosetWiseAffineMap, GammaChoice,
};
use cosetmap::gf::{enumerate_irreducibles, parse_poly};
use cosetmap::oracle::{analyze, evaluate, index_to_vector, interpolate, Addition, MapTable, Report};
use cosetmap::{CycleType, Field, Matrix, Poly, Vector};

struct Outcome {
    pass: bool,
    detail: String,
}

fn ok(detail: impl Into<String>) -> Outcome {
    Outcome { pass: true, detail: detail.into() }
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn ct(s: &str) -> CycleType {
    s.parse().unwrap()
}

/// `R ↦ R·X + U` on GF(p)[X]/(Q^e) by direct arithmetic on coefficient vectors.
fn block_oracle(q: &Poly, e: usize, u: &Poly) -> CycleType {
    let p = q.field().p();
    let m = q.pow(e as u64);
    let n = m.degree().unwrap();
    let mc = m.coeffs();
    let total = p.pow(n as u32) as usize;
    let images: Vec<usize> = (0..total)
        .map(|idx| {
            let r: Vec<u64> = (0..n).map(|i| (idx as u64 / p.pow(i as u32)) % p).collect();
            let top = r[n - 1];
            (0..n).fold(0usize, |acc, i| {
                let shifted = if i == 0 { 0 } else { r[i - 1] };
                let c = (shifted + p * p - top * mc[i] % p + u.coeff(i)) % p;
                acc + c as usize * (p as usize).pow(i as u32)
            })
        })
        .collect();
    CycleType::from_permutation(&images).unwrap()
}

struct SweepRecord {
    q: Poly,
    e: usize,
    displayed: bool,
    corrected: bool,
}

fn block_sweep() -> (usize, Vec<String>, Vec<SweepRecord>) {
    let mut cases = 0;
    let mut failures = Vec::new();
    let mut records = Vec::new();
    for p in [2u64, 3, 5] {
        let field = Field::prime(p).unwrap();
        for q in enumerate_irreducibles(&field, 3) {
            if q.is_x() {
                continue;
            }
            let deg = q.degree().unwrap() as u32;
            let mut e = 1;
            while p.pow(deg * e as u32) <= 100_000 {
                for class in BlockCase::classes(&q, e) {
                    let case = BlockCase::new(q.clone(), e, class).unwrap();
                    let u = case.witness_u();
                    let want = block_oracle(&q, e, &u);
                    let got = block_cycle_type(&case).unwrap();
                    cases += 1;
                    if got != want || BlockCase::classify(q.clone(), e, &u).unwrap().class() != class {
                        failures.push(format!("GF({p}) Q={q} e={e} {class:?}: chain {got}, oracle {want}"));
                    }
                    if class == UnitClass::Generic && e >= 2 {
                        records.push(SweepRecord {
                            q: q.clone(),
                            e,
                            displayed: closed_form_cycle_type(&case, ClosedForm::Displayed) == Some(want.clone()),
                            corrected: closed_form_cycle_type(&case, ClosedForm::Corrected) == Some(want.clone()),
                        });
                    }
                }
                e += 1;
            }
        }
    }
    (cases, failures, records)
}

fn criterion_1() -> Outcome {
    let (cases, failures, _) = block_sweep();
    if failures.is_empty() {
        ok(format!("{cases} blocks agree with the brute-force oracle"))
    } else {
        let shown: Vec<&String> = failures.iter().take(5).collect();
        check(false, format!("{} of {cases} blocks disagree, e.g. {shown:?}", failures.len()))
    }
}

fn criterion_2() -> Outcome {
    let f3 = Field::prime(3).unwrap();
    let gamma = |s: &str| gamma_of_poly(&parse_poly(&f3, s).unwrap()).unwrap();
    let set = |xs: &[&str]| xs.iter().map(|s| ct(s)).collect::<BTreeSet<_>>();
    let mut bad = Vec::new();
    let expect = [
        ("(X-1)^2", "X^2-2*X+1", set(&["x1^3 x3^2", "x3^3"])),
        ("(X-1)^3", "X^3-1", set(&["x1^3 x3^8", "x9^3"])),
        ("X^2+X+2", "X^2+X+2", set(&["x1 x8"])),
    ];
    for (name, text, want) in &expect {
        if &gamma(text) != want {
            bad.push(format!("Γ({name}) = {:?}", gamma(text)));
        }
    }
    let products = [
        (["x1^3 x3^2", "x1^3 x3^8", "x1 x8"], "x1^9 x3^78 x8^9 x24^78"),
        (["x1^3 x3^2", "x9^3", "x1 x8"], "x9^27 x72^27"),
        (["x3^3", "x1^3 x3^8", "x1 x8"], "x3^81 x24^81"),
        (["x3^3", "x9^3", "x1 x8"], "x9^27 x72^27"),
    ];
    let mut values = Vec::new();
    for (factors, want) in products {
        let got = ct(factors[0]).weixu(&ct(factors[1])).weixu(&ct(factors[2]));
        if got != ct(want) {
            bad.push(format!("{factors:?} gave {got}"));
        }
        values.push(got);
    }
    if values[1] != values[3] {
        bad.push("second and fourth products differ".into());
    }
    check(bad.is_empty(), if bad.is_empty() { "three Γ sets and four products exact".into() } else { bad.join("; ") })
}

fn all_matrices(field: &Field, d: usize) -> Vec<Matrix> {
    let q = field.size();
    let total = q.pow((d * d) as u32);
    (0..total)
        .map(|mut i| {
            let rows = (0..d)
                .map(|_| {
                    (0..d)
                        .map(|_| {
                            let a = i % q;
                            i /= q;
                            a
                        })
                        .collect()
                })
                .collect();
            Matrix::from_rows(field, rows).unwrap()
        })
        .collect()
}

fn criterion_3() -> Outcome {
    let mut bad = Vec::new();
    let mut notes = Vec::new();
    for (d, q) in [(1usize, 2u64), (1, 3), (1, 4), (1, 5), (1, 7), (2, 2), (2, 3), (3, 2)] {
        let p = (2..=q).find(|p| q % p == 0).unwrap();
        let k = (q as f64).log(p as f64).round() as usize;
        let field = Field::new(p, k).unwrap();
        let gl: Vec<Matrix> = all_matrices(&field, d).into_iter().filter(Matrix::is_invertible).collect();
        let id = Matrix::identity(&field, d);
        let cgl: Vec<&Matrix> = gl.iter().filter(|m| (*m + &id).is_invertible()).collect();
        let products: BTreeSet<Vec<Vec<u64>>> = cgl
            .iter()
            .flat_map(|a| cgl.iter().map(move |b| (*a * *b).to_rows()))
            .collect();
        let claim: BTreeSet<Vec<Vec<u64>>> = match (d, q) {
            (1, 2) => BTreeSet::new(),
            (1, 3) => [vec![vec![1]]].into_iter().collect(),
            (2, 2) => [vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![1, 1]], vec![vec![1, 1], vec![1, 0]]]
                .into_iter()
                .collect(),
            _ => gl.iter().map(Matrix::to_rows).collect(),
        };
        let lib = cgl_power_set(&field, d, 2).unwrap();
        let lib_agrees = gl.iter().all(|m| lib.contains(m) == products.contains(&m.to_rows()));
        if products != claim || !lib_agrees {
            bad.push(format!("(d,q)=({d},{q}): {} products vs claim {}", products.len(), claim.len()));
        }
        notes.push(format!("({d},{q}):{}/{}", products.len(), gl.len()));
    }
    check(bad.is_empty(), if bad.is_empty() { notes.join(" ") } else { bad.join("; ") })
}

fn oracle(map: &CosetWiseAffineMap) -> Report {
    analyze(&map.tabulate().unwrap(), Addition::Digitwise { p: map.splitting().p }).unwrap()
}

fn is_complete_table(images: &[usize], p: u64) -> bool {
    analyze(&MapTable::new(images.to_vec()).unwrap(), Addition::Digitwise { p }).unwrap().is_complete
}

/// A uniformly random complete mapping of GF(p)^t by rejection, if one turns up.
fn random_complete(rng: &mut ChaCha8Rng, p: u64, t: usize, attempts: usize) -> Option<Vec<usize>> {
    let n = (p as usize).pow(t as u32);
    let mut g: Vec<usize> = (0..n).collect();
    for _ in 0..attempts {
        g.shuffle(rng);
        if is_complete_table(&g, p) {
            return Some(g.clone());
        }
    }
    None
}

/// Random admissible `γ_{ℓ,i}` for the cycles of `g`, with the expected product.
fn random_gammas(rng: &mut ChaCha8Rng, g: &[usize], d: usize, p: u64) -> Option<(GammaChoice, CycleType)> {
    let mut choice = GammaChoice::new();
    let mut expected = CycleType::empty();
    let mut counters: BTreeMap<u64, usize> = BTreeMap::new();
    for cycle in cycles_by_least(g) {
        let l = cycle.len() as u64;
        let i = counters.entry(l).or_insert(0);
        *i += 1;
        let options: Vec<CycleType> = gamma_dpl(d, p, l).unwrap().into_iter().collect();
        let gamma = options.choose(rng)?.clone();
        expected = expected.try_mul(&gamma.try_blow_up(l).unwrap()).unwrap();
        choice.insert((l, *i), gamma);
    }
    Some((choice, expected))
}

fn criterion_4() -> Outcome {
    let mut bad = Vec::new();
    let mut notes = Vec::new();
    for (p, d, t) in [(3u64, 1usize, 1usize), (3, 1, 2), (5, 1, 1), (2, 2, 1), (3, 2, 1)] {
        let mut rng = ChaCha8Rng::seed_from_u64(p * 100 + d as u64 * 10 + t as u64);
        let mut passed = 0;
        for trial in 0..20 {
            let Some(g) = random_complete(&mut rng, p, t, 20_000) else {
                bad.push(format!("(p,d,t)=({p},{d},{t}): GF({p})^{t} has no complete base mapping"));
                break;
            };
            let Some((gammas, expected)) = random_gammas(&mut rng, &g, d, p) else {
                bad.push(format!("(p,d,t)=({p},{d},{t}): some Γ({d},{p},ℓ) is empty"));
                break;
            };
            match construct_main(p, d, t, &g, &gammas, trial, ConstructMode::Complete) {
                Ok(map) => {
                    let r = oracle(&map);
                    if r.is_complete && r.cycle_type.as_ref() == Some(&expected) {
                        passed += 1;
                    } else {
                        bad.push(format!("({p},{d},{t}) trial {trial}: got {:?}, want {expected}", r.cycle_type));
                    }
                }
                Err(e) => bad.push(format!("({p},{d},{t}) trial {trial}: {e}")),
            }
        }
        notes.push(format!("({p},{d},{t}):{passed}/20"));
    }
    let detail = if bad.is_empty() { notes.join(" ") } else { format!("{}; {}", notes.join(" "), bad.join("; ")) };
    check(bad.is_empty(), detail)
}

/// Cycle types of the iterated wreath product `C_p ≀ ⋯ ≀ C_p` (k factors):
/// a base element contributes the product of its `p` coordinates' types, a
/// top `p`-cycle contributes the blow-up of any lower type.
fn sylow_types_by_wreath(p: u64, k: usize) -> BTreeSet<CycleType> {
    let mut types: BTreeSet<CycleType> = [CycleType::power(1, 1)].into_iter().collect();
    for _ in 0..k {
        let mut products: BTreeSet<CycleType> = [CycleType::empty()].into_iter().collect();
        for _ in 0..p {
            products = products.iter().flat_map(|a| types.iter().map(move |b| a * b)).collect();
        }
        products.extend(types.iter().map(|t| t.blow_up(p)));
        types = products;
    }
    types
}

fn criterion_5() -> Outcome {
    let mut bad = Vec::new();
    let mut notes = Vec::new();
    let listed: BTreeSet<CycleType> = ["x1^9", "x1^6 x3", "x1^3 x3^2", "x3^3", "x9"].map(ct).into_iter().collect();
    for k in [2usize, 3] {
        let types: BTreeSet<CycleType> = sylow_cycle_types(3, k).into_iter().collect();
        let reference = sylow_types_by_wreath(3, k);
        if types != reference || (k == 2 && types != listed) {
            bad.push(format!("q=3^{k}: enumerated types differ from the wreath-product reference"));
        }
        for target in &reference {
            match construct_sylow_type(3, k, target) {
                Ok(map) => {
                    let r = oracle(&map);
                    if !(r.is_complete && r.cycle_type.as_ref() == Some(target)) {
                        bad.push(format!("{target}: oracle found {:?}", r.cycle_type));
                    }
                }
                Err(e) => bad.push(format!("{target}: {e}")),
            }
        }
        notes.push(format!("q={}: {} types", 3u64.pow(k as u32), reference.len()));
    }
    check(bad.is_empty(), if bad.is_empty() { notes.join(", ") } else { bad.join("; ") })
}

fn criterion_6() -> Outcome {
    let mut bad = Vec::new();
    for (p, k) in [(3u64, 1usize), (5, 1), (7, 1), (3, 2), (5, 2), (3, 3), (7, 2), (3, 4), (5, 3)] {
        let r = oracle(&one_cycle_map(p, k).unwrap());
        let q = p.pow(k as u32);
        if !(r.is_complete && r.cycle_type == Some(CycleType::cycle(q))) {
            bad.push(format!("q={q}: complete={} type={:?}", r.is_complete, r.cycle_type));
        }
    }
    for k in 1..=4usize {
        let r = oracle(&one_cycle_map(2, k).unwrap());
        let q = 1u64 << k;
        if r.is_complete || r.cycle_type != Some(CycleType::cycle(q)) || r.fixed_points != 0 {
            bad.push(format!("q={q}: complete={} fixed points={}", r.is_complete, r.fixed_points));
        }
    }
    check(
        bad.is_empty(),
        if bad.is_empty() { "odd q: complete q-cycles; even q: q-cycles, no fixed point, not complete".into() } else { bad.join("; ") },
    )
}

const F27: &str = "x^24 + x^22 + x^20 + w^16*x^18 + x^16 + x^14 + w^9*x^12 + w^9*x^10 + x^8 + w^16*x^6 + w^9*x^4 + w^16*x^2 + x + w^6";

fn criterion_7() -> Outcome {
    let field = Field::with_modulus(3, &[1, 2, 0, 1]).unwrap();
    let poly = one_cycle_polynomial(&field).unwrap();
    let text = poly.to_text("x");
    if text != F27 {
        return check(false, format!("got {text}"));
    }
    let values = evaluate(&poly).unwrap();
    let table = MapTable::new(values.iter().map(|&v| v as usize).collect()).unwrap();
    let r = analyze(&table, Addition::Digitwise { p: 3 }).unwrap();
    let back = interpolate(&field, &values).unwrap();
    check(
        r.is_complete && r.cycle_type == Some(ct("x27")) && back == poly,
        format!("text exact; complete={} type={:?} interpolation round trip={}", r.is_complete, r.cycle_type.map(|c| c.to_string()), back == poly),
    )
}

fn random_cw(rng: &mut ChaCha8Rng, p: u64, d: usize, t: usize) -> CosetWiseAffineMap {
    let field = Field::prime(p).unwrap();
    let count = (p as usize).pow(t as u32);
    let mut targets: Vec<usize> = (0..count).collect();
    targets.shuffle(rng);
    let perm_like = rng.gen_bool(0.7);
    let cosets = (0..count)
        .map(|i| {
            let alpha = if perm_like || rng.gen_bool(0.8) {
                Matrix::random_invertible(&field, d, rng)
            } else {
                Matrix::random(&field, d, d, rng)
            };
            let target = if perm_like || rng.gen_bool(0.8) { targets[i] } else { rng.gen_range(0..count) };
            CosetData {
                alpha,
                omega: Vector::new(&field, (0..d).map(|_| field.random(rng)).collect()),
                nu: index_to_vector(&field, t, target).sub(&index_to_vector(&field, t, i)),
            }
        })
        .collect();
    CosetWiseAffineMap::new(p, d, t, cosets).unwrap()
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut bad = 0;
    let (mut perms, mut complete) = (0, 0);
    for _ in 0..500 {
        let p = [2u64, 3, 5][rng.gen_range(0..3)];
        let n = rng.gen_range(1..=4usize);
        let d = rng.gen_range(1..=n);
        let f = random_cw(&mut rng, p, d, n - d);
        let r = oracle(&f);
        perms += usize::from(r.is_bijection);
        complete += usize::from(r.is_complete);
        let ct_ok = match f.cycle_type() {
            Ok(c) => Some(c) == r.cycle_type,
            Err(_) => !r.is_bijection,
        };
        if f.is_permutation() != r.is_bijection || f.is_complete() != r.is_complete || !ct_ok {
            bad += 1;
        }
    }
    check(bad == 0, format!("500 maps ({perms} permutations, {complete} complete), {bad} disagreements"))
}

fn two_cycles(r: &Report) -> u64 {
    r.cycle_type.as_ref().map_or(0, |c| c.count(2))
}

fn criterion_9() -> Outcome {
    let mut bad = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut odd_maps: Vec<CosetWiseAffineMap> = Vec::new();
    for k in [2usize, 3] {
        for target in sylow_cycle_types(3, k) {
            odd_maps.push(construct_sylow_type(3, k, &target).unwrap());
        }
    }
    for (p, k) in [(3u64, 3usize), (5, 2), (7, 2)] {
        odd_maps.push(one_cycle_map(p, k).unwrap());
    }
    for (p, d, t) in [(3u64, 1usize, 2usize), (3, 2, 1), (5, 1, 1), (5, 2, 1)] {
        for trial in 0..10 {
            let g = random_complete(&mut rng, p, t, 20_000).unwrap();
            let (gammas, _) = random_gammas(&mut rng, &g, d, p).unwrap();
            odd_maps.push(construct_main(p, d, t, &g, &gammas, trial, ConstructMode::Complete).unwrap());
        }
    }
    let with_two_cycles = odd_maps.iter().filter(|m| {
        let r = oracle(m);
        !r.is_complete || two_cycles(&r) > 0
    });
    let n_bad = with_two_cycles.count();
    if n_bad > 0 {
        bad.push(format!("{n_bad} odd-characteristic maps are incomplete or have a 2-cycle"));
    }
    let mut char2 = 0;
    for t in [0usize, 2] {
        let n = 1usize << t;
        let mut g: Vec<usize> = (0..n).collect();
        let mut bases = Vec::new();
        permutations(&mut g, 0, &mut |g| {
            if is_complete_table(g, 2) {
                bases.push(g.to_vec());
            }
        });
        for (trial, g) in bases.iter().enumerate() {
            for rep in 0..3 {
                let (gammas, _) = random_gammas(&mut rng, g, 2, 2).unwrap();
                let map = construct_main(2, 2, t, g, &gammas, (trial * 3 + rep) as u64, ConstructMode::Complete).unwrap();
                let r = oracle(&map);
                char2 += 1;
                if !r.is_complete || r.fixed_points != 1 || two_cycles(&r) > 0 {
                    bad.push(format!("char 2 map with {} fixed points", r.fixed_points));
                }
            }
        }
    }
    let mut weixu_bad = 0;
    for _ in 0..200 {
        let (a, b) = (random_perm(&mut rng), random_perm(&mut rng));
        let (m, n) = (a.len(), b.len());
        let product: Vec<usize> = (0..m * n).map(|i| a[i / n] * n + b[i % n]).collect();
        let want = CycleType::from_permutation(&product).unwrap();
        let got = CycleType::from_permutation(&a).unwrap().weixu(&CycleType::from_permutation(&b).unwrap());
        weixu_bad += usize::from(got != want);
    }
    if weixu_bad > 0 {
        bad.push(format!("{weixu_bad} ⋇ products disagree with the direct sum"));
    }
    check(
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} odd maps without 2-cycles, {char2} char-2 maps with one fixed point, 200 ⋇ pairs", odd_maps.len())
        } else {
            bad.join("; ")
        },
    )
}

fn random_perm(rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = rng.gen_range(1..=12);
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    v
}

fn permutations(v: &mut Vec<usize>, start: usize, visit: &mut dyn FnMut(&[usize])) {
    if start == v.len() {
        visit(v);
        return;
    }
    for i in start..v.len() {
        v.swap(start, i);
        permutations(v, start + 1, visit);
        v.swap(start, i);
    }
}

fn criterion_10() -> Outcome {
    let (_, failures, records) = block_sweep();
    for r in records.iter().take(12) {
        println!(
            "    GF({}) Q={} e={}: displayed {} corrected {}",
            r.q.field().p(),
            r.q,
            r.e,
            if r.displayed { "matches" } else { "differs" },
            if r.corrected { "matches" } else { "differs" }
        );
    }
    let displayed = records.iter().filter(|r| r.displayed).count();
    let corrected = records.iter().filter(|r| r.corrected).count();
    check(
        failures.is_empty() && records.len() >= 10,
        format!(
            "{} instances with e ≥ 2, Q ≠ X-1: corrected exponent matches {corrected}, displayed matches {displayed}; divisor chain matches the oracle in all",
            records.len()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("block cycle types vs brute force", criterion_1),
        ("Γ golden values and ⋇ products", criterion_2),
        ("products of two CGL matrices", criterion_3),
        ("coset-wise lift of complete base maps", criterion_4),
        ("Sylow cycle types at q = 9, 27", criterion_5),
        ("one-cycle maps", criterion_6),
        ("f27 golden polynomial", criterion_7),
        ("structure vs oracle on random maps", criterion_8),
        ("invariants", criterion_9),
        ("closed-form record", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!outcome.pass);
        println!(
            "criterion {:>2} {verdict} {name} ({:.1}s): {}",
            i + 1,
            start.elapsed().as_secs_f64(),
            outcome.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
