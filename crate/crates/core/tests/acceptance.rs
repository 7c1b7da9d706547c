//! Acceptance checks, run one after another so the timing comparison has
//! the machine to itself. Prints one PASS/FAIL line per criterion.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use mvnm::marriage::count_marriages;
use mvnm::pure::{discover, moment_pure, moment_pure_with, verify, PureOptions, RecurrenceCache, Route, SearchLimits};
use mvnm::stein::moment_stein;
use mvnm::wick::{moment_bruteforce, moment_wick};
use mvnm::{CovarianceSpec, ExactRational, Monomial, MultiIndex, Polynomial, Var};

type Outcome = Result<String, String>;

fn mi(v: &[u32]) -> MultiIndex {
    MultiIndex::new(v.iter().copied())
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    if elapsed < limit {
        Ok(())
    } else {
        Err(format!("{what} took {elapsed:.2?}, limit {limit:?}"))
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fact(n: u32) -> BigInt {
    (1..=n).fold(BigInt::from(1), |a, i| a * i)
}

/// `(n-1)!!` for even `n` as `n! / (2^{n/2} (n/2)!)`.
fn gaussian_moment(n: u32) -> BigInt {
    if n % 2 == 1 {
        return BigInt::from(0);
    }
    fact(n) / (BigInt::from(1) << (n / 2)) / fact(n / 2)
}

fn c1_exact_integer() -> Outcome {
    let m = mi(&[20, 20, 20]);
    let cross: BTreeMap<Var, u32> = [(Var::new(1, 2), 9), (Var::new(1, 3), 7), (Var::new(2, 3), 5)].into();
    let t = Instant::now();
    let n = count_marriages(&m, &cross).map_err(|e| e.to_string())?;
    within(t.elapsed(), Duration::from_secs(1), "count_marriages")?;
    let expect: BigInt = "444975998773143505634352562176000000000".parse().unwrap();
    ensure(n == expect, || format!("got {n}"))?;
    // the same number read off the full symbolic moment
    let poly = moment_wick(&CovarianceSpec::symbolic(3), &m).map_err(|e| e.to_string())?;
    let mono = Monomial::from_pairs(cross.iter().map(|(v, e)| (*v, *e)));
    let c = poly.coeff(&mono);
    ensure(c == ExactRational::from_integer(expect), || format!("polynomial coefficient is {c}"))?;
    Ok(format!("{n}"))
}

fn c2_digit_count() -> Outcome {
    let m = mi(&[300, 200]);
    let cross: BTreeMap<Var, u32> = [(Var::new(1, 2), 100)].into();
    let t = Instant::now();
    let n = count_marriages(&m, &cross).map_err(|e| e.to_string())?;
    within(t.elapsed(), Duration::from_secs(5), "closed-form term")?;
    ensure(n > BigInt::from(0), || "not positive".into())?;
    let digits = n.to_string().len();
    ensure(digits == 564, || format!("{digits} digits"))?;
    let poly = moment_wick(&CovarianceSpec::symbolic(2), &m).map_err(|e| e.to_string())?;
    let c = poly.coeff(&Monomial::from_pairs([(Var::new(1, 2), 100)]));
    ensure(c == ExactRational::from_integer(n), || "polynomial coefficient differs".into())?;
    Ok(format!("{digits} digits"))
}

fn c3_consistency() -> Outcome {
    let cov = CovarianceSpec::symbolic(3);
    let m = mi(&[10, 10, 10]);
    let t = Instant::now();
    let out = moment_pure_with(&cov, &m, &PureOptions::default(), &RecurrenceCache::new()).map_err(|e| e.to_string())?;
    let w = moment_wick(&cov, &m).map_err(|e| e.to_string())?;
    within(t.elapsed(), Duration::from_secs(60), "pure + wick")?;
    ensure(out.value == w, || "pure and wick differ".into())?;
    Ok(format!("{} terms, route {:?}", w.len(), out.route))
}

fn c4_speed_ratio() -> Outcome {
    let cov = CovarianceSpec::parse(3, "1/2,1/3,1/4").unwrap();
    let m = mi(&[570, 560, 750]);
    let t = Instant::now();
    let out = moment_pure_with(&cov, &m, &PureOptions::default(), &RecurrenceCache::new()).map_err(|e| e.to_string())?;
    let pure = t.elapsed();
    let t = Instant::now();
    let w = moment_wick(&cov, &m).map_err(|e| e.to_string())?;
    let wick = t.elapsed();
    ensure(out.value == w, || "pure and wick differ".into())?;
    let ratio = wick.as_secs_f64() / pure.as_secs_f64();
    let detail = format!("pure {pure:.2?}, wick {wick:.2?}, ratio {ratio:.1}, route {:?}", out.route);
    ensure(ratio >= 10.0, || detail.clone())?;
    Ok(detail)
}

fn grid(k: usize, top: u32) -> Vec<MultiIndex> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out.into_iter().flat_map(|v: Vec<u32>| (0..=top).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out.into_iter().map(MultiIndex::new).collect()
}

fn c5_oracle_triangle() -> Outcome {
    let t = Instant::now();
    let mut cells = 0;
    let mut unchecked = Vec::new();
    for k in [2, 3] {
        let cov = CovarianceSpec::symbolic(k);
        for m in grid(k, 8) {
            let w = moment_wick(&cov, &m).map_err(|e| e.to_string())?;
            let s = moment_stein(&cov, &m).map_err(|e| e.to_string())?;
            ensure(w == s, || format!("wick and stein differ at {m}"))?;
            match moment_bruteforce(&cov, &m) {
                Ok(b) => ensure(b == w, || format!("brute force differs at {m}"))?,
                Err(_) => unchecked.push(m.clone()),
            }
            cells += 1;
        }
    }
    within(t.elapsed(), Duration::from_secs(600), "grid")?;
    ensure(unchecked.is_empty(), || {
        format!(
            "brute force refused {} of {cells} cells (largest total {}); wick == stein held on all of them",
            unchecked.len(),
            unchecked.iter().map(MultiIndex::total).max().unwrap_or(0)
        )
    })?;
    Ok(format!("{cells} cells"))
}

fn c6_univariate() -> Outcome {
    let cov = CovarianceSpec::symbolic(1);
    for r in 0..=40u32 {
        let expect = Polynomial::constant(ExactRational::from_integer(gaussian_moment(r)));
        let m = mi(&[r]);
        let got = [
            moment_wick(&cov, &m),
            moment_stein(&cov, &m),
            moment_pure(&cov, &m),
        ];
        for g in got {
            let g = g.map_err(|e| e.to_string())?;
            ensure(g == expect, || format!("r={r}: got {g}"))?;
        }
    }
    Ok("r = 0..=40 on all engines".into())
}

fn c7_closure() -> Outcome {
    let mut checked = 0;
    for m in grid(3, 6).into_iter().filter(|m| m.total() % 2 == 0) {
        let mut sum = BigInt::from(0);
        for a12 in 0..=m[0].min(m[1]) {
            for a13 in 0..=m[0].min(m[2]) {
                for a23 in 0..=m[1].min(m[2]) {
                    let cross: BTreeMap<Var, u32> =
                        [(Var::new(1, 2), a12), (Var::new(1, 3), a13), (Var::new(2, 3), a23)].into();
                    sum += count_marriages(&m, &cross).map_err(|e| e.to_string())?;
                }
            }
        }
        ensure(sum == gaussian_moment(m.total()), || format!("{m}: sum {sum}"))?;
        checked += 1;
    }
    Ok(format!("{checked} indices"))
}

fn random_cov(rng: &mut StdRng, k: usize) -> CovarianceSpec {
    let items: Vec<String> = (0..k * (k - 1) / 2)
        .map(|_| {
            let q = rng.gen_range(2..=7);
            format!("{}/{}", rng.gen_range(1..q), q)
        })
        .collect();
    CovarianceSpec::parse(k, &items.join(",")).unwrap()
}

fn c8_discovery_soundness() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_2026);
    let mut runs = Vec::new();
    for i in 0..20 {
        let (cov, k, top) = match i % 3 {
            0 => (CovarianceSpec::symbolic(2), 2, 4),
            1 => {
                let c = random_cov(&mut rng, 2);
                (c, 2, 8)
            }
            _ => {
                let c = random_cov(&mut rng, 3);
                (c, 3, 4)
            }
        };
        let direction = rng.gen_range(0..k);
        let fixed = MultiIndex::new((0..k).map(|j| if j == direction { 0 } else { rng.gen_range(0..=top) }));
        let rec = discover(&cov, direction, &fixed, &SearchLimits::default())
            .map_err(|e| format!("run {i} ({cov}, d{}, {fixed}): {e}", direction + 1))?;
        let oracle = |n: u32| moment_wick(&cov, &rec.index(n)).unwrap();
        ensure(verify(&rec, oracle, 16), || format!("run {i}: held-out check failed"))?;
        let mut bad = rec.clone();
        let t = rng.gen_range(0..=bad.order);
        let d = rng.gen_range(0..bad.coeffs[t].len());
        bad.coeffs[t][d] += &Polynomial::one();
        ensure(!verify(&bad, oracle, 16), || format!("run {i}: mutant passed"))?;
        runs.push(format!("{}/{}", rec.order, rec.degree()));
    }
    Ok(format!("20 runs, order/degree {}", runs.join(" ")))
}

fn c9_constant_space() -> Outcome {
    let cov = CovarianceSpec::symbolic(2);
    let cache = RecurrenceCache::new();
    let opts = PureOptions { seed_window: false, fallback: false, ..Default::default() };
    let mut worst = 0;
    for m2 in 0..=6u32 {
        let m = mi(&[2000 - m2 % 2, m2]);
        let out = moment_pure_with(&cov, &m, &opts, &cache).map_err(|e| format!("{m}: {e}"))?;
        ensure(out.route == Route::Recurrence, || format!("{m}: route {:?}", out.route))?;
        let (order, _) = out.recurrence.unwrap();
        let stats = out.stats.unwrap();
        ensure(stats.max_live <= order, || format!("{m}: held {} values, order {order}", stats.max_live))?;
        ensure(out.value == moment_wick(&cov, &m).unwrap(), || format!("{m}: wrong value"))?;
        worst = worst.max(stats.max_live);
    }
    Ok(format!("max live values {worst}"))
}

fn table(engine: &str) -> Result<Vec<u8>, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("grid6.txt");
    let st = Command::new(env!("CARGO_BIN_EXE_mvnm"))
        .args(["table", "--k", "3", "--grid", "6", "--engine", engine, "--out"])
        .arg(&path)
        .status()
        .map_err(|e| e.to_string())?;
    ensure(st.success(), || format!("table --engine {engine} exited with {st}"))?;
    std::fs::read(&path).map_err(|e| e.to_string())
}

fn c10_golden_tables() -> Outcome {
    let first = table("wick")?;
    ensure(first == table("wick")?, || "two wick runs differ".into())?;
    ensure(first == table("stein")?, || "stein table differs".into())?;
    ensure(first == table("pure")?, || "pure table differs".into())?;
    let text = String::from_utf8(first).map_err(|e| e.to_string())?;
    ensure(!text.contains('\r') && text.ends_with('\n'), || "line endings".into())?;
    let lines: Vec<&str> = text.lines().collect();
    ensure(lines.len() == 216, || format!("{} records", lines.len()))?;
    let mut idx = grid(3, 6).into_iter().filter(|m| m.as_slice().iter().all(|&x| x >= 1));
    for line in &lines {
        let (key, poly) = line.split_once('\t').ok_or("missing tab")?;
        let m = idx.next().unwrap();
        ensure(key == m.to_string(), || format!("record {key} out of order, expected {m}"))?;
        let p: Polynomial = poly.parse().map_err(|e| format!("{key}: {e}"))?;
        ensure(p.to_string() == poly, || format!("{key}: not canonical"))?;
    }
    Ok(format!("{} records, {} bytes", lines.len(), text.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("exact marriage count at (20,20,20)", c1_exact_integer),
        ("564-digit coefficient at (300,200)", c2_digit_count),
        ("pure == wick at (10,10,10) symbolic", c3_consistency),
        ("pure == wick at (570,560,750), at least 10x faster", c4_speed_ratio),
        ("wick == stein == brute force on the m_i <= 8 grid", c5_oracle_triangle),
        ("univariate moments up to r = 40", c6_univariate),
        ("marriage counts sum to (n-1)!!", c7_closure),
        ("discovered recurrences verify, mutants do not", c8_discovery_soundness),
        ("evaluation window never exceeds the order", c9_constant_space),
        ("grid-6 tables are byte-identical across runs and engines", c10_golden_tables),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let t = Instant::now();
        let outcome = check();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {n:>2} {name} [{secs:.2}s] {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {n:>2} {name} [{secs:.2}s] {detail}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
