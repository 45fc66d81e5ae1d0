//! The acceptance suite: one line per criterion, then a single assertion.
//!
//! Run with `cargo test -p hallpi --test acceptance -- --nocapture`.

use std::panic::{self, AssertUnwindSafe};
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use hallpi::arith::{self, PrimeSet};
use hallpi::catalog::Catalog;
use hallpi::classifier::{epi_minus_dpi_item, gl_hall_pi_order, gl_regime};
use hallpi::crosscheck::{self, check_row, Agreement, CrosscheckConfig};
use hallpi::glhall::{GlGroup, WitnessStatus};
use hallpi::oracle::DEFAULT_PERM_BOUND;
use hallpi::orders::{self, Family, GLSpec, Sign, SimpleGroup, SimpleGroupSpec};

const QS: [u64; 13] = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27, 32];

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn odd_primes_up_to(n: u64) -> Vec<u64> {
    (3..=n).filter(|&x| arith::is_prime(x)).collect()
}

fn big_pow(base: u64, e: u64) -> BigUint {
    BigUint::from(base).pow(e as u32)
}

/// Exponent of `r` in a nonzero big integer, by repeated division.
fn val(x: &BigUint, r: u64) -> u32 {
    assert!(!x.is_zero());
    let r = BigUint::from(r);
    let mut x = x.clone();
    let mut v = 0;
    while (&x % &r).is_zero() {
        x /= &r;
        v += 1;
    }
    v
}

/// `k^m − s` for `s ∈ {1, −1}`, as a big integer.
fn pow_minus(k: u64, m: u64, s: i32) -> BigUint {
    let p = big_pow(k, m);
    if s == 1 {
        p - BigUint::one()
    } else {
        p + BigUint::one()
    }
}

fn alt_sign(i: u64) -> i32 {
    if i % 2 == 0 {
        1
    } else {
        -1
    }
}

fn order_mod(k: u64, r: u64) -> u64 {
    let k = k % r;
    let (mut x, mut e) = (k, 1);
    while x != 1 {
        x = x * k % r;
        e += 1;
    }
    e
}

fn star(e: u64) -> u64 {
    match e % 4 {
        0 => e,
        2 => e / 2,
        _ => 2 * e,
    }
}

fn factorial_val(n: u64, r: u64) -> u32 {
    let (mut v, mut pk) = (0, r);
    while pk <= n {
        v += (n / pk) as u32;
        pk *= r;
    }
    v
}

fn criterion_1() -> Outcome {
    let mut cases = 0u64;
    for r in odd_primes_up_to(37) {
        for k in (2..=50u64).filter(|k| k % r != 0) {
            let (mut prod, mut prod_alt) = (0u32, 0u32);
            for m in 1..=60u64 {
                let direct = val(&pow_minus(k, m, 1), r);
                let direct_alt = val(&pow_minus(k, m, alt_sign(m)), r);
                prod += direct;
                prod_alt += direct_alt;
                let ki = k as i64;
                let got = [
                    arith::r_part_pow_minus_one(ki, m, r),
                    arith::r_part_pow_alt(ki, m, r),
                    arith::r_part_product(ki, m, r),
                    arith::r_part_product_alt(ki, m, r),
                ]
                .map(|x| x.expect("valid r, k").exponent(r));
                ensure(got == [direct, direct_alt, prod, prod_alt], || {
                    format!(
                        "r={r} k={k} m={m}: closed forms {got:?}, direct {:?}",
                        [direct, direct_alt, prod, prod_alt]
                    )
                })?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} (r, k, m) triples, four closed forms each"))
}

/// `|GLₙ^η(q)|_r` as `(q^e − 1)_r^{[n/e]} ([n/e]!)_r`, or the unitary form with `e*`.
fn closed_form_r_exponent(n: u64, eta: Sign, q: u64, r: u64) -> u32 {
    let e = order_mod(q, r);
    let (step, sign) = match eta {
        Sign::Plus => (e, 1),
        Sign::Minus => (star(e), alt_sign(star(e))),
    };
    let blocks = n / step;
    val(&pow_minus(q, step, sign), r) * blocks as u32 + factorial_val(blocks, r)
}

fn criterion_2() -> Outcome {
    let mut checks = 0u64;
    for n in 1..=9u32 {
        for q in QS {
            for eta in [Sign::Plus, Sign::Minus] {
                let gl = GLSpec::new(n, eta, q).map_err(|e| e.to_string())?;
                let order = orders::gl_order(&gl).map_err(|e| e.to_string())?;
                let mut primes: Vec<u64> = odd_primes_up_to(100);
                primes.extend(order.spectrum().iter().filter(|&t| t > 100));
                for r in primes.into_iter().filter(|r| q % r != 0) {
                    let direct: u32 = (1..=n as u64)
                        .map(|i| {
                            let s = if eta == Sign::Plus { 1 } else { alt_sign(i) };
                            val(&pow_minus(q, i, s), r)
                        })
                        .sum();
                    let closed = closed_form_r_exponent(n as u64, eta, q, r);
                    let got = order.exponent(r);
                    ensure(got == closed && closed == direct, || {
                        format!("{gl}, r={r}: order has r^{got}, closed form r^{closed}, product r^{direct}")
                    })?;
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("{checks} (n, η, q, r) cases with n ≤ 9 and {} field orders", QS.len()))
}

fn criterion_3() -> Outcome {
    let mut instances = Vec::new();
    for n in 2..=9u32 {
        for q in QS {
            for eta in [Sign::Plus, Sign::Minus] {
                let gl = GLSpec::new(n, eta, q).map_err(|e| e.to_string())?;
                let Ok(spec) = gl.simple_section() else { continue };
                let spectrum: Vec<u64> = orders::simple_order(&spec)
                    .map_err(|e| e.to_string())?
                    .spectrum()
                    .iter()
                    .filter(|&t| t != 2 && t != spec.p())
                    .collect();
                let group_order = orders::gl_order(&gl).map_err(|e| e.to_string())?;
                for mask in 1u32..(1 << spectrum.len()) {
                    if !(2..=3).contains(&mask.count_ones()) {
                        continue;
                    }
                    let pi =
                        PrimeSet::new(spectrum.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p))
                            .map_err(|e| e.to_string())?;
                    let item = epi_minus_dpi_item(&SimpleGroup::Lie(spec), &pi).map_err(|e| e.to_string())?;
                    let fires = item
                        .as_ref()
                        .is_some_and(|f| ["Item II-B(a)", "Item II-B(b)", "Item II-B(c)"].contains(&f.tag.as_str()));
                    ensure(fires == gl_regime(&gl, &pi).is_ok(), || format!("{gl} {pi}: item and regime disagree"))?;
                    if !fires {
                        continue;
                    }
                    let formula = gl_hall_pi_order(&gl, &pi).map_err(|e| e.to_string())?;
                    let direct = group_order.pi_part(&pi);
                    ensure(formula == direct, || format!("{gl} {pi}: formula {formula}, |G|_π = {direct}"))?;
                    instances.push(format!("{gl}{pi}"));
                }
            }
        }
    }
    for seed in ["GL3(11){3,5}", "GU3(4){3,5}"] {
        ensure(instances.iter().any(|i| i == seed), || format!("{seed} did not fire"))?;
    }
    ensure(instances.len() >= 2, || "fewer than two instances".into())?;
    Ok(format!("{} instances, including GL3(11){{3,5}} and GU3(4){{3,5}}", instances.len()))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let pi: PrimeSet = "3,5".parse().unwrap();
    for (eta, q) in [(Sign::Plus, 11), (Sign::Minus, 4)] {
        let g = GlGroup::new(GLSpec::new(3, eta, q).unwrap()).map_err(|e| e.to_string())?;
        let name = g.gl().to_string();
        let hall = g.build_tr(&pi, 100_000).map_err(|e| e.to_string())?;
        ensure(hall.tr.order() == Some(375) && hall.verified, || format!("{name}: |TR| = {:?}", hall.tr.order()))?;
        let c = g.centralizer_in_tr_of_r(&hall).ok_or("no centralizer report")?;
        ensure(c.matches_expected && c.contains_r && c.structure == "5 × 3" && c.t_ranks == vec![(5, 1)], || {
            format!("{name}: centralizer {c:?}")
        })?;
        let w = g.verify_dpi_failure_witness(&pi, 100_000);
        ensure(w.status == WitnessStatus::Certified, || format!("{name}: witness {}", w.status))?;
        let scan = &w.scans[0];
        ensure(scan.t == 5 && scan.max_t_rank == Some(1) && scan.witness_rank == 2, || {
            format!("{name}: scan {scan:?}")
        })?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed.as_secs_f64() < 5.0, || format!("took {elapsed:?}"))?;
    Ok("|TR| = 375 in both, C_TR(R) ≅ 5 × 3, max m₅ = 1 < 2 = rank(K)".into())
}

fn criterion_5() -> Outcome {
    let config = CrosscheckConfig { bound: DEFAULT_PERM_BOUND, theorems: false, dpi_strategy: None };
    let report = crosscheck::crosscheck(&Catalog::shipped(), &crosscheck::odd_prime_pairs(13), &config)
        .map_err(|e| e.to_string())?;
    let failures: Vec<String> = report.failures().map(|r| format!("{} {}: {:?}", r.group, r.pi, r.agreement)).collect();
    ensure(failures.is_empty(), || failures.join("; "))?;
    for (g, pi, dpi, hall) in
        [("PSL2(7)", "3,7", true, true), ("PSL2(11)", "3,5", false, false), ("PSL2(13)", "3,7", false, false)]
    {
        let row = report.row(g, pi).ok_or_else(|| format!("no row {g} {pi}"))?;
        ensure(row.oracle.dpi == dpi && row.oracle.has_hall == hall && row.agreement == Agreement::Agree, || {
            format!("{g} {pi}: {row}")
        })?;
    }
    let agree = report.rows.iter().filter(|r| r.agreement == Agreement::Agree).count();
    Ok(format!("{} rows, {agree} determined by the classifier, 0 disagreements", report.rows.len()))
}

fn criterion_6() -> Outcome {
    let cat = Catalog::shipped();
    let (mut rows, mut dpi_rows, mut star_rows) = (0, 0, 0);
    for entry in &cat.entries {
        let group = entry.group(DEFAULT_PERM_BOUND).map_err(|e| e.to_string())?;
        let spectrum: Vec<u64> = group.prime_spectrum().iter().collect();
        // π = π(G) makes G its own Hall subgroup; only cheap for small G.
        let full = (1u32 << spectrum.len()) - 1;
        let last = if group.order() < 1000 { full } else { full - 1 };
        for mask in 1..=last {
            if mask.count_ones() < 2 {
                continue;
            }
            let pi = PrimeSet::new(spectrum.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p))
                .unwrap();
            let row = check_row(
                entry,
                &group,
                &pi,
                &CrosscheckConfig { bound: DEFAULT_PERM_BOUND, theorems: true, dpi_strategy: None },
            )
            .map_err(|e| e.to_string())?;
            rows += 1;
            ensure(!row.failed(), || format!("{row}"))?;
            if let Some(t) = &row.theorems {
                dpi_rows += 1;
                ensure(t.main_theorem && t.strongly_pronormal && t.star != Some(false), || format!("{row}"))?;
                let expect_star = !pi.contains(2) && entry.lie.iter().any(|s| !pi.contains(s.p()));
                ensure(t.star.is_some() == expect_star, || format!("{row}: star applicability"))?;
                star_rows += t.star.is_some() as usize;
            }
        }
    }
    ensure(dpi_rows >= 4 && star_rows >= 2, || format!("only {dpi_rows} D_π rows, {star_rows} star rows"))?;
    Ok(format!(
        "{rows} (G, π) pairs, {dpi_rows} with D_π: main theorem, strong pronormality and (*) ({star_rows} rows) hold"
    ))
}

fn criterion_7() -> Outcome {
    let cat = Catalog::shipped();
    let entry = cat.get("PSL2(7)").map_err(|e| e.to_string())?;
    let group = entry.group(DEFAULT_PERM_BOUND).map_err(|e| e.to_string())?;
    let pi: PrimeSet = "2,3".parse().unwrap();
    let analysis = group.analyze_pi(&group.whole(), &pi);
    let orders: Vec<usize> = analysis.halls().map(|h| h.order()).collect();
    ensure(orders == [24, 24], || format!("Hall classes of orders {orders:?}"))?;
    let halls: Vec<_> = analysis.halls().collect();
    ensure(group.conjugating_element(halls[0], halls[1], &group.whole()).is_none(), || {
        "the two classes are conjugate".into()
    })?;
    ensure(!group.check_cpi(&pi), || "C_π reported".into())?;
    let row = check_row(entry, &group, &pi, &CrosscheckConfig::default()).map_err(|e| e.to_string())?;
    ensure(
        row.oracle.has_hall && !row.oracle.cpi && row.invariants_hold && row.agreement == Agreement::OracleOnly,
        || format!("{row}"),
    )?;
    Ok("two classes of Hall subgroups of order 24, C_π false, oracle-only row".into())
}

fn table_row(spec: &SimpleGroupSpec) -> u64 {
    let gcd = |a: u64, b: &BigUint| {
        let rem = (b % BigUint::from(a)).iter_u64_digits().next().unwrap_or(0);
        arith::gcd(a, rem)
    };
    let q = spec.q();
    let l = spec.rank() as u64;
    use Family::*;
    match spec.family() {
        A => gcd(l + 1, &BigUint::from(q - 1)),
        TwistedA => gcd(l + 1, &BigUint::from(q + 1)),
        B | C | E7 => gcd(2, &BigUint::from(q - 1)),
        D => gcd(4, &pow_minus(q, l, 1)),
        TwistedD => gcd(4, &pow_minus(q, l, -1)),
        E6 => gcd(3, &BigUint::from(q - 1)),
        TwistedE6 => gcd(3, &BigUint::from(q + 1)),
        E8 | F4 | G2 | TrialityD4 | Suzuki | Ree | ReeF4 => 1,
    }
}

fn criterion_8() -> Outcome {
    use Family::*;
    let mut rows = 0;
    let families: [(Family, &[u32]); 13] = [
        (A, &[1, 2, 3, 4, 5]),
        (TwistedA, &[2, 3, 4, 5]),
        (B, &[2, 3]),
        (C, &[3, 4]),
        (D, &[4, 5, 6]),
        (TwistedD, &[4, 5]),
        (E6, &[6]),
        (TwistedE6, &[6]),
        (E7, &[7]),
        (E8, &[8]),
        (F4, &[4]),
        (G2, &[2]),
        (TrialityD4, &[4]),
    ];
    for (family, ranks) in families {
        for &rank in ranks {
            for q in QS {
                let Ok(spec) = SimpleGroupSpec::with_q(family, rank, q) else { continue };
                let (got, want) = (orders::outdiag_order(&spec), table_row(&spec));
                ensure(got == want, || format!("{spec}: outdiag {got}, table {want}"))?;
                if matches!(family, A | TwistedA) {
                    let gl = GLSpec::new(rank + 1, if family == A { Sign::Plus } else { Sign::Minus }, q).unwrap();
                    let ratio = orders::gl_order(&gl)
                        .unwrap()
                        .checked_div(&orders::simple_order(&spec).unwrap())
                        .and_then(|x| x.checked_div(&arith::factor(gl.q_minus_eta()).unwrap()))
                        .map_err(|e| e.to_string())?;
                    ensure(ratio.to_u64() == Some(want), || format!("{spec}: |PGL|/|S| = {ratio}"))?;
                }
                rows += 1;
            }
        }
    }
    for (name, d) in [("A2(4)", 3), ("2A2(4)", 1), ("D4(3)", 4), ("2D5(3)", 4), ("E6(4)", 3)] {
        let spec: SimpleGroupSpec = name.parse().unwrap();
        ensure(orders::outdiag_order(&spec) == d, || name.to_string())?;
    }
    ensure(rows >= 30, || format!("only {rows} rows"))?;
    Ok(format!("{rows} (family, rank, q) rows"))
}

#[test]
fn acceptance() {
    let criteria: [(&str, Check); 8] = [
        ("r-part identities", criterion_1),
        ("GL/GU order r-parts", criterion_2),
        ("Hall-order formula", criterion_3),
        ("GL3(11), GU3(4) constructions", criterion_4),
        ("classifier and oracle agree", criterion_5),
        ("theorem spot-checks", criterion_6),
        ("PSL2(7) with π = {2,3}", criterion_7),
        ("Table 1 conformance", criterion_8),
    ];
    let start = Instant::now();
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let t = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {} PASS  {name}: {detail} [{:.2?}]", i + 1, t.elapsed()),
            Err(detail) => {
                println!("criterion {} FAIL  {name}: {detail} [{:.2?}]", i + 1, t.elapsed());
                failed.push(i + 1);
            }
        }
    }
    println!("acceptance: {} of 8 passed in {:.2?}", 8 - failed.len(), start.elapsed());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
