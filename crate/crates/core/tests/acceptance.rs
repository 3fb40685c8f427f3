//! One PASS/FAIL line per acceptance criterion. Indented lines underneath a
//! criterion are companions: corrected forms and supplementary evidence.
//! They never affect the verdict.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pearchaos::fourmoments::{
    bound, characterization_residual, eq36_residual_univariate, moment_combination, uq_coefficients, BoundOptions,
    TargetSpec,
};
use pearchaos::generator::Generator;
use pearchaos::montecarlo::{chaos_sample, euler_maruyama, kolmogorov_distance};
use pearchaos::rational::{binomial, factorial, int, rat, to_f64};
use pearchaos::spectral::{chaos_grade, is_chaotic, orthopoly, square_expansion};
use pearchaos::stein::{admissible_degree, sigma2_from_density, stein_discrepancy, DensityTarget};
use pearchaos::tensor::{read_chaos, tensor_eigenfunction, ChaosElement, TensorGenerator};
use pearchaos::{PearsonParams, Rational, SdeOptions, Surd};

struct Report {
    failed: Vec<usize>,
}

impl Report {
    fn line(&mut self, id: usize, name: &str, pass: bool, detail: &str, elapsed: Duration) {
        println!("{} {id:>2} {name}: {detail} [{:.2} s]", if pass { "PASS" } else { "FAIL" }, elapsed.as_secs_f64());
        if !pass {
            self.failed.push(id);
        }
    }
}

fn note(text: &str) {
    println!("        {text}");
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed())
}

fn one() -> Rational {
    int(1)
}

/// Random valid parameter sets with `b2 < 1/3`, drawn on a small rational lattice.
fn random_params(rng: &mut ChaCha8Rng, count: usize) -> Vec<PearsonParams> {
    let mut out = Vec::new();
    while out.len() < count {
        let m = rat(rng.random_range(-6..7), rng.random_range(1..5));
        let b0 = rat(rng.random_range(0..9), rng.random_range(1..4));
        let b1 = rat(rng.random_range(-5..6), rng.random_range(1..4));
        let b2 = rat(rng.random_range(-8..4), rng.random_range(1..13));
        if &b2 * int(3) >= one() {
            continue;
        }
        if let Ok(p) = PearsonParams::new(one(), m, b0, b1, b2) {
            out.push(p);
        }
    }
    out
}

fn coeffs(p: &PearsonParams) -> (Rational, Rational, Rational, Rational) {
    (p.m().clone(), p.b0().clone(), p.b1().clone(), p.b2().clone())
}

/// The three displayed closed forms for `E[X²]`, `E[X³]`, `E[X⁴]`, as printed.
fn printed_moments(p: &PearsonParams) -> [Rational; 3] {
    let (m, b0, b1, b2) = coeffs(p);
    let k = (&b1 + &m) * &m + &b0;
    let m2 = &k / (one() - &b2);
    let m3 = (int(2) * &b1 + &m) * &k / ((one() - &b2) * (one() - int(2) * &b2))
        + int(2) * &b0 * &m / (one() - int(2) * &b2);
    let m4 = (int(3) * &b1 + &m) * (int(2) * &b1 + &m) * &k
        / ((one() - &b2) * (one() - int(2) * &b2) * (one() - int(3) * &b2))
        + (int(3) * &b1 + &m) * int(2) * &b0 * &m / ((one() - int(2) * &b2) * (one() - int(3) * &b2))
        + int(3) * &b0 * &k / (one() - int(3) * &b2);
    [m2, m3, m4]
}

/// `E[X⁴]` with the last term over `(1 - b2)(1 - 3b2)`.
fn corrected_m4(p: &PearsonParams) -> Rational {
    let (m, b0, b1, b2) = coeffs(p);
    let k = (&b1 + &m) * &m + &b0;
    let [_, _, printed] = printed_moments(p);
    printed - int(3) * &b0 * &k / (one() - int(3) * &b2) + int(3) * &b0 * &k / ((one() - &b2) * (one() - int(3) * &b2))
}

fn criterion_1(r: &mut Report, sweep: &[PearsonParams]) {
    let ((agree, corrected), t) = timed(|| {
        let mut agree = [0usize; 3];
        let mut corrected = 0;
        for p in sweep {
            let mo = p.moments(4).expect("four moments exist");
            let printed = printed_moments(p);
            for j in 0..3 {
                agree[j] += usize::from(mo[j + 2] == printed[j]);
            }
            corrected += usize::from(mo[4] == corrected_m4(p));
        }
        (agree, corrected)
    });
    let n = sweep.len();
    let pass = agree.iter().all(|&a| a == n) && t < Duration::from_secs(1);
    r.line(
        1,
        "moment closed forms",
        pass,
        &format!("m2 {}/{n}, m3 {}/{n}, m4 {}/{n} equal the printed displays", agree[0], agree[1], agree[2]),
        t,
    );
    note(&format!("m4 with the last term over (1-b2)(1-3b2): {corrected}/{n} equal"));
}

/// The ten tabulated coefficients, as printed.
fn printed_table(p: &PearsonParams) -> [Vec<Rational>; 2] {
    let (m, b0, b1, b2) = coeffs(p);
    let s = &b1 + &m;
    let u = int(2) * &b2 - one();
    let t = one() - int(2) * &b2;
    let cube = |x: &Rational| x * x * x;
    let a = &b0 + &m * &s / &u;
    let c = vec![
        &a * &a / (one() - &b2) + int(2) * &m * cube(&s) / (int(3) * cube(&u)),
        int(4) * &b0 * &s / &t + int(2) * &s * &s * (&b1 + int(2) * &m * (int(3) * &b2 - one())) / (int(3) * cube(&t)),
        -int(2) * &b0 - int(2) * &s * &s / &u,
        -int(2) * &b1 - int(4) * &m / int(3),
        rat(1, 3) - &b2,
    ];
    let e = &b0 * &u + &m * &s;
    let d = vec![
        &e * &e / (&t * &t * (one() - &b2) * (one() - &b2)),
        int(4) * &s * &e / (&t * &t * (&b2 - one())),
        int(2) * (&b0 * &t * &t + &s * (int(2) * &b1 * (&b2 - one()) + (int(4) * &b2 - int(3)) * &m))
            / ((one() - &b2) * &t * &t),
        int(4) * &s / &u,
        one(),
    ];
    [c, d]
}

fn criterion_2(r: &mut Report, sweep: &[PearsonParams]) {
    let ((hits, d2_flipped), t) = timed(|| {
        let mut hits = [[0usize; 5]; 2];
        let mut d2_flipped = 0;
        for p in sweep {
            let target = TargetSpec::new(p.clone()).expect("b2 < 1/3");
            let exp = uq_coefficients(&target).expect("expands");
            let [c, d] = printed_table(p);
            for j in 0..5 {
                hits[0][j] += usize::from(exp.c[j] == c[j]);
                hits[1][j] += usize::from(exp.d[j] == d[j]);
            }
            d2_flipped += usize::from(exp.d[2] == -d[2].clone());
        }
        (hits, d2_flipped)
    });
    let n = sweep.len();
    let bad: Vec<String> = ["c", "d"]
        .iter()
        .enumerate()
        .flat_map(|(i, name)| (0..5).filter(move |&j| hits[i][j] != n).map(move |j| format!("{name}{j} ({}/{n})", hits[i][j])))
        .collect();
    let pass = bad.is_empty() && t < Duration::from_secs(1);
    let detail = if bad.is_empty() {
        format!("all ten printed coefficients equal the expansion on {n} parameter sets")
    } else {
        format!("mismatched printed coefficients: {}", bad.join(", "))
    };
    r.line(2, "table of U and Q^2 coefficients", pass, &detail, t);
    note(&format!("d2 over (b2-1)(1-2b2)^2 instead of (1-b2)(1-2b2)^2: {d2_flipped}/{n} equal"));
}

fn criterion_3(r: &mut Report) {
    let (result, t) = timed(|| -> Vec<String> {
        let mut bad = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut check = |label: String, target: &TargetSpec, want: [Rational; 5]| {
            let k = uq_coefficients(target).expect("expands");
            if k.c != want {
                bad.push(format!("{label}: coefficients"));
            }
            for _ in 0..5 {
                let mo: Vec<Rational> = (0..4).map(|_| rat(rng.random_range(-20..21), rng.random_range(1..7))).collect();
                let surds: Vec<Surd> = mo.iter().cloned().map(Surd::from_rational).collect();
                let (u, _) = moment_combination(target, &surds).expect("four moments");
                let direct = want[0].clone() + (1..5).fold(int(0), |acc, j| acc + &want[j] * &mo[j - 1]);
                if u != Surd::from_rational(direct) {
                    bad.push(format!("{label}: moment combination"));
                }
            }
        };
        for s2 in [rat(1, 4), one(), int(3), rat(7, 2)] {
            let target = TargetSpec::new(PearsonParams::gaussian(int(0), s2.clone()).unwrap()).unwrap();
            let want = [&s2 * &s2, int(0), -int(2) * &s2, int(0), rat(1, 3)];
            check(format!("gaussian s2 = {s2}"), &target, want);
        }
        for tau in [int(5), int(9), rat(23, 2), int(40)] {
            let target = TargetSpec::new(PearsonParams::student_t(tau.clone()).unwrap()).unwrap();
            let want = [
                &tau * &tau / (&tau * &tau - int(3) * &tau + int(2)),
                int(0),
                -int(2) * &tau / (&tau - one()),
                int(0),
                (&tau - int(4)) / (int(3) * (&tau - one())),
            ];
            check(format!("student tau = {tau}"), &target, want);
        }
        for beta in [rat(1, 2), one(), int(3)] {
            let target = TargetSpec::new(PearsonParams::inverse_gamma(int(5), beta.clone()).unwrap()).unwrap();
            let want = [int(0), -&beta * &beta * &beta / int(24), &beta * &beta / int(4), -&beta / int(3), rat(1, 12)];
            check(format!("inverse gamma beta = {beta}"), &target, want);
        }
        bad
    });
    let detail = if result.is_empty() { "gaussian, student and inverse gamma examples exact".to_string() } else { result.join("; ") };
    r.line(3, "worked moment conditions", result.is_empty(), &detail, t);
}

fn criterion_4(r: &mut Report) {
    let ((cases, bad), t) = timed(|| {
        let mut cases = 0usize;
        let mut bad = Vec::new();
        let ns = 1..=10usize;
        let light = [
            PearsonParams::gaussian(int(0), int(1)),
            PearsonParams::gaussian(rat(-3, 2), rat(2, 7)),
            PearsonParams::gaussian(int(4), int(9)),
            PearsonParams::gamma(int(2), int(1)),
            PearsonParams::gamma(rat(1, 2), int(5)),
            PearsonParams::gamma(rat(13, 3), rat(1, 4)),
        ];
        for p in light.into_iter().map(|p| p.unwrap()) {
            let gen = Generator::new(p.clone());
            for n in 1..=20 {
                cases += 1;
                if chaos_grade(&gen, n).ok() != Some(int(2)) {
                    bad.push(format!("{p}, n = {n}"));
                }
            }
        }
        let shapes = [rat(1, 3), rat(1, 2), int(1), rat(3, 2), int(2), rat(7, 3), int(3), int(5), rat(17, 2), int(12)];
        for a in &shapes {
            for b in &shapes {
                let gen = Generator::new(PearsonParams::beta(a.clone(), b.clone()).unwrap());
                for n in ns.clone() {
                    cases += 1;
                    let nr = int(n as i64);
                    let want = int(2) * (one() + &nr / (&nr - one() + a + b));
                    let got = chaos_grade(&gen, n).ok();
                    if got.as_ref() != Some(&want) || got != Some(gen.lambda(2 * n) / gen.lambda(n)) {
                        bad.push(format!("beta({a}, {b}), n = {n}"));
                    }
                }
            }
        }
        for d in [3i64, 4, 5, 6, 7, 9, 12, 15, 20, 30, 50, 80, 120, 200, 500] {
            for num in [1i64, 2] {
                let b2 = rat(num, d);
                if &b2 * int(3) >= one() {
                    continue;
                }
                let p = PearsonParams::new(one(), int(0), int(1), int(0), b2.clone()).unwrap();
                let gen = Generator::new(p.clone());
                for n in ns.clone() {
                    cases += 1;
                    let threshold = b2 < rat(1, 4 * n as i64 - 1);
                    if is_chaotic(&p, n) != threshold {
                        bad.push(format!("b2 = {b2}, n = {n}: chaotic flag"));
                    }
                    match chaos_grade(&gen, n) {
                        Ok(eta) => {
                            if !threshold || eta <= rat(4, 3) || eta > int(2) - int(2) * &b2 || eta != gen.lambda(2 * n) / gen.lambda(n) {
                                bad.push(format!("b2 = {b2}, n = {n}: grade {eta}"));
                            }
                        }
                        Err(_) if threshold => bad.push(format!("b2 = {b2}, n = {n}: no grade")),
                        Err(_) => {}
                    }
                }
            }
        }
        (cases, bad)
    });
    let pass = bad.is_empty() && cases >= 1000 && t < Duration::from_secs(5);
    let detail = if bad.is_empty() { format!("{cases} cases exact") } else { format!("{cases} cases, failing: {}", bad.join("; ")) };
    r.line(4, "chaos grades", pass, &detail, t);
}

fn six_classes() -> Vec<PearsonParams> {
    vec![
        PearsonParams::gaussian(rat(1, 3), int(2)).unwrap(),
        PearsonParams::gamma(rat(5, 2), int(3)).unwrap().with_theta(rat(3, 2)).unwrap(),
        PearsonParams::beta(int(2), rat(7, 2)).unwrap(),
        PearsonParams::skew_t(int(4), rat(3, 2), int(1), int(2)).unwrap(),
        PearsonParams::inverse_gamma(int(6), int(2)).unwrap().with_theta(rat(1, 4)).unwrap(),
        PearsonParams::fisher_f(int(5), int(14)).unwrap(),
    ]
}

fn criterion_5(r: &mut Report) {
    let (bad, t) = timed(|| {
        six_classes()
            .iter()
            .filter_map(|p| match characterization_residual(p) {
                Ok(res) if res.is_zero() => None,
                Ok(res) => Some(format!("{p}: residual {res}")),
                Err(e) => Some(format!("{p}: {e}")),
            })
            .collect::<Vec<_>>()
    });
    let detail = if bad.is_empty() { "exact zero for all six classes".to_string() } else { bad.join("; ") };
    r.line(5, "carre du champ characterization", bad.is_empty(), &detail, t);
}

fn criterion_6(r: &mut Report) {
    let ((count, skipped, bad), t) = timed(|| {
        let (mut count, mut skipped, mut bad) = (0, 0, Vec::new());
        for p in six_classes() {
            let target = TargetSpec::new(p.clone()).unwrap();
            let gen = Generator::new(p.clone());
            for n in 1..=4 {
                if gen.eigenvalue(n).is_err() {
                    skipped += 1;
                    continue;
                }
                match eq36_residual_univariate(&gen, n, &target) {
                    Ok(res) if res.is_zero() => count += 1,
                    Ok(_) => bad.push(format!("{p}: degree {n} leaves a residual")),
                    Err(e) => bad.push(format!("{p}: degree {n}: {e}")),
                }
            }
        }
        (count, skipped, bad)
    });
    let detail = if bad.is_empty() {
        format!("{count} eigenfunctions exact zero, {skipped} degrees beyond the moment domain")
    } else {
        bad.join("; ")
    };
    r.line(6, "eigenfunction remainder identity", bad.is_empty(), &detail, t);
}

fn random_coordinate(rng: &mut ChaCha8Rng) -> Generator {
    let p = match rng.random_range(0..4) {
        0 => PearsonParams::gaussian(rat(rng.random_range(-2..3), 2), int(rng.random_range(1..4))),
        1 => PearsonParams::gamma(int(rng.random_range(1..5)), int(rng.random_range(1..4))),
        2 => PearsonParams::beta(int(rng.random_range(1..5)), int(rng.random_range(1..5))),
        _ => PearsonParams::student_t(int(rng.random_range(16..40))),
    };
    Generator::new(p.unwrap())
}

fn random_target(rng: &mut ChaCha8Rng) -> TargetSpec {
    let p = match rng.random_range(0..4) {
        0 => PearsonParams::gaussian(int(0), int(1)),
        1 => PearsonParams::gamma(int(rng.random_range(2..5)), int(1)),
        2 => PearsonParams::beta(int(rng.random_range(2..4)), int(rng.random_range(2..4))),
        _ => PearsonParams::student_t(int(rng.random_range(9..16))),
    };
    TargetSpec::new(p.unwrap()).unwrap()
}

/// Multi-indices of total degree 1..=3 on `dim` coordinates.
fn multi_indices(dim: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..dim {
        out = out.into_iter().flat_map(|a: Vec<u32>| (0..=3).map(move |d| [a.clone(), vec![d]].concat())).collect();
    }
    out.retain(|a| (1..=3).contains(&a.iter().sum::<u32>()));
    out
}

fn random_element(rng: &mut ChaCha8Rng) -> Option<ChaosElement> {
    let dim = rng.random_range(1..=4);
    let coords: Vec<Generator> = (0..dim).map(|_| random_coordinate(rng)).collect();
    let gen = TensorGenerator::new(coords).ok()?;
    let all = multi_indices(dim);
    let lead = all[rng.random_range(0..all.len())].clone();
    let lambda = gen.lambda_of(&lead);
    let same: Vec<Vec<u32>> = all.into_iter().filter(|a| *a != lead && gen.lambda_of(a) == lambda).collect();
    let mut terms = vec![(lead, rat(rng.random_range(1..5), rng.random_range(1..4)))];
    for a in same {
        if rng.random_bool(0.5) {
            terms.push((a, rat(rng.random_range(-4..5), rng.random_range(1..4))));
        }
    }
    tensor_eigenfunction(&gen, &terms).ok()
}

fn criterion_7_8(r: &mut Report) {
    let ((count, regimes, bad7, bad8, tries), t) = timed(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (mut count, mut regimes, mut bad7, mut bad8, mut tries) = (0, [0usize; 2], Vec::new(), Vec::new(), 0);
        while count < 100 {
            tries += 1;
            let Some(el) = random_element(&mut rng) else { continue };
            let target = random_target(&mut rng);
            let Ok(rep) = bound(&el, &target, BoundOptions { c_h: 1.0, exact_lhs: true }) else { continue };
            let Some(lhs) = rep.lhs_exact.clone() else { continue };
            count += 1;
            regimes[usize::from(rep.eta > rep.eta_tilde)] += 1;
            if lhs > rep.rhs_sq {
                bad7.push(format!("{} vs {target:?}: {lhs} > {}", el.label(), rep.rhs_sq));
            }
            let u = &rep.u_int;
            let zero = Surd::zero();
            if *u > zero && u * u > &rep.q2_int * &lhs {
                bad8.push(format!("{}: U = {u}", el.label()));
            }
        }
        (count, regimes, bad7, bad8, tries)
    });
    let both = regimes[0] > 0 && regimes[1] > 0;
    let regime_text = format!("{} with eta <= eta_tilde, {} above", regimes[0], regimes[1]);
    let d7 = if bad7.is_empty() { format!("{count} elements exact, {regime_text}") } else { bad7.join("; ") };
    r.line(7, "bound inequality", bad7.is_empty() && both, &d7, t);
    note(&format!("{tries} draws for {count} elements with sufficient moments"));
    let d8 = if bad8.is_empty() { format!("{count} elements exact") } else { bad8.join("; ") };
    r.line(8, "cauchy-schwarz on U", bad8.is_empty(), &d8, Duration::ZERO);
}

struct SumRow {
    k: usize,
    m4: f64,
    u: f64,
    kolmogorov: [f64; 3],
}

fn sum_rows(kernel: &str) -> Vec<SumRow> {
    let law = PearsonParams::gaussian(int(0), int(1)).unwrap().law().unwrap();
    let target = TargetSpec::new(PearsonParams::gaussian(int(0), int(1)).unwrap()).unwrap();
    [10usize, 100, 1000]
        .into_iter()
        .map(|k| {
            let el = read_chaos(&format!(
                r#"{{"base":{{"class":"gaussian","variance":1}},"homogeneous":{{"k":{k},"p":2,"kernel":"{kernel}"}},"normalize":true}}"#
            ))
            .unwrap();
            let m4 = el.moments(4).unwrap()[4].to_f64();
            let rep = bound(&el, &target, BoundOptions { c_h: 1.0, exact_lhs: false }).unwrap();
            let kolmogorov = [11u64, 12, 13].map(|seed| kolmogorov_distance(&chaos_sample(&el, 0.0, seed, 100_000).unwrap(), &law).unwrap());
            SumRow { k, m4, u: rep.u_int.to_f64(), kolmogorov }
        })
        .collect()
}

fn convergence_verdict(rows: &[SumRow]) -> (bool, String) {
    let m4_ok = rows.windows(2).all(|w| (w[1].m4 - 3.0).abs() < (w[0].m4 - 3.0).abs());
    let u_ok = rows.windows(2).all(|w| w[1].u.abs() < w[0].u.abs()) && rows.last().unwrap().u.abs() < 0.01;
    let violations: usize = rows.windows(2).map(|w| (0..3).filter(|&s| w[1].kolmogorov[s] >= w[0].kolmogorov[s]).count()).sum();
    let table: Vec<String> = rows
        .iter()
        .map(|r| format!("k={} m4={:.4} U={:.4} d_K={:.4}/{:.4}/{:.4}", r.k, r.m4, r.u, r.kolmogorov[0], r.kolmogorov[1], r.kolmogorov[2]))
        .collect();
    (m4_ok && u_ok && violations <= 1, format!("{}; {violations} seed-level violations", table.join(", ")))
}

fn criterion_9(r: &mut Report) {
    let (rows, t) = timed(|| sum_rows("complete"));
    let (pass, detail) = convergence_verdict(&rows);
    r.line(9, "fourth-moment convergence, equal off-diagonal coefficients", pass && t < Duration::from_secs(120), &detail, t);
    let (blocks, tb) = timed(|| sum_rows("blocks"));
    let (bpass, bdetail) = convergence_verdict(&blocks);
    note(&format!("disjoint-block kernel: {} {bdetail} [{:.2} s]", if bpass { "converges" } else { "does not converge" }, tb.as_secs_f64()));
}

fn stein_laws() -> Vec<(&'static str, PearsonParams)> {
    vec![
        ("gaussian", PearsonParams::gaussian(int(0), int(1)).unwrap()),
        ("gamma(2,1)", PearsonParams::gamma(int(2), int(1)).unwrap()),
        ("beta(2,3)", PearsonParams::beta(int(2), int(3)).unwrap()),
        ("student t(9)", PearsonParams::student_t(int(9)).unwrap()),
    ]
}

fn criterion_10(r: &mut Report) {
    let ((worst, slopes, errs), t) = timed(|| {
        let mut errs = Vec::new();
        let mut worst = 0.0f64;
        for p in six_classes() {
            let res = (|| -> pearchaos::Result<f64> {
                let law = p.law()?;
                let (a, b) = (law.quantile(0.01)?, law.quantile(0.99)?);
                let target = DensityTarget::from_pearson(&p)?;
                let th = to_f64(p.theta());
                let mut w = 0.0f64;
                for i in 0..100 {
                    let x = a + (b - a) * (i as f64 + 0.5) / 100.0;
                    let want = 2.0 * th * p.b_at(x);
                    w = w.max(((sigma2_from_density(&target, x)? - want) / want).abs());
                }
                Ok(w)
            })();
            match res {
                Ok(w) => worst = worst.max(w),
                Err(e) => errs.push(format!("{p}: {e}")),
            }
        }
        let ns = [1_000usize, 10_000, 100_000, 1_000_000];
        let mut slopes = Vec::new();
        for (name, p) in stein_laws() {
            let target = DensityTarget::from_pearson(&p).unwrap();
            let degree = admissible_degree(&target, 3);
            let means: Vec<f64> = ns
                .iter()
                .map(|&n| {
                    let seeds = 8u64;
                    (0..seeds)
                        .map(|s| stein_discrepancy(&p.sample(1000 + s, n).unwrap(), &target, degree).unwrap().discrepancy)
                        .sum::<f64>()
                        / seeds as f64
                })
                .collect();
            let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
            let ys: Vec<f64> = means.iter().map(|d| d.ln()).collect();
            slopes.push((name, least_squares_slope(&xs, &ys)));
        }
        (worst, slopes, errs)
    });
    let slopes_ok = slopes.iter().all(|(_, s)| (s + 0.5).abs() <= 0.15);
    let pass = errs.is_empty() && worst <= 1e-6 && slopes_ok && t < Duration::from_secs(120);
    let slope_text: Vec<String> = slopes.iter().map(|(p, s)| format!("{p}: {s:.3}")).collect();
    let mut detail = format!("sigma2 max rel. err {worst:.2e}; log-log slopes {}", slope_text.join(", "));
    if !errs.is_empty() {
        detail.push_str(&format!("; errors: {}", errs.join("; ")));
    }
    r.line(10, "stein consistency", pass, &detail, t);
}

fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn criterion_11(r: &mut Report) {
    let (lines, t) = timed(|| {
        let opts = SdeOptions { dt: 2e-3, steps: 4_000_000, thin: 5, chains: 1, burn_in: None };
        stein_laws()
            .into_iter()
            .enumerate()
            .map(|(i, (name, p))| {
                let batch = euler_maruyama(&p, to_f64(p.m()), &opts, 40 + i as u64).unwrap();
                let exact = p.moments(4).unwrap();
                let worst = (1..=4)
                    .map(|j| {
                        let v: Vec<f64> = batch.values.iter().map(|x| x.powi(j)).collect();
                        let (m, se) = pearchaos::batch::batch_means_se(&v, 100);
                        (m - to_f64(&exact[j as usize])).abs() / se
                    })
                    .fold(0.0f64, f64::max);
                (name, worst)
            })
            .collect::<Vec<_>>()
    });
    let pass = lines.iter().all(|(_, z)| *z <= 3.0) && t < Duration::from_secs(120);
    let detail: Vec<String> = lines.iter().map(|(p, z)| format!("{p}: max {z:.2} s.e.")).collect();
    r.line(11, "sde stationarity", pass, &format!("moments 1..4, {}", detail.join(", ")), t);
}

fn criterion_12(r: &mut Report) {
    let (bad, t) = timed(|| {
        let g = Generator::new(PearsonParams::gaussian(int(0), int(1)).unwrap());
        let mut bad = Vec::new();
        for p in 1..=5usize {
            let e = square_expansion(&g, &orthopoly(&g, p).unwrap()).unwrap();
            for j in 0..=p {
                let want = factorial(j) * binomial(p, j) * binomial(p, j);
                if e.get(&(2 * (p - j))) != Some(&want) {
                    bad.push(format!("p = {p}, j = {j}"));
                }
            }
            if e.len() != p + 1 {
                bad.push(format!("p = {p}: extra terms"));
            }
        }
        bad
    });
    let pass = bad.is_empty() && t < Duration::from_secs(1);
    let detail = if bad.is_empty() { "j! C(p,j)^2 at degree 2(p-j), j = 0..=p, p <= 5".to_string() } else { bad.join("; ") };
    r.line(12, "hermite product formula", pass, &detail, t);
    note("the j = 0 term (H_2p with coefficient 1) is present");
}

fn main() -> ExitCode {
    let mut r = Report { failed: Vec::new() };
    let sweep = random_params(&mut ChaCha8Rng::seed_from_u64(1), 50);
    criterion_1(&mut r, &sweep);
    criterion_2(&mut r, &sweep);
    criterion_3(&mut r);
    criterion_4(&mut r);
    criterion_5(&mut r);
    criterion_6(&mut r);
    criterion_7_8(&mut r);
    criterion_9(&mut r);
    criterion_10(&mut r);
    criterion_11(&mut r);
    criterion_12(&mut r);
    println!("acceptance: {} of 12 criteria pass", 12 - r.failed.len());
    if r.failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failing: {:?}", r.failed);
        ExitCode::FAILURE
    }
}
