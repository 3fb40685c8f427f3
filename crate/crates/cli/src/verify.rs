//! Deterministic verification suites over fixed parameter lattices.

use pearchaos::fourmoments::{characterization_residual, eq36_residual_univariate, table_coefficients, uq_coefficients, TargetSpec};
use pearchaos::generator::Generator;
use pearchaos::rational::{int, rat, to_f64};
use pearchaos::spectral::{chaos_grade, is_chaotic};
use pearchaos::stein::{sigma2_from_density, DensityTarget};
use pearchaos::{PearsonParams, Poly};

pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &str, pass: bool, detail: String) -> Check {
    Check { name: name.to_string(), pass, detail }
}

fn listed(head: String, bad: &[String]) -> String {
    if bad.is_empty() {
        head
    } else {
        format!("{head}; failing: {}", bad.join("; "))
    }
}

/// One member of each class, with a few non-unit θ.
fn zoo() -> Vec<PearsonParams> {
    let p = |r: pearchaos::Result<PearsonParams>| r.expect("lattice parameters are valid");
    vec![
        p(PearsonParams::gaussian(rat(1, 3), int(2))),
        p(p(PearsonParams::gamma(rat(5, 2), int(3))).with_theta(rat(3, 2))),
        p(PearsonParams::beta(int(2), rat(7, 2))),
        p(p(PearsonParams::student_t(int(9))).with_theta(rat(1, 4))),
        p(PearsonParams::skew_t(int(4), rat(3, 2), int(1), int(2))),
        p(PearsonParams::inverse_gamma(int(6), int(2))),
        p(p(PearsonParams::fisher_f(int(5), int(12))).with_theta(int(2))),
    ]
}

fn test_polys() -> Vec<Poly> {
    [&[1][..], &[0, 1], &[1, -2, 1], &[-1, 0, 3], &[2, 1, 0, -1], &[0, 0, 0, 0, 1]]
        .iter()
        .map(|c| Poly::from_ints(c))
        .collect()
}

pub fn identities() -> Vec<Check> {
    let mut out = Vec::new();
    let polys = test_polys();
    let (mut ibp, mut ibp_skipped, mut ibp_bad) = (0, 0, Vec::new());
    let (mut diff, mut diff_bad) = (0, Vec::new());
    let (mut two, mut two_bad) = (0, Vec::new());
    let phis = [Poly::from_ints(&[0, 0, 1]), Poly::from_ints(&[1, 1, 0, 1])];
    for p in zoo() {
        let gen = Generator::new(p.clone());
        for f in &polys {
            for g in &polys {
                let lhs = gen.integrate(&(g * &gen.apply_l(f))).and_then(|a| Ok(a + gen.integrate(&gen.gamma(f, g))?));
                match lhs {
                    Ok(v) if v == int(0) => ibp += 1,
                    Ok(v) => ibp_bad.push(format!("{p}: f = {f}, g = {g}, residual {v}")),
                    Err(_) => ibp_skipped += 1,
                }
                for phi in &phis {
                    let left = gen.gamma(&phi.compose(f), g);
                    let right = &phi.derivative().compose(f) * &gen.gamma(f, g);
                    if left == right {
                        diff += 1;
                    } else {
                        diff_bad.push(format!("{p}: phi = {phi}, f = {f}, g = {g}"));
                    }
                }
                if gen.gamma(f, g) == gen.gamma_by_definition(f, g) {
                    two += 1;
                } else {
                    two_bad.push(format!("{p}: f = {f}, g = {g}"));
                }
            }
        }
    }
    out.push(check(
        "integration by parts",
        ibp_bad.is_empty(),
        listed(format!("{ibp} exact zeros, {ibp_skipped} pairs beyond the moment domain"), &ibp_bad),
    ));
    out.push(check("diffusion property", diff_bad.is_empty(), listed(format!("{diff} cases"), &diff_bad)));
    out.push(check("carre du champ two ways", two_bad.is_empty(), listed(format!("{two} cases"), &two_bad)));

    let (mut eq36, mut eq36_bad, mut chars, mut char_bad) = (0, Vec::new(), 0, Vec::new());
    for p in zoo() {
        let target = match TargetSpec::new(p.clone()) {
            Ok(t) => t,
            Err(_) => continue,
        };
        let gen = Generator::new(p.clone());
        for n in 1..=4 {
            if gen.eigenvalue(n).is_err() {
                continue;
            }
            match eq36_residual_univariate(&gen, n, &target) {
                Ok(res) if res.is_zero() => eq36 += 1,
                Ok(_) => eq36_bad.push(format!("{p}: degree {n} residual is nonzero")),
                Err(e) => eq36_bad.push(format!("{p}: degree {n}: {e}")),
            }
        }
        match characterization_residual(&p) {
            Ok(r) if r.is_zero() => chars += 1,
            Ok(r) => char_bad.push(format!("{p}: residual {r}")),
            Err(e) => char_bad.push(format!("{p}: {e}")),
        }
    }
    out.push(check("eigenfunction remainder identity", eq36_bad.is_empty(), listed(format!("{eq36} eigenfunctions"), &eq36_bad)));
    out.push(check("carre du champ characterization", char_bad.is_empty(), listed(format!("{chars} classes"), &char_bad)));
    out
}

fn lattice_targets() -> Vec<TargetSpec> {
    let ms = [int(-2), int(0), rat(1, 3), rat(5, 2)];
    let b0s = [int(0), int(1), rat(7, 4)];
    let b1s = [int(-1), int(0), rat(2, 3)];
    let b2s = [rat(-1, 2), rat(-1, 7), int(0), rat(1, 5), rat(3, 10)];
    let mut out = Vec::new();
    for m in &ms {
        for b0 in &b0s {
            for b1 in &b1s {
                for b2 in &b2s {
                    if let Ok(t) = PearsonParams::new(int(1), m.clone(), b0.clone(), b1.clone(), b2.clone()).and_then(TargetSpec::new) {
                        out.push(t);
                    }
                }
            }
        }
    }
    out
}

pub fn table1() -> Vec<Check> {
    let targets = lattice_targets();
    let pairs: Vec<_> = targets
        .iter()
        .map(|t| (table_coefficients(t), uq_coefficients(t).expect("b2 < 1/3 targets expand")))
        .collect();
    let mut out = Vec::new();
    for (name, pick) in [("c", 0usize), ("d", 1)] {
        for j in 0..=4 {
            let bad = pairs
                .iter()
                .filter(|(tab, exp)| {
                    let (a, b) = if pick == 0 { (&tab.c, &exp.c) } else { (&tab.d, &exp.d) };
                    a[j] != b[j]
                })
                .count();
            out.push(check(&format!("{name}_{j}"), bad == 0, format!("{} parameter sets, {bad} mismatches", pairs.len())));
        }
    }
    out
}

pub fn grades() -> Vec<Check> {
    let mut out = Vec::new();
    let ns = 1..=10usize;
    let mut bad = Vec::new();
    let mut count = 0;
    let light = [
        PearsonParams::gaussian(int(0), int(1)),
        PearsonParams::gaussian(int(3), rat(1, 5)),
        PearsonParams::gamma(int(2), int(1)),
        PearsonParams::gamma(rat(1, 2), int(7)),
    ];
    for p in light.into_iter().flatten() {
        let gen = Generator::new(p.clone());
        for n in ns.clone() {
            count += 1;
            if chaos_grade(&gen, n).ok() != Some(int(2)) {
                bad.push(format!("{p}, n = {n}"));
            }
        }
    }
    out.push(check("gaussian and gamma grade 2", bad.is_empty(), listed(format!("{count} cases"), &bad)));

    let (mut count, mut bad) = (0, Vec::new());
    let shapes = [rat(1, 2), int(1), int(2), rat(7, 3), int(5)];
    for a in &shapes {
        for b in &shapes {
            let gen = Generator::new(PearsonParams::beta(a.clone(), b.clone()).expect("positive shapes"));
            for n in ns.clone() {
                count += 1;
                let nr = int(n as i64);
                let want = int(2) * (int(1) + &nr / (&nr - int(1) + a + b));
                if chaos_grade(&gen, n).ok() != Some(want) {
                    bad.push(format!("beta({a}, {b}), n = {n}"));
                }
            }
        }
    }
    out.push(check("beta grade formula", bad.is_empty(), listed(format!("{count} cases"), &bad)));

    let (mut count, mut bad, mut ratio_bad, mut thr_bad) = (0, Vec::new(), Vec::new(), Vec::new());
    for d in [3, 5, 7, 12, 20, 50, 200] {
        let b2 = rat(1, d);
        let p = PearsonParams::new(int(1), int(0), int(1), int(0), b2.clone()).expect("student-type");
        let gen = Generator::new(p.clone());
        for n in ns.clone() {
            let admitted = gen.eigenvalue(2 * n).is_ok();
            if is_chaotic(&p, n) != admitted {
                thr_bad.push(format!("b2 = {b2}, n = {n}"));
            }
            if let Ok(eta) = chaos_grade(&gen, n) {
                count += 1;
                if !(eta > rat(4, 3) && eta <= int(2) - int(2) * &b2) {
                    bad.push(format!("b2 = {b2}, n = {n}: {eta}"));
                }
                if eta != gen.lambda(2 * n) / gen.lambda(n) {
                    ratio_bad.push(format!("b2 = {b2}, n = {n}"));
                }
            }
        }
    }
    out.push(check("heavy-tail grade interval", bad.is_empty(), listed(format!("{count} cases"), &bad)));
    out.push(check("grade is the eigenvalue ratio", ratio_bad.is_empty(), listed(format!("{count} cases"), &ratio_bad)));
    out.push(check("chaotic iff degree 2n is admitted", thr_bad.is_empty(), listed("70 cases".to_string(), &thr_bad)));
    out
}

pub fn stein() -> Vec<Check> {
    let mut out = Vec::new();
    for p in zoo() {
        let name = format!("sigma2 = 2 theta b for {p}");
        let result = (|| -> pearchaos::Result<f64> {
            let law = p.law()?;
            let (a, b) = (law.quantile(0.01)?, law.quantile(0.99)?);
            let m = to_f64(p.m());
            let l2 = law.clone();
            let t = DensityTarget::new(move |x| l2.density(x), p.support(), to_f64(p.theta()), m, p.b_at(m).sqrt())?;
            let mut worst = 0.0f64;
            for i in 0..100 {
                let x = a + (b - a) * (i as f64 + 0.5) / 100.0;
                let want = 2.0 * to_f64(p.theta()) * p.b_at(x);
                worst = worst.max(((sigma2_from_density(&t, x)? - want) / want).abs());
            }
            Ok(worst)
        })();
        out.push(match result {
            Ok(w) => check(&name, w <= 1e-6, format!("max relative error {w:.2e} over 100 points")),
            Err(e) => check(&name, false, e.to_string()),
        });
    }
    out
}
