//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::time::{Duration, Instant};

use gufactor::factor::{dualizing_conjugator, factor_with, FactorOptions};
use gufactor::forms::DEFAULT_BUDGET;
use gufactor::verify::oracle_factorizations;
use gufactor::wire::{to_json, CertificateDoc};
use gufactor::{
    factor, factor_det_refined, oracle_involution_set, survey, symmetric_conjugator,
    symmetric_factor, symmetric_unitary_conjugator, verify_certificate, Elem, Ext, GroupElement,
    HermitianSpace, Kind, Matrix, SemilinearMap, SurveyMode, Tower,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn tower(p: u64, k: usize, ext: Ext) -> Tower {
    Tower::new(p, k, ext, None).unwrap()
}

fn space(f: &Tower, n: usize, kind: Kind) -> HermitianSpace {
    HermitianSpace::standard(f, n, kind).unwrap()
}

fn enumerate(s: &HermitianSpace, beta: Elem) -> Result<Vec<GroupElement>, String> {
    s.group_enumerate(beta, DEFAULT_BUDGET)
        .map_err(|e| e.to_string())
}

/// Factors and verifies every element; returns the number certified.
fn certify_all(
    s: &HermitianSpace,
    elements: &[GroupElement],
    refined: bool,
) -> Result<usize, String> {
    let f = s.tower();
    for (i, g) in elements.iter().enumerate() {
        let cert = if refined {
            factor_det_refined(s, g)
        } else {
            factor(s, g)
        }
        .map_err(|e| {
            format!(
                "element {i} {:?}: {e}",
                g.g.to_rows()
                    .iter()
                    .map(|r| r.iter().map(|&x| f.index(x)).collect::<Vec<_>>())
                    .collect::<Vec<_>>()
            )
        })?;
        let report = verify_certificate(s, g, &cert, refined);
        if !report.passed {
            let names: Vec<_> = report.failed().map(|c| c.name.clone()).collect();
            return Err(format!("element {i}: failed {names:?}"));
        }
    }
    Ok(elements.len())
}

fn expect_count(what: &str, got: usize, want: usize) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!(
            "{what}: enumerated {got} elements, order formula gives {want}"
        ))
    }
}

fn sp_order(q: usize) -> usize {
    q * (q * q - 1)
}

fn criterion_1() -> Outcome {
    let mut parts = Vec::new();
    for q in [3u64, 5] {
        let f = tower(q, 1, Ext::Trivial);
        let s = space(&f, 2, Kind::Symplectic);
        let els = enumerate(&s, f.one())?;
        expect_count("Sp2", els.len(), sp_order(q as usize))?;
        let ok = certify_all(&s, &els, false)?;
        parts.push(format!("Sp2(F{q}) {ok}/{}", els.len()));
    }
    Ok(parts.join(", "))
}

fn criterion_2() -> Outcome {
    let f = tower(3, 1, Ext::Trivial);
    let s = space(&f, 2, Kind::Symplectic);
    let mut total = 0;
    for b in [1, 2] {
        let beta = f.from_int(b);
        let els = enumerate(&s, beta)?;
        expect_count("GSp2 coset", els.len(), 24)?;
        for g in &els {
            let cert = factor(&s, g).map_err(|e| e.to_string())?;
            if cert.h2.square(&f).mat != Matrix::scalar(2, beta)
                || !verify_certificate(&s, g, &cert, false).passed
            {
                return Err(format!("beta = {b}: certificate fails"));
            }
        }
        total += els.len();
    }
    Ok(format!("GSp2(F3) {total}/48 with h2^2 = beta"))
}

fn criterion_3() -> Outcome {
    let f = tower(3, 1, Ext::Quadratic);
    let s = space(&f, 2, Kind::Hermitian);
    let els = enumerate(&s, f.one())?;
    expect_count("U2(F9)", els.len(), 3 * 4 * 8)?;
    let ok = certify_all(&s, &els, false)?;
    for (i, g) in els.iter().enumerate() {
        let c = symmetric_unitary_conjugator(&s, g).map_err(|e| format!("element {i}: {e}"))?;
        let unitary = c.transpose().mul(&c.tau(&f), &f) == Matrix::identity(2, &f);
        let conj = c.mul(&g.g, &f).mul(&c.inverse(&f).unwrap(), &f) == g.g.transpose();
        if !c.is_symmetric() || !unitary || !conj {
            return Err(format!("element {i}: symmetric unitary conjugator fails"));
        }
    }
    Ok(format!(
        "U2(F9) {ok}/96, symmetric unitary conjugators 96/96"
    ))
}

fn criterion_4() -> Outcome {
    let f = tower(2, 1, Ext::Trivial);
    let s2 = space(&f, 2, Kind::Symplectic);
    let els = enumerate(&s2, f.one())?;
    expect_count("Sp2(F2)", els.len(), sp_order(2))?;
    let a = certify_all(&s2, &els, false)?;
    let s4 = space(&f, 4, Kind::Symplectic);
    let sample = s4
        .group_sample(f.one(), 500, 4)
        .map_err(|e| e.to_string())?;
    let b = certify_all(&s4, &sample, false)?;
    Ok(format!("Sp2(F2) {a}/6, Sp4(F2) sample {b}/500"))
}

fn criterion_5() -> Outcome {
    let f3 = tower(3, 1, Ext::Trivial);
    let f9 = tower(3, 1, Ext::Quadratic);
    let f5 = tower(5, 1, Ext::Trivial);
    let beta5 = f5.from_int(2);
    if f5.is_square(beta5) {
        return Err("2 is a square mod 5".into());
    }
    let cases = [
        ("Sp4(F3)", space(&f3, 4, Kind::Symplectic), f3.one()),
        ("U3(F9)", space(&f9, 3, Kind::Hermitian), f9.one()),
        ("GSp4(F5) beta=2", space(&f5, 4, Kind::Symplectic), beta5),
    ];
    let mut parts = Vec::new();
    for (name, s, beta) in cases {
        let sample = s.group_sample(beta, 1000, 5).map_err(|e| e.to_string())?;
        let ok = certify_all(&s, &sample, false)?;
        parts.push(format!("{name} {ok}/1000"));
    }
    Ok(parts.join(", "))
}

fn criterion_6() -> Outcome {
    let mut parts = Vec::new();
    let mut failures = Vec::new();
    for q in [3u64, 5] {
        let f = tower(q, 1, Ext::Trivial);
        for kind in [Kind::OrthogonalPlus, Kind::OrthogonalMinus] {
            let s = space(&f, 2, kind);
            let (mut good, mut total) = (0, 0);
            for b in 1..q as i64 {
                for g in enumerate(&s, f.from_int(b))? {
                    total += 1;
                    match factor_det_refined(&s, &g) {
                        Ok(c)
                            if verify_certificate(&s, &g, &c, true).passed
                                && c.h1.mat.det(&f).unwrap() == f.from_int(-1) =>
                        {
                            good += 1
                        }
                        _ => {}
                    }
                }
            }
            parts.push(format!("{}(2,F{q}) {good}/{total}", kind.name()));
            if good != total {
                failures.push(format!("{}(2,F{q})", kind.name()));
            }
        }
    }
    let f = tower(3, 1, Ext::Trivial);
    for kind in [Kind::OrthogonalPlus, Kind::OrthogonalMinus] {
        let s = space(&f, 4, kind);
        let mut sample = s.group_sample(f.one(), 250, 6).map_err(|e| e.to_string())?;
        sample.extend(
            s.group_sample(f.from_int(2), 250, 6)
                .map_err(|e| e.to_string())?,
        );
        let mut good = 0;
        for g in &sample {
            match factor_det_refined(&s, g) {
                Ok(c)
                    if verify_certificate(&s, g, &c, true).passed
                        && c.h1.mat.det(&f).unwrap() == f.one() =>
                {
                    good += 1
                }
                _ => {}
            }
        }
        parts.push(format!("{}(4,F3) {good}/500", kind.name()));
        if good != 500 {
            failures.push(format!("{}(4,F3)", kind.name()));
        }
    }
    if failures.is_empty() {
        Ok(parts.join(", "))
    } else {
        Err(format!("{}; failing groups {failures:?}", parts.join(", ")))
    }
}

fn criterion_7() -> Outcome {
    let f = tower(3, 1, Ext::Trivial);
    let s = space(&f, 2, Kind::Symplectic);
    let h = SemilinearMap::linear(Matrix::from_ints(&f, &[&[1, 0], &[0, -1]]));
    let mut count = 0;
    for b in [1, 2] {
        for g in enumerate(&s, f.from_int(b))? {
            let u = dualizing_conjugator(&s, &g, &h).map_err(|e| e.to_string())?;
            // independent recomputation of iota(g) = mu(g)^-1 h g h^-1
            let hm = &h.mat;
            let iota = hm
                .mul(&g.g, &f)
                .mul(&hm.inverse(&f).unwrap(), &f)
                .scale(f.inv(g.beta).unwrap(), &f);
            let lhs = u.mul(&iota, &f).mul(&u.inverse(&f).unwrap(), &f);
            if s.multiplier(&u) != Some(f.one()) || lhs != g.g.inverse(&f).unwrap() {
                return Err(format!("beta = {b}: u does not conjugate iota(g) to g^-1"));
            }
            count += 1;
        }
    }
    Ok(format!("GSp2(F3) {count}/48"))
}

fn random_invertible(f: &Tower, n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    loop {
        let rows: Vec<Vec<Elem>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| f.from_index(rng.gen_range(0..f.size())))
                    .collect()
            })
            .collect();
        let m = Matrix::from_rows(rows).unwrap();
        if !m.det(f).unwrap().is_zero() {
            return m;
        }
    }
}

fn criterion_8() -> Outcome {
    let fields = [tower(5, 1, Ext::Trivial), tower(2, 2, Ext::Trivial)];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..500 {
        let f = &fields[i % 2];
        let n = 1 + i % 6;
        let a = random_invertible(f, n, &mut rng);
        let d = symmetric_conjugator(&a, f).map_err(|e| format!("matrix {i}: {e}"))?;
        if !d.is_symmetric() || d.inverse(f).unwrap().mul(&a, f).mul(&d, f) != a.transpose() {
            return Err(format!("matrix {i}: d is not a symmetric conjugator"));
        }
        let (d1, d2) = symmetric_factor(&a, f).map_err(|e| format!("matrix {i}: {e}"))?;
        if !d1.is_symmetric() || !d2.is_symmetric() || d1.mul(&d2, f) != a {
            return Err(format!("matrix {i}: symmetric factorization fails"));
        }
    }
    Ok("500/500 over F5 and F4".into())
}

fn criterion_9() -> Outcome {
    let mut cases = Vec::new();
    for (p, k) in [(2u64, 1usize), (3, 1), (2, 2), (5, 1)] {
        let f = tower(p, k, Ext::Trivial);
        cases.push((format!("sp F{}", f.q()), space(&f, 2, Kind::Symplectic)));
        if p != 2 {
            cases.push((format!("go-plus F{p}"), space(&f, 2, Kind::OrthogonalPlus)));
            cases.push((
                format!("go-minus F{p}"),
                space(&f, 2, Kind::OrthogonalMinus),
            ));
        }
        let e = tower(p, k, Ext::Quadratic);
        cases.push((format!("u F{}", e.size()), space(&e, 2, Kind::Hermitian)));
    }
    let mut checked = 0;
    for (name, s) in &cases {
        let f = s.tower();
        let involutions = oracle_involution_set(s, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        for beta in f.elements(gufactor::Level::Base).filter(|b| !b.is_zero()) {
            for g in enumerate(s, beta)? {
                let cert = factor(s, &g).map_err(|e| format!("{name}: {e}"))?;
                if !involutions.contains(&cert.h1) {
                    return Err(format!(
                        "{name}: constructed h1 is not an oracle involution"
                    ));
                }
                if oracle_factorizations(s, &involutions, &g).next().is_none() {
                    return Err(format!("{name}: no oracle involution factors an element"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{} spaces, {checked} elements", cases.len()))
}

/// Certificates and reports for a fixed workload, serialized.
fn determinism_run() -> Result<String, String> {
    let mut out = String::new();
    let f = tower(3, 1, Ext::Trivial);
    let s = space(&f, 2, Kind::Symplectic);
    for g in enumerate(&s, f.one())? {
        let cert = factor_with(&s, &g, &FactorOptions { seed: 10 }).map_err(|e| e.to_string())?;
        out += &to_json(&CertificateDoc::from_certificate(&f, &cert));
        out += &to_json(&verify_certificate(&s, &g, &cert, false));
    }
    let s4 = space(&f, 4, Kind::OrthogonalMinus);
    for g in s4
        .group_sample(f.from_int(2), 50, 10)
        .map_err(|e| e.to_string())?
    {
        let cert = factor_det_refined(&s4, &g).map_err(|e| e.to_string())?;
        out += &to_json(&CertificateDoc::from_certificate(&f, &cert));
    }
    let f9 = tower(3, 1, Ext::Quadratic);
    let summary = survey(
        &space(&f9, 3, Kind::Hermitian),
        f9.one(),
        SurveyMode::Sample {
            count: 200,
            seed: 10,
        },
        false,
    )
    .map_err(|e| e.to_string())?;
    out += &to_json(&summary);
    Ok(out)
}

fn criterion_10() -> Outcome {
    let a = determinism_run()?;
    let b = determinism_run()?;
    if a == b {
        Ok(format!("{} bytes identical across runs", a.len()))
    } else {
        Err("outputs differ between runs".into())
    }
}

type Criterion = (&'static str, fn() -> Outcome, u64);

fn main() {
    let criteria: [Criterion; 10] = [
        ("symplectic groups, exhaustive", criterion_1, 5),
        ("symplectic similitudes, exhaustive", criterion_2, 5),
        ("unitary group and symmetric conjugators", criterion_3, 30),
        ("characteristic 2", criterion_4, 30),
        ("seeded samples at scale", criterion_5, 60),
        ("orthogonal det(h1) = (-1)^m", criterion_6, 60),
        ("dualizing conjugator", criterion_7, 60),
        ("symmetric conjugator subroutine", criterion_8, 10),
        ("oracle cross-check", criterion_9, 600),
        ("determinism", criterion_10, 600),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(*limit);
        let (status, detail) = match (&outcome, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; exceeded {limit} s")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {:>2} {status} {name}: {detail} ({:.2} s)",
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
