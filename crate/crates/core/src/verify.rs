//! Certificate checking, brute-force oracles and whole-group surveys.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::factor::{
    factor_det_refined_with, factor_with, FactorOptions, FactorizationCertificate,
};
use crate::field::{Elem, Tower};
use crate::forms::{GroupElement, HermitianSpace};
use crate::linalg::{Matrix, SemilinearMap};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl VerifyReport {
    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl PartialEq for VerifyReport {
    fn eq(&self, other: &Self) -> bool {
        self.passed == other.passed && self.checks == other.checks
    }
}

fn show(f: &Tower, x: Elem) -> String {
    format!("{:?}", f.encode(x, crate::field::Level::Top))
}

fn first_difference(a: &Matrix, b: &Matrix) -> Option<(usize, usize)> {
    (0..a.rows())
        .flat_map(|i| (0..a.cols()).map(move |j| (i, j)))
        .find(|&(i, j)| a.get(i, j) != b.get(i, j))
}

/// Ratio check `<h e_i, h e_j> = ratio <e_j, e_i>` with a witness basis pair.
fn ratio_check(space: &HermitianSpace, h: &SemilinearMap, ratio: Elem, name: &str) -> Check {
    let f = space.tower();
    let n = space.n();
    let witness = if h.dim() != n || h.mat.rows() != n {
        Some(format!(
            "dimension {} against space of dimension {n}",
            h.mat.rows()
        ))
    } else if h.twist != space.twist() {
        Some("wrong twist for this tower".to_string())
    } else {
        let lhs = h
            .mat
            .transpose()
            .mul(space.gram(), f)
            .mul(&h.twist.apply_matrix(&h.mat, f), f);
        let rhs = space.gram().transpose().scale(ratio, f);
        first_difference(&lhs, &rhs).map(|(i, j)| {
            format!(
                "basis pair ({i}, {j}): <h e_{i}, h e_{j}> = {} but expected {}",
                show(f, lhs.get(i, j)),
                show(f, rhs.get(i, j))
            )
        })
    };
    Check {
        name: name.to_string(),
        passed: witness.is_none(),
        witness,
    }
}

fn square_check(space: &HermitianSpace, h: &SemilinearMap, value: Elem, name: &str) -> Check {
    let f = space.tower();
    let n = space.n();
    let witness = if h.mat.rows() != n || h.mat.cols() != n {
        Some("dimension mismatch".to_string())
    } else {
        let sq = h.square(f).mat;
        first_difference(&sq, &Matrix::scalar(n, value)).map(|(i, j)| {
            format!(
                "entry ({i}, {j}) of the square is {}",
                show(f, sq.get(i, j))
            )
        })
    };
    Check {
        name: name.to_string(),
        passed: witness.is_none(),
        witness,
    }
}

pub fn verify_certificate(
    space: &HermitianSpace,
    g: &GroupElement,
    cert: &FactorizationCertificate,
    refined: bool,
) -> VerifyReport {
    let start = Instant::now();
    let f = space.tower();
    let n = space.n();
    let mut checks = Vec::new();
    if g.g.rows() != n || g.g.cols() != n {
        checks.push(Check {
            name: "shapes".into(),
            passed: false,
            witness: Some(format!(
                "element is {}x{} on a space of dimension {n}",
                g.g.rows(),
                g.g.cols()
            )),
        });
        return VerifyReport {
            passed: false,
            checks,
            elapsed: start.elapsed(),
        };
    }
    let mu = space.multiplier(&g.g);
    let beta_ok = mu == Some(cert.beta) && g.beta == cert.beta;
    checks.push(ratio_check(space, &cert.h1, f.one(), "h1 anti-unitary"));
    checks.push(square_check(space, &cert.h1, f.one(), "h1 involution"));
    let mut c3 = ratio_check(space, &cert.h2, cert.beta, "h2 ratio beta");
    if !beta_ok {
        c3.passed = false;
        c3.witness = Some(match mu {
            Some(m) => format!(
                "certificate beta {} but mu(g) = {}",
                show(f, cert.beta),
                show(f, m)
            ),
            None => "g is not a similitude".to_string(),
        });
    }
    checks.push(c3);
    checks.push(square_check(
        space,
        &cert.h2,
        cert.beta,
        "h2 squares to beta",
    ));
    let product = if cert.h1.dim() == n && cert.h2.dim() == n {
        let prod = cert.h1.compose(&cert.h2, f);
        if !prod.is_linear() {
            Some("h1 h2 is not linear".to_string())
        } else {
            first_difference(&prod.mat, &g.g).map(|(i, j)| {
                format!(
                    "entry ({i}, {j}): h1 h2 has {} but g has {}",
                    show(f, prod.mat.get(i, j)),
                    show(f, g.g.get(i, j))
                )
            })
        }
    } else {
        Some("dimension mismatch".to_string())
    };
    checks.push(Check {
        name: "h1 h2 = g".into(),
        passed: product.is_none(),
        witness: product,
    });
    if refined {
        let m = n / 2;
        let target = if m.is_multiple_of(2) {
            f.one()
        } else {
            f.from_int(-1)
        };
        let witness = match cert.h1.mat.det(f) {
            _ if f.is_quadratic() || n % 2 == 1 => {
                Some("refined mode needs an even-dimensional space over F".to_string())
            }
            Ok(d) if d == target => {
                let minus = n - cert.h1.mat.add(&Matrix::identity(n, f), f).rank(f);
                (minus % 2 != m % 2).then(|| format!("(-1)-eigenspace has dimension {minus}"))
            }
            Ok(d) => Some(format!("det(h1) = {}", show(f, d))),
            Err(e) => Some(e.to_string()),
        };
        checks.push(Check {
            name: "det(h1) = (-1)^m".into(),
            passed: witness.is_none(),
            witness,
        });
    }
    VerifyReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
        elapsed: start.elapsed(),
    }
}

/// Every anti-unitary involution of `space`, by exhaustive search.
pub fn oracle_involution_set(space: &HermitianSpace, budget: u64) -> Result<Vec<SemilinearMap>> {
    let f = space.tower();
    let n = space.n();
    let tw = space.twist();
    let target = space.gram().transpose();
    Ok(space
        .matrices_with_gram(&target, budget)?
        .into_iter()
        .map(|a| SemilinearMap::new(a, tw))
        .filter(|h| h.square(f).mat == Matrix::identity(n, f))
        .collect())
}

/// Oracle involutions `h1` for which `h1^-1 g` is an anti-unitary similitude
/// squaring to `mu(g)`.
pub fn oracle_factorizations<'a>(
    space: &'a HermitianSpace,
    involutions: &'a [SemilinearMap],
    g: &'a GroupElement,
) -> impl Iterator<Item = &'a SemilinearMap> + 'a {
    let f = space.tower();
    involutions.iter().filter(move |h1| {
        let h2 = h1.compose(&SemilinearMap::linear(g.g.clone()), f);
        space.anti_unitary_ratio(&h2).ok().flatten() == Some(g.beta)
            && h2.square(f).mat == Matrix::scalar(space.n(), g.beta)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurveyMode {
    Exhaustive { budget: u64 },
    Sample { count: usize, seed: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct SurveySummary {
    pub total: usize,
    pub passed: usize,
    pub failures: usize,
    /// Number of transcript records per case label, over all elements.
    pub cases: BTreeMap<String, usize>,
    /// `det(h1)` as field coordinates; linear certificates only.
    pub determinants: BTreeMap<String, usize>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl PartialEq for SurveySummary {
    fn eq(&self, other: &Self) -> bool {
        (
            self.total,
            self.passed,
            self.failures,
            &self.cases,
            &self.determinants,
        ) == (
            other.total,
            other.passed,
            other.failures,
            &other.cases,
            &other.determinants,
        )
    }
}

/// The element a survey could not certify, with everything needed to replay it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurveyFailure {
    pub index: usize,
    pub element: GroupElement,
    pub certificate: Option<FactorizationCertificate>,
    pub reason: String,
}

pub fn survey(
    space: &HermitianSpace,
    beta: Elem,
    mode: SurveyMode,
    refined: bool,
) -> Result<SurveySummary> {
    let start = Instant::now();
    let f = space.tower();
    let (elements, seed) = match mode {
        SurveyMode::Exhaustive { budget } => (space.group_enumerate(beta, budget)?, 0),
        SurveyMode::Sample { count, seed } => (space.group_sample(beta, count, seed)?, seed),
    };
    if refined && (f.is_quadratic() || space.epsilon() != 1 || space.n() % 2 == 1 || f.p() == 2) {
        return Err(Error::IncompatibleKind(
            "refined mode needs an even-dimensional orthogonal space over odd q".into(),
        ));
    }
    let opts = FactorOptions { seed };
    let outcomes: Vec<std::result::Result<FactorizationCertificate, Box<SurveyFailure>>> = elements
        .par_iter()
        .enumerate()
        .map(|(index, g)| {
            let fail = |certificate, reason: String| {
                Box::new(SurveyFailure {
                    index,
                    element: g.clone(),
                    certificate,
                    reason,
                })
            };
            let cert = if refined {
                factor_det_refined_with(space, g, &opts)
            } else {
                factor_with(space, g, &opts)
            };
            let cert = cert.map_err(|e| fail(None, e.to_string()))?;
            let report = verify_certificate(space, g, &cert, refined);
            if !report.passed {
                let names: Vec<_> = report.failed().map(|c| c.name.clone()).collect();
                return Err(fail(Some(cert), names.join(", ")));
            }
            Ok(cert)
        })
        .collect();
    let mut cases = BTreeMap::new();
    let mut determinants = BTreeMap::new();
    for outcome in outcomes.iter() {
        let cert = match outcome {
            Ok(c) => c,
            Err(failure) => return Err(Error::SurveyFailed(failure.clone())),
        };
        for label in cert.labels() {
            *cases.entry(label.to_string()).or_insert(0) += 1;
        }
        if cert.h1.is_linear() {
            if let Ok(d) = cert.h1.mat.det(f) {
                *determinants.entry(det_label(f, d)).or_insert(0) += 1;
            }
        }
    }
    let total = outcomes.len();
    Ok(SurveySummary {
        total,
        passed: total,
        failures: 0,
        cases,
        determinants,
        elapsed: start.elapsed(),
    })
}

fn det_label(f: &Tower, d: Elem) -> String {
    if d == f.one() {
        "1".into()
    } else if d == f.from_int(-1) {
        "-1".into()
    } else {
        show(f, d)
    }
}
