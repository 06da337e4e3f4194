//! JSON documents for instances, certificates and reports.
//!
//! Field elements travel as arrays of `F_p` coordinates (see
//! [`Tower::encode`]); matrices as arrays of rows and polynomials as
//! ascending coefficient arrays.

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::{Eigenspaces, FactorizationCertificate, Record};
use crate::field::{Elem, Ext, Level, Moduli, Tower};
use crate::forms::{GroupElement, HermitianSpace};
use crate::linalg::{Matrix, SemilinearMap, Twist, Vector};
use crate::poly::Poly;
use crate::verify::{SurveyFailure, SurveySummary, VerifyReport};

pub type ElemDoc = Vec<u32>;
pub type MatrixDoc = Vec<Vec<ElemDoc>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtDoc {
    Trivial,
    Quadratic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDoc {
    pub p: u64,
    #[serde(default = "one")]
    pub k: usize,
    pub ext: ExtDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_modulus: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ext_modulus: Option<Vec<ElemDoc>>,
}

fn one() -> usize {
    1
}

impl FieldDoc {
    pub fn from_tower(f: &Tower) -> FieldDoc {
        FieldDoc {
            p: f.p() as u64,
            k: f.k(),
            ext: match f.ext() {
                Ext::Trivial => ExtDoc::Trivial,
                Ext::Quadratic => ExtDoc::Quadratic,
            },
            base_modulus: Some(f.base_modulus().to_vec()),
            ext_modulus: f
                .ext_modulus()
                .map(|m| m.iter().map(|&c| f.encode(c, Level::Base)).collect()),
        }
    }

    pub fn to_tower(&self) -> Result<Tower> {
        let ext = match self.ext {
            ExtDoc::Trivial => Ext::Trivial,
            ExtDoc::Quadratic => Ext::Quadratic,
        };
        // the extension modulus is over F, so F is built first
        let base = Tower::new(
            self.p,
            self.k,
            Ext::Trivial,
            Some(Moduli {
                base: self.base_modulus.clone(),
                ext: None,
            }),
        )?;
        let ext_mod = match &self.ext_modulus {
            Some(m) if ext == Ext::Quadratic => {
                let coeffs: Vec<Elem> = m.iter().map(|c| base.decode(c)).collect::<Result<_>>()?;
                let arr: [Elem; 3] = coeffs.try_into().map_err(|_| {
                    Error::FieldParams("extension modulus needs three coefficients".into())
                })?;
                Some(arr)
            }
            Some(_) => {
                return Err(Error::FieldParams(
                    "extension modulus given for a trivial tower".into(),
                ))
            }
            None => None,
        };
        Tower::new(
            self.p,
            self.k,
            ext,
            Some(Moduli {
                base: self.base_modulus.clone(),
                ext: ext_mod,
            }),
        )
    }
}

pub fn encode_elem(f: &Tower, a: Elem) -> ElemDoc {
    f.encode(a, Level::Top)
}

pub fn encode_vector(f: &Tower, v: &[Elem]) -> Vec<ElemDoc> {
    v.iter().map(|&a| encode_elem(f, a)).collect()
}

pub fn encode_matrix(f: &Tower, m: &Matrix) -> MatrixDoc {
    m.to_rows().iter().map(|r| encode_vector(f, r)).collect()
}

pub fn decode_vector(f: &Tower, v: &[ElemDoc]) -> Result<Vector> {
    v.iter().map(|c| f.decode(c)).collect()
}

pub fn decode_matrix(f: &Tower, m: &MatrixDoc) -> Result<Matrix> {
    let rows = m
        .iter()
        .map(|r| decode_vector(f, r))
        .collect::<Result<Vec<_>>>()?;
    if rows.is_empty() {
        return Ok(Matrix::zeros(0, 0));
    }
    Matrix::from_rows(rows)
}

fn encode_poly(f: &Tower, p: &Poly) -> Vec<ElemDoc> {
    encode_vector(f, p.coeffs())
}

fn decode_poly(f: &Tower, p: &[ElemDoc]) -> Result<Poly> {
    Ok(Poly::from_coeffs(decode_vector(f, p)?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub field: FieldDoc,
    pub epsilon: i8,
    pub gram: MatrixDoc,
    pub g: MatrixDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<ElemDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// A validated instance: a space, one of its similitudes, and the seed for
/// the construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub space: HermitianSpace,
    pub element: GroupElement,
    pub seed: u64,
}

impl Instance {
    pub fn to_doc(&self) -> InstanceDoc {
        let f = self.space.tower();
        InstanceDoc {
            field: FieldDoc::from_tower(f),
            epsilon: self.space.epsilon(),
            gram: encode_matrix(f, self.space.gram()),
            g: encode_matrix(f, &self.element.g),
            beta: Some(encode_elem(f, self.element.beta)),
            seed: Some(self.seed),
        }
    }
}

impl InstanceDoc {
    pub fn validate(&self) -> Result<Instance> {
        let f = self.field.to_tower()?;
        let gram = decode_matrix(&f, &self.gram).map_err(|e| context("gram", e))?;
        let space =
            HermitianSpace::new(f.clone(), self.epsilon, gram).map_err(|e| context("gram", e))?;
        let g = decode_matrix(&f, &self.g).map_err(|e| context("g", e))?;
        if g.rows() != space.n() || g.cols() != space.n() {
            return Err(Error::InvalidInput(format!(
                "g: expected {0}x{0}, got {1}x{2}",
                space.n(),
                g.rows(),
                g.cols()
            )));
        }
        let element = GroupElement::new(&space, g).map_err(|e| context("g", e))?;
        if let Some(b) = &self.beta {
            let b = f.decode(b).map_err(|e| context("beta", e))?;
            if b != element.beta {
                return Err(Error::InvalidInput(format!(
                    "beta: stated {:?} but the multiplier of g is {:?}",
                    f.encode(b, Level::Top),
                    f.encode(element.beta, Level::Top)
                )));
            }
        }
        Ok(Instance {
            space,
            element,
            seed: self.seed.unwrap_or(0),
        })
    }
}

fn context(field: &str, e: Error) -> Error {
    Error::InvalidInput(format!("{field}: {e}"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TwistDoc {
    Identity,
    Tau,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemilinearDoc {
    pub mat: MatrixDoc,
    pub twist: TwistDoc,
}

fn encode_map(f: &Tower, h: &SemilinearMap) -> SemilinearDoc {
    SemilinearDoc {
        mat: encode_matrix(f, &h.mat),
        twist: match h.twist {
            Twist::Identity => TwistDoc::Identity,
            Twist::Tau => TwistDoc::Tau,
        },
    }
}

fn decode_map(f: &Tower, h: &SemilinearDoc) -> Result<SemilinearMap> {
    let twist = match h.twist {
        TwistDoc::Identity => Twist::Identity,
        TwistDoc::Tau => Twist::Tau,
    };
    Ok(SemilinearMap::new(decode_matrix(f, &h.mat)?, twist))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenDoc {
    pub plus: MatrixDoc,
    pub minus: MatrixDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case", deny_unknown_fields)]
pub enum RecordDoc {
    #[serde(rename = "scale")]
    Scale { root: ElemDoc },
    #[serde(rename = "I")]
    CaseOne {
        poly: Vec<ElemDoc>,
        partner: Vec<ElemDoc>,
        exponent: usize,
        e_basis: MatrixDoc,
        f_basis: MatrixDoc,
        a: MatrixDoc,
        d1: MatrixDoc,
        d2: MatrixDoc,
        s1: MatrixDoc,
        s2: MatrixDoc,
        c: SemilinearDoc,
    },
    #[serde(rename = "II-A")]
    CaseTwoA {
        poly: Vec<ElemDoc>,
        exponent: usize,
        v: Vec<ElemDoc>,
        krylov: MatrixDoc,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eigen: Option<EigenDoc>,
    },
    #[serde(rename = "II-B")]
    CaseTwoB {
        poly: Vec<ElemDoc>,
        exponent: usize,
        x: Vec<ElemDoc>,
        y: Vec<ElemDoc>,
        gamma: Vec<ElemDoc>,
        system: MatrixDoc,
        rhs: Vec<ElemDoc>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        normalized_by: Option<Vec<ElemDoc>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eigen: Option<EigenDoc>,
    },
    #[serde(rename = "recursion")]
    Recursion {
        poly: Vec<ElemDoc>,
        exponent: usize,
        w: MatrixDoc,
        complement: MatrixDoc,
    },
    #[serde(rename = "flip")]
    Flip { piece: usize, dim: usize },
}

fn encode_eigen(f: &Tower, e: &Option<Eigenspaces>) -> Option<EigenDoc> {
    e.as_ref().map(|e| EigenDoc {
        plus: encode_matrix(f, &e.plus),
        minus: encode_matrix(f, &e.minus),
    })
}

fn decode_eigen(f: &Tower, e: &Option<EigenDoc>) -> Result<Option<Eigenspaces>> {
    e.as_ref()
        .map(|e| {
            Ok(Eigenspaces {
                plus: decode_matrix(f, &e.plus)?,
                minus: decode_matrix(f, &e.minus)?,
            })
        })
        .transpose()
}

fn encode_record(f: &Tower, r: &Record) -> RecordDoc {
    let m = |x: &Matrix| encode_matrix(f, x);
    let p = |x: &Poly| encode_poly(f, x);
    match r {
        Record::Scale { root } => RecordDoc::Scale {
            root: encode_elem(f, *root),
        },
        Record::CaseOne {
            poly,
            partner,
            exponent,
            e_basis,
            f_basis,
            a,
            d1,
            d2,
            s1,
            s2,
            c,
        } => RecordDoc::CaseOne {
            poly: p(poly),
            partner: p(partner),
            exponent: *exponent,
            e_basis: m(e_basis),
            f_basis: m(f_basis),
            a: m(a),
            d1: m(d1),
            d2: m(d2),
            s1: m(s1),
            s2: m(s2),
            c: encode_map(f, c),
        },
        Record::CaseTwoA {
            poly,
            exponent,
            v,
            krylov,
            eigen,
        } => RecordDoc::CaseTwoA {
            poly: p(poly),
            exponent: *exponent,
            v: encode_vector(f, v),
            krylov: m(krylov),
            eigen: encode_eigen(f, eigen),
        },
        Record::CaseTwoB {
            poly,
            exponent,
            x,
            y,
            gamma,
            system,
            rhs,
            normalized_by,
            eigen,
        } => RecordDoc::CaseTwoB {
            poly: p(poly),
            exponent: *exponent,
            x: encode_vector(f, x),
            y: encode_vector(f, y),
            gamma: p(gamma),
            system: m(system),
            rhs: encode_vector(f, rhs),
            normalized_by: normalized_by.as_ref().map(p),
            eigen: encode_eigen(f, eigen),
        },
        Record::Recursion {
            poly,
            exponent,
            w,
            complement,
        } => RecordDoc::Recursion {
            poly: p(poly),
            exponent: *exponent,
            w: m(w),
            complement: m(complement),
        },
        Record::Flip { piece, dim } => RecordDoc::Flip {
            piece: *piece,
            dim: *dim,
        },
    }
}

fn decode_record(f: &Tower, r: &RecordDoc) -> Result<Record> {
    let m = |x: &MatrixDoc| decode_matrix(f, x);
    let p = |x: &Vec<ElemDoc>| decode_poly(f, x);
    Ok(match r {
        RecordDoc::Scale { root } => Record::Scale {
            root: f.decode(root)?,
        },
        RecordDoc::CaseOne {
            poly,
            partner,
            exponent,
            e_basis,
            f_basis,
            a,
            d1,
            d2,
            s1,
            s2,
            c,
        } => Record::CaseOne {
            poly: p(poly)?,
            partner: p(partner)?,
            exponent: *exponent,
            e_basis: m(e_basis)?,
            f_basis: m(f_basis)?,
            a: m(a)?,
            d1: m(d1)?,
            d2: m(d2)?,
            s1: m(s1)?,
            s2: m(s2)?,
            c: decode_map(f, c)?,
        },
        RecordDoc::CaseTwoA {
            poly,
            exponent,
            v,
            krylov,
            eigen,
        } => Record::CaseTwoA {
            poly: p(poly)?,
            exponent: *exponent,
            v: decode_vector(f, v)?,
            krylov: m(krylov)?,
            eigen: decode_eigen(f, eigen)?,
        },
        RecordDoc::CaseTwoB {
            poly,
            exponent,
            x,
            y,
            gamma,
            system,
            rhs,
            normalized_by,
            eigen,
        } => Record::CaseTwoB {
            poly: p(poly)?,
            exponent: *exponent,
            x: decode_vector(f, x)?,
            y: decode_vector(f, y)?,
            gamma: p(gamma)?,
            system: m(system)?,
            rhs: decode_vector(f, rhs)?,
            normalized_by: normalized_by.as_ref().map(p).transpose()?,
            eigen: decode_eigen(f, eigen)?,
        },
        RecordDoc::Recursion {
            poly,
            exponent,
            w,
            complement,
        } => Record::Recursion {
            poly: p(poly)?,
            exponent: *exponent,
            w: m(w)?,
            complement: m(complement)?,
        },
        RecordDoc::Flip { piece, dim } => Record::Flip {
            piece: *piece,
            dim: *dim,
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDoc {
    pub field: FieldDoc,
    pub h1: SemilinearDoc,
    pub h2: SemilinearDoc,
    pub beta: ElemDoc,
    #[serde(default)]
    pub refined: bool,
    #[serde(default)]
    pub transcript: Vec<RecordDoc>,
}

impl CertificateDoc {
    pub fn from_certificate(f: &Tower, cert: &FactorizationCertificate) -> CertificateDoc {
        CertificateDoc {
            field: FieldDoc::from_tower(f),
            h1: encode_map(f, &cert.h1),
            h2: encode_map(f, &cert.h2),
            beta: encode_elem(f, cert.beta),
            refined: cert.refined,
            transcript: cert
                .transcript
                .iter()
                .map(|r| encode_record(f, r))
                .collect(),
        }
    }

    /// Decodes against the tower the certificate claims; the caller compares
    /// it with the instance's.
    pub fn to_certificate(&self) -> Result<(Tower, FactorizationCertificate)> {
        let f = self.field.to_tower()?;
        let cert = FactorizationCertificate {
            h1: decode_map(&f, &self.h1)?,
            h2: decode_map(&f, &self.h2)?,
            beta: f.decode(&self.beta)?,
            refined: self.refined,
            transcript: self
                .transcript
                .iter()
                .map(|r| decode_record(&f, r))
                .collect::<Result<_>>()?,
        };
        Ok((f, cert))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyFailureDoc {
    pub index: usize,
    pub instance: InstanceDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateDoc>,
    pub reason: String,
}

impl SurveyFailureDoc {
    pub fn new(space: &HermitianSpace, failure: &SurveyFailure, seed: u64) -> SurveyFailureDoc {
        let f = space.tower();
        let instance = Instance {
            space: space.clone(),
            element: failure.element.clone(),
            seed,
        };
        SurveyFailureDoc {
            index: failure.index,
            instance: instance.to_doc(),
            certificate: failure
                .certificate
                .as_ref()
                .map(|c| CertificateDoc::from_certificate(f, c)),
            reason: failure.reason.clone(),
        }
    }
}

/// Parses JSON with the path of the offending field in the error.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::InvalidInput(format!("{path}: {inner}"))
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    from_json::<InstanceDoc>(text)?.validate()
}

pub fn report_json(report: &VerifyReport) -> String {
    to_json(report)
}

pub fn summary_json(summary: &SurveySummary) -> String {
    to_json(summary)
}
