pub mod decomp;
pub mod error;
pub mod factor;
pub mod field;
pub mod forms;
pub mod linalg;
pub mod poly;
pub mod verify;
pub mod wire;

pub use error::{Error, Result};
pub use factor::{
    dualizing_conjugator, factor, factor_det_refined, factor_with, symmetric_conjugator,
    symmetric_factor, symmetric_unitary_conjugator, FactorOptions, FactorizationCertificate,
    Record,
};
pub use field::{Elem, Ext, Level, Tower};
pub use forms::{GroupElement, HermitianSpace, Kind};
pub use linalg::{Matrix, SemilinearMap, Twist};
pub use poly::Poly;
pub use verify::{
    oracle_involution_set, survey, verify_certificate, SurveyMode, SurveySummary, VerifyReport,
};
