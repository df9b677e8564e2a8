//! Exact construction and congruence checking of small generating sets for
//! arithmetic subgroups of `SL(2)`, `SL(n)` and `SU(2,1)` over number fields.

pub mod construct;
pub mod linalg;
pub mod matgroup;
pub mod numberfield;
pub mod poly;
pub mod units;
pub mod verify;

pub use construct::{
    build_cm, build_cmprime, build_noncm, build_sln_multone, build_su21, cmprime_g_element, elementary_words,
    CaseTag, ConstructError, ElementaryCertificate, GeneratorTriple,
};
pub use matgroup::{bruhat_decompose, word_eval, Alphabet, BruhatFactors, GroupError, MatN, Su21Setting, Word};
pub use numberfield::{CmPair, FieldElement, FieldError, FieldRef, NumberField, SubringIndex};
pub use units::{select_theta, ThetaCertificate, UnitError, UnitSource};
pub use verify::{certify, Certificate, ClosureResult, ResidueRing, Surjectivity, Verdict, VerifyError};
