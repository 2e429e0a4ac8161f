//! Exact linear algebra for orbit equivalence of matrix tuples.
//!
//! The crate decides, with certificates, whether two tuples of matrices lie
//! in the same orbit under several classical group actions:
//!
//! * simultaneous similarity `A ↦ PAP⁻¹` ([`orbit::similar`]),
//! * the left-right action `A ↦ PAQ` of `GL_p × GL_q` ([`orbit::glr_equivalent`])
//!   and of `SL_p × SL_q` ([`orbit::sl_equivalent`]),
//! * similarity structured by an involution — orthogonal, symplectic, unitary
//!   ([`orbit::structured_similar`]).
//!
//! Negative answers come with a *rank-disparity witness*: a linear matrix
//! pencil `L = T₀ + x₁T₁ + ⋯ + xₘTₘ` whose evaluations
//! `L(A) = I⊗T₀ + Σ Aᵢ⊗Tᵢ` have different ranks on the two tuples. Witnesses
//! are constructed from candidate modules harvested off a radical filtration
//! of the module attached to `A ⊕ B` ([`moddec`]), and every certificate is
//! re-verified in exact arithmetic before it is returned.
//!
//! All computation is exact, over ℚ, ℚ[i], or a prime field 𝔽_p, on dense
//! matrices ([`field`], [`matrix`]). Noncommutative matrix polynomials can be
//! parsed and reduced to pencils by Higman linearization ([`nclin`]), so rank
//! questions about polynomial evaluations reduce to pencil evaluations.
//! Randomized steps always take an explicit seed and are deterministic.

pub mod error;
pub mod field;
pub mod matrix;
pub mod moddec;
pub mod nclin;
pub mod orbit;
pub mod pencil;
pub mod poly;

pub use error::{Error, Result};
pub use field::{FieldDescriptor, Scalar};
pub use matrix::{Matrix, SolveOutcome};
pub use nclin::{LinearizationResult, NcMatPoly, NcPoly};
pub use orbit::{
    glr_equivalent, lambda_equivalent, nullcone_member, similar, sl_equivalent,
    sl_equivalent_outside_nullcone, structured_similar, BlowupWitness, Certificate, InvolutionKind,
    NullconeOutcome, Verdict, Witness,
};
pub use pencil::{LinearPencil, MatrixTuple, RectPencil};
