//! Stinespring dilations of unital CP maps on matrix algebras.
//!
//! With Kraus operators `K_1, …, K_r` (each `d × k`), the isometry
//! `V: C^d → C^r ⊗ C^k` is `V ξ = Σ_i e_i ⊗ K_i* ξ` and the representation
//! is `π(A) = I_r ⊗ A`, so `V* π(A) V = Σ_i K_i A K_i* = Φ(A)`. `V*V = Φ(I)`,
//! so `V` is an isometry exactly when `Φ` is unital. The dilation is not
//! minimal in general; the Kraus rank from the Choi spectrum is used.

use crate::error::{bail, Result};
use crate::linalg::operator_norm;
use crate::matrix::{ComplexMatrix, C64};
use crate::posmap::{cp_test, MapRep, PositivityStatus};
use crate::random;

/// Largest tolerated `‖Φ(I) − I‖` for [`dilate`].
pub const UNITAL_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct StinespringDilation {
    /// Kraus rank `r`.
    pub env_dim: usize,
    /// `(r·k) × d`.
    pub isometry: ComplexMatrix,
    /// `r·k`.
    pub pi_dim: usize,
    in_dim: usize,
    map: MapRep,
}

impl StinespringDilation {
    pub fn map(&self) -> &MapRep {
        &self.map
    }

    /// `π(A) = I_r ⊗ A`.
    pub fn pi(&self, a: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::identity(self.env_dim).kron(a)
    }

    /// `V* π(A) V`.
    pub fn compress(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let v = &self.isometry;
        &(&v.adjoint() * &self.pi(a)) * v
    }

    /// `‖V*V − I_d‖`.
    pub fn isometry_residual(&self) -> f64 {
        let v = &self.isometry;
        operator_norm(&(&(&v.adjoint() * v) - &ComplexMatrix::identity(v.cols())))
    }

    /// `I − VV*` on the dilation space.
    pub fn complement_projection(&self) -> ComplexMatrix {
        let v = &self.isometry;
        &ComplexMatrix::identity(self.pi_dim) - &(v * &v.adjoint())
    }

    /// `‖Φ(A) − V*π(A)V‖`.
    pub fn dilation_residual(&self, a: &ComplexMatrix) -> Result<f64> {
        Ok(operator_norm(&(&self.map.apply(a)? - &self.compress(a))))
    }
}

/// Builds the Kraus-rank dilation of a unital CP map.
pub fn dilate(map: &MapRep) -> Result<StinespringDilation> {
    if map.in_dim() != map.out_dim() {
        bail!(Contract, "dilation requires a unital map M_k -> M_k");
    }
    let verdict = cp_test(map)?;
    if verdict.status != PositivityStatus::CertifiedCp {
        bail!(
            Contract,
            "map is not completely positive (min Choi eigenvalue {:e})",
            verdict.min_value_found
        );
    }
    let unital = map.unital_residual();
    if unital > UNITAL_TOL {
        bail!(Contract, "map is not unital: ‖Φ(I) − I‖ = {unital:e}");
    }
    let kraus = map.to_kraus()?;
    let ops = kraus.kraus_ops().expect("Kraus form");
    let (k, d, r) = (map.in_dim(), map.out_dim(), ops.len());
    let mut isometry = ComplexMatrix::zeros(r * k, d);
    for (i, op) in ops.iter().enumerate() {
        isometry.embed_block(i * k, 0, &op.adjoint())?;
    }
    Ok(StinespringDilation { env_dim: r, isometry, pi_dim: r * k, in_dim: k, map: map.clone() })
}

#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase"))]
pub struct HomomorphismReport {
    pub samples: usize,
    /// max `‖π(AB) − π(A)π(B)‖ / (1 + ‖A‖‖B‖)`.
    pub multiplicativity: f64,
    /// max `‖π(A*) − π(A)*‖`.
    pub adjoint: f64,
    /// `‖π(I) − I‖`.
    pub unit: f64,
    /// max `|‖π(A)‖ − ‖A‖|`.
    pub norm: f64,
    /// max `‖Φ(A) − V*π(A)V‖ / (1 + ‖A‖)`.
    pub dilation: f64,
}

/// Samples Ginibre pairs `(A, B)` and measures how far `π` is from a
/// unital norm-preserving *-homomorphism, plus the dilation residual.
pub fn homomorphism_check(dilation: &StinespringDilation, samples: usize, seed: u64) -> HomomorphismReport {
    let k = dilation.in_dim;
    let mut rng = random::rng(seed);
    let mut report = HomomorphismReport {
        samples,
        unit: (&dilation.pi(&ComplexMatrix::identity(k)) - &ComplexMatrix::identity(dilation.pi_dim)).max_abs(),
        ..Default::default()
    };
    for _ in 0..samples {
        let a = random::ginibre(k, k, &mut rng).scale_real(random::uniform(0.1, 5.0, &mut rng));
        let b = random::ginibre(k, k, &mut rng);
        let (na, nb) = (operator_norm(&a), operator_norm(&b));
        let (pa, pb) = (dilation.pi(&a), dilation.pi(&b));
        let mult = operator_norm(&(&dilation.pi(&(&a * &b)) - &(&pa * &pb))) / (1.0 + na * nb);
        let adj = (&dilation.pi(&a.adjoint()) - &pa.adjoint()).max_abs();
        let norm = (operator_norm(&pa) - na).abs();
        let dil = dilation.dilation_residual(&a).expect("dims") / (1.0 + na);
        report.multiplicativity = report.multiplicativity.max(mult);
        report.adjoint = report.adjoint.max(adj);
        report.norm = report.norm.max(norm);
        report.dilation = report.dilation.max(dil);
    }
    report
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase"))]
pub struct DefectIdentity {
    /// `‖Φ(A*A) − Φ(A)*Φ(A)‖`, from the map directly.
    pub lhs: f64,
    /// `‖V*(π(A−λI))*(I−VV*)π(A−μI)V‖`.
    pub rhs: f64,
    /// `‖A − λI‖·‖A − μI‖`.
    pub shifted_bound: f64,
}

/// Evaluates both sides of the dilation identity behind the variance
/// bound, for arbitrary shifts `λ, μ`.
pub fn lemma2_defect_identity(
    dilation: &StinespringDilation,
    a: &ComplexMatrix,
    lambda: C64,
    mu: C64,
) -> Result<DefectIdentity> {
    let phi = dilation.map();
    let pa = phi.apply(a)?;
    let lhs = operator_norm(&(&phi.apply(&(&a.adjoint() * a))? - &(&pa.adjoint() * &pa)));

    let a_l = a.shift(lambda)?;
    let a_m = a.shift(mu)?;
    let v = &dilation.isometry;
    let middle = &(&dilation.pi(&a_l).adjoint() * &dilation.complement_projection()) * &dilation.pi(&a_m);
    let rhs = operator_norm(&(&(&v.adjoint() * &middle) * v));
    Ok(DefectIdentity { lhs, rhs, shifted_bound: operator_norm(&a_l) * operator_norm(&a_m) })
}
