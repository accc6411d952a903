//! Arithmetic isometries of X_n: a real affine map t ↦ ε·n^h·t + α paired
//! with a ball map on Q_n of the same height change h.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exactnum::{ExactError, PrimeSignature, Rational};
use crate::tree::{BallAffineMap, TreeError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IsometryError {
    #[error("base mismatch: n={left} vs n={right}")]
    BaseMismatch { left: u64, right: u64 },
    #[error("isometry has height change {h}, translation distance needs an elliptic element")]
    NotElliptic { h: i64 },
    #[error("isometry reverses the orientation of the real factor")]
    Reflection,
    #[error("invalid isometry: {0}")]
    Invalid(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IsometryType {
    Elliptic,
    Hyperbolic,
}

impl fmt::Display for IsometryType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IsometryType::Elliptic => "elliptic",
            IsometryType::Hyperbolic => "hyperbolic",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ArithmeticIsometry {
    eps: i8,
    alpha: Rational,
    tree: BallAffineMap,
}

/// Wire form `{"eps": ±1, "h": int, "alpha": "p/q", "u": "p/q", "beta": "p/q"}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IsometryJson {
    pub eps: i8,
    pub h: i64,
    pub alpha: Rational,
    pub u: Rational,
    pub beta: Rational,
}

impl ArithmeticIsometry {
    pub fn new(eps: i8, alpha: Rational, tree: BallAffineMap) -> Result<Self, IsometryError> {
        if eps != 1 && eps != -1 {
            return Err(IsometryError::Invalid(format!("eps must be +1 or -1, got {eps}")));
        }
        Ok(ArithmeticIsometry { eps, alpha, tree })
    }

    /// Builds from raw fields, checking that the tree part has height change h.
    pub fn from_parts(
        sig: &PrimeSignature,
        eps: i8,
        h: i64,
        alpha: Rational,
        u: Rational,
        beta: Rational,
    ) -> Result<Self, IsometryError> {
        let tree = BallAffineMap::new(sig, u, beta)?;
        if tree.h() != h {
            return Err(IsometryError::Invalid(format!(
                "declared h = {h} but the tree part {tree} has height change {}",
                tree.h()
            )));
        }
        ArithmeticIsometry::new(eps, alpha, tree)
    }

    pub fn identity(sig: &PrimeSignature) -> Self {
        ArithmeticIsometry { eps: 1, alpha: Rational::zero(), tree: BallAffineMap::identity(sig) }
    }

    /// Pure real translation t ↦ t + x with trivial tree part.
    pub fn translation(sig: &PrimeSignature, x: Rational) -> Self {
        ArithmeticIsometry { eps: 1, alpha: x, tree: BallAffineMap::identity(sig) }
    }

    pub fn pure_tree(tree: BallAffineMap) -> Self {
        ArithmeticIsometry { eps: 1, alpha: Rational::zero(), tree }
    }

    /// a_s: t ↦ t + s, x ↦ x + 1.
    pub fn standard_a(sig: &PrimeSignature, s: Rational) -> Self {
        ArithmeticIsometry { eps: 1, alpha: s, tree: BallAffineMap::standard_a(sig) }
    }

    /// b^l: t ↦ n^l·t, x ↦ n^l·x.
    pub fn standard_b_power(sig: &PrimeSignature, l: i64) -> Self {
        ArithmeticIsometry {
            eps: 1,
            alpha: Rational::zero(),
            tree: BallAffineMap::standard_b_power(sig, l),
        }
    }

    pub fn n(&self) -> u64 {
        self.tree.n()
    }

    pub fn signature(&self) -> &PrimeSignature {
        self.tree.signature()
    }

    pub fn eps(&self) -> i8 {
        self.eps
    }

    pub fn h(&self) -> i64 {
        self.tree.h()
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn tree(&self) -> &BallAffineMap {
        &self.tree
    }

    /// Real slope ε·n^h.
    pub fn slope(&self) -> Rational {
        self.signature().pow(self.h()) * Rational::from(self.eps as i64)
    }

    pub fn apply_real(&self, t: &Rational) -> Rational {
        self.slope() * t + &self.alpha
    }

    pub fn is_identity(&self) -> bool {
        self.eps == 1 && self.alpha.is_zero() && self.tree.is_identity()
    }

    /// `self ∘ other`. Panics on differing bases; see [`Self::try_compose`].
    pub fn compose(&self, other: &Self) -> Self {
        ArithmeticIsometry {
            eps: self.eps * other.eps,
            alpha: self.slope() * &other.alpha + &self.alpha,
            tree: self.tree.compose(&other.tree),
        }
    }

    pub fn try_compose(&self, other: &Self) -> Result<Self, IsometryError> {
        if self.n() != other.n() {
            return Err(IsometryError::BaseMismatch { left: self.n(), right: other.n() });
        }
        Ok(self.compose(other))
    }

    pub fn inverse(&self) -> Self {
        let inv_slope = self.slope().recip().expect("nonzero slope");
        ArithmeticIsometry { eps: self.eps, alpha: -(&inv_slope * &self.alpha), tree: self.tree.inverse() }
    }

    pub fn power(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = ArithmeticIsometry::identity(self.signature());
        let mut sq = base;
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&sq);
            }
            sq = sq.compose(&sq);
            e >>= 1;
        }
        acc
    }

    /// g ∘ self ∘ g^{-1}.
    pub fn conjugate_by(&self, g: &Self) -> Self {
        g.compose(self).compose(&g.inverse())
    }

    pub fn classify_type(&self) -> IsometryType {
        if self.h() == 0 {
            IsometryType::Elliptic
        } else {
            IsometryType::Hyperbolic
        }
    }

    /// Translation distance of an orientation-preserving elliptic element.
    pub fn td(&self) -> Result<Rational, IsometryError> {
        if self.h() != 0 {
            return Err(IsometryError::NotElliptic { h: self.h() });
        }
        if self.eps != 1 {
            return Err(IsometryError::Reflection);
        }
        Ok(self.alpha.clone())
    }

    /// f = translation(α) ∘ pure tree part.
    pub fn decompose(&self) -> Result<(Rational, ArithmeticIsometry), IsometryError> {
        if self.eps != 1 {
            return Err(IsometryError::Reflection);
        }
        Ok((self.alpha.clone(), ArithmeticIsometry::pure_tree(self.tree.clone())))
    }

    pub fn to_wire(&self) -> IsometryJson {
        IsometryJson {
            eps: self.eps,
            h: self.h(),
            alpha: self.alpha.clone(),
            u: self.tree.u().clone(),
            beta: self.tree.beta().clone(),
        }
    }

    pub fn from_wire(sig: &PrimeSignature, w: &IsometryJson) -> Result<Self, IsometryError> {
        ArithmeticIsometry::from_parts(sig, w.eps, w.h, w.alpha.clone(), w.u.clone(), w.beta.clone())
    }
}

impl fmt::Display for ArithmeticIsometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[eps={} h={} alpha={} | x -> {}*x + {}]",
            self.eps,
            self.h(),
            self.alpha,
            self.tree.u(),
            self.tree.beta()
        )
    }
}

/// (r, g) ∈ ℝ* × Aut(T), restricted to rational r and arithmetic pure tree g.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutGn {
    r: Rational,
    g: ArithmeticIsometry,
}

impl AutGn {
    pub fn new(r: Rational, g: ArithmeticIsometry) -> Result<Self, IsometryError> {
        if r.is_zero() {
            return Err(IsometryError::Invalid("r must be nonzero".into()));
        }
        if g.eps() != 1 || !g.alpha().is_zero() {
            return Err(IsometryError::Invalid("conjugator must be a pure tree action".into()));
        }
        Ok(AutGn { r, g })
    }

    /// (r, id).
    pub fn scaling(sig: &PrimeSignature, r: Rational) -> Result<Self, IsometryError> {
        AutGn::new(r, ArithmeticIsometry::identity(sig))
    }

    pub fn r(&self) -> &Rational {
        &self.r
    }

    pub fn g(&self) -> &ArithmeticIsometry {
        &self.g
    }

    /// The automorphism "apply self, then other": (r₁r₂, g₂g₁).
    pub fn then(&self, other: &AutGn) -> AutGn {
        AutGn { r: &self.r * &other.r, g: other.g.compose(&self.g) }
    }
}

/// Scales the pure-translation component by r, then conjugates by g.
pub fn apply_autgn(phi: &AutGn, f: &ArithmeticIsometry) -> Result<ArithmeticIsometry, IsometryError> {
    if phi.g.n() != f.n() {
        return Err(IsometryError::BaseMismatch { left: phi.g.n(), right: f.n() });
    }
    let (x, k) = f.decompose()?;
    let scaled = ArithmeticIsometry::translation(f.signature(), &phi.r * x).compose(&k);
    Ok(scaled.conjugate_by(&phi.g))
}
