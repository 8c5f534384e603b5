//! Roots of quadratic congruences `μ² ≡ D (mod m)` for squarefree `D ≡ 1 (mod 4)`,
//! the geodesics of the modular group that realize them, and their fine-scale
//! pair statistics.

pub mod arith;
pub mod density;
pub mod error;
pub mod forms;
pub mod geodesics;
pub mod modular;
pub mod negdisc;
pub mod orders;
pub mod quad;
pub mod roots;
pub mod statistics;

pub use density::{ClassMask, DensityTable};
pub use error::{Error, Result};
pub use forms::BinaryForm;
pub use geodesics::{BaseGeodesicSet, Endpoint, Geodesic, TopPoint};
pub use modular::{GammaElement, ModMat};
pub use negdisc::OrbitPoint;
pub use orders::{IdealHNF, NarrowClassGroup, OrderTag, UnitData, UnitRelation};
pub use quad::QuadNum;
pub use roots::{Root, RootFilter, RootSequence};
pub use statistics::{Histogram, Normalization};
