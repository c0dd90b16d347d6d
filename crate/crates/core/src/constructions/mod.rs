//! Ways of building new metric spaces from old ones: ℓ_q products, quotients
//! by finite isometric group actions, and regularization by a length function
//! on the group.

mod group;
mod product;
mod quotient;

pub use group::{check_isometry, GroupAction, GroupElementSpec, GroupSpec, GroupSpecJson};
pub use product::{product_distance, ProductSpace};
pub use quotient::{orbit, quotient_distance, regularized_distance, QuotientSpace, RegularizedSpace};
