//! Functions as sparse coefficient tensors, every approximation operator as
//! a diagonal multiplier, and the hyperbolic-cross index sets.

mod cross;
mod multiplier;
mod rank;
mod tensor;

pub use cross::{
    g_cardinality, g_product_bound, hyperbolic_fourier_apply, hyperbolic_vp_apply, index_set_g, index_set_h,
    index_set_h1, product_count, truncate_g, vp_pair, CrossFamily, GTruncation, HyperbolicOperator, IndexSet, Levels,
};
pub use multiplier::{dyadic_fourier_gain, dyadic_vp_gain, tensor_apply, vp_gain, Multiplier1D};
pub use rank::{largest_xi, rank_of, smallest_product_exceeding, OperatorDescriptor, XiFamily};
pub use tensor::{CoeffTensor, MultiIndex};
