//! Reproducible frequency-selective multi-user channel generation.
//!
//! Tapped-delay-line fading with configurable power delay profiles,
//! breakpoint path loss, the centered uniform tone grid, and synthetic
//! exactly-hardened channels for asymptotic tests. Generation is pure
//! given `(config, seed)`: every (user, antenna) pair draws from its own
//! derived substream, so parallel trial generation is order-independent.

mod error;
mod pdp;
mod propagation;
mod realization;
pub mod rng;

pub use error::ChannelError;
pub use pdp::{PdpId, PowerDelayProfile};
pub use propagation::{path_loss_db, tone_grid, PropagationConfig};
pub use realization::{
    flat_index, gen_hardened, gen_realization, gen_realization_with_pdp, unflatten_index,
    ChannelRealization, HardeningMode, UserChannel,
};
