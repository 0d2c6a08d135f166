pub mod error;
pub mod exact;
pub mod filtration;
pub mod hodge;
pub mod neron;
pub mod normal_function;
pub mod orbit;
pub mod sl2;

pub use error::{Error, Result};
