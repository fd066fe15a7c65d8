//! Multi-level translation tasks: phrasebooks, the shift-and-translate step,
//! forward/inverse translation, and text formats.

mod error;
mod glyphs;
mod phrasebook;
pub mod rng;
mod sequence;
mod text;
mod translate;

pub use error::MltError;
pub use glyphs::GlyphTable;
pub use phrasebook::{random_phrasebook, Phrasebook, PhrasebookSet};
pub use sequence::{tuple_chars, tuple_index, uniform_sequence, Sequence};
pub use text::{parse_phrasebook, parse_task, serialize_phrasebook, write_task};
pub use translate::{apply_step, intermediates, mlt_forward, mlt_inverse, Trace};

pub type Result<T> = std::result::Result<T, MltError>;
