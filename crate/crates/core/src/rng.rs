//! Reproducible random streams.
//!
//! Every trajectory owns one stream, addressed by `(seed, stream)`. The
//! stream id is the trajectory index inside an ensemble, so the draws a
//! trajectory sees do not depend on which worker thread integrates it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random stream handle. Not to be shared across threads.
pub type Stream = ChaCha8Rng;

/// Opens the stream `stream` of the generator family keyed by `seed`.
pub fn stream(seed: u64, stream: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
