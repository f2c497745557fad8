//! Counter-based random substreams.
//!
//! Every draw in an experiment comes from `substream(seed, tag, index)`, a
//! ChaCha8 generator keyed by `(seed, tag)` and positioned on stream
//! `index`. The same coefficient vector therefore comes out of
//! `substream(seed, "c", i)` no matter which thread asks, in which order,
//! or for which phase matrix.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn tag_hash(tag: &str) -> u64 {
    tag.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

pub fn substream(seed: u64, tag: &str, index: u64) -> StreamRng {
    let key = splitmix64(seed ^ splitmix64(tag_hash(tag)));
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(index);
    rng
}
