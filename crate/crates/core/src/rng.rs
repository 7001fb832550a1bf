//! Seeded random sources.
//!
//! Every consumer of randomness draws from its own named substream. The
//! substreams are ChaCha8 streams sharing one key derived from the master
//! seed, so consuming one never shifts the sequence of another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identifies one independent substream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stream {
    Initialization,
    Noise,
    AgentSelection,
    Fundamental,
    Matching,
}

impl Stream {
    pub const ALL: [Stream; 5] = [
        Stream::Initialization,
        Stream::Noise,
        Stream::AgentSelection,
        Stream::Fundamental,
        Stream::Matching,
    ];

    fn id(self) -> u64 {
        match self {
            Stream::Initialization => 1,
            Stream::Noise => 2,
            Stream::AgentSelection => 3,
            Stream::Fundamental => 4,
            Stream::Matching => 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomSource {
    master_seed: u64,
    pub init: ChaCha8Rng,
    pub noise: ChaCha8Rng,
    pub selection: ChaCha8Rng,
    pub fundamental: ChaCha8Rng,
    pub matching: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(master_seed: u64) -> Self {
        Self {
            master_seed,
            init: substream(master_seed, Stream::Initialization),
            noise: substream(master_seed, Stream::Noise),
            selection: substream(master_seed, Stream::AgentSelection),
            fundamental: substream(master_seed, Stream::Fundamental),
            matching: substream(master_seed, Stream::Matching),
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }
}

/// Fresh generator for one named substream of `master_seed`.
pub fn substream(master_seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream.id());
    rng
}
