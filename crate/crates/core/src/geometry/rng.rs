use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

/// A deterministic random stream keyed by `(master_seed, stream_id)`.
///
/// Backed by ChaCha12: the master seed selects the key and the stream id
/// selects one of 2^64 independent counter streams, so streams never overlap
/// and do not depend on the order in which tasks are scheduled.
#[derive(Clone, Debug)]
pub struct RngStream {
    master_seed: u64,
    stream_id: u64,
    rng: ChaCha12Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_id);
        Self { master_seed, stream_id, rng }
    }

    /// Stream for a named role within run `run` (see [`stream_id`]).
    pub fn for_role(master_seed: u64, run: u64, role: &str) -> Self {
        Self::new(master_seed, stream_id(run, role))
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stream id for `(run index, role tag)`.
///
/// `splitmix64(fnv1a64(role) ^ splitmix64(run))`, where `fnv1a64` is the
/// 64-bit FNV-1a hash of the UTF-8 bytes of the tag. Stable across releases.
pub fn stream_id(run: u64, role: &str) -> u64 {
    let tag = role
        .bytes()
        .fold(FNV_OFFSET, |h, b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME));
    splitmix64(tag ^ splitmix64(run))
}
