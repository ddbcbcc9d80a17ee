//! Edge clocks.
//!
//! A [`ClockStream`] realises independent rate-1 Poisson clocks on `edges`
//! edges as a single rate-`edges` Poisson process whose points are assigned
//! to a uniformly random edge. Streams are derived from a master seed and a
//! trajectory index using ChaCha8 stream selection, so trajectory `i` draws
//! the same rings no matter which worker runs it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

/// A single clock ring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ring {
    pub time: f64,
    pub edge: usize,
}

/// Identifies an independent random stream: `(master seed, trajectory, lane)`.
///
/// Lanes separate independent clock families used by the same trajectory
/// (for instance the auxiliary clocks of the reservoir domination coupling).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamId {
    pub master_seed: u64,
    pub trajectory: u64,
    pub lane: u32,
}

impl StreamId {
    pub fn new(master_seed: u64, trajectory: u64) -> Self {
        StreamId {
            master_seed,
            trajectory,
            lane: 0,
        }
    }

    pub fn lane(self, lane: u32) -> Self {
        StreamId { lane, ..self }
    }

    /// A ChaCha8 generator for this stream. Lanes start 2^64 words apart in
    /// the keystream, far beyond anything a single trajectory consumes.
    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.trajectory);
        rng.set_word_pos((self.lane as u128) << 64);
        rng
    }
}

/// Lazily generated merged ring sequence of `edges` independent rate-1 clocks.
#[derive(Debug, Clone)]
pub struct ClockStream {
    id: StreamId,
    rng: ChaCha8Rng,
    edges: usize,
    time: f64,
}

impl ClockStream {
    pub fn new(id: StreamId, edges: usize) -> Self {
        ClockStream {
            id,
            rng: id.rng(),
            edges,
            time: 0.0,
        }
    }

    pub fn from_seed(master_seed: u64, trajectory: u64, edges: usize) -> Self {
        ClockStream::new(StreamId::new(master_seed, trajectory), edges)
    }

    pub fn id(&self) -> StreamId {
        self.id
    }

    pub fn edges(&self) -> usize {
        self.edges
    }

    /// Time of the most recent ring (0 before the first).
    pub fn time(&self) -> f64 {
        self.time
    }

    /// Next ring in time order. With no edges the stream never rings and the
    /// returned time is infinite.
    pub fn next_ring(&mut self) -> Ring {
        if self.edges == 0 {
            return Ring {
                time: f64::INFINITY,
                edge: 0,
            };
        }
        let gap: f64 = self.rng.sample(Exp1);
        self.time += gap / self.edges as f64;
        let edge = self.rng.random_range(0..self.edges);
        Ring {
            time: self.time,
            edge,
        }
    }

    /// Rings strictly before `horizon`.
    pub fn rings_until(mut self, horizon: f64) -> impl Iterator<Item = Ring> {
        std::iter::from_fn(move || {
            let r = self.next_ring();
            (r.time < horizon).then_some(r)
        })
    }
}

/// Two clock families read in merged time order. Ties are broken in favour
/// of the first family, then by edge index.
#[derive(Debug, Clone)]
pub struct MergedClocks {
    a: ClockStream,
    b: ClockStream,
    next_a: Ring,
    next_b: Ring,
}

/// Which family a merged ring came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    First,
    Second,
}

impl MergedClocks {
    pub fn new(mut a: ClockStream, mut b: ClockStream) -> Self {
        let next_a = a.next_ring();
        let next_b = b.next_ring();
        MergedClocks {
            a,
            b,
            next_a,
            next_b,
        }
    }

    pub fn next_ring(&mut self) -> (Family, Ring) {
        let first = (self.next_a.time, 0, self.next_a.edge) <= (self.next_b.time, 1, self.next_b.edge);
        if first {
            let r = self.next_a;
            self.next_a = self.a.next_ring();
            (Family::First, r)
        } else {
            let r = self.next_b;
            self.next_b = self.b.next_ring();
            (Family::Second, r)
        }
    }
}
