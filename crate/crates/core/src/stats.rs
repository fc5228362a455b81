//! Streaming mean and variance with an associative merge.

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments<T> {
    count: u64,
    mean: T,
    m2: T,
}

impl<T: Real> Default for Moments<T> {
    fn default() -> Self {
        Moments {
            count: 0,
            mean: T::zero(),
            m2: T::zero(),
        }
    }
}

impl<T: Real> Moments<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: T) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean = self.mean + delta / T::from_u64(self.count).unwrap();
        self.m2 = self.m2 + delta * (x - self.mean);
    }

    /// Chan et al. pairwise combination.
    pub fn merge(&mut self, other: &Moments<T>) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let na = T::from_u64(self.count).unwrap();
        let nb = T::from_u64(other.count).unwrap();
        let n = na + nb;
        let delta = other.mean - self.mean;
        self.mean = self.mean + delta * nb / n;
        self.m2 = self.m2 + other.m2 + delta * delta * na * nb / n;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> T {
        self.mean
    }

    /// Unbiased sample variance; zero for fewer than two samples.
    pub fn variance(&self) -> T {
        if self.count < 2 {
            return T::zero();
        }
        (self.m2 / T::from_u64(self.count - 1).unwrap()).max(T::zero())
    }

    /// Sample standard deviation divided by the square root of the count.
    pub fn std_error(&self) -> T {
        if self.count == 0 {
            return T::zero();
        }
        (self.variance() / T::from_u64(self.count).unwrap()).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_stream_has_zero_error() {
        let mut m = Moments::<f64>::new();
        for _ in 0..1000 {
            m.push(7.0);
        }
        assert_eq!(m.mean(), 7.0);
        assert_eq!(m.std_error(), 0.0);
    }

    #[test]
    fn merge_matches_single_pass() {
        let xs: Vec<f64> = (0..257).map(|i| ((i * 37) % 101) as f64 / 10.0).collect();
        let mut whole = Moments::new();
        xs.iter().for_each(|&x| whole.push(x));
        let mut parts = Moments::new();
        for chunk in xs.chunks(13) {
            let mut p = Moments::new();
            chunk.iter().for_each(|&x| p.push(x));
            parts.merge(&p);
        }
        assert!((whole.mean() - parts.mean()).abs() < 1e-12);
        assert!((whole.variance() - parts.variance()).abs() < 1e-10);
        let naive_mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let naive_var =
            xs.iter().map(|x| (x - naive_mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!((whole.variance() - naive_var).abs() < 1e-10);
    }
}

/// Independent random stream number `index` derived from a root seed.
pub fn substream(seed: u64, index: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Samples drawn per random substream. Fixing this (rather than splitting by worker)
/// is what makes Monte Carlo results independent of the worker count.
pub const CHUNK: usize = 4096;

/// Sizes of the fixed chunks covering `samples` draws.
pub(crate) fn chunk_sizes(samples: usize) -> impl Iterator<Item = usize> {
    let full = samples / CHUNK;
    let rest = samples % CHUNK;
    std::iter::repeat_n(CHUNK, full).chain((rest > 0).then_some(rest))
}
