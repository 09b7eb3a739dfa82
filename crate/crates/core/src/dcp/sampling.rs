//! Per-atom random inputs. Every atom index owns its own stream, so how the index range is
//! split across workers never changes the numbers an atom sees.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampling {
    /// ChaCha8 stream per atom index.
    #[default]
    Pseudo,
    /// Halton sequence in bases 2, 3, 5, 7 with a seeded Cranley-Patterson rotation.
    Halton,
    /// Latin hypercube: one sample per stratum in every dimension, seeded permutations.
    Stratified,
}

pub(crate) const DIMS: usize = 4;

pub(crate) struct Sampler {
    kind: Sampling,
    seed: u64,
    n: usize,
    shift: [f64; DIMS],
    perms: Vec<Vec<u32>>,
}

impl Sampler {
    pub(crate) fn new(kind: Sampling, seed: u64, n: usize) -> Self {
        // stream u64::MAX is reserved for sequence-level draws
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::MAX);
        let mut shift = [0.0; DIMS];
        for s in &mut shift {
            *s = rng.gen();
        }
        let perms = if kind == Sampling::Stratified {
            (0..DIMS)
                .map(|_| {
                    let mut p: Vec<u32> = (0..n as u32).collect();
                    for i in (1..p.len()).rev() {
                        let j = rng.gen_range(0..=i);
                        p.swap(i, j);
                    }
                    p
                })
                .collect()
        } else {
            Vec::new()
        };
        Self {
            kind,
            seed,
            n,
            shift,
            perms,
        }
    }

    /// Uniforms in (0, 1) for atom `i`.
    pub(crate) fn uniforms(&self, i: usize) -> [f64; DIMS] {
        let mut u = [0.0; DIMS];
        match self.kind {
            Sampling::Pseudo => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream(i as u64);
                for x in &mut u {
                    *x = rng.gen();
                }
            }
            Sampling::Halton => {
                const BASES: [u64; DIMS] = [2, 3, 5, 7];
                for (d, x) in u.iter_mut().enumerate() {
                    *x = (radical_inverse(i as u64 + 1, BASES[d]) + self.shift[d]).fract();
                }
            }
            Sampling::Stratified => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream(i as u64);
                for (d, x) in u.iter_mut().enumerate() {
                    let jitter: f64 = rng.gen();
                    *x = (self.perms[d][i] as f64 + jitter) / self.n as f64;
                }
            }
        }
        for x in &mut u {
            if *x <= 0.0 {
                *x = f64::MIN_POSITIVE;
            }
        }
        u
    }

    /// Four standard normals for atom `i` (Box-Muller on the uniforms).
    pub(crate) fn normals(&self, i: usize) -> [f64; DIMS] {
        let u = self.uniforms(i);
        let tau = 2.0 * std::f64::consts::PI;
        let r0 = (-2.0 * u[0].ln()).sqrt();
        let r1 = (-2.0 * u[2].ln()).sqrt();
        [
            r0 * (tau * u[1]).cos(),
            r0 * (tau * u[1]).sin(),
            r1 * (tau * u[3]).cos(),
            r1 * (tau * u[3]).sin(),
        ]
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_base_two() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(2, 2), 0.25);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert!((radical_inverse(5, 3) - (2.0 / 3.0 + 1.0 / 9.0)).abs() < 1e-15);
    }

    #[test]
    fn streams_depend_only_on_seed_and_index() {
        for kind in [Sampling::Pseudo, Sampling::Halton] {
            let a = Sampler::new(kind, 7, 100);
            let b = Sampler::new(kind, 7, 5000);
            assert_eq!(a.normals(42), b.normals(42));
            assert_ne!(a.normals(42), a.normals(43));
        }
    }

    #[test]
    fn stratified_fills_every_stratum() {
        let n = 64;
        let s = Sampler::new(Sampling::Stratified, 3, n);
        for d in 0..DIMS {
            let mut hit = vec![false; n];
            for i in 0..n {
                hit[(s.uniforms(i)[d] * n as f64) as usize] = true;
            }
            assert!(hit.iter().all(|&h| h));
        }
    }

    #[test]
    fn normal_moments() {
        for kind in [Sampling::Pseudo, Sampling::Halton, Sampling::Stratified] {
            let n = 20_000;
            let s = Sampler::new(kind, 11, n);
            let mut m1 = [0.0; DIMS];
            let mut m2 = [0.0; DIMS];
            for i in 0..n {
                for (d, x) in s.normals(i).iter().enumerate() {
                    m1[d] += x;
                    m2[d] += x * x;
                }
            }
            for d in 0..DIMS {
                assert!((m1[d] / n as f64).abs() < 0.03, "{kind:?} mean {d}");
                assert!((m2[d] / n as f64 - 1.0).abs() < 0.05, "{kind:?} var {d}");
            }
        }
    }
}
