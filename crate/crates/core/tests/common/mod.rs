//! Shared generators for the integration suites.
#![allow(dead_code)]

use std::sync::Arc;

use dmflag::diffmod::DifferentialModule;
use dmflag::koszul::{koszul_on, KoszulComplex};
use dmflag::matrix::PolyMatrix;
use dmflag::ring::{PolyRing, Polynomial};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random homogeneous polynomial of degree `deg` with small integer coefficients (possibly zero).
pub fn homogeneous(
    rng: &mut ChaCha8Rng,
    ring: &Arc<PolyRing>,
    deg: i64,
    density: f64,
) -> Polynomial {
    let mut p = ring.zero();
    if deg < 0 {
        return p;
    }
    for m in ring.monomials_of_degree(deg) {
        if rng.gen_bool(density) {
            let c = rng.gen_range(-3i64..=3);
            p = &p + &Polynomial::monomial(ring, ring.field().from_i64(c), m);
        }
    }
    p
}

/// A random polynomial with terms in degrees `0..=max_deg`.
pub fn any_poly(
    rng: &mut ChaCha8Rng,
    ring: &Arc<PolyRing>,
    max_deg: i64,
    density: f64,
) -> Polynomial {
    (0..=max_deg).fold(ring.zero(), |acc, d| {
        &acc + &homogeneous(rng, ring, d, density)
    })
}

/// A random nonzero homogeneous quadric in `k[x1, x2]`.
pub fn nonzero_quadric(rng: &mut ChaCha8Rng, ring: &Arc<PolyRing>) -> Polynomial {
    loop {
        let q = homogeneous(rng, ring, 2, 0.6);
        if !q.is_zero() {
            return q;
        }
    }
}

pub fn koszul_vars(ring: &Arc<PolyRing>) -> KoszulComplex {
    koszul_on(
        ring,
        &(0..ring.nvars()).map(|i| ring.var(i)).collect::<Vec<_>>(),
    )
    .unwrap()
}

/// A random degree-preserving automorphism `U L` with `U` upper and `L` lower unitriangular.
///
/// Entry `(r, c)` of each factor is homogeneous of degree `t_c - t_r`.
pub fn random_automorphism(rng: &mut ChaCha8Rng, d: &DifferentialModule) -> PolyMatrix {
    let ring = d.ring();
    let n = d.rank();
    let t = d.twists();
    let mut u = PolyMatrix::identity(ring, n);
    for r in 0..n {
        for c in r + 1..n {
            u.set(r, c, homogeneous(rng, ring, t[c] - t[r], 0.4));
        }
    }
    let mut l = PolyMatrix::identity(ring, n);
    for r in 0..n {
        for c in 0..r {
            if rng.gen_bool(0.3) {
                l.set(r, c, homogeneous(rng, ring, t[c] - t[r], 0.4));
            }
        }
    }
    u.mul(&l)
}
