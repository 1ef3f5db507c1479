//! Dense brute-force reference for the protocol.
//!
//! Everything here works on plain `Vec<Complex64>` amplitude tables indexed by
//! the H=0/V=1 bits of the photons (first photon most significant), with the
//! auxiliary states written out term by term. It uses nothing from the
//! library beyond the complex number type.
#![allow(dead_code)]

pub type C = twophoton_core::Amplitude;

pub fn c(re: f64) -> C {
    C::new(re, 0.0)
}

#[derive(Debug, Clone)]
pub struct Dense {
    pub photons: Vec<u8>,
    pub amps: Vec<C>,
}

impl Dense {
    pub fn zeros(photons: &[u8]) -> Self {
        Self {
            photons: photons.to_vec(),
            amps: vec![c(0.0); 1 << photons.len()],
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn bit(&self, index: usize, photon: u8) -> usize {
        let n = self.photons.len();
        let pos = self.photons.iter().position(|p| *p == photon).unwrap();
        (index >> (n - 1 - pos)) & 1
    }

    /// Amplitude for an explicit H/V string.
    pub fn get(&self, labels: &str) -> C {
        let idx = labels
            .chars()
            .fold(0usize, |acc, ch| (acc << 1) | usize::from(ch == 'V'));
        self.amps[idx]
    }

    pub fn product(&self, other: &Dense) -> Dense {
        let mut photons = self.photons.clone();
        photons.extend_from_slice(&other.photons);
        let mut out = Dense::zeros(&photons);
        let shift = other.photons.len();
        for (i, a) in self.amps.iter().enumerate() {
            for (k, b) in other.amps.iter().enumerate() {
                out.amps[(i << shift) | k] = a * b;
            }
        }
        out
    }

    /// Contracts a two-photon bra `bra[(x << 1) | y]` on photons (p, q).
    pub fn contract_pair(&self, p: u8, q: u8, bra: &[C; 4]) -> Dense {
        let rest: Vec<u8> = self
            .photons
            .iter()
            .copied()
            .filter(|x| *x != p && *x != q)
            .collect();
        let mut out = Dense::zeros(&rest);
        for (idx, amp) in self.amps.iter().enumerate() {
            let x = self.bit(idx, p);
            let y = self.bit(idx, q);
            let mut r = 0usize;
            for ph in &rest {
                r = (r << 1) | self.bit(idx, *ph);
            }
            out.amps[r] += bra[(x << 1) | y].conj() * amp;
        }
        out
    }

    /// Projects photon `p` on H (`value = 0`) or V (`value = 1`).
    pub fn contract_one(&self, p: u8, value: usize) -> Dense {
        let rest: Vec<u8> = self.photons.iter().copied().filter(|x| *x != p).collect();
        let mut out = Dense::zeros(&rest);
        for (idx, amp) in self.amps.iter().enumerate() {
            if self.bit(idx, p) != value {
                continue;
            }
            let mut r = 0usize;
            for ph in &rest {
                r = (r << 1) | self.bit(idx, *ph);
            }
            out.amps[r] += amp;
        }
        out
    }

    /// Multiplies amplitudes by -1 where `photon` is V.
    pub fn z(&self, photon: u8) -> Dense {
        let mut out = self.clone();
        for (idx, amp) in out.amps.iter_mut().enumerate() {
            if self.bit(idx, photon) == 1 {
                *amp = -*amp;
            }
        }
        out
    }

    /// |<a|b>| / (|a| |b|)
    pub fn overlap(&self, other: &Dense) -> f64 {
        assert_eq!(self.photons, other.photons);
        let ip: C = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        ip.norm() / (self.norm_sqr().sqrt() * other.norm_sqr().sqrt())
    }
}

/// Bell bras on a pair, indexed `(x << 1) | y`, order psi+, psi-, phi+, phi-.
pub fn bell(k: usize) -> [C; 4] {
    let s = 0.5f64.sqrt();
    match k {
        0 => [c(0.0), c(s), c(s), c(0.0)],
        1 => [c(0.0), c(s), c(-s), c(0.0)],
        2 => [c(s), c(0.0), c(0.0), c(s)],
        3 => [c(s), c(0.0), c(0.0), c(-s)],
        _ => unreachable!(),
    }
}

pub fn pair(photons: [u8; 2], comps: [C; 4]) -> Dense {
    Dense {
        photons: photons.to_vec(),
        amps: comps.to_vec(),
    }
}

/// `1/2 sum_i |alpha^i>34 |alpha^{i*}>56 |j(i)>78`, partner entries conj(alpha_{ab}) placed at (not a, not b).
pub fn aux_general(basis: &[[C; 4]; 4], labels: [usize; 4]) -> Dense {
    let mut out = Dense::zeros(&[3, 4, 5, 6, 7, 8]);
    for (i, alpha) in basis.iter().enumerate() {
        for kept in 0..4 {
            for partner in 0..4 {
                let source = 3 - partner;
                let idx = (kept << 4) | (partner << 2) | labels[i];
                out.amps[idx] += 0.5 * alpha[kept] * alpha[source].conj();
            }
        }
    }
    out
}

pub fn aux_parity5() -> Dense {
    let mut out = Dense::zeros(&[3, 4, 5, 6, 7]);
    for (labels, _) in [("HHVVH", ()), ("VVHHH", ()), ("HVVHV", ()), ("VHHVV", ())] {
        let idx = labels
            .chars()
            .fold(0usize, |acc, ch| (acc << 1) | usize::from(ch == 'V'));
        out.amps[idx] = c(0.5);
    }
    out
}

pub fn aux_parity4() -> Dense {
    let mut out = Dense::zeros(&[3, 4, 5, 6]);
    let s = 0.5f64.sqrt();
    out.amps[0b0011] = c(s);
    out.amps[0b1100] = c(s);
    out
}

/// `P v` for `P = sum_{i in subset} |alpha^i><alpha^i|`.
pub fn project(basis: &[[C; 4]; 4], labels: [usize; 4], j: usize, v: &[C; 4]) -> [C; 4] {
    let mut out = [c(0.0); 4];
    for (i, alpha) in basis.iter().enumerate() {
        if labels[i] != j {
            continue;
        }
        let coeff: C = alpha.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
        for (o, a) in out.iter_mut().zip(alpha) {
            *o += coeff * a;
        }
    }
    out
}

/// The `(bell15, bell26)` residual of `beta (x) aux`.
pub fn bell_residual(beta: [C; 4], aux: &Dense, b15: usize, b26: usize) -> Dense {
    pair([1, 2], beta)
        .product(aux)
        .contract_pair(1, 5, &bell(b15))
        .contract_pair(2, 6, &bell(b26))
}
