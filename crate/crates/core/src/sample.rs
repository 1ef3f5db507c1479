//! Random inputs for property checks and sweeps.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::auxprep::INPUT;
use crate::measurement::{Assignment, ProjectorFamily, TwoPhotonBasis, Vector4};
use crate::statevec::{Amplitude, Ket};

fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R) -> Vector4 {
    let mut v = [Amplitude::new(0.0, 0.0); 4];
    for a in &mut v {
        *a = Amplitude::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    }
    v
}

fn normalized(v: Vector4) -> Vector4 {
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.map(|a| a / norm)
}

/// Unit state on photons 1, 2 with Gaussian components.
pub fn unit_pair<R: Rng + ?Sized>(rng: &mut R) -> Ket {
    Ket::from_pair(INPUT, normalized(gaussian_vector(rng))).expect("input register is valid")
}

/// Orthonormal basis from Gram-Schmidt on Gaussian vectors (Haar-distributed).
pub fn basis<R: Rng + ?Sized>(rng: &mut R) -> TwoPhotonBasis {
    loop {
        let mut states: Vec<Vector4> = Vec::with_capacity(4);
        for _ in 0..4 {
            let mut v = gaussian_vector(rng);
            // modified Gram-Schmidt, applied twice for accuracy
            for _ in 0..2 {
                for u in &states {
                    let overlap: Amplitude = u.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                    for (vi, ui) in v.iter_mut().zip(u) {
                        *vi -= overlap * ui;
                    }
                }
            }
            states.push(normalized(v));
        }
        let states: [Vector4; 4] = states.try_into().expect("four vectors");
        if let Ok(b) = TwoPhotonBasis::new(states) {
            return b;
        }
    }
}

/// Uniformly random assignment onto exactly `subsets` non-empty groups.
pub fn assignment<R: Rng + ?Sized>(rng: &mut R, subsets: usize) -> Assignment {
    assert!((1..=4).contains(&subsets), "subsets must be 1..=4");
    let mut labels: Vec<usize> = (0..subsets).collect();
    while labels.len() < 4 {
        labels.push(rng.gen_range(0..subsets));
    }
    labels.shuffle(rng);
    Assignment::from_labels([labels[0], labels[1], labels[2], labels[3]])
        .expect("every subset is used")
}

/// Random basis with a random assignment onto 2, 3 or 4 subsets.
pub fn family<R: Rng + ?Sized>(rng: &mut R) -> ProjectorFamily {
    let subsets = rng.gen_range(2..=4);
    ProjectorFamily::new(basis(rng), assignment(rng, subsets)).expect("random family is valid")
}
