use std::io::{self, Write};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::rng::{stream_rng, RNG_ALGORITHM};
use super::sampler::{InverseCdfSampler, SpacingSampler};
use crate::ensemble::{Ensemble, EnsembleParams};
use crate::error::{Error, Result};
use crate::format::format_g17;
use crate::potentials::Potential;

/// Where a chain came from; serialized as the JSON sidecar of the CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub seed: u64,
    pub kind: String,
    pub beta: f64,
    pub force: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub rng_algorithm: String,
}

impl Provenance {
    pub fn new(p: &Potential, e: EnsembleParams, n: usize, seed: u64) -> Self {
        Provenance {
            seed,
            kind: p.kind_name().to_string(),
            beta: e.beta,
            force: e.force,
            n,
            rng_algorithm: RNG_ALGORITHM.to_string(),
        }
    }
}

/// One sampled chain `0 = x_0 < x_1 < ... < x_N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainSample {
    /// `u_1..u_N`, stored as the floating-point differences of consecutive
    /// positions so that `x_k - x_{k-1} == u_k` holds bit-exactly.
    pub spacings: Vec<f64>,
    /// `x_0..x_N`.
    pub positions: Vec<f64>,
    pub seed: u64,
    /// RNG stream (replica index) the chain was drawn from.
    pub stream: u64,
    pub provenance: Provenance,
}

impl ChainSample {
    /// Draws `n` spacings from `sampler`.
    pub fn draw<S, R>(
        sampler: &S,
        n: usize,
        rng: &mut R,
        provenance: Provenance,
        stream: u64,
    ) -> Result<Self>
    where
        S: SpacingSampler,
        R: Rng + ?Sized,
    {
        if n == 0 {
            return Err(Error::domain("chain needs at least one spacing"));
        }
        let mut positions = Vec::with_capacity(n + 1);
        positions.push(0.0);
        let mut x = 0.0;
        for _ in 0..n {
            let next = x + sampler.sample(rng);
            if !(next > x) {
                return Err(Error::convergence(format!(
                    "spacing draw lost to rounding at x = {x}"
                )));
            }
            x = next;
            positions.push(x);
        }
        let spacings = positions.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(ChainSample {
            spacings,
            positions,
            seed: provenance.seed,
            stream,
            provenance,
        })
    }

    pub fn len(&self) -> usize {
        self.spacings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spacings.is_empty()
    }

    /// `x_N`.
    pub fn total_length(&self) -> f64 {
        *self.positions.last().expect("x_0 is always present")
    }
}

/// One chain of `n` spacings from stream 0 of `seed`.
pub fn sample_chain(p: &Potential, e: EnsembleParams, n: usize, seed: u64) -> Result<ChainSample> {
    let ens = Ensemble::new(p, e)?;
    let sampler = InverseCdfSampler::new(&ens)?;
    ChainSample::draw(
        &sampler,
        n,
        &mut stream_rng(seed, 0),
        Provenance::new(p, e, n, seed),
        0,
    )
}

/// `replicas` independent chains; replica `r` uses stream `r` of `seed`, so
/// the result does not depend on thread scheduling.
pub fn sample_replicas(
    p: &Potential,
    e: EnsembleParams,
    n: usize,
    replicas: usize,
    seed: u64,
) -> Result<Vec<ChainSample>> {
    let ens = Ensemble::new(p, e)?;
    let sampler = InverseCdfSampler::new(&ens)?;
    let provenance = Provenance::new(p, e, n, seed);
    (0..replicas as u64)
        .into_par_iter()
        .map(|r| ChainSample::draw(&sampler, n, &mut stream_rng(seed, r), provenance.clone(), r))
        .collect()
}

/// CSV with header `k,x_k,u_k`; the `u_0` cell is empty.
pub fn write_chain_csv<W: Write>(mut w: W, chain: &ChainSample) -> io::Result<()> {
    writeln!(w, "k,x_k,u_k")?;
    writeln!(w, "0,{},", format_g17(chain.positions[0]))?;
    for (k, (x, u)) in chain.positions[1..].iter().zip(&chain.spacings).enumerate() {
        writeln!(w, "{},{},{}", k + 1, format_g17(*x), format_g17(*u))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lj() -> Potential {
        Potential::lennard_jones(1.0, 10.0 * 2f64.powf(1.0 / 6.0)).unwrap()
    }

    #[test]
    fn single_spacing_chain() {
        let c = sample_chain(&lj(), EnsembleParams::new(100.0, 0.0).unwrap(), 1, 5).unwrap();
        assert_eq!(c.positions.len(), 2);
        assert_eq!(c.positions[1], c.spacings[0]);
    }

    #[test]
    fn positions_strictly_increase() {
        let c = sample_chain(&lj(), EnsembleParams::new(10.0, 0.0).unwrap(), 2000, 9).unwrap();
        assert!(c.positions.windows(2).all(|w| w[1] > w[0]));
        for k in 1..c.positions.len() {
            assert_eq!(c.positions[k] - c.positions[k - 1], c.spacings[k - 1]);
        }
    }

    #[test]
    fn replicas_are_reproducible() {
        let e = EnsembleParams::new(100.0, 0.0).unwrap();
        let a = sample_replicas(&lj(), e, 50, 4, 77).unwrap();
        let b = sample_replicas(&lj(), e, 50, 4, 77).unwrap();
        assert_eq!(a, b);
        assert_ne!(a[0].spacings, a[1].spacings);
    }

    #[test]
    fn csv_layout() {
        let c = sample_chain(&lj(), EnsembleParams::new(100.0, 0.0).unwrap(), 2, 1).unwrap();
        let mut buf = Vec::new();
        write_chain_csv(&mut buf, &c).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "k,x_k,u_k");
        assert_eq!(lines[1], "0,0,");
        assert_eq!(lines.len(), 4);
        assert!(!text.contains('\r'));
        let fields: Vec<&str> = lines[2].split(',').collect();
        assert_eq!(fields[1].parse::<f64>().unwrap(), c.positions[1]);
    }

    #[test]
    fn sidecar_keys() {
        let c = sample_chain(&lj(), EnsembleParams::new(100.0, 0.0).unwrap(), 3, 1).unwrap();
        let json = serde_json::to_value(&c.provenance).unwrap();
        let mut keys: Vec<&String> = json.as_object().unwrap().keys().collect();
        keys.sort();
        assert_eq!(
            keys,
            ["N", "beta", "force", "kind", "rng_algorithm", "seed"]
        );
    }
}
