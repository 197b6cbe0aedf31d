//! The discrete measure type: sorted weighted atoms on the line.

use rand::Rng;

use super::MeasureError;
use crate::scalar::Real;

/// A finite positive Borel measure given by weighted atoms.
///
/// Positions are strictly increasing (construction merges coincident atoms);
/// weights are strictly positive; the total mass is cached. All estimator
/// entry points treat the value as immutable.
#[derive(Debug, Clone)]
pub struct DiscreteMeasure<F> {
    positions: Vec<F>,
    weights: Vec<F>,
    cum_weights: Vec<F>,
    total_mass: F,
}

impl<F: Real> DiscreteMeasure<F> {
    /// Builds a measure from (position, weight) atoms; sorts by position and
    /// merges coincident positions by summing their weights.
    pub fn from_atoms(mut atoms: Vec<(F, F)>) -> Result<Self, MeasureError> {
        if atoms.is_empty() {
            return Err(MeasureError::EmptyMeasure);
        }
        for (i, &(p, w)) in atoms.iter().enumerate() {
            if !(p.is_finite() && w.is_finite()) {
                return Err(MeasureError::NonfiniteValue { index: i });
            }
            if w <= F::zero() {
                return Err(MeasureError::NonpositiveWeight { index: i });
            }
        }
        atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("positions are finite"));
        let mut positions: Vec<F> = Vec::with_capacity(atoms.len());
        let mut weights: Vec<F> = Vec::with_capacity(atoms.len());
        for (p, w) in atoms {
            if positions.last() == Some(&p) {
                let last = weights.last_mut().expect("nonempty alongside positions");
                *last = *last + w;
            } else {
                positions.push(p);
                weights.push(w);
            }
        }
        Ok(Self::from_sorted_unchecked(positions, weights))
    }

    fn from_sorted_unchecked(positions: Vec<F>, weights: Vec<F>) -> Self {
        let mut cum_weights = Vec::with_capacity(weights.len());
        let mut acc = F::zero();
        for &w in &weights {
            acc = acc + w;
            cum_weights.push(acc);
        }
        Self {
            positions,
            weights,
            total_mass: acc,
            cum_weights,
        }
    }

    /// The standard/biased Cantor measure at a finite construction depth:
    /// 2^depth atoms at the left endpoints of the level-`depth` triadic
    /// intervals, with multiplicative weights (left_weight, 1 - left_weight).
    pub fn cantor(depth: usize, left_weight: F) -> Result<Self, MeasureError> {
        if !(1..=20).contains(&depth) {
            return Err(MeasureError::DepthOutOfRange { depth });
        }
        if left_weight <= F::zero() || left_weight >= F::one() {
            return Err(MeasureError::WeightOutOfRange);
        }
        let right_weight = F::one() - left_weight;
        let third = F::one() / F::from_f64_lossy(3.0);
        let two_thirds = F::from_f64_lossy(2.0) * third;
        let mut positions = vec![F::zero()];
        let mut weights = vec![F::one()];
        for _ in 0..depth {
            let mut np = Vec::with_capacity(positions.len() * 2);
            let mut nw = Vec::with_capacity(weights.len() * 2);
            for (&p, &w) in positions.iter().zip(&weights) {
                np.push(p * third);
                nw.push(w * left_weight);
            }
            for (&p, &w) in positions.iter().zip(&weights) {
                np.push(p * third + two_thirds);
                nw.push(w * right_weight);
            }
            positions = np;
            weights = nw;
        }
        Ok(Self::from_sorted_unchecked(positions, weights))
    }

    /// Uniform discretization of Lebesgue measure on [0,1]: n atoms at
    /// (i + 1/2)/n with weight 1/n each.
    pub fn uniform(n: usize) -> Result<Self, MeasureError> {
        if n == 0 {
            return Err(MeasureError::EmptyMeasure);
        }
        let nf = F::from_f64_lossy(n as f64);
        let w = F::one() / nf;
        let half = F::from_f64_lossy(0.5);
        let positions = (0..n)
            .map(|i| (F::from_f64_lossy(i as f64) + half) / nf)
            .collect();
        Ok(Self::from_sorted_unchecked(positions, vec![w; n]))
    }

    /// A single unit atom.
    pub fn single_atom(position: F) -> Result<Self, MeasureError> {
        Self::from_atoms(vec![(position, F::one())])
    }

    /// Number of atoms.
    #[must_use]
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    /// True when the measure has no atoms (unreachable through constructors).
    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Atom positions, ascending.
    #[must_use]
    pub fn positions(&self) -> &[F] {
        &self.positions
    }

    /// Atom weights, parallel to positions.
    #[must_use]
    pub fn weights(&self) -> &[F] {
        &self.weights
    }

    /// Total mass.
    #[must_use]
    pub fn total_mass(&self) -> F {
        self.total_mass
    }

    /// mu([x - eps, x + eps]): the concentration over the closed interval.
    #[must_use]
    pub fn concentration(&self, x: F, eps: F) -> F {
        let lo = x - eps;
        let hi = x + eps;
        let a = self.positions.partition_point(|&p| p < lo);
        let b = self.positions.partition_point(|&p| p <= hi);
        self.weights[a..b].iter().copied().sum()
    }

    /// Index range [a, b) of atoms inside the closed interval [lo, hi].
    #[must_use]
    pub fn range_indices(&self, lo: F, hi: F) -> (usize, usize) {
        (
            self.positions.partition_point(|&p| p < lo),
            self.positions.partition_point(|&p| p <= hi),
        )
    }

    /// Distance from x to the nearest atom other than one at x itself
    /// (local inter-atom spacing proxy used for scale-window flags).
    #[must_use]
    pub fn local_spacing(&self, x: F) -> F {
        let i = self.positions.partition_point(|&p| p < x);
        let mut best = F::infinity();
        if i < self.len() && self.positions[i] == x {
            if i > 0 {
                best = best.min(x - self.positions[i - 1]);
            }
            if i + 1 < self.len() {
                best = best.min(self.positions[i + 1] - x);
            }
        } else {
            if i > 0 {
                best = best.min(x - self.positions[i - 1]);
            }
            if i < self.len() {
                best = best.min(self.positions[i] - x);
            }
        }
        best
    }

    /// Draws `n` atom indices with probability proportional to weight.
    /// Returns (index, multiplicity) pairs in ascending index order.
    pub fn sample_indices<R: Rng>(&self, rng: &mut R, n: usize) -> Vec<(usize, usize)> {
        let mut counts = std::collections::BTreeMap::new();
        for _ in 0..n {
            let u = F::from_f64_lossy(rng.random::<f64>()) * self.total_mass;
            let idx = self
                .cum_weights
                .partition_point(|&c| c <= u)
                .min(self.len() - 1);
            *counts.entry(idx).or_insert(0usize) += 1;
        }
        counts.into_iter().collect()
    }

    /// Materializes atoms as (position, weight) pairs.
    #[must_use]
    pub fn to_atoms(&self) -> Vec<(F, F)> {
        self.positions
            .iter()
            .copied()
            .zip(self.weights.iter().copied())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constructor_sorts_and_merges() {
        let mu = DiscreteMeasure::from_atoms(vec![(1.0, 0.25), (0.0, 0.5), (1.0, 0.25)]).unwrap();
        assert_eq!(mu.positions(), &[0.0, 1.0]);
        assert_eq!(mu.weights(), &[0.5, 0.5]);
        assert_eq!(mu.total_mass(), 1.0);
    }

    #[test]
    fn constructor_rejects_bad_atoms() {
        assert!(matches!(
            DiscreteMeasure::<f64>::from_atoms(vec![]),
            Err(MeasureError::EmptyMeasure)
        ));
        assert!(matches!(
            DiscreteMeasure::from_atoms(vec![(0.0, 0.0)]),
            Err(MeasureError::NonpositiveWeight { index: 0 })
        ));
        assert!(matches!(
            DiscreteMeasure::from_atoms(vec![(f64::NAN, 1.0)]),
            Err(MeasureError::NonfiniteValue { index: 0 })
        ));
    }

    #[test]
    fn cantor_level_one_and_twelve() {
        let mu = DiscreteMeasure::cantor(1, 0.5f64).unwrap();
        assert_eq!(mu.positions(), &[0.0, 2.0 / 3.0]);
        assert_eq!(mu.weights(), &[0.5, 0.5]);

        let mu = DiscreteMeasure::cantor(12, 0.5f64).unwrap();
        assert_eq!(mu.len(), 4096);
        assert!((mu.total_mass() - 1.0).abs() < 1e-12);
        assert!(matches!(
            DiscreteMeasure::<f64>::cantor(0, 0.5),
            Err(MeasureError::DepthOutOfRange { .. })
        ));
        assert!(matches!(
            DiscreteMeasure::<f64>::cantor(21, 0.5),
            Err(MeasureError::DepthOutOfRange { .. })
        ));
    }

    #[test]
    fn uniform_interval_masses() {
        let mu = DiscreteMeasure::<f64>::uniform(1000).unwrap();
        // spec example: x=0.5, eps=0.1 -> about 0.2 within 2/1000
        let m = mu.concentration(0.5, 0.1);
        assert!((m - 0.2).abs() <= 2.0 / 1000.0);
    }

    #[test]
    fn concentration_of_atom_at_center_and_far_away() {
        let mu = DiscreteMeasure::single_atom(0.0f64).unwrap();
        assert_eq!(mu.concentration(0.0, 1e-9), 1.0);
        assert_eq!(mu.concentration(5.0, 1.0), 0.0);
    }

    #[test]
    fn concentration_is_monotone_in_eps_and_saturates() {
        let mu = DiscreteMeasure::cantor(8, 0.3f64).unwrap();
        let x = mu.positions()[17];
        let mut last = 0.0;
        for k in (0..30).rev() {
            let eps = 0.75f64.powi(k);
            let m = mu.concentration(x, eps);
            assert!(m >= last);
            last = m;
        }
        assert!((mu.concentration(0.5, 10.0) - mu.total_mass()).abs() < 1e-15);
    }

    #[test]
    fn sampling_is_deterministic_and_weight_proportional() {
        let mu = DiscreteMeasure::from_atoms(vec![(0.0, 0.999), (1.0, 0.001)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s1 = mu.sample_indices(&mut rng, 1000);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s2 = mu.sample_indices(&mut rng, 1000);
        assert_eq!(s1, s2);
        let n0: usize = s1
            .iter()
            .filter_map(|&(i, c)| (i == 0).then_some(c))
            .sum();
        assert!(n0 >= 990, "heavy atom drew only {n0} of 1000");
    }

    #[test]
    fn local_spacing_at_and_between_atoms() {
        let mu = DiscreteMeasure::from_atoms(vec![(0.0, 1.0), (1.0, 1.0), (3.0, 1.0)]).unwrap();
        assert_eq!(mu.local_spacing(1.0), 1.0);
        assert_eq!(mu.local_spacing(2.5), 0.5);
        assert_eq!(mu.local_spacing(-4.0), 4.0);
    }
}
