use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Probability vector over the nodes of a network.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure<T> {
    weights: Vec<T>,
}

impl<T: Scalar> Measure<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("measure has no support"));
        }
        if let Some(i) = weights.iter().position(|w| !w.is_finite() || *w < T::zero()) {
            return Err(Error::invalid(format!("measure weight {i} is {}", weights[i])));
        }
        let total: T = weights.iter().copied().sum();
        if (total - T::one()).abs() > T::mass_tolerance() {
            return Err(Error::invalid(format!("measure sums to {total}, not 1")));
        }
        Ok(Measure { weights })
    }

    /// Rescales nonnegative weights to sum to one.
    pub fn normalized(weights: Vec<T>) -> Result<Self> {
        let total: T = weights.iter().copied().sum();
        if !(total > T::zero()) || !total.is_finite() {
            return Err(Error::invalid("weights must have a positive finite total"));
        }
        Measure::new(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("measure has no support"));
        }
        Ok(Measure { weights: vec![T::one() / T::lit(n as f64); n] })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn get(&self, i: usize) -> T {
        self.weights[i]
    }
}

/// Node masses proportional to the cardinality of each node's point set.
pub fn node_measure<T: Scalar, S: AsRef<[usize]>>(sets: &[S]) -> Result<Measure<T>> {
    if sets.is_empty() {
        return Err(Error::invalid("no node sets"));
    }
    if let Some(i) = sets.iter().position(|s| s.as_ref().is_empty()) {
        return Err(Error::invalid(format!("node {i} has an empty point set")));
    }
    let total: usize = sets.iter().map(|s| s.as_ref().len()).sum();
    let total = T::lit(total as f64);
    Measure::new(sets.iter().map(|s| T::lit(s.as_ref().len() as f64) / total).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn measure_examples() {
        let m: Measure<f64> = node_measure(&[vec![0, 1, 2, 3, 4], vec![5, 6, 7, 8, 9]]).unwrap();
        assert_eq!(m.weights(), &[0.5, 0.5]);
        let m: Measure<f64> = node_measure(&[vec![0], vec![1, 2, 3]]).unwrap();
        assert_eq!(m.weights(), &[0.25, 0.75]);
        let m: Measure<f64> = node_measure(&[vec![0, 1, 2, 3, 4, 5, 6]]).unwrap();
        assert_eq!(m.weights(), &[1.0]);
    }

    #[test]
    fn measure_errors() {
        assert!(node_measure::<f64, Vec<usize>>(&[]).is_err());
        assert!(node_measure::<f64, Vec<usize>>(&[vec![1], vec![]]).is_err());
        assert!(Measure::new(vec![0.5, 0.6]).is_err());
        assert!(Measure::new(vec![1.5, -0.5]).is_err());
    }

    proptest! {
        #[test]
        fn node_measure_sums_to_one(sizes in proptest::collection::vec(1usize..500, 1..40)) {
            let sets: Vec<Vec<usize>> = sizes.iter().map(|&s| (0..s).collect()).collect();
            let m: Measure<f64> = node_measure(&sets).unwrap();
            let total: f64 = m.weights().iter().sum();
            prop_assert!((total - 1.0).abs() <= 1e-9);
            let f: Measure<f32> = node_measure(&sets).unwrap();
            prop_assert!(f.weights().iter().all(|w| *w > 0.0));
        }
    }
}
