//! Data-parallel map over grids.
//!
//! With the default `parallel` feature the maps fan out through rayon;
//! without it they run sequentially with identical results (element order and
//! per-element arithmetic are unchanged, so outputs are byte-identical).

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, in parallel when the `parallel` feature is enabled.
pub fn map_grid<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Always-sequential map, kept callable so benchmarks can compare both paths.
pub fn map_grid_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree_bitwise() {
        let xs: Vec<f64> = (0..1000).map(|i| 0.01 * i as f64).collect();
        let f = |x: &f64| (x.sin() * x.exp()).to_bits();
        assert_eq!(map_grid(&xs, f), map_grid_seq(&xs, f));
    }
}
