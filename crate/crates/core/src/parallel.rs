//! Data-parallel mapping helpers.
//!
//! With the default `parallel` feature the work is scheduled on the rayon
//! thread pool; without it everything runs sequentially. Results are always
//! assembled in input order, so callers observe identical output either
//! way. [`map_exec`] exposes the sequential path at runtime, which is what
//! the benchmark suite uses to compare the two.

/// Execution policy for batch evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    /// Use the rayon pool when the `parallel` feature is enabled.
    Auto,
    /// Force the sequential fallback.
    Sequential,
}

/// Map `f` over `items`, preserving input order.
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    map_exec(items, f, Execution::Auto)
}

/// Map `f` over `items` under an explicit execution policy.
pub fn map_exec<T, U, F>(items: &[T], f: F, exec: Execution) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    match exec {
        Execution::Sequential => seq_map(items, f),
        Execution::Auto => {
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                seq_map(items, f)
            }
        }
    }
}

/// The sequential fallback, always available.
pub fn seq_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auto_and_sequential_agree_in_order() {
        let items: Vec<u64> = (0..1000).collect();
        let f = |x: &u64| x * x + 1;
        assert_eq!(map_exec(&items, f, Execution::Auto), seq_map(&items, f));
    }
}
