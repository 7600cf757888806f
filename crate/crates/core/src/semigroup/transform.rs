use rand::Rng;

use super::CayleyTable;

/// The full transformation monoid `T_n` of all maps `{0..n} → {0..n}` under
/// composition `(s·t)(x) = s(t(x))`.
///
/// Map `f` has index `Σ f(i)·n^(n−1−i)`, i.e. the images read as a base-`n`
/// numeral with `f(0)` most significant.
#[derive(Clone, Debug)]
pub struct TransformationMonoid {
    n: usize,
    maps: Vec<Vec<usize>>,
}

impl TransformationMonoid {
    pub fn new(n: usize) -> Self {
        assert!((1..=5).contains(&n), "T_n is only built for 1 ≤ n ≤ 5");
        let size = n.pow(n as u32);
        let maps = (0..size)
            .map(|mut k| {
                let mut f = vec![0; n];
                for i in (0..n).rev() {
                    f[i] = k % n;
                    k /= n;
                }
                f
            })
            .collect();
        Self { n, maps }
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.maps.len()
    }

    pub fn map(&self, k: usize) -> &[usize] {
        &self.maps[k]
    }

    pub fn index_of(&self, f: &[usize]) -> usize {
        f.iter().fold(0, |acc, &x| acc * self.n + x)
    }

    pub fn rank(&self, k: usize) -> usize {
        let mut image = self.maps[k].clone();
        image.sort_unstable();
        image.dedup();
        image.len()
    }

    pub fn table(&self) -> CayleyTable {
        let size = self.size();
        let mut table = Vec::with_capacity(size * size);
        for s in &self.maps {
            for t in &self.maps {
                let st: Vec<usize> = t.iter().map(|&x| s[x]).collect();
                table.push(self.index_of(&st));
            }
        }
        // composition of functions is associative
        CayleyTable::from_flat_unchecked(size, table)
    }
}

pub fn full_transformation_table(n: usize) -> CayleyTable {
    TransformationMonoid::new(n).table()
}

/// Subsemigroup of `table` generated by 1–3 uniformly random elements.
pub fn random_subsemigroup(table: &CayleyTable, rng: &mut impl Rng) -> (CayleyTable, Vec<usize>) {
    let count = rng.random_range(1..=3);
    let gens: Vec<usize> = (0..count).map(|_| rng.random_range(0..table.order())).collect();
    table.subsemigroup(&gens)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_round_trips() {
        let t = TransformationMonoid::new(3);
        for k in 0..t.size() {
            assert_eq!(t.index_of(t.map(k)), k);
        }
        assert_eq!(t.index_of(&[0, 1, 2]), 5);
    }

    #[test]
    fn composition_applies_right_factor_first() {
        let t = TransformationMonoid::new(3);
        let table = t.table();
        let s = t.index_of(&[1, 2, 0]);
        let c = t.index_of(&[0, 0, 0]);
        // s ∘ const_0 = const_1 ; const_0 ∘ s = const_0
        assert_eq!(table.mul(s, c), t.index_of(&[1, 1, 1]));
        assert_eq!(table.mul(c, s), c);
    }

    #[test]
    fn t4_is_associative_with_41_idempotents() {
        let table = full_transformation_table(4);
        assert!(CayleyTable::is_associative_flat(
            table.order(),
            &(0..table.order())
                .flat_map(|s| (0..table.order()).map(move |t| (s, t)))
                .map(|(s, t)| table.mul(s, t))
                .collect::<Vec<_>>()
        ));
        // Σ_k C(4,k) k^(4−k) = 4 + 24 + 12 + 1
        assert_eq!(table.idempotents().len(), 41);
    }
}
