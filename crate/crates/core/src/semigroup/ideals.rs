use super::CayleyTable;
use crate::error::{Error, Result};

/// The principal left ideal `Sx`, sorted.
pub fn left_ideal(table: &CayleyTable, x: usize) -> Vec<usize> {
    let mut ideal: Vec<usize> = (0..table.order()).map(|s| table.mul(s, x)).collect();
    ideal.sort_unstable();
    ideal.dedup();
    ideal
}

/// `Jx = {j·x : j ∈ J}`, sorted. A left ideal whenever `J` is one.
fn right_translate(table: &CayleyTable, ideal: &[usize], x: usize) -> Vec<usize> {
    let mut out: Vec<usize> = ideal.iter().map(|&j| table.mul(j, x)).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// All distinct minimal left ideals. Each returned `J` satisfies `J = Sx`
/// for every `x ∈ J`.
pub fn minimal_left_ideals(table: &CayleyTable) -> Vec<Vec<usize>> {
    let principal: Vec<Vec<usize>> = (0..table.order()).map(|x| left_ideal(table, x)).collect();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for ideal in &principal {
        let minimal = ideal.iter().all(|&y| principal[y] == *ideal);
        if minimal && !out.contains(ideal) {
            out.push(ideal.clone());
        }
    }
    out.sort();
    out
}

/// A minimal left ideal inside `Se`.
///
/// Starts from `J = Se` and repeatedly replaces `J` by the smallest `Jx`
/// (`x ∈ J`, ties to the lowest `x`) until `Jx = J` for every `x ∈ J`. At
/// that point any left ideal `L ⊆ J` would contain `Jx = J`, so `J` is
/// minimal.
pub fn minimal_left_ideal_below(table: &CayleyTable, e: usize) -> Vec<usize> {
    let mut ideal = left_ideal(table, e);
    loop {
        let best = ideal
            .iter()
            .map(|&x| right_translate(table, &ideal, x))
            .min_by_key(Vec::len)
            .expect("left ideals are nonempty");
        if best.len() < ideal.len() {
            ideal = best;
        } else {
            return ideal;
        }
    }
}

/// A minimal idempotent `f ⪯ e`.
///
/// Takes a minimal left ideal `J ⊆ Se`, an idempotent `f₀ ∈ J` from the
/// power cycle of its first element, and returns `e·f₀`.
pub fn minimal_idempotent_below(table: &CayleyTable, e: usize) -> Result<usize> {
    if e >= table.order() {
        return Err(Error::domain(format!("element {e} is not in a semigroup of order {}", table.order())));
    }
    if !table.is_idempotent(e) {
        return Err(Error::domain(format!(
            "element {e} is not idempotent ({e}·{e} = {})",
            table.mul(e, e)
        )));
    }
    let ideal = minimal_left_ideal_below(table, e);
    let f0 = table.idempotent_power(ideal[0]);
    Ok(table.mul(e, f0))
}

#[cfg(test)]
mod tests {
    use super::super::{cyclic_group, idempotent_poset, left_zero, TransformationMonoid};
    use super::*;

    #[test]
    fn group_is_its_own_minimal_ideal() {
        let z4 = cyclic_group(4);
        assert_eq!(minimal_left_ideals(&z4), vec![vec![0, 1, 2, 3]]);
        assert_eq!(minimal_idempotent_below(&z4, 0).unwrap(), 0);
    }

    #[test]
    fn left_zero_has_one_minimal_ideal() {
        // oracle: Sx = {y·x : y} = {y} over all y = S
        let lz = left_zero(3);
        for x in 0..3 {
            assert_eq!(left_ideal(&lz, x), vec![0, 1, 2]);
        }
        assert_eq!(minimal_left_ideals(&lz), vec![vec![0, 1, 2]]);
        for e in 0..3 {
            assert_eq!(minimal_idempotent_below(&lz, e).unwrap(), e);
        }
    }

    /// Brute force: every subset closed under left multiplication, keep
    /// the inclusion-minimal nonempty ones.
    fn brute_minimal_left_ideals(table: &CayleyTable) -> Vec<Vec<usize>> {
        let n = table.order();
        assert!(n <= 16);
        let ideals: Vec<u32> = (1u32..(1 << n))
            .filter(|&mask| {
                (0..n).filter(|&x| mask >> x & 1 == 1).all(|x| (0..n).all(|s| mask >> table.mul(s, x) & 1 == 1))
            })
            .collect();
        let mut minimal: Vec<Vec<usize>> = ideals
            .iter()
            .filter(|&&m| !ideals.iter().any(|&o| o != m && o & m == o))
            .map(|&m| (0..n).filter(|&x| m >> x & 1 == 1).collect())
            .collect();
        minimal.sort();
        minimal
    }

    #[test]
    fn t3_minimal_ideal_is_the_constants() {
        let t = TransformationMonoid::new(3);
        let table = t.table();
        let constants: Vec<usize> = (0..3).map(|c| t.index_of(&[c, c, c])).collect();
        assert_eq!(minimal_left_ideals(&table), vec![constants.clone()]);

        // cross-check the brute-force oracle on the 3-constant subsemigroup plus identity
        let id = t.index_of(&[0, 1, 2]);
        let mut gens = constants.clone();
        gens.push(id);
        let (sub, labels) = table.subsemigroup(&gens);
        let brute = brute_minimal_left_ideals(&sub);
        let relabelled: Vec<Vec<usize>> = brute.iter().map(|j| j.iter().map(|&k| labels[k]).collect()).collect();
        assert_eq!(relabelled, vec![constants.clone()]);

        let f = minimal_idempotent_below(&table, id).unwrap();
        assert!(constants.contains(&f));
        assert_eq!(t.rank(f), 1);
    }

    #[test]
    fn constants_are_exactly_the_minimal_idempotents_of_t3() {
        let t = TransformationMonoid::new(3);
        let table = t.table();
        let poset = idempotent_poset(&table);
        let minimal = poset.minimal();
        assert_eq!(minimal.len(), 3);
        assert!(minimal.iter().all(|&f| t.rank(f) == 1));
        for &e in &poset.idempotents {
            let f = minimal_idempotent_below(&table, e).unwrap();
            assert!(poset.is_below(f, e));
            assert!(poset.is_minimal(f));
        }
    }

    #[test]
    fn non_idempotent_is_rejected() {
        let z3 = cyclic_group(3);
        let err = minimal_idempotent_below(&z3, 1).unwrap_err();
        assert!(err.to_string().contains("not idempotent"));
    }
}
