//! Exhaustive property checks over one table. Each returns the number of
//! instances examined and the first failure, if any.

use serde::Serialize;

use super::{idempotent_poset, minimal_idempotent_below, minimal_left_ideals, CayleyTable};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub checked: usize,
    pub failure: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }

    fn ok(checked: usize) -> Self {
        Self { checked, failure: None }
    }

    fn fail(checked: usize, msg: String) -> Self {
        Self {
            checked,
            failure: Some(msg),
        }
    }
}

/// At least one idempotent exists.
pub fn check_idempotent_exists(table: &CayleyTable) -> CheckOutcome {
    if table.idempotents().is_empty() {
        CheckOutcome::fail(1, "no idempotent".into())
    } else {
        CheckOutcome::ok(1)
    }
}

/// For every idempotent `e`, `minimal_idempotent_below(e)` is an idempotent
/// `f ⪯ e` that is minimal according to an exhaustive scan of the poset.
pub fn check_minimal_below(table: &CayleyTable) -> CheckOutcome {
    let poset = idempotent_poset(table);
    for (k, &e) in poset.idempotents.iter().enumerate() {
        let f = match minimal_idempotent_below(table, e) {
            Ok(f) => f,
            Err(err) => return CheckOutcome::fail(k, format!("e = {e}: {err}")),
        };
        if !table.is_idempotent(f) {
            return CheckOutcome::fail(k, format!("e = {e}: returned {f} is not idempotent"));
        }
        if !poset.is_below(f, e) {
            return CheckOutcome::fail(k, format!("e = {e}: returned {f} is not ⪯ e"));
        }
        if !poset.is_minimal(f) {
            return CheckOutcome::fail(k, format!("e = {e}: returned {f} is not minimal"));
        }
    }
    CheckOutcome::ok(poset.idempotents.len())
}

/// For idempotents with `fe = e`: `ef` is idempotent with `ef ⪯ f`, and when
/// `f` is minimal, `e ∼ f`.
pub fn check_similarity_below_minimal(table: &CayleyTable) -> CheckOutcome {
    let poset = idempotent_poset(table);
    let mut checked = 0;
    for &e in &poset.idempotents {
        for &f in &poset.idempotents {
            if table.mul(f, e) != e {
                continue;
            }
            checked += 1;
            let ef = table.mul(e, f);
            if !table.is_idempotent(ef) || !poset.is_below(ef, f) {
                return CheckOutcome::fail(checked, format!("(e, f) = ({e}, {f}): ef = {ef} is not an idempotent below f"));
            }
            if poset.is_minimal(f) && !(table.mul(f, e) == e && table.mul(e, f) == f) {
                return CheckOutcome::fail(checked, format!("(e, f) = ({e}, {f}): f minimal but e ≁ f"));
            }
        }
    }
    CheckOutcome::ok(checked)
}

/// Inside every minimal left ideal, idempotents multiply as a left-zero
/// semigroup: `gh = g`.
pub fn check_left_zero_in_minimal_ideals(table: &CayleyTable) -> CheckOutcome {
    let mut checked = 0;
    for ideal in minimal_left_ideals(table) {
        let idem: Vec<usize> = ideal.iter().copied().filter(|&g| table.is_idempotent(g)).collect();
        for &g in &idem {
            for &h in &idem {
                checked += 1;
                if table.mul(g, h) != g {
                    return CheckOutcome::fail(checked, format!("g = {g}, h = {h}: gh = {} ≠ g", table.mul(g, h)));
                }
            }
        }
    }
    CheckOutcome::ok(checked)
}

#[cfg(test)]
mod tests {
    use super::super::{cyclic_group, full_transformation_table, left_zero};
    use super::*;

    #[test]
    fn all_checks_pass_on_fixtures() {
        for table in [cyclic_group(4), left_zero(3), full_transformation_table(3)] {
            assert!(check_idempotent_exists(&table).passed());
            assert!(check_minimal_below(&table).passed());
            assert!(check_similarity_below_minimal(&table).passed());
            assert!(check_left_zero_in_minimal_ideals(&table).passed());
        }
    }

    #[test]
    fn similarity_check_counts_qualifying_pairs_in_a_group() {
        // only (identity, identity)
        assert_eq!(check_similarity_below_minimal(&cyclic_group(5)).checked, 1);
    }
}
