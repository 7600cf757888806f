use super::CayleyTable;
use crate::error::{Error, Result};

/// Every associative table of order `n` (labelled, not up to isomorphism),
/// in lexicographic order of the flattened table.
pub struct SemigroupEnumerator {
    order: usize,
    current: Option<Vec<usize>>,
}

pub fn enumerate_semigroups(order: usize) -> Result<SemigroupEnumerator> {
    match order {
        1..=3 => Ok(SemigroupEnumerator {
            order,
            current: Some(vec![0; order * order]),
        }),
        0 => Err(Error::domain("order must be at least 1")),
        _ => Err(Error::Unsupported(format!(
            "exhaustive enumeration of order {order} ({order}^{} candidates) is not supported; use order ≤ 3",
            order * order
        ))),
    }
}

impl SemigroupEnumerator {
    fn advance(&mut self) {
        let n = self.order;
        let Some(cur) = self.current.as_mut() else { return };
        for digit in cur.iter_mut().rev() {
            *digit += 1;
            if *digit < n {
                return;
            }
            *digit = 0;
        }
        self.current = None;
    }
}

impl Iterator for SemigroupEnumerator {
    type Item = CayleyTable;

    fn next(&mut self) -> Option<CayleyTable> {
        loop {
            let candidate = self.current.clone()?;
            self.advance();
            if CayleyTable::is_associative_flat(self.order, &candidate) {
                return Some(CayleyTable::from_flat_unchecked(self.order, candidate));
            }
        }
    }
}
