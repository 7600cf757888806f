use super::CayleyTable;

/// Idempotents with the natural order `e ⪯ f ⇔ ef = fe = e` and the
/// similarity `e ∼ f ⇔ e = fe ∧ f = ef`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdempotentPoset {
    /// Sorted element indices.
    pub idempotents: Vec<usize>,
    /// `below[a][b]` iff `idempotents[a] ⪯ idempotents[b]`.
    pub below: Vec<Vec<bool>>,
    /// `similar[a][b]` iff `idempotents[a] ∼ idempotents[b]`.
    pub similar: Vec<Vec<bool>>,
}

pub fn idempotent_poset(table: &CayleyTable) -> IdempotentPoset {
    let idempotents = table.idempotents();
    let k = idempotents.len();
    let mut below = vec![vec![false; k]; k];
    let mut similar = vec![vec![false; k]; k];
    for (a, &e) in idempotents.iter().enumerate() {
        for (b, &f) in idempotents.iter().enumerate() {
            below[a][b] = table.mul(e, f) == e && table.mul(f, e) == e;
            similar[a][b] = table.mul(f, e) == e && table.mul(e, f) == f;
        }
    }
    IdempotentPoset {
        idempotents,
        below,
        similar,
    }
}

impl IdempotentPoset {
    fn position(&self, e: usize) -> Option<usize> {
        self.idempotents.binary_search(&e).ok()
    }

    pub fn is_below(&self, e: usize, f: usize) -> bool {
        match (self.position(e), self.position(f)) {
            (Some(a), Some(b)) => self.below[a][b],
            _ => false,
        }
    }

    /// Minimal elements of `(𝓘(S), ⪯)`, by exhaustive scan.
    pub fn minimal(&self) -> Vec<usize> {
        let k = self.idempotents.len();
        (0..k)
            .filter(|&b| (0..k).all(|a| a == b || !self.below[a][b]))
            .map(|b| self.idempotents[b])
            .collect()
    }

    pub fn is_minimal(&self, f: usize) -> bool {
        match self.position(f) {
            Some(b) => (0..self.idempotents.len()).all(|a| a == b || !self.below[a][b]),
            None => false,
        }
    }

    /// Classes of `∼`, each sorted, ordered by smallest member.
    pub fn similarity_classes(&self) -> Vec<Vec<usize>> {
        let k = self.idempotents.len();
        let mut seen = vec![false; k];
        let mut classes = Vec::new();
        for a in 0..k {
            if seen[a] {
                continue;
            }
            let class: Vec<usize> = (0..k).filter(|&b| self.similar[a][b]).collect();
            for &b in &class {
                seen[b] = true;
            }
            classes.push(class.into_iter().map(|b| self.idempotents[b]).collect());
        }
        classes
    }

    pub fn is_partial_order(&self) -> bool {
        let k = self.idempotents.len();
        let r = &self.below;
        (0..k).all(|a| r[a][a])
            && (0..k).all(|a| (0..k).all(|b| a == b || !(r[a][b] && r[b][a])))
            && (0..k).all(|a| (0..k).all(|b| (0..k).all(|c| !(r[a][b] && r[b][c]) || r[a][c])))
    }

    pub fn is_equivalence(&self) -> bool {
        let k = self.idempotents.len();
        let r = &self.similar;
        (0..k).all(|a| r[a][a])
            && (0..k).all(|a| (0..k).all(|b| r[a][b] == r[b][a]))
            && (0..k).all(|a| (0..k).all(|b| (0..k).all(|c| !(r[a][b] && r[b][c]) || r[a][c])))
    }
}
