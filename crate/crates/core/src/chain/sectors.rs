use std::collections::BTreeMap;

/// Partition of the product basis by total conserved charge.
#[derive(Debug, Clone)]
pub struct Sectors {
    keys: Vec<Vec<i32>>,
    members: Vec<Vec<usize>>,
    sector_of: Vec<u32>,
    position: Vec<u32>,
}

impl Sectors {
    pub fn trivial(dim: usize) -> Self {
        Sectors {
            keys: vec![Vec::new()],
            members: vec![(0..dim).collect()],
            sector_of: vec![0; dim],
            position: (0..dim as u32).collect(),
        }
    }

    /// Groups basis words of `n` sites by `Σ_sites charges[digit]`.
    pub fn from_charges(d: usize, n: usize, charges: &[Vec<i32>]) -> Self {
        let dim = d.pow(n as u32);
        let width = charges.first().map_or(0, |c| c.len());
        let mut groups: BTreeMap<Vec<i32>, Vec<usize>> = BTreeMap::new();
        let mut total = vec![0i32; width];
        for w in 0..dim {
            total.iter_mut().for_each(|t| *t = 0);
            let mut rest = w;
            for _ in 0..n {
                let digit = rest % d;
                rest /= d;
                for (t, q) in total.iter_mut().zip(&charges[digit]) {
                    *t += q;
                }
            }
            groups.entry(total.clone()).or_default().push(w);
        }
        let mut sector_of = vec![0u32; dim];
        let mut position = vec![0u32; dim];
        let mut keys = Vec::with_capacity(groups.len());
        let mut members = Vec::with_capacity(groups.len());
        for (s, (key, list)) in groups.into_iter().enumerate() {
            for (i, &w) in list.iter().enumerate() {
                sector_of[w] = s as u32;
                position[w] = i as u32;
            }
            keys.push(key);
            members.push(list);
        }
        Sectors { keys, members, sector_of, position }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn key(&self, sector: usize) -> &[i32] {
        &self.keys[sector]
    }

    pub fn members(&self, sector: usize) -> &[usize] {
        &self.members[sector]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }

    pub fn sector_of(&self, w: usize) -> usize {
        self.sector_of[w] as usize
    }

    pub fn position(&self, w: usize) -> usize {
        self.position[w] as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_sizes() {
        let s = Sectors::from_charges(2, 3, &[vec![0], vec![1]]);
        assert_eq!(s.sizes(), vec![1, 3, 3, 1]);
    }

    #[test]
    fn two_types_two_sites() {
        let s = Sectors::from_charges(3, 2, &[vec![0, 0], vec![1, 0], vec![0, 1]]);
        assert_eq!(s.len(), 6);
        assert_eq!(s.sizes().iter().sum::<usize>(), 9);
    }
}
