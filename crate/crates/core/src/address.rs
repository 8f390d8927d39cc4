//! Row and column addresses: short sorted lists of string positions, at most
//! one of them marked.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MarkedIndex {
    pub pos: u32,
    pub marked: bool,
}

impl MarkedIndex {
    pub fn plain(pos: u32) -> Self {
        MarkedIndex { pos, marked: false }
    }

    pub fn hat(pos: u32) -> Self {
        MarkedIndex { pos, marked: true }
    }
}

pub type Span = (u32, u32);

/// Sorted positions; a marked index sorts after an unmarked one at the same
/// position. The empty address is allowed and sorts after every other one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Address(Vec<MarkedIndex>);

impl Address {
    pub fn new(mut items: Vec<MarkedIndex>) -> Result<Self> {
        if items.iter().filter(|m| m.marked).count() > 1 {
            return Err(Error::Address("more than one marked index".into()));
        }
        items.sort();
        Ok(Address(items))
    }

    pub fn unmarked(positions: &[u32]) -> Self {
        Address::new(positions.iter().map(|&p| MarkedIndex::plain(p)).collect()).unwrap()
    }

    pub fn empty() -> Self {
        Address(Vec::new())
    }

    pub fn items(&self) -> &[MarkedIndex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_marked(&self) -> bool {
        self.0.iter().any(|m| m.marked)
    }

    pub fn mark(&self) -> Option<u32> {
        self.0.iter().find(|m| m.marked).map(|m| m.pos)
    }

    /// Every position, marks dropped.
    pub fn positions(&self) -> Vec<u32> {
        self.0.iter().map(|m| m.pos).collect()
    }

    pub fn min(&self) -> Option<u32> {
        self.0.first().map(|m| m.pos)
    }

    pub fn contains(&self, x: MarkedIndex) -> bool {
        self.0.contains(&x)
    }

    pub fn insert(&self, x: MarkedIndex) -> Result<Address> {
        let mut v = self.0.clone();
        v.push(x);
        Address::new(v)
    }

    pub fn remove(&self, x: MarkedIndex) -> Result<Address> {
        let i = self
            .0
            .iter()
            .position(|&m| m == x)
            .ok_or_else(|| Error::Address(format!("{} not in {self}", fmt_index(x))))?;
        let mut v = self.0.clone();
        v.remove(i);
        Ok(Address(v))
    }

    /// The same address with the mark dropped.
    pub fn unmark(&self) -> Address {
        Address::new(self.0.iter().map(|m| MarkedIndex::plain(m.pos)).collect()).unwrap()
    }
}

fn fmt_index(m: MarkedIndex) -> String {
    if m.marked {
        format!("{}^", m.pos)
    } else {
        m.pos.to_string()
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|&m| fmt_index(m)).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Ord for Address {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_empty(), other.is_empty()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Greater,
            (false, true) => return Ordering::Less,
            _ => {}
        }
        self.positions()
            .cmp(&other.positions())
            .then_with(|| match (self.mark(), other.mark()) {
                (None, None) => Ordering::Equal,
                (None, Some(_)) => Ordering::Less,
                (Some(_), None) => Ordering::Greater,
                (Some(a), Some(b)) => a.cmp(&b),
            })
    }
}

impl PartialOrd for Address {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn compare(a: &Address, b: &Address) -> Ordering {
    a.cmp(b)
}

/// The span list m(i, j): defined when both addresses are unmarked, their
/// combined length is even and nonzero, and min j > min i.
pub fn merge_m(i: &Address, j: &Address) -> Option<Vec<Span>> {
    let ends = merged_endpoints(i, j)?;
    Some(ends.chunks(2).map(|c| (c[0], c[1])).collect())
}

/// Sorted endpoints of m(i, j), or `None` where m is undefined.
pub fn merged_endpoints(i: &Address, j: &Address) -> Option<Vec<u32>> {
    if i.is_marked() || j.is_marked() || (i.len() + j.len()) % 2 == 1 {
        return None;
    }
    let mi = i.min()?;
    if let Some(mj) = j.min() {
        if mj <= mi {
            return None;
        }
    }
    let mut e = i.positions();
    e.extend(j.positions());
    e.sort_unstable();
    Some(e)
}

pub struct AddressSpace {
    n: u32,
    d: usize,
    addrs: Vec<Address>,
    index: HashMap<Address, usize>,
    groups: OnceLock<Vec<Vec<(usize, usize)>>>,
}

impl fmt::Debug for AddressSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AddressSpace(n={}, d={}, size={})", self.n, self.d, self.len())
    }
}

fn multisets(n: u32, len: usize, from: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if cur.len() == len {
        out.push(cur.clone());
        return;
    }
    for p in from..=n {
        cur.push(p);
        multisets(n, len, p, cur, out);
        cur.pop();
    }
}

impl AddressSpace {
    /// All addresses of length at most `d` over positions 0..=n, sorted.
    pub fn new(n: usize, d: usize) -> Self {
        let n = n as u32;
        let mut addrs = vec![Address::empty()];
        for len in 1..=d {
            let mut ms = Vec::new();
            multisets(n, len, 0, &mut Vec::new(), &mut ms);
            for m in ms {
                addrs.push(Address::unmarked(&m));
                let mut distinct = m.clone();
                distinct.dedup();
                for x in distinct {
                    let mut items: Vec<MarkedIndex> = m.iter().map(|&p| MarkedIndex::plain(p)).collect();
                    let k = items.iter().rposition(|it| it.pos == x).unwrap();
                    items[k].marked = true;
                    addrs.push(Address::new(items).unwrap());
                }
            }
        }
        addrs.sort();
        let index = addrs.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        AddressSpace {
            n,
            d,
            addrs,
            index,
            groups: OnceLock::new(),
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.addrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.addrs.is_empty()
    }

    pub fn addr(&self, id: usize) -> &Address {
        &self.addrs[id]
    }

    pub fn addrs(&self) -> &[Address] {
        &self.addrs
    }

    pub fn id(&self, a: &Address) -> Option<usize> {
        self.index.get(a).copied()
    }

    /// Groups of unmarked cells sharing the same defined m(i, j).
    pub fn equivalence_groups(&self) -> &[Vec<(usize, usize)>] {
        self.groups.get_or_init(|| {
            let unmarked: Vec<usize> = (0..self.len()).filter(|&i| !self.addrs[i].is_marked()).collect();
            let mut map: HashMap<Vec<u32>, Vec<(usize, usize)>> = HashMap::new();
            for &i in &unmarked {
                for &j in &unmarked {
                    if let Some(e) = merged_endpoints(&self.addrs[i], &self.addrs[j]) {
                        map.entry(e).or_default().push((i, j));
                    }
                }
            }
            let mut groups: Vec<Vec<(usize, usize)>> =
                map.into_values().filter(|g| g.len() > 1).collect();
            groups.sort();
            groups
        })
    }

    /// Every unmarked cell with the same m as (i, j), including (i, j).
    pub fn equivalent_cells(&self, i: &Address, j: &Address) -> Vec<(Address, Address)> {
        let Some(target) = merged_endpoints(i, j) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for a in self.addrs.iter().filter(|a| !a.is_marked()) {
            for b in self.addrs.iter().filter(|b| !b.is_marked()) {
                if merged_endpoints(a, b).as_ref() == Some(&target) {
                    out.push((a.clone(), b.clone()));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order() {
        let a = Address::unmarked(&[1]);
        let b = Address::unmarked(&[2, 7]);
        assert_eq!(compare(&a, &b), Ordering::Less);
        let c = Address::unmarked(&[2]);
        assert_eq!(compare(&c, &b), Ordering::Less);
        let hat = Address::new(vec![MarkedIndex::plain(2), MarkedIndex::hat(7)]).unwrap();
        assert_eq!(compare(&b, &hat), Ordering::Less);
        assert_eq!(compare(&Address::empty(), &b), Ordering::Greater);
    }

    #[test]
    fn m_is_paired() {
        let i = Address::unmarked(&[1, 8]);
        let j = Address::unmarked(&[2, 7]);
        assert_eq!(merge_m(&i, &j), Some(vec![(1, 2), (7, 8)]));
        assert_eq!(merge_m(&j, &i), None);
        let hat = Address::new(vec![MarkedIndex::plain(2), MarkedIndex::hat(7)]).unwrap();
        assert_eq!(merge_m(&i, &hat), None);
        assert_eq!(merge_m(&Address::unmarked(&[1]), &j), None);
        assert_eq!(
            merge_m(&Address::unmarked(&[0, 3]), &Address::empty()),
            Some(vec![(0, 3)])
        );
    }

    #[test]
    fn insert_remove() {
        let v = Address::unmarked(&[1, 8]);
        let w = v.insert(MarkedIndex::hat(4)).unwrap();
        assert_eq!(w.to_string(), "(1,4^,8)");
        assert_eq!(w.remove(MarkedIndex::hat(4)).unwrap(), v);
        assert!(v.remove(MarkedIndex::plain(3)).is_err());
        assert!(w.insert(MarkedIndex::hat(2)).is_err());
    }

    #[test]
    fn space_is_sorted_and_indexed() {
        let s = AddressSpace::new(3, 2);
        assert!(s.addrs().windows(2).all(|w| w[0] < w[1]));
        for (k, a) in s.addrs().iter().enumerate() {
            assert_eq!(s.id(a), Some(k));
            assert!(a.len() <= 2);
        }
        // 4 singletons with 4 marks, 10 pairs with 4 + 6*2 marks, plus the empty address.
        assert_eq!(s.len(), 1 + 8 + 10 + 16);
    }

    #[test]
    fn equivalents_share_m() {
        let s = AddressSpace::new(9, 3);
        let i = Address::unmarked(&[1, 8]);
        let j = Address::unmarked(&[2, 7]);
        let cells = s.equivalent_cells(&i, &j);
        assert!(cells.contains(&(Address::unmarked(&[1]), Address::unmarked(&[2, 7, 8]))));
        assert!(cells.contains(&(Address::unmarked(&[1, 2]), Address::unmarked(&[7, 8]))));
        assert!(!cells.contains(&(Address::unmarked(&[2, 7]), Address::unmarked(&[1, 8]))));
        for (a, b) in &cells {
            assert_eq!(merge_m(a, b), Some(vec![(1, 2), (7, 8)]));
        }
    }
}
