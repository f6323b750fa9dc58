//! Finite min-parity games solved by recursive attractor decomposition.

/// Player 0 (Eve) wins a play when the least priority seen infinitely often
/// is even. Every node needs at least one successor.
#[derive(Clone, Debug, Default)]
pub struct ParityGame {
    owner: Vec<u8>,
    priority: Vec<usize>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

impl ParityGame {
    pub fn add_node(&mut self, owner: u8, priority: usize) -> usize {
        self.owner.push(owner);
        self.priority.push(priority);
        self.succ.push(Vec::new());
        self.pred.push(Vec::new());
        self.owner.len() - 1
    }

    pub fn add_edge(&mut self, from: usize, to: usize) {
        self.succ[from].push(to);
        self.pred[to].push(from);
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    /// Winning region of Eve.
    pub fn solve(&self) -> Vec<bool> {
        assert!(self.succ.iter().all(|s| !s.is_empty()), "dead ends must be completed");
        let all = vec![true; self.len()];
        let (w0, _) = self.zielonka(&all);
        w0
    }

    /// Nodes in `sub` from which `player` can force a visit to `target`.
    fn attractor(&self, sub: &[bool], target: &[bool], player: u8) -> Vec<bool> {
        let mut attr = target.to_vec();
        let mut left: Vec<usize> = (0..self.len())
            .map(|v| self.succ[v].iter().filter(|&&w| sub[w]).count())
            .collect();
        let mut queue: Vec<usize> = (0..self.len()).filter(|&v| attr[v]).collect();
        while let Some(w) = queue.pop() {
            for &v in &self.pred[w] {
                if !sub[v] || attr[v] {
                    continue;
                }
                left[v] -= 1;
                if self.owner[v] == player || left[v] == 0 {
                    attr[v] = true;
                    queue.push(v);
                }
            }
        }
        attr
    }

    fn zielonka(&self, sub: &[bool]) -> (Vec<bool>, Vec<bool>) {
        let n = self.len();
        let Some(p) = (0..n).filter(|&v| sub[v]).map(|v| self.priority[v]).min() else {
            return (vec![false; n], vec![false; n]);
        };
        let me = (p % 2) as u8;
        let top: Vec<bool> = (0..n).map(|v| sub[v] && self.priority[v] == p).collect();
        let a = self.attractor(sub, &top, me);
        let rest: Vec<bool> = (0..n).map(|v| sub[v] && !a[v]).collect();
        let (w0, w1) = self.zielonka(&rest);
        let theirs = if me == 0 { &w1 } else { &w0 };
        if !theirs.iter().any(|&x| x) {
            let mine = sub.to_vec();
            let none = vec![false; n];
            return if me == 0 { (mine, none) } else { (none, mine) };
        }
        let b = self.attractor(sub, theirs, 1 - me);
        let rest: Vec<bool> = (0..n).map(|v| sub[v] && !b[v]).collect();
        let (mut w0, mut w1) = self.zielonka(&rest);
        let grow = if me == 0 { &mut w1 } else { &mut w0 };
        for v in 0..n {
            grow[v] |= b[v];
        }
        (w0, w1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_loops() {
        // Eve at 0 chooses between a 1-loop (odd) and a 2-loop (even)
        let mut g = ParityGame::default();
        let v0 = g.add_node(0, 3);
        let odd = g.add_node(1, 1);
        let even = g.add_node(1, 2);
        g.add_edge(v0, odd);
        g.add_edge(v0, even);
        g.add_edge(odd, odd);
        g.add_edge(even, even);
        assert_eq!(g.solve(), vec![true, false, true]);
        // Adam owns the choice instead
        let mut h = g.clone();
        h.owner[0] = 1;
        assert_eq!(h.solve(), vec![false, false, true]);
    }

    #[test]
    fn least_priority_decides() {
        // 0 → 1 → 0 with priorities 1 and 2: min seen infinitely often is 1
        let mut g = ParityGame::default();
        let a = g.add_node(0, 1);
        let b = g.add_node(0, 2);
        g.add_edge(a, b);
        g.add_edge(b, a);
        assert_eq!(g.solve(), vec![false, false]);
    }
}
