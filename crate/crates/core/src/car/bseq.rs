use crate::lit::Cube;
use crate::reasoners::Snapshot;

/// One stored B-cube. Non-root nodes remember the parent they step into
/// and the model that produced them, which is enough to rebuild a path.
#[derive(Clone, Debug)]
pub struct Node {
    pub cube: Cube,
    pub layer: usize,
    pub parent: Option<usize>,
    pub snap: Option<Snapshot>,
}

/// Under-approximating layers `B_0..B_n`, stored as an arena of nodes.
#[derive(Clone, Debug, Default)]
pub struct BSeq {
    nodes: Vec<Node>,
    layers: Vec<Vec<usize>>,
}

impl BSeq {
    pub fn new(root: Cube) -> Self {
        BSeq {
            nodes: vec![Node {
                cube: root,
                layer: 0,
                parent: None,
                snap: None,
            }],
            layers: vec![vec![0]],
        }
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn layer(&self, i: usize) -> &[usize] {
        &self.layers[i]
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        self.layers.iter().map(Vec::len).collect()
    }

    pub fn all(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter()
    }

    /// Adds `cube` to layer `layer`. If the layer already holds a cube
    /// whose literals are a subset (a superset of states), that node is
    /// returned instead and the second component is true.
    pub fn insert(
        &mut self,
        layer: usize,
        cube: Cube,
        parent: usize,
        snap: Snapshot,
    ) -> (usize, bool) {
        while self.layers.len() <= layer {
            self.layers.push(Vec::new());
        }
        if let Some(&id) = self.layers[layer]
            .iter()
            .find(|&&id| self.nodes[id].cube.is_subset_of(&cube))
        {
            return (id, true);
        }
        let id = self.nodes.len();
        self.nodes.push(Node {
            cube,
            layer,
            parent: Some(parent),
            snap: Some(snap),
        });
        self.layers[layer].push(id);
        (id, false)
    }

    /// Node ids from `id` up to, but excluding, the root.
    pub fn chain(&self, mut id: usize) -> Vec<usize> {
        let mut out = Vec::new();
        while let Some(p) = self.nodes[id].parent {
            out.push(id);
            id = p;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lit::Var;

    fn snap() -> Snapshot {
        Snapshot {
            cur: vec![],
            next: vec![],
        }
    }

    #[test]
    fn subsumed_cube_reuses_node() {
        let (a, b) = (Var(0), Var(1));
        let mut bs = BSeq::new(Cube::new([a.pos()]));
        let (n1, dup) = bs.insert(1, Cube::new([b.pos()]), 0, snap());
        assert!(!dup);
        let (n2, dup) = bs.insert(1, Cube::new([a.neg(), b.pos()]), 0, snap());
        assert!(dup);
        assert_eq!(n1, n2);
        let (n3, dup) = bs.insert(1, Cube::new([b.neg()]), 0, snap());
        assert!(!dup && n3 != n1);
        assert_eq!(bs.layer_sizes(), vec![1, 2]);
        let (n4, _) = bs.insert(2, Cube::new([a.neg()]), n3, snap());
        assert_eq!(bs.chain(n4), vec![n4, n3]);
    }
}
