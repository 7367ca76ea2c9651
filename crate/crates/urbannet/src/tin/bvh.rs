//! Axis-aligned bounding-volume tree over triangle bounds, used for both
//! plan-view point lookups and 3D ray traversal.

#[derive(Debug, Clone, Copy)]
pub struct Aabb {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl Aabb {
    pub fn empty() -> Self {
        Self {
            min: [f64::INFINITY; 3],
            max: [f64::NEG_INFINITY; 3],
        }
    }

    pub fn grow_point(&mut self, p: [f64; 3]) {
        for (a, v) in p.iter().enumerate() {
            self.min[a] = self.min[a].min(*v);
            self.max[a] = self.max[a].max(*v);
        }
    }

    pub fn grow(&mut self, other: &Aabb) {
        for a in 0..3 {
            self.min[a] = self.min[a].min(other.min[a]);
            self.max[a] = self.max[a].max(other.max[a]);
        }
    }

    fn centroid(&self, axis: usize) -> f64 {
        0.5 * (self.min[axis] + self.max[axis])
    }

    fn contains_xy(&self, x: f64, y: f64, eps: f64) -> bool {
        x >= self.min[0] - eps
            && x <= self.max[0] + eps
            && y >= self.min[1] - eps
            && y <= self.max[1] + eps
    }

    /// Slab test; returns the entry parameter when the ray intersects the box
    /// within [t_min, t_max].
    fn ray_entry(
        &self,
        origin: [f64; 3],
        inv_dir: [f64; 3],
        t_min: f64,
        t_max: f64,
    ) -> Option<f64> {
        let mut t0 = t_min;
        let mut t1 = t_max;
        for a in 0..3 {
            let lo = (self.min[a] - origin[a]) * inv_dir[a];
            let hi = (self.max[a] - origin[a]) * inv_dir[a];
            let (near, far) = if lo <= hi { (lo, hi) } else { (hi, lo) };
            // NaN from 0 * inf means the ray runs parallel inside the slab.
            if near.is_nan() || far.is_nan() {
                if origin[a] < self.min[a] || origin[a] > self.max[a] {
                    return None;
                }
                continue;
            }
            t0 = t0.max(near);
            t1 = t1.min(far);
            if t0 > t1 {
                return None;
            }
        }
        Some(t0)
    }
}

#[derive(Debug, Clone)]
struct Node {
    bounds: Aabb,
    /// Left child index; right child is `left + 1`. Unused for leaves.
    left: u32,
    /// First primitive slot in `order` for leaves.
    start: u32,
    /// Number of primitives; 0 marks an interior node.
    count: u32,
}

#[derive(Debug, Clone)]
pub struct Bvh {
    nodes: Vec<Node>,
    order: Vec<u32>,
}

const LEAF_SIZE: usize = 4;

impl Bvh {
    pub fn build(bounds: &[Aabb]) -> Self {
        assert!(!bounds.is_empty(), "BVH needs at least one primitive");
        let mut order: Vec<u32> = (0..bounds.len() as u32).collect();
        let mut nodes = Vec::with_capacity(2 * bounds.len());
        nodes.push(Node {
            bounds: Aabb::empty(),
            left: 0,
            start: 0,
            count: 0,
        });
        let mut bvh = Self {
            nodes,
            order: Vec::new(),
        };
        bvh.split(0, &mut order, 0, bounds.len(), bounds);
        bvh.order = order;
        bvh
    }

    fn split(&mut self, node: usize, order: &mut [u32], start: usize, end: usize, bounds: &[Aabb]) {
        let mut bb = Aabb::empty();
        for &p in &order[start..end] {
            bb.grow(&bounds[p as usize]);
        }
        self.nodes[node].bounds = bb;
        let len = end - start;
        if len <= LEAF_SIZE {
            self.nodes[node].start = start as u32;
            self.nodes[node].count = len as u32;
            return;
        }
        // Median split along the widest centroid axis.
        let mut cb = Aabb::empty();
        for &p in &order[start..end] {
            let b = &bounds[p as usize];
            cb.grow_point([b.centroid(0), b.centroid(1), b.centroid(2)]);
        }
        let mut axis = 0;
        let mut widest = cb.max[0] - cb.min[0];
        for a in 1..3 {
            let w = cb.max[a] - cb.min[a];
            if w > widest {
                widest = w;
                axis = a;
            }
        }
        let mid = start + len / 2;
        order[start..end].select_nth_unstable_by(len / 2, |&x, &y| {
            bounds[x as usize]
                .centroid(axis)
                .partial_cmp(&bounds[y as usize].centroid(axis))
                .unwrap()
                .then(x.cmp(&y))
        });
        let left = self.nodes.len();
        self.nodes[node].left = left as u32;
        self.nodes[node].count = 0;
        self.nodes.push(Node {
            bounds: Aabb::empty(),
            left: 0,
            start: 0,
            count: 0,
        });
        self.nodes.push(Node {
            bounds: Aabb::empty(),
            left: 0,
            start: 0,
            count: 0,
        });
        self.split(left, order, start, mid, bounds);
        self.split(left + 1, order, mid, end, bounds);
    }

    /// Visit every primitive whose bounds contain (x, y) in plan view.
    pub fn visit_point_xy(&self, x: f64, y: f64, eps: f64, mut visit: impl FnMut(usize)) {
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            if !node.bounds.contains_xy(x, y, eps) {
                continue;
            }
            if node.count > 0 {
                for i in node.start..node.start + node.count {
                    visit(self.order[i as usize] as usize);
                }
            } else {
                stack.push(node.left as usize);
                stack.push(node.left as usize + 1);
            }
        }
    }

    /// Nearest primitive hit along a ray. `hit` returns the intersection
    /// parameter for a primitive, or None on a miss. Ties on t resolve to the
    /// lowest primitive index.
    pub fn intersect_ray(
        &self,
        origin: [f64; 3],
        dir: [f64; 3],
        t_min: f64,
        hit: impl Fn(usize) -> Option<f64>,
    ) -> Option<(f64, usize)> {
        let inv_dir = [1.0 / dir[0], 1.0 / dir[1], 1.0 / dir[2]];
        let mut best: Option<(f64, usize)> = None;
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            let t_max = best.map_or(f64::INFINITY, |(t, _)| t);
            if node
                .bounds
                .ray_entry(origin, inv_dir, t_min, t_max)
                .is_none()
            {
                continue;
            }
            if node.count > 0 {
                for i in node.start..node.start + node.count {
                    let prim = self.order[i as usize] as usize;
                    if let Some(t) = hit(prim) {
                        if t > t_min {
                            let better = match best {
                                None => true,
                                Some((bt, bp)) => t < bt || (t == bt && prim < bp),
                            };
                            if better {
                                best = Some((t, prim));
                            }
                        }
                    }
                }
            } else {
                // Visit the child the ray enters first for earlier pruning.
                let l = node.left as usize;
                let el = self.nodes[l]
                    .bounds
                    .ray_entry(origin, inv_dir, t_min, t_max);
                let er = self.nodes[l + 1]
                    .bounds
                    .ray_entry(origin, inv_dir, t_min, t_max);
                match (el, er) {
                    (Some(a), Some(b)) if a <= b => {
                        stack.push(l + 1);
                        stack.push(l);
                    }
                    (Some(_), Some(_)) => {
                        stack.push(l);
                        stack.push(l + 1);
                    }
                    (Some(_), None) => stack.push(l),
                    (None, Some(_)) => stack.push(l + 1),
                    (None, None) => {}
                }
            }
        }
        best
    }
}
