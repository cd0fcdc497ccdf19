//! Model reader and evaluator written against the text format only.

pub struct TextModel {
    base: f64,
    lr: f64,
    trees: Vec<Vec<Vec<String>>>,
}

pub fn parse_text(text: &str) -> TextModel {
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("QGBDT v1 K="));
    let field = |l: &str, key: &str| l.strip_prefix(key).unwrap().trim().parse::<f64>().unwrap();
    let base = field(lines.next().unwrap(), "base_score");
    let lr = field(lines.next().unwrap(), "learning_rate");
    assert!(lines.next().unwrap().starts_with("hyper "));
    let n: usize = lines.next().unwrap().strip_prefix("trees ").unwrap().parse().unwrap();
    let mut trees = Vec::new();
    for _ in 0..n {
        let m: usize = lines.next().unwrap().strip_prefix("tree ").unwrap().parse().unwrap();
        trees.push(
            (0..m)
                .map(|_| lines.next().unwrap().split(' ').map(String::from).collect())
                .collect(),
        );
    }
    assert_eq!(lines.next(), Some("end"));
    TextModel { base, lr, trees }
}

impl TextModel {
    fn walk(tree: &[Vec<String>], node: usize, x: &[u32]) -> f64 {
        let n = &tree[node];
        if n[0] == "leaf" {
            return n[1].parse().unwrap();
        }
        let f: usize = n[1].parse().unwrap();
        let thr: u32 = n[2].parse().unwrap();
        let next = if x[f] <= thr { &n[3] } else { &n[4] };
        Self::walk(tree, next.parse().unwrap(), x)
    }

    pub fn predict(&self, x: &[u32]) -> f64 {
        let s = self.base + self.lr * self.trees.iter().map(|t| Self::walk(t, 0, x)).sum::<f64>();
        1.0 / (1.0 + (-s).exp())
    }
}
