//! Instance generator with analytically known optima.
//!
//! A connected graph of maximum degree 3 (other than the complete graph on
//! four vertices) is translated into a path instance whose optimal profit
//! equals a closed-form base plus the size of a maximum independent set of
//! the graph. Solving the instance therefore solves independent set, and
//! conversely, known independent set sizes certify solver output. The
//! translation keeps all demands in `{1, 2, 3}`; an optional second step
//! raises every capacity to the maximum by adding mandatory unit dummy
//! tasks, yielding uniform-capacity instances with a shifted certificate.
//!
//! Layout of the generated path for a graph with `n` vertices and `m`
//! edges: `2n + 2m` edges. The left half encodes graph edges: edge
//! `2k - 2` (capacity `sum(alpha)`) and edge `2k - 1` (capacity
//! `sum(alpha) - 1`) stand for graph edge `k`. The right half encodes
//! vertices with suffix-sum capacities. Each graph vertex `v_i` with color
//! weight `alpha(v_i)` contributes one long task covering everything up to
//! its right slot, a chain of short tasks covering the same even-index
//! path edges but skipping the odd-index edges of its incident graph
//! edges, and one unit-profit task on its right slot. High-profit tasks
//! pay `alpha * n` per even-index path edge covered, so any optimum
//! saturates every even-index edge, and the narrowed odd-index left edges
//! force the long tasks to pick an independent set.

use std::collections::BTreeSet;

use crate::model::{Instance, Task};
use crate::{Error, Result};

/// Simple undirected graph with 0-based vertices.
#[derive(Debug, Clone)]
pub struct Graph {
    pub n: usize,
    /// endpoint pairs with a < b, in input order (1-based index in text)
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Graph> {
        let g = Graph { n, edges };
        g.validate()?;
        Ok(g)
    }

    /// Connected, simple, max degree 3, at least one edge, not the
    /// complete graph on four vertices.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Invalid("graph needs at least one vertex".into()));
        }
        if self.edges.is_empty() {
            return Err(Error::Invalid("graph needs at least one edge".into()));
        }
        let mut seen = BTreeSet::new();
        for &(a, b) in &self.edges {
            if a >= self.n || b >= self.n {
                return Err(Error::Invalid(format!("edge ({a},{b}) out of range")));
            }
            if a == b {
                return Err(Error::Invalid(format!("self-loop at vertex {a}")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::Invalid(format!("duplicate edge ({a},{b})")));
            }
        }
        let adj = self.adjacency();
        if let Some(v) = (0..self.n).find(|&v| adj[v].len() > 3) {
            return Err(Error::Invalid(format!("vertex {v} has degree {}", adj[v].len())));
        }
        if self.n == 4 && self.edges.len() == 6 {
            return Err(Error::Invalid("complete graph on four vertices".into()));
        }
        let mut reached = vec![false; self.n];
        let mut stack = vec![0usize];
        reached[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !reached[w] {
                    reached[w] = true;
                    stack.push(w);
                }
            }
        }
        if reached.iter().any(|r| !r) {
            return Err(Error::Invalid("graph is not connected".into()));
        }
        Ok(())
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }
}

/// Parses the `graph v1` text format: a header line, `n <count>`, then
/// one `edge <a> <b>` line per edge with 1-based endpoints.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (line, header) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, msg: "empty input".into() })?;
    if header != "graph v1" {
        return Err(Error::Parse { line, msg: format!("expected 'graph v1', got '{header}'") });
    }
    let (line, n_line) = lines
        .next()
        .ok_or_else(|| Error::Parse { line, msg: "missing 'n' line".into() })?;
    let n: usize = match n_line.strip_prefix("n ") {
        Some(rest) => rest
            .trim()
            .parse()
            .map_err(|e| Error::Parse { line, msg: format!("bad vertex count: {e}") })?,
        None => return Err(Error::Parse { line, msg: format!("expected 'n <count>', got '{n_line}'") }),
    };
    let mut edges = Vec::new();
    for (line, l) in lines {
        let rest = l
            .strip_prefix("edge ")
            .ok_or_else(|| Error::Parse { line, msg: format!("expected 'edge a b', got '{l}'") })?;
        let fields: Vec<&str> = rest.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse { line, msg: format!("edge line needs 2 fields, got {}", fields.len()) });
        }
        let endpoint = |idx: usize| -> Result<usize> {
            let v: usize = fields[idx]
                .parse()
                .map_err(|e| Error::Parse { line, msg: format!("bad endpoint '{}': {e}", fields[idx]) })?;
            if v == 0 || v > n {
                return Err(Error::Parse { line, msg: format!("endpoint {v} outside 1..={n}") });
            }
            Ok(v - 1)
        };
        edges.push((endpoint(0)?, endpoint(1)?));
    }
    Graph::new(n, edges).map_err(|e| match e {
        Error::Invalid(msg) => Error::Parse { line: 0, msg },
        other => other,
    })
}

pub fn emit_graph(g: &Graph) -> String {
    let mut out = format!("graph v1\nn {}\n", g.n);
    for &(a, b) in &g.edges {
        out.push_str(&format!("edge {} {}\n", a + 1, b + 1));
    }
    out
}

/// Proper 3-coloring of a validated graph. Greedy coloring along a
/// degeneracy order resolves almost every vertex; a vertex facing all
/// three colors triggers a two-color component swap, and exhaustive
/// search backs the rare remaining cases. The output is re-validated, so
/// the search strategy is not trusted for correctness.
pub fn brooks_coloring(g: &Graph) -> Result<Vec<u8>> {
    g.validate()?;
    let adj = g.adjacency();

    // peel minimum-degree vertices, highest index first, so the reverse
    // coloring pass walks low indices first
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut removed = vec![false; g.n];
    let mut order = Vec::with_capacity(g.n);
    for _ in 0..g.n {
        let v = (0..g.n)
            .filter(|&v| !removed[v])
            .min_by_key(|&v| (degree[v], std::cmp::Reverse(v)))
            .expect("vertices remain");
        removed[v] = true;
        order.push(v);
        for &w in &adj[v] {
            if !removed[w] {
                degree[w] -= 1;
            }
        }
    }

    let mut colors = vec![0u8; g.n];
    let mut ok = true;
    for &v in order.iter().rev() {
        if !assign_or_swap(v, &adj, &mut colors) {
            ok = false;
            break;
        }
    }
    if !ok || !proper(g, &colors) {
        colors = backtrack_coloring(g, &adj)?;
    }
    if !proper(g, &colors) {
        return Err(Error::Internal("improper coloring survived validation".into()));
    }
    Ok(colors)
}

fn proper(g: &Graph, colors: &[u8]) -> bool {
    colors.iter().all(|&c| (1..=3).contains(&c))
        && g.edges.iter().all(|&(a, b)| colors[a] != colors[b])
}

/// Colors `v` with a color unseen among colored neighbors, or frees one
/// by swapping the two-colored component hanging off one neighbor.
fn assign_or_swap(v: usize, adj: &[Vec<usize>], colors: &mut [u8]) -> bool {
    let free = |colors: &[u8]| {
        (1..=3u8).find(|&c| adj[v].iter().all(|&w| colors[w] != c))
    };
    if let Some(c) = free(colors) {
        colors[v] = c;
        return true;
    }
    // neighbors show all three colors; try to disconnect one pair
    for &x in &adj[v] {
        for &y in &adj[v] {
            let (a, b) = (colors[x], colors[y]);
            if a == b || a == 0 || b == 0 {
                continue;
            }
            let component = two_color_component(x, a, b, adj, colors);
            if component.contains(&y) {
                continue;
            }
            for &u in &component {
                colors[u] = if colors[u] == a { b } else { a };
            }
            if let Some(c) = free(colors) {
                colors[v] = c;
                return true;
            }
            // undo: the swap is an involution on the component
            for &u in &component {
                colors[u] = if colors[u] == a { b } else { a };
            }
        }
    }
    false
}

fn two_color_component(start: usize, a: u8, b: u8, adj: &[Vec<usize>], colors: &[u8]) -> BTreeSet<usize> {
    let mut component = BTreeSet::new();
    let mut stack = vec![start];
    component.insert(start);
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if (colors[w] == a || colors[w] == b) && component.insert(w) {
                stack.push(w);
            }
        }
    }
    component
}

fn backtrack_coloring(g: &Graph, adj: &[Vec<usize>]) -> Result<Vec<u8>> {
    let mut colors = vec![0u8; g.n];
    fn go(v: usize, n: usize, adj: &[Vec<usize>], colors: &mut Vec<u8>) -> bool {
        if v == n {
            return true;
        }
        for c in 1..=3u8 {
            if adj[v].iter().all(|&w| colors[w] != c) {
                colors[v] = c;
                if go(v + 1, n, adj, colors) {
                    return true;
                }
                colors[v] = 0;
            }
        }
        false
    }
    if !go(0, g.n, adj, &mut colors) {
        return Err(Error::Internal("no proper 3-coloring found".into()));
    }
    Ok(colors)
}

/// A generated instance together with its profit certificate and the task
/// roles needed to read an independent set back out of a witness.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub instance: Instance,
    /// certificate base: optimum = base_profit + max independent set size
    pub base_profit: i64,
    /// per graph vertex, the id of its full-span task
    pub long_ids: Vec<usize>,
    /// per graph vertex, the ids of its chain tasks
    pub short_ids: Vec<Vec<usize>>,
    /// per graph vertex, the id of its unit-profit task
    pub low_ids: Vec<usize>,
}

impl Reduction {
    pub fn expected_opt(&self, mis: i64) -> Result<i64> {
        self.base_profit
            .checked_add(mis)
            .ok_or(Error::Overflow("certificate profit"))
    }

    /// Path edges every optimal witness must saturate.
    pub fn saturated_edges(&self) -> Vec<usize> {
        (0..self.instance.m).step_by(2).collect()
    }
}

fn mul3(a: i64, b: i64, c: i64) -> Result<i64> {
    a.checked_mul(b)
        .and_then(|ab| ab.checked_mul(c))
        .ok_or(Error::Overflow("reduction profit"))
}

/// Even-index path edges covered by a task spanning vertices `[s, t)`.
fn even_span_edges(s: usize, t: usize) -> i64 {
    t.div_ceil(2) as i64 - s.div_ceil(2) as i64
}

/// Translates a graph and a proper 3-coloring into a path instance whose
/// optimum is `base_profit` plus the graph's maximum independent set
/// size.
pub fn reduce(g: &Graph, alpha: &[u8]) -> Result<Reduction> {
    g.validate()?;
    if alpha.len() != g.n || !proper(g, alpha) {
        return Err(Error::Precondition("coloring is not a proper 3-coloring".into()));
    }
    let n = g.n;
    let m = g.edges.len();
    let path_edges = 2 * n + 2 * m;

    let weight = |i: usize| alpha[i] as i64;
    let sigma_total: i64 = (0..n).map(weight).sum();
    // suffix[i] = weight(i) + ... + weight(n - 1)
    let mut suffix = vec![0i64; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + weight(i);
    }

    let mut caps = vec![0i64; path_edges];
    for k in 1..=m {
        caps[2 * k - 2] = sigma_total;
        caps[2 * k - 1] = sigma_total - 1;
    }
    for k in m + 1..=n + m {
        caps[2 * k - 2] = suffix[k - m - 1];
        caps[2 * k - 1] = suffix[k - m - 1];
    }

    let mut tasks: Vec<Task> = Vec::new();
    let mut long_ids = Vec::with_capacity(n);
    let mut short_ids = Vec::with_capacity(n);
    let mut low_ids = Vec::with_capacity(n);
    let mut base_profit = 0i64;
    let push = |tasks: &mut Vec<Task>, s: usize, t: usize, d: i64, w: i64| -> usize {
        let id = tasks.len();
        tasks.push(Task { id, s, t, d, w });
        id
    };

    for i in 1..=n {
        let a = weight(i - 1);
        let right = 2 * m + 2 * i;

        let long_end = right - 1;
        let w_long = mul3(a, n as i64, even_span_edges(0, long_end))?;
        long_ids.push(push(&mut tasks, 0, long_end, a, w_long));
        base_profit = base_profit
            .checked_add(w_long)
            .ok_or(Error::Overflow("certificate profit"))?;

        // chain boundaries at the incident graph edges, in index order
        let incident: Vec<usize> = (1..=m)
            .filter(|&k| g.edges[k - 1].0 == i - 1 || g.edges[k - 1].1 == i - 1)
            .collect();
        let mut chain = Vec::with_capacity(incident.len() + 1);
        let mut start = 0usize;
        for &k in &incident {
            chain.push((start, 2 * k - 1));
            start = 2 * k;
        }
        chain.push((start, right));
        let mut ids = Vec::with_capacity(chain.len());
        for (s, t) in chain {
            let w = mul3(a, n as i64, even_span_edges(s, t))?;
            ids.push(push(&mut tasks, s, t, a, w));
        }
        short_ids.push(ids);

        low_ids.push(push(&mut tasks, right - 1, right, a, 1));
    }

    Ok(Reduction {
        instance: Instance::new(path_edges, caps, tasks)?,
        base_profit,
        long_ids,
        short_ids,
        low_ids,
    })
}

/// Raises every capacity to the maximum, compensating each widened edge
/// with mandatory unit-demand tasks whose profit exceeds any solution of
/// the original instance. Returns the new instance and the amount added
/// to the certified optimum.
pub fn uniformize(inst: &Instance) -> Result<(Instance, i64)> {
    let u_max = *inst.capacities.iter().max().ok_or(Error::Overflow("empty path"))?;
    let mut bound = 1i64;
    for t in &inst.tasks {
        bound = bound.checked_add(t.w).ok_or(Error::Overflow("dummy profit"))?;
    }
    let mut tasks = inst.tasks.clone();
    let mut shift = 0i64;
    for e in 0..inst.m {
        let missing = u_max - inst.capacities[e];
        for _ in 0..missing {
            let id = tasks.len();
            tasks.push(Task { id, s: e, t: e + 1, d: 1, w: bound });
            shift = shift.checked_add(bound).ok_or(Error::Overflow("certificate shift"))?;
        }
    }
    let uniform = Instance::new(inst.m, vec![u_max; inst.m], tasks)?;
    Ok((uniform, shift))
}

/// Exact maximum independent set size by branch and bound, for graphs of
/// at most 24 vertices.
pub fn mis_brute(g: &Graph) -> Result<i64> {
    g.validate()?;
    if g.n > 24 {
        return Err(Error::Precondition(format!(
            "independent set search capped at 24 vertices, got {}",
            g.n
        )));
    }
    let mut adj = vec![0u32; g.n];
    for &(a, b) in &g.edges {
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    fn go(remaining: u32, adj: &[u32]) -> i64 {
        if remaining == 0 {
            return 0;
        }
        let v = remaining.trailing_zeros() as usize;
        let rest = remaining & !(1u32 << v);
        if adj[v] & remaining == 0 {
            // isolated in the residual graph, always take it
            return 1 + go(rest, adj);
        }
        let take = 1 + go(rest & !adj[v], adj);
        let skip = go(rest, adj);
        take.max(skip)
    }
    Ok(go((1u32 << g.n) - 1, &adj))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::check_feasible;
    use crate::oracle::brute_force;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::new(n, edges.to_vec()).unwrap()
    }

    fn petersen() -> Graph {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((i + 5, 5 + (i + 2) % 5));
        }
        graph(10, &edges)
    }

    #[test]
    fn malformed_graphs_are_rejected() {
        assert!(Graph::new(2, vec![]).is_err());
        assert!(Graph::new(2, vec![(0, 0)]).is_err());
        assert!(Graph::new(2, vec![(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(4, vec![(0, 1), (2, 3)]).is_err());
        assert!(Graph::new(5, vec![(0, 1), (0, 2), (0, 3), (0, 4)]).is_err());
        let k4: Vec<(usize, usize)> =
            vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        assert!(Graph::new(4, k4).is_err());
    }

    #[test]
    fn parse_round_trips() {
        let text = "graph v1\nn 3\n# a comment\nedge 1 2\nedge 2 3\n";
        let g = parse_graph(text).unwrap();
        assert_eq!(g.n, 3);
        assert_eq!(g.edges, vec![(0, 1), (1, 2)]);
        assert_eq!(parse_graph(&emit_graph(&g)).unwrap().edges, g.edges);
        assert!(parse_graph("graph v2\nn 1\n").is_err());
        assert!(parse_graph("graph v1\nn 2\nedge 0 1\n").is_err());
    }

    #[test]
    fn colorings_are_proper_on_assorted_graphs() {
        let samples = vec![
            graph(2, &[(0, 1)]),
            graph(3, &[(0, 1), (1, 2), (0, 2)]),
            graph(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]),
            petersen(),
        ];
        for g in samples {
            let alpha = brooks_coloring(&g).unwrap();
            assert!(proper(&g, &alpha));
        }
    }

    #[test]
    fn coloring_handles_odd_cycles_and_cliques() {
        // triangle forces all three colors
        let g = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(brooks_coloring(&g).unwrap(), vec![1, 2, 3]);
        let edge = graph(2, &[(0, 1)]);
        assert_eq!(brooks_coloring(&edge).unwrap(), vec![1, 2]);
    }

    #[test]
    fn independent_set_sizes_match_known_values() {
        assert_eq!(mis_brute(&graph(2, &[(0, 1)])).unwrap(), 1);
        assert_eq!(mis_brute(&graph(3, &[(0, 1), (1, 2), (0, 2)])).unwrap(), 1);
        assert_eq!(mis_brute(&graph(4, &[(0, 1), (1, 2), (2, 3)])).unwrap(), 2);
        assert_eq!(mis_brute(&petersen()).unwrap(), 4);
    }

    #[test]
    fn single_edge_graph_produces_the_reference_instance() {
        let g = graph(2, &[(0, 1)]);
        let red = reduce(&g, &[1, 2]).unwrap();
        assert_eq!(red.instance.capacities, vec![3, 2, 3, 3, 2, 2]);
        assert_eq!(red.instance.tasks.len(), 8);
        assert_eq!(red.base_profit, 16);
        let opt = red.expected_opt(mis_brute(&g).unwrap()).unwrap();
        assert_eq!(opt, 17);
        let all: Vec<usize> = (0..red.instance.tasks.len()).collect();
        let best = brute_force(&red.instance, &all).unwrap();
        assert_eq!(best.profit, 17);
    }

    #[test]
    fn witnesses_recover_independent_sets() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let alpha = brooks_coloring(&g).unwrap();
        let red = reduce(&g, &alpha).unwrap();
        let all: Vec<usize> = (0..red.instance.tasks.len()).collect();
        let best = brute_force(&red.instance, &all).unwrap();
        let opt = red.expected_opt(mis_brute(&g).unwrap()).unwrap();
        assert_eq!(best.profit, opt);

        let chosen: Vec<usize> = (0..g.n)
            .filter(|&i| best.selected.contains(&red.long_ids[i]))
            .collect();
        assert_eq!(chosen.len() as i64, mis_brute(&g).unwrap());
        for &(a, b) in &g.edges {
            assert!(!(chosen.contains(&a) && chosen.contains(&b)));
        }
        let loads = crate::model::edge_loads(&red.instance, &best.selected).unwrap();
        for e in red.saturated_edges() {
            assert_eq!(loads[e], red.instance.capacities[e], "edge {e} not saturated");
        }
    }

    #[test]
    fn demands_stay_in_the_small_range() {
        let g = petersen();
        let alpha = brooks_coloring(&g).unwrap();
        let red = reduce(&g, &alpha).unwrap();
        assert!(red.instance.tasks.iter().all(|t| (1..=3).contains(&t.d)));
    }

    #[test]
    fn uniformized_instances_shift_the_certificate() {
        let g = graph(2, &[(0, 1)]);
        let red = reduce(&g, &[1, 2]).unwrap();
        let (uniform, shift) = uniformize(&red.instance).unwrap();
        assert!(uniform.capacities.iter().all(|&u| u == 3));
        let report = check_feasible(&uniform, &[]).unwrap();
        assert!(report.feasible);

        let all: Vec<usize> = (0..uniform.tasks.len()).collect();
        let best = brute_force(&uniform, &all).unwrap();
        assert_eq!(best.profit, 17 + shift);

        let (again, zero) = uniformize(&uniform).unwrap();
        assert_eq!(zero, 0);
        assert_eq!(again.tasks.len(), uniform.tasks.len());
    }
}
