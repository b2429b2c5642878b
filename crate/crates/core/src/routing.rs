//! Visiting orders for waypoint candidates.
//!
//! Every open-tour variant is reduced to a closed tour over the points plus
//! one dummy node. The closed tour is found by nearest-neighbour construction
//! from every start followed by 2-opt; the dummy's two edges are then cut.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoundingBox, Point};

/// Which endpoints of the tour are fixed and whether it closes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TourVariant {
    /// Closed tour starting (and ending) at `origin`.
    ReturnGivenOrigin { origin: usize },
    /// Open path with free endpoints.
    #[default]
    NoReturnArbitraryOriginAndEnd,
    /// Open path from `origin` to `end`.
    NoReturnGivenOriginAndEnd { origin: usize, end: usize },
    /// Open path from `origin` to a free end.
    NoReturnGivenOriginArbitraryEnd { origin: usize },
    /// Open path from a free start to `end`.
    NoReturnArbitraryOriginGivenEnd { end: usize },
}

impl TourVariant {
    pub fn is_closed(self) -> bool {
        matches!(self, TourVariant::ReturnGivenOrigin { .. })
    }

    fn indices(self) -> Vec<usize> {
        match self {
            TourVariant::ReturnGivenOrigin { origin } => vec![origin],
            TourVariant::NoReturnArbitraryOriginAndEnd => vec![],
            TourVariant::NoReturnGivenOriginAndEnd { origin, end } => vec![origin, end],
            TourVariant::NoReturnGivenOriginArbitraryEnd { origin } => vec![origin],
            TourVariant::NoReturnArbitraryOriginGivenEnd { end } => vec![end],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TourSpec {
    pub points: Vec<Point>,
    pub variant: TourVariant,
}

/// A visiting order. `length` includes the closing leg iff `closed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tour {
    pub order: Vec<usize>,
    pub length: f64,
    pub closed: bool,
}

impl Tour {
    pub fn ordered_points(&self, points: &[Point]) -> Vec<Point> {
        self.order.iter().map(|&i| points[i]).collect()
    }
}

/// Length of `order` through `points`, closing the loop if `closed`.
pub fn tour_length(points: &[Point], order: &[usize], closed: bool) -> f64 {
    let open: f64 = order.windows(2).map(|w| points[w[0]].dist(points[w[1]])).sum();
    match (closed, order.first(), order.last()) {
        (true, Some(&a), Some(&b)) if order.len() > 1 => open + points[b].dist(points[a]),
        _ => open,
    }
}

/// Symmetric cost matrix stored row-major.
#[derive(Debug, Clone)]
pub(crate) struct CostMatrix {
    n: usize,
    c: Vec<f64>,
}

impl CostMatrix {
    fn new(n: usize) -> Self {
        Self { n, c: vec![0.0; n * n] }
    }

    #[inline]
    pub(crate) fn get(&self, i: usize, j: usize) -> f64 {
        self.c[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.c[i * self.n + j] = v;
        self.c[j * self.n + i] = v;
    }

    pub(crate) fn cycle_cost(&self, order: &[usize]) -> f64 {
        let n = order.len();
        (0..n).map(|i| self.get(order[i], order[(i + 1) % n])).sum()
    }
}

fn euclidean_matrix(points: &[Point], extra: usize) -> CostMatrix {
    let mut m = CostMatrix::new(points.len() + extra);
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            m.set(i, j, points[i].dist(points[j]));
        }
    }
    m
}

/// Cost of a forbidden dummy edge: larger than any legal tour.
///
/// The one-fixed-endpoint variants give every non-fixed dummy edge this same
/// cost. A reduced tour that skips the fixed endpoint pays it twice rather
/// than once, so the constant must exceed any path length for the reduction
/// to be exact.
pub fn forbidden_cost(points: &[Point]) -> f64 {
    let perimeter = BoundingBox::of(points).map_or(0.0, |b| b.perimeter());
    (10.0 * perimeter * points.len() as f64).max(1.0)
}

/// Solves the requested tour variant.
///
/// The points are processed in lexicographic order, so the result depends on
/// the point set and the variant but not on how the input is listed.
pub fn solve_tour(spec: &TourSpec) -> Result<Tour> {
    let n = spec.points.len();
    let mut sorted: Vec<usize> = (0..n).collect();
    sorted.sort_by(|&a, &b| {
        let (p, q) = (spec.points[a], spec.points[b]);
        p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y)).then(a.cmp(&b))
    });
    let mut rank = vec![0; n];
    for (r, &i) in sorted.iter().enumerate() {
        rank[i] = r;
    }
    let map = |i: usize| rank.get(i).copied().unwrap_or(i);
    let variant = match spec.variant {
        TourVariant::ReturnGivenOrigin { origin } => TourVariant::ReturnGivenOrigin { origin: map(origin) },
        TourVariant::NoReturnArbitraryOriginAndEnd => TourVariant::NoReturnArbitraryOriginAndEnd,
        TourVariant::NoReturnGivenOriginAndEnd { origin, end } => {
            TourVariant::NoReturnGivenOriginAndEnd { origin: map(origin), end: map(end) }
        }
        TourVariant::NoReturnGivenOriginArbitraryEnd { origin } => {
            TourVariant::NoReturnGivenOriginArbitraryEnd { origin: map(origin) }
        }
        TourVariant::NoReturnArbitraryOriginGivenEnd { end } => {
            TourVariant::NoReturnArbitraryOriginGivenEnd { end: map(end) }
        }
    };
    if let Some(i) = spec.variant.indices().into_iter().find(|&i| i >= n) {
        return Err(Error::Precondition(format!("tour endpoint index {i} out of range for {n} points")));
    }
    let points: Vec<Point> = sorted.iter().map(|&i| spec.points[i]).collect();
    let mut tour = solve_sorted(&points, variant)?;
    tour.order = tour.order.iter().map(|&r| sorted[r]).collect();
    Ok(tour)
}

fn solve_sorted(pts: &[Point], variant: TourVariant) -> Result<Tour> {
    let n = pts.len();
    if n == 0 {
        return Err(Error::Precondition("a tour needs at least one point".into()));
    }
    if let TourVariant::NoReturnGivenOriginAndEnd { origin, end } = variant {
        if origin == end && n > 1 {
            return Err(Error::Precondition("open tour with identical origin and end; use the closed variant".into()));
        }
    }
    if n == 1 {
        return Ok(Tour { order: vec![0], length: 0.0, closed: variant.is_closed() });
    }

    let order = match variant {
        TourVariant::ReturnGivenOrigin { origin } => {
            let cycle = solve_closed(&euclidean_matrix(pts, 0));
            rotate_to(&cycle, origin)
        }
        TourVariant::NoReturnArbitraryOriginAndEnd => {
            let mut m = euclidean_matrix(pts, 1);
            for i in 0..n {
                m.set(n, i, 0.0);
            }
            let via_dummy = cut_at_dummy(&solve_closed(&m), n);
            // The closed tour minus its longest leg is also a candidate.
            let cycle = solve_closed(&euclidean_matrix(pts, 0));
            let longest = (0..n).max_by(|&a, &b| {
                let la = pts[cycle[a]].dist(pts[cycle[(a + 1) % n]]);
                let lb = pts[cycle[b]].dist(pts[cycle[(b + 1) % n]]);
                la.total_cmp(&lb).then(b.cmp(&a))
            });
            let from_cycle = rotate_to(&cycle, cycle[(longest.unwrap_or(0) + 1) % n]);
            if tour_length(pts, &from_cycle, false) < tour_length(pts, &via_dummy, false) {
                from_cycle
            } else {
                via_dummy
            }
        }
        TourVariant::NoReturnGivenOriginAndEnd { origin, end } => {
            let mut m = euclidean_matrix(pts, 1);
            let big = forbidden_cost(pts);
            for i in 0..n {
                m.set(n, i, if i == origin || i == end { 0.0 } else { big });
            }
            orient(cut_at_dummy(&solve_closed(&m), n), Some(origin), Some(end))?
        }
        TourVariant::NoReturnGivenOriginArbitraryEnd { origin } => {
            let mut m = euclidean_matrix(pts, 1);
            let other = forbidden_cost(pts);
            for i in 0..n {
                m.set(n, i, if i == origin { 0.0 } else { other });
            }
            orient(cut_at_dummy(&solve_closed(&m), n), Some(origin), None)?
        }
        TourVariant::NoReturnArbitraryOriginGivenEnd { end } => {
            let mut m = euclidean_matrix(pts, 1);
            let other = forbidden_cost(pts);
            for i in 0..n {
                m.set(n, i, if i == end { 0.0 } else { other });
            }
            orient(cut_at_dummy(&solve_closed(&m), n), None, Some(end))?
        }
    };
    let closed = variant.is_closed();
    Ok(Tour { length: tour_length(pts, &order, closed), order, closed })
}

fn rotate_to(cycle: &[usize], first: usize) -> Vec<usize> {
    let at = cycle.iter().position(|&v| v == first).unwrap_or(0);
    cycle[at..].iter().chain(&cycle[..at]).copied().collect()
}

/// Opens the cycle at `dummy`, dropping it.
fn cut_at_dummy(cycle: &[usize], dummy: usize) -> Vec<usize> {
    rotate_to(cycle, dummy).into_iter().skip(1).collect()
}

/// Reverses `path` if needed so it starts at `origin` / ends at `end`.
fn orient(mut path: Vec<usize>, origin: Option<usize>, end: Option<usize>) -> Result<Vec<usize>> {
    let fits = |p: &[usize]| origin.is_none_or(|o| p.first() == Some(&o)) && end.is_none_or(|e| p.last() == Some(&e));
    if !fits(&path) {
        path.reverse();
    }
    if fits(&path) {
        Ok(path)
    } else {
        Err(Error::SolverFailure(format!("reduced tour does not respect the fixed endpoints {origin:?}/{end:?}")))
    }
}

/// Cycles up to this many nodes are solved exactly by dynamic programming.
pub const EXACT_TOUR_MAX_NODES: usize = 14;

/// Optimal closed tour for small matrices, otherwise the best
/// nearest-neighbour start improved by 2-opt.
pub(crate) fn solve_closed(m: &CostMatrix) -> Vec<usize> {
    if (3..=EXACT_TOUR_MAX_NODES).contains(&m.n) {
        return held_karp(m);
    }
    heuristic_closed(m)
}

/// Held-Karp over subsets of nodes `1..n`, anchored at node 0.
fn held_karp(m: &CostMatrix) -> Vec<usize> {
    let n = m.n;
    let rest = n - 1;
    let full = (1usize << rest) - 1;
    let mut cost = vec![f64::INFINITY; (full + 1) * rest];
    let mut parent = vec![usize::MAX; (full + 1) * rest];
    for j in 0..rest {
        cost[(1 << j) * rest + j] = m.get(0, j + 1);
    }
    for mask in 1..=full {
        for j in 0..rest {
            let here = cost[mask * rest + j];
            if mask >> j & 1 == 0 || !here.is_finite() {
                continue;
            }
            for k in 0..rest {
                if mask >> k & 1 == 1 {
                    continue;
                }
                let next = mask | 1 << k;
                let c = here + m.get(j + 1, k + 1);
                if c < cost[next * rest + k] {
                    cost[next * rest + k] = c;
                    parent[next * rest + k] = j;
                }
            }
        }
    }
    let mut last = (0..rest)
        .min_by(|&a, &b| {
            (cost[full * rest + a] + m.get(a + 1, 0))
                .total_cmp(&(cost[full * rest + b] + m.get(b + 1, 0)))
                .then(a.cmp(&b))
        })
        .expect("at least two non-anchor nodes");
    let mut mask = full;
    let mut tour = vec![0; n];
    for slot in (1..n).rev() {
        tour[slot] = last + 1;
        let p = parent[mask * rest + last];
        mask &= !(1 << last);
        last = p;
    }
    tour
}

/// Best closed tour over all nearest-neighbour starts, each improved by 2-opt.
/// Ties keep the lowest start index.
pub(crate) fn heuristic_closed(m: &CostMatrix) -> Vec<usize> {
    let mut best: Option<(f64, Vec<usize>)> = None;
    for start in 0..m.n {
        let mut tour = nearest_neighbour(m, start);
        two_opt(m, &mut tour);
        let cost = m.cycle_cost(&tour);
        if best.as_ref().is_none_or(|(c, _)| cost < *c - 1e-9 * c.abs().max(1.0)) {
            best = Some((cost, tour));
        }
    }
    best.map(|(_, t)| t).unwrap_or_default()
}

fn nearest_neighbour(m: &CostMatrix, start: usize) -> Vec<usize> {
    let mut visited = vec![false; m.n];
    let mut tour = Vec::with_capacity(m.n);
    let mut cur = start;
    visited[cur] = true;
    tour.push(cur);
    for _ in 1..m.n {
        let next = (0..m.n)
            .filter(|&j| !visited[j])
            .min_by(|&a, &b| m.get(cur, a).total_cmp(&m.get(cur, b)).then(a.cmp(&b)))
            .expect("unvisited node remains");
        visited[next] = true;
        tour.push(next);
        cur = next;
    }
    tour
}

/// First-improvement 2-opt until no exchange shortens the cycle.
pub(crate) fn two_opt(m: &CostMatrix, tour: &mut [usize]) {
    let n = tour.len();
    if n < 4 {
        return;
    }
    let eps = 1e-12 * m.cycle_cost(tour).max(1.0);
    loop {
        let mut improved = false;
        for i in 0..n - 1 {
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (a, b) = (tour[i], tour[i + 1]);
                let (c, d) = (tour[j], tour[(j + 1) % n]);
                let delta = m.get(a, c) + m.get(b, d) - m.get(a, b) - m.get(c, d);
                if delta < -eps {
                    tour[i + 1..=j].reverse();
                    improved = true;
                }
            }
        }
        if !improved {
            return;
        }
    }
}

/// Lengths of the best open path and closed tour over `points`.
pub fn open_tour_cost_dominance(points: &[Point]) -> Result<(f64, f64)> {
    if points.len() < 2 {
        return Err(Error::Precondition("need at least two points".into()));
    }
    let open = solve_tour(&TourSpec { points: points.to_vec(), variant: TourVariant::NoReturnArbitraryOriginAndEnd })?;
    let closed =
        solve_tour(&TourSpec { points: points.to_vec(), variant: TourVariant::ReturnGivenOrigin { origin: 0 } })?;
    Ok((open.length, closed.length))
}
