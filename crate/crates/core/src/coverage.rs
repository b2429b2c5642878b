//! Virtual base station (VBS) placement and connection regions.
//!
//! A VBS is a point within `D` of a group of GTs. The UAV serves all GTs of a
//! cluster at once from anywhere in the cluster's connection region, the
//! intersection of the radius-`D` disks around its members.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{centroid, circle_intersections, convex_hull, min_enclosing_circle, Point, CONNECT_TOL};

/// Displacement per full Dykstra cycle below which the iteration stops (m).
pub const DYKSTRA_TOL: f64 = 1e-6;
/// Maximum number of Dykstra cycles.
pub const DYKSTRA_MAX_CYCLES: usize = 10_000;

/// VBS locations with their clusters.
///
/// `clusters[g]` holds the GTs assigned to VBS `g`: those it covered first
/// during placement. Each GT belongs to exactly one cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveragePlan {
    pub vbs: Vec<Point>,
    pub clusters: Vec<Vec<usize>>,
    pub radius: f64,
}

impl CoveragePlan {
    pub fn len(&self) -> usize {
        self.vbs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vbs.is_empty()
    }

    /// Cluster index of every GT.
    pub fn assignment(&self, n_gts: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n_gts];
        for (g, members) in self.clusters.iter().enumerate() {
            for &k in members {
                if k < n_gts && out[k].is_none() {
                    out[k] = Some(g);
                }
            }
        }
        out
    }

    /// Plan with VBSs (and clusters) permuted into `order`.
    pub fn reordered(&self, order: &[usize]) -> Result<CoveragePlan> {
        let mut seen = vec![false; self.len()];
        for &g in order {
            if g >= self.len() || std::mem::replace(&mut seen[g], true) {
                return Err(Error::Precondition(format!("{order:?} is not a permutation of the VBSs")));
            }
        }
        if order.len() != self.len() {
            return Err(Error::Precondition(format!("{order:?} is not a permutation of the VBSs")));
        }
        Ok(CoveragePlan {
            vbs: order.iter().map(|&g| self.vbs[g]).collect(),
            clusters: order.iter().map(|&g| self.clusters[g].clone()).collect(),
            radius: self.radius,
        })
    }

    /// Checks that every GT is assigned once and lies within `D` of its VBS.
    pub fn verify(&self, gts: &[Point]) -> Result<()> {
        if self.vbs.len() != self.clusters.len() {
            return Err(Error::Precondition("VBS and cluster counts differ".into()));
        }
        let mut count = vec![0usize; gts.len()];
        for (g, members) in self.clusters.iter().enumerate() {
            for &k in members {
                let w = *gts.get(k).ok_or_else(|| Error::Precondition(format!("cluster {g} names GT {k}")))?;
                if !w.within(self.vbs[g], self.radius) {
                    return Err(Error::Precondition(format!(
                        "GT {k} is {} m from VBS {g}, beyond D = {}",
                        w.dist(self.vbs[g]),
                        self.radius
                    )));
                }
                count[k] += 1;
            }
        }
        match count.iter().position(|&c| c != 1) {
            Some(k) => Err(Error::Precondition(format!("GT {k} is assigned to {} clusters", count[k]))),
            None => Ok(()),
        }
    }

    pub fn region(&self, gts: &[Point], g: usize) -> Result<ConnectionRegion> {
        build_region(gts, &self.clusters[g], self.radius)
    }

    pub fn regions(&self, gts: &[Point]) -> Result<Vec<ConnectionRegion>> {
        (0..self.len()).map(|g| self.region(gts, g)).collect()
    }
}

/// Boundary-first greedy disk cover of the GTs with radius `D`.
///
/// Each round anchors on the uncovered GT that sits on the convex hull of
/// the uncovered GTs at the smallest polar angle about their centroid. The
/// VBS is the candidate covering the anchor and the most uncovered GTs
/// (ties: closest to the centroid). Candidates are uncovered GT locations
/// and pairwise intersections of the radius-`D` circles around them.
///
/// A max-coverage greedy over the same candidate kinds (without the anchor
/// restriction) runs as well and the smaller cover is kept, boundary-first
/// on ties. Both pass through a final step that removes every VBS whose GTs
/// can all be moved into other clusters without emptying their regions,
/// and that re-covers groups of three or four nearby clusters with fewer
/// disks whenever an exact small cover exists. Finally a budgeted branch
/// and bound over maximal candidate disks, pruned by set-cover LP bounds,
/// looks for a cover with fewer disks. Each VBS is then moved to the centre
/// of the smallest circle enclosing its cluster, which keeps the cover valid
/// and minimizes the largest VBS-to-member distance.
pub fn place_vbs(gts: &[Point], radius: f64) -> Result<CoveragePlan> {
    if !(radius >= 0.0 && radius.is_finite()) {
        return Err(Error::Domain(format!("connection distance must be finite and >= 0, got {radius}")));
    }
    let mut boundary = boundary_first_cover(gts, radius);
    improve(gts, &mut boundary);
    let mut greedy = max_coverage_cover(gts, radius);
    improve(gts, &mut greedy);
    let best = if greedy.len() < boundary.len() { greedy } else { boundary };
    let mut plan = exact_min_cover(gts, radius, best.len()).unwrap_or(best);
    for (v, members) in plan.vbs.iter_mut().zip(&plan.clusters) {
        let pts: Vec<Point> = members.iter().map(|&k| gts[k]).collect();
        let (center, r) = min_enclosing_circle(&pts);
        if r <= radius {
            *v = center;
        }
    }
    Ok(plan)
}

/// Node budget of the exact cover search.
const EXACT_COVER_NODES: usize = 2_000;
/// Largest instance handed to the exact search.
const EXACT_COVER_MAX_GTS: usize = 256;

type Bits = Vec<u64>;

fn bit(b: &Bits, i: usize) -> bool {
    b[i / 64] >> (i % 64) & 1 == 1
}

fn subset(a: &Bits, b: &Bits) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

/// Branch and bound over maximal candidate disks with set-cover LP bounds.
/// Returns a cover with fewer than `known` disks if the budget allows one to
/// be found.
fn exact_min_cover(gts: &[Point], radius: f64, known: usize) -> Option<CoveragePlan> {
    let n = gts.len();
    if radius <= 0.0 || n > EXACT_COVER_MAX_GTS || known <= 1 {
        return None;
    }
    let words = n.div_ceil(64);
    let mut cands: Vec<Point> = gts.to_vec();
    for i in 0..n {
        for j in i + 1..n {
            if gts[i].dist(gts[j]) <= 2.0 * radius + CONNECT_TOL {
                cands.extend(circle_intersections(gts[i], gts[j], radius));
            }
        }
    }
    let mut sets: Vec<(Bits, Point)> = Vec::new();
    for c in cands {
        let mut m = vec![0u64; words];
        for (k, g) in gts.iter().enumerate() {
            if g.within(c, radius) {
                m[k / 64] |= 1 << (k % 64);
            }
        }
        if !sets.iter().any(|(s, _)| subset(&m, s)) {
            sets.retain(|(s, _)| !subset(s, &m));
            sets.push((m, c));
        }
    }
    let masks: Vec<Bits> = sets.iter().map(|(m, _)| m.clone()).collect();
    let mut search = CoverSearch { masks: &masks, n, nodes: 0, found: None };
    let empty = vec![0u64; words];
    let (root, _) = search.lp_bound(&empty)?;
    let mut target = known - 1;
    let mut best = None;
    while target >= root && search.nodes < EXACT_COVER_NODES {
        search.found = None;
        search.dfs(&empty, &mut Vec::new(), target);
        match search.found.take() {
            Some(c) => {
                target = c.len() - 1;
                best = Some(c);
            }
            None => break,
        }
    }
    let chosen = best?;
    let mut plan = CoveragePlan { vbs: Vec::new(), clusters: Vec::new(), radius };
    let mut taken = vec![false; n];
    for i in chosen {
        let members: Vec<usize> = (0..n).filter(|&k| !taken[k] && bit(&masks[i], k)).collect();
        if members.is_empty() {
            continue;
        }
        for &k in &members {
            taken[k] = true;
        }
        plan.vbs.push(sets[i].1);
        plan.clusters.push(members);
    }
    Some(plan)
}

struct CoverSearch<'a> {
    masks: &'a [Bits],
    n: usize,
    nodes: usize,
    found: Option<Vec<usize>>,
}

impl CoverSearch<'_> {
    /// `⌈LP⌉` for the uncovered GTs and the LP weight of every set.
    fn lp_bound(&self, covered: &Bits) -> Option<(usize, Vec<f64>)> {
        let open: Vec<usize> = (0..self.n).filter(|&k| !bit(covered, k)).collect();
        let mut cols: Vec<Bits> = Vec::new();
        let mut col_of = vec![usize::MAX; self.masks.len()];
        for (i, m) in self.masks.iter().enumerate() {
            let proj: Bits = m.iter().zip(covered).map(|(a, c)| a & !c).collect();
            if proj.iter().all(|&w| w == 0) {
                continue;
            }
            col_of[i] = match cols.iter().position(|c| *c == proj) {
                Some(p) => p,
                None => {
                    cols.push(proj);
                    cols.len() - 1
                }
            };
        }
        let a: Vec<Vec<f64>> =
            open.iter().map(|&k| cols.iter().map(|c| if bit(c, k) { 1.0 } else { 0.0 }).collect()).collect();
        let sol = crate::lp::solve_covering(&a, &vec![1.0; open.len()], &vec![1.0; cols.len()]).ok()?;
        let weights = col_of.iter().map(|&c| if c == usize::MAX { 0.0 } else { sol.x[c] }).collect();
        Some(((sol.objective - 1e-7).ceil().max(0.0) as usize, weights))
    }

    fn dfs(&mut self, covered: &Bits, chosen: &mut Vec<usize>, target: usize) -> bool {
        let Some(k) =
            (0..self.n).filter(|&k| !bit(covered, k)).min_by_key(|&k| self.masks.iter().filter(|m| bit(m, k)).count())
        else {
            self.found = Some(chosen.clone());
            return true;
        };
        if chosen.len() >= target || self.nodes >= EXACT_COVER_NODES {
            return false;
        }
        self.nodes += 1;
        let Some((lb, weights)) = self.lp_bound(covered) else {
            return false;
        };
        if chosen.len() + lb > target {
            return false;
        }
        let mut branch: Vec<usize> = (0..self.masks.len()).filter(|&i| bit(&self.masks[i], k)).collect();
        branch.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
        for i in branch {
            let next: Bits = covered.iter().zip(&self.masks[i]).map(|(c, m)| c | m).collect();
            chosen.push(i);
            if self.dfs(&next, chosen, target) {
                return true;
            }
            chosen.pop();
        }
        false
    }
}

fn boundary_first_cover(gts: &[Point], radius: f64) -> CoveragePlan {
    let mut covered = vec![false; gts.len()];
    let mut plan = CoveragePlan { vbs: Vec::new(), clusters: Vec::new(), radius };

    loop {
        let open: Vec<usize> = (0..gts.len()).filter(|&k| !covered[k]).collect();
        if open.is_empty() {
            break;
        }
        let pts: Vec<Point> = open.iter().map(|&k| gts[k]).collect();
        let center = centroid(&pts);
        let anchor = anchor_gt(&pts, center);
        let a = pts[anchor];

        let near: Vec<Point> = pts.iter().copied().filter(|p| p.dist(a) <= 2.0 * radius + CONNECT_TOL).collect();
        let mut candidates: Vec<Point> = near.iter().copied().filter(|p| p.within(a, radius)).collect();
        for i in 0..near.len() {
            for j in i + 1..near.len() {
                candidates.extend(
                    circle_intersections(near[i], near[j], radius).into_iter().filter(|c| a.within(*c, radius)),
                );
            }
        }

        let mut best = a;
        let mut best_key = (0usize, f64::INFINITY);
        for c in candidates {
            let hits = near.iter().filter(|p| p.within(c, radius)).count();
            let d = c.dist(center);
            if hits > best_key.0 || (hits == best_key.0 && d < best_key.1) {
                best = c;
                best_key = (hits, d);
            }
        }

        let members: Vec<usize> = open.iter().copied().filter(|&k| gts[k].within(best, radius)).collect();
        debug_assert!(!members.is_empty());
        for &k in &members {
            covered[k] = true;
        }
        plan.vbs.push(best);
        plan.clusters.push(members);
    }
    plan
}

/// Repeatedly places the candidate covering the most uncovered GTs (ties:
/// closest to the centroid of the uncovered GTs, then generation order).
fn max_coverage_cover(gts: &[Point], radius: f64) -> CoveragePlan {
    let mut candidates: Vec<Point> = gts.to_vec();
    for i in 0..gts.len() {
        for j in i + 1..gts.len() {
            candidates.extend(circle_intersections(gts[i], gts[j], radius));
        }
    }
    let reach: Vec<Vec<usize>> =
        candidates.iter().map(|c| (0..gts.len()).filter(|&k| gts[k].within(*c, radius)).collect()).collect();

    let mut covered = vec![false; gts.len()];
    let mut plan = CoveragePlan { vbs: Vec::new(), clusters: Vec::new(), radius };
    while covered.iter().any(|c| !c) {
        let open: Vec<Point> = (0..gts.len()).filter(|&k| !covered[k]).map(|k| gts[k]).collect();
        let center = centroid(&open);
        let mut best = 0;
        let mut best_key = (0usize, f64::INFINITY);
        for (i, c) in candidates.iter().enumerate() {
            let hits = reach[i].iter().filter(|&&k| !covered[k]).count();
            let d = c.dist(center);
            if hits > best_key.0 || (hits == best_key.0 && d < best_key.1) {
                best = i;
                best_key = (hits, d);
            }
        }
        let members: Vec<usize> = reach[best].iter().copied().filter(|&k| !covered[k]).collect();
        for &k in &members {
            covered[k] = true;
        }
        plan.vbs.push(candidates[best]);
        plan.clusters.push(members);
    }
    plan
}

fn improve(gts: &[Point], plan: &mut CoveragePlan) {
    loop {
        eliminate_redundant(gts, plan);
        if !merge_groups(gts, plan) {
            return;
        }
    }
}

/// Re-covers groups of three or four nearby clusters with fewer disks when
/// an exact small cover exists. Returns whether the plan changed.
fn merge_groups(gts: &[Point], plan: &mut CoveragePlan) -> bool {
    let radius = plan.radius;
    for size in [3usize, 4, 5] {
        for g in 0..plan.len() {
            // nearby clusters by VBS distance, nearest first
            let mut near: Vec<usize> = (0..plan.len())
                .filter(|&h| h > g && plan.vbs[g].dist(plan.vbs[h]) <= 4.0 * radius + CONNECT_TOL)
                .collect();
            near.sort_by(|&a, &b| {
                plan.vbs[g].dist(plan.vbs[a]).total_cmp(&plan.vbs[g].dist(plan.vbs[b])).then(a.cmp(&b))
            });
            near.truncate(7);
            for rest in combinations(&near, size - 1) {
                let mut group = vec![g];
                group.extend(rest);
                if let Some(cover) = small_cover(gts, plan, &group, size - 1) {
                    group.sort_unstable();
                    for &c in group.iter().rev() {
                        plan.vbs.remove(c);
                        plan.clusters.remove(c);
                    }
                    for (v, members) in cover {
                        plan.vbs.push(v);
                        plan.clusters.push(members);
                    }
                    return true;
                }
            }
        }
    }
    false
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut tail in combinations(&items[i + 1..], k - 1) {
            tail.insert(0, x);
            out.push(tail);
        }
    }
    out
}

/// Cover of the union of `group`'s GTs by at most `limit` disks, if any.
fn small_cover(gts: &[Point], plan: &CoveragePlan, group: &[usize], limit: usize) -> Option<Vec<(Point, Vec<usize>)>> {
    let radius = plan.radius;
    let union: Vec<usize> = group.iter().flat_map(|&c| plan.clusters[c].iter().copied()).collect();
    if union.len() > 64 {
        return None;
    }
    let pts: Vec<Point> = union.iter().map(|&k| gts[k]).collect();
    let mut cands = pts.clone();
    for a in 0..pts.len() {
        for b in a + 1..pts.len() {
            cands.extend(circle_intersections(pts[a], pts[b], radius));
        }
    }
    let mask_of =
        |c: &Point| pts.iter().enumerate().filter(|(_, p)| p.within(*c, radius)).fold(0u64, |m, (j, _)| m | 1 << j);
    // keep only candidates whose coverage is not strictly contained in another's
    let mut sets: Vec<(u64, Point)> = Vec::new();
    for c in cands {
        let m = mask_of(&c);
        if !sets.iter().any(|(s, _)| s & m == m) {
            sets.retain(|(s, _)| s & m != *s);
            sets.push((m, c));
        }
    }
    let full = if pts.len() == 64 { u64::MAX } else { (1u64 << pts.len()) - 1 };
    let mut chosen = Vec::new();
    if !exact_cover(&sets, full, 0, limit, &mut chosen) {
        return None;
    }
    let mut covered = 0u64;
    Some(
        chosen
            .iter()
            .map(|&i| {
                let (m, v) = sets[i];
                let fresh = m & !covered;
                covered |= m;
                (v, (0..pts.len()).filter(|&j| fresh >> j & 1 == 1).map(|j| union[j]).collect())
            })
            .filter(|(_, members): &(Point, Vec<usize>)| !members.is_empty())
            .collect(),
    )
}

/// Depth-limited search branching on the lowest uncovered element.
fn exact_cover(sets: &[(u64, Point)], full: u64, covered: u64, budget: usize, chosen: &mut Vec<usize>) -> bool {
    if covered == full {
        return true;
    }
    if budget == 0 {
        return false;
    }
    let bit = (!covered & full).trailing_zeros();
    for (i, (m, _)) in sets.iter().enumerate() {
        if m >> bit & 1 == 1 {
            chosen.push(i);
            if exact_cover(sets, full, covered | m, budget - 1, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// Dissolves clusters whose members fit into other clusters, smallest first.
fn eliminate_redundant(gts: &[Point], plan: &mut CoveragePlan) {
    let radius = plan.radius;
    let feasible = |members: &[usize]| build_region(gts, members, radius).ok();
    loop {
        let mut by_size: Vec<usize> = (0..plan.len()).collect();
        by_size.sort_by_key(|&g| (plan.clusters[g].len(), g));
        let mut removed = None;
        for g in by_size {
            let mut trial = plan.clusters.clone();
            let moved = plan.clusters[g].iter().all(|&k| {
                let mut hosts: Vec<usize> = (0..trial.len()).filter(|&h| h != g).collect();
                hosts.sort_by(|&a, &b| gts[k].dist(plan.vbs[a]).total_cmp(&gts[k].dist(plan.vbs[b])).then(a.cmp(&b)));
                hosts.into_iter().any(|h| {
                    let mut grown = trial[h].clone();
                    grown.push(k);
                    let ok = feasible(&grown).is_some();
                    if ok {
                        trial[h] = grown;
                    }
                    ok
                })
            });
            if moved {
                for (h, members) in trial.iter().enumerate() {
                    if h != g && *members != plan.clusters[h] {
                        let region = feasible(members).expect("checked while moving");
                        plan.vbs[h] = region.project(plan.vbs[h]).expect("nonempty region");
                    }
                }
                trial.remove(g);
                plan.clusters = trial;
                plan.vbs.remove(g);
                removed = Some(g);
                break;
            }
        }
        if removed.is_none() {
            return;
        }
    }
}

/// Hull vertex with the smallest polar angle in `[0, 2π)` about `center`.
fn anchor_gt(pts: &[Point], center: Point) -> usize {
    let angle = |i: usize| {
        let v = pts[i] - center;
        let t = v.y.atan2(v.x);
        if t < 0.0 {
            t + std::f64::consts::TAU
        } else {
            t
        }
    };
    convex_hull(pts).into_iter().min_by(|&i, &j| angle(i).total_cmp(&angle(j)).then(i.cmp(&j))).unwrap_or(0)
}

/// Intersection of the radius-`D` disks around a cluster's GTs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionRegion {
    pub members: Vec<usize>,
    pub centers: Vec<Point>,
    pub radius: f64,
}

/// Builds the connection region of `members`, rejecting empty intersections.
pub fn build_region(gts: &[Point], members: &[usize], radius: f64) -> Result<ConnectionRegion> {
    if members.is_empty() {
        return Err(Error::Precondition("a connection region needs at least one member".into()));
    }
    if !(radius >= 0.0) {
        return Err(Error::Domain(format!("connection distance must be >= 0, got {radius}")));
    }
    let centers = members
        .iter()
        .map(|&k| gts.get(k).copied().ok_or_else(|| Error::Precondition(format!("no GT with index {k}"))))
        .collect::<Result<Vec<_>>>()?;
    let region = ConnectionRegion { members: members.to_vec(), centers, radius };
    if region.vertex_candidates().all(|c| !region.contains(c)) {
        return Err(Error::InfeasibleCluster(format!(
            "disks of radius {radius} around GTs {members:?} do not intersect"
        )));
    }
    Ok(region)
}

impl ConnectionRegion {
    /// `max_k ‖q − w_k‖ ≤ D` up to [`CONNECT_TOL`].
    pub fn contains(&self, q: Point) -> bool {
        self.centers.iter().all(|c| q.within(*c, self.radius))
    }

    /// Largest distance from `q` to a member GT.
    pub fn max_distance(&self, q: Point) -> f64 {
        self.centers.iter().map(|c| q.dist(*c)).fold(0.0, f64::max)
    }

    /// Disk centers and pairwise circle intersections: a nonempty region
    /// always contains one of them.
    fn vertex_candidates(&self) -> impl Iterator<Item = Point> + '_ {
        let n = self.centers.len();
        let pairs = (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)));
        self.centers
            .iter()
            .copied()
            .chain(pairs.flat_map(|(i, j)| circle_intersections(self.centers[i], self.centers[j], self.radius)))
    }

    /// Euclidean projection onto the region.
    ///
    /// The projection of an outside point lies either on a single circle
    /// (radial projection) or at an intersection of two circles; the nearest
    /// feasible such point is returned.
    pub fn project(&self, q: Point) -> Result<Point> {
        if self.contains(q) {
            return Ok(q);
        }
        let radial = self.centers.iter().filter_map(|&c| {
            let v = q - c;
            let n = v.norm();
            (n > 0.0).then(|| c + v * (self.radius / n))
        });
        let n = self.centers.len();
        let vertices = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .flat_map(|(i, j)| circle_intersections(self.centers[i], self.centers[j], self.radius));
        radial
            .chain(vertices)
            .chain(self.centers.iter().copied())
            .filter(|c| self.contains(*c))
            .min_by(|a, b| a.dist(q).total_cmp(&b.dist(q)))
            .ok_or_else(|| Error::InfeasibleCluster(format!("empty connection region for GTs {:?}", self.members)))
    }

    /// Projection by cyclic Dykstra iterations over the member disks.
    pub fn project_dykstra(&self, q: Point) -> Result<Point> {
        let n = self.centers.len();
        let mut x = q;
        let mut corr = vec![Point::default(); n];
        for _ in 0..DYKSTRA_MAX_CYCLES {
            let start = x;
            for (i, c) in self.centers.iter().enumerate() {
                let y = x + corr[i];
                let next = project_disk(y, *c, self.radius);
                corr[i] = y - next;
                x = next;
            }
            if x.dist(start) < DYKSTRA_TOL && self.contains_within(x, DYKSTRA_TOL) {
                return Ok(x);
            }
        }
        Err(Error::SolverFailure(format!(
            "Dykstra projection did not converge in {DYKSTRA_MAX_CYCLES} cycles for GTs {:?}",
            self.members
        )))
    }

    fn contains_within(&self, q: Point, tol: f64) -> bool {
        self.centers.iter().all(|c| q.dist(*c) <= self.radius + tol)
    }
}

fn project_disk(q: Point, center: Point, radius: f64) -> Point {
    let v = q - center;
    let n = v.norm();
    if n <= radius {
        q
    } else {
        center + v * (radius / n)
    }
}
