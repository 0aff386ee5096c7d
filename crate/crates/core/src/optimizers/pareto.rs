//! Pareto dominance, non-dominated sorting, the archive and 2-D hypervolume.

use crate::objectives::Individual;

/// `a` dominates `b` under minimization. A vector with an infinite first
/// objective (degenerate equation) is dominated by every vector whose first
/// objective is finite.
pub fn dominates(a: &[f64; 2], b: &[f64; 2]) -> bool {
    match (a[0].is_finite(), b[0].is_finite()) {
        (true, false) => return true,
        (false, true) => return false,
        _ => {}
    }
    a[0] <= b[0] && a[1] <= b[1] && a != b
}

/// Splits indices of `points` into fronts of ascending rank. Within a front
/// indices keep their input order.
pub fn nondominated_sort(points: &[[f64; 2]]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by = vec![0usize; n];
    let mut dominating: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if i != j && dominates(&points[i], &points[j]) {
                dominating[i].push(j);
            } else if i != j && dominates(&points[j], &points[i]) {
                dominated_by[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominating[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Fronts of a population of individuals.
pub fn sort_individuals(individuals: &[Individual]) -> Vec<Vec<usize>> {
    let pts: Vec<[f64; 2]> = individuals.iter().map(|i| i.objectives.as_vector()).collect();
    nondominated_sort(&pts)
}

/// Area dominated by `points` and bounded by `reference`. Points outside the
/// reference box contribute nothing.
pub fn hypervolume(points: &[[f64; 2]], reference: [f64; 2]) -> f64 {
    let mut pts: Vec<[f64; 2]> = points
        .iter()
        .copied()
        .filter(|p| p[0] < reference[0] && p[1] < reference[1])
        .collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut area = 0.0;
    let mut ceiling = reference[1];
    for p in pts {
        if p[1] < ceiling {
            area += (reference[0] - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    area
}

/// Every non-dominated individual seen during a run, plus the ideal point.
#[derive(Debug, Clone, Default)]
pub struct ParetoArchive {
    individuals: Vec<Individual>,
    ideal: Option<[f64; 2]>,
}

impl ParetoArchive {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn individuals(&self) -> &[Individual] {
        &self.individuals
    }

    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    /// Componentwise minimum over all offered finite objective vectors.
    pub fn ideal(&self) -> Option<[f64; 2]> {
        self.ideal
    }

    pub(crate) fn observe(&mut self, v: [f64; 2]) {
        if !v[0].is_finite() {
            return;
        }
        self.ideal = Some(match self.ideal {
            None => v,
            Some(z) => [z[0].min(v[0]), z[1].min(v[1])],
        });
    }

    /// Offers an individual; returns whether it entered the archive.
    pub fn insert(&mut self, ind: &Individual) -> bool {
        let v = ind.objectives.as_vector();
        self.observe(v);
        if !v[0].is_finite() {
            return false;
        }
        let canonical = ind.canonical();
        for existing in &self.individuals {
            let e = existing.objectives.as_vector();
            if dominates(&e, &v) || (e == v && existing.canonical() == canonical) {
                return false;
            }
        }
        self.individuals.retain(|e| !dominates(&v, &e.objectives.as_vector()));
        self.individuals.push(ind.clone());
        true
    }

    /// Individual with the smallest discrepancy (ties: lower complexity).
    pub fn best_q_op(&self) -> Option<&Individual> {
        self.individuals
            .iter()
            .min_by(|a, b| a.q_op().total_cmp(&b.q_op()).then(a.complexity().cmp(&b.complexity())))
    }

    pub fn hypervolume(&self, reference: [f64; 2]) -> f64 {
        let pts: Vec<[f64; 2]> = self.individuals.iter().map(|i| i.objectives.as_vector()).collect();
        hypervolume(&pts, reference)
    }
}
