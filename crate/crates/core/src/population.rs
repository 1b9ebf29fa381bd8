use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::problem::{evaluate, Problem};
use crate::rng::RngStream;

/// `mu` strings of `n` i.i.d. uniform bits.
pub fn random_population(mu: usize, n: usize, rng: &mut RngStream) -> Vec<BitString> {
    (0..mu).map(|_| BitString::random(n, rng)).collect()
}

/// Population, archive and bookkeeping of a running optimizer.
#[derive(Debug, Clone)]
pub struct PopulationState {
    pub population: Vec<BitString>,
    pub fitness: Vec<f64>,
    pub archive: Vec<BitString>,
    /// Fitness recorded when each archive member was evaluated.
    /// Members of the initial random archive were never evaluated and
    /// carry `f64::NEG_INFINITY`.
    pub archive_fitness: Vec<f64>,
    /// Best solution ever evaluated during the run.
    pub best: BitString,
    pub best_fitness: f64,
    pub generation: usize,
    pub fe_count: u64,
    /// Evaluations spent on the initial population.
    pub init_fe: u64,
}

impl PopulationState {
    /// Draws the initial population and archive and evaluates the population.
    pub fn initialize(problem: &dyn Problem, mu: usize, rng: &mut RngStream) -> Result<Self> {
        if mu == 0 {
            return Err(Error::InvalidConfig("population size must be positive".into()));
        }
        let n = problem.n_bits();
        let population = random_population(mu, n, rng);
        let archive = random_population(mu, n, rng);
        let mut fe_count = 0;
        let fitness = population
            .iter()
            .map(|x| evaluate(problem, x, &mut fe_count, rng))
            .collect::<Result<Vec<_>>>()?;
        let top = argmax(&fitness);
        Ok(PopulationState {
            best: population[top].clone(),
            best_fitness: fitness[top],
            population,
            fitness,
            archive,
            archive_fitness: vec![f64::NEG_INFINITY; mu],
            generation: 0,
            fe_count,
            init_fe: fe_count,
        })
    }

    pub fn mu(&self) -> usize {
        self.population.len()
    }

    /// Evaluates `bits` against the run's counter and best-ever record.
    pub fn evaluate(
        &mut self,
        problem: &dyn Problem,
        bits: &BitString,
        rng: &mut RngStream,
    ) -> Result<f64> {
        let f = evaluate(problem, bits, &mut self.fe_count, rng)?;
        if f > self.best_fitness {
            self.best_fitness = f;
            self.best = bits.clone();
        }
        Ok(f)
    }

    /// Index of the best current individual; the lowest index wins ties.
    pub fn best_index(&self) -> usize {
        argmax(&self.fitness)
    }
}

/// First index of the maximum; NaN entries never win.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}
