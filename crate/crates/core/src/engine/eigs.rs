//! The ranked, growing gate set used by weighted mutation.

use std::sync::Arc;

use rand::Rng;

use crate::gates::GateDef;

#[derive(Clone, Debug)]
pub struct EigsEntry {
    pub gate: Arc<GateDef>,
    pub token: String,
    pub usage: u64,
    /// Running mean fitness of the circuits the gate appeared in.
    pub gfitness: f64,
}

#[derive(Clone, Debug)]
pub struct Eigs {
    cap: usize,
    entries: Vec<EigsEntry>,
    refused: Vec<String>,
}

impl Eigs {
    pub fn new(cap: usize) -> Self {
        Self { cap, entries: Vec::new(), refused: Vec::new() }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Entries in rank order.
    pub fn entries(&self) -> &[EigsEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Gate ids whose insertion was refused because the set was full.
    pub fn refused(&self) -> &[String] {
        &self.refused
    }

    pub fn get(&self, gate_id: &str) -> Option<&EigsEntry> {
        self.entries.iter().find(|e| e.gate.id == gate_id)
    }

    /// Records one use of every listed gate (with its token) in a circuit
    /// of the given fitness, then re-ranks.
    pub fn update<'a, I>(&mut self, gates: I, fitness: f64)
    where
        I: IntoIterator<Item = (&'a Arc<GateDef>, String)>,
    {
        for (gate, token) in gates {
            let full = self.entries.len() >= self.cap;
            match self.entries.iter_mut().find(|e| e.gate.id == gate.id) {
                Some(e) => {
                    e.usage += 1;
                    e.gfitness += (fitness - e.gfitness) / e.usage as f64;
                }
                None if !full => {
                    self.entries.push(EigsEntry { gate: gate.clone(), token, usage: 1, gfitness: fitness });
                }
                None => {
                    if !self.refused.contains(&gate.id) {
                        self.refused.push(gate.id.clone());
                    }
                }
            }
        }
        self.rank();
    }

    fn rank(&mut self) {
        self.entries.sort_by(|a, b| {
            b.gfitness
                .total_cmp(&a.gfitness)
                .then(b.usage.cmp(&a.usage))
                .then_with(|| a.token.cmp(&b.token))
        });
    }

    /// Weighted draw: the entry under `r · Σgfitness` on the cumulative
    /// wheel, scanning forward (cyclically) past entries `admissible`
    /// rejects. `None` when nothing is admissible.
    pub fn pick<R, F>(&self, admissible: F, rng: &mut R) -> Option<&Arc<GateDef>>
    where
        R: Rng + ?Sized,
        F: Fn(&GateDef) -> bool,
    {
        let r = rng.gen::<f64>();
        self.pick_at(r, admissible)
    }

    pub fn pick_at<F>(&self, r: f64, admissible: F) -> Option<&Arc<GateDef>>
    where
        F: Fn(&GateDef) -> bool,
    {
        if self.entries.is_empty() {
            return None;
        }
        let total: f64 = self.entries.iter().map(|e| e.gfitness).sum();
        let point = r * total;
        let mut acc = 0.0;
        let start = self
            .entries
            .iter()
            .position(|e| {
                acc += e.gfitness;
                point < acc
            })
            .unwrap_or(self.entries.len() - 1);
        let n = self.entries.len();
        (0..n).map(|k| &self.entries[(start + k) % n].gate).find(|g| admissible(g))
    }
}
