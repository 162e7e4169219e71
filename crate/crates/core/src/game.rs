//! Empirical normal-form games over a finite strategy space and their
//! pure-strategy equilibria.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, ProfileIndex, Result};
use crate::factors::{CompanyPolicy, FactorRef, FactorTable, Level};
use crate::runner::PayoffSampleSet;
use crate::stats::SampleStats;

/// One strategy: a level assignment over the active factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Strategy {
    /// Optional display name; index-only strategies are told apart by it.
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub name: String,
    pub levels: Vec<(FactorRef, Level)>,
}

impl Strategy {
    pub fn from_levels(levels: Vec<(FactorRef, Level)>) -> Self {
        Strategy {
            name: String::new(),
            levels,
        }
    }

    pub fn named_index(i: usize) -> Self {
        Strategy {
            name: format!("s{i}"),
            levels: Vec::new(),
        }
    }

    pub fn label(&self) -> String {
        if !self.name.is_empty() {
            return self.name.clone();
        }
        if self.levels.is_empty() {
            return "default".into();
        }
        self.levels
            .iter()
            .map(|(f, l)| format!("{f}={l}"))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Inverse of [`Strategy::label`]: `factor=level` lists become level
    /// assignments, anything else becomes a plain name.
    pub fn from_label(label: &str) -> Self {
        if label == "default" {
            return Strategy::from_levels(Vec::new());
        }
        let parsed: Option<Vec<(FactorRef, Level)>> = label
            .split(',')
            .map(|part| {
                let (f, l) = part.split_once('=')?;
                let f: FactorRef = f.trim().parse().ok()?;
                let l: Level = serde_json::from_value(serde_json::Value::String(l.trim().into())).ok()?;
                Some((f, l))
            })
            .collect();
        match parsed {
            Some(levels) => Strategy::from_levels(levels),
            None => Strategy {
                name: label.to_string(),
                levels: Vec::new(),
            },
        }
    }

    /// The company policy this strategy induces on top of `base`.
    pub fn policy(&self, base: &CompanyPolicy) -> Result<CompanyPolicy> {
        self.policy_in(base, &FactorTable::default())
    }

    /// Like [`Strategy::policy`] with factor values looked up in `table`.
    pub fn policy_in(&self, base: &CompanyPolicy, table: &FactorTable) -> Result<CompanyPolicy> {
        let (factors, levels): (Vec<FactorRef>, Vec<Level>) = self.levels.iter().copied().unzip();
        base.with_levels_in(table, &factors, &levels)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategySpace {
    pub strategies: Vec<Strategy>,
    pub symmetric: bool,
}

impl StrategySpace {
    pub fn new(strategies: Vec<Strategy>, symmetric: bool) -> Result<Self> {
        if strategies.is_empty() {
            return Err(Error::param("strategy space is empty"));
        }
        for (i, a) in strategies.iter().enumerate() {
            if strategies[..i].contains(a) {
                return Err(Error::param(format!("duplicate strategy {}", a.label())));
            }
        }
        Ok(StrategySpace {
            strategies,
            symmetric,
        })
    }

    /// Abstract space of `n` strategies distinguished only by index.
    pub fn abstract_space(n: usize, symmetric: bool) -> Result<Self> {
        StrategySpace::new((0..n).map(Strategy::named_index).collect(), symmetric)
    }

    pub fn len(&self) -> usize {
        self.strategies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies.is_empty()
    }

    pub fn label(&self, i: usize) -> String {
        self.strategies[i].label()
    }
}

/// `(S^2 - S)/2 + S`: unordered strategy pairs plus the diagonal.
pub fn symmetric_profile_count(s: u64) -> u64 {
    (s * s - s) / 2 + s
}

/// Stored payoff information of one profile, oriented so that index 0 is
/// the player choosing the profile's first coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub stats: [SampleStats; 2],
    pub samples: Option<PayoffSampleSet>,
}

impl ProfileEntry {
    pub fn from_samples(samples: PayoffSampleSet) -> Self {
        ProfileEntry {
            stats: [samples.stats(0), samples.stats(1)],
            samples: Some(samples),
        }
    }

    pub fn from_means(u: [f64; 2]) -> Self {
        let st = |m| SampleStats {
            n: 1,
            mean: m,
            variance: 0.0,
        };
        ProfileEntry {
            stats: [st(u[0]), st(u[1])],
            samples: None,
        }
    }

    fn swapped(&self) -> Self {
        ProfileEntry {
            stats: [self.stats[1], self.stats[0]],
            samples: self.samples.as_ref().map(PayoffSampleSet::swapped),
        }
    }
}

/// Payoff table with sample statistics per profile.
///
/// Symmetric games store only profiles `(a, b)` with `a <= b`; the payoff of
/// `(b, a)` is read from the stored entry with players exchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalGame {
    pub space: StrategySpace,
    #[serde(with = "entry_list")]
    entries: BTreeMap<(usize, usize), ProfileEntry>,
}

/// JSON object keys must be strings, so profiles are stored as a list of
/// `[profile, entry]` pairs.
mod entry_list {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::ProfileEntry;

    pub fn serialize<S: Serializer>(
        m: &BTreeMap<(usize, usize), ProfileEntry>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let v: Vec<(&(usize, usize), &ProfileEntry)> = m.iter().collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<(usize, usize), ProfileEntry>, D::Error> {
        let v: Vec<((usize, usize), ProfileEntry)> = Vec::deserialize(d)?;
        Ok(v.into_iter().collect())
    }
}

impl EmpiricalGame {
    pub fn new(space: StrategySpace) -> Self {
        EmpiricalGame {
            space,
            entries: BTreeMap::new(),
        }
    }

    /// Symmetric game from player 1's payoff matrix `u[a][b]`.
    pub fn symmetric_from_matrix(u: &[Vec<f64>]) -> Result<Self> {
        let n = u.len();
        if u.iter().any(|r| r.len() != n) {
            return Err(Error::param("payoff matrix must be square"));
        }
        let mut g = EmpiricalGame::new(StrategySpace::abstract_space(n, true)?);
        for a in 0..n {
            for b in a..n {
                g.set_entry((a, b), ProfileEntry::from_means([u[a][b], u[b][a]]))?;
            }
        }
        Ok(g)
    }

    /// General two-player game from both players' payoff matrices.
    pub fn from_bimatrix(u1: &[Vec<f64>], u2: &[Vec<f64>]) -> Result<Self> {
        let n = u1.len();
        if u2.len() != n || u1.iter().chain(u2).any(|r| r.len() != n) {
            return Err(Error::param("payoff matrices must be square and of equal size"));
        }
        let mut g = EmpiricalGame::new(StrategySpace::abstract_space(n, false)?);
        for a in 0..n {
            for b in 0..n {
                g.set_entry((a, b), ProfileEntry::from_means([u1[a][b], u2[a][b]]))?;
            }
        }
        Ok(g)
    }

    pub fn num_strategies(&self) -> usize {
        self.space.len()
    }

    pub fn is_symmetric(&self) -> bool {
        self.space.symmetric
    }

    fn key(&self, (a, b): ProfileIndex) -> ((usize, usize), bool) {
        if self.space.symmetric && a > b {
            ((b, a), true)
        } else {
            ((a, b), false)
        }
    }

    fn check_index(&self, (a, b): ProfileIndex) -> Result<()> {
        let n = self.num_strategies();
        if a >= n || b >= n {
            return Err(Error::param(format!("profile ({a}, {b}) outside {n} strategies")));
        }
        Ok(())
    }

    /// Stores `entry`, oriented for `profile` as given.
    pub fn set_entry(&mut self, profile: ProfileIndex, entry: ProfileEntry) -> Result<()> {
        self.check_index(profile)?;
        for s in &entry.stats {
            if !s.mean.is_finite() {
                return Err(Error::State(format!(
                    "non-finite payoff mean for profile {profile:?}"
                )));
            }
        }
        let (key, flip) = self.key(profile);
        let entry = if flip { entry.swapped() } else { entry };
        self.entries.insert(key, entry);
        Ok(())
    }

    pub fn set_samples(&mut self, profile: ProfileIndex, samples: PayoffSampleSet) -> Result<()> {
        self.set_entry(profile, ProfileEntry::from_samples(samples))
    }

    /// Entry oriented for `profile`.
    pub fn entry(&self, profile: ProfileIndex) -> Option<ProfileEntry> {
        let (key, flip) = self.key(profile);
        self.entries
            .get(&key)
            .map(|e| if flip { e.swapped() } else { e.clone() })
    }

    /// Canonical profiles of a complete table: `a <= b` when symmetric.
    pub fn profile_keys(&self) -> Vec<ProfileIndex> {
        let n = self.num_strategies();
        let mut v = Vec::new();
        for a in 0..n {
            let start = if self.space.symmetric { a } else { 0 };
            for b in start..n {
                v.push((a, b));
            }
        }
        v
    }

    pub fn stored_profiles(&self) -> Vec<ProfileIndex> {
        self.entries.keys().copied().collect()
    }

    pub fn missing_profiles(&self) -> Vec<ProfileIndex> {
        self.profile_keys()
            .into_iter()
            .filter(|k| !self.entries.contains_key(k))
            .collect()
    }

    pub fn is_complete(&self) -> bool {
        self.missing_profiles().is_empty()
    }

    pub fn stats(&self, profile: ProfileIndex, player: usize) -> Result<SampleStats> {
        self.check_index(profile)?;
        let (key, flip) = self.key(profile);
        match self.entries.get(&key) {
            Some(e) => Ok(e.stats[if flip { 1 - player } else { player }]),
            None => Err(Error::IncompleteGame {
                missing: vec![profile],
            }),
        }
    }

    /// Mean payoff `u_player(profile)`.
    pub fn payoff(&self, profile: ProfileIndex, player: usize) -> Result<f64> {
        Ok(self.stats(profile, player)?.mean)
    }

    fn require_complete(&self) -> Result<()> {
        let missing = self.missing_profiles();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::IncompleteGame { missing })
        }
    }

    /// Per-player mean payoff transformed by `a * u + b`.
    pub fn affine(&self, a: f64, b: f64) -> EmpiricalGame {
        let mut g = self.clone();
        for e in g.entries.values_mut() {
            for s in &mut e.stats {
                s.mean = a * s.mean + b;
                s.variance *= a * a;
            }
            e.samples = None;
        }
        g
    }

    /// Exports the table as CSV. Rows are player 1's strategy, columns are
    /// player 2's; each cell is `mean;n;variance` for player 1, then `|`,
    /// then the same triple for player 2. Missing profiles are empty cells.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let n = self.num_strategies();
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![String::new()];
        header.extend((0..n).map(|i| self.space.label(i)));
        w.write_record(&header).map_err(crate::runner::csv_err)?;
        for a in 0..n {
            let mut row = vec![self.space.label(a)];
            for b in 0..n {
                let cell = match self.entry((a, b)) {
                    Some(e) => {
                        let mut c = String::new();
                        for (k, s) in e.stats.iter().enumerate() {
                            if k == 1 {
                                c.push('|');
                            }
                            let _ = write!(c, "{};{};{}", s.mean, s.n, s.variance);
                        }
                        c
                    }
                    None => String::new(),
                };
                row.push(cell);
            }
            w.write_record(&row).map_err(crate::runner::csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a table written by [`write_csv`](Self::write_csv). Strategies
    /// are rebuilt from the header labels; if the labels are not distinct
    /// the space falls back to index-named strategies.
    pub fn read_csv<R: Read>(input: R, symmetric: bool) -> Result<EmpiricalGame> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(input);
        let header = r.headers().map_err(crate::runner::csv_err)?.clone();
        let n = header.len().saturating_sub(1);
        let named: Vec<Strategy> = header.iter().skip(1).map(Strategy::from_label).collect();
        let space = StrategySpace::new(named, symmetric).or_else(|_| StrategySpace::abstract_space(n, symmetric))?;
        let mut g = EmpiricalGame::new(space);
        let mut rows = 0;
        for (a, rec) in r.records().enumerate() {
            let rec = rec.map_err(crate::runner::csv_err)?;
            if a >= n || rec.len() != n + 1 {
                return Err(Error::Parse(format!("payoff CSV row {} has wrong shape", a + 1)));
            }
            rows += 1;
            for b in 0..n {
                let cell = rec[b + 1].trim();
                if cell.is_empty() || (symmetric && a > b) {
                    continue;
                }
                let mut stats = [SampleStats {
                    n: 0,
                    mean: 0.0,
                    variance: 0.0,
                }; 2];
                let parts: Vec<&str> = cell.split('|').collect();
                if parts.len() != 2 {
                    return Err(Error::Parse(format!("cell ({a}, {b}): expected two payoff triples")));
                }
                for (k, part) in parts.iter().enumerate() {
                    let f: Vec<&str> = part.split(';').collect();
                    if f.len() != 3 {
                        return Err(Error::Parse(format!("cell ({a}, {b}): expected mean;n;variance")));
                    }
                    let bad = |_| Error::Parse(format!("cell ({a}, {b}): bad number in `{part}`"));
                    stats[k] = SampleStats {
                        mean: f[0].trim().parse().map_err(bad)?,
                        n: f[1].trim().parse().map_err(|_| Error::Parse(format!("cell ({a}, {b}): bad count")))?,
                        variance: f[2].trim().parse().map_err(bad)?,
                    };
                }
                g.set_entry((a, b), ProfileEntry { stats, samples: None })?;
            }
        }
        if rows != n {
            return Err(Error::Parse(format!("payoff CSV has {rows} rows for {n} columns")));
        }
        Ok(g)
    }
}

/// Profiles reachable by a unilateral deviation of `player`, including the
/// profile itself.
pub fn deviation_set(game: &EmpiricalGame, profile: ProfileIndex, player: usize) -> Vec<ProfileIndex> {
    (0..game.num_strategies())
        .map(|s| if player == 0 { (s, profile.1) } else { (profile.0, s) })
        .collect()
}

/// Largest gain `player` can obtain by switching to a different strategy.
pub fn player_regret(game: &EmpiricalGame, profile: ProfileIndex, player: usize) -> Result<f64> {
    let own = if player == 0 { profile.0 } else { profile.1 };
    let base = game.payoff(profile, player)?;
    let mut best = f64::NEG_INFINITY;
    let mut missing = Vec::new();
    for dev in deviation_set(game, profile, player) {
        let s = if player == 0 { dev.0 } else { dev.1 };
        if s == own {
            continue;
        }
        match game.payoff(dev, player) {
            Ok(u) => best = best.max(u - base),
            Err(Error::IncompleteGame { .. }) => missing.push(dev),
            Err(e) => return Err(e),
        }
    }
    if !missing.is_empty() {
        return Err(Error::IncompleteGame { missing });
    }
    if best == f64::NEG_INFINITY {
        return Err(Error::Undefined("regret needs at least two strategies".into()));
    }
    Ok(best)
}

/// Max over players of the best unilateral gain; negative at strict equilibria.
pub fn regret(game: &EmpiricalGame, profile: ProfileIndex) -> Result<f64> {
    Ok(player_regret(game, profile, 0)?.max(player_regret(game, profile, 1)?))
}

/// All strategies of `player` maximising its payoff against `other`.
pub fn best_responses(game: &EmpiricalGame, player: usize, other: usize) -> Result<Vec<usize>> {
    let n = game.num_strategies();
    let mut best = f64::NEG_INFINITY;
    let mut out = Vec::new();
    for s in 0..n {
        let prof = if player == 0 { (s, other) } else { (other, s) };
        let u = game.payoff(prof, player)?;
        if u > best {
            best = u;
            out.clear();
            out.push(s);
        } else if u == best {
            out.push(s);
        }
    }
    Ok(out)
}

fn is_eps_nash(game: &EmpiricalGame, profile: ProfileIndex, eps: f64) -> Result<bool> {
    for player in 0..2 {
        let base = game.payoff(profile, player)?;
        for dev in deviation_set(game, profile, player) {
            if game.payoff(dev, player)? > base + eps {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// All pure-strategy ε-Nash equilibria, as ordered profiles.
///
/// Best-response iteration from every profile seeds the candidate list, and
/// every profile is then checked against all unilateral deviations, so the
/// result is exactly the set satisfying the ε condition.
pub fn pure_nash(game: &EmpiricalGame, eps: f64) -> Result<Vec<ProfileIndex>> {
    if !(eps >= 0.0) {
        return Err(Error::param(format!("epsilon must be >= 0, got {eps}")));
    }
    game.require_complete()?;
    let n = game.num_strategies();
    let mut found = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if is_eps_nash(game, (a, b), eps)? {
                found.push((a, b));
            }
        }
    }
    Ok(found)
}

/// Mean of both players' payoffs at each profile, averaged over `profiles`.
pub fn mean_payoff(game: &EmpiricalGame, profiles: &[ProfileIndex]) -> Result<Option<f64>> {
    if profiles.is_empty() {
        return Ok(None);
    }
    let mut total = 0.0;
    for &p in profiles {
        total += (game.payoff(p, 0)? + game.payoff(p, 1)?) / 2.0;
    }
    Ok(Some(total / profiles.len() as f64))
}
