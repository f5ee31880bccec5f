use crate::graph::Limits;

/// Environment variable that overrides [`Config::max_atoms`].
pub const MAX_ATOMS_ENV: &str = "LABELANA_MAX_ATOMS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum CoverMode {
    SameLength,
    PrefixFree,
    #[default]
    Both,
}

impl CoverMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CoverMode::SameLength => "same-length",
            CoverMode::PrefixFree => "prefix-free",
            CoverMode::Both => "both",
        }
    }
}

/// Analysis settings. Every bound is at least 1.
#[derive(Clone, Debug)]
pub struct Config {
    /// Largest atom count for which the accommodating family and the core
    /// lattice are enumerated.
    pub max_atoms: usize,
    /// Multiplies every derived word-length search bound.
    pub word_bound_multiplier: usize,
    pub cover_mode: CoverMode,
    /// Admit `A ⊆ [v]` (the empty cover path) when deciding loop connection.
    pub allow_epsilon_cover: bool,
    pub limits: Limits,
    /// Cap on subset-automaton states.
    pub max_states: usize,
    /// Cap on loop words listed per base set.
    pub max_loops: usize,
    /// Largest atom count for which the naive closure cross-check runs.
    pub crosscheck_max_atoms: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            max_atoms: 16,
            word_bound_multiplier: 1,
            cover_mode: CoverMode::Both,
            allow_epsilon_cover: false,
            limits: Limits::default(),
            max_states: 1 << 16,
            max_loops: 8,
            crosscheck_max_atoms: 8,
        }
    }
}

impl Config {
    /// Applies `LABELANA_MAX_ATOMS` if set to a positive integer.
    pub fn with_env_overrides(mut self) -> Self {
        if let Some(n) = std::env::var(MAX_ATOMS_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .filter(|&n| n >= 1)
        {
            self.max_atoms = n;
        }
        self
    }
}
