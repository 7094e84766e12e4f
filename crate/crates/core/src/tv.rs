//! TV oracle (stub while building).
