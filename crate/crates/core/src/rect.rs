//! Rectangle solver (stub while building).
