//! FMD duality (stub while building).
