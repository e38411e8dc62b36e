//! Placeholder; chapters are wired in once the book exists.
