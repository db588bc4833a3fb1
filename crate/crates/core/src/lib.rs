//! Occupational gender bias auditing for sentiment classifiers.
//!
//! The crate is organised around a model-independent workflow:
//!
//! 1. [`corpus`] renders the `"<noun> is a/an <profession>."` template grid
//!    (20 noun pairs × 20 professions × 2 genders) plus a "person" control set.
//! 2. [`baseline`] is a bag-of-words tf-idf + L2 logistic regression sentiment
//!    model trained on SST-2 style data.
//! 3. Any model's positive-class probabilities are exchanged through the
//!    newline-delimited prediction protocol in [`io`].
//! 4. [`audit`] pairs female/male sentences and runs the paired t-tests,
//!    Bonferroni decisions and correlation analyses provided by [`stats`].

pub mod audit;
pub mod baseline;
pub mod corpus;
pub mod error;
pub mod io;
pub mod stats;

pub use error::{Error, Result};
