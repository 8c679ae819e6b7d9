//! CPLEX LP-format export of the p-median integer program.
//!
//! Variables: `y_j` opens a facility at node `j`; `x_i_j` assigns node `i` to
//! facility `j`. Rows: `assign_i` (each node served once), `link_i_j`
//! (`x_i_j <= y_j`) and `card` (exactly `p` facilities). Objective
//! coefficients are `demand_i * d_ij`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{Instance, InstanceError};

const TERMS_PER_LINE: usize = 8;

fn write_terms<W: Write>(out: &mut W, terms: impl Iterator<Item = String>) -> std::io::Result<()> {
    for (k, term) in terms.enumerate() {
        if k > 0 {
            if k % TERMS_PER_LINE == 0 {
                write!(out, "\n   ")?;
            }
            write!(out, " + ")?;
        }
        write!(out, "{term}")?;
    }
    writeln!(out)
}

pub fn write_ilp<W: Write>(
    instance: &Instance,
    p: usize,
    out: &mut W,
) -> Result<(), InstanceError> {
    let n = instance.n();
    if p == 0 || p > n {
        return Err(InstanceError::InvalidP { p, n });
    }
    writeln!(
        out,
        "\\ p-median model: n = {n}, p = {p}, generator = {}",
        instance.meta().generator
    )?;
    writeln!(out, "Minimize")?;
    write!(out, " obj: ")?;
    let demand = instance.demand();
    write_terms(
        out,
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| format!("{} x_{i}_{j}", demand[i] * instance.d(i, j))),
    )?;
    writeln!(out, "Subject To")?;
    for i in 0..n {
        write!(out, " assign_{i}: ")?;
        write_terms(out, (0..n).map(|j| format!("x_{i}_{j}")))?;
        writeln!(out, "   = 1")?;
    }
    for i in 0..n {
        for j in 0..n {
            writeln!(out, " link_{i}_{j}: x_{i}_{j} - y_{j} <= 0")?;
        }
    }
    write!(out, " card: ")?;
    write_terms(out, (0..n).map(|j| format!("y_{j}")))?;
    writeln!(out, "   = {p}")?;
    writeln!(out, "Binary")?;
    for i in 0..n {
        for j in 0..n {
            writeln!(out, " x_{i}_{j}")?;
        }
    }
    for j in 0..n {
        writeln!(out, " y_{j}")?;
    }
    writeln!(out, "End")?;
    Ok(())
}

/// Writes the model for `p` facilities to `path`.
pub fn export_ilp(
    instance: &Instance,
    p: usize,
    path: impl AsRef<Path>,
) -> Result<(), InstanceError> {
    let n = instance.n();
    if p == 0 || p > n {
        return Err(InstanceError::InvalidP { p, n });
    }
    let mut out = BufWriter::new(File::create(path)?);
    write_ilp(instance, p, &mut out)?;
    out.flush()?;
    Ok(())
}
