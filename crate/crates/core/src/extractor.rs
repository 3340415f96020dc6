//! The Reed-Solomon condenser, the block-source converter and block-source
//! extractor composition.
//!
//! `RSCon_{n,m,K}(x, y) = (y, f_x(y), f_x(ζy), .., f_x(ζ^{m-2} y))` with
//! `f_x(Y) = Σ x_i Y^i` and ζ the generator of K. The seed coordinate comes
//! first in the output.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf::{Extension, Field};
use crate::samplers::{Node, SamplerSpec};

/// `RSCon_{n,m,q}` over the base field itself.
pub fn rscon(field: &Field, n: usize, m: usize) -> Result<SamplerSpec> {
    rscon_over(&Arc::new(Extension::new(field, 1)?), n, m)
}

/// `RSCon_{n,m,Q}` over an extension, flattened to base coordinates.
///
/// Rejects `m - 1 > |K| - 1`: the ζ-powers would wrap and repeat points.
pub fn rscon_over(ext: &Arc<Extension>, n: usize, m: usize) -> Result<SamplerSpec> {
    if n == 0 || m == 0 {
        return Err(Error::Param("rscon needs n >= 1 and m >= 1".into()));
    }
    let k = ext.ext();
    if (m as u64 - 1) > k.q() - 1 {
        return Err(Error::Param(format!(
            "rscon with m = {m} needs {} distinct evaluation points but F_{} has only {} nonzero elements",
            m - 1,
            k.q(),
            k.q() - 1
        )));
    }
    let zeta_pows = (0..m - 1).map(|j| k.pow(k.zeta(), j as u64)).collect();
    let dd = ext.degree();
    Ok(SamplerSpec::from_node(
        ext.base(),
        n * dd,
        dd,
        m * dd,
        n as u64,
        Node::RsCon { n, m, ext: ext.clone(), zeta_pows },
    ))
}

/// `BlkCnvt_{n,(m_1..m_s),q}(x, y) = (RSCon_{n,m_1}(x, y_1), .., RSCon_{n,m_s}(x, y_s))`.
pub fn blkcnvt(field: &Field, n: usize, blocks: &[usize]) -> Result<SamplerSpec> {
    if blocks.is_empty() {
        return Err(Error::Param("blkcnvt needs at least one block".into()));
    }
    let parts = blocks.iter().map(|&mi| rscon(field, n, mi)).collect::<Result<Vec<_>>>()?;
    let m = blocks.iter().sum();
    Ok(SamplerSpec::from_node(field, n, blocks.len(), m, n as u64, Node::BlkCnvt { n, parts }))
}

/// Block-source extractor composition of `E_1, .., E_s` (stored left to
/// right). Input `((x_1, .., x_s), y_s)`; `E_i` is applied for
/// `i = s, .., 1`, its output split into the seed `y_{i-1}` for `E_{i-1}`
/// and the output block `z_i`.
pub fn blkext(parts: &[SamplerSpec]) -> Result<SamplerSpec> {
    let first = parts.first().ok_or_else(|| Error::Param("blkext needs at least one extractor".into()))?;
    let field = first.field().clone();
    let mut prev_d = 0;
    let mut m = 0;
    let mut degree = 1u64;
    for (i, p) in parts.iter().enumerate() {
        if p.field() != &field {
            return Err(Error::FieldMismatch);
        }
        if p.m() < prev_d {
            return Err(Error::Dimension(format!(
                "blkext: extractor {} outputs {} coordinates but extractor {} needs a seed of {prev_d}",
                i + 1,
                p.m(),
                i
            )));
        }
        m += p.m() - prev_d;
        degree = degree.saturating_mul(p.degree().max(1));
        prev_d = p.d();
    }
    let n = parts.iter().map(SamplerSpec::n).sum();
    Ok(SamplerSpec::from_node(&field, n, prev_d, m, degree, Node::BlkExt { parts: parts.to_vec() }))
}
