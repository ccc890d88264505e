//! Initial-data generators and the binary field container.
//!
//! Generators produce divergence-free, mean-free fields deterministically
//! per seed (the random kind draws from a ChaCha12 stream). The container
//! is self-describing and fully little-endian: a fixed 64-byte header,
//! then `(re, im)` doubles for each component of each lattice point in
//! lexicographic wavenumber order.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{CoreError, Result};
use crate::field::FourierVectorField;
use crate::grid::SpectralGrid;

/// Which analytic family or random ensemble to draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    /// Complex Gaussian coefficients with `|k|^{-s}` decay on
    /// `0 < |k| <= kmax`, Hermitian-symmetrized, Leray-projected.
    Random,
    /// `(sin x_2, 0, ..., 0)`: a single conjugate pair.
    Shear,
    /// `(sin x_1 cos x_2, -cos x_1 sin x_2)`; two dimensions only.
    TaylorGreen2d,
    /// `amplitude * a` placed at `+-k` with `a` orthogonal to `k`.
    SingleMode,
}

impl GeneratorKind {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorKind::Random => "random",
            GeneratorKind::Shear => "shear",
            GeneratorKind::TaylorGreen2d => "taylor_green_2d",
            GeneratorKind::SingleMode => "single_mode",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(GeneratorKind::Random),
            "shear" => Ok(GeneratorKind::Shear),
            "taylor_green_2d" => Ok(GeneratorKind::TaylorGreen2d),
            "single_mode" => Ok(GeneratorKind::SingleMode),
            other => Err(CoreError::InvalidGenerator {
                reason: format!("unknown generator kind {other:?}"),
            }),
        }
    }
}

/// Full recipe for one initial-data field.
#[derive(Debug, Clone)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub seed: u64,
    /// Coefficient magnitude decays like `|k|^{-s}` (random kind).
    pub decay_exponent: f64,
    /// Spectral support radius; must stay below the Nyquist plane.
    pub kmax: usize,
    pub amplitude: f64,
    /// Wavenumber of the single-mode kind.
    pub mode_k: Option<Vec<i64>>,
    /// Polarization of the single-mode kind.
    pub mode_a: Option<Vec<f64>>,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, seed: u64) -> Self {
        Self {
            kind,
            seed,
            decay_exponent: 2.0,
            kmax: 0, // 0 = derive n/2 - 1 from the grid
            amplitude: 1.0,
            mode_k: None,
            mode_a: None,
        }
    }
}

/// A generated field plus advisory notes about adjustments made.
#[derive(Debug, Clone)]
pub struct GeneratedField {
    pub field: FourierVectorField,
    /// Set when a single-mode polarization had to be projected onto the
    /// plane orthogonal to its wavenumber.
    pub polarization_projected: bool,
}

/// Realize the recipe on the given grid; see [`generate_detailed`]
/// for the advisory notes.
pub fn generate(spec: &GeneratorSpec, grid: &Arc<SpectralGrid>) -> Result<FourierVectorField> {
    Ok(generate_detailed(spec, grid)?.field)
}

pub fn generate_detailed(spec: &GeneratorSpec, grid: &Arc<SpectralGrid>) -> Result<GeneratedField> {
    if spec.decay_exponent < 0.0 {
        return Err(CoreError::InvalidGenerator {
            reason: format!("decay exponent {} is negative", spec.decay_exponent),
        });
    }
    let n = grid.modes_per_axis();
    let kmax = if spec.kmax == 0 { n / 2 - 1 } else { spec.kmax };
    if kmax > n / 2 - 1 {
        return Err(CoreError::InvalidGenerator {
            reason: format!("kmax {} reaches the Nyquist plane of n = {n}", kmax),
        });
    }
    match spec.kind {
        GeneratorKind::Random => random_field(spec, grid, kmax),
        GeneratorKind::Shear => shear_field(spec, grid),
        GeneratorKind::TaylorGreen2d => taylor_green(spec, grid),
        GeneratorKind::SingleMode => single_mode(spec, grid, kmax),
    }
}

fn random_field(
    spec: &GeneratorSpec,
    grid: &Arc<SpectralGrid>,
    kmax: usize,
) -> Result<GeneratedField> {
    let d = grid.dim();
    let num = grid.num_modes();
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    let mut coeffs = vec![Complex64::default(); num * d];
    // Draw on the canonical half of each conjugate pair (ascending flat
    // index), mirror to the other half: Hermitian by construction, and
    // the draw order is fixed so equal seeds give equal fields.
    for flat in 1..num {
        let conj = grid.conjugate_index(flat);
        if conj < flat || grid.is_nyquist(flat) {
            continue;
        }
        let mag = grid.kmag(flat);
        if mag > kmax as f64 {
            continue;
        }
        let decay = mag.powf(-spec.decay_exponent);
        for c in 0..d {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let v = Complex64::new(re, im) * decay;
            coeffs[c * num + flat] = v;
            coeffs[c * num + conj] = v.conj();
        }
    }
    let raw = FourierVectorField::from_coeffs(grid.clone(), coeffs);
    let projected = raw.leray_project();
    let field = projected.scale_per_mode(|_| spec.amplitude);
    Ok(GeneratedField { field, polarization_projected: false })
}

fn shear_field(spec: &GeneratorSpec, grid: &Arc<SpectralGrid>) -> Result<GeneratedField> {
    let d = grid.dim();
    // (sin x_2, 0, ..., 0): one pair at k = +-e_2.
    let mut k = vec![0i64; d];
    k[1] = 1;
    let mut value = vec![Complex64::default(); d];
    value[0] = Complex64::new(0.0, -0.5 * spec.amplitude);
    let field = FourierVectorField::from_pairs(grid.clone(), &[(&k, &value)])?;
    Ok(GeneratedField { field, polarization_projected: false })
}

fn taylor_green(spec: &GeneratorSpec, grid: &Arc<SpectralGrid>) -> Result<GeneratedField> {
    if grid.dim() != 2 {
        return Err(CoreError::InvalidGenerator {
            reason: format!("taylor_green_2d needs d = 2, got d = {}", grid.dim()),
        });
    }
    let a = spec.amplitude;
    let i4 = Complex64::new(0.0, 0.25 * a);
    // Exact coefficients of (sin x1 cos x2, -cos x1 sin x2).
    let field = FourierVectorField::from_pairs(
        grid.clone(),
        &[
            (&[1, 1], &[-i4, i4]),
            (&[1, -1], &[-i4, -i4]),
        ],
    )?;
    Ok(GeneratedField { field, polarization_projected: false })
}

fn single_mode(
    spec: &GeneratorSpec,
    grid: &Arc<SpectralGrid>,
    kmax: usize,
) -> Result<GeneratedField> {
    let d = grid.dim();
    let k = spec.mode_k.clone().unwrap_or_else(|| {
        let mut k = vec![0i64; d];
        k[0] = 1;
        k
    });
    let a = spec.mode_a.clone().unwrap_or_else(|| {
        let mut a = vec![0.0; d];
        a[1] = 1.0;
        a
    });
    if k.len() != d || a.len() != d {
        return Err(CoreError::InvalidGenerator {
            reason: "single_mode wavenumber/polarization dimension mismatch".into(),
        });
    }
    let ksq: i64 = k.iter().map(|&c| c * c).sum();
    if ksq == 0 || (ksq as f64).sqrt() > kmax as f64 + 1e-12 {
        return Err(CoreError::InvalidGenerator {
            reason: format!("single_mode wavenumber {k:?} is zero or beyond kmax {kmax}"),
        });
    }
    let dot: f64 = k.iter().zip(&a).map(|(&ki, &ai)| ki as f64 * ai).sum();
    let mut polarization_projected = false;
    let mut a_perp = a.clone();
    if dot != 0.0 {
        // Leray-project the polarization and flag the adjustment.
        polarization_projected = true;
        for (ai, &ki) in a_perp.iter_mut().zip(&k) {
            *ai -= dot * ki as f64 / ksq as f64;
        }
        if a_perp.iter().map(|x| x * x).sum::<f64>() < 1e-28 {
            return Err(CoreError::InvalidGenerator {
                reason: format!("single_mode polarization {a:?} is parallel to {k:?}"),
            });
        }
    }
    let value: Vec<Complex64> = a_perp
        .iter()
        .map(|&ai| Complex64::new(spec.amplitude * ai, 0.0))
        .collect();
    let field = FourierVectorField::from_pairs(grid.clone(), &[(&k, &value)])?;
    Ok(GeneratedField { field, polarization_projected })
}

// --- binary container -------------------------------------------------

const MAGIC: &[u8; 8] = b"SUBSOLFD";
const FORMAT_VERSION: u32 = 1;
const NORM_TAG: &str = "parseval-unit";
const FLAG_SOLENOIDAL: u32 = 1;
const HEADER_LEN: usize = 64;

fn fixed_tag(s: &str) -> [u8; 16] {
    let mut out = [0u8; 16];
    for (slot, b) in out.iter_mut().zip(s.bytes()) {
        *slot = b;
    }
    out
}

fn read_tag(bytes: &[u8]) -> String {
    let end = bytes.iter().position(|&b| b == 0).unwrap_or(bytes.len());
    String::from_utf8_lossy(&bytes[..end]).into_owned()
}

/// Write the field with an `"unspecified"` provenance tag.
pub fn save_field(field: &FourierVectorField, path: &Path) -> Result<()> {
    save_field_with_provenance(field, path, "unspecified")
}

/// Write the field, recording where its coefficients came from (for
/// example the generator kind or RNG algorithm). The header field holds
/// 16 bytes; longer tags are truncated.
pub fn save_field_with_provenance(
    field: &FourierVectorField,
    path: &Path,
    provenance: &str,
) -> Result<()> {
    let grid = field.grid();
    let d = grid.dim();
    let n = grid.modes_per_axis();
    let payload_len = (grid.num_modes() * d * 16) as u64;
    let mut out = Vec::with_capacity(HEADER_LEN + payload_len as usize);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(d as u32).to_le_bytes());
    out.extend_from_slice(&(n as u32).to_le_bytes());
    let flags = if field.is_solenoidal() { FLAG_SOLENOIDAL } else { 0 };
    out.extend_from_slice(&flags.to_le_bytes());
    out.extend_from_slice(&fixed_tag(NORM_TAG));
    out.extend_from_slice(&fixed_tag(provenance));
    out.extend_from_slice(&payload_len.to_le_bytes());
    debug_assert_eq!(out.len(), HEADER_LEN);
    // Lexicographic lattice order: each component runs -n/2+1 ..= n/2.
    let mut k = vec![-(n as i64) / 2 + 1; d];
    loop {
        let flat = grid.flat_index(&k).expect("lexicographic walk stays on the lattice");
        for c in 0..d {
            let v = field.coeff(flat, c);
            out.extend_from_slice(&v.re.to_le_bytes());
            out.extend_from_slice(&v.im.to_le_bytes());
        }
        // Increment the lexicographic counter, last axis fastest.
        let mut axis = d;
        loop {
            if axis == 0 {
                break;
            }
            axis -= 1;
            if k[axis] < (n as i64) / 2 {
                k[axis] += 1;
                break;
            }
            k[axis] = -(n as i64) / 2 + 1;
        }
        if axis == 0 && k[0] == -(n as i64) / 2 + 1 {
            break;
        }
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(&out)?;
    Ok(())
}

/// Parsed header of a field container.
#[derive(Debug, Clone)]
pub struct FieldHeader {
    pub d: usize,
    pub n: usize,
    pub solenoidal: bool,
    pub normalization: String,
    pub provenance: String,
}

/// Load a field; the container is self-describing, so the grid comes
/// from the header. Truncation, version, and size mismatches are
/// distinct errors and never yield a partial field.
pub fn load_field(path: &Path) -> Result<(FourierVectorField, FieldHeader)> {
    let bytes = std::fs::read(path)?;
    if bytes.len() < 8 {
        return Err(CoreError::Truncated { expected: HEADER_LEN as u64, got: bytes.len() as u64 });
    }
    if &bytes[..8] != MAGIC {
        return Err(CoreError::BadMagic);
    }
    if bytes.len() < HEADER_LEN {
        return Err(CoreError::Truncated { expected: HEADER_LEN as u64, got: bytes.len() as u64 });
    }
    let u32_at = |off: usize| u32::from_le_bytes(bytes[off..off + 4].try_into().unwrap());
    let version = u32_at(8);
    if version != FORMAT_VERSION {
        return Err(CoreError::VersionMismatch { found: version, expected: FORMAT_VERSION });
    }
    let d = u32_at(12) as usize;
    let n = u32_at(16) as usize;
    let flags = u32_at(20);
    let normalization = read_tag(&bytes[24..40]);
    let provenance = read_tag(&bytes[40..56]);
    let declared = u64::from_le_bytes(bytes[56..64].try_into().unwrap());
    if normalization != NORM_TAG {
        return Err(CoreError::NormalizationMismatch {
            found: normalization,
            expected: NORM_TAG.to_string(),
        });
    }
    let grid = Arc::new(SpectralGrid::new(d, n)?);
    let required = (grid.num_modes() * d * 16) as u64;
    if declared != required {
        return Err(CoreError::HeaderPayloadMismatch { declared, d, n, required });
    }
    let body = &bytes[HEADER_LEN..];
    if (body.len() as u64) < required {
        return Err(CoreError::Truncated { expected: required, got: body.len() as u64 });
    }
    if (body.len() as u64) > required {
        return Err(CoreError::HeaderPayloadMismatch {
            declared: body.len() as u64,
            d,
            n,
            required,
        });
    }
    let num = grid.num_modes();
    let mut coeffs = vec![Complex64::default(); num * d];
    let mut k = vec![-(n as i64) / 2 + 1; d];
    let mut off = 0usize;
    loop {
        let flat = grid.flat_index(&k).expect("lexicographic walk stays on the lattice");
        for c in 0..d {
            let re = f64::from_le_bytes(body[off..off + 8].try_into().unwrap());
            let im = f64::from_le_bytes(body[off + 8..off + 16].try_into().unwrap());
            coeffs[c * num + flat] = Complex64::new(re, im);
            off += 16;
        }
        let mut axis = d;
        loop {
            if axis == 0 {
                break;
            }
            axis -= 1;
            if k[axis] < (n as i64) / 2 {
                k[axis] += 1;
                break;
            }
            k[axis] = -(n as i64) / 2 + 1;
        }
        if axis == 0 && k[0] == -(n as i64) / 2 + 1 {
            break;
        }
    }
    let field = FourierVectorField::from_coeffs(grid, coeffs);
    let header = FieldHeader {
        d,
        n,
        solenoidal: flags & FLAG_SOLENOIDAL != 0,
        normalization,
        provenance,
    };
    Ok((field, header))
}

/// Load and require a particular grid, for callers that know what they
/// expect (the dimension check of batch pipelines).
pub fn load_field_for_grid(path: &Path, grid: &SpectralGrid) -> Result<FourierVectorField> {
    let (field, _) = load_field(path)?;
    grid.expect_same(field.grid())?;
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::sample_coords;
    use crate::transform::inverse_transform;

    fn grid(d: usize, n: usize) -> Arc<SpectralGrid> {
        Arc::new(SpectralGrid::new(d, n).unwrap())
    }

    #[test]
    fn taylor_green_matches_its_analytic_samples_and_is_divergence_free() {
        let g = grid(2, 16);
        let spec = GeneratorSpec::new(GeneratorKind::TaylorGreen2d, 0);
        let f = generate(&spec, &g).unwrap();
        assert!(f.is_solenoidal());
        assert!(f.validate_solenoidal(1e-14).is_ok());
        let s = inverse_transform(&f).unwrap();
        let mut x = vec![0.0; 2];
        for p in 0..s.num_points() {
            sample_coords(p, 16, &mut x);
            let v = s.value(p);
            assert!((v[0] - x[0].sin() * x[1].cos()).abs() < 1e-13);
            assert!((v[1] + x[0].cos() * x[1].sin()).abs() < 1e-13);
        }
    }

    #[test]
    fn shear_is_one_conjugate_pair() {
        let g = grid(3, 8);
        let spec = GeneratorSpec::new(GeneratorKind::Shear, 0);
        let f = generate(&spec, &g).unwrap();
        let mut nonzero = 0;
        for flat in 0..g.num_modes() {
            for c in 0..3 {
                if f.coeff(flat, c).norm() > 0.0 {
                    nonzero += 1;
                }
            }
        }
        assert_eq!(nonzero, 2);
        assert!(f.is_solenoidal());
    }

    #[test]
    fn random_fields_are_deterministic_per_seed_and_solenoidal() {
        let g = grid(2, 16);
        let mut spec = GeneratorSpec::new(GeneratorKind::Random, 7);
        spec.kmax = 5;
        let a = generate(&spec, &g).unwrap();
        let b = generate(&spec, &g).unwrap();
        for flat in 0..g.num_modes() {
            for c in 0..2 {
                let (x, y) = (a.coeff(flat, c), b.coeff(flat, c));
                assert_eq!(x.re.to_bits(), y.re.to_bits());
                assert_eq!(x.im.to_bits(), y.im.to_bits());
            }
        }
        assert!(a.validate_solenoidal(1e-14).is_ok());
        let other = generate(&GeneratorSpec { seed: 8, ..spec.clone() }, &g).unwrap();
        assert!(a.difference(&other).unwrap().max_coeff_norm() > 0.0);
    }

    #[test]
    fn random_field_respects_spectral_support() {
        let g = grid(2, 32);
        let mut spec = GeneratorSpec::new(GeneratorKind::Random, 3);
        spec.kmax = 4;
        let f = generate(&spec, &g).unwrap();
        for (flat, _) in g.modes() {
            if g.kmag(flat) > 4.0 {
                for c in 0..2 {
                    assert_eq!(f.coeff(flat, c), Complex64::default());
                }
            }
        }
    }

    #[test]
    fn single_mode_projects_bad_polarization_and_flags_it() {
        let g = grid(2, 8);
        let mut spec = GeneratorSpec::new(GeneratorKind::SingleMode, 0);
        spec.mode_k = Some(vec![1, 1]);
        spec.mode_a = Some(vec![1.0, 0.0]); // k.a = 1, needs projection
        let out = generate_detailed(&spec, &g).unwrap();
        assert!(out.polarization_projected);
        assert!(out.field.validate_solenoidal(1e-14).is_ok());
        // Polarization parallel to k cannot be salvaged.
        spec.mode_a = Some(vec![1.0, 1.0]);
        assert!(generate_detailed(&spec, &g).is_err());
    }

    #[test]
    fn container_roundtrip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("field.fld");
        let g = grid(3, 8);
        let mut spec = GeneratorSpec::new(GeneratorKind::Random, 99);
        spec.kmax = 3;
        let f = generate(&spec, &g).unwrap();
        save_field_with_provenance(&f, &path, "random/chacha12").unwrap();
        let (loaded, header) = load_field(&path).unwrap();
        assert_eq!(header.d, 3);
        assert_eq!(header.n, 8);
        assert!(header.solenoidal);
        assert_eq!(header.provenance, "random/chacha12");
        for flat in 0..g.num_modes() {
            for c in 0..3 {
                assert_eq!(
                    f.coeff(flat, c).re.to_bits(),
                    loaded.coeff(flat, c).re.to_bits()
                );
                assert_eq!(
                    f.coeff(flat, c).im.to_bits(),
                    loaded.coeff(flat, c).im.to_bits()
                );
            }
        }
    }

    #[test]
    fn truncated_container_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("field.fld");
        let g = grid(2, 8);
        let f = generate(&GeneratorSpec::new(GeneratorKind::Shear, 0), &g).unwrap();
        save_field(&f, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 9]).unwrap();
        assert!(matches!(load_field(&path), Err(CoreError::Truncated { .. })));
    }

    #[test]
    fn oversized_container_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("field.fld");
        let g = grid(2, 8);
        let f = generate(&GeneratorSpec::new(GeneratorKind::Shear, 0), &g).unwrap();
        save_field(&f, &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.extend_from_slice(&[0u8; 16]);
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            load_field(&path),
            Err(CoreError::HeaderPayloadMismatch { .. })
        ));
    }

    #[test]
    fn dimension_expectation_is_enforced() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("field.fld");
        let g2 = grid(2, 8);
        let f = generate(&GeneratorSpec::new(GeneratorKind::Shear, 0), &g2).unwrap();
        save_field(&f, &path).unwrap();
        let g3 = SpectralGrid::new(3, 8).unwrap();
        assert!(matches!(
            load_field_for_grid(&path, &g3),
            Err(CoreError::GridMismatch { .. })
        ));
    }

    #[test]
    fn bad_magic_and_version_are_distinct_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("field.fld");
        let g = grid(2, 8);
        let f = generate(&GeneratorSpec::new(GeneratorKind::Shear, 0), &g).unwrap();
        save_field(&f, &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[8] = 99; // version
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            load_field(&path),
            Err(CoreError::VersionMismatch { found: 99, .. })
        ));
        bytes[0] = b'X';
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(load_field(&path), Err(CoreError::BadMagic)));
    }
}
