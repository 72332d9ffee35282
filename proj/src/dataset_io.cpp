#include <array>
#include <fstream>

#include "binio.hpp"
#include "bslab/spectra.hpp"

namespace bslab {

namespace binio {

std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DatasetIoError(DatasetIoError::Kind::io, "cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    return bytes;
}

void write_file(const std::string& path, const std::vector<unsigned char>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw DatasetIoError(DatasetIoError::Kind::io, "cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw DatasetIoError(DatasetIoError::Kind::io, "short write to " + path);
}

}  // namespace binio

namespace {
constexpr std::array<char, 4> kMagic = {'B', 'S', 'D', '1'};
constexpr std::uint32_t kDatasetVersion = 1;
}  // namespace

// Container layout (little-endian, packed):
//   magic "BSD1" | u32 version | u32 dim | f64 extent[dim] | u32 res[dim]
//   | u32 K | u8 trace_scheme | u8 provenance
//   | K records { f64 lambda_k ; face_count x (f64 re, f64 im) }
//   | u32 crc32 of everything above
void save_dataset(const SpectralDataset& ds, const std::string& path) {
    binio::Writer w;
    w.raw(kMagic.data(), 4);
    w.u32(kDatasetVersion);
    w.u32(static_cast<std::uint32_t>(ds.dim));
    for (int a = 0; a < ds.dim; ++a) w.f64(ds.extent[a]);
    for (int a = 0; a < ds.dim; ++a) w.u32(static_cast<std::uint32_t>(ds.res[a]));
    w.u32(static_cast<std::uint32_t>(ds.K));
    w.u8(static_cast<std::uint8_t>(ds.trace_scheme));
    w.u8(static_cast<std::uint8_t>(ds.provenance));
    const int nfaces = static_cast<int>(ds.traces.rows());
    for (int k = 0; k < ds.K; ++k) {
        w.f64(ds.eigenvalues[k]);
        for (int b = 0; b < nfaces; ++b) {
            w.f64(ds.traces(b, k).real());
            w.f64(ds.traces(b, k).imag());
        }
    }
    w.finish_with_crc();
    binio::write_file(path, w.bytes());
}

SpectralDataset load_dataset(const std::string& path) {
    // validation order: magic, version, metadata, record length, then CRC,
    // so that each corruption mode surfaces as its own error kind
    binio::Reader r(binio::read_file(path));

    std::array<char, 4> magic{};
    r.raw(magic.data(), 4);
    if (magic != kMagic)
        throw DatasetIoError(DatasetIoError::Kind::bad_magic, "not a dataset container: " + path);
    const std::uint32_t version = r.u32();
    if (version != kDatasetVersion)
        throw DatasetIoError(DatasetIoError::Kind::version_mismatch,
                             "unsupported dataset version " + std::to_string(version));

    SpectralDataset ds;
    ds.dim = static_cast<int>(r.u32());
    if (ds.dim < 1 || ds.dim > kMaxDim)
        throw DatasetIoError(DatasetIoError::Kind::metadata_invalid, "bad dim in dataset header");
    for (int a = 0; a < ds.dim; ++a) ds.extent[a] = r.f64();
    for (int a = 0; a < ds.dim; ++a) ds.res[a] = static_cast<int>(r.u32());
    for (int a = 0; a < ds.dim; ++a)
        if (!(ds.extent[a] > 0.0) || ds.res[a] < 3)
            throw DatasetIoError(DatasetIoError::Kind::metadata_invalid,
                                 "inconsistent grid metadata in dataset header");
    ds.K = static_cast<int>(r.u32());
    if (ds.K < 1)
        throw DatasetIoError(DatasetIoError::Kind::metadata_invalid, "dataset has K < 1");
    const std::uint8_t scheme = r.u8();
    if (scheme > 1)
        throw DatasetIoError(DatasetIoError::Kind::metadata_invalid, "unknown trace scheme");
    ds.trace_scheme = static_cast<TraceScheme>(scheme);
    const std::uint8_t prov = r.u8();
    if (prov > 2)
        throw DatasetIoError(DatasetIoError::Kind::metadata_invalid, "unknown provenance tag");

    int nfaces = 0;
    {
        const Grid g = ds.make_grid();
        nfaces = g.face_count();
    }
    const std::size_t need = static_cast<std::size_t>(ds.K) * (8 + 16 * static_cast<std::size_t>(nfaces));
    if (r.pos() + need != r.payload_end())
        throw DatasetIoError(DatasetIoError::Kind::truncated,
                             "dataset record section has the wrong length");
    r.verify_crc();

    ds.eigenvalues.resize(ds.K);
    ds.traces.resize(nfaces, ds.K);
    for (int k = 0; k < ds.K; ++k) {
        ds.eigenvalues[k] = r.f64();
        for (int b = 0; b < nfaces; ++b) {
            const double re = r.f64();
            const double im = r.f64();
            ds.traces(b, k) = Complex(re, im);
        }
    }
    ds.provenance = Provenance::loaded;

    const Grid g = ds.make_grid();
    for (int k = 0; k < ds.K; ++k) {
        BoundaryFunction psi{&g, ds.traces.col(k)};
        ds.trace_bound_constant = std::max(
            ds.trace_bound_constant, norm_gamma(psi) / (1.0 + std::abs(ds.eigenvalues[k])));
    }
    return ds;
}

}  // namespace bslab
