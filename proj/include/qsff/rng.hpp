// Deterministic, stream-splittable sampling of Ginibre matrices, Haar (CUE)
// unitaries, and Gaussian coupling matrices.
#ifndef QSFF_RNG_HPP
#define QSFF_RNG_HPP

#include <cstdint>
#include <random>
#include <stdexcept>

#include "qsff/linalg.hpp"

namespace qsff {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

// (master_seed, stream_id) -> independent generator state. Distinct stream
// ids give statistically independent sequences; same pair always reproduces
// the same bits.
struct SeedStream {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;

    std::mt19937_64 engine() const {
        std::uint64_t s0 = detail::splitmix64(master_seed);
        std::uint64_t s1 = detail::splitmix64(s0 ^ detail::splitmix64(stream_id));
        std::seed_seq seq{static_cast<std::uint32_t>(s0), static_cast<std::uint32_t>(s0 >> 32),
                          static_cast<std::uint32_t>(s1), static_cast<std::uint32_t>(s1 >> 32)};
        return std::mt19937_64(seq);
    }
};

inline SeedStream derive_stream(std::uint64_t master_seed, std::uint64_t stream_id) {
    return SeedStream{master_seed, stream_id};
}

// Entries i.i.d. complex Gaussian, mean 0, E|z|^2 = 1.
inline ComplexMatrix sample_ginibre(Eigen::Index dim, std::mt19937_64& eng) {
    if (dim < 1) throw std::invalid_argument("sample_ginibre: dim must be >= 1");
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    ComplexMatrix g(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) {
            double re = gauss(eng);
            double im = gauss(eng);
            g(i, j) = Complex(re, im);
        }
    return g;
}

inline ComplexMatrix sample_ginibre(Eigen::Index dim, const SeedStream& s) {
    auto eng = s.engine();
    return sample_ginibre(dim, eng);
}

// Haar unitary via QR of a Ginibre sample. Q is normalized so that R has
// positive real diagonal; without the phase fix the QR output is biased.
inline UnitaryMatrix sample_haar(Eigen::Index dim, std::mt19937_64& eng) {
    ComplexMatrix g = sample_ginibre(dim, eng);
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ();
    ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < dim; ++j) {
        Complex d = r(j, j);
        double mag = std::abs(d);
        Complex phase = (mag > 0.0) ? d / mag : Complex(1.0, 0.0);
        q.col(j) *= phase;
    }
    return UnitaryMatrix(std::move(q));
}

inline UnitaryMatrix sample_haar(Eigen::Index dim, const SeedStream& s) {
    auto eng = s.engine();
    return sample_haar(dim, eng);
}

// Coupling matrix W: D0 x D0, i.i.d. complex Gaussian entries with
// E|W_{mu nu}|^2 = g^2/(2 D0), g = sqrt(2 gamma). Then E tr(W W†) = D0 gamma.
inline ComplexMatrix sample_coupling(Eigen::Index dim0, double gamma, std::mt19937_64& eng) {
    if (gamma <= 0.0) throw std::invalid_argument("sample_coupling: gamma must be > 0");
    const double g2 = 2.0 * gamma;
    const double entry_std = std::sqrt(g2 / (2.0 * static_cast<double>(dim0)));
    return entry_std * sample_ginibre(dim0, eng);
}

inline ComplexMatrix sample_coupling(Eigen::Index dim0, double gamma, const SeedStream& s) {
    auto eng = s.engine();
    return sample_coupling(dim0, gamma, eng);
}

}  // namespace qsff

#endif  // QSFF_RNG_HPP
