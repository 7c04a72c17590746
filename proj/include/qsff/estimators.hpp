// Parallel Monte Carlo estimation of K(t) and <A B_t> with mergeable
// per-time-step Welford accumulators. Worker count never changes results:
// realizations are processed in fixed-size chunks keyed by stream id, and
// chunk results are folded in index order.
#ifndef QSFF_ESTIMATORS_HPP
#define QSFF_ESTIMATORS_HPP

#include <atomic>
#include <cmath>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "qsff/model.hpp"
#include "qsff/theory.hpp"

namespace qsff {

// Per-time-step mean, sum of squared deviations, and sample count.
struct TimeSeriesEstimate {
    long t_max = -1;  // grid is 0..t_max
    std::vector<Complex> mean;
    std::vector<double> m2;
    long n = 0;
    std::string label;

    static TimeSeriesEstimate empty(long t_max, std::string label = {}) {
        TimeSeriesEstimate e;
        e.t_max = t_max;
        e.mean.assign(static_cast<size_t>(t_max) + 1, Complex(0, 0));
        e.m2.assign(static_cast<size_t>(t_max) + 1, 0.0);
        e.label = std::move(label);
        return e;
    }

    void add_sample(const std::vector<Complex>& x) {
        ++n;
        const double inv_n = 1.0 / static_cast<double>(n);
        for (size_t t = 0; t < mean.size(); ++t) {
            Complex delta = x[t] - mean[t];
            mean[t] += delta * inv_n;
            Complex delta2 = x[t] - mean[t];
            m2[t] += (std::conj(delta) * delta2).real();
        }
    }

    double stderr_at(long t) const {
        if (n < 2) throw std::runtime_error("TimeSeriesEstimate: stderr undefined for n < 2");
        return std::sqrt(m2[static_cast<size_t>(t)] / (static_cast<double>(n) * static_cast<double>(n - 1)));
    }
};

inline TimeSeriesEstimate welford_merge(const TimeSeriesEstimate& a, const TimeSeriesEstimate& b) {
    if (a.t_max != b.t_max || a.label != b.label)
        throw std::invalid_argument("welford_merge: grid or label mismatch");
    if (a.n == 0) return b;
    if (b.n == 0) return a;
    TimeSeriesEstimate out = TimeSeriesEstimate::empty(a.t_max, a.label);
    out.n = a.n + b.n;
    const double na = static_cast<double>(a.n), nb = static_cast<double>(b.n);
    for (size_t t = 0; t < out.mean.size(); ++t) {
        Complex delta = b.mean[t] - a.mean[t];
        out.mean[t] = a.mean[t] + delta * (nb / (na + nb));
        out.m2[t] = a.m2[t] + b.m2[t] + std::norm(delta) * na * nb / (na + nb);
    }
    return out;
}

namespace detail {

inline constexpr long kChunkSize = 64;

// Runs `body(stream_id)` for stream ids 0..n_samples-1 on `workers` threads
// and folds per-chunk accumulators in chunk order.
inline TimeSeriesEstimate run_chunked(const ModelParams& params, int workers,
                                      const std::string& label,
                                      const std::function<void(long, TimeSeriesEstimate&)>& body) {
    const long n_chunks = (params.n_samples + kChunkSize - 1) / kChunkSize;
    std::vector<TimeSeriesEstimate> partial(
        static_cast<size_t>(n_chunks), TimeSeriesEstimate::empty(params.t_max, label));
    std::atomic<long> next{0};
    auto work = [&] {
        for (;;) {
            long c = next.fetch_add(1);
            if (c >= n_chunks) break;
            const long lo = c * kChunkSize;
            const long hi = std::min(lo + kChunkSize, params.n_samples);
            for (long i = lo; i < hi; ++i) body(i, partial[static_cast<size_t>(c)]);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    TimeSeriesEstimate total = TimeSeriesEstimate::empty(params.t_max, label);
    for (const auto& part : partial) total = welford_merge(total, part);
    return total;
}

// |tr U^t|^2 / dim^2 for t = 0..t_max from cached eigenphases, via
// incremental phase powers.
inline void sff_series(const EigenphaseSpectrum& spec, long t_max, std::vector<Complex>& out) {
    const Eigen::Index dim = spec.phases.size();
    const double inv_d2 = 1.0 / (static_cast<double>(dim) * static_cast<double>(dim));
    Eigen::VectorXcd step(dim), cur(dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        step[j] = std::polar(1.0, spec.phases[j]);
        cur[j] = Complex(1.0, 0.0);
    }
    out.resize(static_cast<size_t>(t_max) + 1);
    for (long t = 0; t <= t_max; ++t) {
        out[static_cast<size_t>(t)] = Complex(std::norm(cur.sum()) * inv_d2, 0.0);
        cur.array() *= step.array();
    }
}

// <A B_t> = (1/D) sum_{jk} A'_{jk} B'_{kj} e^{i (theta_k - theta_j) t} with
// A' = V† A V, B' = V† B V. O(D^2) per time step.
inline void two_point_series(const EigenphaseSpectrum& spec, const ComplexMatrix& a,
                             const ComplexMatrix& b, long t_max, std::vector<Complex>& out) {
    const Eigen::Index dim = spec.phases.size();
    ComplexMatrix ap = spec.frame.adjoint() * a * spec.frame;
    ComplexMatrix bp = spec.frame.adjoint() * b * spec.frame;
    ComplexMatrix m = ap.cwiseProduct(bp.transpose());  // M_{jk} = A'_{jk} B'_{kj}
    Eigen::VectorXcd step(dim), p(dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        step[j] = std::polar(1.0, spec.phases[j]);
        p[j] = Complex(1.0, 0.0);
    }
    const double inv_d = 1.0 / static_cast<double>(dim);
    out.resize(static_cast<size_t>(t_max) + 1);
    for (long t = 0; t <= t_max; ++t) {
        out[static_cast<size_t>(t)] = p.dot(m * p) * inv_d;  // p† M p / D
        p.array() *= step.array();
    }
}

}  // namespace detail

struct RunOptions {
    int workers = 1;
};

// Monte Carlo spectral form factor over the ensemble selected by params.
inline TimeSeriesEstimate sff_run(const ModelParams& params, const RunOptions& opt = {}) {
    params.validate();
    const ComplexMatrix frozen_w =
        params.freeze_coupling ? sample_coupling(params.d0, params.gamma,
                                                 derive_stream(params.master_seed, 0x7ff0000000000000ULL))
                               : ComplexMatrix();
    return detail::run_chunked(params, opt.workers, "sff", [&](long i, TimeSeriesEstimate& acc) {
        EigenphaseSpectrum spec = realization_spectrum(
            params, derive_stream(params.master_seed, static_cast<std::uint64_t>(i)),
            params.freeze_coupling ? &frozen_w : nullptr);
        std::vector<Complex> series;
        detail::sff_series(spec, params.t_max, series);
        acc.add_sample(series);
    });
}

// Monte Carlo two-point function <A B_t> over the ensemble.
inline TimeSeriesEstimate two_point_run(const ModelParams& params, const Observable& a,
                                        const Observable& b, const RunOptions& opt = {}) {
    params.validate();
    if (a.dim() != params.dim() || b.dim() != params.dim())
        throw DimensionError("two_point_run: observable dimension mismatch");
    const ComplexMatrix frozen_w =
        params.freeze_coupling ? sample_coupling(params.d0, params.gamma,
                                                 derive_stream(params.master_seed, 0x7ff0000000000000ULL))
                               : ComplexMatrix();
    return detail::run_chunked(params, opt.workers, "two_point", [&](long i, TimeSeriesEstimate& acc) {
        EigenphaseSpectrum spec = realization_spectrum(
            params, derive_stream(params.master_seed, static_cast<std::uint64_t>(i)),
            params.freeze_coupling ? &frozen_w : nullptr);
        std::vector<Complex> series;
        detail::two_point_series(spec, a.matrix, b.matrix, params.t_max, series);
        acc.add_sample(series);
    });
}

// Paired difference <A B_t> - K_i(t) <AB> on the same realizations; used by
// the freeness check.
inline TimeSeriesEstimate paired_freeness_run(const ModelParams& params, const Observable& a,
                                              const Observable& b, const RunOptions& opt = {}) {
    params.validate();
    const double ab = a.pair_trace(b).real();
    return detail::run_chunked(params, opt.workers, "freeness_diff", [&](long i, TimeSeriesEstimate& acc) {
        EigenphaseSpectrum spec = realization_spectrum(
            params, derive_stream(params.master_seed, static_cast<std::uint64_t>(i)));
        std::vector<Complex> lhs, sff;
        detail::two_point_series(spec, a.matrix, b.matrix, params.t_max, lhs);
        detail::sff_series(spec, params.t_max, sff);
        for (size_t t = 0; t < lhs.size(); ++t) lhs[t] -= sff[t] * ab;
        acc.add_sample(lhs);
    });
}

struct ResidualReport {
    std::vector<long> t;
    std::vector<double> z;
    std::vector<bool> excluded;  // zero-stderr points, left out of chi2
    double chi2_dof = 0.0;
    double fraction_within_4 = 0.0;
};

// z(t) = (Re mean(t) - theory(t)) / stderr(t) over the grid [t_min, t_max].
inline ResidualReport residuals(const TimeSeriesEstimate& est, const std::vector<double>& theory,
                                long t_min = 0) {
    if (static_cast<long>(theory.size()) != est.t_max + 1)
        throw std::invalid_argument("residuals: grid mismatch");
    ResidualReport rep;
    double chi2 = 0.0;
    long dof = 0, within = 0, counted = 0;
    for (long t = t_min; t <= est.t_max; ++t) {
        const double se = est.stderr_at(t);
        rep.t.push_back(t);
        if (se <= 0.0) {
            rep.z.push_back(0.0);
            rep.excluded.push_back(true);
            continue;
        }
        const double z = (est.mean[static_cast<size_t>(t)].real() - theory[static_cast<size_t>(t)]) / se;
        rep.z.push_back(z);
        rep.excluded.push_back(false);
        chi2 += z * z;
        ++dof;
        ++counted;
        if (std::abs(z) <= 4.0) ++within;
    }
    rep.chi2_dof = dof > 0 ? chi2 / static_cast<double>(dof) : 0.0;
    rep.fraction_within_4 = counted > 0 ? static_cast<double>(within) / static_cast<double>(counted) : 1.0;
    return rep;
}

}  // namespace qsff

#endif  // QSFF_ESTIMATORS_HPP
