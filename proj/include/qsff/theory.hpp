// Closed-form predictions: mode propagators, discrete convolutions, the SFF
// ramp and full ramp-plateau formulas, cross-channel corrections F_ijk, and
// the two-point prediction K(t)<AB> + Delta(t).
#ifndef QSFF_THEORY_HPP
#define QSFF_THEORY_HPP

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsff/model.hpp"

namespace qsff {

// Per-step decay rates of the four ancilla pair-propagation channels:
// (0, gamma, gamma, 2 gamma). The gamma1 = gamma2 degeneracy is structural.
struct ModeRates {
    std::array<double, 4> rates;

    static ModeRates of(const ModelParams& p) { return ModeRates{{0.0, p.gamma, p.gamma, 2.0 * p.gamma}}; }
    double operator[](int k) const { return rates[static_cast<size_t>(k)]; }
};

enum class FormulaId { ramp_eq, full_plateau, delta, two_point, mode_conv };

struct TheoryCurve {
    std::vector<long> t_grid;
    std::vector<double> values;
    FormulaId formula_id = FormulaId::ramp_eq;
    std::string label;
};

// pi_lambda(u) = theta(u) e^{-gamma_lambda u} / D, with theta(0) = 1.
inline double mode_pi(int lambda, long u, const ModelParams& p) {
    if (lambda < 0 || lambda > 3) throw std::invalid_argument("mode_pi: lambda must be 0..3");
    if (u < 0) return 0.0;
    const double d = static_cast<double>(p.d_full());
    return std::exp(-ModeRates::of(p)[lambda] * static_cast<double>(u)) / d;
}

// (pi_a * pi_b)(t) = sum_{u=1}^{t} pi_a(t-u) pi_b(u), exact in discrete time.
inline double discrete_conv(int a, int b, long t, const ModelParams& p) {
    if (t < 1) throw std::invalid_argument("discrete_conv: t must be >= 1");
    double s = 0.0;
    for (long u = 1; u <= t; ++u) s += mode_pi(a, t - u, p) * mode_pi(b, u, p);
    return s;
}

// Ramp-regime form factor K(t) = (t/D^2)(1 + 2 e^{-gamma t} + e^{-2 gamma t}).
inline double sff_ramp(long t, const ModelParams& p) {
    const double d = static_cast<double>(p.d_full());
    const double x = p.gamma * static_cast<double>(t);
    return (static_cast<double>(t) / (d * d)) * (1.0 + 2.0 * std::exp(-x) + std::exp(-2.0 * x));
}

// K(gamma_k) = prod_{k' != 0, k} gamma_{k'}^2 / (gamma_{k'}^2 - gamma_k^2).
// Diverges for exactly degenerate rate pairs; callers handle that by an
// epsilon split (see sff_full).
inline double calK(int k, const ModeRates& rates) {
    if (k == 0) throw std::invalid_argument("calK: k must be nonzero");
    if (k < 1 || k > 3) throw std::invalid_argument("calK: k must be 1..3");
    double prod = 1.0;
    for (int kp = 1; kp <= 3; ++kp) {
        if (kp == k) continue;
        const double num = rates[kp] * rates[kp];
        const double den = num - rates[k] * rates[k];
        prod *= num / den;
    }
    return prod;
}

namespace detail {

// Ramp-plateau formula at given rates, in the normalized (plateau = 1/D)
// convention. Requires pairwise distinct nonzero rates.
inline double sff_full_at_rates(long t, double d, const ModeRates& rates) {
    const double td = static_cast<double>(t);
    double val = 0.0;
    for (int k = 0; k <= 3; ++k) val += td * std::exp(-rates[k] * td);
    if (td > d) val -= td - d;
    for (int k = 1; k <= 3; ++k) {
        const double gk = rates[k];
        val -= calK(k, rates) / (2.0 * gk) *
               (std::exp(-gk * std::abs(td - d)) + std::exp(-gk * (td + d)));
    }
    return val / (d * d);
}

}  // namespace detail

// Full ramp-plateau form factor. The model's degenerate pair gamma1 = gamma2
// is handled by an epsilon split gamma(1 -/+ eps) with Richardson
// extrapolation eps -> 0 (the split value is even in eps).
inline double sff_full(long t, const ModelParams& p) {
    if (t < 1) throw std::invalid_argument("sff_full: t must be >= 1");
    const double d = static_cast<double>(p.d_full());
    auto split = [&](double eps) {
        ModeRates r{{0.0, p.gamma * (1.0 - eps), p.gamma * (1.0 + eps), 2.0 * p.gamma}};
        return detail::sff_full_at_rates(t, d, r);
    };
    const double e1 = 1e-4, e2 = 1e-5;
    const double f1 = split(e1), f2 = split(e2);
    return (e1 * e1 * f2 - e2 * e2 * f1) / (e1 * e1 - e2 * e2);
}

enum class CyclicPerm { p123, p231, p312 };

// Continuum closed forms of F_ijk = pi_0 * pi_k - pi_i * pi_j:
//   F_312 = F_231 = (1 - e^{-gamma t})^2 / (gamma D^2)
//   F_123 = (1 - e^{-2 gamma t}) / (2 gamma D^2) - t e^{-gamma t} / D^2
inline double f_ijk(CyclicPerm perm, long t, const ModelParams& p) {
    if (t < 0) throw std::invalid_argument("f_ijk: t must be >= 0");
    const double d2 = static_cast<double>(p.d_full()) * static_cast<double>(p.d_full());
    const double g = p.gamma;
    const double td = static_cast<double>(t);
    switch (perm) {
        case CyclicPerm::p312:
        case CyclicPerm::p231: {
            const double e = 1.0 - std::exp(-g * td);
            return e * e / (g * d2);
        }
        case CyclicPerm::p123:
            return (1.0 - std::exp(-2.0 * g * td)) / (2.0 * g * d2) -
                   td * std::exp(-g * td) / d2;
    }
    throw std::invalid_argument("f_ijk: invalid permutation");
}

// The three ancilla-channel overlaps <A sigma_k B sigma_k> = tr(A (1 x s_k) B (1 x s_k))/D.
inline std::array<double, 3> channel_overlaps(const Observable& a, const Observable& b,
                                              const ModelParams& p) {
    if (a.dim() != p.d_full() || b.dim() != p.d_full())
        throw DimensionError("channel_overlaps: observable dimension mismatch");
    std::array<double, 3> out{};
    for (int k = 1; k <= 3; ++k) {
        ComplexMatrix sk = pauli::ancilla_sigma(k, p.d0);
        Complex tr = (a.matrix * sk * b.matrix * sk).trace() / static_cast<double>(p.d_full());
        out[static_cast<size_t>(k - 1)] = tr.real();
    }
    return out;
}

// Delta(t) = 2 sum_{(ijk) cycl} F_ijk(t) <A sigma_k B sigma_k>,
// with (ijk) in {(123), (231), (312)} so k pairs as (3, 1, 2).
inline double delta_theory(long t, const ModelParams& p, const std::array<double, 3>& overlaps) {
    return 2.0 * (f_ijk(CyclicPerm::p123, t, p) * overlaps[2] +
                  f_ijk(CyclicPerm::p231, t, p) * overlaps[0] +
                  f_ijk(CyclicPerm::p312, t, p) * overlaps[1]);
}

inline double delta_theory(long t, const ModelParams& p, const Observable& a, const Observable& b) {
    return delta_theory(t, p, channel_overlaps(a, b, p));
}

// <A B_t> prediction: K(t) <AB> + Delta(t). `full_plateau` selects the
// ramp-plateau K over the ramp-only Eq-(4)-style K.
inline double two_point_theory(long t, const ModelParams& p, const Observable& a,
                               const Observable& b, bool full_plateau = true) {
    const double k = full_plateau ? sff_full(t, p) : sff_ramp(t, p);
    const double ab = a.pair_trace(b).real();
    return k * ab + delta_theory(t, p, a, b);
}

inline TheoryCurve theory_curve(FormulaId id, long t_min, long t_max, const ModelParams& p,
                                const Observable* a = nullptr, const Observable* b = nullptr) {
    TheoryCurve c;
    c.formula_id = id;
    for (long t = t_min; t <= t_max; ++t) {
        c.t_grid.push_back(t);
        if (t == 0) {
            // U^0 = 1: K(0) = 1 exactly, B_0 = B, all F vanish
            switch (id) {
                case FormulaId::ramp_eq:
                case FormulaId::full_plateau: c.values.push_back(1.0); break;
                case FormulaId::delta:
                case FormulaId::mode_conv: c.values.push_back(0.0); break;
                case FormulaId::two_point: c.values.push_back(a->pair_trace(*b).real()); break;
            }
            continue;
        }
        switch (id) {
            case FormulaId::ramp_eq: c.values.push_back(sff_ramp(t, p)); break;
            case FormulaId::full_plateau: c.values.push_back(sff_full(t, p)); break;
            case FormulaId::delta: c.values.push_back(delta_theory(t, p, *a, *b)); break;
            case FormulaId::two_point: c.values.push_back(two_point_theory(t, p, *a, *b)); break;
            case FormulaId::mode_conv: c.values.push_back(discrete_conv(0, 0, t, p)); break;
        }
    }
    return c;
}

}  // namespace qsff

#endif  // QSFF_THEORY_HPP
