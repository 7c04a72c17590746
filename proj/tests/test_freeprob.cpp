#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "qsff/freeprob.hpp"
#include "stat_helpers.hpp"

using namespace qsff;

namespace {

const long kCatalan[] = {1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862};

std::string canon(const std::vector<std::vector<int>>& blocks) {
    auto sorted = blocks;
    for (auto& b : sorted) std::sort(b.begin(), b.end());
    std::sort(sorted.begin(), sorted.end());
    std::string s;
    for (const auto& b : sorted) {
        for (int e : b) s += std::to_string(e) + ",";
        s += "|";
    }
    return s;
}

}  // namespace

TEST_CASE("is_noncrossing on the canonical examples") {
    CHECK(is_noncrossing(NCPartition{4, {{1, 2}, {3, 4}}}));
    CHECK(is_noncrossing(NCPartition{4, {{1, 4}, {2, 3}}}));
    CHECK_FALSE(is_noncrossing(NCPartition{4, {{1, 3}, {2, 4}}}));
    CHECK(is_noncrossing(NCPartition{1, {{1}}}));
    CHECK_THROWS_AS(is_noncrossing(NCPartition{3, {{1, 2}}}), std::invalid_argument);
    CHECK_THROWS_AS(is_noncrossing(NCPartition{2, {{1, 1}, {2}}}), std::invalid_argument);
}

TEST_CASE("enumerate_nc counts are Catalan and agree with brute force") {
    for (int n = 1; n <= 8; ++n) {
        auto nc = enumerate_nc(n);
        CHECK(static_cast<long>(nc.size()) == kCatalan[n]);

        // every emitted partition is non-crossing, none repeats
        std::set<std::string> seen;
        for (const auto& p : nc) {
            CHECK(is_noncrossing(p));
            CHECK(seen.insert(canon(p.blocks)).second);
        }
        // brute-force filter over all set partitions finds exactly the same set
        std::set<std::string> brute;
        for (const auto& blocks : testutil::all_set_partitions(n))
            if (is_noncrossing(NCPartition{n, blocks})) brute.insert(canon(blocks));
        CHECK(brute == seen);
    }
    CHECK_THROWS_AS(enumerate_nc(0), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_nc(13), std::invalid_argument);
}

TEST_CASE("n=3: all five set partitions are non-crossing") {
    CHECK(enumerate_nc(3).size() == 5);
}

TEST_CASE("n=4 excludes the crossing partition") {
    auto nc = enumerate_nc(4);
    CHECK(nc.size() == 14);
    std::string crossing = canon({{1, 3}, {2, 4}});
    for (const auto& p : nc) CHECK(canon(p.blocks) != crossing);
}

TEST_CASE("moment-cumulant transforms: known values") {
    // point mass: m_k = 1 -> kappa_1 = 1, rest 0
    auto point = moments_to_cumulants({1, 1, 1, 1, 1, 1});
    CHECK(point.cumulants[0] == doctest::Approx(1.0));
    for (int k = 1; k < 6; ++k) CHECK(point.cumulants[static_cast<size_t>(k)] == doctest::Approx(0.0));

    // kappa_2 = m_2 - m_1^2
    auto two = moments_to_cumulants({0.3, 0.7});
    CHECK(two.cumulants[1] == doctest::Approx(0.7 - 0.09));

    // standard semicircle: moments (0,1,0,2,0,5) -> kappa = (0,1,0,0,0,0)
    auto semi = moments_to_cumulants({0, 1, 0, 2, 0, 5});
    std::vector<double> want{0, 1, 0, 0, 0, 0};
    for (int k = 0; k < 6; ++k)
        CHECK(semi.cumulants[static_cast<size_t>(k)] == doctest::Approx(want[static_cast<size_t>(k)]).epsilon(1e-12));
}

TEST_CASE("moment <-> cumulant round trip on random moment sequences") {
    // genuine moment sequences (atomic measures on [-1, 1]) keep the order-8
    // transform well conditioned; arbitrary vectors would not
    std::mt19937_64 eng(99);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 1 + static_cast<int>(eng() % 8);
        double atom[3], weight[3], wsum = 0.0;
        for (int i = 0; i < 3; ++i) {
            atom[i] = unif(eng);
            weight[i] = 0.1 + std::abs(unif(eng));
            wsum += weight[i];
        }
        std::vector<double> m(static_cast<size_t>(n), 0.0);
        for (int k = 1; k <= n; ++k)
            for (int i = 0; i < 3; ++i)
                m[static_cast<size_t>(k - 1)] += weight[i] / wsum * std::pow(atom[i], k);
        auto tab = moments_to_cumulants(m);
        auto back = cumulants_to_moments(tab.cumulants);
        for (int k = 0; k < n; ++k)
            CHECK(std::abs(back.moments[static_cast<size_t>(k)] - m[static_cast<size_t>(k)]) <=
                  1e-12);
    }
}

TEST_CASE("free cumulants agree with classical ones up to order 3") {
    std::mt19937_64 eng(7);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> m{unif(eng), unif(eng), unif(eng)};
        auto free_k = moments_to_cumulants(m).cumulants;
        auto classical = classical_cumulants_3(m);
        for (int k = 0; k < 3; ++k)
            CHECK(free_k[static_cast<size_t>(k)] ==
                  doctest::Approx(classical[static_cast<size_t>(k)]).epsilon(1e-12));
    }
}

TEST_CASE("enumeration order is deterministic") {
    auto a = enumerate_nc(5);
    auto b = enumerate_nc(5);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].blocks == b[i].blocks);
}

TEST_CASE("freeness check smoke: free limit passes, t = 0 exact") {
    ModelParams p;
    p.d0 = 48;
    p.ensemble = EnsembleKind::pure_haar;
    p.gamma = 0.125;
    p.n_samples = 1500;
    p.t_max = 12;
    p.master_seed = 5;
    Observable a;
    a.matrix = ComplexMatrix::Zero(48, 48);
    for (int i = 0; i < 48; ++i) a.matrix(i, i) = (i % 2 == 0) ? 1.0 : -1.0;

    TimeSeriesEstimate diff = paired_freeness_run(p, a, a);
    CHECK(std::abs(diff.mean[0]) <= 1e-12);  // t=0: both sides equal <AB> exactly
    CHECK(diff.stderr_at(0) <= 1e-12);

    FreenessReport rep = freeness_check_k1(p, a, a);
    CHECK_FALSE(rep.regime_warning);
    CHECK(rep.pass);
}
