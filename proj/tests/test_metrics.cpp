#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cno/errors.hpp"
#include "cno/metrics.hpp"
#include "cno/rng.hpp"

using namespace cno;

namespace {

const auto kSched = build_schedule(10, 0.01, 0.02, ScheduleKind::linear);

}

TEST_CASE("similarity matrix analytic cases") {
  SUBCASE("identical rows") {
    std::vector<double> x = {1, 2, 1, 2, 1, 2};
    const auto k = similarity_matrix(x, 3, 2, SimilarityKernel::cosine);
    for (double v : k.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("orthogonal rows") {
    std::vector<double> x = {2, 0, 0, 0, 3, 0, 0, 0, 5};
    const auto k = similarity_matrix(x, 3, 3, SimilarityKernel::cosine);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(k.at(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-14));
  }

  SUBCASE("degenerate zero row") {
    std::vector<double> x = {0, 0, 1, 1};
    const auto k = similarity_matrix(x, 2, 2, SimilarityKernel::cosine);
    CHECK(k.at(0, 0) == 1.0);
    CHECK(k.at(0, 1) == 0.0);
    CHECK(k.at(1, 0) == 0.0);
  }

  SUBCASE("cosine against a double loop") {
    Rng rng(5);
    std::vector<double> x(12);
    rng.fill_gaussian(x);
    const auto k = similarity_matrix(x, 3, 4, SimilarityKernel::cosine);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double dij = 0, ni = 0, nj = 0;
        for (int d = 0; d < 4; ++d) {
          dij += x[static_cast<std::size_t>(i) * 4 + d] * x[static_cast<std::size_t>(j) * 4 + d];
          ni += x[static_cast<std::size_t>(i) * 4 + d] * x[static_cast<std::size_t>(i) * 4 + d];
          nj += x[static_cast<std::size_t>(j) * 4 + d] * x[static_cast<std::size_t>(j) * 4 + d];
        }
        CHECK(k.at(i, j) ==
              doctest::Approx(dij / std::sqrt(ni * nj)).epsilon(1e-12));
      }
    }
  }

  SUBCASE("rbf values and median bandwidth") {
    std::vector<double> x = {0, 0, 3, 4, 0, 1};  // pair distances 5, 1, sqrt(18)
    const auto k = similarity_matrix(x, 3, 2, SimilarityKernel::rbf);
    CHECK(k.bandwidth == doctest::Approx(std::sqrt(18.0)).epsilon(1e-12));
    CHECK(k.at(0, 1) ==
          doctest::Approx(std::exp(-25.0 / (2 * 18.0))).epsilon(1e-12));
    CHECK(k.at(0, 2) == doctest::Approx(std::exp(-1.0 / 36.0)).epsilon(1e-12));
    CHECK(k.at(1, 1) == 1.0);
  }
}

TEST_CASE("vendi analytic cases") {
  SUBCASE("identical batch scores one") {
    std::vector<double> x = {1, 1, 1, 1, 1, 1};
    const auto k = similarity_matrix(x, 3, 2, SimilarityKernel::cosine);
    CHECK(vendi_score(k) == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("orthonormal batch scores B") {
    for (int B : {2, 4, 7}) {
      std::vector<double> x(static_cast<std::size_t>(B) * B, 0.0);
      for (int i = 0; i < B; ++i) x[static_cast<std::size_t>(i) * B + i] = 1.0;
      const auto k = similarity_matrix(x, B, B, SimilarityKernel::cosine);
      CHECK(vendi_score(k) == doctest::Approx(static_cast<double>(B)).epsilon(1e-9));
    }
  }

  SUBCASE("two duplicated pairs count as two") {
    std::vector<double> x = {1, 0, 0, 0,
                             1, 0, 0, 0,
                             0, 1, 0, 0,
                             0, 1, 0, 0};
    const auto k = similarity_matrix(x, 4, 4, SimilarityKernel::cosine);
    CHECK(vendi_score(k) == doctest::Approx(2.0).epsilon(1e-9));
  }

  SUBCASE("bounds and permutation invariance") {
    Rng rng(17);
    std::vector<double> x(5 * 3);
    for (int rep = 0; rep < 10; ++rep) {
      rng.fill_gaussian(x);
      const auto k = similarity_matrix(x, 5, 3, SimilarityKernel::cosine);
      const double v = vendi_score(k);
      CHECK(v >= 1.0 - 1e-9);
      CHECK(v <= 5.0 + 1e-9);

      std::vector<double> perm(x.size());
      const int order[5] = {3, 0, 4, 2, 1};
      for (int i = 0; i < 5; ++i)
        std::copy_n(x.begin() + order[i] * 3, 3, perm.begin() + i * 3);
      const auto kp = similarity_matrix(perm, 5, 3, SimilarityKernel::cosine);
      CHECK(vendi_score(kp) == doctest::Approx(v).epsilon(1e-9));
      CHECK(mean_pairwise_similarity(kp) ==
            doctest::Approx(mean_pairwise_similarity(k)).epsilon(1e-12));
    }
  }
}

TEST_CASE("mean pairwise similarity") {
  SUBCASE("hand-built symmetric matrix") {
    SimilarityMatrix k;
    k.batch = 3;
    k.values = {1.0, 0.2, 0.4,
                0.2, 1.0, 0.6,
                0.4, 0.6, 1.0};
    CHECK(mean_pairwise_similarity(k) == doctest::Approx(0.4).epsilon(1e-15));
  }

  SUBCASE("identical and orthogonal extremes") {
    std::vector<double> same = {1, 1, 1, 1};
    CHECK(mean_pairwise_similarity(similarity_matrix(same, 2, 2,
                                                     SimilarityKernel::cosine)) ==
          doctest::Approx(1.0));
    std::vector<double> orth = {1, 0, 0, 1};
    CHECK(mean_pairwise_similarity(similarity_matrix(orth, 2, 2,
                                                     SimilarityKernel::cosine)) ==
          doctest::Approx(0.0));
  }

  SUBCASE("duplicating a batch cannot lower it") {
    Rng rng(23);
    std::vector<double> x(4 * 3);
    for (int rep = 0; rep < 8; ++rep) {
      rng.fill_gaussian(x);
      std::vector<double> doubled(x);
      doubled.insert(doubled.end(), x.begin(), x.end());
      const double base = mean_pairwise_similarity(
          similarity_matrix(x, 4, 3, SimilarityKernel::cosine));
      const double dup = mean_pairwise_similarity(
          similarity_matrix(doubled, 8, 3, SimilarityKernel::cosine));
      CHECK(dup >= base - 1e-12);
    }
  }

  SUBCASE("needs two samples") {
    SimilarityMatrix k;
    k.batch = 1;
    k.values = {1.0};
    CHECK_THROWS_AS(mean_pairwise_similarity(k), ParamError);
  }
}

TEST_CASE("mode coverage") {
  GaussianMixture m;  // exact lattice means so midpoints tie exactly
  m.dim = 2;
  m.means = {{2, 0}, {0, 2}, {-2, 0}, {0, -2}};
  m.scales = {0.1, 0.1, 0.1, 0.1};
  m.weights = {0.25, 0.25, 0.25, 0.25};
  m.conditions["all"] = {0, 1, 2, 3};
  m.conditions["half"] = {0, 1};
  m.validate();

  SUBCASE("one mode") {
    std::vector<double> x = {2, 0, 2.01, 0.01, 1.9, -0.02};
    const auto mc = mode_coverage(x, 3, m, "all");
    CHECK(mc.modes_hit == 1);
    CHECK(mc.histogram[0] == 3);
  }

  SUBCASE("all modes") {
    std::vector<double> x = {2, 0, 0, 2, -2, 0, 0, -2};
    const auto mc = mode_coverage(x, 4, m, "all");
    CHECK(mc.modes_hit == 4);
    int total = 0;
    for (int c : mc.histogram) total += c;
    CHECK(total == 4);
  }

  SUBCASE("midpoint tie goes to the lower index") {
    std::vector<double> x = {1.0, 1.0};  // equidistant from modes 0 and 1
    const auto mc = mode_coverage(x, 1, m, "all");
    CHECK(mc.histogram[0] == 1);
    CHECK(mc.histogram[1] == 0);
  }

  SUBCASE("restricted to the conditional subset") {
    std::vector<double> x = {-2, 0};  // nearest overall is mode 2, not in half
    const auto mc = mode_coverage(x, 1, m, "half");
    CHECK(mc.histogram[2] == 0);
    CHECK(mc.modes_hit == 1);
  }
}

TEST_CASE("fidelity log density") {
  SUBCASE("single component closed form at the mean") {
    GaussianMixture m;
    m.dim = 3;
    m.means = {{0.5, -0.5, 1.0}};
    m.scales = {0.7};
    m.weights = {1.0};
    m.conditions["c"] = {0};
    m.validate();
    std::vector<double> x = {0.5, -0.5, 1.0};
    const double expect = -1.5 * std::log(2 * M_PI * 0.49);
    CHECK(fidelity_logdensity(x, 1, m, kSched, "c") ==
          doctest::Approx(expect).epsilon(1e-12));
  }

  SUBCASE("batch order does not matter and the sum oracle agrees") {
    const auto m = circle_mixture(4, 2.0, 0.5, 2, 0.0);
    Rng rng(29);
    std::vector<double> x(8);
    rng.fill_gaussian(x);
    const double a = fidelity_logdensity(x, 4, m, kSched, "all");
    std::vector<double> swapped(x);
    std::swap_ranges(swapped.begin(), swapped.begin() + 2, swapped.begin() + 4);
    CHECK(fidelity_logdensity(swapped, 4, m, kSched, "all") ==
          doctest::Approx(a).epsilon(1e-12));

    // direct per-component summation
    double acc = 0.0;
    for (int i = 0; i < 4; ++i) {
      double p = 0.0;
      for (int k = 0; k < 4; ++k) {
        double d2 = 0.0;
        for (int d = 0; d < 2; ++d) {
          const double diff = x[static_cast<std::size_t>(i) * 2 + d] -
                              m.means[static_cast<std::size_t>(k)][static_cast<std::size_t>(d)];
          d2 += diff * diff;
        }
        p += 0.25 * std::exp(-d2 / (2 * 0.25)) / (2 * M_PI * 0.25);
      }
      acc += std::log(p);
    }
    CHECK(a == doctest::Approx(acc / 4).epsilon(1e-12));
  }
}
