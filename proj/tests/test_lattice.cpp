#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "cvmw/errors.hpp"
#include "cvmw/lattice.hpp"

using namespace cvmw;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_SUITE("lattice") {
  TEST_CASE("symplectic form") {
    const Eigen::MatrixXd W = symplectic_form(2);
    CHECK(W(0, 2) == 1.0);
    CHECK(W(2, 0) == -1.0);
    CHECK((W * W + Eigen::MatrixXd::Identity(4, 4)).norm() == 0.0);
  }

  TEST_CASE("square GKP lattice") {
    const auto L = catalog_lattice("square");
    CHECK(L.is_gkp());
    CHECK(code_size(L) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(std::abs(gkp_distance(L) - std::sqrt(kPi)) < 1e-10);
    const auto s = length_spectrum(L, 6.0);
    REQUIRE(s.entries.size() >= 3);
    CHECK(s.entries[0].length == 0.0);
    CHECK(s.entries[0].multiplicity == 1);
    CHECK(s.entries[1].length == doctest::Approx(2.0 * std::sqrt(kPi)));
    CHECK(s.entries[1].multiplicity == 4);
    CHECK(s.entries[2].length == doctest::Approx(std::sqrt(8.0 * kPi)));
    CHECK(s.entries[2].multiplicity == 4);
  }

  TEST_CASE("dual lattice identities") {
    for (const char* name : {"square", "hexagonal", "selfdual:2", "e8-unit"}) {
      const auto L = catalog_lattice(name);
      const auto D = dual_lattice(L);
      const Eigen::MatrixXd W = symplectic_form(L.N());
      const Eigen::MatrixXd P = L.generator() * W * D.generator().transpose();
      CHECK((P - 2.0 * kPi * Eigen::MatrixXd::Identity(L.dim(), L.dim())).norm() < 1e-9);
      // A GKP lattice sits inside its dual, and the dual of the dual is L.
      CHECK(is_sublattice(L, D));
      CHECK(same_lattice(dual_lattice(D), L));
    }
  }

  TEST_CASE("hexagonal code") {
    const auto L = catalog_lattice("hexagonal");
    CHECK(code_size(L) == doctest::Approx(2.0).epsilon(1e-12));
    // Dual minimum of the K = 2 hexagonal code is sqrt(2 pi / sqrt 3).
    CHECK(gkp_distance(L) == doctest::Approx(std::sqrt(2.0 * kPi / std::sqrt(3.0))).epsilon(1e-10));
    CHECK(length_spectrum(L, 6.0).entries[1].multiplicity == 6);
  }

  TEST_CASE("self-dual lattices have K = 1 and distance sqrt(2 pi)") {
    const auto L = catalog_lattice("selfdual:2");
    CHECK(code_size(L) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(gkp_distance(L) == doctest::Approx(std::sqrt(2.0 * kPi)).epsilon(1e-10));
    CHECK(same_lattice(L, dual_lattice(L)));
  }

  TEST_CASE("E8 family") {
    const auto L = catalog_lattice("e8");
    CHECK_FALSE(L.is_gkp());
    CHECK(code_size(L) == doctest::Approx(2.0).epsilon(1e-12));
    const double d = gkp_distance(L);
    CHECK(std::abs(d - std::pow(2.0, 0.875) * std::sqrt(kPi)) < 1e-9);
    CHECK(code_size(L) * std::pow(d, 8) == doctest::Approx(std::pow(4.0 * kPi, 4)).epsilon(1e-6));
    CHECK(catalog_lattice("e8-unit").is_gkp());
    CHECK(code_size(catalog_lattice("e8-16")) == doctest::Approx(16.0).epsilon(1e-12));

    // Theta series of the unit E8 lattice: 1 + 240 q + 2160 q^2 + 6720 q^3.
    const SymplecticLattice E(e8_generator(), false);
    const auto s = length_spectrum(E, std::sqrt(6.0) + 1e-9);
    REQUIRE(s.entries.size() == 4);
    CHECK(s.entries[1].multiplicity == 240);
    CHECK(s.entries[2].multiplicity == 2160);
    CHECK(s.entries[3].multiplicity == 6720);
    CHECK(std::abs(E.generator().determinant()) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("Golay code and Leech lattice") {
    const auto G = golay_generator();
    REQUIRE(G.size() == 12);
    // Weight enumerator of the extended Golay code: 1, 759, 2576, 759, 1.
    std::vector<int> counts(25, 0);
    for (int mask = 0; mask < (1 << 12); ++mask) {
      int w = 0;
      for (int c = 0; c < 24; ++c) {
        int bit = 0;
        for (int i = 0; i < 12; ++i)
          if (mask & (1 << i)) bit ^= G[i][c];
        w += bit;
      }
      ++counts[w];
    }
    CHECK(counts[0] == 1);
    CHECK(counts[8] == 759);
    CHECK(counts[12] == 2576);
    CHECK(counts[16] == 759);
    CHECK(counts[24] == 1);

    const Eigen::MatrixXd M = leech_generator();
    CHECK(std::abs(M.determinant()) == doctest::Approx(1.0).epsilon(1e-9));
    const Eigen::MatrixXd gram = M * M.transpose();
    bool even = true;
    for (int i = 0; i < 24; ++i)
      for (int j = 0; j < 24; ++j) {
        const double g = gram(i, j);
        if (std::abs(g - std::round(g)) > 1e-9) even = false;
        if (i == j && static_cast<long>(std::llround(g)) % 2 != 0) even = false;
      }
    CHECK(even);
    // Even unimodular in 24 dimensions with no vectors of norm^2 2.
    const auto s = length_spectrum(SymplecticLattice(M, false), std::sqrt(2.0) + 1e-6);
    CHECK(s.entries.size() == 1);
  }

  TEST_CASE("Hermite normal form and LLL") {
    const IntMatrix H = hermite_normal_form({{2, 4, 4}, {-6, 6, 12}, {10, -4, -16}});
    REQUIRE(H.size() == 3);
    CHECK(H[0] == std::vector<std::int64_t>{2, 4, 4});
    CHECK(H[1] == std::vector<std::int64_t>{0, 6, 0});
    CHECK(H[2] == std::vector<std::int64_t>{0, 0, 12});

    Eigen::MatrixXd M(2, 2);
    M << 1.0, 0.0, 37.0, 1.0;
    const Eigen::MatrixXd R = lll_reduce(M);
    CHECK(R.row(0).norm() == doctest::Approx(1.0));
    CHECK(R.row(1).norm() == doctest::Approx(1.0));
    CHECK(same_lattice(SymplecticLattice(M, false), SymplecticLattice(R, false)));
  }

  TEST_CASE("sublattice and containment") {
    const auto L = catalog_lattice("square");
    CHECK(contains(L, Eigen::Vector2d(2.0 * std::sqrt(kPi), -4.0 * std::sqrt(kPi))));
    CHECK_FALSE(contains(L, Eigen::Vector2d(std::sqrt(kPi), 0.0)));
    CHECK(is_sublattice(L.scaled(2.0), L));
    CHECK_FALSE(is_sublattice(L, L.scaled(2.0)));
  }

  TEST_CASE("Poisson summation matches the comb MacWilliams identity") {
    CHECK(poisson_macwilliams_residual(catalog_lattice("square"), 1.0, 12.0) <= 1e-8);
    CHECK(poisson_macwilliams_residual(catalog_lattice("hexagonal"), 0.8, 12.0) <= 1e-8);
  }

  TEST_CASE("comb weights") {
    const auto [A, B] = gkp_weights(catalog_lattice("square"), 5.0);
    CHECK(A.discrete()[0].mass == doctest::Approx(4.0));
    CHECK(B.discrete()[0].mass == doctest::Approx(2.0));
    CHECK(B.discrete()[1].location == doctest::Approx(std::sqrt(kPi)));
    CHECK(B.discrete()[1].mass == doctest::Approx(8.0));
    CHECK(A.metadata().at("r_max") != "");
  }

  TEST_CASE("input validation") {
    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, 0.0, 0.0, 1.0;
    CHECK_THROWS_AS(SymplecticLattice(bad, true), ValidationError);
    CHECK_NOTHROW(SymplecticLattice(bad, false));
    Eigen::MatrixXd odd(3, 3);
    odd.setIdentity();
    CHECK_THROWS_AS(SymplecticLattice(odd, false), ValidationError);
    CHECK_THROWS_AS(catalog_lattice("nonsense"), ValidationError);
    CHECK_THROWS_AS(length_spectrum(catalog_lattice("square"), 1e4, 1000), ValidationError);
  }

  TEST_CASE("text round trip") {
    const auto L = catalog_lattice("hexagonal");
    std::stringstream io;
    write_lattice(io, L);
    const auto back = read_lattice(io);
    CHECK((back.generator() - L.generator()).norm() < 1e-14);
    std::istringstream broken("1\n1 2\n");
    CHECK_THROWS_AS(read_lattice(broken), ValidationError);
  }
}
