#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "csradar/scene_grid.hpp"

using namespace csradar;

TEST_CASE("geometry sampling range and determinism") {
  const ArrayGeometry g = sample_geometry(6, 6, 1);
  CHECK(g.n_tx() == 6);
  CHECK(g.n_rx() == 6);
  CHECK(g.tx_positions.minCoeff() >= 0.0);
  CHECK(g.tx_positions.maxCoeff() <= 18.0);
  CHECK(g.rx_positions.maxCoeff() <= 18.0);

  const ArrayGeometry again = sample_geometry(6, 6, 1);
  CHECK((g.tx_positions - again.tx_positions).cwiseAbs().maxCoeff() == 0.0);
  CHECK((g.rx_positions - again.rx_positions).cwiseAbs().maxCoeff() == 0.0);

  const ArrayGeometry tiny = sample_geometry(1, 1, 9);
  CHECK(tiny.tx_positions(0) >= 0.0);
  CHECK(tiny.tx_positions(0) <= 0.5);

  CHECK_THROWS(sample_geometry(0, 1, 0));
  CHECK_THROWS(sample_geometry(1, 0, 0));
}

TEST_CASE("grid layout and azimuth indexing") {
  const Grid g = make_grid(37, 37, 6, 6);
  CHECK(g.n_azimuth == 36);
  CHECK(g.cells() == 49284);
  CHECK(g.delta_beta == doctest::Approx(2.0 / 36.0));
  // Azimuth points are n * delta_beta for n = 1..N_beta (not 0-based).
  CHECK(g.azimuth(0) == doctest::Approx(g.delta_beta));
  CHECK(g.azimuth(35) == doctest::Approx(2.0));

  // Delay fastest, Doppler next, azimuth slowest.
  CHECK(g.cell_index(0, 0, 0) == 0);
  CHECK(g.cell_index(1, 0, 0) == 1);
  CHECK(g.cell_index(0, 1, 0) == 37);
  CHECK(g.cell_index(0, 0, 1) == 37 * 37);
  for (std::int64_t idx : {0LL, 36LL, 1000LL, 49283LL}) {
    int tau, f, b;
    g.cell_coords(idx, tau, f, b);
    CHECK(g.cell_index(tau, f, b) == idx);
  }
  CHECK_THROWS(make_grid(0, 1, 1, 1));
}

TEST_CASE("steering vectors") {
  const ArrayGeometry g = sample_geometry(3, 4, 2);
  const auto [tx0, rx0] = steering_vectors(g, 0.0);
  CHECK((tx0 - CVec::Ones(3)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((rx0 - CVec::Ones(4)).cwiseAbs().maxCoeff() < 1e-14);

  const auto [tx, rx] = steering_vectors(g, 0.37);
  CHECK(tx.squaredNorm() == doctest::Approx(3.0));
  CHECK(rx.squaredNorm() == doctest::Approx(4.0));
  for (int j = 0; j < 3; ++j) CHECK(std::abs(std::abs(tx(j)) - 1.0) < 1e-14);

  const auto [txm, rxm] = steering_vectors(g, -0.37);
  CHECK((txm - tx.conjugate()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((rxm - rx.conjugate()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("scene sampling") {
  const Grid g = make_grid(37, 37, 6, 6);
  const SparseScene s = sample_scene(g, 10, {}, 5);
  CHECK(s.support.size() == 10);
  CHECK(std::set<std::int64_t>(s.support.begin(), s.support.end()).size() == 10);
  for (auto idx : s.support) {
    CHECK(idx >= 0);
    CHECK(idx < g.cells());
  }
  for (Eigen::Index k = 0; k < s.amplitudes.size(); ++k)
    CHECK(std::abs(std::abs(s.amplitudes(k)) - 1.0) < 1e-12);  // unit default

  const SparseScene again = sample_scene(g, 10, {}, 5);
  CHECK(s.support == again.support);
  CHECK((s.amplitudes - again.amplitudes).cwiseAbs().maxCoeff() == 0.0);

  const Grid small = make_grid(3, 2, 2, 1);
  const SparseScene full = sample_scene(small, small.cells(), {}, 1);
  CHECK(static_cast<std::int64_t>(full.support.size()) == small.cells());
  CHECK_THROWS(sample_scene(small, small.cells() + 1, {}, 1));
  CHECK_THROWS(sample_scene(small, 0, {}, 1));

  // Dense expansion puts amplitudes at the right cells.
  const CVec x = s.dense(g);
  CHECK(x.size() == g.cells());
  CHECK(x(s.support[0]) == s.amplitudes(0));

  // Magnitude models.
  MagnitudeModel um{MagnitudeModel::Kind::uniform, 2.0, 3.0};
  const SparseScene us = sample_scene(g, 50, um, 8);
  for (Eigen::Index k = 0; k < us.amplitudes.size(); ++k) {
    CHECK(std::abs(us.amplitudes(k)) >= 2.0);
    CHECK(std::abs(us.amplitudes(k)) <= 3.0);
  }
}

TEST_CASE("scene support is uniform across cells") {
  const Grid g = make_grid(5, 2, 2, 1);  // 20 cells
  const int draws = 10000;
  std::vector<int> hits(g.cells(), 0);
  for (int t = 0; t < draws; ++t) {
    const SparseScene s = sample_scene(g, 1, {}, 1000 + t);
    ++hits[s.support[0]];
  }
  const double expected = static_cast<double>(draws) / g.cells();
  double chi2 = 0.0;
  for (int h : hits) chi2 += (h - expected) * (h - expected) / expected;
  // 19 degrees of freedom, p-value 0.001 critical value.
  CHECK(chi2 < 43.82);
}

TEST_CASE("detectability floor") {
  const Grid g = make_grid(37, 37, 6, 6);
  CHECK(min_amplitude(0.0, 6, 6, g) == 0.0);
  // (8 sqrt(3) / 6) * sqrt(2 log 49284), frozen from a separate evaluation.
  CHECK(min_amplitude(1.0, 6, 6, g) == doctest::Approx(10.7358).epsilon(1e-3));
  CHECK(min_amplitude(2.0, 6, 6, g) ==
        doctest::Approx(2.0 * min_amplitude(1.0, 6, 6, g)));
  CHECK_THROWS(min_amplitude(-1.0, 6, 6, g));
}

TEST_CASE("json round trips") {
  const ArrayGeometry g = sample_geometry(3, 2, 77);
  const ArrayGeometry g2 = geometry_from_json(geometry_to_json(g));
  CHECK(g2.seed == g.seed);
  CHECK((g2.tx_positions - g.tx_positions).cwiseAbs().maxCoeff() == 0.0);
  CHECK((g2.rx_positions - g.rx_positions).cwiseAbs().maxCoeff() == 0.0);

  const Grid grid = make_grid(5, 5, 2, 3);
  const SparseScene s = sample_scene(grid, 4, {}, 13);
  const SparseScene s2 = scene_from_json(scene_to_json(s));
  CHECK(s2.support == s.support);
  CHECK((s2.amplitudes - s.amplitudes).cwiseAbs().maxCoeff() == 0.0);
}
