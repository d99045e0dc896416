#include "csradar/scene_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "csradar/rng.hpp"

namespace csradar {

using nlohmann::json;

ArrayGeometry sample_geometry(int n_tx, int n_rx, std::uint64_t seed) {
  if (n_tx < 1 || n_rx < 1)
    throw std::invalid_argument("sample_geometry: antenna counts must be >= 1");
  const double hi = 0.5 * n_rx * n_tx;
  Rng rng(seed);
  ArrayGeometry geom;
  geom.seed = seed;
  geom.tx_positions.resize(n_tx);
  geom.rx_positions.resize(n_rx);
  for (int j = 0; j < n_tx; ++j) geom.tx_positions(j) = rng.uniform(0.0, hi);
  for (int j = 0; j < n_rx; ++j) geom.rx_positions(j) = rng.uniform(0.0, hi);
  return geom;
}

void Grid::cell_coords(std::int64_t idx, int& tau, int& f, int& b) const {
  tau = static_cast<int>(idx % n_delay);
  idx /= n_delay;
  f = static_cast<int>(idx % n_doppler);
  b = static_cast<int>(idx / n_doppler);
}

Grid make_grid(int n_delay, int n_doppler, int n_rx, int n_tx) {
  if (n_delay < 1 || n_doppler < 1 || n_rx < 1 || n_tx < 1)
    throw std::invalid_argument("make_grid: sizes must be positive");
  Grid g;
  g.n_delay = n_delay;
  g.n_doppler = n_doppler;
  g.n_azimuth = n_rx * n_tx;
  g.delta_beta = 2.0 / (static_cast<double>(n_rx) * n_tx);
  return g;
}

std::pair<CVec, CVec> steering_vectors(const ArrayGeometry& geom, double beta) {
  const auto phases = [beta](const RVec& pos) {
    CVec v(pos.size());
    for (Eigen::Index j = 0; j < pos.size(); ++j) {
      const double theta = 2.0 * std::numbers::pi * pos(j) * beta;
      v(j) = cx{std::cos(theta), std::sin(theta)};
    }
    return v;
  };
  return {phases(geom.tx_positions), phases(geom.rx_positions)};
}

SparseScene sample_scene(const Grid& grid, std::int64_t s,
                         const MagnitudeModel& model, std::uint64_t seed) {
  const std::int64_t n = grid.cells();
  if (s < 1 || s > n)
    throw std::invalid_argument("sample_scene: need 1 <= s <= grid cells");

  Rng rng(seed);
  SparseScene scene;
  scene.seed = seed;

  // Floyd's sampling: uniform support without replacement.
  std::unordered_set<std::int64_t> chosen;
  for (std::int64_t j = n - s; j < n; ++j) {
    const std::int64_t t =
        static_cast<std::int64_t>(rng.uniform_index(static_cast<std::uint64_t>(j + 1)));
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  scene.support.assign(chosen.begin(), chosen.end());
  std::sort(scene.support.begin(), scene.support.end());

  scene.amplitudes.resize(s);
  for (std::int64_t k = 0; k < s; ++k) {
    double mag = 1.0;
    switch (model.kind) {
      case MagnitudeModel::Kind::constant: mag = model.a; break;
      case MagnitudeModel::Kind::uniform: mag = rng.uniform(model.a, model.b); break;
      case MagnitudeModel::Kind::log_normal:
        mag = std::exp(model.a + model.b * rng.normal());
        break;
    }
    scene.amplitudes(k) = mag * rng.unit_phase();
  }
  return scene;
}

CVec SparseScene::dense(const Grid& grid) const {
  CVec x = CVec::Zero(grid.cells());
  for (size_t k = 0; k < support.size(); ++k)
    x(support[k]) = amplitudes(static_cast<Eigen::Index>(k));
  return x;
}

double min_amplitude(double sigma, int n_rx, int n_tx, const Grid& grid) {
  if (sigma < 0) throw std::invalid_argument("min_amplitude: sigma < 0");
  const double n = static_cast<double>(grid.cells());
  return 8.0 * std::sqrt(3.0) * sigma /
         std::sqrt(static_cast<double>(n_rx) * n_tx) *
         std::sqrt(2.0 * std::log(n));
}

std::string geometry_to_json(const ArrayGeometry& geom) {
  json j;
  j["seed"] = geom.seed;
  j["tx_positions"] = std::vector<double>(
      geom.tx_positions.data(), geom.tx_positions.data() + geom.tx_positions.size());
  j["rx_positions"] = std::vector<double>(
      geom.rx_positions.data(), geom.rx_positions.data() + geom.rx_positions.size());
  return j.dump(2);
}

ArrayGeometry geometry_from_json(const std::string& text) {
  const json j = json::parse(text);
  ArrayGeometry geom;
  geom.seed = j.at("seed").get<std::uint64_t>();
  const auto tx = j.at("tx_positions").get<std::vector<double>>();
  const auto rx = j.at("rx_positions").get<std::vector<double>>();
  geom.tx_positions = Eigen::Map<const RVec>(tx.data(), static_cast<Eigen::Index>(tx.size()));
  geom.rx_positions = Eigen::Map<const RVec>(rx.data(), static_cast<Eigen::Index>(rx.size()));
  return geom;
}

std::string scene_to_json(const SparseScene& scene) {
  json j;
  j["seed"] = scene.seed;
  j["support"] = scene.support;
  std::vector<double> re, im;
  for (Eigen::Index k = 0; k < scene.amplitudes.size(); ++k) {
    re.push_back(scene.amplitudes(k).real());
    im.push_back(scene.amplitudes(k).imag());
  }
  j["amplitudes_re"] = re;
  j["amplitudes_im"] = im;
  return j.dump(2);
}

SparseScene scene_from_json(const std::string& text) {
  const json j = json::parse(text);
  SparseScene scene;
  scene.seed = j.at("seed").get<std::uint64_t>();
  scene.support = j.at("support").get<std::vector<std::int64_t>>();
  const auto re = j.at("amplitudes_re").get<std::vector<double>>();
  const auto im = j.at("amplitudes_im").get<std::vector<double>>();
  if (re.size() != im.size() || re.size() != scene.support.size())
    throw std::runtime_error("scene json: inconsistent lengths");
  scene.amplitudes.resize(static_cast<Eigen::Index>(re.size()));
  for (size_t k = 0; k < re.size(); ++k)
    scene.amplitudes(static_cast<Eigen::Index>(k)) = cx{re[k], im[k]};
  return scene;
}

}  // namespace csradar
