#include "cfisac/scenario.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "cfisac/errors.hpp"

namespace cfisac {

namespace {

enum class Stream : std::uint64_t {
  bs_position = 1,
  user_position = 2,
  target_position = 3,
  user_channel = 4,
  inter_bs_channel = 5,
  rcs = 6,
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent engine per (seed, stream, indices).
std::mt19937_64 substream(std::uint64_t seed, Stream tag, std::uint64_t a,
                          std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = splitmix64(seed);
  for (std::uint64_t v : {static_cast<std::uint64_t>(tag), a, b, c}) {
    s = splitmix64(s ^ v);
  }
  return std::mt19937_64(s);
}

Point draw_in_disc(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = radius * std::sqrt(unit(rng));
  const double phi = 2.0 * std::numbers::pi * unit(rng);
  return {r * std::cos(phi), r * std::sin(phi)};
}

// Circularly-symmetric complex Gaussian with the given variance.
cd draw_cn(std::mt19937_64& rng, double variance) {
  std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
  const double re = normal(rng);
  const double im = normal(rng);
  return {re, im};
}

double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void NetworkConfig::validate() const {
  std::ostringstream why;
  if (num_bs < 2) why << "J must be >= 2; ";
  if (num_users < 1) why << "K must be >= 1; ";
  if (num_targets < 1) why << "L must be >= 1; ";
  if (antennas < 1) why << "M must be >= 1; ";
  if (num_bs * antennas <= num_users) why << "J*M must exceed K; ";
  if (static_cast<int>(gamma.size()) != num_users) why << "gamma must have K entries; ";
  for (double g : gamma) {
    if (!positive_finite(g)) {
      why << "gamma entries must be positive; ";
      break;
    }
  }
  const std::pair<const char*, double> positives[] = {
      {"lambda", wavelength},      {"d", spacing},
      {"sigma_t_sq", rcs_var},     {"sigma_r_sq", sensing_noise},
      {"sigma_c_sq", comm_noise},  {"p_max", p_max},
      {"radius", radius},          {"ref_gain", ref_gain}};
  for (const auto& [name, value] : positives) {
    if (!positive_finite(value)) why << name << " must be positive; ";
  }
  for (double e : {pl_exp_bt, pl_exp_bu, pl_exp_bb}) {
    if (!std::isfinite(e) || e < 0.0) {
      why << "path-loss exponents must be non-negative; ";
      break;
    }
  }
  const std::string msg = why.str();
  if (!msg.empty()) throw InvalidConfig("invalid network config: " + msg);
}

void NetworkConfig::set_uniform_gamma(double value) {
  gamma.assign(static_cast<std::size_t>(std::max(num_users, 0)), value);
}

double path_gain(double dist, double exponent, double ref_gain) {
  if (!(dist > 0.0)) throw InvalidArgument("path_gain: distance must be positive");
  const double clamped = std::max(dist, 1.0);
  return ref_gain * std::pow(clamped, -exponent);
}

VecC steering_vector(double theta, double beta, int antennas, double spacing,
                     double wavelength) {
  VecC a(antennas);
  const double phase_step = 2.0 * std::numbers::pi / wavelength * spacing * std::sin(theta);
  for (int m = 0; m < antennas; ++m) {
    a(m) = beta * std::polar(1.0, phase_step * m);
  }
  return a;
}

VecC steering_vector(const Scenario& scenario, int bs, int target) {
  const auto& cfg = scenario.config;
  return steering_vector(scenario.theta(bs, target), scenario.beta(bs, target),
                         cfg.antennas, cfg.spacing, cfg.wavelength);
}

Scenario generate_scenario(const NetworkConfig& config, std::uint64_t seed) {
  config.validate();
  const int J = config.num_bs;
  const int K = config.num_users;
  const int L = config.num_targets;
  const int M = config.antennas;

  Scenario sc;
  sc.config = config;
  sc.config.seed = seed;
  sc.seed = seed;

  for (int j = 0; j < J; ++j) {
    auto rng = substream(seed, Stream::bs_position, j);
    sc.bs_pos.push_back(draw_in_disc(rng, config.radius));
  }
  for (int k = 0; k < K; ++k) {
    auto rng = substream(seed, Stream::user_position, k);
    sc.user_pos.push_back(draw_in_disc(rng, config.radius));
  }
  for (int l = 0; l < L; ++l) {
    auto rng = substream(seed, Stream::target_position, l);
    sc.target_pos.push_back(draw_in_disc(rng, config.radius));
  }

  sc.h.assign(J, std::vector<VecC>(K));
  for (int j = 0; j < J; ++j) {
    for (int k = 0; k < K; ++k) {
      auto rng = substream(seed, Stream::user_channel, j, k);
      const double amp = std::sqrt(
          path_gain(distance(sc.bs_pos[j], sc.user_pos[k]), config.pl_exp_bu, config.ref_gain));
      VecC v(M);
      for (int m = 0; m < M; ++m) v(m) = amp * draw_cn(rng, 1.0);
      sc.h[j][k] = std::move(v);
    }
  }

  sc.g.assign(J, std::vector<MatC>(J));
  for (int i = 0; i < J; ++i) {
    for (int j = 0; j < J; ++j) {
      if (i == j) {
        sc.g[i][j] = MatC::Zero(M, M);
        continue;
      }
      auto rng = substream(seed, Stream::inter_bs_channel, i, j);
      const double amp = std::sqrt(
          path_gain(distance(sc.bs_pos[i], sc.bs_pos[j]), config.pl_exp_bb, config.ref_gain));
      MatC G(M, M);
      for (int c = 0; c < M; ++c) {
        for (int r = 0; r < M; ++r) G(r, c) = amp * draw_cn(rng, 1.0);
      }
      sc.g[i][j] = std::move(G);
    }
  }

  sc.theta.resize(J, L);
  sc.beta.resize(J, L);
  for (int j = 0; j < J; ++j) {
    for (int l = 0; l < L; ++l) {
      const double dx = sc.target_pos[l].x - sc.bs_pos[j].x;
      const double dy = sc.target_pos[l].y - sc.bs_pos[j].y;
      // Arrays lie along x, so broadside is +y.
      sc.theta(j, l) = std::atan2(dx, dy);
      sc.beta(j, l) = std::sqrt(path_gain(std::hypot(dx, dy), config.pl_exp_bt, config.ref_gain));
    }
  }

  sc.xi.assign(L, MatC::Zero(J, J));
  for (int l = 0; l < L; ++l) {
    for (int j = 0; j < J; ++j) {
      for (int i = 0; i < J; ++i) {
        auto rng = substream(seed, Stream::rcs, l, j, i);
        sc.xi[l](j, i) = draw_cn(rng, config.rcs_var);
      }
    }
  }
  return sc;
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double value) { return 10.0 * std::log10(value); }

}  // namespace cfisac
