#include "nnpost/quadrature.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <thread>

#include "nnpost/error.hpp"

namespace nnpost {

namespace {

constexpr double kScanLo = 1e-3;
constexpr double kScanHi = 1e3;
constexpr int kScanPoints = 64;
constexpr double kModeLo = 1e-6;
constexpr double kModeHi = 1e6;
constexpr int kMaxExpansions = 80;
constexpr double kExpansionFactor = 1.5;
constexpr double kInitialOffset = 1e-3;  // relative to the mode coordinate
constexpr int kTightenSteps = 6;

// Maximizes g on [a, b] by golden-section search.
template <class F>
double golden_max(F&& g, double a, double b, double tol) {
  constexpr double inv_phi = 0.61803398874989484820;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double gc = g(c);
  double gd = g(d);
  while (b - a > tol) {
    if (gc >= gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - inv_phi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + inv_phi * (b - a);
      gd = g(d);
    }
  }
  return 0.5 * (a + b);
}

double safe_eval(const LogDensity2D& f, double s1, double s2) {
  const double v = f(s1, s2);
  if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
    throw Error(ErrorCode::numerical_failure, "log density is NaN or +inf at (" +
                                                  std::to_string(s1) + ", " +
                                                  std::to_string(s2) + ")");
  }
  return v;
}

double node_coord(const Interval& iv, int i, int nodes) {
  if (i == nodes - 1) return iv.hi;
  return iv.lo + (iv.hi - iv.lo) * static_cast<double>(i) / static_cast<double>(nodes - 1);
}

// Largest log density along one rectangle edge: the best of `nodes`
// equispaced points, refined between its neighbours.
double edge_max(const LogDensity2D& f, int axis, double fixed, const Interval& span, int nodes) {
  auto at = [&](double t) { return axis == 0 ? safe_eval(f, fixed, t) : safe_eval(f, t, fixed); };
  double best = -std::numeric_limits<double>::infinity();
  int arg = 0;
  for (int i = 0; i < nodes; ++i) {
    const double v = at(node_coord(span, i, nodes));
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  if (!std::isfinite(best)) return best;
  const double a = node_coord(span, std::max(arg - 1, 0), nodes);
  const double b = node_coord(span, std::min(arg + 1, nodes - 1), nodes);
  const double t = golden_max(at, a, b, 1e-4 * (b - a));
  return std::max(best, at(t));
}

struct BlockResult {
  double normalizer = 0.0;
  std::vector<std::vector<double>> pointwise;
  std::vector<Eigen::MatrixXd> outer;
};

unsigned resolve_threads(unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  return threads;
}

template <class Body>
void run_blocks(int blocks, unsigned threads, Body&& body) {
  threads = std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(blocks));
  if (threads <= 1) {
    for (int b = 0; b < blocks; ++b) body(b);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int b = next++; b < blocks; b = next++) body(b);
      } catch (...) {
        errors[t] = std::current_exception();
        next = blocks;
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

MomentAccumulator integrate_impl(const LogDensity2D& log_density, const MarginalModel* model,
                                 const GridSpec& grid, std::span<const Functional> functionals,
                                 unsigned threads) {
  grid.validate();
  if (functionals.empty()) {
    throw Error(ErrorCode::invalid_argument, "integrate needs at least one functional");
  }
  std::set<std::string, std::less<>> names;
  std::size_t outer_bytes = 0;
  for (const auto& f : functionals) {
    if (!f.eval || f.size == 0) {
      throw Error(ErrorCode::invalid_argument, "functional '" + f.name + "' is empty");
    }
    if (!names.insert(f.name).second) {
      throw Error(ErrorCode::invalid_argument, "duplicate functional '" + f.name + "'");
    }
    if (f.outer) outer_bytes += f.size * f.size * sizeof(double);
  }

  const int nodes = grid.nodes_per_axis;
  const double h1 = (grid.sigma1.hi - grid.sigma1.lo) / (nodes - 1);
  const double h2 = (grid.sigma2.hi - grid.sigma2.lo) / (nodes - 1);
  std::vector<double> s1(nodes), s2(nodes), tw1(nodes, h1), tw2(nodes, h2);
  for (int i = 0; i < nodes; ++i) {
    s1[i] = node_coord(grid.sigma1, i, nodes);
    s2[i] = node_coord(grid.sigma2, i, nodes);
  }
  tw1.front() *= 0.5;
  tw1.back() *= 0.5;
  tw2.front() *= 0.5;
  tw2.back() *= 0.5;

  // Block layout depends only on the problem, never on the thread count.
  int blocks = std::min(nodes, 16);
  if (outer_bytes > 0) {
    const std::size_t budget = std::size_t{256} << 20;
    blocks = std::clamp<int>(static_cast<int>(budget / outer_bytes), 1, blocks);
  }
  auto block_rows = [&](int b) {
    return std::pair<int, int>{b * nodes / blocks, (b + 1) * nodes / blocks};
  };

  std::vector<double> logq(static_cast<std::size_t>(nodes) * nodes);
  run_blocks(blocks, threads, [&](int b) {
    const auto [r0, r1] = block_rows(b);
    for (int i = r0; i < r1; ++i) {
      for (int j = 0; j < nodes; ++j) logq[i * nodes + j] = safe_eval(log_density, s1[i], s2[j]);
    }
  });
  const double log_scale = *std::max_element(logq.begin(), logq.end());
  if (!std::isfinite(log_scale)) {
    throw Error(ErrorCode::degenerate_grid, "density is zero on every grid node");
  }

  const std::size_t k = model ? static_cast<std::size_t>(model->k()) : 0;
  constexpr int kBatch = 128;
  std::vector<BlockResult> results(blocks);
  run_blocks(blocks, threads, [&](int b) {
    BlockResult& res = results[b];
    res.pointwise.resize(functionals.size());
    res.outer.resize(functionals.size());
    std::vector<std::vector<double>> buffers(functionals.size());
    std::vector<Eigen::MatrixXd> batch(functionals.size());
    for (std::size_t f = 0; f < functionals.size(); ++f) {
      buffers[f].resize(functionals[f].size);
      if (functionals[f].outer) {
        const auto m = static_cast<Index>(functionals[f].size);
        res.outer[f] = Eigen::MatrixXd::Zero(m, m);
        batch[f].resize(m, kBatch);
      } else {
        res.pointwise[f].assign(functionals[f].size, 0.0);
      }
    }
    int pending = 0;
    auto flush = [&] {
      if (pending == 0) return;
      for (std::size_t f = 0; f < functionals.size(); ++f) {
        if (!functionals[f].outer) continue;
        res.outer[f].selfadjointView<Eigen::Upper>().rankUpdate(batch[f].leftCols(pending));
      }
      pending = 0;
    };
    std::vector<double> mean(k), var(k);
    const auto [r0, r1] = block_rows(b);
    for (int i = r0; i < r1; ++i) {
      for (int j = 0; j < nodes; ++j) {
        const double weight = tw1[i] * tw2[j] * std::exp(logq[i * nodes + j] - log_scale);
        if (weight == 0.0) continue;
        res.normalizer += weight;
        Node node{s1[i], s2[j], {}, {}};
        if (model) {
          model->conditional_z(s1[i], s2[j], mean, var);
          node.mean = mean;
          node.variance = var;
        }
        const double root = std::sqrt(weight);
        for (std::size_t f = 0; f < functionals.size(); ++f) {
          auto& buf = buffers[f];
          functionals[f].eval(node, buf);
          if (functionals[f].outer) {
            for (std::size_t e = 0; e < buf.size(); ++e) batch[f](e, pending) = root * buf[e];
          } else {
            auto& acc = res.pointwise[f];
            for (std::size_t e = 0; e < buf.size(); ++e) acc[e] += weight * buf[e];
          }
        }
        if (outer_bytes > 0 && ++pending == kBatch) flush();
      }
    }
    flush();
  });

  double normalizer = 0.0;
  std::map<std::string, std::vector<double>, std::less<>> raw;
  std::vector<std::vector<double>> totals(functionals.size());
  std::vector<Eigen::MatrixXd> outer_totals(functionals.size());
  for (std::size_t f = 0; f < functionals.size(); ++f) {
    if (functionals[f].outer) {
      const auto m = static_cast<Index>(functionals[f].size);
      outer_totals[f] = Eigen::MatrixXd::Zero(m, m);
    } else {
      totals[f].assign(functionals[f].size, 0.0);
    }
  }
  for (const auto& res : results) {
    normalizer += res.normalizer;
    for (std::size_t f = 0; f < functionals.size(); ++f) {
      if (functionals[f].outer) {
        outer_totals[f] += res.outer[f];
      } else {
        for (std::size_t e = 0; e < totals[f].size(); ++e) totals[f][e] += res.pointwise[f][e];
      }
    }
  }
  for (std::size_t f = 0; f < functionals.size(); ++f) {
    if (functionals[f].outer) {
      const auto m = static_cast<Index>(functionals[f].size);
      std::vector<double> packed;
      packed.reserve(functionals[f].result_size());
      for (Index r = 0; r < m; ++r) {
        for (Index c = r; c < m; ++c) packed.push_back(outer_totals[f](r, c));
      }
      raw.emplace(functionals[f].name, std::move(packed));
    } else {
      raw.emplace(functionals[f].name, std::move(totals[f]));
    }
  }
  return MomentAccumulator(normalizer, log_scale, std::move(raw));
}

}  // namespace

void GridSpec::validate() const {
  auto check = [](const Interval& iv, const char* axis) {
    if (!(iv.lo > 0.0) || !(iv.hi > iv.lo) || !std::isfinite(iv.hi)) {
      throw Error(ErrorCode::invalid_argument,
                  std::string("grid range for ") + axis + " must satisfy 0 < lo < hi");
    }
  };
  check(sigma1, "sigma1");
  check(sigma2, "sigma2");
  if (nodes_per_axis < 2) {
    throw Error(ErrorCode::invalid_argument, "nodes_per_axis must be at least 2");
  }
}

MomentAccumulator::MomentAccumulator(double normalizer, double log_scale,
                                     std::map<std::string, std::vector<double>, std::less<>> raw)
    : normalizer_(normalizer), log_scale_(log_scale), raw_(std::move(raw)) {
  if (!(normalizer_ > 0.0) || !std::isfinite(normalizer_)) {
    throw Error(ErrorCode::degenerate_grid, "quadrature normalizer is not positive");
  }
}

bool MomentAccumulator::contains(std::string_view name) const {
  return raw_.find(name) != raw_.end();
}

std::span<const double> MomentAccumulator::raw(std::string_view name) const {
  const auto it = raw_.find(name);
  if (it == raw_.end()) {
    throw Error(ErrorCode::invalid_argument,
                "functional '" + std::string(name) + "' was not integrated");
  }
  return it->second;
}

std::vector<double> MomentAccumulator::expectation(std::string_view name) const {
  const auto values = raw(name);
  std::vector<double> out(values.begin(), values.end());
  for (auto& v : out) v /= normalizer_;
  return out;
}

Mode find_mode(const LogDensity2D& f) {
  const double u_lo = std::log(kScanLo);
  const double u_hi = std::log(kScanHi);
  const double step = (u_hi - u_lo) / (kScanPoints - 1);

  double best = -std::numeric_limits<double>::infinity();
  double u1 = 0.0;
  double u2 = 0.0;
  for (int i = 0; i < kScanPoints; ++i) {
    for (int j = 0; j < kScanPoints; ++j) {
      const double a = u_lo + step * i;
      const double b = u_lo + step * j;
      const double v = safe_eval(f, std::exp(a), std::exp(b));
      if (v > best) {
        best = v;
        u1 = a;
        u2 = b;
      }
    }
  }
  if (!std::isfinite(best)) {
    throw Error(ErrorCode::mode_search_failure, "density vanishes on the whole scan grid");
  }

  const double limit_lo = std::log(kModeLo);
  const double limit_hi = std::log(kModeHi);
  for (int sweep = 0; sweep < 200; ++sweep) {
    const double prev1 = u1;
    const double prev2 = u2;
    u1 = golden_max([&](double u) { return safe_eval(f, std::exp(u), std::exp(u2)); },
                    std::max(limit_lo, u1 - step), std::min(limit_hi, u1 + step), 1e-10);
    u2 = golden_max([&](double u) { return safe_eval(f, std::exp(u1), std::exp(u)); },
                    std::max(limit_lo, u2 - step), std::min(limit_hi, u2 + step), 1e-10);
    if (std::abs(u1 - prev1) < 1e-9 && std::abs(u2 - prev2) < 1e-9) break;
  }
  const double edge_tol = 1e-6;
  if (u1 < limit_lo + edge_tol || u1 > limit_hi - edge_tol || u2 < limit_lo + edge_tol ||
      u2 > limit_hi - edge_tol) {
    throw Error(ErrorCode::mode_search_failure,
                "mode could not be localized inside [1e-6, 1e6]^2 (reached sigma1=" +
                    std::to_string(std::exp(u1)) + ", sigma2=" + std::to_string(std::exp(u2)) +
                    ")");
  }
  Mode mode{std::exp(u1), std::exp(u2), 0.0};
  mode.log_density = safe_eval(f, mode.sigma1, mode.sigma2);
  if (!std::isfinite(mode.log_density)) {
    throw Error(ErrorCode::mode_search_failure, "density vanishes at the located mode");
  }
  return mode;
}

Mode find_mode(const MarginalModel& model) {
  return find_mode([&model](double a, double b) { return model.log_qtilde(a, b); });
}

GridSpec auto_bounds(const LogDensity2D& f, const Hyperparams& hyper) {
  hyper.validate();
  const Mode mode = find_mode(f);
  const int nodes = hyper.grid_nodes;
  const double floor = hyper.sigma_floor;

  // Offsets of the four sides from the mode: sigma1 lo/hi, sigma2 lo/hi.
  std::array<double, 4> offset{kInitialOffset * mode.sigma1, kInitialOffset * mode.sigma1,
                               kInitialOffset * mode.sigma2, kInitialOffset * mode.sigma2};
  auto rect = [&] {
    GridSpec g;
    g.sigma1 = {std::max(floor, mode.sigma1 - offset[0]), mode.sigma1 + offset[1]};
    g.sigma2 = {std::max(floor, mode.sigma2 - offset[2]), mode.sigma2 + offset[3]};
    g.nodes_per_axis = nodes;
    return g;
  };
  if (mode.sigma1 <= floor || mode.sigma2 <= floor) {
    throw Error(ErrorCode::degenerate_grid, "mode lies below sigma_floor");
  }
  auto clamped = [&](int side, const GridSpec& g) {
    return (side == 0 && g.sigma1.lo <= floor) || (side == 2 && g.sigma2.lo <= floor);
  };
  auto side_ok = [&](int side, const GridSpec& g) {
    if (clamped(side, g)) return true;
    double edge = 0.0;
    switch (side) {
      case 0: edge = edge_max(f, 0, g.sigma1.lo, g.sigma2, nodes); break;
      case 1: edge = edge_max(f, 0, g.sigma1.hi, g.sigma2, nodes); break;
      case 2: edge = edge_max(f, 1, g.sigma2.lo, g.sigma1, nodes); break;
      default: edge = edge_max(f, 1, g.sigma2.hi, g.sigma1, nodes); break;
    }
    return mode.log_density - edge >= hyper.tail_drop;
  };

  std::array<int, 4> grown{};
  bool found = false;
  for (int step = 0; step <= kMaxExpansions && !found; ++step) {
    const GridSpec g = rect();
    std::array<bool, 4> grow{};
    for (int s = 0; s < 4; ++s) grow[s] = !side_ok(s, g);
    found = std::none_of(grow.begin(), grow.end(), [](bool b) { return b; });
    if (found || step == kMaxExpansions) break;
    for (int s = 0; s < 4; ++s) {
      if (!grow[s]) continue;
      offset[s] *= kExpansionFactor;
      ++grown[s];
    }
  }
  if (!found) {
    throw Error(ErrorCode::degenerate_grid,
                "boundary did not fall tail_drop below the mode within 80 expansions");
  }

  // The 1.5x bracket can overshoot the crossing by that factor, which wastes
  // nodes; bisect each expanded side back toward it. Every accepted step
  // re-checks all four edges since their node placement moves with the box.
  auto all_ok = [&](const GridSpec& g) {
    for (int s = 0; s < 4; ++s) {
      if (!side_ok(s, g)) return false;
    }
    return true;
  };
  for (int s = 0; s < 4; ++s) {
    if (grown[s] == 0) continue;
    double good = std::log(offset[s]);
    double bad = good - std::log(kExpansionFactor);
    for (int it = 0; it < kTightenSteps; ++it) {
      const double mid = 0.5 * (good + bad);
      offset[s] = std::exp(mid);
      const GridSpec g = rect();
      (!clamped(s, g) && all_ok(g) ? good : bad) = mid;
    }
    offset[s] = std::exp(good);
  }
  return rect();
}

GridSpec auto_bounds(const MarginalModel& model, const Hyperparams& hyper) {
  return auto_bounds([&model](double a, double b) { return model.log_qtilde(a, b); }, hyper);
}

MomentAccumulator integrate(const MarginalModel& model, const GridSpec& grid,
                            std::span<const Functional> functionals, unsigned threads) {
  return integrate_impl([&model](double a, double b) { return model.log_qtilde(a, b); }, &model,
                        grid, functionals, threads);
}

MomentAccumulator integrate(const LogDensity2D& log_density, const GridSpec& grid,
                            std::span<const Functional> functionals, unsigned threads) {
  return integrate_impl(log_density, nullptr, grid, functionals, threads);
}

}  // namespace nnpost
