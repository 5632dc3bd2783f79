#include "nnpost/nnpost.h"

#include <algorithm>
#include <memory>
#include <new>
#include <string>

#include "nnpost/error.hpp"
#include "nnpost/pipeline.hpp"
#include "nnpost/sampler.hpp"

struct nnpost_data {
  nnpost::RegressionData data;
};

struct nnpost_basis {
  std::shared_ptr<const nnpost::SvdBasis> basis;
};

struct nnpost_summary {
  nnpost::FitResult result;
};

struct nnpost_chain {
  nnpost::Chain chain;
};

namespace {

thread_local std::string last_error;

nnpost_status to_status(nnpost::ErrorCode code) {
  using nnpost::ErrorCode;
  switch (code) {
    case ErrorCode::invalid_argument: return NNPOST_ERR_INVALID_ARGUMENT;
    case ErrorCode::dimension_mismatch: return NNPOST_ERR_DIMENSION;
    case ErrorCode::non_finite: return NNPOST_ERR_NON_FINITE;
    case ErrorCode::empty_input: return NNPOST_ERR_EMPTY;
    case ErrorCode::svd_failure: return NNPOST_ERR_SVD;
    case ErrorCode::mode_search_failure: return NNPOST_ERR_MODE_SEARCH;
    case ErrorCode::degenerate_grid: return NNPOST_ERR_DEGENERATE_GRID;
    case ErrorCode::numerical_failure: return NNPOST_ERR_NUMERICAL;
    case ErrorCode::sampler_failure: return NNPOST_ERR_SAMPLER;
  }
  return NNPOST_ERR_INTERNAL;
}

nnpost_status fail(nnpost_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <class Body>
nnpost_status guarded(Body&& body) {
  try {
    last_error.clear();
    body();
    return NNPOST_OK;
  } catch (const nnpost::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(NNPOST_ERR_ALLOC, "out of memory");
  } catch (const std::exception& e) {
    return fail(NNPOST_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(NNPOST_ERR_INTERNAL, "unknown exception");
  }
}

nnpost_status null_argument(const char* name) {
  return fail(NNPOST_ERR_INVALID_ARGUMENT, std::string("null argument: ") + name);
}

void copy_out(const Eigen::VectorXd& v, double* out) { std::copy(v.data(), v.data() + v.size(), out); }

void copy_out_row_major(const Eigen::MatrixXd& m, double* out) {
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      out, m.rows(), m.cols()) = m;
}

}  // namespace

extern "C" {

int nnpost_abi_version(void) { return NNPOST_ABI_VERSION; }

const char* nnpost_status_string(nnpost_status status) {
  switch (status) {
    case NNPOST_OK: return "ok";
    case NNPOST_ERR_INVALID_ARGUMENT: return "invalid argument";
    case NNPOST_ERR_DIMENSION: return "dimension mismatch";
    case NNPOST_ERR_NON_FINITE: return "non-finite value";
    case NNPOST_ERR_EMPTY: return "empty input";
    case NNPOST_ERR_SVD: return "SVD failure";
    case NNPOST_ERR_MODE_SEARCH: return "mode search failure";
    case NNPOST_ERR_DEGENERATE_GRID: return "degenerate grid";
    case NNPOST_ERR_NUMERICAL: return "numerical failure";
    case NNPOST_ERR_SAMPLER: return "sampler failure";
    case NNPOST_ERR_ALLOC: return "out of memory";
    case NNPOST_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* nnpost_last_error(void) { return last_error.c_str(); }

nnpost_status nnpost_data_create(size_t n, size_t k, const double* x, const double* y,
                                 nnpost_data** out) {
  if (!out) return null_argument("out");
  *out = nullptr;
  if (n > 0 && k > 0 && !x) return null_argument("x");
  if (n > 0 && !y) return null_argument("y");
  return guarded([&] {
    auto handle = std::make_unique<nnpost_data>();
    const auto rows = static_cast<Eigen::Index>(n);
    const auto cols = static_cast<Eigen::Index>(k);
    handle->data.x.resize(rows, cols);
    if (rows > 0 && cols > 0) {
      handle->data.x = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                      Eigen::RowMajor>>(x, rows, cols);
    }
    handle->data.y = rows > 0 ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(y, rows))
                              : Eigen::VectorXd();
    nnpost::validate(handle->data);
    *out = handle.release();
  });
}

nnpost_status nnpost_data_generate(size_t n, size_t k, uint64_t seed, nnpost_data** out,
                                   double* beta_true) {
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto synth = nnpost::generate_synthetic(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(k), seed);
    auto handle = std::make_unique<nnpost_data>();
    handle->data = std::move(synth.data);
    if (beta_true) copy_out(synth.beta_true, beta_true);
    *out = handle.release();
  });
}

void nnpost_data_free(nnpost_data* data) { delete data; }

nnpost_status nnpost_data_dims(const nnpost_data* data, size_t* n, size_t* k) {
  if (!data) return null_argument("data");
  if (n) *n = static_cast<size_t>(data->data.n());
  if (k) *k = static_cast<size_t>(data->data.k());
  return NNPOST_OK;
}

nnpost_status nnpost_data_copy_x(const nnpost_data* data, double* x) {
  if (!data) return null_argument("data");
  if (!x) return null_argument("x");
  copy_out_row_major(data->data.x, x);
  return NNPOST_OK;
}

nnpost_status nnpost_data_copy_y(const nnpost_data* data, double* y) {
  if (!data) return null_argument("data");
  if (!y) return null_argument("y");
  copy_out(data->data.y, y);
  return NNPOST_OK;
}

nnpost_status nnpost_basis_create(const nnpost_data* data, nnpost_basis** out) {
  if (!out) return null_argument("out");
  *out = nullptr;
  if (!data) return null_argument("data");
  return guarded([&] {
    auto handle = std::make_unique<nnpost_basis>();
    handle->basis = std::make_shared<const nnpost::SvdBasis>(nnpost::factorize(data->data));
    *out = handle.release();
  });
}

void nnpost_basis_free(nnpost_basis* basis) { delete basis; }

nnpost_status nnpost_basis_dims(const nnpost_basis* basis, size_t* n, size_t* k) {
  if (!basis) return null_argument("basis");
  if (n) *n = static_cast<size_t>(basis->basis->n());
  if (k) *k = static_cast<size_t>(basis->basis->k());
  return NNPOST_OK;
}

nnpost_status nnpost_basis_lambda(const nnpost_basis* basis, double* lambda) {
  if (!basis) return null_argument("basis");
  if (!lambda) return null_argument("lambda");
  copy_out(basis->basis->lambda(), lambda);
  return NNPOST_OK;
}

nnpost_status nnpost_basis_w(const nnpost_basis* basis, double* w) {
  if (!basis) return null_argument("basis");
  if (!w) return null_argument("w");
  copy_out(basis->basis->w(), w);
  return NNPOST_OK;
}

nnpost_status nnpost_basis_v(const nnpost_basis* basis, double* v) {
  if (!basis) return null_argument("basis");
  if (!v) return null_argument("v");
  copy_out_row_major(basis->basis->v(), v);
  return NNPOST_OK;
}

nnpost_status nnpost_basis_yty(const nnpost_basis* basis, double* yty) {
  if (!basis) return null_argument("basis");
  if (!yty) return null_argument("yty");
  *yty = basis->basis->yty();
  return NNPOST_OK;
}

nnpost_status nnpost_log_qtilde(const nnpost_basis* basis, double gamma, double sigma1,
                                double sigma2, double* out) {
  if (!basis) return null_argument("basis");
  if (!out) return null_argument("out");
  return guarded([&] {
    const nnpost::MarginalModel model(basis->basis, gamma);
    *out = model.log_qtilde(sigma1, sigma2);
  });
}

void nnpost_fit_options_init(nnpost_fit_options* options) {
  if (!options) return;
  const nnpost::Hyperparams defaults;
  options->gamma = defaults.gamma;
  options->nodes = defaults.grid_nodes;
  options->tail_drop = defaults.tail_drop;
  options->sigma_floor = defaults.sigma_floor;
  options->cov_mode = NNPOST_COV_EXACT;
  options->threads = 1;
  options->use_grid = 0;
  std::fill(options->grid, options->grid + 4, 0.0);
}

nnpost_status nnpost_fit(const nnpost_basis* basis, const nnpost_fit_options* options,
                         nnpost_summary** out) {
  if (!out) return null_argument("out");
  *out = nullptr;
  if (!basis) return null_argument("basis");
  nnpost_fit_options defaults;
  nnpost_fit_options_init(&defaults);
  const nnpost_fit_options& o = options ? *options : defaults;
  return guarded([&] {
    nnpost::FitOptions fo;
    fo.hyper.gamma = o.gamma;
    fo.hyper.grid_nodes = o.nodes;
    fo.hyper.tail_drop = o.tail_drop;
    fo.hyper.sigma_floor = o.sigma_floor;
    switch (o.cov_mode) {
      case NNPOST_COV_EXACT: fo.cov_mode = nnpost::CovMode::exact; break;
      case NNPOST_COV_PAPER: fo.cov_mode = nnpost::CovMode::paper; break;
      case NNPOST_COV_DIAG: fo.cov_mode = nnpost::CovMode::diag; break;
      default: throw nnpost::Error(nnpost::ErrorCode::invalid_argument, "unknown cov_mode");
    }
    fo.threads = o.threads;
    if (o.use_grid) {
      fo.grid = nnpost::GridSpec{{o.grid[0], o.grid[1]}, {o.grid[2], o.grid[3]}, o.nodes};
    }
    auto handle = std::make_unique<nnpost_summary>();
    handle->result = nnpost::fit(basis->basis, fo);
    *out = handle.release();
  });
}

void nnpost_summary_free(nnpost_summary* summary) { delete summary; }

size_t nnpost_summary_k(const nnpost_summary* summary) {
  return summary ? static_cast<size_t>(summary->result.summary.mean_beta.size()) : 0;
}

nnpost_status nnpost_summary_sigma(const nnpost_summary* summary, double out[4]) {
  if (!summary) return null_argument("summary");
  if (!out) return null_argument("out");
  const auto& s = summary->result.summary;
  out[0] = s.mean_sigma1;
  out[1] = s.mean_sigma2;
  out[2] = s.var_sigma1;
  out[3] = s.var_sigma2;
  return NNPOST_OK;
}

nnpost_status nnpost_summary_mean_beta(const nnpost_summary* summary, double* mean) {
  if (!summary) return null_argument("summary");
  if (!mean) return null_argument("mean");
  copy_out(summary->result.summary.mean_beta, mean);
  return NNPOST_OK;
}

nnpost_status nnpost_summary_cov_beta(const nnpost_summary* summary, double* cov) {
  if (!summary) return null_argument("summary");
  if (!cov) return null_argument("cov");
  copy_out_row_major(summary->result.summary.cov_beta, cov);
  return NNPOST_OK;
}

nnpost_status nnpost_summary_grid(const nnpost_summary* summary, double out[4], int* nodes) {
  if (!summary) return null_argument("summary");
  const auto& g = summary->result.grid;
  if (out) {
    out[0] = g.sigma1.lo;
    out[1] = g.sigma1.hi;
    out[2] = g.sigma2.lo;
    out[3] = g.sigma2.hi;
  }
  if (nodes) *nodes = g.nodes_per_axis;
  return NNPOST_OK;
}

void nnpost_sampler_options_init(nnpost_sampler_options* options) {
  if (!options) return;
  const nnpost::SamplerConfig defaults;
  options->gamma = nnpost::Hyperparams{}.gamma;
  options->draws = defaults.draws;
  options->warmup = defaults.warmup;
  options->step_scale = defaults.step_scale;
  options->seed = defaults.seed;
  options->adapt = defaults.adapt ? 1 : 0;
  options->draw_beta = 1;
  options->beta_seed = 1;
}

nnpost_status nnpost_sample(const nnpost_basis* basis, const nnpost_sampler_options* options,
                            nnpost_chain** out) {
  if (!out) return null_argument("out");
  *out = nullptr;
  if (!basis) return null_argument("basis");
  nnpost_sampler_options defaults;
  nnpost_sampler_options_init(&defaults);
  const nnpost_sampler_options& o = options ? *options : defaults;
  return guarded([&] {
    const nnpost::MarginalModel model(basis->basis, o.gamma);
    nnpost::SamplerConfig config;
    config.draws = o.draws;
    config.warmup = o.warmup;
    config.step_scale = o.step_scale;
    config.seed = o.seed;
    config.adapt = o.adapt != 0;
    auto handle = std::make_unique<nnpost_chain>();
    handle->chain = nnpost::run_chain(model, config);
    if (o.draw_beta) handle->chain.beta = nnpost::draw_beta(model, handle->chain, o.beta_seed);
    *out = handle.release();
  });
}

void nnpost_chain_free(nnpost_chain* chain) { delete chain; }

size_t nnpost_chain_draws(const nnpost_chain* chain) { return chain ? chain->chain.size() : 0; }

size_t nnpost_chain_k(const nnpost_chain* chain) {
  return chain ? static_cast<size_t>(chain->chain.beta.cols()) : 0;
}

double nnpost_chain_acceptance(const nnpost_chain* chain) {
  return chain ? chain->chain.acceptance_rate : 0.0;
}

nnpost_status nnpost_chain_sigma(const nnpost_chain* chain, double* sigma1, double* sigma2) {
  if (!chain) return null_argument("chain");
  if (sigma1) std::copy(chain->chain.sigma1.begin(), chain->chain.sigma1.end(), sigma1);
  if (sigma2) std::copy(chain->chain.sigma2.begin(), chain->chain.sigma2.end(), sigma2);
  return NNPOST_OK;
}

nnpost_status nnpost_chain_beta(const nnpost_chain* chain, double* beta) {
  if (!chain) return null_argument("chain");
  if (!beta) return null_argument("beta");
  if (chain->chain.beta.size() == 0) {
    return fail(NNPOST_ERR_INVALID_ARGUMENT, "chain was sampled without beta draws");
  }
  copy_out_row_major(chain->chain.beta, beta);
  return NNPOST_OK;
}

nnpost_status nnpost_chain_estimates(const nnpost_chain* chain, double* mean, double* mcse) {
  if (!chain) return null_argument("chain");
  if (!mean || !mcse) return null_argument("mean/mcse");
  return guarded([&] {
    const auto& c = chain->chain;
    auto put = [&](std::size_t slot, std::span<const double> values) {
      const auto est = nnpost::batch_means(values);
      mean[slot] = est.mean;
      mcse[slot] = est.mcse;
    };
    put(0, c.sigma1);
    put(1, c.sigma2);
    std::vector<double> column(c.size());
    for (Eigen::Index i = 0; i < c.beta.cols(); ++i) {
      Eigen::Map<Eigen::VectorXd>(column.data(), c.beta.rows()) = c.beta.col(i);
      put(2 + static_cast<std::size_t>(i), column);
    }
  });
}

}  // extern "C"
