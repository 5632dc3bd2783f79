// nnpost command-line front end. Talks to the library only through the C API.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "io.hpp"
#include "nnpost/nnpost.h"

namespace {

using nnpost_cli::CsvWriter;
using nnpost_cli::JsonWriter;

enum Exit : int {
  exit_ok = 0,
  exit_internal = 1,
  exit_usage = 2,
  exit_io = 3,
  exit_parse = 4,
  exit_invalid_data = 5,
  exit_svd = 6,
  exit_grid = 7,
  exit_sampler = 8,
  exit_numerical = 9,
  exit_alloc = 10,
};

// Library failure carrying the status it came from.
struct LibError {
  nnpost_status status;
  std::string message;
};

void check(nnpost_status status, const char* what) {
  if (status == NNPOST_OK) return;
  std::string msg = std::string(what) + ": " + nnpost_status_string(status);
  const std::string detail = nnpost_last_error();
  if (!detail.empty()) msg += " (" + detail + ")";
  throw LibError{status, msg};
}

int exit_code(nnpost_status status) {
  switch (status) {
    case NNPOST_OK: return exit_ok;
    case NNPOST_ERR_INVALID_ARGUMENT:
    case NNPOST_ERR_DIMENSION:
    case NNPOST_ERR_NON_FINITE:
    case NNPOST_ERR_EMPTY: return exit_invalid_data;
    case NNPOST_ERR_SVD: return exit_svd;
    case NNPOST_ERR_MODE_SEARCH:
    case NNPOST_ERR_DEGENERATE_GRID: return exit_grid;
    case NNPOST_ERR_SAMPLER: return exit_sampler;
    case NNPOST_ERR_NUMERICAL: return exit_numerical;
    case NNPOST_ERR_ALLOC: return exit_alloc;
    case NNPOST_ERR_INTERNAL: return exit_internal;
  }
  return exit_internal;
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using DataPtr = std::unique_ptr<nnpost_data, Deleter<nnpost_data, nnpost_data_free>>;
using BasisPtr = std::unique_ptr<nnpost_basis, Deleter<nnpost_basis, nnpost_basis_free>>;
using SummaryPtr = std::unique_ptr<nnpost_summary, Deleter<nnpost_summary, nnpost_summary_free>>;
using ChainPtr = std::unique_ptr<nnpost_chain, Deleter<nnpost_chain, nnpost_chain_free>>;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fixed3(double seconds) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", seconds);
  return buf;
}

// --threads wins, then NNPOST_THREADS, then 0 (all cores).
unsigned resolve_threads(const std::optional<unsigned>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("NNPOST_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0') return static_cast<unsigned>(v);
    std::fprintf(stderr, "warning: ignoring malformed NNPOST_THREADS='%s'\n", env);
  }
  return 0;
}

nnpost_cov_mode cov_mode_from(const std::string& name) {
  if (name == "paper") return NNPOST_COV_PAPER;
  if (name == "diag") return NNPOST_COV_DIAG;
  return NNPOST_COV_EXACT;
}

DataPtr load_data(const std::string& x_path, const std::string& y_path, bool transpose) {
  auto x = nnpost_cli::read_csv(x_path);
  if (transpose) x = x.transposed();
  const auto y = nnpost_cli::read_csv(y_path);
  if (y.cols != 1) {
    throw LibError{NNPOST_ERR_DIMENSION,
                   y_path + ": expected a single column, found " + std::to_string(y.cols)};
  }
  if (y.rows != x.rows) {
    throw LibError{NNPOST_ERR_DIMENSION, "X has " + std::to_string(x.rows) + " rows but y has " +
                                             std::to_string(y.rows)};
  }
  nnpost_data* raw = nullptr;
  check(nnpost_data_create(x.rows, x.cols, x.values.data(), y.values.data(), &raw), "data");
  return DataPtr(raw);
}

struct Fitted {
  SummaryPtr summary;
  double precompute_s = 0.0;
  double integrate_s = 0.0;
};

Fitted timed_fit(const nnpost_data* data, const nnpost_fit_options& opts, BasisPtr* keep_basis) {
  Fitted out;
  auto t = Clock::now();
  nnpost_basis* basis_raw = nullptr;
  check(nnpost_basis_create(data, &basis_raw), "factorize");
  BasisPtr basis(basis_raw);
  out.precompute_s = seconds_since(t);
  t = Clock::now();
  nnpost_summary* summary_raw = nullptr;
  check(nnpost_fit(basis.get(), &opts, &summary_raw), "fit");
  out.summary.reset(summary_raw);
  out.integrate_s = seconds_since(t);
  if (keep_basis) *keep_basis = std::move(basis);
  return out;
}

struct SummaryValues {
  double sigma[4];
  std::vector<double> mean;
  std::vector<double> cov;
  double grid[4];
  int nodes = 0;
};

SummaryValues read_summary(const nnpost_summary* s) {
  SummaryValues v;
  const std::size_t k = nnpost_summary_k(s);
  v.mean.resize(k);
  v.cov.resize(k * k);
  check(nnpost_summary_sigma(s, v.sigma), "summary");
  check(nnpost_summary_mean_beta(s, v.mean.data()), "summary");
  check(nnpost_summary_cov_beta(s, v.cov.data()), "summary");
  check(nnpost_summary_grid(s, v.grid, &v.nodes), "summary");
  return v;
}

double max_abs_diff(const SummaryValues& a, const SummaryValues& b) {
  double d = 0.0;
  for (int i = 0; i < 4; ++i) d = std::max(d, std::abs(a.sigma[i] - b.sigma[i]));
  for (std::size_t i = 0; i < a.mean.size(); ++i) d = std::max(d, std::abs(a.mean[i] - b.mean[i]));
  for (std::size_t i = 0; i < a.cov.size(); ++i) d = std::max(d, std::abs(a.cov[i] - b.cov[i]));
  return d;
}

// ---- fit --------------------------------------------------------------------

struct FitArgs {
  std::string x, y, out, cov_mode = "exact";
  double gamma = 8.0;
  int nodes = 200;
  bool transpose = false;
  std::optional<unsigned> threads;
};

int cmd_fit(const FitArgs& a) {
  auto data = load_data(a.x, a.y, a.transpose);
  size_t n = 0, k = 0;
  check(nnpost_data_dims(data.get(), &n, &k), "data");

  nnpost_fit_options opts;
  nnpost_fit_options_init(&opts);
  opts.gamma = a.gamma;
  opts.nodes = a.nodes;
  opts.cov_mode = cov_mode_from(a.cov_mode);
  opts.threads = resolve_threads(a.threads);

  const auto fitted = timed_fit(data.get(), opts, nullptr);
  const auto s = read_summary(fitted.summary.get());

  JsonWriter j;
  j.begin_object();
  j.value("schema", "nnpost.summary");
  j.value("version", 1LL);
  j.value("n", static_cast<long long>(n));
  j.value("k", static_cast<long long>(k));
  j.value("gamma", a.gamma);
  j.value("cov_mode", a.cov_mode);
  j.begin_object("grid");
  j.numbers("sigma1", s.grid, 2);
  j.numbers("sigma2", s.grid + 2, 2);
  j.value("nodes_per_axis", static_cast<long long>(s.nodes));
  j.end_object();
  j.begin_object("timings");
  j.value("precompute_s", std::round(fitted.precompute_s * 1e3) / 1e3);
  j.value("integrate_s", std::round(fitted.integrate_s * 1e3) / 1e3);
  j.value("total_s", std::round((fitted.precompute_s + fitted.integrate_s) * 1e3) / 1e3);
  j.end_object();
  j.value("mean_sigma1", s.sigma[0]);
  j.value("mean_sigma2", s.sigma[1]);
  j.value("var_sigma1", s.sigma[2]);
  j.value("var_sigma2", s.sigma[3]);
  j.numbers("mean_beta", s.mean.data(), k);
  j.matrix("cov_beta", s.cov.data(), k, k);
  j.end_object();

  if (a.out.empty()) {
    std::fputs(j.str().c_str(), stdout);
  } else {
    nnpost_cli::write_text(a.out, j.str());
  }
  return exit_ok;
}

// ---- bench ------------------------------------------------------------------

struct BenchArgs {
  std::string sizes, arm = "trap", out, cov_mode = "diag";
  std::uint64_t seed = 1;
  int nodes = 200, ref_nodes = 500, repeat = 3;
  std::size_t draws = 10000, warmup = 1000;
  std::optional<unsigned> threads;
};

std::vector<std::pair<std::size_t, std::size_t>> parse_sizes(const std::string& text) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    unsigned long long n = 0, k = 0;
    char tail = 0;
    if (std::sscanf(item.c_str(), " %llux%llu %c", &n, &k, &tail) != 2 || n == 0 || k == 0) {
      throw CLI::ValidationError("--sizes", "expected NxK[,NxK...], got '" + item + "'");
    }
    out.emplace_back(n, k);
  }
  if (out.empty()) throw CLI::ValidationError("--sizes", "no sizes given");
  return out;
}

std::string oom_hint(std::size_t n, std::size_t k) {
  const double gib = 3.0 * 8.0 * static_cast<double>(n) * static_cast<double>(k) / (1 << 30);
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "%zux%zu needs roughly %.1f GiB for X and its factorization; "
                "try a smaller size or fewer concurrent jobs",
                n, k, gib);
  return buf;
}

struct BenchRow {
  std::size_t n, k;
  double precompute_s, integrate_s, total_s, max_error;
  double mcmc_time_s = NAN, mcmc_error = NAN;
};

BenchRow bench_one(std::size_t n, std::size_t k, const BenchArgs& a) {
  nnpost_data* raw = nullptr;
  check(nnpost_data_generate(n, k, a.seed, &raw, nullptr), "generate");
  DataPtr data(raw);

  nnpost_fit_options opts;
  nnpost_fit_options_init(&opts);
  opts.nodes = a.nodes;
  opts.cov_mode = cov_mode_from(a.cov_mode);
  opts.threads = resolve_threads(a.threads);

  BenchRow row{n, k, 0, 0, 0, 0};
  BasisPtr basis;
  SummaryPtr summary;
  for (int r = 0; r < a.repeat; ++r) {
    auto f = timed_fit(data.get(), opts, &basis);
    const double total = f.precompute_s + f.integrate_s;
    if (r == 0 || total < row.total_s) {
      row.precompute_s = f.precompute_s;
      row.integrate_s = f.integrate_s;
      row.total_s = total;
    }
    summary = std::move(f.summary);
  }

  nnpost_fit_options ref_opts = opts;
  ref_opts.nodes = a.ref_nodes;
  nnpost_summary* ref_raw = nullptr;
  check(nnpost_fit(basis.get(), &ref_opts, &ref_raw), "reference fit");
  SummaryPtr ref(ref_raw);
  const auto got = read_summary(summary.get());
  const auto truth = read_summary(ref.get());
  row.max_error = max_abs_diff(got, truth);

  if (a.arm != "trap") {
    nnpost_sampler_options so;
    nnpost_sampler_options_init(&so);
    so.draws = a.draws;
    so.warmup = a.warmup;
    so.seed = a.seed;
    so.beta_seed = a.seed + 1;
    const auto t = Clock::now();
    nnpost_basis* b2 = nullptr;
    check(nnpost_basis_create(data.get(), &b2), "factorize");
    BasisPtr mcmc_basis(b2);
    nnpost_chain* chain_raw = nullptr;
    check(nnpost_sample(mcmc_basis.get(), &so, &chain_raw), "sample");
    ChainPtr chain(chain_raw);
    std::vector<double> mean(2 + k), mcse(2 + k);
    check(nnpost_chain_estimates(chain.get(), mean.data(), mcse.data()), "estimates");
    row.mcmc_time_s = seconds_since(t);
    double err = std::max(std::abs(mean[0] - truth.sigma[0]), std::abs(mean[1] - truth.sigma[1]));
    for (std::size_t i = 0; i < k; ++i) err = std::max(err, std::abs(mean[2 + i] - truth.mean[i]));
    row.mcmc_error = err;
  }
  return row;
}

int cmd_bench(const BenchArgs& a) {
  const auto sizes = parse_sizes(a.sizes);
  std::vector<BenchRow> rows;
  for (const auto& [n, k] : sizes) {
    try {
      rows.push_back(bench_one(n, k, a));
    } catch (const LibError& e) {
      if (e.status == NNPOST_ERR_ALLOC) {
        throw LibError{e.status, e.message + "\n" + oom_hint(n, k)};
      }
      throw;
    } catch (const std::bad_alloc&) {
      throw LibError{NNPOST_ERR_ALLOC, "out of memory\n" + oom_hint(n, k)};
    }
  }

  const bool trap = a.arm != "svd-mcmc";
  const bool mcmc = a.arm != "trap";
  std::vector<std::string> header{"n", "k"};
  if (trap) {
    for (const char* c : {"nodes", "max_error", "precompute_s", "integrate_s", "total_s"})
      header.emplace_back(c);
  }
  if (mcmc) {
    for (const char* c : {"trap_time_s", "trap_error", "svd_mcmc_time_s", "svd_mcmc_error"})
      header.emplace_back(c);
  }

  auto cells = [&](const BenchRow& r) {
    char err[32];
    std::vector<std::string> c{std::to_string(r.n), std::to_string(r.k)};
    if (trap) {
      std::snprintf(err, sizeof err, "%.3e", r.max_error);
      c.insert(c.end(), {std::to_string(a.nodes), err, fixed3(r.precompute_s),
                         fixed3(r.integrate_s), fixed3(r.total_s)});
    }
    if (mcmc) {
      char merr[32];
      std::snprintf(err, sizeof err, "%.3e", r.max_error);
      std::snprintf(merr, sizeof merr, "%.3e", r.mcmc_error);
      c.insert(c.end(), {fixed3(r.total_s), err, fixed3(r.mcmc_time_s), merr});
    }
    return c;
  };

  std::FILE* table_stream = a.out.empty() ? stderr : stdout;
  std::vector<std::size_t> width(header.size());
  std::vector<std::vector<std::string>> all{header};
  for (const auto& r : rows) all.push_back(cells(r));
  for (const auto& line : all)
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  for (const auto& line : all) {
    for (std::size_t i = 0; i < line.size(); ++i)
      std::fprintf(table_stream, "%s%*s", i ? "  " : "", static_cast<int>(width[i]), line[i].c_str());
    std::fputc('\n', table_stream);
  }

  auto csv = a.out.empty() ? std::make_unique<CsvWriter>(stdout) : std::make_unique<CsvWriter>(a.out);
  csv->header(header);
  for (const auto& r : rows) csv->row(cells(r));
  csv->close();
  return exit_ok;
}

// ---- gen --------------------------------------------------------------------

struct GenArgs {
  std::size_t n = 0, k = 0;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

int cmd_gen(const GenArgs& a) {
  nnpost_data* raw = nullptr;
  std::vector<double> beta(a.k);
  check(nnpost_data_generate(a.n, a.k, a.seed, &raw, beta.data()), "generate");
  DataPtr data(raw);
  std::vector<double> x(a.n * a.k), y(a.n);
  check(nnpost_data_copy_x(data.get(), x.data()), "copy");
  check(nnpost_data_copy_y(data.get(), y.data()), "copy");

  const std::filesystem::path dir(a.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw nnpost_cli::IoError("cannot create " + a.out_dir + ": " + ec.message());

  CsvWriter xw((dir / "X.csv").string());
  std::vector<std::string> names;
  for (std::size_t j = 0; j < a.k; ++j) names.push_back("x" + std::to_string(j + 1));
  xw.header(names);
  for (std::size_t i = 0; i < a.n; ++i)
    xw.row(std::vector<double>(x.begin() + i * a.k, x.begin() + (i + 1) * a.k));
  xw.close();

  CsvWriter yw((dir / "y.csv").string());
  yw.header({"y"});
  for (double v : y) yw.row(std::vector<double>{v});
  yw.close();

  CsvWriter bw((dir / "beta_true.csv").string());
  bw.header({"beta"});
  for (double v : beta) bw.row(std::vector<double>{v});
  bw.close();
  return exit_ok;
}

// ---- sample -----------------------------------------------------------------

struct SampleArgs {
  std::string x, y, out;
  std::size_t draws = 10000, warmup = 1000;
  std::uint64_t seed = 0;
  double gamma = 8.0;
  bool transpose = false;
};

int cmd_sample(const SampleArgs& a) {
  auto data = load_data(a.x, a.y, a.transpose);
  nnpost_basis* braw = nullptr;
  check(nnpost_basis_create(data.get(), &braw), "factorize");
  BasisPtr basis(braw);

  nnpost_sampler_options so;
  nnpost_sampler_options_init(&so);
  so.gamma = a.gamma;
  so.draws = a.draws;
  so.warmup = a.warmup;
  so.seed = a.seed;
  so.beta_seed = a.seed + 1;
  nnpost_chain* craw = nullptr;
  check(nnpost_sample(basis.get(), &so, &craw), "sample");
  ChainPtr chain(craw);

  const std::size_t draws = nnpost_chain_draws(chain.get());
  const std::size_t k = nnpost_chain_k(chain.get());
  std::vector<double> s1(draws), s2(draws), beta(draws * k), mean(2 + k), mcse(2 + k);
  check(nnpost_chain_sigma(chain.get(), s1.data(), s2.data()), "chain");
  check(nnpost_chain_beta(chain.get(), beta.data()), "chain");
  check(nnpost_chain_estimates(chain.get(), mean.data(), mcse.data()), "chain");

  if (!a.out.empty()) {
    CsvWriter w(a.out);
    std::vector<std::string> names{"sigma1", "sigma2"};
    for (std::size_t j = 0; j < k; ++j) names.push_back("beta" + std::to_string(j + 1));
    w.header(names);
    std::vector<double> row(2 + k);
    for (std::size_t i = 0; i < draws; ++i) {
      row[0] = s1[i];
      row[1] = s2[i];
      std::copy(beta.begin() + i * k, beta.begin() + (i + 1) * k, row.begin() + 2);
      w.row(row);
    }
    w.close();
  }

  std::printf("draws %zu  acceptance %.3f\n", draws, nnpost_chain_acceptance(chain.get()));
  std::printf("%-10s %22s %12s\n", "param", "mean", "mcse");
  for (std::size_t i = 0; i < 2 + k; ++i) {
    const std::string name = i < 2 ? "sigma" + std::to_string(i + 1) : "beta" + std::to_string(i - 1);
    std::printf("%-10s %22.15g %12.3e\n", name.c_str(), mean[i], mcse[i]);
  }
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Posterior moments for normal-normal regression models"};
  app.require_subcommand(1);
  // One file can hold defaults for every subcommand under [fit], [bench],
  // [gen] and [sample]; fallthrough lets --config follow the subcommand.
  app.set_config("--config", "", "INI/TOML file of option defaults, one section per subcommand");
  app.fallthrough();

  const std::vector<std::string> cov_modes{"exact", "paper", "diag"};

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Quadrature fit of X.csv / y.csv, JSON summary");
  fit_cmd->fallthrough();
  fit_cmd->add_option("--x", fit.x, "Design matrix CSV (n rows, k columns)")->required();
  fit_cmd->add_option("--y", fit.y, "Response CSV (one column)")->required();
  fit_cmd->add_option("--gamma", fit.gamma, "Prior strength on log sigma1")->capture_default_str();
  fit_cmd->add_option("--nodes", fit.nodes, "Trapezoid nodes per axis")
      ->capture_default_str()
      ->check(CLI::Range(2, 1 << 20));
  fit_cmd->add_option("--cov-mode", fit.cov_mode, "Covariance of beta")
      ->capture_default_str()
      ->check(CLI::IsMember(cov_modes));
  fit_cmd->add_option("--out", fit.out, "Output JSON (default stdout)");
  fit_cmd->add_flag("--transpose", fit.transpose, "X.csv is stored k x n");
  fit_cmd->add_option("--threads", fit.threads, "Worker threads (0 = all cores)");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Timing and accuracy table over synthetic sizes");
  bench_cmd->fallthrough();
  bench_cmd->add_option("--sizes", bench.sizes, "Comma list of NxK")->required();
  bench_cmd->add_option("--arm", bench.arm, "Which methods to run")
      ->capture_default_str()
      ->check(CLI::IsMember({"trap", "svd-mcmc", "both"}));
  bench_cmd->add_option("--seed", bench.seed, "Data and sampler seed")->capture_default_str();
  bench_cmd->add_option("--out", bench.out, "CSV output (default stdout; table then goes to stderr)");
  bench_cmd->add_option("--nodes", bench.nodes, "Nodes per axis")->capture_default_str()->check(CLI::Range(2, 1 << 20));
  bench_cmd->add_option("--ref-nodes", bench.ref_nodes, "Nodes per axis for the reference fit")
      ->capture_default_str()
      ->check(CLI::Range(2, 1 << 20));
  bench_cmd->add_option("--repeat", bench.repeat, "Timing repetitions (minimum is reported)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--cov-mode", bench.cov_mode, "Covariance of beta")
      ->capture_default_str()
      ->check(CLI::IsMember(cov_modes));
  bench_cmd->add_option("--draws", bench.draws, "Sampler draws")->capture_default_str();
  bench_cmd->add_option("--warmup", bench.warmup, "Sampler warmup")->capture_default_str();
  bench_cmd->add_option("--threads", bench.threads, "Worker threads (0 = all cores)");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write synthetic X.csv, y.csv, beta_true.csv");
  gen_cmd->fallthrough();
  gen_cmd->add_option("--n", gen.n, "Observations")->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--k", gen.k, "Predictors")->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.seed, "Seed")->capture_default_str();
  gen_cmd->add_option("--out-dir", gen.out_dir, "Output directory")->capture_default_str();

  SampleArgs sample;
  auto* sample_cmd = app.add_subcommand("sample", "Random-walk Metropolis over (sigma1, sigma2)");
  sample_cmd->fallthrough();
  sample_cmd->add_option("--x", sample.x, "Design matrix CSV")->required();
  sample_cmd->add_option("--y", sample.y, "Response CSV")->required();
  sample_cmd->add_option("--draws", sample.draws, "Measured draws")->capture_default_str()->check(CLI::PositiveNumber);
  sample_cmd->add_option("--warmup", sample.warmup, "Warmup draws")->capture_default_str();
  sample_cmd->add_option("--seed", sample.seed, "Seed")->capture_default_str();
  sample_cmd->add_option("--gamma", sample.gamma, "Prior strength on log sigma1")->capture_default_str();
  sample_cmd->add_option("--out", sample.out, "Chain CSV");
  sample_cmd->add_flag("--transpose", sample.transpose, "X.csv is stored k x n");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_usage;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit);
    if (*bench_cmd) return cmd_bench(bench);
    if (*gen_cmd) return cmd_gen(gen);
    if (*sample_cmd) return cmd_sample(sample);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_usage;
  } catch (const nnpost_cli::ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return exit_parse;
  } catch (const nnpost_cli::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return exit_io;
  } catch (const LibError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return exit_code(e.status);
  } catch (const std::bad_alloc&) {
    std::fprintf(stderr, "error: out of memory\n");
    return exit_alloc;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return exit_internal;
  }
  return exit_usage;
}
