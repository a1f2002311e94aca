#include "levymix/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "levymix/statistic.hpp"
#include "levymix/variance_profile.hpp"

namespace levymix {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

std::vector<long> parse_long_list(const std::string& s) {
  std::vector<long> out;
  for (double v : parse_double_list(s)) out.push_back(static_cast<long>(v));
  return out;
}

std::vector<std::vector<double>> parse_vector_groups(const std::string& s) {
  std::vector<std::vector<double>> out;
  std::stringstream ss(s);
  std::string group;
  while (std::getline(ss, group, ';')) {
    group = trim(group);
    if (!group.empty()) out.push_back(parse_double_list(group));
  }
  return out;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string config_fingerprint(const ExperimentConfig& c) {
  std::ostringstream os;
  os << c.model_kind << '|' << format_float(c.alpha) << '|' << format_float(c.scale) << '|' << c.dim
     << '|' << c.weight_kind << '|' << format_float(c.weight_amplitude) << '|';
  for (double v : c.weight_theta) os << format_float(v) << ',';
  os << '|';
  for (const auto& u : c.frequencies) {
    for (double v : u) os << format_float(v) << ',';
    os << ';';
  }
  os << '|' << format_float(c.lambda) << '|';
  for (double v : c.asym_frequency) os << format_float(v) << ',';
  os << '|' << c.window << '|' << format_float(c.horizon) << '|';
  for (long n : c.n_list) os << n << ',';
  os << '|' << c.limit_grid_n << '|' << c.replicates << '|' << c.master_seed << '|' << c.family_size;
  return std::to_string(fnv1a(os.str()));
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
};

}  // namespace

std::string format_float(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void ExperimentConfig::validate() const {
  model().validate();
  if (n_list.empty()) throw std::invalid_argument("config: n_list must be nonempty");
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (n_list[i] <= n_list[i - 1])
      throw std::invalid_argument("config: n_list must be strictly increasing");
  if (replicates < 100) throw std::invalid_argument("config: replicates must be >= 100");
  if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("config: horizon must be positive");
  if (family_size < 1) throw std::invalid_argument("config: family_size must be >= 1");
  functional();  // throws on malformed frequencies
  build_default_family(family_size);  // certifiability
}

bool ExperimentConfig::h2() const {
  if (h2_override) return *h2_override;
  // symmetric g under a symmetric law: the compatibility moment vanishes
  return symmetric() && alpha > 1.0;
}

bool ExperimentConfig::h3() const {
  if (h3_override) return *h3_override;
  // Gaussian tails beat every polynomial: H3 holds for the alpha = 2 member
  return alpha == 2.0 && h2();
}

LevyModel ExperimentConfig::model() const {
  if (model_kind == "stable") return LevyModel::stable(alpha, scale, dim);
  if (model_kind == "brownian") return LevyModel::brownian(scale, dim);
  throw std::invalid_argument("config: model kind must be stable or brownian");
}

std::shared_ptr<CosineFunctional> ExperimentConfig::functional() const {
  WeightFunction w;
  std::vector<double> theta = weight_theta;
  if (theta.empty()) theta.assign(static_cast<std::size_t>(dim), 1.0);
  if (weight_kind == "cosine")
    w = WeightFunction::cosine(theta, weight_amplitude);
  else if (weight_kind == "constant")
    w = WeightFunction::constant(weight_amplitude, dim);
  else if (weight_kind == "inverse_quadratic")
    w = WeightFunction::inverse_quadratic(dim, weight_amplitude);
  else
    throw std::invalid_argument("config: weight kind must be cosine, constant or inverse_quadratic");

  std::vector<std::vector<double>> freqs = frequencies;
  if (freqs.empty()) {
    freqs.assign(static_cast<std::size_t>(window) + 1, std::vector<double>(dim, 1.0));
  }
  if (static_cast<int>(freqs.size()) != window + 1)
    throw std::invalid_argument("config: need window + 1 frequency vectors");
  return std::make_shared<CosineFunctional>(w, freqs, lambda, asym_frequency);
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig c;
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config: expected key = value, got: " + line);
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  if (auto v = take("model.kind")) c.model_kind = *v;
  if (auto v = take("model.alpha")) c.alpha = std::stod(*v);
  if (auto v = take("model.scale")) c.scale = std::stod(*v);
  if (auto v = take("model.dim")) c.dim = std::stoi(*v);
  if (auto v = take("functional.weight")) c.weight_kind = *v;
  if (auto v = take("functional.weight_theta")) c.weight_theta = parse_double_list(*v);
  if (auto v = take("functional.weight_amplitude")) c.weight_amplitude = std::stod(*v);
  if (auto v = take("functional.frequencies")) c.frequencies = parse_vector_groups(*v);
  if (auto v = take("functional.lambda")) c.lambda = std::stod(*v);
  if (auto v = take("functional.asym_frequency")) c.asym_frequency = parse_double_list(*v);
  if (auto v = take("functional.m")) c.window = std::stoi(*v);
  if (auto v = take("grid.t")) c.horizon = std::stod(*v);
  if (auto v = take("grid.n_list")) c.n_list = parse_long_list(*v);
  if (auto v = take("grid.limit_n")) c.limit_grid_n = std::stol(*v);
  if (auto v = take("mc.replicates")) c.replicates = std::stol(*v);
  if (auto v = take("mc.master_seed")) c.master_seed = std::stoull(*v);
  if (auto v = take("mc.workers")) c.workers = std::stoi(*v);
  if (auto v = take("metric.family_size")) c.family_size = static_cast<std::size_t>(std::stoul(*v));
  if (auto v = take("hypotheses.h2")) {
    if (*v != "auto") c.h2_override = (*v == "true" || *v == "1");
  }
  if (auto v = take("hypotheses.h3")) {
    if (*v != "auto") c.h3_override = (*v == "true" || *v == "1");
  }
  if (auto v = take("probes.times")) c.check_times = parse_double_list(*v);
  if (auto v = take("output.directory")) c.output_dir = *v;

  if (!kv.empty()) throw std::invalid_argument("config: unknown key: " + kv.begin()->first);
  return c;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

double predicted_rate(double alpha, bool symmetric_or_h2, bool h3, long n) {
  const double nn = static_cast<double>(n);
  if (alpha < 1.0) return 1.0 / std::sqrt(nn);
  if (alpha == 1.0) return std::log(nn) / std::sqrt(nn);
  if (alpha < 2.0) {
    if (symmetric_or_h2) return 1.0 / std::sqrt(nn);
    return std::pow(nn, 0.5 - 1.0 / alpha);
  }
  // alpha = 2
  if (h3) return 1.0 / std::sqrt(nn);
  if (symmetric_or_h2) return std::pow(std::log(nn), 1.5) / std::sqrt(nn);
  return 1.0;  // no vanishing rate without the compatibility hypothesis
}

double predicted_exponent(double alpha, bool symmetric_or_h2, bool h3) {
  if (alpha < 1.0) return -0.5;
  if (alpha == 1.0) return std::numeric_limits<double>::quiet_NaN();
  if (alpha < 2.0) return symmetric_or_h2 ? -0.5 : 0.5 - 1.0 / alpha;
  if (h3) return -0.5;
  if (symmetric_or_h2) return std::numeric_limits<double>::quiet_NaN();
  return 0.0;
}

bool rate_has_log_factor(double alpha, bool symmetric_or_h2, bool h3) {
  if (alpha == 1.0) return true;
  if (alpha == 2.0 && symmetric_or_h2 && !h3) return true;
  return false;
}

std::string rate_csv_header() {
  return "n,alpha,m,symmetric,h2,h3,d_hat,d_stderr,r_n,beta_n";
}

std::string format_rate_row(const RateRow& r) {
  std::ostringstream os;
  os << r.n << ',' << format_float(r.alpha) << ',' << r.m << ',' << (r.symmetric ? 1 : 0) << ','
     << (r.h2 ? 1 : 0) << ',' << (r.h3 ? 1 : 0) << ',' << format_float(r.d_hat) << ','
     << format_float(r.d_stderr) << ',' << format_float(r.r_n) << ',' << format_float(r.beta_n);
  return os.str();
}

std::vector<RateRow> read_rate_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open CSV: " + path.string());
  std::vector<RateRow> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != rate_csv_header()) throw std::runtime_error("unexpected CSV header: " + line);
      header_seen = true;
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 10) throw std::runtime_error("malformed CSV row: " + line);
    RateRow r;
    r.n = std::stol(cells[0]);
    r.alpha = std::stod(cells[1]);
    r.m = std::stoi(cells[2]);
    r.symmetric = cells[3] == "1";
    r.h2 = cells[4] == "1";
    r.h3 = cells[5] == "1";
    r.d_hat = std::stod(cells[6]);
    r.d_stderr = std::stod(cells[7]);
    r.r_n = std::stod(cells[8]);
    r.beta_n = std::stod(cells[9]);
    rows.push_back(r);
  }
  if (!header_seen) throw std::runtime_error("CSV has no header: " + path.string());
  return rows;
}

RateExperimentResult run_rate_experiment(const ExperimentConfig& config) {
  config.validate();
  const LevyModel model = config.model();
  const auto g = config.functional();
  const CenteredFunctional centered = CenteredFunctional::exact(g, model);
  const VarianceProfile profile = VarianceProfile::closed_form(g, model);
  const TestFamily family = build_default_family(config.family_size);

  std::filesystem::create_directories(config.output_dir);
  const std::filesystem::path csv_path = config.output_dir / "rates.csv";
  const std::filesystem::path partial_path = config.output_dir / "rates.partial.csv";
  const std::filesystem::path timing_path = config.output_dir / "rates_timing.csv";
  const std::string fingerprint = config_fingerprint(config);

  // resume completed rows from a matching interrupted run
  std::vector<RateRow> done;
  if (std::filesystem::exists(partial_path)) {
    std::ifstream in(partial_path);
    std::string first;
    std::getline(in, first);
    if (first == "# config " + fingerprint) {
      in.close();
      try {
        done = read_rate_csv(partial_path);
      } catch (const std::exception&) {
        done.clear();
      }
    }
  }

  // one matched-size limit batch, reused across the n rows; drawn on the
  // finest grid so the target law does not move with n
  const long limit_n = config.limit_grid_n > 0 ? config.limit_grid_n : config.n_list.back();
  GridSpec limit_grid;
  limit_grid.n = limit_n;
  limit_grid.horizon = config.horizon;
  limit_grid.window = config.window;
  limit_grid.dim = config.dim;
  const auto limit_samples =
      sample_limit(model, profile, limit_grid, config.replicates, config.master_seed, config.workers);
  std::vector<double> q;
  q.reserve(limit_samples.size());
  for (const auto& s : limit_samples) q.push_back(s.value);

  const bool h2 = config.h2();
  const bool h3 = config.h3();
  const bool sym_or_h2 = config.symmetric() || h2;

  std::ofstream partial(partial_path, std::ios::trunc);
  partial << "# config " << fingerprint << "\n" << rate_csv_header() << "\n";
  for (const auto& r : done) partial << format_rate_row(r) << "\n";
  partial.flush();

  std::ofstream timing(timing_path, std::ios::trunc);
  timing << "n,wall_ms\n";

  RateExperimentResult result;
  result.rows = done;
  for (long n : config.n_list) {
    if (std::find_if(done.begin(), done.end(), [n](const RateRow& r) { return r.n == n; }) != done.end())
      continue;
    Timer timer;
    GridSpec grid;
    grid.n = n;
    grid.horizon = config.horizon;
    grid.window = config.window;
    grid.dim = config.dim;
    const auto z_samples =
        sample_Z_batch(model, centered, grid, config.replicates, config.master_seed, config.workers);
    std::vector<double> p;
    p.reserve(z_samples.size());
    for (const auto& s : z_samples) p.push_back(s.value);

    const DistanceEstimate d = estimate_distance(p, q, family);

    RateRow row;
    row.n = n;
    row.alpha = model.alpha;
    row.m = config.window;
    row.symmetric = config.symmetric();
    row.h2 = h2;
    row.h3 = h3;
    row.d_hat = d.d_hat;
    row.d_stderr = d.stderr_;
    row.beta_n = 0.0;  // closed-form profile: the finite-n and limit profiles coincide
    row.r_n = predicted_rate(model.alpha, sym_or_h2, h3, n) + row.beta_n;
    result.rows.push_back(row);

    partial << format_rate_row(row) << "\n";
    partial.flush();
    timing << n << ',' << format_float(timer.ms()) << "\n";
    timing.flush();
  }
  partial.close();

  std::sort(result.rows.begin(), result.rows.end(),
            [](const RateRow& a, const RateRow& b) { return a.n < b.n; });
  std::ofstream out(csv_path, std::ios::trunc);
  out << rate_csv_header() << "\n";
  for (const auto& r : result.rows) out << format_rate_row(r) << "\n";
  out.close();
  std::filesystem::remove(partial_path);

  result.csv_path = csv_path;
  result.timing_path = timing_path;
  return result;
}

RateVerdict fit_rate(const std::filesystem::path& csv_path) {
  const auto rows = read_rate_csv(csv_path);
  if (rows.empty()) throw std::runtime_error("fit_rate: CSV has no data rows");

  RateVerdict verdict;
  const bool sym_or_h2 = rows.front().symmetric || rows.front().h2;
  verdict.log_factor_mode = rate_has_log_factor(rows.front().alpha, sym_or_h2, rows.front().h3);
  verdict.predicted_exponent =
      verdict.log_factor_mode ? 1.0 : predicted_exponent(rows.front().alpha, sym_or_h2, rows.front().h3);

  std::vector<double> lx, ly, w;
  for (const auto& r : rows) {
    if (!(r.d_hat > 3.0 * r.d_stderr)) continue;
    lx.push_back(verdict.log_factor_mode ? std::log(r.r_n) : std::log(static_cast<double>(r.n)));
    ly.push_back(std::log(r.d_hat));
    const double rel = std::max(1e-12, r.d_stderr / r.d_hat);
    w.push_back(1.0 / (rel * rel));
  }
  verdict.usable_rows = static_cast<long>(lx.size());
  if (verdict.usable_rows < 4) {
    verdict.underpowered = true;
    return verdict;
  }

  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sw += w[i];
    sx += w[i] * lx[i];
    sy += w[i] * ly[i];
  }
  const double xbar = sx / sw, ybar = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += w[i] * (lx[i] - xbar) * (lx[i] - xbar);
    sxy += w[i] * (lx[i] - xbar) * (ly[i] - ybar);
  }
  verdict.fitted_slope = sxy / sxx;
  double rss = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - ybar - verdict.fitted_slope * (lx[i] - xbar);
    rss += w[i] * r * r;
  }
  const double dof = std::max(1.0, static_cast<double>(lx.size()) - 2.0);
  const double se = std::sqrt(rss / dof / sxx);
  verdict.slope_lo = verdict.fitted_slope - 2.0 * se;
  verdict.slope_hi = verdict.fitted_slope + 2.0 * se;

  // bound check: calibrate C on the smallest n, then require
  // d_hat(n) <= C r_n within a 3 SE cushion on every row
  const RateRow& first = rows.front();
  verdict.c_hat = first.d_hat / first.r_n;
  verdict.bound_respected = true;
  for (const auto& r : rows)
    verdict.bound_respected =
        verdict.bound_respected && r.d_hat <= verdict.c_hat * r.r_n + 3.0 * r.d_stderr;
  return verdict;
}

PlotArtifacts emit_plot_data(const std::filesystem::path& csv_path) {
  const auto rows = read_rate_csv(csv_path);
  if (rows.empty()) throw std::runtime_error("emit_plot_data: CSV has no data rows");

  PlotArtifacts art;
  const std::filesystem::path dir = csv_path.parent_path();
  const std::string stem = csv_path.stem().string();
  art.dhat_path = dir / (stem + "_dhat.dat");
  art.rn_path = dir / (stem + "_rn.dat");
  art.svg_path = dir / (stem + ".svg");

  std::ofstream dhat(art.dhat_path, std::ios::trunc);
  std::ofstream rn(art.rn_path, std::ios::trunc);
  for (const auto& r : rows) {
    const double ln = std::log(static_cast<double>(r.n));
    dhat << format_float(ln) << ' ' << format_float(std::log(r.d_hat)) << "\n";
    rn << format_float(ln) << ' ' << format_float(std::log(r.r_n)) << "\n";
  }
  dhat.close();
  rn.close();

  // minimal line chart: log n on the x axis, log d_hat and log r_n traces
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  auto see = [&](double x, double y) {
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  };
  for (const auto& r : rows) {
    see(std::log(static_cast<double>(r.n)), std::log(r.d_hat));
    see(std::log(static_cast<double>(r.n)), std::log(r.r_n));
  }
  if (xmax <= xmin) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  if (ymax <= ymin) {
    ymin -= 1.0;
    ymax += 1.0;
  }
  const double width = 480, height = 320, pad = 40;
  auto px = [&](double x) { return pad + (x - xmin) / (xmax - xmin) * (width - 2 * pad); };
  auto py = [&](double y) { return height - pad - (y - ymin) / (ymax - ymin) * (height - 2 * pad); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  auto trace = [&](auto value_of, const char* color) {
    if (rows.size() == 1) {
      svg << "<circle cx=\"" << format_float(px(std::log(static_cast<double>(rows[0].n)))) << "\" cy=\""
          << format_float(py(std::log(value_of(rows[0])))) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      return;
    }
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    for (const auto& r : rows)
      svg << format_float(px(std::log(static_cast<double>(r.n)))) << ','
          << format_float(py(std::log(value_of(r)))) << ' ';
    svg << "\"/>\n";
  };
  trace([](const RateRow& r) { return r.d_hat; }, "#1f77b4");
  trace([](const RateRow& r) { return r.r_n; }, "#d62728");
  svg << "<text x=\"" << pad << "\" y=\"16\" font-size=\"12\">log d_hat (blue) and log r_n (red) vs "
         "log n</text>\n";
  svg << "</svg>\n";
  std::ofstream out(art.svg_path, std::ios::trunc);
  out << svg.str();
  return art;
}

}  // namespace levymix
